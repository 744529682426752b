//! Scratch calibration harness (not part of the deliverable surface).

use nadbench::dataio::make_toy2d;
use nadbench::models::{fit_dae, CenterMode};
use nadbench::numkernel::SeededRng;
use nadbench::protocol::{contaminate, roc_auc};
use nadbench::{DaeConfig, Matrix};

fn toy_variant_auc(seed: u64, lambda: f64, mode: CenterMode, epochs: usize, batch: usize) -> f64 {
    let root = SeededRng::new(seed);
    let mut data_rng = root.stream("data");
    // Train pool: 1000 normals + anomalies to draw contamination from.
    let train_pool = make_toy2d(1000, 400, &mut data_rng);
    let normals: Vec<usize> = (0..1000).collect();
    let pool: Vec<usize> = (1000..1400).collect();
    let mut c_rng = root.stream("contaminate");
    let (rows, _ach) = contaminate(&normals, &pool, 0.1, &mut c_rng).unwrap();
    let train = train_pool.features.select_rows(&rows);

    let mut test_rng = root.stream("test");
    let test = make_toy2d(1000, 500, &mut test_rng);

    let mut cfg = DaeConfig::with_shape(2, &[64, 32], 2);
    cfg.lambda = lambda;
    cfg.center_mode = mode;
    cfg.epochs = epochs;
    cfg.batch_size = batch;

    let mut fit_rng = root.stream("fit");
    let det = fit_dae(&cfg, &train, &mut fit_rng).unwrap();
    let scores = nadbench::models::Detector::score(&det, &test.features).unwrap();
    roc_auc(&scores, &test.labels).unwrap().auc
}

fn toy_study(lambda: f64, epochs: usize, batch: usize) {
    let mut ok_order = 0;
    let (mut sum_l, mut sum_m, mut sum_z) = (0.0, 0.0, 0.0);
    for seed in 0..10u64 {
        let z = toy_variant_auc(seed, 0.0, CenterMode::FixedZero, epochs, batch);
        let m = toy_variant_auc(seed, lambda, CenterMode::Mean, epochs, batch);
        let l = toy_variant_auc(seed, lambda, CenterMode::Learnable, epochs, batch);
        let ordered = l >= m && m >= z;
        if ordered {
            ok_order += 1;
        }
        println!("seed {seed}: lambda0 {z:.4}  mean {m:.4}  learnable {l:.4}  ordered={ordered}");
        sum_l += l;
        sum_m += m;
        sum_z += z;
    }
    println!(
        "lambda={lambda} epochs={epochs} batch={batch}: ordering {ok_order}/10, mean learnable {:.4}, mean mean {:.4}, mean lambda0 {:.4}, gap {:.4}",
        sum_l / 10.0,
        sum_m / 10.0,
        sum_z / 10.0,
        (sum_l - sum_z) / 10.0
    );
}


fn diagnose(seed: u64, lambda: f64, epochs: usize, batch: usize) {
    use nadbench::models::Detector;
    let root = SeededRng::new(seed);
    let mut data_rng = root.stream("data");
    let train_pool = make_toy2d(1000, 400, &mut data_rng);
    let normals: Vec<usize> = (0..1000).collect();
    let pool: Vec<usize> = (1000..1400).collect();
    let mut c_rng = root.stream("contaminate");
    let (rows, _ach) = contaminate(&normals, &pool, 0.1, &mut c_rng).unwrap();
    let train = train_pool.features.select_rows(&rows);
    let n_train_normals = 1000usize;

    let mut test_rng = root.stream("test");
    let test = make_toy2d(1000, 500, &mut test_rng);

    for (name, lam, mode) in [
        ("lambda0 ", 0.0, CenterMode::FixedZero),
        ("mean    ", lambda, CenterMode::Mean),
        ("learn   ", lambda, CenterMode::Learnable),
    ] {
        let mut cfg = DaeConfig::with_shape(2, &[64, 32], 2);
        cfg.lambda = lam;
        cfg.center_mode = mode;
        cfg.epochs = epochs;
        cfg.batch_size = batch;
        let mut fit_rng = root.stream("fit");
        let det = fit_dae(&cfg, &train, &mut fit_rng).unwrap();
        let z = det.encode(&train).unwrap();
        let mut nm = [0.0f64; 2];
        let mut cm = [0.0f64; 2];
        for i in 0..z.rows() {
            let r = z.row(i);
            if i < n_train_normals { nm[0] += r[0]; nm[1] += r[1]; } else { cm[0] += r[0]; cm[1] += r[1]; }
        }
        nm[0] /= n_train_normals as f64; nm[1] /= n_train_normals as f64;
        let ncont = z.rows() - n_train_normals;
        cm[0] /= ncont as f64; cm[1] /= ncont as f64;
        let c = det.center().unwrap().c.clone();
        let scores = det.score(&test.features).unwrap();
        let auc = roc_auc(&scores, &test.labels).unwrap().auc;
        // Mean score per class on the test set.
        let (mut s_n, mut s_a, mut k_n, mut k_a) = (0.0, 0.0, 0, 0);
        for (s, &l) in scores.iter().zip(&test.labels) {
            if l { s_a += s; k_a += 1; } else { s_n += s; k_n += 1; }
        }
        println!(
            "{name} auc {auc:.4} c ({:+.3},{:+.3}) z_norm ({:+.3},{:+.3}) z_cont ({:+.3},{:+.3}) score n {:.4} a {:.4}",
            c[0], c[1], nm[0], nm[1], cm[0], cm[1], s_n / k_n as f64, s_a / k_a as f64
        );
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lambda: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let epochs: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let batch: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(64);
    let t0 = std::time::Instant::now();
    if args.get(4).map(|s| s == "diag").unwrap_or(false) {
        for seed in 0..4u64 { println!("--- seed {seed}"); diagnose(seed, lambda, epochs, batch); }
    } else {
        toy_study(lambda, epochs, batch);
    }
    println!("elapsed {:?}", t0.elapsed());
    let _ = Matrix::zeros(1, 1);
}
