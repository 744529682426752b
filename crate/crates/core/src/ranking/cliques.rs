use super::RankError;

/// Maximal cliques of the "not statistically different" graph.
///
/// Vertices are models; an edge joins a pair whose adjusted p-value is at or
/// above `level`. Every model appears in at least one clique (an isolated
/// model forms a singleton). Clique members are ordered by average rank, and
/// cliques by their best member's rank.
pub fn cd_groups(
    avg_ranks: &[f64],
    adjusted_p: &[Vec<f64>],
    level: f64,
) -> Result<Vec<Vec<usize>>, RankError> {
    let n = avg_ranks.len();
    if adjusted_p.len() != n || adjusted_p.iter().any(|row| row.len() != n) {
        return Err(RankError::Table(
            "pairwise matrix must be square and match the rank vector".into(),
        ));
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(RankError::Domain(format!(
            "significance level must be in [0, 1], got {level}"
        )));
    }
    let adjacent = |a: usize, b: usize| a != b && adjusted_p[a][b] >= level;

    // Bron-Kerbosch without pivoting; model counts are small.
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..n).collect();
    bron_kerbosch(&mut r, p, Vec::new(), &adjacent, &mut cliques);

    for clique in &mut cliques {
        clique.sort_by(|&a, &b| avg_ranks[a].total_cmp(&avg_ranks[b]));
    }
    cliques.sort_by(|a, b| {
        avg_ranks[a[0]]
            .total_cmp(&avg_ranks[b[0]])
            .then(a.len().cmp(&b.len()))
            .then(a.cmp(b))
    });
    Ok(cliques)
}

fn bron_kerbosch(
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    adjacent: &dyn Fn(usize, usize) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let mut p_rest = p.clone();
    let mut x = x;
    for &v in &p {
        r.push(v);
        let p_next: Vec<usize> = p_rest
            .iter()
            .copied()
            .filter(|&u| adjacent(u, v))
            .collect();
        let x_next: Vec<usize> = x.iter().copied().filter(|&u| adjacent(u, v)).collect();
        bron_kerbosch(r, p_next, x_next, adjacent, out);
        r.pop();
        p_rest.retain(|&u| u != v);
        x.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p_matrix(n: usize, non_significant: &[(usize, usize)]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.01; n]; n];
        for i in 0..n {
            m[i][i] = 1.0;
        }
        for &(a, b) in non_significant {
            m[a][b] = 0.5;
            m[b][a] = 0.5;
        }
        m
    }

    #[test]
    fn all_significant_gives_singletons() {
        let ranks = [1.0, 2.0, 3.0];
        let cliques = cd_groups(&ranks, &p_matrix(3, &[]), 0.05).unwrap();
        assert_eq!(cliques, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn nothing_significant_gives_one_clique() {
        let ranks = [2.0, 1.0, 3.0];
        let cliques =
            cd_groups(&ranks, &p_matrix(3, &[(0, 1), (0, 2), (1, 2)]), 0.05).unwrap();
        assert_eq!(cliques, vec![vec![1, 0, 2]]);
    }

    #[test]
    fn chain_graph_gives_overlapping_pairs() {
        // Edges a-b, b-c, c-d: maximal cliques {a,b}, {b,c}, {c,d}.
        let ranks = [1.0, 2.0, 3.0, 4.0];
        let cliques =
            cd_groups(&ranks, &p_matrix(4, &[(0, 1), (1, 2), (2, 3)]), 0.05).unwrap();
        assert_eq!(cliques, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    /// Brute-force clique oracle: every subset that is a clique and maximal.
    fn brute_force_cliques(n: usize, adj: &dyn Fn(usize, usize) -> bool) -> Vec<BTreeSet<usize>> {
        let mut cliques = Vec::new();
        for mask in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let is_clique = members
                .iter()
                .all(|&a| members.iter().all(|&b| a == b || adj(a, b)));
            if !is_clique {
                continue;
            }
            let maximal = (0..n)
                .filter(|i| !members.contains(i))
                .all(|v| !members.iter().all(|&m| adj(m, v)));
            if maximal {
                cliques.push(members.into_iter().collect());
            }
        }
        cliques
    }

    #[test]
    fn matches_brute_force_enumeration_on_random_graphs() {
        let mut rng = crate::numkernel::SeededRng::new(17);
        for _ in 0..50 {
            let n = 2 + rng.below(5); // up to 6 models
            let mut m = vec![vec![0.01; n]; n];
            for i in 0..n {
                m[i][i] = 1.0;
                for j in (i + 1)..n {
                    if rng.below(2) == 1 {
                        m[i][j] = 0.3;
                        m[j][i] = 0.3;
                    }
                }
            }
            let ranks: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
            let got = cd_groups(&ranks, &m, 0.05).unwrap();
            let got_sets: Vec<BTreeSet<usize>> = got
                .iter()
                .map(|c| c.iter().copied().collect())
                .collect();
            let adj = |a: usize, b: usize| a != b && m[a][b] >= 0.05;
            let oracle = brute_force_cliques(n, &adj);
            assert_eq!(got_sets.len(), oracle.len());
            for c in &oracle {
                assert!(got_sets.contains(c), "missing clique {c:?}");
            }
            // Coverage: every model in at least one clique.
            let covered: BTreeSet<usize> = got_sets.iter().flatten().copied().collect();
            assert_eq!(covered.len(), n);
            // Internal consistency: all internal pairs non-significant.
            for c in &got_sets {
                for &a in c {
                    for &b in c {
                        assert!(a == b || m[a][b] >= 0.05);
                    }
                }
            }
        }
    }
}
