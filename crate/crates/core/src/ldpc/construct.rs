//! Progressive edge-growth construction of regular LDPC codes.
//!
//! Used to generate the bundled parity-check matrices; see the
//! `generate_codes` example.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SparseParityCheck;

/// Builds an `(n, col_deg, row_deg)`-regular parity-check matrix by PEG.
///
/// Variables are connected one edge at a time to the open check (degree
/// below `row_deg`) farthest from the variable in the current graph,
/// preferring the lowest check degree and breaking remaining ties with a
/// seeded RNG. Requires `n * col_deg` to be divisible by `row_deg`.
pub fn peg_regular(n: usize, col_deg: usize, row_deg: usize, seed: u64) -> SparseParityCheck {
    assert!(
        (n * col_deg).is_multiple_of(row_deg),
        "edge count must split evenly"
    );
    let m = n * col_deg / row_deg;
    assert!(col_deg <= m, "column degree exceeds the number of checks");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut vars: Vec<Vec<usize>> = vec![Vec::new(); n];

    for v in 0..n {
        for _ in 0..col_deg {
            let distance = check_distances(v, &checks, &vars);
            let open: Vec<usize> = (0..m)
                .filter(|&c| checks[c].len() < row_deg && !vars[v].contains(&c))
                .collect();
            let far = open
                .iter()
                .map(|&c| distance[c])
                .max()
                .expect("an open check always exists for a regular split");
            let far: Vec<usize> = open.into_iter().filter(|&c| distance[c] == far).collect();
            let min_deg = far
                .iter()
                .map(|&c| checks[c].len())
                .min()
                .expect("nonempty");
            let best: Vec<usize> = far
                .into_iter()
                .filter(|&c| checks[c].len() == min_deg)
                .collect();
            let c = *best.choose(&mut rng).expect("nonempty");
            checks[c].push(v);
            vars[v].push(c);
        }
    }
    SparseParityCheck::from_checks(n, checks)
}

/// Breadth-first distance (in check layers) from variable `v` to every
/// check; unreachable checks get `usize::MAX`.
fn check_distances(v: usize, checks: &[Vec<usize>], vars: &[Vec<usize>]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; checks.len()];
    let mut seen_var = vec![false; vars.len()];
    seen_var[v] = true;
    let mut frontier: Vec<usize> = vars[v].clone();
    for &c in &frontier {
        dist[c] = 0;
    }
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &c in &frontier {
            for &u in &checks[c] {
                if std::mem::replace(&mut seen_var[u], true) {
                    continue;
                }
                for &c2 in &vars[u] {
                    if dist[c2] == usize::MAX {
                        dist[c2] = depth;
                        next.push(c2);
                    }
                }
            }
        }
        frontier = next;
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn girth_at_least_six(h: &SparseParityCheck) -> bool {
        // no two checks share more than one variable
        for a in 0..h.m() {
            for b in a + 1..h.m() {
                let shared = h.checks()[a]
                    .iter()
                    .filter(|v| h.checks()[b].contains(v))
                    .count();
                if shared > 1 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn regular_degrees_and_no_four_cycles() {
        let h = peg_regular(96, 3, 6, 3);
        assert_eq!(h.m(), 48);
        assert!(h.vars().iter().all(|v| v.len() == 3));
        assert!(h.checks().iter().all(|c| c.len() == 6));
        assert!(girth_at_least_six(&h));
    }

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(peg_regular(48, 3, 6, 1), peg_regular(48, 3, 6, 1));
    }
}
