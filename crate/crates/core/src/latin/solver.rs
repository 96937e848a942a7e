//! Completion search, force-out and critical-set tests.

use super::{LatinError, LatinSquare, PartialLatinSquare, Triple};

/// Counts the Latin squares containing `p`, stopping once `limit` is reached.
///
/// Branches on the empty cell with the fewest candidates. The count does not
/// depend on branching order, so this is free to differ from [`complete`].
pub fn count_completions(p: &PartialLatinSquare, limit: u64) -> u64 {
    if limit == 0 {
        return 0;
    }
    let mut work = p.clone();
    let mut found = 0;
    count_rec(&mut work, limit, &mut found);
    found
}

fn count_rec(p: &mut PartialLatinSquare, limit: u64, found: &mut u64) {
    let n = p.order();
    let mut best: Option<(usize, usize, u64)> = None;
    for r in 0..n {
        for c in 0..n {
            if p.get(r, c).is_some() {
                continue;
            }
            let cand = p.candidates(r, c);
            if cand == 0 {
                return;
            }
            if best.is_none_or(|(_, _, b)| cand.count_ones() < b.count_ones()) {
                best = Some((r, c, cand));
            }
        }
    }
    let Some((r, c, mut cand)) = best else {
        *found += 1;
        return;
    };
    while cand != 0 {
        let sym = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        let t = Triple::new(r, c, sym);
        p.set(t);
        count_rec(p, limit, found);
        p.unset(t);
        if *found >= limit {
            return;
        }
    }
}

/// The first completion of `p` in row-major cell order with symbols tried
/// ascending. Placements that empty a peer cell's candidate set are pruned.
pub fn complete(p: &PartialLatinSquare) -> Result<LatinSquare, LatinError> {
    let n = p.order();
    let empty: Vec<(usize, usize)> = (0..n * n)
        .map(|i| (i / n, i % n))
        .filter(|&(r, c)| p.get(r, c).is_none())
        .collect();
    // Every empty cell needs at least one candidate before we start.
    if empty.iter().any(|&(r, c)| p.candidates(r, c) == 0) {
        return Err(LatinError::NoCompletion);
    }
    let mut work = p.clone();
    if complete_rec(&mut work, &empty, 0) {
        Ok(work.to_square().expect("search filled every cell"))
    } else {
        Err(LatinError::NoCompletion)
    }
}

fn complete_rec(p: &mut PartialLatinSquare, empty: &[(usize, usize)], idx: usize) -> bool {
    let Some(&(r, c)) = empty.get(idx) else {
        return true;
    };
    let mut cand = p.candidates(r, c);
    while cand != 0 {
        let sym = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        let t = Triple::new(r, c, sym);
        p.set(t);
        if peers_alive(p, r, c) && complete_rec(p, empty, idx + 1) {
            return true;
        }
        p.unset(t);
    }
    false
}

fn peers_alive(p: &PartialLatinSquare, r: usize, c: usize) -> bool {
    let n = p.order();
    (0..n).all(|k| {
        (p.get(r, k).is_some() || p.candidates(r, k) != 0)
            && (p.get(k, c).is_some() || p.candidates(k, c) != 0)
    })
}

/// Cell scan order used when looking for the next forced placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanOrder {
    #[default]
    RowMajor,
    ColumnMajor,
}

/// Record of a force-out run: the forced placements in the order made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForceOutTrace {
    pub start: PartialLatinSquare,
    pub steps: Vec<Triple>,
    pub end: PartialLatinSquare,
}

impl ForceOutTrace {
    /// True when force-out alone reached a full Latin square.
    pub fn is_complete(&self) -> bool {
        self.end.is_full()
    }

    /// Replays `steps` on `start`, checking each cell had exactly one
    /// candidate when it was filled.
    pub fn replay(&self) -> Option<PartialLatinSquare> {
        let mut p = self.start.clone();
        for &t in &self.steps {
            if p.candidates(t.row, t.col) != 1 << t.sym {
                return None;
            }
            p.set(t);
        }
        Some(p)
    }
}

/// Force-out with a row-major scan.
pub fn force_out(p: &PartialLatinSquare) -> Result<ForceOutTrace, LatinError> {
    force_out_with(p, ScanOrder::RowMajor)
}

/// Repeatedly fills the first cell (in `order`) whose candidate set is a
/// singleton, until no such cell remains.
pub fn force_out_with(p: &PartialLatinSquare, order: ScanOrder) -> Result<ForceOutTrace, LatinError> {
    let n = p.order();
    let mut work = p.clone();
    let mut steps = Vec::new();
    loop {
        let mut forced = None;
        for i in 0..n * n {
            let (r, c) = match order {
                ScanOrder::RowMajor => (i / n, i % n),
                ScanOrder::ColumnMajor => (i % n, i / n),
            };
            if work.get(r, c).is_some() {
                continue;
            }
            let cand = work.candidates(r, c);
            if cand == 0 {
                return Err(LatinError::Contradiction { row: r, col: c });
            }
            if forced.is_none() && cand.count_ones() == 1 {
                forced = Some(Triple::new(r, c, cand.trailing_zeros() as usize));
            }
        }
        match forced {
            Some(t) => {
                work.set(t);
                steps.push(t);
            }
            None => break,
        }
    }
    Ok(ForceOutTrace {
        start: p.clone(),
        steps,
        end: work,
    })
}

/// Unique completion, and no entry can be dropped without losing uniqueness.
pub fn is_critical_set(p: &PartialLatinSquare) -> bool {
    count_completions(p, 2) == 1 && p.triples().all(|t| count_completions(&p.without(t), 2) >= 2)
}

/// A critical set that force-out alone completes.
pub fn is_strong_critical_set(p: &PartialLatinSquare) -> bool {
    is_critical_set(p) && force_out(p).is_ok_and(|trace| trace.is_complete())
}

/// Exact number of Latin squares of order `n`, for `1 ≤ n ≤ 5`.
pub fn enumerate_count(n: usize) -> Result<u64, LatinError> {
    if n == 0 {
        return Err(LatinError::InvalidOrder(0));
    }
    if n > 5 {
        return Err(LatinError::OrderTooLarge(n));
    }
    Ok(count_completions(&PartialLatinSquare::empty(n)?, u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partial(n: usize, triples: &[(usize, usize, usize)]) -> PartialLatinSquare {
        PartialLatinSquare::from_triples(n, triples.iter().map(|&t| t.into())).unwrap()
    }

    fn c1() -> PartialLatinSquare {
        partial(3, &[(0, 0, 0), (1, 1, 2)])
    }

    fn completable4() -> PartialLatinSquare {
        partial(4, &[(0, 0, 0), (0, 2, 3), (1, 1, 2), (2, 2, 1), (3, 3, 3)])
    }

    fn dead_end4() -> PartialLatinSquare {
        partial(4, &[(0, 0, 0), (0, 2, 3), (0, 3, 1), (3, 1, 2)])
    }

    /// Every order-3 grid over {0,1,2}^9, filtered to Latin squares.
    fn all_order3_squares() -> Vec<Vec<usize>> {
        (0..3usize.pow(9))
            .map(|mut code| {
                (0..9)
                    .map(|_| {
                        let d = code % 3;
                        code /= 3;
                        d
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|g| {
                let rows: Vec<Vec<usize>> = g.chunks(3).map(<[usize]>::to_vec).collect();
                super::super::validate_square(&rows).unwrap()
            })
            .collect()
    }

    #[test]
    fn order3_oracle_matches_counts() {
        let squares = all_order3_squares();
        assert_eq!(squares.len(), 12);
        let empty = PartialLatinSquare::empty(3).unwrap();
        assert_eq!(count_completions(&empty, 100), squares.len() as u64);
        // squares containing (0,0,0)
        let with_origin = squares.iter().filter(|g| g[0] == 0).count() as u64;
        assert_eq!(with_origin, 4);
        assert_eq!(count_completions(&partial(3, &[(0, 0, 0)]), 100), with_origin);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_completions(&c1(), 2), 1);
        assert_eq!(count_completions(&dead_end4(), 1), 0);
        assert_eq!(count_completions(&PartialLatinSquare::empty(3).unwrap(), 5), 5);
    }

    #[test]
    fn complete_examples() {
        let l = complete(&completable4()).unwrap();
        assert!(l.contains_partial(&completable4()));
        assert_eq!(
            l.rows(),
            vec![vec![0, 1, 3, 2], vec![3, 2, 0, 1], vec![2, 3, 1, 0], vec![1, 0, 2, 3]]
        );
        let full = LatinSquare::cayley(5).unwrap();
        assert_eq!(complete(&full.to_partial()).unwrap(), full);
        assert_eq!(complete(&dead_end4()), Err(LatinError::NoCompletion));
    }

    #[test]
    fn force_out_c1() {
        let trace = force_out(&c1()).unwrap();
        assert_eq!(trace.steps.len(), 7);
        assert_eq!(trace.end.to_square().unwrap(), LatinSquare::cayley(3).unwrap());
        assert_eq!(trace.replay(), Some(trace.end.clone()));
    }

    #[test]
    fn force_out_trivial_cases() {
        let full = LatinSquare::cayley(4).unwrap().to_partial();
        let trace = force_out(&full).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.end, full);

        let empty = PartialLatinSquare::empty(2).unwrap();
        let trace = force_out(&empty).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.end, empty);
    }

    #[test]
    fn force_out_contradiction() {
        // row 0 needs symbol 2 at (0,1), which column 1 already holds
        let err = force_out(&dead_end4()).unwrap_err();
        assert!(matches!(err, LatinError::Contradiction { .. }));
    }

    #[test]
    fn critical_examples() {
        assert!(is_critical_set(&c1()));
        assert!(!is_critical_set(&partial(3, &[(0, 0, 0)])));
        assert!(!is_critical_set(&LatinSquare::cayley(3).unwrap().to_partial()));
    }

    #[test]
    fn strong_critical_examples() {
        assert!(is_strong_critical_set(&c1()));
        assert!(!is_strong_critical_set(&PartialLatinSquare::empty(2).unwrap()));
        assert!(!is_strong_critical_set(&LatinSquare::cayley(3).unwrap().to_partial()));
    }

    #[test]
    fn enumerate_small_orders() {
        assert_eq!(enumerate_count(1), Ok(1));
        assert_eq!(enumerate_count(2), Ok(2));
        assert_eq!(enumerate_count(3), Ok(12));
        assert_eq!(enumerate_count(6), Err(LatinError::OrderTooLarge(6)));
        assert_eq!(enumerate_count(0), Err(LatinError::InvalidOrder(0)));
    }
}
