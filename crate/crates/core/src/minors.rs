//! Extreme eigenvalues over all size-`m` principal minors.
//!
//! Three strategies share one result type: lexicographic enumeration, a
//! depth-first branch-and-bound whose bounds come from Gershgorin discs and
//! Cauchy interlacing, and a greedy heuristic used as a warm start.
//!
//! Ties between subsets whose values agree to within
//! `TIE_REL_TOL * (1 + |value|)` are resolved toward the lexicographically
//! smallest sorted subset, for every exact strategy.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{lambda_max_in_place, SymMatrix};

/// Largest `C(dim, m)` accepted by [`Strategy::Enumerate`].
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
/// Node budget for branch-and-bound before a capacity error.
pub const NODE_LIMIT: u64 = 2_000_000_000;
/// Relative tolerance under which two subset values count as tied.
pub const TIE_REL_TOL: f64 = 1e-12;
/// Interlacing bounds are only evaluated on candidate pools up to this size.
const INTERLACING_MAX_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Enumerate,
    BranchAndBound,
    Greedy,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Enumerate => "enumerate",
            Strategy::BranchAndBound => "branch_and_bound",
            Strategy::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(Strategy::Enumerate),
            "branch_and_bound" | "branch-and-bound" | "bnb" => Ok(Strategy::BranchAndBound),
            "greedy" => Ok(Strategy::Greedy),
            other => Err(Error::Input(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Max,
    Min,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" | "upper" => Ok(Mode::Max),
            "min" | "lower" => Ok(Mode::Min),
            other => Err(Error::Input(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetExtremeResult {
    pub value: f64,
    pub subset: Vec<usize>,
    pub nodes_explored: u64,
    pub strategy: Strategy,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[inline]
fn tie_tol(v: f64) -> f64 {
    TIE_REL_TOL * (1.0 + v.abs())
}

/// Tracks the best subset seen so far.
struct Incumbent {
    value: f64,
    subset: Vec<usize>,
}

impl Incumbent {
    fn empty() -> Self {
        Incumbent {
            value: f64::NEG_INFINITY,
            subset: Vec::new(),
        }
    }

    /// `sorted` must be sorted ascending.
    fn offer(&mut self, value: f64, sorted: &[usize]) {
        let tol = tie_tol(self.value);
        if value > self.value + tol
            || (value >= self.value - tol && sorted < self.subset.as_slice())
            || self.subset.is_empty()
        {
            self.value = value;
            self.subset.clear();
            self.subset.extend_from_slice(sorted);
        }
    }
}

fn check_m(a: &SymMatrix, m: usize) -> Result<()> {
    ensure!(a.is_finite(), Input, "matrix has a non-finite entry");
    ensure!(
        m >= 1 && m <= a.dim(),
        Input,
        "m must satisfy 1 <= m <= {} (got {m})",
        a.dim()
    );
    Ok(())
}

/// `max over |S| = m` of the largest eigenvalue of `A_S`.
pub fn max_minor_lambda1(a: &SymMatrix, m: usize, strategy: Strategy) -> Result<SubsetExtremeResult> {
    check_m(a, m)?;
    match strategy {
        Strategy::Enumerate => enumerate_max(a, m),
        Strategy::BranchAndBound => branch_and_bound_max(a, m),
        Strategy::Greedy => greedy_max(a, m),
    }
}

/// `min over |S| = m` of the smallest eigenvalue of `A_S`, computed as
/// `-max_minor_lambda1(-A, m)`.
pub fn min_minor_lambdam(a: &SymMatrix, m: usize, strategy: Strategy) -> Result<SubsetExtremeResult> {
    let mut r = max_minor_lambda1(&a.neg(), m, strategy)?;
    r.value = -r.value;
    Ok(r)
}

pub fn extreme_minor(a: &SymMatrix, m: usize, mode: Mode, strategy: Strategy) -> Result<SubsetExtremeResult> {
    match mode {
        Mode::Max => max_minor_lambda1(a, m, strategy),
        Mode::Min => min_minor_lambdam(a, m, strategy),
    }
}

/// Maximum over all `|S| <= m`. By interlacing the largest eigenvalue can
/// only grow when indices are added, so this equals the size-`m` value.
pub fn max_minor_lambda1_upto(a: &SymMatrix, m: usize, strategy: Strategy) -> Result<SubsetExtremeResult> {
    let r = max_minor_lambda1(a, m, strategy)?;
    #[cfg(debug_assertions)]
    if strategy != Strategy::Greedy && a.dim() <= 12 {
        let brute = exhaustive_max_upto(a, m)?;
        debug_assert!(
            (brute - r.value).abs() <= 1e-9 * (1.0 + brute.abs()),
            "interlacing violated: {brute} vs {}",
            r.value
        );
    }
    Ok(r)
}

/// Brute force over every subset of size `1..=m`. Exponential; meant for
/// checks on small matrices.
pub fn exhaustive_max_upto(a: &SymMatrix, m: usize) -> Result<f64> {
    check_m(a, m)?;
    let mut best = f64::NEG_INFINITY;
    for size in 1..=m {
        best = best.max(enumerate_max(a, size)?.value);
    }
    Ok(best)
}

fn enumerate_max(a: &SymMatrix, m: usize) -> Result<SubsetExtremeResult> {
    let dim = a.dim();
    let count = binomial(dim, m);
    if count > ENUMERATION_LIMIT {
        return Err(Error::Capacity(format!(
            "C({dim}, {m}) = {count} subsets exceeds the enumeration limit of {ENUMERATION_LIMIT}; \
             use branch_and_bound"
        )));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    let mut buf = Vec::with_capacity(m * m);
    let mut best = Incumbent::empty();
    let mut nodes = 0u64;
    loop {
        a.minor_into(&idx, &mut buf);
        let v = lambda_max_in_place(&mut buf, m);
        nodes += 1;
        best.offer(v, &idx);
        // next combination in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(SubsetExtremeResult {
                    value: best.value,
                    subset: best.subset,
                    nodes_explored: nodes,
                    strategy: Strategy::Enumerate,
                });
            }
            i -= 1;
            if idx[i] < dim - m + i {
                idx[i] += 1;
                for t in (i + 1)..m {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Starts from the largest diagonal entry and repeatedly adds the index
/// that maximizes the largest eigenvalue of the grown minor. Ties go to the
/// smallest index. The result is a lower bound on the exact maximum.
pub fn greedy_max(a: &SymMatrix, m: usize) -> Result<SubsetExtremeResult> {
    check_m(a, m)?;
    let dim = a.dim();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut in_set = vec![false; dim];
    let mut value = f64::NEG_INFINITY;
    let mut nodes = 0u64;
    let mut buf = Vec::new();
    let mut trial = Vec::with_capacity(m);

    let first = (0..dim)
        .fold(None::<usize>, |acc, i| match acc {
            Some(b) if a.get(b, b) >= a.get(i, i) => Some(b),
            _ => Some(i),
        })
        .unwrap();
    chosen.push(first);
    in_set[first] = true;
    value = value.max(a.get(first, first));
    nodes += 1;

    while chosen.len() < m {
        let mut best: Option<(f64, usize)> = None;
        for (j, &taken) in in_set.iter().enumerate() {
            if taken {
                continue;
            }
            trial.clear();
            trial.extend_from_slice(&chosen);
            trial.push(j);
            trial.sort_unstable();
            a.minor_into(&trial, &mut buf);
            let v = lambda_max_in_place(&mut buf, trial.len());
            nodes += 1;
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, j));
            }
        }
        let (v, j) = best.unwrap();
        chosen.push(j);
        in_set[j] = true;
        value = v;
    }
    chosen.sort_unstable();
    // Recompute on the sorted subset so the value is bit-identical to what
    // an independent evaluation of the witness gives.
    a.minor_into(&chosen, &mut buf);
    let exact = lambda_max_in_place(&mut buf, m);
    debug_assert!((exact - value).abs() <= 1e-9 * (1.0 + value.abs()));
    Ok(SubsetExtremeResult {
        value: exact,
        subset: chosen,
        nodes_explored: nodes,
        strategy: Strategy::Greedy,
    })
}

struct Search<'a> {
    a: &'a SymMatrix,
    m: usize,
    /// Indices sorted by diagonal entry, descending.
    order: Vec<usize>,
    /// `suffix_diag[s]` = max diagonal over `order[s..]`.
    suffix_diag: Vec<f64>,
    /// `row_top[i][k]` = sum of the `k` largest `|a_ij|`, `j != i`.
    row_top: Vec<Vec<f64>>,
    /// `suffix_row_top[k][s]` = max over `order[s..]` of `row_top[.][k]`.
    suffix_row_top: Vec<Vec<f64>>,
    /// Largest off-diagonal magnitude in each row.
    row_max: Vec<f64>,
    best: Incumbent,
    nodes: u64,
    chosen: Vec<usize>,
    sorted: Vec<usize>,
    buf: Vec<f64>,
}

impl<'a> Search<'a> {
    fn new(a: &'a SymMatrix, m: usize, start: Incumbent) -> Self {
        let dim = a.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&x, &y| a.get(y, y).partial_cmp(&a.get(x, x)).unwrap());

        let mut suffix_diag = vec![f64::NEG_INFINITY; dim + 1];
        for s in (0..dim).rev() {
            suffix_diag[s] = suffix_diag[s + 1].max(a.get(order[s], order[s]));
        }

        let mut row_top = Vec::with_capacity(dim);
        let mut row_max = Vec::with_capacity(dim);
        let mut mags = Vec::with_capacity(dim);
        for i in 0..dim {
            mags.clear();
            mags.extend((0..dim).filter(|&j| j != i).map(|j| a.get(i, j).abs()));
            let take = m.min(mags.len());
            if take > 0 && take < mags.len() {
                mags.select_nth_unstable_by(take - 1, |x, y| y.partial_cmp(x).unwrap());
            }
            let mut top = mags[..take].to_vec();
            top.sort_by(|x, y| y.partial_cmp(x).unwrap());
            let mut sums = vec![0.0; m + 1];
            for k in 1..=m {
                sums[k] = sums[k - 1] + top.get(k - 1).copied().unwrap_or(0.0);
            }
            row_max.push(top.first().copied().unwrap_or(0.0));
            row_top.push(sums);
        }

        let mut suffix_row_top = vec![vec![f64::NEG_INFINITY; dim + 1]; m + 1];
        for (k, col) in suffix_row_top.iter_mut().enumerate() {
            for s in (0..dim).rev() {
                col[s] = col[s + 1].max(row_top[order[s]][k]);
            }
        }

        Search {
            a,
            m,
            order,
            suffix_diag,
            row_top,
            suffix_row_top,
            row_max,
            best: start,
            nodes: 0,
            chosen: Vec::with_capacity(m),
            sorted: Vec::with_capacity(m),
            buf: Vec::new(),
        }
    }

    /// Gershgorin bound for every completion of `chosen` by `r` indices
    /// drawn from `order[start..]`.
    fn disc_bound(&self, start: usize, r: usize) -> f64 {
        let a = self.a;
        let mut bound = f64::NEG_INFINITY;
        let mut cross = 0.0;
        for &i in &self.chosen {
            let mut row = a.get(i, i) + self.row_top[i][r];
            for &j in &self.chosen {
                if j != i {
                    row += a.get(i, j).abs();
                }
            }
            bound = bound.max(row);
            cross += self.row_max[i];
        }
        let fresh = self.suffix_diag[start] + cross + self.suffix_row_top[r - 1][start];
        bound.max(fresh)
    }

    /// Largest eigenvalue of the minor on `chosen ∪ order[start..]`, which
    /// dominates every completion by interlacing.
    fn interlacing_bound(&mut self, start: usize) -> f64 {
        self.sorted.clear();
        self.sorted.extend_from_slice(&self.chosen);
        self.sorted.extend_from_slice(&self.order[start..]);
        self.sorted.sort_unstable();
        self.a.minor_into(&self.sorted, &mut self.buf);
        lambda_max_in_place(&mut self.buf, self.sorted.len())
    }

    fn prune(&self, bound: f64) -> bool {
        bound < self.best.value - tie_tol(self.best.value)
    }

    fn visit(&mut self, start: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_LIMIT {
            return Err(Error::Capacity(format!(
                "branch-and-bound exceeded {NODE_LIMIT} nodes"
            )));
        }
        let dim = self.order.len();
        let r = self.m - self.chosen.len();
        if r == 0 {
            self.sorted.clear();
            self.sorted.extend_from_slice(&self.chosen);
            self.sorted.sort_unstable();
            self.a.minor_into(&self.sorted, &mut self.buf);
            let v = lambda_max_in_place(&mut self.buf, self.m);
            let sorted = std::mem::take(&mut self.sorted);
            self.best.offer(v, &sorted);
            self.sorted = sorted;
            return Ok(());
        }
        if !self.chosen.is_empty() {
            if self.prune(self.disc_bound(start, r)) {
                return Ok(());
            }
            if self.chosen.len() + (dim - start) <= INTERLACING_MAX_DIM {
                let bound = self.interlacing_bound(start);
                if self.prune(bound) {
                    return Ok(());
                }
            }
        }
        for pos in start..=(dim - r) {
            self.chosen.push(self.order[pos]);
            self.visit(pos + 1)?;
            self.chosen.pop();
        }
        Ok(())
    }
}

fn branch_and_bound_max(a: &SymMatrix, m: usize) -> Result<SubsetExtremeResult> {
    let warm = greedy_max(a, m)?;
    let mut start = Incumbent::empty();
    start.offer(warm.value, &warm.subset);
    let mut search = Search::new(a, m, start);
    search.visit(0)?;
    Ok(SubsetExtremeResult {
        value: search.best.value,
        subset: search.best.subset,
        nodes_explored: search.nodes + warm.nodes_explored,
        strategy: Strategy::BranchAndBound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block() -> SymMatrix {
        SymMatrix::from_rows(&[[1.0, 0.9, 0.0], [0.9, 1.0, 0.0], [0.0, 0.0, 1.5]]).unwrap()
    }

    const EXACT: [Strategy; 2] = [Strategy::Enumerate, Strategy::BranchAndBound];

    #[test]
    fn block_example() {
        for s in EXACT {
            let r = max_minor_lambda1(&block(), 2, s).unwrap();
            assert!((r.value - 1.9).abs() < 1e-12);
            assert_eq!(r.subset, vec![0, 1]);
            let r = min_minor_lambdam(&block(), 2, s).unwrap();
            assert!((r.value - 0.1).abs() < 1e-12);
            assert_eq!(r.subset, vec![0, 1]);
        }
    }

    #[test]
    fn diagonal_ties_break_lexicographically() {
        let d = SymMatrix::diag(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        for s in EXACT {
            let r = max_minor_lambda1(&d, 2, s).unwrap();
            assert_eq!((r.value, r.subset.clone()), (4.0, vec![0, 3]), "{s:?}");
            let r = min_minor_lambdam(&d, 2, s).unwrap();
            assert_eq!((r.value, r.subset.clone()), (1.0, vec![0, 1]), "{s:?}");
        }
        let g = greedy_max(&d, 2).unwrap();
        assert_eq!(g.value, 4.0);
        assert_eq!(g.subset, vec![0, 3]);
    }

    #[test]
    fn full_size_gives_full_spectrum() {
        let a = block();
        let s = a.eigvalsh().unwrap();
        for st in [Strategy::Enumerate, Strategy::BranchAndBound, Strategy::Greedy] {
            assert_eq!(max_minor_lambda1(&a, 3, st).unwrap().value, s.max());
            assert_eq!(min_minor_lambdam(&a, 3, st).unwrap().value, s.min());
        }
    }

    #[test]
    fn greedy_m1_is_max_diagonal() {
        let a = SymMatrix::from_rows(&[[0.5, 3.0, 0.0], [3.0, 2.0, 1.0], [0.0, 1.0, 2.0]]).unwrap();
        let g = greedy_max(&a, 1).unwrap();
        assert_eq!(g.value, 2.0);
        assert_eq!(g.subset, vec![1]);
    }

    #[test]
    fn upto_matches_exact_size() {
        let d = SymMatrix::diag(&[1.0, 2.0]).unwrap();
        assert_eq!(max_minor_lambda1_upto(&d, 2, Strategy::Enumerate).unwrap().value, 2.0);
        assert_eq!(exhaustive_max_upto(&d, 2).unwrap(), 2.0);
    }

    #[test]
    fn argument_errors() {
        let a = block();
        assert!(matches!(max_minor_lambda1(&a, 0, Strategy::Enumerate), Err(Error::Input(_))));
        assert!(matches!(max_minor_lambda1(&a, 4, Strategy::Greedy), Err(Error::Input(_))));
        let big = SymMatrix::identity(200).unwrap();
        assert!(matches!(
            max_minor_lambda1(&big, 5, Strategy::Enumerate),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(20, 4), 4845);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(1024, 2), 523_776);
    }
}
