//! Latin squares, partial Latin squares and critical sets.
//!
//! Symbols are `0..n`. Every row and column of a partial square keeps a
//! bitset of used symbols, so candidate sets are a single mask operation.
//! That caps the supported order at [`MAX_ORDER`].

mod matching;
mod solver;
mod text;

use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use solver::{
    complete, count_completions, enumerate_count, force_out, force_out_with, is_critical_set,
    is_strong_critical_set, ForceOutTrace, ScanOrder,
};

/// Largest supported order (symbol sets are stored as `u64` masks).
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatinError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid order {0}")]
    InvalidOrder(usize),
    #[error("invalid partial Latin square: {0}")]
    InvalidPartial(String),
    #[error("the partial Latin square has no completion")]
    NoCompletion,
    #[error("contradiction: cell ({row}, {col}) has no candidate symbol")]
    Contradiction { row: usize, col: usize },
    #[error("invalid Latin rectangle: {0}")]
    InvalidRectangle(String),
    #[error("order {0} is too large to enumerate (maximum 5)")]
    OrderTooLarge(usize),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One cell assignment: row, column and symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub row: usize,
    pub col: usize,
    pub sym: usize,
}

impl Triple {
    pub const fn new(row: usize, col: usize, sym: usize) -> Self {
        Self { row, col, sym }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.row, self.col, self.sym)
    }
}

impl From<(usize, usize, usize)> for Triple {
    fn from((row, col, sym): (usize, usize, usize)) -> Self {
        Self { row, col, sym }
    }
}

fn check_order(n: usize) -> Result<(), LatinError> {
    if n == 0 || n > MAX_ORDER {
        Err(LatinError::InvalidOrder(n))
    } else {
        Ok(())
    }
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A complete Latin square of order `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    order: usize,
    grid: Vec<u8>,
}

/// Checks whether `grid` is a Latin square.
///
/// Returns `Err(InvalidGrid)` when the grid is not square or contains a
/// symbol outside `0..n`; otherwise reports whether every row and column is
/// a permutation.
pub fn validate_square(grid: &[Vec<usize>]) -> Result<bool, LatinError> {
    let n = grid.len();
    if n == 0 {
        return Err(LatinError::InvalidGrid("empty grid".into()));
    }
    if n > MAX_ORDER {
        return Err(LatinError::InvalidOrder(n));
    }
    for (r, row) in grid.iter().enumerate() {
        if row.len() != n {
            return Err(LatinError::InvalidGrid(format!(
                "row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(&s) = row.iter().find(|&&s| s >= n) {
            return Err(LatinError::InvalidGrid(format!(
                "symbol {s} in row {r} is out of range for order {n}"
            )));
        }
    }
    let full = full_mask(n);
    let rows_ok = grid
        .iter()
        .all(|row| row.iter().fold(0u64, |m, &s| m | 1 << s) == full);
    let cols_ok = (0..n).all(|c| grid.iter().fold(0u64, |m, row| m | 1 << row[c]) == full);
    Ok(rows_ok && cols_ok)
}

impl LatinSquare {
    /// Builds a square from rows, rejecting anything that is not Latin.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, LatinError> {
        if !validate_square(rows)? {
            return Err(LatinError::InvalidGrid(
                "a symbol repeats in some row or column".into(),
            ));
        }
        let grid = rows.iter().flatten().map(|&s| s as u8).collect();
        Ok(Self {
            order: rows.len(),
            grid,
        })
    }

    /// The addition table of `Z/nZ`: `grid[i][j] = (i + j) mod n`.
    pub fn cayley(n: usize) -> Result<Self, LatinError> {
        check_order(n)?;
        let grid = (0..n)
            .flat_map(|i| (0..n).map(move |j| ((i + j) % n) as u8))
            .collect();
        Ok(Self { order: n, grid })
    }

    /// A seeded pseudo-random Latin square.
    ///
    /// The first row is a shuffled permutation; every later row is a perfect
    /// matching between columns and the symbols still free in each column,
    /// found with columns and symbol preferences in shuffled order. Hall's
    /// condition guarantees the matching exists, so no row ever fails.
    /// The output is not uniform over all Latin squares.
    pub fn random(n: usize, seed: u64) -> Result<Self, LatinError> {
        check_order(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut first: Vec<usize> = (0..n).collect();
        first.shuffle(&mut rng);
        rows.push(first);
        while rows.len() < n {
            let mut adj = matching::free_symbols(&rows, n);
            for list in adj.iter_mut() {
                list.shuffle(&mut rng);
            }
            let mut col_order: Vec<usize> = (0..n).collect();
            col_order.shuffle(&mut rng);
            let row = matching::perfect_matching(&adj, &col_order, n)
                .expect("a Latin rectangle always extends by one row");
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.grid[row * self.order + col] as usize
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        self.grid[row * self.order..(row + 1) * self.order]
            .iter()
            .map(|&s| s as usize)
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|r| self.row(r).collect()).collect()
    }

    /// All `n²` cells as triples, row-major.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let n = self.order;
        self.grid
            .iter()
            .enumerate()
            .map(move |(i, &s)| Triple::new(i / n, i % n, s as usize))
    }

    pub fn contains(&self, t: Triple) -> bool {
        t.row < self.order && t.col < self.order && self.get(t.row, t.col) == t.sym
    }

    /// True when every filled cell of `p` agrees with this square.
    pub fn contains_partial(&self, p: &PartialLatinSquare) -> bool {
        p.order() == self.order && p.triples().all(|t| self.contains(t))
    }

    pub fn to_partial(&self) -> PartialLatinSquare {
        PartialLatinSquare::from_triples(self.order, self.triples())
            .expect("a Latin square is a valid partial square")
    }
}

/// A partial Latin square: some cells filled, no symbol repeated in any row
/// or column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialLatinSquare {
    order: usize,
    cells: Vec<Option<u8>>,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
}

impl PartialLatinSquare {
    pub fn empty(n: usize) -> Result<Self, LatinError> {
        check_order(n)?;
        Ok(Self {
            order: n,
            cells: vec![None; n * n],
            row_used: vec![0; n],
            col_used: vec![0; n],
        })
    }

    /// Builds a partial square from triples. Repeating an identical triple is
    /// harmless; two different symbols for one cell, or a repeated symbol in a
    /// row or column, is rejected.
    pub fn from_triples<I>(n: usize, triples: I) -> Result<Self, LatinError>
    where
        I: IntoIterator<Item = Triple>,
    {
        let mut p = Self::empty(n)?;
        for t in triples {
            if p.get(t.row, t.col) == Some(t.sym) && t.row < n && t.col < n {
                continue;
            }
            p.insert(t)?;
        }
        Ok(p)
    }

    /// Builds a partial square from rows of optional symbols.
    pub fn from_rows(rows: &[Vec<Option<usize>>]) -> Result<Self, LatinError> {
        let n = rows.len();
        let mut p = Self::empty(n)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LatinError::InvalidGrid(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (c, s) in row.iter().enumerate() {
                if let Some(s) = *s {
                    p.insert(Triple::new(r, c, s))?;
                }
            }
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of filled cells.
    pub fn len(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Option::is_none)
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<usize> {
        if row >= self.order || col >= self.order {
            return None;
        }
        self.cells[row * self.order + col].map(usize::from)
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.get(t.row, t.col) == Some(t.sym)
    }

    /// Bitset of symbols that could legally go in an empty cell
    /// (zero for filled cells).
    pub fn candidates(&self, row: usize, col: usize) -> u64 {
        if self.cells[row * self.order + col].is_some() {
            return 0;
        }
        !(self.row_used[row] | self.col_used[col]) & full_mask(self.order)
    }

    /// Whether `t` can be added without breaking the partial square property.
    pub fn can_place(&self, t: Triple) -> bool {
        t.row < self.order
            && t.col < self.order
            && t.sym < self.order
            && self.candidates(t.row, t.col) & (1 << t.sym) != 0
    }

    pub fn insert(&mut self, t: Triple) -> Result<(), LatinError> {
        let n = self.order;
        if t.row >= n || t.col >= n || t.sym >= n {
            return Err(LatinError::InvalidPartial(format!(
                "triple {t} is out of range for order {n}"
            )));
        }
        if let Some(existing) = self.get(t.row, t.col) {
            return Err(LatinError::InvalidPartial(format!(
                "cell ({}, {}) already holds {existing}, cannot place {}",
                t.row, t.col, t.sym
            )));
        }
        if !self.can_place(t) {
            return Err(LatinError::InvalidPartial(format!(
                "symbol {} repeats in row {} or column {}",
                t.sym, t.row, t.col
            )));
        }
        self.set(t);
        Ok(())
    }

    /// Clears a cell, returning the triple that was there.
    pub fn remove(&mut self, row: usize, col: usize) -> Option<Triple> {
        let sym = self.get(row, col)?;
        self.unset(Triple::new(row, col, sym));
        Some(Triple::new(row, col, sym))
    }

    /// A copy with `t` removed.
    pub fn without(&self, t: Triple) -> Self {
        let mut p = self.clone();
        if p.contains(t) {
            p.remove(t.row, t.col);
        }
        p
    }

    /// Filled cells in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let n = self.order;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, s)| s.map(|s| Triple::new(i / n, i % n, s as usize)))
    }

    pub fn to_square(&self) -> Option<LatinSquare> {
        if !self.is_full() {
            return None;
        }
        Some(LatinSquare {
            order: self.order,
            grid: self.cells.iter().map(|c| c.unwrap()).collect(),
        })
    }

    /// When the first `m` rows (`1 ≤ m < n`) are full and the rest empty,
    /// returns those rows.
    pub fn rectangle_rows(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.order;
        let full_rows = (0..n)
            .take_while(|&r| (0..n).all(|c| self.get(r, c).is_some()))
            .count();
        let rest_empty = (full_rows..n).all(|r| (0..n).all(|c| self.get(r, c).is_none()));
        if full_rows == 0 || full_rows == n || !rest_empty {
            return None;
        }
        Some(
            (0..full_rows)
                .map(|r| (0..n).map(|c| self.get(r, c).unwrap()).collect())
                .collect(),
        )
    }

    // Unchecked mutation for the solvers.
    #[inline]
    pub(crate) fn set(&mut self, t: Triple) {
        self.cells[t.row * self.order + t.col] = Some(t.sym as u8);
        self.row_used[t.row] |= 1 << t.sym;
        self.col_used[t.col] |= 1 << t.sym;
    }

    #[inline]
    pub(crate) fn unset(&mut self, t: Triple) {
        self.cells[t.row * self.order + t.col] = None;
        self.row_used[t.row] &= !(1 << t.sym);
        self.col_used[t.col] &= !(1 << t.sym);
    }
}

impl From<&LatinSquare> for PartialLatinSquare {
    fn from(l: &LatinSquare) -> Self {
        l.to_partial()
    }
}

/// Extends a Latin rectangle (`m` full rows, `1 ≤ m < n`) to a full square.
///
/// Each new row is a perfect matching between columns and the symbols not yet
/// used in them, found by augmenting paths with columns and symbols in
/// ascending order.
pub fn extend_rectangle(rect: &[Vec<usize>]) -> Result<LatinSquare, LatinError> {
    let m = rect.len();
    let n = rect.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return Err(LatinError::InvalidRectangle("no rows".into()));
    }
    if n > MAX_ORDER {
        return Err(LatinError::InvalidOrder(n));
    }
    if m >= n {
        return Err(LatinError::InvalidRectangle(format!(
            "{m} rows is not fewer than the order {n}"
        )));
    }
    let full = full_mask(n);
    let mut col_used = vec![0u64; n];
    for (r, row) in rect.iter().enumerate() {
        if row.len() != n {
            return Err(LatinError::InvalidRectangle(format!(
                "row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        if row.iter().any(|&s| s >= n) || row.iter().fold(0u64, |m, &s| m | 1 << s) != full {
            return Err(LatinError::InvalidRectangle(format!(
                "row {r} is not a permutation of 0..{n}"
            )));
        }
        for (c, &s) in row.iter().enumerate() {
            if col_used[c] & (1 << s) != 0 {
                return Err(LatinError::InvalidRectangle(format!(
                    "symbol {s} repeats in column {c}"
                )));
            }
            col_used[c] |= 1 << s;
        }
    }
    let mut rows = rect.to_vec();
    let col_order: Vec<usize> = (0..n).collect();
    while rows.len() < n {
        let adj = matching::free_symbols(&rows, n);
        let row = matching::perfect_matching(&adj, &col_order, n).ok_or_else(|| {
            LatinError::InvalidRectangle("no perfect matching for the next row".into())
        })?;
        rows.push(row);
    }
    LatinSquare::from_rows(&rows)
}

/// `2! · 3! · … · n!`, the row-by-row lower bound on the number of Latin
/// squares of order `n`. The product is empty (so 1) for `n = 1`.
pub fn lower_bound(n: usize) -> Result<BigUint, LatinError> {
    if n == 0 {
        return Err(LatinError::InvalidOrder(n));
    }
    let mut factorial = BigUint::from(1u32);
    let mut product = BigUint::from(1u32);
    for k in 2..=n {
        factorial *= k;
        product *= &factorial;
    }
    Ok(product)
}
