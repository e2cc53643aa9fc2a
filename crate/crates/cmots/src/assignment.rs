//! One-to-one matching: optimal (Hungarian) and greedy maximum-similarity.
//!
//! Both matchers are deterministic. `hungarian_min` breaks ties between
//! equal-cost assignments by the lexicographically smallest pair list;
//! `greedy_max` breaks ties by the smallest (row, col) pair. Rectangular
//! matrices are matched up to min(rows, cols) pairs, with the surplus
//! reported unmatched.

use crate::error::{Error, Result};

/// Dense rows x cols matrix of finite costs (or similarities in max mode).
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("cost matrix"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "cost matrix data length {} for {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

/// Result of a one-to-one matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Matched (row, col) pairs. `hungarian_min` sorts them by row;
    /// `greedy_max` lists them in selection order (descending similarity).
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

impl Matching {
    /// Sum of matrix entries over the matched pairs.
    pub fn total(&self, m: &CostMatrix) -> f64 {
        self.pairs.iter().map(|&(i, j)| m.get(i, j)).sum()
    }

    pub fn col_for_row(&self, row: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(r, _)| r == row).map(|&(_, c)| c)
    }
}

fn build_matching(rows: usize, cols: usize, row_to_col: &[Option<usize>]) -> Matching {
    let mut pairs = Vec::new();
    let mut used_cols = vec![false; cols];
    for (r, c) in row_to_col.iter().enumerate() {
        if let Some(c) = *c {
            pairs.push((r, c));
            used_cols[c] = true;
        }
    }
    let unmatched_rows = (0..rows).filter(|&r| row_to_col[r].is_none()).collect();
    let unmatched_cols = (0..cols).filter(|&c| !used_cols[c]).collect();
    Matching {
        pairs,
        unmatched_rows,
        unmatched_cols,
    }
}

/// Shortest-augmenting-path assignment for `rows <= cols`.
/// Returns row -> col of a minimum-cost complete matching.
fn solve_rows_le_cols(cost: &dyn Fn(usize, usize) -> f64, rows: usize, cols: usize) -> Vec<usize> {
    debug_assert!(rows <= cols);
    // 1-indexed potentials with a sentinel column 0, after the classical
    // O(n^2 m) formulation.
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut p = vec![0usize; cols + 1]; // p[j] = row matched to col j (1-based, 0 = free)
    let mut way = vec![0usize; cols + 1];

    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![usize::MAX; rows];
    for j in 1..=cols {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Minimum total cost over complete matchings of the given row/col subsets.
fn subset_min_cost(m: &CostMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    if rows.len() <= cols.len() {
        let assign = solve_rows_le_cols(&|i, j| m.get(rows[i], cols[j]), rows.len(), cols.len());
        assign
            .iter()
            .enumerate()
            .map(|(i, &j)| m.get(rows[i], cols[j]))
            .sum()
    } else {
        let assign = solve_rows_le_cols(&|j, i| m.get(rows[i], cols[j]), cols.len(), rows.len());
        assign
            .iter()
            .enumerate()
            .map(|(j, &i)| m.get(rows[i], cols[j]))
            .sum()
    }
}

/// Optimal completion for the given subsets, as row index -> Option<col index>
/// (indices into the original matrix).
fn subset_solution(m: &CostMatrix, rows: &[usize], cols: &[usize]) -> Vec<(usize, usize)> {
    if rows.is_empty() || cols.is_empty() {
        return Vec::new();
    }
    if rows.len() <= cols.len() {
        let assign = solve_rows_le_cols(&|i, j| m.get(rows[i], cols[j]), rows.len(), cols.len());
        assign
            .iter()
            .enumerate()
            .map(|(i, &j)| (rows[i], cols[j]))
            .collect()
    } else {
        let assign = solve_rows_le_cols(&|j, i| m.get(rows[i], cols[j]), cols.len(), rows.len());
        assign
            .iter()
            .enumerate()
            .map(|(j, &i)| (rows[i], cols[j]))
            .collect()
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Minimum-cost complete matching (min(rows, cols) pairs).
///
/// Among all minimum-cost matchings, returns the one whose pair list sorted
/// by row is lexicographically smallest. Errors on non-finite entries.
pub fn hungarian_min(m: &CostMatrix) -> Result<Matching> {
    m.check_finite()?;
    let (rows, cols) = (m.rows, m.cols);

    let all_rows: Vec<usize> = (0..rows).collect();
    let all_cols: Vec<usize> = (0..cols).collect();
    let optimum = subset_min_cost(m, &all_rows, &all_cols);

    // Fix rows one at a time, preferring the smallest column (or a match at
    // all, when rows outnumber columns) that still completes to the optimum.
    let mut ref_pairs = subset_solution(m, &all_rows, &all_cols);
    let mut row_to_col: Vec<Option<usize>> = vec![None; rows];
    let mut col_used = vec![false; cols];
    let mut fixed_cost = 0.0;

    for i in 0..rows {
        let ref_col = ref_pairs
            .iter()
            .find(|&&(r, _)| r == i)
            .map(|&(_, c)| c);
        let limit = ref_col.unwrap_or(cols);
        let remaining_rows: Vec<usize> = (i + 1..rows).collect();
        let mut chosen = ref_col;
        for cand in (0..limit).filter(|&c| !col_used[c]) {
            let remaining_cols: Vec<usize> =
                (0..cols).filter(|&c| !col_used[c] && c != cand).collect();
            let sub = subset_min_cost(m, &remaining_rows, &remaining_cols);
            if approx_eq(fixed_cost + m.get(i, cand) + sub, optimum) {
                chosen = Some(cand);
                ref_pairs = subset_solution(m, &remaining_rows, &remaining_cols);
                break;
            }
        }
        if let Some(c) = chosen {
            row_to_col[i] = Some(c);
            col_used[c] = true;
            fixed_cost += m.get(i, c);
        }
    }

    Ok(build_matching(rows, cols, &row_to_col))
}

/// Greedy maximum-similarity matching: repeatedly selects the globally
/// largest unused (row, col) entry, ties by smallest (row, col), until
/// min(rows, cols) pairs are chosen. Not optimal by design.
pub fn greedy_max(sim: &CostMatrix) -> Result<Matching> {
    sim.check_finite()?;
    let (rows, cols) = (sim.rows, sim.cols);
    let n_pairs = rows.min(cols);

    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..rows {
            if row_used[i] {
                continue;
            }
            for j in 0..cols {
                if col_used[j] {
                    continue;
                }
                let s = sim.get(i, j);
                if best.map_or(true, |(_, _, b)| s > b) {
                    best = Some((i, j, s));
                }
            }
        }
        let (i, j, _) = best.expect("pairs remain while budget remains");
        row_used[i] = true;
        col_used[j] = true;
        pairs.push((i, j));
    }

    Ok(Matching {
        pairs,
        unmatched_rows: (0..rows).filter(|&r| !row_used[r]).collect(),
        unmatched_cols: (0..cols).filter(|&c| !col_used[c]).collect(),
    })
}
