//! Dense primal simplex with Bland's anti-cycling rule, and the zero-sum
//! matrix game solved through it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

/// Optimal solution of `max c·x  s.t.  A x <= b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Shadow prices of the constraint rows.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Unbounded,
    /// `b` must be non-negative so the slack basis is feasible.
    InfeasibleStart,
}

/// Solves `max c·x` subject to `A x <= b`, `x >= 0` with `b >= 0`.
///
/// `a` is row-major with `b.len()` rows and `c.len()` columns.
pub fn maximize(a: &[f64], b: &[f64], c: &[f64]) -> core::result::Result<LpSolution, LpError> {
    let (m, n) = (b.len(), c.len());
    assert_eq!(a.len(), m * n, "constraint matrix shape");
    if b.iter().any(|&v| v < 0.0) {
        return Err(LpError::InfeasibleStart);
    }
    // Columns: n structural, m slack, then the right-hand side.
    let width = n + m + 1;
    let rhs = n + m;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        let row = &mut t[i * width..(i + 1) * width];
        row[..n].copy_from_slice(&a[i * n..(i + 1) * n]);
        row[n + i] = 1.0;
        row[rhs] = b[i];
    }
    // Objective row holds reduced costs z_j - c_j.
    {
        let obj = &mut t[m * width..];
        for j in 0..n {
            obj[j] = -c[j];
        }
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;

    loop {
        // Bland: lowest-index column with a negative reduced cost.
        let obj = &t[m * width..];
        let Some(enter) = (0..n + m).find(|&j| obj[j] < -PIVOT_EPS) else {
            break;
        };
        // Ratio test, ties broken by the lowest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + rhs] / coef;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => ratio < lr || (ratio == lr && basis[i] < basis[li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(&mut t, width, m, row, enter);
        basis[row] = enter;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = t[i * width + rhs];
        }
    }
    let obj = &t[m * width..];
    Ok(LpSolution {
        x,
        objective: obj[rhs],
        duals: (0..m).map(|i| obj[n + i]).collect(),
        pivots,
    })
}

fn pivot(t: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    t[row * width + col] = 1.0;
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..=m {
        if i == row {
            continue;
        }
        let factor = t[i * width + col];
        if factor == 0.0 {
            continue;
        }
        let r = &mut t[i * width..(i + 1) * width];
        for (v, &pv) in r.iter_mut().zip(&pivot_row) {
            *v -= factor * pv;
        }
        r[col] = 0.0;
    }
}

/// Optimal strategies of a finite zero-sum game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    /// Game value: what the row player can guarantee and the column
    /// player can hold it to.
    pub value: f64,
    /// Column player's (minimizer's) mixed strategy.
    pub column_strategy: Vec<f64>,
    /// Row player's (maximizer's) mixed strategy.
    pub row_strategy: Vec<f64>,
}

/// Solves `min_p max_j (A p)_j` over mixed strategies `p` of the column
/// player, where row `j` of `a` lists the row player's payoffs.
///
/// The matrix is shifted to be strictly positive, which turns the problem
/// into `max Σx  s.t.  A' x <= 1, x >= 0` with value `1/Σx`.
pub fn solve_zero_sum(rows: usize, cols: usize, a: &[f64]) -> Result<GameSolution> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyGame);
    }
    assert_eq!(a.len(), rows * cols, "payoff matrix shape");
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("payoff entry"));
    }
    let min = a.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let shifted: Vec<f64> = a.iter().map(|v| v + shift).collect();
    let solution = maximize(&shifted, &vec![1.0; rows], &vec![1.0; cols])
        .expect("positive game LP is feasible and bounded");
    let total = solution.objective;
    let shifted_value = 1.0 / total;
    let normalize = |v: &[f64]| -> Vec<f64> {
        let s: f64 = v.iter().sum();
        v.iter().map(|x| (x / s).max(0.0)).collect()
    };
    Ok(GameSolution {
        value: shifted_value - shift,
        column_strategy: normalize(&solution.x),
        row_strategy: normalize(&solution.duals),
    })
}
