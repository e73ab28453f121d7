//! Least-squares fit of a product of two Bernoulli distributions per setting
//! pair. The model has one success probability per detector setting:
//! `q` for `a₀`, `r` for `a₁`, `s` for `b₀`, `t` for `b₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::JointMeasure;
use crate::singlet::{Sign, OUTCOME_ROWS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductFit {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub residual: f64,
}

impl ProductFit {
    pub fn params(&self) -> [f64; 4] {
        [self.q, self.r, self.s, self.t]
    }
}

/// Parameter indices `(A side, B side)` per table column; params are `[q, r, s, t]`.
const COLUMN_PARAMS: [(usize, usize); 4] = [(0, 2), (1, 2), (1, 3), (0, 3)];

const COARSE_STEPS: usize = 10;
const STARTS: usize = 8;
const MAX_SWEEPS: usize = 20_000;

fn bernoulli(success: f64, outcome: Sign) -> f64 {
    match outcome {
        Sign::Plus => success,
        Sign::Minus => 1.0 - success,
    }
}

/// The factorized measure under uniform settings, `columns[c][r]` in table layout.
pub fn product_table(params: [f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (col, &(pa, pb)) in COLUMN_PARAMS.iter().enumerate() {
        for (row, &(x, y)) in OUTCOME_ROWS.iter().enumerate() {
            out[col][row] = 0.25 * bernoulli(params[pa], x) * bernoulli(params[pb], y);
        }
    }
    out
}

/// Sum over the 16 cells of squared differences to `target`.
pub fn product_residual(params: [f64; 4], target: &[[f64; 4]; 4]) -> f64 {
    let model = product_table(params);
    model
        .iter()
        .flatten()
        .zip(target.iter().flatten())
        .map(|(m, t)| (m - t).powi(2))
        .sum()
}

/// Minimizes the residual over `[0,1]⁴`: coarse grid, then exact coordinate
/// descent from the best grid points. Each cell is affine in every single
/// parameter, so the one-dimensional subproblems are convex quadratics.
pub fn factorizability_fit(measure: &JointMeasure) -> Result<ProductFit> {
    if !measure.settings().is_uniform() {
        return Err(Error::NonUniformSettings);
    }
    Ok(fit_product_table(&measure.columns()))
}

pub fn fit_product_table(target: &[[f64; 4]; 4]) -> ProductFit {
    let mut grid = Vec::with_capacity((COARSE_STEPS + 1).pow(4));
    let node = |k: usize| k as f64 / COARSE_STEPS as f64;
    for a in 0..=COARSE_STEPS {
        for b in 0..=COARSE_STEPS {
            for c in 0..=COARSE_STEPS {
                for d in 0..=COARSE_STEPS {
                    let p = [node(a), node(b), node(c), node(d)];
                    grid.push((product_residual(p, target), p));
                }
            }
        }
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut best: Option<([f64; 4], f64)> = None;
    for &(_, start) in grid.iter().take(STARTS) {
        let params = coordinate_descent(start, target);
        let res = product_residual(params, target);
        if best.is_none_or(|(_, r)| res < r) {
            best = Some((params, res));
        }
    }
    let ([q, r, s, t], residual) = best.expect("at least one start");
    ProductFit { q, r, s, t, residual }
}

fn coordinate_descent(mut params: [f64; 4], target: &[[f64; 4]; 4]) -> [f64; 4] {
    for _ in 0..MAX_SWEEPS {
        let mut moved: f64 = 0.0;
        for k in 0..4 {
            let updated = exact_coordinate_minimum(&params, k, target);
            moved = moved.max((updated - params[k]).abs());
            params[k] = updated;
        }
        if moved < 1e-15 {
            break;
        }
    }
    params
}

fn exact_coordinate_minimum(params: &[f64; 4], k: usize, target: &[[f64; 4]; 4]) -> f64 {
    // cell = c0 + c1·θ for the free parameter θ
    let (mut num, mut den) = (0.0, 0.0);
    for (col, &(pa, pb)) in COLUMN_PARAMS.iter().enumerate() {
        if pa != k && pb != k {
            continue;
        }
        for (row, &(x, y)) in OUTCOME_ROWS.iter().enumerate() {
            let (own, other) = if pa == k {
                (x, 0.25 * bernoulli(params[pb], y))
            } else {
                (y, 0.25 * bernoulli(params[pa], x))
            };
            let (c0, c1) = match own {
                Sign::Plus => (0.0, other),
                Sign::Minus => (other, -other),
            };
            num += c1 * (target[col][row] - c0);
            den += c1 * c1;
        }
    }
    if den <= 0.0 {
        return params[k];
    }
    (num / den).clamp(0.0, 1.0)
}
