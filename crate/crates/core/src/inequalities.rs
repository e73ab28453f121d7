//! CHSH and original-Bell quantities evaluated three ways: as deterministic
//! realism rows, with conditional (Born) expectations, and with partial
//! expectations over the joint measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{chsh_measure, setting_event, xy_variable, ChshAngles, JointMeasure, SettingPair, SettingsDistribution};
use crate::prob_space::PROBABILITY_TOL;

pub const CHSH_BOUND: f64 = 2.0;

/// One evaluation of `|t₀₀ + t₁₀ + t₁₁ − t₀₁|`.
///
/// `term_values` holds the unsigned terms in table order `[t₀₀, t₁₀, t₁₁, t₀₁]`;
/// the minus sign is applied only when forming `combined_value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub term_values: [f64; 4],
    pub combined_value: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl ChshReport {
    pub fn from_terms(term_values: [f64; 4]) -> Self {
        let combined_value = combine(&term_values);
        Self {
            term_values,
            combined_value,
            bound: CHSH_BOUND,
            satisfied: combined_value <= CHSH_BOUND + PROBABILITY_TOL,
        }
    }

    pub fn term(&self, pair: SettingPair) -> f64 {
        self.term_values[pair.table_column()]
    }
}

fn combine(terms: &[f64; 4]) -> f64 {
    SettingPair::TABLE_ORDER
        .iter()
        .zip(terms)
        .map(|(pair, t)| pair.chsh_sign() * t)
        .sum::<f64>()
        .abs()
}

/// `|E₀₀[−XY] − E₀₁[−XY]| ≤ 1 + E₁₁[−XY]`, with partial expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Terms `E[X·Y | A=a_i, B=b_j]`. These coincide with the Born correlations.
pub fn chsh_conditional(measure: &JointMeasure) -> Result<ChshReport> {
    let xy = xy_variable();
    let mut terms = [0.0; 4];
    for (t, pair) in terms.iter_mut().zip(SettingPair::TABLE_ORDER) {
        *t = measure
            .space()
            .conditional_expectation(&xy, &setting_event(pair))
            .map_err(|_| Error::ZeroProbabilitySetting(pair))?;
    }
    Ok(ChshReport::from_terms(terms))
}

/// Terms `E_{A=a_i, B=b_j}[X·Y]`: expectations of `X·Y·1{A=a_i,B=b_j}`.
pub fn chsh_partial(measure: &JointMeasure) -> ChshReport {
    let xy = xy_variable();
    let terms = SettingPair::TABLE_ORDER.map(|pair| measure.space().partial_expectation(&xy, &setting_event(pair)));
    ChshReport::from_terms(terms)
}

/// The CHSH row value `x₀y₀ + x₁y₀ + x₁y₁ − x₀y₁` for every deterministic
/// assignment `(x₀, x₁, y₀, y₁) ∈ {−1,1}⁴`.
///
/// Assignments are enumerated with `x₀` as the most significant position and
/// `−1` before `+1`, so entry 0 is all `−1`.
pub fn realism_table_check() -> Vec<RealismRow> {
    (0..16u8)
        .map(|bits| {
            let v = |shift: u8| if bits >> shift & 1 == 1 { 1i8 } else { -1 };
            let (x0, x1, y0, y1) = (v(3), v(2), v(1), v(0));
            RealismRow {
                assignment: [x0, x1, y0, y1],
                chsh: x0 * y0 + x1 * y0 + x1 * y1 - x0 * y1,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealismRow {
    /// `[x0, x1, y0, y1]`.
    pub assignment: [i8; 4],
    pub chsh: i8,
}

/// Original three-setting Bell inequality on the measure built from
/// `a₀ = a0`, `a₁ = b₀ = shared`, `b₁ = b1`.
pub fn bell_original(a0: f64, shared: f64, b1: f64, settings: SettingsDistribution) -> Result<BellReport> {
    let measure = chsh_measure(ChshAngles::new(a0, shared, shared, b1), settings);
    bell_original_from_measure(&measure)
}

pub fn bell_original_from_measure(measure: &JointMeasure) -> Result<BellReport> {
    let angles = measure.angles();
    if angles.a[1] != angles.b[0] {
        return Err(Error::SharedAngleMismatch);
    }
    let shared_mass = measure.settings().get(SettingPair::new(1, 0));
    if shared_mass > PROBABILITY_TOL {
        return Err(Error::SharedSettingActive(shared_mass));
    }
    let anti = xy_variable().scale(-1.0);
    let partial = |i, j| measure.space().partial_expectation(&anti, &setting_event(SettingPair::new(i, j)));
    let lhs = (partial(0, 0) - partial(0, 1)).abs();
    let rhs = 1.0 + partial(1, 1);
    Ok(BellReport {
        lhs,
        rhs,
        satisfied: lhs <= rhs + PROBABILITY_TOL,
    })
}
