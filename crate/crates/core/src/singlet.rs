//! Quantum model of the two-particle singlet experiment.
//!
//! Each detector is a spin observable `F_a` with eigenvalues `+1`/`-1`, fully
//! determined by an angle `a ∈ [0, π)`. The joint outcome probabilities for a
//! pair of detectors follow from the Born rule applied to the singlet state.
//! Two routes are provided: the closed form in [`conditional_joint_probs`] and
//! an explicit spectral decomposition in [`spectral_coefficients`]. They are
//! cross-checked in the tests.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

/// Tolerance used for analytic identities in double precision.
pub const ANALYTIC_TOL: f64 = 1e-12;

/// A detector setting, reduced modulo π.
///
/// Flipping an eigenvector's sign does not change the measured ray, so
/// `a` and `a ± π` describe the same detector.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "f64", from = "f64")]
pub struct DetectorAngle(f64);

impl DetectorAngle {
    pub fn new(radians: f64) -> Self {
        let mut value = radians.rem_euclid(PI);
        // rem_euclid can round up to exactly π for tiny negative inputs
        if value >= PI {
            value = 0.0;
        }
        Self(value)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::new(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<f64> for DetectorAngle {
    fn from(radians: f64) -> Self {
        Self::new(radians)
    }
}

impl From<DetectorAngle> for f64 {
    fn from(angle: DetectorAngle) -> Self {
        angle.0
    }
}

impl fmt::Display for DetectorAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single detector outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> Self {
        s.value()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("outcome must be +1 or -1, got {other}")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Outcome pairs `(x, y)` in table row order: `(1,1), (-1,1), (1,-1), (-1,-1)`.
pub const OUTCOME_ROWS: [(Sign, Sign); 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Minus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Minus),
];

pub(crate) fn row_index(x: Sign, y: Sign) -> usize {
    match (x, y) {
        (Sign::Plus, Sign::Plus) => 0,
        (Sign::Minus, Sign::Plus) => 1,
        (Sign::Plus, Sign::Minus) => 2,
        (Sign::Minus, Sign::Minus) => 3,
    }
}

/// Probabilities of the four outcome pairs, stored in [`OUTCOME_ROWS`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbs(pub [f64; 4]);

impl OutcomeProbs {
    pub fn get(&self, x: Sign, y: Sign) -> f64 {
        self.0[row_index(x, y)]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `Σ x·y·p(x,y)`.
    pub fn correlation(&self) -> f64 {
        OUTCOME_ROWS
            .iter()
            .zip(self.0)
            .map(|(&(x, y), p)| x.as_f64() * y.as_f64() * p)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Sign, Sign), f64)> + '_ {
        OUTCOME_ROWS.iter().copied().zip(self.0)
    }
}

impl Index<(Sign, Sign)> for OutcomeProbs {
    type Output = f64;

    fn index(&self, (x, y): (Sign, Sign)) -> &f64 {
        &self.0[row_index(x, y)]
    }
}

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// The observable `F_a = f_a f_aᵀ − f̃_a f̃_aᵀ` with its eigenpairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOperator {
    pub angle: DetectorAngle,
    pub matrix: Mat2,
    /// Eigenvector for outcome `+1`.
    pub plus_eigenvector: Vec2,
    /// Eigenvector for outcome `-1`; equals the `+1` eigenvector at `a + π/2`.
    pub minus_eigenvector: Vec2,
}

impl DetectorOperator {
    pub fn eigenvector(&self, outcome: Sign) -> Vec2 {
        match outcome {
            Sign::Plus => self.plus_eigenvector,
            Sign::Minus => self.minus_eigenvector,
        }
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        let m = &self.matrix;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn determinant(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    pub fn squared(&self) -> Mat2 {
        let m = &self.matrix;
        let mut out = [[0.0; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = m[r][0] * m[0][c] + m[r][1] * m[1][c];
            }
        }
        out
    }
}

pub fn detector_operator(a: DetectorAngle) -> DetectorOperator {
    let a = a.radians();
    let (s2, c2) = (2.0 * a).sin_cos();
    let (s, c) = a.sin_cos();
    DetectorOperator {
        angle: DetectorAngle(a),
        matrix: [[c2, s2], [s2, -c2]],
        plus_eigenvector: [c, s],
        minus_eigenvector: [-s, c],
    }
}

/// The singlet `(e₀⊗e₁ − e₁⊗e₀)/√2` over the basis
/// `e₀⊗e₀, e₀⊗e₁, e₁⊗e₀, e₁⊗e₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletState {
    pub amplitudes: [f64; 4],
}

impl Default for SingletState {
    fn default() -> Self {
        Self::new()
    }
}

impl SingletState {
    pub const fn new() -> Self {
        Self {
            amplitudes: [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// Amplitudes with the two tensor factors exchanged.
    pub fn swapped(&self) -> [f64; 4] {
        let a = &self.amplitudes;
        [a[0], a[2], a[1], a[3]]
    }

    /// Inner product with the product vector `u ⊗ v`.
    pub fn overlap(&self, u: Vec2, v: Vec2) -> f64 {
        let product = [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]];
        self.amplitudes.iter().zip(product).map(|(a, b)| a * b).sum()
    }
}

/// Coefficients `ψ_xy` of the singlet in the eigenbasis of `F_a ⊗ F_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCoefficients {
    pub psi: [f64; 4],
}

impl SpectralCoefficients {
    pub fn get(&self, x: Sign, y: Sign) -> f64 {
        self.psi[row_index(x, y)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.psi.iter().map(|p| p * p).sum()
    }

    /// Born rule: `p(x,y|a,b) = ψ_xy²`.
    pub fn born_probs(&self) -> OutcomeProbs {
        OutcomeProbs(self.psi.map(|p| p * p))
    }
}

pub fn spectral_coefficients(a: DetectorAngle, b: DetectorAngle) -> SpectralCoefficients {
    let state = SingletState::new();
    let fa = detector_operator(a);
    let fb = detector_operator(b);
    let mut psi = [0.0; 4];
    for (k, &(x, y)) in OUTCOME_ROWS.iter().enumerate() {
        psi[k] = state.overlap(fa.eigenvector(x), fb.eigenvector(y));
    }
    SpectralCoefficients { psi }
}

/// Closed-form joint probabilities `p(x,y|a,b)`:
/// `½sin²(a−b)` for equal outcomes, `½cos²(a−b)` for opposite ones.
pub fn conditional_joint_probs(a: DetectorAngle, b: DetectorAngle) -> OutcomeProbs {
    let (s, c) = (a.radians() - b.radians()).sin_cos();
    let same = 0.5 * s * s;
    let opposite = 0.5 * c * c;
    OutcomeProbs([same, opposite, opposite, same])
}

/// Born expectation of `X·Y`, i.e. `−cos(2(a−b))`.
pub fn correlation(a: DetectorAngle, b: DetectorAngle) -> f64 {
    conditional_joint_probs(a, b).correlation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= ANALYTIC_TOL
    }

    fn angle(r: f64) -> DetectorAngle {
        DetectorAngle::new(r)
    }

    #[test]
    fn canonicalizes_modulo_pi() {
        assert!(close(angle(PI + 0.3).radians(), 0.3));
        assert!(close(angle(-0.25).radians(), PI - 0.25));
        assert_eq!(angle(PI).radians(), 0.0);
        assert_eq!(angle(-1e-300).radians(), 0.0);
        assert!(close(DetectorAngle::from_degrees(45.0).radians(), FRAC_PI_4));
    }

    #[test]
    fn operator_at_reference_angles() {
        let f0 = detector_operator(angle(0.0));
        assert_eq!(f0.matrix, [[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(f0.plus_eigenvector, [1.0, 0.0]);

        let f1 = detector_operator(angle(FRAC_PI_4));
        let sigma1 = [[0.0, 1.0], [1.0, 0.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!(close(f1.matrix[r][c], sigma1[r][c]));
            }
        }

        let f8 = detector_operator(angle(FRAC_PI_8));
        let h = SQRT_2 / 2.0;
        let expected = [[h, h], [h, -h]];
        for r in 0..2 {
            for c in 0..2 {
                assert!(close(f8.matrix[r][c], expected[r][c]));
            }
        }
    }

    #[test]
    fn operator_invariants() {
        for k in 0..97 {
            let a = angle(k as f64 * 0.0331);
            let f = detector_operator(a);
            assert!(close(f.trace(), 0.0));
            assert!(close(f.determinant(), -1.0));
            let sq = f.squared();
            assert!(close(sq[0][0], 1.0) && close(sq[1][1], 1.0));
            assert!(close(sq[0][1], 0.0) && close(sq[1][0], 0.0));

            let plus = f.apply(f.plus_eigenvector);
            let minus = f.apply(f.minus_eigenvector);
            for c in 0..2 {
                assert!(close(plus[c], f.plus_eigenvector[c]));
                assert!(close(minus[c], -f.minus_eigenvector[c]));
            }
            let (u, v) = (f.plus_eigenvector, f.minus_eigenvector);
            assert!(close(u[0] * v[0] + u[1] * v[1], 0.0));
            assert!(close(u[0] * u[0] + u[1] * u[1], 1.0));
            let rotated = detector_operator(angle(a.radians() + PI / 2.0));
            // f̃_a = f_{a+π/2} up to the sign absorbed by canonicalization
            let r = rotated.plus_eigenvector;
            let dot = r[0] * v[0] + r[1] * v[1];
            assert!(close(dot.abs(), 1.0));
        }
    }

    #[test]
    fn singlet_is_normalized_and_antisymmetric() {
        let s = SingletState::new();
        assert!(close(s.norm_squared(), 1.0));
        let swapped = s.swapped();
        for k in 0..4 {
            assert!(close(swapped[k], -s.amplitudes[k]));
        }
    }

    #[test]
    fn spectral_examples() {
        let psi = spectral_coefficients(angle(0.0), angle(0.0));
        assert!(close(psi.get(Sign::Minus, Sign::Plus).powi(2), 0.5));

        let b = 5.0 * PI / 8.0;
        let psi = spectral_coefficients(angle(0.0), angle(b));
        let beta2 = (2.0 - SQRT_2) / 4.0;
        assert!(close(psi.get(Sign::Minus, Sign::Plus).powi(2), beta2 / 2.0));
        assert!(close(psi.get(Sign::Minus, Sign::Plus).powi(2), 0.0732233047033631));
    }

    #[test]
    fn spectral_coefficient_matches_determinant_form() {
        for k in 0..50 {
            let a = k as f64 * 0.061;
            let b = 3.0 - k as f64 * 0.047;
            let psi = spectral_coefficients(angle(a), angle(b));
            let (ca, sa) = (angle(a).radians().cos(), angle(a).radians().sin());
            let (cb, sb) = (angle(b).radians().cos(), angle(b).radians().sin());
            let det = -sa * sb - cb * ca;
            assert!(close(psi.get(Sign::Minus, Sign::Plus), FRAC_1_SQRT_2 * det));
            assert!(close(psi.norm_squared(), 1.0));
        }
    }

    #[test]
    fn closed_form_examples() {
        let p = conditional_joint_probs(angle(0.3), angle(0.3));
        assert_eq!(p.0, [0.0, 0.5, 0.5, 0.0]);

        let gamma2 = (2.0 + SQRT_2) / 4.0;
        let beta2 = (2.0 - SQRT_2) / 4.0;
        let p = conditional_joint_probs(angle(0.0), angle(5.0 * PI / 8.0));
        assert!(close(p.get(Sign::Plus, Sign::Plus), gamma2 / 2.0));
        assert!(close(p.get(Sign::Minus, Sign::Plus), beta2 / 2.0));
        assert!(close(p.get(Sign::Plus, Sign::Plus), 0.4267766952966369));

        let p = conditional_joint_probs(angle(0.0), angle(7.0 * PI / 8.0));
        assert!(close(p[(Sign::Plus, Sign::Plus)], beta2 / 2.0));
    }

    #[test]
    fn correlation_examples() {
        assert!(close(correlation(angle(1.1), angle(1.1)), -1.0));
        assert!(close(correlation(angle(0.0), angle(5.0 * PI / 8.0)), SQRT_2 / 2.0));
        assert!(close(correlation(angle(0.0), angle(7.0 * PI / 8.0)), -SQRT_2 / 2.0));
    }
}
