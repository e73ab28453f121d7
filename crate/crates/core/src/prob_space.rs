//! Finite probability spaces with random variables, events and the three
//! flavours of expectation: plain, conditional and partial.
//!
//! The event space is the power set of the outcomes, so an [`Event`] is just
//! a predicate.

use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

use crate::error::{Error, Result};

pub const PROBABILITY_TOL: f64 = 1e-12;

/// Checks that `weights` form a probability vector without renormalizing.
pub(crate) fn validate_distribution(weights: &[f64]) -> Result<()> {
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() || !(0.0..=1.0 + PROBABILITY_TOL).contains(&w) {
            return Err(Error::InvalidProbability { index, value: w });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbabilitySpace<T> {
    outcomes: Vec<T>,
    weights: Vec<f64>,
}

impl<T: PartialEq> FiniteProbabilitySpace<T> {
    pub fn new(outcomes: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if outcomes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                outcomes: outcomes.len(),
                weights: weights.len(),
            });
        }
        for (index, o) in outcomes.iter().enumerate() {
            if outcomes[..index].contains(o) {
                return Err(Error::DuplicateOutcome { index });
            }
        }
        validate_distribution(&weights)?;
        Ok(Self { outcomes, weights })
    }

    pub fn uniform(outcomes: Vec<T>) -> Result<Self> {
        let n = outcomes.len();
        Self::new(outcomes, vec![1.0 / n as f64; n])
    }
}

impl<T> FiniteProbabilitySpace<T> {
    pub fn outcomes(&self) -> &[T] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.outcomes.iter().zip(self.weights.iter().copied())
    }

    pub fn probability(&self, event: &Event<T>) -> f64 {
        self.iter().filter(|(o, _)| event.contains(o)).map(|(_, w)| w).sum()
    }

    /// `E[X] = Σ_ω X(ω)·P[{ω}]`.
    pub fn expectation(&self, rv: &RandomVariable<T>) -> f64 {
        self.iter().map(|(o, w)| rv.eval(o) * w).sum()
    }

    /// `E[X | A] = Σ_ω X(ω)·P[{ω} | A]`; undefined when `P[A] = 0`.
    pub fn conditional_expectation(&self, rv: &RandomVariable<T>, event: &Event<T>) -> Result<f64> {
        let pa = self.probability(event);
        if pa <= 0.0 {
            return Err(Error::ZeroProbabilityEvent);
        }
        Ok(self.partial_expectation(rv, event) / pa)
    }

    /// `E_A[X] = Σ_{ω∈A} X(ω)·P[{ω}]`, which is `E[X·1_A]`. No renormalization,
    /// so a null event simply yields 0.
    pub fn partial_expectation(&self, rv: &RandomVariable<T>, event: &Event<T>) -> f64 {
        self.iter()
            .filter(|(o, _)| event.contains(o))
            .map(|(o, w)| rv.eval(o) * w)
            .sum()
    }

    /// Checks `E_A[X] = E[X|A]·P[A]` within [`PROBABILITY_TOL`].
    pub fn verify_expectation_relation(&self, rv: &RandomVariable<T>, event: &Event<T>) -> bool {
        match self.conditional_expectation(rv, event) {
            Ok(cond) => {
                let partial = self.partial_expectation(rv, event);
                (partial - cond * self.probability(event)).abs() <= PROBABILITY_TOL
            }
            Err(_) => false,
        }
    }
}

/// A real-valued function of an outcome.
pub struct RandomVariable<T> {
    f: Arc<dyn Fn(&T) -> f64 + Send + Sync>,
}

impl<T> Clone for RandomVariable<T> {
    fn clone(&self) -> Self {
        Self { f: Arc::clone(&self.f) }
    }
}

impl<T> fmt::Debug for RandomVariable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RandomVariable(..)")
    }
}

impl<T: 'static> RandomVariable<T> {
    pub fn new(f: impl Fn(&T) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    /// The indicator `1_A`.
    pub fn indicator(event: &Event<T>) -> Self {
        let event = event.clone();
        Self::new(move |o| if event.contains(o) { 1.0 } else { 0.0 })
    }

    pub fn scale(&self, c: f64) -> Self {
        let f = Arc::clone(&self.f);
        Self::new(move |o| c * f(o))
    }

    pub fn map(&self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let f = Arc::clone(&self.f);
        Self::new(move |o| g(f(o)))
    }
}

impl<T> RandomVariable<T> {
    pub fn eval(&self, outcome: &T) -> f64 {
        (self.f)(outcome)
    }
}

impl<T: 'static> Add for RandomVariable<T> {
    type Output = RandomVariable<T>;

    fn add(self, rhs: Self) -> Self::Output {
        RandomVariable::new(move |o| self.eval(o) + rhs.eval(o))
    }
}

impl<T: 'static> Mul for RandomVariable<T> {
    type Output = RandomVariable<T>;

    fn mul(self, rhs: Self) -> Self::Output {
        RandomVariable::new(move |o| self.eval(o) * rhs.eval(o))
    }
}

/// A subset of the outcomes, given by its membership predicate.
pub struct Event<T> {
    pred: Arc<dyn Fn(&T) -> bool + Send + Sync>,
}

impl<T> Clone for Event<T> {
    fn clone(&self) -> Self {
        Self { pred: Arc::clone(&self.pred) }
    }
}

impl<T> fmt::Debug for Event<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Event(..)")
    }
}

impl<T: 'static> Event<T> {
    pub fn new(pred: impl Fn(&T) -> bool + Send + Sync + 'static) -> Self {
        Self { pred: Arc::new(pred) }
    }

    /// The sure event Ω.
    pub fn everything() -> Self {
        Self::new(|_| true)
    }

    pub fn complement(&self) -> Self {
        let p = Arc::clone(&self.pred);
        Self::new(move |o| !p(o))
    }

    pub fn and(&self, other: &Event<T>) -> Self {
        let (p, q) = (Arc::clone(&self.pred), Arc::clone(&other.pred));
        Self::new(move |o| p(o) && q(o))
    }
}

impl<T> Event<T> {
    pub fn contains(&self, outcome: &T) -> bool {
        (self.pred)(outcome)
    }
}

/// Outcome of throwing two dice: `(x, y)` with values `1..=6`.
pub type DicePair = (u8, u8);

/// Two fair dice thrown together: 36 equiprobable outcomes.
pub fn dice_space() -> FiniteProbabilitySpace<DicePair> {
    let outcomes: Vec<DicePair> = (1..=6).flat_map(|x| (1..=6).map(move |y| (x, y))).collect();
    FiniteProbabilitySpace::uniform(outcomes).expect("36 distinct equiprobable outcomes")
}

pub fn die_x() -> RandomVariable<DicePair> {
    RandomVariable::new(|&(x, _)| f64::from(x))
}

pub fn die_y() -> RandomVariable<DicePair> {
    RandomVariable::new(|&(_, y)| f64::from(y))
}
