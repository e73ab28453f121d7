//! Numerical search for the smallest margin `m` such that some discretized
//! hidden-variable model reproduces the conditional Born probabilities to
//! within `m` in max-norm.
//!
//! Each restart runs two phases of projected coordinate descent from a seeded
//! random start. The first minimizes the sum of squared deviations (exact
//! one-dimensional minimization for response coordinates, which enter the
//! predictions affinely; step search for the weights). The second minimizes
//! the max-norm itself with a shrinking step, accepting moves that lower the
//! max deviation or keep it and lower the squared sum. For even grids the
//! best model of the half-size grid is refined and used as an extra start,
//! so a finer grid never reports a worse margin.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{ChshAngles, SettingPair};
use crate::singlet::{conditional_joint_probs, OutcomeProbs, Sign, OUTCOME_ROWS};

use super::model::{lhv_predicted_probs, LhvModel};

const INITIAL_STEP: f64 = 0.1;
const FINAL_STEP: f64 = 1e-6;
const MAX_SWEEPS_PER_STEP: usize = 200;
const MAX_LSQ_SWEEPS: usize = 2_000;

/// Which outcome cells the margin constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeScope {
    /// All four outcomes of every constrained setting pair.
    All,
    /// Only the outcome `(1, −1)`.
    PlusMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityOptions {
    pub grid_size: usize,
    pub restarts: usize,
    pub seed: u64,
    pub scope: OutcomeScope,
    /// Constrained setting pairs, in `i`-major order.
    pub pairs: [bool; 4],
}

impl SeparabilityOptions {
    pub fn new(grid_size: usize, restarts: usize, seed: u64) -> Self {
        Self {
            grid_size,
            restarts,
            seed,
            scope: OutcomeScope::All,
            pairs: [true; 4],
        }
    }

    pub fn with_scope(mut self, scope: OutcomeScope) -> Self {
        self.scope = scope;
        self
    }

    /// Constrain a single setting pair only.
    pub fn only_pair(mut self, pair: SettingPair) -> Self {
        self.pairs = [false; 4];
        self.pairs[pair.index()] = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::InvalidArgument(format!("grid size must be at least 2, got {}", self.grid_size)));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidArgument("at least one restart is required".into()));
        }
        if !self.pairs.iter().any(|&p| p) {
            return Err(Error::InvalidArgument("no setting pair is constrained".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationEntry {
    pub x: Sign,
    pub y: Sign,
    pub pair: SettingPair,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityResult {
    pub m_hat: f64,
    pub model: LhvModel,
    pub per_setting_deviations: Vec<DeviationEntry>,
}

/// Born target `p(x, y | a_i, b_j)` for every pair, in `i`-major order.
pub fn born_targets(angles: &ChshAngles) -> [OutcomeProbs; 4] {
    [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(i, j)| {
        let (a, b) = angles.pair(SettingPair::new(i, j));
        conditional_joint_probs(a, b)
    })
}

/// `max |lhv − target|` over the constrained cells, with the per-cell values.
pub fn margin(model: &LhvModel, targets: &[OutcomeProbs; 4], opts: &SeparabilityOptions) -> (f64, Vec<DeviationEntry>) {
    let cells = active_cells(opts);
    let mut entries = Vec::with_capacity(cells.len());
    for (pi, row) in cells {
        let pair = pair_from_index(pi);
        let predicted = lhv_predicted_probs(model, usize::from(pair.i), usize::from(pair.j));
        let (x, y) = OUTCOME_ROWS[row];
        entries.push(DeviationEntry {
            x,
            y,
            pair,
            deviation: (predicted.0[row] - targets[pi].0[row]).abs(),
        });
    }
    let m = entries.iter().map(|e| e.deviation).fold(0.0, f64::max);
    (m, entries)
}

pub fn m_separability_search(angles: &ChshAngles, opts: &SeparabilityOptions) -> Result<SeparabilityResult> {
    m_separability_search_target(&born_targets(angles), opts)
}

/// Same search against an arbitrary conditional target (`i`-major order).
pub fn m_separability_search_target(targets: &[OutcomeProbs; 4], opts: &SeparabilityOptions) -> Result<SeparabilityResult> {
    opts.validate()?;
    let model = search(targets, opts, opts.grid_size);
    let (m_hat, per_setting_deviations) = margin(&model, targets, opts);
    Ok(SeparabilityResult {
        m_hat,
        model,
        per_setting_deviations,
    })
}

fn pair_from_index(k: usize) -> SettingPair {
    SettingPair::new((k / 2) as u8, (k % 2) as u8)
}

fn active_cells(opts: &SeparabilityOptions) -> Vec<(usize, usize)> {
    let rows: &[usize] = match opts.scope {
        OutcomeScope::All => &[0, 1, 2, 3],
        OutcomeScope::PlusMinus => &[2],
    };
    (0..4)
        .filter(|&k| opts.pairs[k])
        .flat_map(|k| rows.iter().map(move |&r| (k, r)))
        .collect()
}

fn search(targets: &[OutcomeProbs; 4], opts: &SeparabilityOptions, l: usize) -> LhvModel {
    let problem = Problem {
        target: targets.map(|t| t.0),
        cells: active_cells(opts),
    };

    let mut starts: Vec<State> = Vec::with_capacity(opts.restarts + 1);
    if l.is_multiple_of(2) && l / 2 >= 2 {
        let coarse = search(targets, opts, l / 2);
        starts.push(State::from_model(&coarse.refined()));
    }
    starts.extend((0..opts.restarts).map(|r| State::random(l, opts.seed, r as u64)));

    let run = |state: State| {
        let mut state = state;
        state.least_squares(&problem);
        state.minimax(&problem);
        let score = problem.score(&state.sums, state.total);
        (score.0, state)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<(f64, State)> = {
        use rayon::prelude::*;
        starts.into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(f64, State)> = starts.into_iter().map(run).collect();

    // first minimum wins, independent of execution order
    let (_, best) = results
        .into_iter()
        .reduce(|best, cand| if cand.0 < best.0 { cand } else { best })
        .expect("at least one start");
    best.to_model()
}

struct Problem {
    target: [[f64; 4]; 4],
    cells: Vec<(usize, usize)>,
}

impl Problem {
    /// `(max deviation, sum of squared deviations)` over the constrained cells.
    fn score(&self, sums: &[[f64; 4]; 4], total: f64) -> (f64, f64) {
        let mut max: f64 = 0.0;
        let mut sq = 0.0;
        for &(k, r) in &self.cells {
            let d = sums[k][r] / total - self.target[k][r];
            max = max.max(d.abs());
            sq += d * d;
        }
        (max, sq)
    }
}

#[derive(Debug, Clone, Copy)]
enum Coord {
    Weight(usize),
    /// Response table (`0,1` for A's settings, `2,3` for B's) and cell.
    Response(usize, usize),
}

/// Search state: unnormalized weights and cached unnormalized predictions.
#[derive(Debug, Clone)]
struct State {
    weights: Vec<f64>,
    /// `p₀, p₁, q₀, q₁`.
    responses: [Vec<f64>; 4],
    sums: [[f64; 4]; 4],
    total: f64,
}

fn contribution(p: f64, q: f64) -> [f64; 4] {
    [p * (1.0 - q), (1.0 - p) * (1.0 - q), p * q, (1.0 - p) * q]
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl State {
    fn random(l: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let weights = (0..l).map(|_| 0.05 + unit(&mut rng)).collect();
        let responses = std::array::from_fn(|_| (0..l).map(|_| unit(&mut rng)).collect());
        Self::build(weights, responses)
    }

    fn from_model(model: &LhvModel) -> Self {
        Self::build(
            model.rho.clone(),
            [
                model.p_response[0].clone(),
                model.p_response[1].clone(),
                model.q_response[0].clone(),
                model.q_response[1].clone(),
            ],
        )
    }

    fn build(weights: Vec<f64>, responses: [Vec<f64>; 4]) -> Self {
        let mut s = Self {
            weights,
            responses,
            sums: [[0.0; 4]; 4],
            total: 0.0,
        };
        s.recompute();
        s
    }

    fn l(&self) -> usize {
        self.weights.len()
    }

    fn recompute(&mut self) {
        self.sums = [[0.0; 4]; 4];
        self.total = self.weights.iter().sum();
        for k in 0..self.l() {
            let w = self.weights[k];
            for (pi, sums) in self.sums.iter_mut().enumerate() {
                let c = contribution(self.responses[pi / 2][k], self.responses[2 + pi % 2][k]);
                for r in 0..4 {
                    sums[r] += w * c[r];
                }
            }
        }
    }

    fn coords(&self) -> impl Iterator<Item = Coord> {
        let l = self.l();
        (0..l)
            .map(Coord::Weight)
            .chain((0..4).flat_map(move |t| (0..l).map(move |k| Coord::Response(t, k))))
    }

    fn value(&self, c: Coord) -> f64 {
        match c {
            Coord::Weight(k) => self.weights[k],
            Coord::Response(t, k) => self.responses[t][k],
        }
    }

    /// Cached predictions after setting `c` to `v`, without mutating.
    fn trial(&self, c: Coord, v: f64) -> ([[f64; 4]; 4], f64) {
        let mut sums = self.sums;
        let mut total = self.total;
        match c {
            Coord::Weight(k) => {
                let dw = v - self.weights[k];
                total += dw;
                for (pi, s) in sums.iter_mut().enumerate() {
                    let cc = contribution(self.responses[pi / 2][k], self.responses[2 + pi % 2][k]);
                    for r in 0..4 {
                        s[r] += dw * cc[r];
                    }
                }
            }
            Coord::Response(t, k) => {
                let w = self.weights[k];
                for (pi, s) in sums.iter_mut().enumerate() {
                    let (ti, tj) = (pi / 2, 2 + pi % 2);
                    if ti != t && tj != t {
                        continue;
                    }
                    let (p, q) = (self.responses[ti][k], self.responses[tj][k]);
                    let old = contribution(p, q);
                    let new = if ti == t { contribution(v, q) } else { contribution(p, v) };
                    for r in 0..4 {
                        s[r] += w * (new[r] - old[r]);
                    }
                }
            }
        }
        (sums, total)
    }

    fn apply(&mut self, c: Coord, v: f64, sums: [[f64; 4]; 4], total: f64) {
        match c {
            Coord::Weight(k) => self.weights[k] = v,
            Coord::Response(t, k) => self.responses[t][k] = v,
        }
        self.sums = sums;
        self.total = total;
    }

    fn clamp_for(&self, c: Coord, v: f64) -> f64 {
        match c {
            Coord::Weight(_) => v.max(0.0),
            Coord::Response(..) => v.clamp(0.0, 1.0),
        }
    }

    fn least_squares(&mut self, problem: &Problem) {
        let mut step = INITIAL_STEP;
        let mut current = problem.score(&self.sums, self.total).1;
        for _ in 0..MAX_LSQ_SWEEPS {
            let coords: Vec<Coord> = self.coords().collect();
            for c in coords {
                match c {
                    Coord::Response(..) => self.exact_response_update(c, problem),
                    Coord::Weight(_) => {
                        self.step_update(c, step, problem, |new, old| new.1 < old.1);
                    }
                }
            }
            self.recompute();
            let next = problem.score(&self.sums, self.total).1;
            if next >= current - 1e-18 {
                step /= 2.0;
                if step < FINAL_STEP {
                    break;
                }
            }
            current = next;
        }
    }

    /// Predictions are affine in a single response coordinate, so the squared
    /// deviation is a convex quadratic in it; jump to its clamped minimizer.
    fn exact_response_update(&mut self, c: Coord, problem: &Problem) {
        if self.total <= 0.0 {
            return;
        }
        let (s0, t0) = self.trial(c, 0.0);
        let (s1, _) = self.trial(c, 1.0);
        let (mut num, mut den) = (0.0, 0.0);
        for &(k, r) in &problem.cells {
            let c0 = s0[k][r] / t0;
            let c1 = s1[k][r] / t0 - c0;
            num += c1 * (problem.target[k][r] - c0);
            den += c1 * c1;
        }
        if den <= 1e-300 {
            return;
        }
        let v = (num / den).clamp(0.0, 1.0);
        let before = problem.score(&self.sums, self.total).1;
        let (sums, total) = self.trial(c, v);
        if problem.score(&sums, total).1 <= before {
            self.apply(c, v, sums, total);
        }
    }

    /// Tries `value ± step`; keeps the first candidate `better` accepts.
    fn step_update(
        &mut self,
        c: Coord,
        step: f64,
        problem: &Problem,
        better: impl Fn((f64, f64), (f64, f64)) -> bool,
    ) -> bool {
        let old = self.value(c);
        let current = problem.score(&self.sums, self.total);
        for dir in [1.0, -1.0] {
            let v = self.clamp_for(c, old + dir * step);
            if v == old {
                continue;
            }
            let (sums, total) = self.trial(c, v);
            if total <= 0.0 {
                continue;
            }
            let cand = problem.score(&sums, total);
            if better(cand, current) {
                self.apply(c, v, sums, total);
                return true;
            }
        }
        false
    }

    fn minimax(&mut self, problem: &Problem) {
        let lexicographic = |new: (f64, f64), old: (f64, f64)| new.0 < old.0 || (new.0 <= old.0 && new.1 < old.1 - 1e-18);
        let mut step = INITIAL_STEP;
        while step >= FINAL_STEP {
            for _ in 0..MAX_SWEEPS_PER_STEP {
                let mut improved = false;
                let coords: Vec<Coord> = self.coords().collect();
                for c in coords {
                    improved |= self.step_update(c, step, problem, lexicographic);
                }
                self.recompute();
                if !improved {
                    break;
                }
            }
            step /= 2.0;
        }
    }

    fn to_model(&self) -> LhvModel {
        let total: f64 = self.weights.iter().sum();
        let rho: Vec<f64> = self.weights.iter().map(|w| w / total).collect();
        let [p0, p1, q0, q1] = self.responses.clone();
        LhvModel::new(rho, [p0, p1], [q0, q1]).expect("search keeps the model valid")
    }
}
