//! Seeded sampling of repeated single experiments from a [`JointMeasure`] and
//! the finite-N estimators built on the sampled records.
//!
//! Sampling is split into fixed chunks of [`CHUNK_LEN`] trials. Chunk `c` draws
//! from ChaCha8 seeded with the 64-bit seed on stream `c`, one 53-bit uniform
//! per trial, mapped through the inverse CDF of the 16-cell table. The series
//! is therefore identical whether chunks run serially or in parallel.

use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{ChshOutcome, JointMeasure, SettingPair};
use crate::singlet::{Sign, OUTCOME_ROWS};

pub const CHUNK_LEN: usize = 65_536;
pub const GENERATOR_ID: &str = "chacha8-stream/u53-inverse-cdf/v1";
pub const BINARY_MAGIC: &[u8; 4] = b"BTS1";

/// One trial: outcomes and the setting indices that were active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: u64,
    pub x: Sign,
    pub y: Sign,
    pub i: u8,
    pub j: u8,
}

impl ExperimentRecord {
    pub fn pair(&self) -> SettingPair {
        SettingPair::new(self.i, self.j)
    }

    /// Bit 0: `x = +1`, bit 1: `y = +1`, bit 2: `i`, bit 3: `j`.
    pub fn pack(&self) -> u8 {
        u8::from(self.x == Sign::Plus) | u8::from(self.y == Sign::Plus) << 1 | self.i << 2 | self.j << 3
    }

    pub fn unpack(n: u64, byte: u8) -> Result<Self> {
        if byte & 0xF0 != 0 {
            return Err(Error::MalformedSeries(format!("record {n} has reserved bits set: {byte:#04x}")));
        }
        let sign = |bit: u8| if byte >> bit & 1 == 1 { Sign::Plus } else { Sign::Minus };
        Ok(Self {
            n,
            x: sign(0),
            y: sign(1),
            i: byte >> 2 & 1,
            j: byte >> 3 & 1,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSeries {
    pub records: Vec<ExperimentRecord>,
    pub seed: u64,
    pub generator: String,
    /// Hex SHA-256 prefix over the measure's angles, settings and cells.
    pub source_digest: String,
}

/// Digest identifying the measure a series was drawn from.
pub fn measure_digest(measure: &JointMeasure) -> String {
    let mut hasher = Sha256::new();
    for v in measure.angles().as_array().iter().chain(measure.settings().as_array().iter()) {
        hasher.update(v.to_le_bytes());
    }
    for v in measure.space().weights() {
        hasher.update(v.to_le_bytes());
    }
    hasher.finalize()[..8].iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct InverseCdf {
    cumulative: [f64; 16],
    outcomes: Vec<ChshOutcome>,
    last_positive: usize,
}

impl InverseCdf {
    fn new(measure: &JointMeasure) -> Self {
        let weights = measure.space().weights();
        let mut cumulative = [0.0; 16];
        let mut acc = 0.0;
        for (c, w) in cumulative.iter_mut().zip(weights) {
            acc += w;
            *c = acc;
        }
        let last_positive = weights.iter().rposition(|&w| w > 0.0).expect("measure has mass");
        Self {
            cumulative,
            outcomes: measure.space().outcomes().to_vec(),
            last_positive,
        }
    }

    fn draw(&self, u: f64) -> ChshOutcome {
        let k = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.last_positive);
        self.outcomes[k]
    }
}

fn sample_chunk(cdf: &InverseCdf, seed: u64, chunk: usize, start: usize, len: usize) -> Vec<ExperimentRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    (start..start + len)
        .map(|n| {
            let o = cdf.draw(unit(&mut rng));
            ExperimentRecord {
                n: n as u64,
                x: o.x,
                y: o.y,
                i: o.pair.i,
                j: o.pair.j,
            }
        })
        .collect()
}

/// `n` i.i.d. draws from the 16-outcome distribution.
pub fn sample(measure: &JointMeasure, n: usize, seed: u64) -> Result<TrialSeries> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let cdf = InverseCdf::new(measure);
    let chunks: Vec<(usize, usize)> = (0..n.div_ceil(CHUNK_LEN))
        .map(|c| (c, CHUNK_LEN.min(n - c * CHUNK_LEN)))
        .collect();
    let run = |&(c, len): &(usize, usize)| sample_chunk(&cdf, seed, c, c * CHUNK_LEN, len);

    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<ExperimentRecord>> = {
        use rayon::prelude::*;
        chunks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<ExperimentRecord>> = chunks.iter().map(run).collect();

    Ok(TrialSeries {
        records: parts.concat(),
        seed,
        generator: GENERATOR_ID.to_string(),
        source_digest: measure_digest(measure),
    })
}

impl TrialSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV with header `n,x,y,i,j`, one line per record, `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * self.records.len() + 10);
        out.push_str("n,x,y,i,j\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{}", r.n, r.x, r.y, r.i, r.j);
        }
        out
    }

    /// Binary layout: magic `BTS1`, seed (u64 LE), record count (u64 LE), then
    /// one packed byte per record in index order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + self.records.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        out.extend(self.records.iter().map(ExperimentRecord::pack));
        out
    }

    /// Inverse of [`TrialSeries::to_bytes`]. Generator and digest are not
    /// stored in the binary layout and come back empty.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 20 || &bytes[..4] != BINARY_MAGIC {
            return Err(Error::MalformedSeries("missing BTS1 header".into()));
        }
        let seed = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes"));
        let n = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
        let body = &bytes[20..];
        if body.len() as u64 != n {
            return Err(Error::MalformedSeries(format!("header declares {n} records, found {}", body.len())));
        }
        let records = body
            .iter()
            .enumerate()
            .map(|(k, &b)| ExperimentRecord::unpack(k as u64, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            records,
            seed,
            generator: String::new(),
            source_digest: String::new(),
        })
    }

    /// Counts of each of the 16 outcomes in table order.
    pub fn counts(&self) -> [u64; 16] {
        let mut counts = [0u64; 16];
        for r in &self.records {
            counts[ChshOutcome { x: r.x, y: r.y, pair: r.pair() }.index()] += 1;
        }
        counts
    }

    /// Integer tallies for one setting pair.
    pub fn pair_stats(&self, i: u8, j: u8) -> PairStats {
        let pair = SettingPair::new(i, j);
        let mut stats = PairStats {
            n: self.records.len() as u64,
            count: 0,
            sum_xy: 0,
        };
        for r in self.records.iter().filter(|r| r.pair() == pair) {
            stats.count += 1;
            stats.sum_xy += i64::from(r.x.value() * r.y.value());
        }
        stats
    }
}

/// Rational tallies behind the empirical estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStats {
    /// Total number of trials.
    pub n: u64,
    /// Trials with this setting pair.
    pub count: u64,
    /// `Σ x·y` over those trials.
    pub sum_xy: i64,
}

impl PairStats {
    pub fn partial(&self) -> f64 {
        self.sum_xy as f64 / self.n as f64
    }

    pub fn conditional(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum_xy as f64 / self.count as f64)
    }

    pub fn frequency(&self) -> f64 {
        self.count as f64 / self.n as f64
    }
}

/// `(1/N)·Σ_n x_n·y_n·[A_n = a_i ∧ B_n = b_j]`.
pub fn empirical_partial_expectation(series: &TrialSeries, i: u8, j: u8) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(series.pair_stats(i, j).partial())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub n: u64,
    pub counts: [u64; 16],
    /// Relative frequencies, `cells[r][c]` in table layout.
    pub cells: [[f64; 4]; 4],
}

impl EmpiricalMeasure {
    pub fn frequency(&self, o: &ChshOutcome) -> f64 {
        self.counts[o.index()] as f64 / self.n as f64
    }

    pub fn max_abs_deviation(&self, measure: &JointMeasure) -> f64 {
        ChshOutcome::all()
            .zip(measure.space().weights())
            .map(|(o, w)| (self.frequency(&o) - w).abs())
            .fold(0.0, f64::max)
    }

    /// Pearson chi-square against `measure` over cells with positive mass;
    /// degrees of freedom are one less than that cell count.
    pub fn chi_square(&self, measure: &JointMeasure) -> ChiSquare {
        let mut statistic = 0.0;
        let mut cells = 0usize;
        for (k, &w) in measure.space().weights().iter().enumerate() {
            if w > 0.0 {
                let expected = w * self.n as f64;
                statistic += (self.counts[k] as f64 - expected).powi(2) / expected;
                cells += 1;
            }
        }
        ChiSquare {
            statistic,
            degrees_of_freedom: cells.saturating_sub(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
}

pub fn empirical_measure(series: &TrialSeries) -> Result<EmpiricalMeasure> {
    if series.is_empty() {
        return Err(Error::EmptySample);
    }
    let counts = series.counts();
    let n = series.len() as u64;
    let mut cells = [[0.0; 4]; 4];
    for o in ChshOutcome::all() {
        let r = OUTCOME_ROWS.iter().position(|&(x, y)| (x, y) == (o.x, o.y)).expect("row exists");
        cells[r][o.pair.table_column()] = counts[o.index()] as f64 / n as f64;
    }
    Ok(EmpiricalMeasure { n, counts, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{chsh_measure, ChshAngles, SettingsDistribution};

    fn degenerate() -> JointMeasure {
        let mut cols = [[0.0; 4]; 4];
        cols[0][0] = 1.0;
        JointMeasure::from_columns(ChshAngles::tsirelson(), cols).unwrap()
    }

    #[test]
    fn degenerate_measure_repeats_one_outcome() {
        let s = sample(&degenerate(), 1000, 3).unwrap();
        assert!(s.records.iter().all(|r| (r.x, r.y, r.i, r.j) == (Sign::Plus, Sign::Plus, 0, 0)));
        assert_eq!(empirical_partial_expectation(&s, 0, 0).unwrap(), 1.0);
        assert_eq!(empirical_partial_expectation(&s, 0, 1).unwrap(), 0.0);
        assert_eq!(empirical_partial_expectation(&s, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn zero_count_is_rejected() {
        assert_eq!(sample(&degenerate(), 0, 1), Err(Error::EmptySample));
    }

    #[test]
    fn indices_are_contiguous_across_chunks() {
        let m = chsh_measure(ChshAngles::tsirelson(), SettingsDistribution::uniform());
        let s = sample(&m, CHUNK_LEN + 17, 5).unwrap();
        assert!(s.records.iter().enumerate().all(|(k, r)| r.n == k as u64));
    }

    #[test]
    fn prefix_stable_across_lengths() {
        // chunk boundaries are fixed, so a shorter run is a prefix of a longer one
        let m = chsh_measure(ChshAngles::tsirelson(), SettingsDistribution::uniform());
        let short = sample(&m, 1000, 8).unwrap();
        let long = sample(&m, CHUNK_LEN * 2 + 5, 8).unwrap();
        assert_eq!(short.records[..], long.records[..1000]);
    }

    #[test]
    fn same_seed_same_bytes() {
        let m = chsh_measure(ChshAngles::tsirelson(), SettingsDistribution::uniform());
        let a = sample(&m, 5000, 42).unwrap();
        let b = sample(&m, 5000, 42).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_bytes(), b.to_bytes());
        let c = sample(&m, 5000, 43).unwrap();
        assert_ne!(a.to_bytes(), c.to_bytes());
    }

    #[test]
    fn binary_round_trip_and_errors() {
        let m = chsh_measure(ChshAngles::bell(), SettingsDistribution::bell());
        let s = sample(&m, 300, 1).unwrap();
        let back = TrialSeries::from_bytes(&s.to_bytes()).unwrap();
        assert_eq!(back.records, s.records);
        assert_eq!(back.seed, 1);
        assert!(TrialSeries::from_bytes(b"nope").is_err());
        let mut bytes = s.to_bytes();
        bytes.push(0);
        assert!(TrialSeries::from_bytes(&bytes).is_err());
        let mut bytes = s.to_bytes();
        bytes[20] = 0x10;
        assert!(TrialSeries::from_bytes(&bytes).is_err());
    }

    #[test]
    fn csv_shape() {
        let s = sample(&degenerate(), 2, 0).unwrap();
        assert_eq!(s.to_csv(), "n,x,y,i,j\n0,1,1,0,0\n1,1,1,0,0\n");
    }

    #[test]
    fn null_cells_never_drawn() {
        let m = chsh_measure(ChshAngles::bell(), SettingsDistribution::bell());
        let s = sample(&m, 20_000, 9).unwrap();
        assert!(s.records.iter().all(|r| r.pair() != SettingPair::new(1, 0)));
    }

    #[test]
    fn single_record_measure() {
        let m = chsh_measure(ChshAngles::tsirelson(), SettingsDistribution::uniform());
        let s = sample(&m, 1, 77).unwrap();
        let e = empirical_measure(&s).unwrap();
        assert_eq!(e.cells.iter().flatten().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(e.cells.iter().flatten().sum::<f64>(), 1.0);
    }

    #[test]
    fn partials_partition_the_mean() {
        let m = chsh_measure(ChshAngles::tsirelson(), SettingsDistribution::new([0.1, 0.2, 0.3, 0.4]).unwrap());
        let s = sample(&m, 10_000, 4).unwrap();
        let total: i64 = s.records.iter().map(|r| i64::from(r.x.value() * r.y.value())).sum();
        let mut sum_num = 0;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let st = s.pair_stats(i, j);
            sum_num += st.sum_xy;
            let recomposed = st.conditional().unwrap() * st.frequency();
            assert!((recomposed - st.partial()).abs() < 1e-15);
        }
        assert_eq!(sum_num, total);
    }
}
