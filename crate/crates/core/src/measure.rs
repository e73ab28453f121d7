//! The joint measure `p(x, y, a_i, b_j)` over the 16-point CHSH outcome space
//! `{−1,1}² × {a₀,a₁} × {b₀,b₁}`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob_space::{validate_distribution, Event, FiniteProbabilitySpace, RandomVariable, PROBABILITY_TOL};
use crate::render::sig17;
use crate::singlet::{conditional_joint_probs, DetectorAngle, OutcomeProbs, Sign, OUTCOME_ROWS};

/// A joint choice of detector settings `(a_i, b_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SettingPair {
    pub i: u8,
    pub j: u8,
}

impl SettingPair {
    pub const fn new(i: u8, j: u8) -> Self {
        Self { i, j }
    }

    /// Column order of the measure tables: `a₀b₀, a₁b₀, a₁b₁, a₀b₁`.
    pub const TABLE_ORDER: [SettingPair; 4] = [
        SettingPair::new(0, 0),
        SettingPair::new(1, 0),
        SettingPair::new(1, 1),
        SettingPair::new(0, 1),
    ];

    /// Position in `i`-major order (`00, 01, 10, 11`).
    pub fn index(self) -> usize {
        2 * usize::from(self.i) + usize::from(self.j)
    }

    pub fn table_column(self) -> usize {
        Self::TABLE_ORDER
            .iter()
            .position(|&p| p == self)
            .expect("setting indices are 0 or 1")
    }

    /// Sign of this pair's term in `t₀₀ + t₁₀ + t₁₁ − t₀₁`.
    pub fn chsh_sign(self) -> f64 {
        if self == SettingPair::new(0, 1) {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}b{}", self.i, self.j)
    }
}

/// The four detector angles `a₀, a₁, b₀, b₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub a: [DetectorAngle; 2],
    pub b: [DetectorAngle; 2],
}

impl ChshAngles {
    pub fn new(a0: f64, a1: f64, b0: f64, b1: f64) -> Self {
        Self {
            a: [a0.into(), a1.into()],
            b: [b0.into(), b1.into()],
        }
    }

    /// `0, π/4, 5π/8, 7π/8`: the settings that saturate the quantum CHSH bound.
    pub fn tsirelson() -> Self {
        Self::new(0.0, PI / 4.0, 5.0 * PI / 8.0, 7.0 * PI / 8.0)
    }

    /// Three-setting geometry `a₀ = 0, a₁ = b₀ = π/4, b₁ = 7π/8`.
    pub fn bell() -> Self {
        Self::new(0.0, PI / 4.0, PI / 4.0, 7.0 * PI / 8.0)
    }

    pub fn pair(&self, pair: SettingPair) -> (DetectorAngle, DetectorAngle) {
        (self.a[usize::from(pair.i)], self.b[usize::from(pair.j)])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a[0].radians(), self.a[1].radians(), self.b[0].radians(), self.b[1].radians()]
    }
}

/// `p(a_i, b_j)` for the four setting pairs, stored in `i`-major order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct SettingsDistribution([f64; 4]);

impl SettingsDistribution {
    /// Probabilities in the order `p₀₀, p₀₁, p₁₀, p₁₁`.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        validate_distribution(&p)?;
        Ok(Self(p))
    }

    pub fn uniform() -> Self {
        Self([0.25; 4])
    }

    /// All mass on a single pair.
    pub fn concentrated(pair: SettingPair) -> Self {
        let mut p = [0.0; 4];
        p[pair.index()] = 1.0;
        Self(p)
    }

    /// `p(a₁,b₀) = 0`, one third on each remaining pair.
    pub fn bell() -> Self {
        let third = 1.0 / 3.0;
        Self([third, third, 0.0, third])
    }

    pub fn get(&self, pair: SettingPair) -> f64 {
        self.0[pair.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn is_uniform(&self) -> bool {
        self.0.iter().all(|p| (p - 0.25).abs() <= PROBABILITY_TOL)
    }
}

impl Default for SettingsDistribution {
    fn default() -> Self {
        Self::uniform()
    }
}

impl TryFrom<[f64; 4]> for SettingsDistribution {
    type Error = Error;

    fn try_from(p: [f64; 4]) -> Result<Self> {
        Self::new(p)
    }
}

impl From<SettingsDistribution> for [f64; 4] {
    fn from(s: SettingsDistribution) -> Self {
        s.0
    }
}

/// A point `(x, y, a_i, b_j)` of the outcome space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChshOutcome {
    pub x: Sign,
    pub y: Sign,
    pub pair: SettingPair,
}

impl ChshOutcome {
    /// All 16 outcomes: table columns in order, rows in order within each.
    pub fn all() -> impl Iterator<Item = ChshOutcome> {
        SettingPair::TABLE_ORDER
            .into_iter()
            .flat_map(|pair| OUTCOME_ROWS.into_iter().map(move |(x, y)| ChshOutcome { x, y, pair }))
    }

    /// Position in [`ChshOutcome::all`] order.
    pub fn index(&self) -> usize {
        4 * self.pair.table_column() + crate::singlet::row_index(self.x, self.y)
    }
}

/// Coordinate projection `X`.
pub fn x_variable() -> RandomVariable<ChshOutcome> {
    RandomVariable::new(|o: &ChshOutcome| o.x.as_f64())
}

/// Coordinate projection `Y`.
pub fn y_variable() -> RandomVariable<ChshOutcome> {
    RandomVariable::new(|o: &ChshOutcome| o.y.as_f64())
}

/// The product `X·Y`.
pub fn xy_variable() -> RandomVariable<ChshOutcome> {
    x_variable() * y_variable()
}

/// The event `{A = a_i, B = b_j}`.
pub fn setting_event(pair: SettingPair) -> Event<ChshOutcome> {
    Event::new(move |o: &ChshOutcome| o.pair == pair)
}

/// The event `{A = a_i}`.
pub fn a_setting_event(i: u8) -> Event<ChshOutcome> {
    Event::new(move |o: &ChshOutcome| o.pair.i == i)
}

/// The event `{B = b_j}`.
pub fn b_setting_event(j: u8) -> Event<ChshOutcome> {
    Event::new(move |o: &ChshOutcome| o.pair.j == j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointMeasure {
    space: FiniteProbabilitySpace<ChshOutcome>,
    angles: ChshAngles,
    settings: SettingsDistribution,
}

/// Builds `p(x, y, a_i, b_j) = p(a_i, b_j) · p(x, y | a_i, b_j)` from the Born
/// probabilities of the singlet.
pub fn chsh_measure(angles: ChshAngles, settings: SettingsDistribution) -> JointMeasure {
    let mut table = [[0.0; 4]; 4];
    for (col, &pair) in SettingPair::TABLE_ORDER.iter().enumerate() {
        let (a, b) = angles.pair(pair);
        let probs = conditional_joint_probs(a, b);
        let w = settings.get(pair);
        table[col] = probs.0.map(|p| w * p);
    }
    JointMeasure::from_columns_unchecked(angles, settings, table)
}

impl JointMeasure {
    fn from_columns_unchecked(angles: ChshAngles, settings: SettingsDistribution, columns: [[f64; 4]; 4]) -> Self {
        let outcomes: Vec<ChshOutcome> = ChshOutcome::all().collect();
        let weights: Vec<f64> = columns.iter().flatten().copied().collect();
        let space = FiniteProbabilitySpace::new(outcomes, weights).expect("Born measure is a valid distribution");
        Self { space, angles, settings }
    }

    /// Builds a measure from an arbitrary table, `columns[c][r]` being the cell
    /// at table column `c` and outcome row `r`. The settings distribution is
    /// read off the column sums.
    pub fn from_columns(angles: ChshAngles, columns: [[f64; 4]; 4]) -> Result<Self> {
        let mut p = [0.0; 4];
        for (col, &pair) in SettingPair::TABLE_ORDER.iter().enumerate() {
            p[pair.index()] = columns[col].iter().sum();
        }
        let settings = SettingsDistribution::new(p)?;
        let outcomes: Vec<ChshOutcome> = ChshOutcome::all().collect();
        let weights: Vec<f64> = columns.iter().flatten().copied().collect();
        let space = FiniteProbabilitySpace::new(outcomes, weights)?;
        Ok(Self { space, angles, settings })
    }

    pub fn space(&self) -> &FiniteProbabilitySpace<ChshOutcome> {
        &self.space
    }

    pub fn angles(&self) -> &ChshAngles {
        &self.angles
    }

    pub fn settings(&self) -> &SettingsDistribution {
        &self.settings
    }

    pub fn probability(&self, x: Sign, y: Sign, pair: SettingPair) -> f64 {
        self.space.weights()[ChshOutcome { x, y, pair }.index()]
    }

    /// Joint probabilities `p(x, y, a_i, b_j)` of one column.
    pub fn column(&self, pair: SettingPair) -> OutcomeProbs {
        let c = pair.table_column();
        let w = &self.space.weights()[4 * c..4 * c + 4];
        OutcomeProbs([w[0], w[1], w[2], w[3]])
    }

    /// Column-wise table, `columns()[c][r]`.
    pub fn columns(&self) -> [[f64; 4]; 4] {
        SettingPair::TABLE_ORDER.map(|pair| self.column(pair).0)
    }

    /// Probability mass of a column, `Σ_{x,y} p(x, y, a_i, b_j)`.
    pub fn pair_mass(&self, pair: SettingPair) -> f64 {
        self.column(pair).total()
    }

    pub fn total_mass(&self) -> f64 {
        self.space.weights().iter().sum()
    }

    pub fn to_table(&self) -> MeasureTable {
        let columns = self.columns();
        let mut cells = [[0.0; 4]; 4];
        for (r, row) in cells.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = columns[c][r];
            }
        }
        MeasureTable {
            angles: self.angles.as_array(),
            settings: self.settings.as_array(),
            columns: SettingPair::TABLE_ORDER.map(|p| p.to_string()),
            rows: OUTCOME_ROWS.map(|(x, y)| [x.value(), y.value()]),
            cells,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_table()).expect("measure table serializes")
    }

    /// CSV in table layout: one line per outcome row, one column per setting
    /// pair, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let table = self.to_table();
        let mut out = String::from("x,y");
        for c in &table.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (row, cells) in table.rows.iter().zip(table.cells.iter()) {
            out.push_str(&format!("{},{}", row[0], row[1]));
            for v in cells {
                out.push(',');
                out.push_str(&sig17(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Serialized form of a [`JointMeasure`]: `cells[r][c]` is the probability of
/// outcome row `rows[r]` under setting pair `columns[c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureTable {
    /// `[a0, a1, b0, b1]` in radians.
    pub angles: [f64; 4],
    /// `[p00, p01, p10, p11]`.
    pub settings: [f64; 4],
    pub columns: [String; 4],
    pub rows: [[i8; 2]; 4],
    pub cells: [[f64; 4]; 4],
}

impl TryFrom<MeasureTable> for JointMeasure {
    type Error = Error;

    fn try_from(t: MeasureTable) -> Result<Self> {
        let expected_cols = SettingPair::TABLE_ORDER.map(|p| p.to_string());
        let expected_rows = OUTCOME_ROWS.map(|(x, y)| [x.value(), y.value()]);
        if t.columns != expected_cols || t.rows != expected_rows {
            return Err(Error::InvalidArgument("measure table must use the standard row/column layout".into()));
        }
        let mut columns = [[0.0; 4]; 4];
        for (r, row) in t.cells.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                columns[c][r] = *v;
            }
        }
        let [a0, a1, b0, b1] = t.angles;
        let mut m = JointMeasure::from_columns(ChshAngles::new(a0, a1, b0, b1), columns)?;
        let declared = SettingsDistribution::new(t.settings)?;
        for pair in SettingPair::TABLE_ORDER {
            if (declared.get(pair) - m.settings.get(pair)).abs() > PROBABILITY_TOL {
                return Err(Error::InvalidArgument(format!("column {pair} does not sum to its settings probability")));
            }
        }
        m.settings = declared;
        Ok(m)
    }
}
