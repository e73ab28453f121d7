use serde::{Deserialize, Serialize};

use crate::measure::{JointMeasure, SettingPair};
use crate::singlet::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// Single-party marginal for one `(party, outcome, own setting, other setting)`.
///
/// `joint` is `P[X=x, A=a_i, B=b_j]` (for party A); `conditional` is
/// `P[X=x | A=a_i, B=b_j]`, absent when the setting pair has probability zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalEntry {
    pub party: Party,
    pub outcome: Sign,
    pub own_setting: u8,
    pub other_setting: u8,
    pub joint: f64,
    pub conditional: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub marginals: Vec<MarginalEntry>,
    /// Largest `|P[x | own, other=0] − P[x | own, other=1]|` over all comparisons
    /// where both conditionals exist.
    pub max_deviation: f64,
    /// Setting pairs of probability zero; comparisons involving them are skipped.
    pub skipped_pairs: Vec<SettingPair>,
}

impl NoSignalingReport {
    pub fn recompute_max_deviation(marginals: &[MarginalEntry]) -> f64 {
        let mut max: f64 = 0.0;
        for e in marginals.iter().filter(|e| e.other_setting == 0) {
            let partner = marginals.iter().find(|o| {
                o.party == e.party && o.outcome == e.outcome && o.own_setting == e.own_setting && o.other_setting == 1
            });
            if let (Some(c0), Some(c1)) = (e.conditional, partner.and_then(|p| p.conditional)) {
                max = max.max((c0 - c1).abs());
            }
        }
        max
    }
}

/// Checks that each party's outcome distribution is independent of the other
/// party's setting.
pub fn no_signaling_report(measure: &JointMeasure) -> NoSignalingReport {
    let mut marginals = Vec::with_capacity(16);
    let skipped_pairs: Vec<SettingPair> = SettingPair::TABLE_ORDER
        .into_iter()
        .filter(|&p| measure.pair_mass(p) <= 0.0)
        .collect();

    for party in [Party::A, Party::B] {
        for outcome in Sign::BOTH {
            for own in 0..2u8 {
                for other in 0..2u8 {
                    let pair = match party {
                        Party::A => SettingPair::new(own, other),
                        Party::B => SettingPair::new(other, own),
                    };
                    let column = measure.column(pair);
                    let joint: f64 = Sign::BOTH
                        .iter()
                        .map(|&partner| match party {
                            Party::A => column.get(outcome, partner),
                            Party::B => column.get(partner, outcome),
                        })
                        .sum();
                    let mass = column.total();
                    let conditional = (mass > 0.0).then(|| joint / mass);
                    marginals.push(MarginalEntry {
                        party,
                        outcome,
                        own_setting: own,
                        other_setting: other,
                        joint,
                        conditional,
                    });
                }
            }
        }
    }
    let max_deviation = NoSignalingReport::recompute_max_deviation(&marginals);
    NoSignalingReport {
        marginals,
        max_deviation,
        skipped_pairs,
    }
}

/// Moves `epsilon` of mass from cell `(−1,1)` to cell `(1,1)` in column
/// `a₀b₀`. Column mass is preserved, so the result is still a valid measure,
/// but party A's marginal now depends on B's setting.
pub fn signaling_counterexample(measure: &JointMeasure, epsilon: f64) -> crate::Result<JointMeasure> {
    let mut columns = measure.columns();
    columns[0][0] += epsilon;
    columns[0][1] -= epsilon;
    JointMeasure::from_columns(*measure.angles(), columns)
}
