//! Output formatting for each subcommand.

use bellspace::inequalities::{BellReport, ChshReport};
use bellspace::lhv::{FourierWitnessReport, NoSignalingReport, ProductFit, SeparabilityResult};
use bellspace::montecarlo::{EmpiricalMeasure, TrialSeries};
use bellspace::render::sig17;
use bellspace::{JointMeasure, SettingPair};
use serde_json::{json, Value};

use crate::config::{Format, Mode};

pub struct Rendered {
    pub text: String,
}

fn json_text(v: &Value) -> Rendered {
    let mut text = serde_json::to_string_pretty(v).expect("json value serializes");
    text.push('\n');
    Rendered { text }
}

/// Two-column `quantity,value` rendering shared by the scalar reports.
fn pairs(rows: &[(String, String)], fmt: Format) -> Rendered {
    let mut text = String::new();
    match fmt {
        Format::Csv => {
            text.push_str("quantity,value\n");
            for (k, v) in rows {
                text.push_str(&format!("{k},{v}\n"));
            }
        }
        _ => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                text.push_str(&format!("{k:<width$}  {v}\n"));
            }
        }
    }
    Rendered { text }
}

fn num(v: f64) -> String {
    sig17(v)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Conditional => "conditional",
        Mode::Partial => "partial",
    }
}

pub fn measure(m: &JointMeasure, fmt: Format) -> Rendered {
    match fmt {
        Format::Json => Rendered { text: m.to_json() + "\n" },
        Format::Csv => Rendered { text: m.to_csv() },
        Format::Table => {
            let t = m.to_table();
            let mut text = format!("{:>8}", "x,y");
            for c in &t.columns {
                text.push_str(&format!("  {c:>20}"));
            }
            text.push('\n');
            for (row, cells) in t.rows.iter().zip(&t.cells) {
                text.push_str(&format!("{:>8}", format!("{},{}", row[0], row[1])));
                for v in cells {
                    text.push_str(&format!("  {:>20}", num(*v)));
                }
                text.push('\n');
            }
            Rendered { text }
        }
    }
}

pub fn chsh(report: &ChshReport, mode: Mode, fmt: Format) -> Rendered {
    if fmt == Format::Json {
        let mut v = serde_json::to_value(report).expect("report serializes");
        v["mode"] = json!(mode_name(mode));
        return json_text(&v);
    }
    let mut rows = vec![("mode".to_string(), mode_name(mode).to_string())];
    for pair in SettingPair::TABLE_ORDER {
        rows.push((format!("term_{pair}"), num(report.term(pair))));
    }
    rows.push(("combined_value".into(), num(report.combined_value)));
    rows.push(("bound".into(), num(report.bound)));
    rows.push(("satisfied".into(), report.satisfied.to_string()));
    pairs(&rows, fmt)
}

pub fn bell(report: &BellReport, fmt: Format) -> Rendered {
    if fmt == Format::Json {
        return json_text(&serde_json::to_value(report).expect("report serializes"));
    }
    pairs(
        &[
            ("lhs".into(), num(report.lhs)),
            ("rhs".into(), num(report.rhs)),
            ("satisfied".into(), report.satisfied.to_string()),
        ],
        fmt,
    )
}

pub fn nosignal(report: &NoSignalingReport, fmt: Format) -> Rendered {
    match fmt {
        Format::Json => json_text(&serde_json::to_value(report).expect("report serializes")),
        Format::Csv => {
            let mut text = String::from("party,outcome,own_setting,other_setting,joint,conditional\n");
            for e in &report.marginals {
                let cond = e.conditional.map(num).unwrap_or_default();
                text.push_str(&format!(
                    "{:?},{},{},{},{},{}\n",
                    e.party,
                    e.outcome.value(),
                    e.own_setting,
                    e.other_setting,
                    num(e.joint),
                    cond
                ));
            }
            Rendered { text }
        }
        Format::Table => {
            let mut text = format!("{:<6}{:>8}{:>6}{:>7}  {:>20}  {:>20}\n", "party", "outcome", "own", "other", "joint", "conditional");
            for e in &report.marginals {
                let cond = e.conditional.map(num).unwrap_or_else(|| "-".into());
                text.push_str(&format!(
                    "{:<6}{:>8}{:>6}{:>7}  {:>20}  {:>20}\n",
                    format!("{:?}", e.party),
                    e.outcome.value(),
                    e.own_setting,
                    e.other_setting,
                    num(e.joint),
                    cond
                ));
            }
            text.push_str(&format!("max_deviation  {}\n", num(report.max_deviation)));
            Rendered { text }
        }
    }
}

pub fn factorize(fit: &ProductFit, fmt: Format) -> Rendered {
    if fmt == Format::Json {
        return json_text(&serde_json::to_value(fit).expect("fit serializes"));
    }
    pairs(
        &[
            ("q".into(), num(fit.q)),
            ("r".into(), num(fit.r)),
            ("s".into(), num(fit.s)),
            ("t".into(), num(fit.t)),
            ("residual".into(), num(fit.residual)),
        ],
        fmt,
    )
}

pub fn witness(report: &FourierWitnessReport, fmt: Format) -> Rendered {
    if fmt == Format::Json {
        return json_text(&serde_json::to_value(report).expect("report serializes"));
    }
    pairs(
        &[
            ("integral_c1".into(), num(report.integral_c1)),
            ("integral_c1_squared".into(), num(report.integral_c1_squared)),
            ("integral_abs_c1_squared".into(), num(report.integral_abs_c1_squared)),
            ("p_tilde_max_abs".into(), num(report.p_tilde_max_abs)),
            ("contradiction".into(), report.contradiction.to_string()),
        ],
        fmt,
    )
}

pub fn lhv_fit(result: &SeparabilityResult, fmt: Format) -> Rendered {
    match fmt {
        Format::Json => json_text(&serde_json::to_value(result).expect("result serializes")),
        Format::Csv => {
            let mut text = String::from("lambda,rho,p0,p1,q0,q1\n");
            let m = &result.model;
            for k in 0..m.grid_size() {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    num(m.lambda_grid[k]),
                    num(m.rho[k]),
                    num(m.p_response[0][k]),
                    num(m.p_response[1][k]),
                    num(m.q_response[0][k]),
                    num(m.q_response[1][k])
                ));
            }
            Rendered { text }
        }
        Format::Table => {
            let mut text = format!("m_hat  {}\n\n{:>6}{:>8}  {:>20}\n", num(result.m_hat), "x,y", "pair", "deviation");
            for d in &result.per_setting_deviations {
                text.push_str(&format!(
                    "{:>6}{:>8}  {:>20}\n",
                    format!("{},{}", d.x.value(), d.y.value()),
                    d.pair.to_string(),
                    num(d.deviation)
                ));
            }
            Rendered { text }
        }
    }
}

pub fn sample_summary(
    series: &TrialSeries,
    m: &JointMeasure,
    empirical: &EmpiricalMeasure,
    partials: [f64; 4],
    fmt: Format,
) -> Rendered {
    let chi = empirical.chi_square(m);
    let deviation = empirical.max_abs_deviation(m);
    if fmt == Format::Json {
        let terms: serde_json::Map<String, Value> = SettingPair::TABLE_ORDER
            .iter()
            .zip(partials)
            .map(|(p, v)| (p.to_string(), json!(v)))
            .collect();
        return json_text(&json!({
            "n": series.len(),
            "seed": series.seed,
            "generator": series.generator,
            "source_digest": series.source_digest,
            "partial_expectations": terms,
            "empirical": empirical,
            "max_abs_deviation": deviation,
            "chi_square": chi,
        }));
    }
    let mut rows = vec![
        ("n".to_string(), series.len().to_string()),
        ("seed".into(), series.seed.to_string()),
        ("generator".into(), series.generator.clone()),
        ("source_digest".into(), series.source_digest.clone()),
    ];
    for (p, v) in SettingPair::TABLE_ORDER.iter().zip(partials) {
        rows.push((format!("partial_{p}"), num(v)));
    }
    rows.push(("max_abs_deviation".into(), num(deviation)));
    rows.push(("chi_square".into(), num(chi.statistic)));
    rows.push(("chi_square_df".into(), chi.degrees_of_freedom.to_string()));
    pairs(&rows, fmt)
}
