//! Browser bindings for the bellspace demo page in `www/`.
//!
//! Every export returns a JSON string. The plain `*_json` functions carry the
//! logic and are usable from native code; the `#[wasm_bindgen]` wrappers only
//! convert errors into JavaScript exceptions.

use std::f64::consts::PI;

use bellspace::inequalities::{chsh_conditional, chsh_partial};
use bellspace::montecarlo::{empirical_measure, sample};
use bellspace::singlet::correlation;
use bellspace::{chsh_measure, ChshAngles, DetectorAngle, SettingPair, SettingsDistribution};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest sample the page may request.
pub const MAX_TRIALS: usize = 2_000_000;

fn setup(angles_deg: &[f64], settings: &[f64]) -> Result<(ChshAngles, SettingsDistribution), String> {
    let [a0, a1, b0, b1]: [f64; 4] = angles_deg
        .try_into()
        .map_err(|_| format!("expected 4 angles, got {}", angles_deg.len()))?;
    let p: [f64; 4] = settings
        .try_into()
        .map_err(|_| format!("expected 4 setting probabilities, got {}", settings.len()))?;
    let settings = SettingsDistribution::new(p).map_err(|e| e.to_string())?;
    let angles = ChshAngles::new(a0.to_radians(), a1.to_radians(), b0.to_radians(), b1.to_radians());
    Ok((angles, settings))
}

/// Joint measure plus both CHSH evaluations.
pub fn chsh_json(angles_deg: &[f64], settings: &[f64]) -> Result<String, String> {
    let (angles, settings) = setup(angles_deg, settings)?;
    let measure = chsh_measure(angles, settings);
    let conditional = chsh_conditional(&measure).ok();
    let partial = chsh_partial(&measure);
    Ok(json!({
        "measure": measure.to_table(),
        "conditional": conditional,
        "partial": partial,
    })
    .to_string())
}

/// `E[XY | a, b]` against `θ = a − b` over one period, next to the
/// piecewise-linear correlation `1 − 4|θ − π/2|/π` of a deterministic model.
pub fn correlation_curve_json(points: usize) -> Result<String, String> {
    if !(2..=10_000).contains(&points) {
        return Err(format!("points must be between 2 and 10000, got {points}"));
    }
    let thetas: Vec<f64> = (0..points).map(|k| PI * k as f64 / (points - 1) as f64).collect();
    let quantum: Vec<f64> = thetas
        .iter()
        .map(|&t| correlation(DetectorAngle::new(t), DetectorAngle::new(0.0)))
        .collect();
    let linear: Vec<f64> = thetas.iter().map(|&t| 1.0 - 4.0 * (t - PI / 2.0).abs() / PI).collect();
    Ok(json!({ "theta": thetas, "quantum": quantum, "linear": linear }).to_string())
}

/// Seeded simulation: empirical partial and conditional expectations per pair.
pub fn simulate_json(angles_deg: &[f64], settings: &[f64], n: usize, seed: u64) -> Result<String, String> {
    if n > MAX_TRIALS {
        return Err(format!("at most {MAX_TRIALS} trials"));
    }
    let (angles, settings) = setup(angles_deg, settings)?;
    let measure = chsh_measure(angles, settings);
    let series = sample(&measure, n, seed).map_err(|e| e.to_string())?;
    let empirical = empirical_measure(&series).map_err(|e| e.to_string())?;
    let pairs: Vec<_> = SettingPair::TABLE_ORDER
        .iter()
        .map(|p| {
            let st = series.pair_stats(p.i, p.j);
            json!({
                "pair": p.to_string(),
                "count": st.count,
                "partial": st.partial(),
                "conditional": st.conditional(),
            })
        })
        .collect();
    let signed = |f: &dyn Fn(&serde_json::Value) -> Option<f64>| -> Option<f64> {
        let mut total = 0.0;
        for (p, v) in SettingPair::TABLE_ORDER.iter().zip(&pairs) {
            total += p.chsh_sign() * f(v)?;
        }
        Some(total.abs())
    };
    let chsh_partial = signed(&|v| v["partial"].as_f64());
    let chsh_conditional = signed(&|v| v["conditional"].as_f64());
    Ok(json!({
        "n": n,
        "seed": seed,
        "pairs": pairs,
        "chsh_partial": chsh_partial,
        "chsh_conditional": chsh_conditional,
        "max_abs_deviation": empirical.max_abs_deviation(&measure),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn chsh(angles_deg: &[f64], settings: &[f64]) -> Result<String, JsValue> {
    chsh_json(angles_deg, settings).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = correlationCurve)]
pub fn correlation_curve(points: usize) -> Result<String, JsValue> {
    correlation_curve_json(points).map_err(|e| JsValue::from_str(&e))
}

/// `seed` is 32-bit here so the page can pass a plain JavaScript number.
#[wasm_bindgen]
pub fn simulate(angles_deg: &[f64], settings: &[f64], n: usize, seed: u32) -> Result<String, JsValue> {
    simulate_json(angles_deg, settings, n, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}
