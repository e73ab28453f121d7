//! Decimal rendering shared by the CSV writers and the table output.

/// Renders `v` in positional notation with 17 significant digits, enough to
/// round-trip any `f64`.
pub fn sig17(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{:.16e}", v);
    let exponent: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific rendering carries an exponent");
    if exponent > 16 {
        return format!("{:.0}", v);
    }
    let decimals = (16 - exponent) as usize;
    format!("{:.*}", decimals, v)
}
