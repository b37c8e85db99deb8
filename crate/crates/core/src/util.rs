//! Small formatting helpers shared by reports and the CLI.

/// Rounds to 12 significant digits and renders with a trailing `.0` for
/// integral values, so identical runs print byte-identical numbers.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    let s = format!("{r}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    (x * scale).round() / scale
}
