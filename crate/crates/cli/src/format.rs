//! Deterministic number formatting for file output: fixed significant
//! digits, `.` decimal separator, no locale dependence.

/// Shortest representation of `x` with `sig` significant digits, switching
/// to exponent notation outside a readable magnitude window.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = formatted.split_once('e').expect("exponent always present");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    if exponent < -4 || exponent >= sig as i32 {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    } else {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

/// The nine-digit house format used in CSV and reports.
pub fn g9(x: f64) -> String {
    format_sig(x, 9)
}
