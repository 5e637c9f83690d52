//! Real-number formatting for file output: 17 significant digits, which
//! round-trips every f64 exactly, in the compact fixed/scientific style
//! of printf's %g.

/// Format with up to 17 significant digits, trailing zeros trimmed.
/// Values with decimal exponent in [-4, 17) print in fixed notation,
/// everything else in scientific notation with a signed two-digit
/// exponent, mirroring `%.17g`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }

    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");

    if (-4..17).contains(&exp) {
        let fraction_digits = (16 - exp).max(0) as usize;
        let fixed = format!("{v:.fraction_digits$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}
