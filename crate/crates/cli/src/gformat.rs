//! C-style `%g` float formatting. All tabular output goes through [`g9`] so
//! CSV files are compact and byte-identical across runs.

/// Significant digits used for every value the tool prints.
pub const SIG_DIGITS: usize = 9;

pub fn g9(x: f64) -> String {
    g(x, SIG_DIGITS)
}

/// `%.*g`: `p` significant digits, scientific notation when the decimal
/// exponent falls below -4 or reaches `p`, trailing zeros trimmed.
pub fn g(x: f64, p: usize) -> String {
    let p = p.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // {:.*e} rounds to p significant digits and exposes the decimal exponent
    // of the rounded value.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form has an e");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let frac = (p as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", frac, x)).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
