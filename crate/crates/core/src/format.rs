//! Fixed significant-digit formatting shared by CSV, JSON and SVG writers.

/// Decimal rendering of `x` with `digits` significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i64;
    if !(-6..=15).contains(&mag) {
        let s = format!("{:.*e}", digits.saturating_sub(1), x);
        let (m, e) = s.split_once('e').unwrap();
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        return format!("{m}e{e}");
    }
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    fmt_sig(x, digits).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders() {
        assert_eq!(fmt_sig(0.1, 15), "0.1");
        assert_eq!(fmt_sig(1.0 / 3.0, 15), "0.333333333333333");
        assert_eq!(fmt_sig(-2.5e-9, 3), "-2.5e-9");
        assert_eq!(fmt_sig(1180.0, 15), "1180");
        assert_eq!(fmt_sig(0.0, 15), "0");
    }
}
