//! Decimal output at a fixed number of significant digits.

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` like C's `%.12g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros dropped. Negative zero prints as
/// `0`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to the printed precision.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().expect("fmt_sig output parses")
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (55.0, "55"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (44.721359549995796, "44.72135955"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e12"),
            (1e-5, "0.00001"),
            (1.5e-7, "1.5e-7"),
            (9.9999999999996, "10"),
            (6.02214076e23, "6.02214076e23"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_sig(x), want, "{x:e}");
        }
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [std::f64::consts::PI, -1.0 / 7.0, 2.0f64.sqrt() * 1e-9] {
            let r = round_sig(x);
            assert_eq!(round_sig(r), r);
            assert!((r - x).abs() <= 1e-11 * x.abs());
        }
    }
}
