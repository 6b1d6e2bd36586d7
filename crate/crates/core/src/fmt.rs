//! Locale-independent float formatting shared by the text exporters.

/// Formats `x` with `digits` significant digits in the style of C's `%.*g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn general_format() {
        assert_eq!(sig(0.1, 10), "0.1");
        assert_eq!(sig(1.0, 10), "1");
        assert_eq!(sig(-2.5e-9, 10), "-2.5e-9");
        assert_eq!(sig(123456.789, 10), "123456.789");
        assert_eq!(sig(1.0 / 3.0, 10), "0.3333333333");
        assert_eq!(sig(12345678901.0, 10), "1.23456789e10");
        assert_eq!(sig(0.0, 10), "0");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, -0.7071067811865476, 1e-300, 6.02e23] {
            assert_eq!(sig(x, 17).parse::<f64>().unwrap(), x);
        }
    }
}
