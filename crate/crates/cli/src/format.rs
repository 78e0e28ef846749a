//! C-style `%.Ng` number formatting and CSV assembly.

/// Formats `x` like C's `printf("%.{digits}g", x)`.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = digits.max(1);
    // the exponent after rounding to `p` significant digits
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Significant digits used for every CSV field.
pub const CSV_DIGITS: usize = 12;

/// One CSV line, `%.12g` per field.
pub fn csv_row(vals: &[f64]) -> String {
    vals.iter().map(|&v| fmt_g(v, CSV_DIGITS)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1e-5, "1e-05"),
            (1.5e-4, "0.00015"),
            (999999999999.9, "1e+12"),
            (std::f64::consts::PI, "3.14159265359"),
            (1e100, "1e+100"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x, 12), want, "{x}");
        }
        assert_eq!(fmt_g(f64::NAN, 12), "nan");
        assert_eq!(fmt_g(f64::NEG_INFINITY, 12), "-inf");
    }

    #[test]
    fn rows() {
        assert_eq!(csv_row(&[0.0, 1.0, 0.0, 0.0, 0.0]), "0,1,0,0,0");
    }
}
