//! Small special-function helpers.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Exponential integral `E1(x) = ∫_x^∞ e^{-w}/w dw` for `x > 0`.
///
/// Power series below 1, modified Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// `ln(1 + e^a)` without overflow.
pub fn ln_1p_exp(a: f64) -> f64 {
    if a > 0.0 {
        a + (-a).exp().ln_1p()
    } else {
        a.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn e1_matches_reference_values() {
        // mpmath e1 at 40 digits
        assert_relative_eq!(exp_integral_e1(1.0), 0.219_383_934_395_520_27, max_relative = 1e-14);
        assert_relative_eq!(exp_integral_e1(0.1), 1.822_923_958_419_390_6, max_relative = 1e-14);
        assert_relative_eq!(exp_integral_e1(5.0), 0.001_148_295_591_275_325_8, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(30.0), 3.021_552_010_688_812_5e-15, max_relative = 1e-12);
    }

    #[test]
    fn ln_1p_exp_is_stable() {
        assert_relative_eq!(ln_1p_exp(0.0), 2f64.ln());
        assert_relative_eq!(ln_1p_exp(800.0), 800.0);
        assert_relative_eq!(ln_1p_exp(-800.0), 0.0);
    }
}
