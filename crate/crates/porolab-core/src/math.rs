//! Float helpers over `libm` and a small exact rational type for parameters.

pub use num_rational::Ratio;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Floor that snaps values within `1e-9` of an integer onto it, so that
/// ratios like `log(1/4)/log(2)` land on `-2` instead of `-2.0000000000000004`.
pub fn snapped_floor(x: f64) -> f64 {
    let r = round(x);
    if (x - r).abs() <= 1e-9 {
        r
    } else {
        floor(x)
    }
}

/// Exact rational parameter, serialized as a numerator/denominator pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rational {
    pub num: i64,
    pub den: u64,
}

impl Rational {
    pub const fn new(num: i64, den: u64) -> Self {
        Rational { num, den }
    }

    pub const fn int(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn ratio(self) -> Ratio<i128> {
        Ratio::new(self.num as i128, self.den as i128)
    }
}

/// Splits a finite float into an exact dyadic fraction `num / 2^k`.
/// Returns `(num, k)`; every finite `f64` is representable this way.
pub fn dyadic_parts(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    while mant & 1 == 0 && mant != 0 {
        mant >>= 1;
        exp += 1;
    }
    // x = sign * mant * 2^exp
    (sign * mant as i64, -exp)
}

/// Two-sided Student t quantile at 97.5% for small degrees of freedom.
pub fn t975(df: usize) -> f64 {
    const TABLE: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
        2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
        2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ];
    if df == 0 {
        f64::INFINITY
    } else if df <= 30 {
        TABLE[df - 1]
    } else {
        1.96
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_parts_roundtrip() {
        for &x in &[0.5, 0.75, -3.0, 1.0 / 1024.0, 0.1, 123.456] {
            let (num, k) = dyadic_parts(x);
            let back = if k >= 0 {
                num as f64 / powi(2.0, k)
            } else {
                num as f64 * powi(2.0, -k)
            };
            assert_eq!(back, x);
        }
        assert_eq!(dyadic_parts(0.75), (3, 2));
    }

    #[test]
    fn snapped_floor_handles_log_ratios() {
        assert_eq!(snapped_floor(ln(0.25) / ln(2.0)), -2.0);
        assert_eq!(snapped_floor(-2.5), -3.0);
    }
}
