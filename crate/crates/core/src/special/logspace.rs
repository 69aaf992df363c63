use std::ops::Mul;

/// A real number stored as sign and natural log of its magnitude.
///
/// `sign == 0` marks an exact zero; `log_magnitude` is then ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub const ONE: SignedLogValue = SignedLogValue {
        log_magnitude: 0.0,
        sign: 1,
    };

    pub fn new(log_magnitude: f64, sign: i8) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLogValue {
                log_magnitude,
                sign: sign.signum(),
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                log_magnitude: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_magnitude.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Multiply by exp(log_factor) with the given sign.
    pub fn scale(self, log_factor: f64, sign: i8) -> Self {
        if self.sign == 0 || sign == 0 {
            Self::ZERO
        } else {
            SignedLogValue::new(self.log_magnitude + log_factor, self.sign * sign)
        }
    }
}

impl Mul for SignedLogValue {
    type Output = SignedLogValue;

    fn mul(self, rhs: Self) -> Self {
        rhs.scale(self.log_magnitude, self.sign)
    }
}

/// Compensated (Neumaier) accumulator over log-encoded terms.
///
/// The running sum is held relative to a floating reference scale that is
/// raised whenever a term would overflow it, so terms with magnitudes far
/// beyond `f64::MAX` can be added as long as they cancel.
#[derive(Debug, Clone)]
pub struct LogSum {
    log_scale: f64,
    sum: f64,
    comp: f64,
    abs_sum: f64,
    max_log_term: f64,
    count: usize,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

const RESCALE_HEADROOM: f64 = 600.0;

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            log_scale: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
            abs_sum: 0.0,
            max_log_term: f64::NEG_INFINITY,
            count: 0,
        }
    }

    pub fn add(&mut self, term: SignedLogValue) {
        self.count += 1;
        if term.is_zero() {
            return;
        }
        self.max_log_term = self.max_log_term.max(term.log_magnitude);
        if self.log_scale == f64::NEG_INFINITY {
            self.log_scale = term.log_magnitude;
        } else if term.log_magnitude > self.log_scale + RESCALE_HEADROOM {
            let factor = (self.log_scale - term.log_magnitude).exp();
            self.sum *= factor;
            self.comp *= factor;
            self.abs_sum *= factor;
            self.log_scale = term.log_magnitude;
        }
        let x = f64::from(term.sign) * (term.log_magnitude - self.log_scale).exp();
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
        self.abs_sum += x.abs();
    }

    pub fn add_f64(&mut self, x: f64) {
        self.add(SignedLogValue::from_f64(x));
    }

    pub fn value(&self) -> SignedLogValue {
        let s = self.sum + self.comp;
        if s == 0.0 || self.log_scale == f64::NEG_INFINITY {
            SignedLogValue::ZERO
        } else {
            SignedLogValue::new(s.abs().ln() + self.log_scale, if s > 0.0 { 1 } else { -1 })
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    /// log |partial sum|, or -inf when the sum is zero.
    pub fn log_abs(&self) -> f64 {
        let v = self.value();
        if v.is_zero() {
            f64::NEG_INFINITY
        } else {
            v.log_magnitude
        }
    }

    /// sum |term| / |sum|, the amplification of rounding by cancellation.
    pub fn condition(&self) -> f64 {
        let s = (self.sum + self.comp).abs();
        if self.abs_sum == 0.0 {
            1.0
        } else if s == 0.0 {
            f64::INFINITY
        } else {
            self.abs_sum / s
        }
    }

    pub fn max_log_term(&self) -> f64 {
        self.max_log_term
    }

    pub fn terms(&self) -> usize {
        self.count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_encoding() {
        assert_eq!(SignedLogValue::from_f64(0.0).sign, 0);
        assert_eq!(SignedLogValue::new(3.0, 0).to_f64(), 0.0);
        assert_eq!(SignedLogValue::ZERO.to_f64(), 0.0);
    }

    #[test]
    fn cancels_beyond_overflow() {
        let mut s = LogSum::new();
        s.add(SignedLogValue::new(1000.0, 1));
        s.add(SignedLogValue::new(0.0, 1));
        s.add(SignedLogValue::new(1000.0, -1));
        assert_eq!(s.to_f64(), 0.0);
        let mut s = LogSum::new();
        s.add(SignedLogValue::new(800.0, 1));
        s.add(SignedLogValue::new(800.0 + 2f64.ln(), -1));
        let v = s.value();
        assert_eq!(v.sign, -1);
        assert!((v.log_magnitude - 800.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip(x in prop::num::f64::NORMAL) {
            let y = SignedLogValue::from_f64(x).to_f64();
            prop_assert!((y - x).abs() <= 1e-13 * x.abs());
        }

        #[test]
        fn matches_compensated_sum_on_shuffled_terms(
            terms in prop::collection::vec(-1e3f64..1e3, 2..200),
            seed in any::<u64>(),
        ) {
            let mut shuffled = terms.clone();
            // Fisher-Yates with a small LCG so the test has no rng dependency.
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let exact: f64 = {
                let (mut s, mut c) = (0.0f64, 0.0f64);
                for &x in &terms {
                    let t = s + x;
                    c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
                    s = t;
                }
                s + c
            };
            let abs: f64 = terms.iter().map(|x| x.abs()).sum();
            prop_assume!(exact.abs() > 0.0 && abs / exact.abs() < 1e6);
            let mut acc = LogSum::new();
            for &x in &shuffled {
                acc.add_f64(x);
            }
            prop_assert!((acc.to_f64() - exact).abs() <= 1e-12 * exact.abs());
        }
    }
}
