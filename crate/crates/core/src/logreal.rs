//! Signed reals stored as `(sign, ln|x|)`.
//!
//! Moment formulas at n in the tens of thousands multiply binomials near
//! e^100 by powers near e^-100; plain `f64` over- or underflows on the way.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Repr", from = "Repr")]
pub struct LogReal {
    sign: i8,
    ln_abs: f64,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    sign: i8,
    /// `null` for zero
    log: Option<f64>,
}

impl From<LogReal> for Repr {
    fn from(x: LogReal) -> Self {
        Repr {
            sign: x.sign,
            log: (x.sign != 0).then_some(x.ln_abs),
        }
    }
}

impl From<Repr> for LogReal {
    fn from(r: Repr) -> Self {
        match (r.sign, r.log) {
            (0, _) | (_, None) => LogReal::ZERO,
            (s, Some(l)) => LogReal {
                sign: s.signum(),
                ln_abs: l,
            },
        }
    }
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogReal = LogReal {
        sign: 1,
        ln_abs: 0.0,
    };

    /// Positive number `e^ln`; `ln = -inf` gives zero.
    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            debug_assert!(!ln.is_nan());
            LogReal { sign: 1, ln_abs: ln }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_abs.exp(),
        }
    }

    pub fn abs(&self) -> Self {
        LogReal {
            sign: self.sign.abs(),
            ln_abs: self.ln_abs,
        }
    }

    /// `self^e` for nonnegative `self`, with `0^0 = 1`.
    pub fn powf(&self, e: f64) -> Self {
        assert!(self.sign >= 0, "power of a negative LogReal");
        if e == 0.0 {
            Self::ONE
        } else if self.sign == 0 {
            if e > 0.0 {
                Self::ZERO
            } else {
                LogReal {
                    sign: 1,
                    ln_abs: f64::INFINITY,
                }
            }
        } else {
            Self::from_ln(self.ln_abs * e)
        }
    }

    pub fn powi(&self, e: u64) -> Self {
        self.powf(e as f64)
    }

    /// Sum of many terms with a single max shift.
    pub fn sum<I: IntoIterator<Item = LogReal>>(terms: I) -> Self {
        let terms: Vec<LogReal> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let Some(max) = terms
            .iter()
            .map(|t| t.ln_abs)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        else {
            return Self::ZERO;
        };
        if max.is_infinite() {
            return terms.iter().fold(Self::ZERO, |acc, &t| acc + t);
        }
        let s: f64 = terms
            .iter()
            .map(|t| f64::from(t.sign) * (t.ln_abs - max).exp())
            .sum();
        let mut out = Self::from_f64(s);
        if !out.is_zero() {
            out.ln_abs += max;
        }
        out
    }

    /// Ratio `|self - other| / |other|`, or `|self|` when `other` is zero.
    pub fn rel_err(&self, other: &LogReal) -> f64 {
        let diff = (*self - *other).abs();
        if other.is_zero() {
            diff.to_f64()
        } else {
            (diff / other.abs()).to_f64()
        }
    }

    /// Twelve significant digits in scientific notation, computed from the
    /// logarithm so values outside the `f64` range still render.
    pub fn to_decimal(&self) -> String {
        if self.sign == 0 {
            return "0".into();
        }
        let l10 = self.ln_abs / std::f64::consts::LN_10;
        let mut exp = l10.floor();
        let mut mant = 10f64.powf(l10 - exp);
        if mant >= 9.999_999_999_995 {
            mant /= 10.0;
            exp += 1.0;
        }
        let s = if self.sign < 0 { "-" } else { "" };
        format!("{s}{mant:.11}e{exp}")
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (sign={}, ln={})", self.to_decimal(), self.sign, self.ln_abs)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(rhs.sign != 0, "LogReal division by zero");
        if self.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs - rhs.ln_abs,
        }
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = (small.ln_abs - big.ln_abs).exp();
        if big.sign == small.sign {
            LogReal {
                sign: big.sign,
                ln_abs: big.ln_abs + d.ln_1p(),
            }
        } else if d == 1.0 {
            LogReal::ZERO
        } else {
            LogReal {
                sign: big.sign,
                ln_abs: big.ln_abs + (-d).ln_1p(),
            }
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln_abs.partial_cmp(&other.ln_abs),
                _ => other.ln_abs.partial_cmp(&self.ln_abs),
            },
            o => Some(o),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn arithmetic_matches_f64() {
        let xs = [3.5, -2.0, 0.0, 1e-5, -7.25];
        for &a in &xs {
            for &b in &xs {
                let (la, lb) = (LogReal::from_f64(a), LogReal::from_f64(b));
                assert!(close((la + lb).to_f64(), a + b), "{a}+{b}");
                assert!(close((la - lb).to_f64(), a - b), "{a}-{b}");
                assert!(close((la * lb).to_f64(), a * b), "{a}*{b}");
                if b != 0.0 {
                    assert!(close((la / lb).to_f64(), a / b), "{a}/{b}");
                }
                assert_eq!(la.partial_cmp(&lb), a.partial_cmp(&b));
            }
        }
    }

    #[test]
    fn exact_cancellation_is_zero() {
        let a = LogReal::from_f64(2.5);
        assert!((a - a).is_zero());
    }

    #[test]
    fn powers() {
        assert_eq!(LogReal::ZERO.powf(0.0), LogReal::ONE);
        assert!(LogReal::ZERO.powf(3.0).is_zero());
        assert!(close(LogReal::from_f64(0.75).powi(5).to_f64(), 0.75f64.powi(5)));
    }

    #[test]
    fn sum_beyond_f64_range() {
        let big = LogReal::from_ln(1000.0);
        let s = LogReal::sum([big, big, LogReal::ZERO]);
        assert!((s.ln_abs() - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(LogReal::sum([]), LogReal::ZERO);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(LogReal::from_f64(5103.0 / 1024.0).to_decimal(), "4.98339843750e0");
        assert_eq!(LogReal::from_f64(-0.001).to_decimal(), "-1.00000000000e-3");
        assert_eq!(LogReal::ZERO.to_decimal(), "0");
        assert!(LogReal::from_ln(2000.0).to_decimal().ends_with("e868"));
    }

    #[test]
    fn serde_zero_uses_null() {
        let j = serde_json::to_string(&LogReal::ZERO).unwrap();
        assert_eq!(j, r#"{"sign":0,"log":null}"#);
        let x = LogReal::from_f64(-3.0);
        let back: LogReal = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(back, x);
    }
}
