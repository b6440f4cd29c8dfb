//! Software high-precision arithmetic: binary fixed point with a 320-bit
//! fraction, enough for several dozen auditable decimal digits through
//! exp/sqrt chains.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fraction bits of the fixed-point representation (~96 decimal digits).
pub const PREC_BITS: u32 = 320;

const PI_DECIMAL: &str = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651";

/// Fixed-point real number: the stored integer divided by 2^320.
#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
        }
    }

    pub fn one() -> Self {
        BigFloat {
            mant: BigInt::from(1) << PREC_BITS,
        }
    }

    pub fn from_u64(v: u64) -> Self {
        BigFloat {
            mant: BigInt::from(v) << PREC_BITS,
        }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        BigFloat {
            mant: v << PREC_BITS,
        }
    }

    /// `num / den` rounded to the working precision. Panics on zero `den`.
    pub fn from_ratio(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        BigFloat {
            mant: (num << PREC_BITS) / den,
        }
    }

    /// Parses a plain decimal literal `[-]digits[.digits]`.
    pub fn from_decimal_str(s: &str) -> Option<Self> {
        let (negative, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
        let den = BigInt::from(10).pow(frac_part.len() as u32);
        let v = BigFloat::from_ratio(digits, den);
        Some(if negative { v.neg() } else { v })
    }

    pub fn pi() -> Self {
        static PI: OnceLock<BigFloat> = OnceLock::new();
        PI.get_or_init(|| BigFloat::from_decimal_str(PI_DECIMAL).expect("pi literal"))
            .clone()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        BigFloat {
            mant: &self.mant + &rhs.mant,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        BigFloat {
            mant: &self.mant - &rhs.mant,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        BigFloat {
            mant: (&self.mant * &rhs.mant) >> PREC_BITS,
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.mant.is_zero(), "division by zero");
        BigFloat {
            mant: (&self.mant << PREC_BITS) / &rhs.mant,
        }
    }

    fn div_u64(&self, d: u64) -> Self {
        BigFloat {
            mant: &self.mant / BigInt::from(d),
        }
    }

    /// Floor square root in fixed point. Panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of a negative value");
        BigFloat {
            mant: (&self.mant << PREC_BITS).sqrt(),
        }
    }

    /// exp(self), by range reduction to |r| < 2^-5, Taylor summation, and
    /// repeated squaring.
    pub fn exp(&self) -> Self {
        if self.is_zero() {
            return BigFloat::one();
        }
        if self.is_negative() {
            return BigFloat::one().div(&self.neg().exp());
        }
        let int_bits = (self.mant.bits() as i64 - PREC_BITS as i64).max(0) as u32;
        let halvings = int_bits + 5;
        let reduced = BigFloat {
            mant: &self.mant >> halvings,
        };
        let mut sum = BigFloat::one();
        let mut term = BigFloat::one();
        let mut k = 1u64;
        loop {
            term = term.mul(&reduced).div_u64(k);
            if term.mant.is_zero() {
                break;
            }
            sum = sum.add(&term);
            k += 1;
        }
        for _ in 0..halvings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Approximate double, saturating for extreme magnitudes.
    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = bits - 64;
        let top = if shift >= 0 {
            (&self.mant >> shift as u32).to_f64().unwrap_or(f64::NAN)
        } else {
            (&self.mant << (-shift) as u32).to_f64().unwrap_or(f64::NAN)
        };
        top * 2f64.powi((shift - PREC_BITS as i64) as i32)
    }

    /// Scientific-notation decimal string with the given number of
    /// significant digits, e.g. `"1.87667e0"`.
    pub fn to_decimal(&self, sig_digits: usize) -> String {
        assert!(sig_digits >= 1);
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let negative = self.mant.is_negative();
        let mag = self.mant.abs();
        // first estimate of floor(log10(value))
        let mut e10 =
            ((mag.bits() as f64 - PREC_BITS as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10);
        loop {
            // digits = round(value * 10^(sig-1-e10))
            let k = sig_digits as i64 - 1 - e10;
            let (num, den) = if k >= 0 {
                (&mag * ten.pow(k as u32), BigInt::from(1) << PREC_BITS)
            } else {
                (mag.clone(), (BigInt::from(1) << PREC_BITS) * ten.pow((-k) as u32))
            };
            let digits: BigInt = (num * 2 + &den) / (den * 2);
            let lo = ten.pow(sig_digits as u32 - 1);
            let hi = ten.pow(sig_digits as u32);
            if digits < lo {
                e10 -= 1;
                continue;
            }
            if digits >= hi {
                e10 += 1;
                continue;
            }
            let ds = digits.to_string();
            let mut out = String::new();
            if negative {
                out.push('-');
            }
            out.push_str(&ds[..1]);
            if ds.len() > 1 {
                out.push('.');
                out.push_str(&ds[1..]);
            }
            out.push('e');
            out.push_str(&e10.to_string());
            return out;
        }
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.mant.cmp(&other.mant)
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_decimal(20))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(36))
    }
}
