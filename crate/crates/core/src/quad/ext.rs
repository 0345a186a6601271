//! Thin wrapper over `astro-float` for the handful of extended-precision
//! evaluations the crate needs (square roots of integers, logarithms of
//! quadratic irrationals, exact rationals rounded to decimal strings).

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Working precision in bits (about 300 decimal digits).
pub const EXT_BITS: usize = 1024;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct ExtContext {
    cc: Consts,
    pub bits: usize,
}

impl Default for ExtContext {
    fn default() -> Self {
        Self::new(EXT_BITS)
    }
}

impl ExtContext {
    pub fn new(bits: usize) -> Self {
        Self {
            cc: Consts::new().expect("astro-float constant cache"),
            bits,
        }
    }

    pub fn int(&mut self, k: &BigInt) -> BigFloat {
        BigFloat::parse(&k.to_string(), Radix::Dec, self.bits, RM, &mut self.cc)
    }

    pub fn small(&self, k: i64) -> BigFloat {
        BigFloat::from_i64(k, self.bits)
    }

    pub fn rational(&mut self, r: &BigRational) -> BigFloat {
        let num = self.int(r.numer());
        let den = self.int(r.denom());
        num.div(&den, self.bits, RM)
    }

    pub fn f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn add(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.add(y, self.bits, RM)
    }

    pub fn sub(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.sub(y, self.bits, RM)
    }

    pub fn mul(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.mul(y, self.bits, RM)
    }

    pub fn div(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.div(y, self.bits, RM)
    }

    pub fn powi(&self, x: &BigFloat, k: u32) -> BigFloat {
        let mut acc = self.small(1);
        for _ in 0..k {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn sqrt(&self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.bits, RM)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.bits, RM, &mut self.cc)
    }

    /// Correctly rounded conversion through the decimal representation.
    pub fn to_f64(&mut self, x: &BigFloat) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let s = self.to_decimal(x, 40);
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Scientific decimal string with `digits` significant digits.
    pub fn to_decimal(&mut self, x: &BigFloat, digits: usize) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        // bits needed for `digits` decimal digits, plus guard bits
        let p = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 8;
        let rounded = x.add(&BigFloat::from_i64(0, p), p, RM);
        let s = rounded
            .format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| "NaN".to_string());
        trim_mantissa(&s, digits)
    }
}

fn trim_mantissa(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let (sign, body) = match mant.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mant),
    };
    let mut out = String::from(sign);
    let mut count = 0;
    for ch in body.chars() {
        if ch.is_ascii_digit() {
            if count == digits {
                break;
            }
            count += 1;
        }
        out.push(ch);
    }
    if out.ends_with('.') {
        out.pop();
    }
    out.push_str(exp);
    out
}
