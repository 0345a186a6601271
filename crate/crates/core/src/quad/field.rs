//! Exact arithmetic in ℚ(√m) for a square-free positive integer `m`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ext::ExtContext;

/// Factor `k = c² · m` with `m` square-free; returns `(c, m)`.
pub fn squarefree_decompose(k: u64) -> (u64, u64) {
    assert!(k > 0, "square-free decomposition of 0");
    let mut c = 1;
    let mut m = 1;
    let mut rest = k;
    let mut p = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        c *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    (c, m * rest)
}

/// `x + y √m` with rational `x`, `y`.
#[derive(Clone, Debug)]
pub struct QuadExt {
    pub x: BigRational,
    pub y: BigRational,
    pub m: u64,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QuadExt {
    pub fn new(x: BigRational, y: BigRational, m: u64) -> Self {
        assert!(m > 0);
        if m == 1 {
            // √1 is rational; fold it in
            return Self {
                x: x + y,
                y: BigRational::zero(),
                m,
            };
        }
        Self { x, y, m }
    }

    pub fn rational(x: BigRational, m: u64) -> Self {
        Self::new(x, BigRational::zero(), m)
    }

    pub fn int(n: i64, m: u64) -> Self {
        Self::rational(q(n), m)
    }

    pub fn frac(num: i64, den: i64, m: u64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)), m)
    }

    pub fn zero(m: u64) -> Self {
        Self::int(0, m)
    }

    pub fn one(m: u64) -> Self {
        Self::int(1, m)
    }

    /// `√k` expressed in the field of its square-free part.
    pub fn sqrt_of(k: u64) -> Self {
        let (c, m) = squarefree_decompose(k);
        if m == 1 {
            Self::int(c as i64, 1)
        } else {
            Self::new(BigRational::zero(), q(c as i64), m)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x.clone(), -self.y.clone(), self.m)
    }

    /// Field norm `x² − m y²`.
    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - q(self.m as i64) * &self.y * &self.y
    }

    /// Exact sign of the real number `x + y √m`.
    pub fn signum(&self) -> i32 {
        let sx = sign_of(&self.x);
        let sy = sign_of(&self.y);
        if sy == 0 {
            return sx;
        }
        if sx == 0 {
            return sy;
        }
        if sx == sy {
            return sx;
        }
        // opposite signs: compare x² with m y²
        let lhs = &self.x * &self.x;
        let rhs = q(self.m as i64) * &self.y * &self.y;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sx,
            std::cmp::Ordering::Less => sy,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let m = common_field(self, rhs);
        let nrm = rhs.norm();
        let num = self.mul_ref(&rhs.conj());
        Some(Self::new(num.x / &nrm, num.y / &nrm, m))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.m);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let m = common_field(self, rhs);
        let mq = q(m as i64);
        let x = &self.x * &rhs.x + &mq * &self.y * &rhs.y;
        let y = &self.x * &rhs.y + &self.y * &rhs.x;
        Self::new(x, y, m)
    }

    /// Double-precision value; each part is rounded separately, so large
    /// cancellations between them are not resolved.
    pub fn to_f64(&self) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        x + y * (self.m as f64).sqrt()
    }

    pub fn to_ext(&self, ctx: &mut ExtContext) -> astro_float::BigFloat {
        let x = ctx.rational(&self.x);
        if self.y.is_zero() {
            return x;
        }
        let y = ctx.rational(&self.y);
        let root = ctx.sqrt(&ctx.small(self.m as i64));
        let yr = ctx.mul(&y, &root);
        ctx.add(&x, &yr)
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn common_field(a: &QuadExt, b: &QuadExt) -> u64 {
    if a.y.is_zero() {
        return b.m;
    }
    if b.y.is_zero() {
        return a.m;
    }
    assert_eq!(a.m, b.m, "mixing Q(sqrt {}) and Q(sqrt {})", a.m, b.m);
    a.m
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y && (self.y.is_zero() || self.m == other.m)
    }
}

impl Eq for QuadExt {}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            write!(f, "{}", self.x)
        } else {
            write!(f, "{} + {}*sqrt({})", self.x, self.y, self.m)
        }
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        let m = common_field(self, rhs);
        QuadExt::new(&self.x + &rhs.x, &self.y + &rhs.y, m)
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        let m = common_field(self, rhs);
        QuadExt::new(&self.x - &rhs.x, &self.y - &rhs.y, m)
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        self.mul_ref(rhs)
    }
}

impl<'a> Div<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: &QuadExt) -> QuadExt {
        self.checked_div(rhs)
            .expect("division by zero in Q(sqrt m)")
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-self.x.clone(), -self.y.clone(), self.m)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

/// Serialized form: rational parts as `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadExtRecord {
    pub rational: String,
    pub sqrt_coeff: String,
}

impl From<&QuadExt> for QuadExtRecord {
    fn from(v: &QuadExt) -> Self {
        Self {
            rational: v.x.to_string(),
            sqrt_coeff: v.y.to_string(),
        }
    }
}

impl QuadExtRecord {
    pub fn parse(&self, m: u64) -> Option<QuadExt> {
        let x: BigRational = self.rational.parse().ok()?;
        let y: BigRational = self.sqrt_coeff.parse().ok()?;
        Some(QuadExt::new(x, y, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_rational() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..30).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn arb_elem(m: u64) -> impl Strategy<Value = QuadExt> {
        (arb_rational(), arb_rational()).prop_map(move |(x, y)| QuadExt::new(x, y, m))
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decompose(8), (2, 2));
        assert_eq!(squarefree_decompose(12), (2, 3));
        assert_eq!(squarefree_decompose(16), (4, 1));
        assert_eq!(squarefree_decompose(6), (1, 6));
        assert_eq!(squarefree_decompose(14), (1, 14));
    }

    #[test]
    fn conjugate_product_is_norm() {
        let v = QuadExt::new(q(3), BigRational::new(BigInt::from(2), BigInt::from(5)), 7);
        let p = &v * &v.conj();
        assert!(p.is_rational());
        assert_eq!(
            p.x,
            q(9) - q(7) * BigRational::new(BigInt::from(4), BigInt::from(25))
        );
    }

    #[test]
    fn exact_sign() {
        // 3 - sqrt(8) = 3 - 2 sqrt 2 > 0, 2 - sqrt 5 < 0
        let a = &QuadExt::int(3, 2) - &QuadExt::sqrt_of(8);
        assert_eq!(a.signum(), 1);
        let b = &QuadExt::int(2, 5) - &QuadExt::sqrt_of(5);
        assert_eq!(b.signum(), -1);
        let c = &QuadExt::int(4, 1) - &QuadExt::sqrt_of(16);
        assert_eq!(c.signum(), 0);
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_elem(6), b in arb_elem(6), c in arb_elem(6)) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a - &a), &QuadExt::zero(6));
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn double_value_tracks_arithmetic(a in arb_elem(10), b in arb_elem(10)) {
            let s = (&a * &b).to_f64();
            let t = a.to_f64() * b.to_f64();
            prop_assert!((s - t).abs() <= 1e-12 * (1.0 + t.abs()));
        }
    }
}
