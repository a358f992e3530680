//! Exact arithmetic in a real quadratic field `Q(√d)`.
//!
//! Elements are stored as `rational + surd·√d` with `d` squarefree. A value
//! with zero surd part carries `d = 0` and adopts the radicand of whatever it
//! is combined with, so rationals embed into every field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{self, Q};

#[derive(Clone, Debug)]
pub struct QuadraticNumber {
    rational: Q,
    surd: Q,
    radicand: BigInt,
}

/// Splits `n > 0` as `f^2 * d` with `d` squarefree; returns `(f, d)`.
pub fn squarefree_decomposition(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "radicand must be positive");
    let mut rest = n.clone();
    let mut factor = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            factor *= &p;
        }
        p += 1;
    }
    (factor, rest)
}

impl QuadraticNumber {
    /// `rational + surd·√radicand`. The radicand is reduced to its squarefree
    /// part, folding the square factor into `surd`.
    pub fn new(rational: Q, surd: Q, radicand: BigInt) -> Self {
        if surd.is_zero() {
            return Self::from_q(rational);
        }
        let (f, d) = squarefree_decomposition(&radicand);
        let surd = surd * Q::from_integer(f);
        if d.is_one() {
            return Self::from_q(rational + surd);
        }
        QuadraticNumber {
            rational,
            surd,
            radicand: d,
        }
    }

    pub fn from_q(q: Q) -> Self {
        QuadraticNumber {
            rational: q,
            surd: Q::zero(),
            radicand: BigInt::zero(),
        }
    }

    /// `√n` for a positive integer `n`.
    pub fn sqrt_of(n: i64) -> Self {
        Self::new(Q::zero(), Q::one(), BigInt::from(n))
    }

    pub fn rational_part(&self) -> &Q {
        &self.rational
    }

    pub fn surd_part(&self) -> &Q {
        &self.surd
    }

    /// Squarefree radicand, or 0 when the value is rational.
    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadraticNumber {
            rational: self.rational.clone(),
            surd: -self.surd.clone(),
            radicand: self.radicand.clone(),
        }
    }

    /// Field norm `rational^2 - d·surd^2`.
    pub fn norm(&self) -> Q {
        &self.rational * &self.rational
            - Q::from_integer(self.radicand.clone()) * &self.surd * &self.surd
    }

    fn joint_radicand(&self, other: &Self) -> BigInt {
        match (self.surd.is_zero(), other.surd.is_zero()) {
            (true, _) => other.radicand.clone(),
            (_, true) => self.radicand.clone(),
            _ => {
                assert_eq!(
                    self.radicand, other.radicand,
                    "mixing elements of different quadratic fields"
                );
                self.radicand.clone()
            }
        }
    }

    fn build(rational: Q, surd: Q, radicand: BigInt) -> Self {
        if surd.is_zero() {
            Self::from_q(rational)
        } else {
            QuadraticNumber {
                rational,
                surd,
                radicand,
            }
        }
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let zero = Q::zero();
        let a = self.rational.cmp(&zero);
        let b = self.surd.cmp(&zero);
        match (a, b) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (x, _) => {
                // Opposite signs: the larger of rational^2 and d*surd^2 wins.
                let lhs = &self.rational * &self.rational;
                let rhs = Q::from_integer(self.radicand.clone()) * &self.surd * &self.surd;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Nearest-ish binary64 value with full relative accuracy even when the
    /// two parts nearly cancel.
    pub fn approx(&self) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.surd.is_zero() {
            return r;
        }
        let root = self.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
        let s = self.surd.to_f64().unwrap_or(f64::NAN) * root;
        if self.rational.is_zero() || (self.rational.is_positive() == self.surd.is_positive()) {
            r + s
        } else {
            // p + q√d = (p² - d q²) / (p - q√d), and p - q√d has no cancellation.
            self.norm().to_f64().unwrap_or(f64::NAN) / (r - s)
        }
    }
}

impl PartialEq for QuadraticNumber {
    fn eq(&self, other: &Self) -> bool {
        self.rational == other.rational
            && self.surd == other.surd
            && (self.surd.is_zero() || self.radicand == other.radicand)
    }
}

impl Eq for QuadraticNumber {}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl Add for QuadraticNumber {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = self.joint_radicand(&rhs);
        Self::build(self.rational + rhs.rational, self.surd + rhs.surd, d)
    }
}

impl Sub for QuadraticNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let d = self.joint_radicand(&rhs);
        Self::build(self.rational - rhs.rational, self.surd - rhs.surd, d)
    }
}

impl Mul for QuadraticNumber {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = self.joint_radicand(&rhs);
        let dq = Q::from_integer(d.clone());
        let rational = &self.rational * &rhs.rational + dq * &self.surd * &rhs.surd;
        let surd = &self.rational * &rhs.surd + &self.surd * &rhs.rational;
        Self::build(rational, surd, d)
    }
}

impl Div for QuadraticNumber {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let norm = rhs.norm();
        assert!(!norm.is_zero(), "division by zero in quadratic field");
        let num = self * rhs.conjugate();
        let inv = Q::one() / norm;
        Self::build(&num.rational * &inv, &num.surd * &inv, num.radicand)
    }
}

impl Neg for QuadraticNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self::build(-self.rational, -self.surd, self.radicand)
    }
}

impl scalar::Scalar for QuadraticNumber {
    fn zero() -> Self {
        Self::from_q(Zero::zero())
    }
    fn one() -> Self {
        Self::from_q(One::one())
    }
    fn from_rational(q: &Q) -> Self {
        Self::from_q(q.clone())
    }
    fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.rational) && Zero::is_zero(&self.surd)
    }
    fn to_f64(&self) -> f64 {
        self.approx()
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", self.rational);
        }
        // Common denominator form (a + b√d)/c.
        let den = self.rational.denom().lcm(self.surd.denom());
        let a = self.rational.numer() * (&den / self.rational.denom());
        let b = self.surd.numer() * (&den / self.surd.denom());
        let sign = if b.is_negative() { '-' } else { '+' };
        let body = format!("{a} {sign} {}√{}", b.abs(), self.radicand);
        if den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{den}")
        }
    }
}
