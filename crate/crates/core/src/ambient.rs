//! The ambient product `P^{n_1} x ... x P^{n_l}`, the class of the complete
//! intersection `X` inside it, and intersection numbers on `X`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{MultidegPolynomial, VolumePolynomial};
use crate::scalar::Q;

/// Product of projective spaces together with the multidegrees of the
/// divisors cutting out `X`.
///
/// `degrees` has one row per defining divisor and one column per factor.
#[derive(Clone, Debug)]
pub struct AmbientSpace {
    factors: Vec<u32>,
    degrees: Vec<Vec<u32>>,
    strict_cy: bool,
    class_of_x: OnceLock<MultidegPolynomial>,
    volume: OnceLock<VolumePolynomial>,
}

impl PartialEq for AmbientSpace {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
            && self.degrees == other.degrees
            && self.strict_cy == other.strict_cy
    }
}

impl Eq for AmbientSpace {}

impl AmbientSpace {
    pub fn new(factors: Vec<u32>, degrees: Vec<Vec<u32>>, strict_cy: bool) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidSpace(msg));
        if factors.is_empty() {
            return invalid("no factors".into());
        }
        if factors.contains(&0) {
            return invalid("factor dimensions must be positive".into());
        }
        let l = factors.len();
        for (k, row) in degrees.iter().enumerate() {
            if row.len() != l {
                return invalid(format!(
                    "degree row {} has {} entries, expected {l}",
                    k + 1,
                    row.len()
                ));
            }
            if row.contains(&0) {
                return invalid(format!("degree row {} has a zero entry (not ample)", k + 1));
            }
        }
        let n = degrees.len();
        let min = *factors.iter().min().expect("nonempty");
        if n as u32 > min {
            return invalid(format!(
                "{n} defining divisors exceed the smallest factor dimension {min}"
            ));
        }
        if strict_cy {
            for (i, &ni) in factors.iter().enumerate() {
                let col: u32 = degrees.iter().map(|row| row[i]).sum();
                if col != ni + 1 {
                    return invalid(format!(
                        "column {} sums to {col}, Calabi-Yau needs {}",
                        i + 1,
                        ni + 1
                    ));
                }
            }
            if factors.iter().sum::<u32>() < 4 {
                return invalid("total dimension of the product is below 4".into());
            }
            if factors == [2, 2] {
                return invalid("P^2 x P^2 is excluded".into());
            }
        }
        Ok(AmbientSpace {
            factors,
            degrees,
            strict_cy,
            class_of_x: OnceLock::new(),
            volume: OnceLock::new(),
        })
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn degrees(&self) -> &[Vec<u32>] {
        &self.degrees
    }

    pub fn strict_cy(&self) -> bool {
        self.strict_cy
    }

    /// Number of factors `l`.
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Number of defining divisors `n`.
    pub fn num_divisors(&self) -> usize {
        self.degrees.len()
    }

    pub fn min_factor(&self) -> u32 {
        *self.factors.iter().min().expect("nonempty")
    }

    /// `dim X = Σ n_i - n`.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).sum::<usize>() - self.num_divisors()
    }

    /// True when fewer divisors than the minimal factor dimension cut out `X`.
    pub fn below_minimal(&self) -> bool {
        (self.num_divisors() as u32) < self.min_factor()
    }

    /// `J = { j : n_j = min n_i }`, sorted.
    pub fn j_set(&self) -> Vec<usize> {
        let min = self.min_factor();
        (0..self.factors.len())
            .filter(|&j| self.factors[j] == min)
            .collect()
    }

    pub fn in_j(&self, j: usize) -> bool {
        j < self.factors.len() && self.factors[j] == self.min_factor()
    }

    /// Every factor is minimal.
    pub fn is_full_j(&self) -> bool {
        self.factors.iter().all(|&n| n == self.factors[0])
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.factors.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.factors.len(),
            });
        }
        Ok(())
    }

    /// `[X] = Π_k (Σ_i d_ki H_i)` in the truncated ring. Cached.
    pub fn class_of_x(&self) -> &MultidegPolynomial {
        self.class_of_x.get_or_init(|| {
            let bounds = &self.factors;
            self.degrees
                .iter()
                .fold(MultidegPolynomial::one(bounds), |acc, row| {
                    let coeffs: Vec<Q> = row.iter().map(|&d| Q::from_integer(d.into())).collect();
                    acc.mul(&MultidegPolynomial::linear(bounds, &coeffs))
                })
        })
    }

    /// Top intersection `(Σ c_i h_i)^{dim X}` on `X`, by repeated truncated
    /// multiplication against `[X]`.
    pub fn top_intersection(&self, coeffs: &[Q]) -> Result<Q> {
        if coeffs.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                got: coeffs.len(),
            });
        }
        let form = MultidegPolynomial::linear(&self.factors, coeffs);
        let mut acc = self.class_of_x().clone();
        for _ in 0..self.dim() {
            acc = acc.mul(&form);
            if acc.is_empty() {
                return Ok(Q::zero());
            }
        }
        Ok(acc.coefficient(&self.factors))
    }

    /// Coefficient `b_ij` of `H_i H_j^{n-1}` in `[X]`.
    pub fn b_coefficient(&self, i: usize, j: usize) -> Result<i64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if !self.in_j(j) {
            return Err(Error::NotInJ(j));
        }
        if i == j {
            return Err(Error::InvalidArgument("b_ij needs distinct factors".into()));
        }
        let n = self.num_divisors();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "no defining divisors; b_ij is undefined".into(),
            ));
        }
        let mut e = vec![0u32; self.factors.len()];
        e[i] += 1;
        e[j] += n as u32 - 1;
        let c = self.class_of_x().coefficient(&e);
        debug_assert!(c.is_integer());
        Ok(c.to_integer()
            .to_i64()
            .expect("intersection number fits in i64"))
    }

    /// The volume polynomial on the nef cone, built from multinomial
    /// coefficients and the coefficients of `[X]`. Cached.
    pub fn volume_polynomial(&self) -> &VolumePolynomial {
        self.volume.get_or_init(|| {
            let l = self.factors.len();
            let dim = self.dim() as u32;
            let class = self.class_of_x();
            let mut fact = vec![BigInt::one()];
            for k in 1..=dim as usize {
                let next = &fact[k - 1] * BigInt::from(k);
                fact.push(next);
            }
            let mut terms = BTreeMap::new();
            for_each_composition(dim, &self.factors, &mut |a: &[u32]| {
                let complement: Vec<u32> = (0..l).map(|i| self.factors[i] - a[i]).collect();
                let c = class.coefficient(&complement);
                if c.is_zero() {
                    return;
                }
                let denom = a
                    .iter()
                    .fold(BigInt::one(), |acc, &k| acc * &fact[k as usize]);
                let multinomial = Q::new(fact[dim as usize].clone(), denom);
                terms.insert(a.to_vec(), multinomial * c);
            });
            VolumePolynomial::new(l, terms)
        })
    }

    /// Sub-ambient on the factors in `subset`. The result is never flagged
    /// Calabi-Yau.
    pub fn restrict_to(&self, subset: &[usize]) -> Result<AmbientSpace> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut idx = subset.to_vec();
        idx.sort_unstable();
        idx.dedup();
        for &i in &idx {
            self.check_index(i)?;
        }
        let factors = idx.iter().map(|&i| self.factors[i]).collect();
        let degrees = self
            .degrees
            .iter()
            .map(|row| idx.iter().map(|&i| row[i]).collect())
            .collect();
        AmbientSpace::new(factors, degrees, false)
    }
}

/// Calls `f` on every exponent vector `a` with `Σ a = total` and
/// `a_i <= bounds_i`.
fn for_each_composition(total: u32, bounds: &[u32], f: &mut dyn FnMut(&[u32])) {
    fn rec(i: usize, left: u32, bounds: &[u32], cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if i == bounds.len() {
            if left == 0 {
                f(cur);
            }
            return;
        }
        let rest: u32 = bounds[i + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for k in lo..=bounds[i].min(left) {
            cur.push(k);
            rec(i + 1, left - k, bounds, cur, f);
            cur.pop();
        }
    }
    rec(0, total, bounds, &mut Vec::with_capacity(bounds.len()), f);
}

impl fmt::Display for AmbientSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self.factors.iter().map(|n| format!("P^{n}")).collect();
        write!(f, "{} cut by {:?}", factors.join(" x "), self.degrees)
    }
}
