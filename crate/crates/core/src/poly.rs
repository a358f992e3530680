//! Polynomials in the hyperplane classes `H_i` (truncated by the factor
//! dimensions) and in the coordinates of a divisor class.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{self, Q};

/// Element of the truncated ring `Q[H_1..H_l] / (H_i^{n_i + 1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultidegPolynomial {
    bounds: Vec<u32>,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MultidegPolynomial {
    pub fn one(bounds: &[u32]) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; bounds.len()], Q::one());
        MultidegPolynomial {
            bounds: bounds.to_vec(),
            terms,
        }
    }

    /// `Σ coeffs_i H_i`.
    pub fn linear(bounds: &[u32], coeffs: &[Q]) -> Self {
        assert_eq!(bounds.len(), coeffs.len());
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() || bounds[i] == 0 {
                continue;
            }
            let mut e = vec![0; bounds.len()];
            e[i] = 1;
            terms.insert(e, c.clone());
        }
        MultidegPolynomial {
            bounds: bounds.to_vec(),
            terms,
        }
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Q)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Q {
        self.terms.get(exponents).cloned().unwrap_or_else(Q::zero)
    }

    /// Product in the truncated ring; monomials exceeding a bound vanish.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.bounds, other.bounds, "factor dimensions differ");
        let mut terms: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            'pairs: for (eb, cb) in &other.terms {
                let mut e = Vec::with_capacity(ea.len());
                for i in 0..ea.len() {
                    let s = ea[i] + eb[i];
                    if s > self.bounds[i] {
                        continue 'pairs;
                    }
                    e.push(s);
                }
                let entry = terms.entry(e).or_insert_with(Q::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultidegPolynomial {
            bounds: self.bounds.clone(),
            terms,
        }
    }
}

impl fmt::Display for MultidegPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().rev(), "H")
    }
}

/// Polynomial in the coordinates `x_1..x_l` of a divisor class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl VolumePolynomial {
    pub fn new(nvars: usize, terms: BTreeMap<Vec<u32>, Q>) -> Self {
        assert!(terms.keys().all(|e| e.len() == nvars));
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        VolumePolynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Q)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Q {
        self.terms.get(exponents).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree of the (homogeneous) polynomial; 0 when empty.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval<S: scalar::Scalar>(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.nvars, "wrong number of coordinates");
        let max_exp = self
            .terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<S>> = x
            .iter()
            .map(|xi| {
                let mut p = Vec::with_capacity(max_exp + 1);
                p.push(S::one());
                for k in 1..=max_exp {
                    let next = p[k - 1].clone() * xi.clone();
                    p.push(next);
                }
                p
            })
            .collect();
        self.terms.iter().fold(S::zero(), |acc, (e, c)| {
            let mono = e
                .iter()
                .enumerate()
                .fold(S::from_rational(c), |m, (i, &k)| {
                    m * powers[i][k as usize].clone()
                });
            acc + mono
        })
    }

    /// Substitutes `x_i = Σ_j map[i][j] y_j`, giving a polynomial in the `y`.
    pub fn compose_linear(&self, map: &[Vec<Q>]) -> VolumePolynomial {
        assert_eq!(map.len(), self.nvars);
        let m = map.first().map_or(0, Vec::len);
        let linear: Vec<Sparse> = map
            .iter()
            .map(|row| {
                let mut t = Sparse::new();
                for (j, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        let mut e = vec![0; m];
                        e[j] = 1;
                        t.insert(e, c.clone());
                    }
                }
                t
            })
            .collect();
        let mut out = Sparse::new();
        for (e, c) in &self.terms {
            let mut prod = Sparse::new();
            prod.insert(vec![0; m], c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    prod = sparse_mul(&prod, &linear[i]);
                }
            }
            for (pe, pc) in prod {
                *out.entry(pe).or_insert_with(Q::zero) += pc;
            }
        }
        VolumePolynomial::new(m, out)
    }
}

type Sparse = BTreeMap<Vec<u32>, Q>;

fn sparse_mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl fmt::Display for VolumePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().rev(), "x")
    }
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Vec<u32>, &'a Q)>,
    var: &str,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        let mut mono = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => mono.push(format!("{var}{}", i + 1)),
                _ => mono.push(format!("{var}{}^{k}", i + 1)),
            }
        }
        let sign = if c < &Q::zero() { "-" } else { "+" };
        let mag = if c < &Q::zero() {
            -c.clone()
        } else {
            c.clone()
        };
        if first {
            if sign == "-" {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        if mono.is_empty() {
            write!(f, "{mag}")?;
        } else if mag.is_one() {
            write!(f, "{}", mono.join("*"))?;
        } else {
            write!(f, "{mag}*{}", mono.join("*"))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}
