//! Volumes of divisor classes and the exponent of their decay towards the
//! boundary of the pseudoeffective cone.

use std::fmt;

use rayon::prelude::*;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::quadratic::QuadraticNumber;
use crate::scalar::{Scalar, Q};
use crate::weyl::{reduce_to_nef, DivisorClass, DEFAULT_MAX_ITER};

/// Top self-intersection of a nef class.
pub fn vol_nef<S: Scalar>(space: &AmbientSpace, v: &DivisorClass<S>) -> Result<S> {
    if v.len() != space.num_factors() {
        return Err(Error::DimensionMismatch {
            expected: space.num_factors(),
            got: v.len(),
        });
    }
    if !v.is_nef() {
        return Err(Error::NotNef);
    }
    Ok(space.volume_polynomial().eval(v.coords()))
}

/// Volume of an arbitrary class: move it into the nef cone, then evaluate.
/// Classes with a negative coordinate outside `J` along the way are outside
/// the movable cone and get volume 0.
pub fn vol<S: Scalar>(space: &AmbientSpace, v: &DivisorClass<S>, max_iter: usize) -> Result<S> {
    match reduce_to_nef(space, v, max_iter) {
        Ok((_, nef)) => vol_nef(space, &nef),
        Err(Error::NonJNegative(_)) => Ok(S::zero()),
        Err(e) => Err(e),
    }
}

/// Admissible decay exponent nearest to a fitted slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentClass {
    /// `k n / 2`.
    HalfMultiple {
        k: usize,
        n: usize,
    },
    /// `k n`.
    Multiple {
        k: usize,
        n: usize,
    },
    Unmatched,
}

impl ExponentClass {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ExponentClass::HalfMultiple { k, n } => Some((k * n) as f64 / 2.0),
            ExponentClass::Multiple { k, n } => Some((k * n) as f64),
            ExponentClass::Unmatched => None,
        }
    }
}

impl fmt::Display for ExponentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentClass::HalfMultiple { k, n } => write!(f, "kn/2 (k={k}, n={n})"),
            ExponentClass::Multiple { k, n } => write!(f, "kn (k={k}, n={n})"),
            ExponentClass::Unmatched => write!(f, "unmatched"),
        }
    }
}

/// Distance beyond which a slope is not attributed to any exponent.
pub const MATCH_TOLERANCE: f64 = 0.25;

/// `{kn/2 : k ∈ {1, |J|-1}} ∪ {kn : 1 <= k <= |J|-2}`.
pub fn admissible_exponents(n: usize, j_size: usize) -> Vec<ExponentClass> {
    let mut out = vec![ExponentClass::HalfMultiple { k: 1, n }];
    if j_size >= 2 && j_size - 1 != 1 {
        out.push(ExponentClass::HalfMultiple { k: j_size - 1, n });
    }
    for k in 1..j_size.saturating_sub(1) {
        out.push(ExponentClass::Multiple { k, n });
    }
    out
}

pub fn classify_slope(slope: f64, n: usize, j_size: usize) -> ExponentClass {
    admissible_exponents(n, j_size)
        .into_iter()
        .map(|c| (c, (c.value().expect("admissible") - slope).abs()))
        .filter(|(_, d)| *d <= MATCH_TOLERANCE)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(ExponentClass::Unmatched, |(c, _)| c)
}

/// Dyadic sample grid `s = 2^-m`, `m = m_lo..=m_hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleGrid {
    pub m_lo: u32,
    pub m_hi: u32,
    /// Number of smallest-`s` samples used in the fit.
    pub fit_last: usize,
    pub max_iter: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            m_lo: 8,
            m_hi: 20,
            fit_last: 8,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticReport {
    pub slope: f64,
    /// Largest absolute deviation of `log vol` from the fitted line, over
    /// the fitted samples.
    pub residual: f64,
    /// `(s, vol)` by decreasing `s`.
    pub samples: Vec<(f64, f64)>,
    pub fitted: usize,
    pub predicted_class: ExponentClass,
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept,
/// max |residual|)`.
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Samples `vol(p + 2^-m A)` and fits `log vol` against `log s`.
///
/// Everything up to the final polynomial value is exact in the quadratic
/// field of `p`; the volume is converted to binary64 only for the fit.
pub fn vol_asymptotic_exponent(
    space: &AmbientSpace,
    p: &DivisorClass<QuadraticNumber>,
    ample: &DivisorClass<Q>,
    grid: SampleGrid,
) -> Result<AsymptoticReport> {
    let l = space.num_factors();
    for w in [p.len(), ample.len()] {
        if w != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                got: w,
            });
        }
    }
    if let Some(k) = ample.coords().iter().position(|c| !Scalar::is_positive(c)) {
        return Err(Error::InvalidArgument(format!(
            "ample class needs positive coordinates; coordinate {} is not",
            k + 1
        )));
    }
    if grid.m_lo > grid.m_hi || grid.fit_last < 2 {
        return Err(Error::InvalidArgument(
            "sample grid is empty or too small to fit".into(),
        ));
    }
    let ms: Vec<u32> = (grid.m_lo..=grid.m_hi).collect();
    let lifted = DivisorClass::<QuadraticNumber>::from_rationals(ample.coords());
    let samples: Vec<(f64, f64)> = ms
        .par_iter()
        .map(|&m| {
            let s = Q::new(
                1.into(),
                num_traits::pow(num_bigint::BigInt::from(2), m as usize),
            );
            let point = p.add(&lifted.scale(&QuadraticNumber::from_q(s.clone())));
            let value = vol(space, &point, grid.max_iter)?;
            let s_f = Scalar::to_f64(&s);
            if !value.is_positive() {
                return Err(Error::ZeroVolumeSample(s_f));
            }
            Ok((s_f, value.approx()))
        })
        .collect::<Result<_>>()?;
    let fit_from = samples.len().saturating_sub(grid.fit_last);
    let logs: Vec<(f64, f64)> = samples[fit_from..]
        .iter()
        .map(|&(s, v)| (s.ln(), v.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two samples to fit".into(),
        ));
    }
    let (slope, _, residual) = fit_line(&logs);
    Ok(AsymptoticReport {
        slope,
        residual,
        fitted: logs.len(),
        predicted_class: classify_slope(slope, space.num_divisors(), space.j_set().len()),
        samples,
    })
}

/// The same estimate on the sub-ambient of the minimal factors, using only
/// the `J`-coordinates of `p` and `A`.
pub fn vol_asymptotic_via_restriction(
    space: &AmbientSpace,
    p: &DivisorClass<QuadraticNumber>,
    ample: &DivisorClass<Q>,
    grid: SampleGrid,
) -> Result<AsymptoticReport> {
    if space.is_full_j() {
        return vol_asymptotic_exponent(space, p, ample, grid);
    }
    let j = space.j_set();
    let sub = space.restrict_to(&j)?;
    let pick_p = DivisorClass::new(j.iter().map(|&k| p.coords()[k].clone()).collect());
    let pick_a = DivisorClass::new(j.iter().map(|&k| ample.coords()[k].clone()).collect());
    vol_asymptotic_exponent(&sub, &pick_p, &pick_a, grid)
}
