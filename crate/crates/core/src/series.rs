//! Slices of the word cones of `P^1 x P^1 x P^2` cut by `ax + by + z = k`,
//! the series `V(a, b, k)` of volume integrals over those slices, its
//! digamma closed form, and volumes of split projective bundles.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ambient::AmbientSpace;
use crate::digamma::digamma;
use crate::error::{Error, Result};
use crate::poly::VolumePolynomial;
use crate::summation::deterministic_sum;
use crate::volume::vol;
use crate::weyl::{DivisorClass, DEFAULT_MAX_ITER};
use crate::Q;

fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The plane `ax + by + z = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneSlice {
    pub a: Q,
    pub b: Q,
    pub k: Q,
}

impl PlaneSlice {
    pub fn new(a: Q, b: Q, k: Q) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::InvalidArgument(
                "plane level k must be positive".into(),
            ));
        }
        Ok(PlaneSlice { a, b, k })
    }

    /// `a g_1 + b g_2 + g_3`.
    pub fn value(&self, g: &[Q]) -> Q {
        &self.a * &g[0] + &self.b * &g[1] + &g[2]
    }
}

/// Generators `w(h_1), w(h_2), h_3` of the cone `w(Nef)` for the alternating
/// word `w = ι_1* ι_2* ι_1* ...` of length `m`.
pub fn word_cone_generators(m: usize) -> Result<[[i64; 3]; 3]> {
    if m < 2 {
        return Err(Error::LengthTooShort(m));
    }
    let n = (m / 2) as i64;
    let first = if m.is_multiple_of(2) {
        [-2 * n + 1, 2 * n, 6 * n * n - 3 * n]
    } else {
        [-2 * n - 1, 2 * n + 2, 6 * n * n + 9 * n + 3]
    };
    Ok([first, [-2 * n, 2 * n + 1, 6 * n * n + 3 * n], [0, 0, 1]])
}

/// A triangle in `N^1(X)` together with nef classes that map onto its
/// vertices under a single element of the reflection group. The volume at
/// an affine combination of the vertices is the polynomial evaluated at the
/// same combination of the preimages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceTriangle {
    pub vertices: [Vec<Q>; 3],
    pub preimages: [Vec<Q>; 3],
}

impl SliceTriangle {
    /// A triangle inside the nef cone (its own preimage).
    pub fn from_vertices(vertices: [Vec<Q>; 3]) -> Self {
        SliceTriangle {
            preimages: vertices.clone(),
            vertices,
        }
    }

    /// `|e_1 x e_2|` for `e_i = V_i - V_0`, in binary64.
    pub fn euclidean_area_element(&self) -> f64 {
        let e = |i: usize| -> Vec<f64> {
            (0..3)
                .map(|c| {
                    (&self.vertices[i][c] - &self.vertices[0][c])
                        .to_f64()
                        .unwrap_or(f64::NAN)
                })
                .collect()
        };
        let (u, v) = (e(1), e(2));
        let cross = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        cross.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Vertices affinely independent, decided exactly.
    pub fn is_degenerate(&self) -> bool {
        let d = |i: usize, c: usize| &self.vertices[i][c] - &self.vertices[0][c];
        (0..3).all(|c| {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            (d(1, a) * d(2, b) - d(1, b) * d(2, a)).is_zero()
        })
    }
}

/// Intersects the rays through `generators` with the plane; each generator
/// must meet it on the positive side. The triangle is taken to lie in the
/// nef cone; use [`word_cone_slice`] for word cones.
pub fn slice_triangle(generators: &[[i64; 3]; 3], plane: &PlaneSlice) -> Result<SliceTriangle> {
    Ok(SliceTriangle::from_vertices(
        slice_vertices(generators, plane)?.0,
    ))
}

fn slice_vertices(generators: &[[i64; 3]; 3], plane: &PlaneSlice) -> Result<([Vec<Q>; 3], [Q; 3])> {
    let mut vertices: [Vec<Q>; 3] = Default::default();
    let mut scales: [Q; 3] = Default::default();
    for (idx, g) in generators.iter().enumerate() {
        let g: Vec<Q> = g.iter().map(|&x| qi(x)).collect();
        let d = plane.value(&g);
        if !d.is_positive() {
            return Err(Error::NonTransverse(idx));
        }
        let t = &plane.k / d;
        vertices[idx] = g.iter().map(|x| x * &t).collect();
        scales[idx] = t;
    }
    Ok((vertices, scales))
}

/// Slice of `w(Nef)` for the alternating word of length `m`: vertex `j` is
/// `t_j w(h_j)`, so its nef preimage is `t_j h_j`.
pub fn word_cone_slice(m: usize, plane: &PlaneSlice) -> Result<SliceTriangle> {
    let gens = word_cone_generators(m)?;
    let (vertices, scales) = slice_vertices(&gens, plane)?;
    let preimages = std::array::from_fn(|j| {
        (0..3)
            .map(|c| if c == j { scales[j].clone() } else { Q::zero() })
            .collect()
    });
    Ok(SliceTriangle {
        vertices,
        preimages,
    })
}

/// Surface measure used for triangle integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// Two-dimensional Euclidean area on the plane.
    Euclidean,
    /// Lebesgue measure of the barycentric parameters `(λ_1, λ_2)` of the
    /// triangle; total mass 1/2 for every triangle.
    AffineParameter,
}

/// `∫ Π λ_i^{a_i} dλ_1 ... dλ_r` over the standard `r`-simplex, where
/// `λ_0 = 1 - λ_1 - ... - λ_r`: `Π a_i! / (Σ a_i + r)!`.
fn dirichlet_integral(exponents: &[u32]) -> Q {
    let r = exponents.len() as u32 - 1;
    let num = exponents
        .iter()
        .fold(BigInt::one(), |acc, &a| acc * factorial(a));
    let total: u32 = exponents.iter().sum();
    Q::new(num, factorial(total + r))
}

/// Exact integral of `poly(Σ λ_j P_j)` over the standard simplex in the
/// barycentric parameters, for points `P_0..P_r`.
fn simplex_polynomial_integral(poly: &VolumePolynomial, points: &[Vec<Q>]) -> Q {
    let nvars = poly.nvars();
    let map: Vec<Vec<Q>> = (0..nvars)
        .map(|c| points.iter().map(|p| p[c].clone()).collect())
        .collect();
    poly.compose_linear(&map)
        .terms()
        .fold(Q::zero(), |acc, (e, c)| acc + c * dirichlet_integral(e))
}

fn check_cubic(space: &AmbientSpace) -> Result<()> {
    if space.dim() != 3 || space.num_factors() != 3 {
        return Err(Error::UnsupportedDimension(space.dim()));
    }
    Ok(())
}

/// Exact integral of the volume over the triangle with respect to the
/// barycentric parameters.
pub fn triangle_parameter_integral(space: &AmbientSpace, tri: &SliceTriangle) -> Result<Q> {
    check_cubic(space)?;
    Ok(simplex_polynomial_integral(
        space.volume_polynomial(),
        &tri.preimages,
    ))
}

/// Integral of the volume over the triangle. The polynomial part is exact;
/// the Euclidean area element is applied in binary64.
pub fn integrate_vol_over_triangle(
    space: &AmbientSpace,
    tri: &SliceTriangle,
    measure: Measure,
) -> Result<f64> {
    check_cubic(space)?;
    let exact = triangle_parameter_integral(space, tri)?;
    let value = exact.to_f64().unwrap_or(f64::NAN);
    match measure {
        Measure::AffineParameter => {
            if tri.is_degenerate() {
                return Err(Error::DegenerateTriangle);
            }
            Ok(value)
        }
        Measure::Euclidean => Ok(value * tri.euclidean_area_element()),
    }
}

/// The two fractions of the `n`-th summand of `V(a, b, k)`, each already
/// multiplied by `k^3 / 10`.
pub fn series_summand_parts(n: u64, a: &Q, b: &Q, k: &Q) -> Result<(Q, Q)> {
    let nq = Q::from_integer(BigInt::from(n));
    let n2 = &nq * &nq * qi(3);
    let amb = a - b;
    let quarter = qr(1, 4);
    let half = qr(1, 2);
    let num1 = &n2 - &amb * &nq + a * &quarter + b * &quarter + qr(3, 8);
    let den_common = &n2 - (&amb - qr(3, 2)) * &nq + b * &half;
    let den1 = &n2 - (&amb + qr(3, 2)) * &nq + a * &half;
    let num2 = &n2 - (&amb - qi(3)) * &nq - a * &quarter + b * qr(3, 4) + qr(9, 8);
    let den2 = &n2 - (&amb - qr(9, 2)) * &nq - a * &half + b + qr(3, 2);
    if den_common.is_zero() || den1.is_zero() || den2.is_zero() {
        return Err(Error::PoleAtN(n));
    }
    let scale = k * k * k / qi(10);
    Ok((
        &scale * num1 / (&den_common * den1),
        &scale * num2 / (den_common * den2),
    ))
}

pub fn series_summand(n: u64, a: &Q, b: &Q, k: &Q) -> Result<Q> {
    let (x, y) = series_summand_parts(n, a, b, k)?;
    Ok(x + y)
}

/// Binary64 parameters for fast summation.
#[derive(Clone, Copy, Debug)]
struct FloatParams {
    a: f64,
    b: f64,
    k3: f64,
}

impl FloatParams {
    fn summand(&self, n: u64) -> f64 {
        let (a, b) = (self.a, self.b);
        let n = n as f64;
        let n2 = 3.0 * n * n;
        let amb = a - b;
        let num1 = n2 - amb * n + a / 4.0 + b / 4.0 + 0.375;
        let den_common = n2 - (amb - 1.5) * n + b / 2.0;
        let den1 = n2 - (amb + 1.5) * n + a / 2.0;
        let num2 = n2 - (amb - 3.0) * n - a / 4.0 + 0.75 * b + 1.125;
        let den2 = n2 - (amb - 4.5) * n - a / 2.0 + b + 1.5;
        self.k3 / 10.0 * (num1 / (den_common * den1) + num2 / (den_common * den2))
    }
}

/// Smallest `n` in `1..=last` at which a summand denominator vanishes.
fn first_pole(a: &Q, b: &Q, last: u64) -> Option<u64> {
    let amb = a - b;
    // Each denominator factor is 3n^2 + p n + q.
    let factors = [
        (-(&amb - qr(3, 2)), b * qr(1, 2)),
        (-(&amb + qr(3, 2)), a * qr(1, 2)),
        (-(&amb - qr(9, 2)), -(a * qr(1, 2)) + b + qr(3, 2)),
    ];
    let mut poles = Vec::new();
    for (p, q) in factors {
        let pf = p.to_f64().unwrap_or(f64::NAN);
        let qf = q.to_f64().unwrap_or(f64::NAN);
        let disc = pf * pf - 12.0 * qf;
        if disc < -1e-9 {
            continue;
        }
        let root = disc.max(0.0).sqrt();
        for r in [(-pf - root) / 6.0, (-pf + root) / 6.0] {
            for cand in [r.floor(), r.ceil()] {
                if cand < 1.0 || cand > last as f64 {
                    continue;
                }
                let n = Q::from_integer(BigInt::from(cand as u64));
                if (qi(3) * &n * &n + &p * &n + &q).is_zero() {
                    poles.push(cand as u64);
                }
            }
        }
    }
    poles.into_iter().min()
}

/// Partial sum, closed form and the quantities they are built from. Fields
/// are filled by whichever computation produced the value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeriesResult {
    pub partial_sum: Option<f64>,
    pub terms: Option<u64>,
    pub tail_bound: Option<f64>,
    pub closed_form: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// `1/2 - β, 1/2 - α, 1 - β, 1 - α`.
    pub digamma_arguments: Option<[f64; 4]>,
    /// Coefficient of the digamma combination and the rational constant.
    pub digamma_coefficient: Option<f64>,
    pub constant_term: Option<f64>,
}

impl SeriesResult {
    pub fn merge(mut self, other: SeriesResult) -> SeriesResult {
        macro_rules! take {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = other.$f; } )* };
        }
        take!(
            partial_sum,
            terms,
            tail_bound,
            closed_form,
            alpha,
            beta,
            digamma_arguments,
            digamma_coefficient,
            constant_term
        );
        self
    }
}

/// `Σ_{n=1}^{N}` of the summand with compensated, schedule-independent
/// summation, and the tail majorant `C / N` where
/// `C = max_{n ∈ [max(N,2), 2N]} n^2 |t_n| n / (n - 1)`.
pub fn series_partial_sum(terms: u64, a: &Q, b: &Q, k: &Q) -> Result<SeriesResult> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    if let Some(n) = first_pole(a, b, 2 * terms) {
        return Err(Error::PoleAtN(n));
    }
    let params = FloatParams {
        a: a.to_f64().unwrap_or(f64::NAN),
        b: b.to_f64().unwrap_or(f64::NAN),
        k3: (k * k * k).to_f64().unwrap_or(f64::NAN),
    };
    let partial = deterministic_sum(1, terms + 1, |n| params.summand(n));
    let lo = terms.max(2);
    let sup = (lo..=2 * terms)
        .into_par_iter()
        .map(|n| {
            let nf = n as f64;
            nf * nf * params.summand(n).abs() * nf / (nf - 1.0)
        })
        .reduce(|| 0.0, f64::max);
    Ok(SeriesResult {
        partial_sum: Some(partial),
        terms: Some(terms),
        tail_bound: Some(sup / terms as f64),
        ..Default::default()
    })
}

/// Closed form of `V(a, b, k)` through the digamma function, with
/// `α > β` the roots of `3x^2 - (a - b - 3/2) x + b/2`.
pub fn v_closed_form(a: &Q, b: &Q, k: &Q) -> Result<SeriesResult> {
    let degenerate = |what: &str| Error::DegenerateParameters(what.to_string());
    let af = a.to_f64().unwrap_or(f64::NAN);
    let bf = b.to_f64().unwrap_or(f64::NAN);
    let k3 = (k * k * k).to_f64().unwrap_or(f64::NAN);
    let p = a - b - qr(3, 2);
    let disc = &p * &p - qi(6) * b;
    if !disc.is_positive() {
        return Err(degenerate("discriminant (a-b-3/2)^2 - 6b"));
    }
    let quad = a * a + b * b - qi(2) * a * b - qi(3) * a - qi(3) * b;
    if quad.is_zero() {
        return Err(degenerate("a^2+b^2-2ab-3a-3b"));
    }
    let lin = a - qi(2) * b - qi(3);
    if lin.is_zero() {
        return Err(degenerate("a-2b-3"));
    }
    let pf = p.to_f64().unwrap_or(f64::NAN);
    let root = disc.to_f64().unwrap_or(f64::NAN).sqrt();
    let alpha = (pf + root) / 6.0;
    // β = (p - √disc)/6 = b / (6 α) avoids cancellation when p > 0.
    let beta = if pf > 0.0 {
        bf / 2.0 / (3.0 * alpha)
    } else {
        (pf - root) / 6.0
    };
    let diff = root / 3.0;
    let quad_f = quad.to_f64().unwrap_or(f64::NAN);
    let args = [0.5 - beta, 0.5 - alpha, 1.0 - beta, 1.0 - alpha];
    if let Some(bad) = args.iter().find(|x| **x <= 0.0) {
        return Err(Error::DegenerateParameters(format!(
            "digamma argument {bad} (needs alpha < 1/2)"
        )));
    }
    let psi: Vec<f64> = args.iter().map(|&x| digamma(x)).collect::<Result<_>>()?;
    let combination = psi[0] - psi[1] + psi[2] - psi[3];
    let num1 = 4.0 * af * af + 4.0 * bf * bf - 8.0 * af * bf - 12.0 * af - 12.0 * bf - 9.0;
    let coefficient = k3 * num1 / (120.0 * diff * quad_f);
    let num2 = (qi(2) * a * a + qi(2) * b * b - qi(4) * a * b - qi(3) * a - qi(9) * b - qi(18))
        * (k * k * k);
    let constant = (num2 / (qi(20) * lin * quad)).to_f64().unwrap_or(f64::NAN);
    Ok(SeriesResult {
        closed_form: Some(coefficient * combination + constant),
        alpha: Some(alpha),
        beta: Some(beta),
        digamma_arguments: Some(args),
        digamma_coefficient: Some(coefficient),
        constant_term: Some(constant),
        ..Default::default()
    })
}

/// Numerical estimate of a projective-bundle volume.
#[derive(Clone, Debug, PartialEq)]
pub struct Bn16Estimate {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn bn16_prefactor(space: &AmbientSpace, r: usize) -> Q {
    let v = space.dim() as u32;
    Q::new(factorial(v + r as u32), factorial(v))
}

fn check_divisors(space: &AmbientSpace, divisors: &[DivisorClass<Q>]) -> Result<()> {
    if divisors.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one divisor A_0".into(),
        ));
    }
    for d in divisors {
        if d.len() != space.num_factors() {
            return Err(Error::DimensionMismatch {
                expected: space.num_factors(),
                got: d.len(),
            });
        }
    }
    Ok(())
}

/// `(d!/v!) ∫ vol(Σ λ_i A_i) dλ_1..dλ_r` over the simplex, exactly. Every
/// `A_i` must be nef so that the integrand is one polynomial.
pub fn bn16_bundle_volume_exact(space: &AmbientSpace, divisors: &[DivisorClass<Q>]) -> Result<Q> {
    check_divisors(space, divisors)?;
    if divisors.iter().any(|d| !d.is_nef()) {
        return Err(Error::NotNef);
    }
    let points: Vec<Vec<Q>> = divisors.iter().map(|d| d.coords().to_vec()).collect();
    let integral = simplex_polynomial_integral(space.volume_polynomial(), &points);
    Ok(bn16_prefactor(space, divisors.len() - 1) * integral)
}

/// Centroids of the Kuhn simplices of mesh `1/N` inside
/// `{0 <= y_1 <= ... <= y_r <= 1}`, as integer numerators over `(r+1) N`.
fn kuhn_centroids(r: usize, n: usize) -> Vec<Vec<usize>> {
    let perms = permutations(r);
    let mut out = Vec::new();
    let mut cell = vec![0usize; r];
    loop {
        if cell.windows(2).all(|w| w[0] <= w[1]) {
            for perm in &perms {
                // perm[t] is the axis that increases at step t.
                let mut y = vec![0usize; r];
                for (t, &axis) in perm.iter().enumerate() {
                    y[axis] = cell[axis] * (r + 1) + (r - t);
                }
                if y.windows(2).all(|w| w[0] < w[1]) {
                    out.push(y);
                }
            }
        }
        // Next cell in [0, n)^r.
        let mut pos = 0;
        loop {
            if pos == r {
                return out;
            }
            cell[pos] += 1;
            if cell[pos] < n {
                break;
            }
            cell[pos] = 0;
            pos += 1;
        }
    }
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(r - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, r - 1);
            out.push(q);
        }
    }
    out
}

/// Centroid-rule estimate of the simplex integral on mesh `1/N`.
fn bn16_centroid_rule(
    space: &AmbientSpace,
    points: &[Vec<f64>],
    n: usize,
    max_iter: usize,
) -> Result<(f64, usize)> {
    let r = points.len() - 1;
    let centroids = kuhn_centroids(r, n);
    let denom = ((r + 1) * n) as f64;
    let piece_volume =
        1.0 / (factorial(r as u32).to_f64().unwrap_or(f64::NAN) * (n as f64).powi(r as i32));
    let l = space.num_factors();
    let values: Vec<f64> = centroids
        .par_iter()
        .map(|y| {
            // λ_0 = 1 - y_r, λ_i = y_i - y_{i-1}.
            let mut lambda = vec![0.0; r + 1];
            let mut prev = 0.0;
            for i in 0..r {
                let yi = y[i] as f64 / denom;
                lambda[i + 1] = yi - prev;
                prev = yi;
            }
            lambda[0] = 1.0 - prev;
            let coords: Vec<f64> = (0..l)
                .map(|c| (0..=r).map(|i| lambda[i] * points[i][c]).sum())
                .collect();
            vol(space, &DivisorClass::new(coords), max_iter)
        })
        .collect::<Result<_>>()?;
    let sum: f64 = values.iter().sum();
    Ok((sum * piece_volume, values.len()))
}

/// `(d!/v!) ∫ vol(Σ λ_i A_i)` by centroid rules on successively refined
/// Kuhn subdivisions of the simplex with Richardson extrapolation. Meshes
/// are refined while the next one fits in `budget` evaluations.
pub fn bn16_bundle_volume(
    space: &AmbientSpace,
    divisors: &[DivisorClass<Q>],
    budget: usize,
) -> Result<Bn16Estimate> {
    check_divisors(space, divisors)?;
    let r = divisors.len() - 1;
    let prefactor = bn16_prefactor(space, r).to_f64().unwrap_or(f64::NAN);
    let points: Vec<Vec<f64>> = divisors
        .iter()
        .map(|d| {
            d.coords()
                .iter()
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    if r == 0 {
        let value = vol(
            space,
            &DivisorClass::new(points[0].clone()),
            DEFAULT_MAX_ITER,
        )?;
        return Ok(Bn16Estimate {
            value: prefactor * value,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    // The mesh-N rule evaluates exactly N^r pieces.
    let pieces = |n: usize| n.saturating_pow(r as u32);
    let mut evaluations = 0;
    let mut rules: Vec<f64> = Vec::new();
    let mut n = 1;
    loop {
        let (q, used) = bn16_centroid_rule(space, &points, n, DEFAULT_MAX_ITER)?;
        evaluations += used;
        rules.push(q);
        if evaluations + pieces(2 * n) > budget {
            break;
        }
        n *= 2;
    }
    let richardson: Vec<f64> = rules
        .windows(2)
        .map(|w| (4.0 * w[1] - w[0]) / 3.0)
        .collect();
    let (value, error) = match richardson.as_slice() {
        [] => (rules[0], f64::INFINITY),
        [only] => (*only, (rules[1] - rules[0]).abs() / 3.0),
        [.., prev, last] => (*last, (last - prev).abs()),
    };
    Ok(Bn16Estimate {
        value: prefactor * value,
        error_estimate: prefactor * error,
        evaluations,
    })
}
