//! Chamber geometry: the nef cone, the fundamental cone `F = A ∩ C`, the
//! expanding eigenvectors of rank-2 products, and boundary classes of the
//! pseudoeffective cone.

use num_bigint::BigInt;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::lorentz::GramMatrix;
use crate::matrix::QMatrix;
use crate::quadratic::QuadraticNumber;
use crate::scalar::{Scalar, Q};
use crate::weyl::{
    apply_word, dual_root_class, involution_matrix, pairing_full, require_full_j, DivisorClass,
    Word,
};

/// Closed cone spanned by linearly independent classes.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialCone {
    generators: Vec<DivisorClass<Q>>,
    inverse: QMatrix,
}

impl SimplicialCone {
    pub fn new(generators: Vec<DivisorClass<Q>>) -> Result<Self> {
        let l = generators.len();
        if generators.iter().any(|g| g.len() != l) {
            return Err(Error::InvalidArgument(
                "a simplicial cone needs as many generators as coordinates".into(),
            ));
        }
        // Columns are the generators.
        let m = QMatrix::from_fn(l, l, |i, j| generators[j].coords()[i].clone());
        let inverse = m.inverse().ok_or_else(|| {
            Error::InvalidArgument("cone generators are linearly dependent".into())
        })?;
        Ok(SimplicialCone {
            generators,
            inverse,
        })
    }

    pub fn generators(&self) -> &[DivisorClass<Q>] {
        &self.generators
    }

    /// Coefficients of `v` in the generators.
    pub fn coefficients(&self, v: &DivisorClass<Q>) -> Vec<Q> {
        self.inverse.apply(v.coords())
    }

    pub fn contains(&self, v: &DivisorClass<Q>) -> bool {
        self.coefficients(v).iter().all(|c| !Scalar::is_negative(c))
    }
}

/// The cone on `h_1, ..., h_l`.
pub fn nef_cone(space: &AmbientSpace) -> SimplicialCone {
    let l = space.num_factors();
    SimplicialCone::new((0..l).map(|i| DivisorClass::basis(l, i)).collect())
        .expect("standard basis is independent")
}

/// An extremal ray `ω_{î j} = (b_ij / 2) α_i + α_j` of the fundamental cone.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalRay {
    pub i: usize,
    pub j: usize,
    pub class: DivisorClass<Q>,
}

/// `b_ij` with the convention `b_ii = -2`.
fn b_or_minus_two(space: &AmbientSpace, i: usize, j: usize) -> Result<Q> {
    if i == j {
        return Ok(Q::from_integer((-2).into()));
    }
    Ok(Q::from_integer(space.b_coefficient(i, j)?.into()))
}

pub fn omega(
    space: &AmbientSpace,
    gram: &GramMatrix,
    i: usize,
    j: usize,
) -> Result<DivisorClass<Q>> {
    let half = Q::new(1.into(), 2.into());
    let ai = dual_root_class::<Q>(space, gram, i)?;
    let aj = dual_root_class::<Q>(space, gram, j)?;
    Ok(ai.scale(&(b_or_minus_two(space, i, j)? * half)).add(&aj))
}

/// All `l(l-1)` rays `ω_{î j}`, `i != j`, in lexicographic order.
pub fn fundamental_extremal_rays(
    space: &AmbientSpace,
    gram: &GramMatrix,
) -> Result<Vec<ExtremalRay>> {
    require_full_j(space)?;
    let l = space.num_factors();
    if l < 2 {
        return Err(Error::InvalidArgument("need at least two factors".into()));
    }
    let mut rays = Vec::with_capacity(l * (l - 1));
    for i in 0..l {
        for j in (0..l).filter(|&j| j != i) {
            rays.push(ExtremalRay {
                i,
                j,
                class: omega(space, gram, i, j)?,
            });
        }
    }
    Ok(rays)
}

/// Closed form for `<ω_{î j}, ω_{k̂ m}>`:
/// `(b_ij/2)(b_km/2)(b_ik/2) + (b_ij/2)(b_im/2) + (b_km/2)(b_kj/2) + b_jm/2`,
/// with `b_ii = -2`.
pub fn omega_pairing_closed_form(
    space: &AmbientSpace,
    (i, j): (usize, usize),
    (k, m): (usize, usize),
) -> Result<Q> {
    let half = Q::new(1.into(), 2.into());
    let c = |a: usize, b: usize| b_or_minus_two(space, a, b).map(|x| x * &half);
    Ok(c(i, j)? * c(k, m)? * c(i, k)? + c(i, j)? * c(i, m)? + c(k, m)? * c(k, j)? + c(j, m)?)
}

/// Membership in `F = A ∩ C`, where `A` is the nef cone and
/// `C = { v : <v, h_i> >= 0 for all i }`.
pub fn in_fundamental_cone<S: Scalar>(
    space: &AmbientSpace,
    gram: &GramMatrix,
    v: &DivisorClass<S>,
) -> Result<bool> {
    require_full_j(space)?;
    if !v.is_nef() {
        return Ok(false);
    }
    let l = space.num_factors();
    for i in 0..l {
        let h = DivisorClass::<S>::basis(l, i);
        if pairing_full(space, gram, v, &h)?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Expanding eigenpair of `ι_i* ι_j*` in binary64.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: DivisorClass<f64>,
    pub pair: (usize, usize),
}

/// The same eigenpair, exactly, in `Q(√(b^2 - 4))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactEigenPair {
    pub lambda: QuadraticNumber,
    pub vector: DivisorClass<QuadraticNumber>,
    pub pair: (usize, usize),
}

impl ExactEigenPair {
    pub fn to_f64(&self) -> EigenPair {
        EigenPair {
            lambda: self.lambda.approx(),
            vector: self.vector.to_f64(),
            pair: self.pair,
        }
    }
}

/// Matrix of `ι_i* ι_j*` (so `ι_j*` acts first).
pub fn coxeter_pair_matrix(space: &AmbientSpace, i: usize, j: usize) -> Result<QMatrix> {
    Ok(involution_matrix(space, i)?.mul(&involution_matrix(space, j)?))
}

/// `λ = ((b^2 - 2) + b√(b^2 - 4)) / 2` and its eigenvector, exact.
///
/// On the `(h_i, h_j)` block the eigenvector is `(C_ij, λ - C_ii)`; every
/// other coordinate is fixed by `C` up to a multiple of the block, which
/// gives `v_k = (C_ki u_i + C_kj u_j) / (λ - 1)`. The vector is scaled so its
/// last nonzero coordinate is 1.
pub fn coxeter_pair_eigen_exact(
    space: &AmbientSpace,
    i: usize,
    j: usize,
) -> Result<ExactEigenPair> {
    space.check_index(i)?;
    space.check_index(j)?;
    if i == j {
        return Err(Error::InvalidArgument("pair indices must differ".into()));
    }
    for k in [i, j] {
        if !space.in_j(k) {
            return Err(Error::NotInJ(k));
        }
    }
    let b = space.b_coefficient(i, j)?;
    if b <= 2 {
        return Err(Error::EllipticPair { i, j, b });
    }
    let bq = Q::from_integer(b.into());
    let half = Q::new(1.into(), 2.into());
    let lambda = QuadraticNumber::new(
        (&bq * &bq - Q::from_integer(2.into())) * &half,
        &bq * &half,
        BigInt::from(b * b - 4),
    );
    let c = coxeter_pair_matrix(space, i, j)?;
    let lift = |x: &Q| QuadraticNumber::from_q(x.clone());
    let ui = lift(&c[(i, j)]);
    let uj = lambda.clone() - lift(&c[(i, i)]);
    let denom = lambda.clone() - QuadraticNumber::from_q(Q::from_integer(1.into()));
    let l = space.num_factors();
    let mut coords: Vec<QuadraticNumber> = (0..l)
        .map(|k| {
            if k == i {
                ui.clone()
            } else if k == j {
                uj.clone()
            } else {
                (lift(&c[(k, i)]) * ui.clone() + lift(&c[(k, j)]) * uj.clone()) / denom.clone()
            }
        })
        .collect();
    let last = coords
        .iter()
        .rev()
        .find(|x| !Scalar::is_zero(*x))
        .cloned()
        .expect("eigenvector is nonzero");
    for x in &mut coords {
        *x = x.clone() / last.clone();
    }
    Ok(ExactEigenPair {
        lambda,
        vector: DivisorClass::new(coords),
        pair: (i, j),
    })
}

pub fn coxeter_pair_eigen(space: &AmbientSpace, i: usize, j: usize) -> Result<EigenPair> {
    coxeter_pair_eigen_exact(space, i, j).map(|e| e.to_f64())
}

/// `(ι_i* ι_j*)^m · base` for `m = 1..steps`, each rescaled to coordinate
/// sum 1.
pub fn limit_root_iterate(
    space: &AmbientSpace,
    i: usize,
    j: usize,
    base: &DivisorClass<f64>,
    steps: usize,
) -> Result<Vec<DivisorClass<f64>>> {
    let word = Word::new(vec![i, j])?;
    let mut current = base.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = apply_word(space, &word, &current)?;
        let sum: f64 = next.coords().iter().sum();
        if sum == 0.0 || !sum.is_finite() {
            return Err(Error::InvalidArgument(
                "iterate has zero coordinate sum; cannot normalize".into(),
            ));
        }
        current = next.scale(&(1.0 / sum));
        out.push(current.clone());
    }
    Ok(out)
}

/// Boundary classes of the pseudoeffective cone.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCase {
    /// `Σ_{k != omitted} a_k h_k`; `coeffs` lists `a_k` for `k != omitted`
    /// in increasing `k`.
    Face { omitted: usize, coeffs: Vec<Q> },
    /// `a_λ v_λ + Σ_{k != i,j} a_k h_k`, with `v_λ` the expanding
    /// eigenvector of `ι_i* ι_j*`.
    Lambda {
        i: usize,
        j: usize,
        a_lambda: Q,
        coeffs: Vec<Q>,
    },
    /// `w` applied to an inner boundary class.
    Pushed {
        word: Word,
        inner: Box<BoundaryCase>,
    },
}

pub fn make_boundary_point(
    space: &AmbientSpace,
    case: &BoundaryCase,
) -> Result<DivisorClass<QuadraticNumber>> {
    let l = space.num_factors();
    let lift = |x: &Q| QuadraticNumber::from_q(x.clone());
    let fill = |skip: &[usize], coeffs: &[Q]| -> Result<Vec<QuadraticNumber>> {
        let free: Vec<usize> = (0..l).filter(|k| !skip.contains(k)).collect();
        if coeffs.len() != free.len() {
            return Err(Error::DimensionMismatch {
                expected: free.len(),
                got: coeffs.len(),
            });
        }
        let mut out = vec![<QuadraticNumber as Scalar>::zero(); l];
        for (pos, (&k, a)) in free.iter().zip(coeffs).enumerate() {
            if Scalar::is_negative(a) {
                return Err(Error::NegativeCoefficient(pos));
            }
            out[k] = lift(a);
        }
        Ok(out)
    };
    match case {
        BoundaryCase::Face { omitted, coeffs } => {
            space.check_index(*omitted)?;
            Ok(DivisorClass::new(fill(&[*omitted], coeffs)?))
        }
        BoundaryCase::Lambda {
            i,
            j,
            a_lambda,
            coeffs,
        } => {
            if Scalar::is_negative(a_lambda) {
                return Err(Error::NegativeCoefficient(0));
            }
            let eigen = coxeter_pair_eigen_exact(space, *i, *j)?;
            let rest = DivisorClass::new(fill(&[*i, *j], coeffs)?);
            Ok(eigen.vector.scale(&lift(a_lambda)).add(&rest))
        }
        BoundaryCase::Pushed { word, inner } => {
            let p = make_boundary_point(space, inner)?;
            apply_word(space, word, &p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::fixtures::*;
    use crate::lorentz::gram_from_ambient;
    use crate::scalar::{q, qi};

    fn qn(a: Q, b: Q, d: i64) -> QuadraticNumber {
        QuadraticNumber::new(a, b, BigInt::from(d))
    }

    #[test]
    fn nef_cone_membership() {
        let c = nef_cone(&p112());
        assert_eq!(c.generators().len(), 3);
        assert!(c.contains(&DivisorClass::new(vec![qi(1), qi(1), qi(1)])));
        assert!(!c.contains(&DivisorClass::new(vec![qi(-1), qi(3), qi(4)])));
    }

    #[test]
    fn eigenpair_of_p333() {
        let s = p333();
        let e = coxeter_pair_eigen_exact(&s, 0, 1).unwrap();
        assert_eq!(e.lambda, qn(q(47, 2), q(21, 2), 5));
        let v = e.vector.coords();
        assert_eq!(v[0], qn(q(5, 14), q(-3, 14), 5));
        assert_eq!(v[1], qn(q(5, 14), q(3, 14), 5));
        assert_eq!(v[2], QuadraticNumber::from_q(qi(1)));
        // C v = λ v exactly.
        let c = coxeter_pair_matrix(&s, 0, 1).unwrap();
        let cv = c.apply(v);
        for (a, b) in cv.iter().zip(v) {
            assert_eq!(a.clone(), e.lambda.clone() * b.clone());
        }
        let g = gram_from_ambient(&s).unwrap();
        let iso = pairing_full(&s, &g, &e.vector, &e.vector).unwrap();
        assert!(Scalar::is_zero(&iso));

        let f = coxeter_pair_eigen(&s, 0, 1).unwrap();
        assert!((f.lambda - 46.978_713_763_747_79).abs() < 1e-10);
        assert!((f.lambda + 1.0 / f.lambda - 47.0).abs() < 1e-9);
        assert!(matches!(
            coxeter_pair_eigen(&p112(), 0, 1),
            Err(Error::EllipticPair { b: 2, .. })
        ));
    }

    #[test]
    fn omega_rays() {
        let s = p333();
        let g = gram_from_ambient(&s).unwrap();
        let rays = fundamental_extremal_rays(&s, &g).unwrap();
        assert_eq!(rays.len(), 6);
        for r in &rays {
            let c = r.class.coords();
            for (k, x) in c.iter().enumerate() {
                if k == r.i {
                    assert_eq!(*x, qi(0));
                } else {
                    assert!(*x > qi(0));
                }
            }
            assert!(in_fundamental_cone(&s, &g, &r.class).unwrap());
            let ai = dual_root_class::<Q>(&s, &g, r.i).unwrap();
            assert_eq!(pairing_full(&s, &g, &r.class, &ai).unwrap(), qi(0));
            for other in &rays {
                let direct = pairing_full(&s, &g, &r.class, &other.class).unwrap();
                let closed = omega_pairing_closed_form(&s, (r.i, r.j), (other.i, other.j)).unwrap();
                assert_eq!(direct, closed);
            }
        }
    }

    #[test]
    fn fundamental_cone_membership() {
        let s = p333();
        let g = gram_from_ambient(&s).unwrap();
        let ones = DivisorClass::<Q>::ones(3);
        assert!(in_fundamental_cone(&s, &g, &ones).unwrap());
        assert!(!in_fundamental_cone(&s, &g, &DivisorClass::<Q>::basis(3, 0)).unwrap());
        assert!(!in_fundamental_cone(&s, &g, &ones.scale(&qi(-1))).unwrap());
        let t = p112();
        let gt = gram_from_ambient(&t).unwrap();
        assert_eq!(in_fundamental_cone(&t, &gt, &ones), Err(Error::NotFullJ));
    }

    #[test]
    fn limit_roots_converge() {
        let s = p333();
        let g = gram_from_ambient(&s).unwrap();
        let e = coxeter_pair_eigen(&s, 0, 1).unwrap();
        let target: f64 = e.vector.coords().iter().sum();
        let target: Vec<f64> = e.vector.coords().iter().map(|x| x / target).collect();
        let seq =
            limit_root_iterate(&s, 0, 1, &DivisorClass::new(vec![1.0, 1.0, 1.0]), 20).unwrap();
        let dist = |v: &DivisorClass<f64>| {
            v.coords()
                .iter()
                .zip(&target)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        assert!(dist(&seq[11]) < 1e-8);
        let last = &seq[19];
        assert!(pairing_full(&s, &g, last, last).unwrap().abs() < 1e-6);
        let fixed = limit_root_iterate(&s, 0, 1, &DivisorClass::new(target.clone()), 3).unwrap();
        assert!(fixed.iter().all(|v| dist(v) < 1e-12));
    }

    #[test]
    fn boundary_points() {
        let s = p333();
        let h3 = make_boundary_point(
            &s,
            &BoundaryCase::Face {
                omitted: 0,
                coeffs: vec![qi(0), qi(1)],
            },
        )
        .unwrap();
        assert_eq!(h3.to_f64().coords(), &[0.0, 0.0, 1.0]);
        let v = make_boundary_point(
            &s,
            &BoundaryCase::Lambda {
                i: 0,
                j: 1,
                a_lambda: qi(1),
                coeffs: vec![qi(0)],
            },
        )
        .unwrap();
        let exact = coxeter_pair_eigen_exact(&s, 0, 1).unwrap();
        assert_eq!(v, exact.vector);
        let mixed = make_boundary_point(
            &s,
            &BoundaryCase::Lambda {
                i: 0,
                j: 1,
                a_lambda: qi(1),
                coeffs: vec![qi(1)],
            },
        )
        .unwrap();
        assert_eq!(mixed.coords()[2], QuadraticNumber::from_q(qi(2)));
        assert_eq!(
            make_boundary_point(
                &s,
                &BoundaryCase::Face {
                    omitted: 2,
                    coeffs: vec![qi(1), qi(-1)],
                },
            ),
            Err(Error::NegativeCoefficient(1))
        );
        let pushed = make_boundary_point(
            &s,
            &BoundaryCase::Pushed {
                word: Word::new(vec![2]).unwrap(),
                inner: Box::new(BoundaryCase::Face {
                    omitted: 0,
                    coeffs: vec![qi(0), qi(1)],
                }),
            },
        )
        .unwrap();
        assert_eq!(pushed.to_f64().coords(), &[7.0, 7.0, -1.0]);
    }
}
