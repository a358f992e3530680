//! The group generated by the involutions `ι_j*`, acting on divisor classes.

use std::fmt;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::lorentz::GramMatrix;
use crate::matrix::QMatrix;
use crate::scalar::{Scalar, Q};

/// Default cap on reflections applied by [`reduce_to_nef`].
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// A reduced word in the generators; letters are 0-based factor indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    /// Fails with `UnreducedWord(p)` when letters `p` and `p + 1` coincide.
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if let Some(p) = letters.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::UnreducedWord(p));
        }
        Ok(Word { letters })
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The alternating word `i j i j ...` of length `m`.
    pub fn alternating(i: usize, j: usize, m: usize) -> Result<Self> {
        Word::new((0..m).map(|k| if k % 2 == 0 { i } else { j }).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Coordinates of a divisor class in the basis `h_1..h_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorClass<S> {
    coords: Vec<S>,
}

impl<S: Scalar> DivisorClass<S> {
    pub fn new(coords: Vec<S>) -> Self {
        DivisorClass { coords }
    }

    pub fn from_rationals(coords: &[Q]) -> Self {
        DivisorClass::new(coords.iter().map(S::from_rational).collect())
    }

    pub fn zero(l: usize) -> Self {
        DivisorClass::new(vec![S::zero(); l])
    }

    /// `h_i`.
    pub fn basis(l: usize, i: usize) -> Self {
        let mut v = Self::zero(l);
        v.coords[i] = S::one();
        v
    }

    /// `h_1 + ... + h_l`.
    pub fn ones(l: usize) -> Self {
        DivisorClass::new(vec![S::one(); l])
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        DivisorClass::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        DivisorClass::new(self.coords.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn to_f64(&self) -> DivisorClass<f64> {
        DivisorClass::new(self.coords.iter().map(Scalar::to_f64).collect())
    }

    /// All coordinates non-negative (the nef cone is simplicial on the `h_i`).
    pub fn is_nef(&self) -> bool {
        self.coords.iter().all(|c| !c.is_negative())
    }

    fn check_len(&self, space: &AmbientSpace) -> Result<()> {
        if self.len() != space.num_factors() {
            return Err(Error::DimensionMismatch {
                expected: space.num_factors(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for DivisorClass<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Matrix of `ι_j*`: identity except column `j`, which is `-1` on the
/// diagonal and `b_ij` elsewhere.
pub fn involution_matrix(space: &AmbientSpace, j: usize) -> Result<QMatrix> {
    space.check_index(j)?;
    if !space.in_j(j) {
        return Err(Error::NotInJ(j));
    }
    let l = space.num_factors();
    let mut m = QMatrix::identity(l);
    m[(j, j)] = -Q::from_integer(1.into());
    for i in (0..l).filter(|&i| i != j) {
        m[(i, j)] = Q::from_integer(space.b_coefficient(i, j)?.into());
    }
    Ok(m)
}

/// Applies `ι_j*` in place without building the matrix.
fn reflect<S: Scalar>(column: &[S], j: usize, v: &mut [S]) {
    let vj = v[j].clone();
    for (i, c) in column.iter().enumerate() {
        if i == j {
            v[i] = -vj.clone();
        } else if !c.is_zero() {
            v[i] = v[i].clone() + c.clone() * vj.clone();
        }
    }
}

/// Column `j` of every generator matrix, converted once.
fn generator_columns<S: Scalar>(space: &AmbientSpace) -> Result<Vec<Option<Vec<S>>>> {
    (0..space.num_factors())
        .map(|j| {
            if !space.in_j(j) || space.num_factors() == 1 {
                return Ok(None);
            }
            let m = involution_matrix(space, j)?;
            Ok(Some(
                (0..m.rows())
                    .map(|i| S::from_rational(&m[(i, j)]))
                    .collect(),
            ))
        })
        .collect()
}

/// `w · v = ι_{w_1}* ··· ι_{w_m}* v` (the last letter acts first).
pub fn apply_word<S: Scalar>(
    space: &AmbientSpace,
    w: &Word,
    v: &DivisorClass<S>,
) -> Result<DivisorClass<S>> {
    v.check_len(space)?;
    let mut columns: Vec<Option<Vec<S>>> = vec![None; space.num_factors()];
    let mut out = v.coords.clone();
    for &j in w.letters().iter().rev() {
        space.check_index(j)?;
        if columns[j].is_none() {
            let m = involution_matrix(space, j)?;
            columns[j] = Some(
                (0..m.rows())
                    .map(|i| S::from_rational(&m[(i, j)]))
                    .collect(),
            );
        }
        reflect(columns[j].as_ref().expect("filled"), j, &mut out);
    }
    Ok(DivisorClass::new(out))
}

/// Moves `v` into the nef cone by repeatedly reflecting in the smallest
/// `j ∈ J` with a negative coordinate.
///
/// Returns `(w, v')` with `v' = apply_word(w, v)` nef. Fails with
/// `NonJNegative` as soon as a coordinate outside `J` is negative, and with
/// `IterationLimit` after `max_iter` reflections.
pub fn reduce_to_nef<S: Scalar>(
    space: &AmbientSpace,
    v: &DivisorClass<S>,
    max_iter: usize,
) -> Result<(Word, DivisorClass<S>)> {
    v.check_len(space)?;
    let columns = generator_columns::<S>(space)?;
    let j_set = space.j_set();
    let mut current = v.coords.clone();
    let mut applied = Vec::new();
    loop {
        if let Some(i) = (0..current.len()).find(|&i| !space.in_j(i) && current[i].is_negative()) {
            return Err(Error::NonJNegative(i));
        }
        let Some(&j) = j_set.iter().find(|&&j| current[j].is_negative()) else {
            break;
        };
        if applied.len() == max_iter {
            return Err(Error::IterationLimit(max_iter));
        }
        match &columns[j] {
            Some(col) => reflect(col, j, &mut current),
            // A single factor has no involutions; a negative class there is
            // simply not nef.
            None => return Err(Error::NonJNegative(j)),
        }
        applied.push(j);
    }
    applied.reverse();
    Ok((Word { letters: applied }, DivisorClass::new(current)))
}

pub(crate) fn require_full_j(space: &AmbientSpace) -> Result<()> {
    if space.is_full_j() {
        Ok(())
    } else {
        Err(Error::NotFullJ)
    }
}

/// `<u, v>` on the whole of `N^1(X)`; requires every factor to be minimal.
pub fn pairing_full<S: Scalar>(
    space: &AmbientSpace,
    gram: &GramMatrix,
    u: &DivisorClass<S>,
    v: &DivisorClass<S>,
) -> Result<S> {
    require_full_j(space)?;
    u.check_len(space)?;
    v.check_len(space)?;
    gram.pairing(u.coords(), v.coords())
}

/// `α_j` as a class in the full basis.
pub fn dual_root_class<S: Scalar>(
    space: &AmbientSpace,
    gram: &GramMatrix,
    j: usize,
) -> Result<DivisorClass<S>> {
    require_full_j(space)?;
    Ok(DivisorClass::from_rationals(&gram.dual_root(j)?))
}

/// `v` is `i`-negative when `<α_i, v> <= 0` and, for every `j != i`,
/// `<α_j, v> >= 0` and `<α_i, v + ι_j* v> >= 0`.
pub fn is_i_negative<S: Scalar>(
    space: &AmbientSpace,
    gram: &GramMatrix,
    v: &DivisorClass<S>,
    i: usize,
) -> Result<bool> {
    require_full_j(space)?;
    space.check_index(i)?;
    let alpha_i = dual_root_class::<S>(space, gram, i)?;
    if pairing_full(space, gram, &alpha_i, v)?.is_positive() {
        return Ok(false);
    }
    for j in (0..space.num_factors()).filter(|&j| j != i) {
        let alpha_j = dual_root_class::<S>(space, gram, j)?;
        if pairing_full(space, gram, &alpha_j, v)?.is_negative() {
            return Ok(false);
        }
        let moved = apply_word(space, &Word { letters: vec![j] }, v)?;
        if pairing_full(space, gram, &alpha_i, &v.add(&moved))?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orthogonal projection off `h_i`: `v - (<v,h_i> / <h_i,h_i>) h_i`.
pub fn project_off_factor<S: Scalar>(
    space: &AmbientSpace,
    gram: &GramMatrix,
    v: &DivisorClass<S>,
    i: usize,
) -> Result<DivisorClass<S>> {
    require_full_j(space)?;
    space.check_index(i)?;
    let h = DivisorClass::<S>::basis(space.num_factors(), i);
    let hh = pairing_full(space, gram, &h, &h)?;
    if hh.is_zero() {
        return Err(Error::SingularGram);
    }
    let vh = pairing_full(space, gram, v, &h)?;
    Ok(v.sub(&h.scale(&(vh / hh))))
}
