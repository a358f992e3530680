//! The Gram matrix `B_J`, its inertia, and the bilinear form `-B_J^{-1}`.

use num_traits::{One, Signed, Zero};

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::scalar::{self, Q};

/// `B_J`: unit diagonal, `-b_jk / 2` off the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    index_map: Vec<usize>,
    entries: QMatrix,
    inverse: Option<QMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
    pub zeros: usize,
}

impl Signature {
    pub fn as_triple(&self) -> [usize; 3] {
        [self.positives, self.negatives, self.zeros]
    }
}

impl GramMatrix {
    /// Wraps an arbitrary symmetric matrix; row `r` stands for factor
    /// `index_map[r]`.
    pub fn new(index_map: Vec<usize>, entries: QMatrix) -> Result<Self> {
        if !entries.is_symmetric() || entries.rows() != index_map.len() {
            return Err(Error::InvalidArgument(
                "Gram matrix must be symmetric with one row per index".into(),
            ));
        }
        let inverse = entries.inverse();
        Ok(GramMatrix {
            index_map,
            entries,
            inverse,
        })
    }

    pub fn size(&self) -> usize {
        self.index_map.len()
    }

    /// Factor index of each row.
    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    pub fn entries(&self) -> &QMatrix {
        &self.entries
    }

    pub fn inverse(&self) -> Result<&QMatrix> {
        self.inverse.as_ref().ok_or(Error::SingularGram)
    }

    /// Row of factor `j`, if `j` belongs to the index set.
    pub fn row_of(&self, j: usize) -> Option<usize> {
        self.index_map.iter().position(|&x| x == j)
    }

    pub fn signature(&self) -> Signature {
        signature(&self.entries)
    }

    pub fn is_lorentzian(&self) -> bool {
        let m = self.size();
        m >= 2 && self.signature().as_triple() == [m - 1, 1, 0]
    }

    /// `<u, v> = -u^T B^{-1} v` for vectors in the row coordinates.
    pub fn pairing<S: scalar::Scalar>(&self, u: &[S], v: &[S]) -> Result<S> {
        let m = self.size();
        for w in [u, v] {
            if w.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: w.len(),
                });
            }
        }
        let inv = self.inverse()?;
        let bv = inv.apply(v);
        let dot = u
            .iter()
            .zip(bv)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b);
        Ok(-dot)
    }

    /// `α_j = -Σ_k B_kj h_k`, in row coordinates.
    pub fn dual_root(&self, j: usize) -> Result<Vec<Q>> {
        let r = self.row_of(j).ok_or(Error::NotInJ(j))?;
        Ok((0..self.size())
            .map(|k| -self.entries[(k, r)].clone())
            .collect())
    }
}

/// `B_J` of an ambient space.
pub fn gram_from_ambient(space: &AmbientSpace) -> Result<GramMatrix> {
    let j = space.j_set();
    let m = j.len();
    let mut entries = QMatrix::identity(m);
    for a in 0..m {
        for b in a + 1..m {
            let bij = space.b_coefficient(j[a], j[b])?;
            let value = Q::new((-bij).into(), 2.into());
            entries[(a, b)] = value.clone();
            entries[(b, a)] = value;
        }
    }
    GramMatrix::new(j, entries)
}

/// Inertia of a symmetric rational matrix by exact congruence
/// diagonalization.
pub fn signature(m: &QMatrix) -> Signature {
    assert!(m.is_symmetric(), "signature of a non-symmetric matrix");
    let mut a = m.clone();
    let mut n = a.rows();
    let mut sig = Signature {
        positives: 0,
        negatives: 0,
        zeros: 0,
    };
    while n > 0 {
        // Nonzero diagonal pivot: record its sign and eliminate.
        if let Some(p) = (0..n).find(|&i| !a[(i, i)].is_zero()) {
            let pivot = a[(p, p)].clone();
            if Signed::is_positive(&pivot) {
                sig.positives += 1;
            } else {
                sig.negatives += 1;
            }
            a = schur_complement(&a, p, &pivot, n);
            n -= 1;
            continue;
        }
        // Zero diagonal: use an off-diagonal entry to make a hyperbolic pair.
        let off = (0..n)
            .flat_map(|i| (0..n).map(move |k| (i, k)))
            .find(|&(i, k)| i != k && !a[(i, k)].is_zero());
        match off {
            None => {
                sig.zeros += n;
                break;
            }
            Some((i, k)) => {
                // Row/column i += row/column k makes a_ii = 2 a_ik != 0.
                for c in 0..n {
                    let v = a[(k, c)].clone();
                    a[(i, c)] += v;
                }
                for r in 0..n {
                    let v = a[(r, k)].clone();
                    a[(r, i)] += v;
                }
            }
        }
    }
    sig
}

/// Removes row and column `p` from the leading `n x n` block, updating the
/// rest by the Schur complement. Returns an `(n-1) x (n-1)` matrix.
fn schur_complement(a: &QMatrix, p: usize, pivot: &Q, n: usize) -> QMatrix {
    let keep: Vec<usize> = (0..n).filter(|&i| i != p).collect();
    QMatrix::from_fn(n - 1, n - 1, |r, c| {
        let (i, k) = (keep[r], keep[c]);
        &a[(i, k)] - &a[(i, p)] * &a[(p, k)] / pivot
    })
}

/// Symmetric matrix with diagonal blocks of sizes `alphas`: unit diagonal,
/// `-n` inside a block and `-n - 1/2` between blocks.
pub fn block_gram(alphas: &[usize], n: u32) -> QMatrix {
    let labels = block_labels(alphas);
    let inside = -Q::from_integer(n.into());
    let between = &inside - Q::new(1.into(), 2.into());
    QMatrix::from_fn(labels.len(), labels.len(), |i, j| {
        if i == j {
            Q::one()
        } else if labels[i] == labels[j] {
            inside.clone()
        } else {
            between.clone()
        }
    })
}

fn block_labels(alphas: &[usize]) -> Vec<usize> {
    alphas
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect()
}

/// The `k x k` matrix obtained from [`block_gram`] by subtracting each block
/// leader's row from the other rows of its block, adding those columns into
/// the leader's column, and keeping the leader rows and columns.
///
/// `det(block_gram) = (n + 1)^{l - k} det(reduced)`.
pub fn block_reduced_matrix(alphas: &[usize], n: u32) -> QMatrix {
    let mut b = block_gram(alphas, n);
    let size = b.rows();
    let mut leaders = Vec::with_capacity(alphas.len());
    let mut start = 0;
    for &alpha in alphas {
        let leader = start;
        leaders.push(leader);
        for r in leader + 1..leader + alpha {
            for c in 0..size {
                let v = b[(leader, c)].clone();
                b[(r, c)] -= v;
            }
        }
        for c in leader + 1..leader + alpha {
            for r in 0..size {
                let v = b[(r, c)].clone();
                b[(r, leader)] += v;
            }
        }
        start += alpha;
    }
    b.submatrix(&leaders, &leaders)
}

/// Closed-form determinant of [`block_reduced_matrix`] for ascending block
/// sizes `α_1 <= ... <= α_k`:
///
/// `(1 - (α_1 - 1) n) Π_{i>=2} q_i - Σ_{i>=2} (n + 1/2) α_i Π_{j != i} q_j`
/// with `q_j = 1 + n + α_j / 2` and the last product over `j` in `1..k`.
pub fn block_reduced_det(alphas: &[usize], n: u32) -> Result<Q> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no blocks".into()));
    }
    if alphas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::NotSorted);
    }
    let nq = Q::from_integer(n.into());
    let half = Q::new(1.into(), 2.into());
    let alpha = |i: usize| Q::from_integer(alphas[i].into());
    let q = |j: usize| Q::one() + &nq + alpha(j) * &half;
    let k = alphas.len();
    let lead = Q::one() - (alpha(0) - Q::one()) * &nq;
    let first = (1..k).fold(lead, |acc, i| acc * q(i));
    let correction = (1..k).fold(Q::zero(), |acc, i| {
        let others = (0..k).filter(|&j| j != i).fold(Q::one(), |p, j| p * q(j));
        acc + (&nq + &half) * alpha(i) * others
    });
    Ok(first - correction)
}

/// Groups `J` by the defining divisor that has degree 2 in each factor of
/// `J`. For a Calabi-Yau space with `n = min n_i` this is the block
/// structure of `B_J`: `b_jk = 2n` inside a group and `2n + 1` across.
///
/// Returns `None` when some column of `J` does not carry exactly one 2, or
/// when the resulting block matrix differs from the actual `B_J`.
pub fn block_partition(space: &AmbientSpace) -> Option<Vec<Vec<usize>>> {
    let j = space.j_set();
    let degrees = space.degrees();
    if degrees.is_empty() {
        return None;
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &col in &j {
        let rows: Vec<usize> = (0..degrees.len())
            .filter(|&r| degrees[r][col] == 2)
            .collect();
        let [row] = rows[..] else {
            return None;
        };
        match groups.iter_mut().find(|(r, _)| *r == row) {
            Some((_, g)) => g.push(col),
            None => groups.push((row, vec![col])),
        }
    }
    let partition: Vec<Vec<usize>> = groups.into_iter().map(|(_, g)| g).collect();

    let gram = gram_from_ambient(space).ok()?;
    let n = space.num_divisors() as u32;
    let order: Vec<usize> = partition.iter().flatten().copied().collect();
    let sizes: Vec<usize> = partition.iter().map(Vec::len).collect();
    let rows: Vec<usize> = order
        .iter()
        .map(|&c| gram.row_of(c).expect("in J"))
        .collect();
    let permuted = gram.entries().submatrix(&rows, &rows);
    (permuted == block_gram(&sizes, n)).then_some(partition)
}
