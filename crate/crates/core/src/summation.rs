//! Compensated summation with a reduction order that does not depend on the
//! number of worker threads.

use rayon::prelude::*;

/// Terms per leaf of the reduction tree.
pub const CHUNK: usize = 4096;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(mut self, other: NeumaierSum) -> NeumaierSum {
        self.add(other.sum);
        self.add(other.compensation);
        self
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sums `term(i)` for `i` in `start..end`.
///
/// Leaves are fixed blocks of [`CHUNK`] consecutive indices summed in
/// ascending order; leaf results are combined by a balanced pairwise tree
/// over the leaf sequence. The result is bit-identical for any thread count.
pub fn deterministic_sum<F>(start: u64, end: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if end <= start {
        return 0.0;
    }
    let chunk = CHUNK as u64;
    let leaves: Vec<NeumaierSum> = (0..(end - start).div_ceil(chunk))
        .into_par_iter()
        .map(|b| {
            let lo = start + b * chunk;
            let hi = (lo + chunk).min(end);
            (lo..hi).map(&term).collect()
        })
        .collect();
    pairwise(&leaves).value()
}

fn pairwise(leaves: &[NeumaierSum]) -> NeumaierSum {
    match leaves.len() {
        0 => NeumaierSum::new(),
        1 => leaves[0],
        n => {
            let (l, r) = leaves.split_at(n / 2);
            pairwise(l).merge(pairwise(r))
        }
    }
}
