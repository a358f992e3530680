#![allow(dead_code)]

use cicy::{AmbientSpace, DivisorClass, Word, Q};
use num_bigint::BigInt;
use rand::Rng;

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn class(v: &[i64]) -> DivisorClass<Q> {
    DivisorClass::new(v.iter().map(|&x| qi(x)).collect())
}

/// `P^1 x P^1 x P^2` cut by one divisor of degree (2,2,3).
pub fn p112() -> AmbientSpace {
    AmbientSpace::new(vec![1, 1, 2], vec![vec![2, 2, 3]], true).unwrap()
}

/// `(P^3)^3` cut by (1,1,2), (1,2,1), (2,1,1).
pub fn p333() -> AmbientSpace {
    AmbientSpace::new(
        vec![3, 3, 3],
        vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]],
        true,
    )
    .unwrap()
}

/// `(P^2)^4` cut by (2,2,1,1) and (1,1,2,2).
pub fn p2222() -> AmbientSpace {
    AmbientSpace::new(
        vec![2, 2, 2, 2],
        vec![vec![2, 2, 1, 1], vec![1, 1, 2, 2]],
        true,
    )
    .unwrap()
}

/// Random class with coordinates in `(0, 5]`, denominators up to 7.
pub fn random_interior_nef(rng: &mut impl Rng, l: usize) -> DivisorClass<Q> {
    DivisorClass::new(
        (0..l)
            .map(|_| qr(rng.gen_range(1..=35), rng.gen_range(1..=7)))
            .collect(),
    )
}

/// Random reduced word of the given length over `letters`.
pub fn random_word(rng: &mut impl Rng, letters: &[usize], len: usize) -> Word {
    let mut out: Vec<usize> = Vec::with_capacity(len);
    while out.len() < len {
        let c = letters[rng.gen_range(0..letters.len())];
        if out.last() != Some(&c) {
            out.push(c);
        }
    }
    Word::new(out).unwrap()
}

/// Random Calabi-Yau configuration: `l <= 6` factors of dimension `<= 5`,
/// `n = min n_i` divisors, total dimension at least 4, not `P^2 x P^2`.
/// Each column's excess `n_i + 1 - n` is spread over random rows.
pub fn random_cy(rng: &mut impl Rng) -> AmbientSpace {
    loop {
        let l = rng.gen_range(1..=6);
        let factors: Vec<u32> = (0..l).map(|_| rng.gen_range(1..=5)).collect();
        if factors.iter().sum::<u32>() < 4 || factors == [2, 2] {
            continue;
        }
        let n = *factors.iter().min().unwrap() as usize;
        let mut degrees = vec![vec![1u32; l]; n];
        for (i, &ni) in factors.iter().enumerate() {
            for _ in 0..(ni as usize + 1 - n) {
                degrees[rng.gen_range(0..n)][i] += 1;
            }
        }
        return AmbientSpace::new(factors, degrees, true).unwrap();
    }
}
