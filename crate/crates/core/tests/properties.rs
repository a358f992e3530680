mod common;

use cicy::cones::{
    fundamental_extremal_rays, in_fundamental_cone, limit_root_iterate, omega_pairing_closed_form,
};
use cicy::digamma::digamma;
use cicy::lorentz::{block_gram, block_partition, gram_from_ambient, signature};
use cicy::series::series_summand;
use cicy::volume::{vol, vol_nef};
use cicy::weyl::{apply_word, dual_root_class, involution_matrix, pairing_full, DEFAULT_MAX_ITER};
use cicy::{AmbientSpace, DivisorClass, Word, Q};
use common::*;
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_from_seed(seed: u64) -> AmbientSpace {
    random_cy(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn rational() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=6).prop_map(|(n, d)| qr(n, d))
}

fn nef_rational() -> impl Strategy<Value = Q> {
    (0i64..=30, 1i64..=6).prop_map(|(n, d)| qr(n, d))
}

fn nef3() -> impl Strategy<Value = DivisorClass<Q>> {
    prop::collection::vec(nef_rational(), 3).prop_map(DivisorClass::new)
}

fn full_j_spaces() -> Vec<AmbientSpace> {
    vec![p333(), p2222()]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn b_is_symmetric_and_two_valued_on_j(seed in any::<u64>()) {
        let s = space_from_seed(seed);
        let n = s.num_divisors() as i64;
        let j = s.j_set();
        for &a in &j {
            for &b in &j {
                if a == b {
                    continue;
                }
                let bab = s.b_coefficient(a, b).unwrap();
                prop_assert_eq!(bab, s.b_coefficient(b, a).unwrap());
                prop_assert!(bab == 2 * n || bab == 2 * n + 1);
            }
        }
    }

    #[test]
    fn gram_signature_matches_block_family(seed in any::<u64>()) {
        let s = space_from_seed(seed);
        let parts = block_partition(&s).expect("strict CY at minimal n");
        let mut sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        let gram = gram_from_ambient(&s).unwrap();
        prop_assert_eq!(
            gram.signature(),
            signature(&block_gram(&sizes, s.num_divisors() as u32))
        );
    }

    #[test]
    fn volume_polynomial_is_top_intersection(
        seed in any::<u64>(),
        coeffs in prop::collection::vec(rational(), 6),
    ) {
        let s = space_from_seed(seed);
        let x = &coeffs[..s.num_factors().min(6)];
        prop_assume!(x.len() == s.num_factors());
        prop_assert_eq!(s.volume_polynomial().eval(x), s.top_intersection(x).unwrap());
    }

    #[test]
    fn factor_permutation_permutes_invariants(
        seed in any::<u64>(),
        coeffs in prop::collection::vec(nef_rational(), 6),
        shift in 1usize..6,
    ) {
        let s = space_from_seed(seed);
        let l = s.num_factors();
        prop_assume!(l <= 6);
        let perm: Vec<usize> = (0..l).map(|i| (i + shift) % l).collect();
        let factors: Vec<u32> = perm.iter().map(|&p| s.factors()[p]).collect();
        let degrees: Vec<Vec<u32>> = s
            .degrees()
            .iter()
            .map(|row| perm.iter().map(|&p| row[p]).collect())
            .collect();
        let t = AmbientSpace::new(factors, degrees, true).unwrap();
        let v = DivisorClass::new(coeffs[..l].to_vec());
        let pv = DivisorClass::new(perm.iter().map(|&p| coeffs[p].clone()).collect());
        prop_assert_eq!(vol_nef(&s, &v).unwrap(), vol_nef(&t, &pv).unwrap());
        for a in 0..l {
            for b in 0..l {
                if a != b && s.in_j(perm[a]) && s.in_j(perm[b]) {
                    prop_assert_eq!(
                        t.b_coefficient(a, b).unwrap(),
                        s.b_coefficient(perm[a], perm[b]).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn volume_is_homogeneous_and_monotone(v in nef3(), t in 1i64..5, i in 0usize..3) {
        for s in [p112(), p333()] {
            let base = vol_nef(&s, &v).unwrap();
            let tq = qi(t);
            let scaled = vol_nef(&s, &v.scale(&tq)).unwrap();
            prop_assert_eq!(scaled, &base * num_traits::pow(tq, s.dim()));
            let bigger = vol_nef(&s, &v.add(&DivisorClass::basis(3, i))).unwrap();
            prop_assert!(bigger >= base);
        }
    }

    #[test]
    fn volume_is_reflection_invariant(v in nef3(), word_seed in any::<u64>(), len in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(word_seed);
        for s in [p112(), p333()] {
            let w = random_word(&mut rng, &s.j_set(), len);
            let moved = apply_word(&s, &w, &v).unwrap();
            prop_assert_eq!(
                vol(&s, &moved, DEFAULT_MAX_ITER).unwrap(),
                vol_nef(&s, &v).unwrap()
            );
        }
    }

    #[test]
    fn reflection_formula_and_pairing(
        u in prop::collection::vec(rational(), 4),
        v in prop::collection::vec(rational(), 4),
    ) {
        for s in full_j_spaces() {
            let l = s.num_factors();
            let gram = gram_from_ambient(&s).unwrap();
            let u = DivisorClass::new(u[..l].to_vec());
            let v = DivisorClass::new(v[..l].to_vec());
            for j in 0..l {
                let alpha = dual_root_class::<Q>(&s, &gram, j).unwrap();
                let m = involution_matrix(&s, j).unwrap();
                let c = pairing_full(&s, &gram, &v, &alpha).unwrap() * qi(2);
                let expected = v.add(&alpha.scale(&c));
                prop_assert_eq!(DivisorClass::new(m.apply(v.coords())), expected);
                let g = Word::new(vec![j]).unwrap();
                prop_assert_eq!(
                    pairing_full(&s, &gram, &apply_word(&s, &g, &u).unwrap(), &apply_word(&s, &g, &v).unwrap()).unwrap(),
                    pairing_full(&s, &gram, &u, &v).unwrap()
                );
            }
        }
    }

    #[test]
    fn summand_is_positive_and_cubic_in_k(n in 1u64..100_000, k in 1i64..6) {
        let (a, b) = (qi(-1), qi(2));
        let one = series_summand(n, &a, &b, &qi(1)).unwrap();
        prop_assert!(one.is_positive());
        prop_assert_eq!(series_summand(n, &a, &b, &qi(k)).unwrap(), one * qi(k * k * k));
    }

    #[test]
    fn digamma_recurrence(x in 0.01f64..50.0) {
        let lhs = digamma(x + 1.0).unwrap();
        let rhs = digamma(x).unwrap() + 1.0 / x;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }
}

#[test]
fn involutions_square_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let s = random_cy(&mut rng);
        if s.num_factors() < 2 {
            continue;
        }
        for j in s.j_set() {
            let m = involution_matrix(&s, j).unwrap();
            assert_eq!(m.mul(&m), cicy::matrix::QMatrix::identity(s.num_factors()));
        }
    }
}

#[test]
fn dual_roots_are_dual_to_the_basis() {
    for s in full_j_spaces() {
        let l = s.num_factors();
        let gram = gram_from_ambient(&s).unwrap();
        for i in 0..l {
            let ai = dual_root_class::<Q>(&s, &gram, i).unwrap();
            for j in 0..l {
                let h = DivisorClass::<Q>::basis(l, j);
                let expected = if i == j { qi(1) } else { qi(0) };
                assert_eq!(pairing_full(&s, &gram, &h, &ai).unwrap(), expected);
                let aj = dual_root_class::<Q>(&s, &gram, j).unwrap();
                assert_eq!(
                    pairing_full(&s, &gram, &ai, &aj).unwrap(),
                    -gram.entries()[(i, j)].clone()
                );
            }
        }
    }
}

#[test]
fn inverse_gram_diagonal_signs_on_block_family() {
    for l in 2..=8usize {
        for n in 1..=4u32 {
            let mut stack = vec![(Vec::<usize>::new(), l, 1usize)];
            while let Some((parts, left, min)) = stack.pop() {
                if left == 0 {
                    let m = block_gram(&parts, n);
                    if signature(&m).as_triple() != [l - 1, 1, 0] {
                        continue;
                    }
                    let inv = m.inverse().unwrap();
                    for i in 0..l {
                        let d = &inv[(i, i)];
                        if l == 2 {
                            assert!(d.is_negative(), "{parts:?} n={n}");
                        } else if l as u32 * n >= 4 {
                            assert!(d.is_positive(), "{parts:?} n={n}");
                        }
                    }
                    continue;
                }
                for first in min..=left {
                    let mut p = parts.clone();
                    p.push(first);
                    stack.push((p, left - first, first));
                }
            }
        }
    }
}

#[test]
fn limit_roots_become_isotropic() {
    for s in full_j_spaces() {
        let l = s.num_factors();
        let gram = gram_from_ambient(&s).unwrap();
        let base = DivisorClass::new(vec![1.0; l]);
        for i in 0..l {
            for j in (0..l).filter(|&j| j != i) {
                let iterates = limit_root_iterate(&s, i, j, &base, 20).unwrap();
                let last = iterates.last().unwrap();
                let self_pairing = pairing_full(&s, &gram, last, last).unwrap();
                assert!(self_pairing.abs() < 1e-6, "pair ({i},{j}): {self_pairing}");
            }
        }
    }
}

#[test]
fn extremal_rays_lie_in_fundamental_cone() {
    for s in full_j_spaces() {
        let gram = gram_from_ambient(&s).unwrap();
        let rays = fundamental_extremal_rays(&s, &gram).unwrap();
        assert_eq!(rays.len(), s.num_factors() * (s.num_factors() - 1));
        for r in &rays {
            assert!(in_fundamental_cone(&s, &gram, &r.class).unwrap());
            for t in &rays {
                assert_eq!(
                    pairing_full(&s, &gram, &r.class, &t.class).unwrap(),
                    omega_pairing_closed_form(&s, (r.i, r.j), (t.i, t.j)).unwrap()
                );
            }
        }
    }
}

#[test]
fn random_nef_classes_reduce_trivially() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = p333();
    for _ in 0..100 {
        let v = random_interior_nef(&mut rng, 3);
        let (w, back) = cicy::weyl::reduce_to_nef(&s, &v, 10).unwrap();
        assert!(w.is_empty());
        assert_eq!(back, v);
    }
}
