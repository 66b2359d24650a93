use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use duality_lab::chainkit::Orientation;
use duality_lab::exactlin::{enumerate_row_span, howell_form, kernel, MatrixZN, Modulus};
use duality_lab::finmod::{
    evaluation_map, iso_fingerprint, pontryagin_dual, random_finmod, random_unimodular, Ambient, FinMod, ModMap,
    RandomModuleParams, SeqElement,
};
use duality_lab::gradedpoly::{graded_tor, intersection_vs_product, GradedQuotient, Mode, PurePower};
use duality_lab::koszul::{
    cofactor, cofactor_map, koszul_chain, koszul_cochain, power_transition, stage, CofactorRule,
};
use duality_lab::tate::{d_functor, group_cohomology, local_cohomology};
use duality_lab::theorems::{verify, Params};

fn module(seed: u64, p: u64, t: usize, s: usize) -> FinMod {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(1..=3);
    random_finmod(
        &mut rng,
        Ambient::new(p, a, t, s).unwrap(),
        &RandomModuleParams::default(),
    )
}

fn element(rng: &mut ChaCha8Rng, amb: Ambient) -> SeqElement {
    match rng.gen_range(0..1 + amb.t + amb.s) {
        0 => SeqElement::P(rng.gen_range(1..=2)),
        v if v <= amb.t => SeqElement::V(v, rng.gen_range(1..=2)),
        g => SeqElement::G(g - amb.t, rng.gen_range(0..=1)),
    }
}

fn small_matrix() -> impl Strategy<Value = MatrixZN> {
    (prop_oneof![Just(8u64), Just(9)], 1usize..=3, 1usize..=3)
        .prop_flat_map(|(n, r, c)| {
            (
                Just(n),
                Just(c),
                proptest::collection::vec(proptest::collection::vec(0..n, c), r),
            )
        })
        .prop_map(|(n, c, rows)| MatrixZN::from_u64_rows(Modulus::new(n).unwrap(), c, &rows))
}

fn all_vectors(n: u64, len: usize) -> Vec<Vec<u64>> {
    (0..n.pow(len as u32))
        .map(|mut code| {
            (0..len)
                .map(|_| {
                    let x = code % n;
                    code /= n;
                    x
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn howell_form_keeps_the_row_span(m in small_matrix()) {
        let h = howell_form(&m);
        prop_assert_eq!(enumerate_row_span(&h.form), enumerate_row_span(&m));
        for r in m.row_vecs() {
            prop_assert!(h.contains(&r));
        }
    }

    #[test]
    fn kernel_is_the_full_left_kernel(m in small_matrix()) {
        let k = kernel(&m);
        for v in k.row_vecs() {
            prop_assert!(m.left_apply(&v).iter().all(|&x| x == 0));
        }
        let n = m.modulus().value();
        let brute: BTreeSet<Vec<u64>> = all_vectors(n, m.rows())
            .into_iter()
            .filter(|v| m.left_apply(v).iter().all(|&x| x == 0))
            .collect();
        prop_assert_eq!(enumerate_row_span(&k), brute);
    }

    #[test]
    fn dual_has_the_same_order_and_evaluation_is_iso(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], t in 0usize..=2, s in 0usize..=2) {
        let m = module(seed, p, t, s);
        prop_assert_eq!(pontryagin_dual(&m).log_size(), m.log_size());
        let ev = evaluation_map(&m);
        prop_assert!(ev.is_well_defined());
        prop_assert!(ev.is_equivariant());
        prop_assert!(ev.is_iso());
    }

    #[test]
    fn kernel_and_image_orders_multiply(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], t in 0usize..=2, s in 0usize..=2) {
        let m = module(seed, p, t, s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let f = ModMap::endomorphism(&m, m.realize(&element(&mut rng, m.ambient())).unwrap());
        prop_assert_eq!(f.kernel().0.log_size() + f.image_log_size(), m.log_size());
        prop_assert_eq!(f.cokernel().0.log_size(), f.kernel().0.log_size());
    }

    #[test]
    fn fingerprint_ignores_change_of_basis(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], t in 0usize..=2, s in 0usize..=2) {
        let m = module(seed, p, t, s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        let u = random_unimodular(&mut rng, &m);
        let conj = m.conjugate(&u).unwrap();
        prop_assert_eq!(iso_fingerprint(&conj, 2), iso_fingerprint(&m, 2));
    }

    #[test]
    fn koszul_homology_orders_and_euler(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], d in 1usize..=3) {
        let m = module(seed, p, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let seq: Vec<SeqElement> = (0..d).map(|_| element(&mut rng, m.ambient())).collect();
        for k in [koszul_chain(&seq, &m).unwrap(), koszul_cochain(&seq, &m).unwrap()] {
            let c = &k.complex;
            for n in c.degrees() {
                // both are p-groups, so divisibility is comparison of exponents
                prop_assert!(c.homology(n).log_size() <= c.module(n).log_size());
            }
            prop_assert_eq!(c.euler_log(), c.homology_euler_log());
            let back = c.dualize().dualize();
            for n in c.degrees() {
                prop_assert_eq!(iso_fingerprint(&back.homology(n), 2), iso_fingerprint(&c.homology(n), 2));
            }
        }
    }

    #[test]
    fn power_transitions_compose(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], d in 1usize..=2, k in 1usize..=2) {
        let m = module(seed, p, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
        let seq: Vec<SeqElement> = (0..d).map(|_| element(&mut rng, m.ambient())).collect();
        for (orientation, rule) in [(Orientation::Chain, CofactorRule::Complement), (Orientation::Cochain, CofactorRule::Subset)] {
            let two = power_transition(&seq, k, &m, orientation, rule)
                .unwrap()
                .then(&power_transition(&seq, k + 1, &m, orientation, rule).unwrap())
                .unwrap();
            let (a, b) = (stage(&seq, k), stage(&seq, k + 2));
            let build = |s: &[SeqElement]| match orientation {
                Orientation::Chain => koszul_chain(s, &m).unwrap(),
                Orientation::Cochain => koszul_cochain(s, &m).unwrap(),
            };
            let cof: Vec<MatrixZN> = a.iter().zip(&b).map(|(x, y)| cofactor(x, y, &m).unwrap()).collect();
            let direct = cofactor_map(&build(&a), &build(&b), &cof, rule).unwrap();
            for (x, y) in two.components().iter().zip(direct.components()) {
                prop_assert_eq!(x.matrix(), y.matrix());
            }
        }
    }

    #[test]
    fn first_tor_vanishes_iff_intersection_is_product(
        ei in proptest::collection::vec(0u32..=2, 2),
        ej in proptest::collection::vec(0u32..=2, 2),
        p in prop_oneof![Just(2u64), Just(3)],
    ) {
        let pp = |e: &Vec<u32>| e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(var, &exp)| PurePower { var, exp }).collect::<Vec<_>>();
        let (i, j) = (pp(&ei), pp(&ej));
        prop_assume!(!i.is_empty() && !j.is_empty());
        let gq = GradedQuotient::new(p, 2, i, j, 6, Mode::Oracle).unwrap();
        let tor1_zero = graded_tor(&gq, 1).iter().all(|&x| x == 0);
        let equal = intersection_vs_product(&gq).iter().all(|c| c.intersection == c.product);
        prop_assert_eq!(tor1_zero, equal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn d_functor_lives_in_degrees_zero_to_s(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], s in 1usize..=2) {
        let m = module(seed, p, 0, s);
        for q in [-1i64, s as i64 + 1] {
            prop_assert!(d_functor(&m, q, 12, 2).unwrap().module.is_zero());
        }
    }

    #[test]
    fn maximal_ideal_local_cohomology_is_m_in_degree_zero(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], t in 0usize..=1, s in 0usize..=1) {
        let m = module(seed, p, t, s);
        let seq: Vec<SeqElement> = std::iter::once(SeqElement::P(1))
            .chain((1..=t).map(|i| SeqElement::V(i, 1)))
            .chain((1..=s).map(|j| SeqElement::G(j, 0)))
            .collect();
        let h0 = local_cohomology(&m, &seq, 0, 12, 2).unwrap();
        prop_assert_eq!(iso_fingerprint(&h0.module, 2), iso_fingerprint(&m, 2));
        for q in 1..=seq.len() as i64 {
            prop_assert!(local_cohomology(&m, &seq, q, 12, 2).unwrap().module.is_zero());
        }
    }

    #[test]
    fn torus_cohomology_has_trivial_euler_characteristic(seed in any::<u64>(), p in prop_oneof![Just(2u64), Just(3)], s in 1usize..=2, k in 0u32..=1) {
        let m = module(seed, p, 0, s);
        let chi: i64 = (0..=s as i64)
            .map(|q| if q % 2 == 0 { 1 } else { -1 } * group_cohomology(&m, k, q).unwrap().log_size() as i64)
            .sum();
        prop_assert_eq!(chi, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn reports_are_reproducible(seed in any::<u64>()) {
        let params = Params { seed, trials: 4, ..Params::default() };
        for id in ["ext-tor-duality", "torus-duality", "pont-hom-rvee"] {
            prop_assert_eq!(verify(id, &params).unwrap().to_json(), verify(id, &params).unwrap().to_json());
        }
    }
}
