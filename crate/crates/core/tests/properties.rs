use esum_core::esum::ESumElement;
use esum_core::{Algebra, ESum, LatticeNorm, Orlicz, System};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lattice(n: usize) -> impl Strategy<Value = LatticeNorm> {
    prop_oneof![
        Just(LatticeNorm::sup(n).unwrap()),
        prop::collection::vec(1.0..3.0f64, n).prop_map(|w| LatticeNorm::weighted_sup(w).unwrap()),
        prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, 7.0])
            .prop_map(move |p| LatticeNorm::lp(p, n).unwrap()),
        prop::sample::select(vec![0.25, 0.5, 0.9]).prop_map(move |a| LatticeNorm::orlicz(
            Orlicz::shifted_ramp(a).unwrap(),
            n
        )
        .unwrap()),
        (1.2..4.0f64).prop_map(move |p| LatticeNorm::orlicz(Orlicz::power(p).unwrap(), n).unwrap()),
    ]
}

fn spec_and_pair() -> impl Strategy<Value = (LatticeNorm, Vec<f64>, Vec<f64>)> {
    (1usize..7).prop_flat_map(|n| {
        (
            lattice(n),
            prop::collection::vec(-5.0..5.0f64, n),
            prop::collection::vec(-5.0..5.0f64, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solid((e, x, y) in spec_and_pair()) {
        let small: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.abs().min(b.abs())).collect();
        let big: Vec<f64> = x.iter().zip(&y).map(|(a, b)| -a.abs().max(b.abs())).collect();
        let (s, b) = (e.norm_eval(&small).unwrap(), e.norm_eval(&big).unwrap());
        prop_assert!(s <= b * (1.0 + 1e-9) + 1e-12, "{s} > {b}");
    }

    #[test]
    fn between_sup_and_ce_times_sup((e, x, _y) in spec_and_pair()) {
        let sup = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let v = e.norm_eval(&x).unwrap();
        let ce = e.ce_constant().unwrap().horizon_value;
        prop_assert!(sup <= v * (1.0 + 1e-9));
        prop_assert!(v <= ce * sup * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn pointwise_submultiplicative((e, x, y) in spec_and_pair()) {
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
        let lhs = e.norm_eval(&xy).unwrap();
        let rhs = e.norm_eval(&x).unwrap() * e.norm_eval(&y).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn dual_pairing_bound((e, x, y) in spec_and_pair()) {
        let pairing: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let bound = e.norm_eval(&x).unwrap() * e.dual_norm(&y).unwrap();
        prop_assert!(pairing.abs() <= bound * (1.0 + 1e-8) + 1e-12);
    }

    #[test]
    fn esum_submultiplicative(
        (e, _x, _y) in spec_and_pair(),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let n = e.index_size();
        let parent = ESum::uniform(Algebra::matrix(2).unwrap(), e).unwrap().into_shared();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || (0..n).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect::<Vec<Vec<f64>>>();
        let a = ESumElement::new(&parent, draw()).unwrap();
        let b = ESumElement::new(&parent, draw()).unwrap();
        let ab = a.esum_mul(&b).unwrap();
        prop_assert!(ab.esum_norm() <= a.esum_norm() * b.esum_norm() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn jnorm_dp_matches_enumeration(seed in any::<u64>(), levels in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = System::random_contractive(&mut rng, levels, 3).unwrap();
        let x = sys.random_element(&mut rng, levels);
        let horizon = (sys.support_end(&x) + 1).min(sys.last_level());
        let dp = sys.jnorm(&x);
        let bf = sys.jnorm_bruteforce(&x, horizon).unwrap();
        prop_assert!((dp - bf).abs() <= 1e-12 * (1.0 + bf), "{dp} vs {bf}");
    }
}
