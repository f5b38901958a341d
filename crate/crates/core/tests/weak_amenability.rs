use esum_core::derivations::{
    derivation_space, essential_check, esum_wa_check, lp_obstruction_demo,
    wa_quotient_transfer_check, wam_bracket,
};
use esum_core::{Algebra, ESum, LatticeNorm};

#[test]
fn pointwise_up_to_eight() {
    for n in 1..=8 {
        let r = derivation_space(&Algebra::pointwise(n).unwrap());
        assert!(r.weakly_amenable && r.dim_derivations == 0, "n = {n}");
    }
}

#[test]
fn weakly_amenable_implies_essential() {
    for a in [
        Algebra::scalar().unwrap(),
        Algebra::pointwise(3).unwrap(),
        Algebra::matrix(2).unwrap(),
        Algebra::square_zero().unwrap(),
    ] {
        let r = derivation_space(&a);
        assert!(!r.weakly_amenable || essential_check(&a));
        assert_eq!(r.dim_inner + r.dim_center, a.dim());
    }
}

#[test]
fn sup_sums_of_m2_keep_the_single_copy_bracket() {
    let m2 = Algebra::matrix(2).unwrap();
    let single = wam_bracket(&m2, 60, 11).unwrap().lower.value();
    for copies in [2, 3] {
        let e = ESum::uniform(m2.clone(), LatticeNorm::sup(copies).unwrap()).unwrap();
        let t = std::time::Instant::now();
        let r = esum_wa_check(&e, 60, 11).unwrap();
        eprintln!(
            "{copies} copies: {:?} lower {} single {single} block {}",
            t.elapsed(),
            r.wam_sum.lower.value(),
            r.off_block_mass
        );
        assert!(r.weakly_amenable && r.block_diagonal && r.sandwich_holds);
        assert_eq!(r.dim_derivations, 3 * copies);
        let rel = (r.wam_sum.lower.value() - single).abs() / single;
        assert!(rel < 0.1, "{rel}");
    }
}

#[test]
fn weighted_transfer() {
    let m2 = Algebra::matrix(2).unwrap();
    let e = ESum::uniform(m2, LatticeNorm::weighted_sup(vec![1.0, 2.0]).unwrap()).unwrap();
    let r = wa_quotient_transfer_check(&e, 20, 5).unwrap();
    assert!(r.holds);
    assert_eq!(r.rows[1].delta_norm, 2.0);
}

#[test]
fn obstruction_at_every_truncation() {
    let m2 = Algebra::matrix(2).unwrap();
    for p in [1.5, 2.0, 3.0] {
        let t = std::time::Instant::now();
        let r = lp_obstruction_demo(&m2, &[0.0, 1.0, 0.0, 0.0], p, &[2, 4, 8], 7).unwrap();
        eprintln!(
            "p={p} {:?} {:?}",
            t.elapsed(),
            r.rows
                .iter()
                .map(|x| (x.aggregate, x.target))
                .collect::<Vec<_>>()
        );
        assert!(r.holds, "{r:?}");
    }
}
