use esum_core::algebra::FiniteAlgebra;
use esum_core::derivations::derivation_space;
use esum_core::jsum::JSystem;
use esum_core::lattice::LatticeNormSpec;
use esum_core::tensor::{am_pointwise, Budget};

#[test]
fn f32_paths_agree_with_closed_forms() {
    let r = derivation_space(&FiniteAlgebra::<f32>::matrix(2).unwrap());
    assert_eq!((r.dim_derivations, r.dim_inner, r.dim_center), (3, 3, 1));

    let b = am_pointwise(
        &LatticeNormSpec::<f32>::lp(2.0, 3).unwrap(),
        Budget::default(),
    )
    .unwrap();
    assert!(
        (b.lower - 3.0).abs() < 1e-4 && (b.upper - 3.0).abs() < 1e-4,
        "{b:?}"
    );
    let b = am_pointwise(&LatticeNormSpec::<f32>::sup(4).unwrap(), Budget::default()).unwrap();
    assert!((b.upper - 1.0).abs() < 1e-4);

    let s = JSystem::<f32>::identity_chain(3, 1).unwrap();
    let x = s
        .element(vec![vec![], vec![1.0], vec![-1.0], vec![0.0]])
        .unwrap();
    assert!((s.jnorm(&x) - 3f32.sqrt()).abs() < 1e-6);
}
