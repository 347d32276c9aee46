use proptest::prelude::*;
use vacohom::cochains::Generator;
use vacohom::correlators::{Context, Engine};
use vacohom::eproduct::ExclusionList;
use vacohom::invariants::*;
use vacohom::voa::{FockState, Heisenberg, ModuleVector};

fn ctx() -> Context {
    Context::with_engine(Heisenberg::new(12), 2, Engine::Wick)
}

const S: Sampling = Sampling { order: 1, cutoff: 1, closed_cutoff: 0 };

#[test]
fn chi_class_vanishes_because_delta_chi_does() {
    let c = ctx();
    let g = Generator::new(2, 2);
    let chi = g.from_module_vector(&ModuleVector::a(1), Some(3));
    let w = class_representative(&c, ClassKind::DChiChi, &chi, None, S).unwrap();
    assert_eq!(w.slot, (1, 5));
    assert!(w.closedness.closed);
    assert!(w.nonvanishing.is_none());
}

#[test]
fn class_inputs_are_slot_checked() {
    let c = ctx();
    let g = Generator::new(1, 2);
    let wrong = g.from_yw(&ModuleVector::vacuum(), Some(3)).unwrap();
    assert!(class_representative(&c, ClassKind::DPhiPhi, &wrong, None, S).is_err());
    let t0 = g.from_yw(&ModuleVector::vacuum(), Some(0)).unwrap();
    assert!(class_representative(&c, ClassKind::DAlphaAlpha, &t0, None, S).is_err());
}

#[test]
fn phi_class_is_computed_with_certificates() {
    let c = ctx();
    let g = Generator::new(1, 2);
    let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
    let w = class_representative(&c, ClassKind::DPhiPhi, &phi, Some(&g.zero(1, Some(2))), S).unwrap();
    assert_eq!(w.slot, (3, 3));
    assert!(w.nonvanishing.is_some());
    assert!(w.shift.unwrap().passed());
}

#[test]
fn solved_triple_and_bracket_table() {
    let c = ctx();
    let g = Generator::new(2, 2);
    let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
    let chi = g.from_module_vector(&ModuleVector::a(1), Some(3));
    let sol = solve_alpha(&c, &chi, &phi, S).unwrap();
    assert!(sol.feasible && sol.residual_zero);
    assert!(sol.t <= 2);
    let v1 = FockState::single(1);
    let v2 = FockState::new(vec![1, 1]).unwrap();
    let tab = lie_table(&c, &v1, &v2, &chi, &phi, &sol, S).unwrap();
    for r in &tab.relations {
        assert_eq!(r.lhs_slot, r.rhs_slot, "{}", r.name);
    }
    assert!(tab.relations[0].holds && tab.relations[1].holds);
    assert!(tab.jacobi_failures.is_empty());
    let xx = tab.declared_trivial.iter().find(|b| b.pair == ("X+".into(), "X+".into())).unwrap();
    assert_eq!(xx.vanishes, Some(true));
}

#[test]
fn orthogonality_fails_for_an_engineered_pair() {
    let c = ctx();
    let g = Generator::new(1, 2);
    let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
    let eta = g.from_yw(&ModuleVector::a(1), Some(2)).unwrap();
    let r = orthogonality(&c, &phi, &eta, &ExclusionList::none(), 1, 1).unwrap();
    assert!(!r.holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn shift_decomposition_for_random_eta(seed in 0u64..1000) {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.random_valid(1, Some(2), seed).unwrap();
        let eta = g.random_valid(1, Some(2), seed + 1).unwrap();
        let r = shift_invariance_test(&c, &phi, &eta, S).unwrap();
        prop_assert!(r.decomposition_holds);
        prop_assert!(r.commutator_cancellation);
    }
}
