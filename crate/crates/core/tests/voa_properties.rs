use num_traits::Zero;
use proptest::prelude::*;
use vacohom::linalg::{identity, rank};
use vacohom::rational::{q, Q};
use vacohom::voa::{FockState, Heisenberg, ModuleVector};

fn b(s: &FockState) -> ModuleVector {
    ModuleVector::basis(s.clone())
}

#[test]
fn virasoro_triple_on_truncated_space() {
    for s in FockState::basis_upto(4) {
        let v = b(&s);
        let l = Heisenberg::virasoro_mode;
        let c01 = l(0, &l(1, &v)).sub(&l(1, &l(0, &v)));
        assert_eq!(c01, l(1, &v).neg(), "[L0,L1] on {s}");
        let c0m = l(0, &l(-1, &v)).sub(&l(-1, &l(0, &v)));
        assert_eq!(c0m, l(-1, &v), "[L0,L-1] on {s}");
        let c1m = l(1, &l(-1, &v)).sub(&l(-1, &l(1, &v)));
        assert_eq!(c1m, l(0, &v).scale(&q(2)), "[L1,L-1] on {s}");
    }
}

#[test]
fn form_symmetry_orthogonality_invertibility() {
    let h = Heisenberg::with_lambda(5, Q::new(2.into(), 3.into()));
    let all = FockState::basis_upto(5);
    for s in &all {
        for t in &all {
            let st = h.form(&b(s), &b(t));
            assert_eq!(st, h.form(&b(t), &b(s)));
            if s.weight() != t.weight() {
                assert!(st.is_zero());
            }
        }
    }
    for l in 0..=5 {
        let basis: Vec<ModuleVector> = FockState::basis(l).iter().map(b).collect();
        let g = h.gram(&basis);
        assert_eq!(rank(&g), basis.len());
        let d = h.dual_basis(l).unwrap();
        assert_eq!(h.pairing_matrix(&d), identity(d.len()));
    }
}

#[test]
fn creation_property() {
    let h = Heisenberg::new(4);
    for s in FockState::basis_upto(4) {
        let v = b(&s);
        // Y(v,z)1 = Σ v(n)1 z^{-n-1}: nothing for n >= 0, v at n = -1
        for n in 0..6 {
            assert!(h.vertex_mode(&v, n, &ModuleVector::vacuum()).unwrap().is_zero());
        }
        assert_eq!(h.vertex_mode(&v, -1, &ModuleVector::vacuum()).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn adjoint_invariance(ui in 0usize..7, ai in 0usize..7, n in -3i64..4, lam in prop::sample::select(vec![1i64, 2, -3])) {
        let h = Heisenberg::with_lambda(6, q(lam));
        let states = FockState::basis_upto(3);
        let u = b(&states[ui]);
        let a = b(&states[ai]);
        let left = h.vertex_mode(&u, n, &a).unwrap();
        let Some(wt) = left.homogeneous_weight() else { return Ok(()); };
        for t in FockState::basis(wt) {
            let bb = b(&t);
            prop_assert_eq!(h.form(&left, &bb), h.form(&a, &h.adjoint_mode(&u, n, &bb)));
        }
    }
}
