//! Property tests for the group law, closed-form profiles and the linearized operator.

use std::sync::{Arc, OnceLock};

use hw_core::heisenberg::{distance, gauge, group_mul};
use hw_core::linearized::{dual_pairing, LinearizedLimit};
use hw_core::spectral::{ClosedForm, ExpTerm, SigmaProfile};
use hw_core::{HPoint, C64};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = HPoint> {
    (-3.0..3.0f64, -3.0..3.0f64, -5.0..5.0f64).prop_map(|(x, y, s)| HPoint::new(x, y, s))
}

fn close(a: HPoint, b: HPoint, tol: f64) -> bool {
    (a.x - b.x).abs() < tol && (a.y - b.y).abs() < tol && (a.s - b.s).abs() < tol
}

fn exp_poly() -> impl Strategy<Value = ClosedForm> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0u32..4, 0.6..2.5f64), 1..4).prop_map(|terms| {
        ClosedForm::ExpPoly {
            terms: terms
                .into_iter()
                .map(|(re, im, power, rate)| ExpTerm {
                    coeff: C64::new(re, im),
                    power,
                    rate: C64::new(rate, 0.0),
                })
                .collect(),
        }
    })
}

fn operator() -> &'static LinearizedLimit {
    static OP: OnceLock<LinearizedLimit> = OnceLock::new();
    OP.get_or_init(|| LinearizedLimit::default_grid().expect("default operator"))
}

fn profile(form: ClosedForm) -> SigmaProfile {
    let grid = Arc::clone(operator().grid());
    SigmaProfile::from_closed(grid, form)
        .expect("valid closed form")
        .into_sampled()
}

proptest! {
    #[test]
    fn group_law_is_associative(a in point(), b in point(), c in point()) {
        let left = group_mul(group_mul(a, b), c);
        let right = group_mul(a, group_mul(b, c));
        prop_assert!(close(left, right, 1e-10));
    }

    #[test]
    fn inverse_cancels(a in point()) {
        prop_assert!(close(group_mul(a, a.inverse()), HPoint::origin(), 1e-12));
        prop_assert!(close(group_mul(a.inverse(), a), HPoint::origin(), 1e-12));
    }

    #[test]
    fn dilation_is_an_automorphism(a in point(), b in point(), lambda in 0.1..4.0f64) {
        let left = group_mul(a, b).dilate(lambda);
        let right = group_mul(a.dilate(lambda), b.dilate(lambda));
        prop_assert!(close(left, right, 1e-9));
        prop_assert!((gauge(a.dilate(lambda)) - lambda * gauge(a)).abs() < 1e-10 * (1.0 + gauge(a)));
    }

    #[test]
    fn distance_is_left_invariant(a in point(), b in point(), c in point()) {
        let d0 = distance(a, b);
        let d1 = distance(group_mul(c, a), group_mul(c, b));
        prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0));
        prop_assert!((distance(a, b) - distance(b, a)).abs() < 1e-9 * (1.0 + d0));
    }

    #[test]
    fn closed_form_sum_evaluates_pointwise(f in exp_poly(), g in exp_poly(), sigma in 0.0..20.0f64) {
        let sum = f.add(&g).expect("exp-polys add");
        let want = f.eval(sigma) + g.eval(sigma);
        prop_assert!((sum.eval(sigma) - want).norm() < 1e-12 * (1.0 + want.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linearized_operator_is_symmetric(f in exp_poly(), g in exp_poly()) {
        let op = operator();
        let (h, k) = (profile(f), profile(g));
        let lhk = dual_pairing(&op.apply(&h).unwrap(), &k).unwrap();
        let lkh = dual_pairing(&op.apply(&k).unwrap(), &h).unwrap();
        let scale = op.form(&h).unwrap().abs().max(op.form(&k).unwrap().abs()).max(1e-3);
        prop_assert!((lhk - lkh).abs() < 1e-6 * scale, "{lhk} vs {lkh}");
    }

    #[test]
    fn form_is_real_quadratic(f in exp_poly(), t in -2.0..2.0f64) {
        let op = operator();
        let h = profile(f);
        let base = op.form(&h).unwrap();
        let scaled = op.form(&h.scale(C64::new(t, 0.0))).unwrap();
        prop_assert!((scaled - t * t * base).abs() < 1e-9 * (1.0 + t * t * base.abs()));
    }
}
