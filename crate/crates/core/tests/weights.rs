use num_rational::Ratio;
use num_traits::{Num, One, Zero};
use proptest::prelude::*;

use vlab::weights::{
    b_coefficients, check_b_coefficients, check_invariant_constraints, compute_invariants, conic_residual,
    d_orientation, make_weights, max_residual, parameterize_conic, reconstruct_dependent_weights,
    reference_invariants, BranchId, BranchParams, DependentWeights, InvariantSet, Sign, WeightName, WeightSet,
};
use vlab::{c, Error, C64, I};

type Q = Ratio<i128>;

fn sign(plus: bool) -> Sign {
    if plus {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn params(gamma: f64, e1: bool, e2: bool, d: bool) -> BranchParams {
    BranchParams::new(c(gamma, 0.0)).with_signs(sign(e1), sign(e2), sign(d))
}

/// The anisotropy with `Δ+ = 2cosh γ` on the sheet of the principal roots of `4 − Δ+²` and `Δ+² − 4`.
fn principal_gamma(dp: f64) -> C64 {
    if dp.abs() < 2.0 {
        c(0.0, -(dp / 2.0).acos())
    } else {
        c(dp / 2.0, 0.0).acosh()
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// B1–B4 over any commutative ring, inputs `[Δ+, Γ+, Γ−, Λ+, Ψ, Ω]`.
fn b_poly<T: Num + Copy>(v: [T; 6]) -> [T; 4] {
    let [dd, g, gn, l, p, o] = v;
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let four = two + two;
    let (l2, l3, p2, p3) = (l * l, l * l * l, p * p, p * p * p);
    let (g2, o2, o3, d2) = (g * g, o * o, o * o * o, dd * dd);
    let b1 = p
        * (l2 * gn * (g - dd) + l * p * (dd * g + gn * g - g2 + dd * o + gn * o - g * o)
            - p2 * (g2 + dd * o + two * g * o + two * o2))
        + l2 * p
        - p3;
    let b2 = l3 + l3 * g * (dd + two * gn - g) + l2 * p * (one - two * dd * gn - dd * g + gn * g - four * g * o)
        + l * p2
            * (dd * g - one - dd * gn - gn * g + d2 * gn * g + dd * o + gn * o - g * o - d2 * g * o
                - dd * gn * g * o
                + dd * g2 * o
                - o2
                - dd * g * o2
                - two * gn * g * o2
                + g2 * o2)
        - p3 * (one - two * dd * g + g2 + d2 * g2 - two * g * o + dd * g2 * o + two * o2 - four * dd * g * o2
            - four * g * o3);
    let b3 = l2 * p * (gn + d2 * gn - g - dd * gn * g + two * o) - l3 * (dd + gn - g)
        + l * p2
            * (dd + two * gn - two * g - d2 * g - two * dd * gn * g + dd * g2 - o - gn * g * o + dd * o2 + gn * o2
                - g * o2)
        + p3 * (two * dd * g2 - three * o + four * dd * g * o + g2 * o - dd * o2 + two * g * o2 - two * o3);
    let b4 = l2 * p * (gn - g + dd * g2 + two * g2 * o) - l3 * g * (one + gn * g)
        + l * p2
            * (gn - dd * gn * g + gn * g2 - o + dd * g * o - gn * g * o + dd * gn * g2 * o + g * o2 + gn * g2 * o2)
        - p3 * (o - two * dd * g * o + g2 * o + d2 * g2 * o - two * g * o2 + three * dd * g2 * o2 + two * g2 * o3);
    [b1, b2, b3, b4]
}

fn q(n: i128, d: i128) -> Q {
    Ratio::new(n, d)
}

/// Exact table columns at rational points, `[Δ+, Γ+, Γ−, Λ+, Ψ, Ω]`.
fn rational_columns() -> Vec<(&'static str, f64, [Q; 6])> {
    let mut out = Vec::new();
    for e1 in [1i128, -1] {
        let d = q(5, 2);
        out.push(("1A", e1 as f64, [d, d + e1, d + e1, Q::one(), Q::one(), Q::zero()]));
        let d = q(2, 7);
        let sr = q(24 * e1, 7);
        let three = q(3, 1);
        out.push((
            "1B",
            e1 as f64,
            [
                d,
                (three * d - sr) / 6,
                (sr - three * d) / 6,
                sr * 2 / (three * d + sr),
                Q::one(),
                (q(6, 1) - three * d * d - sr * d) / (three * d + sr),
            ],
        ));
        for l in [q(-1, 4), q(-4, 1)] {
            out.push(("2A", e1 as f64, [q(5, 2), q(e1, 1), q(e1, 1), l, l, Q::zero()]));
        }
        out.push(("2S", e1 as f64, [q(2 * e1, 1), q(-e1, 1), q(-e1, 1), -Q::one(), -Q::one(), Q::zero()]));
    }
    out
}

#[test]
fn b_coefficients_vanish_exactly_at_rational_points() {
    for (name, _, col) in rational_columns() {
        for (k, b) in b_poly(col).iter().enumerate() {
            assert!(b.is_zero(), "{name} B{} = {b}", k + 1);
        }
    }
}

#[test]
fn b_coefficients_match_rational_oracle_in_floating_point() {
    let cases = [
        (BranchId::B1A, 2.5, Sign::Plus, Sign::Plus),
        (BranchId::B1A, 2.5, Sign::Minus, Sign::Plus),
        (BranchId::B1B, 2.0 / 7.0, Sign::Plus, Sign::Plus),
        (BranchId::B1B, 2.0 / 7.0, Sign::Minus, Sign::Plus),
        (BranchId::B2A, 2.5, Sign::Plus, Sign::Plus),
        (BranchId::B2A, 2.5, Sign::Plus, Sign::Minus),
    ];
    for (b, dp, e1, e2) in cases {
        let gamma = principal_gamma(dp);
        let p = BranchParams::new(gamma).with_signs(e1, e2, Sign::Plus);
        let inv = reference_invariants(b, &p);
        let v = [inv.delta_p, inv.gamma_p, inv.gamma_m, inv.lambda_p, inv.psi, inv.omega];
        let generic = b_poly(v);
        let lib = b_coefficients(&inv);
        for k in 0..4 {
            assert!(lib[k].norm() < 1e-10, "{} B{}: {}", b.label(), k + 1, lib[k]);
            assert!((lib[k] - generic[k]).norm() < 1e-12);
        }
    }
}

#[test]
fn rational_columns_agree_with_reference_invariants() {
    let to_f = |x: Q| *x.numer() as f64 / *x.denom() as f64;
    for (name, e1, col) in rational_columns() {
        let (b, dp) = match name {
            "1A" => (BranchId::B1A, 2.5),
            "1B" => (BranchId::B1B, 2.0 / 7.0),
            "2A" => (BranchId::B2A, 2.5),
            _ => (BranchId::S2S, 2.0),
        };
        let e2 = if name == "2A" && col[4] == q(-4, 1) { Sign::Minus } else { Sign::Plus };
        let p = BranchParams::new(principal_gamma(dp)).with_signs(Sign::of(e1), e2, Sign::Plus);
        let inv = reference_invariants(b, &p);
        let got = [inv.delta_p, inv.gamma_p, inv.gamma_m, inv.lambda_p, inv.psi, inv.omega];
        for (g, x) in got.iter().zip(col) {
            assert!(rel(*g, c(to_f(x), 0.0)) < 1e-12, "{name} e1={e1}: {g} vs {x}");
        }
    }
}

#[test]
fn branch_1a_at_origin_is_the_permutation_pattern() {
    let w = make_weights(BranchId::B1A, &params(0.7, true, true, true), c(0.0, 0.0)).unwrap();
    for n in [WeightName::APlus, WeightName::AMinus, WeightName::CPlus, WeightName::CMinus, WeightName::G, WeightName::H, WeightName::HTilde] {
        assert!((w.get(n) - 1.0).norm() < 1e-15, "{}: {}", n.symbol(), w.get(n));
    }
    for n in [WeightName::BPlus, WeightName::BMinus, WeightName::D, WeightName::DTilde, WeightName::F] {
        assert!(w.get(n).norm() < 1e-15, "{}: {}", n.symbol(), w.get(n));
    }
    assert_eq!(w.c_tilde_plus, w.c_plus);
}

#[test]
fn branch_2b_sign_structure() {
    for e2 in [Sign::Plus, Sign::Minus] {
        let p = BranchParams::new(c(0.0, 0.0)).with_signs(Sign::Plus, e2, Sign::Plus);
        let w = make_weights(BranchId::B2B, &p, c(0.23, 0.11)).unwrap();
        assert_eq!(w.b_minus, -w.b_plus);
        let expect = -(I * std::f64::consts::FRAC_PI_3 * e2.value()).exp() * w.d;
        assert!((w.d_tilde - expect).norm() < 1e-14);
    }
}

#[test]
fn branch_1b_example_point_matches_high_precision_table() {
    let w = make_weights(BranchId::B1B, &params(0.9, true, true, true), c(0.31, 0.0)).unwrap();
    let inv = compute_invariants(&w).unwrap();
    let frozen = [
        (inv.delta_p, c(2.86617277089754877568, 0.0)),
        (inv.delta_m, c(-1.43308638544877438784, 1.77797912374580468990)),
        (inv.lambda_p, c(0.29209824623958900990, 0.70631091384951319088)),
        (inv.omega, c(-2.27029042524761172729, -0.24642998531743439153)),
        (inv.gamma_p, c(1.43308638544877438784, -0.59265970791526822997)),
        (inv.psi, c(1.0, 0.0)),
    ];
    for (got, want) in frozen {
        assert!(rel(got, want) < 1e-10, "{got} vs {want}");
    }
    let (dev, name) = inv.max_relative_deviation(&reference_invariants(BranchId::B1B, &params(0.9, true, true, true)));
    assert!(dev < 1e-10, "{name}: {dev}");
}

#[test]
fn branch_1a_invariant_column() {
    let g = 0.8;
    let w = make_weights(BranchId::B1A, &params(g, true, true, true), c(0.2, 0.3)).unwrap();
    let inv = compute_invariants(&w).unwrap();
    let dp = c(2.0 * g.cosh(), 0.0);
    assert!(rel(inv.delta_p, dp) < 1e-12 && rel(inv.delta_m, dp) < 1e-12);
    assert!(rel(inv.psi, c(1.0, 0.0)) < 1e-12 && inv.omega.norm() < 1e-12 && rel(inv.lambda_p, c(1.0, 0.0)) < 1e-12);
}

#[test]
fn branch_2b_invariant_column() {
    let w = make_weights(BranchId::B2B, &BranchParams::default(), c(0.17, -0.08)).unwrap();
    let inv = compute_invariants(&w).unwrap();
    let s3 = 3f64.sqrt();
    let omega = (I * std::f64::consts::FRAC_PI_3).exp();
    assert!(rel(inv.delta_p, c(s3, 0.0)) < 1e-12);
    assert!(rel(inv.gamma_p, c(1.0 / s3, 0.0)) < 1e-12);
    assert!(inv.theta_p.norm() < 1e-12);
    assert!(rel(inv.psi, -omega) < 1e-12);
}

#[test]
fn equal_d_weights_give_unit_psi() {
    let mut w = make_weights(BranchId::B1B, &params(0.6, true, true, true), c(0.3, 0.2)).unwrap();
    w.d_tilde = w.d;
    assert_eq!(compute_invariants(&w).unwrap().psi, c(1.0, 0.0));
}

#[test]
fn reference_column_examples() {
    let dp: f64 = 1.3;
    let gamma = principal_gamma(dp);
    let inv = reference_invariants(BranchId::B1B, &BranchParams::new(gamma));
    let dm = (-dp + 3f64.sqrt() * (4.0 - dp * dp).sqrt()) / 2.0;
    assert!(rel(inv.delta_m, c(dm, 0.0)) < 1e-12);
    assert!(max_residual(&check_b_coefficients(&inv)) < 1e-10);

    for e2 in [Sign::Plus, Sign::Minus] {
        let dp = c(2.0 * 1.1f64.cosh(), 0.0);
        let inv = reference_invariants(BranchId::B2A, &params(1.1, true, e2 == Sign::Plus, true));
        let psi = (2.0 - dp * dp + e2.value() * dp * (dp * dp - 4.0).sqrt()) / 2.0;
        assert!(rel(inv.psi, psi) < 1e-12);
        assert!(max_residual(&check_b_coefficients(&inv)) < 1e-10);
    }

    for e1 in [Sign::Plus, Sign::Minus] {
        let inv = reference_invariants(BranchId::S2S, &BranchParams::default().with_signs(e1, Sign::Plus, Sign::Plus));
        assert_eq!(inv.delta_p, c(2.0 * e1.value(), 0.0));
        assert_eq!((inv.lambda_p, inv.psi), (c(-1.0, 0.0), c(-1.0, 0.0)));
    }
}

#[test]
fn reference_sets_satisfy_constraints_tightly() {
    for b in [BranchId::B1A, BranchId::B2B] {
        for e1 in [true, false] {
            for e2 in [true, false] {
                let inv = reference_invariants(b, &params(0.9, e1, e2, true));
                assert!(max_residual(&check_invariant_constraints(&inv)) < 1e-12);
            }
        }
    }
}

fn named(rs: &[vlab::weights::Residual], name: &str) -> f64 {
    rs.iter().find(|r| r.name == name).unwrap().value
}

#[test]
fn broken_invariants_are_detected() {
    let base = reference_invariants(BranchId::B1A, &params(0.9, true, true, true));
    let mut inv = base;
    inv.psi += 0.1;
    let got = named(&check_invariant_constraints(&inv), "lambda_product");
    assert!((got - (base.lambda_p * base.lambda_m - inv.psi * inv.psi).norm()).abs() < 1e-15 && got > 0.0);

    let base = reference_invariants(BranchId::B1B, &params(0.9, true, true, true));
    let mut inv = base;
    inv.gamma_m += 0.05;
    assert!(b_coefficients(&inv)[0].norm() > 1e-4);
    assert!(named(&check_b_coefficients(&inv), "gamma_relation") > 1e-4);
}

#[test]
fn branch_2_reconstruction_keeps_charge_ratios() {
    for b in [BranchId::B2A, BranchId::B2B] {
        let p = params(1.1, true, true, true);
        let w = make_weights(b, &p, c(0.27, 0.13)).unwrap();
        let inv = reference_invariants(b, &p);
        let r = reconstruct_dependent_weights(w.a_plus, w.b_plus, w.c_plus, &inv, d_orientation(b, &p).unwrap()).unwrap();
        assert!(rel(r.a_minus / w.a_plus, c(1.0, 0.0)) < 1e-10);
        assert!(rel(r.c_minus / w.c_plus, c(1.0, 0.0)) < 1e-10);
        if b == BranchId::B2B {
            assert!(rel(r.b_minus, -w.b_plus) < 1e-10);
        }
    }
}

#[test]
fn conic_examples() {
    assert_eq!(conic_residual(c(1.0, 0.0), c(0.0, 0.0), c(1.7, 0.0)), c(0.0, 0.0));
    assert_eq!(conic_residual(c(2.0, 0.0), c(0.0, 0.0), c(1.7, 0.0)), c(3.0, 0.0));
}

#[test]
fn poles_are_reported() {
    let p = params(0.9, true, true, true);
    let err = make_weights(BranchId::B1A, &p, c(-0.9, 0.0)).unwrap_err();
    assert!(matches!(err, Error::Pole { .. }), "{err:?}");
}

fn lambda() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn branch() -> impl Strategy<Value = BranchId> {
    prop::sample::select(BranchId::ALL.to_vec())
}

fn family() -> impl Strategy<Value = BranchId> {
    prop::sample::select(BranchId::FAMILIES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn invariants_do_not_depend_on_lambda(b in branch(), g in 0.2..1.5f64, e1: bool, e2: bool, d: bool, l in lambda()) {
        let p = params(g, e1, e2, d);
        if let Ok(w) = make_weights(b, &p, l) {
            if let Ok(inv) = compute_invariants(&w) {
                let (dev, name) = inv.max_relative_deviation(&reference_invariants(b, &p));
                prop_assert!(dev <= 1e-10, "{} {name}: {dev}", b.label());
            }
        }
    }

    #[test]
    fn invariants_do_not_depend_on_lambda_at_complex_anisotropy(
        b in prop::sample::select(vec![BranchId::B1A, BranchId::B1B, BranchId::B2A]),
        gr in -1.5..1.5f64,
        gi in -2.5..2.5f64,
        e1: bool,
        e2: bool,
        l in lambda(),
    ) {
        prop_assume!(gr.abs() > 0.1 || gi.abs() > 0.1);
        let p = BranchParams::new(c(gr, gi)).with_signs(sign(e1), sign(e2), Sign::Plus);
        let reference = reference_invariants(b, &p);
        if let Ok(w) = make_weights(b, &p, l) {
            if let Ok(inv) = compute_invariants(&w) {
                prop_assert!(inv.max_relative_deviation(&reference).0 <= 1e-7, "{:?} {:?}", b, inv.max_relative_deviation(&reference));
            }
        }
    }

    #[test]
    fn reference_sets_satisfy_every_constraint(b in branch(), g in 0.2..1.5f64, gi in -0.5..0.5f64, e1: bool, e2: bool) {
        let p = BranchParams::new(c(g, gi)).with_signs(sign(e1), sign(e2), Sign::Plus);
        let inv = reference_invariants(b, &p);
        prop_assert!(max_residual(&check_invariant_constraints(&inv)) <= 1e-10);
        prop_assert!(max_residual(&check_b_coefficients(&inv)) <= 1e-10);
    }

    #[test]
    fn reconstruction_inverts_make_weights(b in family(), g in 0.2..1.5f64, e1: bool, e2: bool, d: bool, l in lambda()) {
        let p = params(g, e1, e2, d);
        let Ok(w) = make_weights(b, &p, l) else { return Ok(()) };
        let orient = d_orientation(b, &p).unwrap();
        let inv = reference_invariants(b, &p);
        match reconstruct_dependent_weights(w.a_plus, w.b_plus, w.c_plus, &inv, orient) {
            Ok(r) => {
                let scale = w.max_norm().max(1.0);
                for (x, y) in r.values().iter().zip(DependentWeights::of(&w).values()) {
                    prop_assert!((x - y).norm() / scale <= 1e-10, "{}: {x} vs {y}", b.label());
                }
            }
            Err(Error::DegenerateWeight(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn parameterization_lies_on_the_conic(l in lambda(), g in 0.1..2.0f64) {
        let gamma = c(g, 0.0);
        let (x, y) = parameterize_conic(l, gamma);
        prop_assert!(conic_residual(x, y, 2.0 * gamma.cosh()).norm() <= 1e-12 * (x.norm_sqr() + y.norm_sqr()).max(1.0));
    }

    #[test]
    fn branch_1a_is_charge_symmetric(g in 0.2..1.5f64, e1: bool, e2: bool, d: bool, l in lambda()) {
        if let Ok(w) = make_weights(BranchId::B1A, &params(g, e1, e2, d), l) {
            prop_assert_eq!(w.a_plus, w.a_minus);
            prop_assert_eq!(w.b_plus, w.b_minus);
            prop_assert_eq!(w.c_plus, w.c_minus);
        }
    }

    #[test]
    fn branch_2b_has_opposite_b_weights(e1: bool, e2: bool, d: bool, l in lambda()) {
        if let Ok(w) = make_weights(BranchId::B2B, &params(0.0, e1, e2, d), l) {
            prop_assert_eq!(w.b_minus, -w.b_plus);
        }
    }

    #[test]
    fn invariants_agree_at_difference_points(b in family(), g in 0.2..1.5f64, e1: bool, e2: bool, l1 in lambda(), l2 in lambda()) {
        let p = params(g, e1, e2, true);
        let sets: Vec<InvariantSet> = [l1 - l2, l1, l2]
            .iter()
            .filter_map(|&l| make_weights(b, &p, l).ok())
            .filter_map(|w| compute_invariants(&w).ok())
            .collect();
        for s in &sets[1..] {
            prop_assert!(s.max_relative_deviation(&sets[0]).0 <= 1e-10);
        }
    }

    #[test]
    fn charge_conjugate_names_are_an_involution(i in 0usize..14) {
        let n = WeightName::ALL[i];
        prop_assert_eq!(n.charge_conjugate().charge_conjugate(), n);
    }

    #[test]
    fn weight_accessors_round_trip(i in 0usize..14, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let mut w = WeightSet::splat(c(0.5, 0.0));
        let n = WeightName::ALL[i];
        *w.get_mut(n) = c(re, im);
        prop_assert_eq!(w.get(n), c(re, im));
    }
}
