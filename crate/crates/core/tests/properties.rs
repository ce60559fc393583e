use std::f64::consts::PI;

use proptest::prelude::*;
use univalent::analytic::Analytic;
use univalent::constants::PaperConstants;
use univalent::funclang::{parse, Function, FunctionSpec};
use univalent::loewner::{becker_dilatation, betker_dilatation, criteria_report_spec, verification_grid, ChainR};
use univalent::norms::{norm, norm_spec, FieldKind, NormOptions};
use univalent::numerics::{c64, jet_pow, Complex64, Jet3, PowerSeries};
use univalent::subordination::RMember;
use univalent::transforms::{AlexanderOf, TransformOp, Transformed};

fn small_complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| c64(a, b))
}

fn disk_point(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..2.0 * PI).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_exp_inverts_log(c in prop::collection::vec(small_complex(0.3), 1..6)) {
        let mut coeffs = vec![c64(1.0, 0.0)];
        coeffs.extend(c);
        let s = PowerSeries::new(coeffs).unwrap().pad_polynomial(32);
        let back = s.log().unwrap().exp();
        prop_assert!(back.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn jet_powers_add(f in small_complex(2.0), d in prop::array::uniform3(small_complex(1.0)),
                      a in small_complex(1.5), b in small_complex(1.5)) {
        prop_assume!(f.norm() > 0.2);
        let x = Jet3::new(f, d[0], d[1], d[2]);
        let lhs = jet_pow(x, a, 0).unwrap() * jet_pow(x, b, 0).unwrap();
        let rhs = jet_pow(x, a + b, 0).unwrap();
        for (u, v) in lhs.as_array().into_iter().zip(rhs.as_array()) {
            prop_assert!(close(u, v, 1e-9), "{u} vs {v}");
        }
    }

    #[test]
    fn series_power_agrees_with_jet_power(b1 in small_complex(0.4), b2 in small_complex(0.2),
                                          alpha in small_complex(1.5), z in disk_point(0.5)) {
        let s = PowerSeries::new(vec![c64(1.0, 0.0), b1, b2]).unwrap().pad_polynomial(128);
        let from_series = s.pow(alpha).unwrap().eval_jet(z);
        let from_jet = s.eval_jet(z).powc(alpha, 0).unwrap();
        for (u, v) in from_series.as_array().into_iter().zip(from_jet.as_array()) {
            prop_assert!(close(u, v, 1e-9), "{u} vs {v}");
        }
    }

    #[test]
    fn jets_match_finite_differences(k in 0usize..6, z in disk_point(0.6)) {
        let f = Function::expr(["z/(1-z)^2", "exp(z)*z", "-z-2*log(1-z)", "z+z^3/3", "sqrt(1+z)*z", "z/(1-0.5*z)"][k]).unwrap();
        let j = f.jet(z).unwrap();
        let h = 1e-4;
        let v = |u: Complex64| f.value(u).unwrap();
        let d1 = (v(z + h) - v(z - h)) / (2.0 * h);
        let d2 = (v(z + h) - 2.0 * v(z) + v(z - h)) / (h * h);
        prop_assert!(close(j.f1, d1, 1e-6));
        prop_assert!(close(j.f2, d2, 1e-4));
    }

    #[test]
    fn display_round_trips(a in small_complex(3.0), b in small_complex(3.0), n in 1i32..5, k in 0usize..4) {
        let formula = match k {
            0 => format!("({a})*z + ({b})*z^{n}"),
            1 => format!("z/(1-({a})*z/4)^{n}"),
            2 => format!("exp(({b})*z)*z - log(1+z/2)"),
            _ => format!("(z+({a}))^(({b})) - sqrt(1+z)"),
        };
        let ast = parse(&formula).unwrap();
        let again = parse(&ast.to_string()).unwrap();
        prop_assert_eq!(&again, &ast);
    }

    #[test]
    fn mobius_maps_have_zero_schwarzian(a in small_complex(2.0), b in small_complex(2.0), z in disk_point(0.5)) {
        // (a z + b) / (c z + 1) with |c| < 1 keeps the pole outside the disk
        let c = a / (2.0 * a.norm().max(1.0));
        let f = Function::expr(&format!("(({a})*z+({b}))/(({c})*z+1)")).unwrap();
        prop_assume!((a - b * c).norm() > 0.1);
        prop_assert!(f.schwarzian(z).unwrap().norm() < 1e-8);
    }

    #[test]
    fn betker_with_unit_partner_is_becker(p in small_complex(5.0)) {
        prop_assume!((p + 1.0).norm() > 1e-6);
        let a = betker_dilatation(p, c64(1.0, 0.0)).unwrap();
        let b = becker_dilatation(p).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * b.max(1.0));
    }

    #[test]
    fn betker_is_contractive_on_the_right_half_plane(p in small_complex(5.0), q in small_complex(5.0)) {
        prop_assume!(p.re > 1e-3 && q.re > 1e-3);
        prop_assert!(betker_dilatation(p, q).unwrap() < 1.0);
    }

    #[test]
    fn j_alpha_stays_in_the_sector(seed in 0u64..1000, degree in 1usize..5, alpha in -1.0f64..1.0) {
        let consts = PaperConstants::compute().unwrap();
        let f = RMember::random(seed, degree);
        let bound = alpha.abs() * consts.beta0 * PI / 2.0 + 1e-6;
        for z in verification_grid(8, 32, 0.99).into_iter().skip(1) {
            let q = f.value(z).unwrap() / z;
            let a = (c64(alpha, 0.0) * q.ln()).im.abs();
            prop_assert!(a <= bound, "{a} > {bound} at {z}");
        }
    }
}

#[test]
fn chain_dilatation_decreases_in_t() {
    let grid = verification_grid(24, 96, 0.999);
    for k in 0..10 {
        let chain = ChainR::new(RMember::random(77 + k, 1 + k as usize % 4)).unwrap();
        let mut last = f64::INFINITY;
        for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let (min_re, max_arg) = chain.herglotz_extremes(&grid, t).unwrap();
            assert!(min_re > 0.0);
            assert!(max_arg <= last + 1e-12, "member {k}, t = {t}: {max_arg} > {last}");
            last = max_arg;
        }
    }
}

#[test]
fn sector_gamma_of_phi_and_psi_approaches_one() {
    for name in ["phi", "psi"] {
        let r = criteria_report_spec(&FunctionSpec::catalog(name), c64(0.2, 0.0), &NormOptions::default()).unwrap();
        let gamma = r.item("sector_gamma").unwrap().measured.unwrap();
        assert!(gamma >= 1.0 - 1e-3 && gamma <= 1.0, "{name}: {gamma}");
    }
}

#[test]
fn alexander_quadrature_matches_the_closed_form_transform() {
    let phi = Function::catalog("phi", &[]).unwrap();
    let direct = Transformed::new(phi.clone(), c64(1.0, 0.0), TransformOp::Alexander).unwrap();
    let quad = AlexanderOf(phi);
    for z in [c64(0.3, 0.1), c64(-0.5, 0.4), c64(0.0, -0.8)] {
        let (a, b) = (direct.value(z).unwrap(), quad.value(z).unwrap());
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        let (a, b) = (direct.pre_schwarzian(z).unwrap(), quad.pre_schwarzian(z).unwrap());
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn koebe_norm_grows_with_the_radius() {
    let mut last = 0.0;
    for r_max in [0.5, 0.9, 0.99, 0.9999] {
        let opts = NormOptions { n_radial: 40, n_angular: 90, r_max, ..NormOptions::default() };
        let v = norm_spec(&FunctionSpec::catalog("koebe"), FieldKind::PreSchwarzian, &opts).unwrap().value;
        assert!(v >= last);
        last = v;
    }
    assert!((last - 6.0).abs() < 1e-2);
}

#[test]
fn identity_has_vanishing_norms() {
    let id = Function::expr("z").unwrap();
    let opts = NormOptions { n_radial: 10, n_angular: 20, ..NormOptions::default() };
    assert_eq!(norm(&id, FieldKind::PreSchwarzian, &opts).unwrap().value, 0.0);
    assert_eq!(norm(&id, FieldKind::Schwarzian, &opts).unwrap().value, 0.0);
}
