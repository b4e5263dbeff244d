mod common;

use common::{bounded, c, mat_gap, op_gap, rng};
use opmod_core::calculus::{
    apply_function, compose_check, exp_op, ln_op, power_complex, power_real, resolvent,
    spectral_mapping_check, spectrum,
};
use opmod_core::linalg::{self, CMat};
use opmod_core::regular::localize_regular;
use opmod_core::{
    localize, localize_op, sample, z_from_bounded, AdjointableOp, CompatibleSet, Complex64,
    RegularOp, ScalarFn, DEFAULT_TOL,
};
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = DEFAULT_TOL;

fn apply(f: &ScalarFn, r: &RegularOp, g: &CompatibleSet) -> AdjointableOp {
    bounded(&apply_function(f, r, g, TOL).unwrap())
}

fn reg(rng: &mut impl Rng, kind: usize) -> RegularOp {
    let desc = sample::module(rng, 3, 2, 3);
    let t = match kind {
        0 => sample::normal(rng, &desc),
        1 => sample::selfadjoint(rng, &desc),
        _ => sample::positive(rng, &desc, 0.2),
    };
    z_from_bounded(&t)
}

/// Functions of the registry that are bounded and defined on the spectra sampled for `kind`.
fn registry_for(kind: usize) -> Vec<ScalarFn> {
    let mut names = vec!["id", "conj", "sq", "exp", "zmap"];
    if kind == 2 {
        names.extend(["sqrt", "log", "recip", "powk(1.5)"]);
    }
    names
        .into_iter()
        .map(|n| ScalarFn::from_registry(n).unwrap())
        .collect()
}

fn set_for(kind: usize) -> CompatibleSet {
    match kind {
        0 => CompatibleSet::plane(),
        1 => CompatibleSet::real_line(),
        _ => CompatibleSet::positive_reals(),
    }
}

#[test]
fn homomorphism_laws_over_the_registry() {
    let mut r = rng(20);
    let mut worst: f64 = 0.0;
    for trial in 0..30 {
        let kind = trial % 3;
        let t = reg(&mut r, kind);
        let g = set_for(kind);
        let fs = registry_for(kind);
        for f in &fs {
            let ft = apply(f, &t, &g);
            worst = worst.max(apply(&f.conjugate(), &t, &g).distance(&ft.adjoint()));
            for h in &fs {
                let ht = apply(h, &t, &g);
                worst = worst.max(apply(&f.mul(h), &t, &g).distance(&(&ft * &ht)));
                worst = worst.max(apply(&f.add(h), &t, &g).distance(&(&ft + &ht)));
            }
        }
        worst = worst.max(apply(&ScalarFn::identity(), &t, &g).distance(&bounded(&t)));
    }
    assert!(worst <= 1e-9, "worst residual {worst}");
}

#[test]
fn registry_functions_match_direct_matrix_oracles() {
    let mut r = rng(21);
    for _ in 0..40 {
        let desc = sample::module(&mut r, 3, 2, 3);
        let t = sample::positive(&mut r, &desc, 0.2);
        let reg = z_from_bounded(&t);
        let g = CompatibleSet::positive_reals();
        let sq = apply(&ScalarFn::square(), &reg, &g);
        assert!(sq.distance(&(&t * &t)) <= 1e-9);
        let recip = apply(&ScalarFn::recip(), &reg, &g);
        assert!((&recip * &t).distance(&AdjointableOp::identity(&desc)) <= 1e-9);
        let root = apply(&ScalarFn::sqrt(), &reg, &g);
        assert!((&root * &root).distance(&t) <= 1e-9);
        let e = apply(&ScalarFn::exp(), &reg, &g);
        for (b, tb) in e.blocks().iter().zip(t.blocks()) {
            assert!(mat_gap(b, &tb.clone().exp()) <= 1e-9 * linalg::spectral_norm(b).max(1.0));
        }
        let z = apply(&ScalarFn::zmap(), &reg, &g);
        assert!(z.distance(reg.z()) <= 1e-10);
    }
}

#[test]
fn composition_matches_composed_function() {
    let mut r = rng(22);
    let cases: Vec<(ScalarFn, ScalarFn, usize)> = vec![
        (ScalarFn::sqrt(), ScalarFn::square(), 2),
        (ScalarFn::log(), ScalarFn::exp(), 1),
        (ScalarFn::exp(), ScalarFn::square(), 0),
        (ScalarFn::recip(), ScalarFn::exp(), 0),
        (ScalarFn::zmap(), ScalarFn::conj(), 0),
    ];
    for _ in 0..20 {
        for (g, f, kind) in &cases {
            let t = reg(&mut r, *kind);
            let inner_set = match g.name() {
                "sqrt" => CompatibleSet::nonnegative_reals(),
                "log" => CompatibleSet::positive_reals(),
                "recip" => CompatibleSet::punctured(vec![c(0.0, 0.0)]).unwrap(),
                _ => CompatibleSet::plane(),
            };
            let (nested, composed) =
                compose_check(g, f, &t, &set_for(*kind), &inner_set, TOL).unwrap();
            assert!(
                op_gap(&nested, &composed) <= 1e-9,
                "{}∘{}",
                g.name(),
                f.name()
            );
        }
    }
}

#[test]
fn spectral_mapping_on_random_normals() {
    let mut r = rng(23);
    for _ in 0..50 {
        let t = reg(&mut r, 0);
        for f in registry_for(0) {
            let (lhs, rhs) = spectral_mapping_check(&f, &t, &CompatibleSet::plane(), TOL).unwrap();
            assert!(
                lhs.hausdorff(&rhs) <= 1e-8,
                "{}: {}",
                f.name(),
                lhs.hausdorff(&rhs)
            );
        }
    }
}

#[test]
fn ln_and_exp_invert_each_other() {
    let mut r = rng(24);
    for _ in 0..50 {
        let s = reg(&mut r, 1);
        let back = ln_op(&exp_op(&s, TOL).unwrap(), TOL).unwrap();
        assert!(op_gap(&back, &s) <= 1e-9);
        let p = reg(&mut r, 2);
        let back = exp_op(&ln_op(&p, TOL).unwrap(), TOL).unwrap();
        assert!(op_gap(&back, &p) <= 1e-9);
        assert!(exp_op(&s, TOL).unwrap().flags().strictly_positive);
    }
}

#[test]
fn imaginary_powers_form_a_unitary_group() {
    let mut r = rng(25);
    for _ in 0..40 {
        let t = reg(&mut r, 2);
        let desc = t.domain().clone();
        let one = AdjointableOp::identity(&desc);
        let (s1, s2) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let u1 = bounded(&power_complex(&t, c(0.0, s1), TOL).unwrap());
        let u2 = bounded(&power_complex(&t, c(0.0, s2), TOL).unwrap());
        let u12 = bounded(&power_complex(&t, c(0.0, s1 + s2), TOL).unwrap());
        assert!((&u1.adjoint() * &u1).distance(&one) <= 1e-10);
        assert!((&u1 * &u2).distance(&u12) <= 1e-9);
        // Norm continuity: ‖T^{i(s+h)} − T^{is}‖ ≤ |h| ‖ln T‖.
        let h = 1e-3;
        let near = bounded(&power_complex(&t, c(0.0, s1 + h), TOL).unwrap());
        let ln_norm = bounded(&ln_op(&t, TOL).unwrap()).norm();
        assert!(near.distance(&u1) <= h * ln_norm + 1e-12);
    }
}

#[test]
fn resolvent_identity() {
    let mut r = rng(26);
    for _ in 0..50 {
        let t = reg(&mut r, 0);
        let sigma = spectrum(&t, TOL).unwrap();
        let mut off = || loop {
            let p = sample::gaussian(&mut r) * 2.0;
            if sigma.values().iter().all(|s| (s - p).norm() > 0.1) {
                break p;
            }
        };
        let (cc, d) = (off(), off());
        let rc = resolvent(&t, cc, TOL).unwrap();
        let rd = resolvent(&t, d, TOL).unwrap();
        let lhs = &rc - &rd;
        let rhs = (&rc * &rd).scale(cc - d);
        assert!(lhs.distance(&rhs) <= 1e-9 * rc.norm().max(1.0) * rd.norm().max(1.0));
        // and it is the inverse of T − c
        let shifted = &bounded(&t) - &AdjointableOp::scalar(t.domain(), cc);
        assert!(
            (&shifted * &rc).distance(&AdjointableOp::identity(t.domain()))
                <= 1e-9 * rc.norm().max(1.0)
        );
    }
}

#[test]
fn imaginary_power_orbit_is_holomorphic() {
    // F(z) = S^{iz} v is entire; its central differences satisfy ∂F/∂y = i ∂F/∂x.
    let mut r = rng(27);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let s = reg(&mut r, 2);
        let v = sample::vector(&mut r, s.domain());
        let orbit = |z: Complex64| {
            let u = bounded(&power_complex(&s, c(0.0, 1.0) * z, TOL).unwrap());
            u.apply(&v).unwrap().to_complex_coords()
        };
        let z0 = c(r.random_range(-2.0..2.0), r.random_range(-0.5..0.5));
        let dx = (orbit(z0 + h) - orbit(z0 - h)) / c(2.0 * h, 0.0);
        let dy = (orbit(z0 + c(0.0, h)) - orbit(z0 - c(0.0, h))) / c(2.0 * h, 0.0);
        worst = worst.max((dy - dx * c(0.0, 1.0)).norm() / v.norm().max(1.0));
    }
    assert!(worst <= 1e-5, "Cauchy–Riemann residual {worst}");
}

#[test]
fn calculus_of_localised_operators_is_the_spectral_sum() {
    let mut r = rng(28);
    for _ in 0..50 {
        let desc = sample::module(&mut r, 3, 2, 3);
        let t = sample::selfadjoint(&mut r, &desc);
        let full = r.random_bool(0.5);
        let rho = sample::density(&mut r, desc.algebra(), full);
        let space = localize(&desc, &rho).unwrap();
        if space.dimension() == 0 {
            continue;
        }
        let t_loc = localize_op(&t, &space).unwrap();
        let via_calculus = apply(
            &ScalarFn::exp(),
            &z_from_bounded(&AdjointableOp::from_matrix(t_loc.clone()).unwrap()),
            &CompatibleSet::real_line(),
        );
        let (vals, vecs) = linalg::hermitian_eigen(&t_loc);
        let mut spectral_sum = CMat::zeros(vals.len(), vals.len());
        for (j, lambda) in vals.iter().enumerate() {
            let col = vecs.column(j);
            spectral_sum += (col * col.adjoint()) * c(lambda.exp(), 0.0);
        }
        assert!(
            mat_gap(&via_calculus.blocks()[0], &spectral_sum)
                <= 1e-9 * spectral_sum.norm().max(1.0)
        );
        // The z-transform commutes with localisation.
        let reg = z_from_bounded(&t);
        let lhs = localize_regular(&reg, &space).unwrap();
        assert!(mat_gap(&lhs, &opmod_core::regular::z_transform_matrix(&t_loc)) <= 1e-9);
    }
}

#[test]
fn calculus_separates_functions_that_differ_on_the_spectrum() {
    let lambdas = [c(0.5, 0.0), c(-1.0, 2.0), c(3.0, -1.0)];
    let m = CMat::from_diagonal(&nalgebra::DVector::from_row_slice(&lambdas));
    let mut r = rng(29);
    let u = sample::unitary_matrix(&mut r, 3);
    let t = z_from_bounded(&AdjointableOp::from_matrix(&u * m * u.adjoint()).unwrap());
    for (k, target) in lambdas.iter().enumerate() {
        let gap = 0.25 * (k + 1) as f64;
        let at = *target;
        let bump = ScalarFn::total("bump", move |z| {
            if (z - at).norm() < 1e-6 {
                c(gap, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let f = ScalarFn::square();
        let g = f.add(&bump);
        let distance = apply(&f, &t, &CompatibleSet::plane()).distance(&apply(
            &g,
            &t,
            &CompatibleSet::plane(),
        ));
        // The eigenprojection has norm one.
        assert!(distance >= gap - 1e-9, "{distance} < {gap}");
    }
}

fn one_plus_inverse_root() -> ScalarFn {
    ScalarFn::total("(1+t)^-1/2", |t| c(1.0, 0.0) / (c(1.0, 0.0) + t).sqrt())
}

#[test]
fn natural_multipliers_balance() {
    let mut r = rng(30);
    let fs = [
        one_plus_inverse_root(),
        ScalarFn::total("exp(-t)", |t| (-t).exp()),
        ScalarFn::powk(1.0),
    ];
    let g = CompatibleSet::nonnegative_reals();
    for _ in 0..50 {
        let desc = sample::module(&mut r, 3, 2, 3);
        let t = sample::operator(&mut r, &desc, &desc, 1.0);
        let reg = z_from_bounded(&t);
        for f in &fs {
            let left = bounded(&opmod_core::calculus::balanced_product(&reg, f, &g, TOL).unwrap());
            let right = &apply(f, &reg.t_t_star(), &g) * &t;
            assert!(
                left.distance(&right) <= 1e-9,
                "{}: {}",
                f.name(),
                left.distance(&right)
            );
            // (T • f(T*T))* = T* • f̄(TT*)
            let adj = &t.adjoint() * &apply(&f.conjugate(), &reg.t_t_star(), &g);
            assert!(left.adjoint().distance(&adj) <= 1e-9);
        }
        let z = bounded(&opmod_core::calculus::balanced_product(&reg, &fs[0], &g, TOL).unwrap());
        assert!(z.distance(reg.z()) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn real_power_laws(seed in any::<u64>(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let mut r = rng(seed);
        let desc = sample::module(&mut r, 3, 2, 3);
        let op = z_from_bounded(&sample::positive(&mut r, &desc, 0.05));
        let ts = power_real(&op, s, TOL).unwrap();
        let tt = power_real(&op, t, TOL).unwrap();
        let sum = power_real(&op, s + t, TOL).unwrap();
        prop_assert!((&bounded(&ts) * &bounded(&tt)).distance(&bounded(&sum)) <= 1e-8);
        let nested = power_real(&ts, t, TOL).unwrap();
        let product = power_real(&op, s * t, TOL).unwrap();
        prop_assert!(op_gap(&nested, &product) <= 1e-8);
        // ‖T^s‖ = ‖T‖^s
        prop_assert!((bounded(&ts).norm() - bounded(&op).norm().powf(s)).abs() <= 1e-8 * bounded(&ts).norm().max(1.0));
    }
}
