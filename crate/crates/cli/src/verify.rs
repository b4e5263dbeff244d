//! Randomised verification suites.
//!
//! Every trial draws from its own ChaCha8 stream: the generator is seeded
//! with the user seed and switched to stream `(suite_index << 32) | trial`,
//! so a trial's inputs depend only on `(seed, suite, trial)`. Running a
//! suite alone or inside `all` gives the same records.

use std::time::Instant;

use num_complex::Complex64;
use opmod_core::calculus::{
    apply_function, balanced_product, compose_check, exp_op, ln_op, power_complex, power_real,
    spectrum_of_bounded,
};
use opmod_core::commuting::{commutes, dot_product, fuglede_putnam_check, joint_calculus};
use opmod_core::functions::zmap;
use opmod_core::linalg::{self, CMat};
use opmod_core::regular::{bounded_from_z, localize_regular, z_transform_matrix};
use opmod_core::tensor::tensor_op;
use opmod_core::unbounded::{
    compatible_symbol, decay_slope, inverse_power, measured_growth, oracle_compare,
    window_has_zero, window_values, GrowthClass, TableFn, WindowConfig,
};
use opmod_core::{
    localize, localize_op, sample, z_from_bounded, AdjointableOp, CommutingPair, CompatibleSet,
    JointFn, ModuleDescriptor, OpError, RationalSymbol, RegularOp, ScalarFn, SpectrumSet,
    DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::json::Json;

/// Registered suites in execution order; `all` runs every one of them.
pub const SUITES: [&str; 8] = [
    "ztransform",
    "calculus",
    "powers",
    "fuglede_putnam",
    "commuting",
    "tensor",
    "localization",
    "unbounded_oracle",
];

const TOL: f64 = DEFAULT_TOL;

/// A property checked once per trial, with the identity it verifies.
#[derive(Debug, Clone, Copy)]
pub struct Property {
    pub name: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
}

const fn prop(name: &'static str, anchor: &'static str, tolerance: f64) -> Property {
    Property {
        name,
        anchor,
        tolerance,
    }
}

pub fn properties(suite: &str) -> &'static [Property] {
    match suite {
        "ztransform" => {
            const P: &[Property] = &[
            prop("round_trip", "T = z_T (1 - z_T* z_T)^{-1/2}", 1e-9),
            prop("adjoint_law", "z_{T*} = (z_T)*", 1e-12),
            prop("lance_identity", "(1 + T*T)^{-1} = 1 - z_T* z_T", 1e-10),
            prop("spectrum_mapping", "sigma(z_T) = J(sigma(T)), J(c) = c / (1 + |c|^2)^{1/2}", 1e-9),
            prop("classification", "T normal <=> z_T normal; selfadjoint and positive flags follow eigenvalue signs", 0.0),
            ];
            P
        }
        "calculus" => {
            const P: &[Property] = &[
                prop("multiplicative", "(f g)(T) = f(T) g(T)", 1e-9),
                prop("additive", "(f + g)(T) = f(T) + g(T)", 1e-9),
                prop("star", "conj(f)(T) = f(T)*", 1e-9),
                prop("identity", "iota(T) = T", 1e-9),
                prop("composition", "g(f(T)) = (g o f)(T)", 1e-9),
                prop("natural_multiplier", "T f(T*T) = f(T T*) T", 1e-9),
                prop("z_reproduction", "z_T = T (1 + T*T)^{-1/2}", 1e-10),
            ];
            P
        }
        "powers" => {
            const P: &[Property] = &[
                prop("sum_law", "T^s T^t = T^{s+t}", 1e-8),
                prop("product_law", "(T^s)^t = T^{st}", 1e-8),
                prop("unitary", "T^{is} is unitary", 1e-10),
                prop("ln_exp", "ln(e^T) = T for selfadjoint T", 1e-9),
                prop("exp_ln", "e^{ln T} = T for strictly positive T", 1e-9),
            ];
            P
        }
        "fuglede_putnam" => {
            const P: &[Property] = &[
                prop("adjoint_intertwining", "U S = T U => U S* = T* U", 1e-9),
                prop(
                    "function_intertwining",
                    "U S = T U => U f(S) = f(T) U",
                    1e-8,
                ),
            ];
            P
        }
        "commuting" => {
            const P: &[Property] = &[
                prop("joint_tensor", "(f (x) g)(S, T) = f(S) g(T)", 1e-9),
                prop("dot_powers", "(S . T)^n = S^n . T^n", 1e-8),
                prop(
                    "unitary_group",
                    "S, T commute => S^{is} T^{it} = T^{it} S^{is}",
                    1e-8,
                ),
                prop(
                    "unitary_group_detects",
                    "S^{is} T^{it} = T^{it} S^{is} for all s, t <=> S, T commute",
                    0.0,
                ),
            ];
            P
        }
        "tensor" => {
            const P: &[Property] = &[
                prop("adjoint", "(S (x) T)* = S* (x) T*", 1e-8),
                prop("product", "(S (x) T)*(S (x) T) = S*S (x) T*T", 1e-8),
                prop("absolute_value", "|S (x) T| = |S| (x) |T|", 1e-8),
                prop(
                    "powers",
                    "(S (x) T)^z = S^z (x) T^z, z in {1/2, 2, i}",
                    1e-8,
                ),
                prop("norm", "||S (x) T|| = ||S|| ||T||", 1e-10),
            ];
            P
        }
        "localization" => {
            const P: &[Property] = &[
                prop("z_transform", "(z_T)_w = z_{T_w}", 1e-9),
                prop("adjoint", "(T_w)* = (T*)_w", 1e-9),
                prop("product", "(T_w)*(T_w) = (T*T)_w", 1e-9),
            ];
            P
        }
        "unbounded_oracle" => {
            const P: &[Property] = &[
                prop(
                    "decision_agreement",
                    "f invertible <=> f(n) != 0 for all n; G compatible with f <=> f(N) in G",
                    0.0,
                ),
                prop(
                    "invertible_not_adjointable",
                    "1/(n+k) is invertible with unbounded inverse",
                    0.0,
                ),
                prop(
                    "oracle_zmap",
                    "z_T = T (1 + T*T)^{-1/2} on diag(f(n))",
                    1e-10,
                ),
                prop("oracle_expneg", "exp(-T) on diag(f(n))", 1e-10),
                prop("domain_probes", "g in D(f) <=> f g in c0", 0.0),
            ];
            P
        }
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub suite: &'static str,
    pub trial: usize,
    pub property: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertySummary {
    pub suite: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    /// Seconds spent evaluating the property; only kept on request since it
    /// breaks byte-identical reports.
    pub runtime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertySummary>,
    pub records: Vec<TrialRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn property(&self, suite: &str, name: &str) -> Option<&PropertySummary> {
        self.properties
            .iter()
            .find(|p| p.suite == suite && p.name == name)
    }

    pub fn to_json(&self) -> Json {
        let flags = if self.trials == 0 {
            vec![Json::Str("no trials".into())]
        } else {
            vec![]
        };
        let properties = self
            .properties
            .iter()
            .map(|p| {
                let mut fields = vec![
                    ("suite".to_string(), Json::Str(p.suite.into())),
                    ("name".to_string(), Json::Str(p.name.into())),
                    ("anchor".to_string(), Json::Str(p.anchor.into())),
                    ("passed".to_string(), Json::Bool(p.passed)),
                    ("max_error".to_string(), Json::Num(p.max_error)),
                    ("tolerance".to_string(), Json::Num(p.tolerance)),
                ];
                if let Some(t) = p.runtime {
                    fields.push(("runtime".to_string(), Json::Num(t)));
                }
                Json::Obj(fields)
            })
            .collect();
        Json::obj([
            ("suite", Json::Str(self.suite.clone())),
            ("seed", Json::Str(self.seed.to_string())),
            ("trials", Json::Int(self.trials as i64)),
            ("passed", Json::Bool(self.passed())),
            ("flags", Json::Arr(flags)),
            ("properties", Json::Arr(properties)),
        ])
    }

    /// One row per trial and property: `trial,property,residual,tolerance,passed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,property,residual,tolerance,passed\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{}.{},{},{},{}\n",
                r.trial,
                r.suite,
                r.property,
                crate::json::number(r.residual),
                crate::json::number(r.tolerance),
                r.passed
            ));
        }
        out
    }
}

/// Per-trial generator; see the module documentation.
pub fn trial_rng(seed: u64, suite_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite_index as u64) << 32) | trial as u64);
    rng
}

/// Runs the named suites; `all` expands to every registered suite.
pub fn run_verification_suite(
    names: &[&str],
    trials: usize,
    seed: u64,
    timings: bool,
) -> Result<VerificationReport, CliError> {
    let mut selected: Vec<&'static str> = Vec::new();
    for name in names {
        if *name == "all" {
            selected.extend(SUITES);
        } else {
            let known = SUITES
                .iter()
                .find(|s| *s == name)
                .ok_or_else(|| CliError::UnknownSuite(name.to_string()))?;
            selected.push(known);
        }
    }
    selected.dedup();
    let mut report = VerificationReport {
        suite: names.join(","),
        seed,
        trials,
        properties: Vec::new(),
        records: Vec::new(),
    };
    for suite in selected {
        let index = SUITES.iter().position(|s| *s == suite).expect("registered");
        let props = properties(suite);
        let mut runtimes = vec![0.0; props.len()];
        for trial in 0..trials {
            let mut rng = trial_rng(seed, index, trial);
            let mut rec = Recorder {
                props,
                values: vec![None; props.len()],
                runtimes: &mut runtimes,
            };
            run_trial(suite, &mut rng, trial, &mut rec);
            for (k, p) in props.iter().enumerate() {
                let residual = rec.values[k].unwrap_or(f64::INFINITY);
                report.records.push(TrialRecord {
                    suite,
                    trial,
                    property: p.name,
                    residual,
                    tolerance: p.tolerance,
                    passed: residual <= p.tolerance,
                });
            }
        }
        for (k, p) in props.iter().enumerate() {
            let mine = report
                .records
                .iter()
                .filter(|r| r.suite == suite && r.property == p.name);
            let max_error = mine.clone().map(|r| r.residual).fold(0.0, f64::max);
            report.properties.push(PropertySummary {
                suite,
                name: p.name,
                anchor: p.anchor,
                passed: mine.clone().all(|r| r.passed),
                max_error,
                tolerance: p.tolerance,
                runtime: timings.then_some(runtimes[k]),
            });
        }
    }
    Ok(report)
}

struct Recorder<'a> {
    props: &'static [Property],
    values: Vec<Option<f64>>,
    runtimes: &'a mut Vec<f64>,
}

impl Recorder<'_> {
    /// Evaluates one property; an error counts as an infinite residual.
    fn measure(&mut self, name: &str, f: impl FnOnce() -> Result<f64, OpError>) {
        let k = self
            .props
            .iter()
            .position(|p| p.name == name)
            .expect("property is registered");
        let start = Instant::now();
        let value = f().unwrap_or(f64::INFINITY);
        self.runtimes[k] += start.elapsed().as_secs_f64();
        let slot = self.values[k].get_or_insert(0.0);
        *slot = slot.max(if value.is_nan() { f64::INFINITY } else { value });
    }
}

fn run_trial(suite: &str, r: &mut ChaCha8Rng, trial: usize, rec: &mut Recorder) {
    match suite {
        "ztransform" => ztransform(r, trial, rec),
        "calculus" => calculus(r, trial, rec),
        "powers" => powers(r, rec),
        "fuglede_putnam" => fuglede_putnam(r, rec),
        "commuting" => commuting(r, rec),
        "tensor" => tensor(r, rec),
        "localization" => localization(r, rec),
        "unbounded_oracle" => unbounded_oracle(r, trial, rec),
        _ => unreachable!("suite names are validated"),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bounded(r: &RegularOp) -> Result<AdjointableOp, OpError> {
    r.to_bounded()
}

fn op_gap(a: &RegularOp, b: &RegularOp) -> Result<f64, OpError> {
    Ok(bounded(a)?.distance(&bounded(b)?))
}

/// `U diag(λ) U*` per block, with the eigenvalues drawn by `eigen`; returns
/// the operator and all its eigenvalues.
fn normal_with_eigenvalues(
    r: &mut ChaCha8Rng,
    desc: &ModuleDescriptor,
    mut eigen: impl FnMut(&mut ChaCha8Rng) -> Complex64,
) -> (AdjointableOp, Vec<Complex64>) {
    let mut all = Vec::new();
    let blocks = desc
        .algebra()
        .block_dims()
        .iter()
        .map(|&d| {
            let n = desc.rank() * d;
            let lambdas: Vec<Complex64> = (0..n).map(|_| eigen(r)).collect();
            let u = sample::unitary_matrix(r, n);
            let diag = CMat::from_fn(n, n, |i, j| if i == j { lambdas[i] } else { c(0.0, 0.0) });
            all.extend(lambdas);
            &u * diag * u.adjoint()
        })
        .collect();
    (
        AdjointableOp::from_blocks(desc, desc, blocks).expect("blocks follow the descriptor"),
        all,
    )
}

fn ztransform(r: &mut ChaCha8Rng, trial: usize, rec: &mut Recorder) {
    let desc = sample::module(r, 4, 3, 3);
    let t = sample::operator(r, &desc, &desc, 1.0);
    let z = z_from_bounded(&t);
    rec.measure("round_trip", || Ok(bounded_from_z(&z)?.distance(&t)));
    rec.measure("adjoint_law", || {
        Ok(z_from_bounded(&t.adjoint()).z().distance(&z.z().adjoint()))
    });
    rec.measure("lance_identity", || {
        let one = AdjointableOp::identity(&desc);
        let blocks = (&one + &(&t.adjoint() * &t))
            .blocks()
            .iter()
            .map(|b| b.clone().try_inverse().ok_or(OpError::NotInvertible))
            .collect::<Result<Vec<_>, _>>()?;
        let inv = AdjointableOp::from_blocks(&desc, &desc, blocks)?;
        Ok(inv.distance(&(&one - &(&z.z().adjoint() * z.z()))))
    });

    let desc = sample::module(r, 3, 3, 3);
    let (n, lambdas) = normal_with_eigenvalues(r, &desc, sample::gaussian);
    rec.measure("spectrum_mapping", || {
        let sigma_z = spectrum_of_bounded(z_from_bounded(&n).z(), TOL)?;
        let image = SpectrumSet::from_points(lambdas.iter().map(|l| (zmap(*l), 1)));
        Ok(sigma_z.hausdorff(&image))
    });

    // Eigenvalues are exactly zero or at least 0.05 away from it, and either
    // real or at least 0.1 off the real axis.
    let kind = trial % 4;
    let (t, lambdas) = normal_with_eigenvalues(r, &desc, |g| match kind {
        0 => c(sample::gaussian(g).re, 0.0),
        1 if g.random_bool(0.4) => c(0.0, 0.0),
        1 => c(g.random_range(0.05..2.0), 0.0),
        2 => c(g.random_range(0.1..2.0), 0.0),
        _ => c(
            g.random_range(-2.0..2.0),
            g.random_range(0.1..2.0) * if g.random_bool(0.5) { 1.0 } else { -1.0 },
        ),
    });
    let nonnormal = sample::operator(r, &desc, &desc, 1.0);
    rec.measure("classification", || {
        let flags = z_from_bounded(&t).flags();
        let real = lambdas.iter().all(|l| l.im == 0.0);
        let expected = [
            true,
            real,
            real && lambdas.iter().all(|l| l.re >= 0.0),
            real && lambdas.iter().all(|l| l.re > 0.0),
        ];
        let got = [
            flags.normal,
            flags.selfadjoint,
            flags.positive,
            flags.strictly_positive,
        ];
        let commutator =
            (&nonnormal.adjoint() * &nonnormal).distance(&(&nonnormal * &nonnormal.adjoint()));
        let nonnormal_ok = z_from_bounded(&nonnormal).flags().normal == (commutator <= TOL);
        let mismatches =
            expected.iter().zip(&got).filter(|(a, b)| a != b).count() + (!nonnormal_ok) as usize;
        Ok(mismatches as f64)
    });
}

fn registry(names: &[&str]) -> Vec<ScalarFn> {
    names
        .iter()
        .map(|n| ScalarFn::from_registry(n).expect("registry name"))
        .collect()
}

fn calculus(r: &mut ChaCha8Rng, trial: usize, rec: &mut Recorder) {
    let kind = trial % 3;
    let desc = sample::module(r, 3, 2, 3);
    let t = z_from_bounded(&match kind {
        0 => sample::normal(r, &desc),
        1 => sample::selfadjoint(r, &desc),
        _ => sample::positive(r, &desc, 0.2),
    });
    let (g, fs) = match kind {
        0 => (
            CompatibleSet::plane(),
            registry(&["id", "conj", "sq", "exp", "zmap"]),
        ),
        1 => (
            CompatibleSet::real_line(),
            registry(&["id", "conj", "sq", "exp", "zmap"]),
        ),
        _ => (
            CompatibleSet::positive_reals(),
            registry(&[
                "id",
                "conj",
                "sq",
                "exp",
                "zmap",
                "sqrt",
                "log",
                "recip",
                "powk(1.5)",
            ]),
        ),
    };
    let apply = |f: &ScalarFn| -> Result<AdjointableOp, OpError> {
        bounded(&apply_function(f, &t, &g, TOL)?)
    };
    rec.measure("multiplicative", || {
        let mut worst: f64 = 0.0;
        for f in &fs {
            for h in &fs {
                worst = worst.max(apply(&f.mul(h))?.distance(&(&apply(f)? * &apply(h)?)));
            }
        }
        Ok(worst)
    });
    rec.measure("additive", || {
        let mut worst: f64 = 0.0;
        for f in &fs {
            for h in &fs {
                worst = worst.max(apply(&f.add(h))?.distance(&(&apply(f)? + &apply(h)?)));
            }
        }
        Ok(worst)
    });
    rec.measure("star", || {
        let mut worst: f64 = 0.0;
        for f in &fs {
            worst = worst.max(apply(&f.conjugate())?.distance(&apply(f)?.adjoint()));
        }
        Ok(worst)
    });
    rec.measure("identity", || {
        Ok(apply(&ScalarFn::identity())?.distance(&bounded(&t)?))
    });

    let (outer, inner, set, inner_set): (ScalarFn, ScalarFn, CompatibleSet, CompatibleSet) =
        match trial % 5 {
            0 => (
                ScalarFn::sqrt(),
                ScalarFn::square(),
                CompatibleSet::positive_reals(),
                CompatibleSet::nonnegative_reals(),
            ),
            1 => (
                ScalarFn::log(),
                ScalarFn::exp(),
                CompatibleSet::real_line(),
                CompatibleSet::positive_reals(),
            ),
            2 => (
                ScalarFn::exp(),
                ScalarFn::square(),
                CompatibleSet::plane(),
                CompatibleSet::plane(),
            ),
            3 => (
                ScalarFn::recip(),
                ScalarFn::exp(),
                CompatibleSet::plane(),
                CompatibleSet::punctured(vec![c(0.0, 0.0)]).expect("one point"),
            ),
            _ => (
                ScalarFn::zmap(),
                ScalarFn::conj(),
                CompatibleSet::plane(),
                CompatibleSet::plane(),
            ),
        };
    let operand = z_from_bounded(&match trial % 5 {
        0 => sample::positive(r, &desc, 0.2),
        1 => sample::selfadjoint(r, &desc),
        _ => sample::normal(r, &desc),
    });
    rec.measure("composition", || {
        let (nested, composed) = compose_check(&outer, &inner, &operand, &set, &inner_set, TOL)?;
        op_gap(&nested, &composed)
    });

    let general = sample::operator(r, &desc, &desc, 1.0);
    let reg = z_from_bounded(&general);
    let nonneg = CompatibleSet::nonnegative_reals();
    let root = ScalarFn::total("(1+t)^{-1/2}", |t| c(1.0, 0.0) / (c(1.0, 0.0) + t).sqrt());
    let fs = [
        root.clone(),
        ScalarFn::total("exp(-t)", |t| (-t).exp()),
        ScalarFn::powk(1.0),
    ];
    rec.measure("natural_multiplier", || {
        let mut worst: f64 = 0.0;
        for f in &fs {
            let left = bounded(&balanced_product(&reg, f, &nonneg, TOL)?)?;
            let right = &bounded(&apply_function(f, &reg.t_t_star(), &nonneg, TOL)?)? * &general;
            worst = worst.max(left.distance(&right));
        }
        Ok(worst)
    });
    rec.measure("z_reproduction", || {
        Ok(bounded(&balanced_product(&reg, &root, &nonneg, TOL)?)?.distance(reg.z()))
    });
}

fn powers(r: &mut ChaCha8Rng, rec: &mut Recorder) {
    let desc = sample::module(r, 3, 2, 3);
    let t = z_from_bounded(&sample::positive(r, &desc, 0.05));
    let (s, u) = (r.random_range(0.0..3.0), r.random_range(0.0..3.0));
    rec.measure("sum_law", || {
        let lhs = &bounded(&power_real(&t, s, TOL)?)? * &bounded(&power_real(&t, u, TOL)?)?;
        Ok(lhs.distance(&bounded(&power_real(&t, s + u, TOL)?)?))
    });
    rec.measure("product_law", || {
        op_gap(
            &power_real(&power_real(&t, s, TOL)?, u, TOL)?,
            &power_real(&t, s * u, TOL)?,
        )
    });
    let strictly = z_from_bounded(&sample::positive(r, &desc, 0.2));
    let imag = r.random_range(-3.0..3.0);
    rec.measure("unitary", || {
        let v = bounded(&power_complex(&strictly, c(0.0, imag), TOL)?)?;
        let one = AdjointableOp::identity(&desc);
        Ok((&v.adjoint() * &v)
            .distance(&one)
            .max((&v * &v.adjoint()).distance(&one)))
    });
    let sa = z_from_bounded(&sample::selfadjoint(r, &desc));
    rec.measure("ln_exp", || op_gap(&ln_op(&exp_op(&sa, TOL)?, TOL)?, &sa));
    rec.measure("exp_ln", || {
        op_gap(&exp_op(&ln_op(&strictly, TOL)?, TOL)?, &strictly)
    });
}

fn fp_functions() -> Vec<ScalarFn> {
    registry(&["exp", "conj", "sq", "zmap", "id"])
}

fn fuglede_putnam(r: &mut ChaCha8Rng, rec: &mut Recorder) {
    // T = V S V* and U = V q(S) for a quadratic q give U S = T U.
    let desc = sample::module(r, 3, 2, 3);
    let s = sample::normal(r, &desc);
    let v = sample::unitary(r, &desc);
    let t = &(&v * &s) * &v.adjoint();
    let (a, b) = (sample::gaussian(r), sample::gaussian(r));
    let q = &(&(&s * &s) + &s.scale(a)) + &AdjointableOp::scalar(&desc, b);
    let u = &v * &q;
    let report = fuglede_putnam_check(
        &u,
        &z_from_bounded(&s),
        &z_from_bounded(&t),
        &fp_functions(),
        1e-10,
    );
    let (adj, fun) = match &report {
        Ok(rep) => (
            Ok(rep.adjoint_residual),
            Ok(rep
                .function_residuals
                .iter()
                .map(|(_, x)| *x)
                .fold(0.0, f64::max)),
        ),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    rec.measure("adjoint_intertwining", || adj);
    rec.measure("function_intertwining", || fun);
}

fn unitary_grid_residual(s: &RegularOp, t: &RegularOp) -> Result<f64, OpError> {
    let grid = [1.0, -1.0, 0.37, -0.37];
    let mut worst: f64 = 0.0;
    for a in grid {
        let sa = bounded(&power_complex(s, c(0.0, a), TOL)?)?;
        for b in grid {
            let tb = bounded(&power_complex(t, c(0.0, b), TOL)?)?;
            worst = worst.max((&sa * &tb).distance(&(&tb * &sa)));
        }
    }
    Ok(worst)
}

fn commuting(r: &mut ChaCha8Rng, rec: &mut Recorder) {
    let desc = sample::module(r, 3, 2, 3);
    let (s, t) = sample::commuting_normals(r, &desc, sample::gaussian);
    let pair = CommutingPair::certified(z_from_bounded(&s), z_from_bounded(&t), TOL);
    rec.measure("joint_tensor", || {
        let pair = pair.clone()?;
        let plane = CompatibleSet::plane();
        let fs = fp_functions();
        let mut worst: f64 = 0.0;
        for f in &fs {
            let fs_op = bounded(&apply_function(f, pair.s(), &plane, TOL)?)?;
            for g in &fs {
                let h = joint_calculus(&JointFn::tensor(f, g), &pair, &plane, &plane, TOL)?;
                let gt = bounded(&apply_function(g, pair.t(), &plane, TOL)?)?;
                worst = worst.max(bounded(&h)?.distance(&(&fs_op * &gt)));
            }
        }
        Ok(worst)
    });

    let (ps, pt) = sample::commuting_normals(r, &desc, |g| c(0.2 + 3.0 * g.random::<f64>(), 0.0));
    let (ps, pt) = (z_from_bounded(&ps), z_from_bounded(&pt));
    rec.measure("dot_powers", || {
        let st = bounded(&dot_product(
            &CommutingPair::certified(ps.clone(), pt.clone(), TOL)?,
            TOL,
        )?)?;
        let mut st_n = st.clone();
        let mut worst: f64 = 0.0;
        for n in 1..=3 {
            let sn = power_real(&ps, n as f64, TOL)?;
            let tn = power_real(&pt, n as f64, TOL)?;
            let rhs = bounded(&dot_product(&CommutingPair::certified(sn, tn, TOL)?, TOL)?)?;
            worst = worst.max(st_n.distance(&rhs));
            st_n = &st_n * &st;
        }
        Ok(worst)
    });
    rec.measure("unitary_group", || unitary_grid_residual(&ps, &pt));

    let qs = z_from_bounded(&sample::positive(r, &desc, 0.2));
    let qt = z_from_bounded(&sample::positive(r, &desc, 0.2));
    rec.measure("unitary_group_detects", || {
        let mut mismatches = 0;
        for (a, b) in [(&ps, &pt), (&qs, &qt)] {
            let grid_commutes = unitary_grid_residual(a, b)? <= 1e-8;
            mismatches += (commutes(a, b, TOL)? != grid_commutes) as usize;
        }
        Ok(mismatches as f64)
    });
}

fn tensor(r: &mut ChaCha8Rng, rec: &mut Recorder) {
    let e = sample::module(r, 2, 2, 2);
    let f = sample::module(r, 2, 2, 2);
    let (sb, tb) = (
        sample::operator(r, &e, &e, 1.0),
        sample::operator(r, &f, &f, 1.0),
    );
    let (s, t) = (z_from_bounded(&sb), z_from_bounded(&tb));
    let st = tensor_op(&s, &t);
    rec.measure("adjoint", || {
        op_gap(
            &st.clone()?.adjoint(),
            &tensor_op(&s.adjoint(), &t.adjoint())?,
        )
    });
    rec.measure("product", || {
        op_gap(
            &st.clone()?.t_star_t(),
            &tensor_op(&s.t_star_t(), &t.t_star_t())?,
        )
    });
    rec.measure("absolute_value", || {
        op_gap(
            &st.clone()?.absolute_value(),
            &tensor_op(&s.absolute_value(), &t.absolute_value())?,
        )
    });
    rec.measure("norm", || {
        Ok((bounded(&st.clone()?)?.norm() - sb.norm() * tb.norm()).abs())
    });
    let ps = z_from_bounded(&sample::positive(r, &e, 0.2));
    let pt = z_from_bounded(&sample::positive(r, &f, 0.2));
    rec.measure("powers", || {
        let pst = tensor_op(&ps, &pt)?;
        let mut worst: f64 = 0.0;
        for z in [c(0.5, 0.0), c(2.0, 0.0), c(0.0, 1.0)] {
            let rhs = tensor_op(&power_complex(&ps, z, TOL)?, &power_complex(&pt, z, TOL)?)?;
            worst = worst.max(op_gap(&power_complex(&pst, z, TOL)?, &rhs)?);
        }
        Ok(worst)
    });
}

fn localization(r: &mut ChaCha8Rng, rec: &mut Recorder) {
    let desc = sample::module(r, 3, 2, 3);
    let full = r.random_bool(0.5);
    let rho = sample::density(r, desc.algebra(), full);
    let x = sample::operator(r, &desc, &desc, 1.0);
    let space = localize(&desc, &rho);
    let gap = |a: &CMat, b: &CMat| linalg::spectral_norm(&(a - b));
    rec.measure("z_transform", || {
        let space = space.clone()?;
        let lhs = localize_regular(&z_from_bounded(&x), &space)?;
        Ok(gap(&lhs, &z_transform_matrix(&localize_op(&x, &space)?)))
    });
    rec.measure("adjoint", || {
        let space = space.clone()?;
        Ok(gap(
            &localize_op(&x, &space)?.adjoint(),
            &localize_op(&x.adjoint(), &space)?,
        ))
    });
    rec.measure("product", || {
        let space = space.clone()?;
        let xl = localize_op(&x, &space)?;
        let tt = localize_op(&bounded(&z_from_bounded(&x).t_star_t())?, &space)?;
        Ok(gap(&(xl.adjoint() * &xl), &tt))
    });
}

/// Window reading of compatibility: values avoid `K` exactly and otherwise
/// lie in `G`; values within rounding of `K` are limit points, not hits.
fn window_compatible(g: &CompatibleSet, values: &[Complex64]) -> bool {
    values
        .iter()
        .all(|v| !g.excluded().contains(v) && (g.is_excluded(*v) || g.membership(*v) == Some(true)))
}

/// Number of symbolic decisions about `f` that disagree with measurements
/// on the window `[0, 10⁴)`.
pub fn window_disagreements(f: &RationalSymbol) -> Result<usize, OpError> {
    let cfg = WindowConfig::new(10_000)?;
    let values = window_values(f, &cfg);
    let measured = measured_growth(f, &cfg);
    let mut bad = 0;
    bad += (GrowthClass::of_symbol(f) != measured) as usize;
    bad += (f.is_c0() != (measured == GrowthClass::Vanishing)) as usize;
    let zero_free = !window_has_zero(f, &cfg);
    bad += (f.is_invertible() != zero_free) as usize;
    let reciprocal: Vec<Complex64> = values.iter().map(|v| v.inv()).collect();
    let bounded_inverse =
        zero_free && GrowthClass::of_slope(decay_slope(&reciprocal)) != GrowthClass::Unbounded;
    bad += (f.is_adjointable_invertible() != bounded_inverse) as usize;
    for k in 1..=4 {
        let vanishes = measured_growth(&f.mul(&inverse_power(k)), &cfg) == GrowthClass::Vanishing;
        bad += (f.in_domain(&inverse_power(k))? != vanishes) as usize;
    }
    let sets = [
        CompatibleSet::plane(),
        CompatibleSet::real_line(),
        CompatibleSet::nonnegative_reals(),
        CompatibleSet::positive_reals(),
        CompatibleSet::punctured(vec![c(0.0, 0.0)])?,
        CompatibleSet::punctured(vec![c(1.0, 0.0), c(0.0, 1.0)])?,
    ];
    for g in &sets {
        bad += (compatible_symbol(g, f)? != window_compatible(g, &values)) as usize;
    }
    Ok(bad)
}

fn unbounded_oracle(r: &mut ChaCha8Rng, trial: usize, rec: &mut Recorder) {
    let f = sample::symbol(r);
    rec.measure(
        "decision_agreement",
        || Ok(window_disagreements(&f)? as f64),
    );
    let k = 1.0 + (trial % 8) as f64;
    rec.measure("invertible_not_adjointable", || {
        let g = RationalSymbol::from_real(&[1.0], &[k, 1.0])?;
        let cfg = WindowConfig::new(1024)?;
        let inverse_grows = g
            .inverse()
            .is_some_and(|inv| measured_growth(&inv, &cfg) == GrowthClass::Unbounded);
        Ok((!(g.is_invertible() && !g.is_adjointable_invertible() && inverse_grows)) as u8 as f64)
    });
    // f(n) = n + m; m = 0 on the first trial.
    let m = (trial % 4) as f64;
    let shifted = RationalSymbol::from_real(&[m, 1.0], &[1.0]).expect("constant denominator");
    let cfg = WindowConfig::new(64).expect("window above the floor");
    let plane = CompatibleSet::plane();
    let reports = [TableFn::Zmap, TableFn::ExpNeg]
        .map(|h| oracle_compare(&shifted, &h.scalar_fn(), &plane, &cfg));
    rec.measure("oracle_zmap", || Ok(reports[0].clone()?.residual));
    rec.measure("oracle_expneg", || Ok(reports[1].clone()?.residual));
    rec.measure("domain_probes", || {
        let mut bad = 0;
        for rep in &reports {
            bad += (!rep.clone()?.probes_agree()) as usize;
        }
        Ok(bad as f64)
    });
}
