//! Randomized invariants of the solver, shared by the property tests and the
//! acceptance run.

#![allow(dead_code)]

use hyperwell::exact::{alpha_window, beta_n};
use hyperwell::recurrence::{c_n_sign_value_with_base, coeff_a, coeff_a_even_form, coeff_b, coeff_b_even_form};
use hyperwell::spectrum::{spectrum, ScanConfig};
use hyperwell::wavefunction::{count_nodes, normalize, GridSpec, GridWavefunction, Source};
use hyperwell::{ModelContext, Parity, Precision};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}

fn fail<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Every converged level lies in (-4v₀/27, 0).
pub fn energy_bounds() -> Result<(), String> {
    let cfg = ScanConfig::default();
    run(CASES, 0.5f64..250.0, |v0| {
        let sp = spectrum(v0, &cfg).map_err(fail)?;
        for s in &sp.states {
            prop_assert!(s.epsilon < 0.0, "v0={v0}: eps={} not negative", s.epsilon);
            prop_assert!(s.epsilon > -4.0 * v0 / 27.0, "v0={v0}: eps={} below the well", s.epsilon);
            prop_assert!(s.drift <= cfg.conv_tol);
        }
        prop_assert!(!sp.states.is_empty(), "v0={v0}: no states");
        Ok(())
    })
}

/// Levels ordered by energy alternate even, odd, even, ...
pub fn parity_alternation() -> Result<(), String> {
    let cfg = ScanConfig::default();
    run(CASES, 0.5f64..250.0, |v0| {
        let sp = spectrum(v0, &cfg).map_err(fail)?;
        prop_assert!(sp.alternation_ok, "v0={v0}: {:?}", sp.warnings);
        for (k, s) in sp.states.iter().enumerate() {
            prop_assert_eq!(s.nu, k);
            prop_assert_eq!(s.parity, Parity::of_index(k));
        }
        prop_assert_eq!(sp.states[0].parity, Parity::Even);
        Ok(())
    })
}

/// The ν-th wavefunction has ν nodes.
pub fn node_count() -> Result<(), String> {
    let cfg = ScanConfig::default();
    run(CASES, (0.5f64..150.0, 0.0f64..1.0), |(v0, pick)| {
        let sp = spectrum(v0, &cfg).map_err(fail)?;
        let k = ((pick * sp.states.len() as f64) as usize).min(sp.states.len() - 1);
        let s = &sp.states[k];
        let grid = GridSpec::for_beta(s.beta, 0.01).map_err(fail)?;
        let w = normalize(&GridWavefunction::numeric(v0, s, grid, Precision::Double).map_err(fail)?).map_err(fail)?;
        let c = count_nodes(&w);
        prop_assert!(!c.ambiguous, "v0={v0} nu={}: ambiguous node count", s.nu);
        prop_assert_eq!(c.nodes, s.nu, "v0={}", v0);
        Ok(())
    })
}

/// The rescale base never changes the sign of c_N, so root sets agree.
pub fn rescale_invariance() -> Result<(), String> {
    let s = (parity(), -25.0f64..-0.3, 0.0f64..1.0, 2usize..120, 1i32..=500, 1i32..=500);
    run(CASES, s, |(p, alpha, t, n, b1, b2)| {
        let ctx = ModelContext::new(p, alpha).map_err(fail)?;
        let beta = t * ctx.beta_max();
        let x = c_n_sign_value_with_base(&ctx, beta, n, Precision::Double, b1).map_err(fail)?;
        let y = c_n_sign_value_with_base(&ctx, beta, n, Precision::Double, b2).map_err(fail)?;
        prop_assert_eq!(x.sign, y.sign, "alpha={} beta={} n={}", alpha, beta, n);
        if x.sign != 0 {
            let tol = 1e-12 * x.log_magnitude.abs().max(1.0);
            prop_assert!((x.log_magnitude - y.log_magnitude).abs() <= tol);
        }
        Ok(())
    })
}

/// For γ = 0 the general coefficients equal the even-sector forms.
pub fn even_reduction() -> Result<(), String> {
    run(10 * CASES, (-60.0f64..-0.01, 0.0f64..30.0, 0i64..400), |(alpha, beta, j)| {
        let ctx = ModelContext::new(Parity::Even, alpha).map_err(fail)?;
        let (a, b) = (coeff_a(&ctx, beta, j).map_err(fail)?, coeff_b(&ctx, beta, j).map_err(fail)?);
        let (ae, be) = (coeff_a_even_form(alpha, beta, j), coeff_b_even_form(alpha, beta, j));
        prop_assert!((a - ae).abs() <= 1e-13 * a.abs().max(1.0), "A: {a} vs {ae}");
        prop_assert!((b - be).abs() <= 1e-13 * b.abs().max(1.0), "B: {b} vs {be}");
        Ok(())
    })
}

/// The α window is the same statement as 0 < β_n < 2|α|/√27.
pub fn window_equivalence() -> Result<(), String> {
    run(CASES, (parity(), 0usize..40, 0.0f64..1.6), |(p, n, t)| {
        let (lo, hi) = alpha_window(p, n);
        let alpha = t * lo;
        let edge = ((alpha - lo) / lo).abs().min(((alpha - hi) / hi).abs());
        prop_assume!(edge > 1e-9);
        let beta = beta_n(p, alpha, n);
        let bound = 2.0 * alpha.abs() / 27f64.sqrt();
        prop_assert_eq!(lo < alpha && alpha < hi, beta > 0.0 && beta < bound);
        Ok(())
    })
}

/// normalize is idempotent and gives unit norm.
pub fn normalize_idempotent() -> Result<(), String> {
    let s = (2usize..100, 0.5f64..20.0).prop_flat_map(|(half, l)| {
        (Just(half), Just(l), proptest::collection::vec(-5.0f64..5.0, 2 * half + 1), parity())
    });
    run(CASES, s, |(half, l, values, p)| {
        prop_assume!(values.iter().any(|v| v.abs() > 1e-3));
        let grid = GridSpec::new(l, 2 * half + 1).map_err(fail)?.grid();
        let w = GridWavefunction::from_samples(grid, values, p, Source::Oracle).map_err(fail)?;
        let once = normalize(&w).map_err(fail)?;
        let twice = normalize(&once).map_err(fail)?;
        prop_assert!((once.norm - 1.0).abs() < 1e-12);
        for (a, b) in once.values.iter().zip(&twice.values) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
        Ok(())
    })
}

pub type Invariant = (&'static str, fn() -> Result<(), String>);

pub const SUITE: [Invariant; 7] = [
    ("energy bounds", energy_bounds),
    ("parity alternation", parity_alternation),
    ("node count", node_count),
    ("rescale invariance of c_N", rescale_invariance),
    ("even-sector coefficient reduction", even_reduction),
    ("window equivalence", window_equivalence),
    ("normalize idempotence", normalize_idempotent),
];
