//! Exact branch against the series solver and the finite-difference oracle.

use approx::assert_relative_eq;
use hyperwell::exact::{polynomial_solutions, residual_check};
use hyperwell::spectrum::{bound_state_count, eigenvalues, spectrum, ScanConfig};
use hyperwell::wavefunction::{normalize, GridSpec, GridWavefunction, Source};
use hyperwell::{ModelContext, Parity};
use hyperwell_oracle::{count_below, fd_spectrum, OracleConfig, OracleParity};
use num_rational::BigRational;

fn all_solutions(n_max: usize) -> Vec<hyperwell::exact::PolynomialSolution> {
    let mut out = Vec::new();
    for p in [Parity::Even, Parity::Odd] {
        for n in 0..=n_max {
            out.extend(polynomial_solutions(p, n).unwrap());
        }
    }
    out
}

#[test]
fn ground_state_closed_form() {
    let s = &polynomial_solutions(Parity::Even, 0).unwrap()[0];
    let r13 = 13f64.sqrt();
    assert_relative_eq!(s.alpha, -4.0 - r13, max_relative = 1e-15);
    assert_relative_eq!(s.epsilon, -(7.0 + r13) / 2.0, max_relative = 1e-15);
    assert_relative_eq!(s.v0(), 29.0 + 8.0 * r13, max_relative = 1e-15);
}

#[test]
fn accepted_roots_are_refound_by_the_series_solver() {
    let cfg = ScanConfig::default();
    let sols = all_solutions(4);
    assert!(sols.len() >= 10);
    for s in &sols {
        let ctx = ModelContext::new(s.parity, s.alpha).unwrap();
        let rep = eigenvalues(&ctx, &cfg).unwrap();
        let best = rep
            .converged
            .iter()
            .map(|e| (e.beta - s.beta).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-8, "parity {} n={} i={}: closest beta off by {best:e}", s.parity, s.n, s.i);
    }
}

#[test]
fn residuals_vanish_exactly() {
    let points: Vec<BigRational> = [(1, 7), (1, 3), (1, 2), (5, 8), (9, 10)]
        .iter()
        .map(|&(p, q)| BigRational::new(p.into(), q.into()))
        .collect();
    for s in all_solutions(3) {
        let r = residual_check(&s, &points).unwrap();
        assert!(r.exact_zero, "parity {} n={} i={}", s.parity, s.n, s.i);
    }
}

#[test]
fn exact_wavefunction_matches_oracle_eigenvector() {
    for (p, n) in [(Parity::Even, 0), (Parity::Odd, 0), (Parity::Even, 1)] {
        let sol = &polynomial_solutions(p, n).unwrap()[0];
        let v0 = sol.v0();
        let cfg = OracleConfig::new(12.0, 8001, 64).unwrap();
        let os = fd_spectrum(v0, &cfg).unwrap();
        let want = match p {
            Parity::Even => OracleParity::Even,
            Parity::Odd => OracleParity::Odd,
        };
        // deep levels come in near-degenerate doublets, so match parity first
        let st = os
            .states
            .iter()
            .filter(|s| s.parity == want)
            .min_by(|a, b| (a.epsilon - sol.epsilon).abs().total_cmp(&(b.epsilon - sol.epsilon).abs()))
            .unwrap();
        assert!((st.epsilon - sol.epsilon).abs() < 1e-3, "{p} n={n}: oracle {} vs {}", st.epsilon, sol.epsilon);
        let h = cfg.h();
        let grid = GridSpec::new(cfg.l - h, cfg.m).unwrap();
        let exact = normalize(&GridWavefunction::exact(sol, grid).unwrap()).unwrap();
        let fd = normalize(&GridWavefunction::from_samples(cfg.grid(), st.vector.clone(), p, Source::Oracle).unwrap())
            .unwrap();
        let sup = exact
            .values
            .iter()
            .zip(&fd.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup <= 1e-4, "{p} n={n}: sup norm {sup:e}");
    }
}

#[test]
fn levels_fall_as_the_well_deepens() {
    let cfg = ScanConfig::default();
    let v0s = [20.0, 40.0, 60.0, 80.0, 100.0, 150.0];
    let spectra: Vec<_> = v0s.iter().map(|&v| spectrum(v, &cfg).unwrap()).collect();
    for w in spectra.windows(2) {
        assert!(w[1].states.len() >= w[0].states.len());
        for (a, b) in w[0].states.iter().zip(&w[1].states) {
            assert!(b.epsilon < a.epsilon, "nu={} at v0={} -> {}", a.nu, w[0].v0, w[1].v0);
        }
    }
}

#[test]
fn counts_agree_with_the_oracle() {
    let cfg = ScanConfig::default();
    let wide = OracleConfig::new(400.0, 80_001, 1).unwrap();
    for v0 in [4.0, 10.0, 30.0, 50.0] {
        let c = bound_state_count(v0, &cfg).unwrap();
        assert_eq!(c.count, count_below(v0, 0.0, &wide).unwrap(), "v0={v0}");
    }
    assert_eq!(bound_state_count(4.0, &cfg).unwrap().count, 1);
}
