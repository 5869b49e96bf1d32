//! Cross-checks between the series solver, the exact branch and the
//! finite-difference oracle. Each audit reports its numbers and a verdict;
//! callers decide what to print.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use hyperwell::asymptotics::{hellmann_feynman_check, HellmannFeynman};
use hyperwell::exact::polynomial_solutions;
use hyperwell::spectrum::{eigenvalues, spectrum, ScanConfig, SpectrumReport};
use hyperwell::wavefunction::{count_nodes, normalize, GridSpec, GridWavefunction};
use hyperwell::{ModelContext, Parity, Precision};
use hyperwell_oracle::{count_below, fd_spectrum_auto, richardson, OracleConfig, OracleParity};

/// Largest box the oracle audit will widen to.
pub const ORACLE_MAX_L: f64 = 400.0;
pub const HF_RELATIVE_TOLERANCE: f64 = 1e-4;
pub const EIGEN_FLOOR_TOLERANCE: f64 = 1e-6;
pub const CROSS_BRANCH_TOLERANCE: f64 = 1e-8;
pub const NODE_GRID_SPACING: f64 = 0.005;

pub fn oracle_parity(p: Parity) -> OracleParity {
    match p {
        Parity::Even => OracleParity::Even,
        Parity::Odd => OracleParity::Odd,
    }
}

fn evaluation_precision(p: Precision) -> Precision {
    match p {
        Precision::Adaptive { max_bits } => Precision::Extended { bits: max_bits },
        p => p,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleMatch {
    pub nu: usize,
    pub parity: Parity,
    pub series: f64,
    /// Oracle value at h/2.
    pub oracle: Option<f64>,
    pub oracle_parity_ok: bool,
    pub tolerance: f64,
    pub diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleAudit {
    pub v0: f64,
    pub l: f64,
    pub m: usize,
    pub matches: Vec<OracleMatch>,
    pub series_count: usize,
    pub oracle_count: usize,
    pub warnings: Vec<String>,
}

impl OracleAudit {
    pub fn count_ok(&self) -> bool {
        self.series_count == self.oracle_count
    }

    pub fn pass(&self) -> bool {
        self.count_ok() && self.matches.iter().all(|m| m.pass)
    }
}

/// Compare every converged level with the oracle. The box is widened until
/// no oracle state touches the wall; the tolerance for level ν is
/// max(1e-6, C·h²) with C·h² = 4/3·|ε_h - ε_{h/2}|.
pub fn oracle_audit(v0: f64, sp: &SpectrumReport, base: &OracleConfig) -> Result<OracleAudit> {
    let mut cfg = *base;
    cfg.k = cfg.k.max(sp.states.len() + 2);
    let wide = fd_spectrum_auto(v0, &cfg, ORACLE_MAX_L)?;
    let cfg = wide.config;
    let r = richardson(v0, &cfg)?;
    let mut warnings = wide.warnings.clone();
    let matches = sp
        .states
        .iter()
        .map(|s| {
            let oracle = r.fine.get(s.nu).copied();
            let tolerance = r
                .coarse_error
                .get(s.nu)
                .map_or(EIGEN_FLOOR_TOLERANCE, |e| e.max(EIGEN_FLOOR_TOLERANCE));
            let oracle_parity_ok = r.parities.get(s.nu) == Some(&oracle_parity(s.parity));
            let diff = oracle.map_or(f64::INFINITY, |o| (o - s.epsilon).abs());
            if !oracle_parity_ok {
                warnings.push(format!("oracle parity differs at nu={}", s.nu));
            }
            OracleMatch {
                nu: s.nu,
                parity: s.parity,
                series: s.epsilon,
                oracle,
                oracle_parity_ok,
                tolerance,
                diff,
                pass: oracle_parity_ok && diff <= tolerance,
            }
        })
        .collect();
    Ok(OracleAudit {
        v0,
        l: cfg.l,
        m: cfg.m,
        matches,
        series_count: sp.states.len(),
        oracle_count: wide.negative_count,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NodeAudit {
    pub nu: usize,
    pub nodes: usize,
    pub ambiguous: bool,
    pub pass: bool,
}

/// Zero crossings of each normalized series wavefunction against ν.
pub fn node_audit(sp: &SpectrumReport, precision: Precision) -> Result<Vec<NodeAudit>> {
    let precision = evaluation_precision(precision);
    sp.states
        .par_iter()
        .map(|s| {
            let grid = GridSpec::for_beta(s.beta, NODE_GRID_SPACING)?;
            let w = normalize(&GridWavefunction::numeric(sp.v0, s, grid, precision)?)?;
            let c = count_nodes(&w);
            Ok(NodeAudit {
                nu: s.nu,
                nodes: c.nodes,
                ambiguous: c.ambiguous,
                pass: c.nodes == s.nu && !c.ambiguous,
            })
        })
        .collect::<hyperwell::Result<Vec<_>>>()
        .context("node audit")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HfAudit {
    pub nu: usize,
    #[serde(flatten)]
    pub check: HellmannFeynman,
    pub relative: f64,
    pub pass: bool,
}

pub fn hf_audit(v0: f64, nu: usize, cfg: &ScanConfig) -> Result<HfAudit> {
    let check = hellmann_feynman_check(v0, nu, None, cfg)?;
    let relative = check.abs_diff / check.rhs.abs();
    Ok(HfAudit {
        nu,
        check,
        relative,
        pass: relative <= HF_RELATIVE_TOLERANCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub v0: f64,
    pub oracle: OracleAudit,
    pub hellmann_feynman: Vec<HfAudit>,
    pub nodes: Vec<NodeAudit>,
    pub alternation_ok: bool,
    pub warnings: Vec<String>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.oracle.pass()
            && self.hellmann_feynman.iter().all(|h| h.pass)
            && self.nodes.iter().all(|n| n.pass)
            && self.alternation_ok
    }
}

/// Oracle comparison, Hellmann–Feynman for the two lowest levels, node
/// counts and parity alternation at one v₀.
pub fn check(v0: f64, cfg: &ScanConfig, oracle: &OracleConfig) -> Result<CheckReport> {
    let sp = spectrum(v0, cfg)?;
    let ora = oracle_audit(v0, &sp, oracle)?;
    let hf = (0..sp.states.len().min(2))
        .into_par_iter()
        .map(|nu| hf_audit(v0, nu, cfg))
        .collect::<Result<Vec<_>>>()?;
    let nodes = node_audit(&sp, cfg.precision)?;
    Ok(CheckReport {
        v0,
        oracle: ora,
        hellmann_feynman: hf,
        nodes,
        alternation_ok: sp.alternation_ok,
        warnings: sp.warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossBranch {
    pub parity: Parity,
    pub n: usize,
    pub i: usize,
    pub alpha: f64,
    pub beta_exact: f64,
    pub beta_numeric: Option<f64>,
    pub diff: f64,
    pub pass: bool,
}

/// For every accepted polynomial solution with n ≤ n_max, rerun the series
/// solver at the same α and look for β_n among the converged roots.
pub fn cross_branch(n_max: usize, cfg: &ScanConfig) -> Result<Vec<CrossBranch>> {
    let mut sols = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        for n in 0..=n_max {
            sols.extend(polynomial_solutions(parity, n)?);
        }
    }
    sols.par_iter()
        .map(|s| {
            let ctx = ModelContext::new(s.parity, s.alpha)?;
            let rep = eigenvalues(&ctx, cfg)?;
            let best = rep
                .converged
                .iter()
                .map(|e| e.beta)
                .min_by(|a, b| (a - s.beta).abs().total_cmp(&(b - s.beta).abs()));
            let diff = best.map_or(f64::INFINITY, |b| (b - s.beta).abs());
            Ok(CrossBranch {
                parity: s.parity,
                n: s.n,
                i: s.i,
                alpha: s.alpha,
                beta_exact: s.beta,
                beta_numeric: best,
                diff,
                pass: diff <= CROSS_BRANCH_TOLERANCE,
            })
        })
        .collect::<hyperwell::Result<Vec<_>>>()
        .context("cross-branch audit")
}

/// Oracle grid for counting near a threshold: the weakly bound state decays
/// slowly, so the box has to be wide.
pub fn threshold_oracle_config() -> OracleConfig {
    OracleConfig {
        l: 1000.0,
        m: 99_999,
        k: 1,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdAudit {
    pub k: usize,
    pub v0_k: f64,
    pub below: f64,
    pub above: f64,
    pub count_below: usize,
    pub count_above: usize,
    pub oracle_below: usize,
    pub oracle_above: usize,
    pub pass: bool,
}

/// Counts at v₀,K(1 ∓ rel) for the series solver and the oracle. Below the
/// K-th threshold there are K states, above it K + 1.
pub fn threshold_audit(k: usize, v0_k: f64, rel: f64, cfg: &ScanConfig) -> Result<ThresholdAudit> {
    let (below, above) = (v0_k * (1.0 - rel), v0_k * (1.0 + rel));
    let ocfg = threshold_oracle_config();
    let count = |v0: f64| -> Result<(usize, usize)> {
        let (a, b) = rayon::join(|| spectrum(v0, cfg), || count_below(v0, 0.0, &ocfg));
        Ok((a?.states.len(), b?))
    };
    let (lo, hi) = rayon::join(|| count(below), || count(above));
    let ((count_below, oracle_below), (count_above, oracle_above)) = (lo?, hi?);
    let pass = count_below == k
        && count_above == k + 1
        && oracle_below == count_below
        && oracle_above == count_above;
    Ok(ThresholdAudit {
        k,
        v0_k,
        below,
        above,
        count_below,
        count_above,
        oracle_below,
        oracle_above,
        pass,
    })
}
