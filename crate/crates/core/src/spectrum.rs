//! Bound states at arbitrary v₀ from the roots of c_N(β) = 0, and critical
//! couplings from the roots of c_N(α) = 0 at β = 0.
//!
//! For each truncation order N in a schedule the sign of c_N is sampled on a
//! grid, sign changes are bisected, and roots are linked across orders into
//! chains by nearest neighbour. Only chains whose position settles (drift
//! ≤ `conv_tol` over the last `stable_steps` orders) are reported as states;
//! truncation also produces roots that wander or vanish, and those are kept
//! only as diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::{c_n_entries, c_n_entry, c_n_sign_value, ModelContext, Parity, DEFAULT_RESCALE_EXPONENT};
use crate::scalar::Precision;

/// Scan and convergence settings shared by the β and α scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Strictly increasing truncation orders.
    pub n_schedule: Vec<usize>,
    pub grid_points: usize,
    pub root_tol: f64,
    pub conv_tol: f64,
    pub precision: Precision,
    /// Consecutive drifts that must stay within `conv_tol`.
    pub stable_steps: usize,
    /// Highest order the schedule may be extended to while chains are still
    /// drifting; `None` disables extension.
    pub max_order: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_schedule: (10..=60).step_by(5).collect(),
            grid_points: 2000,
            root_tol: 1e-12,
            conv_tol: 1e-9,
            precision: Precision::Double,
            stable_steps: 3,
            max_order: Some(160),
        }
    }
}

impl ScanConfig {
    /// Default schedule 10, 15, ... up to `n_max`, no extension.
    pub fn up_to(n_max: usize) -> Self {
        Self {
            n_schedule: (10..=n_max.max(10)).step_by(5).collect(),
            max_order: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.n_schedule.is_empty() || self.n_schedule[0] < 1 {
            return bad("N schedule must be nonempty with orders >= 1".into());
        }
        if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("N schedule must be strictly increasing: {:?}", self.n_schedule));
        }
        if self.grid_points < 8 {
            return bad(format!("grid_points must be at least 8, got {}", self.grid_points));
        }
        for (name, v) in [("root_tol", self.root_tol), ("conv_tol", self.conv_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.stable_steps == 0 {
            return bad("stable_steps must be at least 1".into());
        }
        Ok(())
    }

    fn last_order(&self) -> usize {
        *self.n_schedule.last().expect("validated schedule")
    }

    fn step(&self) -> usize {
        match self.n_schedule.as_slice() {
            [.., a, b] => b - a,
            _ => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Unconverged,
    Spurious,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Unconverged => "unconverged",
            Status::Spurious => "spurious",
        }
    }
}

/// A root tracked across truncation orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// (N, root) pairs in schedule order.
    pub history: Vec<(usize, f64)>,
    pub status: Status,
}

impl Chain {
    pub fn last(&self) -> (usize, f64) {
        *self.history.last().expect("chains are never empty")
    }

    /// |x_last - x_prev|, infinite for single-order chains.
    pub fn drift(&self) -> f64 {
        match self.history.as_slice() {
            [.., (_, a), (_, b)] => (b - a).abs(),
            _ => f64::INFINITY,
        }
    }

    fn settled(&self, steps: usize, tol: f64) -> bool {
        let h = &self.history;
        h.len() > steps && h[h.len() - steps - 1..].windows(2).all(|w| (w[1].1 - w[0].1).abs() <= tol)
    }
}

/// Roots at one order plus any warnings raised while finding them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderRoots {
    pub order: usize,
    pub roots: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Sampled sign of the objective; sign 0 means "not certified".
#[derive(Clone, Copy, Debug)]
struct Sample {
    x: f64,
    sign: i8,
    log_mag: f64,
}

const REFINE_POINTS: usize = 48;
const REFINE_DEPTH: usize = 4;

/// Sign-change roots of `f` from initial `samples` (ascending in x, inside
/// the open search interval), bisected to `tol`.
fn scan_roots<F>(f: &F, mut samples: Vec<Sample>, tol: f64, warnings: &mut Vec<String>) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<(i8, f64)> + Sync,
{
    // look for root pairs hidden inside one cell: refine around local minima of |f|
    let mut extra = Vec::new();
    let mut queue: Vec<(f64, f64, usize)> = local_minima(&samples)
        .into_iter()
        .map(|i| (samples[i - 1].x, samples[i + 1].x, 0))
        .collect();
    while let Some((a, b, depth)) = queue.pop() {
        let pts: Vec<f64> = (1..REFINE_POINTS)
            .map(|k| a + (b - a) * k as f64 / REFINE_POINTS as f64)
            .collect();
        let mut local = sample(f, &pts)?;
        if local.windows(2).any(|w| w[0].sign * w[1].sign < 0) {
            warnings.push(format!(
                "close root pair below grid spacing near {:.6e}; resolved by local refinement",
                0.5 * (a + b)
            ));
            extra.append(&mut local);
            continue;
        }
        if depth + 1 < REFINE_DEPTH {
            for i in local_minima(&local) {
                queue.push((local[i - 1].x, local[i + 1].x, depth + 1));
            }
        }
    }
    if !extra.is_empty() {
        samples.extend(extra);
        samples.sort_by(|p, q| p.x.total_cmp(&q.x));
    }
    let known: Vec<Sample> = samples.into_iter().filter(|s| s.sign != 0).collect();
    let brackets: Vec<(Sample, Sample)> = known
        .windows(2)
        .filter(|w| w[0].sign != w[1].sign)
        .map(|w| (w[0], w[1]))
        .collect();
    let mut roots = brackets
        .par_iter()
        .map(|(a, b)| bisect(f, *a, *b, tol))
        .collect::<Result<Vec<f64>>>()?;
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Grid samples of c_N for every order in `orders`, one sweep per point.
/// Returns one sample vector per order.
fn sample_orders(
    gamma: i64,
    xs: &[f64],
    orders: &[usize],
    precision: Precision,
    at: impl Fn(f64) -> (f64, f64) + Sync,
) -> Result<Vec<Vec<Sample>>> {
    let rows = xs
        .par_iter()
        .map(|&x| {
            let (alpha, beta) = at(x);
            c_n_entries(gamma, alpha, beta, orders, precision, DEFAULT_RESCALE_EXPONENT)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..orders.len())
        .map(|k| {
            xs.iter()
                .zip(&rows)
                .map(|(&x, r)| Sample {
                    x,
                    sign: r[k].sign(),
                    log_mag: r[k].log_magnitude(DEFAULT_RESCALE_EXPONENT),
                })
                .collect()
        })
        .collect())
}

fn sample<F>(f: &F, xs: &[f64]) -> Result<Vec<Sample>>
where
    F: Fn(f64) -> Result<(i8, f64)> + Sync,
{
    xs.par_iter()
        .map(|&x| f(x).map(|(sign, log_mag)| Sample { x, sign, log_mag }))
        .collect()
}

/// Interior indices where ln|f| dips without a sign change on either side.
fn local_minima(s: &[Sample]) -> Vec<usize> {
    (1..s.len().saturating_sub(1))
        .filter(|&i| {
            let (p, c, n) = (s[i - 1], s[i], s[i + 1]);
            p.sign != 0
                && p.sign == c.sign
                && c.sign == n.sign
                && c.log_mag < p.log_mag
                && c.log_mag < n.log_mag
        })
        .collect()
}

fn bisect<F>(f: &F, mut a: Sample, mut b: Sample, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(i8, f64)> + Sync,
{
    while b.x - a.x > tol {
        let m = 0.5 * (a.x + b.x);
        if m <= a.x || m >= b.x {
            break;
        }
        let (s, _) = f(m)?;
        if s == 0 {
            return Ok(m);
        }
        if s == a.sign {
            a.x = m;
        } else {
            b.x = m;
        }
    }
    Ok(0.5 * (a.x + b.x))
}

/// Uniform cell midpoints on (lo, hi), plus a geometric run toward `lo`
/// when `dense_low` is set.
fn scan_points(lo: f64, hi: f64, n: usize, dense_low: bool) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + h * (i as f64 + 0.5)).collect();
    if dense_low {
        let mut g: Vec<f64> = (1..=40).map(|k| lo + 0.5 * h * 0.5f64.powi(k)).filter(|&x| x > lo).collect();
        g.reverse();
        g.extend(xs);
        xs = g;
    }
    xs
}

/// All bracketed roots of c_N(β) on (0, 2|α|/√27), ascending.
pub fn beta_roots_at_order(ctx: &ModelContext, n: usize, cfg: &ScanConfig) -> Result<OrderRoots> {
    Ok(beta_roots_at_orders(ctx, &[n], cfg)?.remove(0))
}

/// [`beta_roots_at_order`] for strictly increasing `orders`, sharing the
/// grid sweep.
pub fn beta_roots_at_orders(ctx: &ModelContext, orders: &[usize], cfg: &ScanConfig) -> Result<Vec<OrderRoots>> {
    cfg.validate()?;
    let bmax = ctx.beta_max();
    let xs = scan_points(0.0, bmax, cfg.grid_points, true);
    let grids = sample_orders(ctx.gamma(), &xs, orders, cfg.precision, |b| (ctx.alpha(), b))?;
    orders
        .par_iter()
        .zip(grids.into_par_iter())
        .map(|(&n, samples)| {
            let f = |b: f64| c_n_sign_value(ctx, b, n, cfg.precision).map(|s| (s.sign, s.log_magnitude));
            let mut warnings = Vec::new();
            let roots = scan_roots(&f, samples, cfg.root_tol, &mut warnings)?
                .into_iter()
                .filter(|&b| b > 0.0 && b < bmax)
                .collect();
            Ok(OrderRoots { order: n, roots, warnings })
        })
        .collect()
}

/// Roots of c_N(α) at β = 0 on (lo, hi), ascending.
pub fn alpha_roots_at_order(
    parity: Parity,
    lo: f64,
    hi: f64,
    n: usize,
    cfg: &ScanConfig,
) -> Result<OrderRoots> {
    Ok(alpha_roots_at_orders(parity, lo, hi, &[n], cfg)?.remove(0))
}

pub fn alpha_roots_at_orders(
    parity: Parity,
    lo: f64,
    hi: f64,
    orders: &[usize],
    cfg: &ScanConfig,
) -> Result<Vec<OrderRoots>> {
    cfg.validate()?;
    if !(lo < hi && hi < 0.0) {
        return Err(Error::InvalidInput(format!("alpha range ({lo}, {hi}) must be negative and ordered")));
    }
    let xs = scan_points(lo, hi, cfg.grid_points, false);
    let grids = sample_orders(parity.gamma(), &xs, orders, cfg.precision, |a| (a, 0.0))?;
    orders
        .par_iter()
        .zip(grids.into_par_iter())
        .map(|(&n, samples)| {
            let f = |a: f64| {
                c_n_entry(parity.gamma(), a, 0.0, n, cfg.precision, DEFAULT_RESCALE_EXPONENT)
                    .map(|e| (e.sign(), e.log_magnitude(DEFAULT_RESCALE_EXPONENT)))
            };
            let mut warnings = Vec::new();
            let roots = scan_roots(&f, samples, cfg.root_tol, &mut warnings)?;
            Ok(OrderRoots { order: n, roots, warnings })
        })
        .collect()
}

/// Link roots across orders; `radius` is the largest allowed jump.
fn track(per_order: &[OrderRoots], radius: f64) -> Vec<Chain> {
    let mut chains: Vec<Chain> = Vec::new();
    let mut prev_order = None;
    for or in per_order {
        let alive: Vec<usize> = (0..chains.len())
            .filter(|&c| Some(chains[c].last().0) == prev_order)
            .collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for &c in &alive {
            let x = chains[c].last().1;
            for (r, &y) in or.roots.iter().enumerate() {
                let d = (x - y).abs();
                if d <= radius {
                    pairs.push((d, c, r));
                }
            }
        }
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
        let mut used_c = vec![false; chains.len()];
        let mut used_r = vec![false; or.roots.len()];
        for (_, c, r) in pairs {
            if used_c[c] || used_r[r] {
                continue;
            }
            used_c[c] = true;
            used_r[r] = true;
            chains[c].history.push((or.order, or.roots[r]));
        }
        for (r, &y) in or.roots.iter().enumerate() {
            if !used_r[r] {
                chains.push(Chain {
                    history: vec![(or.order, y)],
                    status: Status::Spurious,
                });
            }
        }
        prev_order = Some(or.order);
    }
    chains
}

fn classify(chains: &mut [Chain], last: usize, cfg: &ScanConfig) {
    for c in chains.iter_mut() {
        c.status = if c.last().0 != last {
            Status::Spurious
        } else if c.settled(cfg.stable_steps, cfg.conv_tol) {
            Status::Converged
        } else {
            Status::Unconverged
        };
    }
}

/// Outcome of one chain-tracked scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedScan {
    pub orders: Vec<usize>,
    pub chains: Vec<Chain>,
    pub warnings: Vec<String>,
}

impl TrackedScan {
    pub fn converged(&self) -> impl Iterator<Item = &Chain> {
        self.chains.iter().filter(|c| c.status == Status::Converged)
    }

    pub fn unconverged(&self) -> impl Iterator<Item = &Chain> {
        self.chains.iter().filter(|c| c.status == Status::Unconverged)
    }
}

fn tracked<F>(cfg: &ScanConfig, radius: f64, roots_at: F) -> Result<TrackedScan>
where
    F: Fn(&[usize]) -> Result<Vec<OrderRoots>>,
{
    cfg.validate()?;
    let mut per_order = roots_at(&cfg.n_schedule)?;
    let mut last = cfg.last_order();
    let mut chains = track(&per_order, radius);
    classify(&mut chains, last, cfg);
    let step = cfg.step().max(1);
    while let Some(max) = cfg.max_order {
        if last + step > max || !chains.iter().any(|c| c.status == Status::Unconverged) {
            break;
        }
        last += step;
        per_order.extend(roots_at(&[last])?);
        chains = track(&per_order, radius);
        classify(&mut chains, last, cfg);
    }
    let mut warnings: Vec<String> = Vec::new();
    for or in &per_order {
        for w in &or.warnings {
            warnings.push(format!("N={}: {w}", or.order));
        }
    }
    chains.sort_by(|a, b| a.last().1.total_cmp(&b.last().1));
    Ok(TrackedScan {
        orders: per_order.iter().map(|o| o.order).collect(),
        chains,
        warnings,
    })
}

/// One bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub parity: Parity,
    /// Global index over both parities, 0 = ground state.
    pub nu: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub n_final: usize,
    pub drift: f64,
    pub status: Status,
}

/// States of one parity plus every tracked chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub context: ModelContext,
    pub converged: Vec<Eigenvalue>,
    pub scan: TrackedScan,
}

impl EigenReport {
    /// Chains still drifting at the final order (e.g. weakly bound states
    /// whose β is heading to 0).
    pub fn unconverged(&self) -> Vec<Eigenvalue> {
        self.scan
            .unconverged()
            .map(|c| to_eigen(self.context.parity(), 0, c))
            .collect()
    }
}

fn to_eigen(parity: Parity, nu: usize, c: &Chain) -> Eigenvalue {
    let (n_final, beta) = c.last();
    Eigenvalue {
        parity,
        nu,
        beta,
        epsilon: -beta * beta,
        n_final,
        drift: c.drift(),
        status: c.status,
    }
}

/// Converged states of one parity, deepest first. The k-th state of parity
/// γ is labelled ν = 2k + γ.
pub fn eigenvalues(ctx: &ModelContext, cfg: &ScanConfig) -> Result<EigenReport> {
    let radius = 10.0 * ctx.beta_max() / cfg.grid_points as f64;
    let scan = tracked(cfg, radius, |ns| beta_roots_at_orders(ctx, ns, cfg))?;
    let g = ctx.gamma() as usize;
    let mut converged: Vec<Eigenvalue> = scan
        .converged()
        .map(|c| to_eigen(ctx.parity(), 0, c))
        .collect();
    converged.sort_by(|a, b| b.beta.total_cmp(&a.beta));
    for (k, e) in converged.iter_mut().enumerate() {
        e.nu = 2 * k + g;
    }
    Ok(EigenReport {
        context: *ctx,
        converged,
        scan,
    })
}

/// Both parities merged and indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub v0: f64,
    /// Converged states ordered by ν.
    pub states: Vec<Eigenvalue>,
    pub even: EigenReport,
    pub odd: EigenReport,
    /// False when parity does not alternate with ε beyond resolution, or the
    /// per-parity counts are inconsistent with interleaving.
    pub alternation_ok: bool,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.epsilon).collect()
    }

    pub fn state(&self, nu: usize) -> Option<&Eigenvalue> {
        self.states.get(nu).filter(|s| s.nu == nu)
    }
}

/// Merge [`eigenvalues`] for both parities and check interleaving.
pub fn spectrum(v0: f64, cfg: &ScanConfig) -> Result<SpectrumReport> {
    let ce = ModelContext::from_v0(Parity::Even, v0)?;
    let co = ModelContext::from_v0(Parity::Odd, v0)?;
    let (even, odd) = rayon::join(|| eigenvalues(&ce, cfg), || eigenvalues(&co, cfg));
    let (even, odd) = (even?, odd?);
    let mut warnings = Vec::new();
    let mut alternation_ok = true;
    let (ne, no) = (even.converged.len(), odd.converged.len());
    if !(ne == no || ne == no + 1) {
        alternation_ok = false;
        warnings.push(format!(
            "parity counts {ne} even / {no} odd cannot interleave; a root was probably missed"
        ));
    }
    let mut states: Vec<Eigenvalue> = even.converged.iter().chain(&odd.converged).copied().collect();
    states.sort_by_key(|s| s.nu);
    for w in states.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.epsilon > b.epsilon {
            // deep doublets can be degenerate to within root resolution
            let resolution = 2.0 * (a.beta + b.beta) * (cfg.root_tol + a.drift.max(b.drift));
            if a.epsilon - b.epsilon > resolution.max(1e-12 * a.epsilon.abs()) {
                alternation_ok = false;
                warnings.push(format!(
                    "parity alternation broken between nu={} ({}) and nu={} ({})",
                    a.nu, a.parity, b.nu, b.parity
                ));
            }
        }
    }
    for r in [&even, &odd] {
        for c in r.scan.unconverged() {
            let (n, b) = c.last();
            warnings.push(format!(
                "{} chain at beta={b:.6e} unconverged at N={n} (drift {:.2e})",
                r.context.parity(),
                c.drift()
            ));
        }
    }
    Ok(SpectrumReport {
        v0,
        states,
        even,
        odd,
        alternation_ok,
        warnings,
    })
}

/// A coupling where state K reaches ε = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    #[serde(rename = "K")]
    pub k: usize,
    pub parity: Parity,
    pub alpha_k: f64,
    pub v0_k: f64,
    pub n_final: usize,
    pub drift: f64,
    /// `Unconverged` when the root survived to the last order but its drift
    /// history did not meet the stability rule.
    pub status: Status,
}

/// Critical couplings for one parity plus scan diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalReport {
    pub parity: Parity,
    pub values: Vec<CriticalValue>,
    /// Requested K with no surviving root.
    pub missing: Vec<usize>,
    pub precision: Precision,
    pub scan: TrackedScan,
}

pub fn parity_of_k(k: usize) -> Parity {
    if k % 2 == 1 {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// K ≥ 6 roots lose digits in binary64 faster; escalate unless the caller
/// already chose a wide backend.
fn critical_precision(k_max: usize, p: Precision) -> Precision {
    match p {
        Precision::Double if k_max >= 6 => Precision::Adaptive { max_bits: 256 },
        other => other,
    }
}

/// α_K for each K in `k_list` (all of one parity: odd K ↔ odd states).
///
/// The m-th root in order of increasing |α| among chains that survive to the
/// last order is K = 2m - 1 for odd parity and K = 2m for even parity.
/// Surviving chains that did not meet the stability rule are returned with
/// status `Unconverged`.
pub fn critical_alpha(parity: Parity, k_list: &[usize], cfg: &ScanConfig) -> Result<CriticalReport> {
    if k_list.is_empty() {
        return Err(Error::InvalidInput("K list must be nonempty".into()));
    }
    if let Some(&k) = k_list.iter().find(|&&k| k == 0 || parity_of_k(k) != parity) {
        return Err(Error::InvalidInput(format!("K={k} does not belong to {parity} parity")));
    }
    let k_max = *k_list.iter().max().expect("nonempty");
    let mut c = cfg.clone();
    c.precision = critical_precision(k_max, cfg.precision);
    let (lo, hi) = (-(4.0 * k_max as f64 + 8.0), -0.5);
    let radius = 10.0 * (hi - lo) / c.grid_points as f64;
    let scan = tracked(&c, radius, |ns| alpha_roots_at_orders(parity, lo, hi, ns, &c))?;
    let mut conv: Vec<&Chain> = scan.chains.iter().filter(|c| c.status != Status::Spurious).collect();
    conv.sort_by(|a, b| b.last().1.total_cmp(&a.last().1));
    let shift = parity.gamma() as usize;
    let mut values = Vec::new();
    let mut missing = Vec::new();
    for &k in k_list {
        let m = (k + shift) / 2; // odd: (K+1)/2, even: K/2
        match conv.get(m - 1) {
            Some(ch) => {
                let (n_final, a) = ch.last();
                values.push(CriticalValue {
                    k,
                    parity,
                    alpha_k: a,
                    v0_k: a * a,
                    n_final,
                    drift: ch.drift(),
                    status: ch.status,
                });
            }
            None => missing.push(k),
        }
    }
    values.sort_by_key(|v| v.k);
    Ok(CriticalReport {
        parity,
        values,
        missing,
        precision: c.precision,
        scan,
    })
}

/// Critical values for K = 1..=k_max, both parities, sorted by K.
pub fn critical_table(k_max: usize, cfg: &ScanConfig) -> Result<(Vec<CriticalValue>, Vec<CriticalReport>)> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be >= 1".into()));
    }
    let odd: Vec<usize> = (1..=k_max).filter(|k| k % 2 == 1).collect();
    let even: Vec<usize> = (1..=k_max).filter(|k| k % 2 == 0).collect();
    let (ro, re) = rayon::join(
        || critical_alpha(Parity::Odd, &odd, cfg),
        || {
            if even.is_empty() {
                Ok(None)
            } else {
                critical_alpha(Parity::Even, &even, cfg).map(Some)
            }
        },
    );
    let mut reports = vec![ro?];
    if let Some(r) = re? {
        reports.push(r);
    }
    let mut all: Vec<CriticalValue> = reports.iter().flat_map(|r| r.values.clone()).collect();
    all.sort_by_key(|v| v.k);
    Ok((all, reports))
}

/// Converged state count at v₀ with threshold diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateCount {
    pub v0: f64,
    pub count: usize,
    /// Set when v₀ sits within tolerance of a tabulated threshold, or a chain
    /// near β = 0 did not settle.
    pub ambiguous: bool,
    /// 1 + #{K : v₀,K < v₀} when a table was supplied.
    pub expected: Option<usize>,
    pub warnings: Vec<String>,
}

impl BoundStateCount {
    pub fn consistent(&self) -> Option<bool> {
        self.expected.map(|e| e == self.count)
    }
}

/// Relative distance to a threshold below which the count is ambiguous.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;

pub fn bound_state_count(v0: f64, cfg: &ScanConfig) -> Result<BoundStateCount> {
    bound_state_count_with_table(v0, cfg, None)
}

pub fn bound_state_count_with_table(
    v0: f64,
    cfg: &ScanConfig,
    table: Option<&[CriticalValue]>,
) -> Result<BoundStateCount> {
    let sp = spectrum(v0, cfg)?;
    let mut warnings = sp.warnings.clone();
    let mut ambiguous = false;
    for r in [&sp.even, &sp.odd] {
        let weak = 10.0 * r.context.beta_max() / cfg.grid_points as f64;
        if r.scan.unconverged().any(|c| c.last().1 < weak) {
            ambiguous = true;
        }
    }
    let expected = table.map(|t| {
        for cv in t {
            if ((v0 - cv.v0_k) / cv.v0_k).abs() <= THRESHOLD_TOLERANCE {
                ambiguous = true;
                warnings.push(format!("v0={v0} is within tolerance of threshold K={}", cv.k));
            }
        }
        1 + t.iter().filter(|cv| cv.v0_k < v0).count()
    });
    let count = sp.states.len();
    if let Some(e) = expected {
        if e != count {
            warnings.push(format!("count {count} disagrees with threshold table ({e})"));
        }
    }
    Ok(BoundStateCount {
        v0,
        count,
        ambiguous,
        expected,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn config_checks() {
        assert!(ScanConfig::default().validate().is_ok());
        let c = ScanConfig {
            n_schedule: vec![10, 10],
            ..ScanConfig::default()
        };
        assert!(c.validate().is_err());
        let c = ScanConfig {
            conv_tol: 0.0,
            ..ScanConfig::default()
        };
        assert!(c.validate().is_err());
        assert_eq!(ScanConfig::up_to(60).n_schedule.last(), Some(&60));
    }

    #[test]
    fn exact_root_at_low_order() {
        let s13 = 13f64.sqrt();
        let ctx = ModelContext::new(Parity::Even, -4.0 - s13).unwrap();
        let r = beta_roots_at_order(&ctx, 2, &ScanConfig::default()).unwrap();
        let target = (1.0 + s13) / 2.0;
        assert!(r.roots.iter().any(|b| (b - target).abs() < 1e-10), "{:?}", r.roots);
        assert!(r.roots.iter().all(|&b| b > 0.0 && b < ctx.beta_max()));
    }

    #[test]
    fn tracking_links_nearest_roots() {
        let per = vec![
            OrderRoots { order: 10, roots: vec![1.0, 2.0], warnings: vec![] },
            OrderRoots { order: 15, roots: vec![1.001, 2.5, 3.0], warnings: vec![] },
            OrderRoots { order: 20, roots: vec![1.001, 3.05], warnings: vec![] },
        ];
        let mut ch = track(&per, 0.1);
        let cfg = ScanConfig { stable_steps: 1, conv_tol: 1e-6, ..ScanConfig::default() };
        classify(&mut ch, 20, &cfg);
        ch.sort_by(|a, b| a.history[0].1.total_cmp(&b.history[0].1));
        assert_eq!(ch.len(), 4);
        assert_eq!(ch[0].status, Status::Converged);
        assert_eq!(ch[1].status, Status::Spurious);
        assert_eq!(ch[2].status, Status::Spurious);
        assert_eq!(ch[3].status, Status::Unconverged);
    }

    #[test]
    fn exact_level_is_refound() {
        let s13 = 13f64.sqrt();
        let ctx = ModelContext::new(Parity::Even, -4.0 - s13).unwrap();
        let r = eigenvalues(&ctx, &ScanConfig::default()).unwrap();
        assert!(r
            .converged
            .iter()
            .any(|e| (e.epsilon + (7.0 + s13) / 2.0).abs() < 1e-8));
        assert_eq!(r.converged[0].nu, 0);
    }

    #[test]
    fn shallow_well_has_single_even_state() {
        let cfg = ScanConfig::default();
        let e = eigenvalues(&ModelContext::from_v0(Parity::Even, 4.0).unwrap(), &cfg).unwrap();
        let o = eigenvalues(&ModelContext::from_v0(Parity::Odd, 4.0).unwrap(), &cfg).unwrap();
        assert_eq!(e.converged.len(), 1);
        assert!(o.converged.is_empty());
    }

    #[test]
    fn first_critical_couplings() {
        let cfg = ScanConfig::up_to(60);
        let r = critical_alpha(Parity::Odd, &[1], &cfg).unwrap();
        assert_relative_eq!(r.values[0].alpha_k, -2.073_164_811, epsilon = 5e-8);
        let r = critical_alpha(Parity::Even, &[2], &cfg).unwrap();
        assert_relative_eq!(r.values[0].alpha_k, -5.272_715_881, epsilon = 5e-9);
        assert!(critical_alpha(Parity::Even, &[1], &cfg).is_err());
        assert!(critical_alpha(Parity::Even, &[], &cfg).is_err());
    }

    #[test]
    fn counts_between_thresholds() {
        let cfg = ScanConfig::default();
        assert_eq!(bound_state_count(4.0, &cfg).unwrap().count, 1);
        assert_eq!(bound_state_count(10.0, &cfg).unwrap().count, 2);
        assert_eq!(bound_state_count(30.0, &cfg).unwrap().count, 3);
    }
}
