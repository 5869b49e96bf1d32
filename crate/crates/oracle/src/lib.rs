//! Finite-difference reference solver for -φ'' + v(z)φ = εφ with
//! v(z) = -v₀ sinh⁴(z)/cosh⁶(z).
//!
//! Second-order central differences on a uniform grid of M interior points
//! in (-L, L) with Dirichlet ends. M is odd so z = 0 is a node, which lets
//! the tridiagonal matrix split exactly into an even and an odd block.
//! Eigenvalues come from Sturm-count bisection on each block; eigenvectors
//! from inverse iteration.
//!
//! This crate deliberately shares no code with the series solver.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Grid half-width, interior point count and number of states wanted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub l: f64,
    pub m: usize,
    pub k: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            l: 12.0,
            m: 4001,
            k: 64,
        }
    }
}

impl OracleConfig {
    pub fn new(l: f64, m: usize, k: usize) -> Result<Self> {
        let c = Self { l, m, k };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(OracleError::InvalidConfig(format!("L must be positive, got {}", self.l)));
        }
        if self.m < 3 || self.m.is_multiple_of(2) {
            return Err(OracleError::InvalidConfig(format!(
                "M must be odd and at least 3, got {}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / (self.m as f64 + 1.0)
    }

    /// Same L, half the spacing (M → 2M + 1 keeps M odd).
    pub fn halved(&self) -> Self {
        Self {
            m: 2 * self.m + 1,
            ..*self
        }
    }

    /// Twice the half-width at the same spacing.
    pub fn widened(&self) -> Self {
        Self {
            l: 2.0 * self.l,
            m: 2 * self.m + 1,
            ..*self
        }
    }

    /// Interior grid points z_1..z_M.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.m).map(|i| -self.l + i as f64 * h).collect()
    }
}

/// v(z) = -v₀ tanh⁴(z) sech²(z).
pub fn potential(z: f64, v0: f64) -> f64 {
    let t = z.tanh();
    let s = 1.0 / z.cosh();
    -v0 * t * t * t * t * s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleParity {
    Even,
    Odd,
}

impl OracleParity {
    pub fn gamma(self) -> u8 {
        match self {
            OracleParity::Even => 0,
            OracleParity::Odd => 1,
        }
    }
}

/// One bound state of the discretized operator.
#[derive(Debug, Clone)]
pub struct OracleState {
    pub epsilon: f64,
    pub parity: OracleParity,
    pub nodes: usize,
    /// max(|φ_1|, |φ_M|) / max|φ|.
    pub boundary_ratio: f64,
    /// Samples on [`OracleConfig::grid`], normalized so h·Σφ² = 1, with
    /// φ > 0 just right of the origin.
    pub vector: Vec<f64>,
}

impl OracleState {
    pub fn contaminated(&self) -> bool {
        self.boundary_ratio > CONTAMINATION_RATIO
    }
}

pub const CONTAMINATION_RATIO: f64 = 1e-8;

/// Negative part of the discrete spectrum, ascending.
#[derive(Debug, Clone)]
pub struct OracleSpectrum {
    pub v0: f64,
    pub config: OracleConfig,
    pub states: Vec<OracleState>,
    /// Total number of negative eigenvalues (may exceed `states.len()`).
    pub negative_count: usize,
    pub warnings: Vec<String>,
}

impl OracleSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.epsilon).collect()
    }
}

/// Symmetric tridiagonal block: diagonal and squared off-diagonal.
struct Block {
    diag: Vec<f64>,
    off: Vec<f64>,
    off2: Vec<f64>,
}

impl Block {
    /// Eigenvalues strictly below x.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - self.off2[i - 1] / q
            };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn lower_bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i] - l - r
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The k-th (0-based) eigenvalue, known to lie in [lo, hi).
    fn eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inverse iteration at shift λ.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = lambda.abs().max(1.0);
        let shift = lambda - 1e-10 * scale;
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                break;
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solve (T - σ)x = b by the Thomas algorithm.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let tiny = f64::EPSILON * sigma.abs().max(1.0);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0] - sigma;
        if piv.abs() < tiny {
            piv = tiny;
        }
        if n > 1 {
            c[0] = self.off[0] / piv;
        }
        d[0] = b[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - sigma - self.off[i - 1] * c[i - 1];
            if piv.abs() < tiny {
                piv = tiny;
            }
            if i + 1 < n {
                c[i] = self.off[i] / piv;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        x
    }
}

struct Discretization {
    cfg: OracleConfig,
    center: usize,
    even: Block,
    odd: Block,
}

impl Discretization {
    fn new(v0: f64, cfg: &OracleConfig) -> Self {
        let h = cfg.h();
        let inv_h2 = 1.0 / (h * h);
        let z = cfg.grid();
        let c = (cfg.m - 1) / 2;
        let diag: Vec<f64> = z[c..].iter().map(|&zi| 2.0 * inv_h2 + potential(zi, v0)).collect();
        let n = diag.len();
        // even block: φ_{c-1} = φ_{c+1}; symmetrized by scaling φ_c by √2
        let mut off_e = vec![-inv_h2; n - 1];
        off_e[0] = -std::f64::consts::SQRT_2 * inv_h2;
        let even = Block {
            off2: off_e.iter().map(|e| e * e).collect(),
            off: off_e,
            diag: diag.clone(),
        };
        // odd block: φ_c = 0
        let off_o = vec![-inv_h2; n.saturating_sub(2)];
        let odd = Block {
            off2: off_o.iter().map(|e| e * e).collect(),
            off: off_o,
            diag: diag[1..].to_vec(),
        };
        Self {
            cfg: *cfg,
            center: c,
            even,
            odd,
        }
    }

    fn count_below(&self, x: f64) -> usize {
        self.even.count_below(x) + self.odd.count_below(x)
    }

    fn full_vector(&self, parity: OracleParity, w: &[f64]) -> Vec<f64> {
        let m = self.cfg.m;
        let c = self.center;
        let mut phi = vec![0.0; m];
        match parity {
            OracleParity::Even => {
                phi[c] = std::f64::consts::SQRT_2 * w[0];
                for (k, &v) in w.iter().enumerate().skip(1) {
                    phi[c + k] = v;
                    phi[c - k] = v;
                }
            }
            OracleParity::Odd => {
                for (k, &v) in w.iter().enumerate() {
                    phi[c + 1 + k] = v;
                    phi[c - 1 - k] = -v;
                }
            }
        }
        let h = self.cfg.h();
        let norm = (h * phi.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let first = phi[c + 1];
        let sign = if first < 0.0 { -1.0 } else { 1.0 };
        phi.iter_mut().for_each(|v| *v *= sign / norm);
        phi
    }
}

/// Sign changes, skipping samples below `floor` × max|φ|.
pub fn count_sign_changes(phi: &[f64], floor: f64) -> usize {
    let max = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = floor * max;
    let mut last = 0.0f64;
    let mut n = 0;
    for &v in phi {
        if v.abs() <= cut {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            n += 1;
        }
        last = v;
    }
    n
}

fn check_v0(v0: f64) -> Result<()> {
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(OracleError::InvalidInput(format!("v0 must be positive, got {v0}")));
    }
    Ok(())
}

fn block_states(
    d: &Discretization,
    parity: OracleParity,
    limit: usize,
) -> Vec<OracleState> {
    let block = match parity {
        OracleParity::Even => &d.even,
        OracleParity::Odd => &d.odd,
    };
    let neg = block.count_below(0.0).min(limit);
    let lo = block.lower_bound() - 1.0;
    (0..neg)
        .map(|k| {
            let e = block.eigenvalue(k, lo, 0.0);
            let w = block.eigenvector(e);
            let phi = d.full_vector(parity, &w);
            let max = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let edge = phi[0].abs().max(phi[phi.len() - 1].abs());
            OracleState {
                epsilon: e,
                parity,
                nodes: count_sign_changes(&phi, 1e-10),
                boundary_ratio: if max > 0.0 { edge / max } else { 0.0 },
                vector: phi,
            }
        })
        .collect()
}

/// Lowest min(k, #negative) eigenvalues with parity, nodes and vectors.
pub fn fd_spectrum(v0: f64, cfg: &OracleConfig) -> Result<OracleSpectrum> {
    check_v0(v0)?;
    cfg.validate()?;
    let d = Discretization::new(v0, cfg);
    let mut states = block_states(&d, OracleParity::Even, cfg.k);
    states.extend(block_states(&d, OracleParity::Odd, cfg.k));
    states.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    states.truncate(cfg.k);
    let mut warnings = Vec::new();
    let tail = potential(cfg.l, v0);
    for (nu, s) in states.iter().enumerate() {
        if s.contaminated() {
            warnings.push(format!(
                "state {nu} (eps={:.6e}) has boundary amplitude ratio {:.2e} > {:.0e}; L={} may be too small",
                s.epsilon, s.boundary_ratio, CONTAMINATION_RATIO, cfg.l
            ));
        }
        if tail <= s.epsilon * 1e-6 {
            // |v(L)| must be negligible against |ε|
            warnings.push(format!("potential at L={} is not negligible against state {nu}", cfg.l));
        }
    }
    Ok(OracleSpectrum {
        v0,
        config: *cfg,
        negative_count: d.count_below(0.0),
        states,
        warnings,
    })
}

/// Number of discrete eigenvalues below x.
pub fn count_below(v0: f64, x: f64, cfg: &OracleConfig) -> Result<usize> {
    check_v0(v0)?;
    cfg.validate()?;
    Ok(Discretization::new(v0, cfg).count_below(x))
}

/// fd_spectrum, widening the box (same h) while any state is contaminated.
pub fn fd_spectrum_auto(v0: f64, cfg: &OracleConfig, max_l: f64) -> Result<OracleSpectrum> {
    let mut c = *cfg;
    loop {
        let s = fd_spectrum(v0, &c)?;
        if !s.states.iter().any(|st| st.contaminated()) || 2.0 * c.l > max_l {
            return Ok(s);
        }
        c = c.widened();
    }
}

/// Eigenvalues at h and h/2 with the Richardson extrapolation and the
/// measured discretization error C·h².
#[derive(Debug, Clone)]
pub struct RichardsonEstimate {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<f64>,
    /// |ε_h - ε_{h/2}|·4/3, an estimate of the error of `coarse`.
    pub coarse_error: Vec<f64>,
    pub parities: Vec<OracleParity>,
}

pub fn richardson(v0: f64, cfg: &OracleConfig) -> Result<RichardsonEstimate> {
    let a = fd_spectrum(v0, cfg)?;
    let b = fd_spectrum(v0, &cfg.halved())?;
    let n = a.states.len().min(b.states.len());
    let mut out = RichardsonEstimate {
        coarse: Vec::with_capacity(n),
        fine: Vec::with_capacity(n),
        extrapolated: Vec::with_capacity(n),
        coarse_error: Vec::with_capacity(n),
        parities: Vec::with_capacity(n),
    };
    for (s, t) in a.states.iter().zip(&b.states) {
        out.coarse.push(s.epsilon);
        out.fine.push(t.epsilon);
        out.extrapolated.push((4.0 * t.epsilon - s.epsilon) / 3.0);
        out.coarse_error.push(4.0 / 3.0 * (s.epsilon - t.epsilon).abs());
        out.parities.push(s.parity);
    }
    Ok(out)
}
