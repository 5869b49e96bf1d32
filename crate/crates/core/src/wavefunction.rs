//! Real-space eigenfunctions φ(z) = ξ^{β/2} (1-ξ)^{γ/2} sign(z)^γ e^{αξ/2} y(ξ)
//! with ξ = sech²(z).
//!
//! For γ = 1 the factor (1-ξ)^{1/2} sign(z) is just tanh(z), so odd states
//! come out smooth through the origin. Grids are symmetric with an odd point
//! count; values are computed for z ≥ 0 and reflected.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::PolynomialSolution;
use crate::recurrence::{coefficient_sequence, ModelContext, Parity};
use crate::scalar::Precision;
use crate::spectrum::Eigenvalue;

/// ln cosh z without overflow.
pub fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// sinh⁴(z)/cosh⁶(z) = tanh⁴(z) sech²(z).
pub fn shape(z: f64) -> f64 {
    let t = z.tanh();
    let s = 1.0 / z.cosh();
    t * t * t * t * s * s
}

/// φ(z) from y-series coefficients c_0..c_N.
pub fn evaluate_phi(parity: Parity, alpha: f64, beta: f64, coeffs: &[f64], z: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    Ok(phi_unchecked(parity, alpha, beta, coeffs, z))
}

fn phi_unchecked(parity: Parity, alpha: f64, beta: f64, coeffs: &[f64], z: f64) -> f64 {
    let lc = ln_cosh(z);
    let xi = (-2.0 * lc).exp();
    let y = coeffs.iter().rev().fold(0.0, |acc, &c| acc * xi + c);
    let odd = match parity {
        Parity::Even => 1.0,
        Parity::Odd => z.tanh(),
    };
    (-beta * lc + 0.5 * alpha * xi).exp() * odd * y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ExactPolynomial,
    NumericSeries,
    Oracle,
}

/// Samples of φ on a uniform symmetric grid [-L, L].
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub z_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub parity: Parity,
    /// Simpson estimate of the L² norm of `values`.
    pub norm: f64,
    pub source: Source,
}

/// Grid half-width and point count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    /// Odd, at least 5.
    pub points: usize,
}

/// Tail target at the grid edge for [`default_half_width`].
pub const TAIL_TARGET: f64 = 1e-14;

/// Smallest L ≥ 12 with ξ^{β/2} ≤ 10⁻¹⁴ at z = L.
///
/// ξ^{β/2} = sech^β z ≤ 2^β e^{-βz}, so L = (14 ln 10 + β ln 2)/β suffices.
pub fn default_half_width(beta: f64) -> f64 {
    let l = (-TAIL_TARGET.ln() + beta * std::f64::consts::LN_2) / beta;
    l.max(12.0)
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput(format!("half-width must be positive, got {half_width}")));
        }
        if points < 5 || points.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("point count must be odd and >= 5, got {points}")));
        }
        Ok(Self { half_width, points })
    }

    /// Default L for β with spacing at most `h`.
    pub fn for_beta(beta: f64, h: f64) -> Result<Self> {
        let l = default_half_width(beta);
        let half = (l / h).ceil() as usize;
        Self::new(l, 2 * half + 1)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        let c = (self.points - 1) / 2;
        (0..self.points)
            .map(|i| (i as f64 - c as f64) * h)
            .collect()
    }
}

/// Composite Simpson rule on uniform samples (odd count).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    debug_assert!(n % 2 == 1 && n >= 3);
    let mut s = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

impl GridWavefunction {
    /// Samples from series coefficients, reflected about z = 0.
    pub fn from_series(
        parity: Parity,
        alpha: f64,
        beta: f64,
        coeffs: &[f64],
        grid: GridSpec,
        source: Source,
    ) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
        }
        let z_grid = grid.grid();
        let c = (grid.points - 1) / 2;
        let right: Vec<f64> = z_grid[c..]
            .iter()
            .map(|&z| phi_unchecked(parity, alpha, beta, coeffs, z))
            .collect();
        let mut values = vec![0.0; grid.points];
        let sign = match parity {
            Parity::Odd => -1.0,
            Parity::Even => 1.0,
        };
        for (k, &v) in right.iter().enumerate() {
            values[c + k] = v;
            values[c - k] = sign * v;
        }
        if parity == Parity::Odd {
            values[c] = 0.0;
        }
        Self::from_samples(z_grid, values, parity, source)
    }

    /// Wrap externally computed samples; the grid must be uniform,
    /// symmetric and of odd length.
    pub fn from_samples(z_grid: Vec<f64>, mut values: Vec<f64>, parity: Parity, source: Source) -> Result<Self> {
        let n = z_grid.len();
        if n != values.len() || n < 5 || n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "need matching odd-length samples (got {n} points, {} values)",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("wavefunction sample is not finite".into()));
        }
        // sign convention: positive just right of the origin
        let c = (n - 1) / 2;
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(v) = values[c..].iter().find(|v| v.abs() > 1e-10 * max) {
            if *v < 0.0 {
                values.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let h = (z_grid[n - 1] - z_grid[0]) / (n - 1) as f64;
        let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
        let norm = simpson(&sq, h).sqrt();
        Ok(Self {
            z_grid,
            values,
            parity,
            norm,
            source,
        })
    }

    /// Exact polynomial solution sampled on `grid`.
    pub fn exact(sol: &PolynomialSolution, grid: GridSpec) -> Result<Self> {
        Self::from_series(
            sol.parity,
            sol.alpha,
            sol.beta,
            &sol.coeffs_float,
            grid,
            Source::ExactPolynomial,
        )
    }

    /// Numeric state from the spectrum scan; the series order is raised past
    /// `n_final` until the tail is negligible.
    pub fn numeric(v0: f64, state: &Eigenvalue, grid: GridSpec, precision: Precision) -> Result<Self> {
        let ctx = ModelContext::from_v0(state.parity, v0)?;
        let s = series_coefficients(&ctx, state.beta, state.n_final, precision)?;
        Self::from_series(state.parity, ctx.alpha(), state.beta, &s.coeffs, grid, Source::NumericSeries)
    }

    pub fn spacing(&self) -> f64 {
        let n = self.z_grid.len();
        (self.z_grid[n - 1] - self.z_grid[0]) / (n - 1) as f64
    }

    pub fn half_width(&self) -> f64 {
        self.z_grid[self.z_grid.len() - 1]
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm - 1.0).abs() < 1e-12
    }

    /// Write `z,phi` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidInput(format!("csv output failed: {e}"));
        w.write_record(["z", "phi"]).map_err(io)?;
        for (z, v) in self.z_grid.iter().zip(&self.values) {
            w.write_record([format!("{z:.12e}"), format!("{v:.12e}")]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

/// Scale to unit Simpson L² norm.
pub fn normalize(w: &GridWavefunction) -> Result<GridWavefunction> {
    if !(w.norm.is_finite() && w.norm > 0.0) {
        return Err(Error::InvalidInput(format!("cannot normalize a wavefunction with norm {}", w.norm)));
    }
    let values: Vec<f64> = w.values.iter().map(|v| v / w.norm).collect();
    let h = w.spacing();
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    Ok(GridWavefunction {
        z_grid: w.z_grid.clone(),
        values,
        parity: w.parity,
        norm: simpson(&sq, h).sqrt(),
        source: w.source,
    })
}

/// Node count with the samples it could not classify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCount {
    pub nodes: usize,
    /// A sign change straddled a run of samples below the noise floor.
    pub ambiguous: bool,
}

pub const NODE_NOISE_FLOOR: f64 = 1e-10;

/// Interior sign changes, ignoring samples below 10⁻¹⁰ max|φ|.
pub fn count_nodes(w: &GridWavefunction) -> NodeCount {
    count_nodes_with_floor(w, NODE_NOISE_FLOOR)
}

pub fn count_nodes_with_floor(w: &GridWavefunction, floor: f64) -> NodeCount {
    let max = w.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = floor * max;
    let mut nodes = 0;
    let mut ambiguous = false;
    let mut last: Option<(usize, f64)> = None;
    for (i, &v) in w.values.iter().enumerate() {
        if v.abs() <= cut {
            continue;
        }
        if let Some((j, u)) = last {
            if (u > 0.0) != (v > 0.0) {
                nodes += 1;
                // skipped samples inside the support (not the decaying tails)
                // leave the node position unresolved; the exact zero at the
                // origin of an odd state is the one expected gap
                let gap = i - j - 1;
                let c = (w.values.len() - 1) / 2;
                let origin_only = gap == 1 && j + 1 == c && w.parity == Parity::Odd;
                if gap > 0 && !origin_only {
                    ambiguous = true;
                }
            }
        }
        last = Some((i, v));
    }
    NodeCount { nodes, ambiguous }
}

/// ⟨sinh⁴/cosh⁶⟩ = ∫φ² shape / ∫φ².
pub fn shape_expectation(w: &GridWavefunction) -> f64 {
    let h = w.spacing();
    let num: Vec<f64> = w
        .z_grid
        .iter()
        .zip(&w.values)
        .map(|(&z, &v)| v * v * shape(z))
        .collect();
    let den: Vec<f64> = w.values.iter().map(|v| v * v).collect();
    simpson(&num, h) / simpson(&den, h)
}

/// Series coefficients c_0..c_N at a numeric eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub coeffs: Vec<f64>,
    pub order: usize,
    /// max of the last three |c_j| relative to Σ|c_j|.
    pub tail: f64,
    pub tail_ok: bool,
}

pub const TAIL_TOLERANCE: f64 = 1e-12;
const MAX_SERIES_ORDER: usize = 2000;

/// c_0..c_N with N raised from `n_start` in steps of 20 until the last
/// terms are below 10⁻¹² of Σ|c_j| (the series bound on |y| for ξ ≤ 1).
pub fn series_coefficients(
    ctx: &ModelContext,
    beta: f64,
    n_start: usize,
    precision: Precision,
) -> Result<SeriesCoefficients> {
    let mut n = n_start.max(3);
    loop {
        let seq = coefficient_sequence(ctx, beta, n, precision)?;
        let coeffs = seq.values();
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("series coefficients overflow at N={n}")));
        }
        let total: f64 = coeffs.iter().map(|c| c.abs()).sum();
        let tail = coeffs[n - 2..].iter().fold(0.0f64, |m, c| m.max(c.abs())) / total;
        let tail_ok = tail <= TAIL_TOLERANCE;
        if tail_ok || n + 20 > MAX_SERIES_ORDER {
            return Ok(SeriesCoefficients {
                coeffs,
                order: n,
                tail,
                tail_ok,
            });
        }
        n += 20;
    }
}
