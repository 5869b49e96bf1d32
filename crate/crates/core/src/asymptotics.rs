//! Potential geometry, the harmonic large-v₀ asymptote, unit conversion and
//! the Hellmann–Feynman consistency check dε/dv₀ = -⟨sinh⁴/cosh⁶⟩.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Precision;
use crate::spectrum::{spectrum, ScanConfig, SpectrumReport};
use crate::wavefunction::{normalize, shape, shape_expectation, GridSpec, GridWavefunction};

fn check_v0(v0: f64) -> Result<()> {
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(Error::InvalidInput(format!("v0 must be finite and positive, got {v0}")));
    }
    Ok(())
}

/// v(z) = -v₀ sinh⁴(z)/cosh⁶(z), evaluated as -v₀ tanh⁴(z) sech²(z).
pub fn potential(z: f64, v0: f64) -> f64 {
    -v0 * shape(z)
}

/// Minima of the double well and its curvature there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellGeometry {
    pub z_plus: f64,
    pub z_minus: f64,
    /// v(z±) = -4v₀/27.
    pub depth: f64,
    /// v''(z±) = 16v₀/27.
    pub curvature: f64,
}

/// ln(√3 + √2).
pub fn z_plus() -> f64 {
    (3f64.sqrt() + 2f64.sqrt()).ln()
}

pub fn well_geometry(v0: f64) -> Result<WellGeometry> {
    check_v0(v0)?;
    let zp = z_plus();
    Ok(WellGeometry {
        z_plus: zp,
        z_minus: -zp,
        depth: -4.0 * v0 / 27.0,
        curvature: 16.0 * v0 / 27.0,
    })
}

impl WellGeometry {
    /// Coefficient of (z - z±)² in the Taylor expansion.
    pub fn quadratic_coefficient(&self) -> f64 {
        0.5 * self.curvature
    }
}

/// ε_ν ≈ -4v₀/27 + 2√(2v₀/27)(2ν + 1).
pub fn harmonic_asymptote(v0: f64, nu: usize) -> f64 {
    -4.0 * v0 / 27.0 + 2.0 * (2.0 * v0 / 27.0).sqrt() * (2.0 * nu as f64 + 1.0)
}

/// Physical parameters of V(x) = -V₀ sinh⁴(x/d)/cosh⁶(x/d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionfulParams {
    pub mass: f64,
    pub width: f64,
    pub depth: f64,
    pub hbar: f64,
}

impl DimensionfulParams {
    pub fn new(mass: f64, width: f64, depth: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("width", width), ("depth", depth), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            mass,
            width,
            depth,
            hbar,
        })
    }

    /// ħ²/(2md²), the energy unit.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass * self.width * self.width)
    }
}

/// v₀ = 2md²V₀/ħ².
pub fn to_dimensionless(p: &DimensionfulParams) -> f64 {
    2.0 * p.mass * p.width * p.width * p.depth / (p.hbar * p.hbar)
}

/// E = ħ²ε/(2md²).
pub fn from_dimensionless(epsilon: f64, p: &DimensionfulParams) -> f64 {
    epsilon * p.energy_scale()
}

/// ε = 2md²E/ħ².
pub fn energy_to_dimensionless(energy: f64, p: &DimensionfulParams) -> f64 {
    energy / p.energy_scale()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceRule {
    Central,
    /// 2D(δ/2) - D(δ) with forward differences, used when the state is
    /// missing at v₀ - δ.
    ForwardRichardson,
}

/// Both sides of dε_ν/dv₀ = -⟨sinh⁴/cosh⁶⟩_ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HellmannFeynman {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub delta: f64,
    pub rule: DifferenceRule,
}

/// Spacing for the quadrature grid behind the right-hand side.
pub const HF_GRID_SPACING: f64 = 0.005;

fn level(sp: &SpectrumReport, nu: usize) -> Option<f64> {
    sp.state(nu).map(|s| s.epsilon)
}

/// Default δ = 10⁻³ v₀.
pub fn hellmann_feynman_check(
    v0: f64,
    nu: usize,
    delta: Option<f64>,
    cfg: &ScanConfig,
) -> Result<HellmannFeynman> {
    check_v0(v0)?;
    let delta = delta.unwrap_or(1e-3 * v0);
    if !(delta > 0.0 && delta < v0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, v0), got {delta}")));
    }
    let missing = |at: f64| Error::MissingState(format!("state nu={nu} does not exist at v0={at}"));
    let sp = spectrum(v0, cfg)?;
    let state = *sp.state(nu).ok_or_else(|| missing(v0))?;
    let (up, down) = rayon::join(|| spectrum(v0 + delta, cfg), || spectrum(v0 - delta, cfg));
    let e_up = level(&up?, nu).ok_or_else(|| missing(v0 + delta))?;
    let (lhs, rule) = match level(&down?, nu) {
        Some(e_down) => ((e_up - e_down) / (2.0 * delta), DifferenceRule::Central),
        None => {
            let e_half = level(&spectrum(v0 + 0.5 * delta, cfg)?, nu).ok_or_else(|| missing(v0 + 0.5 * delta))?;
            let d1 = (e_up - state.epsilon) / delta;
            let d2 = (e_half - state.epsilon) / (0.5 * delta);
            (2.0 * d2 - d1, DifferenceRule::ForwardRichardson)
        }
    };
    let precision = match cfg.precision {
        Precision::Adaptive { max_bits } => Precision::Extended { bits: max_bits },
        p => p,
    };
    let grid = GridSpec::for_beta(state.beta, HF_GRID_SPACING)?;
    let w = normalize(&GridWavefunction::numeric(v0, &state, grid, precision)?)?;
    let rhs = -shape_expectation(&w);
    Ok(HellmannFeynman {
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
        delta,
        rule,
    })
}
