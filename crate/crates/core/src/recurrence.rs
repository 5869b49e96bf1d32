//! Three-term recurrence for the Frobenius coefficients of y(ξ).
//!
//! With ξ = 1/cosh²(z) and u(ξ) = ξ^{β/2} (1-ξ)^{γ/2} e^{αξ/2} y(ξ), the series
//! y = Σ c_j ξ^j obeys
//!
//! ```text
//! c_{j+2} = A_j c_{j+1} + B_j c_j,   j = -1, 0, 1, ...,   c_{-1} = 0, c_0 = 1
//! ```
//!
//! Index convention: step `j = -1` produces `c_1`, step `j` produces `c_{j+2}`.
//!
//! Evaluation carries a first-order running rounding-error bound next to each
//! coefficient. A value that does not clear its bound is flagged as not
//! certified; the adaptive backend re-evaluates such points with more bits.
//! The bound accumulates absolute values and is pessimistic at large N.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Extended, Precision, Scalar};

/// Parity sector: γ = 0 (even states) or γ = 1 (odd states).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn gamma(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_gamma(gamma: i64) -> Result<Self> {
        match gamma {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(Error::InvalidInput(format!("gamma must be 0 or 1, got {gamma}"))),
        }
    }

    pub fn of_index(nu: usize) -> Self {
        if nu.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parity sector plus coupling α < 0. `v0 = α²` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelContext {
    parity: Parity,
    alpha: f64,
}

impl ModelContext {
    pub fn new(parity: Parity, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha < 0.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must be finite and negative, got {alpha}"
            )));
        }
        Ok(Self { parity, alpha })
    }

    /// Takes the negative square root: α = -√v₀.
    pub fn from_v0(parity: Parity, v0: f64) -> Result<Self> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(Error::InvalidInput(format!("v0 must be finite and positive, got {v0}")));
        }
        Self::new(parity, -v0.sqrt())
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn gamma(&self) -> i64 {
        self.parity.gamma()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn v0(&self) -> f64 {
        self.alpha * self.alpha
    }

    /// Upper bound 2|α|/√27 on β for a bound state.
    pub fn beta_max(&self) -> f64 {
        2.0 * self.alpha.abs() / 27f64.sqrt()
    }
}

fn check_j(j: i64) -> Result<()> {
    if j < -1 {
        return Err(Error::InvalidInput(format!("recurrence index j must be >= -1, got {j}")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidInput(format!("beta must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

/// A_j(γ, α, β), general-parity form.
pub fn coeff_a(ctx: &ModelContext, beta: f64, j: i64) -> Result<f64> {
    check_j(j)?;
    check_beta(beta)?;
    Ok(general_a(ctx.gamma(), ctx.alpha, beta, j))
}

/// B_j(γ, α, β).
pub fn coeff_b(ctx: &ModelContext, beta: f64, j: i64) -> Result<f64> {
    check_j(j)?;
    check_beta(beta)?;
    Ok(general_b(ctx.gamma(), ctx.alpha, beta, j))
}

fn general_a(g: i64, a: f64, b: f64, j: i64) -> f64 {
    let (g, jf) = (g as f64, j as f64);
    let num = -(a * a + 2.0 * a * (b + 2.0 * jf + 3.0) - b * b - b * (2.0 * g + 4.0 * jf + 5.0))
        + g * g
        + g * (4.0 * jf + 5.0)
        + 2.0 * (jf + 1.0) * (2.0 * jf + 3.0);
    num / (4.0 * (b + jf + 2.0) * (jf + 2.0))
}

fn general_b(g: i64, a: f64, b: f64, j: i64) -> f64 {
    let (g, jf) = (g as f64, j as f64);
    a * (a + 2.0 * b + 2.0 * g + 4.0 * jf + 3.0) / (4.0 * (b + jf + 2.0) * (jf + 2.0))
}

/// Even-sector A_j in its factored form
/// `-[(β+2j+3)(2α-β-2(j+1)) + α²] / (4(β+j+2)(j+2))`.
pub fn coeff_a_even_form(alpha: f64, beta: f64, j: i64) -> f64 {
    let jf = j as f64;
    -((beta + 2.0 * jf + 3.0) * (2.0 * alpha - beta - 2.0 * (jf + 1.0)) + alpha * alpha)
        / (4.0 * (beta + jf + 2.0) * (jf + 2.0))
}

/// Even-sector B_j: `α(α+2β+4j+3) / (4(β+j+2)(j+2))`.
pub fn coeff_b_even_form(alpha: f64, beta: f64, j: i64) -> f64 {
    let jf = j as f64;
    alpha * (alpha + 2.0 * beta + 4.0 * jf + 3.0) / (4.0 * (beta + jf + 2.0) * (jf + 2.0))
}

/// Default rescale threshold, 2^500. A power of two so rescaling is exact.
pub const DEFAULT_RESCALE_EXPONENT: i32 = 500;

/// One stored coefficient: value = mantissa · base^exponent, with a rounding
/// bound `error` expressed on the same scale as `mantissa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledEntry {
    pub mantissa: f64,
    pub exponent: i64,
    pub error: f64,
}

impl ScaledEntry {
    /// Sign of the computed value.
    pub fn sign(&self) -> i8 {
        if self.mantissa > 0.0 {
            1
        } else if self.mantissa < 0.0 {
            -1
        } else {
            0
        }
    }

    /// True when the computed value clears its rounding bound.
    pub fn certified(&self) -> bool {
        self.mantissa.abs() > self.error
    }

    /// Sign, or 0 when the value is indistinguishable from zero.
    pub fn certified_sign(&self) -> i8 {
        if self.certified() {
            self.sign()
        } else {
            0
        }
    }

    /// ln|value| for rescale base 2^`log2_base`; `-inf` for an exact zero.
    pub fn log_magnitude(&self, log2_base: i32) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + (self.exponent * log2_base as i64) as f64 * std::f64::consts::LN_2
        }
    }
}

/// c_0..c_N with base-B exponent bookkeeping; B = 2^`rescale_log2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledCoefficientSequence {
    pub entries: Vec<ScaledEntry>,
    pub rescale_log2: i32,
}

impl ScaledCoefficientSequence {
    pub fn rescale_base(&self) -> f64 {
        2f64.powi(self.rescale_log2)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// c_j as an f64 (may over/underflow for extreme orders).
    pub fn value(&self, j: usize) -> f64 {
        let e = &self.entries[j];
        e.mantissa * pow2_i64(e.exponent * self.rescale_log2 as i64)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.entries.len()).map(|j| self.value(j)).collect()
    }

    pub fn ln_abs(&self, j: usize) -> f64 {
        let e = &self.entries[j];
        e.mantissa.abs().ln() + (e.exponent * self.rescale_log2 as i64) as f64 * std::f64::consts::LN_2
    }
}

fn pow2_i64(k: i64) -> f64 {
    let k = k.clamp(-2200, 2200) as i32;
    let half = k / 2;
    2f64.powi(half) * 2f64.powi(k - half)
}

/// Sign and log-magnitude of c_N; only the sign matters for root scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignValue {
    /// Sign of the computed c_N (0 only for an exact zero).
    pub sign: i8,
    /// Whether |c_N| clears its rounding-error bound.
    pub certified: bool,
    /// ln|c_N|, `-inf` for an exact zero.
    pub log_magnitude: f64,
}

/// One recurrence step's coefficients and absolute error bounds on them.
struct StepCoeffs<S> {
    a: S,
    b: S,
    a_abs: f64,
    b_abs: f64,
    a_err: f64,
    b_err: f64,
}

const SAFETY: f64 = 8.0;

#[inline]
fn step_coeffs<S: Scalar>(unit: &S, g: i64, alpha: f64, beta: f64, j: i64) -> StepCoeffs<S> {
    let u = unit.unit_roundoff();
    let (gf, jf) = (g as f64, j as f64);
    let al = unit.lift(alpha);
    let be = unit.lift(beta);
    let c1 = unit.lift(2.0 * jf + 3.0);
    let c2 = unit.lift(2.0 * gf + 4.0 * jf + 5.0);
    let int_part = gf * gf + gf * (4.0 * jf + 5.0) + 2.0 * (jf + 1.0) * (2.0 * jf + 3.0);
    let c3 = unit.lift(int_part);
    let two = unit.lift(2.0);
    let num_a = -(al.clone() * al.clone() + two.clone() * al.clone() * (be.clone() + c1)
        - be.clone() * be.clone()
        - be.clone() * c2)
        + c3;
    let d = unit.lift(4.0 * (jf + 2.0)) * (be.clone() + unit.lift(jf + 2.0));
    let num_b = al.clone() * (al + two * be + unit.lift(2.0 * gf + 4.0 * jf + 3.0));
    let a = num_a / d.clone();
    let b = num_b / d;

    // magnitudes of the summands, for the error model
    let dabs = (4.0 * (beta + jf + 2.0) * (jf + 2.0)).abs();
    let sum_a = alpha * alpha
        + (2.0 * alpha * (beta + 2.0 * jf + 3.0)).abs()
        + beta * beta
        + (beta * (2.0 * gf + 4.0 * jf + 5.0)).abs()
        + int_part.abs();
    let sum_b = alpha.abs() * (alpha.abs() + 2.0 * beta + (2.0 * gf + 4.0 * jf + 3.0).abs());
    let a_abs = a.to_f64().abs();
    let b_abs = b.to_f64().abs();
    StepCoeffs {
        a,
        b,
        a_abs,
        b_abs,
        a_err: SAFETY * u * (sum_a / dabs + a_abs),
        b_err: SAFETY * u * (sum_b / dabs + b_abs),
    }
}

/// Running state for the recurrence with exponent bookkeeping.
struct Runner<S> {
    prev: S,
    cur: S,
    prev_err: f64,
    cur_err: f64,
    exponent: i64,
    log2_base: i32,
}

impl<S: Scalar> Runner<S> {
    fn new(unit: &S, log2_base: i32) -> Self {
        Self {
            prev: unit.lift(0.0),
            cur: unit.lift(1.0),
            prev_err: 0.0,
            cur_err: 0.0,
            exponent: 0,
            log2_base,
        }
    }

    /// Advance from (c_{j}, c_{j+1}) to (c_{j+1}, c_{j+2}).
    #[inline]
    fn step(&mut self, unit: &S, g: i64, alpha: f64, beta: f64, j: i64) -> Result<()> {
        let k = step_coeffs(unit, g, alpha, beta, j);
        let u = unit.unit_roundoff();
        let cur_abs = self.cur.to_f64().abs();
        let prev_abs = self.prev.to_f64().abs();
        let next = k.a.clone() * self.cur.clone() + k.b.clone() * self.prev.clone();
        if !next.is_finite() {
            return Err(Error::NonFinite(format!(
                "coefficient c_{} is not finite (alpha={alpha}, beta={beta})",
                j + 2
            )));
        }
        let terms = k.a_abs * cur_abs + k.b_abs * prev_abs;
        let next_err = k.a_abs * self.cur_err
            + k.b_abs * self.prev_err
            + k.a_err * cur_abs
            + k.b_err * prev_abs
            + SAFETY * u * terms;
        self.prev = std::mem::replace(&mut self.cur, next);
        self.prev_err = self.cur_err;
        self.cur_err = next_err;
        self.rescale();
        Ok(())
    }

    fn rescale(&mut self) {
        let base = 2f64.powi(self.log2_base);
        let m = self.cur.to_f64().abs().max(self.prev.to_f64().abs());
        if m > base {
            self.shift(-self.log2_base);
            self.exponent += 1;
        } else if m < 1.0 / base && m > 0.0 {
            self.shift(self.log2_base);
            self.exponent -= 1;
        }
    }

    fn shift(&mut self, k: i32) {
        self.cur = self.cur.mul_pow2(k);
        self.prev = self.prev.mul_pow2(k);
        let f = 2f64.powi(k);
        self.cur_err *= f;
        self.prev_err *= f;
    }

    fn entry(&self) -> ScaledEntry {
        normalize_entry(self.cur.to_f64(), self.exponent, self.cur_err, self.log2_base)
    }
}

fn normalize_entry(mut m: f64, mut e: i64, mut err: f64, log2_base: i32) -> ScaledEntry {
    if m != 0.0 {
        let f = 2f64.powi(log2_base);
        while m.abs() < 1.0 {
            m *= f;
            err *= f;
            e -= 1;
        }
    }
    ScaledEntry {
        mantissa: m,
        exponent: e,
        error: err,
    }
}

fn check_order(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidInput("truncation order N must be >= 1".into()));
    }
    Ok(())
}

fn sequence_with<S: Scalar>(
    unit: S,
    ctx: &ModelContext,
    beta: f64,
    n: usize,
    log2_base: i32,
) -> Result<ScaledCoefficientSequence> {
    let mut run = Runner::new(&unit, log2_base);
    let mut entries = Vec::with_capacity(n + 1);
    entries.push(run.entry());
    for j in -1..(n as i64 - 1) {
        run.step(&unit, ctx.gamma(), ctx.alpha, beta, j)?;
        entries.push(run.entry());
    }
    Ok(ScaledCoefficientSequence {
        entries,
        rescale_log2: log2_base,
    })
}

fn last_with<S: Scalar>(
    unit: S,
    gamma: i64,
    alpha: f64,
    beta: f64,
    n: usize,
    log2_base: i32,
) -> Result<ScaledEntry> {
    let mut run = Runner::new(&unit, log2_base);
    for j in -1..(n as i64 - 1) {
        run.step(&unit, gamma, alpha, beta, j)?;
    }
    Ok(run.entry())
}

fn entries_with<S: Scalar>(
    unit: S,
    gamma: i64,
    alpha: f64,
    beta: f64,
    orders: &[usize],
    log2_base: i32,
) -> Result<Vec<ScaledEntry>> {
    let mut run = Runner::new(&unit, log2_base);
    let mut out = Vec::with_capacity(orders.len());
    let mut j = -1i64;
    for &n in orders {
        while j < n as i64 - 1 {
            run.step(&unit, gamma, alpha, beta, j)?;
            j += 1;
        }
        out.push(run.entry());
    }
    Ok(out)
}

/// c_N for several strictly increasing orders from one sweep. Each entry is
/// the one [`c_n_entry`] would return for that order alone.
pub fn c_n_entries(
    gamma: i64,
    alpha: f64,
    beta: f64,
    orders: &[usize],
    precision: Precision,
    log2_base: i32,
) -> Result<Vec<ScaledEntry>> {
    if orders.first().is_none_or(|&n| n < 1) || orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("orders must be >= 1 and strictly increasing".into()));
    }
    let ladder = precision.ladder();
    let mut done: Vec<Option<ScaledEntry>> = vec![None; orders.len()];
    for (r, rung) in ladder.iter().enumerate() {
        // only sweep as far as the highest order still open
        let open = done.iter().rposition(|d| d.is_none());
        let Some(top) = open else { break };
        let sub = &orders[..=top];
        let es = match *rung {
            Precision::Extended { bits } => entries_with(Extended::new(1.0, bits), gamma, alpha, beta, sub, log2_base)?,
            _ => entries_with(1.0f64, gamma, alpha, beta, sub, log2_base)?,
        };
        let last_rung = r + 1 == ladder.len();
        for (d, e) in done.iter_mut().zip(es) {
            if d.is_none() && (e.certified() || last_rung) {
                *d = Some(e);
            }
        }
    }
    Ok(done.into_iter().map(|d| d.expect("last rung fills every order")).collect())
}

/// c_0..c_N at (ctx, β) in the requested backend (`Adaptive` uses its widest
/// rung).
pub fn coefficient_sequence(
    ctx: &ModelContext,
    beta: f64,
    n: usize,
    precision: Precision,
) -> Result<ScaledCoefficientSequence> {
    coefficient_sequence_with_base(ctx, beta, n, precision, DEFAULT_RESCALE_EXPONENT)
}

/// As [`coefficient_sequence`] with rescale base 2^`log2_base`.
pub fn coefficient_sequence_with_base(
    ctx: &ModelContext,
    beta: f64,
    n: usize,
    precision: Precision,
    log2_base: i32,
) -> Result<ScaledCoefficientSequence> {
    check_order(n)?;
    check_beta(beta)?;
    check_base(log2_base)?;
    match *precision.ladder().last().expect("non-empty ladder") {
        Precision::Extended { bits } => sequence_with(Extended::new(1.0, bits), ctx, beta, n, log2_base),
        _ => sequence_with(1.0f64, ctx, beta, n, log2_base),
    }
}

fn check_base(log2_base: i32) -> Result<()> {
    if !(1..=500).contains(&log2_base) {
        return Err(Error::InvalidInput(format!(
            "rescale exponent must be in 1..=500, got {log2_base}"
        )));
    }
    Ok(())
}

/// Raw c_N evaluation for an arbitrary (γ, α ≤ 0, β ≥ 0); used by both the
/// β-scan and the β = 0 critical-coupling scan.
pub fn c_n_entry(
    gamma: i64,
    alpha: f64,
    beta: f64,
    n: usize,
    precision: Precision,
    log2_base: i32,
) -> Result<ScaledEntry> {
    let mut last = None;
    for rung in precision.ladder() {
        let e = match rung {
            Precision::Extended { bits } => {
                last_with(Extended::new(1.0, bits), gamma, alpha, beta, n, log2_base)?
            }
            _ => last_with(1.0f64, gamma, alpha, beta, n, log2_base)?,
        };
        if e.certified() {
            return Ok(e);
        }
        last = Some(e);
    }
    Ok(last.expect("non-empty ladder"))
}

fn to_sign_value(e: &ScaledEntry, log2_base: i32) -> SignValue {
    SignValue {
        sign: e.sign(),
        certified: e.certified(),
        log_magnitude: e.log_magnitude(log2_base),
    }
}

/// Sign and log-magnitude of c_N(β), the root-scan objective.
pub fn c_n_sign_value(
    ctx: &ModelContext,
    beta: f64,
    n: usize,
    precision: Precision,
) -> Result<SignValue> {
    check_order(n)?;
    check_beta(beta)?;
    let e = c_n_entry(ctx.gamma(), ctx.alpha, beta, n, precision, DEFAULT_RESCALE_EXPONENT)?;
    Ok(to_sign_value(&e, DEFAULT_RESCALE_EXPONENT))
}

/// c_N sign value with an explicit rescale base (for invariance checks).
pub fn c_n_sign_value_with_base(
    ctx: &ModelContext,
    beta: f64,
    n: usize,
    precision: Precision,
    log2_base: i32,
) -> Result<SignValue> {
    check_order(n)?;
    check_beta(beta)?;
    check_base(log2_base)?;
    let e = c_n_entry(ctx.gamma(), ctx.alpha, beta, n, precision, log2_base)?;
    Ok(to_sign_value(&e, log2_base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn even(alpha: f64) -> ModelContext {
        ModelContext::new(Parity::Even, alpha).unwrap()
    }

    #[test]
    fn context_invariants() {
        let c = ModelContext::from_v0(Parity::Odd, 27.0).unwrap();
        assert_eq!(c.alpha(), -27f64.sqrt());
        assert_relative_eq!(c.v0(), 27.0, max_relative = 1e-15);
        assert_relative_eq!(c.beta_max(), 2.0, max_relative = 1e-15);
        assert!(ModelContext::new(Parity::Even, 0.0).is_err());
        assert!(ModelContext::new(Parity::Even, 1.0).is_err());
        assert!(ModelContext::from_v0(Parity::Even, -1.0).is_err());
        assert!(Parity::from_gamma(2).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let c = even(-3.0);
        assert_relative_eq!(coeff_a(&c, 1.0, -1).unwrap(), 5.0 / 8.0, max_relative = 1e-15);
        assert_relative_eq!(coeff_b(&c, 1.0, -1).unwrap(), 3.0 / 4.0, max_relative = 1e-15);
        // α = 0 is outside ModelContext, so use the raw forms
        assert_relative_eq!(general_a(0, 0.0, 0.0, 0), 3.0 / 8.0, max_relative = 1e-15);
        assert_eq!(general_b(0, 0.0, 2.5, 7), 0.0);
        assert!(coeff_a(&c, 1.0, -2).is_err());
        assert!(coeff_b(&c, -0.5, 0).is_err());
    }

    #[test]
    fn odd_sector_shift_matches_hand_evaluation() {
        // γ=1, α=-3, β=1, j=-1:
        // A = [-(9 - 6·2 - 1 - 1·3) + 1 + 1 + 0] / 8 = (7 + 2)/8
        let c = ModelContext::new(Parity::Odd, -3.0).unwrap();
        assert_relative_eq!(coeff_a(&c, 1.0, -1).unwrap(), 9.0 / 8.0, max_relative = 1e-15);
        // B = -3(-3 + 2 + 2 - 4 + 3)/8 = 0
        assert_eq!(coeff_b(&c, 1.0, -1).unwrap(), 0.0);
        // shift relative to the even value: (2β + 2γ + ...) terms
        let shift = coeff_a(&c, 1.0, -1).unwrap() - coeff_a(&even(-3.0), 1.0, -1).unwrap();
        assert_relative_eq!(shift, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn b_vanishes_at_truncation_beta() {
        for n in 0..6 {
            for &alpha in &[-20.0, -13.5, -7.25] {
                let beta = -(alpha + 4.0 * n as f64 + 3.0) / 2.0;
                if beta < 0.0 {
                    continue;
                }
                assert!(coeff_b(&even(alpha), beta, n).unwrap().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sequence_examples() {
        let c = even(-3.0);
        let s = coefficient_sequence(&c, 1.0, 1, Precision::Double).unwrap();
        assert_eq!(s.value(0), 1.0);
        assert_relative_eq!(s.value(1), 5.0 / 8.0, max_relative = 1e-15);
        let sv = c_n_sign_value(&c, 1.0, 1, Precision::Double).unwrap();
        assert_eq!(sv.sign, 1);
        assert_relative_eq!(sv.log_magnitude, (5.0f64 / 8.0).ln(), max_relative = 1e-12);
        assert!(coefficient_sequence(&c, 1.0, 0, Precision::Double).is_err());
    }

    #[test]
    fn exact_solution_gives_vanishing_tail() {
        let s13 = 13f64.sqrt();
        let c = even(-4.0 - s13);
        let beta = (1.0 + s13) / 2.0;
        let s = coefficient_sequence(&c, beta, 3, Precision::Double).unwrap();
        assert_eq!(s.entries[0].sign(), 1);
        assert_eq!(s.entries[1].certified_sign(), 0, "c1 {:?}", s.entries[1]);
        assert_eq!(s.entries[2].certified_sign(), 0, "c2 {:?}", s.entries[2]);
        // wide arithmetic resolves the residue left by rounding α and β to f64
        let s = coefficient_sequence(&c, beta, 3, Precision::Extended { bits: 160 }).unwrap();
        assert!(s.value(1).abs() < 1e-14);
        assert!(s.value(2).abs() < 1e-14);
        assert!(!c_n_sign_value(&c, beta, 2, Precision::Double).unwrap().certified);
        let lo = c_n_sign_value(&c, beta - 1e-6, 2, Precision::Double).unwrap().sign;
        let hi = c_n_sign_value(&c, beta + 1e-6, 2, Precision::Double).unwrap().sign;
        assert_eq!(lo * hi, -1);
    }

    #[test]
    fn entries_stay_below_base_and_normalized() {
        let c = ModelContext::from_v0(Parity::Even, 2809.0).unwrap();
        let s = coefficient_sequence_with_base(&c, 3.3, 200, Precision::Double, 20).unwrap();
        let base = s.rescale_base();
        for e in &s.entries {
            assert!(e.mantissa.abs() < base);
            assert!(e.mantissa == 0.0 || e.mantissa.abs() >= 1.0);
        }
        let plain = coefficient_sequence(&c, 3.3, 200, Precision::Double).unwrap();
        for j in 0..=200 {
            assert_eq!(s.entries[j].sign(), plain.entries[j].sign());
            assert_relative_eq!(s.ln_abs(j), plain.ln_abs(j), max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn extended_and_double_agree_where_certified() {
        let c = ModelContext::from_v0(Parity::Odd, 1764.0).unwrap();
        for k in 1..40 {
            let beta = 0.4 * k as f64;
            let d = c_n_sign_value(&c, beta, 60, Precision::Double).unwrap();
            let x = c_n_sign_value(&c, beta, 60, Precision::Extended { bits: 256 }).unwrap();
            if d.certified {
                assert_eq!(d.sign, x.sign);
                assert!((d.log_magnitude - x.log_magnitude).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn shared_sweep_matches_single_orders() {
        let orders = [10, 15, 20, 40, 60];
        for (g, alpha, beta) in [(0, -7.6, 2.3), (1, -2.07, 0.0), (0, -42.0, 9.1)] {
            for p in [Precision::Double, Precision::Adaptive { max_bits: 256 }] {
                let many = c_n_entries(g, alpha, beta, &orders, p, DEFAULT_RESCALE_EXPONENT).unwrap();
                for (&n, e) in orders.iter().zip(&many) {
                    let one = c_n_entry(g, alpha, beta, n, p, DEFAULT_RESCALE_EXPONENT).unwrap();
                    assert_eq!(*e, one, "n={n}");
                }
            }
        }
        assert!(c_n_entries(0, -1.0, 0.5, &[5, 5], Precision::Double, 500).is_err());
        assert!(c_n_entries(0, -1.0, 0.5, &[], Precision::Double, 500).is_err());
    }
}
