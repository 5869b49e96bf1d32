//! Exact polynomial solutions from the truncation condition.
//!
//! Fixing β = β_n(α) = -(α + 2γ + 4n + 3)/2 makes B_n vanish, so the series
//! terminates at degree n as soon as c_{n+1}(α) = 0. Under that substitution
//! the recurrence reads `c_{j+2} = (a_j c_{j+1} + b_j c_j) / d_j` with
//!
//! ```text
//! a_j = -(α² + 8α(γ - 3j + 3n - 2) + (4j - 4n + 1)(4j - 4n + 3))
//! b_j = 16α(n - j)
//! d_j = 8(j + 2)(α + 2γ - 2j + 4n - 1)
//! ```
//!
//! Writing c_j = p_j / Q_j with Q_{j+2} = d_j Q_{j+1} keeps every p_j an
//! integer polynomial, so c_{n+1} = 0 reduces to a root of p_{n+1}.

pub mod poly;
pub mod sturm;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::Parity;

pub use poly::{IntegerPolynomial, Poly, RationalPolynomial};
pub use sturm::{isolate_real_roots, RealAlgebraic, SturmSequence};

/// (27 + 12√3)/11, the ratio between the two ends of the physical α window.
pub fn window_ratio() -> f64 {
    (27.0 + 12.0 * 3f64.sqrt()) / 11.0
}

/// β_n(α) = -(α + 2γ + 4n + 3)/2.
pub fn beta_n(parity: Parity, alpha: f64, n: usize) -> f64 {
    -(alpha + 2.0 * parity.gamma() as f64 + 4.0 * n as f64 + 3.0) / 2.0
}

/// A_{j,n}(γ, α): A_j with β = β_n(α) substituted.
pub fn truncated_coeff_a(parity: Parity, alpha: f64, n: usize, j: i64) -> f64 {
    let (g, n, jf) = (parity.gamma() as f64, n as f64, j as f64);
    -(alpha * alpha
        + 8.0 * alpha * (g - 3.0 * jf + 3.0 * n - 2.0)
        + (4.0 * jf - 4.0 * n + 1.0) * (4.0 * jf - 4.0 * n + 3.0))
        / (8.0 * (alpha + 2.0 * g - 2.0 * jf + 4.0 * n - 1.0) * (jf + 2.0))
}

/// B_{j,n}(γ, α): B_j with β = β_n(α) substituted.
pub fn truncated_coeff_b(parity: Parity, alpha: f64, n: usize, j: i64) -> f64 {
    let (g, nf, jf) = (parity.gamma() as f64, n as f64, j as f64);
    2.0 * alpha * (nf - jf) / ((alpha + 2.0 * g - 2.0 * jf + 4.0 * nf - 1.0) * (jf + 2.0))
}

/// (lower, upper) such that physical roots satisfy lower < α < upper.
pub fn alpha_window(parity: Parity, n: usize) -> (f64, f64) {
    let m = (4 * n + 3) as f64 + 2.0 * parity.gamma() as f64;
    (-window_ratio() * m, -m)
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn step_a(g: i64, n: i64, j: i64) -> IntegerPolynomial {
    let c0 = (4 * j - 4 * n + 1) * (4 * j - 4 * n + 3);
    let c1 = 8 * (g - 3 * j + 3 * n - 2);
    -IntegerPolynomial::from_i64(&[c0, c1, 1])
}

fn step_b(n: i64, j: i64) -> IntegerPolynomial {
    IntegerPolynomial::from_i64(&[0, 16 * (n - j)])
}

fn step_d(g: i64, n: i64, j: i64) -> IntegerPolynomial {
    let k = 8 * (j + 2);
    IntegerPolynomial::from_i64(&[k * (2 * g - 2 * j + 4 * n - 1), k])
}

/// c_j(α) = numerator / denominator, both exact integer polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub numerator: IntegerPolynomial,
    pub denominator: IntegerPolynomial,
}

/// p_0..p_{n+2} and Q_0..Q_{n+2} for one (γ, n).
#[derive(Debug, Clone)]
pub struct TruncationSeries {
    pub parity: Parity,
    pub n: usize,
    pub coefficients: Vec<RationalFunction>,
}

impl TruncationSeries {
    pub fn build(parity: Parity, n: usize) -> Result<Self> {
        let (g, ni) = (parity.gamma(), n as i64);
        let mut p = vec![IntegerPolynomial::from_i64(&[1])];
        let mut q = vec![IntegerPolynomial::from_i64(&[1])];
        for j in -1..=ni {
            let d = step_d(g, ni, j);
            if d.is_zero() {
                return Err(Error::Exact(format!("denominator d_{j} vanishes identically")));
            }
            let ju = (j + 1) as usize; // index of c_{j+1}
            let mut next = step_a(g, ni, j) * p[ju].clone();
            if j >= 0 {
                let dprev = step_d(g, ni, j - 1);
                next = next + step_b(ni, j) * dprev * p[ju - 1].clone();
            }
            let qn = d * q[ju].clone();
            p.push(next);
            q.push(qn);
        }
        let coefficients = p
            .into_iter()
            .zip(q)
            .map(|(numerator, denominator)| RationalFunction {
                numerator,
                denominator,
            })
            .collect();
        Ok(Self {
            parity,
            n,
            coefficients,
        })
    }

    /// p_j · Q_n / Q_j = p_j · Π_{k=j-1}^{n-2} d_k, for j ≤ n.
    fn over_common_denominator(&self, j: usize) -> IntegerPolynomial {
        let (g, n) = (self.parity.gamma(), self.n as i64);
        let mut out = self.coefficients[j].numerator.clone();
        for k in (j as i64 - 1)..=(n - 2) {
            out = out * step_d(g, n, k);
        }
        out
    }
}

/// Primitive integer polynomial (positive leading coefficient) whose roots
/// are the candidate couplings α_{n,i}; degree 2(n+1).
pub fn truncation_numerator(parity: Parity, n: usize) -> Result<IntegerPolynomial> {
    let s = TruncationSeries::build(parity, n)?;
    let p = s.coefficients[n + 1].numerator.primitive();
    if p.is_zero() {
        return Err(Error::Exact(format!("c_{} vanishes identically", n + 1)));
    }
    Ok(p)
}

/// Real roots of the truncation numerator with the root census.
#[derive(Debug, Clone)]
pub struct AlphaRoots {
    pub parity: Parity,
    pub n: usize,
    pub degree: usize,
    pub real_count: usize,
    pub numerator: IntegerPolynomial,
    pub roots: Vec<RealAlgebraic>,
}

impl AlphaRoots {
    pub fn complex_count(&self) -> usize {
        self.degree - self.real_count
    }
}

fn rational_width(precision: f64) -> Result<BigRational> {
    if !(precision.is_finite() && precision > 0.0) {
        return Err(Error::InvalidInput(format!("precision must be positive, got {precision}")));
    }
    BigRational::from_float(precision).ok_or_else(|| Error::InvalidInput("bad precision".into()))
}

/// All real roots α_{n,i}, ascending, isolated to width ≤ `precision`.
pub fn alpha_roots(parity: Parity, n: usize, precision: f64) -> Result<AlphaRoots> {
    let width = rational_width(precision)?;
    let numerator = truncation_numerator(parity, n)?;
    let degree = numerator.degree().unwrap_or(0);
    let roots = isolate_real_roots(&numerator, &width);
    let multiple = numerator.squarefree().degree() != Some(degree);
    if multiple {
        return Err(Error::Exact(format!(
            "truncation numerator for ({parity}, n={n}) has repeated roots"
        )));
    }
    Ok(AlphaRoots {
        parity,
        n,
        degree,
        real_count: roots.len(),
        numerator,
        roots,
    })
}

/// Exact test of lower < α < upper, i.e. 0 < β_n < 2|α|/√27.
pub fn is_physical(parity: Parity, n: usize, root: &RealAlgebraic) -> bool {
    let m = (4 * n + 3) as i64 + 2 * parity.gamma();
    // β_n > 0  ⟺  α + m < 0
    let upper = IntegerPolynomial::from_i64(&[m, 1]);
    if root.sign_of(&upper) >= 0 {
        return false;
    }
    // 27β_n² < 4α²  ⟺  16α² - 27(α + m)² > 0
    let lower = IntegerPolynomial::from_i64(&[0, 0, 16]) - upper.pow(2).scale(&big(27));
    root.sign_of(&lower) > 0
}

/// Keep roots inside the open physical window.
pub fn physical_filter(parity: Parity, n: usize, roots: &[RealAlgebraic]) -> Vec<RealAlgebraic> {
    roots
        .iter()
        .filter(|r| is_physical(parity, n, r))
        .cloned()
        .collect()
}

/// One exact polynomial eigenfunction y^(n,i)(ξ) = Σ_{j≤n} c_j ξ^j.
#[derive(Debug, Clone)]
pub struct PolynomialSolution {
    pub n: usize,
    /// 1-based, ascending in α among accepted roots.
    pub i: usize,
    pub parity: Parity,
    pub alpha_root: RealAlgebraic,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// c_0..c_n as exact rational functions of α.
    pub coeffs_exact: Vec<RationalFunction>,
    pub coeffs_float: Vec<f64>,
    series: TruncationSeries,
}

impl PolynomialSolution {
    pub fn v0(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn series(&self) -> &TruncationSeries {
        &self.series
    }

    pub fn to_record(&self, digits: u32) -> SolutionRecord {
        let (lo, hi) = self.alpha_root.interval();
        SolutionRecord {
            gamma: self.parity.gamma(),
            n: self.n,
            i: self.i,
            alpha: self.alpha_root.to_decimal(digits),
            alpha_interval: [lo.to_string(), hi.to_string()],
            defining_polynomial: self
                .alpha_root
                .defining_polynomial()
                .coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect(),
            beta: self.beta,
            epsilon: self.epsilon,
            v0: self.v0(),
            coefficients: self
                .coeffs_exact
                .iter()
                .zip(&self.coeffs_float)
                .map(|(c, &value)| CoefficientRecord {
                    numerator: c.numerator.to_string(),
                    denominator: c.denominator.to_string(),
                    value,
                })
                .collect(),
        }
    }
}

/// JSON form of a [`PolynomialSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub gamma: i64,
    pub n: usize,
    pub i: usize,
    /// Decimal string; error below one unit in the last place.
    pub alpha: String,
    /// Rational isolating interval.
    pub alpha_interval: [String; 2],
    /// Integer coefficients, constant term first.
    pub defining_polynomial: Vec<String>,
    pub beta: f64,
    pub epsilon: f64,
    pub v0: f64,
    pub coefficients: Vec<CoefficientRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
}

fn tight(root: &RealAlgebraic) -> RealAlgebraic {
    let mut r = root.clone();
    r.refine_to(&BigRational::new(BigInt::one(), BigInt::from(10u32).pow(40)));
    r
}

/// Build and verify the polynomial solution at an accepted root.
pub fn assemble_polynomial_solution(
    parity: Parity,
    n: usize,
    i: usize,
    alpha_root: RealAlgebraic,
) -> Result<PolynomialSolution> {
    if !is_physical(parity, n, &alpha_root) {
        return Err(Error::InvalidInput(format!(
            "root {} is outside the physical window for ({parity}, n={n})",
            alpha_root.to_decimal(12)
        )));
    }
    let series = TruncationSeries::build(parity, n)?;
    let c = &series.coefficients;
    if alpha_root.sign_of(&c[n + 2].denominator) == 0 {
        return Err(Error::Exact("accepted root coincides with a denominator zero".into()));
    }
    for k in [n + 1, n + 2] {
        if alpha_root.sign_of(&c[k].numerator) != 0 {
            return Err(Error::Exact(format!(
                "c_{k} does not vanish at alpha = {}",
                alpha_root.to_decimal(12)
            )));
        }
    }
    let fine = tight(&alpha_root);
    let a = fine.midpoint();
    let coeffs_float = c[..=n]
        .iter()
        .map(|rf| {
            (rf.numerator.eval_rational(&a) / rf.denominator.eval_rational(&a))
                .to_f64()
                .unwrap_or(f64::NAN)
        })
        .collect();
    let alpha = a.to_f64().unwrap_or(f64::NAN);
    let beta = beta_n(parity, alpha, n);
    Ok(PolynomialSolution {
        n,
        i,
        parity,
        alpha_root,
        alpha,
        beta,
        epsilon: -beta * beta,
        coeffs_exact: c[..=n].to_vec(),
        coeffs_float,
        series,
    })
}

/// Every physically accepted polynomial solution of degree n.
pub fn polynomial_solutions(parity: Parity, n: usize) -> Result<Vec<PolynomialSolution>> {
    let roots = alpha_roots(parity, n, 1e-30)?;
    physical_filter(parity, n, &roots.roots)
        .into_iter()
        .enumerate()
        .map(|(k, r)| assemble_polynomial_solution(parity, n, k + 1, r))
        .collect()
}

/// Maximum ODE residual over the sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub max_abs: f64,
    /// True when every sample residual is certified to be exactly zero.
    pub exact_zero: bool,
}

/// Residual of the y(ξ) equation at rational sample points.
pub fn residual_check(sol: &PolynomialSolution, points: &[BigRational]) -> Result<Residual> {
    residual_check_shifted(sol, points, &BigRational::zero())
}

/// As [`residual_check`] with β replaced by β_n(α) + `beta_shift`.
pub fn residual_check_shifted(
    sol: &PolynomialSolution,
    points: &[BigRational],
    beta_shift: &BigRational,
) -> Result<Residual> {
    let mut exact_zero = true;
    let mut max_abs = 0.0f64;
    let fine = tight(&sol.alpha_root);
    let a_mid = fine.midpoint();
    let q_n = sol.series.coefficients[sol.n].denominator.clone();
    for xi in points {
        if !(xi.is_positive() && xi < &BigRational::one()) {
            return Err(Error::InvalidInput(format!("sample point {xi} is outside (0, 1)")));
        }
        let r = residual_numerator(sol, xi, beta_shift);
        let num = r.clear_denominators();
        if sol.alpha_root.sign_of(&num) == 0 {
            continue;
        }
        exact_zero = false;
        let value = (num.eval_rational(&a_mid) / q_n.eval_rational(&a_mid))
            / lcm_of_denominators(&r);
        max_abs = max_abs.max(value.abs().to_f64().unwrap_or(f64::INFINITY));
    }
    Ok(Residual {
        max_abs,
        exact_zero,
    })
}

fn lcm_of_denominators(r: &RationalPolynomial) -> BigRational {
    use num_integer::Integer;
    let l = r
        .coeffs()
        .iter()
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    BigRational::from_integer(l)
}

/// Q_n(α) · L[y](ξ) as a polynomial in α, where
///
/// ```text
/// L[y] = 4ξ²(1-ξ) y'' - 2ξ[2αξ(ξ-1) + 2β(ξ-1) + (2γ+3)ξ - 2] y'
///        - ξ{α²(ξ-1) + α[2β(ξ-1) + (2γ+3)ξ - 2] + β² + β(2γ+1) + γ(γ+1)} y
/// ```
fn residual_numerator(
    sol: &PolynomialSolution,
    xi: &BigRational,
    beta_shift: &BigRational,
) -> RationalPolynomial {
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let g = sol.parity.gamma();
    let n = sol.n;
    let mut y0 = RationalPolynomial::zero();
    let mut y1 = RationalPolynomial::zero();
    let mut y2 = RationalPolynomial::zero();
    let mut pow = vec![BigRational::one()];
    for k in 1..=n {
        pow.push(&pow[k - 1] * xi);
    }
    for j in 0..=n {
        let s = sol.series.over_common_denominator(j).to_rational();
        y0 = y0 + s.scale(&pow[j]);
        if j >= 1 {
            y1 = y1 + s.scale(&(r(j as i64) * &pow[j - 1]));
        }
        if j >= 2 {
            y2 = y2 + s.scale(&(r((j * (j - 1)) as i64) * &pow[j - 2]));
        }
    }
    let alpha = RationalPolynomial::linear(BigRational::zero(), BigRational::one());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let beta = RationalPolynomial::linear(
        -r(2 * g + 4 * n as i64 + 3) * &half + beta_shift,
        -half,
    );
    let k = |x: BigRational| RationalPolynomial::constant(x);
    let xm1 = xi - BigRational::one();
    let two_g3 = r(2 * g + 3);

    let t2 = y2.scale(&(r(4) * xi * xi * (BigRational::one() - xi)));
    let bracket = alpha.scale(&(r(2) * xi * &xm1))
        + beta.scale(&(r(2) * &xm1))
        + k(&two_g3 * xi - r(2));
    let t1 = (bracket * y1).scale(&(r(-2) * xi));
    let brace = alpha.pow(2).scale(&xm1)
        + alpha.clone() * (beta.scale(&(r(2) * &xm1)) + k(&two_g3 * xi - r(2)))
        + beta.pow(2)
        + beta.scale(&r(2 * g + 1))
        + k(r(g * (g + 1)));
    let t0 = (brace * y0).scale(&(-xi.clone()));
    t2 + t1 + t0
}
