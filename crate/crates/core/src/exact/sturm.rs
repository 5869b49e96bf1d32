//! Certified real-root isolation with Sturm sequences over Z[α].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntegerPolynomial;

/// Sturm chain f, f', -rem(f, f'), ... with positive content removed.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<IntegerPolynomial>,
}

impl SturmSequence {
    pub fn new(f: &IntegerPolynomial) -> Self {
        let mut chain = vec![f.clone()];
        let d = f.derivative();
        if d.is_zero() {
            return Self { chain };
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.degree() == Some(0) {
                break;
            }
            // prem = lc(b)^k · a  mod b; keep the Sturm sign: -(positive)·rem
            let da = a.degree().unwrap_or(0);
            let db = b.degree().unwrap_or(0);
            let k = (da - db + 1) as u32;
            let mut r = a.pseudo_rem(b);
            if b.leading().is_negative() && k % 2 == 1 {
                r = -r;
            }
            let r = -r;
            if r.is_zero() {
                break;
            }
            let c = r.content();
            let r = IntegerPolynomial::new(r.coeffs().iter().map(|x| x / &c).collect());
            chain.push(r);
        }
        Self { chain }
    }

    /// Sign variations at a rational point (zeros dropped).
    pub fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct roots in the half-open interval (a, b].
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// A real root of a squarefree integer polynomial, located in an isolating
/// interval (lo, hi) with rational endpoints, or exactly (lo == hi).
#[derive(Debug, Clone)]
pub struct RealAlgebraic {
    poly: IntegerPolynomial,
    lo: BigRational,
    hi: BigRational,
}

impl RealAlgebraic {
    pub fn exact(poly: IntegerPolynomial, x: BigRational) -> Self {
        Self {
            poly,
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn defining_polynomial(&self) -> &IntegerPolynomial {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn is_rational(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Bisect until the interval is no wider than `width`.
    pub fn refine_to(&mut self, width: &BigRational) {
        if self.is_rational() {
            return;
        }
        let two = BigRational::from_integer(2.into());
        let s_lo = self.poly.sign_at(&self.lo);
        while &self.width() > width {
            let mid = (&self.lo + &self.hi) / &two;
            let s = self.poly.sign_at(&mid);
            if s == 0 {
                self.lo = mid.clone();
                self.hi = mid;
                return;
            }
            if s == s_lo {
                self.lo = mid;
            } else {
                self.hi = mid;
            }
        }
    }

    /// One bisection step.
    pub fn bisect(&mut self) {
        let w = self.width() / BigRational::from_integer(2.into());
        self.refine_to(&w);
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        let mut r = self.clone();
        let w = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(20));
        let scale = r.midpoint().abs().to_f64().unwrap_or(1.0).max(1.0);
        r.refine_to(&(w * BigRational::from_float(scale).unwrap_or_else(BigRational::one)));
        r.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal string with `digits` decimals, off by less than one unit in
    /// the last place.
    pub fn to_decimal(&self, digits: u32) -> String {
        let mut r = self.clone();
        let ten_d = BigInt::from(10u32).pow(digits);
        let half_ulp = BigRational::new(BigInt::one(), &ten_d * BigInt::from(2));
        r.refine_to(&half_ulp);
        let m = r.midpoint() * BigRational::from_integer(ten_d.clone());
        let rounded = (m + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
        format_fixed(&rounded, digits)
    }

    /// Sign of q at this number, decided exactly.
    pub fn sign_of(&self, q: &IntegerPolynomial) -> i8 {
        if q.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return q.sign_at(&self.lo);
        }
        let g = self.poly.gcd(q);
        if g.degree().unwrap_or(0) > 0 {
            let s = SturmSequence::new(&g);
            if s.count(&self.lo, &self.hi) > 0 {
                return 0;
            }
        }
        let qs = q.squarefree();
        let seq = SturmSequence::new(&qs);
        let mut r = self.clone();
        loop {
            let (a, b) = (r.lo.clone(), r.hi.clone());
            let (sa, sb) = (q.sign_at(&a), q.sign_at(&b));
            if sa != 0 && sb != 0 && seq.count(&a, &b) == 0 {
                return sa;
            }
            r.bisect();
            if r.is_rational() {
                return q.sign_at(&r.lo);
            }
        }
    }
}

fn format_fixed(v: &BigInt, digits: u32) -> String {
    let neg = v.is_negative();
    let s = v.abs().to_string();
    let d = digits as usize;
    let s = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (ip, fp) = s.split_at(s.len() - d);
    let body = if d == 0 { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg && v != &BigInt::zero() {
        format!("-{body}")
    } else {
        body
    }
}

/// All real roots of `f`, ascending, each isolated to width ≤ `width`.
pub fn isolate_real_roots(f: &IntegerPolynomial, width: &BigRational) -> Vec<RealAlgebraic> {
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let f = f.squarefree();
    let seq = SturmSequence::new(&f);
    let m = BigRational::from_integer(f.root_bound());
    let two = BigRational::from_integer(2.into());
    let mut found = Vec::new();
    let mut stack = vec![(-m.clone(), m.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let n = seq.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && f.sign_at(&hi) != 0 {
            found.push(RealAlgebraic {
                poly: f.clone(),
                lo,
                hi,
            });
            continue;
        }
        let mid = (&lo + &hi) / &two;
        if f.sign_at(&mid) == 0 {
            found.push(RealAlgebraic::exact(f.clone(), mid.clone()));
            // carve out a neighbourhood that holds no other root
            let mut eps = (&hi - &lo) / BigRational::from_integer(4.into());
            loop {
                let (l, r) = (&mid - &eps, &mid + &eps);
                if f.sign_at(&l) != 0 && f.sign_at(&r) != 0 && seq.count(&l, &r) == 1 {
                    stack.push((lo.clone(), l));
                    stack.push((r, hi.clone()));
                    break;
                }
                eps /= &two;
            }
        } else {
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
    for r in &mut found {
        r.refine_to(width);
    }
    found.sort_by_key(|a| a.midpoint());
    found
}
