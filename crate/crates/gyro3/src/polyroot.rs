//! Dense univariate real polynomials with certified real-root machinery:
//! Sturm-sequence counting, bisection isolation with Newton refinement,
//! and Sylvester-matrix resultants/discriminants.
//!
//! Coefficients are kept in f64. The equilibrium polynomials this crate
//! feeds in are low degree (<= 9) with benign coefficients at
//! nondimensional scales, so double precision suffices; a conditioning
//! flag is raised when coefficient ratios exceed 1e12.

use crate::error::{Error, Result};

/// Relative threshold for truncating noise coefficients in Euclidean
/// remainder sequences.
const TRUNC_REL: f64 = 1e-13;

/// Coefficient-ratio threshold above which root results carry a warning.
const CONDITIONING_RATIO: f64 = 1e12;

/// Dense univariate polynomial, coefficients in ascending degree order.
///
/// Normalized: the leading coefficient is nonzero (trailing zeros are
/// trimmed); the zero polynomial is an empty coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    /// Build from ascending coefficients `c0 + c1 x + c2 x^2 + ...`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = RealPoly { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        RealPoly { coeffs: Vec::new() }
    }

    /// Constant polynomial.
    pub fn constant(c: f64) -> Self {
        RealPoly::new(vec![c])
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        RealPoly::new(coeffs)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = RealPoly::constant(1.0);
        for &r in roots {
            p = p.mul(&RealPoly::new(vec![-r, 1.0]));
        }
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    /// Coefficient of `x^k` (0 beyond the stored degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(&c) if c == 0.0) {
            self.coeffs.pop();
        }
    }

    /// Drop trailing coefficients that are negligible relative to the
    /// largest one. Used on Euclidean remainders where exact arithmetic
    /// would have produced degree drops.
    fn trim_relative(&mut self, scale: f64) {
        let s = scale.max(self.max_abs_coeff());
        while matches!(self.coeffs.last(), Some(&c) if c.abs() <= TRUNC_REL * s) {
            self.coeffs.pop();
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn min_abs_nonzero_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|c| **c != 0.0)
            .fold(f64::INFINITY, |m, c| m.min(c.abs()))
    }

    /// True when coefficient magnitudes span more than `CONDITIONING_RATIO`.
    pub fn ill_conditioned(&self) -> bool {
        if self.coeffs.len() < 2 {
            return false;
        }
        self.max_abs_coeff() / self.min_abs_nonzero_coeff() > CONDITIONING_RATIO
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> RealPoly {
        if self.coeffs.len() <= 1 {
            return RealPoly::zero();
        }
        RealPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RealPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RealPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &RealPoly) -> RealPoly {
        if self.is_zero() || other.is_zero() {
            return RealPoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly::new(out)
    }

    pub fn scale(&self, s: f64) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> RealPoly {
        self.scale(-1.0)
    }

    /// Euclidean remainder of `self / div`, with relative truncation of
    /// rounding residue against `scale`.
    fn rem_truncated(&self, div: &RealPoly, scale: f64) -> RealPoly {
        assert!(!div.is_zero());
        let mut r = self.coeffs.clone();
        let d = div.degree();
        let lead = div.leading();
        while r.len() > d && r.len() >= div.coeffs.len() {
            let k = r.len() - 1;
            let q = r[k] / lead;
            for (j, &c) in div.coeffs.iter().enumerate() {
                r[k - d + j] -= q * c;
            }
            r.pop();
        }
        let mut rem = RealPoly { coeffs: r };
        rem.trim_relative(scale);
        rem
    }

    /// Polynomial GCD by the Euclidean algorithm with per-step
    /// normalization and noise truncation. Returns a monic-ish gcd.
    pub fn gcd(&self, other: &RealPoly) -> RealPoly {
        let mut a = self.normalized_unit();
        let mut b = other.normalized_unit();
        if a.is_zero() {
            return b;
        }
        while !b.is_zero() {
            let r = a.rem_truncated(&b, 1.0);
            a = b;
            b = r.normalized_unit();
        }
        a
    }

    /// Scale so the largest coefficient magnitude is 1 (sign of leading kept).
    fn normalized_unit(&self) -> RealPoly {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            RealPoly::zero()
        } else {
            self.scale(1.0 / m)
        }
    }

    /// Square-free part `p / gcd(p, p')`, plus a flag telling whether a
    /// nontrivial factor (multiple root) was removed.
    pub fn square_free(&self) -> (RealPoly, bool) {
        if self.degree() <= 1 {
            return (self.clone(), false);
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return (self.clone(), false);
        }
        // Divide out the repeated part.
        let q = self.div_exact(&g);
        (q, true)
    }

    /// Quotient of an (approximately) exact division.
    fn div_exact(&self, div: &RealPoly) -> RealPoly {
        assert!(!div.is_zero());
        let mut r = self.coeffs.clone();
        let d = div.degree();
        let lead = div.leading();
        let mut q = vec![0.0; self.coeffs.len().saturating_sub(d)];
        while r.len() > d {
            let k = r.len() - 1;
            let c = r[k] / lead;
            q[k - d] = c;
            for (j, &dc) in div.coeffs.iter().enumerate() {
                r[k - d + j] -= c * dc;
            }
            r.pop();
        }
        RealPoly::new(q)
    }

    /// Cauchy bound: every real root lies in (-B, B).
    pub fn cauchy_bound(&self) -> f64 {
        if self.coeffs.len() <= 1 {
            return 1.0;
        }
        let lead = self.leading().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        1.0 + m / lead
    }
}

/// Sturm chain of the square-free part of `p`.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<RealPoly>,
    /// A multiple root was removed during square-free reduction.
    pub had_multiple_root: bool,
}

impl SturmChain {
    pub fn new(p: &RealPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (sf, had_multiple_root) = p.square_free();
        let sf = sf.normalized_unit();
        let mut chain = vec![sf.clone(), sf.derivative().normalized_unit()];
        while chain.last().map(|q| q.degree() > 0) == Some(true) {
            let n = chain.len();
            let r = chain[n - 2].rem_truncated(&chain[n - 1], 1.0);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().normalized_unit());
        }
        Ok(SturmChain {
            chain,
            had_multiple_root,
        })
    }

    /// The square-free polynomial the chain was built on (normalized).
    pub fn reduced(&self) -> &RealPoly {
        &self.chain[0]
    }

    /// Sign variations of the chain at `x`.
    fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut prev = 0.0f64;
        for q in &self.chain {
            let v = q.eval(x);
            if v != 0.0 {
                if prev != 0.0 && v.signum() != prev.signum() {
                    count += 1;
                }
                prev = v;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: f64, b: f64) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Number of distinct real roots of `p` in `(a, b]`.
///
/// Square-free reduction is applied first, so multiple roots count once.
/// Endpoints that happen to be roots are nudged outward by an ulp-scaled
/// amount before counting.
pub fn sturm_count(p: &RealPoly, a: f64, b: f64) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(a < b, "sturm_count requires a < b");
    let chain = SturmChain::new(p)?;
    // Both endpoints move right when they sit on a root: a root at `a`
    // stays excluded, a root at `b` stays included, per (a, b].
    let (a, b) = (nudge_off_root(p, a, 1.0), nudge_off_root(p, b, 1.0));
    Ok(chain.count(a, b))
}

/// Magnitude bound of the Horner evaluation at `x`: the roundoff swamp
/// level below which a computed value is indistinguishable from zero.
fn eval_magnitude(p: &RealPoly, x: f64) -> f64 {
    let ax = x.abs();
    p.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
}

/// Shift `x` by ulp-scaled steps in `direction` until `p(x)` is clearly
/// nonzero relative to its own evaluation magnitude, so the Sturm
/// endpoint convention is unambiguous.
fn nudge_off_root(p: &RealPoly, x: f64, direction: f64) -> f64 {
    let mut y = x;
    let mut step = f64::EPSILON * x.abs().max(1.0);
    for _ in 0..60 {
        if p.eval(y).abs() > 1e-13 * eval_magnitude(p, y) {
            return y;
        }
        y = x + direction * step;
        step *= 2.0;
    }
    y
}

/// A refined root with its enclosing interval and achieved residual.
#[derive(Debug, Clone)]
pub struct RefinedRoot {
    pub value: f64,
    /// |p(value)|.
    pub residual: f64,
    /// Isolating interval (a, b] the root was located in.
    pub interval: (f64, f64),
    /// False when the iteration cap was hit; `interval` is then the result.
    pub converged: bool,
}

/// Result of root isolation over an interval.
#[derive(Debug, Clone)]
pub struct RootReport {
    /// Interval (a, b] that was searched.
    pub interval: (f64, f64),
    /// Number of distinct real roots found.
    pub count: usize,
    pub roots: Vec<RefinedRoot>,
    /// A multiple root was reduced away before isolation.
    pub had_multiple_root: bool,
    /// Coefficient magnitudes span more than 1e12.
    pub ill_conditioned: bool,
}

/// Isolate all distinct real roots of `p` in `(a, b]` by bisection on
/// Sturm counts, then polish each with Newton steps guarded by bisection,
/// stopping at `|dx| <= tol`.
pub fn isolate_and_refine(p: &RealPoly, interval: (f64, f64), tol: f64) -> Result<RootReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (mut a, mut b) = interval;
    assert!(a < b);
    let bound = p.cauchy_bound();
    a = a.max(-bound);
    b = b.min(bound);
    if a >= b {
        return Ok(RootReport {
            interval,
            count: 0,
            roots: Vec::new(),
            had_multiple_root: false,
            ill_conditioned: p.ill_conditioned(),
        });
    }
    let chain = SturmChain::new(p)?;
    let a = nudge_off_root(p, a, 1.0);
    let b = nudge_off_root(p, b, 1.0);
    let total = chain.count(a, b);

    // Bisect down to single-root intervals.
    let mut stack = vec![(a, b, total)];
    let mut isolated = Vec::new();
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => {}
            1 => isolated.push((lo, hi)),
            _ => {
                let mid = nudge_off_root(p, 0.5 * (lo + hi), 1.0);
                if mid <= lo || mid >= hi {
                    // Interval too small to split further; treat as one cluster.
                    isolated.push((lo, hi));
                    continue;
                }
                let left = chain.count(lo, mid);
                stack.push((lo, mid, left));
                stack.push((mid, hi, n - left));
            }
        }
    }
    isolated.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    // Refine against the square-free reduction: a multiple root of p does
    // not change sign, but its reduced image does. Residuals are reported
    // against the original polynomial.
    let sf = chain.reduced().clone();
    let dsf = sf.derivative();
    let roots = isolated
        .iter()
        .map(|&(lo, hi)| {
            let mut r = refine_root(&sf, &dsf, lo, hi, tol);
            r.residual = p.eval(r.value).abs();
            r
        })
        .collect();

    Ok(RootReport {
        interval,
        count: total,
        roots,
        had_multiple_root: chain.had_multiple_root,
        ill_conditioned: p.ill_conditioned(),
    })
}

/// Newton iteration with bisection fallback inside a bracketing interval.
fn refine_root(p: &RealPoly, dp: &RealPoly, mut lo: f64, mut hi: f64, tol: f64) -> RefinedRoot {
    let interval = (lo, hi);
    let mut flo = p.eval(lo);
    let mut x = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        let fx = p.eval(x);
        if fx == 0.0 {
            converged = true;
            break;
        }
        // Maintain the bracket.
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = dp.eval(x);
        let newton = if d != 0.0 { x - fx / d } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= tol * x.abs().max(1.0) {
            x = next;
            converged = true;
            break;
        }
        x = next;
    }
    RefinedRoot {
        value: x,
        residual: p.eval(x).abs(),
        interval,
        converged,
    }
}

/// Convenience: all distinct real roots of `p` (whole real line).
pub fn real_roots(p: &RealPoly, tol: f64) -> Result<Vec<f64>> {
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let bound = p.cauchy_bound();
    let report = isolate_and_refine(p, (-bound, bound), tol)?;
    Ok(report.roots.iter().map(|r| r.value).collect())
}

/// Resultant of `p` and `q` as the determinant of their Sylvester matrix,
/// computed by fraction-free (Bareiss) Gaussian elimination with row
/// pivoting.
pub fn resultant(p: &RealPoly, q: &RealPoly) -> Result<f64> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (m, n) = (p.degree(), q.degree());
    if m == 0 {
        return Ok(p.leading().powi(n as i32));
    }
    if n == 0 {
        return Ok(q.leading().powi(m as i32));
    }
    let size = m + n;
    let mut a = vec![vec![0.0f64; size]; size];
    // n rows of p shifts, highest-degree coefficient on the diagonal side.
    for i in 0..n {
        for j in 0..=m {
            a[i][i + j] = p.coeff(m - j);
        }
    }
    for i in 0..m {
        for j in 0..=n {
            a[n + i][i + j] = q.coeff(n - j);
        }
    }
    // Row equilibration keeps the elimination well scaled in floating
    // point; the determinant picks the factors back up.
    let mut factor = 1.0;
    for row in a.iter_mut() {
        let m = row.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        if m > 0.0 {
            factor *= m;
            for c in row.iter_mut() {
                *c /= m;
            }
        }
    }
    Ok(factor * bareiss_determinant(&mut a)?)
}

/// Fraction-free determinant. Division by the previous pivot is exact in
/// exact arithmetic; in f64 it keeps intermediate growth polynomial.
fn bareiss_determinant(a: &mut [Vec<f64>]) -> Result<f64> {
    let n = a.len();
    let mut sign = 1.0;
    let mut prev = 1.0;
    for k in 0..n - 1 {
        if a[k][k] == 0.0 {
            // Pivot: find a row below with a nonzero entry in column k.
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0.0) else {
                return Ok(0.0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0.0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Discriminant with the standard normalization:
/// `disc(p) = (-1)^(n(n-1)/2) res(p, p') / lc(p)`.
pub fn discriminant(p: &RealPoly) -> Result<f64> {
    if p.degree() == 0 {
        return Err(Error::ZeroPolynomial);
    }
    let n = p.degree();
    let res = resultant(p, &p.derivative())?;
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * res / p.leading())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_quadratic() {
        let p = RealPoly::new(vec![-1.0, 0.0, 1.0]); // x^2 - 1
        assert_eq!(sturm_count(&p, -2.0, 2.0).unwrap(), 2);
        assert_eq!(sturm_count(&p, 0.0, 2.0).unwrap(), 1);
        assert_eq!(sturm_count(&p, 1.5, 2.0).unwrap(), 0);
    }

    /// X^5 - Z^3 X^2 - beta Z^3 with Z = 1: two positive roots at
    /// beta = -0.30, none at beta = -0.33 (the discriminant boundary is
    /// beta* ~ -0.32573).
    #[test]
    fn count_lagrange_quintic_branches() {
        let quintic = |beta: f64| RealPoly::new(vec![-beta, 0.0, -1.0, 0.0, 0.0, 1.0]);
        assert_eq!(sturm_count(&quintic(-0.30), 0.0, 1e9).unwrap(), 2);
        assert_eq!(sturm_count(&quintic(-0.33), 0.0, 1e9).unwrap(), 0);
    }

    #[test]
    fn refine_cube_root_of_two() {
        let p = RealPoly::new(vec![-2.0, 0.0, 0.0, 1.0]);
        let rep = isolate_and_refine(&p, (1.0, 2.0), 1e-14).unwrap();
        assert_eq!(rep.count, 1);
        assert!((rep.roots[0].value - 1.2599210498948732).abs() < 1e-14);
        assert!(rep.roots[0].converged);
    }

    #[test]
    fn double_root_flagged_after_square_free() {
        // beta at the discriminant zero: double positive root.
        let z: f64 = 1.0;
        let beta = -3.0 * 20f64.powf(1.0 / 3.0) / 25.0 * z * z;
        let p = RealPoly::new(vec![-beta, 0.0, -1.0, 0.0, 0.0, 1.0]);
        let rep = isolate_and_refine(&p, (0.0, 2.0), 1e-12).unwrap();
        assert!(rep.had_multiple_root);
        assert_eq!(rep.count, 1);
        // The double root sits at (2/5)^(1/3).
        assert!((rep.roots[0].value - 0.4f64.powf(1.0 / 3.0)).abs() < 1e-6);
    }

    #[test]
    fn discriminant_quadratic() {
        // disc(x^2 + bx + c) = b^2 - 4c; (b, c) = (3, 1) -> 5.
        let p = RealPoly::new(vec![1.0, 3.0, 1.0]);
        assert!((discriminant(&p).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn discriminant_lagrange_quintic_closed_form() {
        // disc(X^5 - Z^3 X^2 - beta Z^3) = beta Z^12 (3125 beta^3 + 108 Z^6).
        let z: f64 = 1.0;
        let beta = -0.1;
        let p = RealPoly::new(vec![-beta * z.powi(3), 0.0, -z.powi(3), 0.0, 0.0, 1.0]);
        let expect = beta * z.powi(12) * (3125.0 * beta.powi(3) + 108.0 * z.powi(6));
        assert!((discriminant(&p).unwrap() - expect).abs() < 1e-10 * expect.abs());
        assert!((expect - (-10.4875)).abs() < 1e-12);
    }

    #[test]
    fn resultant_detects_common_root() {
        let p = RealPoly::from_roots(&[1.5, -2.0]);
        let q = RealPoly::from_roots(&[1.5, 3.0]);
        assert!(resultant(&p, &q).unwrap().abs() < 1e-12);
        let q2 = RealPoly::from_roots(&[1.50001, 3.0]);
        assert!(resultant(&p, &q2).unwrap().abs() > 1e-8);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(
            sturm_count(&RealPoly::zero(), 0.0, 1.0),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn discriminant_sign_invariant_under_positive_scaling() {
        let p = RealPoly::new(vec![-0.3, 0.0, -1.0, 0.0, 0.0, 1.0]);
        let d1 = discriminant(&p).unwrap();
        let d2 = discriminant(&p.scale(7.5)).unwrap();
        assert_eq!(d1.signum(), d2.signum());
    }
}
