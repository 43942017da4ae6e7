//! Monic complex polynomials: construction, Horner-style derivative
//! evaluation, derivatives of the reciprocal and the Cauchy root bound.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported degree; `170!` is the last factorial finite in binary64.
pub const MAX_DEGREE: usize = 170;

/// A monic polynomial `z^n + a_{n-1} z^{n-1} + ... + a_0` with complex
/// coefficients stored in ascending powers.
///
/// Accuracy of the iterations degrades quickly with degree in binary64;
/// degrees up to about 50 are the practical range.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, normalizing to monic.
    pub fn from_coefficients(raw: &[Complex64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "need at least two coefficients, got {}",
                raw.len()
            )));
        }
        if raw.len() - 1 > MAX_DEGREE {
            return Err(Error::DegenerateInput(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                raw.len() - 1
            )));
        }
        if !all_finite(raw) {
            return Err(Error::DegenerateInput("non-finite coefficient".into()));
        }
        let lead = raw[raw.len() - 1];
        if lead == Complex64::new(0.0, 0.0) {
            return Err(Error::DegenerateInput("leading coefficient is zero".into()));
        }
        let coeffs: Vec<Complex64> = if lead == Complex64::new(1.0, 0.0) {
            raw.to_vec()
        } else {
            let mut c: Vec<Complex64> = raw.iter().map(|a| a / lead).collect();
            // division by itself may round; the invariant is a_n == 1 exactly
            *c.last_mut().unwrap() = Complex64::new(1.0, 0.0);
            c
        };
        if !all_finite(&coeffs) {
            return Err(Error::NumericOverflow("normalizing to monic"));
        }
        Ok(Self { coeffs })
    }

    /// Expands `∏ (z - λ_j)` by sequential multiplication.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::DegenerateInput("no roots given".into()));
        }
        if roots.len() > MAX_DEGREE {
            return Err(Error::DegenerateInput(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                roots.len()
            )));
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            // multiply by (z - r)
            coeffs.push(Complex64::new(0.0, 0.0));
            for k in (1..coeffs.len()).rev() {
                coeffs[k] = coeffs[k - 1] - r * coeffs[k];
            }
            coeffs[0] = -r * coeffs[0];
        }
        if !all_finite(&coeffs) {
            return Err(Error::NumericOverflow(
                "expanding the product of linear factors",
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Ascending coefficients `a_0 ..= a_n` with `a_n == 1`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `a_k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Horner evaluation of `f(z)`. May overflow to infinity for huge `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Taylor coefficients `f^(j)(z) / j!` for `j = 0..=k`, by repeated
    /// synthetic division. Orders above the degree are zero.
    pub fn taylor_coefficients(&self, z: Complex64, k: usize) -> Result<Vec<Complex64>> {
        let n = self.degree();
        let mut b = self.coeffs.clone();
        let top = k.min(n);
        for j in 0..=top {
            for i in (j..n).rev() {
                let next = b[i + 1];
                b[i] += z * next;
            }
        }
        let mut out: Vec<Complex64> = b[..=top].to_vec();
        out.resize(k + 1, Complex64::new(0.0, 0.0));
        if !all_finite(&out) {
            return Err(Error::NumericOverflow("evaluating derivatives"));
        }
        Ok(out)
    }

    /// `[f(z), f'(z), ..., f^(k)(z)]` for `k <= n`.
    pub fn eval_derivatives(&self, z: Complex64, k: usize) -> Result<Vec<Complex64>> {
        if k > self.degree() {
            return Err(Error::DegenerateInput(format!(
                "derivative order {k} exceeds degree {}",
                self.degree()
            )));
        }
        let mut out = self.taylor_coefficients(z, k)?;
        let mut fact = 1.0;
        for (j, v) in out.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *v *= fact;
        }
        if !all_finite(&out) {
            return Err(Error::NumericOverflow("evaluating derivatives"));
        }
        Ok(out)
    }

    /// `[(1/f)(z), (1/f)'(z), ..., (1/f)^(d)(z)]` from the Leibniz recurrence
    /// `(1/f)^(k) = -(1/f) Σ_{j=1..k} C(k,j) f^(j) (1/f)^(k-j)`.
    pub fn reciprocal_derivatives(&self, z: Complex64, d: usize) -> Result<Vec<Complex64>> {
        let n = self.degree();
        let derivs = self.eval_derivatives(z, d.min(n))?;
        let f = derivs[0];
        if f == Complex64::new(0.0, 0.0) {
            return Err(Error::EvaluationAtRoot);
        }
        let inv_f = f.inv();
        let mut out = Vec::with_capacity(d + 1);
        out.push(inv_f);
        for k in 1..=d {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut binom = 1.0;
            for j in 1..=k {
                binom = binom * (k + 1 - j) as f64 / j as f64;
                if j <= n {
                    acc += derivs[j] * out[k - j] * binom;
                }
            }
            out.push(-inv_f * acc);
        }
        if !all_finite(&out) {
            return Err(Error::NumericOverflow("evaluating reciprocal derivatives"));
        }
        Ok(out)
    }

    /// Division-free form of the reciprocal derivatives:
    /// `s_k = f(z)^{k+1} (1/f)^{(k)}(z) / k!` for `k = 0..=d`.
    ///
    /// Satisfies `s_0 = 1`, `s_k = -Σ_{j=1..k} (f^{(j)}/j!) f^{j-1} s_{k-j}`, so it
    /// stays finite when `f(z)` is tiny or zero.
    pub fn scaled_reciprocal_taylor(&self, z: Complex64, d: usize) -> Result<Vec<Complex64>> {
        let t = self.taylor_coefficients(z, d)?;
        Ok(scaled_reciprocal_from_taylor(&t))
    }

    /// Cauchy bound `1 + max_{k<n} |a_k|`; every root lies in the closed disk
    /// of this radius.
    pub fn root_bound(&self) -> f64 {
        let n = self.degree();
        1.0 + self.coeffs[..n]
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }

    /// Centroid of the roots, `-a_{n-1} / n`.
    pub fn root_centroid(&self) -> Complex64 {
        -self.coeffs[self.degree() - 1] / self.degree() as f64
    }
}

/// The `s_k` sequence of [`Polynomial::scaled_reciprocal_taylor`] from
/// precomputed Taylor coefficients `t_j = f^{(j)}/j!`.
pub(crate) fn scaled_reciprocal_from_taylor(t: &[Complex64]) -> Vec<Complex64> {
    let f = t[0];
    // f^{j-1} for j = 1..
    let mut f_pows = Vec::with_capacity(t.len());
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 1..t.len() {
        f_pows.push(pow);
        pow *= f;
    }
    let mut s = Vec::with_capacity(t.len());
    s.push(Complex64::new(1.0, 0.0));
    for k in 1..t.len() {
        let acc: Complex64 = (1..=k).map(|j| t[j] * f_pows[j - 1] * s[k - j]).sum();
        s.push(-acc);
    }
    s
}
