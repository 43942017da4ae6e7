//! Brute-force reference implementations.
//!
//! Nothing on the solve path calls into this module. The functions follow the
//! textbook definitions as literally as possible and only accept small inputs;
//! they exist so that the symbolic machinery and the iteration formulas can be
//! checked against something computed a different way.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

const HOMOGENEOUS_MAX_VARS: usize = 8;
const HOMOGENEOUS_MAX_DEGREE: usize = 6;

/// `e_k(x)`: sum over all `k`-subsets of the product of the selected values.
///
/// Accumulated column by column as the coefficients of `∏ (1 + x_j t)`.
pub fn elementary_symmetric_direct(x: &[Complex64], k: usize) -> Result<Complex64> {
    if k > x.len() {
        return Err(Error::DegenerateInput(format!(
            "e_{k} requested over {} variables",
            x.len()
        )));
    }
    let mut e = vec![Complex64::new(0.0, 0.0); k + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (seen, &v) in x.iter().enumerate() {
        for j in (1..=k.min(seen + 1)).rev() {
            let prev = e[j - 1];
            e[j] += v * prev;
        }
    }
    Ok(e[k])
}

/// `p_m(x) = Σ x_j^m`.
pub fn power_sum_direct(x: &[Complex64], m: u32) -> Complex64 {
    x.iter().map(|v| v.powu(m)).sum()
}

/// `h_k(x)`: sum over all size-`k` multisets of indices of the product of
/// the selected values. Exponential; restricted to `n <= 8`, `k <= 6`.
pub fn homogeneous_direct(x: &[Complex64], k: usize) -> Result<Complex64> {
    if x.len() > HOMOGENEOUS_MAX_VARS || k > HOMOGENEOUS_MAX_DEGREE {
        return Err(Error::DegenerateInput(format!(
            "h_{k} over {} variables exceeds the enumeration limit",
            x.len()
        )));
    }
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if x.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // non-decreasing index tuples j_1 <= ... <= j_k
    let n = x.len();
    let mut idx = vec![0usize; k];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        total += idx.iter().map(|&j| x[j]).product::<Complex64>();
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for slot in &mut idx[pos..] {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// `F_m(z) = (-1)^(m-1)/(m-1)! · d^(m-1)/dz^(m-1) (f'/f)` by central
/// differences with step `1e-5 (1 + |z|)`. Approximate; `m <= 3`.
pub fn f_m_finite_difference(p: &Polynomial, z: Complex64, m: u32) -> Result<Complex64> {
    let log_deriv = |w: Complex64| -> Result<Complex64> {
        let d = p.eval_derivatives(w, 1)?;
        if d[0] == Complex64::new(0.0, 0.0) {
            return Err(Error::EvaluationAtRoot);
        }
        Ok(d[1] / d[0])
    };
    let h = 1e-5 * (1.0 + z.norm());
    match m {
        1 => log_deriv(z),
        2 => {
            let fwd = log_deriv(z + h)?;
            let back = log_deriv(z - h)?;
            Ok(-(fwd - back) / (2.0 * h))
        }
        3 => {
            let fwd = log_deriv(z + h)?;
            let mid = log_deriv(z)?;
            let back = log_deriv(z - h)?;
            Ok((fwd - 2.0 * mid + back) / (h * h) / 2.0)
        }
        _ => Err(Error::DegenerateInput(format!(
            "finite-difference F_m supports m in 1..=3, got {m}"
        ))),
    }
}
