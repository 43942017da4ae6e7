//! Exact symmetric-function machinery behind the iteration formulas.
//!
//! * [`power_sum_in_elementary`] expands `p_m` in `e_1 … e_m` with Newton's
//!   identities, using exact integers.
//! * [`PartitionTermTable`] enumerates the partitions of `d` with weights
//!   `d! / ∏ (r_j! j^{r_j})`, which gives `H_d = d! h_d` in terms of power sums.
//! * [`lagged_sums`] computes `S_r = Σ_{j≠i} (z - z_j)^{-r}`.
//! * [`eval_v_m`] and [`eval_c_mi`] are the polynomial quantities entering the
//!   Weierstrass-like methods.
//!
//! Floating point only appears when an expression is evaluated.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Default relative collision threshold for [`lagged_sums`].
pub const DEFAULT_COLLISION_DELTA: f64 = 1e-12;

/// Largest partition degree whose weights fit the exact integer type.
pub const MAX_PARTITION_DEGREE: usize = 30;

fn sign(odd: bool) -> i128 {
    if odd {
        -1
    } else {
        1
    }
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral at this point
        acc = acc
            .checked_mul(u128::from(n - i))
            .ok_or(Error::SymbolicOverflow("computing a binomial coefficient"))?
            / u128::from(i + 1);
    }
    Ok(acc)
}

fn factorial(n: u64) -> Result<u128> {
    (1..=u128::from(n)).try_fold(1u128, |acc, k| {
        acc.checked_mul(k)
            .ok_or(Error::SymbolicOverflow("computing a factorial"))
    })
}

/// Polynomial with exact integer coefficients in the elementary symmetric
/// variables `e_1 … e_m`.
///
/// Keys are exponent vectors `(ν_1, …, ν_m)`; a term stands for
/// `coeff · ∏ e_k^{ν_k}`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymExpr {
    vars: usize,
    terms: BTreeMap<Vec<u32>, i128>,
}

impl SymExpr {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// The single variable `e_k` (1-based).
    pub fn variable(vars: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= vars, "e_{k} outside 1..={vars}");
        let mut exps = vec![0; vars];
        exps[k - 1] = 1;
        let mut out = Self::zero(vars);
        out.terms.insert(exps, 1);
        out
    }

    /// Number of variables `m` (length of every exponent vector).
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `∏ e_k^{ν_k}`, zero when absent.
    pub fn coefficient(&self, exps: &[u32]) -> i128 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], i128)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    /// Weight `Σ k ν_k` of each term.
    pub fn term_weights(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().map(|exps| {
            exps.iter()
                .enumerate()
                .map(|(k, &nu)| (k as u64 + 1) * u64::from(nu))
                .sum()
        })
    }

    /// True when every term has weight `w`.
    pub fn is_isobaric(&self, w: u64) -> bool {
        self.term_weights().all(|t| t == w)
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: i128) -> Result<()> {
        if coeff == 0 {
            return Ok(());
        }
        let slot = self.terms.entry(exps).or_insert(0);
        *slot = slot
            .checked_add(coeff)
            .ok_or(Error::SymbolicOverflow("adding symbolic terms"))?;
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
        Ok(())
    }

    fn add_scaled(&mut self, other: &Self, scale: i128) -> Result<()> {
        for (exps, &c) in &other.terms {
            let c = c
                .checked_mul(scale)
                .ok_or(Error::SymbolicOverflow("scaling symbolic terms"))?;
            self.add_term(exps.clone(), c)?;
        }
        Ok(())
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(self.vars);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let exps = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let c = ca
                    .checked_mul(cb)
                    .ok_or(Error::SymbolicOverflow("multiplying symbolic terms"))?;
                out.add_term(exps, c)?;
            }
        }
        Ok(out)
    }

    /// Evaluates at `e_k = values[k-1]`; variables past the end of `values`
    /// are taken as zero.
    ///
    /// Terms are accumulated with compensated summation: the expansions
    /// cancel heavily, so plain summation loses several digits at degree 8.
    pub fn eval(&self, values: &[Complex64]) -> Complex64 {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        'terms: for (exps, &c) in &self.terms {
            let mut prod = Complex64::new(c as f64, 0.0);
            for (k, &nu) in exps.iter().enumerate() {
                if nu == 0 {
                    continue;
                }
                match values.get(k) {
                    Some(v) => prod *= v.powu(nu),
                    None => continue 'terms,
                }
            }
            re.add(prod.re);
            im.add(prod.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

impl SymExpr {
    /// `Σ |c| ∏ |v_k|^ν_k`: the scale against which rounding in [`SymExpr::eval`]
    /// should be judged.
    pub fn magnitude(&self, values: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .filter(|(exps, _)| {
                exps.iter()
                    .enumerate()
                    .all(|(k, &nu)| nu == 0 || k < values.len())
            })
            .map(|(exps, &c)| {
                exps.iter()
                    .enumerate()
                    .filter(|&(_, &nu)| nu > 0)
                    .fold((c as f64).abs(), |acc, (k, &nu)| {
                        acc * values[k].norm().powi(nu as i32)
                    })
            })
            .sum()
    }
}

/// Neumaier summation.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `u_m`: the power sum `p_m` expressed in `e_1 … e_m` through
/// `p_m = Σ_{j=1}^{m-1} (-1)^{m-1+j} e_{m-j} p_j + (-1)^{m-1} m e_m`.
pub fn power_sum_in_elementary(m: usize) -> Result<SymExpr> {
    Ok(power_sums_in_elementary(m)?.pop().unwrap())
}

/// `[u_1, …, u_m]`, all over the variables `e_1 … e_m`.
fn power_sums_in_elementary(m: usize) -> Result<Vec<SymExpr>> {
    if m == 0 {
        return Err(Error::DegenerateInput(
            "power sum index must be >= 1".into(),
        ));
    }
    let mut p: Vec<SymExpr> = Vec::with_capacity(m);
    for k in 1..=m {
        let mut pk = SymExpr::zero(m);
        for j in 1..k {
            let term = SymExpr::variable(m, k - j).mul(&p[j - 1])?;
            pk.add_scaled(&term, sign((k - 1 + j) % 2 == 1))?;
        }
        pk.add_scaled(&SymExpr::variable(m, k), sign((k - 1) % 2 == 1) * k as i128)?;
        p.push(pk);
    }
    Ok(p)
}

/// `F_m(z) = u_m(f'/f, f''/(2! f), …)`, i.e. `Σ_j (z - λ_j)^{-m}`.
pub fn eval_f_m(p: &Polynomial, z: Complex64, m: usize) -> Result<Complex64> {
    let u = power_sum_in_elementary(m)?;
    let taylor = p.taylor_coefficients(z, m)?;
    if taylor[0] == Complex64::new(0.0, 0.0) {
        return Err(Error::EvaluationAtRoot);
    }
    let e: Vec<Complex64> = taylor[1..].iter().map(|t| t / taylor[0]).collect();
    let value = u.eval(&e);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NumericOverflow("evaluating F_m"));
    }
    Ok(value)
}

/// One partition of `d` together with its exact weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTerm {
    /// Multiplicities `(r_1, …, r_d)`: part `j` occurs `r_j` times.
    pub multiplicities: Vec<u32>,
    /// `d! / ∏ (r_j! j^{r_j})`.
    pub weight: u128,
}

/// All partitions of `d` with their weights, in descending lexicographic
/// order of `(r_d, …, r_1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTermTable {
    degree: usize,
    terms: Vec<PartitionTerm>,
}

impl PartitionTermTable {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::DegenerateInput(
                "partition degree must be >= 1".into(),
            ));
        }
        if d > MAX_PARTITION_DEGREE {
            return Err(Error::SymbolicOverflow("tabulating partition weights"));
        }
        let d_fact = factorial(d as u64)?;
        let mut terms = Vec::new();
        let mut mult = vec![0u32; d];
        enumerate_partitions(d, d, &mut mult, &mut |r| {
            let mut denom: u128 = 1;
            for (j, &rj) in r.iter().enumerate() {
                let part = (j + 1) as u128;
                denom = denom
                    .checked_mul(factorial(u64::from(rj))?)
                    .and_then(|v| v.checked_mul(part.checked_pow(rj)?))
                    .ok_or(Error::SymbolicOverflow("tabulating partition weights"))?;
            }
            debug_assert_eq!(d_fact % denom, 0);
            terms.push(PartitionTerm {
                multiplicities: r.to_vec(),
                weight: d_fact / denom,
            });
            Ok(())
        })?;
        Ok(Self { degree: d, terms })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[PartitionTerm] {
        &self.terms
    }

    /// Weight of the partition with multiplicities `r`, if present.
    pub fn weight_of(&self, r: &[u32]) -> Option<u128> {
        self.terms
            .iter()
            .find(|t| t.multiplicities == r)
            .map(|t| t.weight)
    }

    /// `Σ weight · ∏ s_j^{r_j}` with `s[j-1]` standing for `s_j`.
    pub fn eval(&self, s: &[Complex64]) -> Result<Complex64> {
        if s.len() < self.degree {
            return Err(Error::DegenerateInput(format!(
                "need {} power values, got {}",
                self.degree,
                s.len()
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.multiplicities
                    .iter()
                    .zip(s)
                    .filter(|(&r, _)| r > 0)
                    .fold(Complex64::new(t.weight as f64, 0.0), |acc, (&r, v)| {
                        acc * v.powu(r)
                    })
            })
            .sum())
    }
}

/// Fills `mult[0..top]` (that is `r_1..r_top`) with every way to write
/// `remaining` using parts no larger than `top`, largest parts chosen first
/// and in descending multiplicity.
fn enumerate_partitions<F>(
    remaining: usize,
    top: usize,
    mult: &mut [u32],
    emit: &mut F,
) -> Result<()>
where
    F: FnMut(&[u32]) -> Result<()>,
{
    if top == 1 {
        mult[0] = remaining as u32;
        emit(mult)?;
        mult[0] = 0;
        return Ok(());
    }
    for r in (0..=remaining / top).rev() {
        mult[top - 1] = r as u32;
        enumerate_partitions(remaining - r * top, top - 1, mult, emit)?;
    }
    mult[top - 1] = 0;
    Ok(())
}

/// Convenience wrapper for `PartitionTermTable::new`.
pub fn partition_table(d: usize) -> Result<PartitionTermTable> {
    PartitionTermTable::new(d)
}

/// The sums `S_r = Σ_w (z - w)^{-r}` for `r = 1..=r_max`, all taken over the
/// same excluded index and point set.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedSums {
    values: Vec<Complex64>,
}

impl LaggedSums {
    /// `S_r`, 1-based.
    pub fn get(&self, r: usize) -> Complex64 {
        self.values[r - 1]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Computes `S_1 … S_{r_max}` at `z` over `others`.
///
/// A point closer to `z` than `delta · max(1, |z|)` is a collision.
pub fn lagged_sums(
    z: Complex64,
    others: &[Complex64],
    r_max: usize,
    delta: f64,
) -> Result<LaggedSums> {
    let threshold = delta * z.norm().max(1.0);
    let mut values = vec![Complex64::new(0.0, 0.0); r_max];
    for (idx, &w) in others.iter().enumerate() {
        let diff = z - w;
        if diff.norm() < threshold || diff == Complex64::new(0.0, 0.0) {
            return Err(Error::CollisionDetected(idx));
        }
        let recip = diff.inv();
        let mut pow = recip;
        for slot in values.iter_mut() {
            *slot += pow;
            pow *= recip;
        }
    }
    Ok(LaggedSums { values })
}

/// `H_d = Σ_partitions d! ∏ S_j^{r_j} / (r_j! j^{r_j})`.
pub fn eval_h(d: usize, sums: &LaggedSums) -> Result<Complex64> {
    partition_table(d)?.eval(sums.as_slice())
}

/// `v_m(z) = Σ_{l=0}^{m} a_{n-m+l} C(n-m+l, n-m) z^l`, equal to
/// `f^{(n-m)}(z) / (n-m)!`.
pub fn eval_v_m(p: &Polynomial, z: Complex64, m: usize) -> Result<Complex64> {
    let n = p.degree();
    if m == 0 || m > n {
        return Err(Error::DegenerateInput(format!(
            "v_m needs 1 <= m <= {n}, got {m}"
        )));
    }
    let base = n - m;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in (0..=m).rev() {
        let binom = binomial((base + l) as u64, base as u64)? as f64;
        acc = acc * z + p.coeff(base + l) * binom;
    }
    Ok(acc)
}

/// `c_{m;i} = e_m(z - w_1, …, z - w_{n-1})` through the expansion in powers of
/// `z` with power sums `b_k = Σ w^k` of the other points:
///
/// `c_{m;i} = Σ_l C(n-1-m+l, l) [Σ_{|r| = m-l} ∏ (-b_j)^{r_j} / (r_j! j^{r_j})] z^l`.
pub fn eval_c_mi(z: Complex64, others: &[Complex64], m: usize) -> Result<Complex64> {
    let count = others.len();
    if m > count {
        return Err(Error::DegenerateInput(format!(
            "c_m needs 0 <= m <= {count}, got {m}"
        )));
    }
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut neg_b = vec![Complex64::new(0.0, 0.0); m];
    for &w in others {
        let mut pow = w;
        for slot in neg_b.iter_mut() {
            *slot -= pow;
            pow *= w;
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for l in (0..=m).rev() {
        let k = m - l;
        let inner = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            partition_table(k)?.eval(&neg_b)? / factorial(k as u64)? as f64
        };
        let binom = binomial((count - m + l) as u64, l as u64)? as f64;
        acc = acc * z + inner * binom;
    }
    Ok(acc)
}
