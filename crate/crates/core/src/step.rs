//! One Jacobi sweep of each simultaneous iteration.
//!
//! Every update of coordinate `i` reads only the input vector, so the
//! per-index work is independent. Formulas that divide by `f(z_i)` in their
//! textbook form are evaluated after multiplying through by the appropriate
//! power of `f(z_i)`, which keeps them finite as `f(z_i) -> 0`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{scaled_reciprocal_from_taylor, Polynomial};
use crate::symmetric::{
    eval_c_mi, eval_v_m, lagged_sums, power_sum_in_elementary, PartitionTermTable, SymExpr,
    DEFAULT_COLLISION_DELTA, MAX_PARTITION_DEGREE,
};

/// Denominators smaller than this times the numerator scale are singular.
const SINGULAR_RATIO: f64 = 1e-300;

/// Retries when a perturbed coordinate still collides.
const COLLISION_RETRIES: usize = 16;

/// Which simultaneous iteration to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodSpec {
    /// Weierstrass / Durand-Kerner, quadratic.
    DurandKerner,
    /// Maehly-Ehrlich-Aberth, cubic.
    Aberth,
    /// Ostrowski-Gargantini square-root iteration, quartic.
    Gargantini,
    /// `m`-th root generalization of order `m + 2`.
    MthRoot(usize),
    /// Simultaneous Householder method of order `d + 2`.
    Householder(usize),
    /// Weierstrass-like method, quadratic equation linearized.
    WeierstrassLinear(usize),
    /// Weierstrass-like method, quadratic equation solved exactly.
    WeierstrassQuadratic(usize),
}

impl MethodSpec {
    /// Short stable name used on the command line and in reports.
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::DurandKerner => "dk",
            MethodSpec::Aberth => "aberth",
            MethodSpec::Gargantini => "gargantini",
            MethodSpec::MthRoot(_) => "mroot",
            MethodSpec::Householder(_) => "householder",
            MethodSpec::WeierstrassLinear(_) => "wlin",
            MethodSpec::WeierstrassQuadratic(_) => "wquad",
        }
    }

    /// The `m` or `d` parameter, when the method has one.
    pub fn parameter(&self) -> Option<usize> {
        match *self {
            MethodSpec::MthRoot(m)
            | MethodSpec::WeierstrassLinear(m)
            | MethodSpec::WeierstrassQuadratic(m) => Some(m),
            MethodSpec::Householder(d) => Some(d),
            _ => None,
        }
    }

    /// Checks parameter ranges against the polynomial degree.
    pub fn validate(&self, degree: usize) -> Result<()> {
        match *self {
            MethodSpec::MthRoot(0) => Err(Error::InvalidConfig("mroot needs m >= 1".into())),
            MethodSpec::MthRoot(m) if m > MAX_PARTITION_DEGREE => Err(Error::InvalidConfig(
                format!("mroot supports m <= {MAX_PARTITION_DEGREE}"),
            )),
            MethodSpec::Householder(0) => {
                Err(Error::InvalidConfig("householder needs d >= 1".into()))
            }
            MethodSpec::Householder(d) if d > MAX_PARTITION_DEGREE => Err(Error::InvalidConfig(
                format!("householder supports d <= {MAX_PARTITION_DEGREE}"),
            )),
            MethodSpec::WeierstrassLinear(m) | MethodSpec::WeierstrassQuadratic(m) => {
                // a linear polynomial has no other coordinates; m = 1 still works
                let top = degree.saturating_sub(1).max(1);
                if m == 0 || m > top {
                    Err(Error::InvalidConfig(format!(
                        "{} needs 1 <= m <= {top} for degree {degree}, got {m}",
                        self.name()
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(k) => write!(f, "{}:{k}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// What happened to one coordinate during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordFlag {
    Updated,
    /// `f(z_i) == 0`; the coordinate is copied unchanged.
    AlreadyConverged,
    /// The update formula hit a vanishing denominator; unchanged.
    SingularDenominator,
    /// The coordinate collided with another and was nudged before updating.
    CollisionPerturbed,
}

/// Result of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: Vec<Complex64>,
    pub flags: Vec<CoordFlag>,
}

impl StepOutcome {
    pub fn count(&self, flag: CoordFlag) -> usize {
        self.flags.iter().filter(|&&f| f == flag).count()
    }
}

/// Knobs shared by every sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    /// Two coordinates closer than `collision_delta · max(1, |z_i|)` collide.
    pub collision_delta: f64,
    /// Seed for collision perturbations.
    pub seed: u64,
    /// Sweep counter mixed into the perturbation streams.
    pub sweep: u64,
}

impl Default for StepParams {
    fn default() -> Self {
        Self {
            collision_delta: DEFAULT_COLLISION_DELTA,
            seed: 0,
            sweep: 0,
        }
    }
}

impl StepParams {
    pub fn with_delta(collision_delta: f64) -> Self {
        Self {
            collision_delta,
            ..Self::default()
        }
    }

    /// Deterministic unit complex numbers for coordinate `index`.
    fn perturbation_stream(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ self.sweep.rotate_left(32));
        rng.set_stream(index as u64);
        rng
    }
}

/// Per-sweep precomputation: symbolic tables built once, used for every index.
enum Kernel {
    DurandKerner,
    Aberth,
    Gargantini,
    MthRoot {
        m: usize,
        u_m: SymExpr,
    },
    Householder {
        d: usize,
        table: PartitionTermTable,
        d_fact: f64,
    },
    HalleyExplicit,
    WeierstrassLinear {
        m: usize,
    },
    WeierstrassQuadratic {
        m: usize,
    },
}

impl Kernel {
    fn prepare(method: MethodSpec) -> Result<Self> {
        Ok(match method {
            MethodSpec::DurandKerner => Kernel::DurandKerner,
            MethodSpec::Aberth => Kernel::Aberth,
            MethodSpec::Gargantini => Kernel::Gargantini,
            MethodSpec::MthRoot(m) => Kernel::MthRoot {
                m,
                u_m: power_sum_in_elementary(m)?,
            },
            MethodSpec::Householder(d) => Kernel::Householder {
                d,
                table: PartitionTermTable::new(d)?,
                d_fact: (1..=d).map(|k| k as f64).product(),
            },
            MethodSpec::WeierstrassLinear(m) => Kernel::WeierstrassLinear { m },
            MethodSpec::WeierstrassQuadratic(m) => Kernel::WeierstrassQuadratic { m },
        })
    }

    /// Next value for the coordinate at `z`, or `None` when singular.
    fn update(
        &self,
        p: &Polynomial,
        z: Complex64,
        others: &[Complex64],
        delta: f64,
    ) -> Result<Option<Complex64>> {
        match self {
            Kernel::DurandKerner => {
                let w = weierstrass_correction(p, z, others);
                Ok(Some(z - w))
            }
            Kernel::Aberth => {
                let t = p.taylor_coefficients(z, 1)?;
                let s1 = lagged_sums(z, others, 1, delta)?.get(1);
                let den = t[1] - t[0] * s1;
                Ok(safe_div(t[0], den).map(|c| z - c))
            }
            Kernel::Gargantini => {
                // f^2 [(f'/f)^2 - f''/f - S_2], square root nearest f'
                let t = p.taylor_coefficients(z, 2)?;
                let (f, fp, fpp) = (t[0], t[1], 2.0 * t[2]);
                let s2 = lagged_sums(z, others, 2, delta)?.get(2);
                let q = fp * fp - f * fpp - f * f * s2;
                Ok(select_branch(2, q, fp)
                    .and_then(|root| safe_div(f, root))
                    .map(|c| z - c))
            }
            Kernel::MthRoot { m, u_m } => {
                let m = *m;
                let t = p.taylor_coefficients(z, m)?;
                let f = t[0];
                // f^m F_m = u_m(t_1, t_2 f, t_3 f^2, ...)
                let mut scaled = Vec::with_capacity(m);
                let mut pow = Complex64::new(1.0, 0.0);
                for tk in &t[1..] {
                    scaled.push(tk * pow);
                    pow *= f;
                }
                let s_m = lagged_sums(z, others, m, delta)?.get(m);
                let bracket = u_m.eval(&scaled) - f.powu(m as u32) * s_m;
                Ok(select_branch(m, bracket, t[1])
                    .and_then(|root| safe_div(f, root))
                    .map(|c| z - c))
            }
            Kernel::Householder { d, table, d_fact } => {
                let d = *d;
                let t = p.taylor_coefficients(z, d)?;
                let f = t[0];
                let s = scaled_reciprocal_from_taylor(&t);
                let sums = lagged_sums(z, others, d, delta)?;
                let h = table.eval(sums.as_slice())? / d_fact;
                let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
                let den = s[d] + sign * h * f.powu(d as u32);
                Ok(safe_div(f * s[d - 1], den).map(|c| z + c))
            }
            Kernel::HalleyExplicit => {
                let t = p.taylor_coefficients(z, 2)?;
                let (f, fp, fpp) = (t[0], t[1], 2.0 * t[2]);
                let sums = lagged_sums(z, others, 2, delta)?;
                let (s1, s2) = (sums.get(1), sums.get(2));
                let num = 2.0 * f * fp;
                let den = 2.0 * fp * fp - f * fpp - f * f * (s2 + s1 * s1);
                Ok(safe_div(num, den).map(|c| z - c))
            }
            Kernel::WeierstrassLinear { m } => {
                let (w, v, c_m, c_prev) = weierstrass_like_terms(p, z, others, *m)?;
                Ok(safe_div(w * (c_m + w * c_prev), v).map(|c| z - c))
            }
            Kernel::WeierstrassQuadratic { m } => {
                let (w, v, c_m, c_prev) = weierstrass_like_terms(p, z, others, *m)?;
                if others.is_empty() {
                    return Ok(safe_div(w * (c_m + w * c_prev), v).map(|c| z - c));
                }
                Ok(quadratic_root_nearest(c_prev, -v, w * c_m, w).map(|t| z - t))
            }
        }
    }
}

/// `f(z) / ∏ (z - w)`.
fn weierstrass_correction(p: &Polynomial, z: Complex64, others: &[Complex64]) -> Complex64 {
    let prod: Complex64 = others.iter().map(|&w| z - w).product();
    p.eval(z) / prod
}

/// `(W_i, v_m(z), c_{m;i}, c_{m-1;i})`.
fn weierstrass_like_terms(
    p: &Polynomial,
    z: Complex64,
    others: &[Complex64],
    m: usize,
) -> Result<(Complex64, Complex64, Complex64, Complex64)> {
    let w = weierstrass_correction(p, z, others);
    let v = eval_v_m(p, z, m)?;
    // with no other coordinates c_m vanishes for m >= 1
    let c_m = if m <= others.len() {
        eval_c_mi(z, others, m)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let c_prev = eval_c_mi(z, others, m - 1)?;
    Ok((w, v, c_m, c_prev))
}

fn is_finite(c: Complex64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

fn safe_div(num: Complex64, den: Complex64) -> Option<Complex64> {
    let scale = num.norm().max(f64::MIN_POSITIVE);
    if den.norm() < SINGULAR_RATIO * scale || den == Complex64::new(0.0, 0.0) {
        return None;
    }
    let q = num / den;
    is_finite(q).then_some(q)
}

/// Root of smaller modulus of `a t^2 + b t + c = 0`.
///
/// The larger root comes from the discriminant sign that avoids cancellation;
/// the smaller one is `c / q` with `q = -(b ± sqrt(b^2 - 4ac)) / 2`. With
/// `a == 0` this reduces to `-c / b`.
pub fn smaller_quadratic_root(a: Complex64, b: Complex64, c: Complex64) -> Option<Complex64> {
    if a == Complex64::new(0.0, 0.0) {
        return safe_div(-c, b);
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) / 2.0
    } else {
        -(b - disc) / 2.0
    };
    if c == Complex64::new(0.0, 0.0) {
        return Some(c);
    }
    safe_div(c, q)
}

/// Root of `a t^2 + b t + c = 0` closest to `target`.
///
/// Both roots are formed without cancellation (`q / a` and `c / q`). With
/// `a == 0` this reduces to `-c / b`.
pub fn quadratic_root_nearest(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    target: Complex64,
) -> Option<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if a == zero {
        return safe_div(-c, b);
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) / 2.0
    } else {
        -(b - disc) / 2.0
    };
    let large = safe_div(q, a);
    let small = if c == zero {
        Some(zero)
    } else {
        safe_div(c, q)
    };
    match (large, small) {
        (Some(x), Some(y)) => Some(if (x - target).norm() < (y - target).norm() {
            x
        } else {
            y
        }),
        (x, y) => x.or(y),
    }
}

/// Among the `m` values of `bracket^{1/m}`, the one closest to `reference`.
///
/// Exact ties go to the candidate with the smallest principal argument.
/// Returns `None` when `bracket` is zero.
pub fn select_branch(m: usize, bracket: Complex64, reference: Complex64) -> Option<Complex64> {
    if bracket == Complex64::new(0.0, 0.0) || !is_finite(bracket) || m == 0 {
        return None;
    }
    if m == 1 {
        return Some(bracket);
    }
    let (r, theta) = bracket.to_polar();
    let modulus = r.powf(1.0 / m as f64);
    let mut best: Option<(f64, f64, Complex64)> = None;
    for k in 0..m {
        let cand = Complex64::from_polar(modulus, (theta + 2.0 * PI * k as f64) / m as f64);
        let dist = (reference - cand).norm();
        let arg = cand.arg();
        let better = match best {
            None => true,
            Some((bd, barg, _)) => {
                let tol = 1e-14 * bd.max(dist);
                dist < bd - tol || ((dist - bd).abs() <= tol && arg < barg)
            }
        };
        if better {
            best = Some((dist, arg, cand));
        }
    }
    best.map(|(_, _, c)| c)
}

fn sweep(
    kernel: &Kernel,
    p: &Polynomial,
    z: &[Complex64],
    params: &StepParams,
) -> Result<StepOutcome> {
    let n = p.degree();
    if z.len() != n {
        return Err(Error::DegenerateInput(format!(
            "approximation vector has length {}, degree is {n}",
            z.len()
        )));
    }
    if params.collision_delta.is_nan() || params.collision_delta <= 0.0 {
        return Err(Error::InvalidConfig(
            "collision_delta must be positive".into(),
        ));
    }
    let mut next = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    let mut others = Vec::with_capacity(n.saturating_sub(1));
    for (i, &zi) in z.iter().enumerate() {
        if p.eval(zi) == Complex64::new(0.0, 0.0) {
            next.push(zi);
            flags.push(CoordFlag::AlreadyConverged);
            continue;
        }
        others.clear();
        others.extend(
            z.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| w),
        );

        let delta = params.collision_delta;
        let collides = |x: Complex64| {
            let threshold = delta * x.norm().max(1.0);
            others.iter().any(|&w| (x - w).norm() < threshold)
        };
        let mut point = zi;
        let mut flag = CoordFlag::Updated;
        if collides(zi) {
            let mut rng = params.perturbation_stream(i);
            let radius = delta * (1.0 + zi.norm());
            let mut cleared = false;
            for _ in 0..COLLISION_RETRIES {
                let angle: f64 = rng.gen_range(0.0..2.0 * PI);
                point = zi + Complex64::from_polar(radius, angle);
                if !collides(point) {
                    cleared = true;
                    break;
                }
            }
            if !cleared {
                next.push(zi);
                flags.push(CoordFlag::SingularDenominator);
                continue;
            }
            flag = CoordFlag::CollisionPerturbed;
        }

        match kernel.update(p, point, &others, delta) {
            Ok(Some(v)) if is_finite(v) => {
                next.push(v);
                flags.push(flag);
            }
            Ok(_) | Err(Error::NumericOverflow(_)) | Err(Error::CollisionDetected(_)) => {
                next.push(zi);
                flags.push(CoordFlag::SingularDenominator);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(StepOutcome { next, flags })
}

/// One sweep of `method`.
pub fn step(
    method: MethodSpec,
    p: &Polynomial,
    z: &[Complex64],
    params: &StepParams,
) -> Result<StepOutcome> {
    method.validate(p.degree())?;
    let kernel = Kernel::prepare(method)?;
    sweep(&kernel, p, z, params)
}

/// Runs sweeps of one method while reusing the symbolic tables.
pub struct Stepper {
    kernel: Kernel,
}

impl Stepper {
    pub fn new(method: MethodSpec, degree: usize) -> Result<Self> {
        method.validate(degree)?;
        Ok(Self {
            kernel: Kernel::prepare(method)?,
        })
    }

    pub fn step(
        &self,
        p: &Polynomial,
        z: &[Complex64],
        params: &StepParams,
    ) -> Result<StepOutcome> {
        sweep(&self.kernel, p, z, params)
    }
}

/// `ẑ_i = z_i - f(z_i) / ∏_{j≠i} (z_i - z_j)`.
pub fn dk_step(p: &Polynomial, z: &[Complex64], params: &StepParams) -> Result<StepOutcome> {
    step(MethodSpec::DurandKerner, p, z, params)
}

/// `ẑ_i = z_i - f(z_i) / (f'(z_i) - f(z_i) S_1)`.
pub fn aberth_step(p: &Polynomial, z: &[Complex64], params: &StepParams) -> Result<StepOutcome> {
    step(MethodSpec::Aberth, p, z, params)
}

/// `ẑ_i = z_i - [F_m(z_i) - S_m]^{-1/m}` with the branch nearest `f'/f`.
pub fn mth_root_step(
    p: &Polynomial,
    z: &[Complex64],
    m: usize,
    params: &StepParams,
) -> Result<StepOutcome> {
    step(MethodSpec::MthRoot(m), p, z, params)
}

pub fn gargantini_step(
    p: &Polynomial,
    z: &[Complex64],
    params: &StepParams,
) -> Result<StepOutcome> {
    step(MethodSpec::Gargantini, p, z, params)
}

/// `ẑ_i = z_i + d (1/f)^{(d-1)} / [(1/f)^{(d)} + (-1)^{d-1} H_d / f]`.
pub fn householder_step(
    p: &Polynomial,
    z: &[Complex64],
    d: usize,
    params: &StepParams,
) -> Result<StepOutcome> {
    step(MethodSpec::Householder(d), p, z, params)
}

/// The explicit simultaneous Halley formula, kept as a cross-check for
/// `householder_step` with `d = 2`.
pub fn halley_explicit_step(
    p: &Polynomial,
    z: &[Complex64],
    params: &StepParams,
) -> Result<StepOutcome> {
    sweep(&Kernel::HalleyExplicit, p, z, params)
}

/// `ẑ_i = z_i - W_i (c_{m;i} + W_i c_{m-1;i}) / v_m(z_i)`.
pub fn weierstrass_linear_step(
    p: &Polynomial,
    z: &[Complex64],
    m: usize,
    params: &StepParams,
) -> Result<StepOutcome> {
    step(MethodSpec::WeierstrassLinear(m), p, z, params)
}

/// Solves `c_{m-1;i} t^2 - v_m(z_i) t + W_i c_{m;i} = 0` and takes the root
/// closest to the Weierstrass correction `W_i`.
///
/// Near convergence this is also the root of smaller modulus, but unlike the
/// smaller-modulus rule it cannot pick the spurious root `c_{m;i}/c_{m-1;i}`
/// when the other coordinates are exact.
pub fn weierstrass_quadratic_step(
    p: &Polynomial,
    z: &[Complex64],
    m: usize,
    params: &StepParams,
) -> Result<StepOutcome> {
    step(MethodSpec::WeierstrassQuadratic(m), p, z, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reals(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn unit_circle_poly() -> Polynomial {
        Polynomial::from_roots(&reals(&[1.0, -1.0])).unwrap()
    }

    fn params() -> StepParams {
        StepParams::default()
    }

    #[test]
    fn dk_examples() {
        let p = unit_circle_poly();
        let out = dk_step(&p, &reals(&[2.0, -2.0]), &params()).unwrap();
        assert_eq!(out.next, reals(&[1.25, -1.25]));
        assert_eq!(out.flags, vec![CoordFlag::Updated; 2]);

        let out = dk_step(&p, &reals(&[1.0, -1.0]), &params()).unwrap();
        assert_eq!(out.next, reals(&[1.0, -1.0]));
        assert_eq!(out.flags, vec![CoordFlag::AlreadyConverged; 2]);

        let out = dk_step(&p, &reals(&[2.0, -1.0]), &params()).unwrap();
        assert_eq!(out.next[0], c(1.0, 0.0));
    }

    #[test]
    fn aberth_examples() {
        let p = unit_circle_poly();
        let out = aberth_step(&p, &reals(&[2.0, -1.0]), &params()).unwrap();
        assert_eq!(out.next[0], c(1.0, 0.0));
        let out = aberth_step(&p, &reals(&[1.0, -1.0]), &params()).unwrap();
        assert_eq!(out.flags, vec![CoordFlag::AlreadyConverged; 2]);
        let out = aberth_step(&p, &reals(&[2.0, -2.0]), &params()).unwrap();
        assert!((out.next[0] - c(2.0 - 12.0 / 13.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mth_root_reductions_on_examples() {
        let p = unit_circle_poly();
        let z = [c(2.0, 0.3), c(-1.7, -0.2)];
        let a = aberth_step(&p, &z, &params()).unwrap();
        let m1 = mth_root_step(&p, &z, 1, &params()).unwrap();
        assert_eq!(a.next, m1.next);
        let g = gargantini_step(&p, &z, &params()).unwrap();
        let m2 = mth_root_step(&p, &z, 2, &params()).unwrap();
        assert_eq!(g.next, m2.next);

        let out = mth_root_step(&p, &reals(&[2.0, -1.0]), 3, &params()).unwrap();
        assert!((out.next[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(mth_root_step(&p, &z, 0, &params()).is_err());
    }

    #[test]
    fn gargantini_examples() {
        let p = unit_circle_poly();
        let out = gargantini_step(&p, &reals(&[1.0, -1.0]), &params()).unwrap();
        assert_eq!(out.next, reals(&[1.0, -1.0]));
        let out = gargantini_step(&p, &reals(&[2.0, -1.0]), &params()).unwrap();
        assert!((out.next[0] - c(1.0, 0.0)).norm() < 1e-15);

        let cubic = Polynomial::from_roots(&reals(&[1.0, 2.0, 3.0])).unwrap();
        let z = reals(&[0.9, 2.1, 3.05]);
        let before = 0.1f64;
        let out = gargantini_step(&cubic, &z, &params()).unwrap();
        let after = out
            .next
            .iter()
            .zip(reals(&[1.0, 2.0, 3.0]))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(after * 10.0 <= before, "after = {after}");
    }

    #[test]
    fn select_branch_examples() {
        let r = select_branch(2, c(1.0, 0.0), c(-0.9, 0.0)).unwrap();
        assert!((r - c(-1.0, 0.0)).norm() < 1e-15);
        let b = c(0.3, -4.0);
        assert_eq!(select_branch(1, b, c(100.0, 0.0)).unwrap(), b);
        let r = select_branch(3, c(8.0, 0.0), c(2.1, 0.0)).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-15);
        // equidistant candidates 1 and -1: smallest argument wins
        let r = select_branch(2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((r - c(1.0, 0.0)).norm() < 1e-15);
        assert!(select_branch(2, c(0.0, 0.0), c(1.0, 0.0)).is_none());
    }

    #[test]
    fn householder_examples() {
        let p = unit_circle_poly();
        let z = [c(2.0, 0.3), c(-1.7, -0.2)];
        let a = aberth_step(&p, &z, &params()).unwrap();
        let h1 = householder_step(&p, &z, 1, &params()).unwrap();
        for (x, y) in a.next.iter().zip(&h1.next) {
            assert!((x - y).norm() <= 1e-14 * y.norm());
        }
        let out = householder_step(&p, &reals(&[2.0, -1.0]), 2, &params()).unwrap();
        assert!((out.next[0] - c(1.0, 0.0)).norm() < 1e-15);
        let out = householder_step(&p, &reals(&[2.0, -2.0]), 2, &params()).unwrap();
        assert!((out.next[0] - c(2.0 - 24.0 / 24.875, 0.0)).norm() < 1e-15);
        assert!(householder_step(&p, &z, 0, &params()).is_err());
    }

    #[test]
    fn halley_explicit_examples() {
        let p = unit_circle_poly();
        let out = halley_explicit_step(&p, &reals(&[2.0, -2.0]), &params()).unwrap();
        assert!((out.next[0] - c(2.0 - 24.0 / 24.875, 0.0)).norm() < 1e-15);
        let out = halley_explicit_step(&p, &reals(&[1.0, -1.0]), &params()).unwrap();
        assert_eq!(out.flags, vec![CoordFlag::AlreadyConverged; 2]);
    }

    #[test]
    fn weierstrass_linear_examples() {
        let p = unit_circle_poly();
        let out = weierstrass_linear_step(&p, &reals(&[2.0, -1.0]), 1, &params()).unwrap();
        assert!((out.next[0] - c(1.0, 0.0)).norm() < 1e-15);
        // W = 3/4, v_1(2) = 4, c_1 = 2 - (-2) = 4, c_0 = 1
        let out = weierstrass_linear_step(&p, &reals(&[2.0, -2.0]), 1, &params()).unwrap();
        assert!((out.next[0] - c(2.0 - 57.0 / 64.0, 0.0)).norm() < 1e-15);
        assert!(weierstrass_linear_step(&p, &reals(&[2.0, -2.0]), 2, &params()).is_err());
    }

    #[test]
    fn weierstrass_linear_flags_vanishing_v() {
        // v_1(z) = 2z - 2 vanishes at the centroid z = 1, which is not a root
        let p = Polynomial::from_coefficients(&reals(&[0.5, -2.0, 1.0])).unwrap();
        let z = reals(&[1.0, 3.0]);
        let out = weierstrass_linear_step(&p, &z, 1, &params()).unwrap();
        assert_eq!(out.flags[0], CoordFlag::SingularDenominator);
        assert_eq!(out.next[0], z[0]);
        assert_eq!(out.flags[1], CoordFlag::Updated);
    }

    #[test]
    fn weierstrass_quadratic_examples() {
        let p = unit_circle_poly();
        let out = weierstrass_quadratic_step(&p, &reals(&[2.0, -1.0]), 1, &params()).unwrap();
        assert!((out.next[0] - c(1.0, 0.0)).norm() < 1e-15);
        let out = weierstrass_quadratic_step(&p, &reals(&[1.0, -1.0]), 1, &params()).unwrap();
        assert_eq!(out.flags, vec![CoordFlag::AlreadyConverged; 2]);
    }

    #[test]
    fn quadratic_root_selection() {
        // t^2 - 4t + 3 = 0 -> {1, 3}
        let t = smaller_quadratic_root(c(1.0, 0.0), c(-4.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!((t - c(1.0, 0.0)).norm() < 1e-15);
        // tiny constant term: no cancellation in the small root
        let t = smaller_quadratic_root(c(1.0, 0.0), c(-1.0, 0.0), c(1e-20, 0.0)).unwrap();
        assert!((t - c(1e-20, 0.0)).norm() < 1e-34);
        // linear fallback
        let t = smaller_quadratic_root(c(0.0, 0.0), c(2.0, 0.0), c(-4.0, 0.0)).unwrap();
        assert_eq!(t, c(2.0, 0.0));
        assert!(smaller_quadratic_root(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).is_none());
        let t =
            quadratic_root_nearest(c(1.0, 0.0), c(-4.0, 0.0), c(3.0, 0.0), c(2.9, 0.0)).unwrap();
        assert!((t - c(3.0, 0.0)).norm() < 1e-15);
        let t =
            quadratic_root_nearest(c(1.0, 0.0), c(-4.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((t - c(1.0, 0.0)).norm() < 1e-15);
        let t =
            quadratic_root_nearest(c(1.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)).unwrap();
        assert_eq!(t, c(4.0, 0.0));
    }

    #[test]
    fn linear_polynomial_one_step() {
        let p = Polynomial::from_coefficients(&[c(-0.5, 2.0), c(1.0, 0.0)]).unwrap();
        let root = c(0.5, -2.0);
        let z = [c(3.0, 1.0)];
        for method in [
            MethodSpec::DurandKerner,
            MethodSpec::Aberth,
            MethodSpec::Gargantini,
            MethodSpec::MthRoot(3),
            MethodSpec::Householder(1),
            MethodSpec::Householder(4),
            MethodSpec::WeierstrassLinear(1),
            MethodSpec::WeierstrassQuadratic(1),
        ] {
            let out = step(method, &p, &z, &params()).unwrap();
            assert!(
                (out.next[0] - root).norm() < 1e-14,
                "{method}: {}",
                out.next[0]
            );
        }
    }

    #[test]
    fn collisions_are_perturbed_deterministically() {
        let p = Polynomial::from_roots(&reals(&[1.0, -1.0, 2.0])).unwrap();
        let z = [c(0.5, 0.5), c(0.5, 0.5), c(-0.3, 1.0)];
        let a = aberth_step(&p, &z, &params()).unwrap();
        assert_eq!(a.flags[0], CoordFlag::CollisionPerturbed);
        assert_eq!(a.flags[1], CoordFlag::CollisionPerturbed);
        assert_eq!(a.flags[2], CoordFlag::Updated);
        assert!(a.next.iter().all(|v| is_finite(*v)));
        assert_ne!(a.next[0], a.next[1]);
        let b = aberth_step(&p, &z, &params()).unwrap();
        assert_eq!(a, b);
        let other_seed = StepParams {
            seed: 9,
            ..params()
        };
        let c2 = aberth_step(&p, &z, &other_seed).unwrap();
        assert_ne!(a.next[0], c2.next[0]);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let p = unit_circle_poly();
        assert!(dk_step(&p, &reals(&[1.0]), &params()).is_err());
        assert!(dk_step(&p, &reals(&[1.0, 2.0]), &StepParams::with_delta(0.0)).is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!(MethodSpec::DurandKerner.to_string(), "dk");
        assert_eq!(MethodSpec::Householder(3).to_string(), "householder:3");
        assert_eq!(MethodSpec::WeierstrassQuadratic(2).parameter(), Some(2));
        assert!(MethodSpec::WeierstrassLinear(3).validate(3).is_err());
        assert!(MethodSpec::WeierstrassLinear(2).validate(3).is_ok());
        assert!(MethodSpec::WeierstrassLinear(1).validate(1).is_ok());
    }
}
