//! The full solve loop: initial approximations, repeated sweeps with stopping
//! rules, per-iteration traces and empirical order estimation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::step::{CoordFlag, MethodSpec, StepParams, Stepper};

/// Errors below this are dominated by binary64 rounding.
pub const ORDER_WINDOW_FLOOR: f64 = 1e-13;
/// Errors above this are not yet in the asymptotic regime.
pub const ORDER_WINDOW_CAP: f64 = 1e-2;
/// Sweeps without a decrease in the step size before giving up.
pub const STAGNATION_SWEEPS: usize = 10;

/// Where the starting vector comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// Points on the Cauchy-bound circle around the root centroid.
    #[default]
    CenteredCircle,
    /// Caller-supplied vector.
    UserProvided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iter: usize,
    pub collision_delta: f64,
    pub seed: u64,
    pub init_strategy: InitStrategy,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-12,
            tol_step: 1e-13,
            max_iter: 200,
            collision_delta: 1e-12,
            seed: 0,
            init_strategy: InitStrategy::CenteredCircle,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.tol_residual) {
            return Err(Error::InvalidConfig("tol_residual must be positive".into()));
        }
        if !positive(self.tol_step) {
            return Err(Error::InvalidConfig("tol_step must be positive".into()));
        }
        if !positive(self.collision_delta) {
            return Err(Error::InvalidConfig(
                "collision_delta must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    ResidualMet,
    StepMet,
    MaxIterReached,
    Stagnated,
    Singular,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::ResidualMet => "ResidualMet",
            Termination::StepMet => "StepMet",
            Termination::MaxIterReached => "MaxIterReached",
            Termination::Stagnated => "Stagnated",
            Termination::Singular => "Singular",
        }
    }

    /// Residual or step tolerance reached.
    pub fn converged(&self) -> bool {
        matches!(self, Termination::ResidualMet | Termination::StepMet)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub approximations: Vec<Complex64>,
    /// `max_i |f(z_i)|`.
    pub max_residual: f64,
    /// `max_i |z_i^(k) - z_i^(k-1)|`; absent for the starting vector.
    pub max_step: Option<f64>,
    /// Largest distance to the greedily matched reference root.
    pub max_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub method: MethodSpec,
    pub per_iteration: Vec<IterationRecord>,
    pub termination: Termination,
    /// Flags of the last sweep; all `Updated` when no sweep ran.
    pub last_flags: Vec<CoordFlag>,
}

impl IterationTrace {
    pub fn last(&self) -> &IterationRecord {
        self.per_iteration.last().expect("trace is never empty")
    }

    /// Number of sweeps performed.
    pub fn iterations(&self) -> usize {
        self.last().iteration
    }

    pub fn final_approximations(&self) -> &[Complex64] {
        &self.last().approximations
    }

    pub fn errors(&self) -> Vec<f64> {
        self.per_iteration
            .iter()
            .filter_map(|r| r.max_error)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub order: f64,
    /// Number of `(e_k, e_{k+1})` pairs in the fit.
    pub points_used: usize,
    /// RMS residual of the log-log fit.
    pub residual_fit_error: f64,
    /// False when fewer than two pairs were available.
    pub reliable: bool,
}

/// Starting points `c + r exp(i θ_k)`, `θ_k = 2πk/n + π/(2n)`, with `c` the
/// root centroid and `r` the Cauchy bound. The angular offset keeps the points
/// off the real axis so real polynomials do not start in a symmetric trap.
pub fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree();
    let centre = p.root_centroid();
    let radius = p.root_bound();
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + PI / (2.0 * n as f64);
            centre + Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn max_residual(p: &Polynomial, z: &[Complex64]) -> f64 {
    z.iter().map(|&w| p.eval(w).norm()).fold(0.0, f64::max)
}

/// Greedy nearest-neighbour matching of estimates to reference roots; returns
/// the largest matched distance.
pub fn matched_error(estimates: &[Complex64], reference: &[Complex64]) -> f64 {
    let mut claimed = vec![false; reference.len()];
    let mut worst = 0.0f64;
    for &z in estimates {
        let best = reference
            .iter()
            .enumerate()
            .filter(|(j, _)| !claimed[*j])
            .map(|(j, &r)| (j, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, d)) = best {
            claimed[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Iterates `method` from `init` until a stopping rule fires.
///
/// Stops on `max |f(z_i)| <= tol_residual`, `max |Δz_i| <= tol_step`, after
/// `max_iter` sweeps, when the step size has not decreased for
/// [`STAGNATION_SWEEPS`] sweeps, or when a sweep makes no progress because
/// every coordinate it could move hit a singular denominator.
///
/// The residual test is absolute, so polynomials with large roots (and hence
/// large `|f|` near them) may need a looser `tol_residual`.
pub fn run(
    method: MethodSpec,
    p: &Polynomial,
    init: &[Complex64],
    cfg: &SolveConfig,
    reference: Option<&[Complex64]>,
) -> Result<IterationTrace> {
    cfg.validate()?;
    let n = p.degree();
    if init.len() != n {
        return Err(Error::DegenerateInput(format!(
            "initial vector has length {}, degree is {n}",
            init.len()
        )));
    }
    if init.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::DegenerateInput(
            "initial vector is not finite".into(),
        ));
    }
    if let Some(r) = reference {
        if r.len() != n {
            return Err(Error::DegenerateInput(format!(
                "reference has {} roots, degree is {n}",
                r.len()
            )));
        }
    }
    let stepper = Stepper::new(method, n)?;

    let residual0 = max_residual(p, init);
    if !residual0.is_finite() {
        return Err(Error::NumericOverflow("evaluating the initial residual"));
    }
    let mut trace = IterationTrace {
        method,
        per_iteration: vec![IterationRecord {
            iteration: 0,
            approximations: init.to_vec(),
            max_residual: residual0,
            max_step: None,
            max_error: reference.map(|r| matched_error(init, r)),
        }],
        termination: Termination::MaxIterReached,
        last_flags: vec![CoordFlag::Updated; n],
    };
    if residual0 <= cfg.tol_residual {
        trace.termination = Termination::ResidualMet;
        return Ok(trace);
    }

    let mut z = init.to_vec();
    let mut prev_step: Option<f64> = None;
    let mut no_decrease = 0usize;
    for k in 1..=cfg.max_iter {
        let params = StepParams {
            collision_delta: cfg.collision_delta,
            seed: cfg.seed,
            sweep: k as u64,
        };
        let out = stepper.step(p, &z, &params)?;
        let moved = out
            .flags
            .iter()
            .any(|f| matches!(f, CoordFlag::Updated | CoordFlag::CollisionPerturbed));
        trace.last_flags = out.flags.clone();
        if !moved && out.count(CoordFlag::SingularDenominator) > 0 {
            trace.termination = Termination::Singular;
            return Ok(trace);
        }
        let residual = max_residual(p, &out.next);
        let step = z
            .iter()
            .zip(&out.next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if !residual.is_finite() || !step.is_finite() {
            trace.termination = Termination::Singular;
            return Ok(trace);
        }
        trace.per_iteration.push(IterationRecord {
            iteration: k,
            approximations: out.next.clone(),
            max_residual: residual,
            max_step: Some(step),
            max_error: reference.map(|r| matched_error(&out.next, r)),
        });
        z = out.next;

        if residual <= cfg.tol_residual {
            trace.termination = Termination::ResidualMet;
            return Ok(trace);
        }
        if step <= cfg.tol_step {
            trace.termination = Termination::StepMet;
            return Ok(trace);
        }
        if let Some(prev) = prev_step {
            if step >= prev {
                no_decrease += 1;
            } else {
                no_decrease = 0;
            }
        }
        prev_step = Some(step);
        if no_decrease >= STAGNATION_SWEEPS {
            trace.termination = Termination::Stagnated;
            return Ok(trace);
        }
    }
    trace.termination = Termination::MaxIterReached;
    Ok(trace)
}

/// `run` from the centred-circle starting vector.
pub fn solve(
    method: MethodSpec,
    p: &Polynomial,
    cfg: &SolveConfig,
    reference: Option<&[Complex64]>,
) -> Result<IterationTrace> {
    run(method, p, &initial_guesses(p), cfg, reference)
}

/// Fits `log e_{k+1} = order · log e_k + c` by least squares over the
/// consecutive pairs with both errors inside
/// `(ORDER_WINDOW_FLOOR, ORDER_WINDOW_CAP]`, stopping at the first pair that
/// does not decrease (the rounding floor has been reached).
///
/// The cap is closed, with a `1e-9` relative allowance, so that a start
/// perturbed by exactly `ORDER_WINDOW_CAP` counts despite rounding.
///
/// With a single pair the slope through the origin is returned and the
/// estimate is marked unreliable.
pub fn estimate_order_from_errors(errors: &[f64]) -> Result<OrderEstimate> {
    estimate_order_in_window(errors, ORDER_WINDOW_FLOOR, ORDER_WINDOW_CAP)
}

/// As [`estimate_order_from_errors`] with an explicit window `(floor, cap]`.
pub fn estimate_order_in_window(errors: &[f64], floor: f64, cap: f64) -> Result<OrderEstimate> {
    let cap = cap * (1.0 + 1e-9);
    let usable = |e: f64| e > floor && e <= cap;
    // first run of consecutive contracting pairs inside the window; once the
    // error stops decreasing it is rounding noise, not convergence
    let pairs: Vec<(f64, f64)> = errors
        .windows(2)
        .map(|w| (w[0], w[1]))
        .skip_while(|&(a, b)| !(usable(a) && usable(b) && b < a))
        .take_while(|&(a, b)| usable(a) && usable(b) && b < a)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    match pairs.len() {
        0 => Err(Error::UnreliableEstimate(
            "no consecutive errors inside the fitting window".into(),
        )),
        1 => Ok(OrderEstimate {
            order: pairs[0].1 / pairs[0].0,
            points_used: 1,
            residual_fit_error: 0.0,
            reliable: false,
        }),
        len => {
            let count = len as f64;
            let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / count;
            let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / count;
            let sxx: f64 = pairs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
            let sxy: f64 = pairs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
            if sxx == 0.0 {
                return Err(Error::UnreliableEstimate("errors do not change".into()));
            }
            let slope = sxy / sxx;
            let intercept = mean_y - slope * mean_x;
            let rms = (pairs
                .iter()
                .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
                .sum::<f64>()
                / count)
                .sqrt();
            Ok(OrderEstimate {
                order: slope,
                points_used: len,
                residual_fit_error: rms,
                reliable: true,
            })
        }
    }
}

/// Order estimate from the `max_error` column of a trace.
pub fn estimate_order(trace: &IterationTrace) -> Result<OrderEstimate> {
    let errors = trace.errors();
    if errors.is_empty() {
        return Err(Error::UnreliableEstimate(
            "trace has no reference errors".into(),
        ));
    }
    estimate_order_from_errors(&errors)
}

/// Errors if two reference roots coincide (within `1e-12` relative).
pub fn check_distinct(roots: &[Complex64]) -> Result<()> {
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            if (a - b).norm() <= 1e-12 * a.norm().max(b.norm()).max(1.0) {
                return Err(Error::DegenerateInput(format!(
                    "reference roots are not distinct ({a} repeated)"
                )));
            }
        }
    }
    Ok(())
}

/// One line of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub method: MethodSpec,
    pub iterations: Option<usize>,
    pub final_residual: Option<f64>,
    pub estimated_order: Option<f64>,
    pub order_reliable: bool,
    pub termination: Option<Termination>,
    /// Set when the run itself (not just the order fit) failed.
    pub error: Option<String>,
}

/// Perturbs every exact root by `init_error` in a seeded random direction,
/// runs each method from that common start and tabulates the outcome.
pub fn convergence_study(
    p: &Polynomial,
    roots: &[Complex64],
    methods: &[MethodSpec],
    cfg: &SolveConfig,
    init_error: f64,
    seed: u64,
) -> Result<Vec<StudyRow>> {
    if roots.len() != p.degree() {
        return Err(Error::DegenerateInput(format!(
            "expected {} reference roots, got {}",
            p.degree(),
            roots.len()
        )));
    }
    check_distinct(roots)?;
    if !(init_error > 0.0 && init_error.is_finite()) {
        return Err(Error::InvalidConfig("init_error must be positive".into()));
    }
    let init = perturbed_start(roots, init_error, seed);
    Ok(methods
        .iter()
        .map(|&method| match run(method, p, &init, cfg, Some(roots)) {
            Ok(trace) => {
                let order = estimate_order(&trace).ok();
                StudyRow {
                    method,
                    iterations: Some(trace.iterations()),
                    final_residual: Some(trace.last().max_residual),
                    estimated_order: order.map(|o| o.order),
                    order_reliable: order.is_some_and(|o| o.reliable),
                    termination: Some(trace.termination),
                    error: None,
                }
            }
            Err(e) => StudyRow {
                method,
                iterations: None,
                final_residual: None,
                estimated_order: None,
                order_reliable: false,
                termination: None,
                error: Some(e.to_string()),
            },
        })
        .collect())
}

/// `λ_j + init_error · u_j` with seeded unit complex `u_j`.
pub fn perturbed_start(roots: &[Complex64], init_error: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    roots
        .iter()
        .map(|&r| r + Complex64::from_polar(init_error, rng.gen_range(0.0..2.0 * PI)))
        .collect()
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

    #[test]
    fn initial_guesses_on_circle() {
        let p = Polynomial::from_roots(&reals(&[1.0, -1.0])).unwrap();
        let g = initial_guesses(&p);
        assert!((g[0] - Complex64::from_polar(2.0, PI / 4.0)).norm() < 1e-15);
        assert!((g[1] - Complex64::from_polar(2.0, 5.0 * PI / 4.0)).norm() < 1e-15);

        let lin = Polynomial::from_coefficients(&reals(&[-3.0, 1.0])).unwrap();
        let g = initial_guesses(&lin);
        assert_eq!(g.len(), 1);
        assert!((g[0] - c(3.0, 4.0)).norm() < 1e-15);

        // centroid 1: roots 0, 1, 2
        let q = Polynomial::from_roots(&reals(&[0.0, 1.0, 2.0])).unwrap();
        let centre = initial_guesses(&q).iter().sum::<Complex64>() / 3.0;
        assert!((centre - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dk_converges_on_quadratic() {
        let p = Polynomial::from_roots(&reals(&[1.0, -1.0])).unwrap();
        let cfg = SolveConfig::default();
        let trace = run(
            MethodSpec::DurandKerner,
            &p,
            &[c(2.0, 0.1), c(-2.0, -0.1)],
            &cfg,
            None,
        )
        .unwrap();
        assert_eq!(trace.termination, Termination::ResidualMet);
        assert!(matched_error(trace.final_approximations(), &reals(&[1.0, -1.0])) < 1e-10);
    }

    #[test]
    fn exact_start_terminates_immediately() {
        let p = Polynomial::from_roots(&reals(&[1.0, -1.0, 0.5])).unwrap();
        let trace = run(
            MethodSpec::Aberth,
            &p,
            &reals(&[1.0, -1.0, 0.5]),
            &SolveConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(trace.termination, Termination::ResidualMet);
        assert!(trace.iterations() <= 1);
    }

    #[test]
    fn config_validation() {
        let bad = SolveConfig {
            max_iter: 0,
            ..SolveConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolveConfig {
            tol_residual: 0.0,
            ..SolveConfig::default()
        };
        assert!(bad.validate().is_err());
        let p = Polynomial::from_roots(&reals(&[1.0, -1.0])).unwrap();
        let cfg = SolveConfig {
            max_iter: 0,
            ..SolveConfig::default()
        };
        assert!(run(
            MethodSpec::DurandKerner,
            &p,
            &reals(&[2.0, 3.0]),
            &cfg,
            None
        )
        .is_err());
        assert!(run(
            MethodSpec::DurandKerner,
            &p,
            &reals(&[2.0]),
            &SolveConfig::default(),
            None
        )
        .is_err());
    }

    #[test]
    fn synthetic_orders() {
        // pure sequences e_k = 10^{-a p^k}; no rounding floor, so fit over (0, 1)
        let quad: Vec<f64> = (0..5).map(|k| 10f64.powf(-2.0 * 2f64.powi(k))).collect();
        let est = estimate_order_in_window(&quad, 0.0, 1.0).unwrap();
        assert!(est.reliable);
        assert!((est.order - 2.0).abs() < 0.01);

        let cubic: Vec<f64> = (0..4).map(|k| 10f64.powf(-1.5 * 3f64.powi(k))).collect();
        let est = estimate_order_in_window(&cubic, 0.0, 1.0).unwrap();
        assert!((est.order - 3.0).abs() < 0.01);

        // the default window keeps 1e-2, 1e-4, 1e-8
        let est = estimate_order_from_errors(&quad).unwrap();
        assert_eq!(est.points_used, 2);
        assert!((est.order - 2.0).abs() < 0.01);
        // only 10^-4.5 is inside
        assert!(estimate_order_from_errors(&cubic).is_err());
    }

    #[test]
    fn order_needs_points() {
        assert!(estimate_order_from_errors(&[1.0, 0.5]).is_err());
        assert!(estimate_order_from_errors(&[2e-2, 1e-14]).is_err());
        assert!(estimate_order_from_errors(&[]).is_err());
        let est = estimate_order_from_errors(&[1e-3, 1e-6]).unwrap();
        assert!(!est.reliable);
        assert_eq!(est.points_used, 1);
    }

    #[test]
    fn order_fit_stops_at_the_noise_floor() {
        let errors = [1e-2, 1e-3, 1e-5, 1e-9, 2e-9, 1.5e-9, 1.8e-9];
        let est = estimate_order_from_errors(&errors).unwrap();
        assert_eq!(est.points_used, 3);
        assert!((est.order - 2.0).abs() < 1e-9, "{est:?}");
        // growth before the window is skipped, not fatal
        let est = estimate_order_from_errors(&[0.5, 0.9, 5e-3, 2.5e-5, 6.25e-10]).unwrap();
        assert_eq!(est.points_used, 2);
        assert!((est.order - 2.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn greedy_matching() {
        let refs = reals(&[0.0, 1.0]);
        assert!((matched_error(&reals(&[0.1, 0.9]), &refs) - 0.1).abs() < 1e-15);
        // both near 0: the second must take the far root
        assert!((matched_error(&reals(&[0.1, 0.2]), &refs) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn study_rejects_repeated_roots() {
        let p = Polynomial::from_roots(&reals(&[1.0, 1.0, 1.0])).unwrap();
        let err = convergence_study(
            &p,
            &reals(&[1.0, 1.0, 1.0]),
            &[MethodSpec::Aberth],
            &SolveConfig::default(),
            1e-2,
            0,
        );
        assert!(matches!(err, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn study_with_no_methods_is_empty() {
        let roots = reals(&[1.0, -1.0, 2.0]);
        let p = Polynomial::from_roots(&roots).unwrap();
        let rows = convergence_study(&p, &roots, &[], &SolveConfig::default(), 1e-2, 0).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn study_reports_bad_method_in_row() {
        let roots = reals(&[1.0, -1.0, 2.0]);
        let p = Polynomial::from_roots(&roots).unwrap();
        let rows = convergence_study(
            &p,
            &roots,
            &[MethodSpec::WeierstrassLinear(5), MethodSpec::Aberth],
            &SolveConfig::default(),
            1e-2,
            0,
        )
        .unwrap();
        assert!(rows[0].error.is_some());
        assert_eq!(rows[1].termination, Some(Termination::ResidualMet));
    }
}
