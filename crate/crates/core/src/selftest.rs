//! Seeded identity suites that cross-check the symbolic machinery and the
//! iteration formulas against the brute-force oracles.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::oracle::{elementary_symmetric_direct, homogeneous_direct, power_sum_direct};
use crate::poly::Polynomial;
use crate::step::{self, MethodSpec, StepParams};
use crate::symmetric::{
    eval_c_mi, eval_h, eval_v_m, lagged_sums, partition_table, power_sum_in_elementary,
    DEFAULT_COLLISION_DELTA,
};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Worst relative deviation seen (0 for exact checks).
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            max_error: 0.0,
            tolerance,
            passed: true,
            detail: None,
        }
    }

    fn record(&mut self, err: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        if err.is_nan() || err > self.tolerance {
            if self.passed {
                self.detail = Some(what());
            }
            self.passed = false;
        }
        if err > self.max_error || err.is_nan() {
            self.max_error = err;
        }
    }

    fn fail(&mut self, what: String) {
        self.cases += 1;
        if self.passed {
            self.detail = Some(what);
        }
        self.passed = false;
    }
}

/// `|a - b| / |b|`, with `|b|` floored at the smallest normal.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the disk of radius `r`.
pub fn random_in_disk<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    let rho = r * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `n` points in the disk of radius `max_modulus` with pairwise distance at
/// least `min_sep`, by rejection sampling.
pub fn random_separated_roots<R: Rng>(
    rng: &mut R,
    n: usize,
    max_modulus: f64,
    min_sep: f64,
) -> Vec<Complex64> {
    'restart: loop {
        let mut roots: Vec<Complex64> = Vec::with_capacity(n);
        let mut tries = 0;
        while roots.len() < n {
            tries += 1;
            if tries > 10_000 {
                continue 'restart;
            }
            let cand = random_in_disk(rng, max_modulus);
            if roots.iter().all(|r| (r - cand).norm() >= min_sep) {
                roots.push(cand);
            }
        }
        return roots;
    }
}

/// Point in the disk of radius `radius` at distance at least `min_dist` from
/// every root.
pub fn random_point_away<R: Rng>(
    rng: &mut R,
    roots: &[Complex64],
    radius: f64,
    min_dist: f64,
) -> Complex64 {
    loop {
        let z = random_in_disk(rng, radius);
        if roots.iter().all(|r| (z - r).norm() >= min_dist) {
            return z;
        }
    }
}

/// Smallest pairwise distance.
pub fn separation(points: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

fn reciprocal_shifts(z: Complex64, roots: &[Complex64]) -> Vec<Complex64> {
    roots.iter().map(|r| (z - r).inv()).collect()
}

/// `f^{(k)}(z) / (k! f(z)) = e_k(1/(z - λ_1), …)` for all `0 <= k <= n`.
pub fn lemma_suite(seed: u64, polys: usize, points: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("lemma: derivative ratios vs elementary symmetric", 1e-9);
    let mut rng = rng(seed);
    for _ in 0..polys {
        let n = rng.gen_range(1..=8);
        let roots = random_separated_roots(&mut rng, n, 4.0, 0.5);
        let p = Polynomial::from_roots(&roots)?;
        for _ in 0..points {
            let z = random_point_away(&mut rng, &roots, 5.0, 0.1);
            let taylor = p.taylor_coefficients(z, n)?;
            let x = reciprocal_shifts(z, &roots);
            for k in 0..=n {
                let got = taylor[k] / taylor[0];
                let want = elementary_symmetric_direct(&x, k)?;
                rep.record(rel_err(got, want), || {
                    format!("n={n} k={k} z={z}: {got} vs {want}")
                });
            }
        }
    }
    Ok(rep)
}

/// Newton's identities: `u_m(e_1(x), …) = p_m(x)`.
pub fn newton_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("newton identities: u_m(e) vs power sums", 1e-10);
    let mut rng = rng(seed ^ 0x4e57);
    let tables: Vec<_> = (1..=8)
        .map(power_sum_in_elementary)
        .collect::<Result<_>>()?;
    for _ in 0..cases {
        let n = rng.gen_range(1..=8);
        let x: Vec<Complex64> = (0..n).map(|_| random_in_disk(&mut rng, 2.0)).collect();
        let e: Vec<Complex64> = (1..=n)
            .map(|k| elementary_symmetric_direct(&x, k))
            .collect::<Result<_>>()?;
        for (m, u) in (1..=8).zip(&tables) {
            let got = u.eval(&e);
            let want = power_sum_direct(&x, m as u32);
            // relative error is only meaningful while the expansion is
            // reasonably conditioned; past 1e5 judge against the term scale
            let err = (got - want).norm() / want.norm().max(1e-5 * u.magnitude(&e));
            rep.record(err, || format!("n={n} m={m}: {got} vs {want}"));
        }
    }
    Ok(rep)
}

/// `H_d` from the partition table equals `d! h_d` of the reciprocal shifts.
pub fn homogeneous_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("homogeneous expansion: H_d vs d! h_d", 1e-10);
    let mut rng = rng(seed ^ 0x4844);
    for _ in 0..cases {
        let count = rng.gen_range(0..=5);
        let others: Vec<Complex64> = (0..count).map(|_| random_in_disk(&mut rng, 3.0)).collect();
        let z = random_point_away(&mut rng, &others, 4.0, 0.2);
        let x = reciprocal_shifts(z, &others);
        let sums = lagged_sums(z, &others, 5, DEFAULT_COLLISION_DELTA)?;
        let mut d_fact = 1.0;
        for d in 1..=5 {
            d_fact *= d as f64;
            let got = eval_h(d, &sums)?;
            let want = homogeneous_direct(&x, d)? * d_fact;
            let err = if want == Complex64::new(0.0, 0.0) {
                got.norm()
            } else {
                rel_err(got, want)
            };
            rep.record(err, || format!("count={count} d={d}: {got} vs {want}"));
        }
    }
    Ok(rep)
}

/// Exact symbolic tables: `u_1..u_3` and `H_2..H_4`.
pub fn tables_suite() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("symbolic tables: u_1..u_3, H_2..H_4", 0.0);
    let u_expected: [&[(&[u32], i128)]; 3] = [
        &[(&[1], 1)],
        &[(&[2, 0], 1), (&[0, 1], -2)],
        &[(&[3, 0, 0], 1), (&[1, 1, 0], -3), (&[0, 0, 1], 3)],
    ];
    for (m, expected) in (1..=3).zip(u_expected) {
        let u = power_sum_in_elementary(m)?;
        let ok = u.len() == expected.len() && expected.iter().all(|(e, c)| u.coefficient(e) == *c);
        if ok {
            rep.record(0.0, String::new);
        } else {
            rep.fail(format!("u_{m} = {u:?}"));
        }
    }
    let h_expected: [&[(&[u32], u128)]; 3] = [
        &[(&[0, 1], 1), (&[2, 0], 1)],
        &[(&[0, 0, 1], 2), (&[1, 1, 0], 3), (&[3, 0, 0], 1)],
        &[
            (&[0, 0, 0, 1], 6),
            (&[1, 0, 1, 0], 8),
            (&[0, 2, 0, 0], 3),
            (&[2, 1, 0, 0], 6),
            (&[4, 0, 0, 0], 1),
        ],
    ];
    for (d, expected) in (2..=4).zip(h_expected) {
        let t = partition_table(d)?;
        let got: Vec<(&[u32], u128)> = t
            .terms()
            .iter()
            .map(|term| (term.multiplicities.as_slice(), term.weight))
            .collect();
        if got == expected {
            rep.record(0.0, String::new);
        } else {
            rep.fail(format!("H_{d} table {got:?}"));
        }
    }
    Ok(rep)
}

/// `c_{m;i}` against the direct elementary symmetric polynomial of the
/// shifted values, plus the closed forms for `m = 0, 1, 2`.
pub fn c_mi_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "c_m;i: general formula vs e_m(z - w_j) and closed forms",
        1e-10,
    );
    let mut rng = rng(seed ^ 0x636d);
    for _ in 0..cases {
        let n = rng.gen_range(2..=8);
        let roots = random_separated_roots(&mut rng, n, 4.0, 0.5);
        let i = rng.gen_range(0..n);
        let others: Vec<Complex64> = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &w)| w)
            .collect();
        let z = random_point_away(&mut rng, &roots, 5.0, 0.1);
        let shifted: Vec<Complex64> = others.iter().map(|w| z - w).collect();
        for m in 0..n {
            let got = eval_c_mi(z, &others, m)?;
            let want = elementary_symmetric_direct(&shifted, m)?;
            let scale = elementary_symmetric_direct(
                &shifted
                    .iter()
                    .map(|v| Complex64::new(v.norm(), 0.0))
                    .collect::<Vec<_>>(),
                m,
            )?
            .norm();
            let err = (got - want).norm() / want.norm().max(1e-3 * scale);
            rep.record(err, || format!("n={n} m={m}: {got} vs {want}"));
        }
        let nf = n as f64;
        let b1: Complex64 = others.iter().sum();
        let b2: Complex64 = others.iter().map(|w| w * w).sum();
        let closed = [
            Complex64::new(1.0, 0.0),
            (nf - 1.0) * z - b1,
            (nf - 1.0) * (nf - 2.0) * z * z / 2.0 - (nf - 2.0) * b1 * z + (b1 * b1 - b2) / 2.0,
        ];
        for (m, want) in closed.iter().enumerate().take(n) {
            let got = eval_c_mi(z, &others, m)?;
            rep.record(rel_err(got, *want), || {
                format!("closed form m={m}: {got} vs {want}")
            });
        }
    }
    Ok(rep)
}

/// `v_m(z) = f(z) e_{n-m}(1/(z - λ_j))` and `e_k = q e_{k-1;i} + e_{k;i}`.
pub fn weierstrass_identities_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("v_m and exclusion identities", 1e-9);
    let mut rng = rng(seed ^ 0x766d);
    for _ in 0..cases {
        let n = rng.gen_range(2..=8);
        let roots = random_separated_roots(&mut rng, n, 4.0, 0.5);
        let p = Polynomial::from_roots(&roots)?;
        let z = random_point_away(&mut rng, &roots, 5.0, 0.1);
        let x = reciprocal_shifts(z, &roots);
        let f = p.eval(z);
        for m in 1..=n {
            let got = eval_v_m(&p, z, m)?;
            let want = f * elementary_symmetric_direct(&x, n - m)?;
            rep.record(rel_err(got, want), || {
                format!("v_{m}, n={n}: {got} vs {want}")
            });
        }
        let i = rng.gen_range(0..n);
        let q = x[i];
        let rest: Vec<Complex64> = x
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        let e_rest = |k: usize| {
            if k > rest.len() {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                elementary_symmetric_direct(&rest, k)
            }
        };
        for k in 1..=n {
            let lhs = elementary_symmetric_direct(&x, k)?;
            let rhs = q * e_rest(k - 1)? + e_rest(k)?;
            rep.record(rel_err(rhs, lhs), || {
                format!("exclusion k={k}: {rhs} vs {lhs}")
            });
        }
    }
    Ok(rep)
}

/// A random approximation state: distinct roots, approximations near them.
pub fn random_state<R: Rng>(rng: &mut R) -> Result<(Polynomial, Vec<Complex64>)> {
    let n = rng.gen_range(2..=7);
    let roots = random_separated_roots(rng, n, 3.0, 0.5);
    let p = Polynomial::from_roots(&roots)?;
    let z: Vec<Complex64> = roots
        .iter()
        .map(|&r| r + random_in_disk(rng, 0.15))
        .collect();
    Ok((p, z))
}

/// Coordinatewise relative deviation between two methods' sweeps.
pub fn sweep_deviation(
    a: MethodSpec,
    b: MethodSpec,
    p: &Polynomial,
    z: &[Complex64],
) -> Result<f64> {
    let params = StepParams::default();
    let x = step::step(a, p, z, &params)?;
    let y = step::step(b, p, z, &params)?;
    Ok(x.next
        .iter()
        .zip(&y.next)
        .map(|(u, v)| rel_err(*u, *v))
        .fold(0.0, f64::max))
}

/// The reductions `mroot(1) = aberth = householder(1)`,
/// `mroot(2) = gargantini` and `householder(2) = explicit Halley`.
pub fn reductions_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("reduction identities between methods", 1e-12);
    let mut rng = rng(seed ^ 0x7265);
    let params = StepParams::default();
    for _ in 0..cases {
        let (p, z) = random_state(&mut rng)?;
        let pairs = [
            (MethodSpec::MthRoot(1), MethodSpec::Aberth),
            (MethodSpec::Householder(1), MethodSpec::Aberth),
            (MethodSpec::MthRoot(2), MethodSpec::Gargantini),
        ];
        for (a, b) in pairs {
            let err = sweep_deviation(a, b, &p, &z)?;
            rep.record(err, || format!("{a} vs {b} at {z:?}"));
        }
        let h = step::householder_step(&p, &z, 2, &params)?;
        let explicit = step::halley_explicit_step(&p, &z, &params)?;
        let err = h
            .next
            .iter()
            .zip(&explicit.next)
            .map(|(u, v)| rel_err(*u, *v))
            .fold(0.0, f64::max);
        rep.record(err, || format!("householder:2 vs explicit Halley at {z:?}"));
    }
    Ok(rep)
}

/// Every suite with its default size.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        lemma_suite(seed, 200, 5)?,
        newton_suite(seed, 200)?,
        homogeneous_suite(seed, 200)?,
        tables_suite()?,
        c_mi_suite(seed, 200)?,
        weierstrass_identities_suite(seed, 200)?,
        reductions_suite(seed, 100)?,
    ])
}
