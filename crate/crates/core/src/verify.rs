//! Named verification suites: each runs a fixed set of checks and reports one
//! row per check. Reports depend only on the options, never on scheduling.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{euler_phi, gcd, rad, ramanujan_c, ramanujan_c_direct, rational, Rational};
use crate::calibration::{check_suite, CalibrationFixture, Suite, CORPUS_SIZE};
use crate::congruence::{
    count_n, count_n_brute, count_n_star, heath_brown_bound, heath_brown_count, main_term_d, ClosedSum,
    CongruenceInstance, DirectSum, IntegerRange, PrimitiveVectorQuery, RegionS,
};
use crate::density::{
    alpha_volume, euler_product_omega_h, g1, g2, g2_estimate, h, local_factor_closed, local_factor_theta,
    omega_infinity, t_max, Polytope, QuadratureConfig,
};
use crate::error::{Error, Result};
use crate::torsor::{bijection_check, fiber_count_total, torsor_count};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifySuite {
    Lemma1,
    Lemma2,
    Lemma4,
    Lemma5,
    Lemma6,
    Lemma8,
    Lemma9,
    Lemma10,
    Torsor,
    Local,
}

impl VerifySuite {
    pub const ALL: [VerifySuite; 10] = [
        VerifySuite::Lemma1,
        VerifySuite::Lemma2,
        VerifySuite::Lemma4,
        VerifySuite::Lemma5,
        VerifySuite::Lemma6,
        VerifySuite::Lemma8,
        VerifySuite::Lemma9,
        VerifySuite::Lemma10,
        VerifySuite::Torsor,
        VerifySuite::Local,
    ];

    pub fn id(self) -> &'static str {
        match self {
            VerifySuite::Lemma1 => "lemma1",
            VerifySuite::Lemma2 => "lemma2",
            VerifySuite::Lemma4 => "lemma4",
            VerifySuite::Lemma5 => "lemma5",
            VerifySuite::Lemma6 => "lemma6",
            VerifySuite::Lemma8 => "lemma8",
            VerifySuite::Lemma9 => "lemma9",
            VerifySuite::Lemma10 => "lemma10",
            VerifySuite::Torsor => "torsor",
            VerifySuite::Local => "local",
        }
    }

    /// Resolves a suite id; `all` expands to every suite.
    pub fn parse(id: &str) -> Result<Vec<VerifySuite>> {
        if id == "all" {
            return Ok(Self::ALL.to_vec());
        }
        Self::ALL
            .into_iter()
            .find(|s| s.id() == id)
            .map(|s| vec![s])
            .ok_or_else(|| {
                let ids: Vec<&str> = Self::ALL.iter().map(|s| s.id()).collect();
                Error::OutOfRange(format!("unknown suite {id:?}; expected one of {}, all", ids.join(", ")))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Height for the torsor suite.
    pub height: u64,
    pub quad: QuadratureConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 42, height: 100, quad: QuadratureConfig::default() }
    }
}

/// One check: `value` is compared with `limit` as described by `detail`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl CheckRow {
    fn at_most(suite: VerifySuite, check: &'static str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        CheckRow { suite: suite.id(), check, passed: value <= limit, value, limit, detail: detail.into() }
    }

    fn failures(suite: VerifySuite, check: &'static str, failures: u64, detail: impl Into<String>) -> Self {
        Self::at_most(suite, check, failures as f64, 0.0, detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

pub fn run_suites(suites: &[VerifySuite], opts: &VerifyOptions) -> Result<VerifyReport> {
    opts.quad.validate()?;
    let mut rows = Vec::new();
    for &s in suites {
        rows.extend(run_suite(s, opts)?);
    }
    Ok(VerifyReport { rows })
}

pub fn run_suite(suite: VerifySuite, opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (suite as u64) << 40);
    match suite {
        VerifySuite::Lemma1 => Ok(vec![exp_sum_identity(40)?, ramanujan_formula(100, 100)]),
        VerifySuite::Lemma2 => {
            let (avg, fast) = averaging_identity(&mut rng, 50, 30)?;
            Ok(vec![avg, fast, calibrated(suite, Suite::Lemma2, opts.seed)?])
        }
        VerifySuite::Lemma4 => Ok(vec![calibrated(suite, Suite::Lemma4, opts.seed)?]),
        VerifySuite::Lemma5 => g_bounds(&opts.quad),
        VerifySuite::Lemma6 => {
            let mut rows = main_term_checks(&mut rng, &opts.quad)?;
            rows.push(calibrated(suite, Suite::Lemma7, opts.seed)?);
            Ok(rows)
        }
        VerifySuite::Lemma8 => Ok(vec![heath_brown(&mut rng, 1000)?]),
        VerifySuite::Lemma9 => Ok(vec![calibrated(suite, Suite::Lemma9, opts.seed)?]),
        VerifySuite::Lemma10 => Ok(vec![calibrated(suite, Suite::Lemma10, opts.seed)?]),
        VerifySuite::Torsor => torsor_checks(opts.height),
        VerifySuite::Local => local_checks(),
    }
}

fn calibrated(suite: VerifySuite, cal: Suite, seed: u64) -> Result<CheckRow> {
    let fixture = CalibrationFixture::checked_in();
    let c = check_suite(cal, &fixture, seed, CORPUS_SIZE)?;
    Ok(CheckRow {
        suite: suite.id(),
        check: "calibrated_ratio",
        passed: c.passed,
        value: c.max_ratio,
        limit: crate::calibration::SLACK * c.calibrated,
        detail: format!("{} instances of {}, calibrated constant {:e}", CORPUS_SIZE, cal.id(), c.calibrated),
    })
}

/// Largest `|closed - direct|` over every valid instance with `q <= qmax`,
/// `|a_i| <= q` and every `(r, s)` in `[1, q]^2`.
pub fn exp_sum_identity(qmax: u64) -> Result<CheckRow> {
    let instances: Vec<CongruenceInstance> = (1..=qmax).flat_map(CongruenceInstance::all_for_modulus).collect();
    let worst = instances
        .par_iter()
        .map(|inst| {
            let direct = DirectSum::new(inst);
            let closed = ClosedSum::new(inst)?;
            let q = inst.q() as i64;
            let mut worst = 0.0f64;
            for r in 1..=q {
                for s in 1..=q {
                    worst = worst.max((closed.eval(r, s)? - direct.eval(r, s)).norm());
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(CheckRow::at_most(
        VerifySuite::Lemma1,
        "closed_form_vs_direct_sum",
        worst,
        1e-8,
        format!("max deviation over {} instances with q <= {qmax}", instances.len()),
    ))
}

/// Divisor-sum Ramanujan sums against the exponential sums, as integers.
pub fn ramanujan_formula(qmax: u64, nmax: i64) -> CheckRow {
    let mismatches: u64 = (1..=qmax)
        .into_par_iter()
        .map(|q| {
            (-nmax..=nmax)
                .filter(|&n| {
                    let z = ramanujan_c_direct(q, n);
                    let k = z.re.round();
                    !((z - num_complex::Complex64::new(k, 0.0)).norm() < 1e-6 && k as i64 == ramanujan_c(q, n))
                })
                .count() as u64
        })
        .sum();
    CheckRow::failures(
        VerifySuite::Lemma1,
        "ramanujan_divisor_sum",
        mismatches,
        format!("mismatches over q <= {qmax}, |n| <= {nmax}"),
    )
}

fn random_range(rng: &mut ChaCha8Rng) -> Result<IntegerRange> {
    let lo = rng.gen_range(-40.0..40.0);
    let hi = lo + rng.gen_range(0.0..60.0);
    IntegerRange::new(lo, hi, rng.gen_bool(0.5), rng.gen_bool(0.5))
}

fn random_unit(rng: &mut ChaCha8Rng, q: u64) -> i64 {
    loop {
        let a: i64 = rng.gen_range(-(q as i64)..=q as i64);
        if a != 0 && gcd(a.unsigned_abs(), q) == 1 {
            return a;
        }
    }
}

/// Summing `N` over all unit `a2` gives `phi(q) N*`, exactly; also checks the
/// fast count against the literal double loop on the same instances.
pub fn averaging_identity(rng: &mut ChaCha8Rng, instances: usize, qmax: u64) -> Result<(CheckRow, CheckRow)> {
    let mut avg_failures = 0;
    let mut loop_failures = 0;
    for _ in 0..instances {
        let q = rng.gen_range(1..=qmax);
        let a1 = random_unit(rng, q);
        let b = rad(q) as i64 * rng.gen_range(-5..=5);
        let (i, j) = (random_range(rng)?, random_range(rng)?);
        let mut total = 0u64;
        for a2 in (1..=q as i64).filter(|&a| gcd(a as u64, q) == 1) {
            let inst = CongruenceInstance::new(q, a1, a2, b)?;
            let n = count_n(&i, &j, &inst);
            if n != count_n_brute(&i, &j, &inst, true) {
                loop_failures += 1;
            }
            total += n;
        }
        let expected = count_n_star(&i, &j, q) * Rational::from_integer(BigInt::from(euler_phi(q)));
        if Rational::from_integer(BigInt::from(total)) != expected {
            avg_failures += 1;
        }
    }
    Ok((
        CheckRow::failures(
            VerifySuite::Lemma2,
            "averaging_identity",
            avg_failures,
            format!("exact failures over {instances} random instances with q <= {qmax}"),
        ),
        CheckRow::failures(
            VerifySuite::Lemma2,
            "count_matches_double_loop",
            loop_failures,
            "counts disagreeing with the literal double loop",
        ),
    ))
}

/// Support and size of `g1`, `g2`, and the two evaluations of `omega_inf`.
pub fn g_bounds(cfg: &QuadratureConfig) -> Result<Vec<CheckRow>> {
    let s = VerifySuite::Lemma5;
    let mut worst: f64 = 0.0;
    let mut outside: u64 = 0;
    for i in 1..=300 {
        let t = i as f64 * 0.005;
        for j in -120..=120 {
            let y = j as f64 / (100.0 * t * t);
            let v = g1(y, t);
            worst = worst.max(v * t * t / 2.0);
            if y.abs() > 1.0 / (t * t) && v != 0.0 {
                outside += 1;
            }
        }
    }
    let mut rows = vec![
        CheckRow::at_most(s, "g1_bound", worst, 1.0, "max of g1(y, t) t^2 / 2 on a grid"),
        CheckRow::failures(s, "g1_support", outside, "nonzero values with |y| > 1/t^2"),
    ];
    let beyond = [t_max(), t_max() * 1.001, 1.5, 2.0, 10.0]
        .into_iter()
        .map(|t| g2(t, cfg))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .filter(|&v| v != 0.0)
        .count() as u64;
    rows.push(CheckRow::failures(s, "g2_support", beyond, "nonzero values with t >= 3^(1/3)"));

    let fine = QuadratureConfig { quad_tol: cfg.quad_tol / 10.0, ..*cfg };
    let ts: Vec<f64> = (0..=40).map(|k| 10f64.powf(-3.0 + 3.2 * k as f64 / 40.0)).filter(|&t| t < t_max()).collect();
    let mut sup: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for &t in &ts {
        let a = g2_estimate(t, cfg)?;
        let b = g2_estimate(t, &fine)?;
        sup = sup.max(a.value);
        drift = drift.max((a.value - b.value).abs() / (a.error + b.error).max(f64::MIN_POSITIVE));
    }
    rows.push(CheckRow::at_most(s, "g2_sup", sup, 16.0, format!("sup of g2 over {} sampled t in [1e-3, 3^(1/3))", ts.len())));
    rows.push(CheckRow::at_most(
        s,
        "g2_refinement",
        drift,
        1.0,
        "max change under 10x tolerance refinement, in units of the reported error",
    ));

    let om = omega_infinity(cfg)?;
    rows.push(CheckRow::at_most(
        s,
        "omega_inf_agreement",
        om.relative_difference,
        crate::density::OMEGA_AGREEMENT,
        format!("quadrature {:.10} vs Monte Carlo {:.10}", om.quadrature.value, om.monte_carlo.value),
    ));
    Ok(rows)
}

/// The two characterizations of the region agree, and the main term behaves
/// on its degenerate inputs.
pub fn main_term_checks(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<Vec<CheckRow>> {
    let s = VerifySuite::Lemma6;
    let mut disagreements = 0;
    for _ in 0..20 {
        let x = rng.gen_range(2.0..200.0);
        let region = RegionS::new(x, rng.gen_range(x / 4.0..3.0 * x), rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0))?;
        let (umax, vmax) = region.box_bounds();
        for u in -umax..=umax {
            for v in -vmax..=vmax {
                let (uf, vf) = (u as f64, v as f64);
                if region.contains(uf, vf) != (region.h_form(uf, vf) <= 1.0) {
                    disagreements += 1;
                }
            }
        }
    }
    let mut rows = vec![CheckRow::failures(s, "region_dual_form", disagreements, "lattice points where the two forms differ")];

    let x = 37.0;
    let flat = main_term_d(&RegionS::new(x, x, 1.0, 1.0)?, 1, cfg)?;
    let expected = x * x * g2(1.0, cfg)?;
    rows.push(CheckRow::at_most(
        s,
        "main_term_at_x_equals_t",
        ((flat - expected) / expected).abs(),
        1e-12,
        "relative gap to X^2 g2(1)",
    ));
    let empty = main_term_d(&RegionS::new(10.0, 31.0, 1.0, 1.0)?, 7, cfg)?;
    rows.push(CheckRow::at_most(s, "main_term_empty_region", empty.abs(), 0.0, "value for T > 3X"));
    Ok(rows)
}

/// `count <= 12 pi W1 W2 W3 / M + 4`, decided in integers using
/// `333/106 < pi < 355/113` and falling back to floating point only between.
pub fn heath_brown(rng: &mut ChaCha8Rng, queries: usize) -> Result<CheckRow> {
    let mut violations = 0;
    let mut undecided = 0;
    let mut done = 0;
    while done < queries {
        let v: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-50..=50));
        let w: [i64; 3] = std::array::from_fn(|_| rng.gen_range(1..=30));
        if gcd(gcd(v[0].unsigned_abs(), v[1].unsigned_abs()), v[2].unsigned_abs()) != 1 {
            continue;
        }
        done += 1;
        let query = PrimitiveVectorQuery::new(v, w.map(|x| x as f64))?;
        let count = heath_brown_count(&query) as i128;
        let m = (0..3).map(|i| v[i].unsigned_abs() as i128 * w[i] as i128).max().unwrap_or(1);
        let vol = 12 * w.iter().map(|&x| x as i128).product::<i128>();
        let excess = (count - 4) * m;
        if excess * 106 <= vol * 333 {
            continue;
        }
        if excess * 113 > vol * 355 {
            violations += 1;
            continue;
        }
        undecided += 1;
        if count as f64 > heath_brown_bound(&query) {
            violations += 1;
        }
    }
    Ok(CheckRow::failures(
        VerifySuite::Lemma8,
        "primitive_vector_bound",
        violations,
        format!("violations over {queries} queries, |v_i| <= 50, W_i <= 30 ({undecided} needed floating point)"),
    ))
}

/// The fiber and pipeline identities at height `b`.
pub fn torsor_checks(b: u64) -> Result<Vec<CheckRow>> {
    let s = VerifySuite::Torsor;
    let report = bijection_check(b)?;
    let mismatch = report.collisions.len() + report.bad_images.len() + report.missed.len();
    let mut rows = vec![CheckRow {
        suite: s.id(),
        check: "bijection",
        passed: report.is_bijection(),
        value: report.torsor_points as f64,
        limit: report.surface_points as f64,
        detail: format!(
            "B = {b}: {} torsor points, {} surface points, {mismatch} defects",
            report.torsor_points, report.surface_points
        ),
    }];
    let total = torsor_count(b)?;
    let fibers = fiber_count_total(b)?;
    rows.push(CheckRow {
        suite: s.id(),
        check: "fiber_partition",
        passed: total == fibers,
        value: fibers as f64,
        limit: total as f64,
        detail: format!("B = {b}: fiber counts sum to {fibers}, torsor count {total}"),
    });
    Ok(rows)
}

/// Local factors, the polytope constant and the Euler product tail contract.
pub fn local_checks() -> Result<Vec<CheckRow>> {
    let s = VerifySuite::Local;
    let mut worst: f64 = 0.0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        let closed = crate::arith::to_f64(&local_factor_closed(p)?);
        worst = worst.max((local_factor_theta(p, 64)? - closed).abs());
    }
    let mut rows = vec![CheckRow::at_most(
        s,
        "local_factor_identity",
        worst,
        1e-10,
        "max |truncated theta sum - closed form| for p <= 13",
    )];
    let alpha = alpha_volume(&Polytope::alpha())?;
    rows.push(CheckRow {
        suite: s.id(),
        check: "alpha_volume",
        passed: alpha == rational(1, 23040),
        value: crate::arith::to_f64(&alpha),
        limit: 1.0 / 23040.0,
        detail: format!("exact volume {alpha}"),
    });
    let coarse = euler_product_omega_h(1000)?;
    let fine = euler_product_omega_h(100_000)?;
    rows.push(CheckRow::at_most(
        s,
        "euler_tail_contract",
        (coarse.value - fine.value).abs(),
        coarse.tail + fine.tail,
        "|E(10^3) - E(10^5)| against the sum of reported tails",
    ));
    let spread = [2u64, 3, 5, 7, 11, 13]
        .into_iter()
        .map(|p| h(1.0 / p as f64, 0.5, 1.0) - h(0.5, 1.0 / p as f64, 1.0))
        .fold(0.0f64, |m, d| m.max(d.abs()));
    rows.push(CheckRow::at_most(s, "h_symmetry", spread, 1e-15, "max |h(x, y, t) - h(y, x, t)|"));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_round_trip() {
        for s in VerifySuite::ALL {
            assert_eq!(VerifySuite::parse(s.id()).unwrap(), vec![s]);
        }
        assert_eq!(VerifySuite::parse("all").unwrap().len(), 10);
        assert!(VerifySuite::parse("lemma3").is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        let opts = VerifyOptions { height: 30, ..Default::default() };
        for s in [VerifySuite::Lemma2, VerifySuite::Lemma8, VerifySuite::Torsor, VerifySuite::Local] {
            let rows = run_suite(s, &opts).unwrap();
            assert!(rows.iter().all(|r| r.passed), "{rows:?}");
        }
    }

    #[test]
    fn small_exhaustive_identity() {
        let row = exp_sum_identity(12).unwrap();
        assert!(row.passed && row.value < 1e-10, "{row:?}");
        assert!(ramanujan_formula(20, 20).passed);
    }
}
