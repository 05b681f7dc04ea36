//! Reference checks: published operating points, internal consistency between
//! the analytic and simulated engines, and qualitative trends.
//!
//! Each check yields a [`CriterionResult`]. Monte Carlo checks that run with
//! fewer trials than their nominal count report `Inconclusive` rather than
//! `Fail` when the confidence interval still reaches the acceptance band.

use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::Analyzer;
use crate::error::{Error, Result};
use crate::fading::{marcum_q1, RicianParams, ShadowedRicianParams};
use crate::geometry::DistanceLaw;
use crate::model::Scenario;
use crate::montecarlo::{self, empirical_rd_distribution, Mode, TrialPlan};
use crate::output::to_csv;
use crate::quad::Integrator;
use crate::stats::{ks_statistic, Estimate};
use crate::sweep::{run_sweep, Engine, SweepAxis, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    /// Published or expected value.
    pub reference: String,
    pub computed: String,
    pub tolerance: String,
    pub status: Status,
}

impl CriterionResult {
    fn new(id: &str, title: &str) -> Self {
        CriterionResult {
            id: id.to_string(),
            title: title.to_string(),
            reference: String::new(),
            computed: String::new(),
            tolerance: String::new(),
            status: Status::Pass,
        }
    }

    fn failed(id: &str, title: &str, e: &Error) -> Self {
        let mut r = Self::new(id, title);
        r.computed = format!("error: {e}");
        r.status = Status::Fail;
        r
    }

    /// One human-readable report line.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: reference {} | computed {} | tolerance {}",
            self.status, self.id, self.title, self.reference, self.computed, self.tolerance
        )
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

/// Worst status of a set.
pub fn overall(results: &[CriterionResult]) -> Status {
    results.iter().map(|r| r.status).max().unwrap_or(Status::Pass)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub base: Scenario,
    /// Caps every Monte Carlo trial count; `None` runs the nominal counts.
    pub max_trials: Option<u64>,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            base: Scenario::reference(),
            max_trials: None,
            seed: 2024,
        }
    }
}

impl ValidateOptions {
    fn trials(&self, nominal: u64) -> u64 {
        self.max_trials.map_or(nominal, |m| m.clamp(1, nominal))
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

/// Band test on an estimate: the point estimate decides, the interval can only soften a miss.
fn band_status(e: Estimate, lo: f64, hi: f64) -> Status {
    if within(e.value, lo, hi) {
        Status::Pass
    } else if e.upper() >= lo && e.lower() <= hi {
        Status::Inconclusive
    } else {
        Status::Fail
    }
}

/// `|diff| < tol` where `diff` carries sampling noise `half_width`.
fn closeness_status(diff: f64, half_width: f64, tol: f64) -> Status {
    if diff.abs() < tol {
        Status::Pass
    } else if diff.abs() - half_width < tol {
        Status::Inconclusive
    } else {
        Status::Fail
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn guarded(id: &str, title: &str, f: impl FnOnce(&mut CriterionResult) -> Result<()>) -> CriterionResult {
    let mut r = CriterionResult::new(id, title);
    match f(&mut r) {
        Ok(()) => r,
        Err(e) => CriterionResult::failed(id, title, &e),
    }
}

fn analyzer_at(base: &Scenario, tau_db: f64) -> Result<Analyzer> {
    Analyzer::new(base.with_tau_db(tau_db))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed()))
}

/// Marine success at 8 dB and 13 dB from the closed form.
pub fn marine_success(opts: &ValidateOptions) -> CriterionResult {
    guarded("1", "marine success probability", |r| {
        let a8 = analyzer_at(&opts.base, 8.0)?;
        let a13 = analyzer_at(&opts.base, 13.0)?;
        let p8 = a8.p_bd()?;
        let p13 = a13.p_bd()?;
        // Best of several runs so scheduler noise does not decide a timing bound.
        let mut fastest = Duration::MAX;
        for _ in 0..5 {
            fastest = fastest.min(timed(|| a8.p_bd())?.1);
        }
        r.reference = "p_bd(8 dB) 0.784 theory / 0.788 sim; p_bd(13 dB) about 0.014".into();
        r.computed = format!("p_bd(8 dB) = {p8:.4}, p_bd(13 dB) = {p13:.4}, {:.3} ms", fastest.as_secs_f64() * 1e3);
        r.tolerance = "p_bd(8 dB) in [0.774, 0.798], p_bd(13 dB) in [0.009, 0.019], < 1 ms".into();
        r.status = pass_if(within(p8, 0.774, 0.798) && within(p13, 0.009, 0.019) && fastest < Duration::from_millis(1));
        Ok(())
    })
}

/// End-to-end success at 8 dB and 13 dB, analytic and simulated, with the relative gain at 13 dB.
pub fn end_to_end_success(opts: &ValidateOptions) -> CriterionResult {
    guarded("2", "end-to-end success probability", |r| {
        let (t8, d8) = timed(|| analyzer_at(&opts.base, 8.0)?.success_report())?;
        let (t13, d13) = timed(|| analyzer_at(&opts.base, 13.0)?.success_report())?;
        let gain = (t13.2 - t13.0) / t13.0;
        let trials = opts.trials(1_000_000);
        let (m8, e8) = timed(|| montecarlo::run(&TrialPlan::new(Mode::Distributional, trials, opts.seed, opts.base.with_tau_db(8.0))?))?;
        let (m13, e13) = timed(|| montecarlo::run(&TrialPlan::new(Mode::Distributional, trials, opts.seed, opts.base.with_tau_db(13.0))?))?;
        let theory_ok = within(t8.2, 0.85, 0.91) && within(t13.2, 0.11, 0.16) && within(gain, 7.0, 11.0);
        let timing_ok = d8.max(d13) <= Duration::from_secs(10) && e8.max(e13) <= Duration::from_secs(60);
        let mc = band_status(m8.p_s, 0.85, 0.91).max(band_status(m13.p_s, 0.11, 0.16));
        r.reference = "p_s(8 dB) 0.877/0.881, p_s(13 dB) 0.132/0.138, gain at 13 dB 886%".into();
        r.computed = format!(
            "theory p_s(8) = {:.4}, p_s(13) = {:.4}, gain = {:.2}; MC p_s(8) = {:.4}±{:.4}, p_s(13) = {:.4}±{:.4} ({trials} trials); theory {:.2} s/pt, MC {:.1} s/pt",
            t8.2,
            t13.2,
            gain,
            m8.p_s.value,
            m8.p_s.half_width,
            m13.p_s.value,
            m13.p_s.half_width,
            d8.max(d13).as_secs_f64(),
            e8.max(e13).as_secs_f64()
        );
        r.tolerance = "p_s(8) in [0.85, 0.91], p_s(13) in [0.11, 0.16], gain in [7, 11], theory <= 10 s, MC <= 60 s".into();
        r.status = if theory_ok && timing_ok { mc } else { Status::Fail };
        Ok(())
    })
}

/// Smallest threshold on a 0.5 dB grid at which the space link beats the marine link.
pub fn crossover(opts: &ValidateOptions) -> CriterionResult {
    guarded("3", "space link overtakes marine link", |r| {
        let grid: Vec<f64> = (0..=60).map(|i| i as f64 * 0.5).collect();
        let mut found = None;
        for &t in &grid {
            let a = analyzer_at(&opts.base, t)?;
            if a.p_esd()? > a.p_bd()? {
                found = Some(t);
                break;
            }
        }
        r.reference = "crossover above about 11 dB".into();
        r.tolerance = "first tau with p_esd > p_bd in [10, 12] dB".into();
        match found {
            Some(t) => {
                r.computed = format!("{t} dB");
                r.status = pass_if(within(t, 10.0, 12.0));
            }
            None => {
                r.computed = "no crossover in [0, 30] dB".into();
                r.status = Status::Fail;
            }
        }
        Ok(())
    })
}

/// Peak of simulated end-to-end success over the constellation size at 600 km.
pub fn size_peak(opts: &ValidateOptions) -> CriterionResult {
    guarded("4", "constellation-size peak at 600 km", |r| {
        let mut base = opts.base;
        base.constellation.altitude_km = 600.0;
        let trials = opts.trials(100_000);
        let start = Instant::now();
        let mut points = Vec::new();
        for n in (20..=400).step_by(20) {
            let s = SweepAxis::NSats.apply(&base, n as f64)?;
            let row = montecarlo::run(&TrialPlan::new(Mode::Positional, trials, opts.seed, s)?)?;
            points.push((n as f64, row.p_s));
        }
        let elapsed = start.elapsed();
        let &(n_best, best) = points
            .iter()
            .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .expect("non-empty grid");
        let value_status = band_status(best, 0.86, 0.96);
        let location_status = if within(n_best, 80.0, 160.0) {
            Status::Pass
        } else if points
            .iter()
            .any(|(n, e)| within(*n, 80.0, 160.0) && e.upper() >= best.lower())
        {
            Status::Inconclusive
        } else {
            Status::Fail
        };
        r.reference = "peak 0.915 at N = 120".into();
        r.computed = format!(
            "peak {:.4}±{:.4} at N = {n_best} ({trials} positional trials per point, {:.1} s total)",
            best.value,
            best.half_width,
            elapsed.as_secs_f64()
        );
        r.tolerance = "argmax N in [80, 160], peak in [0.86, 0.96], <= 600 s".into();
        r.status = if elapsed > Duration::from_secs(600) {
            Status::Fail
        } else {
            value_status.max(location_status)
        };
        Ok(())
    })
}

/// Where the rate capacity stops falling and surges towards the space-link plateau.
pub fn capacity_jump(opts: &ValidateOptions) -> CriterionResult {
    guarded("5", "capacity switch distance", |r| {
        let grid: Vec<f64> = (1..=30).map(|i| 2.0 * i as f64).collect();
        let caps = grid
            .iter()
            .map(|&d| Analyzer::new(opts.base.with_r_bd_nmile(d))?.c_s())
            .collect::<Result<Vec<f64>>>()?;
        let (i_min, &c_min) = caps
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        let (i_max, &c_max) = caps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        let climbs = i_max > i_min && caps[i_min..=i_max].windows(2).all(|w| w[1] >= w[0]);
        let surge = c_max / c_min;
        r.reference = "capacity falls until about 28 n mile, then surges to its maximum".into();
        r.computed = format!(
            "minimum {c_min:.3e} bit/s at {} n mile, climbing monotonically: {climbs}, rising {surge:.1}x to {c_max:.3e} at {} n mile",
            grid[i_min],
            grid[i_max]
        );
        r.tolerance = "surge onset within [24, 32] n mile on a 2 n mile grid; monotone climb of at least 2x to the maximum".into();
        r.status = pass_if(within(grid[i_min], 24.0, 32.0) && climbs && surge >= 2.0);
        Ok(())
    })
}

/// KS distance between simulated serving-satellite-to-ship distances and the right-triangle law.
pub fn distance_fidelity(opts: &ValidateOptions) -> CriterionResult {
    guarded("6", "distance approximation fidelity", |r| {
        let trials = opts.trials(100_000);
        let plan = TrialPlan::new(Mode::Positional, trials, opts.seed, opts.base)?;
        let h = empirical_rd_distribution(&plan, 50)?;
        // Asymptotic 95% KS critical value for the sample size.
        let noise = 1.358 / (trials as f64).sqrt();
        r.reference = "approximated CDF matches the empirical one".into();
        r.computed = format!("KS = {:.4} ({trials} positional trials, sampling noise {:.4})", h.ks, noise);
        r.tolerance = "KS < 0.02".into();
        r.status = closeness_status(h.ks, noise, 0.02);
        Ok(())
    })
}

/// Analytic against simulated success and capacity over a threshold grid.
pub fn theory_vs_simulation(opts: &ValidateOptions) -> CriterionResult {
    guarded("7", "analytic vs Monte Carlo", |r| {
        let trials = opts.trials(1_000_000);
        let mut worst_p: f64 = 0.0;
        let mut worst_c: f64 = 0.0;
        let mut status = Status::Pass;
        for t in [0.0, 5.0, 8.0, 10.0, 13.0, 20.0] {
            let sc = opts.base.with_tau_db(t);
            let a = Analyzer::new(sc)?;
            let mc = montecarlo::run(&TrialPlan::new(Mode::Distributional, trials, opts.seed, sc)?)?;
            let dp = a.p_s()? - mc.p_s.value;
            worst_p = worst_p.max(dp.abs());
            status = status.max(closeness_status(dp, mc.p_s.half_width, 0.01));
            if t == 8.0 || t == 13.0 {
                let rel = (a.c_s()? - mc.c_s.value) / mc.c_s.value;
                worst_c = worst_c.max(rel.abs());
                status = status.max(closeness_status(rel, mc.c_s.half_width / mc.c_s.value, 0.05));
            }
        }
        r.reference = "analytic curves overlay the simulation".into();
        r.computed = format!("max |dp_s| = {worst_p:.4}, max relative dc_s = {worst_c:.4} ({trials} trials per point)");
        r.tolerance = "|dp_s| < 0.01 at 0, 5, 8, 10, 13, 20 dB; |dc_s|/c_s < 0.05 at 8 and 13 dB".into();
        r.status = status;
        Ok(())
    })
}

fn marcum_identities() -> CriterionResult {
    guarded("8a", "Marcum Q identities", |r| {
        let mut worst: f64 = 0.0;
        for i in 0..=40 {
            let x = 0.5 * i as f64;
            worst = worst.max((marcum_q1(x, 0.0)? - 1.0).abs());
            worst = worst.max((marcum_q1(0.0, x)? - (-x * x / 2.0).exp()).abs());
        }
        r.reference = "Q1(a, 0) = 1, Q1(0, b) = exp(-b^2/2)".into();
        r.computed = format!("max error {worst:.2e}");
        r.tolerance = "1e-10".into();
        r.status = pass_if(worst <= 1e-10);
        Ok(())
    })
}

fn shadowed_rician_checks(opts: &ValidateOptions) -> CriterionResult {
    guarded("8b", "shadowed-Rician CCDF and sampler", |r| {
        let sr = opts.base.fading.shadowed;
        let at_zero = sr.ccdf(0.0);
        let n = opts.trials(1_000_000);
        let shadow = sr.shadow_distribution();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut xs: Vec<f64> = (0..n).map(|_| sr.sample_with(&shadow, &mut rng)).collect();
        let ks = ks_statistic(&mut xs, |x| sr.cdf(x));
        let noise = 1.358 / (n as f64).sqrt();
        r.reference = "CCDF(0) = 1; sampler follows the CDF".into();
        r.computed = format!("CCDF(0) = {at_zero:.12}, KS = {ks:.5} over {n} draws");
        r.tolerance = "|CCDF(0) - 1| < 1e-10, KS < 0.003".into();
        r.status = if (at_zero - 1.0).abs() >= 1e-10 {
            Status::Fail
        } else {
            closeness_status(ks, noise, 0.003)
        };
        Ok(())
    })
}

fn kappa_mu_checks(opts: &ValidateOptions) -> CriterionResult {
    guarded("8c", "kappa-mu Laplace transform", |r| {
        let sr = opts.base.fading.shadowed;
        let km = sr.to_kappa_mu();
        // Completely monotone functions have forward differences of alternating sign.
        let order = 4;
        let step = 0.1;
        let values: Vec<f64> = (0..200 + order).map(|i| km.laplace(step * i as f64)).collect();
        let mut monotone = true;
        let mut diffs = values;
        for k in 0..=order {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            monotone &= diffs[..200].iter().all(|d| sign * d > 0.0);
            diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let n = opts.trials(1_000_000);
        let shadow = sr.shadow_distribution();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
        let xs: Vec<f64> = (0..n).map(|_| sr.sample_with(&shadow, &mut rng)).collect();
        let mut worst_z: f64 = 0.0;
        for s in [0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let mut m = crate::stats::Moments::default();
            for x in &xs {
                m.push((-s * x).exp());
            }
            let e = m.estimate();
            worst_z = worst_z.max((e.value - km.laplace(s)).abs() / e.half_width.max(1e-300));
        }
        r.reference = "completely monotone; equals E[exp(-s H)] of the sampled gain".into();
        r.computed = format!("monotone signs up to order {order}: {monotone}; worst deviation {worst_z:.2} half-widths over {n} draws");
        r.tolerance = "all signs alternate; deviation within 2 half-widths".into();
        r.status = if !monotone {
            Status::Fail
        } else if worst_z <= 2.0 {
            Status::Pass
        } else {
            Status::Inconclusive
        };
        Ok(())
    })
}

fn derivative_checks(opts: &ValidateOptions) -> CriterionResult {
    guarded("8d", "Laplace derivatives vs exponential", |r| {
        // With one satellite per channel the interference transform is a pure exponential.
        let mut sc = opts.base;
        sc.constellation.n_channels = sc.constellation.n_sats;
        let a = Analyzer::new(sc)?;
        let sr = sc.fading.shadowed;
        let rate = sc.link.sigma2_d * (sr.beta - sr.delta);
        let r_u = sc.constellation.altitude_km + 100.0;
        let mut worst: f64 = 0.0;
        for cs in [1e-3, 1e-2, 0.1, 1.0, 5.0, 20.0] {
            let s = cs / rate;
            for k in 0..sr.m as usize {
                let exact = (-rate).powi(k as i32) * (-cs).exp();
                let got = a.laplace_derivative(r_u, s, k)?;
                worst = worst.max(((got - exact) / exact).abs());
            }
        }
        r.reference = "d^k/ds^k exp(-c s) = (-c)^k exp(-c s)".into();
        r.computed = format!("max relative error {worst:.2e} for c s in [1e-3, 20]");
        r.tolerance = "1e-6".into();
        r.status = pass_if(worst < 1e-6);
        Ok(())
    })
}

fn normalisations(opts: &ValidateOptions) -> CriterionResult {
    guarded("8e", "density normalisations", |r| {
        let q = Integrator::new(0.0, 1e-12, 20_000);
        let sc = opts.base;
        let law = DistanceLaw::new(sc.constellation, sc.r_bd_km);
        let mut checks = Vec::new();
        let (lo, hi) = law.ru_support();
        checks.push(("R_u", q.integrate(|x| law.ru_pdf(x), lo, hi)?.value));
        let (lo_d, hi_d) = law.rd_support();
        checks.push(("R_d", q.integrate(|x| law.rd_pdf(x), lo_d, hi_d)?.value));
        let mid = 0.5 * (lo + sc.constellation.visible_distance_km());
        checks.push(("R_j | R_u", q.integrate(|x| law.rj_pdf_given_ru(x, mid), mid, hi)?.value));
        let ric: RicianParams = sc.fading.rician;
        checks.push(("Rician", q.integrate(|x| ric.pdf(x), 0.0, ric.v + 40.0 * ric.rho)?.value));
        let sr: ShadowedRicianParams = sc.fading.shadowed;
        let top = 800.0 / sr.decay();
        checks.push(("shadowed Rician", q.integrate(|x| sr.pdf(x), 0.0, top)?.value));
        let worst = checks.iter().map(|(_, v)| (v - 1.0).abs()).fold(0.0, f64::max);
        r.reference = "every density integrates to 1".into();
        r.computed = checks
            .iter()
            .map(|(n, v)| format!("{n} {:.2e}", v - 1.0))
            .collect::<Vec<_>>()
            .join(", ");
        r.tolerance = "1e-8".into();
        r.status = pass_if(worst <= 1e-8);
        Ok(())
    })
}

fn threshold_monotonicity(opts: &ValidateOptions) -> CriterionResult {
    guarded("8f", "success decreases with threshold", |r| {
        let values = (0..=40)
            .map(|i| analyzer_at(&opts.base, -10.0 + i as f64)?.p_s())
            .collect::<Result<Vec<f64>>>()?;
        let worst = values.windows(2).map(|w| w[1] - w[0]).fold(f64::MIN, f64::max);
        r.reference = "p_s nonincreasing in tau".into();
        r.computed = format!("largest step {worst:.2e} over -10..30 dB");
        r.tolerance = "no increase beyond 1e-9".into();
        r.status = pass_if(worst <= 1e-9);
        Ok(())
    })
}

fn determinism(opts: &ValidateOptions) -> CriterionResult {
    guarded("8g", "reproducible output", |r| {
        let mut spec = SweepSpec::new(
            opts.base,
            SweepAxis::TauDb,
            vec![5.0, 10.0],
            vec![Engine::Theory, Engine::McDistributional, Engine::McPositional],
        )?;
        spec.mc_trials = opts.trials(5_000);
        spec.seed = opts.seed;
        let render = |threads: usize| -> Result<String> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Numeric(e.to_string()))?;
            pool.install(|| run_sweep(&spec)).map(|rows| to_csv(&rows, false))
        };
        let outputs = [render(1)?, render(4)?, render(4)?, render(3)?];
        let identical = outputs.windows(2).all(|w| w[0] == w[1]);
        r.reference = "byte-identical CSV for a fixed seed".into();
        r.computed = format!("{} runs across 1, 3 and 4 threads identical: {identical}", outputs.len());
        r.tolerance = "exact".into();
        r.status = pass_if(identical);
        Ok(())
    })
}

/// The property suite, one result per property.
pub fn property_suite(opts: &ValidateOptions) -> Vec<CriterionResult> {
    vec![
        marcum_identities(),
        shadowed_rician_checks(opts),
        kappa_mu_checks(opts),
        derivative_checks(opts),
        normalisations(opts),
        threshold_monotonicity(opts),
        determinism(opts),
    ]
}

fn sweep_theory(base: &Scenario, axis: SweepAxis, values: &[f64]) -> Result<Vec<(f64, f64)>> {
    values
        .iter()
        .map(|&v| {
            let rep = Analyzer::new(axis.apply(base, v)?)?.report()?;
            Ok((rep.p_s, rep.c_s))
        })
        .collect()
}

fn trend(id: &str, title: &str, axis: SweepAxis, values: &[f64], base: &Scenario, check: impl Fn(&[f64]) -> bool, pick_capacity: bool) -> CriterionResult {
    guarded(id, title, |r| {
        let pts = sweep_theory(base, axis, values)?;
        let ys: Vec<f64> = pts.iter().map(|p| if pick_capacity { p.1 } else { p.0 }).collect();
        r.reference = title.to_string();
        r.computed = values
            .iter()
            .zip(&ys)
            .map(|(x, y)| format!("{x}: {y:.4e}"))
            .collect::<Vec<_>>()
            .join(", ");
        r.tolerance = "ordering only".into();
        r.status = pass_if(check(&ys));
        Ok(())
    })
}

fn steps(ys: &[f64]) -> Vec<f64> {
    ys.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Ordering checks on 5-point grids.
pub fn trends(opts: &ValidateOptions) -> Vec<CriterionResult> {
    let base = &opts.base;
    let altitudes = [600.0, 900.0, 1200.0, 1500.0, 1800.0];
    let ranges = [10.0, 30.0, 50.0, 70.0, 90.0];
    let channels = [10.0, 20.0, 40.0, 50.0, 100.0];
    let decreasing = |ys: &[f64]| steps(ys).iter().all(|d| *d < 0.0);
    let increasing = |ys: &[f64]| steps(ys).iter().all(|d| *d > 0.0);
    // Nonincreasing, with the last step small against the largest drop.
    let drops_then_flat = |ys: &[f64]| {
        let d = steps(ys);
        let largest = d.iter().fold(0.0f64, |m, x| m.max(-x));
        d.iter().all(|x| *x <= 1e-9) && -d[d.len() - 1] <= 0.1 * largest
    };
    // Nondecreasing, with the per-channel slope of the last segment well below the first.
    let rises_then_flat = move |ys: &[f64]| {
        let d = steps(ys);
        let first = d[0] / (channels[1] - channels[0]);
        let last = d[d.len() - 1] / (channels[4] - channels[3]);
        d.iter().all(|x| *x >= -1e-9) && last <= 0.25 * first
    };
    vec![
        trend("T1", "p_s decreases with altitude", SweepAxis::AltitudeKm, &altitudes, base, decreasing, false),
        trend("T2", "p_s drops then flattens with R_bd", SweepAxis::RBdNmile, &ranges, base, drops_then_flat, false),
        trend("T3", "p_s rises then flattens with channel count", SweepAxis::NChannels, &channels, base, rises_then_flat, false),
        trend("T4", "c_s decreases with altitude", SweepAxis::AltitudeKm, &altitudes, base, decreasing, true),
        trend("T5", "c_s increases with channel count", SweepAxis::NChannels, &channels, base, increasing, true),
    ]
}

/// Every check in order.
pub fn run_all(opts: &ValidateOptions) -> Vec<CriterionResult> {
    let mut out = vec![
        marine_success(opts),
        end_to_end_success(opts),
        crossover(opts),
        size_peak(opts),
        capacity_jump(opts),
        distance_fidelity(opts),
        theory_vs_simulation(opts),
    ];
    out.extend(property_suite(opts));
    out.extend(trends(opts));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_and_closeness_logic() {
        let e = |value, half_width| Estimate { value, half_width };
        assert_eq!(band_status(e(0.5, 0.01), 0.4, 0.6), Status::Pass);
        assert_eq!(band_status(e(0.61, 0.02), 0.4, 0.6), Status::Inconclusive);
        assert_eq!(band_status(e(0.7, 0.02), 0.4, 0.6), Status::Fail);
        assert_eq!(closeness_status(0.005, 0.001, 0.01), Status::Pass);
        assert_eq!(closeness_status(-0.012, 0.005, 0.01), Status::Inconclusive);
        assert_eq!(closeness_status(0.02, 0.005, 0.01), Status::Fail);
    }

    #[test]
    fn overall_is_worst() {
        let mut a = CriterionResult::new("x", "y");
        let mut b = a.clone();
        assert_eq!(overall(&[a.clone()]), Status::Pass);
        b.status = Status::Inconclusive;
        assert_eq!(overall(&[a.clone(), b.clone()]), Status::Inconclusive);
        a.status = Status::Fail;
        assert_eq!(overall(&[a, b]), Status::Fail);
        assert_eq!(overall(&[]), Status::Pass);
    }

    #[test]
    fn trial_caps() {
        let o = ValidateOptions {
            max_trials: Some(1000),
            ..Default::default()
        };
        assert_eq!(o.trials(1_000_000), 1000);
        assert_eq!(o.trials(500), 500);
        assert_eq!(ValidateOptions::default().trials(7), 7);
    }

    #[test]
    fn tampered_path_loss_fails_marine_check() {
        let mut o = ValidateOptions::default();
        o.base.link.alpha_bd = 2.0;
        let r = marine_success(&o);
        assert_eq!(r.status, Status::Fail, "{}", r.line());
        assert!(r.computed.contains("p_bd(8 dB)"));
    }

    #[test]
    fn reduced_trials_soften_statistical_misses() {
        let o = ValidateOptions {
            max_trials: Some(1000),
            ..Default::default()
        };
        let r = distance_fidelity(&o);
        assert_ne!(r.status, Status::Fail, "{}", r.line());
    }
}
