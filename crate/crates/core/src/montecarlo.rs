//! Monte Carlo reference engine.
//!
//! Distributional trials draw the serving and interferer distances from their
//! derived laws; positional trials place the whole constellation on the shell
//! and measure distances directly. Every trial owns a ChaCha stream keyed by
//! `(seed, trial index)`, and chunk results are merged in index order, so an
//! estimate depends only on the plan and never on the worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{approx_rd, sample_constellation, DistanceLaw};
use crate::model::{interference_sum, sinr_downlink, snr_marine, snr_uplink, Scenario, M_PER_KM};
use crate::stats::{ks_statistic, proportion, Estimate, Moments};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Full constellation geometry per trial.
    Positional,
    /// Distances drawn from the derived distance laws.
    Distributional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub mode: Mode,
    pub n_trials: u64,
    pub seed: u64,
    pub scenario: Scenario,
}

impl TrialPlan {
    pub fn new(mode: Mode, n_trials: u64, seed: u64, scenario: Scenario) -> Result<Self> {
        let plan = TrialPlan {
            mode,
            n_trials,
            seed,
            scenario,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 1 {
            return Err(Error::invalid("a trial plan needs at least one trial"));
        }
        self.scenario.validate()
    }
}

/// Aggregated estimates with 95% half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub p_bd: Estimate,
    /// Space-link success, estimated over every trial regardless of the marine outcome.
    pub p_esd: Estimate,
    pub p_s: Estimate,
    /// Delivered rate, bit/s.
    pub c_s: Estimate,
    /// Marine share of `c_s` (rate times marine-success indicator).
    pub c_bd: Estimate,
    /// Space share of `c_s`.
    pub c_esd: Estimate,
    pub n_trials: u64,
}

/// Everything drawn or derived in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub snr_marine: f64,
    pub r_u_km: f64,
    pub r_d_km: f64,
    pub n_interferers: u32,
    pub interference_w: f64,
    pub snr_uplink: f64,
    pub sinr_downlink: f64,
    pub marine_ok: bool,
    pub space_ok: bool,
    /// Rate delivered by the threshold scheme, bit/s.
    pub capacity: f64,
}

impl TrialOutcome {
    pub fn success(&self) -> bool {
        self.marine_ok || self.space_ok
    }
}

/// Per-trial generator: stream `index` of the seed's ChaCha8 sequence.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Distribution objects shared by all trials of a plan.
struct Samplers {
    shadow: Gamma<f64>,
    law: DistanceLaw,
    ds_position: [f64; 3],
}

impl Samplers {
    fn new(sc: &Scenario) -> Self {
        let r_e = sc.constellation.earth_radius_km;
        let theta = sc.r_bd_km / r_e;
        Samplers {
            shadow: sc.fading.shadowed.shadow_distribution(),
            law: DistanceLaw::new(sc.constellation, sc.r_bd_km),
            ds_position: [r_e * theta.sin(), 0.0, r_e * theta.cos()],
        }
    }
}

/// Applies the threshold rule to drawn link qualities.
fn settle(sc: &Scenario, mut t: TrialOutcome) -> TrialOutcome {
    let tau = sc.tau_linear;
    t.marine_ok = t.snr_marine > tau;
    t.space_ok = t.snr_uplink > tau && t.sinr_downlink > tau;
    t.capacity = if t.marine_ok {
        sc.link.b_bd * t.snr_marine.ln_1p() / std::f64::consts::LN_2
    } else {
        sc.link.b_esd * t.snr_uplink.min(t.sinr_downlink).ln_1p() / std::f64::consts::LN_2
    };
    t
}

fn marine_draw<R: Rng>(sc: &Scenario, rng: &mut R) -> f64 {
    let h = sc.fading.rician.sample(rng);
    snr_marine(&sc.link, h, sc.r_bd_m()).expect("validated positive distance")
}

fn distributional_with<R: Rng>(sc: &Scenario, s: &Samplers, rng: &mut R) -> TrialOutcome {
    let sr = &sc.fading.shadowed;
    let snr_m = marine_draw(sc, rng);
    let r_u = s.law.sample_ru(rng);
    let h_u = sr.sample_with(&s.shadow, rng);
    let snr_u = snr_uplink(&sc.link, &sc.constellation, h_u, r_u * M_PER_KM);

    let p_i = s.law.p_interferer(r_u);
    let max_i = sc.constellation.max_interferers() as u64;
    let n_i = if p_i > 0.0 && max_i > 0 {
        Binomial::new(max_i, p_i).expect("probability in [0, 1]").sample(rng) as u32
    } else {
        0
    };
    let mut interferers = Vec::with_capacity(n_i as usize);
    for _ in 0..n_i {
        let r_j = s.law.sample_visible_rj(r_u, rng);
        interferers.push((sr.sample_with(&s.shadow, rng), r_j * M_PER_KM));
    }
    let i_w = interference_sum(&sc.link, &interferers);
    let r_d = approx_rd(r_u, sc.r_bd_km);
    let h_d = sr.sample_with(&s.shadow, rng);
    let sinr = sinr_downlink(&sc.link, h_d, r_d * M_PER_KM, i_w);
    settle(
        sc,
        TrialOutcome {
            snr_marine: snr_m,
            r_u_km: r_u,
            r_d_km: r_d,
            n_interferers: n_i,
            interference_w: i_w,
            snr_uplink: snr_u,
            sinr_downlink: sinr,
            marine_ok: false,
            space_ok: false,
            capacity: 0.0,
        },
    )
}

fn positional_with<R: Rng>(sc: &Scenario, s: &Samplers, rng: &mut R) -> TrialOutcome {
    let sr = &sc.fading.shadowed;
    let snr_m = marine_draw(sc, rng);
    let spec = &sc.constellation;
    let constellation = sample_constellation(spec, rng).expect("validated constellation");
    let es = [0.0, 0.0, spec.earth_radius_km];
    let (serving, r_u) = constellation
        .points
        .iter()
        .map(|p| p.distance_to_km(es))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one satellite");
    let ss = constellation.points[serving];
    let r_d = ss.distance_to_km(s.ds_position);
    let h_u = sr.sample_with(&s.shadow, rng);
    let snr_u = snr_uplink(&sc.link, spec, h_u, r_u * M_PER_KM);

    let r_max = spec.visible_distance_km();
    let channel = constellation.channels[serving];
    let mut interferers = Vec::new();
    for (i, p) in constellation.points.iter().enumerate() {
        if i == serving || constellation.channels[i] != channel {
            continue;
        }
        let r_j = p.distance_to_km(s.ds_position);
        if r_j <= r_max {
            interferers.push((sr.sample_with(&s.shadow, rng), r_j * M_PER_KM));
        }
    }
    let i_w = interference_sum(&sc.link, &interferers);
    let h_d = sr.sample_with(&s.shadow, rng);
    let sinr = sinr_downlink(&sc.link, h_d, r_d * M_PER_KM, i_w);
    settle(
        sc,
        TrialOutcome {
            snr_marine: snr_m,
            r_u_km: r_u,
            r_d_km: r_d,
            n_interferers: interferers.len() as u32,
            interference_w: i_w,
            snr_uplink: snr_u,
            sinr_downlink: sinr,
            marine_ok: false,
            space_ok: false,
            capacity: 0.0,
        },
    )
}

/// Trial `index` of `plan`, reproducible in isolation.
pub fn run_trial(plan: &TrialPlan, index: u64) -> TrialOutcome {
    let samplers = Samplers::new(&plan.scenario);
    let mut rng = trial_rng(plan.seed, index);
    match plan.mode {
        Mode::Distributional => distributional_with(&plan.scenario, &samplers, &mut rng),
        Mode::Positional => positional_with(&plan.scenario, &samplers, &mut rng),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    marine: u64,
    space: u64,
    success: u64,
    capacity: Moments,
    c_bd: Moments,
    c_esd: Moments,
}

impl Tally {
    fn push(&mut self, t: &TrialOutcome) {
        self.marine += t.marine_ok as u64;
        self.space += t.space_ok as u64;
        self.success += t.success() as u64;
        self.capacity.push(t.capacity);
        self.c_bd.push(if t.marine_ok { t.capacity } else { 0.0 });
        self.c_esd.push(if t.marine_ok { 0.0 } else { t.capacity });
    }

    fn merge(&mut self, o: &Tally) {
        self.marine += o.marine;
        self.space += o.space;
        self.success += o.success;
        self.capacity.merge(&o.capacity);
        self.c_bd.merge(&o.c_bd);
        self.c_esd.merge(&o.c_esd);
    }
}

/// Maps every trial through `visit` in fixed-size chunks and folds chunk results in order.
fn fold_trials<T, V, M>(plan: &TrialPlan, visit: V, merge: M) -> T
where
    T: Default + Send,
    V: Fn(&mut T, TrialOutcome) + Sync,
    M: Fn(&mut T, T),
{
    let samplers = Samplers::new(&plan.scenario);
    let n_chunks = plan.n_trials.div_ceil(CHUNK);
    let parts: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = T::default();
            let end = ((c + 1) * CHUNK).min(plan.n_trials);
            for index in c * CHUNK..end {
                let mut rng = trial_rng(plan.seed, index);
                let t = match plan.mode {
                    Mode::Distributional => distributional_with(&plan.scenario, &samplers, &mut rng),
                    Mode::Positional => positional_with(&plan.scenario, &samplers, &mut rng),
                };
                visit(&mut acc, t);
            }
            acc
        })
        .collect();
    let mut total = T::default();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

pub fn run(plan: &TrialPlan) -> Result<EstimateRow> {
    plan.validate()?;
    let t: Tally = fold_trials(plan, |acc: &mut Tally, o| acc.push(&o), |a, b| a.merge(&b));
    let n = plan.n_trials;
    Ok(EstimateRow {
        p_bd: proportion(t.marine, n),
        p_esd: proportion(t.space, n),
        p_s: proportion(t.success, n),
        c_s: t.capacity.estimate(),
        c_bd: t.c_bd.estimate(),
        c_esd: t.c_esd.estimate(),
        n_trials: n,
    })
}

pub fn run_distributional(plan: &TrialPlan) -> Result<EstimateRow> {
    if plan.mode != Mode::Distributional {
        return Err(Error::invalid("plan mode must be distributional"));
    }
    run(plan)
}

pub fn run_positional(plan: &TrialPlan) -> Result<EstimateRow> {
    if plan.mode != Mode::Positional {
        return Err(Error::invalid("plan mode must be positional"));
    }
    run(plan)
}

/// Binned serving-satellite-to-ship distances with their fit to the right-triangle law.
#[derive(Debug, Clone, PartialEq)]
pub struct RdHistogram {
    /// `n_bins + 1` edges spanning the support of the approximated law, km.
    pub edges: Vec<f64>,
    /// Counts per bin; samples outside the support are clamped into the end bins.
    pub counts: Vec<u64>,
    pub empirical_cdf: Vec<f64>,
    /// Estimated density per bin, 1/km.
    pub empirical_pdf: Vec<f64>,
    pub ks: f64,
    pub n_samples: u64,
}

/// True SS-to-DS distances from positional trials and their KS distance to the approximated CDF.
pub fn empirical_rd_distribution(plan: &TrialPlan, n_bins: usize) -> Result<RdHistogram> {
    plan.validate()?;
    if plan.mode != Mode::Positional {
        return Err(Error::invalid("distance histograms need positional trials"));
    }
    if n_bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    let mut samples: Vec<f64> = fold_trials(
        plan,
        |acc: &mut Vec<f64>, o| acc.push(o.r_d_km),
        |a, mut b| a.append(&mut b),
    );
    let law = DistanceLaw::new(plan.scenario.constellation, plan.scenario.r_bd_km);
    let ks = ks_statistic(&mut samples, |r| law.rd_cdf(r));
    let (lo, hi) = law.rd_support();
    let width = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0u64; n_bins];
    for &r in &samples {
        let b = (((r - lo) / width).floor().max(0.0) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    let n = samples.len() as f64;
    let mut running = 0u64;
    let empirical_cdf = counts
        .iter()
        .map(|&c| {
            running += c;
            running as f64 / n
        })
        .collect();
    let empirical_pdf = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    Ok(RdHistogram {
        edges,
        counts,
        empirical_cdf,
        empirical_pdf,
        ks,
        n_samples: samples.len() as u64,
    })
}
