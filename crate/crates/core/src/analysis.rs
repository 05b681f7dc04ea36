//! Quadrature evaluation of the end-to-end success probability and the
//! average rate capacity of the threshold-based shore-to-ship scheme.
//!
//! The marine link is used whenever its SNR clears the threshold; otherwise
//! the signal is relayed by the satellite nearest the shore station. The
//! space-link terms average the shadowed-Rician CCDF over the interference
//! through derivatives of its Laplace transform, which are taken by finite
//! differences on a frozen quadrature partition.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::fading::{marcum_q1, marcum_q1_approx, KappaMuParams};
use crate::geometry::{approx_rd, DistanceLaw};
use crate::model::{Scenario, M_PER_KM};
use crate::quad::{Integrator, Partition};

/// Tolerances of the outer integrals and truncation rules of the infinite ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Upper limit of the capacity integral over spectral efficiency, bit/s/Hz.
    pub t_max_bits: f64,
    /// Rician envelope integrals stop at `v + x_max_sigmas * rho`.
    pub x_max_sigmas: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            max_subdivisions: 2000,
            t_max_bits: 60.0,
            x_max_sigmas: 12.0,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol > 0.0 && (self.abs_tol > 0.0 || self.rel_tol > 0.0)) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if !(self.t_max_bits > 0.0 && self.t_max_bits.is_finite()) {
            return Err(Error::invalid(format!("t_max_bits must be positive, got {}", self.t_max_bits)));
        }
        if !(self.x_max_sigmas > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::invalid("Rician cutoff and subdivision budget must be positive"));
        }
        Ok(())
    }

    fn integrator(&self) -> Integrator {
        Integrator::new(self.abs_tol, self.rel_tol, self.max_subdivisions)
    }
}

/// Central finite-difference settings for derivatives of the interference Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceDerivativeSettings {
    /// Truncation order of the base stencil before Richardson refinement.
    pub fd_order: u32,
    /// Step as a fraction of the evaluation point.
    pub rel_step: f64,
    /// Smallest absolute step, used near `s = 0`.
    pub min_step: f64,
}

impl Default for LaplaceDerivativeSettings {
    fn default() -> Self {
        LaplaceDerivativeSettings {
            fd_order: 4,
            rel_step: 1e-2,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarcumMethod {
    /// Series evaluation accurate to double precision.
    #[default]
    Exact,
    /// Closed-form exponential fit; cheaper and a few 1e-3 off.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisSettings {
    pub quadrature: QuadratureSettings,
    pub derivative: LaplaceDerivativeSettings,
    pub marcum: MarcumMethod,
}

/// Finite-difference weights on `nodes` for derivatives `0..=max_order` at `z`
/// (Fornberg's recursion). Returns `w[k][j]`.
pub fn fd_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivatives `f^(k)(s)` for `k = 0..=max_order` by central differences with
/// one Richardson step (`h` and `h/2`). The base stencil is wide enough to be
/// `fd_order`-accurate for every requested order.
pub fn fd_derivatives<F>(mut f: F, s: f64, max_order: usize, settings: &LaplaceDerivativeSettings) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = f(s)?;
    let mut out = vec![center; max_order + 1];
    if max_order == 0 {
        return Ok(out);
    }
    let q = settings.fd_order.max(2) as usize;
    // Smallest half-width p whose central stencil reaches order q for derivative max_order.
    let mut p = 1usize;
    while accuracy(p, max_order) < q {
        p += 1;
    }
    let offsets: Vec<f64> = (-(p as i64)..=p as i64).map(|j| j as f64).collect();
    let w = fd_weights(0.0, &offsets, max_order);
    let h = (settings.rel_step * s.abs()).max(settings.min_step);

    let mut eval = |step: f64| -> Result<Vec<f64>> {
        let values: Vec<f64> = offsets
            .iter()
            .map(|&o| if o == 0.0 { Ok(center) } else { f(s + o * step) })
            .collect::<Result<_>>()?;
        Ok((1..=max_order)
            .map(|k| w[k].iter().zip(&values).map(|(a, b)| a * b).sum::<f64>() / step.powi(k as i32))
            .collect())
    };
    let coarse = eval(h)?;
    let fine = eval(0.5 * h)?;
    for k in 1..=max_order {
        let r = 2f64.powi(accuracy(p, k) as i32);
        out[k] = (r * fine[k - 1] - coarse[k - 1]) / (r - 1.0);
    }
    Ok(out)
}

/// Derivatives of `exp(g)` from finite differences of `g`.
///
/// Differencing the logarithm keeps the roundoff of nearly exponential
/// functions (such as Laplace transforms) at the level of `g` itself; the
/// derivatives of `exp(g)` follow from `f^(k) = sum_j C(k-1, j) g^(j+1) f^(k-1-j)`.
pub fn fd_derivatives_of_exp<G>(g: G, s: f64, max_order: usize, settings: &LaplaceDerivativeSettings) -> Result<Vec<f64>>
where
    G: FnMut(f64) -> Result<f64>,
{
    let dg = fd_derivatives(g, s, max_order, settings)?;
    let mut f = vec![dg[0].exp(); max_order + 1];
    for k in 1..=max_order {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 0..k {
            acc += binom * dg[j + 1] * f[k - 1 - j];
            binom = binom * (k - 1 - j) as f64 / (j + 1) as f64;
        }
        f[k] = acc;
    }
    Ok(f)
}

/// Truncation order of the `2p + 1`-point central stencil for derivative `k`.
fn accuracy(p: usize, k: usize) -> usize {
    let a = (2 * p + 1).saturating_sub(k);
    a + a % 2
}

/// Runs `integrator` on a fallible integrand, surfacing the first inner error.
fn integrate_fallible<F>(integrator: &Integrator, mut f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outcome = integrator.integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(outcome?.value)
}

/// Results of one theory evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryReport {
    pub p_bd: f64,
    pub p_esd: f64,
    pub p_s: f64,
    pub c_bd: f64,
    pub c_esd: f64,
    pub c_s: f64,
}

/// Evaluator for one scenario. Pure and reentrant; cheap to construct.
#[derive(Debug, Clone)]
pub struct Analyzer {
    scenario: Scenario,
    settings: AnalysisSettings,
    law: DistanceLaw,
    interferer_fading: KappaMuParams,
    /// `(l, mu D_n n!/l! (beta-delta)^{-(n+1)})` for every term of the SR series.
    downlink_terms: Vec<(usize, f64)>,
    max_order: usize,
}

impl Analyzer {
    pub fn new(scenario: Scenario) -> Result<Self> {
        Self::with_settings(scenario, AnalysisSettings::default())
    }

    pub fn with_settings(scenario: Scenario, settings: AnalysisSettings) -> Result<Self> {
        scenario.validate()?;
        settings.quadrature.validate()?;
        if !(settings.derivative.rel_step > 0.0 && settings.derivative.min_step > 0.0) {
            return Err(Error::invalid("finite-difference steps must be positive"));
        }
        let sr = scenario.fading.shadowed;
        let c = sr.decay();
        let downlink_terms = sr
            .series()
            .iter()
            .map(|t| (t.l as usize, t.coeff * c.powi(-(t.n as i32 + 1))))
            .collect();
        Ok(Analyzer {
            law: DistanceLaw::new(scenario.constellation, scenario.r_bd_km),
            interferer_fading: sr.to_kappa_mu(),
            downlink_terms,
            max_order: sr.m as usize - 1,
            scenario,
            settings,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn settings(&self) -> &AnalysisSettings {
        &self.settings
    }

    /// Envelope the marine link must exceed: sqrt(tau sigma^2 R^alpha / (p g)).
    pub fn marine_threshold_envelope(&self) -> f64 {
        let l = &self.scenario.link;
        (self.scenario.tau_linear * l.sigma2_bd * self.scenario.r_bd_m().powf(l.alpha_bd) / (l.p_bd * l.g_bd)).sqrt()
    }

    /// Marine SNR at unit envelope.
    pub fn marine_mean_snr(&self) -> f64 {
        let l = &self.scenario.link;
        l.p_bd * l.g_bd * self.scenario.r_bd_m().powf(-l.alpha_bd) / l.sigma2_bd
    }

    pub fn p_bd(&self) -> Result<f64> {
        let rice = &self.scenario.fading.rician;
        let (a, b) = rice.marcum_args(self.marine_threshold_envelope());
        match self.settings.marcum {
            MarcumMethod::Exact => marcum_q1(a, b),
            MarcumMethod::Approx => Ok(marcum_q1_approx(a, b)),
        }
    }

    fn check_ru(&self, r_u_km: f64) -> Result<()> {
        let r_max = self.scenario.constellation.visible_distance_km();
        let r_min = self.scenario.constellation.altitude_km;
        if !(r_u_km >= r_min && r_u_km <= r_max) {
            return Err(Error::Domain(format!(
                "serving distance {r_u_km} km outside the visible range [{r_min}, {r_max}]"
            )));
        }
        Ok(())
    }

    /// Expected interference deficit per co-channel satellite,
    /// `(2 / span) * int_{r_u}^{r_max} (1 - L_H(s (beta-delta) p_i g_i r^-alpha)) r dr`.
    fn deficit_integrand(&self, s: f64) -> impl Fn(f64) -> f64 + '_ {
        let l = &self.scenario.link;
        let scale = s * self.scenario.fading.shadowed.decay() * l.p_i * l.g_i;
        let alpha = l.alpha;
        let km = self.interferer_fading;
        move |r_km: f64| km.laplace_complement(scale * (r_km * M_PER_KM).powf(-alpha)) * r_km
    }

    fn deficit_weight(&self, r_u_km: f64) -> f64 {
        let spec = &self.scenario.constellation;
        let span = 4.0 * spec.earth_radius_km * spec.shell_radius_km() - r_u_km * r_u_km
            + spec.altitude_km * spec.altitude_km;
        2.0 / span
    }

    /// Log of the transform from the deficit integral, `-s sigma^2 (beta-delta) + (N/K-1) ln(1 - D)`.
    fn ln_laplace_from_deficit(&self, s: f64, deficit: f64) -> f64 {
        let noise = -s * self.scenario.link.sigma2_d * self.scenario.fading.shadowed.decay();
        let k = self.scenario.constellation.max_interferers();
        if k == 0 {
            return noise;
        }
        noise + k as f64 * (-deficit).ln_1p()
    }

    fn inner_integrator(&self) -> Integrator {
        Integrator::new(0.0, 1e-10, self.settings.quadrature.max_subdivisions)
    }

    /// Laplace transform of `(beta - delta) (sigma_d^2 + I)` given the serving distance.
    pub fn interference_laplace(&self, r_u_km: f64, s: f64) -> Result<f64> {
        self.check_ru(r_u_km)?;
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("transform argument must be finite and >= 0, got {s}")));
        }
        let r_max = self.scenario.constellation.visible_distance_km();
        let integral = self.inner_integrator().integrate(self.deficit_integrand(s), r_u_km, r_max)?;
        Ok(self.ln_laplace_from_deficit(s, self.deficit_weight(r_u_km) * integral.value).exp())
    }

    /// `L, L', ..., L^(max_order)` at `s`: finite differences of `ln L` on a
    /// quadrature partition frozen at `s`.
    pub fn laplace_derivatives(&self, r_u_km: f64, s: f64, max_order: usize) -> Result<Vec<f64>> {
        self.check_ru(r_u_km)?;
        let r_max = self.scenario.constellation.visible_distance_km();
        let weight = self.deficit_weight(r_u_km);
        let (_, partition): (_, Partition) =
            self.inner_integrator().integrate_with_partition(self.deficit_integrand(s), r_u_km, r_max)?;
        let ln_at = |x: f64| -> Result<f64> {
            let deficit = weight * partition.apply(self.deficit_integrand(x));
            Ok(self.ln_laplace_from_deficit(x, deficit))
        };
        fd_derivatives_of_exp(ln_at, s, max_order, &self.settings.derivative)
    }

    pub fn laplace_derivative(&self, r_u_km: f64, s: f64, order: usize) -> Result<f64> {
        if order > self.max_order {
            return Err(Error::invalid(format!(
                "derivative order {order} exceeds m - 1 = {}",
                self.max_order
            )));
        }
        Ok(self.laplace_derivatives(r_u_km, s, order)?[order])
    }

    /// P(uplink SNR > tau) at serving distance `r_u_km`.
    pub fn uplink_success(&self, r_u_km: f64) -> f64 {
        let l = &self.scenario.link;
        if r_u_km > self.scenario.constellation.visible_distance_km() {
            return 0.0;
        }
        let x = self.scenario.tau_linear * l.sigma2_u * (r_u_km * M_PER_KM).powf(l.alpha) / (l.p_u * l.g_u);
        self.scenario.fading.shadowed.ccdf(x)
    }

    /// `s = threshold * R_d^alpha / (p_d g_d)` with the right-triangle R_d.
    pub fn downlink_argument(&self, r_u_km: f64, threshold: f64) -> f64 {
        let l = &self.scenario.link;
        let r_d_m = approx_rd(r_u_km, self.scenario.r_bd_km) * M_PER_KM;
        threshold * r_d_m.powf(l.alpha) / (l.p_d * l.g_d)
    }

    /// P(downlink SINR > threshold) given `r_u`, through `s = downlink_argument(r_u, threshold)`.
    pub fn downlink_success(&self, r_u_km: f64, s: f64) -> Result<f64> {
        let derivs = if s == 0.0 {
            // (-s)^l kills every l >= 1 term.
            vec![self.interference_laplace(r_u_km, 0.0)?]
        } else {
            self.laplace_derivatives(r_u_km, s, self.max_order)?
        };
        let total: f64 = self
            .downlink_terms
            .iter()
            .filter(|(l, _)| *l < derivs.len())
            .map(|&(l, coeff)| coeff * (-s).powi(l as i32) * derivs[l])
            .sum();
        Ok(total.clamp(0.0, 1.0))
    }

    /// Space-link success probability given the marine link failed.
    pub fn p_esd(&self) -> Result<f64> {
        let (r_min, r_max) = (
            self.scenario.constellation.altitude_km,
            self.scenario.constellation.visible_distance_km(),
        );
        let tau = self.scenario.tau_linear;
        integrate_fallible(
            &self.settings.quadrature.integrator(),
            |r| {
                let pdf = self.law.ru_pdf(r);
                let up = self.uplink_success(r);
                if pdf == 0.0 || up == 0.0 {
                    return Ok(0.0);
                }
                Ok(pdf * up * self.downlink_success(r, self.downlink_argument(r, tau))?)
            },
            r_min,
            r_max,
        )
    }

    pub fn p_s(&self) -> Result<f64> {
        let p_bd = self.p_bd()?;
        Ok(combine(p_bd, self.p_esd()?))
    }

    fn rician_upper_cut(&self) -> f64 {
        let rice = &self.scenario.fading.rician;
        rice.v + self.settings.quadrature.x_max_sigmas * rice.rho
    }

    /// Marine capacity accumulated over envelopes that clear the threshold, bit/s.
    pub fn c_bd(&self) -> Result<f64> {
        let x0 = self.marine_threshold_envelope();
        let hi = self.rician_upper_cut();
        if x0 >= hi {
            return Ok(0.0);
        }
        let rice = self.scenario.fading.rician;
        let snr = self.marine_mean_snr();
        let v = self
            .settings
            .quadrature
            .integrator()
            .integrate(|x| (snr * x * x).ln_1p() / std::f64::consts::LN_2 * rice.pdf(x), x0, hi)?;
        Ok(self.scenario.link.b_bd * v.value)
    }

    /// Ergodic downlink spectral efficiency averaged over the serving distance, bit/s/Hz.
    ///
    /// Inner integral is `int_0^T P(SINR_d > 2^t - 1) dt`, truncated where the
    /// tail falls below 1e-12 of its largest value.
    pub fn space_spectral_efficiency(&self) -> Result<f64> {
        let (r_min, r_max) = (
            self.scenario.constellation.altitude_km,
            self.scenario.constellation.visible_distance_km(),
        );
        let integrator = self.settings.quadrature.integrator();
        let t_cap = self.settings.quadrature.t_max_bits;
        integrate_fallible(
            &integrator,
            |r| {
                let pdf = self.law.ru_pdf(r);
                if pdf == 0.0 {
                    return Ok(0.0);
                }
                let tail = |t: f64| self.downlink_success(r, self.downlink_argument(r, t.exp2() - 1.0));
                let t_end = self.tail_cut(&tail, t_cap)?;
                Ok(pdf * integrate_fallible(&integrator, tail, 0.0, t_end)?)
            },
            r_min,
            r_max,
        )
    }

    /// First grid point where `tail` drops below 1e-12 of its running maximum.
    fn tail_cut<F: Fn(f64) -> Result<f64>>(&self, tail: &F, t_cap: f64) -> Result<f64> {
        const STEP: f64 = 0.5;
        let mut peak = 0.0f64;
        let mut t = 0.0;
        while t < t_cap {
            let v = tail(t)?;
            peak = peak.max(v);
            if peak > 0.0 && v < 1e-12 * peak {
                return Ok(t);
            }
            if peak == 0.0 && t > 0.0 {
                return Ok(t);
            }
            t += STEP;
        }
        Ok(t_cap)
    }

    /// Space-link capacity weighted by the probability the marine link fails, bit/s.
    pub fn c_esd(&self) -> Result<f64> {
        let x0 = self.marine_threshold_envelope();
        let fail_mass = self.scenario.fading.rician.cdf(x0)?;
        if fail_mass == 0.0 {
            return Ok(0.0);
        }
        Ok(self.scenario.link.b_esd * fail_mass * self.space_spectral_efficiency()?)
    }

    pub fn c_s(&self) -> Result<f64> {
        Ok(self.c_bd()? + self.c_esd()?)
    }

    /// Largest shore-to-ship distance at which an unfaded marine link clears the threshold, metres.
    pub fn switch_radius_m(&self) -> f64 {
        let l = &self.scenario.link;
        (l.p_bd * l.g_bd / (self.scenario.tau_linear * l.sigma2_bd)).powf(1.0 / l.alpha_bd)
    }

    /// Capacity with a deterministic marine channel: AWGN marine capacity inside the
    /// switch radius (inclusive), the unconditional space-link capacity beyond it.
    pub fn c_s_awgn_limit(&self) -> Result<f64> {
        if self.scenario.r_bd_m() <= self.switch_radius_m() {
            Ok(self.scenario.link.b_bd * self.marine_mean_snr().log2_1p())
        } else {
            Ok(self.scenario.link.b_esd * self.space_spectral_efficiency()?)
        }
    }

    pub fn report(&self) -> Result<TheoryReport> {
        let p_bd = self.p_bd()?;
        let p_esd = self.p_esd()?;
        let c_bd = self.c_bd()?;
        let c_esd = self.c_esd()?;
        Ok(TheoryReport {
            p_bd,
            p_esd,
            p_s: combine(p_bd, p_esd),
            c_bd,
            c_esd,
            c_s: c_bd + c_esd,
        })
    }

    /// Success probability and capacity only, skipping capacity work when not needed.
    pub fn success_report(&self) -> Result<(f64, f64, f64)> {
        let p_bd = self.p_bd()?;
        let p_esd = self.p_esd()?;
        Ok((p_bd, p_esd, combine(p_bd, p_esd)))
    }
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

#[inline]
fn combine(p_bd: f64, p_esd: f64) -> f64 {
    (p_bd + (1.0 - p_bd) * p_esd).clamp(0.0, 1.0)
}

pub fn p_bd(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.p_bd()
}

pub fn p_esd(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.p_esd()
}

pub fn p_s(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.p_s()
}

pub fn c_bd(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.c_bd()
}

pub fn c_esd(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.c_esd()
}

pub fn c_s(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.c_s()
}

pub fn c_s_awgn_limit(scenario: &Scenario) -> Result<f64> {
    Analyzer::new(*scenario)?.c_s_awgn_limit()
}

pub fn interference_laplace(scenario: &Scenario, r_u_km: f64, s: f64) -> Result<f64> {
    Analyzer::new(*scenario)?.interference_laplace(r_u_km, s)
}

pub fn laplace_derivative(scenario: &Scenario, r_u_km: f64, s: f64, order: usize) -> Result<f64> {
    Analyzer::new(*scenario)?.laplace_derivative(r_u_km, s, order)
}
