//! Fading laws: Rician envelopes on the marine link, shadowed-Rician power
//! gains on the space link, and the kappa-mu (mu = 1) form of the latter used
//! for the interference Laplace transform.

pub mod special;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
pub use special::{bessel_i0, bessel_i0e, marcum_q1, marcum_q1_approx};

/// Rician envelope with unit mean power, `v^2 + 2 rho^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianParams {
    pub k_factor: f64,
    pub v: f64,
    pub rho: f64,
}

impl RicianParams {
    pub fn new(k_factor: f64) -> Result<Self> {
        if !(k_factor >= 0.0 && k_factor.is_finite()) {
            return Err(Error::invalid(format!("Rician K-factor must be finite and >= 0, got {k_factor}")));
        }
        let denom = 2.0 * k_factor + 2.0;
        Ok(RicianParams {
            k_factor,
            v: (2.0 * k_factor / denom).sqrt(),
            rho: (1.0 / denom).sqrt(),
        })
    }

    /// Marcum-Q arguments `(v / rho, x / rho)`.
    #[inline]
    pub fn marcum_args(&self, x: f64) -> (f64, f64) {
        (self.v / self.rho, x / self.rho)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let (a, b) = self.marcum_args(x);
        Ok(1.0 - marcum_q1(a, b)?)
    }

    /// P(|H| > x).
    pub fn ccdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(1.0);
        }
        let (a, b) = self.marcum_args(x);
        marcum_q1(a, b)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r2 = self.rho * self.rho;
        let d = x - self.v;
        x / r2 * (-d * d / (2.0 * r2)).exp() * bessel_i0e(x * self.v / r2)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        (self.v + self.rho * g1).hypot(self.rho * g2)
    }
}

/// Shadowed-Rician power gain with integer Nakagami shadowing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowedRicianParams {
    /// Half the average multipath power.
    pub b: f64,
    pub m: u32,
    /// Average LOS power.
    pub omega: f64,
    pub mu: f64,
    pub delta: f64,
    pub beta: f64,
}

/// One `(n, l)` term of the finite CCDF series: `coeff * x^l e^{-(beta-delta) x} (beta-delta)^{-(n+1-l)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub n: u32,
    pub l: u32,
    pub coeff: f64,
}

impl ShadowedRicianParams {
    pub fn new(b: f64, m: u32, omega: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("SR multipath parameter b must be positive, got {b}")));
        }
        if m < 1 {
            return Err(Error::invalid("SR Nakagami parameter m must be an integer >= 1"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid(format!("SR LOS power must be positive, got {omega}")));
        }
        let two_b = 2.0 * b;
        let mf = m as f64;
        let denom = two_b * mf + omega;
        Ok(ShadowedRicianParams {
            b,
            m,
            omega,
            mu: (two_b * mf / denom).powf(mf) / two_b,
            delta: omega / denom / two_b,
            beta: 1.0 / two_b,
        })
    }

    /// Accepts a real-valued `m` and rejects anything that is not a positive integer.
    pub fn with_real_m(b: f64, m: f64, omega: f64) -> Result<Self> {
        if !(m >= 1.0 && m.fract() == 0.0 && m <= u32::MAX as f64) {
            return Err(Error::invalid(format!(
                "SR Nakagami parameter m must be a positive integer for the finite-sum CCDF, got {m}"
            )));
        }
        Self::new(b, m as u32, omega)
    }

    /// beta - delta, the exponential decay rate of the density.
    #[inline]
    pub fn decay(&self) -> f64 {
        self.beta - self.delta
    }

    #[inline]
    pub fn mean_power(&self) -> f64 {
        2.0 * self.b + self.omega
    }

    /// `(1-m)_n (-delta)^n / (n!)^2` for n = 0..m.
    fn pochhammer_weights(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        let one_minus_m = 1.0 - self.m as f64;
        let mut w = 1.0;
        (0..self.m).map(move |n| {
            if n > 0 {
                let nf = n as f64;
                w *= (one_minus_m + nf - 1.0) * (-self.delta) / (nf * nf);
            }
            (n, w)
        })
    }

    /// Terms of the double sum, `coeff = mu (1-m)_n (-delta)^n / (n!)^2 * n! / l!`.
    pub fn series(&self) -> Vec<SeriesTerm> {
        let mut out = Vec::with_capacity((self.m * (self.m + 1) / 2) as usize);
        for (n, w) in self.pochhammer_weights() {
            // n!/l! for l = n, n-1, ..., 0
            let mut ratio = 1.0;
            let mut terms = Vec::with_capacity(n as usize + 1);
            for l in (0..=n).rev() {
                terms.push(SeriesTerm {
                    n,
                    l,
                    coeff: self.mu * w * ratio,
                });
                ratio *= l.max(1) as f64;
            }
            terms.reverse();
            out.extend(terms);
        }
        out
    }

    /// P(|H|^2 > x).
    pub fn ccdf(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        let c = self.decay();
        // Far beyond any representable tail; also keeps x^l from overflowing into inf * 0.
        if c * x > 1400.0 {
            return 0.0;
        }
        let e = (-c * x).exp();
        let s: f64 = self
            .series()
            .iter()
            .map(|t| t.coeff * x.powi(t.l as i32) * c.powi(-((t.n + 1 - t.l) as i32)))
            .sum();
        (s * e).clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.ccdf(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || self.decay() * x > 1400.0 {
            return 0.0;
        }
        let poly: f64 = self.pochhammer_weights().map(|(n, w)| w * x.powi(n as i32)).sum();
        self.mu * (-self.decay() * x).exp() * poly
    }

    /// Diffuse complex Gaussian (power 2b) plus a Gamma-shadowed LOS phasor.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let shadow = Gamma::new(self.m as f64, self.omega / self.m as f64).expect("validated parameters");
        self.sample_with(&shadow, rng)
    }

    /// Sampling with a prebuilt LOS-power distribution, for hot loops.
    #[inline]
    pub fn sample_with<R: Rng + ?Sized>(&self, shadow: &Gamma<f64>, rng: &mut R) -> f64 {
        let los_power = shadow.sample(rng);
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        let amp = los_power.sqrt();
        let sb = self.b.sqrt();
        let re = sb * g1 + amp * theta.cos();
        let im = sb * g2 + amp * theta.sin();
        re * re + im * im
    }

    pub fn shadow_distribution(&self) -> Gamma<f64> {
        Gamma::new(self.m as f64, self.omega / self.m as f64).expect("validated parameters")
    }

    pub fn to_kappa_mu(&self) -> KappaMuParams {
        KappaMuParams {
            kappa: self.omega / (2.0 * self.b),
            mu: 1.0,
            m: self.m,
            h_bar: self.mean_power(),
        }
    }
}

/// kappa-mu parameters with mu fixed to 1; `h_bar` is the mean power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuParams {
    pub kappa: f64,
    pub mu: f64,
    pub m: u32,
    pub h_bar: f64,
}

impl KappaMuParams {
    /// E[exp(-s |H|^2)].
    #[inline]
    pub fn laplace(&self, s: f64) -> f64 {
        let m = self.m as f64;
        let k1 = 1.0 + self.kappa;
        let hs = self.h_bar * s;
        (1.0 + hs / k1).powi(self.m as i32 - 1) * (1.0 + (self.kappa + m) * hs / (k1 * m)).powf(-m)
    }

    /// ln E[exp(-s |H|^2)], accurate for small `s`.
    #[inline]
    pub fn ln_laplace(&self, s: f64) -> f64 {
        let m = self.m as f64;
        let k1 = 1.0 + self.kappa;
        let hs = self.h_bar * s;
        (m - 1.0) * (hs / k1).ln_1p() - m * ((self.kappa + m) * hs / (k1 * m)).ln_1p()
    }

    /// 1 - E[exp(-s |H|^2)] without cancellation near `s = 0`.
    #[inline]
    pub fn laplace_complement(&self, s: f64) -> f64 {
        -self.ln_laplace(s).exp_m1()
    }
}

/// Fading configuration of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    pub rician: RicianParams,
    pub shadowed: ShadowedRicianParams,
}

impl FadingSpec {
    pub fn new(k_rician: f64, sr_b: f64, sr_m: u32, sr_omega: f64) -> Result<Self> {
        Ok(FadingSpec {
            rician: RicianParams::new(k_rician)?,
            shadowed: ShadowedRicianParams::new(sr_b, sr_m, sr_omega)?,
        })
    }

    /// K = 10 on the marine link, SR(0.3, 3, 0.4) on the space link.
    pub fn reference() -> Self {
        Self::new(10.0, 0.3, 3, 0.4).expect("reference fading is valid")
    }

    pub fn validate(&self) -> Result<()> {
        RicianParams::new(self.rician.k_factor)?;
        ShadowedRicianParams::new(self.shadowed.b, self.shadowed.m, self.shadowed.omega)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Integrator;
    use crate::stats::ks_statistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rician_parameters() {
        let p = RicianParams::new(10.0).unwrap();
        assert!((p.v - 0.95346).abs() < 1e-5);
        assert!((p.rho - 0.21320).abs() < 1e-5);
        assert!((p.v * p.v + 2.0 * p.rho * p.rho - 1.0).abs() < 1e-12);
        assert!(RicianParams::new(-1.0).is_err());
        assert_eq!(p.cdf(0.0).unwrap(), 0.0);
        assert!(p.cdf(10.0).unwrap() > 1.0 - 1e-15);
        for &x in &[0.2, 0.7, 1.0, 1.4] {
            let (a, b) = p.marcum_args(x);
            assert_eq!(p.cdf(x).unwrap() + marcum_q1(a, b).unwrap(), 1.0);
        }
    }

    #[test]
    fn rician_pdf_normalised_and_consistent() {
        let q = Integrator::new(1e-13, 1e-11, 2000);
        for &k in &[0.0, 1.0, 10.0, 1e4] {
            let p = RicianParams::new(k).unwrap();
            let hi = p.v + 12.0 * p.rho;
            let total = q.integrate(|x| p.pdf(x), 0.0, hi).unwrap().value;
            assert!((total - 1.0).abs() < 1e-8, "K={k}: {total}");
        }
        let p = RicianParams::new(10.0).unwrap();
        let part = q.integrate(|x| p.pdf(x), 0.0, 0.9).unwrap().value;
        assert!((part - p.cdf(0.9).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn rician_sampler() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = RicianParams::new(10.0).unwrap();
        let n = 1_000_000;
        let mut xs: Vec<f64> = (0..n).map(|_| p.sample(&mut rng)).collect();
        let mean_pow = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((mean_pow - 1.0).abs() < 0.005, "{mean_pow}");
        let ks = ks_statistic(&mut xs, |x| p.cdf(x).unwrap());
        assert!(ks < 0.002, "KS {ks}");

        let los = RicianParams::new(1e6).unwrap();
        let near = (0..10_000).filter(|_| (los.sample(&mut rng) - 1.0).abs() <= 0.01).count();
        assert!(near >= 9_900, "{near}");
    }

    #[test]
    fn shadowed_rician_parameters() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        assert!((p.beta - 1.0 / 0.6).abs() < 1e-15);
        assert!(p.delta > 0.0 && p.delta < p.beta);
        assert!((p.mean_power() - 1.0).abs() < 1e-15);
        assert!(ShadowedRicianParams::with_real_m(0.3, 2.5, 0.4).is_err());
        assert!(ShadowedRicianParams::with_real_m(0.3, 3.0, 0.4).is_ok());
        assert!(ShadowedRicianParams::new(0.0, 3, 0.4).is_err());
        assert!(ShadowedRicianParams::new(0.3, 0, 0.4).is_err());
    }

    #[test]
    fn sr_ccdf_origin_and_tail() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        // At x = 0 only l = 0 terms survive: mu * sum_n (1-m)_n (-delta)^n / n! * c^{-(n+1)} = 1.
        let c = p.decay();
        let mut manual = 0.0;
        let mut poch = 1.0;
        let mut fact = 1.0;
        for n in 0..3 {
            if n > 0 {
                poch *= (1.0 - 3.0) + (n as f64 - 1.0);
                fact *= n as f64;
            }
            manual += poch * (-p.delta).powi(n) / fact * c.powi(-(n + 1));
        }
        assert!((p.mu * manual - 1.0).abs() < 1e-13);
        assert!((p.ccdf(0.0) - 1.0).abs() < 1e-13);
        assert!(p.ccdf(200.0) < 1e-100);
        assert_eq!(p.ccdf(1e200), 0.0);
        assert_eq!(p.pdf(1e200), 0.0);
        for m in 1..6 {
            let q = ShadowedRicianParams::new(0.2, m, 1.3).unwrap();
            assert!((q.ccdf(0.0) - 1.0).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn sr_pdf_normalised_and_matches_ccdf() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        let q = Integrator::new(1e-13, 1e-11, 2000);
        let total = q.integrate(|x| p.pdf(x), 0.0, 60.0).unwrap().value;
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        for &x in &[0.1, 0.5, 1.0, 3.0] {
            let tail = q.integrate(|y| p.pdf(y), x, 60.0).unwrap().value;
            assert!((tail - p.ccdf(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn sr_sampler_moments_and_ks() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let shadow = p.shadow_distribution();
        let mut xs: Vec<f64> = (0..n).map(|_| p.sample_with(&shadow, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "{mean}");
        let ks = ks_statistic(&mut xs, |x| p.cdf(x));
        assert!(ks < 0.003, "KS {ks}");

        // Vanishing LOS: exponential power with mean 2b.
        let ray = ShadowedRicianParams::new(0.3, 3, 1e-12).unwrap();
        let mut ys: Vec<f64> = (0..200_000).map(|_| ray.sample(&mut rng)).collect();
        let ks = ks_statistic(&mut ys, |x| 1.0 - (-x / 0.6).exp());
        assert!(ks < 0.006, "{ks}");
    }

    #[test]
    fn kappa_mu_equivalence() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        let km = p.to_kappa_mu();
        assert!((km.kappa - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(km.mu, 1.0);
        assert_eq!(km.m, 3);
        assert!((km.h_bar - 1.0).abs() < 1e-15);
        assert_eq!(ShadowedRicianParams::new(0.25, 2, 0.5).unwrap().to_kappa_mu().kappa, 1.0);
        assert_eq!(km.laplace(0.0), 1.0);
        let h = 1e-6;
        let slope = (km.laplace(h) - km.laplace(-h)) / (2.0 * h);
        assert!((slope + km.h_bar).abs() < 1e-6, "{slope}");
        for &s in &[1e-12, 1e-3, 0.7, 40.0] {
            assert!((km.ln_laplace(s).exp() - km.laplace(s)).abs() < 1e-14);
            assert!((km.laplace_complement(s) - (1.0 - km.laplace(s))).abs() < 1e-14);
        }
        assert!((km.laplace_complement(1e-12) / 1e-12 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kappa_mu_completely_monotone() {
        let km = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap().to_kappa_mu();
        let vals: Vec<f64> = (0..200).map(|i| km.laplace(0.05 * i as f64)).collect();
        for w in vals.windows(3) {
            assert!(w[0] > 0.0 && w[1] < w[0] && w[2] - 2.0 * w[1] + w[0] > 0.0);
        }
    }

    #[test]
    fn kappa_mu_matches_sampler_expectation() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        let km = p.to_kappa_mu();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shadow = p.shadow_distribution();
        let xs: Vec<f64> = (0..1_000_000).map(|_| p.sample_with(&shadow, &mut rng)).collect();
        for &s in &[0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let vals: Vec<f64> = xs.iter().map(|x| (-s * x).exp()).collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt();
            assert!((mean - km.laplace(s)).abs() < 3.0 * se + 1e-12, "s={s}: {mean} vs {}", km.laplace(s));
        }
    }

    #[test]
    fn series_terms_layout() {
        let p = ShadowedRicianParams::new(0.3, 3, 0.4).unwrap();
        let terms = p.series();
        assert_eq!(terms.len(), 6);
        assert_eq!((terms[0].n, terms[0].l), (0, 0));
        assert_eq!(terms[0].coeff, p.mu);
        // n = 2: coefficients n!/l! = 2, 2, 1 for l = 0, 1, 2.
        let n2: Vec<_> = terms.iter().filter(|t| t.n == 2).collect();
        assert!((n2[0].coeff / n2[2].coeff - 2.0).abs() < 1e-14);
        assert!((n2[1].coeff / n2[2].coeff - 2.0).abs() < 1e-14);
    }
}
