//! Constellation sampling on the orbital shell and the distance laws of the
//! serving satellite, co-channel interferers and the serving-satellite-to-ship
//! distance under the right-triangle approximation.
//!
//! All distances here are kilometres.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::model::ConstellationSpec;

/// A satellite position on the shell of radius `radius_km`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellPoint {
    pub unit_vector: [f64; 3],
    pub radius_km: f64,
}

impl ShellPoint {
    pub fn position_km(&self) -> [f64; 3] {
        self.unit_vector.map(|c| c * self.radius_km)
    }

    pub fn distance_to_km(&self, p: [f64; 3]) -> f64 {
        let q = self.position_km();
        ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) + (q[2] - p[2]).powi(2)).sqrt()
    }
}

/// Sampled satellites with their channel labels (`0..K`, each used `N/K` times).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub points: Vec<ShellPoint>,
    pub channels: Vec<u32>,
}

/// Isotropic direction from a normalised standard-normal triple.
pub fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let g: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if norm > 0.0 {
            return g.map(|c| c / norm);
        }
    }
}

/// N i.i.d. uniform points on the shell and a uniformly random equal split into K channels.
pub fn sample_constellation<R: Rng + ?Sized>(spec: &ConstellationSpec, rng: &mut R) -> Result<Constellation> {
    spec.validate()?;
    let radius_km = spec.shell_radius_km();
    let points = (0..spec.n_sats)
        .map(|_| ShellPoint {
            unit_vector: sample_unit_vector(rng),
            radius_km,
        })
        .collect();
    let per = spec.sats_per_channel();
    let mut channels: Vec<u32> = (0..spec.n_channels).flat_map(|k| std::iter::repeat_n(k, per as usize)).collect();
    channels.shuffle(rng);
    Ok(Constellation { points, channels })
}

/// `sqrt(r_u^2 + r_bd^2)`: the serving satellite treated as overhead of the shore station.
#[inline]
pub fn approx_rd(r_u_km: f64, r_bd_km: f64) -> f64 {
    r_u_km.hypot(r_bd_km)
}

/// Distance distributions for one constellation and shore-to-ship distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceLaw {
    pub spec: ConstellationSpec,
    pub r_bd_km: f64,
}

impl DistanceLaw {
    pub fn new(spec: ConstellationSpec, r_bd_km: f64) -> Self {
        DistanceLaw { spec, r_bd_km }
    }

    #[inline]
    fn r_min(&self) -> f64 {
        self.spec.altitude_km
    }

    /// 4 r_e r_a, the squared-distance span of the shell seen from the station.
    #[inline]
    fn span(&self) -> f64 {
        4.0 * self.spec.earth_radius_km * self.spec.shell_radius_km()
    }

    #[inline]
    fn r_far(&self) -> f64 {
        self.spec.farthest_distance_km()
    }

    /// Support of the station-to-serving-satellite distance.
    pub fn ru_support(&self) -> (f64, f64) {
        (self.r_min(), self.r_far())
    }

    /// Support of the approximated serving-satellite-to-ship distance.
    pub fn rd_support(&self) -> (f64, f64) {
        (approx_rd(self.r_min(), self.r_bd_km), approx_rd(self.r_far(), self.r_bd_km))
    }

    /// Probability that one uniform satellite lies within `r_u` of the station.
    #[inline]
    fn cap_fraction(&self, r_u: f64) -> f64 {
        (r_u * r_u - self.r_min() * self.r_min()) / self.span()
    }

    pub fn ru_cdf(&self, r_u: f64) -> f64 {
        if r_u <= self.r_min() {
            return 0.0;
        }
        if r_u >= self.r_far() {
            return 1.0;
        }
        let outside = (1.0 - self.cap_fraction(r_u)).max(0.0);
        -(self.spec.n_sats as f64 * outside.ln()).exp_m1()
    }

    pub fn ru_pdf(&self, r_u: f64) -> f64 {
        if r_u < self.r_min() || r_u > self.r_far() {
            return 0.0;
        }
        let n = self.spec.n_sats as f64;
        let outside = (1.0 - self.cap_fraction(r_u)).max(0.0);
        let tail = if self.spec.n_sats == 1 {
            1.0
        } else {
            outside.powf(n - 1.0)
        };
        2.0 * r_u * n / self.span() * tail
    }

    /// Density of an interferer's distance given the serving distance `r_u`.
    pub fn rj_pdf_given_ru(&self, r_j: f64, r_u: f64) -> f64 {
        if r_j <= r_u || r_j >= self.r_far() {
            return 0.0;
        }
        2.0 * r_j / (self.span() - r_u * r_u + self.r_min() * self.r_min())
    }

    /// Probability that a co-channel satellite farther than `r_u` is above the horizon.
    pub fn p_interferer(&self, r_u: f64) -> f64 {
        let x = (r_u * r_u - self.r_min() * self.r_min()) / (2.0 * self.spec.earth_radius_km);
        let num = self.r_min() - x;
        let den = 2.0 * self.spec.shell_radius_km() - x;
        (num / den).clamp(0.0, 1.0)
    }

    pub fn rd_cdf(&self, r_d: f64) -> f64 {
        let (lo, _) = self.rd_support();
        if r_d <= lo {
            return 0.0;
        }
        self.ru_cdf((r_d * r_d - self.r_bd_km * self.r_bd_km).sqrt())
    }

    /// Derivative of [`Self::rd_cdf`]; Jacobian `r_d / r_u` applied to the R_u density.
    pub fn rd_pdf(&self, r_d: f64) -> f64 {
        let (lo, hi) = self.rd_support();
        if r_d < lo || r_d > hi {
            return 0.0;
        }
        let r_u = (r_d * r_d - self.r_bd_km * self.r_bd_km).sqrt();
        if r_u <= 0.0 {
            return 0.0;
        }
        self.ru_pdf(r_u) * r_d / r_u
    }

    /// Inverse transform of `u` in [0, 1] through the R_u CDF.
    pub fn ru_quantile(&self, u: f64) -> f64 {
        let n = self.spec.n_sats as f64;
        let u = u.clamp(0.0, 1.0);
        // 1 - (1-u)^(1/N) without cancellation for small u.
        let frac = -((-u).ln_1p() / n).exp_m1();
        let r2 = self.r_min() * self.r_min() + self.span() * frac;
        r2.sqrt().min(self.r_far())
    }

    pub fn sample_ru<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.ru_quantile(rng.random::<f64>())
    }

    /// An interferer distance conditioned on lying in the visible band `(r_u, r_max)`.
    pub fn sample_visible_rj<R: Rng + ?Sized>(&self, r_u: f64, rng: &mut R) -> f64 {
        let r_max2 = self.spec.visible_distance_sq_km2();
        let u: f64 = rng.random();
        (r_u * r_u + u * (r_max2 - r_u * r_u)).sqrt()
    }
}
