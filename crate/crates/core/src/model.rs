//! Domain records, unit conversions and instantaneous link-budget expressions.
//!
//! Lengths are stored in kilometres. Every path-loss term `R^(-alpha)` is
//! evaluated with the distance in metres; the conversion happens at the
//! boundary of the functions below that take `*_m` arguments.

use crate::error::{Error, Result};
use crate::fading::FadingSpec;

pub const EARTH_RADIUS_KM: f64 = 6371.0;
pub const KM_PER_NMILE: f64 = 1.852;
pub const M_PER_KM: f64 = 1000.0;

/// Supported scalar conversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conversion {
    DbToLinear,
    DbmToWatts,
    DbiToLinear,
    NmileToKm,
    /// Noise PSD in dBm/Hz multiplied by a bandwidth in Hz.
    PsdBandwidthToWatts { bandwidth_hz: f64 },
}

pub fn unit_convert(value: f64, kind: Conversion) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::invalid(format!("non-finite input {value} to {kind:?}")));
    }
    Ok(match kind {
        Conversion::DbToLinear | Conversion::DbiToLinear => db_to_linear(value),
        Conversion::DbmToWatts => dbm_to_watts(value),
        Conversion::NmileToKm => value * KM_PER_NMILE,
        Conversion::PsdBandwidthToWatts { bandwidth_hz } => {
            if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
                return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth_hz}")));
            }
            dbm_to_watts(value) * bandwidth_hz
        }
    })
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1000.0).log10()
}

/// Size and shell geometry of the constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationSpec {
    pub n_sats: u32,
    pub n_channels: u32,
    pub altitude_km: f64,
    pub earth_radius_km: f64,
}

impl ConstellationSpec {
    pub fn new(n_sats: u32, n_channels: u32, altitude_km: f64) -> Result<Self> {
        let spec = ConstellationSpec {
            n_sats,
            n_channels,
            altitude_km,
            earth_radius_km: EARTH_RADIUS_KM,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sats < 1 {
            return Err(Error::invalid("constellation needs at least one satellite"));
        }
        if self.n_channels < 1 || self.n_channels > self.n_sats {
            return Err(Error::invalid(format!(
                "channel count {} must lie in [1, {}]",
                self.n_channels, self.n_sats
            )));
        }
        if self.n_sats % self.n_channels != 0 {
            return Err(Error::invalid(format!(
                "{} satellites cannot be split evenly over {} channels",
                self.n_sats, self.n_channels
            )));
        }
        if !(self.altitude_km > 0.0 && self.altitude_km.is_finite()) {
            return Err(Error::invalid(format!("altitude must be positive, got {}", self.altitude_km)));
        }
        if !(self.earth_radius_km > 0.0 && self.earth_radius_km.is_finite()) {
            return Err(Error::invalid("earth radius must be positive"));
        }
        Ok(())
    }

    /// r_a = r_e + r_min
    #[inline]
    pub fn shell_radius_km(&self) -> f64 {
        self.earth_radius_km + self.altitude_km
    }

    /// Largest ES-to-satellite distance with the satellite above the horizon.
    #[inline]
    pub fn visible_distance_km(&self) -> f64 {
        self.visible_distance_sq_km2().sqrt()
    }

    #[inline]
    pub fn visible_distance_sq_km2(&self) -> f64 {
        2.0 * self.earth_radius_km * self.altitude_km + self.altitude_km * self.altitude_km
    }

    /// Largest possible ES-to-satellite distance (antipodal point of the shell).
    #[inline]
    pub fn farthest_distance_km(&self) -> f64 {
        2.0 * self.earth_radius_km + self.altitude_km
    }

    #[inline]
    pub fn sats_per_channel(&self) -> u32 {
        self.n_sats / self.n_channels
    }

    /// Co-channel satellites other than the serving one.
    #[inline]
    pub fn max_interferers(&self) -> u32 {
        self.sats_per_channel() - 1
    }
}

/// Transmit powers, gains, path-loss exponents, noise powers and bandwidths.
/// Powers in watts, gains linear, bandwidths in hertz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_bd: f64,
    pub p_u: f64,
    pub p_d: f64,
    pub p_i: f64,
    pub g_bd: f64,
    pub g_u: f64,
    pub g_d: f64,
    pub g_i: f64,
    pub alpha_bd: f64,
    pub alpha: f64,
    pub sigma2_bd: f64,
    pub sigma2_u: f64,
    pub sigma2_d: f64,
    pub b_bd: f64,
    pub b_esd: f64,
}

impl LinkBudget {
    /// Reference maritime parameter set: MF marine link, Ka-band space link,
    /// noise from a -174 dBm/Hz PSD over 30 MHz and 250 MHz.
    pub fn reference() -> Self {
        LinkBudget {
            p_bd: 80.0,
            p_u: 25.0,
            p_d: 10.0,
            p_i: 10.0,
            g_bd: db_to_linear(2.0),
            g_u: db_to_linear(48.0),
            g_d: db_to_linear(38.5),
            g_i: db_to_linear(28.5),
            alpha_bd: 2.9,
            alpha: 2.4,
            sigma2_bd: dbm_to_watts(-100.0),
            sigma2_u: dbm_to_watts(-90.0),
            sigma2_d: dbm_to_watts(-90.0),
            b_bd: 30e6,
            b_esd: 250e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_bd", self.p_bd),
            ("p_u", self.p_u),
            ("p_d", self.p_d),
            ("p_i", self.p_i),
            ("g_bd", self.g_bd),
            ("g_u", self.g_u),
            ("g_d", self.g_d),
            ("g_i", self.g_i),
            ("sigma2_bd", self.sigma2_bd),
            ("sigma2_u", self.sigma2_u),
            ("sigma2_d", self.sigma2_d),
            ("b_bd", self.b_bd),
            ("b_esd", self.b_esd),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be strictly positive, got {v}")));
            }
        }
        for (name, v) in [("alpha_bd", self.alpha_bd), ("alpha", self.alpha)] {
            if !(v > 1.0 && v <= 6.0) {
                return Err(Error::invalid(format!("{name} must lie in (1, 6], got {v}")));
            }
        }
        Ok(())
    }
}

/// Two-level satellite beam pattern: main lobe inside `phi_th_rad`, side lobe outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPattern {
    pub phi_th_rad: f64,
    pub g_main: f64,
    pub g_side: f64,
}

impl BeamPattern {
    pub fn new(phi_th_rad: f64, g_main: f64, g_side: f64) -> Result<Self> {
        if !(phi_th_rad > 0.0 && phi_th_rad < std::f64::consts::PI) {
            return Err(Error::invalid(format!("threshold angle {phi_th_rad} outside (0, pi)")));
        }
        Ok(BeamPattern {
            phi_th_rad,
            g_main,
            g_side,
        })
    }
}

/// Boundary `|phi| == phi_th` belongs to the main lobe.
pub fn antenna_gain(pattern: &BeamPattern, phi_rad: f64) -> f64 {
    if phi_rad.abs() <= pattern.phi_th_rad {
        pattern.g_main
    } else {
        pattern.g_side
    }
}

/// The unit of evaluation: constellation, link budget, fading, shore-to-ship
/// distance and decoding threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub constellation: ConstellationSpec,
    pub link: LinkBudget,
    pub fading: FadingSpec,
    pub r_bd_km: f64,
    pub tau_linear: f64,
}

impl Scenario {
    /// N = 1000, K = 10, 1200 km shell, R_bd = 40 n mile, tau = 10 dB.
    pub fn reference() -> Self {
        Scenario {
            constellation: ConstellationSpec {
                n_sats: 1000,
                n_channels: 10,
                altitude_km: 1200.0,
                earth_radius_km: EARTH_RADIUS_KM,
            },
            link: LinkBudget::reference(),
            fading: FadingSpec::reference(),
            r_bd_km: 40.0 * KM_PER_NMILE,
            tau_linear: db_to_linear(10.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constellation.validate()?;
        self.link.validate()?;
        self.fading.validate()?;
        if !(self.r_bd_km > 0.0 && self.r_bd_km.is_finite()) {
            return Err(Error::invalid(format!("R_bd must be positive, got {} km", self.r_bd_km)));
        }
        if !(self.tau_linear > 0.0 && self.tau_linear.is_finite()) {
            return Err(Error::invalid(format!("threshold must be positive, got {}", self.tau_linear)));
        }
        Ok(())
    }

    pub fn with_tau_db(mut self, tau_db: f64) -> Self {
        self.tau_linear = db_to_linear(tau_db);
        self
    }

    pub fn with_r_bd_nmile(mut self, nmile: f64) -> Self {
        self.r_bd_km = nmile * KM_PER_NMILE;
        self
    }

    pub fn tau_db(&self) -> f64 {
        linear_to_db(self.tau_linear)
    }

    pub fn r_bd_m(&self) -> f64 {
        self.r_bd_km * M_PER_KM
    }
}

/// Marine-link SNR for envelope `h_bd` at distance `r_bd_m` metres.
pub fn snr_marine(link: &LinkBudget, h_bd: f64, r_bd_m: f64) -> Result<f64> {
    if r_bd_m <= 0.0 {
        return Err(Error::Domain(format!("marine path loss undefined at distance {r_bd_m} m")));
    }
    Ok(link.p_bd * link.g_bd * h_bd * h_bd * r_bd_m.powf(-link.alpha_bd) / link.sigma2_bd)
}

/// Uplink SNR at the serving satellite; zero once the satellite is below the horizon.
pub fn snr_uplink(link: &LinkBudget, spec: &ConstellationSpec, h_u2: f64, r_u_m: f64) -> f64 {
    if r_u_m > spec.visible_distance_km() * M_PER_KM {
        return 0.0;
    }
    link.p_u * link.g_u * h_u2 * r_u_m.powf(-link.alpha) / link.sigma2_u
}

pub fn sinr_downlink(link: &LinkBudget, h_d2: f64, r_d_m: f64, interference_w: f64) -> f64 {
    link.p_d * link.g_d * h_d2 * r_d_m.powf(-link.alpha) / (link.sigma2_d + interference_w)
}

/// Aggregate co-channel interference from `(power gain, distance in metres)` pairs.
pub fn interference_sum(link: &LinkBudget, interferers: &[(f64, f64)]) -> f64 {
    let scale = link.p_i * link.g_i;
    neumaier_sum(interferers.iter().map(|&(h2, r_m)| scale * h2 * r_m.powf(-link.alpha)))
}

/// Compensated summation; result is insensitive to term order up to a few ulps.
pub fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}
