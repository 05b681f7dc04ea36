//! TOML configuration with mandatory unit suffixes.
//!
//! ```toml
//! [constellation]
//! n_sats = 1000
//! n_channels = 10
//! altitude = "1200 km"
//!
//! [link]
//! p_bd = "80 W"
//! g_bd = "2 dBi"
//! sigma2_bd = "-100 dBm"     # or "-174 dBm/Hz", scaled by b_bd
//! b_bd = "30 MHz"
//!
//! [fading]
//! k_rician = "10 linear"
//! sr_m = 3
//!
//! [scenario]
//! r_bd = "40 nmile"
//! tau = "10 dB"
//!
//! [sweep]
//! axis = "tau_db"
//! values = [0, 5, 10]
//! engines = ["theory", "mc_distributional"]
//! ```
//!
//! Every scenario key is optional and falls back to the reference parameter
//! set; `sweep.axis` and `sweep.values` are required when `[sweep]` is present.
//! Unknown keys are rejected by name.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fading::FadingSpec;
use crate::model::{db_to_linear, dbm_to_watts, ConstellationSpec, Scenario, KM_PER_NMILE};
use crate::sweep::{Engine, SweepAxis, SweepSpec};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    constellation: RawConstellation,
    #[serde(default)]
    link: RawLink,
    #[serde(default)]
    fading: RawFading,
    #[serde(default)]
    scenario: RawScenario,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstellation {
    n_sats: Option<Scalar>,
    n_channels: Option<Scalar>,
    altitude: Option<Scalar>,
    earth_radius: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    p_bd: Option<Scalar>,
    p_u: Option<Scalar>,
    p_d: Option<Scalar>,
    p_i: Option<Scalar>,
    g_bd: Option<Scalar>,
    g_u: Option<Scalar>,
    g_d: Option<Scalar>,
    g_i: Option<Scalar>,
    alpha_bd: Option<Scalar>,
    alpha: Option<Scalar>,
    sigma2_bd: Option<Scalar>,
    sigma2_u: Option<Scalar>,
    sigma2_d: Option<Scalar>,
    b_bd: Option<Scalar>,
    b_esd: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFading {
    k_rician: Option<Scalar>,
    sr_b: Option<Scalar>,
    sr_m: Option<Scalar>,
    sr_omega: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    r_bd: Option<Scalar>,
    tau: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Option<String>,
    values: Option<Vec<f64>>,
    engines: Option<Vec<String>>,
    mc_trials: Option<u64>,
    seed: Option<u64>,
    label: Option<String>,
}

/// What a configuration file describes: always a scenario, optionally a sweep over it.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Power,
    Noise { bandwidth_hz: f64 },
    Gain,
    Ratio,
    Length,
    Bandwidth,
}

impl Kind {
    fn units(&self) -> &'static [&'static str] {
        match self {
            Kind::Power => &["W", "mW", "dBm", "dBW"],
            Kind::Noise { .. } => &["W", "mW", "dBm", "dBW", "dBm/Hz"],
            Kind::Gain => &["dBi", "dB", "linear"],
            Kind::Ratio => &["dB", "linear"],
            Kind::Length => &["km", "m", "nmile"],
            Kind::Bandwidth => &["Hz", "kHz", "MHz", "GHz"],
        }
    }
}

fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let t = text.trim();
    let end = t
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+' || ((c == 'e' || c == 'E') && i > 0)))
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    // A trailing exponent marker belongs to the unit (e.g. "3 e" is not a number).
    let (mut num, mut unit) = t.split_at(end);
    while num.ends_with(['e', 'E']) {
        let cut = num.len() - 1;
        unit = &t[cut..];
        num = &t[..cut];
    }
    Some((num.trim().parse().ok()?, unit.trim()))
}

fn quantity(key: &str, raw: &Scalar, kind: Kind) -> Result<f64> {
    let allowed = kind.units().join(", ");
    let text = match raw {
        Scalar::Text(t) => t,
        Scalar::Int(_) | Scalar::Float(_) => {
            return Err(Error::config(key, format!("missing unit; write the value as a string with one of: {allowed}")))
        }
    };
    let (v, unit) = split_quantity(text).ok_or_else(|| Error::config(key, format!("cannot parse `{text}` as a quantity")))?;
    if unit.is_empty() {
        return Err(Error::config(key, format!("missing unit in `{text}`; expected one of: {allowed}")));
    }
    if !kind.units().contains(&unit) {
        return Err(Error::config(key, format!("unit `{unit}` not accepted here; expected one of: {allowed}")));
    }
    let out = match (kind, unit) {
        (_, "W") => v,
        (_, "mW") => v * 1e-3,
        (_, "dBm") => dbm_to_watts(v),
        (_, "dBW") => db_to_linear(v),
        (Kind::Noise { bandwidth_hz }, "dBm/Hz") => dbm_to_watts(v) * bandwidth_hz,
        (_, "dBi" | "dB") => db_to_linear(v),
        (_, "linear") => v,
        (_, "km") => v,
        (_, "m") => v / 1000.0,
        (_, "nmile") => v * KM_PER_NMILE,
        (_, "Hz") => v,
        (_, "kHz") => v * 1e3,
        (_, "MHz") => v * 1e6,
        (_, "GHz") => v * 1e9,
        _ => unreachable!("unit list and conversion table agree"),
    };
    if !out.is_finite() {
        return Err(Error::config(key, format!("`{text}` is not finite")));
    }
    Ok(out)
}

fn number(key: &str, raw: &Scalar) -> Result<f64> {
    match raw {
        Scalar::Int(i) => Ok(*i as f64),
        Scalar::Float(f) => Ok(*f),
        Scalar::Text(t) => Err(Error::config(key, format!("expects a plain number, got `{t}`"))),
    }
}

fn count(key: &str, raw: &Scalar) -> Result<u32> {
    match raw {
        Scalar::Int(i) if *i >= 0 && *i <= u32::MAX as i64 => Ok(*i as u32),
        _ => Err(Error::config(key, "expects a non-negative integer")),
    }
}

fn set<T>(slot: &mut T, key: &str, raw: &Option<Scalar>, parse: impl Fn(&str, &Scalar) -> Result<T>) -> Result<()> {
    if let Some(r) = raw {
        *slot = parse(key, r)?;
    }
    Ok(())
}

fn with_kind(kind: Kind) -> impl Fn(&str, &Scalar) -> Result<f64> {
    move |k, r| quantity(k, r, kind)
}

fn build(raw: RawConfig) -> Result<Config> {
    let mut sc = Scenario::reference();

    let c = &raw.constellation;
    set(&mut sc.constellation.n_sats, "constellation.n_sats", &c.n_sats, count)?;
    set(&mut sc.constellation.n_channels, "constellation.n_channels", &c.n_channels, count)?;
    set(&mut sc.constellation.altitude_km, "constellation.altitude", &c.altitude, with_kind(Kind::Length))?;
    set(&mut sc.constellation.earth_radius_km, "constellation.earth_radius", &c.earth_radius, with_kind(Kind::Length))?;
    ConstellationSpec::validate(&sc.constellation).map_err(|e| Error::config("constellation", e.to_string()))?;

    let l = &raw.link;
    let lb = &mut sc.link;
    set(&mut lb.b_bd, "link.b_bd", &l.b_bd, with_kind(Kind::Bandwidth))?;
    set(&mut lb.b_esd, "link.b_esd", &l.b_esd, with_kind(Kind::Bandwidth))?;
    set(&mut lb.p_bd, "link.p_bd", &l.p_bd, with_kind(Kind::Power))?;
    set(&mut lb.p_u, "link.p_u", &l.p_u, with_kind(Kind::Power))?;
    set(&mut lb.p_d, "link.p_d", &l.p_d, with_kind(Kind::Power))?;
    set(&mut lb.p_i, "link.p_i", &l.p_i, with_kind(Kind::Power))?;
    set(&mut lb.g_bd, "link.g_bd", &l.g_bd, with_kind(Kind::Gain))?;
    set(&mut lb.g_u, "link.g_u", &l.g_u, with_kind(Kind::Gain))?;
    set(&mut lb.g_d, "link.g_d", &l.g_d, with_kind(Kind::Gain))?;
    set(&mut lb.g_i, "link.g_i", &l.g_i, with_kind(Kind::Gain))?;
    set(&mut lb.alpha_bd, "link.alpha_bd", &l.alpha_bd, number)?;
    set(&mut lb.alpha, "link.alpha", &l.alpha, number)?;
    let (b_bd, b_esd) = (lb.b_bd, lb.b_esd);
    set(&mut lb.sigma2_bd, "link.sigma2_bd", &l.sigma2_bd, with_kind(Kind::Noise { bandwidth_hz: b_bd }))?;
    set(&mut lb.sigma2_u, "link.sigma2_u", &l.sigma2_u, with_kind(Kind::Noise { bandwidth_hz: b_esd }))?;
    set(&mut lb.sigma2_d, "link.sigma2_d", &l.sigma2_d, with_kind(Kind::Noise { bandwidth_hz: b_esd }))?;
    sc.link.validate().map_err(|e| Error::config("link", e.to_string()))?;

    let f = &raw.fading;
    let mut k = sc.fading.rician.k_factor;
    let sr = sc.fading.shadowed;
    let (mut b, mut m, mut omega) = (sr.b, sr.m, sr.omega);
    set(&mut k, "fading.k_rician", &f.k_rician, with_kind(Kind::Ratio))?;
    set(&mut b, "fading.sr_b", &f.sr_b, number)?;
    set(&mut m, "fading.sr_m", &f.sr_m, count)?;
    set(&mut omega, "fading.sr_omega", &f.sr_omega, number)?;
    sc.fading = FadingSpec::new(k, b, m, omega).map_err(|e| Error::config("fading", e.to_string()))?;

    let s = &raw.scenario;
    set(&mut sc.r_bd_km, "scenario.r_bd", &s.r_bd, with_kind(Kind::Length))?;
    set(&mut sc.tau_linear, "scenario.tau", &s.tau, with_kind(Kind::Ratio))?;
    sc.validate().map_err(|e| Error::config("scenario", e.to_string()))?;

    let sweep = raw.sweep.map(|w| sweep_spec(w, sc)).transpose()?;
    Ok(Config { scenario: sc, sweep })
}

fn sweep_spec(w: RawSweep, base: Scenario) -> Result<SweepSpec> {
    let axis_name = w.axis.ok_or_else(|| Error::config("sweep.axis", "required key is missing"))?;
    let axis: SweepAxis = axis_name.parse().map_err(|e: Error| Error::config("sweep.axis", e.to_string()))?;
    let values = w.values.ok_or_else(|| Error::config("sweep.values", "required key is missing"))?;
    let engines = match w.engines {
        None => vec![Engine::Theory],
        Some(names) => names
            .iter()
            .map(|n| n.parse())
            .collect::<Result<Vec<Engine>>>()
            .map_err(|e| Error::config("sweep.engines", e.to_string()))?,
    };
    let mut spec = SweepSpec::new(base, axis, values, engines).map_err(|e| Error::config("sweep.values", e.to_string()))?;
    if let Some(t) = w.mc_trials {
        if t == 0 {
            return Err(Error::config("sweep.mc_trials", "must be at least 1"));
        }
        spec.mc_trials = t;
    }
    if let Some(s) = w.seed {
        spec.seed = s;
    }
    spec.label = w.label;
    Ok(spec)
}

/// Parses `value` as a TOML literal, falling back to a bare string.
fn override_value(value: &str) -> toml::Value {
    let probe = format!("v = {value}");
    match probe.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(value.to_string())),
        Err(_) => toml::Value::String(value.to_string()),
    }
}

/// Parses configuration text, then applies `section.key = value` overrides on top.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<Config> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
    for (path, value) in overrides {
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| Error::config(path, "override keys take the form section.key"))?;
        let entry = table
            .entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(sec) = entry else {
            return Err(Error::config(section, "is not a section"));
        };
        sec.insert(key.to_string(), override_value(value));
    }
    let raw: RawConfig = table.try_into().map_err(|e: toml::de::Error| {
        let where_ = e.message().split('`').nth(1).unwrap_or("<file>").to_string();
        Error::config(where_, e.message().to_string())
    })?;
    build(raw)
}

pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, overrides)
}

/// The reference parameter set written out in configuration syntax.
pub const REFERENCE_CONFIG: &str = r#"[constellation]
n_sats = 1000
n_channels = 10
altitude = "1200 km"
earth_radius = "6371 km"

[link]
p_bd = "80 W"
p_u = "25 W"
p_d = "10 W"
p_i = "10 W"
g_bd = "2 dBi"
g_u = "48 dBi"
g_d = "38.5 dBi"
g_i = "28.5 dBi"
alpha_bd = 2.9
alpha = 2.4
sigma2_bd = "-100 dBm"
sigma2_u = "-90 dBm"
sigma2_d = "-90 dBm"
b_bd = "30 MHz"
b_esd = "250 MHz"

[fading]
k_rician = "10 linear"
sr_b = 0.3
sr_m = 3
sr_omega = 0.4

[scenario]
r_bd = "40 nmile"
tau = "10 dB"
"#;
