//! One-parameter sweeps evaluated by the analytic engine and/or Monte Carlo.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::Analyzer;
use crate::error::{Error, Result};
use crate::montecarlo::{self, Mode, TrialPlan};
use crate::output::ResultRow;
use crate::model::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    TauDb,
    NSats,
    AltitudeKm,
    RBdNmile,
    NChannels,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::TauDb,
        SweepAxis::NSats,
        SweepAxis::AltitudeKm,
        SweepAxis::RBdNmile,
        SweepAxis::NChannels,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::TauDb => "tau_db",
            SweepAxis::NSats => "n_sats",
            SweepAxis::AltitudeKm => "altitude_km",
            SweepAxis::RBdNmile => "r_bd_nmile",
            SweepAxis::NChannels => "n_channels",
        }
    }

    /// Returns `base` with this axis set to `value`.
    pub fn apply(&self, base: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = *base;
        let as_count = |v: f64| -> Result<u32> {
            if v.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&v) {
                return Err(Error::invalid(format!("{} takes positive integers, got {v}", self.name())));
            }
            Ok(v as u32)
        };
        match self {
            SweepAxis::TauDb => s = s.with_tau_db(value),
            SweepAxis::NSats => s.constellation.n_sats = as_count(value)?,
            SweepAxis::AltitudeKm => s.constellation.altitude_km = value,
            SweepAxis::RBdNmile => s = s.with_r_bd_nmile(value),
            SweepAxis::NChannels => s.constellation.n_channels = as_count(value)?,
        }
        s.validate()?;
        Ok(s)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
                Error::invalid(format!("unknown axis `{s}`; expected one of: {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Theory,
    McDistributional,
    McPositional,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Theory, Engine::McDistributional, Engine::McPositional];

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Theory => "theory",
            Engine::McDistributional => "mc_distributional",
            Engine::McPositional => "mc_positional",
        }
    }

    fn mode(&self) -> Option<Mode> {
        match self {
            Engine::Theory => None,
            Engine::McDistributional => Some(Mode::Distributional),
            Engine::McPositional => Some(Mode::Positional),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            Error::invalid(format!("unknown engine `{s}`; expected theory, mc_distributional or mc_positional"))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub engines: Vec<Engine>,
    pub mc_trials: u64,
    pub seed: u64,
    /// Overrides the axis name in the output (e.g. `n_sats[altitude_km=600]`).
    pub label: Option<String>,
}

impl SweepSpec {
    pub const DEFAULT_TRIALS: u64 = 20_000;
    pub const DEFAULT_SEED: u64 = 1;

    pub fn new(base: Scenario, axis: SweepAxis, values: Vec<f64>, engines: Vec<Engine>) -> Result<Self> {
        let spec = SweepSpec {
            base,
            axis,
            values,
            engines,
            mc_trials: Self::DEFAULT_TRIALS,
            seed: Self::DEFAULT_SEED,
            label: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("a sweep needs at least one value"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sweep values must be finite"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep values must be strictly increasing"));
        }
        if self.engines.is_empty() {
            return Err(Error::invalid("a sweep needs at least one engine"));
        }
        if self.mc_trials == 0 {
            return Err(Error::invalid("mc_trials must be at least 1"));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.axis.name().to_string())
    }
}

/// Evaluates one `(value, engine)` point. Errors are kept in the row.
pub fn evaluate_point(spec: &SweepSpec, value: f64, engine: Engine) -> ResultRow {
    let start = Instant::now();
    let mut row = ResultRow::new(spec.label(), value, engine.name());
    let outcome = spec.axis.apply(&spec.base, value).and_then(|scenario| match engine.mode() {
        None => {
            let r = Analyzer::new(scenario)?.report()?;
            row.fill_theory(&r);
            Ok(())
        }
        Some(mode) => {
            let plan = TrialPlan::new(mode, spec.mc_trials, spec.seed, scenario)?;
            let est = montecarlo::run(&plan)?;
            row.fill_estimate(&est);
            Ok(())
        }
    });
    if let Err(e) = outcome {
        row.set_error(&e);
    }
    row.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    row
}

/// Evaluates every `(value, engine)` pair in parallel. Rows come back in value-major order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let points: Vec<(f64, Engine)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.engines.iter().map(move |&e| (v, e)))
        .collect();
    Ok(points.par_iter().map(|&(v, e)| evaluate_point(spec, v, e)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names_round_trip() {
        for a in SweepAxis::ALL {
            assert_eq!(a.name().parse::<SweepAxis>().unwrap(), a);
        }
        for e in Engine::ALL {
            assert_eq!(e.name().parse::<Engine>().unwrap(), e);
        }
        assert!("tau".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn apply_checks_values() {
        let base = Scenario::reference();
        assert_eq!(SweepAxis::NSats.apply(&base, 500.0).unwrap().constellation.n_sats, 500);
        assert!(SweepAxis::NSats.apply(&base, 500.5).is_err());
        assert!(SweepAxis::NChannels.apply(&base, 7.0).is_err());
        assert!(SweepAxis::AltitudeKm.apply(&base, -1.0).is_err());
        let s = SweepAxis::RBdNmile.apply(&base, 10.0).unwrap();
        assert!((s.r_bd_km - 18.52).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let base = Scenario::reference();
        assert!(SweepSpec::new(base, SweepAxis::TauDb, vec![], vec![Engine::Theory]).is_err());
        assert!(SweepSpec::new(base, SweepAxis::TauDb, vec![2.0, 1.0], vec![Engine::Theory]).is_err());
        assert!(SweepSpec::new(base, SweepAxis::TauDb, vec![1.0], vec![]).is_err());
        assert!(SweepSpec::new(base, SweepAxis::TauDb, vec![f64::NAN], vec![Engine::Theory]).is_err());
    }

    #[test]
    fn errors_stay_in_their_row() {
        let base = Scenario::reference();
        let spec = SweepSpec::new(base, SweepAxis::NChannels, vec![7.0, 10.0], vec![Engine::Theory]).unwrap();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].diag.starts_with("error="));
        assert!(rows[0].p_s.is_none());
        assert!(rows[1].p_s.is_some());
    }

    #[test]
    fn order_is_value_major() {
        let base = Scenario::reference();
        let mut spec = SweepSpec::new(
            base,
            SweepAxis::TauDb,
            vec![0.0, 20.0],
            vec![Engine::Theory, Engine::McDistributional],
        )
        .unwrap();
        spec.mc_trials = 200;
        let rows = run_sweep(&spec).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.value, r.engine.as_str())).collect();
        assert_eq!(
            keys,
            vec![(0.0, "theory"), (0.0, "mc_distributional"), (20.0, "theory"), (20.0, "mc_distributional")]
        );
        assert_eq!(rows[1].n_trials, Some(200));
    }
}
