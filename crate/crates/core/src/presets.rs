//! Sweep presets for each result figure, built on the reference scenario.

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::sweep::{Engine, SweepAxis, SweepSpec};

pub const FIGURE_IDS: [&str; 11] = [
    "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14",
];

const ALTITUDES_KM: [f64; 3] = [600.0, 1200.0, 1800.0];
const SIZES: [f64; 3] = [100.0, 500.0, 1000.0];
/// Channel counts in [10, 100] that split the reference constellation evenly.
const CHANNELS: [f64; 6] = [10.0, 20.0, 25.0, 40.0, 50.0, 100.0];

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// A figure preset: one or more sweeps whose rows are concatenated.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: &'static str,
    pub description: &'static str,
    pub sweeps: Vec<SweepSpec>,
}

impl FigurePreset {
    pub fn with_trials(mut self, trials: u64) -> Self {
        for s in &mut self.sweeps {
            s.mc_trials = trials;
        }
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        for s in &mut self.sweeps {
            s.seed = seed;
        }
        self
    }
}

fn variants(
    base: &Scenario,
    axis: SweepAxis,
    values: &[f64],
    engines: &[Engine],
    by: SweepAxis,
    at: &[f64],
) -> Result<Vec<SweepSpec>> {
    at.iter()
        .map(|&v| {
            let mut s = SweepSpec::new(by.apply(base, v)?, axis, values.to_vec(), engines.to_vec())?;
            s.label = Some(format!("{}[{}={}]", axis.name(), by.name(), v));
            Ok(s)
        })
        .collect()
}

/// Builds preset `id` around `base` (normally the reference scenario).
pub fn figure_preset(id: &str, base: &Scenario) -> Result<FigurePreset> {
    let distributional = [Engine::Theory, Engine::McDistributional];
    let positional = [Engine::Theory, Engine::McPositional];
    let altitudes = grid(400.0, 2000.0, 200.0);
    let sizes = grid(20.0, 400.0, 20.0);
    let ranges = grid(2.0, 80.0, 2.0);

    let (description, sweeps) = match id {
        "fig4" => (
            "success probability of each link versus threshold",
            vec![SweepSpec::new(*base, SweepAxis::TauDb, grid(-10.0, 30.0, 1.0), distributional.to_vec())?],
        ),
        "fig5" => (
            "success probability versus constellation size, per altitude",
            variants(base, SweepAxis::NSats, &sizes, &positional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig6" => (
            "success probability versus altitude, per constellation size",
            variants(base, SweepAxis::AltitudeKm, &altitudes, &distributional, SweepAxis::NSats, &SIZES)?,
        ),
        "fig7" => (
            "success probability versus shore-to-ship distance, per altitude",
            variants(base, SweepAxis::RBdNmile, &ranges, &distributional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig8" => (
            "success probability versus channel count, per altitude",
            variants(base, SweepAxis::NChannels, &CHANNELS, &distributional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig9" => (
            "rate capacity versus altitude, per constellation size",
            variants(base, SweepAxis::AltitudeKm, &altitudes, &distributional, SweepAxis::NSats, &SIZES)?,
        ),
        "fig10" => (
            "rate capacity versus constellation size, per altitude",
            variants(base, SweepAxis::NSats, &sizes, &positional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig11" => (
            "rate capacity versus shore-to-ship distance, per altitude",
            variants(base, SweepAxis::RBdNmile, &ranges, &distributional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig12" => (
            "rate capacity versus channel count, per altitude",
            variants(base, SweepAxis::NChannels, &CHANNELS, &distributional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig13" => (
            "gains over the marine link versus threshold, per altitude (p_s - p_bd and c_s - c_bd)",
            variants(base, SweepAxis::TauDb, &grid(-10.0, 30.0, 1.0), &distributional, SweepAxis::AltitudeKm, &ALTITUDES_KM)?,
        ),
        "fig14" => (
            "gains over the marine link versus shore-to-ship distance (p_s - p_bd and c_s - c_bd)",
            vec![SweepSpec::new(*base, SweepAxis::RBdNmile, ranges, distributional.to_vec())?],
        ),
        other => {
            return Err(Error::invalid(format!(
                "unknown figure `{other}`; expected one of: {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    let id = FIGURE_IDS.into_iter().find(|f| *f == id).expect("matched above");
    Ok(FigurePreset { id, description, sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_builds() {
        let base = Scenario::reference();
        for id in FIGURE_IDS {
            let p = figure_preset(id, &base).unwrap();
            assert_eq!(p.id, id);
            assert!(!p.sweeps.is_empty());
            for s in &p.sweeps {
                s.validate().unwrap();
                for &v in &s.values {
                    s.axis.apply(&s.base, v).unwrap();
                }
            }
        }
        assert!(figure_preset("fig3", &base).is_err());
    }

    #[test]
    fn labels_name_the_variant() {
        let p = figure_preset("fig5", &Scenario::reference()).unwrap();
        assert_eq!(p.sweeps[0].label(), "n_sats[altitude_km=600]");
        assert_eq!(p.sweeps[0].base.constellation.altitude_km, 600.0);
        let p = p.with_trials(123).with_seed(7);
        assert!(p.sweeps.iter().all(|s| s.mc_trials == 123 && s.seed == 7));
    }

    #[test]
    fn grids() {
        assert_eq!(grid(2.0, 8.0, 2.0), vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(grid(-10.0, 30.0, 1.0).len(), 41);
    }
}
