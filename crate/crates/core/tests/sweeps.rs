use sealink::analysis::Analyzer;
use sealink::config::parse_config;
use sealink::model::Scenario;
use sealink::output::to_csv;
use sealink::presets::figure_preset;
use sealink::sweep::{run_sweep, Engine, SweepAxis, SweepSpec};

#[test]
fn single_value_sweep_equals_direct_evaluation() {
    let base = Scenario::reference();
    let spec = SweepSpec::new(base, SweepAxis::TauDb, vec![8.0], vec![Engine::Theory]).unwrap();
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 1);
    let direct = Analyzer::new(base.with_tau_db(8.0)).unwrap().report().unwrap();
    assert_eq!(rows[0].p_s, Some(direct.p_s));
    assert_eq!(rows[0].c_s_bps, Some(direct.c_s));
    assert_eq!(to_csv(&rows, false).lines().count(), 2);
}

#[test]
fn constellation_size_sweep_peaks_near_120_at_600_km() {
    let mut base = Scenario::reference();
    base.constellation.altitude_km = 600.0;
    let values: Vec<f64> = (1..=20).map(|i| 20.0 * i as f64).collect();
    let spec = SweepSpec::new(base, SweepAxis::NSats, values, vec![Engine::Theory]).unwrap();
    let rows = run_sweep(&spec).unwrap();
    let best = rows
        .iter()
        .max_by(|a, b| a.p_s.unwrap().total_cmp(&b.p_s.unwrap()))
        .unwrap();
    assert!((100.0..=140.0).contains(&best.value), "peak at {}", best.value);
    assert!((best.p_s.unwrap() - 0.915).abs() < 0.01, "{:?}", best.p_s);
}

#[test]
fn threshold_preset_shows_the_link_crossover() {
    let preset = figure_preset("fig4", &Scenario::reference()).unwrap().with_trials(20_000);
    let rows = run_sweep(&preset.sweeps[0]).unwrap();
    for engine in ["theory", "mc_distributional"] {
        let first = rows
            .iter()
            .filter(|r| r.engine == engine)
            .find(|r| r.p_esd.unwrap() > r.p_bd.unwrap())
            .map(|r| r.value);
        let t = first.unwrap_or_else(|| panic!("{engine}: no crossover"));
        assert!((10.0..=12.0).contains(&t), "{engine}: crossover at {t} dB");
    }
    // Below the crossover the marine link dominates, above it the space link.
    let theory: Vec<_> = rows.iter().filter(|r| r.engine == "theory").collect();
    assert!(theory.iter().filter(|r| r.value <= 10.0).all(|r| r.p_bd > r.p_esd));
    assert!(theory.iter().filter(|r| r.value >= 11.0).all(|r| r.p_esd >= r.p_bd));
}

#[test]
fn configured_sweep_is_byte_reproducible() {
    let text = r#"
[constellation]
altitude = "900 km"

[scenario]
r_bd = "45 nmile"

[sweep]
axis = "tau_db"
values = [4, 9, 14]
engines = ["theory", "mc_distributional", "mc_positional"]
mc_trials = 3000
seed = 77
"#;
    let spec = parse_config(text, &[]).unwrap().sweep.unwrap();
    assert_eq!(spec.base.constellation.altitude_km, 900.0);
    let a = to_csv(&run_sweep(&spec).unwrap(), false);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    let b = pool.install(|| to_csv(&run_sweep(&spec).unwrap(), false));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 10);
    let mut other = spec.clone();
    other.seed = 78;
    assert_ne!(a, to_csv(&run_sweep(&other).unwrap(), false));
}

#[test]
fn preset_variants_share_the_axis_grid() {
    let p = figure_preset("fig6", &Scenario::reference()).unwrap();
    let labels: Vec<_> = p.sweeps.iter().map(|s| s.label()).collect();
    assert_eq!(
        labels,
        ["altitude_km[n_sats=100]", "altitude_km[n_sats=500]", "altitude_km[n_sats=1000]"]
    );
    assert!(p.sweeps.windows(2).all(|w| w[0].values == w[1].values));
}
