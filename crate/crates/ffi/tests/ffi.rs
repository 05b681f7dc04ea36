use std::ffi::{c_char, CStr, CString};
use std::ptr;

use sealink_ffi::*;

fn last_error() -> String {
    let len = unsafe { sealink_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0u8; len + 1];
    unsafe { sealink_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
    CStr::from_bytes_until_nul(&buf).unwrap().to_str().unwrap().to_string()
}

fn set(h: *mut SealinkScenario, key: &str, value: &str) -> SealinkStatus {
    let k = CString::new(key).unwrap();
    let v = CString::new(value).unwrap();
    unsafe { sealink_scenario_set(h, k.as_ptr(), v.as_ptr()) }
}

#[test]
fn default_scenario_theory() {
    let h = sealink_scenario_new_default();
    assert_eq!(set(h, "scenario.tau", "8 dB"), SealinkStatus::Ok);
    let mut t = SealinkTheory::default();
    assert_eq!(unsafe { sealink_theory(h, &mut t) }, SealinkStatus::Ok);
    assert!((t.p_bd - 0.7841).abs() < 1e-3, "{t:?}");
    assert!(t.p_s > 0.0 && t.p_s < 1.0 && t.c_s > 0.0);
    let mut p = 0.0;
    assert_eq!(unsafe { sealink_p_s(h, &mut p) }, SealinkStatus::Ok);
    assert_eq!(p, t.p_s);
    let mut c = 0.0;
    assert_eq!(unsafe { sealink_capacity(h, &mut c) }, SealinkStatus::Ok);
    assert_eq!(c, t.c_s);
    unsafe { sealink_scenario_free(h) };
}

#[test]
fn set_validates_and_keeps_state_on_error() {
    let h = sealink_scenario_new_default();
    assert_eq!(set(h, "scenario.tau", "12 dB"), SealinkStatus::Ok);
    let mut tau = 0.0;
    assert_eq!(unsafe { sealink_scenario_tau_db(h, &mut tau) }, SealinkStatus::Ok);
    assert!((tau - 12.0).abs() < 1e-12);

    assert_eq!(set(h, "scenario.tau", "12"), SealinkStatus::ConfigError);
    assert!(last_error().contains("scenario.tau"), "{}", last_error());
    assert_eq!(set(h, "scenario.nonsense", "1"), SealinkStatus::ConfigError);
    unsafe { sealink_scenario_tau_db(h, &mut tau) };
    assert!((tau - 12.0).abs() < 1e-12);
    assert!(last_error().is_empty(), "success clears the message");
    unsafe { sealink_scenario_free(h) };
}

#[test]
fn config_text_builds_a_handle() {
    let text = CString::new("[constellation]\naltitude = \"600 km\"\n").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sealink_scenario_from_config(text.as_ptr(), &mut h) }, SealinkStatus::Ok);
    assert!(!h.is_null());
    let mut p = 0.0;
    assert_eq!(unsafe { sealink_p_s(h, &mut p) }, SealinkStatus::Ok);
    unsafe { sealink_scenario_free(h) };

    let bad = CString::new("[link]\npower = 3\n").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sealink_scenario_from_config(bad.as_ptr(), &mut h) }, SealinkStatus::ConfigError);
    assert!(h.is_null());
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let h = sealink_scenario_new_default();
    let run = |seed| {
        let mut r = SealinkMcResult::default();
        assert_eq!(unsafe { sealink_mc_run(h, SealinkMode::Distributional, 5000, seed, &mut r) }, SealinkStatus::Ok);
        r
    };
    let a = run(4);
    assert_eq!(a, run(4));
    assert_ne!(a, run(5));
    assert_eq!(a.n_trials, 5000);
    assert!(a.p_s.half_width > 0.0);
    let mut r = SealinkMcResult::default();
    assert_eq!(unsafe { sealink_mc_run(h, SealinkMode::Positional, 0, 1, &mut r) }, SealinkStatus::InvalidArgument);
    unsafe { sealink_scenario_free(h) };
}

#[test]
fn null_pointers_are_reported() {
    let mut t = SealinkTheory::default();
    assert_eq!(unsafe { sealink_theory(ptr::null(), &mut t) }, SealinkStatus::NullPointer);
    assert!(last_error().contains("scenario"));
    let h = sealink_scenario_new_default();
    assert_eq!(unsafe { sealink_theory(h, ptr::null_mut()) }, SealinkStatus::NullPointer);
    assert_eq!(unsafe { sealink_scenario_set(h, ptr::null(), ptr::null()) }, SealinkStatus::NullPointer);
    unsafe { sealink_scenario_free(h) };
    unsafe { sealink_scenario_free(ptr::null_mut()) };
}

#[test]
fn error_buffer_truncates() {
    unsafe { sealink_p_s(ptr::null(), ptr::null_mut()) };
    let full = last_error();
    let mut buf = [0x7fu8; 4];
    let n = unsafe { sealink_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
    assert_eq!(n, full.len());
    assert_eq!(&buf, &[full.as_bytes()[0], full.as_bytes()[1], full.as_bytes()[2], 0]);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sealink_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"sealink.h\"\nint main(void) { SealinkTheory t; SealinkScenario *h = sealink_scenario_new_default();\n\
         SealinkStatus s = sealink_theory(h, &t); sealink_scenario_free(h); return s == SEALINK_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
