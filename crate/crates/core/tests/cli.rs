mod common;

use std::path::Path;
use std::process::{Command, Output};

fn vitsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vitsim")).args(args).output().unwrap()
}

fn cfg(name: &str) -> String {
    common::example(name).to_string_lossy().into_owned()
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    assert_eq!(vitsim(&[]).status.code(), Some(2));
    assert_eq!(vitsim(&["dressed"]).status.code(), Some(2));
    assert_eq!(vitsim(&["--config", &cfg("vit_demo.toml"), "steady", "--xi-steps", "zero"]).status.code(), Some(2));
    assert_eq!(vitsim(&["--config", "/nonexistent.toml", "dressed"]).status.code(), Some(4));
    let out = vitsim(&["--config", &cfg("vit_demo.toml"), "dressed", "--out", "/proc/vitsim/x.json"]);
    assert_eq!(out.status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, std::fs::read_to_string(cfg("vit_demo.toml")).unwrap().replace("omega_mhz", "omgea_mhz"))
        .unwrap();
    let out = vitsim(&["--config", bad.to_str().unwrap(), "dressed"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omgea_mhz"));
}

#[test]
fn sense_without_splitting_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("c.csv");
    let out =
        vitsim(&["--quiet", "--config", &cfg("mass_sensing.toml"), "sense", "--out-curve", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let fit = std::fs::read_to_string(dir.path().join("c.csv.fit.json")).unwrap();
    assert!(fit.contains("fit_error"));
}

#[test]
fn help_lists_subcommand_flags() {
    let top = String::from_utf8(vitsim(&["--help"]).stdout).unwrap();
    for s in ["steady", "spectrum", "dressed", "oracle", "sense", "z0", "--config", "--threads", "--quiet"] {
        assert!(top.contains(s), "{s}");
    }
    let flags = [
        ("steady", &["--xi-min", "--xi-max", "--xi-steps", "--mode", "--z0", "--out"][..]),
        ("spectrum", &["--branch", "--delta-min-g", "--delta-max-g", "--delta-steps", "--out"][..]),
        ("dressed", &["--out"][..]),
        ("oracle", &["--branch", "--delta-over-g", "--eps-ratio", "--periods", "--out"][..]),
        ("sense", &["--mass-min-kg", "--mass-max-kg", "--mass-steps", "--out-curve", "--out-spectra"][..]),
        ("z0", &["--xi-max-g", "--steps", "--out"][..]),
    ];
    for (sub, list) in flags {
        let h = String::from_utf8(vitsim(&[sub, "--help"]).stdout).unwrap();
        for f in list {
            assert!(h.contains(f), "{sub} {f}");
        }
    }
}

#[test]
fn csv_headers_are_fixed() {
    let head = |args: &[&str]| String::from_utf8(vitsim(args).stdout).unwrap().lines().next().unwrap().to_string();
    let c = cfg("bistability.toml");
    assert_eq!(head(&["--config", &c, "steady", "--xi-steps", "3"]), "xi_mhz,branch_index,u,b0_sq,z0,stable");
    assert_eq!(head(&["--config", &c, "z0", "--steps", "3"]), "xi_over_g,branch_index,u,z0");
    assert_eq!(
        head(&["--config", &cfg("vit_demo.toml"), "spectrum", "--delta-steps", "5"]),
        "delta_over_g,mu_p,nu_p,abs_l_minus,re_l_out_minus,im_l_out_minus"
    );
}

#[test]
fn bistability_config_defaults_to_frozen_inversion() {
    let out = String::from_utf8(vitsim(&["--config", &cfg("bistability.toml"), "steady", "--xi-steps", "11"]).stdout)
        .unwrap();
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!(rows.iter().all(|r| r.split(',').nth(4) == Some("-0.99")));
    assert!(rows.iter().filter(|r| r.starts_with("1.2,")).count() == 3);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["--config", &cfg("vit_demo.toml"), "spectrum", "--delta-steps", "200"];
    let a = vitsim(&args);
    let b = vitsim(&["--threads", "1", args[0], args[1], args[2], args[3], args[4]]);
    assert!(a.status.success() && !a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn manifest_replays_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let args = ["--config", &cfg("vit_demo.toml"), "spectrum", "--delta-steps", "50", "--out", out.to_str().unwrap()];
    assert!(vitsim(&args).status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "spectrum");
    let replay_cfg = dir.path().join("replay.toml");
    std::fs::write(&replay_cfg, manifest["config"].as_str().unwrap()).unwrap();
    let out2 = dir.path().join("s2.csv");
    let mut argv: Vec<String> =
        manifest["argv"].as_array().unwrap().iter().skip(1).map(|v| v.as_str().unwrap().to_string()).collect();
    let ci = argv.iter().position(|a| a == "--config").unwrap();
    argv[ci + 1] = replay_cfg.to_string_lossy().into_owned();
    let oi = argv.iter().position(|a| a == "--out").unwrap();
    argv[oi + 1] = out2.to_string_lossy().into_owned();
    let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert!(vitsim(&refs).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(Path::new(&out2)).unwrap());
}

#[test]
fn oracle_subcommand_emits_a_report() {
    let out = vitsim(&["--config", &cfg("vit_demo.toml"), "oracle", "--delta-over-g", "0.2"]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["deviations"].as_array().unwrap().len(), 12);
    assert_eq!(r["passed"], true);
}
