//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and then asserts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use vitsim::dressed::hybrid_levels;
use vitsim::oracle::{compare, integrate, OracleOptions};
use vitsim::params::{derive, parse_config, DerivedParams, Model, PhysicalConstants, SystemParams, ZeroOrderMode};
use vitsim::sensing::{invert_mass, linspace, mass_sweep, splitting_at, DeltaGrid};
use vitsim::sideband::output_field;
use vitsim::steady_state::{cubic_coefficients, default_branch, solve_branches, sweep_xi, Stability, SteadyBranch};
use vitsim::{cli, Error};

fn load(name: &str) -> (SystemParams<f64>, DerivedParams<f64>, Model<f64>) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name);
    let cfg = parse_config(&std::fs::read_to_string(path).unwrap()).unwrap();
    let d = derive(&cfg.params, &PhysicalConstants::default()).unwrap();
    (cfg.params, d, Model::new(&cfg.params, &d))
}

fn verdict(n: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} {tag} {name} ({:.3} s): {detail}", elapsed.as_secs_f64());
}

#[test]
fn c01_kerr_ratio() {
    let t = Instant::now();
    let p = SystemParams { mass: 1e-25, k_vec: 1e7, ..load("transparency.toml").0 };
    let d = derive(&p, &PhysicalConstants::default()).unwrap();
    let ratio = d.chi / p.g;
    let pass = (0.049..=0.053).contains(&ratio);
    verdict(1, "kerr ratio", pass, t.elapsed(), &format!("chi/g = {ratio:.6}"));
    assert!(pass);
}

#[test]
fn c02_ground_state_freezing() {
    let (_, _, m) = load("ground_freezing.toml");
    let t = Instant::now();
    let grid = linspace(0.0, 2.0, 200);
    let rows = sweep_xi(&m, &grid, ZeroOrderMode::SelfConsistent).unwrap();
    let elapsed = t.elapsed();
    let at_zero = rows[0].branches.first().map(|b| (b.u, b.z0));
    let lowest: Vec<f64> = rows.iter().map(|r| r.branches[0].z0).collect();
    let zmin = lowest.iter().cloned().fold(f64::INFINITY, f64::min);
    let zmax = lowest.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pass = at_zero == Some((0.0, -1.0))
        && lowest.iter().all(|z| (-1.0..=-0.9).contains(z))
        && elapsed < Duration::from_secs(1);
    verdict(
        2,
        "ground-state freezing",
        pass,
        elapsed,
        &format!("Z0(0) = {:?}, lowest-branch Z0 in [{zmin:.6}, {zmax:.6}]", at_zero.map(|x| x.1)),
    );
    assert!(pass);
}

#[test]
fn c03_multistability() {
    let (_, _, m) = load("bistability.toml");
    let t = Instant::now();
    let grid = linspace(0.0, 2.0, 200);
    let mode = ZeroOrderMode::Fixed(-0.99);
    let rows = sweep_xi(&m, &grid, mode).unwrap();
    let counts: Vec<usize> = rows.iter().map(|r| r.branches.len()).collect();
    let mut worst = 0.0f64;
    for (r, &xi) in rows.iter().zip(&grid) {
        let c = cubic_coefficients(&m.with_xi(xi), -0.99);
        for b in &r.branches {
            worst = worst.max(c.relative_residual(b.u));
        }
    }
    let three: Vec<f64> = grid.iter().zip(&counts).filter(|(_, &c)| c == 3).map(|(x, _)| *x).collect();
    let width = match (three.first(), three.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    let contiguous = counts.windows(2).any(|w| w[0] == 3 && w[1] == 3);
    let linear = sweep_xi(&m.with_eta(0.0), &grid, mode).unwrap();
    let linear_counts: Vec<usize> = linear.iter().map(|r| r.branches.len()).collect();
    let elapsed = t.elapsed();
    let pass = contiguous
        && width > 0.0
        && linear_counts.iter().all(|&c| c == 1)
        && worst <= 1e-9
        && elapsed < Duration::from_secs(1);
    verdict(
        3,
        "multistability",
        pass,
        elapsed,
        &format!(
            "3 roots for xi/g in [{:.4}, {:.4}], eta=0 counts {:?}, worst residual {worst:.2e}",
            three.first().unwrap_or(&f64::NAN),
            three.last().unwrap_or(&f64::NAN),
            {
                let mut c = linear_counts.clone();
                c.dedup();
                c
            }
        ),
    );
    assert!(pass);
}

fn distance_after(m: &Model<f64>, b: &SteadyBranch<f64>, factor: f64, t_end: f64) -> (f64, f64) {
    let mut s = b.state();
    s.a *= factor;
    let start = (s.a - b.a0).norm();
    let tr = integrate(m, s, t_end, 0.01, 1.0, usize::MAX).unwrap();
    let last = tr.last_state().unwrap();
    (start, (last.a - b.a0).norm())
}

#[test]
fn c04_stability_pattern() {
    let (_, _, base) = load("bistability.toml");
    let t = Instant::now();
    let xis = [0.67, 0.68, 0.69, 0.70, 0.71];
    let mut failures = Vec::new();
    for &xi in &xis {
        let m = base.with_xi(xi);
        let b = solve_branches(&m, ZeroOrderMode::Exact).unwrap();
        if b.len() != 3 {
            failures.push(format!("xi={xi}: {} branches", b.len()));
            continue;
        }
        let pattern = [b[0].stable, b[1].stable, b[2].stable];
        if pattern != [Stability::Stable, Stability::Unstable, Stability::Stable] {
            failures.push(format!("xi={xi}: pattern {pattern:?}"));
        }
        for f in [1.01, 0.99] {
            let (d0, d1) = distance_after(&m, &b[1], f, 1000.0);
            if !(d1 > 10.0 * d0) {
                failures.push(format!("xi={xi}: middle branch kept the flow ({d0:.2e} -> {d1:.2e})"));
            }
            for k in [0, 2] {
                let (d0, d1) = distance_after(&m, &b[k], f, 1000.0);
                if !(d1 < 1e-3 * d0) {
                    failures.push(format!("xi={xi}: branch {k} did not attract ({d0:.2e} -> {d1:.2e})"));
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(30);
    let detail = if failures.is_empty() {
        format!("stable/unstable/stable with matching flow at xi/g = {xis:?}")
    } else {
        failures.join("; ")
    };
    verdict(4, "stability pattern", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn c05_transparency_dip() {
    let (p, d, _) = load("transparency.toml");
    let t = Instant::now();
    let omega_minus = hybrid_levels(&p, &d, false).omega_minus;
    let grid = DeltaGrid::Linear { lo: 0.1 * p.g, hi: 0.3 * p.g, n: 500 };
    let outcome = splitting_at(&p, &grid, ZeroOrderMode::Exact);
    let elapsed = t.elapsed();
    let (pass, detail) = match &outcome {
        Ok((r, _)) => {
            let off = (r.dip - omega_minus).abs() / omega_minus;
            (
                r.contrast > 0.3 && off <= 0.2 && elapsed < Duration::from_secs(5),
                format!(
                    "dip at {:.5} g, contrast {:.3}, {:.1}% from omega_minus",
                    r.dip / p.g,
                    r.contrast,
                    100.0 * off
                ),
            )
        }
        Err(e) => (false, format!("{e} (omega_minus = {:.5} g)", omega_minus / p.g)),
    };
    verdict(5, "transparency dip", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn c06_oracle_equivalence() {
    let (_, _, m) = load("vit_demo.toml");
    let t = Instant::now();
    let deltas = linspace(0.01, 0.5, 20);
    let opts = OracleOptions::default();
    let run = |model: &Model<f64>, tol: f64| -> Vec<(f64, f64)> {
        let branches = solve_branches(model, ZeroOrderMode::Exact).unwrap();
        let b = branches[default_branch(&branches).unwrap()];
        assert_eq!(b.stable, Stability::Stable);
        let model = model.with_eps(1e-3 * model.xi);
        deltas
            .par_iter()
            .map(|&delta| {
                let r = compare(&b, &model, delta, tol, &opts).unwrap();
                (delta, r.deviation("L-").map_or(f64::INFINITY, |d| d.relative))
            })
            .collect()
    };
    let coupled = run(&m, 1e-3);
    let linear = run(&m.with_eta(0.0), 1e-6);
    let elapsed = t.elapsed();
    let worst = |v: &[(f64, f64)]| v.iter().cloned().fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let (dc, wc) = worst(&coupled);
    let (dl, wl) = worst(&linear);
    let pass = wc <= 1e-3 && wl <= 1e-6 && elapsed < Duration::from_secs(600);
    verdict(
        6,
        "oracle equivalence",
        pass,
        elapsed,
        &format!("worst L- deviation {wc:.2e} at delta {dc:.3} g; eta=0 worst {wl:.2e} at delta {dl:.3} g"),
    );
    assert!(pass);
}

fn random_model(rng: &mut StdRng) -> Model<f64> {
    let xi = rng.random_range(0.01..2.0);
    Model {
        scale: 1e6,
        g: 1.0,
        omega: rng.random_range(0.05..0.5),
        delta_a: rng.random_range(-20.0..20.0),
        delta_c: rng.random_range(-2.0..2.0),
        gamma_a: rng.random_range(1e-3..0.5),
        gamma_b: rng.random_range(1e-3..0.5),
        gamma_q: rng.random_range(1e-3..0.5),
        xi,
        eps: xi * rng.random_range(1e-4..1e-2),
        eta: rng.random_range(0.0..0.3),
    }
}

#[test]
fn c07_conjugate_and_linearity() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    let (mut evaluated, mut skipped, mut worst_conj, mut worst_lin) = (0, 0, 0.0f64, 0.0f64);
    let mut draws = 0;
    while draws < 500 {
        let m = random_model(&mut rng);
        let delta = rng.random_range(0.01..1.0);
        let scale = rng.random_range(0.1..10.0);
        draws += 1;
        let branches = match solve_branches(&m, ZeroOrderMode::SelfConsistent) {
            Ok(b) => b,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        for b in &branches {
            let (r1, r2) = match (output_field(b, &m, delta), output_field(b, &m.with_eps(m.eps * scale), delta)) {
                (Ok(a), Ok(c)) => (a, c),
                (Err(Error::Pole { .. }), _) | (_, Err(Error::Pole { .. })) => {
                    skipped += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => panic!("unexpected error {e}"),
            };
            let conj = (r1.z_plus - r1.z_minus.conj()).norm() / r1.z_plus.norm().max(f64::MIN_POSITIVE);
            let lin = (r1.eps_out - r2.eps_out).norm() / r1.eps_out.norm();
            worst_conj = worst_conj.max(if r1.z_plus.norm() == 0.0 { 0.0 } else { conj });
            worst_lin = worst_lin.max(lin);
            evaluated += 1;
        }
    }
    let elapsed = t.elapsed();
    let pass = worst_conj <= 1e-10 && worst_lin <= 1e-8 && evaluated >= 450 && elapsed < Duration::from_secs(60);
    verdict(
        7,
        "conjugate/linearity invariants",
        pass,
        elapsed,
        &format!("{draws} draws, {evaluated} branches checked, {skipped} skipped; Z+ vs conj(Z-) {worst_conj:.2e}, eps_out {worst_lin:.2e}"),
    );
    assert!(pass);
}

#[test]
fn c08_mass_sensing_linearity() {
    let (p, _, _) = load("mass_sensing.toml");
    let t = Instant::now();
    let masses = linspace(0.5e-25, 1.5e-25, 11);
    let grid = DeltaGrid::AroundPrediction { n: 1000 };
    let sweep = mass_sweep(&p, &masses, &grid, ZeroOrderMode::Exact).unwrap();
    let (pass, detail) = match &sweep.curve {
        Some(c) => {
            let holdout = splitting_at(&p.with_mass(1.25e-25), &grid, ZeroOrderMode::Exact)
                .map_err(|e| e.to_string())
                .and_then(|(r, _)| invert_mass(c, r.splitting).map_err(|e| e.to_string()));
            match holdout {
                Ok(est) => {
                    let err = (est.mass - 1.25e-25).abs() / 1.25e-25;
                    (
                        c.r_squared > 0.98 && err <= 0.02,
                        format!(
                            "r^2 = {:.4}, hold-out estimate {:.4e} kg ({:.2}% off)",
                            c.r_squared,
                            est.mass,
                            100.0 * err
                        ),
                    )
                }
                Err(e) => (false, format!("r^2 = {:.4}, hold-out failed: {e}", c.r_squared)),
            }
        }
        None => (
            false,
            format!(
                "{} of {} masses show no splitting; fit: {}",
                sweep.excluded.len(),
                masses.len(),
                sweep.fit_error.as_deref().unwrap_or("?")
            ),
        ),
    };
    let elapsed = t.elapsed();
    let pass = pass && elapsed < Duration::from_secs(120);
    verdict(8, "mass-sensing linearity", pass, elapsed, &detail);
    assert!(pass);
}

#[test]
fn c09_dressed_identities() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(9);
    let base = load("transparency.toml").0;
    let (mut worst_sum, mut worst_prod) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p = SystemParams { g: rng.random_range(0.1e6..10e6), omega: rng.random_range(0.01e6..5e6), ..base };
        let d =
            DerivedParams { eta: rng.random_range(0.0..2e6), ..derive(&base, &PhysicalConstants::default()).unwrap() };
        let l = hybrid_levels(&p, &d, false);
        let sum = 2.0 * p.g + p.omega;
        let prod = 2.0 * p.g * p.omega - l.kappa * l.kappa;
        worst_sum = worst_sum.max(((l.omega_plus + l.omega_minus) - sum).abs() / sum.abs());
        worst_prod = worst_prod
            .max((l.omega_plus * l.omega_minus - prod).abs() / prod.abs().max(l.omega_plus * l.omega_minus.abs()));
    }
    let p = SystemParams { g: 1e6, omega: 0.2e6, ..base };
    let d = DerivedParams { eta: 0.0, ..derive(&p, &PhysicalConstants::default()).unwrap() };
    let limit = hybrid_levels(&p, &d, false).omega_minus;
    let elapsed = t.elapsed();
    let pass = worst_sum <= 1e-12 && worst_prod <= 1e-12 && limit == p.omega;
    verdict(
        9,
        "dressed-level identities",
        pass,
        elapsed,
        &format!("sum {worst_sum:.2e}, product {worst_prod:.2e}, kappa=0 omega_minus = {limit} rad/s"),
    );
    assert!(pass);
}

#[test]
fn c10_sense_determinism() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join("vit_demo.toml");
    let t = Instant::now();
    let run = |dir: &Path| -> Vec<(String, Vec<u8>)> {
        let curve = dir.join("curve.csv");
        let spectra = dir.join("spectra");
        let code = cli::run([
            "vitsim",
            "--quiet",
            "--config",
            config.to_str().unwrap(),
            "sense",
            "--out-curve",
            curve.to_str().unwrap(),
            "--out-spectra",
            spectra.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let mut files = vec![("curve.csv".to_string(), std::fs::read(&curve).unwrap())];
        let mut names: Vec<_> = std::fs::read_dir(&spectra).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for n in names {
            files.push((n.to_string_lossy().into_owned(), std::fs::read(spectra.join(&n)).unwrap()));
        }
        files
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(a.path());
    let second = run(b.path());
    let elapsed = t.elapsed();
    let body_rows =
        first.iter().map(|(_, f)| f.split(|&c| c == b'\n').filter(|l| !l.is_empty()).count() - 1).min().unwrap_or(0);
    let pass = first == second && body_rows > 0 && elapsed < Duration::from_secs(240);
    verdict(
        10,
        "sense determinism",
        pass,
        elapsed,
        &format!("{} files compared, all byte-identical: {}", first.len(), first == second),
    );
    assert!(pass);
}
