//! Time-domain integration of the mean-field flow and Fourier extraction of the
//! first sidebands, used as ground truth for the harmonic-balance chain.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{drift, State};
use crate::num::{lit, re, rel_diff, Real};
use crate::params::{Model, WEAK_PROBE_RATIO};
use crate::sideband::{output_field, SidebandResponse};
use crate::steady_state::{Stability, SteadyBranch};

/// State norm treated as divergence.
pub const DIVERGENCE_NORM: f64 = 1e12;
/// Slack on the inversion bound before a sample counts as a violation.
pub const BLOCH_TOL: f64 = 1e-6;
/// Fewest periods accepted by the harmonic extraction.
pub const MIN_PERIODS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    /// Sample instants, s.
    pub times: Vec<T>,
    pub a_t: Vec<Complex<T>>,
    pub b_t: Vec<Complex<T>>,
    pub sigma_minus_t: Vec<Complex<T>>,
    pub sigma_z_t: Vec<T>,
    /// Integration step, s.
    pub dt: T,
    /// Steps where `σ_z` left `[-1, 1]` by more than [`BLOCH_TOL`].
    pub inversion_violations: usize,
    /// Steps where `|σ₋|² > (1 − σ_z²)/4 + BLOCH_TOL`. Logged, never clamped.
    pub bloch_violations: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<State<T>> {
        let n = self.len().checked_sub(1)?;
        Some(State { a: self.a_t[n], b: self.b_t[n], sigma: self.sigma_minus_t[n], z: self.sigma_z_t[n] })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTriple<T> {
    pub x0: Complex<T>,
    pub x_plus: Complex<T>,
    pub x_minus: Complex<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonics<T> {
    pub a: HarmonicTriple<T>,
    pub b: HarmonicTriple<T>,
    pub sigma: HarmonicTriple<T>,
    pub z: HarmonicTriple<T>,
}

fn rk4_step<T: Real>(model: &Model<T>, s: &State<T>, t: T, h: T, delta: T) -> State<T> {
    let half = lit::<T>(0.5);
    let add = |x: &[T; 7], k: &[T; 7], w: T| -> State<T> {
        let mut y = *x;
        for (yi, ki) in y.iter_mut().zip(k) {
            *yi = *yi + w * *ki;
        }
        State::from_array(&y)
    };
    let x = s.to_array();
    let k1 = drift(model, s, t, delta).to_array();
    let k2 = drift(model, &add(&x, &k1, h * half), t + h * half, delta).to_array();
    let k3 = drift(model, &add(&x, &k2, h * half), t + h * half, delta).to_array();
    let k4 = drift(model, &add(&x, &k3, h), t + h, delta).to_array();
    let sixth = h / lit(6.0);
    let mut y = x;
    for i in 0..7 {
        y[i] = y[i] + sixth * (k1[i] + lit::<T>(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
    State::from_array(&y)
}

fn diverged<T: Real>(s: &State<T>, t: T, model: &Model<T>) -> Option<Error> {
    let norm = s.norm();
    if !(norm <= lit::<T>(DIVERGENCE_NORM)) {
        return Some(Error::Instability {
            time: (t / model.scale).to_f64().unwrap_or(f64::NAN),
            norm: norm.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    None
}

struct Monitor {
    inversion: usize,
    bloch: usize,
}

impl Monitor {
    fn new() -> Self {
        Self { inversion: 0, bloch: 0 }
    }

    fn check<T: Real>(&mut self, s: &State<T>) {
        let tol = lit::<T>(BLOCH_TOL);
        if s.z.abs() > T::one() + tol {
            self.inversion += 1;
        }
        if s.sigma.norm_sqr() > (T::one() - s.z * s.z) / lit(4.0) + tol {
            self.bloch += 1;
        }
    }
}

/// Classical RK4 from `initial` over `[0, t_end]` with step `dt`, both model units.
///
/// Every `stride`-th state is recorded (the first and last always are). The
/// probe is taken from `model.eps` at detuning `delta`.
pub fn integrate<T: Real>(
    model: &Model<T>,
    initial: State<T>,
    t_end: T,
    dt: T,
    delta: T,
    stride: usize,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero() && t_end >= T::zero() && t_end.is_finite()) {
        return Err(Error::InvalidParameter { name: "dt", reason: "need dt > 0 and finite t_end >= 0".into() });
    }
    let stride = stride.max(1);
    let steps = (t_end / dt).round().to_usize().unwrap_or(0);
    let cap = steps / stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(cap),
        a_t: Vec::with_capacity(cap),
        b_t: Vec::with_capacity(cap),
        sigma_minus_t: Vec::with_capacity(cap),
        sigma_z_t: Vec::with_capacity(cap),
        dt: dt / model.scale,
        inversion_violations: 0,
        bloch_violations: 0,
    };
    let record = |traj: &mut Trajectory<T>, t: T, s: &State<T>| {
        traj.times.push(t / model.scale);
        traj.a_t.push(s.a);
        traj.b_t.push(s.b);
        traj.sigma_minus_t.push(s.sigma);
        traj.sigma_z_t.push(s.z);
    };
    let mut mon = Monitor::new();
    let mut s = initial;
    record(&mut traj, T::zero(), &s);
    for k in 0..steps {
        let t = dt * lit::<T>(k as f64);
        s = rk4_step(model, &s, t, dt, delta);
        let t1 = dt * lit::<T>((k + 1) as f64);
        if let Some(e) = diverged(&s, t1, model) {
            return Err(e);
        }
        mon.check(&s);
        if (k + 1) % stride == 0 || k + 1 == steps {
            record(&mut traj, t1, &s);
        }
    }
    traj.inversion_violations = mon.inversion;
    traj.bloch_violations = mon.bloch;
    Ok(traj)
}

/// Fourier components at `0, +δ, −δ` over the last `n_periods` periods.
///
/// `delta` is in rad/s like the trajectory's time axis; the sample spacing must
/// divide the period.
pub fn extract_harmonics<T: Real>(traj: &Trajectory<T>, delta: T, n_periods: usize) -> Result<Harmonics<T>> {
    if n_periods < MIN_PERIODS {
        return Err(Error::InsufficientData(format!("need at least {MIN_PERIODS} periods, got {n_periods}")));
    }
    if !(delta > T::zero()) || traj.len() < 2 {
        return Err(Error::InsufficientData("need delta > 0 and at least two samples".into()));
    }
    let spacing = traj.times[1] - traj.times[0];
    let period = T::TAU() / delta;
    let per = (period / spacing).round();
    if per < T::one() || ((period / spacing) - per).abs() > lit::<T>(1e-6) * per {
        return Err(Error::InsufficientData("sample spacing does not divide the probe period".into()));
    }
    let n = per.to_usize().expect("finite") * n_periods;
    if traj.len() < n + 1 {
        return Err(Error::InsufficientData(format!("tail needs {} samples, trajectory has {}", n + 1, traj.len())));
    }
    let start = traj.len() - n - 1;
    let mut acc = Accumulator::new(delta);
    for k in start..traj.len() {
        let w = if k == start || k + 1 == traj.len() { lit(0.5) } else { T::one() };
        let s = State { a: traj.a_t[k], b: traj.b_t[k], sigma: traj.sigma_minus_t[k], z: traj.sigma_z_t[k] };
        acc.add(&s, traj.times[k], w);
    }
    Ok(acc.finish(n))
}

struct Accumulator<T> {
    delta: T,
    sums: [[Complex<T>; 3]; 4],
}

impl<T: Real> Accumulator<T> {
    fn new(delta: T) -> Self {
        Self { delta, sums: [[re(T::zero()); 3]; 4] }
    }

    fn add(&mut self, s: &State<T>, t: T, w: T) {
        let e_minus = Complex::from_polar(w, -self.delta * t);
        let e_plus = Complex::from_polar(w, self.delta * t);
        for (v, x) in [s.a, s.b, s.sigma, re(s.z)].into_iter().enumerate() {
            self.sums[v][0] = self.sums[v][0] + x * w;
            self.sums[v][1] = self.sums[v][1] + x * e_minus;
            self.sums[v][2] = self.sums[v][2] + x * e_plus;
        }
    }

    fn finish(&self, n: usize) -> Harmonics<T> {
        let norm = T::one() / lit::<T>(n as f64);
        let triple = |v: usize| HarmonicTriple {
            x0: self.sums[v][0] * norm,
            x_plus: self.sums[v][1] * norm,
            x_minus: self.sums[v][2] * norm,
        };
        Harmonics { a: triple(0), b: triple(1), sigma: triple(2), z: triple(3) }
    }
}

/// Step-size and window settings for an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Whole probe periods in the extraction window.
    pub periods: usize,
    /// Transient length in units of the slowest decay time.
    pub cutoff_decay_times: f64,
    /// Steps per period of the fastest frequency in the problem.
    pub steps_per_fast_period: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { periods: MIN_PERIODS, cutoff_decay_times: 30.0, steps_per_fast_period: 64.0 }
    }
}

/// Fastest frequency that the step has to resolve, model units.
fn fastest_rate<T: Real>(model: &Model<T>, branch: &SteadyBranch<T>, delta: T) -> T {
    let m = model;
    let drive = (branch.a0 * m.g + m.xi).norm();
    let rabi = (m.delta_a * m.delta_a + lit::<T>(4.0) * drive * drive).sqrt();
    [m.delta_a.abs(), m.delta_c.abs(), m.omega, m.g, delta.abs(), rabi].into_iter().fold(T::zero(), |a, b| a.max(b))
}

/// Integrates from the branch past the transient and extracts harmonics over
/// whole probe periods, without storing the trajectory. `delta` in model units.
pub fn run_harmonics<T: Real>(
    model: &Model<T>,
    branch: &SteadyBranch<T>,
    delta: T,
    opts: &OracleOptions,
) -> Result<Harmonics<T>> {
    if opts.periods < MIN_PERIODS {
        return Err(Error::InsufficientData(format!("need at least {MIN_PERIODS} periods, got {}", opts.periods)));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter { name: "delta", reason: "must be > 0".into() });
    }
    let period = T::TAU() / delta;
    let dt_max = T::TAU() / (lit::<T>(opts.steps_per_fast_period) * fastest_rate(model, branch, delta));
    let per = (period / dt_max).ceil().max(T::one());
    let dt = period / per;
    let per = per.to_usize().expect("finite");
    let mut slowest = model.gamma_a.min(model.gamma_b).min(model.gamma_q);
    if branch.growth_rate < T::zero() {
        // a weakly damped collective mode can ring longer than any bare decay
        slowest = slowest.min(-branch.growth_rate);
    }
    let cutoff = lit::<T>(opts.cutoff_decay_times) / slowest;
    let n_cut = (cutoff / dt).ceil().to_usize().unwrap_or(0);
    let n = per * opts.periods;

    let mut s = branch.state();
    let mut mon = Monitor::new();
    let time = |k: usize| dt * lit::<T>(k as f64);
    for k in 0..n_cut {
        s = rk4_step(model, &s, time(k), dt, delta);
        if let Some(e) = diverged(&s, time(k + 1), model) {
            return Err(e);
        }
        mon.check(&s);
    }
    let mut acc = Accumulator::new(delta);
    for j in 0..=n {
        let k = n_cut + j;
        let w = if j == 0 || j == n { lit(0.5) } else { T::one() };
        acc.add(&s, time(k), w);
        if j < n {
            s = rk4_step(model, &s, time(k), dt, delta);
            if let Some(e) = diverged(&s, time(k + 1), model) {
                return Err(e);
            }
            mon.check(&s);
        }
    }
    if mon.bloch > 0 || mon.inversion > 0 {
        log::debug!("oracle run: {} Bloch-bound and {} inversion-bound excursions", mon.bloch, mon.inversion);
    }
    Ok(acc.finish(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub name: String,
    pub harmonic_balance: [f64; 2],
    pub oracle: [f64; 2],
    pub relative: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Probe detuning, rad/s.
    pub delta: f64,
    /// Probe amplitude, rad/s.
    pub eps: f64,
    pub tolerance: f64,
    pub deviations: Vec<Deviation>,
    /// Probe not small against the drive; first-order truncation degrades.
    pub nonlinear_regime: bool,
    pub warnings: Vec<String>,
    /// Present when the comparison was skipped, e.g. at a pole.
    pub skipped: Option<String>,
    pub passed: bool,
}

impl ComparisonReport {
    pub fn deviation(&self, name: &str) -> Option<&Deviation> {
        self.deviations.iter().find(|d| d.name == name)
    }
}

/// Harmonic-balance response against the integrated flow at `delta` (model units).
pub fn compare<T: Real>(
    branch: &SteadyBranch<T>,
    model: &Model<T>,
    delta: T,
    tolerance: f64,
    opts: &OracleOptions,
) -> Result<ComparisonReport> {
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let mut report = ComparisonReport {
        delta: f(delta * model.scale),
        eps: f(model.eps * model.scale),
        tolerance,
        deviations: Vec::new(),
        nonlinear_regime: model.xi > T::zero() && model.eps >= lit::<T>(WEAK_PROBE_RATIO) * model.xi,
        warnings: Vec::new(),
        skipped: None,
        passed: false,
    };
    if report.nonlinear_regime {
        report
            .warnings
            .push("probe is not weak against the drive: first-order response is not expected to hold".into());
    }
    if branch.stable != Stability::Stable {
        report.warnings.push(format!("branch is {}: the flow need not settle onto it", branch.stable.as_str()));
    }
    let hb: SidebandResponse<T> = match output_field(branch, model, delta) {
        Ok(r) => r,
        Err(Error::Pole { coefficient, delta }) => {
            report.skipped = Some(format!("pole in {coefficient} at delta = {delta:e} rad/s"));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let h = run_harmonics(model, branch, delta, opts)?;
    let pairs = [
        ("A0", branch.a0, h.a.x0),
        ("A+", hb.a_plus, h.a.x_plus),
        ("A-", hb.a_minus, h.a.x_minus),
        ("B0", branch.b0, h.b.x0),
        ("B+", hb.b_plus, h.b.x_plus),
        ("B-", hb.b_minus, h.b.x_minus),
        ("Z0", re(branch.z0), h.z.x0),
        ("Z+", hb.z_plus, h.z.x_plus),
        ("Z-", hb.z_minus, h.z.x_minus),
        ("L0", branch.l0, h.sigma.x0),
        ("L+", hb.l_plus, h.sigma.x_plus),
        ("L-", hb.l_minus, h.sigma.x_minus),
    ];
    for (name, a, b) in pairs {
        let relative = f(rel_diff(a, b));
        report.deviations.push(Deviation {
            name: name.to_string(),
            harmonic_balance: [f(a.re), f(a.im)],
            oracle: [f(b.re), f(b.im)],
            relative,
            pass: relative <= tolerance,
        });
    }
    report.passed = report.deviations.iter().all(|d| d.pass);
    Ok(report)
}
