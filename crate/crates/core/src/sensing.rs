//! Probe spectra, peak and window detection, and the mass calibration built on
//! the splitting of the two absorption peaks.
//!
//! Detunings and splittings are in rad/s, masses in kg.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::predict_dip;
use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::params::{derive, DerivedParams, Model, PhysicalConstants, SystemParams, ZeroOrderMode};
use crate::sideband::output_field;
use crate::steady_state::{default_branch, solve_branches, SteadyBranch};

/// Points of the default detuning window.
pub const DEFAULT_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint<T> {
    /// Probe detuning, rad/s.
    pub delta: T,
    pub mu_p: T,
    pub nu_p: T,
    pub abs_l_minus: T,
    /// Output at the probe frequency per unit probe, 1/√(rad/s).
    pub l_out_minus: [T; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan<T> {
    pub points: Vec<ScanPoint<T>>,
    /// Detunings dropped because a denominator vanished, rad/s.
    pub poles: Vec<T>,
    pub params: SystemParams<T>,
    pub derived: DerivedParams<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakReport<T> {
    pub peak_lo: T,
    pub peak_hi: T,
    pub dip: T,
    pub splitting: T,
    /// `(lower peak height − dip height) / |lower peak height|`.
    pub contrast: T,
    pub peak_lo_height: T,
    pub peak_hi_height: T,
    pub dip_height: T,
    /// Local maxima found before keeping the two tallest.
    pub maxima: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve<T> {
    /// `(mass, splitting)` pairs.
    pub samples: Vec<(T, T)>,
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    /// Residual standard error of the fit, rad/s.
    pub residual_std: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate<T> {
    pub mass: T,
    pub uncertainty: T,
    /// Measured splitting lies outside the calibrated range (with 10% slack).
    pub extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassPoint<T> {
    pub mass: T,
    pub report: PeakReport<T>,
    pub scan: SpectrumScan<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSweep<T> {
    pub points: Vec<MassPoint<T>>,
    /// Masses whose spectrum gave no usable splitting, with the reason.
    pub excluded: Vec<(T, String)>,
    pub curve: Option<CalibrationCurve<T>>,
    /// Why the calibration fit failed, when it did.
    pub fit_error: Option<String>,
}

/// How the probe detunings of a scan are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaGrid<T> {
    /// Explicit ascending detunings, rad/s.
    Explicit(Vec<T>),
    /// `n` evenly spaced points over `[lo, hi]`, rad/s.
    Linear { lo: T, hi: T, n: usize },
    /// `n` points over `[0.5 ω₋, 2 ω₋]` of the dressed prediction.
    AroundPrediction { n: usize },
}

impl<T: Real> Default for DeltaGrid<T> {
    fn default() -> Self {
        DeltaGrid::AroundPrediction { n: DEFAULT_POINTS }
    }
}

impl<T: Real> DeltaGrid<T> {
    pub fn resolve(&self, params: &SystemParams<T>, derived: &DerivedParams<T>) -> Vec<T> {
        match self {
            DeltaGrid::Explicit(v) => v.clone(),
            DeltaGrid::Linear { lo, hi, n } => linspace(*lo, *hi, *n),
            DeltaGrid::AroundPrediction { n } => {
                let w = predict_dip(params, derived);
                linspace(w * lit(0.5), w * lit(2.0), *n)
            }
        }
    }
}

pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / lit::<T>((n - 1) as f64);
            (0..n).map(|k| if k + 1 == n { hi } else { lo + step * lit::<T>(k as f64) }).collect()
        }
    }
}

/// Probe response of `branch` over an ascending grid of detunings in `(0, Δ_a)`.
pub fn scan<T: Real>(params: &SystemParams<T>, branch: &SteadyBranch<T>, delta_grid: &[T]) -> Result<SpectrumScan<T>> {
    let consts = PhysicalConstants::default();
    let derived = derive(params, &consts)?;
    let model = Model::new(params, &derived);
    if delta_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter { name: "delta_grid", reason: "must be strictly ascending".into() });
    }
    if delta_grid.iter().any(|d| !(*d > T::zero() && *d < params.delta_a.abs())) {
        return Err(Error::InvalidParameter {
            name: "delta_grid",
            reason: "detunings must lie in (0, |delta_a|)".into(),
        });
    }
    let results: Vec<Result<ScanPoint<T>>> = delta_grid
        .par_iter()
        .map(|&delta| {
            output_field(branch, &model, model.to_model(delta)).map(|r| ScanPoint {
                delta,
                mu_p: r.mu_p,
                nu_p: r.nu_p,
                abs_l_minus: r.l_minus.norm(),
                l_out_minus: [r.l_out_minus.re, r.l_out_minus.im],
            })
        })
        .collect();
    let mut points = Vec::with_capacity(results.len());
    let mut poles = Vec::new();
    for (r, &delta) in results.into_iter().zip(delta_grid) {
        match r {
            Ok(p) if p.mu_p.is_finite() && p.nu_p.is_finite() => points.push(p),
            Ok(_) | Err(Error::Pole { .. }) => poles.push(delta),
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyScan);
    }
    Ok(SpectrumScan { points, poles, params: *params, derived })
}

/// Vertex of the parabola through three samples, or the middle sample if flat.
fn vertex<T: Real>(x: [T; 3], y: [T; 3]) -> (T, T) {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a == T::zero() || !a.is_finite() {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = -b / (lit::<T>(2.0) * a);
    if !(xv >= x0 && xv <= x2) {
        return (x1, y1);
    }
    let c = y1 - a * x1 * x1 - b * x1;
    (xv, (a * xv + b) * xv + c)
}

/// The two tallest interior maxima of `μ_p` and the minimum between them.
pub fn detect_peaks<T: Real>(scan: &SpectrumScan<T>) -> Result<PeakReport<T>> {
    let pts = &scan.points;
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("peak detection needs 5 points, got {}", pts.len())));
    }
    let x: Vec<T> = pts.iter().map(|p| p.delta).collect();
    let y: Vec<T> = pts.iter().map(|p| p.mu_p).collect();
    let refine = |k: usize| vertex([x[k - 1], x[k], x[k + 1]], [y[k - 1], y[k], y[k + 1]]);

    let mut maxima: Vec<(usize, T, T)> = (1..pts.len() - 1)
        .filter(|&k| y[k] > y[k - 1] && y[k] >= y[k + 1])
        .map(|k| {
            let (xv, yv) = refine(k);
            (k, xv, yv)
        })
        .collect();
    if maxima.len() < 2 {
        return Err(Error::NoSplitting { maxima: maxima.len() });
    }
    let count = maxima.len();
    maxima.sort_by(|a, b| b.2.partial_cmp(&a.2).expect("finite heights").then(a.0.cmp(&b.0)));
    let (lo, hi) = if maxima[0].0 < maxima[1].0 { (maxima[0], maxima[1]) } else { (maxima[1], maxima[0]) };

    let k_dip = (lo.0 + 1..hi.0).min_by(|&a, &b| y[a].partial_cmp(&y[b]).expect("finite heights")).unwrap_or(lo.0 + 1);
    let (dip, dip_height) = if k_dip > lo.0 && k_dip < hi.0 { refine(k_dip) } else { (x[k_dip], y[k_dip]) };
    let low_peak = lo.2.min(hi.2);
    Ok(PeakReport {
        peak_lo: lo.1,
        peak_hi: hi.1,
        dip,
        splitting: hi.1 - lo.1,
        contrast: (low_peak - dip_height) / low_peak.abs(),
        peak_lo_height: lo.2,
        peak_hi_height: hi.2,
        dip_height,
        maxima: count,
    })
}

/// Ordinary least squares of splitting against mass.
pub fn fit_calibration<T: Real>(samples: &[(T, T)]) -> Result<CalibrationCurve<T>> {
    if samples.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 samples, got {}", samples.len())));
    }
    let n = lit::<T>(samples.len() as f64);
    let mean = |f: &dyn Fn(&(T, T)) -> T| samples.iter().map(f).fold(T::zero(), |a, b| a + b) / n;
    let xm = mean(&|s| s.0);
    let ym = mean(&|s| s.1);
    // normalise so f32 does not see 1e-50-sized products
    let xs = samples.iter().fold(T::zero(), |m, s| m.max((s.0 - xm).abs()));
    let ys = samples.iter().fold(T::zero(), |m, s| m.max((s.1 - ym).abs())).max(ym.abs()).max(T::min_positive_value());
    if xs == T::zero() || !(xs / xm.abs().max(T::min_positive_value()) > lit::<T>(1e3) * T::epsilon()) {
        return Err(Error::Fit("masses are degenerate".into()));
    }
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for s in samples {
        let dx = (s.0 - xm) / xs;
        let dy = (s.1 - ym) / ys;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let b = sxy / sxx;
    let ss_res = samples.iter().fold(T::zero(), |acc, s| {
        let r = (s.1 - ym) / ys - b * (s.0 - xm) / xs;
        acc + r * r
    });
    let r_squared = if syy == T::zero() { T::one() } else { (T::one() - ss_res / syy).max(T::zero()).min(T::one()) };
    let slope = b * ys / xs;
    let dof = lit::<T>((samples.len() - 2) as f64);
    Ok(CalibrationCurve {
        samples: samples.to_vec(),
        slope,
        intercept: ym - slope * xm,
        r_squared,
        residual_std: (ss_res / dof).sqrt() * ys,
    })
}

/// Inverts a measured splitting through the calibration.
pub fn invert_mass<T: Real>(curve: &CalibrationCurve<T>, measured: T) -> Result<MassEstimate<T>> {
    let n = lit::<T>(curve.samples.len().max(1) as f64);
    let xm = curve.samples.iter().fold(T::zero(), |a, s| a + s.0) / n;
    let ym = curve.samples.iter().fold(T::zero(), |a, s| a + s.1) / n;
    let scale = if xm != T::zero() { (ym / xm).abs() } else { T::one() };
    if !(curve.slope.abs() >= lit::<T>(1e-12) * scale) || curve.slope == T::zero() {
        return Err(Error::InsensitiveCalibration { slope: curve.slope.to_f64().unwrap_or(0.0) });
    }
    let (lo, hi) =
        curve.samples.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| (lo.min(s.1), hi.max(s.1)));
    let slack = (hi - lo) * lit(0.1);
    let extrapolated = measured < lo - slack || measured > hi + slack;
    if extrapolated {
        log::warn!("measured splitting {measured} outside calibrated range [{lo}, {hi}]: extrapolating");
    }
    Ok(MassEstimate {
        mass: (measured - curve.intercept) / curve.slope,
        uncertainty: curve.residual_std / curve.slope.abs(),
        extrapolated,
    })
}

/// Peak report for one parameter set: branch, scan and detection.
pub fn splitting_at<T: Real>(
    params: &SystemParams<T>,
    grid: &DeltaGrid<T>,
    mode: ZeroOrderMode,
) -> Result<(PeakReport<T>, SpectrumScan<T>)> {
    let derived = derive(params, &PhysicalConstants::default())?;
    let model = Model::new(params, &derived);
    let branches = solve_branches(&model, mode)?;
    let idx = default_branch(&branches).ok_or_else(|| Error::Degenerate("no steady branch".into()))?;
    let s = scan(params, &branches[idx], &grid.resolve(params, &derived))?;
    Ok((detect_peaks(&s)?, s))
}

/// Splitting at every mass (η re-derived, ω fixed) and its linear calibration.
pub fn mass_sweep<T: Real>(
    base: &SystemParams<T>,
    masses: &[T],
    grid: &DeltaGrid<T>,
    mode: ZeroOrderMode,
) -> Result<MassSweep<T>> {
    if masses.iter().any(|m| !(*m > T::zero() && m.is_finite())) || masses.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "mass_grid",
            reason: "masses must be positive and ascending".into(),
        });
    }
    let runs: Vec<(T, Result<_>)> =
        masses.par_iter().map(|&mass| (mass, splitting_at(&base.with_mass(mass), grid, mode))).collect();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (mass, r) in runs {
        match r {
            Ok((report, scan)) => points.push(MassPoint { mass, report, scan }),
            Err(e) if matches!(e, Error::InvalidParameter { .. }) => return Err(e),
            Err(e) => {
                log::warn!("mass {mass:?} kg excluded: {e}");
                excluded.push((mass, e.to_string()));
            }
        }
    }
    let samples: Vec<(T, T)> = points.iter().map(|p| (p.mass, p.report.splitting)).collect();
    let (curve, fit_error) = match fit_calibration(&samples) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(MassSweep { points, excluded, curve, fit_error })
}
