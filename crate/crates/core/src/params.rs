//! Physical parameters, unit conventions and the derived couplings.
//!
//! Every frequency-like quantity is an angular frequency stored in rad/s.
//! Config files quote them in MHz or kHz (angular), so `1 MHz` maps to
//! `1e6 rad/s`. The solvers work on a [`Model`], a copy of the rates divided by
//! the atom-cavity coupling `g`, which keeps every intermediate of order one for
//! both f32 and f64.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lit, Real};

pub const MHZ: f64 = 1e6;
pub const KHZ: f64 = 1e3;

/// CODATA 2018 reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Probe-to-drive ratio above which the weak-probe assumption is flagged.
pub const WEAK_PROBE_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    /// Reduced Planck constant, J·s.
    pub hbar: T,
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self { hbar: lit(HBAR_SI) }
    }
}

/// Physical inputs of one configuration. Rates in rad/s, mass in kg, wave vector in 1/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    /// Atom-cavity coupling.
    pub g: T,
    /// Trap (vibration) frequency.
    pub omega: T,
    /// Atom-drive detuning, `Ω - ω_d`.
    pub delta_a: T,
    /// Cavity-drive detuning, `ω_a - ω_d`.
    pub delta_c: T,
    /// Cavity decay rate.
    pub gamma_a: T,
    /// Vibration decay rate.
    pub gamma_b: T,
    /// Atomic decay rate.
    pub gamma_q: T,
    /// Drive Rabi frequency.
    pub xi: T,
    /// Probe Rabi frequency.
    pub eps: T,
    /// Atomic mass.
    pub mass: T,
    /// Photon wave vector.
    pub k_vec: T,
}

impl<T: Real> SystemParams<T> {
    /// Checks the sign and finiteness constraints.
    ///
    /// `k_vec = 0` is accepted: it switches the motional coupling off.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("g", self.g),
            ("omega", self.omega),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_q", self.gamma_q),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite and > 0, got {v}") });
            }
        }
        let non_negative = [("xi", self.xi), ("eps", self.eps), ("k_vec", self.k_vec)];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        for (name, v) in [("delta_a", self.delta_a), ("delta_c", self.delta_c)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: "must be finite".into() });
            }
        }
        Ok(())
    }

    /// Warning text when the probe is not small compared with the drive.
    pub fn weak_probe_warning(&self) -> Option<String> {
        if self.xi > T::zero() && self.eps >= lit::<T>(WEAK_PROBE_RATIO) * self.xi {
            Some(format!(
                "probe eps = {} rad/s is not small against drive xi = {} rad/s (ratio {:.3} >= {})",
                self.eps,
                self.xi,
                (self.eps / self.xi).to_f64().unwrap_or(f64::NAN),
                WEAK_PROBE_RATIO
            ))
        } else {
            None
        }
    }

    pub fn with_mass(mut self, mass: T) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_xi(mut self, xi: T) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_eps(mut self, eps: T) -> Self {
        self.eps = eps;
        self
    }

    /// Converts every field to another scalar type.
    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: T| U::from_f64(x.to_f64().expect("finite")).expect("representable");
        SystemParams {
            g: c(self.g),
            omega: c(self.omega),
            delta_a: c(self.delta_a),
            delta_c: c(self.delta_c),
            gamma_a: c(self.gamma_a),
            gamma_b: c(self.gamma_b),
            gamma_q: c(self.gamma_q),
            xi: c(self.xi),
            eps: c(self.eps),
            mass: c(self.mass),
            k_vec: c(self.k_vec),
        }
    }
}

/// Couplings generated by the atom's centre-of-mass motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams<T> {
    /// Zero-point length `sqrt(ħ / 2Mω)`, m.
    pub x_zpf: T,
    /// Optomechanical coupling `k X_zpf ω`, rad/s.
    pub eta: T,
    /// Kerr strength `ħk² / 2M`, rad/s. Reported only; the dynamics drop it.
    pub chi: T,
}

/// Derives `X_zpf`, `η` and `χ`, checking the two equivalent forms of `χ`.
pub fn derive<T: Real>(params: &SystemParams<T>, consts: &PhysicalConstants<T>) -> Result<DerivedParams<T>> {
    params.validate()?;
    if !(consts.hbar > T::zero()) {
        return Err(Error::InvalidParameter { name: "hbar", reason: "must be > 0".into() });
    }
    let two = lit::<T>(2.0);
    let x_zpf = (consts.hbar / (two * params.mass * params.omega)).sqrt();
    let eta = params.k_vec * x_zpf * params.omega;
    let chi = consts.hbar * params.k_vec * params.k_vec / (two * params.mass);
    for (name, v) in [("x_zpf", x_zpf), ("eta", eta), ("chi", chi)] {
        if !v.is_finite() || (name == "x_zpf" && v == T::zero()) {
            return Err(Error::InvalidParameter { name, reason: format!("derived value not finite/positive: {v}") });
        }
    }
    let chi_alt = params.k_vec * params.k_vec * x_zpf * x_zpf * params.omega;
    let tol = lit::<T>(1e3) * T::epsilon();
    if chi > T::zero() && ((chi - chi_alt) / chi).abs() > tol {
        return Err(Error::InvalidParameter {
            name: "chi",
            reason: format!("inconsistent Kerr strength forms: {chi} vs {chi_alt}"),
        });
    }
    Ok(DerivedParams { x_zpf, eta, chi })
}

/// Rates in units of `scale` (= g, in rad/s), ready for the solvers.
///
/// Fields are public so tests can build deliberately unphysical models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model<T> {
    /// Frequency unit in rad/s.
    pub scale: T,
    pub g: T,
    pub omega: T,
    pub delta_a: T,
    pub delta_c: T,
    pub gamma_a: T,
    pub gamma_b: T,
    pub gamma_q: T,
    pub xi: T,
    pub eps: T,
    pub eta: T,
}

impl<T: Real> Model<T> {
    pub fn new(params: &SystemParams<T>, derived: &DerivedParams<T>) -> Self {
        let s = params.g;
        Self {
            scale: s,
            g: params.g / s,
            omega: params.omega / s,
            delta_a: params.delta_a / s,
            delta_c: params.delta_c / s,
            gamma_a: params.gamma_a / s,
            gamma_b: params.gamma_b / s,
            gamma_q: params.gamma_q / s,
            xi: params.xi / s,
            eps: params.eps / s,
            eta: derived.eta / s,
        }
    }

    /// Validates, derives and scales in one go.
    pub fn build(params: &SystemParams<T>, consts: &PhysicalConstants<T>) -> Result<Self> {
        let derived = derive(params, consts)?;
        Ok(Self::new(params, &derived))
    }

    /// Rate in rad/s to model units.
    #[inline]
    pub fn to_model(&self, rate: T) -> T {
        rate / self.scale
    }

    /// Rate in model units to rad/s.
    #[inline]
    pub fn to_si(&self, rate: T) -> T {
        rate * self.scale
    }

    pub fn with_eta(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_xi(mut self, xi: T) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_eps(mut self, eps: T) -> Self {
        self.eps = eps;
        self
    }
}

/// How the zero-order inversion `Z₀` is determined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "z0")]
pub enum ZeroOrderMode {
    /// `Z₀` imposed externally.
    Fixed(f64),
    /// `Z₀` from the closed-form ground-state expression in `|A₀|²` and `ξ`.
    #[default]
    SelfConsistent,
    /// `Z₀` from the full steady-state balance of the inversion equation, so the
    /// branch is an exact fixed point of the mean-field flow.
    Exact,
}

/// Everything read from a config document.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: SystemParams<f64>,
    pub numerics: Numerics,
    pub warnings: Vec<String>,
}

/// Optional `[numerics]` settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    pub mode: Option<ZeroOrderMode>,
    pub branch: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    system: Option<RawSystem>,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    numerics: RawNumerics,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    g_mhz: Option<f64>,
    omega_mhz: Option<f64>,
    delta_a_mhz: Option<f64>,
    delta_c_mhz: Option<f64>,
    gamma_a_khz: Option<f64>,
    gamma_b_khz: Option<f64>,
    gamma_q_khz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mass_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_per_m: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    #[serde(skip_serializing_if = "Option::is_none")]
    xi_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_mhz: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    branch: Option<usize>,
}

/// Default atomic mass when `mass_kg` is absent.
pub const DEFAULT_MASS_KG: f64 = 1e-25;
/// Default wave vector when `k_per_m` is absent.
pub const DEFAULT_K_PER_M: f64 = 1e7;

/// Parses a TOML config document.
///
/// Required in `[system]`: `g_mhz`, `omega_mhz`, `delta_a_mhz`, `delta_c_mhz`,
/// `gamma_a_khz`, `gamma_b_khz`, `gamma_q_khz`. Optional: `mass_kg` (1e-25),
/// `k_per_m` (1e7). `[drive]` keys `xi_mhz`, `eps_mhz` default to 0.
/// `[numerics]` accepts `mode` (`fixed`, `self`, `exact`), `z0` (needed by
/// `fixed`) and `branch`.
pub fn parse_config(text: &str) -> Result<Config> {
    let raw: RawDocument = toml::from_str(text)
        .map_err(|e| Error::Config { key: unknown_key_hint(&e.to_string()), reason: e.message().to_string() })?;
    let sys = raw.system.ok_or_else(|| Error::Config { key: "system".into(), reason: "missing section".into() })?;
    let req = |v: Option<f64>, key: &str| -> Result<f64> {
        v.ok_or_else(|| Error::Config { key: format!("system.{key}"), reason: "missing required key".into() })
    };
    let params = SystemParams {
        g: req(sys.g_mhz, "g_mhz")? * MHZ,
        omega: req(sys.omega_mhz, "omega_mhz")? * MHZ,
        delta_a: req(sys.delta_a_mhz, "delta_a_mhz")? * MHZ,
        delta_c: req(sys.delta_c_mhz, "delta_c_mhz")? * MHZ,
        gamma_a: req(sys.gamma_a_khz, "gamma_a_khz")? * KHZ,
        gamma_b: req(sys.gamma_b_khz, "gamma_b_khz")? * KHZ,
        gamma_q: req(sys.gamma_q_khz, "gamma_q_khz")? * KHZ,
        xi: raw.drive.xi_mhz.unwrap_or(0.0) * MHZ,
        eps: raw.drive.eps_mhz.unwrap_or(0.0) * MHZ,
        mass: sys.mass_kg.unwrap_or(DEFAULT_MASS_KG),
        k_vec: sys.k_per_m.unwrap_or(DEFAULT_K_PER_M),
    };
    params.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::Config { key: config_key_for(name).into(), reason },
        other => other,
    })?;

    let mode = match raw.numerics.mode.as_deref() {
        None => {
            if raw.numerics.z0.is_some() {
                return Err(Error::Config { key: "numerics.z0".into(), reason: "z0 requires mode = \"fixed\"".into() });
            }
            None
        }
        Some("fixed") => {
            let z0 = raw
                .numerics
                .z0
                .ok_or_else(|| Error::Config { key: "numerics.z0".into(), reason: "mode \"fixed\" needs z0".into() })?;
            if !(-1.0..0.0).contains(&z0) {
                return Err(Error::Config {
                    key: "numerics.z0".into(),
                    reason: format!("must lie in [-1, 0), got {z0}"),
                });
            }
            Some(ZeroOrderMode::Fixed(z0))
        }
        Some("self") => Some(ZeroOrderMode::SelfConsistent),
        Some("exact") => Some(ZeroOrderMode::Exact),
        Some(other) => {
            return Err(Error::Config {
                key: "numerics.mode".into(),
                reason: format!("expected fixed, self or exact, got {other:?}"),
            })
        }
    };

    let warnings = params.weak_probe_warning().into_iter().collect();
    Ok(Config { params, numerics: Numerics { mode, branch: raw.numerics.branch }, warnings })
}

/// Writes `params` back into the config format understood by [`parse_config`].
pub fn to_config_string(params: &SystemParams<f64>, numerics: &Numerics) -> String {
    let (mode, z0) = match numerics.mode {
        None => (None, None),
        Some(ZeroOrderMode::Fixed(z)) => (Some("fixed".to_string()), Some(z)),
        Some(ZeroOrderMode::SelfConsistent) => (Some("self".to_string()), None),
        Some(ZeroOrderMode::Exact) => (Some("exact".to_string()), None),
    };
    let doc = RawDocument {
        system: Some(RawSystem {
            g_mhz: Some(params.g / MHZ),
            omega_mhz: Some(params.omega / MHZ),
            delta_a_mhz: Some(params.delta_a / MHZ),
            delta_c_mhz: Some(params.delta_c / MHZ),
            gamma_a_khz: Some(params.gamma_a / KHZ),
            gamma_b_khz: Some(params.gamma_b / KHZ),
            gamma_q_khz: Some(params.gamma_q / KHZ),
            mass_kg: Some(params.mass),
            k_per_m: Some(params.k_vec),
        }),
        drive: RawDrive { xi_mhz: Some(params.xi / MHZ), eps_mhz: Some(params.eps / MHZ) },
        numerics: RawNumerics { mode, z0, branch: numerics.branch },
    };
    toml::to_string(&doc).expect("config document serializes")
}

fn config_key_for(name: &str) -> &'static str {
    match name {
        "g" => "system.g_mhz",
        "omega" => "system.omega_mhz",
        "delta_a" => "system.delta_a_mhz",
        "delta_c" => "system.delta_c_mhz",
        "gamma_a" => "system.gamma_a_khz",
        "gamma_b" => "system.gamma_b_khz",
        "gamma_q" => "system.gamma_q_khz",
        "xi" => "drive.xi_mhz",
        "eps" => "drive.eps_mhz",
        "mass" => "system.mass_kg",
        "k_vec" => "system.k_per_m",
        _ => "unknown",
    }
}

fn unknown_key_hint(msg: &str) -> String {
    // toml reports unknown fields as "unknown field `name`, expected ..."
    msg.split("unknown field `")
        .nth(1)
        .and_then(|rest| rest.split('`').next())
        .map(str::to_string)
        .unwrap_or_else(|| "document".to_string())
}
