//! Experiment configuration. The on-disk format is TOML; a JSON document or
//! the `# {...}` header line of any CSV written by this crate is accepted too,
//! so a run can be repeated from its own output.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use notoc_core::dynamics::{Boundary, HamiltonianSpec};
use notoc_core::inversion::NoiseKind;
use notoc_core::protocol_a::RotationScheme;
use notoc_core::PauliString;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; absent means one per core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_out")]
    pub out: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub observable: ObservableConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub protocol_a: ProtocolAConfig,
    #[serde(default)]
    pub protocol_b: ProtocolBConfig,
    #[serde(default)]
    pub inversion: InversionConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub collective: CollectiveConfig,
}

fn default_out() -> String {
    "out".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n_sites: usize,
    /// Field tilts in radians; every command loops over them.
    pub thetas: Vec<f64>,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

fn one() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn spec(&self, theta: f64) -> HamiltonianSpec {
        HamiltonianSpec {
            n_sites: self.n_sites,
            j: self.j,
            b: self.b,
            theta,
            boundary: self.boundary,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    /// Pauli string such as `"YIIIII"`; defaults to `Y` on the first site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
}

/// Grid in units of `Jt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 10.0,
            step: 0.05,
        }
    }
}

impl TimeConfig {
    /// Grid points `start + i * step` up to `stop` (inclusive within 1e-9 steps).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolAConfig {
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub scheme: RotationScheme,
    /// Enumerate all `6^N` discrete rotations instead of sampling.
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_noise: Option<f64>,
    #[serde(default = "default_exact_sites")]
    pub max_exact_sites: usize,
}

fn default_samples() -> usize {
    1000
}

fn default_exact_sites() -> usize {
    notoc_core::protocol_a::DEFAULT_MAX_EXACT_SITES
}

impl Default for ProtocolAConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1.0, (2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()],
            scheme: RotationScheme::default(),
            exact: false,
            samples: default_samples(),
            shot_noise: None,
            max_exact_sites: default_exact_sites(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsetMode {
    #[default]
    All,
    Sampled,
    Reflection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolBConfig {
    /// Defaults to `1..=N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<usize>>,
    #[serde(default)]
    pub scheme: RotationScheme,
    #[serde(default)]
    pub exact_rotations: bool,
    #[serde(default = "default_rotations")]
    pub rotations: usize,
    #[serde(default)]
    pub subsets: SubsetMode,
    /// Used with `subsets = "sampled"`.
    #[serde(default = "default_subset_samples")]
    pub subset_samples: usize,
    #[serde(default = "default_exact_sites")]
    pub max_exact_sites: usize,
}

fn default_rotations() -> usize {
    500
}

fn default_subset_samples() -> usize {
    10
}

impl Default for ProtocolBConfig {
    fn default() -> Self {
        Self {
            k_values: None,
            scheme: RotationScheme::default(),
            exact_rotations: false,
            rotations: default_rotations(),
            subsets: SubsetMode::All,
            subset_samples: default_subset_samples(),
            max_exact_sites: default_exact_sites(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    /// Defaults to `1..=N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<usize>>,
    pub a_values: Vec<usize>,
    pub etas: Vec<f64>,
    #[serde(default)]
    pub noise: NoiseKind,
    pub realizations: usize,
    /// Explicit steps; when absent a log grid from `dx_min` to the largest
    /// feasible step is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx_values: Option<Vec<f64>>,
    pub dx_min: f64,
    pub dx_count: usize,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            k_values: None,
            a_values: vec![1, 2],
            etas: vec![1e-2, 1e-4],
            noise: NoiseKind::Multiplicative,
            realizations: 100,
            dx_values: None,
            dx_min: 5e-3,
            dx_count: 12,
        }
    }
}

impl InversionConfig {
    pub fn ranks(&self, n_sites: usize) -> Vec<usize> {
        self.k_values
            .clone()
            .unwrap_or_else(|| (1..=n_sites).collect())
    }

    pub fn steps(&self, a: usize) -> Result<Vec<f64>, LabError> {
        match &self.dx_values {
            Some(v) => Ok(v.clone()),
            None => {
                let hi = notoc_core::inversion::max_step(1, a);
                Ok(notoc_core::inversion::log_grid(
                    self.dx_min,
                    hi,
                    self.dx_count,
                )?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub x_values: Vec<f64>,
    /// Averaging window in `Jt`.
    pub window: [f64; 2],
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            x_values: vec![1.0 / 9.0, 2.0 / 9.0, 1.0 / 3.0],
            window: [5.0, 10.0],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollectiveObservable {
    Jx,
    Jy,
    #[default]
    Jz,
    /// Traceless part of `J_z^2`.
    Jz2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollectiveConfig {
    pub j: f64,
    /// Defaults to `1..=2J`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<usize>>,
    pub chi: f64,
    pub h_x: f64,
    pub h_z: f64,
    #[serde(default)]
    pub observable: CollectiveObservable,
    /// Rotated states per time series.
    pub samples: usize,
    /// Sphere points for the empirical coefficient variance.
    pub variance_samples: usize,
}

impl Default for CollectiveConfig {
    fn default() -> Self {
        Self {
            j: 2.0,
            k_values: None,
            chi: 2.0,
            h_x: 1.0,
            h_z: 0.0,
            observable: CollectiveObservable::Jz,
            samples: 2000,
            variance_samples: 1_000_000,
        }
    }
}

impl CollectiveConfig {
    pub fn ranks(&self) -> Vec<usize> {
        let two_j = (2.0 * self.j).round() as usize;
        self.k_values
            .clone()
            .unwrap_or_else(|| (1..=two_j).collect())
    }
}

fn invalid(field: &str, message: impl Into<String>) -> LabError {
    LabError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn finite_positive(field: &str, v: f64) -> Result<(), LabError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be finite and positive")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        toml::from_str(text).map_err(|e| invalid("config", e.to_string()))
    }

    /// Reads TOML, JSON, or a CSV whose first line is a `# {json}` echo.
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
        let trimmed = text.trim_start();
        if let Some(rest) = trimmed.strip_prefix("# {") {
            let line = format!("{{{}", rest.lines().next().unwrap_or_default());
            return serde_json::from_str(&line).map_err(|e| invalid("config", e.to_string()));
        }
        if trimmed.starts_with('{') {
            return serde_json::from_str(trimmed).map_err(|e| invalid("config", e.to_string()));
        }
        Self::from_toml(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn observable(&self) -> Result<PauliString, LabError> {
        let text = match &self.observable.pauli {
            Some(s) => s.clone(),
            None => {
                let mut s = String::from("Y");
                s.extend(std::iter::repeat('I').take(self.model.n_sites.saturating_sub(1)));
                s
            }
        };
        let p: PauliString = text
            .parse()
            .map_err(|e: notoc_core::Error| invalid("observable.pauli", e.to_string()))?;
        if p.n_sites() != self.model.n_sites {
            return Err(invalid(
                "observable.pauli",
                format!("{} sites, model has {}", p.n_sites(), self.model.n_sites),
            ));
        }
        if notoc_core::pauli::weight(&p) == 0 {
            return Err(invalid("observable.pauli", "must not be the identity"));
        }
        Ok(p)
    }

    /// The metrics window must lie inside the time grid.
    pub fn validate_window(&self) -> Result<(), LabError> {
        let [w0, w1] = self.metrics.window;
        if w0 >= self.time.start - 1e-12 && w1 <= self.time.stop + 1e-12 {
            Ok(())
        } else {
            Err(invalid("metrics.window", "must lie inside the time grid"))
        }
    }

    /// Grid in physical time, `t = Jt / J`.
    pub fn times(&self) -> Vec<f64> {
        self.time
            .points()
            .iter()
            .map(|jt| jt / self.model.j)
            .collect()
    }

    /// Checks every numeric range. Nothing is computed before this passes.
    pub fn validate(&self) -> Result<(), LabError> {
        let m = &self.model;
        if m.n_sites < 2 {
            return Err(invalid(
                "model.n_sites",
                format!("{} must be >= 2", m.n_sites),
            ));
        }
        if m.n_sites > notoc_core::DEFAULT_MAX_DENSE_SITES {
            return Err(LabError::ResourceGate(format!(
                "model.n_sites = {} exceeds the dense limit {}",
                m.n_sites,
                notoc_core::DEFAULT_MAX_DENSE_SITES
            )));
        }
        if m.thetas.is_empty() {
            return Err(invalid("model.thetas", "at least one value required"));
        }
        for &t in &m.thetas {
            if !(0.0..=FRAC_PI_2 + 1e-12).contains(&t) {
                return Err(invalid("model.thetas", format!("{t} is outside [0, pi/2]")));
            }
        }
        if !(m.j.is_finite() && m.j != 0.0) {
            return Err(invalid(
                "model.j",
                "must be finite and nonzero (time is in units of 1/J)",
            ));
        }
        if !m.b.is_finite() {
            return Err(invalid("model.b", "must be finite"));
        }
        self.observable()?;
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be >= 1"));
        }

        let t = &self.time;
        if !(t.start.is_finite() && t.stop.is_finite() && t.start >= 0.0 && t.stop >= t.start) {
            return Err(invalid("time", "need 0 <= start <= stop"));
        }
        finite_positive("time.step", t.step)?;
        if t.points().len() > 1_000_000 {
            return Err(invalid("time", "more than 1e6 grid points"));
        }

        let a = &self.protocol_a;
        if a.epsilons.is_empty() {
            return Err(invalid(
                "protocol_a.epsilons",
                "at least one value required",
            ));
        }
        for &e in &a.epsilons {
            if !(e > 0.0 && e <= 1.0) {
                return Err(invalid(
                    "protocol_a.epsilons",
                    format!("{e} is outside (0, 1]"),
                ));
            }
        }
        if !a.exact && a.samples == 0 {
            return Err(invalid("protocol_a.samples", "must be >= 1"));
        }
        if let Some(s) = a.shot_noise {
            if !(s.is_finite() && s >= 0.0) {
                return Err(invalid(
                    "protocol_a.shot_noise",
                    format!("{s} must be >= 0"),
                ));
            }
        }

        let b = &self.protocol_b;
        if let Some(ks) = &b.k_values {
            if ks.is_empty() || ks.iter().any(|&k| k == 0 || k > m.n_sites) {
                return Err(invalid(
                    "protocol_b.k_values",
                    format!("values must lie in 1..={}", m.n_sites),
                ));
            }
        }
        if !b.exact_rotations && b.rotations == 0 {
            return Err(invalid("protocol_b.rotations", "must be >= 1"));
        }
        if b.subsets == SubsetMode::Sampled && b.subset_samples == 0 {
            return Err(invalid("protocol_b.subset_samples", "must be >= 1"));
        }

        let inv = &self.inversion;
        let inv_ranks = inv.ranks(m.n_sites);
        if inv_ranks.is_empty() || inv_ranks.iter().any(|&k| k == 0 || k > m.n_sites) {
            return Err(invalid(
                "inversion.k_values",
                format!("values must lie in 1..={}", m.n_sites),
            ));
        }
        for &a in &inv.a_values {
            let longest = inv_ranks.iter().max().copied().unwrap_or(1) + a;
            if a == 0 || longest > notoc_core::inversion::MAX_STENCIL_LEN {
                return Err(invalid(
                    "inversion.a_values",
                    format!(
                        "a = {a} must be >= 1 with k + a <= {}",
                        notoc_core::inversion::MAX_STENCIL_LEN
                    ),
                ));
            }
        }
        if inv.a_values.is_empty() {
            return Err(invalid("inversion.a_values", "at least one value required"));
        }
        for &eta in &inv.etas {
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(invalid("inversion.etas", format!("{eta} must be >= 0")));
            }
        }
        if inv.realizations == 0 {
            return Err(invalid("inversion.realizations", "must be >= 1"));
        }
        match &inv.dx_values {
            Some(v) => {
                if v.is_empty() {
                    return Err(invalid(
                        "inversion.dx_values",
                        "at least one value required",
                    ));
                }
                for &dx in v {
                    finite_positive("inversion.dx_values", dx)?;
                }
            }
            None => {
                finite_positive("inversion.dx_min", inv.dx_min)?;
                if inv.dx_count == 0 {
                    return Err(invalid("inversion.dx_count", "must be >= 1"));
                }
            }
        }

        let mt = &self.metrics;
        for &x in &mt.x_values {
            if !(0.0..=1.0).contains(&x) {
                return Err(invalid(
                    "metrics.x_values",
                    format!("{x} is outside [0, 1]"),
                ));
            }
        }
        let [w0, w1] = mt.window;
        if !(w0.is_finite() && w1.is_finite() && w0 < w1) {
            return Err(invalid("metrics.window", "must be an increasing pair"));
        }

        let c = &self.collective;
        let two_j = 2.0 * c.j;
        if !(c.j > 0.0 && (two_j - two_j.round()).abs() < 1e-9) {
            return Err(invalid(
                "collective.j",
                format!("{} must be a positive multiple of 1/2", c.j),
            ));
        }
        if two_j.round() as usize > notoc_core::collective::MAX_TWO_J {
            return Err(LabError::ResourceGate(format!(
                "collective.j = {} exceeds {}",
                c.j,
                notoc_core::collective::MAX_TWO_J / 2
            )));
        }
        let ranks = c.ranks();
        if ranks.is_empty() || ranks.iter().any(|&k| k == 0 || k as f64 > two_j + 1e-9) {
            return Err(invalid("collective.k_values", "values must lie in 1..=2J"));
        }
        for (name, v) in [
            ("collective.chi", c.chi),
            ("collective.h_x", c.h_x),
            ("collective.h_z", c.h_z),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if c.samples == 0 {
            return Err(invalid("collective.samples", "must be >= 1"));
        }
        if c.variance_samples < 2 {
            return Err(invalid("collective.variance_samples", "must be >= 2"));
        }
        Ok(())
    }
}
