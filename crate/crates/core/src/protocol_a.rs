//! Randomized polarized-state estimator of the size generating function.
//!
//! Each sample rotates `((I + eps Z) / 2)^{(x) N}` by independent single-site
//! rotations, evolves it forward, and squares `Tr[rho(t) W]`. The average over
//! rotations is `sum_k P_k (eps^2 / 3)^k` for a Pauli observable.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dynamics::{EvolutionCache, HamiltonianSpec};
use crate::operator::{trace_product, DenseOperator};
use crate::pauli::{to_dense, PauliString};
use crate::seed::{task_rng, TaskKind};
use crate::stats::Running;
use crate::{exec, Error, Result, C64};

/// Largest chain that may be enumerated exactly unless the caller raises it.
pub const DEFAULT_MAX_EXACT_SITES: usize = 6;
/// Above this size exact enumeration logs a warning.
pub const EXACT_WARN_SITES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolarizedStateSpec {
    pub n_sites: usize,
    pub epsilon: f64,
}

impl PolarizedStateSpec {
    pub fn new(n_sites: usize, epsilon: f64) -> Result<Self> {
        let spec = Self { n_sites, epsilon };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::out_of_range("n_sites", 0.0, ">= 1"));
        }
        if !(self.epsilon.abs() <= 1.0) {
            return Err(Error::out_of_range("epsilon", self.epsilon, "[-1, 1]"));
        }
        crate::pauli::check_dense_sites(self.n_sites, crate::DEFAULT_MAX_DENSE_SITES)
    }

    /// PGF argument `x = eps^2 / 3`.
    pub fn x(&self) -> f64 {
        self.epsilon * self.epsilon / 3.0
    }
}

fn single_site_state(epsilon: f64, n: [f64; 3]) -> DenseOperator {
    let half = 0.5 * epsilon;
    DenseOperator::from_fn(2, |r, c| match (r, c) {
        (0, 0) => C64::new(0.5 + half * n[2], 0.0),
        (1, 1) => C64::new(0.5 - half * n[2], 0.0),
        (0, 1) => C64::new(half * n[0], -half * n[1]),
        _ => C64::new(half * n[0], half * n[1]),
    })
}

/// `((I + eps Z) / 2)^{(x) N}`.
pub fn prepare_rho_ini(spec: &PolarizedStateSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let site = single_site_state(spec.epsilon, [0.0, 0.0, 1.0]);
    Ok(DenseOperator::kron_all(
        core::iter::repeat(&site).take(spec.n_sites),
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RotationScheme {
    Continuous,
    #[default]
    Discrete6,
}

impl RotationScheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Continuous => "continuous",
            Self::Discrete6 => "discrete6",
        }
    }
}

impl fmt::Display for RotationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for RotationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Self::Continuous),
            "discrete6" => Ok(Self::Discrete6),
            _ => Err(Error::Parse {
                what: "rotation scheme",
                input: s.into(),
            }),
        }
    }
}

/// Image of `Z` under a discrete rotation. The declaration order is the digit
/// order of exact enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiscreteLabel {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusZ,
    MinusZ,
}

impl DiscreteLabel {
    pub const ALL: [DiscreteLabel; 6] = [
        Self::PlusX,
        Self::MinusX,
        Self::PlusY,
        Self::MinusY,
        Self::PlusZ,
        Self::MinusZ,
    ];

    pub fn from_digit(d: usize) -> Self {
        Self::ALL[d]
    }

    pub fn digit(self) -> usize {
        self as usize
    }

    /// Euler angles `(theta, phi)` of the rotation.
    pub fn angles(self) -> (f64, f64) {
        match self {
            Self::PlusX => (FRAC_PI_2, 0.0),
            Self::MinusX => (FRAC_PI_2, PI),
            Self::PlusY => (FRAC_PI_2, FRAC_PI_2),
            Self::MinusY => (FRAC_PI_2, 3.0 * FRAC_PI_2),
            Self::PlusZ => (0.0, 0.0),
            Self::MinusZ => (PI, 0.0),
        }
    }

    pub fn direction(self) -> [f64; 3] {
        match self {
            Self::PlusX => [1.0, 0.0, 0.0],
            Self::MinusX => [-1.0, 0.0, 0.0],
            Self::PlusY => [0.0, 1.0, 0.0],
            Self::MinusY => [0.0, -1.0, 0.0],
            Self::PlusZ => [0.0, 0.0, 1.0],
            Self::MinusZ => [0.0, 0.0, -1.0],
        }
    }
}

impl fmt::Display for DiscreteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PlusX => "+X",
            Self::MinusX => "-X",
            Self::PlusY => "+Y",
            Self::MinusY => "-Y",
            Self::PlusZ => "+Z",
            Self::MinusZ => "-Z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SiteRotation {
    Angles { theta: f64, phi: f64 },
    Label(DiscreteLabel),
}

impl SiteRotation {
    pub fn angles(&self) -> (f64, f64) {
        match *self {
            Self::Angles { theta, phi } => (theta, phi),
            Self::Label(l) => l.angles(),
        }
    }

    /// Unit vector `n` with `U Z U^dagger = n . sigma`.
    pub fn direction(&self) -> [f64; 3] {
        match *self {
            Self::Label(l) => l.direction(),
            Self::Angles { theta, phi } => {
                let (st, ct) = Float::sin_cos(theta);
                let (sp, cp) = Float::sin_cos(phi);
                [st * cp, st * sp, ct]
            }
        }
    }

    /// `exp(-i phi Z / 2) exp(-i theta Y / 2)`.
    pub fn unitary(&self) -> DenseOperator {
        let (theta, phi) = self.angles();
        let (s, c) = Float::sin_cos(0.5 * theta);
        let e = C64::from_polar(1.0, -0.5 * phi);
        let ry = [c, -s, s, c];
        DenseOperator::from_fn(2, |r, col| {
            let phase = if r == 0 { e } else { e.conj() };
            phase * ry[2 * r + col]
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationSample {
    pub scheme: RotationScheme,
    pub sites: Vec<SiteRotation>,
}

impl RotationSample {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn identity(n_sites: usize) -> Self {
        Self {
            scheme: RotationScheme::Continuous,
            sites: alloc::vec![SiteRotation::Angles { theta: 0.0, phi: 0.0 }; n_sites],
        }
    }

    pub fn from_labels(labels: &[DiscreteLabel]) -> Self {
        Self {
            scheme: RotationScheme::Discrete6,
            sites: labels.iter().map(|&l| SiteRotation::Label(l)).collect(),
        }
    }

    /// Exact-enumeration sample number `index` in mixed radix 6, site 0 most
    /// significant.
    pub fn from_enumeration_index(n_sites: usize, mut index: u64) -> Self {
        let mut labels = alloc::vec![DiscreteLabel::PlusX; n_sites];
        for slot in labels.iter_mut().rev() {
            *slot = DiscreteLabel::from_digit((index % 6) as usize);
            index /= 6;
        }
        Self::from_labels(&labels)
    }

    pub fn unitary(&self) -> DenseOperator {
        let us: Vec<DenseOperator> = self.sites.iter().map(SiteRotation::unitary).collect();
        DenseOperator::kron_all(&us)
    }

    /// Rotated polarized product state, built site by site.
    pub fn rotated_state(&self, epsilon: f64) -> DenseOperator {
        let states: Vec<DenseOperator> = self
            .sites
            .iter()
            .map(|s| single_site_state(epsilon, s.direction()))
            .collect();
        DenseOperator::kron_all(&states)
    }
}

/// Draws one rotation per site: a uniform direction on the sphere
/// (`cos theta` uniform) or a uniform discrete label.
pub fn sample_rotation<R: Rng + ?Sized>(
    n: usize,
    scheme: RotationScheme,
    rng: &mut R,
) -> RotationSample {
    let sites = (0..n)
        .map(|_| match scheme {
            RotationScheme::Continuous => {
                let cos_theta: f64 = 1.0 - 2.0 * rng.random::<f64>();
                let phi = 2.0 * PI * rng.random::<f64>();
                // cos_theta is in (-1, 1], so theta stays in [0, pi)
                SiteRotation::Angles {
                    theta: Float::acos(cos_theta),
                    phi,
                }
            }
            RotationScheme::Discrete6 => {
                SiteRotation::Label(DiscreteLabel::from_digit(rng.random_range(0..6)))
            }
        })
        .collect();
    RotationSample { scheme, sites }
}

/// `U_rot rho U_rot^dagger`.
pub fn apply_rotation(rho: &DenseOperator, sample: &RotationSample) -> Result<DenseOperator> {
    let dim = 1usize << sample.n_sites();
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: dim,
        });
    }
    let u = sample.unitary();
    rho.sandwich(&u, &u.adjoint())
}

/// `G = |Tr[rho0 W(t)]|^2`.
pub fn notoc_g(rho0: &DenseOperator, wt: &DenseOperator) -> Result<f64> {
    Ok(trace_product(rho0, wt)?.norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Budget {
    /// All `6^N` discrete rotations.
    Exact,
    /// `M` independent draws.
    Samples(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodAConfig {
    pub epsilon: f64,
    pub scheme: RotationScheme,
    pub budget: Budget,
    pub seed: u64,
    /// Standard deviation of additive Gaussian noise on each measured
    /// expectation value; `None` measures exactly.
    pub shot_noise: Option<f64>,
    pub max_exact_sites: usize,
}

impl MethodAConfig {
    pub fn new(epsilon: f64, scheme: RotationScheme, budget: Budget, seed: u64) -> Self {
        Self {
            epsilon,
            scheme,
            budget,
            seed,
            shot_noise: None,
            max_exact_sites: DEFAULT_MAX_EXACT_SITES,
        }
    }

    pub fn exact(epsilon: f64) -> Self {
        Self::new(epsilon, RotationScheme::Discrete6, Budget::Exact, 0)
    }
}

/// `Gbar(eps, t)` with standard errors; `x = eps^2 / 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedNotoc {
    pub epsilon: f64,
    pub x: f64,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Zero under exact enumeration.
    pub stderr: Vec<f64>,
    pub n_samples: u64,
    pub scheme: RotationScheme,
    pub seed: u64,
}

pub fn averaged_notoc(
    h_spec: &HamiltonianSpec,
    w0: &PauliString,
    times: &[f64],
    cfg: &MethodAConfig,
) -> Result<AveragedNotoc> {
    h_spec.validate()?;
    if w0.n_sites() != h_spec.n_sites {
        return Err(Error::DimensionMismatch {
            left: w0.n_sites(),
            right: h_spec.n_sites,
        });
    }
    if crate::pauli::weight(w0) == 0 {
        return Err(Error::Invalid("observable must not be the identity".into()));
    }
    let cache = EvolutionCache::from_spec(h_spec)?;
    averaged_notoc_with_cache(&cache, &to_dense(w0, false)?, times, cfg)
}

const CHUNK: usize = 1024;

/// Same as [`averaged_notoc`] with a prepared eigendecomposition and any
/// observable that is not a multiple of the identity.
pub fn averaged_notoc_with_cache(
    cache: &EvolutionCache,
    w0: &DenseOperator,
    times: &[f64],
    cfg: &MethodAConfig,
) -> Result<AveragedNotoc> {
    let n_sites = crate::oracle::sites_of_dim(cache.dim())?;
    if w0.dim() != cache.dim() {
        return Err(Error::DimensionMismatch {
            left: w0.dim(),
            right: cache.dim(),
        });
    }
    let state = PolarizedStateSpec::new(n_sites, cfg.epsilon)?;
    let traceless_part =
        w0 - &DenseOperator::identity(w0.dim()).scale(w0.trace() / w0.dim() as f64);
    if traceless_part.max_abs() < 1e-12 * w0.max_abs().max(1.0) {
        return Err(Error::Invalid(
            "observable must not be a multiple of the identity".into(),
        ));
    }
    if let Some(s) = cfg.shot_noise {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::out_of_range("shot_noise", s, ">= 0"));
        }
    }
    let n_samples: u64 = match cfg.budget {
        Budget::Exact => {
            if cfg.scheme != RotationScheme::Discrete6 {
                return Err(Error::Invalid(
                    "exact enumeration needs the discrete6 scheme".into(),
                ));
            }
            if n_sites > cfg.max_exact_sites {
                return Err(Error::ResourceGate {
                    what: "exact rotation enumeration sites",
                    requested: n_sites,
                    limit: cfg.max_exact_sites,
                });
            }
            if n_sites > EXACT_WARN_SITES {
                log::warn!("enumerating all 6^{n_sites} rotations");
            }
            6u64.pow(n_sites as u32)
        }
        Budget::Samples(0) => return Err(Error::out_of_range("samples", 0.0, ">= 1")),
        Budget::Samples(m) => m as u64,
    };

    let w_eig = cache.to_eigenbasis(w0);
    let noise = match cfg.shot_noise {
        Some(s) if s > 0.0 => {
            Some(Normal::new(0.0, s).map_err(|e| Error::Invalid(alloc::format!("{e}")))?)
        }
        _ => None,
    };
    let sample_row = |index: u64| -> Vec<f64> {
        let sample = match cfg.budget {
            Budget::Exact => RotationSample::from_enumeration_index(n_sites, index),
            Budget::Samples(_) => sample_rotation(
                n_sites,
                cfg.scheme,
                &mut task_rng(cfg.seed, TaskKind::Rotation, index),
            ),
        };
        let rho_eig = cache.to_eigenbasis(&sample.rotated_state(state.epsilon));
        let expectations = cache.schrodinger_expectations(&rho_eig, &w_eig, times);
        match &noise {
            None => expectations.iter().map(|e| e.norm_sqr()).collect(),
            Some(dist) => {
                let mut rng = task_rng(cfg.seed, TaskKind::ShotNoise, index);
                expectations
                    .iter()
                    .map(|e| {
                        let v = e.re + dist.sample(&mut rng);
                        v * v
                    })
                    .collect()
            }
        }
    };

    let mut acc = alloc::vec![Running::default(); times.len()];
    let mut start = 0u64;
    while start < n_samples {
        let len = (n_samples - start).min(CHUNK as u64) as usize;
        let rows = exec::map_indexed(len, |i| sample_row(start + i as u64));
        for row in &rows {
            for (a, &g) in acc.iter_mut().zip(row) {
                a.push(g);
            }
        }
        start += len as u64;
    }
    let exact = matches!(cfg.budget, Budget::Exact);
    Ok(AveragedNotoc {
        epsilon: cfg.epsilon,
        x: state.x(),
        times: times.to_vec(),
        mean: acc.iter().map(Running::mean).collect(),
        stderr: acc
            .iter()
            .map(|a| if exact { 0.0 } else { a.stderr() })
            .collect(),
        n_samples,
        scheme: cfg.scheme,
        seed: cfg.seed,
    })
}
