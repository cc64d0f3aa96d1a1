//! Direct estimator of individual size probabilities from classically
//! correlated weight-`k` states.
//!
//! For a subset `M` of `k` sites the state `2^-N (I + prod_{i in M} Z_i)` is
//! rotated on `M` only. Its evolved expectation value depends on the
//! observable only through the reduced operator `w_M(t) = Tr_{not M} W(t)`:
//! `Tr[rho W(t)] = 2^-N Tr[(n_1.sigma (x) ... (x) n_k.sigma) w_M(t)]` for a
//! traceless `W`. Averaging the square over rotations gives
//! `3^-k sum_{supp P = M} |f_P|^2 / d`, so `P_k = 3^k sum_M Gbar_M`.
//!
//! Sampled budgets report a two-stage standard error. With `C` subsets of
//! which `m` are used (`f = m / C`), subset totals `y_M = 3^k Gbar_M`, their
//! sample variance `s_b^2`, and per-subset rotation variances `v_M`:
//! `Var = C^2 (1 - f) s_b^2 / m + (C / m) sum_M v_M`.

use alloc::vec::Vec;

use num_traits::Float;
use rand::SeedableRng;

use crate::dynamics::{
    reflection_operator, translation_operator, Boundary, EvolutionCache, HamiltonianSpec,
};
use crate::operator::{trace_product, DenseOperator};
use crate::oracle::sites_of_dim;
use crate::pauli::{combinations, to_dense, weight, PauliString};
use crate::protocol_a::{
    sample_rotation, Budget, RotationSample, RotationScheme, DEFAULT_MAX_EXACT_SITES,
};
use crate::seed::{derive, task_seed, TaskKind, TaskRng};
use crate::stats::{sample_variance, Running};
use crate::{exec, Error, Result, C64};

/// Above this many (subset, rotation) pairs a warning is logged.
pub const DEFAULT_WARN_PAIRS: u64 = 1_000_000;

/// A set of `k` distinct sites, stored sorted and 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubsetSpec {
    pub n_sites: usize,
    pub members: Vec<usize>,
}

impl SubsetSpec {
    pub fn new(n_sites: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.is_empty() || members.len() > n_sites {
            return Err(Error::out_of_range(
                "k",
                members.len() as f64,
                "1..=n_sites",
            ));
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid(alloc::format!(
                "repeated site in {members:?}"
            )));
        }
        if members[members.len() - 1] >= n_sites {
            return Err(Error::out_of_range(
                "site",
                members[members.len() - 1] as f64,
                "0..n_sites",
            ));
        }
        Ok(Self { n_sites, members })
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    /// Mirror image under `i -> n - 1 - i`.
    pub fn reflected(&self) -> Self {
        let mut members: Vec<usize> = self.members.iter().map(|&i| self.n_sites - 1 - i).collect();
        members.sort_unstable();
        Self {
            n_sites: self.n_sites,
            members,
        }
    }

    /// The Pauli string `prod_{i in M} Z_i`.
    pub fn z_string(&self) -> PauliString {
        let z = self.members.iter().fold(0u64, |acc, &i| {
            acc | crate::dynamics::site_bit(self.n_sites, i) as u64
        });
        PauliString::new(self.n_sites, 0, z).expect("members checked")
    }
}

/// `2^-N (I + prod_{i in M} Z_i)`.
pub fn prepare_rho_zk(subset: &SubsetSpec) -> Result<DenseOperator> {
    let dim = 1usize << subset.n_sites;
    let zk = to_dense(&subset.z_string(), false)?;
    Ok((&DenseOperator::identity(dim) + &zk).scale_real(1.0 / dim as f64))
}

/// One representative per reflection orbit with its multiplicity (1 or 2),
/// in lexicographic order of representatives.
pub fn reflection_reduced_subsets(n: usize, k: usize) -> Result<Vec<(SubsetSpec, usize)>> {
    if k == 0 || k > n {
        return Err(Error::out_of_range("k", k as f64, "1..=n"));
    }
    let mut out = Vec::new();
    for members in combinations(n, k) {
        let s = SubsetSpec::new(n, members)?;
        let r = s.reflected();
        if r == s {
            out.push((s, 1));
        } else if s.members < r.members {
            out.push((s, 2));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SubsetBudget {
    All,
    /// Uniform sample of `m` subsets without replacement.
    Sampled(usize),
    /// One subset per reflection orbit.
    ReflectionReduced,
}

impl SubsetBudget {
    pub fn name(&self) -> &'static str {
        match self {
            Self::All => "all",
            Self::Sampled(_) => "sampled",
            Self::ReflectionReduced => "reflection",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodBConfig {
    pub scheme: RotationScheme,
    pub rotations: Budget,
    pub subsets: SubsetBudget,
    pub seed: u64,
    /// Largest `k` for which all `6^k` rotations may be enumerated.
    pub max_exact_sites: usize,
    pub warn_pairs: u64,
}

impl MethodBConfig {
    pub fn new(
        scheme: RotationScheme,
        rotations: Budget,
        subsets: SubsetBudget,
        seed: u64,
    ) -> Self {
        Self {
            scheme,
            rotations,
            subsets,
            seed,
            max_exact_sites: DEFAULT_MAX_EXACT_SITES,
            warn_pairs: DEFAULT_WARN_PAIRS,
        }
    }

    pub fn exact() -> Self {
        Self::new(
            RotationScheme::Discrete6,
            Budget::Exact,
            SubsetBudget::All,
            0,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PkSeries {
    pub k: usize,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Subsets actually prepared (orbit representatives when reduced).
    pub n_subsets: usize,
    /// Rotations per subset.
    pub n_rotations: u64,
    pub subsets: SubsetBudget,
    pub seed: u64,
}

pub fn pk_estimate(
    h_spec: &HamiltonianSpec,
    w0: &PauliString,
    k: usize,
    times: &[f64],
    cfg: &MethodBConfig,
) -> Result<PkSeries> {
    h_spec.validate()?;
    if w0.n_sites() != h_spec.n_sites {
        return Err(Error::DimensionMismatch {
            left: w0.n_sites(),
            right: h_spec.n_sites,
        });
    }
    if weight(w0) == 0 {
        return Err(Error::Invalid("observable must not be the identity".into()));
    }
    let cache = EvolutionCache::from_spec(h_spec)?;
    pk_estimate_with_cache(&cache, &to_dense(w0, false)?, k, times, cfg)
}

/// Bit positions of each member inside the full index, most significant
/// member first, and the mask of the remaining sites.
struct SubsetIndex {
    bits: Vec<usize>,
    rest_mask: usize,
}

impl SubsetIndex {
    fn new(subset: &SubsetSpec) -> Self {
        let bits: Vec<usize> = subset
            .members
            .iter()
            .map(|&i| crate::dynamics::site_bit(subset.n_sites, i))
            .collect();
        let member_mask = bits.iter().fold(0, |a, b| a | b);
        Self {
            bits,
            rest_mask: ((1usize << subset.n_sites) - 1) & !member_mask,
        }
    }

    fn local(&self, full: usize) -> usize {
        let k = self.bits.len();
        self.bits.iter().enumerate().fold(0, |acc, (j, &b)| {
            if full & b != 0 {
                acc | (1 << (k - 1 - j))
            } else {
                acc
            }
        })
    }
}

/// `Tr_{not M} W` as a row-major `2^k x 2^k` array.
fn reduced_observable(wt: &DenseOperator, index: &SubsetIndex, local_of: &[usize]) -> Vec<C64> {
    let k = index.bits.len();
    let dk = 1usize << k;
    let mut out = alloc::vec![C64::new(0.0, 0.0); dk * dk];
    let dim = wt.dim();
    for r in 0..dim {
        for c in 0..dim {
            if r & index.rest_mask == c & index.rest_mask {
                out[local_of[r] * dk + local_of[c]] += wt.get(r, c);
            }
        }
    }
    out
}

/// `n_1.sigma (x) ... (x) n_k.sigma` as a row-major array.
fn direction_product(sample: &RotationSample) -> Vec<C64> {
    let mut out = alloc::vec![C64::new(1.0, 0.0)];
    let mut size = 1;
    for site in &sample.sites {
        let n = site.direction();
        let m = [
            C64::new(n[2], 0.0),
            C64::new(n[0], -n[1]),
            C64::new(n[0], n[1]),
            C64::new(-n[2], 0.0),
        ];
        let new_size = 2 * size;
        let mut next = alloc::vec![C64::new(0.0, 0.0); new_size * new_size];
        for r in 0..size {
            for c in 0..size {
                let v = out[r * size + c];
                for (ab, &mv) in m.iter().enumerate() {
                    let (a, b) = (ab / 2, ab % 2);
                    next[(2 * r + a) * new_size + 2 * c + b] = v * mv;
                }
            }
        }
        out = next;
        size = new_size;
    }
    out
}

/// `Tr[A B]` for row-major square arrays.
fn trace_of_product(a: &[C64], b: &[C64], dk: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..dk {
        for c in 0..dk {
            acc += a[r * dk + c] * b[c * dk + r];
        }
    }
    acc
}

/// Rotation average of `sum_obs |Tr[rho W_obs]|^2` on one subset;
/// `reduced[time][obs]` are the reduced observables.
fn subset_average(
    reduced: &[Vec<Vec<C64>>],
    k: usize,
    n_sites: usize,
    cfg: &MethodBConfig,
    subset_index: u64,
    n_rot: u64,
) -> Vec<Running> {
    let dk = 1usize << k;
    let scale = 1.0 / Float::powi(4.0, n_sites as i32);
    let stream = task_seed(cfg.seed, TaskKind::SubsetRotation, subset_index);
    let mut acc = alloc::vec![Running::default(); reduced.len()];
    for r in 0..n_rot {
        let sample = match cfg.rotations {
            Budget::Exact => RotationSample::from_enumeration_index(k, r),
            Budget::Samples(_) => {
                let mut rng = TaskRng::seed_from_u64(derive(stream, r));
                sample_rotation(k, cfg.scheme, &mut rng)
            }
        };
        let prod = direction_product(&sample);
        for (a, obs) in acc.iter_mut().zip(reduced) {
            let g: f64 = obs
                .iter()
                .map(|w| trace_of_product(&prod, w, dk).norm_sqr())
                .sum();
            a.push(g * scale);
        }
    }
    acc
}

/// [`pk_estimate`] with a prepared eigendecomposition and any traceless
/// observable. The result is normalized by `d / Tr[W^dagger W]`.
pub fn pk_estimate_with_cache(
    cache: &EvolutionCache,
    w0: &DenseOperator,
    k: usize,
    times: &[f64],
    cfg: &MethodBConfig,
) -> Result<PkSeries> {
    let n_sites = sites_of_dim(cache.dim())?;
    if w0.dim() != cache.dim() {
        return Err(Error::DimensionMismatch {
            left: w0.dim(),
            right: cache.dim(),
        });
    }
    if k == 0 || k > n_sites {
        return Err(Error::out_of_range("k", k as f64, "1..=n_sites"));
    }
    let w_norm = w0.hs_norm_sqr();
    if w_norm == 0.0 || w0.trace().norm() > 1e-10 * Float::sqrt(w_norm) {
        return Err(Error::Invalid(
            "observable must be traceless and nonzero".into(),
        ));
    }
    let n_rot: u64 = match cfg.rotations {
        Budget::Exact => {
            if cfg.scheme != RotationScheme::Discrete6 {
                return Err(Error::Invalid(
                    "exact enumeration needs the discrete6 scheme".into(),
                ));
            }
            if k > cfg.max_exact_sites {
                return Err(Error::ResourceGate {
                    what: "exact rotation enumeration sites",
                    requested: k,
                    limit: cfg.max_exact_sites,
                });
            }
            6u64.pow(k as u32)
        }
        Budget::Samples(0) => return Err(Error::out_of_range("rotations", 0.0, ">= 1")),
        Budget::Samples(m) => m as u64,
    };

    let all = combinations(n_sites, k);
    let total = all.len();
    // (global subset index, observables measured on it)
    let (chosen, reflect): (Vec<usize>, bool) = match cfg.subsets {
        SubsetBudget::All => ((0..total).collect(), false),
        SubsetBudget::Sampled(m) => {
            if m == 0 || m > total {
                return Err(Error::Invalid(alloc::format!(
                    "cannot sample {m} of {total} subsets"
                )));
            }
            let mut rng =
                TaskRng::seed_from_u64(task_seed(cfg.seed, TaskKind::SubsetChoice, k as u64));
            let mut picked = rand::seq::index::sample(&mut rng, total, m).into_vec();
            picked.sort_unstable();
            (picked, false)
        }
        SubsetBudget::ReflectionReduced => {
            let refl = reflection_operator(n_sites)?;
            let h = cache.reconstruct();
            let defect = h.sandwich(&refl, &refl)?.max_abs_diff(&h);
            if defect > 1e-10 * h.max_abs().max(1.0) {
                return Err(Error::Invalid(
                    "Hamiltonian is not reflection symmetric".into(),
                ));
            }
            let reps: Vec<usize> = (0..total)
                .filter(|&i| {
                    let s = SubsetSpec::new(n_sites, all[i].clone()).expect("combination");
                    s.members <= s.reflected().members
                })
                .collect();
            (reps, true)
        }
    };
    let pairs = chosen.len() as u64 * n_rot;
    if pairs > cfg.warn_pairs {
        log::warn!(
            "{pairs} subset-rotation pairs for k = {k}; this estimator is meant for k of order one"
        );
    }

    let mut observables = alloc::vec![cache.to_eigenbasis(w0)];
    if reflect {
        let refl = reflection_operator(n_sites)?;
        observables.push(cache.to_eigenbasis(&w0.sandwich(&refl, &refl)?));
    }
    let subsets: Vec<SubsetSpec> = chosen
        .iter()
        .map(|&i| SubsetSpec::new(n_sites, all[i].clone()))
        .collect::<Result<_>>()?;
    // which observables each chosen subset measures
    let obs_for: Vec<Vec<usize>> = subsets
        .iter()
        .map(|s| {
            if reflect && s.reflected() != *s {
                alloc::vec![0, 1]
            } else {
                alloc::vec![0]
            }
        })
        .collect();
    let indices: Vec<(SubsetIndex, Vec<usize>)> = subsets
        .iter()
        .map(|s| {
            let idx = SubsetIndex::new(s);
            let local: Vec<usize> = (0..cache.dim()).map(|f| idx.local(f)).collect();
            (idx, local)
        })
        .collect();

    // reduced[subset][time][obs]
    let mut reduced: Vec<Vec<Vec<Vec<C64>>>> =
        alloc::vec![Vec::with_capacity(times.len()); subsets.len()];
    for &t in times {
        let evolved: Vec<DenseOperator> = observables
            .iter()
            .map(|o| cache.heisenberg_at(o, t))
            .collect();
        let per_subset = exec::map_indexed(subsets.len(), |s| {
            let (idx, local) = &indices[s];
            obs_for[s]
                .iter()
                .map(|&o| reduced_observable(&evolved[o], idx, local))
                .collect::<Vec<_>>()
        });
        for (dst, v) in reduced.iter_mut().zip(per_subset) {
            dst.push(v);
        }
    }

    let stats = exec::map_indexed(subsets.len(), |s| {
        subset_average(&reduced[s], k, n_sites, cfg, chosen[s] as u64, n_rot)
    });

    let factor = Float::powi(3.0, k as i32) * cache.dim() as f64 / w_norm;
    let sampled_rotations = matches!(cfg.rotations, Budget::Samples(_));
    let m = subsets.len() as f64;
    let c = total as f64;
    let mut mean = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    for ti in 0..times.len() {
        let y: Vec<f64> = stats.iter().map(|s| factor * s[ti].mean()).collect();
        let within: f64 = if sampled_rotations {
            stats
                .iter()
                .map(|s| factor * factor * s[ti].variance() / n_rot as f64)
                .sum()
        } else {
            0.0
        };
        let (est, var) = match cfg.subsets {
            SubsetBudget::Sampled(_) => {
                let between = c * c * (1.0 - m / c) * sample_variance(&y) / m;
                ((c / m) * y.iter().sum::<f64>(), between + (c / m) * within)
            }
            _ => (y.iter().sum(), within),
        };
        mean.push(est);
        stderr.push(Float::sqrt(var.max(0.0)));
    }
    Ok(PkSeries {
        k,
        times: times.to_vec(),
        mean,
        stderr,
        n_subsets: subsets.len(),
        n_rotations: n_rot,
        subsets: cfg.subsets,
        seed: cfg.seed,
    })
}

/// `P_k` estimates for every `k = 1..=N`.
pub fn pk_estimate_all(
    cache: &EvolutionCache,
    w0: &DenseOperator,
    times: &[f64],
    cfg: &MethodBConfig,
) -> Result<Vec<PkSeries>> {
    let n = sites_of_dim(cache.dim())?;
    (1..=n)
        .map(|k| pk_estimate_with_cache(cache, w0, k, times, cfg))
        .collect()
}

/// `(<W_{1+l}(t)>` in `rho1`, `<W_1(t)>` in `T_l rho1 T_l^dagger)` on a
/// periodic chain, where `w0` acts on site 0.
pub fn translation_equivalence_check(
    h_spec: &HamiltonianSpec,
    w0: &PauliString,
    rho1: &DenseOperator,
    l: usize,
    t: f64,
) -> Result<(f64, f64)> {
    if h_spec.boundary != Boundary::Periodic {
        return Err(Error::Invalid(
            "translation equivalence needs a periodic chain".into(),
        ));
    }
    translation_equivalence_unchecked(h_spec, w0, rho1, l, t)
}

/// The same comparison without the boundary check, for negative controls.
pub fn translation_equivalence_unchecked(
    h_spec: &HamiltonianSpec,
    w0: &PauliString,
    rho1: &DenseOperator,
    l: usize,
    t: f64,
) -> Result<(f64, f64)> {
    let n = h_spec.n_sites;
    if w0.n_sites() != n {
        return Err(Error::DimensionMismatch {
            left: w0.n_sites(),
            right: n,
        });
    }
    let cache = EvolutionCache::from_spec(h_spec)?;
    let u = cache.evolve_unitary(t);
    let shifted_w = to_dense(&w0.shifted(l), false)?;
    let w = to_dense(w0, false)?;
    let tr = translation_operator(n, l)?;
    let lhs = trace_product(rho1, &shifted_w.sandwich(&u.adjoint(), &u)?)?;
    let moved = rho1.sandwich(&tr, &tr.adjoint())?;
    let rhs = trace_product(&moved, &w.sandwich(&u.adjoint(), &u)?)?;
    Ok((lhs.re, rhs.re))
}
