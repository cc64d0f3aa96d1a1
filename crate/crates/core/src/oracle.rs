//! Exact operator size distributions and quantities derived from them.

use alloc::vec::Vec;

use num_traits::Float;

use crate::dynamics::EvolutionCache;
use crate::operator::DenseOperator;
use crate::pauli::{self, binomial, transform_weight, PauliString};
use crate::stats::trapezoid;
use crate::{exec, Error, Result, C64};

/// Largest chain for which the full coefficient map is materialized.
pub const MAX_EXPANSION_SITES: usize = 8;
/// Largest chain for which size distributions are computed.
pub const MAX_DISTRIBUTION_SITES: usize = 10;

/// `P_k` for `k = 1..=N` at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeDistribution {
    pub time: f64,
    /// `probs[k - 1] = P_k`.
    pub probs: Vec<f64>,
    /// Weight on the identity string; zero for traceless observables and kept
    /// out of `probs` so that `sum_k P_k = 1` holds exactly in that case.
    pub identity_weight: f64,
}

impl SizeDistribution {
    pub fn new(time: f64, probs: Vec<f64>) -> Self {
        Self {
            time,
            probs,
            identity_weight: 0.0,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.probs.len()
    }

    /// `P_k` for `1 <= k <= N`, zero otherwise.
    pub fn p(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.probs.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Expansion coefficients `f[P; W] = Tr[P^dagger W] / sqrt(2^N)` over the full
/// Pauli basis.
#[derive(Clone, Debug)]
pub struct PauliCoefficients {
    n_sites: usize,
    values: Vec<C64>,
}

impl PauliCoefficients {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn get(&self, p: &PauliString) -> C64 {
        assert_eq!(p.n_sites(), self.n_sites, "string size does not match");
        self.values[pauli::transform_index(p)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, C64)> + '_ {
        let n = self.n_sites;
        self.values.iter().enumerate().map(move |(idx, &v)| {
            let x = (idx >> n) as u64;
            let z = (idx & ((1 << n) - 1)) as u64;
            (PauliString::new(n, x, z).expect("index within range"), v)
        })
    }

    /// `sum |f|^2`, which equals `Tr[W^dagger W]`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `sum_P f[P] P`.
    pub fn resynthesize(&self) -> Result<DenseOperator> {
        let dim = 1usize << self.n_sites;
        let mut acc = DenseOperator::zeros(dim);
        for (p, f) in self.iter() {
            if f.norm() == 0.0 {
                continue;
            }
            let basis = pauli::to_dense(&p, true)?;
            acc = &acc + &basis.scale(f);
        }
        Ok(acc)
    }
}

pub(crate) fn sites_of_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Invalid(alloc::format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn gate(n_sites: usize, limit: usize, what: &'static str) -> Result<()> {
    if n_sites > limit {
        return Err(Error::ResourceGate {
            what,
            requested: n_sites,
            limit,
        });
    }
    Ok(())
}

pub fn expansion_coefficients(wt: &DenseOperator) -> Result<PauliCoefficients> {
    let n_sites = sites_of_dim(wt.dim())?;
    gate(n_sites, MAX_EXPANSION_SITES, "full Pauli expansion sites")?;
    Ok(PauliCoefficients {
        n_sites,
        values: pauli::pauli_transform(wt, n_sites)?,
    })
}

/// `P_k = (1 / w_norm) sum_{|P| = k} |f[P; W(t)]|^2`, with `w_norm = Tr[W^dagger W]`.
pub fn size_distribution(wt: &DenseOperator, w_norm: f64) -> Result<SizeDistribution> {
    size_distribution_at(wt, w_norm, 0.0)
}

pub fn size_distribution_at(
    wt: &DenseOperator,
    w_norm: f64,
    time: f64,
) -> Result<SizeDistribution> {
    if !(w_norm > 0.0) {
        return Err(Error::out_of_range("w_norm", w_norm, "> 0"));
    }
    let n_sites = sites_of_dim(wt.dim())?;
    gate(n_sites, MAX_DISTRIBUTION_SITES, "size distribution sites")?;
    let coeffs = pauli::pauli_transform(wt, n_sites)?;
    let mut by_size = alloc::vec![0.0; n_sites + 1];
    for (idx, f) in coeffs.iter().enumerate() {
        by_size[transform_weight(idx, n_sites)] += f.norm_sqr();
    }
    let identity_weight = by_size[0] / w_norm;
    let probs = by_size[1..].iter().map(|s| s / w_norm).collect();
    Ok(SizeDistribution {
        time,
        probs,
        identity_weight,
    })
}

/// Size distributions of `W(t) = U(t)^dagger W U(t)` on a time grid.
pub fn size_distribution_series(
    cache: &EvolutionCache,
    w0: &DenseOperator,
    times: &[f64],
) -> Result<Vec<SizeDistribution>> {
    let w_norm = w0.hs_norm_sqr();
    let w_eig = cache.to_eigenbasis(w0);
    exec::map_indexed(times.len(), |i| {
        let wt = cache.heisenberg_at(&w_eig, times[i]);
        size_distribution_at(&wt, w_norm, times[i])
    })
    .into_iter()
    .collect()
}

/// `F(x) = sum_k P_k x^k`.
pub fn pgf(dist: &SizeDistribution, x: f64) -> f64 {
    // Horner from the top degree down
    dist.probs.iter().rev().fold(0.0, |acc, &p| (acc + p) * x)
}

/// `F(x, t)` on a grid; `values[i][j]` is at `times[i]`, `x_values[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PgfCurve {
    pub times: Vec<f64>,
    pub x_values: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PgfCurve {
    pub fn from_distributions(dists: &[SizeDistribution], x_values: &[f64]) -> Self {
        Self {
            times: dists.iter().map(|d| d.time).collect(),
            x_values: x_values.to_vec(),
            values: dists
                .iter()
                .map(|d| x_values.iter().map(|&x| pgf(d, x)).collect())
                .collect(),
        }
    }

    fn x_index(&self, x: f64) -> Result<usize> {
        self.x_values
            .iter()
            .position(|&v| (v - x).abs() <= 1e-12)
            .ok_or_else(|| Error::Invalid(alloc::format!("x = {x} is not on the curve's grid")))
    }

    /// Times inside `[t_i, t_f]` and `F(x, t)` at them.
    fn window(&self, x: f64, t_i: f64, t_f: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let j = self.x_index(x)?;
        if !(t_i < t_f) {
            return Err(Error::Invalid(alloc::format!(
                "empty window [{t_i}, {t_f}]"
            )));
        }
        let eps = 1e-9 * (t_f - t_i);
        let (ts, fs): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(&t, _)| t >= t_i - eps && t <= t_f + eps)
            .map(|(&t, row)| (t, row[j]))
            .unzip();
        if ts.len() < 2 {
            return Err(Error::Invalid(alloc::format!(
                "window [{t_i}, {t_f}] holds fewer than two grid times"
            )));
        }
        Ok((ts, fs))
    }
}

/// Trapezoidal time average of `F(x, t)` over the grid points in `[t_i, t_f]`.
pub fn pgf_time_average(curve: &PgfCurve, x: f64, t_i: f64, t_f: f64) -> Result<f64> {
    let (ts, fs) = curve.window(x, t_i, t_f)?;
    Ok(trapezoid(&ts, &fs) / (ts[ts.len() - 1] - ts[0]))
}

/// Trapezoidal time average of `(F(x, t) - Fbar)^2` over the same window.
pub fn pgf_fluctuations(curve: &PgfCurve, x: f64, t_i: f64, t_f: f64) -> Result<f64> {
    let (ts, fs) = curve.window(x, t_i, t_f)?;
    let span = ts[ts.len() - 1] - ts[0];
    let mean = trapezoid(&ts, &fs) / span;
    let sq: Vec<f64> = fs.iter().map(|f| (f - mean) * (f - mean)).collect();
    Ok(trapezoid(&ts, &sq) / span)
}

/// Size distribution of a Haar-random evolved operator, `C(n,k) 3^k / (4^n - 1)`.
pub fn haar_pk(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::out_of_range("k", k as f64, "1..=n"));
    }
    if n > 26 {
        return Err(Error::out_of_range("n", n as f64, "1..=26"));
    }
    let num = binomial(n, k) as f64 * Float::powi(3.0, k as i32);
    Ok(num / (Float::powi(4.0, n as i32) - 1.0))
}

pub fn haar_distribution(n: usize) -> Result<SizeDistribution> {
    let probs = (1..=n).map(|k| haar_pk(n, k)).collect::<Result<Vec<_>>>()?;
    Ok(SizeDistribution::new(0.0, probs))
}

/// `sum_k k^order P_k`.
pub fn moments(dist: &SizeDistribution, order: u32) -> Result<f64> {
    if order == 0 {
        return Err(Error::out_of_range("order", 0.0, ">= 1"));
    }
    Ok(dist
        .probs
        .iter()
        .enumerate()
        .map(|(i, p)| Float::powi((i + 1) as f64, order as i32) * p)
        .sum())
}
