//! Recovering `P_k` from PGF samples: forward finite differences at `x = 0`
//! and a direct Vandermonde solve, plus the noise models used to stress them.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use num_traits::{Float, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::oracle::{pgf, SizeDistribution};
use crate::seed::{derive, task_seed, TaskKind, TaskRng};
use crate::stats::trapezoid;
use crate::{exec, Error, Result};

type Q = Ratio<i128>;

/// Largest stencil length `n + a` solved exactly.
pub const MAX_STENCIL_LEN: usize = 14;
/// Largest PGF argument reachable with `|eps| <= 1`.
pub const X_MAX: f64 = 1.0 / 3.0;

/// Forward stencil `f^(n)(0) ~ dx^-n sum_m c_m f(m dx)`, `m = 0..n+a`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDiffTable {
    pub n: usize,
    pub a: usize,
    pub coefficients: Vec<f64>,
    exact: Vec<Q>,
}

impl FiniteDiffTable {
    /// Coefficients as reduced fractions `(numerator, denominator)`.
    pub fn exact(&self) -> Vec<(i128, i128)> {
        self.exact
            .iter()
            .map(|q| (*q.numer(), *q.denom()))
            .collect()
    }

    /// Largest violation of the moment conditions
    /// `sum_m c_m m^p = n! delta_{pn}`, `p < n + a`.
    pub fn moment_defect(&self) -> f64 {
        let len = self.coefficients.len();
        let fact = factorial(self.n);
        (0..len)
            .map(|p| {
                let s: f64 = self
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * Float::powi(m as f64, p as i32))
                    .sum();
                let target = if p == self.n { fact } else { 0.0 };
                (s - target).abs() / Float::powi(len as f64, p as i32).max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// `dx^-n sum_m c_m samples[m]`.
    pub fn apply(&self, samples: &[f64], dx: f64) -> f64 {
        let s: f64 = self
            .coefficients
            .iter()
            .zip(samples)
            .map(|(c, f)| c * f)
            .sum();
        s / Float::powi(dx, self.n as i32)
    }

    /// Replaces one coefficient, for fault-injection checks.
    pub fn with_corrupted(&self, index: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.coefficients[index] = value;
        out
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn q_pow(m: i128, p: usize) -> Q {
    let mut v: i128 = 1;
    for _ in 0..p {
        v *= m;
    }
    Q::from_integer(v)
}

/// Gaussian elimination over the rationals.
fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::Singular)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let delta = f * a[col][c];
                a[r][c] -= delta;
            }
            let delta = f * b[col];
            b[r] -= delta;
        }
    }
    Ok((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Solves the moment system for the forward stencil of derivative order `n`
/// and accuracy `a`.
pub fn fd_coefficients(n: usize, a: usize) -> Result<FiniteDiffTable> {
    if n == 0 {
        return Err(Error::out_of_range("derivative order", 0.0, ">= 1"));
    }
    if a == 0 {
        return Err(Error::out_of_range("accuracy", 0.0, ">= 1"));
    }
    let len = n + a;
    if len > MAX_STENCIL_LEN {
        return Err(Error::ResourceGate {
            what: "finite-difference stencil length",
            requested: len,
            limit: MAX_STENCIL_LEN,
        });
    }
    let matrix: Vec<Vec<Q>> = (0..len)
        .map(|p| (0..len).map(|m| q_pow(m as i128, p)).collect())
        .collect();
    let fact: i128 = (1..=n as i128).product();
    let rhs: Vec<Q> = (0..len)
        .map(|p| {
            if p == n {
                Q::from_integer(fact)
            } else {
                Q::zero()
            }
        })
        .collect();
    let exact = solve_exact(matrix, rhs)?;
    let coefficients = exact
        .iter()
        .map(|q| q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN))
        .collect();
    Ok(FiniteDiffTable {
        n,
        a,
        coefficients,
        exact,
    })
}

fn check_step(len: usize, dx: f64) -> Result<()> {
    if !(dx > 0.0) {
        return Err(Error::out_of_range("delta_x", dx, "> 0"));
    }
    if (len - 1) as f64 * dx > X_MAX * (1.0 + 1e-12) {
        return Err(Error::Invalid(alloc::format!(
            "stencil reaches x = {} beyond 1/3",
            (len - 1) as f64 * dx
        )));
    }
    Ok(())
}

/// `P_k ~ F^(k)(0) / k!` from samples `F(m dx)`, `m = 0, 1, ...`.
pub fn extract_pk(f_samples: &[f64], dx: f64, k: usize, a: usize) -> Result<f64> {
    let table = fd_coefficients(k, a)?;
    extract_pk_with(&table, f_samples, dx)
}

pub fn extract_pk_with(table: &FiniteDiffTable, f_samples: &[f64], dx: f64) -> Result<f64> {
    let len = table.coefficients.len();
    if f_samples.len() < len {
        return Err(Error::Invalid(alloc::format!(
            "{} samples given, stencil needs {len}",
            f_samples.len()
        )));
    }
    check_step(len, dx)?;
    Ok(table.apply(&f_samples[..len], dx) / factorial(table.n))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum NoiseKind {
    #[default]
    Multiplicative,
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseModel {
    pub eta: f64,
    pub kind: NoiseKind,
}

impl NoiseModel {
    pub fn new(eta: f64, kind: NoiseKind) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::out_of_range("eta", eta, ">= 0"));
        }
        Ok(Self { eta, kind })
    }

    pub fn multiplicative(eta: f64) -> Result<Self> {
        Self::new(eta, NoiseKind::Multiplicative)
    }
}

/// `(1 + delta) F` or `F + delta` with `delta ~ Normal(0, eta^2)`.
pub fn inject_noise<R: Rng + ?Sized>(f: f64, model: &NoiseModel, rng: &mut R) -> f64 {
    if model.eta == 0.0 {
        return f;
    }
    let delta = Normal::new(0.0, model.eta)
        .expect("eta validated")
        .sample(rng);
    match model.kind {
        NoiseKind::Multiplicative => (1.0 + delta) * f,
        NoiseKind::Additive => f + delta,
    }
}

/// `(1/T) int |P_noisy - P_exact| dt` over the grid, `T` its span.
pub fn time_averaged_error(p_noisy: &[f64], p_exact: &[f64], times: &[f64]) -> Result<f64> {
    if p_noisy.len() != p_exact.len() || p_noisy.len() != times.len() {
        return Err(Error::Invalid(
            "series and time grid differ in length".into(),
        ));
    }
    if times.len() < 2 || !(times[times.len() - 1] > times[0]) {
        return Err(Error::Invalid(
            "time grid must span a positive interval".into(),
        ));
    }
    let diff: Vec<f64> = p_noisy
        .iter()
        .zip(p_exact)
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(trapezoid(times, &diff) / (times[times.len() - 1] - times[0]))
}

/// Solution of `sum_k P_k x_j^k = F_j` and the 2-norm condition number of
/// the system matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct VandermondeSolution {
    pub probs: Vec<f64>,
    pub condition_number: f64,
}

pub fn invert_vandermonde(f_values: &[f64], x_values: &[f64]) -> Result<VandermondeSolution> {
    let n = x_values.len();
    if n == 0 || f_values.len() != n {
        return Err(Error::Invalid("need one F value per node".into()));
    }
    for (i, &x) in x_values.iter().enumerate() {
        if !(x > 0.0 && x <= X_MAX * (1.0 + 1e-12)) {
            return Err(Error::out_of_range("node", x, "(0, 1/3]"));
        }
        if x_values[..i].contains(&x) {
            return Err(Error::Invalid(alloc::format!("duplicate node {x}")));
        }
    }
    let a = DMatrix::from_fn(n, n, |j, k| Float::powi(x_values[j], k as i32 + 1));
    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| {
        (hi.max(s), lo.min(s))
    });
    if smin == 0.0 {
        return Err(Error::Singular);
    }
    let lu = a.lu();
    let p = lu
        .solve(&DVector::from_column_slice(f_values))
        .ok_or(Error::Singular)?;
    Ok(VandermondeSolution {
        probs: p.iter().copied().collect(),
        condition_number: smax / smin,
    })
}

/// Logarithmic grid of `count` steps from `lo` to `hi`, inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || count == 0 {
        return Err(Error::Invalid(alloc::format!(
            "bad log grid [{lo}, {hi}] x {count}"
        )));
    }
    if count == 1 {
        return Ok(alloc::vec![lo]);
    }
    let (a, b) = (Float::ln(lo), Float::ln(hi));
    Ok((0..count)
        .map(|i| Float::exp(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect())
}

/// Largest feasible step for a stencil of order `(k, a)`.
pub fn max_step(k: usize, a: usize) -> f64 {
    X_MAX / (k + a - 1) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseStudyConfig {
    pub k_values: Vec<usize>,
    pub dx_values: Vec<f64>,
    pub a: usize,
    pub noise: NoiseModel,
    pub realizations: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseStudyRow {
    pub k: usize,
    pub delta_x: f64,
    pub a: usize,
    pub eta: f64,
    pub mean_abs_error: f64,
    /// Standard error over realizations.
    pub stderr: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

/// Time-averaged extraction error for every feasible `(k, dx)` pair,
/// averaged over noise realizations. The exact `P_k(t)` come from `dists`,
/// whose times form the averaging window.
///
/// One realization draws independent noise for every node and time; all `k`
/// at a given step share those noisy samples, as they would in a measurement.
pub fn noise_study(
    dists: &[SizeDistribution],
    cfg: &NoiseStudyConfig,
) -> Result<Vec<NoiseStudyRow>> {
    if cfg.realizations == 0 {
        return Err(Error::out_of_range("realizations", 0.0, ">= 1"));
    }
    let times: Vec<f64> = dists.iter().map(|d| d.time).collect();
    let tables = cfg
        .k_values
        .iter()
        .map(|&k| fd_coefficients(k, cfg.a))
        .collect::<Result<Vec<_>>>()?;
    let max_len = tables
        .iter()
        .map(|t| t.coefficients.len())
        .max()
        .unwrap_or(0);

    let mut rows = Vec::new();
    for (dx_index, &dx) in cfg.dx_values.iter().enumerate() {
        let feasible: Vec<usize> = (0..tables.len())
            .filter(|&i| check_step(tables[i].coefficients.len(), dx).is_ok())
            .collect();
        if feasible.is_empty() {
            continue;
        }
        let clean: Vec<Vec<f64>> = dists
            .iter()
            .map(|d| (0..max_len).map(|m| pgf(d, m as f64 * dx)).collect())
            .collect();
        // errors[r][i] for realization r and feasible stencil i
        let errors = exec::map_indexed(cfg.realizations, |r| {
            let seed = derive(
                task_seed(cfg.seed, TaskKind::Noise, r as u64),
                dx_index as u64,
            );
            let mut rng = <TaskRng as rand::SeedableRng>::seed_from_u64(seed);
            let noisy: Vec<Vec<f64>> = clean
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&f| inject_noise(f, &cfg.noise, &mut rng))
                        .collect()
                })
                .collect();
            feasible
                .iter()
                .map(|&i| {
                    let table = &tables[i];
                    let est: Vec<f64> = noisy
                        .iter()
                        .map(|row| {
                            table.apply(&row[..table.coefficients.len()], dx) / factorial(table.n)
                        })
                        .collect();
                    let exact: Vec<f64> = dists.iter().map(|d| d.p(table.n)).collect();
                    time_averaged_error(&est, &exact, &times)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        for (col, &i) in feasible.iter().enumerate() {
            let samples: Vec<f64> = errors.iter().map(|e| e[col]).collect();
            let ms = crate::stats::mean_stderr(&samples);
            rows.push(NoiseStudyRow {
                k: tables[i].n,
                delta_x: dx,
                a: cfg.a,
                eta: cfg.noise.eta,
                mean_abs_error: ms.mean,
                stderr: ms.stderr,
                n_realizations: cfg.realizations,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{EvolutionCache, HamiltonianSpec};
    use crate::oracle::size_distribution_series;
    use crate::pauli::{to_dense, Pauli, PauliString};
    use crate::seed::task_rng;

    fn frac(n: i128, d: i128) -> (i128, i128) {
        let q = Q::new(n, d);
        (*q.numer(), *q.denom())
    }

    fn row(entries: &[(i128, i128)]) -> Vec<(i128, i128)> {
        entries.iter().map(|&(n, d)| frac(n, d)).collect()
    }

    #[test]
    fn published_tables() {
        let a1: [&[i128]; 6] = [
            &[-1, 1],
            &[1, -2, 1],
            &[-1, 3, -3, 1],
            &[1, -4, 6, -4, 1],
            &[-1, 5, -10, 10, -5, 1],
            &[1, -6, 15, -20, 15, -6, 1],
        ];
        for (i, r) in a1.iter().enumerate() {
            let expect: Vec<_> = r.iter().map(|&v| (v, 1)).collect();
            assert_eq!(
                fd_coefficients(i + 1, 1).unwrap().exact(),
                expect,
                "n={}",
                i + 1
            );
        }
        let a2: [&[(i128, i128)]; 6] = [
            &[(-3, 2), (2, 1), (-1, 2)],
            &[(2, 1), (-5, 1), (4, 1), (-1, 1)],
            &[(-5, 2), (9, 1), (-12, 1), (7, 1), (-3, 2)],
            &[(3, 1), (-14, 1), (26, 1), (-24, 1), (11, 1), (-2, 1)],
            &[
                (-7, 2),
                (20, 1),
                (-95, 2),
                (60, 1),
                (-85, 2),
                (16, 1),
                (-5, 2),
            ],
            &[
                (4, 1),
                (-27, 1),
                (78, 1),
                (-125, 1),
                (120, 1),
                (-69, 1),
                (22, 1),
                (-3, 1),
            ],
        ];
        for (i, r) in a2.iter().enumerate() {
            assert_eq!(
                fd_coefficients(i + 1, 2).unwrap().exact(),
                row(r),
                "n={}",
                i + 1
            );
        }
    }

    #[test]
    fn moment_conditions_hold() {
        for n in 1..=8 {
            for a in 1..=4 {
                let t = fd_coefficients(n, a).unwrap();
                assert!(t.moment_defect() < 1e-10, "n={n} a={a}");
            }
        }
        let t = fd_coefficients(7, MAX_STENCIL_LEN - 7).unwrap();
        assert!(t.moment_defect() < 1e-10);
        assert!(fd_coefficients(0, 1).is_err());
        assert!(fd_coefficients(1, 0).is_err());
        assert!(fd_coefficients(10, 10).unwrap_err().is_resource_gate());
        let bad = fd_coefficients(3, 2).unwrap().with_corrupted(2, -11.0);
        assert!(bad.moment_defect() > 1e-3);
    }

    #[test]
    fn extraction_examples() {
        let lin: Vec<f64> = (0..2).map(|m| m as f64 * 0.1).collect();
        assert_eq!(extract_pk(&lin, 0.1, 1, 1).unwrap(), 1.0);
        let dx = 0.05;
        let sq: Vec<f64> = (0..3).map(|m| (m as f64 * dx) * (m as f64 * dx)).collect();
        assert!((extract_pk(&sq, dx, 2, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(extract_pk(&sq[..2], dx, 2, 1).is_err());
        assert!(extract_pk(&sq, 0.2, 2, 1).is_err());
        assert!(extract_pk(&sq, 0.0, 2, 1).is_err());
    }

    fn oracle_series(theta: f64, times: &[f64]) -> Vec<SizeDistribution> {
        let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(6, theta)).unwrap();
        let w = to_dense(&PauliString::single(6, 0, Pauli::Y).unwrap(), false).unwrap();
        size_distribution_series(&cache, &w, times).unwrap()
    }

    #[test]
    fn stencils_are_exact_on_low_degree_monomials() {
        let dx = 0.02;
        for n in 1..=6 {
            for a in 1..=2 {
                let t = fd_coefficients(n, a).unwrap();
                for deg in 0..n + a {
                    let samples: Vec<f64> = (0..n + a)
                        .map(|m| Float::powi(m as f64 * dx, deg as i32))
                        .collect();
                    let expect = if deg == n { factorial(n) } else { 0.0 };
                    let got = t.apply(&samples, dx);
                    assert!(
                        (got - expect).abs() < 1e-7 * factorial(n),
                        "n={n} a={a} deg={deg} {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn noiseless_round_trip() {
        // At dx = 0.01 the forward stencils carry an O(dx^a) truncation error
        // of order 1e-5, so the recovered P_k are compared with the exact
        // stencil expansion sum_j P_j D_k[x^j] rather than with P_k alone.
        let dx = 0.01;
        for d in oracle_series(0.0, &[0.0, 0.7, 1.9, 4.4]) {
            let samples: Vec<f64> = (0..8).map(|m| pgf(&d, m as f64 * dx)).collect();
            for k in 1..=6 {
                let t = fd_coefficients(k, 2).unwrap();
                let pk = extract_pk_with(&t, &samples, dx).unwrap();
                let expansion: f64 = (1..=6)
                    .map(|j| {
                        let mono: Vec<f64> = (0..k + 2)
                            .map(|m| Float::powi(m as f64 * dx, j as i32))
                            .collect();
                        d.p(j) * t.apply(&mono, dx) / factorial(k)
                    })
                    .sum();
                // rounding in F is amplified by sum |c_m| / (dx^k k!)
                let amplification: f64 = t.coefficients.iter().map(|c| c.abs()).sum::<f64>()
                    / (Float::powi(dx, k as i32) * factorial(k));
                assert!(
                    (pk - expansion).abs() < 64.0 * f64::EPSILON * amplification,
                    "k={k} t={}",
                    d.time
                );
                assert!(
                    (pk - d.p(k)).abs() < 1e-2,
                    "k={k} t={} {pk} vs {}",
                    d.time,
                    d.p(k)
                );
            }
            let xs: Vec<f64> = (1..=6).map(|j| j as f64 / 18.0).collect();
            let fs: Vec<f64> = xs.iter().map(|&x| pgf(&d, x)).collect();
            let sol = invert_vandermonde(&fs, &xs).unwrap();
            for k in 1..=6 {
                assert!((sol.probs[k - 1] - d.p(k)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn vandermonde_delta_and_errors() {
        for xs in [[0.05, 0.1, 0.2], [0.01, 0.3, 1.0 / 3.0]] {
            let sol = invert_vandermonde(&xs, &xs).unwrap();
            assert!((sol.probs[0] - 1.0).abs() < 1e-10);
            assert!(sol.probs[1..].iter().all(|p| p.abs() < 1e-10));
            assert!(sol.condition_number >= 1.0);
        }
        assert!(invert_vandermonde(&[0.1, 0.1], &[0.1, 0.1]).is_err());
        assert!(invert_vandermonde(&[0.0, 0.1], &[0.0, 0.1]).is_err());
        assert!(invert_vandermonde(&[0.5], &[0.5]).is_err());
        assert!(invert_vandermonde(&[0.1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn noise_model_statistics() {
        let mut rng = task_rng(1, TaskKind::Noise, 0);
        let m = NoiseModel::multiplicative(0.0).unwrap();
        assert_eq!(inject_noise(0.37, &m, &mut rng), 0.37);
        assert!(NoiseModel::multiplicative(-1.0).is_err());

        let eta = 0.05;
        let m = NoiseModel::multiplicative(eta).unwrap();
        let draws = 1_000_000;
        let rel: Vec<f64> = (0..draws)
            .map(|_| inject_noise(2.0, &m, &mut rng) / 2.0 - 1.0)
            .collect();
        let var = crate::stats::sample_variance(&rel);
        // Var of a sample variance of Gaussians is 2 sigma^4 / (n - 1)
        let sigma = Float::sqrt(2.0 / (draws - 1) as f64) * eta * eta;
        assert!((var - eta * eta).abs() < 3.0 * sigma);

        let add = NoiseModel::new(eta, NoiseKind::Additive).unwrap();
        let f = 1e-3;
        let mean_rel = |model: &NoiseModel, rng: &mut TaskRng| -> f64 {
            (0..10_000)
                .map(|_| (inject_noise(f, model, rng) / f - 1.0).abs())
                .sum::<f64>()
                / 10_000.0
        };
        assert!(mean_rel(&add, &mut rng) > 10.0 * mean_rel(&m, &mut rng));
    }

    #[test]
    fn time_averaged_error_examples() {
        let times = [0.0, 0.5, 1.5, 2.0];
        let p = [0.1, 0.4, 0.3, 0.2];
        assert_eq!(time_averaged_error(&p, &p, &times).unwrap(), 0.0);
        let shifted: Vec<f64> = p.iter().map(|v| v + 0.03).collect();
        assert!((time_averaged_error(&shifted, &p, &times).unwrap() - 0.03).abs() < 1e-15);
        assert!(time_averaged_error(&p[..3], &p, &times).is_err());
    }

    #[test]
    fn noise_study_is_reproducible_and_skips_infeasible_steps() {
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let dists = oracle_series(0.0, &times);
        let cfg = NoiseStudyConfig {
            k_values: alloc::vec![1, 2, 6],
            dx_values: alloc::vec![0.01, 0.1],
            a: 1,
            noise: NoiseModel::multiplicative(1e-2).unwrap(),
            realizations: 8,
            seed: 4,
        };
        let rows = noise_study(&dists, &cfg).unwrap();
        // at dx = 0.1 the k = 6 stencil reaches x = 0.6
        assert_eq!(rows.len(), 5);
        assert_eq!(rows, noise_study(&dists, &cfg).unwrap());
        let p1_small = rows.iter().find(|r| r.k == 1 && r.delta_x == 0.01).unwrap();
        let p6_small = rows.iter().find(|r| r.k == 6).unwrap();
        assert!(p1_small.mean_abs_error < 0.1);
        assert!(p6_small.mean_abs_error > 0.1);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 0.1, 5).unwrap();
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[4] - 0.1).abs() < 1e-15);
        assert!((g[2] - 1e-2).abs() < 1e-15);
        assert!(log_grid(0.0, 1.0, 3).is_err());
        assert!((max_step(3, 2) - 1.0 / 12.0).abs() < 1e-16);
    }
}
