//! Collective spins in the symmetric subspace: spherical tensors, rotations,
//! rank-resolved size distributions and the rotated-state rank estimator.
//!
//! Basis index `i` holds `|J, m = J - i>`, so index 0 is the top state.
//! Spins are given as `f64` at the API boundary and handled internally as
//! twice their value.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use rand::Rng;

use crate::dynamics::{diagonalize, EvolutionCache};
use crate::operator::{hs_inner, DenseOperator};
use crate::seed::{task_rng, TaskKind};
use crate::stats::Running;
use crate::{exec, Error, Result, C64};

/// Largest `2J` accepted.
pub const MAX_TWO_J: usize = 40;

fn twice(what: &'static str, j: f64) -> Result<i64> {
    let t = 2.0 * j;
    let r = Float::round(t);
    if !j.is_finite() || (t - r).abs() > 1e-9 {
        return Err(Error::out_of_range(what, j, "a multiple of 1/2"));
    }
    Ok(r as i64)
}

fn spin(what: &'static str, j: f64) -> Result<usize> {
    let t = twice(what, j)?;
    if t < 0 || t as usize > MAX_TWO_J {
        return Err(Error::out_of_range(what, j, "0..=20"));
    }
    Ok(t as usize)
}

fn fact(n: i64) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).map(|i| i as f64).product()
}

/// CG coefficient from twice-valued quantum numbers (Racah's formula).
fn cg_twice(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j + m) % 2 != 0 {
        return 0.0;
    }
    if j > j1 + j2 || j < (j1 - j2).abs() || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    // halve everything; all combinations below are integers
    let h = |x: i64| x / 2;
    let pre = (j + 1) as f64 * fact(h(j + j1 - j2)) * fact(h(j - j1 + j2)) * fact(h(j1 + j2 - j))
        / fact(h(j1 + j2 + j) + 1);
    let pre = pre
        * fact(h(j + m))
        * fact(h(j - m))
        * fact(h(j1 - m1))
        * fact(h(j1 + m1))
        * fact(h(j2 - m2))
        * fact(h(j2 + m2));
    let lo = 0.max(h(j2 - j - m1)).max(h(j1 - j + m2));
    let hi = h(j1 + j2 - j).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = 0.0;
    for s in lo..=hi {
        let den = fact(s)
            * fact(h(j1 + j2 - j) - s)
            * fact(h(j1 - m1) - s)
            * fact(h(j2 + m2) - s)
            * fact(h(j - j2 + m1) + s)
            * fact(h(j - j1 - m2) + s);
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / den;
    }
    Float::sqrt(pre) * sum
}

/// `<J, M | j1, m1; j2, m2>` in the Condon-Shortley convention; zero when
/// the selection rules fail.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (tj1, tj2, tj) = (spin("j1", j1)?, spin("j2", j2)?, spin("J", j)?);
    let (tm1, tm2, tm) = (twice("m1", m1)?, twice("m2", m2)?, twice("M", m)?);
    for (tm_, tj_, what, v) in [(tm1, tj1, "m1", m1), (tm2, tj2, "m2", m2), (tm, tj, "M", m)] {
        if tm_.abs() > tj_ as i64 || (tj_ as i64 + tm_) % 2 != 0 {
            return Err(Error::out_of_range(what, v, "-j..=j in integer steps"));
        }
    }
    Ok(cg_twice(tj1 as i64, tm1, tj2 as i64, tm2, tj as i64, tm))
}

/// `T^(k)_q` with its labels.
#[derive(Clone, Debug)]
pub struct SphericalTensorBasisElement {
    pub j: f64,
    pub k: usize,
    pub q: i64,
    pub matrix: DenseOperator,
}

fn tensor_twice(two_j: usize, k: usize, q: i64) -> DenseOperator {
    let d = two_j + 1;
    let norm = Float::sqrt((2 * k + 1) as f64 / d as f64);
    let tj = two_j as i64;
    DenseOperator::from_fn(d, |r, c| {
        let mp = tj - 2 * r as i64;
        let m = tj - 2 * c as i64;
        C64::new(norm * cg_twice(tj, m, 2 * k as i64, 2 * q, tj, mp), 0.0)
    })
}

/// `sqrt((2k+1)/(2J+1)) sum_{m,m'} <J m'|J m; k q> |J m'><J m|`.
pub fn spherical_tensor(j: f64, k: usize, q: i64) -> Result<SphericalTensorBasisElement> {
    let two_j = spin("J", j)?;
    if k > two_j {
        return Err(Error::out_of_range("k", k as f64, "0..=2J"));
    }
    if q.unsigned_abs() as usize > k {
        return Err(Error::out_of_range("q", q as f64, "-k..=k"));
    }
    Ok(SphericalTensorBasisElement {
        j,
        k,
        q,
        matrix: tensor_twice(two_j, k, q),
    })
}

/// Small-d element `d^j_{m'm}(beta)` from twice-valued labels.
fn small_d_twice(tj: i64, tmp: i64, tm: i64, beta: f64) -> f64 {
    let h = |x: i64| x / 2;
    let (sb, cb) = Float::sin_cos(0.5 * beta);
    let pre =
        Float::sqrt(fact(h(tj + tmp)) * fact(h(tj - tmp)) * fact(h(tj + tm)) * fact(h(tj - tm)));
    let lo = 0.max(h(tm - tmp));
    let hi = h(tj + tm).min(h(tj - tmp));
    let mut sum = 0.0;
    for s in lo..=hi {
        let den = fact(h(tj + tm) - s) * fact(s) * fact(h(tmp - tm) + s) * fact(h(tj - tmp) - s);
        let sign = if (h(tmp - tm) + s) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let pc = (h(2 * tj + tm - tmp) - 2 * s) as i32;
        let ps = (h(tmp - tm) + 2 * s) as i32;
        sum += sign * Float::powi(cb, pc) * Float::powi(sb, ps) / den;
    }
    pre * sum
}

/// `<k, q'| exp(-i J_z alpha) exp(-i J_y beta) exp(-i J_z gamma) |k, q>`.
pub fn wigner_d_element(
    k: usize,
    q_prime: i64,
    q: i64,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<C64> {
    if k > MAX_TWO_J {
        return Err(Error::out_of_range("k", k as f64, "0..=40"));
    }
    if q.unsigned_abs() as usize > k || q_prime.unsigned_abs() as usize > k {
        return Err(Error::out_of_range(
            "q",
            q.abs().max(q_prime.abs()) as f64,
            "-k..=k",
        ));
    }
    let d = small_d_twice(2 * k as i64, 2 * q_prime, 2 * q, beta);
    Ok(C64::from_polar(
        d,
        -(q_prime as f64) * alpha - (q as f64) * gamma,
    ))
}

/// `(J_x, J_y, J_z)` in the `|J, m>` basis.
pub fn spin_matrices(j: f64) -> Result<[DenseOperator; 3]> {
    let two_j = spin("J", j)?;
    let d = two_j + 1;
    let m_of = |i: usize| j - i as f64;
    // <m+1| J_+ |m> sits at (i - 1, i)
    let jp = DenseOperator::from_fn(d, |r, c| {
        if c == r + 1 {
            let m = m_of(c);
            C64::new(Float::sqrt(j * (j + 1.0) - m * (m + 1.0)), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale_real(0.5);
    let jy = (&jp - &jm).scale(C64::new(0.0, -0.5));
    let jz = DenseOperator::diagonal(&(0..d).map(|i| C64::new(m_of(i), 0.0)).collect::<Vec<_>>());
    Ok([jx, jy, jz])
}

/// `D(phi, theta) = exp(-i J_z phi) exp(-i J_y theta)`, built from the
/// eigendecomposition of `J_y`.
pub fn rotation_operator(j: f64, phi: f64, theta: f64) -> Result<DenseOperator> {
    let [_, jy, jz] = spin_matrices(j)?;
    let ry = diagonalize(&jy)?.evolve_unitary(theta);
    let rz = DenseOperator::diagonal(
        &(0..jz.dim())
            .map(|i| C64::from_polar(1.0, -jz.get(i, i).re * phi))
            .collect::<Vec<_>>(),
    );
    Ok(&rz * &ry)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CollectiveStateSpec {
    pub j: f64,
    pub k: usize,
}

impl CollectiveStateSpec {
    pub fn new(j: f64, k: usize) -> Result<Self> {
        let two_j = spin("J", j)?;
        if k == 0 || k > two_j {
            return Err(Error::out_of_range("k", k as f64, "1..=2J"));
        }
        Ok(Self { j, k })
    }

    pub fn dim(&self) -> usize {
        (2.0 * self.j).round() as usize + 1
    }

    /// `|min eig T^(k)_0|`; the tensor is diagonal and traceless.
    pub fn e0(&self) -> f64 {
        let t = tensor_twice(self.dim() - 1, self.k, 0);
        -(0..t.dim())
            .map(|i| t.get(i, i).re)
            .fold(f64::INFINITY, f64::min)
    }

    /// `(e0 d)^-2 / (2k + 1)`: the sphere average of `|r_{k,q'}|^2`.
    pub fn variance_normalized(&self) -> f64 {
        let s = self.e0() * self.dim() as f64;
        1.0 / (s * s * (2 * self.k + 1) as f64)
    }

    /// The same with an extra `4 pi`, i.e. an unnormalized solid-angle integral.
    pub fn variance_unnormalized(&self) -> f64 {
        4.0 * PI * self.variance_normalized()
    }

    /// `r_{k,q'}(phi, theta) = (e0 d)^-1 e^{-i q' phi} d^k_{q'0}(theta)`.
    pub fn coefficient(&self, q_prime: i64, phi: f64, theta: f64) -> Result<C64> {
        let d = wigner_d_element(self.k, q_prime, 0, phi, theta, 0.0)?;
        Ok(d / (self.e0() * self.dim() as f64))
    }
}

/// `(I + T^(k)_0 / e0) / d`.
pub fn prepare_collective_state(spec: &CollectiveStateSpec) -> Result<DenseOperator> {
    let spec = CollectiveStateSpec::new(spec.j, spec.k)?;
    let d = spec.dim();
    let t0 = tensor_twice(d - 1, spec.k, 0);
    Ok((&DenseOperator::identity(d) + &t0.scale_real(1.0 / spec.e0())).scale_real(1.0 / d as f64))
}

/// `D rho D^dagger` with `D = D(phi, theta)`.
pub fn rotate_collective(rho: &DenseOperator, phi: f64, theta: f64) -> Result<DenseOperator> {
    let j = (rho.dim() as f64 - 1.0) / 2.0;
    let d = rotation_operator(j, phi, theta)?;
    rho.sandwich(&d, &d.adjoint())
}

/// A uniform point on the sphere as `(phi, theta)`.
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let cos_theta: f64 = 1.0 - 2.0 * rng.random::<f64>();
    let phi = 2.0 * PI * rng.random::<f64>();
    (phi, Float::acos(cos_theta))
}

/// Rank distribution `P_k = sum_q |Tr[T^(k)_q^dagger W]|^2 / Tr[W^dagger W]`,
/// `k = 0..=2J`.
pub fn collective_size_oracle(wt: &DenseOperator, j: f64) -> Result<Vec<f64>> {
    let two_j = spin("J", j)?;
    if wt.dim() != two_j + 1 {
        return Err(Error::DimensionMismatch {
            left: wt.dim(),
            right: two_j + 1,
        });
    }
    let norm = wt.hs_norm_sqr();
    if norm == 0.0 {
        return Err(Error::Invalid("operator is zero".into()));
    }
    (0..=two_j)
        .map(|k| {
            let mut s = 0.0;
            for q in -(k as i64)..=(k as i64) {
                s += hs_inner(&tensor_twice(two_j, k, q), wt)?.norm_sqr();
            }
            Ok(s / norm)
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = Float::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for l in 2..=n {
                    let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 0 { 1.0 } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * p - pm) / (x * x - 1.0);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Sphere average of `|r_{k,q'}|^2` by Gauss-Legendre quadrature in
/// `cos theta`; the integrand is a polynomial of degree `2k`, so the rule is
/// exact.
pub fn calibrate_variance(spec: &CollectiveStateSpec, q_prime: i64) -> Result<f64> {
    let nodes = gauss_legendre(spec.k + 2);
    let mut acc = 0.0;
    for (x, w) in nodes {
        acc += w * spec.coefficient(q_prime, 0.0, Float::acos(x))?.norm_sqr();
    }
    Ok(acc / 2.0)
}

/// Sample mean and variance of `r_{k,q'}` over `samples` sphere points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientMoments {
    pub mean: C64,
    /// `(1/(n-1)) sum |r - rbar|^2`.
    pub variance: f64,
    /// Standard error of the variance estimate.
    pub variance_stderr: f64,
    pub n: usize,
}

pub fn coefficient_moments(
    spec: &CollectiveStateSpec,
    q_prime: i64,
    samples: usize,
    seed: u64,
) -> Result<CoefficientMoments> {
    if samples < 2 {
        return Err(Error::out_of_range("samples", samples as f64, ">= 2"));
    }
    let scale = 1.0 / (spec.e0() * spec.dim() as f64);
    let two_k = 2 * spec.k as i64;
    let mut rng = task_rng(seed, TaskKind::Sphere, 0);
    let mut re = Running::default();
    let mut im = Running::default();
    let mut sq = Running::default();
    for _ in 0..samples {
        let (phi, theta) = sample_sphere(&mut rng);
        let r = C64::from_polar(
            scale * small_d_twice(two_k, 2 * q_prime, 0, theta),
            -(q_prime as f64) * phi,
        );
        re.push(r.re);
        im.push(r.im);
        sq.push(r.norm_sqr());
    }
    let n = samples as f64;
    let mean = C64::new(re.mean(), im.mean());
    Ok(CoefficientMoments {
        mean,
        variance: (re.variance() + im.variance()),
        variance_stderr: sq.stderr() * n / (n - 1.0),
        n: samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectiveConfig {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveSeries {
    pub j: f64,
    pub k: usize,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Variance constant used in the denominator.
    pub variance: f64,
}

/// `P_k(t) = avg |Tr[rho0 W(t)]|^2 / (Tr[W^dagger W] rbar^2)` over uniformly
/// rotated rank-`k` states, evolved by `cache`. `W` must be traceless.
pub fn collective_pk_estimate(
    cache: &EvolutionCache,
    w: &DenseOperator,
    k: usize,
    times: &[f64],
    cfg: &CollectiveConfig,
) -> Result<CollectiveSeries> {
    let d = cache.dim();
    if w.dim() != d {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: d,
        });
    }
    let j = (d as f64 - 1.0) / 2.0;
    let spec = CollectiveStateSpec::new(j, k)?;
    if cfg.samples == 0 {
        return Err(Error::out_of_range("samples", 0.0, ">= 1"));
    }
    let w_norm = w.hs_norm_sqr();
    if w_norm == 0.0 || w.trace().norm() > 1e-10 * Float::sqrt(w_norm) {
        return Err(Error::Invalid(
            "observable must be traceless and nonzero".into(),
        ));
    }
    let variance = calibrate_variance(&spec, 0)?;
    let base = prepare_collective_state(&spec)?;
    let w_eig = cache.to_eigenbasis(w);
    let rows = exec::map_indexed(cfg.samples, |i| {
        let mut rng = task_rng(cfg.seed, TaskKind::Sphere, i as u64);
        let (phi, theta) = sample_sphere(&mut rng);
        let rho = rotate_collective(&base, phi, theta)?;
        let e = cache.schrodinger_expectations(&cache.to_eigenbasis(&rho), &w_eig, times);
        Ok(e.iter().map(|v| v.norm_sqr()).collect::<Vec<f64>>())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut acc = alloc::vec![Running::default(); times.len()];
    for row in &rows {
        for (a, &g) in acc.iter_mut().zip(row) {
            a.push(g);
        }
    }
    let scale = 1.0 / (w_norm * variance);
    Ok(CollectiveSeries {
        j,
        k,
        times: times.to_vec(),
        mean: acc.iter().map(|a| a.mean() * scale).collect(),
        stderr: acc.iter().map(|a| a.stderr() * scale).collect(),
        n_samples: cfg.samples,
        seed: cfg.seed,
        variance,
    })
}

/// Lipkin-Meshkov-Glick type Hamiltonian
/// `H = chi / (2J) J_z^2 + h_x J_x + h_z J_z`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LmgSpec {
    pub j: f64,
    pub chi: f64,
    pub h_x: f64,
    pub h_z: f64,
}

impl LmgSpec {
    pub fn hamiltonian(&self) -> Result<DenseOperator> {
        let [jx, _, jz] = spin_matrices(self.j)?;
        if self.j == 0.0 {
            return Ok(DenseOperator::zeros(1));
        }
        let jz2 = &jz * &jz;
        let h = &jz2.scale_real(self.chi / (2.0 * self.j)) + &jx.scale_real(self.h_x);
        Ok(&h + &jz.scale_real(self.h_z))
    }
}
