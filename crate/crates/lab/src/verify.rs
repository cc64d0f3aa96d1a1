//! Fast invariant suite run by `notoc verify`. Failures are report content,
//! not errors.

use std::time::Instant;

use notoc_core::collective::spherical_tensor;
use notoc_core::dynamics::{EvolutionCache, HamiltonianSpec};
use notoc_core::inversion::{fd_coefficients, FiniteDiffTable};
use notoc_core::operator::hs_inner;
use notoc_core::oracle::{pgf, size_distribution_series};
use notoc_core::pauli::{to_dense, PauliString};
use notoc_core::protocol_a::{averaged_notoc_with_cache, MethodAConfig};
use notoc_core::protocol_b::{pk_estimate_with_cache, MethodBConfig};
use notoc_core::C64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("{tag} {} ({}; {:.2}s)", c.name, c.detail, c.seconds)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Perturb one finite-difference coefficient before the stencil check.
    pub corrupt_fd: bool,
}

type Outcome = Result<(bool, String), notoc_core::Error>;

fn timed(name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn pauli(s: &str) -> PauliString {
    s.parse().expect("fixed label")
}

fn normalization() -> Outcome {
    let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(5, 0.7))?;
    let w = to_dense(&pauli("IIYII"), false)?;
    let times: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let worst = size_distribution_series(&cache, &w, &times)?
        .iter()
        .map(|d| (d.total() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((worst < 1e-10, format!("max |sum P_k - 1| = {worst:.1e}")))
}

fn orthonormality() -> Outcome {
    let labels = ["III", "XYZ", "ZIX", "IYY", "XXX", "ZZI"];
    let ops: Vec<_> = labels
        .iter()
        .map(|l| to_dense(&pauli(l), true))
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((hs_inner(a, b)? - C64::new(target, 0.0)).norm());
        }
    }
    let mut tensors = Vec::new();
    for k in 0..=4usize {
        for q in -(k as i64)..=(k as i64) {
            tensors.push(spherical_tensor(2.0, k, q)?.matrix);
        }
    }
    for (i, a) in tensors.iter().enumerate() {
        for (j, b) in tensors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((hs_inner(a, b)? - C64::new(target, 0.0)).norm());
        }
    }
    Ok((worst < 1e-10, format!("max deviation {worst:.1e}")))
}

fn unitarity() -> Outcome {
    let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(6, 0.5))?;
    let worst = [0.3, 2.0, 17.5]
        .iter()
        .map(|&t| cache.evolve_unitary(t).unitarity_defect())
        .fold(0.0, f64::max);
    Ok((
        worst < 1e-12,
        format!("max ||U^dagger U - I|| = {worst:.1e}"),
    ))
}

fn stencils(corrupt: bool) -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=6 {
        for a in 1..=3 {
            let mut table: FiniteDiffTable = fd_coefficients(k, a)?;
            if corrupt && k == 2 && a == 2 {
                let c = table.coefficients[1];
                table = table.with_corrupted(1, c + 0.5);
            }
            worst = worst.max(table.moment_defect());
        }
    }
    Ok((worst < 1e-12, format!("max moment defect {worst:.1e}")))
}

fn oracle_vs_protocols() -> Outcome {
    let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(3, std::f64::consts::FRAC_PI_6))?;
    let w = to_dense(&pauli("YII"), false)?;
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let dists = size_distribution_series(&cache, &w, &times)?;
    let mut worst = 0.0f64;
    for eps in [1.0, (2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()] {
        let g = averaged_notoc_with_cache(&cache, &w, &times, &MethodAConfig::exact(eps))?;
        for (d, m) in dists.iter().zip(&g.mean) {
            worst = worst.max((pgf(d, g.x) - m).abs());
        }
    }
    for k in 1..=3 {
        let s = pk_estimate_with_cache(&cache, &w, k, &times, &MethodBConfig::exact())?;
        for (d, m) in dists.iter().zip(&s.mean) {
            worst = worst.max((d.p(k) - m).abs());
        }
    }
    Ok((worst < 1e-10, format!("N=3 max deviation {worst:.1e}")))
}

pub fn verify(opts: VerifyOptions) -> Report {
    Report {
        checks: vec![
            timed("normalization", normalization),
            timed("orthonormality", orthonormality),
            timed("unitarity", unitarity),
            timed("stencil_exactness", || stencils(opts.corrupt_fd)),
            timed("oracle_vs_protocols", oracle_vs_protocols),
        ],
    }
}
