//! One function per experiment kind. Each writes its CSV tables into the
//! output directory and returns the file names.

use std::path::Path;
use std::time::Instant;

use notoc_core::collective::{
    calibrate_variance, coefficient_moments, collective_pk_estimate, collective_size_oracle,
    spin_matrices, CollectiveConfig as CoreCollectiveConfig, CollectiveStateSpec, LmgSpec,
};
use notoc_core::dynamics::{diagonalize, heisenberg_evolve, EvolutionCache};
use notoc_core::inversion::{fd_coefficients, noise_study, NoiseModel, NoiseStudyConfig};
use notoc_core::oracle::{
    haar_pk, moments, pgf, pgf_fluctuations, pgf_time_average, size_distribution_series, PgfCurve,
    SizeDistribution, MAX_DISTRIBUTION_SITES,
};
use notoc_core::pauli::to_dense;
use notoc_core::protocol_a::{averaged_notoc_with_cache, Budget, MethodAConfig};
use notoc_core::protocol_b::{pk_estimate_with_cache, MethodBConfig, SubsetBudget};
use notoc_core::DenseOperator;

use crate::config::{CollectiveObservable, ExperimentConfig, SubsetMode};
use crate::output::{num, OutputDir, Table};
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Oracle,
    ProtocolA,
    ProtocolB,
    PgfInvert,
    Metrics,
    Collective,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::ProtocolA => "protocol-a",
            Self::ProtocolB => "protocol-b",
            Self::PgfInvert => "pgf-invert",
            Self::Metrics => "metrics",
            Self::Collective => "collective",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub files: Vec<String>,
    pub seconds: f64,
    pub workers: usize,
}

/// Validates `cfg`, then runs `cmd` on a pool of `cfg.workers` threads and
/// writes the tables plus `manifest.json` into `out`.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary, LabError> {
    cfg.validate()?;
    gate(cmd, cfg)?;
    let workers = cfg.workers.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| LabError::ResourceGate(format!("thread pool: {e}")))?;
    let mut dir = OutputDir::create(out, cfg.to_json())?;
    let start = Instant::now();
    pool.install(|| match cmd {
        Command::Oracle => oracle(cfg, &mut dir),
        Command::ProtocolA => protocol_a(cfg, &mut dir),
        Command::ProtocolB => protocol_b(cfg, &mut dir),
        Command::PgfInvert => pgf_invert(cfg, &mut dir),
        Command::Metrics => metrics(cfg, &mut dir),
        Command::Collective => collective(cfg, &mut dir),
    })?;
    let seconds = start.elapsed().as_secs_f64();
    dir.write_manifest(cmd.name(), workers, seconds)?;
    Ok(RunSummary {
        files: dir.files().to_vec(),
        seconds,
        workers,
    })
}

/// Size checks that depend on the command.
fn gate(cmd: Command, cfg: &ExperimentConfig) -> Result<(), LabError> {
    let n = cfg.model.n_sites;
    if cmd == Command::Metrics {
        cfg.validate_window()?;
    }
    let needs_oracle = matches!(cmd, Command::Oracle | Command::PgfInvert | Command::Metrics);
    if needs_oracle && n > MAX_DISTRIBUTION_SITES {
        return Err(LabError::ResourceGate(format!(
            "{}: n_sites = {n} exceeds the size-distribution limit {MAX_DISTRIBUTION_SITES}",
            cmd.name()
        )));
    }
    if cmd == Command::ProtocolA && cfg.protocol_a.exact && n > cfg.protocol_a.max_exact_sites {
        return Err(LabError::ResourceGate(format!(
            "protocol-a: exact enumeration of 6^{n} rotations exceeds max_exact_sites = {}",
            cfg.protocol_a.max_exact_sites
        )));
    }
    if cmd == Command::ProtocolB && cfg.protocol_b.exact_rotations {
        let kmax = b_ranks(cfg).into_iter().max().unwrap_or(0);
        if kmax > cfg.protocol_b.max_exact_sites {
            return Err(LabError::ResourceGate(format!(
                "protocol-b: exact enumeration of 6^{kmax} rotations exceeds max_exact_sites = {}",
                cfg.protocol_b.max_exact_sites
            )));
        }
    }
    Ok(())
}

fn b_ranks(cfg: &ExperimentConfig) -> Vec<usize> {
    cfg.protocol_b
        .k_values
        .clone()
        .unwrap_or_else(|| (1..=cfg.model.n_sites).collect())
}

struct Model {
    theta: f64,
    cache: EvolutionCache,
    w0: DenseOperator,
}

fn models(cfg: &ExperimentConfig) -> Result<Vec<Model>, LabError> {
    let w0 = to_dense(&cfg.observable()?, false)?;
    cfg.model
        .thetas
        .iter()
        .map(|&theta| {
            let cache = EvolutionCache::from_spec(&cfg.model.spec(theta))?;
            Ok(Model {
                theta,
                cache,
                w0: w0.clone(),
            })
        })
        .collect()
}

fn distributions(m: &Model, times: &[f64]) -> Result<Vec<SizeDistribution>, LabError> {
    Ok(size_distribution_series(&m.cache, &m.w0, times)?)
}

fn oracle(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<(), LabError> {
    let jts = cfg.time.points();
    let times = cfg.times();
    let mut pk = Table::new(&["theta", "jt", "k", "p_k"]);
    let mut f = Table::new(&["theta", "jt", "epsilon", "x", "f"]);
    for m in models(cfg)? {
        for (jt, d) in jts.iter().zip(distributions(&m, &times)?) {
            let th = num(m.theta);
            pk.row(&[th.clone(), num(*jt), "0".into(), num(d.identity_weight)]);
            for k in 1..=d.n_sites() {
                pk.row(&[th.clone(), num(*jt), k.to_string(), num(d.p(k))]);
            }
            for &eps in &cfg.protocol_a.epsilons {
                let x = eps * eps / 3.0;
                f.row(&[th.clone(), num(*jt), num(eps), num(x), num(pgf(&d, x))]);
            }
        }
    }
    dir.write_table("oracle_pk.csv", &pk)?;
    dir.write_table("oracle_pgf.csv", &f)?;
    Ok(())
}

fn protocol_a(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<(), LabError> {
    let a = &cfg.protocol_a;
    let jts = cfg.time.points();
    let times = cfg.times();
    let with_oracle = cfg.model.n_sites <= MAX_DISTRIBUTION_SITES;
    let mut t = Table::new(&[
        "theta",
        "epsilon",
        "x",
        "jt",
        "g_mean",
        "g_stderr",
        "oracle_f",
        "n_samples",
        "scheme",
    ]);
    for m in models(cfg)? {
        let dists = if with_oracle {
            Some(distributions(&m, &times)?)
        } else {
            None
        };
        for &eps in &a.epsilons {
            let budget = if a.exact {
                Budget::Exact
            } else {
                Budget::Samples(a.samples)
            };
            let mut mc = MethodAConfig::new(eps, a.scheme, budget, cfg.seed);
            mc.shot_noise = a.shot_noise;
            mc.max_exact_sites = a.max_exact_sites;
            let g = averaged_notoc_with_cache(&m.cache, &m.w0, &times, &mc)?;
            for i in 0..times.len() {
                let oracle = dists
                    .as_ref()
                    .map(|d| num(pgf(&d[i], g.x)))
                    .unwrap_or_default();
                t.row(&[
                    num(m.theta),
                    num(eps),
                    num(g.x),
                    num(jts[i]),
                    num(g.mean[i]),
                    num(g.stderr[i]),
                    oracle,
                    g.n_samples.to_string(),
                    g.scheme.to_string(),
                ]);
            }
        }
    }
    dir.write_table("protocol_a.csv", &t)?;
    Ok(())
}

fn protocol_b(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<(), LabError> {
    let b = &cfg.protocol_b;
    let n = cfg.model.n_sites;
    let jts = cfg.time.points();
    let times = cfg.times();
    let with_oracle = n <= MAX_DISTRIBUTION_SITES;
    let subsets = match b.subsets {
        SubsetMode::All => SubsetBudget::All,
        SubsetMode::Sampled => SubsetBudget::Sampled(b.subset_samples),
        SubsetMode::Reflection => SubsetBudget::ReflectionReduced,
    };
    let rotations = if b.exact_rotations {
        Budget::Exact
    } else {
        Budget::Samples(b.rotations)
    };
    let mut mc = MethodBConfig::new(b.scheme, rotations, subsets, cfg.seed);
    mc.max_exact_sites = b.max_exact_sites;
    let mut t = Table::new(&[
        "theta",
        "k",
        "jt",
        "p_mean",
        "p_stderr",
        "oracle_p",
        "haar_p",
        "n_subsets",
        "n_rotations",
        "subsets",
    ]);
    for m in models(cfg)? {
        let dists = if with_oracle {
            Some(distributions(&m, &times)?)
        } else {
            None
        };
        for k in b_ranks(cfg) {
            let s = pk_estimate_with_cache(&m.cache, &m.w0, k, &times, &mc)?;
            let haar = haar_pk(n, k)?;
            for i in 0..times.len() {
                let oracle = dists.as_ref().map(|d| num(d[i].p(k))).unwrap_or_default();
                t.row(&[
                    num(m.theta),
                    k.to_string(),
                    num(jts[i]),
                    num(s.mean[i]),
                    num(s.stderr[i]),
                    oracle,
                    num(haar),
                    s.n_subsets.to_string(),
                    s.n_rotations.to_string(),
                    s.subsets.name().to_string(),
                ]);
            }
        }
    }
    dir.write_table("protocol_b.csv", &t)?;
    Ok(())
}

fn pgf_invert(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<(), LabError> {
    let inv = &cfg.inversion;
    let mut fd = Table::new(&["k", "a", "m", "numerator", "denominator", "value"]);
    for &a in &inv.a_values {
        for k in inv.ranks(cfg.model.n_sites) {
            let table = fd_coefficients(k, a)?;
            for (m, ((p, q), c)) in table
                .exact()
                .into_iter()
                .zip(&table.coefficients)
                .enumerate()
            {
                fd.row(&[
                    k.to_string(),
                    a.to_string(),
                    m.to_string(),
                    p.to_string(),
                    q.to_string(),
                    num(*c),
                ]);
            }
        }
    }
    dir.write_table("fd_tables.csv", &fd)?;

    let times = cfg.times();
    let mut t = Table::new(&[
        "theta",
        "eta",
        "noise",
        "a",
        "k",
        "delta_x",
        "mean_abs_error",
        "stderr",
        "n_realizations",
    ]);
    let noise_name = serde_json::to_value(inv.noise).expect("serializes");
    let noise_name = noise_name.as_str().unwrap_or_default().to_string();
    for m in models(cfg)? {
        let dists = distributions(&m, &times)?;
        for &eta in &inv.etas {
            for &a in &inv.a_values {
                let study = NoiseStudyConfig {
                    k_values: inv.ranks(cfg.model.n_sites),
                    dx_values: inv.steps(a)?,
                    a,
                    noise: NoiseModel::new(eta, inv.noise)?,
                    realizations: inv.realizations,
                    seed: cfg.seed,
                };
                for r in noise_study(&dists, &study)? {
                    t.row(&[
                        num(m.theta),
                        num(eta),
                        noise_name.clone(),
                        a.to_string(),
                        r.k.to_string(),
                        num(r.delta_x),
                        num(r.mean_abs_error),
                        num(r.stderr),
                        r.n_realizations.to_string(),
                    ]);
                }
            }
        }
    }
    dir.write_table("inversion.csv", &t)?;
    Ok(())
}

fn metrics(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<(), LabError> {
    let mt = &cfg.metrics;
    let n = cfg.model.n_sites;
    let jts = cfg.time.points();
    let times = cfg.times();
    let [w0, w1] = mt.window;
    // window edges in physical time
    let (t0, t1) = (w0 / cfg.model.j, w1 / cfg.model.j);
    let mut pgf_t = Table::new(&[
        "theta",
        "x",
        "window_start",
        "window_stop",
        "time_average",
        "fluctuation",
    ]);
    let mut sizes = Table::new(&["theta", "k", "time_average_p", "haar_p"]);
    let mut mom = Table::new(&["theta", "jt", "mean_size", "second_moment"]);
    for m in models(cfg)? {
        let dists = distributions(&m, &times)?;
        let curve = PgfCurve::from_distributions(&dists, &mt.x_values);
        for &x in &mt.x_values {
            pgf_t.row(&[
                num(m.theta),
                num(x),
                num(w0),
                num(w1),
                num(pgf_time_average(&curve, x, t0, t1)?),
                num(pgf_fluctuations(&curve, x, t0, t1)?),
            ]);
        }
        for k in 1..=n {
            let avg = window_average(&times, &dists, t0, t1, |d| d.p(k));
            sizes.row(&[num(m.theta), k.to_string(), num(avg), num(haar_pk(n, k)?)]);
        }
        for (jt, d) in jts.iter().zip(&dists) {
            mom.row(&[
                num(m.theta),
                num(*jt),
                num(moments(d, 1)?),
                num(moments(d, 2)?),
            ]);
        }
    }
    dir.write_table("metrics_pgf.csv", &pgf_t)?;
    dir.write_table("metrics_sizes.csv", &sizes)?;
    dir.write_table("metrics_moments.csv", &mom)?;
    Ok(())
}

/// Trapezoidal average of `f` over the grid points inside `[t0, t1]`.
pub fn window_average<T>(
    times: &[f64],
    values: &[T],
    t0: f64,
    t1: f64,
    f: impl Fn(&T) -> f64,
) -> f64 {
    let tol = 1e-9 * (1.0 + t1.abs());
    let (ts, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t0 - tol && **t <= t1 + tol)
        .map(|(t, v)| (*t, f(v)))
        .unzip();
    if ts.len() < 2 {
        return ys.first().copied().unwrap_or(f64::NAN);
    }
    notoc_core::stats::trapezoid(&ts, &ys) / (ts[ts.len() - 1] - ts[0])
}

/// Observable for the collective run, made traceless.
pub fn collective_observable(
    j: f64,
    which: CollectiveObservable,
) -> Result<DenseOperator, LabError> {
    let [jx, jy, jz] = spin_matrices(j)?;
    let w = match which {
        CollectiveObservable::Jx => jx,
        CollectiveObservable::Jy => jy,
        CollectiveObservable::Jz => jz,
        CollectiveObservable::Jz2 => &jz * &jz,
    };
    let d = w.dim();
    let shift = w.trace() / d as f64;
    Ok(&w - &DenseOperator::identity(d).scale(shift))
}

fn collective(cfg: &ExperimentConfig, dir: &mut OutputDir) -> Result<(), LabError> {
    let c = &cfg.collective;
    let lmg = LmgSpec {
        j: c.j,
        chi: c.chi,
        h_x: c.h_x,
        h_z: c.h_z,
    };
    let cache = diagonalize(&lmg.hamiltonian()?)?;
    let w = collective_observable(c.j, c.observable)?;
    // collective time is used as given, without a 1/J rescaling
    let times = cfg.time.points();
    let oracle: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| collective_size_oracle(&heisenberg_evolve(&w, &cache.evolve_unitary(t))?, c.j))
        .collect::<Result<_, _>>()?;

    let mut var = Table::new(&[
        "k",
        "q",
        "e0",
        "quadrature",
        "normalized",
        "unnormalized",
        "empirical",
        "empirical_stderr",
        "samples",
    ]);
    let mut pk = Table::new(&["k", "t", "p_mean", "p_stderr", "oracle_p", "n_samples"]);
    for k in c.ranks() {
        let spec = CollectiveStateSpec::new(c.j, k)?;
        for q in [0, k as i64] {
            let emp = coefficient_moments(&spec, q, c.variance_samples, cfg.seed)?;
            var.row(&[
                k.to_string(),
                q.to_string(),
                num(spec.e0()),
                num(calibrate_variance(&spec, q)?),
                num(spec.variance_normalized()),
                num(spec.variance_unnormalized()),
                num(emp.variance),
                num(emp.variance_stderr),
                emp.n.to_string(),
            ]);
        }
        let s = collective_pk_estimate(
            &cache,
            &w,
            k,
            &times,
            &CoreCollectiveConfig {
                samples: c.samples,
                seed: cfg.seed,
            },
        )?;
        for (i, &t) in times.iter().enumerate() {
            pk.row(&[
                k.to_string(),
                num(t),
                num(s.mean[i]),
                num(s.stderr[i]),
                num(oracle[i][k]),
                s.n_samples.to_string(),
            ]);
        }
    }
    dir.write_table("collective_variance.csv", &var)?;
    dir.write_table("collective_pk.csv", &pk)?;
    Ok(())
}
