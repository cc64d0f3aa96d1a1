//! Fixed-order sample statistics.

use alloc::vec::Vec;

use num_traits::Float;

/// Mean and standard error of the mean of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (two-pass). Zero for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn mean_stderr(xs: &[f64]) -> MeanStderr {
    let n = xs.len();
    let stderr = if n < 2 {
        0.0
    } else {
        Float::sqrt(sample_variance(xs) / n as f64)
    };
    MeanStderr {
        mean: mean(xs),
        stderr,
        n,
    }
}

/// Running mean and sum of squared deviations (Welford), fed in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Running {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        Float::sqrt(self.variance() / self.n as f64)
    }
}

/// Column-wise mean and standard error of `rows[sample][column]`, reduced in
/// sample order.
pub fn column_mean_stderr(rows: &[Vec<f64>]) -> Vec<MeanStderr> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let mut col = Vec::with_capacity(rows.len());
    (0..first.len())
        .map(|j| {
            col.clear();
            col.extend(rows.iter().map(|r| r[j]));
            mean_stderr(&col)
        })
        .collect()
}

/// Trapezoidal integral of `ys` over the (possibly uneven) grid `xs`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "trapezoid on mismatched grids");
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Spearman rank correlation (ties broken by position).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = alloc::vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        let s = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.stderr - Float::sqrt(5.0 / 3.0 / 4.0)).abs() < 1e-15);
        assert_eq!(mean_stderr(&[3.0]).stderr, 0.0);
    }

    #[test]
    fn running_matches_two_pass() {
        let xs = [0.3, 1.7, -2.2, 4.0, 0.0, 1e-3];
        let mut r = Running::default();
        xs.iter().for_each(|&x| r.push(x));
        let two = mean_stderr(&xs);
        assert!((r.mean() - two.mean).abs() < 1e-15);
        assert!((r.stderr() - two.stderr).abs() < 1e-15);
        assert!((r.variance() - sample_variance(&xs)).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        assert!((trapezoid(&xs, &xs) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn spearman_extremes() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&a, &[10.0, 20.0, 30.0, 40.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&a, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }
}
