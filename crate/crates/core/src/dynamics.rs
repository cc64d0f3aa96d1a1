//! Tilted-field Ising chain and exact unitary evolution.
//!
//! Evolution always goes through one eigendecomposition of the Hamiltonian;
//! there is no time stepping.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use nalgebra::SymmetricEigen;
use num_traits::{Float, Zero};

use crate::operator::DenseOperator;
use crate::pauli::check_dense_sites;
use crate::{Error, Result, C64, DEFAULT_MAX_DENSE_SITES};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// `H = J sum_i Z_i Z_{i+1} + B sum_i (cos(theta) X_i + sin(theta) Z_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HamiltonianSpec {
    pub n_sites: usize,
    pub j: f64,
    pub b: f64,
    /// Field tilt in radians, within `[0, pi/2]`.
    pub theta: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    /// Open chain with `J = B = 1`.
    pub fn ising(n_sites: usize, theta: f64) -> Self {
        Self {
            n_sites,
            j: 1.0,
            b: 1.0,
            theta,
            boundary: Boundary::Open,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::out_of_range("n_sites", self.n_sites as f64, ">= 2"));
        }
        // small slack so that pi/2 computed in a config file is accepted
        if !(self.theta >= 0.0 && self.theta <= FRAC_PI_2 + 1e-12) {
            return Err(Error::out_of_range("theta", self.theta, "[0, pi/2]"));
        }
        if !self.j.is_finite() {
            return Err(Error::out_of_range("J", self.j, "finite"));
        }
        if !self.b.is_finite() {
            return Err(Error::out_of_range("B", self.b, "finite"));
        }
        check_dense_sites(self.n_sites, DEFAULT_MAX_DENSE_SITES)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }
}

/// Bit of the computational-basis index that holds site `i`.
#[inline]
pub(crate) fn site_bit(n_sites: usize, site: usize) -> usize {
    1 << (n_sites - 1 - site)
}

pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let n = spec.n_sites;
    let dim = spec.dim();
    let (sin_t, cos_t) = Float::sin_cos(spec.theta);
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if spec.boundary == Boundary::Periodic {
        bonds.push((n - 1, 0));
    }
    let spin = |state: usize, site: usize| -> f64 {
        if state & site_bit(n, site) == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut h = DenseOperator::zeros(dim);
    for state in 0..dim {
        let zz: f64 = bonds
            .iter()
            .map(|&(a, b)| spin(state, a) * spin(state, b))
            .sum();
        let z: f64 = (0..n).map(|i| spin(state, i)).sum();
        h.set(
            state,
            state,
            C64::new(spec.j * zz + spec.b * sin_t * z, 0.0),
        );
        for i in 0..n {
            let flipped = state ^ site_bit(n, i);
            let prev = h.get(flipped, state);
            h.set(flipped, state, prev + C64::new(spec.b * cos_t, 0.0));
        }
    }
    Ok(h)
}

/// Eigendecomposition `H = V diag(E) V^dagger`, reused for every time.
#[derive(Clone, Debug)]
pub struct EvolutionCache {
    eigenvalues: Vec<f64>,
    eigenvectors: DenseOperator,
    spec: Option<HamiltonianSpec>,
}

/// Diagonalizes a Hermitian operator.
pub fn diagonalize(h: &DenseOperator) -> Result<EvolutionCache> {
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let eig = SymmetricEigen::new(h.as_matrix().clone());
    // ascending order keeps the cache layout independent of the solver
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DenseOperator::from_fn(h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EvolutionCache {
        eigenvalues,
        eigenvectors,
        spec: None,
    })
}

impl EvolutionCache {
    pub fn from_spec(spec: &HamiltonianSpec) -> Result<Self> {
        let h = build_hamiltonian(spec)?;
        let mut cache = diagonalize(&h)?;
        cache.spec = Some(*spec);
        Ok(cache)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DenseOperator {
        &self.eigenvectors
    }

    pub fn spec(&self) -> Option<&HamiltonianSpec> {
        self.spec.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(E) V^dagger`.
    pub fn reconstruct(&self) -> DenseOperator {
        let d: Vec<C64> = self.eigenvalues.iter().map(|&e| C64::new(e, 0.0)).collect();
        self.from_eigenbasis(&DenseOperator::diagonal(&d))
    }

    /// `U(t) = V exp(-i E t) V^dagger`.
    pub fn evolve_unitary(&self, t: f64) -> DenseOperator {
        let phases = self.phases(t);
        self.from_eigenbasis(&DenseOperator::diagonal(&phases))
    }

    /// `exp(-i E_a t)` for every level.
    pub fn phases(&self, t: f64) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect()
    }

    /// `V^dagger A V`.
    pub fn to_eigenbasis(&self, op: &DenseOperator) -> DenseOperator {
        let v = &self.eigenvectors;
        &(&v.adjoint() * op) * v
    }

    /// `V A V^dagger`.
    pub fn from_eigenbasis(&self, op: &DenseOperator) -> DenseOperator {
        let v = &self.eigenvectors;
        &(v * op) * &v.adjoint()
    }

    /// Heisenberg-evolved `W(t) = U^dagger W U`, given `W` already in the
    /// eigenbasis. Costs two matrix products.
    pub fn heisenberg_at(&self, w_eig: &DenseOperator, t: f64) -> DenseOperator {
        let p = self.phases(t);
        let rotated =
            DenseOperator::from_fn(self.dim(), |a, b| w_eig.get(a, b) * p[a].conj() * p[b]);
        self.from_eigenbasis(&rotated)
    }

    /// Schrodinger-picture expectation values `Tr[rho(t) W]` with
    /// `rho(t) = U(t) rho U(t)^dagger`, for both operators given in the
    /// eigenbasis. In that basis `rho(t)_{ab} = rho_{ab} e^{-i(E_a - E_b)t}`,
    /// so each time costs `O(d^2)`.
    pub fn schrodinger_expectations(
        &self,
        rho_eig: &DenseOperator,
        w_eig: &DenseOperator,
        times: &[f64],
    ) -> Vec<C64> {
        let d = self.dim();
        // weights[a][b] = rho_ab W_ba
        let mut weights = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                weights.push(rho_eig.get(a, b) * w_eig.get(b, a));
            }
        }
        times
            .iter()
            .map(|&t| {
                let p = self.phases(t);
                let mut total = C64::zero();
                for a in 0..d {
                    let row = &weights[a * d..(a + 1) * d];
                    let inner = row
                        .iter()
                        .zip(&p)
                        .fold(C64::zero(), |acc, (w, pb)| acc + w * pb.conj());
                    total += p[a] * inner;
                }
                total
            })
            .collect()
    }
}

/// `U^dagger W U`.
pub fn heisenberg_evolve(w: &DenseOperator, u: &DenseOperator) -> Result<DenseOperator> {
    if w.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: u.dim(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::Invalid(alloc::format!(
            "evolution operator is not unitary (defect {defect:e})"
        )));
    }
    w.sandwich(&u.adjoint(), u)
}

/// Permutation operator `P` with `P A_i P^dagger = A_{perm[i]}` for any
/// single-site operator `A_i`: the content of site `i` moves to `perm[i]`.
pub fn site_permutation(n_sites: usize, perm: &[usize]) -> Result<DenseOperator> {
    if perm.len() != n_sites {
        return Err(Error::DimensionMismatch {
            left: n_sites,
            right: perm.len(),
        });
    }
    let mut seen = alloc::vec![false; n_sites];
    for &p in perm {
        if p >= n_sites || core::mem::replace(&mut seen[p], true) {
            return Err(Error::Invalid(alloc::format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    check_dense_sites(n_sites, DEFAULT_MAX_DENSE_SITES)?;
    let dim = 1usize << n_sites;
    let mut out = DenseOperator::zeros(dim);
    for state in 0..dim {
        let mut image = 0;
        for (i, &target) in perm.iter().enumerate() {
            if state & site_bit(n_sites, i) != 0 {
                image |= site_bit(n_sites, target);
            }
        }
        out.set(image, state, C64::new(1.0, 0.0));
    }
    Ok(out)
}

/// Mirror about the chain centre, `i -> n - 1 - i`.
pub fn reflection_operator(n_sites: usize) -> Result<DenseOperator> {
    let perm: Vec<usize> = (0..n_sites).map(|i| n_sites - 1 - i).collect();
    site_permutation(n_sites, &perm)
}

/// `T_l` with `T_l^dagger A_i T_l = A_{(i + l) mod n}`.
pub fn translation_operator(n_sites: usize, l: usize) -> Result<DenseOperator> {
    let perm: Vec<usize> = (0..n_sites).map(|i| (i + l) % n_sites).collect();
    Ok(site_permutation(n_sites, &perm)?.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::paulis;
    use crate::pauli::to_dense;
    use crate::PauliString;
    use core::f64::consts::PI;

    fn close(a: &DenseOperator, b: &DenseOperator, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn two_site_transverse_field() {
        let h = build_hamiltonian(&HamiltonianSpec::ising(2, 0.0)).unwrap();
        let zz = paulis::z().kron(&paulis::z());
        let xi = paulis::x().kron(&paulis::identity());
        let ix = paulis::identity().kron(&paulis::x());
        assert!(close(&h, &(&(&zz + &xi) + &ix), 1e-15));
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn pure_coupling_is_diagonal() {
        for theta in [0.0, 0.3, FRAC_PI_2] {
            let spec = HamiltonianSpec {
                b: 0.0,
                ..HamiltonianSpec::ising(2, theta)
            };
            let h = build_hamiltonian(&spec).unwrap();
            let expect: Vec<C64> = [1.0, -1.0, -1.0, 1.0]
                .iter()
                .map(|&v| C64::new(v, 0.0))
                .collect();
            assert!(close(&h, &DenseOperator::diagonal(&expect), 0.0));
        }
    }

    #[test]
    fn spec_validation() {
        assert!(HamiltonianSpec::ising(1, 0.0).validate().is_err());
        assert!(HamiltonianSpec::ising(4, -0.1).validate().is_err());
        assert!(HamiltonianSpec::ising(4, 2.0 * PI).validate().is_err());
        assert!(HamiltonianSpec::ising(13, 0.0)
            .validate()
            .unwrap_err()
            .is_resource_gate());
        assert!(HamiltonianSpec::ising(4, FRAC_PI_2).validate().is_ok());
    }

    #[test]
    fn periodic_adds_wrapping_bond() {
        let open = build_hamiltonian(&HamiltonianSpec::ising(3, 0.2)).unwrap();
        let periodic =
            build_hamiltonian(&HamiltonianSpec::ising(3, 0.2).with_boundary(Boundary::Periodic))
                .unwrap();
        let wrap = to_dense(&"ZIZ".parse::<PauliString>().unwrap(), false).unwrap();
        assert!(close(&(&periodic - &open), &wrap, 1e-15));
    }

    #[test]
    fn single_qubit_spectra() {
        let cz = diagonalize(&paulis::z()).unwrap();
        assert_eq!(cz.eigenvalues(), &[-1.0, 1.0]);
        let cx = diagonalize(&paulis::x()).unwrap();
        assert!((cx.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((cx.eigenvalues()[1] - 1.0).abs() < 1e-14);
        // Hadamard-like columns: equal-magnitude entries
        for r in 0..2 {
            for c in 0..2 {
                assert!((cx.eigenvectors().get(r, c).norm() - Float::sqrt(0.5)).abs() < 1e-14);
            }
        }
        let bad = DenseOperator::from_fn(2, |r, c| C64::new((r + 2 * c) as f64, 0.0));
        assert!(matches!(diagonalize(&bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(5, PI / 6.0)).unwrap();
        let h = build_hamiltonian(cache.spec().unwrap()).unwrap();
        assert!(close(&cache.reconstruct(), &h, 1e-10 * h.max_abs()));
        assert!(close(
            &cache.evolve_unitary(0.0),
            &DenseOperator::identity(32),
            1e-12
        ));
        for t in [0.3, 1.7, 12.0] {
            let u = cache.evolve_unitary(t);
            assert!(u.unitarity_defect() < 1e-10);
            assert!(close(
                &(&u * &cache.evolve_unitary(-t)),
                &DenseOperator::identity(32),
                1e-10
            ));
        }
    }

    #[test]
    fn heisenberg_matches_direct_sandwich() {
        let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(3, 0.4)).unwrap();
        let w = to_dense(&"IYI".parse::<PauliString>().unwrap(), false).unwrap();
        let w_eig = cache.to_eigenbasis(&w);
        for t in [0.0, 0.9, 3.3] {
            let direct = heisenberg_evolve(&w, &cache.evolve_unitary(t)).unwrap();
            assert!(close(&direct, &cache.heisenberg_at(&w_eig, t), 1e-12));
            assert!(direct.is_hermitian(1e-12));
            assert!((direct.hs_norm_sqr() - 8.0).abs() < 1e-10);
        }
        assert!(close(
            &heisenberg_evolve(&w, &DenseOperator::identity(8)).unwrap(),
            &w,
            0.0
        ));
        assert!(heisenberg_evolve(&w, &DenseOperator::identity(4)).is_err());
        assert!(heisenberg_evolve(&w, &DenseOperator::identity(8).scale_real(2.0)).is_err());
    }

    #[test]
    fn schrodinger_matches_heisenberg() {
        let cache = EvolutionCache::from_spec(&HamiltonianSpec::ising(3, 0.7)).unwrap();
        let w = to_dense(&"XIZ".parse::<PauliString>().unwrap(), false).unwrap();
        let rho = DenseOperator::from_fn(8, |r, c| {
            if r == c {
                C64::new(0.125 + 0.01 * (r as f64 - 3.5), 0.0)
            } else {
                C64::new(0.01, 0.002 * (r as f64 - c as f64))
            }
        });
        let times = [0.0, 0.5, 2.0];
        let s = cache.schrodinger_expectations(
            &cache.to_eigenbasis(&rho),
            &cache.to_eigenbasis(&w),
            &times,
        );
        for (&t, got) in times.iter().zip(&s) {
            let wt = heisenberg_evolve(&w, &cache.evolve_unitary(t)).unwrap();
            let expect = crate::operator::trace_product(&rho, &wt).unwrap();
            assert!((got - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn permutation_operators() {
        let n = 4;
        let t1 = translation_operator(n, 1).unwrap();
        let a0 = to_dense(&"XIII".parse::<PauliString>().unwrap(), false).unwrap();
        let a1 = to_dense(&"IXII".parse::<PauliString>().unwrap(), false).unwrap();
        assert!(close(&a0.sandwich(&t1.adjoint(), &t1).unwrap(), &a1, 0.0));
        let r = reflection_operator(n).unwrap();
        let a3 = to_dense(&"IIIX".parse::<PauliString>().unwrap(), false).unwrap();
        assert!(close(&a0.sandwich(&r, &r.adjoint()).unwrap(), &a3, 0.0));
        assert!(site_permutation(3, &[0, 0, 1]).is_err());
    }
}
