//! Multi-body Pauli strings stored as a pair of bitmasks.
//!
//! Site `i` (0-based, leftmost in labels and most significant in Kronecker
//! products) lives at bit `n_sites - 1 - i` of both masks, so a mask can be
//! XORed directly onto a computational-basis index. A site carries `X` when
//! only its x-bit is set, `Z` when only its z-bit is set, `Y` when both are.
//!
//! Strings carry no global phase. The dense matrix of a string is
//! `i^{|x & z|} X^x Z^z`, which reproduces `Y = iXZ` on every `Y` site.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{Float, Zero};

use crate::operator::DenseOperator;
use crate::{Error, Result, C64, DEFAULT_MAX_DENSE_SITES};

/// Largest chain supported by the 64-bit masks.
pub const MAX_SITES: usize = 64;

/// Single-site letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Non-identity letters in canonical order.
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn new(n_sites: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::out_of_range("n_sites", n_sites as f64, "1..=64"));
        }
        let valid = full_mask(n_sites);
        if (x_mask | z_mask) & !valid != 0 {
            return Err(Error::Invalid(alloc::format!(
                "mask bits beyond {n_sites} sites"
            )));
        }
        Ok(Self {
            n_sites,
            x_mask,
            z_mask,
        })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 0, 0)
    }

    /// A single letter on `site`, identity elsewhere.
    pub fn single(n_sites: usize, site: usize, letter: Pauli) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::out_of_range("site", site as f64, "0..n_sites"));
        }
        let mut p = Self::identity(n_sites)?;
        p.set(site, letter);
        Ok(p)
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        let mut p = Self::identity(letters.len())?;
        for (i, &l) in letters.iter().enumerate() {
            p.set(i, l);
        }
        Ok(p)
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    #[inline]
    fn bit(&self, site: usize) -> u64 {
        1 << (self.n_sites - 1 - site)
    }

    pub fn letter(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        Pauli::from_bits(self.x_mask & b != 0, self.z_mask & b != 0)
    }

    fn set(&mut self, site: usize, letter: Pauli) {
        let b = self.bit(site);
        let (x, z) = letter.bits();
        self.x_mask = (self.x_mask & !b) | if x { b } else { 0 };
        self.z_mask = (self.z_mask & !b) | if z { b } else { 0 };
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_sites)
            .filter(|&i| self.letter(i) != Pauli::I)
            .collect()
    }

    /// Site-reversed string (site `i` moves to `n - 1 - i`).
    pub fn reversed(&self) -> Self {
        let mut out = Self::identity(self.n_sites).expect("valid size");
        for i in 0..self.n_sites {
            out.set(self.n_sites - 1 - i, self.letter(i));
        }
        out
    }

    /// Cyclic shift moving the letter on site `i` to site `(i + l) mod n`.
    pub fn shifted(&self, l: usize) -> Self {
        let mut out = Self::identity(self.n_sites).expect("valid size");
        for i in 0..self.n_sites {
            out.set((i + l) % self.n_sites, self.letter(i));
        }
        out
    }

    /// Global phase `i^{|x & z|}` of the dense matrix relative to `X^x Z^z`.
    fn y_phase(&self) -> C64 {
        i_pow((self.x_mask & self.z_mask).count_ones())
    }
}

/// Operator size: the number of non-identity sites.
pub fn weight(p: &PauliString) -> usize {
    (p.x_mask | p.z_mask).count_ones() as usize
}

fn full_mask(n_sites: usize) -> u64 {
    if n_sites == 64 {
        u64::MAX
    } else {
        (1u64 << n_sites) - 1
    }
}

fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

#[inline]
fn parity(v: u64) -> f64 {
    if v.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn check_dense_sites(n_sites: usize, limit: usize) -> Result<()> {
    if n_sites > limit {
        return Err(Error::ResourceGate {
            what: "dense operator sites",
            requested: n_sites,
            limit,
        });
    }
    Ok(())
}

/// Dense matrix of `p`, divided by `sqrt(2^N)` when `normalized` so that its
/// Hilbert-Schmidt norm is 1. Refuses chains above
/// [`DEFAULT_MAX_DENSE_SITES`].
pub fn to_dense(p: &PauliString, normalized: bool) -> Result<DenseOperator> {
    to_dense_with_limit(p, normalized, DEFAULT_MAX_DENSE_SITES)
}

pub fn to_dense_with_limit(
    p: &PauliString,
    normalized: bool,
    max_sites: usize,
) -> Result<DenseOperator> {
    check_dense_sites(p.n_sites, max_sites)?;
    let dim = 1usize << p.n_sites;
    let scale = if normalized {
        1.0 / Float::sqrt(dim as f64)
    } else {
        1.0
    };
    let phase = p.y_phase() * scale;
    let mut out = DenseOperator::zeros(dim);
    for col in 0..dim {
        let row = col ^ p.x_mask as usize;
        out.set(row, col, phase * parity(p.z_mask & col as u64));
    }
    Ok(out)
}

/// Number of strings of weight `k` on `n` sites: `C(n,k) 3^k`.
pub fn size_class_len(n: usize, k: usize) -> u64 {
    binomial(n, k) * 3u64.pow(k as u32)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // rightmost index that can still advance
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every string of weight `k` on `n` sites, in canonical order: supports in
/// lexicographic order of their site lists, and within a support the letters
/// counted like an odometer over `X < Y < Z` with the leftmost site slowest.
pub fn enumerate_size_class(n: usize, k: usize) -> Result<Vec<PauliString>> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::out_of_range("n_sites", n as f64, "1..=64"));
    }
    if k > n {
        return Err(Error::out_of_range("k", k as f64, "0..=n"));
    }
    let mut out = Vec::with_capacity(size_class_len(n, k) as usize);
    for sites in combinations(n, k) {
        let total = 3usize.pow(k as u32);
        for code in 0..total {
            let mut p = PauliString::identity(n)?;
            let mut rem = code;
            for pos in (0..k).rev() {
                p.set(sites[pos], Pauli::NON_IDENTITY[rem % 3]);
                rem /= 3;
            }
            out.push(p);
        }
    }
    Ok(out)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_sites {
            write!(f, "{}", self.letter(i).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses a label such as `"IYIIII"`, site 0 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "Pauli label",
            input: String::from(s),
        };
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() || letters.len() > MAX_SITES {
            return Err(bad());
        }
        Self::from_letters(&letters)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coefficients of `m` on the normalized Pauli basis,
/// `f[P] = Tr[P^dagger m] / sqrt(2^N)`, for every string at once.
///
/// The result is indexed by `(x_mask << N) | z_mask`. For each `x` the column
/// `u[c] = m[c ^ x, c]` is Walsh-Hadamard transformed over `c`, giving all
/// `z` in `O(d log d)`; the whole sweep is `O(d^2 N)`.
pub fn pauli_transform(m: &DenseOperator, n_sites: usize) -> Result<Vec<C64>> {
    let dim = 1usize << n_sites;
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: m.dim(),
        });
    }
    let scale = 1.0 / Float::sqrt(dim as f64);
    let mut out = alloc::vec![C64::zero(); dim * dim];
    let mut u = alloc::vec![C64::zero(); dim];
    for x in 0..dim {
        for (c, slot) in u.iter_mut().enumerate() {
            *slot = m.get(c ^ x, c);
        }
        walsh_hadamard(&mut u);
        for z in 0..dim {
            let phase = i_pow(((x & z) as u64).count_ones()).conj();
            out[(x << n_sites) | z] = u[z] * phase * scale;
        }
    }
    Ok(out)
}

/// Index of `p` in the output of [`pauli_transform`].
pub fn transform_index(p: &PauliString) -> usize {
    ((p.x_mask as usize) << p.n_sites) | p.z_mask as usize
}

/// Weight of the string at transform index `idx`.
pub fn transform_weight(idx: usize, n_sites: usize) -> usize {
    let x = idx >> n_sites;
    let z = idx & ((1 << n_sites) - 1);
    (x | z).count_ones() as usize
}

/// In-place unnormalized transform `v[z] <- sum_c (-1)^{z.c} v[c]`.
fn walsh_hadamard(v: &mut [C64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}
