//! Index arithmetic for volumes and the 3D discrete Fourier basis.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Extent of a three-dimensional array. The first axis varies fastest, so the
/// linear index of `(m, n, p)` is `m + M*n + M*N*p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims3 {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl Dims3 {
    pub const fn new(m: usize, n: usize, p: usize) -> Self {
        Self { m, n, p }
    }

    #[inline]
    pub const fn len(&self) -> usize {
        self.m * self.n * self.p
    }

    #[inline]
    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub const fn index(&self, m: usize, n: usize, p: usize) -> usize {
        m + self.m * (n + self.n * p)
    }

    #[inline]
    pub const fn coords(&self, index: usize) -> (usize, usize, usize) {
        (index % self.m, (index / self.m) % self.n, index / (self.m * self.n))
    }

    /// True when every axis of `self` is at least as long as in `other`.
    pub fn contains(&self, other: &Dims3) -> bool {
        self.m >= other.m && self.n >= other.n && self.p >= other.p
    }
}

impl std::fmt::Display for Dims3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.p)
    }
}

/// The 3D DFT basis `exp(2πi(k_m m/M + k_n n/N + k_p p/P))` on a frequency
/// grid of the given size. Volumes smaller than the grid are embedded at the
/// origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    pub grid: Dims3,
}

impl BasisSpec {
    pub const fn new(grid: Dims3) -> Self {
        Self { grid }
    }

    /// Number of basis functions.
    #[inline]
    pub const fn len(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub const fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Linear index of the conjugate (mirrored) frequency.
    #[inline]
    pub fn mirror(&self, k: usize) -> usize {
        let g = self.grid;
        let (a, b, c) = g.coords(k);
        g.index((g.m - a) % g.m, (g.n - b) % g.n, (g.p - c) % g.p)
    }

    /// Frequencies that are their own mirror (DC and Nyquist-type bins).
    #[inline]
    pub fn is_self_paired(&self, k: usize) -> bool {
        self.mirror(k) == k
    }

    /// Number of members of the conjugate pair represented by `k`: 1 for
    /// self-paired bins, 2 when `k` is the lower index of a proper pair and
    /// 0 for the upper member, which is represented by its mirror.
    pub fn pair_multiplicity(&self, k: usize) -> u8 {
        let mirror = self.mirror(k);
        match k.cmp(&mirror) {
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 2,
            std::cmp::Ordering::Greater => 0,
        }
    }

    /// Multiplicity table for every frequency, see [`BasisSpec::pair_multiplicity`].
    pub fn multiplicities(&self) -> Vec<u8> {
        (0..self.len()).map(|k| self.pair_multiplicity(k)).collect()
    }

    /// Phase angle `2π(k·x)` of basis function `k` at volume position `(m, n, p)`.
    #[inline]
    pub fn phase(&self, k: usize, m: usize, n: usize, p: usize) -> f64 {
        let g = self.grid;
        let (a, b, c) = g.coords(k);
        // reduce each product modulo the axis length to keep the angle small
        let fm = ((a * m) % g.m) as f64 / g.m as f64;
        let fn_ = ((b * n) % g.n) as f64 / g.n as f64;
        let fp = ((c * p) % g.p) as f64 / g.p as f64;
        TAU * (fm + fn_ + fp)
    }

    /// Value of basis function `k` at `(m, n, p)`.
    #[inline]
    pub fn eval(&self, k: usize, m: usize, n: usize, p: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.phase(k, m, n, p))
    }
}
