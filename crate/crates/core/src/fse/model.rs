//! Sparse Fourier signal models and their evaluation.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::fft3;
use super::grid::{BasisSpec, Dims3};

/// A weighted superposition of 3D DFT basis functions.
///
/// Coefficients are kept for both members of every selected conjugate pair,
/// so the model is real-valued.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseModel {
    pub basis: Option<BasisSpec>,
    pub coefficients: BTreeMap<usize, Complex64>,
}

impl SparseModel {
    pub fn new(basis: BasisSpec) -> Self {
        Self {
            basis: Some(basis),
            coefficients: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis.expect("model without basis")
    }

    /// Adds `increment` to coefficient `k` and its conjugate to the mirrored
    /// coefficient.
    pub fn add_pair(&mut self, k: usize, increment: Complex64) {
        let basis = self.basis();
        let mirror = basis.mirror(k);
        *self.coefficients.entry(k).or_default() += increment;
        if mirror != k {
            *self.coefficients.entry(mirror).or_default() += increment.conj();
        }
    }

    /// Number of selected frequencies.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coefficients.get(&k).copied().unwrap_or_default()
    }
}

/// Model values at the requested volume positions via one inverse FFT of the
/// coefficient grid. The imaginary residue of the conjugate pairs is dropped.
pub fn evaluate_model(model: &SparseModel, region: &[(usize, usize, usize)]) -> Vec<f64> {
    if model.is_empty() {
        return vec![0.0; region.len()];
    }
    let grid = model.basis().grid;
    let full = synthesize(model, grid);
    region
        .iter()
        .map(|&(m, n, p)| full[grid.index(m, n, p)].re)
        .collect()
}

/// Complex model values over the whole frequency grid.
pub fn synthesize(model: &SparseModel, grid: Dims3) -> Vec<Complex64> {
    let mut spectrum = vec![Complex64::default(); grid.len()];
    for (&k, &c) in &model.coefficients {
        spectrum[k] = c;
    }
    fft3::inverse_unnormalized(&mut spectrum, grid);
    spectrum
}

/// Model values by direct summation over the selected basis functions.
pub fn evaluate_model_direct(model: &SparseModel, region: &[(usize, usize, usize)]) -> Vec<Complex64> {
    let Some(basis) = model.basis else {
        return vec![Complex64::default(); region.len()];
    };
    region
        .iter()
        .map(|&(m, n, p)| {
            model
                .coefficients
                .iter()
                .map(|(&k, &c)| c * basis.eval(k, m, n, p))
                .sum()
        })
        .collect()
}

/// All positions of a volume in linear order.
pub fn full_region(dims: Dims3) -> Vec<(usize, usize, usize)> {
    (0..dims.len()).map(|i| dims.coords(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_is_zero() {
        let model = SparseModel::new(BasisSpec::new(Dims3::new(4, 4, 2)));
        let region = full_region(Dims3::new(4, 4, 2));
        assert!(evaluate_model(&model, &region).iter().all(|&v| v == 0.0));
        assert!(evaluate_model_direct(&SparseModel::default(), &region)
            .iter()
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn dc_model_is_constant() {
        let mut model = SparseModel::new(BasisSpec::new(Dims3::new(8, 8, 4)));
        model.add_pair(0, Complex64::new(100.0, 0.0));
        let region = full_region(Dims3::new(6, 5, 3));
        for v in evaluate_model(&model, &region) {
            assert!((v - 100.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pairs_give_real_models() {
        let basis = BasisSpec::new(Dims3::new(4, 4, 2));
        let mut model = SparseModel::new(basis);
        model.add_pair(5, Complex64::new(0.3, -1.2));
        model.add_pair(basis.grid.index(2, 0, 1), Complex64::new(0.7, 0.0));
        let region = full_region(basis.grid);
        for v in evaluate_model_direct(&model, &region) {
            assert!(v.im.abs() < 1e-12);
        }
        assert_eq!(model.len(), 3);
    }
}
