//! Iterative weighted basis selection with orthogonality deficiency
//! compensation.
//!
//! Every iteration projects the weighted residual onto all basis functions,
//! picks the conjugate pair whose projection removes the most weighted
//! residual energy, adds `gamma` times the projection to the model and
//! updates the residual accordingly. `gamma = 1` reproduces the
//! uncompensated model generation.
//!
//! Two implementations share this contract: the fast path keeps the
//! projection numerators in the Fourier domain and updates them with shifted
//! copies of the weight spectrum, while the direct path recomputes every
//! projection by explicit summation over the volume. The direct path exists
//! for verification and is only practical on small grids.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::fft3;
use super::grid::{BasisSpec, Dims3};
use super::model::SparseModel;
use super::volume::WeightVolume;

/// The basis function chosen in one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// Lower linear index of the selected conjugate pair.
    pub index: usize,
    pub mirror: usize,
    /// Weighted residual energy removed by the full projection of the pair.
    pub score: f64,
}

/// Record of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub index: usize,
    /// Projection value of the selected frequency.
    pub projection: Complex64,
    /// Amount added to the coefficient (`gamma * projection`).
    pub increment: Complex64,
    /// Weighted residual energy after the update.
    pub energy: f64,
}

/// Model plus per-iteration history.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub model: SparseModel,
    /// Weighted energy of the initial residual.
    pub initial_energy: f64,
    pub steps: Vec<Step>,
}

fn check_inputs(values: &[f64], weights: &WeightVolume, basis: &BasisSpec) -> Result<f64> {
    if values.len() != weights.dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples for a {} volume",
            values.len(),
            weights.dims
        )));
    }
    if !basis.grid.contains(&weights.dims) {
        return Err(Error::Parameter(format!(
            "volume {} does not fit into transform grid {}",
            weights.dims, basis.grid
        )));
    }
    let sum = weights.sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    Ok(sum)
}

fn weighted_energy(values: &[f64], weights: &WeightVolume) -> f64 {
    values.iter().zip(&weights.w).map(|(r, w)| w * r * r).sum()
}

/// Weighted projection of `residual` onto every basis function, computed
/// with one forward FFT of the weighted residual.
///
/// For the Fourier family every weighted basis norm equals the weight sum,
/// so each projection is the DFT bin divided by that sum.
pub fn weighted_projection(residual: &[f64], weights: &WeightVolume, basis: &BasisSpec) -> Result<Vec<Complex64>> {
    let sum = check_inputs(residual, weights, basis)?;
    let weighted: Vec<f64> = residual.iter().zip(&weights.w).map(|(r, w)| r * w).collect();
    let mut spectrum = fft3::embed_real(&weighted, weights.dims, basis.grid);
    fft3::forward(&mut spectrum, basis.grid);
    spectrum.iter_mut().for_each(|v| *v /= sum);
    Ok(spectrum)
}

/// Weighted projection by explicit summation over the volume.
pub fn weighted_projection_direct(
    residual: &[f64],
    weights: &WeightVolume,
    basis: &BasisSpec,
) -> Result<Vec<Complex64>> {
    check_inputs(residual, weights, basis)?;
    let d = weights.dims;
    let g = basis.grid;
    let twiddles = |len: usize, grid_len: usize| -> Vec<Vec<Complex64>> {
        (0..grid_len)
            .map(|k| {
                (0..len)
                    .map(|x| {
                        let phase = std::f64::consts::TAU * ((k * x) % grid_len) as f64 / grid_len as f64;
                        Complex64::from_polar(1.0, -phase)
                    })
                    .collect()
            })
            .collect()
    };
    let (tm, tn, tp) = (twiddles(d.m, g.m), twiddles(d.n, g.n), twiddles(d.p, g.p));
    let mut numerators = vec![Complex64::default(); g.len()];
    let mut denominators = vec![0.0; g.len()];
    for (k, (num, den)) in numerators.iter_mut().zip(denominators.iter_mut()).enumerate() {
        let (a, b, c) = g.coords(k);
        for p in 0..d.p {
            for n in 0..d.n {
                let outer = tn[b][n] * tp[c][p];
                for m in 0..d.m {
                    let i = d.index(m, n, p);
                    let w = weights.w[i];
                    if w == 0.0 {
                        continue;
                    }
                    let phi_conj = tm[a][m] * outer;
                    *num += w * residual[i] * phi_conj;
                    // |φ|² is 1 for the Fourier family; kept explicit
                    *den += w * phi_conj.norm_sqr();
                }
            }
        }
    }
    Ok(numerators
        .into_iter()
        .zip(denominators)
        .map(|(n, d)| n / d)
        .collect())
}

/// Picks the conjugate pair with the largest weighted energy reduction
/// `|p_k|² · φ_kᵀWφ_k`, summed over both members of a pair. Ties go to the
/// smaller linear index.
pub fn select_basis(projection: &[Complex64], weight_sum: f64, basis: &BasisSpec) -> Selection {
    let mut best = Selection {
        index: 0,
        mirror: 0,
        score: f64::NEG_INFINITY,
    };
    for (k, p) in projection.iter().enumerate() {
        let mult = basis.pair_multiplicity(k);
        if mult == 0 {
            continue;
        }
        let score = f64::from(mult) * p.norm_sqr() * weight_sum;
        if score > best.score {
            best = Selection {
                index: k,
                mirror: basis.mirror(k),
                score,
            };
        }
    }
    best
}

/// Coefficient increment for the selected pair; self-paired frequencies
/// carry a real projection.
#[inline]
fn pair_projection(p: Complex64, self_paired: bool) -> Complex64 {
    if self_paired {
        Complex64::new(p.re, 0.0)
    } else {
        p
    }
}

/// Builds the sparse model with the fast Fourier-domain update.
pub fn generate_model(
    values: &[f64],
    weights: &WeightVolume,
    basis: &BasisSpec,
    iterations: usize,
    gamma: f64,
) -> Result<ModelFit> {
    check_gamma(gamma, iterations)?;
    let sum = check_inputs(values, weights, basis)?;
    let g = basis.grid;

    let mut weight_spectrum = fft3::embed_real(&weights.w, weights.dims, g);
    fft3::forward(&mut weight_spectrum, g);
    let weighted: Vec<f64> = values.iter().zip(&weights.w).map(|(f, w)| f * w).collect();
    let mut residual_spectrum = fft3::embed_real(&weighted, weights.dims, g);
    fft3::forward(&mut residual_spectrum, g);

    let multiplicity = basis.multiplicities();
    let initial_energy = weighted_energy(values, weights);
    let mut energy = initial_energy;
    let mut model = SparseModel::new(*basis);
    let mut steps = Vec::with_capacity(iterations);

    let mut selected = argmax_pair(&residual_spectrum, &multiplicity);
    for _ in 0..iterations {
        let u = selected;
        let mirror = basis.mirror(u);
        let self_paired = mirror == u;
        let p = pair_projection(residual_spectrum[u] / sum, self_paired);
        let increment = gamma * p;
        model.add_pair(u, increment);

        let (um, un, up) = g.coords(u);
        if self_paired {
            // E' = E - (2γ - γ²) p² S
            energy -= (2.0 * gamma - gamma * gamma) * p.re * p.re * sum;
        } else {
            // Σ w φ_u² equals the weight spectrum at -2u
            let w2 = weight_spectrum[g.index((2 * (g.m - um)) % g.m, (2 * (g.n - un)) % g.n, (2 * (g.p - up)) % g.p)];
            let cross = (p * p * w2).re;
            energy += -4.0 * gamma * p.norm_sqr() * sum + gamma * gamma * (2.0 * p.norm_sqr() * sum + 2.0 * cross);
        }
        steps.push(Step {
            index: u,
            projection: p,
            increment,
            energy,
        });

        selected = update_and_select(
            &mut residual_spectrum,
            &weight_spectrum,
            &multiplicity,
            g,
            (um, un, up),
            increment,
            self_paired,
        );
    }

    Ok(ModelFit {
        model,
        initial_energy,
        steps,
    })
}

fn check_gamma(gamma: f64, iterations: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Parameter(format!("compensation factor {gamma} outside (0, 1]")));
    }
    if iterations == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    Ok(())
}

fn argmax_pair(spectrum: &[Complex64], multiplicity: &[u8]) -> usize {
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, (v, &mult)) in spectrum.iter().zip(multiplicity).enumerate() {
        if mult == 0 {
            continue;
        }
        let score = f64::from(mult) * v.norm_sqr();
        if score > best.0 {
            best = (score, k);
        }
    }
    best.1
}

/// Subtracts the weighted contribution of the updated pair from the residual
/// spectrum and returns the next selection in the same pass.
///
/// With `R = DFT(w·r)` and `W = DFT(w)`, subtracting `c·φ_u + c̄·φ_{-u}` from
/// the residual changes `R[k]` by `-(c·W[k-u] + c̄·W[k+u])`.
fn update_and_select(
    residual: &mut [Complex64],
    weight: &[Complex64],
    multiplicity: &[u8],
    g: Dims3,
    (um, un, up): (usize, usize, usize),
    c: Complex64,
    self_paired: bool,
) -> usize {
    let c_conj = c.conj();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for kp in 0..g.p {
        let pm = (kp + g.p - up) % g.p;
        let pp = (kp + up) % g.p;
        for kn in 0..g.n {
            let nm = (kn + g.n - un) % g.n;
            let np = (kn + un) % g.n;
            let row = g.index(0, kn, kp);
            let minus_row = &weight[g.index(0, nm, pm)..g.index(0, nm, pm) + g.m];
            let plus_row = &weight[g.index(0, np, pp)..g.index(0, np, pp) + g.m];
            let out = &mut residual[row..row + g.m];
            let mult = &multiplicity[row..row + g.m];
            for km in 0..g.m {
                let mut jm = km + g.m - um;
                if jm >= g.m {
                    jm -= g.m;
                }
                let mut delta = c * minus_row[jm];
                if !self_paired {
                    let mut jp = km + um;
                    if jp >= g.m {
                        jp -= g.m;
                    }
                    delta += c_conj * plus_row[jp];
                }
                let v = out[km] - delta;
                out[km] = v;
                let mk = mult[km];
                if mk != 0 {
                    let score = f64::from(mk) * v.norm_sqr();
                    if score > best.0 {
                        best = (score, row + km);
                    }
                }
            }
        }
    }
    best.1
}

/// Explicit state of the direct model generation.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub residual: Vec<f64>,
    pub iteration: usize,
    pub gamma: f64,
    pub max_iterations: usize,
}

/// Builds the sparse model by recomputing every projection with direct
/// summation and updating the residual in the signal domain.
pub fn generate_model_direct(
    values: &[f64],
    weights: &WeightVolume,
    basis: &BasisSpec,
    iterations: usize,
    gamma: f64,
) -> Result<ModelFit> {
    check_gamma(gamma, iterations)?;
    let sum = check_inputs(values, weights, basis)?;
    let d = weights.dims;
    let mut state = IterationState {
        residual: values.to_vec(),
        iteration: 0,
        gamma,
        max_iterations: iterations,
    };
    let initial_energy = weighted_energy(values, weights);
    let mut model = SparseModel::new(*basis);
    let mut steps = Vec::with_capacity(iterations);
    while state.iteration < state.max_iterations {
        let projection = weighted_projection_direct(&state.residual, weights, basis)?;
        let sel = select_basis(&projection, sum, basis);
        let self_paired = sel.index == sel.mirror;
        let p = pair_projection(projection[sel.index], self_paired);
        let increment = state.gamma * p;
        model.add_pair(sel.index, increment);
        for (i, r) in state.residual.iter_mut().enumerate() {
            let (m, n, pp) = d.coords(i);
            let phi = basis.eval(sel.index, m, n, pp);
            let contribution = if self_paired {
                (increment * phi).re
            } else {
                2.0 * (increment * phi).re
            };
            *r -= contribution;
        }
        state.iteration += 1;
        steps.push(Step {
            index: sel.index,
            projection: p,
            increment,
            energy: weighted_energy(&state.residual, weights),
        });
    }
    Ok(ModelFit {
        model,
        initial_energy,
        steps,
    })
}
