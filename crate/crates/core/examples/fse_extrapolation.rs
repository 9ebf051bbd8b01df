//! Extrapolates a 16x16 hole in a textured frame from the frame itself and
//! from two static reference frames, then compares both against the truth.
//!
//! ```text
//! cargo run --release --example fse_extrapolation
//! ```

use mcfse::fse::{build_fixed_volume, build_weight_volume, extrapolate, generate_model, BasisSpec, FseParams};
use mcfse::loss::{LossBlock, LossMask};
use mcfse::store::FrameStore;
use mcfse::synthetic::{synthetic_planes, SyntheticSpec};

fn main() -> mcfse::Result<()> {
    let planes = synthetic_planes(&SyntheticSpec {
        width: 64,
        height: 64,
        frames: 3,
        max_frequency: 0.15,
        ..SyntheticSpec::default()
    });
    let block = LossBlock { x0: 24, y0: 24, width: 16, height: 16, frame: 2 };
    let mut mask = LossMask::all_received(64, 64, 3);
    mask.mark_block_lost(block.x0, block.y0, 16, 16, 2);
    let store = FrameStore::new(planes.clone(), &mask)?;
    let truth = |m: usize, n: usize| planes[2].get(block.x0 + m - 16, block.y0 + n - 16);

    for (label, prev) in [("spatial only", 0), ("with 2 references", 2)] {
        let vol = build_fixed_volume(&store, &block, 16, prev, 0);
        let params = FseParams::compensated();

        let weights = build_weight_volume(&vol, params.rho_hat, params.delta)?;
        let fit = generate_model(&vol.samples, &weights, &BasisSpec::new(params.grid), params.iterations, params.gamma)?;
        let last = fit.steps.last().map_or(fit.initial_energy, |s| s.energy);

        let (region, values) = extrapolate(&vol, &params)?;
        let mse = region
            .iter()
            .zip(&values)
            .map(|(&(m, n, _), v)| (v - truth(m, n)).powi(2))
            .sum::<f64>()
            / values.len() as f64;
        println!(
            "{label:>18}: volume {}, {} coefficients, residual {:.1} -> {:.3}, hole mse {mse:.3}",
            vol.dims,
            fit.model.len(),
            fit.initial_energy,
            last
        );
    }
    Ok(())
}
