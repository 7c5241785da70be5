//! Random grid-function families used by the verification suites:
//! sums of a few scaled bumps with random centers and widths, plus
//! piecewise-linear tents, all vanishing at the domain boundary so they can
//! carry the Dirichlet-complement flag.

use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{BoxDomain, GridFunction, Point};
use crate::rng;

fn bump(center: f64, width: f64, x: f64) -> f64 {
    let z = (x - center) / width;
    if z.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - z * z).powi(2)
    }
}

fn tent(center: f64, width: f64, x: f64) -> f64 {
    (1.0 - ((x - center) / width).abs()).max(0.0)
}

/// One random function: 1-5 bumps or tents, amplitudes in [-1, 1] scaled by
/// `amplitude`, clamped to vanish on the boundary.
pub fn random_function(
    domain: &BoxDomain,
    rng: &mut ChaCha8Rng,
    amplitude: f64,
) -> Result<GridFunction> {
    let terms = 1 + rng::range(rng, 5);
    let mut parts: Vec<(bool, [f64; 2], [f64; 2], f64)> = Vec::with_capacity(terms);
    for _ in 0..terms {
        let use_tent = rng::unit(rng) < 0.3;
        let mut center = [0.0; 2];
        let mut width = [1.0; 2];
        for ax in 0..domain.dim() {
            let lo = domain.lower()[ax];
            let hi = domain.upper()[ax];
            let side = hi - lo;
            center[ax] = rng::uniform(rng, lo + 0.15 * side, hi - 0.15 * side);
            width[ax] = rng::uniform(rng, 0.08 * side, 0.35 * side);
        }
        let amp = rng::uniform(rng, -1.0, 1.0) * amplitude;
        parts.push((use_tent, center, width, amp));
    }
    let eval = |p: Point| -> f64 {
        let mut v = 0.0;
        for (use_tent, center, width, amp) in &parts {
            let mut w = *amp;
            for ax in 0..domain.dim() {
                w *= if *use_tent {
                    tent(center[ax], width[ax], p[ax])
                } else {
                    bump(center[ax], width[ax], p[ax])
                };
            }
            v += w;
        }
        v
    };
    GridFunction::from_fn(domain, eval)
}

/// Random function with the Dirichlet-complement flag set; resamples until
/// it is not identically zero.
pub fn random_dirichlet_function(
    domain: &BoxDomain,
    rng: &mut ChaCha8Rng,
    amplitude: f64,
) -> Result<GridFunction> {
    for _ in 0..64 {
        let g = random_function(domain, rng, amplitude)?.with_zero_outside();
        if g.max_abs() > 1e-8 * amplitude.abs().max(1e-8) {
            return Ok(g);
        }
    }
    // All-zero draws 64 times in a row cannot happen with the generators
    // above; keep a deterministic fallback anyway.
    let mid: Vec<f64> = (0..domain.node_count())
        .map(|i| {
            let p = domain.node_coord(i);
            let mut v = amplitude;
            for ax in 0..domain.dim() {
                let lo = domain.lower()[ax];
                let hi = domain.upper()[ax];
                v *= (p[ax] - lo) * (hi - p[ax]) / (hi - lo) / (hi - lo) * 4.0;
            }
            v
        })
        .collect();
    Ok(GridFunction::from_values(domain, mid)?.with_zero_outside())
}
