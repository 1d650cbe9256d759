//! Uniform grids over intervals and over the probability simplex.

use crate::error::{Error, Result};

/// Number of panels of width (close to) `step` covering `[low, high]`.
///
/// When `(high - low) / step` is within 1e-9 of an integer that integer is
/// used, so grids such as `[0, 1]` at step `0.005` land exactly on 201 nodes.
pub fn panel_count(low: f64, high: f64, step: f64) -> Result<usize> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::domain(format!("grid step must be positive, got {step}")));
    }
    if !(high >= low) || !low.is_finite() || !high.is_finite() {
        return Err(Error::domain(format!("invalid grid interval [{low}, {high}]")));
    }
    let ratio = (high - low) / step;
    let rounded = ratio.round();
    let panels = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded
    } else {
        ratio.ceil()
    };
    Ok(panels as usize)
}

/// Nodes `low + i * (high - low) / panels`, with the last node pinned to `high`.
pub fn interval_nodes(low: f64, high: f64, step: f64) -> Result<Vec<f64>> {
    let panels = panel_count(low, high, step)?;
    if panels == 0 {
        return Ok(vec![low]);
    }
    let width = (high - low) / panels as f64;
    Ok((0..=panels)
        .map(|i| if i == panels { high } else { low + i as f64 * width })
        .collect())
}

/// Grid over the free coordinates `p_1..p_n` of the simplex, `Σ p_i ≤ 1`.
///
/// Points are listed in lexicographic order of their integer coordinates.
pub fn simplex_points(n: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::domain("simplex dimension must be at least 1"));
    }
    let resolution = panel_count(0.0, 1.0, step)?;
    let mut out = Vec::new();
    let mut counts = vec![0usize; n];
    simplex_recurse(0, resolution, &mut counts, resolution, &mut out);
    Ok(out)
}

fn simplex_recurse(
    dim: usize,
    remaining: usize,
    counts: &mut Vec<usize>,
    resolution: usize,
    out: &mut Vec<Vec<f64>>,
) {
    if dim == counts.len() {
        out.push(
            counts
                .iter()
                .map(|&c| c as f64 / resolution as f64)
                .collect(),
        );
        return;
    }
    for c in 0..=remaining {
        counts[dim] = c;
        simplex_recurse(dim + 1, remaining - c, counts, resolution, out);
    }
}
