//! Direct inversion: the topological derivative of the transported-amplitude
//! misfit, its scan over a probe grid, and level-set extraction.
//!
//! For a probe point `z`, let `r = a0(., z) - A1` be the zero-order misfit
//! against the measured second-line amplitudes. The derivative of the misfit
//! norm with respect to the probe radius is
//!
//! ```text
//! d(z) = <r, a1(., z)> / ||r||,
//! ```
//!
//! so strongly negative values mark points where nucleating a small disk
//! improves the fit fastest. Norms and inner products are weighted discrete
//! L2 sums over the second-line receivers with trapezoid weights; masked
//! receivers drop out of both. A floor on the denominator keeps the map
//! total where the zero-order misfit vanishes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::transport::{build_kernel, TransportKernel};
use crate::types::{GridSpec, Line, MeasurementGeometry, Point2};

/// Scan-time options.
#[derive(Debug, Clone, Copy, Default)]
pub struct ImagingOptions {
    /// Denominator floor; `None` selects `1e-12 * max(A1)`.
    pub tau: Option<f64>,
    /// Divide `d(z)` by `sqrt(active_fraction)` to compensate aperture loss
    /// near the region-of-interest edges.
    pub normalize_coverage: bool,
}

/// One topological-derivative evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TdEval {
    pub value: f64,
    /// Whether the denominator floor was active.
    pub floored: bool,
}

/// Sampled map of `z -> d(z)` over a grid, row-major with the first axis
/// fastest: `index = ix + nx * iy`.
#[derive(Debug, Clone)]
pub struct DerivativeMap {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub active_fraction: Vec<f64>,
    /// Number of nodes where the denominator floor fired.
    pub floor_hits: usize,
}

impl DerivativeMap {
    /// Grid node of the most negative value.
    pub fn argmin(&self) -> (usize, usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v < best.1 {
                best = (i, v);
            }
        }
        (best.0 % self.grid.nx, best.0 / self.grid.nx, best.1)
    }
}

/// Level-set mask and marching-squares contour of a derivative map.
#[derive(Debug, Clone)]
pub struct LevelSet {
    pub level: f64,
    /// Per-node flag `d(z) <= level`, same layout as the map.
    pub mask: Vec<bool>,
    /// Contour segments; every endpoint lies on a grid cell edge crossed by
    /// the level.
    pub contour: Vec<(Point2, Point2)>,
}

/// Trapezoid quadrature weights on the receiver grid: spacing at interior
/// receivers, half at the two ends.
pub fn trapezoid_weights(geometry: &MeasurementGeometry) -> Vec<f64> {
    let delta = geometry.spacing();
    let n = geometry.n_receivers;
    (0..n)
        .map(|j| {
            if j == 0 || j == n - 1 {
                0.5 * delta
            } else {
                delta
            }
        })
        .collect()
}

fn second_line_amplitudes(kernel: &TransportKernel, set: &MeasurementSet) -> Result<Vec<f64>> {
    if set.geometry != kernel.geometry {
        return Err(Error::Data(
            "measurements do not share the kernel's receiver grid".to_string(),
        ));
    }
    Ok(set.amplitudes(Line::Gamma1))
}

fn masked_norm(kernel: &TransportKernel, weights: &[f64], values: &[f64]) -> f64 {
    let mut sum = 0.0;
    for j in 0..values.len() {
        if kernel.mask[j] {
            sum += weights[j] * values[j] * values[j];
        }
    }
    sum.sqrt()
}

fn coverage_error(kernel: &TransportKernel) -> Error {
    Error::Coverage(format!(
        "no unmasked receiver at probe point ({}, {})",
        kernel.z.x1, kernel.z.x2
    ))
}

/// Weighted misfit `||a0(., z) - A1||` over unmasked receivers.
pub fn misfit_zero_order(kernel: &TransportKernel, measurements: &MeasurementSet) -> Result<f64> {
    let a1_data = second_line_amplitudes(kernel, measurements)?;
    if !kernel.mask.iter().any(|&m| m) {
        return Err(coverage_error(kernel));
    }
    let weights = trapezoid_weights(&kernel.geometry);
    let residual: Vec<f64> = kernel.a0.iter().zip(&a1_data).map(|(a, b)| a - b).collect();
    Ok(masked_norm(kernel, &weights, &residual))
}

fn default_floor(a1_data: &[f64]) -> f64 {
    let max = a1_data.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    (1e-12 * max).max(f64::MIN_POSITIVE)
}

/// The topological derivative `d(z) = <a0 - A1, a1> / max(||a0 - A1||, tau)`.
pub fn topological_derivative(
    kernel: &TransportKernel,
    measurements: &MeasurementSet,
    tau: Option<f64>,
) -> Result<TdEval> {
    if let Some(t) = tau {
        if t <= 0.0 || t.is_nan() {
            return Err(Error::domain("tau", format!("must be > 0, got {t}")));
        }
    }
    let a1_data = second_line_amplitudes(kernel, measurements)?;
    if !kernel.mask.iter().any(|&m| m) {
        return Err(coverage_error(kernel));
    }
    let weights = trapezoid_weights(&kernel.geometry);
    let floor = tau.unwrap_or_else(|| default_floor(&a1_data));

    let mut inner = 0.0;
    let mut norm_sq = 0.0;
    for j in 0..a1_data.len() {
        if kernel.mask[j] {
            let r = kernel.a0[j] - a1_data[j];
            inner += weights[j] * r * kernel.a1[j];
            norm_sq += weights[j] * r * r;
        }
    }
    let norm = norm_sq.sqrt();
    let floored = norm < floor;
    Ok(TdEval {
        value: inner / norm.max(floor),
        floored,
    })
}

/// First-order expansion check.
#[derive(Debug, Clone)]
pub struct ExpansionCheck {
    /// Set when the zero-order misfit sits at the floor, making the
    /// expansion meaningless.
    pub degenerate: bool,
    /// `(eps, | ||(a0 + eps a1) - A1|| - (||a0 - A1|| + eps d) |)` pairs.
    pub pairs: Vec<(f64, f64)>,
}

/// Measures how far `||(a0 + eps a1) - A1||` deviates from its first-order
/// expansion, for each probe radius in `eps_list` (strictly decreasing).
pub fn expansion_check(
    kernel: &TransportKernel,
    measurements: &MeasurementSet,
    eps_list: &[f64],
) -> Result<ExpansionCheck> {
    for pair in eps_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::domain("eps_list", "must be strictly decreasing"));
        }
    }
    if eps_list.iter().any(|&e| e <= 0.0 || e.is_nan()) {
        return Err(Error::domain("eps_list", "entries must be > 0"));
    }
    let a1_data = second_line_amplitudes(kernel, measurements)?;
    if !kernel.mask.iter().any(|&m| m) {
        return Err(coverage_error(kernel));
    }
    let weights = trapezoid_weights(&kernel.geometry);

    let base = misfit_zero_order(kernel, measurements)?;
    if base < default_floor(&a1_data) {
        return Ok(ExpansionCheck {
            degenerate: true,
            pairs: Vec::new(),
        });
    }
    let d = topological_derivative(kernel, measurements, None)?.value;

    let pairs = eps_list
        .iter()
        .map(|&eps| {
            let perturbed: Vec<f64> = kernel
                .a0
                .iter()
                .zip(&kernel.a1)
                .zip(&a1_data)
                .map(|((a0, a1), b)| a0 + eps * a1 - b)
                .collect();
            let norm = masked_norm(kernel, &weights, &perturbed);
            (eps, (norm - (base + eps * d)).abs())
        })
        .collect();

    Ok(ExpansionCheck {
        degenerate: false,
        pairs,
    })
}

/// Evaluates `d(z)` at every grid node. Nodes with no aperture coverage get
/// value 0 and active fraction 0; floor hits are counted. Per-node work is
/// parallel, per-node reductions run in receiver order, so the map is
/// bitwise reproducible.
pub fn scan_grid(
    grid: &GridSpec,
    measurements: &MeasurementSet,
    options: &ImagingOptions,
) -> Result<DerivativeMap> {
    grid.validate_against(&measurements.geometry)?;
    // Fix the floor once for the whole scan.
    let tau = match options.tau {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::domain("tau", format!("must be > 0, got {t}"))),
        None => default_floor(&measurements.amplitudes(Line::Gamma1)),
    };

    let nodes: Vec<(f64, f64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let z = grid.node(idx % grid.nx, idx / grid.nx);
            let kernel = build_kernel(z, measurements, &measurements.geometry)?;
            if !kernel.mask.iter().any(|&m| m) {
                return Ok((0.0, 0.0, false));
            }
            let eval = topological_derivative(&kernel, measurements, Some(tau))?;
            let fraction = kernel.active_fraction();
            let value = if options.normalize_coverage {
                eval.value / fraction.sqrt()
            } else {
                eval.value
            };
            Ok((value, fraction, eval.floored))
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(nodes.len());
    let mut active_fraction = Vec::with_capacity(nodes.len());
    let mut floor_hits = 0;
    for (value, fraction, floored) in nodes {
        values.push(value);
        active_fraction.push(fraction);
        floor_hits += floored as usize;
    }
    Ok(DerivativeMap {
        grid: *grid,
        values,
        active_fraction,
        floor_hits,
    })
}

/// Extracts the sub-level mask `d <= level` and its marching-squares
/// contour. Ambiguous saddle cells connect according to the side of the
/// cell average.
pub fn level_set(map: &DerivativeMap, level: f64) -> LevelSet {
    let grid = &map.grid;
    let mask: Vec<bool> = map.values.iter().map(|&v| v <= level).collect();
    let mut contour = Vec::new();

    let value = |ix: usize, iy: usize| map.values[ix + grid.nx * iy];
    for iy in 0..grid.ny.saturating_sub(1) {
        for ix in 0..grid.nx.saturating_sub(1) {
            let v = [
                value(ix, iy),         // bottom left
                value(ix + 1, iy),     // bottom right
                value(ix + 1, iy + 1), // top right
                value(ix, iy + 1),     // top left
            ];
            let corner = [
                grid.node(ix, iy),
                grid.node(ix + 1, iy),
                grid.node(ix + 1, iy + 1),
                grid.node(ix, iy + 1),
            ];
            let mut case = 0usize;
            for (bit, val) in v.iter().enumerate() {
                if *val <= level {
                    case |= 1 << bit;
                }
            }
            // Edge index: 0 bottom, 1 right, 2 top, 3 left; each joins two
            // corners of the cell.
            let edge_point = |edge: usize| -> Point2 {
                let (a, b) = match edge {
                    0 => (0, 1),
                    1 => (1, 2),
                    2 => (2, 3),
                    _ => (3, 0),
                };
                let t = (level - v[a]) / (v[b] - v[a]);
                corner[a] + (corner[b] - corner[a]) * t
            };
            let mut emit = |ea: usize, eb: usize| {
                contour.push((edge_point(ea), edge_point(eb)));
            };
            match case {
                0 | 15 => {}
                1 => emit(3, 0),
                2 => emit(0, 1),
                3 => emit(3, 1),
                4 => emit(1, 2),
                5 => {
                    let center_inside = v.iter().sum::<f64>() / 4.0 <= level;
                    if center_inside {
                        emit(3, 2);
                        emit(0, 1);
                    } else {
                        emit(3, 0);
                        emit(1, 2);
                    }
                }
                6 => emit(0, 2),
                7 => emit(3, 2),
                8 => emit(2, 3),
                9 => emit(0, 2),
                10 => {
                    let center_inside = v.iter().sum::<f64>() / 4.0 <= level;
                    if center_inside {
                        emit(3, 0);
                        emit(1, 2);
                    } else {
                        emit(0, 1);
                        emit(2, 3);
                    }
                }
                11 => emit(1, 2),
                12 => emit(3, 1),
                13 => emit(0, 1),
                14 => emit(3, 0),
                _ => unreachable!(),
            }
        }
    }

    LevelSet {
        level,
        mask,
        contour,
    }
}
