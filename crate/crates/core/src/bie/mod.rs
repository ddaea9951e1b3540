//! Nystrom solver for the penetrable-inclusion transmission problem on a
//! smooth closed boundary.
//!
//! The scattered exterior field and the interior field are represented by
//! Green's identities in terms of the Cauchy data on the boundary: the common
//! trace `v = u` and the scaled flux `w = (1/mu) du/dnu`, which are exactly
//! the quantities continuous across the interface. Taking exterior and
//! interior traces yields the 2x2 block system
//!
//! ```text
//! (I/2 + D_{k*}) v - mu* S_{k*} w = 0
//! (I/2 - D_{k0}) v + mu0 S_{k0} w = u_inc        on the boundary,
//! ```
//!
//! with `S`, `D` the single- and double-layer operators. Both kernels carry
//! at worst a logarithmic singularity, handled by the trigonometric product
//! quadrature; smooth parts use the trapezoid rule, so convergence is
//! superalgebraic for analytic boundaries. The system is uniquely solvable
//! away from a measure-zero set of spurious frequencies; near those the
//! condition estimate trips an explicit error instead of silently losing
//! accuracy.

pub mod boundary;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LuFactors};
use crate::special::{bessel_j, hankel1};
use crate::types::{PhysicalParams, Point2};

pub use boundary::{BoundaryNode, ParametricBoundary};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Condition estimates beyond this are treated as spurious-frequency hits.
const CONDITION_LIMIT: f64 = 1e12;

/// Boundary Cauchy data solving one transmission problem.
#[derive(Debug, Clone)]
pub struct TransmissionDensities {
    /// Field trace `u` at the quadrature nodes.
    pub phi: Vec<Complex64>,
    /// Scaled flux `(1/mu) du/dnu` at the quadrature nodes.
    pub psi: Vec<Complex64>,
    nodes: Vec<BoundaryNode>,
    params: PhysicalParams,
    eta: Point2,
    condition: f64,
}

/// A field value together with the near-boundary accuracy flag.
#[derive(Debug, Clone, Copy)]
pub struct ScatteredEval {
    pub value: Complex64,
    /// Set when the point is within two quadrature spacings of the boundary;
    /// the plain potential evaluation degrades there.
    pub near_boundary: bool,
}

/// Weights of the product quadrature for the `ln(4 sin^2((t - tau)/2))`
/// factor on `2n` uniform nodes, indexed by `|i - j|`.
fn kress_log_weights(n_nodes: usize) -> Vec<f64> {
    let n = n_nodes / 2;
    let mut weights = Vec::with_capacity(n_nodes);
    for m in 0..n_nodes {
        let mut sum = 0.0;
        for p in 1..n {
            sum += (p as f64 * m as f64 * std::f64::consts::PI / n as f64).cos() / p as f64;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        weights.push(
            -(2.0 * std::f64::consts::PI / n as f64) * sum
                - std::f64::consts::PI / (n as f64 * n as f64) * sign,
        );
    }
    weights
}

/// Single-layer kernel split: returns the log-factor part and the smooth
/// remainder, arc weight included.
fn single_layer_split(
    k: f64,
    src: &BoundaryNode,
    obs: &BoundaryNode,
    log4s: f64,
) -> (f64, Complex64) {
    let r = (obs.pos - src.pos).norm();
    let k1 = -0.25 / std::f64::consts::PI * bessel_j(0, k * r).unwrap() * src.speed;
    let full = Complex64::new(0.0, 0.25) * hankel1(0, k * r).unwrap() * src.speed;
    (k1, full - k1 * log4s)
}

fn single_layer_diagonal(k: f64, node: &BoundaryNode) -> (f64, Complex64) {
    let k1 = -0.25 / std::f64::consts::PI * node.speed;
    let k2 = Complex64::new(
        -(EULER_GAMMA + (0.5 * k * node.speed).ln()) / (2.0 * std::f64::consts::PI),
        0.25,
    ) * node.speed;
    (k1, k2)
}

/// Double-layer kernel split, arc weight included in the unnormalized normal.
fn double_layer_split(
    k: f64,
    src: &BoundaryNode,
    obs: &BoundaryNode,
    log4s: f64,
) -> (f64, Complex64) {
    let d = obs.pos - src.pos;
    let r = d.norm();
    let dot = d.dot(src.normal);
    let k1 = -k / (4.0 * std::f64::consts::PI) * bessel_j(1, k * r).unwrap() * dot / r;
    let full = Complex64::new(0.0, 0.25 * k) * hankel1(1, k * r).unwrap() * (dot / r);
    (k1, full - k1 * log4s)
}

fn double_layer_diagonal(node: &BoundaryNode) -> Complex64 {
    Complex64::from(
        node.d2.dot(node.normal) / (4.0 * std::f64::consts::PI * node.speed * node.speed),
    )
}

/// Assembles the transmission system for one incidence and solves it.
pub fn assemble_and_solve(
    boundary: &ParametricBoundary,
    params: &PhysicalParams,
    eta: Point2,
) -> Result<TransmissionDensities> {
    if (eta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::domain(
            "eta",
            format!("incidence must be a unit vector, |eta| = {}", eta.norm()),
        ));
    }
    let nodes = boundary.nodes();
    let nb = nodes.len();
    let n_half = nb / 2;
    let trapezoid = std::f64::consts::PI / n_half as f64;
    let log_weights = kress_log_weights(nb);
    let k0 = params.k0;
    let ks = params.k_star;

    let mut a = CMatrix::zeros(2 * nb);
    for i in 0..nb {
        for j in 0..nb {
            let (d_star, s_star, d_zero, s_zero) = if i == j {
                let r0 = log_weights[0];
                let (s1s, s2s) = single_layer_diagonal(ks, &nodes[i]);
                let (s1z, s2z) = single_layer_diagonal(k0, &nodes[i]);
                let dd = double_layer_diagonal(&nodes[i]);
                (
                    trapezoid * dd,
                    r0 * s1s + trapezoid * s2s,
                    trapezoid * dd,
                    r0 * s1z + trapezoid * s2z,
                )
            } else {
                let m = i.abs_diff(j);
                let rm = log_weights[m];
                let dt = 0.5 * (nodes[i].t - nodes[j].t);
                let log4s = (4.0 * dt.sin() * dt.sin()).ln();
                let (ds1, ds2) = double_layer_split(ks, &nodes[j], &nodes[i], log4s);
                let (ss1, ss2) = single_layer_split(ks, &nodes[j], &nodes[i], log4s);
                let (dz1, dz2) = double_layer_split(k0, &nodes[j], &nodes[i], log4s);
                let (sz1, sz2) = single_layer_split(k0, &nodes[j], &nodes[i], log4s);
                (
                    rm * ds1 + trapezoid * ds2,
                    rm * ss1 + trapezoid * ss2,
                    rm * dz1 + trapezoid * dz2,
                    rm * sz1 + trapezoid * sz2,
                )
            };
            let identity = if i == j { 0.5 } else { 0.0 };
            a.set(i, j, identity + d_star);
            a.set(i, nb + j, -params.mu_star * s_star);
            a.set(nb + i, j, identity - d_zero);
            a.set(nb + i, nb + j, params.mu0 * s_zero);
        }
    }

    let mut rhs = vec![Complex64::new(0.0, 0.0); 2 * nb];
    for (i, node) in nodes.iter().enumerate() {
        rhs[nb + i] = (Complex64::i() * k0 * eta.dot(node.pos)).exp();
    }

    let lu = LuFactors::new(a)?;
    let condition = lu.condition_estimate();
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            estimate: condition,
        });
    }
    let solution = lu.solve(&rhs);

    Ok(TransmissionDensities {
        phi: solution[..nb].to_vec(),
        psi: solution[nb..].to_vec(),
        nodes: nodes.to_vec(),
        params: *params,
        eta,
        condition,
    })
}

impl TransmissionDensities {
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn incidence(&self) -> Point2 {
        self.eta
    }

    /// Winding number of the node polygon around `x`.
    fn winds_around(&self, x: Point2) -> bool {
        let nb = self.nodes.len();
        let mut total = 0.0;
        for j in 0..nb {
            let a = self.nodes[j].pos - x;
            let b = self.nodes[(j + 1) % nb].pos - x;
            total += a.cross(b).atan2(a.dot(b));
        }
        total.abs() > std::f64::consts::PI
    }

    fn max_node_spacing(&self) -> f64 {
        let nb = self.nodes.len();
        (0..nb)
            .map(|j| (self.nodes[(j + 1) % nb].pos - self.nodes[j].pos).norm())
            .fold(0.0, f64::max)
    }

    fn min_node_distance(&self, x: Point2) -> f64 {
        self.nodes
            .iter()
            .map(|node| (x - node.pos).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Scattered field at a strictly exterior point, by the trapezoid rule
    /// on the exterior Green representation.
    pub fn evaluate_scattered(&self, x: Point2) -> Result<ScatteredEval> {
        if self.winds_around(x) {
            return Err(Error::domain(
                "x",
                "evaluation point lies inside the boundary".to_string(),
            ));
        }
        let near_boundary = self.min_node_distance(x) < 2.0 * self.max_node_spacing();
        let k0 = self.params.k0;
        let weight = 2.0 * std::f64::consts::PI / self.nodes.len() as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, node) in self.nodes.iter().enumerate() {
            let d = x - node.pos;
            let r = d.norm();
            let u_inc = (Complex64::i() * k0 * self.eta.dot(node.pos)).exp();
            let du_inc = Complex64::i() * k0 * (self.eta.dot(node.normal) / node.speed) * u_inc;
            let double =
                Complex64::new(0.0, 0.25 * k0) * hankel1(1, k0 * r)? * (d.dot(node.normal) / r);
            let single = Complex64::new(0.0, 0.25) * hankel1(0, k0 * r)? * node.speed;
            let trace = self.phi[j] - u_inc;
            let flux = self.params.mu0 * self.psi[j] - du_inc;
            sum += double * trace - single * flux;
        }
        Ok(ScatteredEval {
            value: sum * weight,
            near_boundary,
        })
    }

    /// Total field at a strictly interior point, by the interior Green
    /// representation.
    pub fn evaluate_interior(&self, x: Point2) -> Result<Complex64> {
        if !self.winds_around(x) {
            return Err(Error::domain(
                "x",
                "evaluation point lies outside the boundary".to_string(),
            ));
        }
        let ks = self.params.k_star;
        let weight = 2.0 * std::f64::consts::PI / self.nodes.len() as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, node) in self.nodes.iter().enumerate() {
            let d = x - node.pos;
            let r = d.norm();
            let double =
                Complex64::new(0.0, 0.25 * ks) * hankel1(1, ks * r)? * (d.dot(node.normal) / r);
            let single = Complex64::new(0.0, 0.25) * hankel1(0, ks * r)? * node.speed;
            sum += single * (self.params.mu_star * self.psi[j]) - double * self.phi[j];
        }
        Ok(sum * weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::modal_coefficients;
    use crate::types::{derive_params, Scene, SceneObject, ShapeKind};
    use std::f64::consts::PI;

    #[test]
    fn log_quadrature_reproduces_cosine_moments() {
        // ln(4 sin^2(theta/2)) has Fourier coefficients -2/m on cos(m .).
        let nb = 32;
        let weights = kress_log_weights(nb);
        for m in 1..=5 {
            for i in [0usize, 3, 17] {
                let ti = 2.0 * PI * i as f64 / nb as f64;
                let mut sum = 0.0;
                for j in 0..nb {
                    let tj = 2.0 * PI * j as f64 / nb as f64;
                    sum += weights[i.abs_diff(j)] * (m as f64 * tj).cos();
                }
                let exact = -(2.0 * PI / m as f64) * (m as f64 * ti).cos();
                assert!((sum - exact).abs() < 1e-12, "m={m} i={i}: {sum} vs {exact}");
            }
        }
    }

    #[test]
    fn zero_contrast_scatters_below_1e8() {
        let params = derive_params(2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        for object in [
            SceneObject::disk(Point2::new(0.2, -0.1), 1.0),
            SceneObject {
                kind: ShapeKind::Ellipse { a: 1.2, b: 0.7 },
                center: Point2::new(-0.3, 0.2),
            },
            SceneObject {
                kind: ShapeKind::Kite { scale: 1.0 },
                center: Point2::new(0.0, 0.5),
            },
        ] {
            let boundary = ParametricBoundary::from_object(&object, 64).unwrap();
            let densities = assemble_and_solve(&boundary, &params, Point2::new(0.6, 0.8)).unwrap();
            for m in 0..10 {
                let ang = 2.0 * PI * m as f64 / 10.0;
                let x = object.center + Point2::new(ang.cos(), ang.sin()) * 6.0;
                let u = densities.evaluate_scattered(x).unwrap();
                assert!(u.value.norm() < 1e-8, "|u| = {} at {x:?}", u.value.norm());
            }
        }
    }

    #[test]
    fn disk_agrees_with_modal_series() {
        // k0 a = 2, eps contrast 4, 128 nodes, 16 exterior points.
        let params = derive_params(2.0, 1.0, 1.0, 4.0, 1.0).unwrap();
        let center = Point2::new(0.3, 0.7);
        let object = SceneObject::disk(center, 1.0);
        let scene = Scene::new(object, params).unwrap();
        let eta = Point2::new(0.28, 0.96);
        let coeffs = modal_coefficients(&scene, eta, None).unwrap();
        let boundary = ParametricBoundary::from_object(&object, 128).unwrap();
        let densities = assemble_and_solve(&boundary, &params, eta).unwrap();
        for m in 0..16 {
            let ang = 2.0 * PI * m as f64 / 16.0 + 0.05;
            let x = center + Point2::new(ang.cos(), ang.sin()) * 2.5;
            let reference = coeffs.scattered_field(x).unwrap();
            let u = densities.evaluate_scattered(x).unwrap().value;
            let rel = (u - reference).norm() / reference.norm();
            assert!(rel < 1e-6, "point {m}: relative error {rel}");
        }
    }

    #[test]
    fn interior_field_matches_modal_series() {
        let params = derive_params(2.0, 1.0, 1.0, 4.0, 2.0).unwrap();
        let center = Point2::new(0.0, 0.0);
        let object = SceneObject::disk(center, 1.0);
        let scene = Scene::new(object, params).unwrap();
        let eta = Point2::new(1.0, 0.0);
        let coeffs = modal_coefficients(&scene, eta, None).unwrap();
        let boundary = ParametricBoundary::from_object(&object, 128).unwrap();
        let densities = assemble_and_solve(&boundary, &params, eta).unwrap();
        for x in [Point2::new(0.3, 0.2), Point2::new(-0.4, 0.1)] {
            let reference = coeffs.interior_field(x).unwrap();
            let u = densities.evaluate_interior(x).unwrap();
            assert!((u - reference).norm() / reference.norm() < 1e-6);
        }
    }

    #[test]
    fn kite_self_convergence_under_node_doubling() {
        let params = derive_params(2.0, 1.0, 1.0, 3.0, 1.0).unwrap();
        let object = SceneObject {
            kind: ShapeKind::Kite { scale: 1.0 },
            center: Point2::new(0.0, 0.0),
        };
        let eta = Point2::new(0.0, -1.0);
        let x = Point2::new(3.5, 2.0);
        let field = |nodes: usize| {
            let boundary = ParametricBoundary::from_object(&object, nodes).unwrap();
            assemble_and_solve(&boundary, &params, eta)
                .unwrap()
                .evaluate_scattered(x)
                .unwrap()
                .value
        };
        let coarse = field(32);
        let mid = field(64);
        let fine = field(128);
        let drop = (coarse - mid).norm() / (mid - fine).norm();
        assert!(drop > 10.0, "convergence ratio only {drop}");
    }

    #[test]
    fn far_field_decay_and_point_classification() {
        let params = derive_params(2.0, 1.0, 1.0, 4.0, 1.0).unwrap();
        let object = SceneObject::disk(Point2::new(0.0, 0.0), 1.0);
        let boundary = ParametricBoundary::from_object(&object, 64).unwrap();
        let densities = assemble_and_solve(&boundary, &params, Point2::new(0.0, 1.0)).unwrap();

        let dir = Point2::new(0.2, 1.0).normalized();
        let lambda = params.lambda;
        let near = densities
            .evaluate_scattered(dir * (100.0 * lambda))
            .unwrap()
            .value
            .norm();
        let far = densities
            .evaluate_scattered(dir * (400.0 * lambda))
            .unwrap()
            .value
            .norm();
        assert!((far / near - 0.5).abs() < 0.01);

        assert!(densities.evaluate_scattered(Point2::new(0.2, 0.1)).is_err());
        assert!(densities.evaluate_interior(Point2::new(5.0, 5.0)).is_err());

        let close = densities
            .evaluate_scattered(Point2::new(1.05, 0.0))
            .unwrap();
        assert!(close.near_boundary);
        let far_pt = densities.evaluate_scattered(Point2::new(8.0, 0.0)).unwrap();
        assert!(!far_pt.near_boundary);
    }

    #[test]
    fn discrete_interior_trace_identity() {
        // u/2 + D[u] - S[du/dnu] = 0 on the boundary for an entire
        // Helmholtz solution; exercises every kernel split and diagonal.
        let k = 2.0;
        let eta = Point2::new(0.6, 0.8);
        let object = SceneObject::disk(Point2::new(0.0, 0.0), 1.0);
        let boundary = ParametricBoundary::from_object(&object, 64).unwrap();
        let nodes = boundary.nodes();
        let nb = nodes.len();
        let trapezoid = 2.0 * PI / nb as f64;
        let log_weights = kress_log_weights(nb);

        let u: Vec<Complex64> = nodes
            .iter()
            .map(|nd| (Complex64::i() * k * eta.dot(nd.pos)).exp())
            .collect();
        let du: Vec<Complex64> = nodes
            .iter()
            .zip(&u)
            .map(|(nd, ui)| Complex64::i() * k * (eta.dot(nd.normal) / nd.speed) * ui)
            .collect();

        let mut max_res = 0.0_f64;
        for i in 0..nb {
            let mut acc = 0.5 * u[i];
            for j in 0..nb {
                let (d_entry, s_entry) = if i == j {
                    let (s1, s2) = single_layer_diagonal(k, &nodes[i]);
                    (
                        Complex64::from(trapezoid) * double_layer_diagonal(&nodes[i]),
                        log_weights[0] * s1 + trapezoid * s2,
                    )
                } else {
                    let m = i.abs_diff(j);
                    let dt = 0.5 * (nodes[i].t - nodes[j].t);
                    let log4s = (4.0 * dt.sin() * dt.sin()).ln();
                    let (d1, d2) = double_layer_split(k, &nodes[j], &nodes[i], log4s);
                    let (s1, s2) = single_layer_split(k, &nodes[j], &nodes[i], log4s);
                    (
                        log_weights[m] * d1 + trapezoid * d2,
                        log_weights[m] * s1 + trapezoid * s2,
                    )
                };
                acc += d_entry * u[j] - s_entry * du[j];
            }
            max_res = max_res.max(acc.norm());
        }
        assert!(
            max_res < 1e-10,
            "interior trace identity residual {max_res}"
        );
    }

    #[test]
    fn zero_contrast_densities_equal_incident_data() {
        let params = derive_params(2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let eta = Point2::new(0.6, 0.8);
        let object = SceneObject::disk(Point2::new(0.2, -0.1), 1.0);
        let boundary = ParametricBoundary::from_object(&object, 64).unwrap();
        let densities = assemble_and_solve(&boundary, &params, eta).unwrap();
        let k0 = params.k0;
        for (j, node) in boundary.nodes().iter().enumerate() {
            let u = (Complex64::i() * k0 * eta.dot(node.pos)).exp();
            let du = Complex64::i() * k0 * (eta.dot(node.normal) / node.speed) * u;
            assert!((densities.phi[j] - u).norm() < 1e-9);
            assert!((densities.psi[j] - du).norm() < 1e-9);
        }
    }
}
