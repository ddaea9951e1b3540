//! Smooth closed boundary curves for the integral-equation solver, given by
//! a 2pi-periodic parametrization and its first two derivatives, sampled at
//! an even number of quadrature nodes.

use crate::error::{Error, Result};
use crate::types::{Point2, SceneObject, ShapeKind};

type Curve = Box<dyn Fn(f64) -> Point2 + Send + Sync>;

/// Precomputed data at one quadrature node.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryNode {
    /// Parameter value.
    pub t: f64,
    pub pos: Point2,
    /// First derivative of the parametrization.
    pub d1: Point2,
    /// Second derivative of the parametrization.
    pub d2: Point2,
    /// `|x'(t)|`.
    pub speed: f64,
    /// Outward normal scaled by the speed, `(x2', -x1')`.
    pub normal: Point2,
}

/// A regular, simple, counterclockwise closed curve with its node data.
pub struct ParametricBoundary {
    position: Curve,
    n_nodes: usize,
    nodes: Vec<BoundaryNode>,
}

impl std::fmt::Debug for ParametricBoundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricBoundary")
            .field("n_nodes", &self.n_nodes)
            .finish_non_exhaustive()
    }
}

impl ParametricBoundary {
    pub fn new(position: Curve, d1: Curve, d2: Curve, n_nodes: usize) -> Result<Self> {
        if n_nodes < 8 || !n_nodes.is_multiple_of(2) {
            return Err(Error::Geometry(format!(
                "n_nodes must be an even integer of at least 8, got {n_nodes}"
            )));
        }
        let step = 2.0 * std::f64::consts::PI / n_nodes as f64;
        let mut nodes = Vec::with_capacity(n_nodes);
        for j in 0..n_nodes {
            let t = j as f64 * step;
            let pos = position(t);
            let d1v = d1(t);
            let d2v = d2(t);
            let speed = d1v.norm();
            if speed <= 1e-12 {
                return Err(Error::Geometry(format!(
                    "irregular parametrization: |x'({t})| = {speed}"
                )));
            }
            nodes.push(BoundaryNode {
                t,
                pos,
                d1: d1v,
                d2: d2v,
                speed,
                normal: Point2::new(d1v.x2, -d1v.x1),
            });
        }
        if polygon_signed_area(&nodes) <= 0.0 {
            return Err(Error::Geometry(
                "parametrization must run counterclockwise".to_string(),
            ));
        }
        if polyline_self_intersects(&nodes) {
            return Err(Error::Geometry(
                "boundary polyline self-intersects at node resolution".to_string(),
            ));
        }
        Ok(ParametricBoundary {
            position,
            n_nodes,
            nodes,
        })
    }

    /// Builds a catalog shape around its center.
    pub fn from_object(object: &SceneObject, n_nodes: usize) -> Result<Self> {
        let c = object.center;
        match object.kind {
            ShapeKind::Disk { radius } => Self::new(
                Box::new(move |t| c + Point2::new(t.cos(), t.sin()) * radius),
                Box::new(move |t| Point2::new(-t.sin(), t.cos()) * radius),
                Box::new(move |t| Point2::new(-t.cos(), -t.sin()) * radius),
                n_nodes,
            ),
            ShapeKind::Ellipse { a, b } => Self::new(
                Box::new(move |t| c + Point2::new(a * t.cos(), b * t.sin())),
                Box::new(move |t| Point2::new(-a * t.sin(), b * t.cos())),
                Box::new(move |t| Point2::new(-a * t.cos(), -b * t.sin())),
                n_nodes,
            ),
            ShapeKind::Kite { scale } => Self::new(
                Box::new(move |t| {
                    c + Point2::new(t.cos() + 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin()) * scale
                }),
                Box::new(move |t| {
                    Point2::new(-t.sin() - 1.3 * (2.0 * t).sin(), 1.5 * t.cos()) * scale
                }),
                Box::new(move |t| {
                    Point2::new(-t.cos() - 2.6 * (2.0 * t).cos(), -1.5 * t.sin()) * scale
                }),
                n_nodes,
            ),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    pub fn position(&self, t: f64) -> Point2 {
        (self.position)(t)
    }
}

fn polygon_signed_area(nodes: &[BoundaryNode]) -> f64 {
    let n = nodes.len();
    let mut area = 0.0;
    for j in 0..n {
        let p = nodes[j].pos;
        let q = nodes[(j + 1) % n].pos;
        area += p.cross(q);
    }
    0.5 * area
}

fn polyline_self_intersects(nodes: &[BoundaryNode]) -> bool {
    let n = nodes.len();
    let seg = |j: usize| (nodes[j].pos, nodes[(j + 1) % n].pos);
    for a in 0..n {
        for b in (a + 1)..n {
            // Segments sharing an endpoint are allowed to touch.
            if b == a + 1 || (a == 0 && b == n - 1) {
                continue;
            }
            let (p1, p2) = seg(a);
            let (q1, q2) = seg(b);
            if segments_intersect(p1, p2, q1, q2) {
                return true;
            }
        }
    }
    false
}

fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let orient = |a: Point2, b: Point2, c: Point2| (b - a).cross(c - a);
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes_construct() {
        let disk = SceneObject::disk(Point2::new(1.0, 2.0), 0.5);
        let b = ParametricBoundary::from_object(&disk, 64).unwrap();
        assert_eq!(b.n_nodes(), 64);
        for node in b.nodes() {
            assert!(((node.pos - Point2::new(1.0, 2.0)).norm() - 0.5).abs() < 1e-14);
            // Outward normal points away from the center.
            assert!(node.normal.dot(node.pos - Point2::new(1.0, 2.0)) > 0.0);
        }

        let kite = SceneObject {
            kind: ShapeKind::Kite { scale: 1.0 },
            center: Point2::new(0.0, 0.0),
        };
        ParametricBoundary::from_object(&kite, 64).unwrap();
    }

    #[test]
    fn odd_node_counts_are_rejected() {
        let disk = SceneObject::disk(Point2::new(0.0, 0.0), 1.0);
        assert!(ParametricBoundary::from_object(&disk, 33).is_err());
        assert!(ParametricBoundary::from_object(&disk, 4).is_err());
    }

    #[test]
    fn clockwise_curves_are_rejected() {
        let cw = ParametricBoundary::new(
            Box::new(|t| Point2::new(t.cos(), -t.sin())),
            Box::new(|t| Point2::new(-t.sin(), -t.cos())),
            Box::new(|t| Point2::new(-t.cos(), t.sin())),
            32,
        );
        assert!(cw.is_err());
    }

    #[test]
    fn self_intersecting_curves_are_rejected() {
        // Figure-eight style limacon r = 1 + 2 cos(t) crosses itself.
        let lima = ParametricBoundary::new(
            Box::new(|t: f64| {
                let r = 1.0 + 2.0 * t.cos();
                Point2::new(r * t.cos(), r * t.sin())
            }),
            Box::new(|t: f64| {
                let r = 1.0 + 2.0 * t.cos();
                let dr = -2.0 * t.sin();
                Point2::new(dr * t.cos() - r * t.sin(), dr * t.sin() + r * t.cos())
            }),
            Box::new(|t: f64| {
                let r = 1.0 + 2.0 * t.cos();
                let dr = -2.0 * t.sin();
                let ddr = -2.0 * t.cos();
                Point2::new(
                    ddr * t.cos() - 2.0 * dr * t.sin() - r * t.cos(),
                    ddr * t.sin() + 2.0 * dr * t.cos() - r * t.sin(),
                )
            }),
            64,
        );
        assert!(lima.is_err());
    }

    #[test]
    fn degenerate_parametrization_is_rejected() {
        let frozen = ParametricBoundary::new(
            Box::new(|t| Point2::new(t.cos(), t.sin())),
            Box::new(|_| Point2::new(0.0, 0.0)),
            Box::new(|_| Point2::new(0.0, 0.0)),
            16,
        );
        assert!(frozen.is_err());
    }
}
