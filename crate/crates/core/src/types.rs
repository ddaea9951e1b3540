//! Shared domain types: physical parameters, measurement geometry, scene
//! description and probe grids.
//!
//! Everything here is immutable after construction and can be shared freely
//! across worker threads.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point (or vector) in the measurement plane. The second coordinate is
/// the height above the object region; the measurement lines are horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Point2 { x1, x2 }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// z-component of the cross product, used for colinearity tests.
    pub fn cross(self, other: Point2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x1 / n, self.x2 / n)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x1 * s, self.x2 * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x1, -self.x2)
    }
}

/// Background and inclusion material constants together with the derived
/// wavenumbers and wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Angular frequency (rad per unit time).
    pub omega: f64,
    /// Background permittivity.
    pub eps0: f64,
    /// Background permeability.
    pub mu0: f64,
    /// Inclusion permittivity.
    pub eps_star: f64,
    /// Inclusion permeability.
    pub mu_star: f64,
    /// Background wavenumber, `omega * sqrt(eps0 * mu0)`.
    pub k0: f64,
    /// Inclusion wavenumber, `omega * sqrt(eps_star * mu_star)`.
    pub k_star: f64,
    /// Background wavelength, `2 pi / k0`.
    pub lambda: f64,
}

/// Builds [`PhysicalParams`] from the five material inputs, filling in the
/// derived wavenumbers and wavelength.
pub fn derive_params(
    omega: f64,
    eps0: f64,
    mu0: f64,
    eps_star: f64,
    mu_star: f64,
) -> Result<PhysicalParams> {
    for (field, value) in [
        ("omega", omega),
        ("eps0", eps0),
        ("mu0", mu0),
        ("eps_star", eps_star),
        ("mu_star", mu_star),
    ] {
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::domain(
                field,
                format!("must be strictly positive and finite, got {value}"),
            ));
        }
    }
    let k0 = omega * (eps0 * mu0).sqrt();
    let k_star = omega * (eps_star * mu_star).sqrt();
    let lambda = 2.0 * PI / k0;
    Ok(PhysicalParams {
        omega,
        eps0,
        mu0,
        eps_star,
        mu_star,
        k0,
        k_star,
        lambda,
    })
}

impl PhysicalParams {
    /// Largest relative deviation between the stored derived quantities and
    /// their recomputation from the material inputs.
    pub fn consistency_residual(&self) -> f64 {
        let k0 = self.omega * (self.eps0 * self.mu0).sqrt();
        let k_star = self.omega * (self.eps_star * self.mu_star).sqrt();
        let lambda = 2.0 * PI / k0;
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        rel(self.k0, k0)
            .max(rel(self.k_star, k_star))
            .max(rel(self.lambda, lambda))
    }
}

/// One of the two parallel measurement lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    /// The line at height `gamma0`; its samples feed the transport.
    Gamma0,
    /// The line at height `gamma1`; its samples are the fit target.
    Gamma1,
}

impl Line {
    /// CSV index, 0 for `Gamma0` and 1 for `Gamma1`.
    pub fn index(self) -> u8 {
        match self {
            Line::Gamma0 => 0,
            Line::Gamma1 => 1,
        }
    }

    pub fn from_index(idx: u8) -> Option<Line> {
        match idx {
            0 => Some(Line::Gamma0),
            1 => Some(Line::Gamma1),
            _ => None,
        }
    }
}

/// The two receiver lines and the shared sampling aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementGeometry {
    /// Height of the first measurement line.
    pub gamma0: f64,
    /// Height of the second measurement line.
    pub gamma1: f64,
    /// Closed interval of first coordinates sampled on both lines.
    pub aperture: (f64, f64),
    /// Receivers per line, uniformly spaced over the aperture.
    pub n_receivers: usize,
}

impl MeasurementGeometry {
    pub fn new(gamma0: f64, gamma1: f64, aperture: (f64, f64), n_receivers: usize) -> Result<Self> {
        if gamma0 <= 0.0 || !gamma0.is_finite() {
            return Err(Error::domain("gamma0", "must be strictly positive"));
        }
        if gamma1 <= 0.0 || !gamma1.is_finite() {
            return Err(Error::domain("gamma1", "must be strictly positive"));
        }
        if gamma0 == gamma1 {
            return Err(Error::domain("gamma1", "gamma0 must differ from gamma1"));
        }
        if aperture.0 >= aperture.1 || aperture.0.is_nan() || aperture.1.is_nan() {
            return Err(Error::domain(
                "aperture",
                format!(
                    "degenerate aperture [{}, {}]: receiver spacing undefined",
                    aperture.0, aperture.1
                ),
            ));
        }
        if n_receivers < 2 {
            return Err(Error::domain(
                "n_receivers",
                "at least 2 receivers per line",
            ));
        }
        Ok(MeasurementGeometry {
            gamma0,
            gamma1,
            aperture,
            n_receivers,
        })
    }

    pub fn line_height(&self, line: Line) -> f64 {
        match line {
            Line::Gamma0 => self.gamma0,
            Line::Gamma1 => self.gamma1,
        }
    }

    /// Receiver spacing along a line.
    pub fn spacing(&self) -> f64 {
        (self.aperture.1 - self.aperture.0) / (self.n_receivers - 1) as f64
    }

    /// Uniform receiver abscissas shared by both lines.
    pub fn abscissas(&self) -> Vec<f64> {
        let delta = self.spacing();
        (0..self.n_receivers)
            .map(|j| self.aperture.0 + j as f64 * delta)
            .collect()
    }

    /// Non-fatal configuration findings: lines too close to the object
    /// region for the far-field reading, or the reversed line ordering.
    pub fn warnings(&self, params: &PhysicalParams) -> Vec<String> {
        let mut notes = Vec::new();
        let closest = self.gamma0.min(self.gamma1);
        if closest < 10.0 * params.lambda {
            notes.push(format!(
                "min(gamma0, gamma1) = {closest} is below 10 wavelengths ({}); \
                 the far-field reading of the measurements degrades",
                10.0 * params.lambda
            ));
        }
        if self.gamma0 > self.gamma1 {
            notes.push(format!(
                "gamma0 = {} above gamma1 = {}: transported amplitudes grow \
                 instead of decaying and the travel time is negative",
                self.gamma0, self.gamma1
            ));
        }
        notes
    }
}

/// Uniform receiver positions on the requested line, sorted by abscissa.
pub fn receiver_positions(geom: &MeasurementGeometry, line: Line) -> Vec<Point2> {
    let height = geom.line_height(line);
    geom.abscissas()
        .into_iter()
        .map(|x1| Point2::new(x1, height))
        .collect()
}

/// A disk inclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskScatterer {
    pub center: Point2,
    pub radius: f64,
}

/// Smooth closed shapes addressable from configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeKind {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Kite { scale: f64 },
}

impl ShapeKind {
    /// Height of the topmost point of the shape relative to its center.
    pub fn top_extent(&self) -> f64 {
        match *self {
            ShapeKind::Disk { radius } => radius,
            ShapeKind::Ellipse { b, .. } => b,
            ShapeKind::Kite { scale } => 1.5 * scale,
        }
    }
}

/// A placed inclusion: the true object or a probe shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneObject {
    pub kind: ShapeKind,
    pub center: Point2,
}

impl SceneObject {
    pub fn disk(center: Point2, radius: f64) -> Self {
        SceneObject {
            kind: ShapeKind::Disk { radius },
            center,
        }
    }

    /// Supremum of the object's second coordinate.
    pub fn top(&self) -> f64 {
        self.center.x2 + self.kind.top_extent()
    }

    pub fn as_disk(&self) -> Option<DiskScatterer> {
        match self.kind {
            ShapeKind::Disk { radius } => Some(DiskScatterer {
                center: self.center,
                radius,
            }),
            _ => None,
        }
    }
}

/// The inclusion together with its material parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    pub object: SceneObject,
    pub params: PhysicalParams,
}

impl Scene {
    pub fn new(object: SceneObject, params: PhysicalParams) -> Result<Self> {
        let positive = match object.kind {
            ShapeKind::Disk { radius } => radius > 0.0,
            ShapeKind::Ellipse { a, b } => a > 0.0 && b > 0.0,
            ShapeKind::Kite { scale } => scale > 0.0,
        };
        if !positive {
            return Err(Error::domain(
                "scene.object",
                "shape sizes must be positive",
            ));
        }
        Ok(Scene { object, params })
    }

    /// The object must sit strictly below both measurement lines.
    pub fn validate_against(&self, geom: &MeasurementGeometry) -> Result<()> {
        let ceiling = geom.gamma0.min(geom.gamma1);
        if self.object.top() >= ceiling {
            return Err(Error::Geometry(format!(
                "object extends to x2 = {} which is not strictly below \
                 min(gamma0, gamma1) = {ceiling}",
                self.object.top()
            )));
        }
        Ok(())
    }
}

/// Rectangular region of interest sampled by the imaging scan.
///
/// Single-sample axes are accepted (`nx` or `ny` equal to 1); the sample then
/// sits at the lower bound of the degenerate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z1_min: f64,
    pub z1_max: f64,
    pub z2_min: f64,
    pub z2_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(z1: (f64, f64), z2: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::domain("grid", "nx and ny must be at least 1"));
        }
        if z1.0 > z1.1 || z2.0 > z2.1 {
            return Err(Error::domain("grid.roi", "inverted region of interest"));
        }
        if (nx > 1 && z1.0 == z1.1) || (ny > 1 && z2.0 == z2.1) {
            return Err(Error::domain(
                "grid.roi",
                "degenerate axis with more than one sample",
            ));
        }
        Ok(GridSpec {
            z1_min: z1.0,
            z1_max: z1.1,
            z2_min: z2.0,
            z2_max: z2.1,
            nx,
            ny,
        })
    }

    /// Every probe center must lie strictly below both measurement lines.
    pub fn validate_against(&self, geom: &MeasurementGeometry) -> Result<()> {
        let ceiling = geom.gamma0.min(geom.gamma1);
        if self.z2_max >= ceiling {
            return Err(Error::Geometry(format!(
                "grid ceiling z2_max = {} is not strictly below \
                 min(gamma0, gamma1) = {ceiling}",
                self.z2_max
            )));
        }
        Ok(())
    }

    pub fn node(&self, ix: usize, iy: usize) -> Point2 {
        let z1 = if self.nx == 1 {
            self.z1_min
        } else {
            self.z1_min + ix as f64 * (self.z1_max - self.z1_min) / (self.nx - 1) as f64
        };
        let z2 = if self.ny == 1 {
            self.z2_min
        } else {
            self.z2_min + iy as f64 * (self.z2_max - self.z2_min) / (self.ny - 1) as f64
        };
        Point2::new(z1, z2)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
