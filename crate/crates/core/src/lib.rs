//! Simulation of phaseless monostatic backscatter measurements on two
//! parallel lines and direct imaging of the scatterer by a transport-based
//! topological derivative.
//!
//! The crate is organised along the pipeline:
//!
//! * [`types`] — physical parameters, measurement geometry, scenes, grids;
//! * [`special`] — cylinder functions feeding every field evaluation;
//! * [`analytic`] — exact scattered field of a penetrable disk (modal series);
//! * [`bie`] — boundary-integral solver for general smooth inclusions;
//! * [`measurement`] — synthetic amplitude-only data, noise, CSV persistence;
//! * [`transport`] — back-projection rays, transported-amplitude kernels and
//!   a characteristic integrator used to validate them;
//! * [`imaging`] — the topological-derivative map, grid scans and level sets.
//!
//! # Example
//!
//! Simulate amplitude-only measurements of a small disk and locate it from
//! the most negative value of the derivative map:
//!
//! ```
//! use retroscat_core::imaging::{scan_grid, ImagingOptions};
//! use retroscat_core::measurement::{synthesize_monostatic, Engine};
//! use retroscat_core::{derive_params, GridSpec, MeasurementGeometry, Point2, Scene, SceneObject};
//!
//! let params = derive_params(2.0 * std::f64::consts::PI, 1.0, 1.0, 4.0, 1.0)?;
//! let scene = Scene::new(SceneObject::disk(Point2::new(0.4, 1.0), 0.5), params)?;
//! let geometry = MeasurementGeometry::new(60.0, 80.0, (-30.0, 30.0), 41)?;
//! let data = synthesize_monostatic(&scene, &geometry, Engine::Analytic { truncation: None }, false)?;
//!
//! let grid = GridSpec::new((-4.0, 4.0), (-2.0, 3.0), 17, 11)?;
//! let map = scan_grid(&grid, &data, &ImagingOptions::default())?;
//! let (ix, iy, _) = map.argmin();
//! let located = grid.node(ix, iy);
//! assert!((located - Point2::new(0.4, 1.0)).norm() < 2.0);
//! # Ok::<(), retroscat_core::Error>(())
//! ```

pub mod analytic;
pub mod bie;
pub mod error;
pub mod imaging;
pub mod linalg;
pub mod measurement;
pub mod special;
pub mod transport;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    derive_params, receiver_positions, DiskScatterer, GridSpec, Line, MeasurementGeometry,
    PhysicalParams, Point2, Scene, SceneObject, ShapeKind,
};
