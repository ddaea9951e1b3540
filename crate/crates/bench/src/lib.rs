//! Shared fixtures for the benchmark targets.

use retroscat_core::measurement::{synthesize_monostatic, Engine, MeasurementSet};
use retroscat_core::types::{derive_params, MeasurementGeometry, Point2, Scene, SceneObject};

/// The reference disk scene at wavelength 1.
pub fn reference_scene() -> (Scene, MeasurementGeometry) {
    let params = derive_params(2.0 * std::f64::consts::PI, 1.0, 1.0, 4.0, 1.0).unwrap();
    let scene = Scene::new(SceneObject::disk(Point2::new(0.4, 1.0), 0.5), params).unwrap();
    let geom = MeasurementGeometry::new(60.0, 80.0, (-30.0, 30.0), 121).unwrap();
    (scene, geom)
}

/// Clean reference measurements from the modal-series engine.
pub fn reference_measurements() -> MeasurementSet {
    let (scene, geom) = reference_scene();
    synthesize_monostatic(&scene, &geom, Engine::Analytic { truncation: None }, false).unwrap()
}
