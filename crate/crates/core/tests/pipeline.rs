//! Cross-module runs: synthesis feeding the imaging scan, with both forward
//! engines and both line orderings.

use retroscat_core::imaging::{scan_grid, ImagingOptions};
use retroscat_core::measurement::{synthesize_monostatic, Engine};
use retroscat_core::types::{
    derive_params, GridSpec, MeasurementGeometry, Point2, Scene, SceneObject,
};

fn disk_scene(center: Point2, radius: f64) -> Scene {
    let params = derive_params(2.0 * std::f64::consts::PI, 1.0, 1.0, 4.0, 1.0).unwrap();
    Scene::new(SceneObject::disk(center, radius), params).unwrap()
}

#[test]
fn analytic_engine_localizes_on_a_coarse_grid() {
    let truth = Point2::new(0.4, 1.0);
    let scene = disk_scene(truth, 0.5);
    let geom = MeasurementGeometry::new(60.0, 80.0, (-30.0, 30.0), 61).unwrap();
    let set =
        synthesize_monostatic(&scene, &geom, Engine::Analytic { truncation: None }, false).unwrap();
    let grid = GridSpec::new((-5.0, 5.0), (-3.0, 4.0), 32, 32).unwrap();
    let map = scan_grid(&grid, &set, &ImagingOptions::default()).unwrap();
    let (ix, iy, dmin) = map.argmin();
    let z = grid.node(ix, iy);
    assert!(dmin < 0.0);
    assert!(
        (z - truth).norm() < 2.0,
        "most negative d at {z:?}, {} away from {truth:?}",
        (z - truth).norm()
    );
}

#[test]
fn bie_engine_feeds_the_same_pipeline() {
    let truth = Point2::new(0.0, 0.5);
    let scene = disk_scene(truth, 0.5);
    let geom = MeasurementGeometry::new(30.0, 40.0, (-12.0, 12.0), 11).unwrap();
    let set = synthesize_monostatic(&scene, &geom, Engine::Bie { n_nodes: 48 }, false).unwrap();
    assert!(set.records.iter().all(|r| r.amplitude > 0.0));
    let grid = GridSpec::new((-3.0, 3.0), (-2.0, 2.0), 13, 9).unwrap();
    let map = scan_grid(&grid, &set, &ImagingOptions::default()).unwrap();
    assert!(map.values.iter().all(|v| v.is_finite()));
    let (ix, iy, dmin) = map.argmin();
    assert!(dmin < 0.0);
    let z = grid.node(ix, iy);
    assert!(
        (z - truth).norm() < 2.5,
        "most negative d at {z:?}, {} away",
        (z - truth).norm()
    );
}

#[test]
fn reversed_line_ordering_runs_end_to_end() {
    // The first line farther out than the second: accepted, flagged, and the
    // whole pipeline still runs.
    let scene = disk_scene(Point2::new(0.0, 1.0), 0.5);
    let geom = MeasurementGeometry::new(80.0, 60.0, (-30.0, 30.0), 41).unwrap();
    assert_eq!(geom.warnings(&scene.params).len(), 1);
    let set =
        synthesize_monostatic(&scene, &geom, Engine::Analytic { truncation: None }, false).unwrap();
    let grid = GridSpec::new((-4.0, 4.0), (-2.0, 3.0), 17, 11).unwrap();
    let map = scan_grid(&grid, &set, &ImagingOptions::default()).unwrap();
    assert!(map.values.iter().all(|v| v.is_finite()));
    assert!(map.active_fraction.iter().any(|&f| f > 0.0));
}

#[test]
fn flip_incidence_localizes_too() {
    let truth = Point2::new(0.4, 1.0);
    let scene = disk_scene(truth, 0.5);
    let geom = MeasurementGeometry::new(60.0, 80.0, (-30.0, 30.0), 61).unwrap();
    let set =
        synthesize_monostatic(&scene, &geom, Engine::Analytic { truncation: None }, true).unwrap();
    let grid = GridSpec::new((-5.0, 5.0), (-3.0, 4.0), 32, 32).unwrap();
    let map = scan_grid(&grid, &set, &ImagingOptions::default()).unwrap();
    let (ix, iy, _) = map.argmin();
    let z = grid.node(ix, iy);
    assert!((z - truth).norm() < 2.0);
}
