//! One TOML file per experiment: physical constants, measurement geometry,
//! scene, noise, probe grid and imaging options. Everything validates
//! before any computation starts.

use serde::Deserialize;
use std::path::Path;

use retroscat_core::imaging::ImagingOptions;
use retroscat_core::measurement::{Engine, NoiseModel};
use retroscat_core::types::{
    derive_params, GridSpec, MeasurementGeometry, Point2, Scene, SceneObject, ShapeKind,
};
use retroscat_core::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub physical: PhysicalBlock,
    pub geometry: GeometryBlock,
    pub scene: SceneBlock,
    #[serde(default)]
    pub noise: NoiseBlock,
    pub grid: GridBlock,
    #[serde(default)]
    pub imaging: ImagingBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub omega: f64,
    pub eps0: f64,
    pub mu0: f64,
    pub eps_star: f64,
    pub mu_star: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub gamma0: f64,
    pub gamma1: f64,
    pub aperture: [f64; 2],
    pub n_receivers: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneBlock {
    /// Catalog name: `disk(r)`, `ellipse(a,b)`, `kite` or `kite(scale)`.
    pub object: String,
    pub center: [f64; 2],
    /// `analytic` (disks only) or `bie`.
    pub engine: String,
    /// Modal truncation for the analytic engine; defaults to the auto rule.
    #[serde(default)]
    pub truncation: Option<usize>,
    /// Quadrature nodes for the boundary-integral engine.
    #[serde(default = "default_n_nodes")]
    pub n_nodes: usize,
}

fn default_n_nodes() -> usize {
    128
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    /// `none`, `multiplicative_gaussian` or `additive_gaussian`.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    /// `[z1_min, z1_max, z2_min, z2_max]`.
    pub roi: [f64; 4],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ImagingBlock {
    /// Denominator floor; omitted selects `1e-12 * max(A1)`.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub normalize_coverage: bool,
    #[serde(default)]
    pub flip_incidence: bool,
    /// Level-set levels of interest, recorded with the experiment.
    #[serde(default)]
    pub d0: Vec<f64>,
}

/// Everything validated and converted to core types.
#[derive(Debug)]
pub struct ValidatedConfig {
    pub scene: Scene,
    pub geometry: MeasurementGeometry,
    pub grid: GridSpec,
    pub engine: Engine,
    pub noise: Option<(NoiseModel, u64)>,
    pub imaging: ImagingOptions,
    pub flip_incidence: bool,
    pub d0_levels: Vec<f64>,
}

/// Parses a catalog object name.
pub fn parse_object(name: &str, center: Point2) -> Result<SceneObject> {
    let bad = |msg: String| Error::domain("scene.object", msg);
    let (kind, args) = match name.find('(') {
        None => (name.trim(), Vec::new()),
        Some(open) => {
            let close = name
                .rfind(')')
                .ok_or_else(|| bad(format!("unbalanced parentheses in `{name}`")))?;
            let args: Vec<f64> = name[open + 1..close]
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(format!("non-numeric size in `{name}`")))?;
            (name[..open].trim(), args)
        }
    };
    let kind = match (kind, args.as_slice()) {
        ("disk", [radius]) => ShapeKind::Disk { radius: *radius },
        ("ellipse", [a, b]) => ShapeKind::Ellipse { a: *a, b: *b },
        ("kite", []) => ShapeKind::Kite { scale: 1.0 },
        ("kite", [scale]) => ShapeKind::Kite { scale: *scale },
        _ => {
            return Err(bad(format!(
                "unknown object `{name}`; expected disk(r), ellipse(a,b) or kite[(scale)]"
            )))
        }
    };
    Ok(SceneObject { kind, center })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Format(format!("config {}: {e}", path.display())))
    }

    /// Validates every block against the module invariants. The
    /// `RETROSCAT_SEED` environment variable overrides the noise seed.
    pub fn validate(&self) -> Result<ValidatedConfig> {
        let params = derive_params(
            self.physical.omega,
            self.physical.eps0,
            self.physical.mu0,
            self.physical.eps_star,
            self.physical.mu_star,
        )?;
        let geometry = MeasurementGeometry::new(
            self.geometry.gamma0,
            self.geometry.gamma1,
            (self.geometry.aperture[0], self.geometry.aperture[1]),
            self.geometry.n_receivers,
        )?;
        let object = parse_object(
            &self.scene.object,
            Point2::new(self.scene.center[0], self.scene.center[1]),
        )?;
        let scene = Scene::new(object, params)?;
        scene.validate_against(&geometry)?;

        let engine = match self.scene.engine.as_str() {
            "analytic" => {
                if scene.object.as_disk().is_none() {
                    return Err(Error::domain(
                        "scene.engine",
                        "the analytic engine requires a disk object",
                    ));
                }
                Engine::Analytic {
                    truncation: self.scene.truncation,
                }
            }
            "bie" => Engine::Bie {
                n_nodes: self.scene.n_nodes,
            },
            other => {
                return Err(Error::domain(
                    "scene.engine",
                    format!("unknown engine `{other}`; expected analytic or bie"),
                ))
            }
        };

        let seed = match std::env::var("RETROSCAT_SEED") {
            Ok(text) => text.parse::<u64>().map_err(|_| {
                Error::domain("RETROSCAT_SEED", format!("not a 64-bit seed: `{text}`"))
            })?,
            Err(_) => self.noise.seed,
        };
        let noise = match self.noise.model.as_deref() {
            None | Some("none") => None,
            Some("multiplicative_gaussian") => Some((
                NoiseModel::MultiplicativeGaussian {
                    sigma: self.noise.sigma,
                },
                seed,
            )),
            Some("additive_gaussian") => Some((
                NoiseModel::AdditiveGaussian {
                    sigma: self.noise.sigma,
                },
                seed,
            )),
            Some(other) => {
                return Err(Error::domain(
                    "noise.model",
                    format!(
                        "unknown model `{other}`; expected none, \
                         multiplicative_gaussian or additive_gaussian"
                    ),
                ))
            }
        };
        if let Some((model, _)) = &noise {
            let sigma = match model {
                NoiseModel::MultiplicativeGaussian { sigma }
                | NoiseModel::AdditiveGaussian { sigma } => *sigma,
            };
            if sigma < 0.0 || sigma.is_nan() {
                return Err(Error::domain("noise.sigma", "must be >= 0"));
            }
        }

        let grid = GridSpec::new(
            (self.grid.roi[0], self.grid.roi[1]),
            (self.grid.roi[2], self.grid.roi[3]),
            self.grid.nx,
            self.grid.ny,
        )?;
        grid.validate_against(&geometry)?;

        if let Some(tau) = self.imaging.tau {
            if tau <= 0.0 || tau.is_nan() {
                return Err(Error::domain("imaging.tau", "must be > 0 when given"));
            }
        }
        if self.imaging.d0.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("imaging.d0", "levels must be finite"));
        }

        Ok(ValidatedConfig {
            scene,
            geometry,
            grid,
            engine,
            noise,
            imaging: ImagingOptions {
                tau: self.imaging.tau,
                normalize_coverage: self.imaging.normalize_coverage,
            },
            flip_incidence: self.imaging.flip_incidence,
            d0_levels: self.imaging.d0.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
        [physical]
        omega = 6.283185307179586
        eps0 = 1.0
        mu0 = 1.0
        eps_star = 4.0
        mu_star = 1.0

        [geometry]
        gamma0 = 60.0
        gamma1 = 80.0
        aperture = [-30.0, 30.0]
        n_receivers = 121

        [scene]
        object = "disk(0.5)"
        center = [0.4, 1.0]
        engine = "analytic"

        [grid]
        roi = [-5.0, 5.0, -3.0, 4.0]
        nx = 64
        ny = 64
    "#;

    #[test]
    fn reference_config_validates() {
        let config: RunConfig = toml::from_str(REFERENCE).unwrap();
        let validated = config.validate().unwrap();
        assert_eq!(validated.geometry.n_receivers, 121);
        assert!(validated.noise.is_none());
        assert!(!validated.flip_incidence);
        assert!(matches!(validated.engine, Engine::Analytic { .. }));
    }

    #[test]
    fn equal_lines_name_the_field() {
        let text = REFERENCE.replace("gamma1 = 80.0", "gamma1 = 60.0");
        let config: RunConfig = toml::from_str(&text).unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("gamma0 must differ from gamma1"));
    }

    #[test]
    fn analytic_engine_rejects_non_disks() {
        let text = REFERENCE.replace("disk(0.5)", "kite(0.4)");
        let config: RunConfig = toml::from_str(&text).unwrap();
        assert!(config.validate().is_err());
        let text = text.replace("\"analytic\"", "\"bie\"");
        let config: RunConfig = toml::from_str(&text).unwrap();
        assert!(matches!(
            config.validate().unwrap().engine,
            Engine::Bie { n_nodes: 128 }
        ));
    }

    #[test]
    fn object_names_parse() {
        let center = Point2::new(0.0, 0.0);
        assert!(parse_object("disk(0.5)", center).is_ok());
        assert!(parse_object("ellipse(1.0, 0.5)", center).is_ok());
        assert!(parse_object("kite", center).is_ok());
        assert!(parse_object("kite(2)", center).is_ok());
        assert!(parse_object("square(1)", center).is_err());
        assert!(parse_object("disk(a)", center).is_err());
        assert!(parse_object("disk(0.5", center).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = REFERENCE.replace("n_receivers = 121", "n_receivers = 121\nbogus = 1");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }
}
