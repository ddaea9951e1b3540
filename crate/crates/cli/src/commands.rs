//! The four commands behind the binary. Outputs are written to a temporary
//! sibling file and renamed into place, so failures never leave partial
//! artifacts.

use std::path::{Path, PathBuf};

use retroscat_core::imaging::{level_set, scan_grid, DerivativeMap, LevelSet};
use retroscat_core::measurement::{add_noise, synthesize_monostatic, MeasurementSet};
use retroscat_core::types::{GridSpec, Line};
use retroscat_core::Error as CoreError;

use crate::config::RunConfig;
use crate::validate::{run_validation, ValidationHooks, ValidationReport};

/// Process exit codes, as documented in the command reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    ValidationFailed = 1,
    BadInput = 2,
    SolverFailed = 3,
    NoCoverage = 4,
}

/// A command failure carrying its exit code and message.
#[derive(Debug)]
pub struct CommandError {
    pub code: ExitCode,
    pub message: String,
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<CoreError> for CommandError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Resonance { .. }
            | CoreError::IllConditioned { .. }
            | CoreError::Stagnation { .. }
            | CoreError::Receiver { .. } => ExitCode::SolverFailed,
            CoreError::Coverage(_) => ExitCode::NoCoverage,
            _ => ExitCode::BadInput,
        };
        CommandError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CmdResult<T> = Result<T, CommandError>;

fn bad_input(message: impl Into<String>) -> CommandError {
    CommandError {
        code: ExitCode::BadInput,
        message: message.into(),
    }
}

/// Writes `contents` through a temporary file in the destination directory.
fn write_atomic(path: &Path, contents: &str) -> CmdResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| bad_input(format!("writing {}: {e}", path.display())))
}

fn amplitude_span(set: &MeasurementSet, line: Line) -> (f64, f64) {
    set.amplitudes(line)
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| {
            (lo.min(a), hi.max(a))
        })
}

/// `forward`: synthesize the measurement CSV from a config.
pub fn cmd_forward(config_path: &Path, out_path: &Path) -> CmdResult<String> {
    let config = RunConfig::load(config_path)?;
    let validated = config.validate()?;
    for warning in validated.geometry.warnings(&validated.scene.params) {
        eprintln!("warning: {warning}");
    }

    let mut set = synthesize_monostatic(
        &validated.scene,
        &validated.geometry,
        validated.engine,
        validated.flip_incidence,
    )
    .map_err(|e| CommandError {
        code: ExitCode::SolverFailed,
        message: e.to_string(),
    })?;
    if let Some((model, seed)) = validated.noise {
        set = add_noise(&set, model, seed)?;
    }

    write_atomic(out_path, &retroscat_core::measurement::to_csv_string(&set))?;
    let (lo0, hi0) = amplitude_span(&set, Line::Gamma0);
    let (lo1, hi1) = amplitude_span(&set, Line::Gamma1);
    Ok(format!(
        "wrote {}: {} receivers/line, Gamma0 amplitude [{lo0:.6e}, {hi0:.6e}], \
         Gamma1 amplitude [{lo1:.6e}, {hi1:.6e}]",
        out_path.display(),
        validated.geometry.n_receivers
    ))
}

/// Serializes a derivative map: a header comment describing the grid, then
/// `z1,z2,d,active_fraction` rows, second coordinate slowest.
pub fn dmap_to_csv(map: &DerivativeMap) -> String {
    let g = &map.grid;
    let mut out = format!(
        "# retroscat-dmap v1, nx={}, ny={}, z1_min={}, z1_max={}, z2_min={}, z2_max={}\n",
        g.nx, g.ny, g.z1_min, g.z1_max, g.z2_min, g.z2_max
    );
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let z = g.node(ix, iy);
            let idx = ix + g.nx * iy;
            out.push_str(&format!(
                "{},{},{},{}\n",
                z.x1, z.x2, map.values[idx], map.active_fraction[idx]
            ));
        }
    }
    out
}

/// Parses a derivative-map CSV back.
pub fn dmap_from_csv(text: &str) -> CmdResult<DerivativeMap> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad_input("empty map file"))?;
    let rest = header
        .strip_prefix("# retroscat-dmap v1, ")
        .ok_or_else(|| bad_input("missing derivative-map header"))?;
    let mut nx = None;
    let mut ny = None;
    let mut z1 = (None, None);
    let mut z2 = (None, None);
    for part in rest.split(", ") {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad_input(format!("bad header field `{part}`")))?;
        match key {
            "nx" => nx = value.parse::<usize>().ok(),
            "ny" => ny = value.parse::<usize>().ok(),
            "z1_min" => z1.0 = value.parse::<f64>().ok(),
            "z1_max" => z1.1 = value.parse::<f64>().ok(),
            "z2_min" => z2.0 = value.parse::<f64>().ok(),
            "z2_max" => z2.1 = value.parse::<f64>().ok(),
            other => return Err(bad_input(format!("unknown header field `{other}`"))),
        }
    }
    let (Some(nx), Some(ny), (Some(z1_min), Some(z1_max)), (Some(z2_min), Some(z2_max))) =
        (nx, ny, z1, z2)
    else {
        return Err(bad_input("incomplete derivative-map header"));
    };
    let grid =
        GridSpec::new((z1_min, z1_max), (z2_min, z2_max), nx, ny).map_err(CommandError::from)?;

    let mut values = Vec::with_capacity(nx * ny);
    let mut active_fraction = Vec::with_capacity(nx * ny);
    for (i, row) in lines.enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 4 {
            return Err(bad_input(format!("line {}: expected 4 fields", i + 2)));
        }
        let d: f64 = fields[2]
            .parse()
            .map_err(|_| bad_input(format!("line {}: bad d value", i + 2)))?;
        let af: f64 = fields[3]
            .parse()
            .map_err(|_| bad_input(format!("line {}: bad active_fraction", i + 2)))?;
        values.push(d);
        active_fraction.push(af);
    }
    if values.len() != nx * ny {
        return Err(bad_input(format!(
            "expected {} data rows, found {}",
            nx * ny,
            values.len()
        )));
    }
    Ok(DerivativeMap {
        grid,
        values,
        active_fraction,
        floor_hits: 0,
    })
}

/// 8-bit grayscale PGM (plain P2): 255 at the most negative value, 0 at the
/// most positive, 128 everywhere when the map is constant. Rows run from
/// the top of the region of interest down.
pub fn dmap_to_pgm(map: &DerivativeMap) -> String {
    let g = &map.grid;
    let mut out = format!("P2\n{} {}\n255\n", g.nx, g.ny);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &map.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for iy in (0..g.ny).rev() {
        let mut row = String::with_capacity(4 * g.nx);
        for ix in 0..g.nx {
            let v = map.values[ix + g.nx * iy];
            let gray = if hi == lo {
                128
            } else {
                ((hi - v) / (hi - lo) * 255.0).round() as u32
            };
            if ix > 0 {
                row.push(' ');
            }
            row.push_str(&gray.to_string());
        }
        row.push('\n');
        out.push_str(&row);
    }
    out
}

/// `image`: scan the probe grid against a measurement file and emit the
/// derivative map as CSV plus PGM.
pub fn cmd_image(
    config_path: &Path,
    measurements_path: &Path,
    out_prefix: &Path,
) -> CmdResult<String> {
    let config = RunConfig::load(config_path)?;
    let validated = config.validate()?;
    let set = retroscat_core::measurement::read_csv(measurements_path)?;
    if set.geometry != validated.geometry {
        return Err(bad_input(format!(
            "measurement geometry {:?} does not match the config geometry {:?}",
            set.geometry, validated.geometry
        )));
    }

    let map = scan_grid(&validated.grid, &set, &validated.imaging)?;
    if map.active_fraction.iter().all(|&f| f == 0.0) {
        return Err(CommandError {
            code: ExitCode::NoCoverage,
            message: "every grid node lost aperture coverage".to_string(),
        });
    }

    let csv_path = out_prefix.with_extension("csv");
    let pgm_path = out_prefix.with_extension("pgm");
    write_atomic(&csv_path, &dmap_to_csv(&map))?;
    write_atomic(&pgm_path, &dmap_to_pgm(&map))?;

    let (ix, iy, dmin) = map.argmin();
    let z = map.grid.node(ix, iy);
    Ok(format!(
        "wrote {} and {}: most negative d = {dmin:.6e} at ({}, {}), floor hits {}",
        csv_path.display(),
        pgm_path.display(),
        z.x1,
        z.x2,
        map.floor_hits
    ))
}

/// Serializes level-set segments as `x1a,x2a,x1b,x2b` rows.
pub fn contour_to_csv(ls: &LevelSet) -> String {
    let mut out = format!(
        "# retroscat-contour v1, d0={}, segments={}\n",
        ls.level,
        ls.contour.len()
    );
    for (a, b) in &ls.contour {
        out.push_str(&format!("{},{},{},{}\n", a.x1, a.x2, b.x1, b.x2));
    }
    out
}

/// `levelset`: extract a contour from a stored derivative map.
pub fn cmd_levelset(map_path: &Path, d0: f64, out_path: &Path) -> CmdResult<String> {
    let text = std::fs::read_to_string(map_path)
        .map_err(|e| bad_input(format!("reading {}: {e}", map_path.display())))?;
    let map = dmap_from_csv(&text)?;
    let ls = level_set(&map, d0);
    write_atomic(out_path, &contour_to_csv(&ls))?;
    Ok(format!(
        "wrote {}: {} segments at level {d0}",
        out_path.display(),
        ls.contour.len()
    ))
}

/// `validate`: run the oracle suite and print one line per check.
pub fn cmd_validate() -> (ValidationReport, ExitCode) {
    let report = run_validation(&ValidationHooks::default());
    let code = if report.all_passed() {
        ExitCode::Ok
    } else {
        ExitCode::ValidationFailed
    };
    (report, code)
}
