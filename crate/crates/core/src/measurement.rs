//! Synthetic monostatic amplitude measurements on the two lines, optional
//! noise, and the on-disk CSV format.
//!
//! Every receiver `x` both illuminates and records: the incidence is the
//! unit vector `x / |x|` (optionally flipped) and the stored sample is the
//! modulus of the scattered field back at `x`. One forward solve runs per
//! receiver; the loop is parallel but assembles its output in receiver
//! order, so results are bitwise reproducible under any thread schedule.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::analytic::modal_coefficients;
use crate::bie::{assemble_and_solve, ParametricBoundary};
use crate::error::{Error, Result};
use crate::types::{receiver_positions, Line, MeasurementGeometry, Point2, Scene};

/// Forward engine choice for measurement synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    /// Modal series; disks only. `truncation = None` uses the auto rule.
    Analytic { truncation: Option<usize> },
    /// Boundary-integral solver on `n_nodes` quadrature nodes.
    Bie { n_nodes: usize },
}

impl Engine {
    fn describe(&self) -> String {
        match self {
            Engine::Analytic { truncation: None } => "analytic(auto)".to_string(),
            Engine::Analytic {
                truncation: Some(n),
            } => format!("analytic(N={n})"),
            Engine::Bie { n_nodes } => format!("bie(nodes={n_nodes})"),
        }
    }
}

/// Noise applied to clean amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// `a <- a * (1 + sigma * g)` with `g` standard normal.
    MultiplicativeGaussian { sigma: f64 },
    /// `a <- max(0, a + sigma * g * mean(a))`.
    AdditiveGaussian { sigma: f64 },
}

/// One amplitude sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRecord {
    pub line: Line,
    pub x1: f64,
    pub amplitude: f64,
}

/// How a measurement set came to be. Descriptions are informational; only
/// the seed takes part in equality and persistence.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub scene: String,
    pub noise: String,
    pub seed: Option<u64>,
}

/// Amplitude-only data on both lines: the `Gamma0` block first, then the
/// `Gamma1` block, each in ascending abscissa order.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub geometry: MeasurementGeometry,
    pub records: Vec<AmplitudeRecord>,
    pub provenance: Provenance,
}

impl PartialEq for MeasurementSet {
    /// Data equality: geometry, records and seed. The free-text provenance
    /// descriptions are not persisted and do not participate.
    fn eq(&self, other: &Self) -> bool {
        self.geometry == other.geometry
            && self.records == other.records
            && self.provenance.seed == other.provenance.seed
    }
}

impl MeasurementSet {
    /// Amplitudes of one line in abscissa order.
    pub fn amplitudes(&self, line: Line) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.line == line)
            .map(|r| r.amplitude)
            .collect()
    }

    /// Checks the structural invariant: per line, exactly `n_receivers`
    /// records whose abscissas match the receiver grid bitwise.
    #[allow(clippy::needless_range_loop)]
    pub fn validate(&self) -> Result<()> {
        let n = self.geometry.n_receivers;
        if self.records.len() != 2 * n {
            return Err(Error::Format(format!(
                "expected {} records, found {}",
                2 * n,
                self.records.len()
            )));
        }
        let abscissas = self.geometry.abscissas();
        for (block, line) in [(0, Line::Gamma0), (1, Line::Gamma1)] {
            for j in 0..n {
                let r = &self.records[block * n + j];
                if r.line != line || r.x1 != abscissas[j] {
                    return Err(Error::Format(format!(
                        "record {} does not match the receiver grid",
                        block * n + j
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Runs one forward solve per receiver on both lines and records the
/// backscattered amplitudes.
pub fn synthesize_monostatic(
    scene: &Scene,
    geometry: &MeasurementGeometry,
    engine: Engine,
    flip_incidence: bool,
) -> Result<MeasurementSet> {
    scene.validate_against(geometry)?;
    let boundary = match engine {
        Engine::Bie { n_nodes } => Some(ParametricBoundary::from_object(&scene.object, n_nodes)?),
        Engine::Analytic { .. } => None,
    };

    let solve_one = |x: Point2| -> Result<f64> {
        let mut eta = x * (1.0 / x.norm());
        if flip_incidence {
            eta = -eta;
        }
        let u: Complex64 = match engine {
            Engine::Analytic { truncation } => {
                modal_coefficients(scene, eta, truncation)?.scattered_field(x)?
            }
            Engine::Bie { .. } => {
                assemble_and_solve(boundary.as_ref().unwrap(), &scene.params, eta)?
                    .evaluate_scattered(x)?
                    .value
            }
        };
        Ok(u.norm())
    };

    let mut records = Vec::with_capacity(2 * geometry.n_receivers);
    for line in [Line::Gamma0, Line::Gamma1] {
        let positions = receiver_positions(geometry, line);
        let amplitudes: Vec<Result<f64>> = positions.par_iter().map(|&x| solve_one(x)).collect();
        for (j, (pos, amp)) in positions.iter().zip(amplitudes).enumerate() {
            let amplitude = amp.map_err(|e| Error::Receiver {
                receiver: j,
                line: match line {
                    Line::Gamma0 => "Gamma0",
                    Line::Gamma1 => "Gamma1",
                },
                source: Box::new(e),
            })?;
            records.push(AmplitudeRecord {
                line,
                x1: pos.x1,
                amplitude,
            });
        }
    }

    Ok(MeasurementSet {
        geometry: *geometry,
        records,
        provenance: Provenance {
            scene: format!(
                "{:?} engine={} flip={}",
                scene.object,
                engine.describe(),
                flip_incidence
            ),
            noise: "none".to_string(),
            seed: None,
        },
    })
}

/// One standard normal draw by the Box-Muller transform on two uniform
/// variates taken from the top 53 bits of ChaCha12 output words.
fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Perturbs the amplitudes with the chosen model. The generator is ChaCha12
/// seeded with `seed`; records consume one normal draw each, in storage
/// order, so equal seeds give bitwise-equal outputs.
pub fn add_noise(set: &MeasurementSet, model: NoiseModel, seed: u64) -> Result<MeasurementSet> {
    let sigma = match model {
        NoiseModel::MultiplicativeGaussian { sigma } | NoiseModel::AdditiveGaussian { sigma } => {
            sigma
        }
    };
    if sigma < 0.0 || sigma.is_nan() {
        return Err(Error::domain("sigma", format!("must be >= 0, got {sigma}")));
    }

    let mean = set.records.iter().map(|r| r.amplitude).sum::<f64>() / set.records.len() as f64;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = set.clone();
    for record in &mut out.records {
        let g = standard_normal(&mut rng);
        record.amplitude = match model {
            NoiseModel::MultiplicativeGaussian { .. } => record.amplitude * (1.0 + sigma * g),
            NoiseModel::AdditiveGaussian { .. } => (record.amplitude + sigma * g * mean).max(0.0),
        };
    }
    out.provenance.noise = match model {
        NoiseModel::MultiplicativeGaussian { .. } => {
            format!("multiplicative_gaussian(sigma={sigma})")
        }
        NoiseModel::AdditiveGaussian { .. } => format!("additive_gaussian(sigma={sigma})"),
    };
    out.provenance.seed = Some(seed);
    Ok(out)
}

// ---------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------
//
// Header:  `# retroscat-measurements v1, gamma0=<g0>, gamma1=<g1>, n=<n>, seed=<s|none>`
// Rows:    `line,x1,amplitude` with line 0 or 1, shortest round-trip
//          decimals, LF endings.

/// Serializes a set into the measurement CSV format.
pub fn to_csv_string(set: &MeasurementSet) -> String {
    let seed = match set.provenance.seed {
        Some(s) => s.to_string(),
        None => "none".to_string(),
    };
    let mut out = format!(
        "# retroscat-measurements v1, gamma0={}, gamma1={}, n={}, seed={}\n",
        set.geometry.gamma0, set.geometry.gamma1, set.geometry.n_receivers, seed
    );
    for r in &set.records {
        out.push_str(&format!("{},{},{}\n", r.line.index(), r.x1, r.amplitude));
    }
    out
}

/// Writes the measurement CSV to a file.
pub fn write_csv(set: &MeasurementSet, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, to_csv_string(set))?;
    Ok(())
}

/// Parses one data row `line,x1,amplitude`. `lineno` is 1-based and only
/// used in error messages.
pub fn parse_record(row: &str, lineno: usize) -> Result<AmplitudeRecord> {
    let mut fields = row.split(',');
    let mut next = |name: &str| {
        fields
            .next()
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("missing field `{name}`"),
            })
            .map(str::trim)
    };
    let line_idx: u8 = next("line")?.parse().map_err(|_| Error::Parse {
        line: lineno,
        message: "line index must be 0 or 1".to_string(),
    })?;
    let line = Line::from_index(line_idx).ok_or_else(|| Error::Parse {
        line: lineno,
        message: format!("line index must be 0 or 1, got {line_idx}"),
    })?;
    let x1: f64 = next("x1")?.parse().map_err(|_| Error::Parse {
        line: lineno,
        message: "x1 is not a number".to_string(),
    })?;
    let amplitude: f64 = next("amplitude")?.parse().map_err(|_| Error::Parse {
        line: lineno,
        message: "amplitude is not a number".to_string(),
    })?;
    if fields.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            message: "trailing fields after amplitude".to_string(),
        });
    }
    Ok(AmplitudeRecord {
        line,
        x1,
        amplitude,
    })
}

/// Parses a measurement CSV.
pub fn from_csv_string(text: &str) -> Result<MeasurementSet> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".to_string()))?;
    let rest = header
        .strip_prefix("# retroscat-measurements v1, ")
        .ok_or_else(|| Error::Format("missing measurement header".to_string()))?;

    let mut gamma0 = None;
    let mut gamma1 = None;
    let mut n = None;
    let mut seed = None;
    for part in rest.split(", ") {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header field `{part}`")))?;
        match key {
            "gamma0" => gamma0 = Some(value.parse::<f64>()),
            "gamma1" => gamma1 = Some(value.parse::<f64>()),
            "n" => n = Some(value.parse::<usize>()),
            "seed" => {
                seed = Some(if value == "none" {
                    Ok(None)
                } else {
                    value.parse::<u64>().map(Some)
                })
            }
            other => return Err(Error::Format(format!("unknown header field `{other}`"))),
        }
    }
    let bad = |what: &str| Error::Format(format!("header field `{what}` missing or malformed"));
    let gamma0 = gamma0
        .ok_or_else(|| bad("gamma0"))?
        .map_err(|_| bad("gamma0"))?;
    let gamma1 = gamma1
        .ok_or_else(|| bad("gamma1"))?
        .map_err(|_| bad("gamma1"))?;
    let n = n.ok_or_else(|| bad("n"))?.map_err(|_| bad("n"))?;
    let seed = seed.ok_or_else(|| bad("seed"))?.map_err(|_| bad("seed"))?;
    if n < 2 {
        return Err(Error::Format(format!(
            "header requires n_receivers >= 2, got {n}"
        )));
    }

    let mut records = Vec::with_capacity(2 * n);
    for (idx, row) in lines.enumerate() {
        records.push(parse_record(row, idx + 2)?);
    }
    if records.len() != 2 * n {
        return Err(Error::Format(format!(
            "expected {} data rows, found {}",
            2 * n,
            records.len()
        )));
    }

    let first = records[0].x1;
    let last = records[n - 1].x1;
    let geometry = MeasurementGeometry::new(gamma0, gamma1, (first, last), n)
        .map_err(|e| Error::Format(format!("header does not define a valid geometry: {e}")))?;

    let set = MeasurementSet {
        geometry,
        records,
        provenance: Provenance {
            scene: "(imported)".to_string(),
            noise: "(imported)".to_string(),
            seed,
        },
    };
    set.validate()
        .map_err(|_| Error::Format("rows do not match the receiver grid".to_string()))?;
    Ok(set)
}

/// Reads a measurement CSV from a file.
pub fn read_csv(path: &std::path::Path) -> Result<MeasurementSet> {
    from_csv_string(&std::fs::read_to_string(path)?)
}
