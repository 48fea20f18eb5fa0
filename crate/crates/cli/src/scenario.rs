//! Flow scenario files: JSON documents describing the ambient surface, the
//! initial curve, the flow policy and where results go.

use std::path::Path;

use anyhow::{bail, Context, Result};
use lmcf::flow1d::{
    build_curve, presets, Ambient, CurveOptions, FlowPolicy, FlowState, Horizon, RecordOptions, VertexLoop,
};
use lmcf::novikov::{parse_rational, CoefficientField, Scalar};
use lmcf::planes::C64;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub ambient: Ambient,
    pub curve: CurvePreset,
    #[serde(default = "default_true")]
    pub graded: bool,
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "default_field")]
    pub field: CoefficientField,
    /// Rational literals, one per component.
    #[serde(default)]
    pub holonomies: Vec<String>,
    #[serde(default)]
    pub grading_shifts: Vec<i64>,
    #[serde(default)]
    pub policy: FlowPolicy,
    pub horizon: Horizon,
    #[serde(default)]
    pub record: RecordOptions,
    #[serde(default)]
    pub outputs: Outputs,
    /// Recorded with the run; the flow itself draws no random numbers.
    #[serde(default)]
    pub seed: u64,
}

fn default_true() -> bool {
    true
}

fn default_field() -> CoefficientField {
    CoefficientField::Rational
}

fn default_vertices() -> usize {
    240
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurvePreset {
    Circle {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    /// Figure-eight with prescribed lobe areas.
    Infinity {
        right_area: f64,
        left_area: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    /// x = cos t + width·cos³t, y = height·sin 4t.
    Chain {
        width: f64,
        height: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    WallChain {
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    /// Graph of a sine wave in the class (1, 0) of the torus.
    TorusWave {
        amplitude: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    Loops { loops: Vec<LoopInput> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopInput {
    pub points: Vec<[f64; 2]>,
    /// Homology class on the torus.
    #[serde(default)]
    pub class: [i64; 2],
}

/// Output file names, relative to the output directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub csv: String,
    pub events: String,
    pub record: String,
    /// Directory for SVG frames; used when snapshots are recorded.
    pub frames: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            csv: "flow.csv".into(),
            events: "events.json".into(),
            record: "run_record.json".into(),
            frames: "frames".into(),
        }
    }
}

/// Parses a scenario from JSON text; errors name the offending field.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            anyhow::anyhow!("schema violation: {inner}")
        } else {
            anyhow::anyhow!("schema violation at `{path}`: {inner}")
        }
    })?;
    validate(&scenario)?;
    Ok(scenario)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenario_str(&text).with_context(|| format!("in {}", path.display()))
}

fn validate(s: &Scenario) -> Result<()> {
    s.ambient.validate().context("ambient")?;
    if !(s.horizon.t_max.is_finite() && s.horizon.t_max > 0.0) {
        bail!("schema violation at `horizon.t_max`: must be positive, got {}", s.horizon.t_max);
    }
    if let Some(dt) = s.record.snapshot_interval {
        if !(dt.is_finite() && dt > 0.0) {
            bail!("schema violation at `record.snapshot_interval`: must be positive, got {dt}");
        }
    }
    if !(s.policy.dt_factor > 0.0 && s.policy.dt_factor <= 0.25) {
        bail!("schema violation at `policy.dt_factor`: must lie in (0, 0.25], got {}", s.policy.dt_factor);
    }
    let plane_only = matches!(s.curve, CurvePreset::Infinity { .. } | CurvePreset::Chain { .. } | CurvePreset::WallChain { .. });
    if plane_only && !s.ambient.is_plane() {
        bail!("schema violation at `curve.preset`: this preset lives in the plane");
    }
    if matches!(s.curve, CurvePreset::TorusWave { .. }) && s.ambient.is_plane() {
        bail!("schema violation at `curve.preset`: torus_wave needs a torus ambient");
    }
    Ok(())
}

fn curve_options(s: &Scenario) -> Result<CurveOptions> {
    let holonomies = s
        .holonomies
        .iter()
        .enumerate()
        .map(|(i, h)| {
            parse_rational(h)
                .and_then(|q| Scalar::from_rational(s.field, q))
                .with_context(|| format!("holonomies[{i}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveOptions { graded: s.graded, exact: s.exact, field: s.field, holonomies, grading_shifts: s.grading_shifts.clone() })
}

/// Builds the initial flow state.
pub fn build_state(s: &Scenario) -> Result<FlowState> {
    let options = curve_options(s)?;
    let from_loops = |loops: Vec<VertexLoop>| build_curve(s.ambient, loops, &options);
    let curve = match &s.curve {
        CurvePreset::Infinity { right_area, left_area, vertices } => presets::infinity(*right_area, *left_area, *vertices, &options)?,
        CurvePreset::Circle { center, radius, vertices } => {
            from_loops(vec![presets::circle(C64::new(center[0], center[1]), *radius, *vertices)])?
        }
        CurvePreset::Chain { width, height, vertices } => from_loops(vec![presets::chain(*width, *height, *vertices)])?,
        CurvePreset::WallChain { vertices } => from_loops(vec![presets::wall_chain(*vertices)])?,
        CurvePreset::TorusWave { amplitude, vertices } => {
            let tau = s.ambient.tau().map(|t| [t.re, t.im]).unwrap_or([0.0, 1.0]);
            from_loops(vec![presets::torus_wave(tau, *amplitude, *vertices)])?
        }
        CurvePreset::Loops { loops } => from_loops(
            loops
                .iter()
                .map(|l| VertexLoop { points: l.points.iter().map(|p| C64::new(p[0], p[1])).collect(), class: l.class })
                .collect(),
        )?,
    };
    Ok(FlowState::new(curve, s.policy.clone())?)
}
