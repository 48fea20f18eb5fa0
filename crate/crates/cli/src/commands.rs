//! Command definitions and their handlers.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lmcf::flow1d::{run_with_surgeries, singularity_probe, Trajectory};
use lmcf::solitons::u1::{u1_solve, U1Problem};
use lmcf::solitons::{default_sample_grid, family_angles, family_invert, Soliton, SolitonKind, SolitonParams};
use lmcf::stability::{check_axioms, global_phase, hn_filtration, slope, CentralCharge, ToyCategory};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::frames::emit_frames;
use crate::output::{event_log, flow_csv, sha256_hex, write_output, RunRecord};
use crate::scenario::{build_state, parse_scenario};

#[derive(Parser, Debug)]
#[command(name = "lmcf", version, about = "Solitons, curve flows with surgeries and stability checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Explicit soliton families and the U(1) potential equation.
    #[command(subcommand)]
    Soliton(SolitonCmd),
    /// Curve-shortening flow of immersed curves with surgeries.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Slicing axioms, filtrations and phases on toy categories.
    #[command(subcommand)]
    Stability(StabilityCmd),
}

#[derive(Subcommand, Debug)]
pub enum SolitonCmd {
    /// Asymptotic angles of a family.
    Angles {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameters with prescribed asymptotic angles.
    Invert {
        #[arg(long, value_enum, default_value = "lawlor")]
        family: Family,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        phi: Vec<f64>,
        /// Neck size, for the neck family.
        #[arg(long)]
        area: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples along the profile parameter, as CSV.
    Sample {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        y_min: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        y_max: f64,
        #[arg(long, default_value_t = 101)]
        count: usize,
        /// Direction (unit vector) or chart coordinates; a balanced default otherwise.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Soliton equation residual with second- and fourth-order stencils.
    Residual {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 3.0)]
        y_max: f64,
        #[arg(long, default_value_t = 13)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay rate towards the asymptotic cone.
    Asymptote {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,50")]
        radii: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dirichlet problem for the U(1)-invariant potential with linear boundary data.
    U1solve {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 33)]
        nx: usize,
        #[arg(long, default_value_t = 33)]
        ny: usize,
        #[arg(long, value_delimiter = ',', default_value = "-1,1", allow_hyphen_values = true)]
        x_range: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.5", allow_hyphen_values = true)]
        y_range: Vec<f64>,
        /// Boundary data c0 + cx·x + cy·y.
        #[arg(long, value_delimiter = ',', default_value = "0,1,0", allow_hyphen_values = true)]
        linear: Vec<f64>,
        /// Grid values as CSV.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Lawlor,
    Expander,
    Translator,
    GrimReaper,
}

impl Family {
    fn kind(self) -> SolitonKind {
        match self {
            Family::Lawlor => SolitonKind::Lawlor,
            Family::Expander => SolitonKind::Expander,
            Family::Translator => SolitonKind::Translator,
            Family::GrimReaper => SolitonKind::GrimReaper,
        }
    }
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value = "lawlor")]
    pub family: Family,
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Dimension; checked against the number of a-values when given.
    #[arg(long)]
    pub m: Option<usize>,
}

impl FamilyArgs {
    fn params(&self) -> Result<SolitonParams> {
        let p = match self.family {
            Family::Lawlor => SolitonParams::lawlor(&self.a),
            Family::Expander => SolitonParams::expander(self.alpha, &self.a),
            Family::Translator => SolitonParams::translator(self.alpha, &self.a),
            Family::GrimReaper => SolitonParams::grim_reaper(),
        };
        if let Some(m) = self.m {
            if m != p.m {
                bail!("--m {m} does not match {} a-values for {:?}", self.a.len(), self.family);
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand, Debug)]
pub enum FlowCmd {
    /// Runs a scenario and writes the CSV series, event log, frames and run record.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Runs a scenario and classifies the final blow-up.
    Probe {
        scenario: PathBuf,
        /// Singular time; extrapolated from the curvature when absent.
        #[arg(long)]
        blowup_time: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum StabilityCmd {
    /// Checks the slicing axioms.
    Check {
        document: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Harder-Narasimhan filtration of one object.
    Hn {
        document: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
    /// Global phase and slope of a class.
    Phase {
        document: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        class: Vec<i64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
}

/// Category and central charge in one JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityDocument {
    pub category: ToyCategory,
    pub charge: CentralCharge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The run ended in a modeled terminal singularity.
    Terminal,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Soliton(c) => soliton(c).map(|_| Outcome::Success),
        Command::Flow(c) => flow(c),
        Command::Stability(c) => stability(c).map(|_| Outcome::Success),
    }
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    print!("{text}");
    if let Some(p) = out {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn default_direction(p: &SolitonParams) -> Vec<f64> {
    match p.kind {
        SolitonKind::Translator => vec![0.0; p.m - 1],
        SolitonKind::GrimReaper => Vec::new(),
        _ => vec![1.0 / (p.m as f64).sqrt(); p.m],
    }
}

fn soliton(cmd: SolitonCmd) -> Result<()> {
    match cmd {
        SolitonCmd::Angles { family, out } => {
            let p = family.params()?;
            let d = family_angles(&p)?;
            let value = json!({
                "family": p.kind, "m": p.m, "a": p.a, "alpha": p.alpha,
                "phi": d.phi, "sum": d.sum(), "area": d.area,
            });
            emit_json(&value, out.as_deref())
        }
        SolitonCmd::Invert { family, alpha, phi, area, out } => {
            if family == Family::Lawlor && area.is_none() {
                bail!("--area is required for the lawlor family; the angles fix the shape only up to scale");
            }
            let a = family_invert(family.kind(), alpha, &phi, area)?;
            let params = match family {
                Family::Lawlor => SolitonParams::lawlor(&a),
                Family::Expander => SolitonParams::expander(alpha, &a),
                Family::Translator => SolitonParams::translator(alpha, &a),
                Family::GrimReaper => bail!("the grim reaper has no parameters to invert"),
            };
            let back = family_angles(&params)?;
            let error = back.phi.iter().zip(&phi).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            emit_json(&json!({ "family": family.kind(), "alpha": alpha, "phi": phi, "a": a, "round_trip_error": error }), out.as_deref())
        }
        SolitonCmd::Sample { family, y_min, y_max, count, x, out } => {
            let p = family.params()?;
            let s = Soliton::build(&p)?;
            let x = if x.is_empty() { default_direction(&p) } else { x };
            let mut csv = String::from("# lmcf-soliton-csv v1\ny");
            for i in 0..x.len() {
                csv += &format!(",x{}", i + 1);
            }
            let coords = s.point(0.0, &x).map(|v| v.len()).unwrap_or(p.m);
            for i in 0..coords {
                csv += &format!(",re{0},im{0}", i + 1);
            }
            csv += ",theta\n";
            let count = count.max(2);
            for i in 0..count {
                let y = y_min + (y_max - y_min) * i as f64 / (count - 1) as f64;
                let sample = s.sample(y, &x)?;
                let mut row = vec![y.to_string()];
                row.extend(sample.x.iter().map(|v| v.to_string()));
                for z in &sample.point {
                    row.push(z.re.to_string());
                    row.push(z.im.to_string());
                }
                row.push(sample.theta.to_string());
                csv += &row.join(",");
                csv.push('\n');
            }
            match out {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        SolitonCmd::Residual { family, h, y_max, points, out } => {
            let p = family.params()?;
            let s = Soliton::build(&p)?;
            let points = points.max(2);
            let ys: Vec<f64> = (0..points).map(|i| -y_max + 2.0 * y_max * i as f64 / (points - 1) as f64).collect();
            let grid: Vec<(f64, Vec<f64>)> = match p.kind {
                SolitonKind::Lawlor | SolitonKind::Expander => default_sample_grid(p.m, &ys),
                SolitonKind::Translator => ys.iter().map(|y| (*y, vec![0.3; p.m - 1])).collect(),
                _ => ys.iter().map(|y| (y.clamp(-1.2, 1.2), Vec::new())).collect(),
            };
            let mut worst = [0.0f64; 2];
            for (y, x) in &grid {
                worst[0] = worst[0].max(s.residual_at(*y, x, h, 2)?);
                worst[1] = worst[1].max(s.residual_at(*y, x, h, 4)?);
            }
            emit_json(
                &json!({ "family": p.kind, "h": h, "samples": grid.len(), "residual_order2": worst[0], "residual_order4": worst[1] }),
                out.as_deref(),
            )
        }
        SolitonCmd::Asymptote { family, radii, out } => {
            let p = family.params()?;
            let s = Soliton::build(&p)?;
            let rate = s.asymptotic_decay(&radii)?;
            let expected = 2.0 - p.m as f64;
            emit_json(&json!({ "family": p.kind, "m": p.m, "radii": radii, "rate": rate, "neck_rate": expected }), out.as_deref())
        }
        SolitonCmd::U1solve { a, nx, ny, x_range, y_range, linear, grid, out } => {
            if x_range.len() != 2 || y_range.len() != 2 || linear.len() != 3 {
                bail!("--x-range and --y-range take two values, --linear three");
            }
            let problem = U1Problem::rectangle([x_range[0], x_range[1]], [y_range[0], y_range[1]], nx, ny, a);
            let data = |x: f64, y: f64| linear[0] + linear[1] * x + linear[2] * y;
            let sol = u1_solve(&problem, data)?;
            let mut deviation: f64 = 0.0;
            let mut csv = String::from("# lmcf-u1-csv v1\nx,y,f,interior\n");
            for j in 0..ny {
                for i in 0..nx {
                    let (x, y) = sol.node(i, j);
                    let f = sol.value(i, j);
                    deviation = deviation.max((f - data(x, y)).abs());
                    csv += &format!("{x},{y},{f},{}\n", sol.interior[j * nx + i] as u8);
                }
            }
            if let Some(path) = grid {
                std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            }
            emit_json(
                &json!({ "a": a, "nx": nx, "ny": ny, "residual": sol.residual, "iterations": sol.iterations, "max_deviation_from_linear": deviation }),
                out.as_deref(),
            )
        }
    }
}

fn flow(cmd: FlowCmd) -> Result<Outcome> {
    match cmd {
        FlowCmd::Run { scenario, out_dir } => {
            let start = Instant::now();
            let bytes = std::fs::read(&scenario).with_context(|| format!("reading {}", scenario.display()))?;
            let sc = parse_scenario(&scenario)?;
            let state = build_state(&sc).context("building the initial curve")?;
            log::info!("flowing {} vertices to t = {}", state.curve.vertex_count(), sc.horizon.t_max);
            let tr = run_with_surgeries(state, &sc.horizon, &sc.record).context("flow failed")?;
            log::info!("{:?} after {} steps at t = {}", tr.status, tr.final_state.steps, tr.final_state.t);
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let mut outputs = vec![
                write_output(&out_dir, &sc.outputs.csv, "csv", &flow_csv(&tr))?,
                write_output(&out_dir, &sc.outputs.events, "events", &event_log(&tr)?)?,
            ];
            outputs.extend(emit_frames(&tr, &out_dir.join(&sc.outputs.frames))?);
            let outcome = if tr.status.is_terminal() { Outcome::Terminal } else { Outcome::Success };
            let record = RunRecord {
                command: "flow run".into(),
                scenario: scenario.clone(),
                scenario_sha256: sha256_hex(&bytes),
                seed: sc.seed,
                tool_version: env!("CARGO_PKG_VERSION").into(),
                status: Some(tr.status),
                exit_code: exit_code(outcome),
                wall_clock_seconds: start.elapsed().as_secs_f64(),
                outputs,
            };
            write_output(&out_dir, &sc.outputs.record, "record", &(serde_json::to_string_pretty(&record)? + "\n"))?;
            summarize(&tr);
            Ok(outcome)
        }
        FlowCmd::Probe { scenario, blowup_time, out } => {
            let sc = parse_scenario(&scenario)?;
            let state = build_state(&sc).context("building the initial curve")?;
            let tr = run_with_surgeries(state, &sc.horizon, &sc.record).context("flow failed")?;
            let report = singularity_probe(&tr.curvature, blowup_time.or(tr.terminal_time))?;
            emit_json(&json!({ "status": tr.status, "terminal_time": tr.terminal_time, "probe": report }), out.as_deref())?;
            Ok(Outcome::Success)
        }
    }
}

fn summarize(tr: &Trajectory) {
    println!("status: {}", serde_json::to_value(tr.status).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default());
    println!("steps: {}  t: {}", tr.final_state.steps, tr.final_state.t);
    if let Some(t) = tr.terminal_time {
        println!("terminal time: {t}");
    }
    println!("events: {}", tr.events.len());
}

fn load_document(path: &Path) -> Result<StabilityDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| anyhow::anyhow!("schema violation at `{}`: {}", e.path(), e.inner()))
}

fn stability(cmd: StabilityCmd) -> Result<()> {
    match cmd {
        StabilityCmd::Check { document, json } => {
            let doc = load_document(&document)?;
            let report = check_axioms(&doc.category, &doc.charge)?;
            if json {
                return emit_json(&serde_json::to_value(&report)?, None);
            }
            if report.passed() {
                println!("all axioms hold");
            }
            for v in &report.violations {
                println!("{:?}: {} [{}]", v.axiom, v.detail, v.witnesses.join(", "));
            }
            Ok(())
        }
        StabilityCmd::Hn { document, object, alpha, json } => {
            let doc = load_document(&document)?;
            let factors = hn_filtration(&doc.category, &doc.charge, &object, alpha)?;
            if json {
                return emit_json(&serde_json::to_value(&factors)?, None);
            }
            for f in &factors {
                println!("{}  class {:?}  phase {:.12}", f.factor, f.class, f.phase);
            }
            Ok(())
        }
        StabilityCmd::Phase { document, class, alpha, json } => {
            let doc = load_document(&document)?;
            let phase = global_phase(&doc.charge, &class, alpha)?;
            let mu = slope(&doc.charge, &class, alpha).ok();
            if json {
                return emit_json(&json!({ "class": class, "alpha": alpha, "phase": phase, "slope": mu }), None);
            }
            println!("phase {phase:.15}");
            match mu {
                Some(m) => println!("slope {m:.15}"),
                None => println!("slope undefined"),
            }
            Ok(())
        }
    }
}

pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Success => 0,
        Outcome::Terminal => 2,
    }
}
