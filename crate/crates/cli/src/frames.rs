//! SVG frames of recorded snapshots: the curve, its crossings and face labels.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use lmcf::flow1d::{FaceKind, Snapshot, Trajectory};

use crate::output::{write_output, OutputEntry};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 16.0;

/// Common view box of all snapshots, so that frames can be compared.
fn bounds(snaps: &[Snapshot]) -> Option<[f64; 4]> {
    let pts = snaps.iter().flat_map(|s| s.loops.iter().flatten());
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    let mut any = false;
    for p in pts {
        b = [b[0].min(p[0]), b[1].min(p[1]), b[2].max(p[0]), b[3].max(p[1])];
        any = true;
    }
    any.then_some(b)
}

fn kind_label(k: FaceKind) -> &'static str {
    match k {
        FaceKind::Teardrop => "T",
        FaceKind::Bigon => "B",
        FaceKind::Other => "F",
    }
}

/// Renders one frame; coordinates carry four decimals.
pub fn frame_svg(snap: &Snapshot, view: [f64; 4]) -> String {
    let span = (view[2] - view[0]).max(view[3] - view[1]).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: [f64; 2]| (MARGIN + (p[0] - view[0]) * scale, SIZE - MARGIN - (p[1] - view[1]) * scale);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"8\" y=\"14\" font-size=\"11\">t = {:.6}</text>\n",
        snap.t
    );
    for l in &snap.loops {
        let pts: Vec<String> = l
            .iter()
            .map(|p| {
                let (x, y) = map(*p);
                format!("{x:.4},{y:.4}")
            })
            .collect();
        let _ = writeln!(svg, "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>", pts.join(" "));
    }
    for c in &snap.crossings {
        let (x, y) = map(*c);
        let _ = writeln!(svg, "<circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"3\" fill=\"red\"/>");
    }
    for (id, at, kind) in &snap.faces {
        let (x, y) = map(*at);
        let _ = writeln!(svg, "<text x=\"{x:.4}\" y=\"{y:.4}\" font-size=\"10\" fill=\"blue\">{}{id}</text>", kind_label(*kind));
    }
    svg.push_str("</svg>\n");
    svg
}

/// One file per recorded snapshot; an empty trajectory gives no frames.
/// Frames are drawn for plane curves only.
pub fn emit_frames(tr: &Trajectory, dir: &Path) -> Result<Vec<OutputEntry>> {
    if !tr.final_state.curve.ambient.is_plane() {
        log::warn!("skipping frames: the curve does not live in the plane");
        return Ok(Vec::new());
    }
    let Some(view) = bounds(&tr.snapshots) else { return Ok(Vec::new()) };
    tr.snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| write_output(dir, &format!("frame_{i:04}.svg"), "frame", &frame_svg(s, view)))
        .collect()
}
