use serde::Serialize;

use super::FlowError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityType {
    TypeI,
    TypeII,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub kind: SingularityType,
    pub blowup_time: Option<f64>,
    /// Q = sup|κ|²(T − t) at the end of the window over its value one decade of T − t earlier.
    pub growth: f64,
    /// (T − t, Q) at logarithmically spaced times.
    pub trend: Vec<(f64, f64)>,
}

/// Ratio of the final to the initial curvature below which nothing is blowing up.
const BLOWUP_RATIO: f64 = 4.0;
/// Growth of Q over a decade that separates the two types.
const TYPE_II_GROWTH: f64 = 2.0;

/// Fits 1/κ² linearly in t over the last quarter of the history.
fn extrapolate(history: &[(f64, f64)]) -> Option<f64> {
    let tail = &history[history.len() * 3 / 4..];
    let n = tail.len() as f64;
    let (st, sy) = tail.iter().fold((0.0, 0.0), |(a, b), (t, k)| (a + t, b + 1.0 / (k * k)));
    let (mt, my) = (st / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, k) in tail {
        sxy += (t - mt) * (1.0 / (k * k) - my);
        sxx += (t - mt).powi(2);
    }
    let slope = sxy / sxx;
    (slope < 0.0).then(|| mt - my / slope)
}

/// Classifies a blow-up from (t, sup|κ|) samples. `blowup` overrides the
/// extrapolated singular time.
pub fn singularity_probe(history: &[(f64, f64)], blowup: Option<f64>) -> Result<ProbeReport, FlowError> {
    if history.len() < 8 {
        return Err(FlowError::Window(format!("{} samples", history.len())));
    }
    let first = history[0].1;
    let last = history[history.len() - 1].1;
    if blowup.is_none() && !(last > BLOWUP_RATIO * first) {
        return Ok(ProbeReport { kind: SingularityType::None, blowup_time: None, growth: 1.0, trend: Vec::new() });
    }
    let time = match blowup {
        Some(t) => t,
        None => extrapolate(history).ok_or_else(|| FlowError::Window("curvature is not growing".into()))?,
    };
    let window: Vec<(f64, f64)> =
        history.iter().filter(|(t, _)| *t < time).map(|(t, k)| (time - t, k * k * (time - t))).collect();
    if window.len() < 2 {
        return Err(FlowError::Window("no samples before the singular time".into()));
    }
    let tau_min = window.iter().map(|w| w.0).fold(f64::INFINITY, f64::min);
    let tau_max = window.iter().map(|w| w.0).fold(0.0, f64::max);
    if tau_max < 10.0 * tau_min {
        return Err(FlowError::Window(format!("T − t spans only [{tau_min:e}, {tau_max:e}]")));
    }
    // window is ordered by decreasing τ
    let q_at = |tau: f64| -> f64 {
        for w in window.windows(2) {
            let ((t0, q0), (t1, q1)) = (w[0], w[1]);
            if t0 >= tau && tau >= t1 {
                let s = (t0.ln() - tau.ln()) / (t0.ln() - t1.ln());
                return q0 + (q1 - q0) * s;
            }
        }
        window[window.len() - 1].1
    };
    let end = window[window.len() - 1].1;
    let growth = end / q_at(10.0 * tau_min);
    let mut trend = Vec::new();
    let decades = (tau_max / tau_min).log10();
    let points = (decades * 10.0).ceil() as usize;
    for i in 0..=points {
        let tau = tau_max * (tau_min / tau_max).powf(i as f64 / points as f64);
        trend.push((tau, q_at(tau)));
    }
    let kind = if growth >= TYPE_II_GROWTH { SingularityType::TypeII } else { SingularityType::TypeI };
    Ok(ProbeReport { kind, blowup_time: Some(time), growth, trend })
}
