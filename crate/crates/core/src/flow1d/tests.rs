use std::f64::consts::PI;

use super::*;
use crate::novikov::{rational, CoefficientField, NovikovSeries, Scalar};
use crate::planes::C64;
use proptest::prelude::*;

fn plain() -> CurveOptions {
    CurveOptions { graded: false, ..CurveOptions::default() }
}

fn unit_circle(n: usize) -> ImmersedCurve {
    build_curve(Ambient::Plane, vec![presets::circle(C64::new(0.0, 0.0), 1.0, n)], &plain()).unwrap()
}

fn shoelace(curve: &ImmersedCurve) -> f64 {
    curve.components.iter().map(|c| c.signed_area()).sum()
}

#[test]
fn circle_has_maslov_one() {
    let c = unit_circle(128);
    assert_eq!(c.components[0].maslov, 1);
    let graded = build_curve(Ambient::Plane, vec![presets::circle(C64::new(0.0, 0.0), 1.0, 128)], &CurveOptions::default());
    assert!(matches!(graded, Err(FlowError::NotMaslovZero { maslov: 1, .. })));
}

#[test]
fn opposite_circles_have_opposite_maslov() {
    let a = presets::circle(C64::new(-3.0, 0.0), 1.0, 64);
    let mut b = presets::circle(C64::new(3.0, 0.0), 1.0, 64);
    b.points.reverse();
    let c = build_curve(Ambient::Plane, vec![a, b], &plain()).unwrap();
    let m: Vec<i64> = c.components.iter().map(|c| c.maslov).collect();
    assert_eq!(m, vec![1, -1]);
}

#[test]
fn figure_eight_is_graded_with_one_crossing() {
    let c = presets::infinity(0.5, 0.2, 240, &CurveOptions::default()).unwrap();
    assert_eq!(c.components[0].maslov, 0);
    let xs = self_intersections(&c).unwrap();
    assert_eq!(xs.len(), 1);
    // a teardrop corner has degree two
    assert_eq!(xs[0].degrees, Some((2, -1)));
    assert!(!xs[0].has_degree_one());
    // chords near the origin miss it by the sagitta
    assert!(xs[0].point.norm() < 1e-3);
    let (lo, hi) = c.theta_range();
    assert!(hi - lo > PI);
}

#[test]
fn repeated_vertex_is_rejected() {
    let mut l = presets::circle(C64::new(0.0, 0.0), 1.0, 64);
    l.points[5] = l.points[4];
    assert!(matches!(build_curve(Ambient::Plane, vec![l], &plain()), Err(FlowError::RepeatedVertex { .. })));
}

#[test]
fn coarse_loop_fails_resolution() {
    let square = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 1.0)];
    assert!(build_curve(Ambient::Plane, vec![VertexLoop::closed(square)], &plain()).is_err());
}

#[test]
fn inexact_figure_eight_is_rejected_in_exact_mode() {
    let exact = CurveOptions { exact: true, ..CurveOptions::default() };
    assert!(matches!(presets::infinity(0.5, 0.2, 200, &exact), Err(FlowError::NotExact { .. })));
    assert!(presets::infinity(0.3, 0.3, 200, &exact).is_ok());
}

#[test]
fn embedded_circle_face() {
    let n = 256;
    let c = unit_circle(n);
    let fs = faces(&c).unwrap();
    assert_eq!(fs.len(), 1);
    let polygon = 0.5 * n as f64 * (2.0 * PI / n as f64).sin();
    assert!((fs[0].area - polygon).abs() < 1e-12);
    assert_eq!(fs[0].winding, 1);
    let rate = area_rates(&fs)[0];
    assert!((rate + 2.0 * PI).abs() < 1e-9, "{rate}");
}

#[test]
fn figure_eight_teardrops() {
    let c = presets::infinity(0.5, 0.2, 300, &CurveOptions::default()).unwrap();
    let fs = faces(&c).unwrap();
    assert_eq!(fs.len(), 2);
    let mut areas: Vec<f64> = fs.iter().map(|f| f.area).collect();
    areas.sort_by(f64::total_cmp);
    assert!((areas[0] - 0.2).abs() < 1e-9 && (areas[1] - 0.5).abs() < 1e-9, "{areas:?}");
    for f in &fs {
        assert_eq!(f.kind, FaceKind::Teardrop);
        assert_eq!(f.corners.len(), 1);
    }
    // the lobes wind oppositely, so the signed areas differ by sign
    assert!((shoelace(&c) - (fs.iter().map(|f| f.winding as f64 * f.area).sum::<f64>())).abs() < 1e-12);
    let r = area_rates(&fs);
    assert!((r[0] - r[1]).abs() < 1e-12);
}

#[test]
fn winding_weighted_faces_match_shoelace() {
    for loop_ in [presets::wall_chain(300), presets::chain(0.8, 0.5, 240)] {
        let c = build_curve(Ambient::Plane, vec![loop_], &CurveOptions::default()).unwrap();
        let fs = faces(&c).unwrap();
        let sum: f64 = fs.iter().map(|f| f.winding as f64 * f.area).sum();
        assert!((sum - shoelace(&c)).abs() < 1e-10, "{sum} vs {}", shoelace(&c));
    }
}

#[test]
fn chain_has_teardrops_and_bigons() {
    let c = build_curve(Ambient::Plane, vec![presets::wall_chain(400)], &CurveOptions { exact: true, ..Default::default() }).unwrap();
    let xs = self_intersections(&c).unwrap();
    assert_eq!(xs.len(), 3);
    let fs = faces_with(&c, &xs).unwrap();
    let count = |k: FaceKind| fs.iter().filter(|f| f.kind == k).count();
    assert_eq!(count(FaceKind::Teardrop), 2);
    assert_eq!(count(FaceKind::Bigon), 2);
    // only the middle crossing has degrees (1, 0)
    let middle: Vec<&Crossing> = xs.iter().filter(|x| x.has_degree_one()).collect();
    assert_eq!(middle.len(), 1);
    assert!(middle[0].point.norm() < 1e-9);
    let teardrop = fs.iter().find(|f| f.kind == FaceKind::Teardrop).unwrap().area;
    let bigon = fs.iter().find(|f| f.kind == FaceKind::Bigon).unwrap().area;
    assert!((middle[0].potential_gap().unwrap() - (teardrop - bigon)).abs() < 1e-9);
}

#[test]
fn circle_shrinks_like_the_exact_solution() {
    let mut st = FlowState::new(unit_circle(160), FlowPolicy::default()).unwrap();
    while st.t < 0.4 {
        let dt = st.stable_dt().min(0.4 - st.t);
        csf_step(&mut st, dt).unwrap();
    }
    let c = &st.curve.components[0];
    let r = c.length() / (2.0 * PI);
    let exact = (1.0 - 2.0 * st.t).sqrt();
    assert!((r - exact).abs() / exact < 5e-3, "{r} vs {exact}");
    assert!(c.centroid().norm() < 1e-9);
}

#[test]
fn oversized_step_is_refused() {
    let mut st = FlowState::new(unit_circle(64), FlowPolicy::default()).unwrap();
    let dt = 10.0 * st.stable_dt();
    assert!(matches!(csf_step(&mut st, dt), Err(FlowError::StepTooLarge { .. })));
}

#[test]
fn torus_geodesic_is_stationary() {
    let tau = [0.0, 1.0];
    let c = build_curve(Ambient::Torus { tau }, vec![presets::torus_geodesic(tau, 64)], &CurveOptions::default()).unwrap();
    let before = c.components[0].points.clone();
    let mut st = FlowState::new(c, FlowPolicy::default()).unwrap();
    for _ in 0..100 {
        let dt = st.stable_dt();
        csf_step(&mut st, dt).unwrap();
    }
    let after = &st.curve.components[0].points;
    assert_eq!(before.len(), after.len());
    for (p, q) in before.iter().zip(after) {
        assert!((p - q).norm() < 1e-12);
    }
    let (lo, hi) = st.curve.theta_range();
    assert!(hi - lo < 1e-12);
}

#[test]
fn phase_range_does_not_grow() {
    let c = presets::infinity(0.4, 0.25, 200, &CurveOptions::default()).unwrap();
    let mut st = FlowState::new(c, FlowPolicy::default()).unwrap();
    let (mut lo, mut hi) = st.curve.theta_range();
    for _ in 0..400 {
        let dt = st.stable_dt();
        csf_step(&mut st, dt).unwrap();
        let (l, h) = st.curve.theta_range();
        assert!(l >= lo - 1e-6 && h <= hi + 1e-6, "[{l}, {h}] left [{lo}, {hi}]");
        (lo, hi) = (l, h);
    }
    assert!(hi - lo > PI);
}

#[test]
fn degrees_persist_along_the_flow() {
    let c = build_curve(Ambient::Plane, vec![presets::wall_chain(300)], &CurveOptions::default()).unwrap();
    let mut st = FlowState::new(c, FlowPolicy::default()).unwrap();
    let before: Vec<(u64, Option<(i64, i64)>)> = st.crossings.iter().map(|x| (x.id, x.degrees)).collect();
    for _ in 0..300 {
        let dt = st.stable_dt();
        csf_step(&mut st, dt).unwrap();
        st.refresh_crossings().unwrap();
    }
    let after: Vec<(u64, Option<(i64, i64)>)> = st.crossings.iter().map(|x| (x.id, x.degrees)).collect();
    assert_eq!(before, after);
}

#[test]
fn potential_stays_consistent_in_exact_mode() {
    let c = build_curve(Ambient::Plane, vec![presets::wall_chain(300)], &CurveOptions { exact: true, ..Default::default() }).unwrap();
    let mut st = FlowState::new(c, FlowPolicy::default()).unwrap();
    for _ in 0..300 {
        let dt = st.stable_dt();
        csf_step(&mut st, dt).unwrap();
    }
    assert!(st.potential_defect < 1e-5, "{}", st.potential_defect);
    assert!(st.curve.components[0].signed_area().abs() < 1e-9);
}

#[test]
fn wall_time_is_exact() {
    let t = wall_time(&rational(1, 5), &rational(-1, 10)).unwrap();
    assert_eq!(t, rational(2, 1));
    assert!(wall_time(&rational(1, 5), &rational(1, 10)).is_none());
    assert!(wall_time(&rational(1, 5), &rational(0, 1)).is_none());
}

#[test]
fn shifting_by_the_wall_time_lands_on_zero() {
    let s = NovikovSeries::monomial(Scalar::one(CoefficientField::Rational), rational(1, 5), rational(16, 1));
    let rate = rational(-1, 10);
    let t = wall_time(&rational(1, 5), &rate).unwrap();
    let moved = shift_cochain(&s, &rate, &t);
    assert_eq!(moved.leading().unwrap().exponent, rational(0, 1));
    let still = shift_cochain(&s, &rational(0, 1), &rational(3, 1));
    assert_eq!(still, s);
}

#[test]
fn unequal_figure_eight_is_obstructed_by_the_smaller_lobe() {
    let c = presets::infinity(0.5, 0.2, 240, &CurveOptions::default()).unwrap();
    let st = FlowState::new(c, FlowPolicy::default()).unwrap();
    let fs = faces_with(&st.curve, &st.crossings).unwrap();
    match obstruction_status(&st.curve, &st.crossings, &fs, &st.policy).unwrap() {
        ObstructionStatus::Obstructed { witnesses } => {
            assert_eq!(witnesses.len(), 1);
            assert!((witnesses[0].area - 0.2).abs() < 1e-9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn equal_figure_eight_is_unobstructed() {
    let c = presets::infinity(0.3, 0.3, 240, &CurveOptions::default()).unwrap();
    let st = FlowState::new(c, FlowPolicy::default()).unwrap();
    let fs = faces_with(&st.curve, &st.crossings).unwrap();
    match obstruction_status(&st.curve, &st.crossings, &fs, &st.policy).unwrap() {
        ObstructionStatus::Unobstructed { constraints } => {
            assert_eq!(constraints.len(), 1);
            assert_eq!(constraints[0].sign, st.policy.holonomy_sign);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn chain_bigons_cancel_the_teardrops() {
    let c = build_curve(Ambient::Plane, vec![presets::wall_chain(300)], &CurveOptions { exact: true, ..Default::default() }).unwrap();
    let st = FlowState::new(c, FlowPolicy::default()).unwrap();
    let fs = faces_with(&st.curve, &st.crossings).unwrap();
    let status = obstruction_status(&st.curve, &st.crossings, &fs, &st.policy).unwrap();
    assert!(!status.is_obstructed(), "{status:?}");
}

#[test]
fn neck_arcs_follow_the_asymptotes() {
    let plus = C64::new(1.0, 0.0);
    let minus = C64::new(0.0, 1.0);
    let radius = 0.4;
    let [to_minus, to_plus] = neck_arcs(C64::new(0.0, 0.0), plus, minus, radius);
    // starts on the incoming plus ray, ends on the outgoing minus ray
    let (s, e) = (to_minus[0], to_minus[to_minus.len() - 1]);
    assert!(s.re < 0.0 && e.im > 0.0);
    assert!((s.norm() - 0.8 * radius).abs() < 0.1 * radius);
    let (s, e) = (to_plus[0], to_plus[to_plus.len() - 1]);
    assert!(s.im < 0.0 && e.re > 0.0);
    // the two branches stay apart
    let gap = to_minus.iter().flat_map(|p| to_plus.iter().map(move |q| (p - q).norm())).fold(f64::INFINITY, f64::min);
    assert!(gap > 0.1 * radius);
}

#[test]
fn smoothing_merges_two_circles() {
    let a = presets::circle(C64::new(-0.6, 0.0), 1.0, 200);
    let b = presets::circle(C64::new(0.6, 0.0), 1.0, 200);
    let mut c = build_curve(Ambient::Plane, vec![a, b], &plain()).unwrap();
    let xs = self_intersections(&c).unwrap();
    assert_eq!(xs.len(), 2);
    let one = Scalar::one(CoefficientField::Rational);
    state::smooth_crossing(&mut c, &xs[0], 0.1, &one).unwrap();
    assert_eq!(c.components.len(), 1);
    assert_eq!(self_intersections(&c).unwrap().len(), 1);
    c.check_shape().unwrap();
}

#[test]
fn large_component_does_not_collapse() {
    let mut st = FlowState::new(unit_circle(64), FlowPolicy::default()).unwrap();
    assert!(matches!(surgery_collapse(&mut st, 0), Err(FlowError::Precondition(_))));
}

#[test]
fn remeshing_refines_where_curvature_is_high() {
    let mut c = Component::new(
        presets::circle(C64::new(0.0, 0.0), 0.05, 40).points,
        C64::new(0.0, 0.0),
        Scalar::one(CoefficientField::Rational),
        0.0,
    )
    .unwrap();
    let p = RemeshParams { max_edge: 0.1, turn: 0.05, min_edge: 1e-7 };
    assert!(remesh_component(&mut c, &p).unwrap());
    assert!(c.len() > 100);
    assert!(c.signed_area() > 0.0);
}

#[test]
fn probe_reads_a_shrinking_circle_as_type_one() {
    let history: Vec<(f64, f64)> = (0..400).map(|i| i as f64 * 0.5 / 401.0).map(|t| (t, 1.0 / (1.0 - 2.0 * t).sqrt())).collect();
    let r = singularity_probe(&history, None).unwrap();
    assert_eq!(r.kind, SingularityType::TypeI);
    assert!((r.blowup_time.unwrap() - 0.5).abs() < 1e-9);
    assert!((r.growth - 1.0).abs() < 1e-6);
}

#[test]
fn probe_flags_faster_blowup() {
    // κ² (T − t) = (T − t)^(−1/2) grows by √10 per decade
    let history: Vec<(f64, f64)> = (0..400).map(|i| 1.0 - 10f64.powf(-(i as f64) / 100.0)).map(|t| (t, (1.0 - t).powf(-0.75))).collect();
    let r = singularity_probe(&history, Some(1.0)).unwrap();
    assert_eq!(r.kind, SingularityType::TypeII);
    assert!((r.growth - 10f64.sqrt()).abs() < 1e-3, "{}", r.growth);
}

#[test]
fn probe_needs_a_decade() {
    let history: Vec<(f64, f64)> = (0..20).map(|i| (0.45 + i as f64 * 1e-4, 10.0)).collect();
    assert!(matches!(singularity_probe(&history, Some(0.5)), Err(FlowError::Window(_))));
    let flat: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 1.0)).collect();
    assert_eq!(singularity_probe(&flat, None).unwrap().kind, SingularityType::None);
}

#[test]
fn circle_run_ends_in_a_terminal_singularity() {
    let st = FlowState::new(unit_circle(120), FlowPolicy::default()).unwrap();
    let tr = run_with_surgeries(st, &Horizon::until(1.0), &RecordOptions::default()).unwrap();
    assert_eq!(tr.status, RunStatus::TerminalSingularity);
    let t = tr.terminal_time.unwrap();
    assert!((t - 0.5).abs() < 0.01, "{t}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ellipses_have_positive_area_and_turn_once(a in 0.5f64..2.0, b in 0.5f64..2.0, n in 64usize..200) {
        let pts = (0..n).map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            C64::new(a * t.cos(), b * t.sin())
        }).collect();
        let c = build_curve(Ambient::Plane, vec![VertexLoop::closed(pts)], &plain()).unwrap();
        prop_assert_eq!(c.components[0].maslov, 1);
        let fs = faces(&c).unwrap();
        prop_assert_eq!(fs.len(), 1);
        prop_assert!((fs[0].area - shoelace(&c)).abs() < 1e-12);
    }

    #[test]
    fn figure_eight_areas_are_calibrated(r in 0.1f64..1.0, l in 0.1f64..1.0) {
        let c = presets::infinity(r, l, 200, &CurveOptions::default()).unwrap();
        let fs = faces(&c).unwrap();
        let mut got: Vec<f64> = fs.iter().map(|f| f.area).collect();
        got.sort_by(f64::total_cmp);
        let mut want = vec![r, l];
        want.sort_by(f64::total_cmp);
        prop_assert!((got[0] - want[0]).abs() < 1e-9 && (got[1] - want[1]).abs() < 1e-9);
        let (lo, hi) = c.theta_range();
        prop_assert!(hi - lo > PI);
        let sum: f64 = fs.iter().map(|f| f.winding as f64 * f.area).sum();
        prop_assert!((sum - shoelace(&c)).abs() < 1e-10);
    }

    #[test]
    fn torus_waves_keep_their_class(amp in 0.0f64..0.2, n in 48usize..128) {
        let tau = [0.3, 1.2];
        let c = build_curve(Ambient::Torus { tau }, vec![presets::torus_wave(tau, amp, n)], &CurveOptions::default()).unwrap();
        prop_assert_eq!(c.components[0].maslov, 0);
        prop_assert!((c.components[0].period - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(self_intersections(&c).unwrap().is_empty());
    }
}
