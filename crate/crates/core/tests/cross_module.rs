use std::f64::consts::PI;

use lmcf::flow1d::{build_curve, faces_with, presets, Ambient, CurveOptions, FaceKind, FlowPolicy, FlowState};
use lmcf::novikov::{nv_classify, valuation_f64, NovikovClass};
use lmcf::planes::{crossing_data, degree_bounds_hold, plane_from_angles};
use lmcf::solitons::lawlor_angles;

// the two ends of a neck are a transverse graded pair
#[test]
fn neck_ends_form_a_graded_pair() {
    for a in [vec![1.0, 2.0, 3.0], vec![0.5, 1.0, 1.0, 4.0]] {
        let m = a.len();
        let phi = lawlor_angles(&a).unwrap().phi;
        let bottom = plane_from_angles(&vec![0.0; m], 0.0).unwrap();
        let top = plane_from_angles(&phi, phi.iter().sum()).unwrap();
        let d = crossing_data(&bottom, &top).unwrap();
        assert_eq!(d.mu_plus_minus + d.mu_minus_plus, m as i64);
        assert!(degree_bounds_hold(m, d.theta_plus, d.theta_minus, d.mu_plus_minus));
        for (got, want) in d.angles.iter().zip(&phi) {
            assert!((got - want).abs() < 1e-9 || (got - (PI - want)).abs() < 1e-9);
        }
    }
}

// the seeded cochain at the middle crossing starts at the bigon/teardrop gap
#[test]
fn seeded_cochain_matches_the_area_gap() {
    let c = build_curve(Ambient::Plane, vec![presets::wall_chain(400)], &CurveOptions { exact: true, ..CurveOptions::default() }).unwrap();
    let st = FlowState::new(c, FlowPolicy::default()).unwrap();
    let seeded: Vec<_> = st.crossings.iter().filter(|x| x.cochain.is_some()).collect();
    assert_eq!(seeded.len(), 1);
    let x = seeded[0];
    assert_eq!(x.degrees, Some((1, 0)));
    let series = x.cochain.as_ref().unwrap();
    assert_eq!(nv_classify(series), NovikovClass::Positive);
    let fs = faces_with(&st.curve, &st.crossings).unwrap();
    let mean = |k: FaceKind| {
        let v: Vec<f64> = fs.iter().filter(|f| f.kind == k).map(|f| f.area).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let gap = mean(FaceKind::Teardrop) - mean(FaceKind::Bigon);
    assert!((valuation_f64(series) - gap).abs() < 1e-3 * gap, "{} vs {gap}", valuation_f64(series));
}
