use std::f64::consts::PI;

use super::*;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

#[test]
fn symmetric_necks_split_evenly() {
    let d3 = lawlor_angles(&[1.0, 1.0, 1.0]).unwrap();
    for p in &d3.phi {
        assert!((p - PI / 3.0).abs() < 1e-10);
    }
    let d4 = lawlor_angles(&[1.0; 4]).unwrap();
    for p in &d4.phi {
        assert!((p - PI / 4.0).abs() < 1e-10);
    }
    assert!(d3.area.unwrap() > 0.0);
}

#[test]
fn neck_angles_sum_to_pi() {
    for a in [[1.0, 2.0, 3.0], [0.1, 5.0, 40.0], [3.0, 3.0, 0.2]] {
        let d = lawlor_angles(&a).unwrap();
        assert!((d.sum() - PI).abs() < 1e-8, "{a:?}: {}", d.sum());
        assert!(d.phi.iter().all(|p| *p > 0.0 && *p < PI));
    }
    let d = lawlor_angles(&[1.0, 2.0, 3.0, 4.0, 0.5]).unwrap();
    assert!((d.sum() - PI).abs() < 1e-8);
}

#[test]
fn neck_rejects_low_dimension() {
    assert!(matches!(lawlor_angles(&[1.0, 1.0]), Err(SolitonError::InvalidParams(_))));
    assert!(matches!(lawlor_angles(&[1.0, -1.0, 1.0]), Err(SolitonError::InvalidParams(_))));
}

#[test]
fn expander_at_zero_is_the_neck() {
    let a = [1.0, 2.0, 3.0];
    let e = expander_angles(0.0, &a).unwrap();
    let l = lawlor_angles(&a).unwrap();
    for (p, q) in e.phi.iter().zip(&l.phi) {
        assert!((p - q).abs() < 1e-12);
    }
    let e = expander_angles(1.0, &[1.0, 1.0, 1.0]).unwrap();
    assert!(e.sum() > 0.0 && e.sum() < PI);
    assert!((e.phi[0] - e.phi[2]).abs() < 1e-12);
}

#[test]
fn expander_angles_shrink_with_alpha() {
    let a = [1.0, 2.0, 3.0];
    let mut last = PI;
    for alpha in [0.25, 1.0, 4.0] {
        let s = expander_angles(alpha, &a).unwrap().sum();
        assert!(s < last);
        last = s;
    }
}

#[test]
fn invert_round_trips() {
    let a = [1.0, 2.0, 3.0];
    let d = lawlor_angles(&a).unwrap();
    let got = family_invert(SolitonKind::Lawlor, 0.0, &d.phi, d.area).unwrap();
    for (g, w) in got.iter().zip(&a) {
        assert!((g - w).abs() < 1e-6, "{got:?}");
    }
    let e = expander_angles(1.0, &a).unwrap();
    let got = family_invert(SolitonKind::Expander, 1.0, &e.phi, None).unwrap();
    let back = expander_angles(1.0, &got).unwrap();
    for (g, w) in back.phi.iter().zip(&e.phi) {
        assert!((g - w).abs() < 1e-6);
    }
    let t = translator_angles(1.0, &[0.5, 2.0]).unwrap();
    let got = family_invert(SolitonKind::Translator, 1.0, &t.phi, None).unwrap();
    assert!((got[0] - 0.5).abs() < 1e-6 && (got[1] - 2.0).abs() < 1e-6);
}

#[test]
fn invert_symmetric_and_inadmissible() {
    let phi = [PI / 3.0; 3];
    let a = family_invert(SolitonKind::Lawlor, 0.0, &phi, Some(1.0)).unwrap();
    assert!((a[0] - a[1]).abs() < 1e-8 && (a[1] - a[2]).abs() < 1e-8);
    let d = lawlor_angles(&a).unwrap();
    assert!((d.area.unwrap() - 1.0).abs() < 1e-8);
    let err = family_invert(SolitonKind::Expander, 1.0, &[1.2, 1.0, 1.0], None).unwrap_err();
    assert!(matches!(err, SolitonError::Inadmissible(_)));
}

#[test]
fn neck_angle_is_constant() {
    let sol = Soliton::build(&SolitonParams::lawlor(&[1.0, 1.0, 1.0])).unwrap();
    let base = sol.theta(0.0);
    let mut worst: f64 = 0.0;
    for i in -200..=200 {
        let y = i as f64 * 0.05;
        worst = worst.max(phase_gap(sol.theta(y), base));
    }
    assert!(worst < 1e-6, "oscillation {worst}");
    let sol = Soliton::build(&SolitonParams::lawlor(&[1.0, 2.0, 3.0])).unwrap();
    let base = sol.theta(0.0);
    for y in [-30.0, -2.0, -0.3, 0.7, 5.0, 100.0] {
        assert!(phase_gap(sol.theta(y), base) < 1e-6);
    }
}

#[test]
fn closed_form_phase_matches_tangent_frame() {
    for params in [
        SolitonParams::expander(1.0, &[1.0, 1.0, 1.0]),
        SolitonParams::expander(1.0, &[1.0, 2.0, 3.0]),
        SolitonParams::lawlor(&[1.0, 2.0, 3.0]),
        SolitonParams::translator(1.0, &[1.0, 2.0]),
    ] {
        let sol = Soliton::build(&params).unwrap();
        let dirs: Vec<Vec<f64>> = if params.kind == SolitonKind::Translator {
            vec![vec![0.0, 0.0], vec![0.4, -1.1]]
        } else {
            vec![unit(&[1.0, 1.0, 1.0]), unit(&[1.0, 0.3, -0.5])]
        };
        for y in [-1.5, -0.2, 0.0, 0.6, 2.0] {
            for x in &dirs {
                let num = sol.frame_phase(y, x, 1e-3).unwrap();
                assert!(phase_gap(num, sol.theta(y)) < 1e-6, "{:?} y={y}: {num} vs {}", params.kind, sol.theta(y));
            }
        }
    }
}

#[test]
fn neck_is_minimal() {
    let sol = Soliton::build(&SolitonParams::lawlor(&[1.0, 2.0, 3.0])).unwrap();
    let grid = default_sample_grid(3, &[-3.0, -0.5, 0.0, 0.5, 3.0]);
    assert!(sol.residual(&grid, 1e-3).unwrap() < 1e-5);
}

fn refinement_ratio(params: &SolitonParams) -> (f64, f64) {
    let sol = Soliton::build(params).unwrap();
    let grid: Vec<(f64, Vec<f64>)> = if params.kind == SolitonKind::Translator {
        [-1.0, 0.0, 0.8].iter().flat_map(|y| [(*y, vec![0.0, 0.0]), (*y, vec![0.5, -0.3])]).collect()
    } else {
        default_sample_grid(params.m, &[-1.0, 0.0, 0.8])
    };
    let coarse = sol.residual(&grid, 0.04).unwrap();
    let fine = sol.residual(&grid, 0.02).unwrap();
    ((coarse / fine).log2(), fine)
}

#[test]
fn expander_residual_converges() {
    let (order, fine) = refinement_ratio(&SolitonParams::expander(1.0, &[1.0, 2.0, 3.0]));
    assert!(order >= 1.5, "order {order}");
    assert!(fine < 1e-2);
}

#[test]
fn translator_residual_converges() {
    let (order, fine) = refinement_ratio(&SolitonParams::translator(1.0, &[1.0, 2.0]));
    assert!(order >= 1.5, "order {order}");
    assert!(fine < 1e-2);
}

#[test]
fn stencil_orders_agree() {
    let sol = Soliton::build(&SolitonParams::expander(1.0, &[1.0, 1.0, 1.0])).unwrap();
    let x = unit(&[1.0, 0.5, 0.2]);
    let h2 = sol.mean_curvature(0.3, &x, 1e-3, 2).unwrap();
    let h4 = sol.mean_curvature(0.3, &x, 1e-3, 4).unwrap();
    let gap: f64 = h2.iter().zip(&h4).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!(gap < 1e-5, "{gap}");
}

#[test]
fn translator_angle_limits() {
    let a = [1.0, 2.0];
    let sol = Soliton::build(&SolitonParams::translator(1.0, &a)).unwrap();
    let phi = translator_angles(1.0, &a).unwrap();
    let mut prev = f64::INFINITY;
    for i in -60..=60 {
        let y = i as f64 * 0.25;
        let t = sol.theta(y);
        // far out the angle sits on its limit up to summation roundoff
        if y.abs() <= 3.0 {
            assert!(t < prev, "not decreasing at {y}");
        } else {
            assert!(t <= prev + 1e-15, "increasing at {y}");
        }
        prev = t;
    }
    assert!((sol.theta(-1e6) - PI).abs() < 1e-5);
    assert!((sol.theta(1e6) - phi.sum()).abs() < 1e-5);
}

#[test]
fn translator_last_coordinate() {
    let sol = Soliton::build(&SolitonParams::translator(2.0, &[1.0, 1.5])).unwrap();
    let y = 0.7;
    let z = sol.point(y, &[0.0, 0.0]).unwrap();
    let s = sol.weight().inv_sqrt_p(y);
    let arg = C64::new(y, s).arg();
    let want = C64::new(0.5 * y * y, -(sol.psi(0, y) + sol.psi(1, y) + arg) / 2.0);
    assert!((z[2] - want).norm() < 1e-14);
}

#[test]
fn grim_reaper() {
    let sol = Soliton::build(&SolitonParams::grim_reaper()).unwrap();
    let z = sol.point(0.0, &[]).unwrap();
    assert!(z[0].norm() < 1e-15);
    // H = v^⊥ with v = 1
    for y in [-1.2, -0.3, 0.0, 0.9] {
        assert!(sol.residual_at(y, &[], 1e-3, 4).unwrap() < 1e-8);
    }
    let h = sol.mean_curvature(0.0, &[], 1e-3, 4).unwrap();
    assert!((h[0] - C64::new(1.0, 0.0)).norm() < 1e-8);
    assert!(sol.point(1.6, &[]).is_err());
}

#[test]
fn neck_ends_approach_the_planes() {
    let sol = Soliton::build(&SolitonParams::lawlor(&[1.0, 2.0, 3.0])).unwrap();
    let phi = sol.angles().unwrap().phi.clone();
    for k in 0..3 {
        assert!(sol.psi(k, -1e8).abs() < 1e-6);
        assert!((sol.psi(k, 1e8) - phi[k]).abs() < 1e-6);
    }
    let x = unit(&[1.0, 1.0, 1.0]);
    let near = sol.cone_distance(50.0, &x).unwrap();
    let far = sol.cone_distance(500.0, &x).unwrap();
    assert!(far < near);
}

#[test]
fn decay_rates() {
    let radii: Vec<f64> = (0..8).map(|i| 10.0 * 1.5f64.powi(i)).collect();
    let r3 = Soliton::build(&SolitonParams::lawlor(&[1.0, 1.0, 1.0])).unwrap().asymptotic_decay(&radii).unwrap();
    assert!((r3 + 1.0).abs() < 0.2, "{r3}");
    let r4 = Soliton::build(&SolitonParams::lawlor(&[1.0; 4])).unwrap().asymptotic_decay(&radii).unwrap();
    assert!((r4 + 2.0).abs() < 0.3, "{r4}");
    let rx = Soliton::build(&SolitonParams::expander(1.0, &[1.0, 1.0, 1.0])).unwrap().asymptotic_decay(&[2.0, 3.0, 4.0, 5.0]).unwrap();
    assert!(rx < 2.0);
    let err = Soliton::build(&SolitonParams::lawlor(&[1.0, 1.0, 1.0])).unwrap().asymptotic_decay(&[5.0, 4.0]);
    assert!(err.is_err());
}

#[test]
fn harvey_lawson_examples() {
    let one = C64::new(1.0, 0.0);
    assert!(hl_membership(SolitonKind::HlCone, [one, one, one], 0.0, 1e-12).unwrap().0);
    let w = C64::from_polar(1.0, 0.3);
    let z = [C64::new(2f64.sqrt(), 0.0) * w, w, w.conj() * w.conj()];
    let (ok, defect) = hl_membership(SolitonKind::HlL1, z, 1.0, 1e-12).unwrap();
    assert!(ok, "{defect}");
    let (ok, defect) = hl_membership(SolitonKind::HlCone, [one, one, C64::from_polar(1.0, PI / 4.0)], 0.0, 1e-9).unwrap();
    assert!(!ok);
    assert!((defect - (PI / 4.0).sin()).abs() < 1e-14);
    let rot = [z[2], z[0], z[1]];
    assert!(hl_variant_membership(2, rot, 1.0, 1e-12).unwrap().0);
    assert!(!hl_variant_membership(1, rot, 1.0, 1e-12).unwrap().0);
}
