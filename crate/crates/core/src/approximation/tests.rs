use super::*;
use crate::space::NormDescriptor;

fn space(d: NormDescriptor) -> Space {
    Space::new(d).unwrap()
}

fn e(i: usize, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

#[test]
fn unit_ball_distance_is_radial() {
    let s = space(NormDescriptor::euclidean(3));
    let x = linalg::scale(&e(0, 3), 3.0);
    let d = distance_to_set(&s, &x, &SetDescriptor::UnitBall).unwrap();
    assert_eq!(d.distance, 2.0);
    assert!((s.norm(&d.nearest).unwrap() - 1.0).abs() < 1e-12);
    // inside the ball the distance vanishes
    let d = distance_to_set(&s, &[0.2, 0.0, 0.0], &SetDescriptor::UnitBall).unwrap();
    assert_eq!(d.distance, 0.0);
}

#[test]
fn finite_set_distance() {
    let s = space(NormDescriptor::euclidean(2));
    let a = SetDescriptor::FinitePointSet {
        points: vec![vec![0.0, 0.0], vec![3.0, 0.0]],
    };
    let d = distance_to_set(&s, &e(0, 2), &a).unwrap();
    assert!((d.distance - 1.0).abs() < 1e-12);
    assert_eq!(d.nearest, vec![0.0, 0.0]);
}

#[test]
fn segment_distance_in_sup_norm() {
    // oracle: 1-d grid over the segment parameter
    let s = space(NormDescriptor::sup(2));
    let seg = SetDescriptor::Polytope {
        vertices: vec![vec![1.0, 1.0], vec![1.0, -1.0]],
    };
    let x = vec![3.0, 0.0];
    let mut oracle = f64::INFINITY;
    for i in 0..=2000 {
        let t = -1.0 + 2.0 * i as f64 / 2000.0;
        oracle = oracle.min(2f64.max(t.abs()));
    }
    let d = distance_to_set(&s, &x, &seg).unwrap();
    assert!((d.distance - 2.0).abs() < 1e-9, "d = {}", d.distance);
    assert!((d.distance - oracle).abs() < 1e-9);
}

#[test]
fn scaled_sphere_distance() {
    let s = space(NormDescriptor::sup(2));
    let a = SetDescriptor::ScaledSphere { r: 2.0 };
    let d = distance_to_set(&s, &[0.5, 0.0], &a).unwrap();
    assert!((d.distance - 1.5).abs() < 1e-12);
    assert!((s.norm(&d.nearest).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn near_projection_on_cube_face() {
    // P_{B_X}(3e_1, 0) is the face {y_1 = 1, |y_j| <= 1}.
    let k = 2;
    let s = space(NormDescriptor::sup(k + 1));
    let x = linalg::scale(&e(0, k + 1), 3.0);
    let sample = near_projection_sample(&s, &x, &SetDescriptor::UnitBall, 0.0, 24, 5).unwrap();
    assert!((sample.distance - 2.0).abs() < 1e-12);
    assert!(sample.points.len() >= 4);
    for y in &sample.points {
        assert!((y[0] - 1.0).abs() < 1e-9, "face coordinate violated: {y:?}");
        assert!(s.norm(y).unwrap() <= 1.0 + 1e-9);
    }
}

#[test]
fn near_projection_at_member_point() {
    let s = space(NormDescriptor::euclidean(2));
    let x = vec![0.3, 0.4];
    let sample = near_projection_sample(&s, &x, &SetDescriptor::UnitBall, 0.0, 8, 5).unwrap();
    for y in &sample.points {
        assert!(linalg::norm2(&linalg::sub(y, &x)) <= 1e-9);
    }
}

#[test]
fn near_projection_subspace_interval() {
    // span{e_2} in Euclidean R^2, x = e_1, delta = 0.1: members t e_2 with
    // 1 + t^2 <= 1.1^2, i.e. |t| <= sqrt(0.21).
    let s = space(NormDescriptor::euclidean(2));
    let a = SetDescriptor::Subspace {
        basis: vec![e(1, 2)],
    };
    let sample = near_projection_sample(&s, &e(0, 2), &a, 0.1, 40, 5).unwrap();
    let bound = 0.21f64.sqrt();
    assert!((sample.distance - 1.0).abs() < 1e-10);
    for y in &sample.points {
        assert!(y[0].abs() < 1e-9);
        assert!(y[1].abs() <= bound + 1e-6, "t = {}", y[1]);
    }
}

#[test]
fn ksch_euclidean_ball_decays() {
    let s = space(NormDescriptor::euclidean(3));
    let x = linalg::scale(&e(0, 3), 3.0);
    let fs: Vec<Functional> = (1..3).map(|i| s.unit_functional(&e(i, 3)).unwrap()).collect();
    let schedule = default_delta_schedule();
    let rep = ksch_diagnostic(&s, &SetDescriptor::UnitBall, &x, 2, &fs, &schedule, 24, 5).unwrap();
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
    assert!(*rep.sup_det.last().unwrap() <= 1e-3);
    assert!(*rep.diam.last().unwrap() <= 1e-2);
}

#[test]
fn ksch_cube_face_stalls() {
    let k = 2;
    let s = space(NormDescriptor::sup(k + 1));
    let x = linalg::scale(&e(0, k + 1), 3.0);
    let fs: Vec<Functional> = (1..=k)
        .map(|j| s.unit_functional(&e(j, k + 1)).unwrap())
        .collect();
    let schedule = default_delta_schedule();
    let rep = ksch_diagnostic(&s, &SetDescriptor::UnitBall, &x, k, &fs, &schedule, 24, 5).unwrap();
    assert_eq!(rep.verdict, DecayVerdict::StallsAboveFloor);
    let floor = rep.stall_floor.unwrap();
    assert!(
        (floor - 4.0).abs() < 1e-9,
        "k=2 face sup should be 2^k = 4, got {floor}"
    );
    assert!(rep.stall_certificate.is_some());
}

#[test]
fn ksch_finite_set_decays() {
    let s = space(NormDescriptor::euclidean(2));
    let a = SetDescriptor::FinitePointSet {
        points: vec![vec![0.0, 0.0], vec![5.0, 5.0]],
    };
    let f = s.unit_functional(&e(1, 2)).unwrap();
    let schedule = default_delta_schedule();
    let rep = ksch_diagnostic(&s, &a, &e(0, 2), 1, &[f], &schedule, 16, 5).unwrap();
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
}

#[test]
fn kwusch_singleton_reduces_to_ksch() {
    let s = space(NormDescriptor::sup(3));
    let x = linalg::scale(&e(0, 3), 3.0);
    let fs: Vec<Functional> = (1..3).map(|i| s.unit_functional(&e(i, 3)).unwrap()).collect();
    let schedule: Vec<f64> = (0..6).map(|m| 2f64.powi(-m)).collect();
    let a = ksch_diagnostic(&s, &SetDescriptor::UnitBall, &x, 2, &fs, &schedule, 16, 9).unwrap();
    let b = kwusch_diagnostic(
        &s,
        &SetDescriptor::UnitBall,
        &[x.clone()],
        2,
        &fs,
        &schedule,
        16,
        9,
    )
    .unwrap();
    assert_eq!(a.sup_det, b.sup_det);
    assert_eq!(a.verdict, b.verdict);
}

#[test]
fn kwusch_uniform_decay_on_euclidean_sphere_sample() {
    let s = space(NormDescriptor::euclidean(3));
    let mut rng = optim::rng_for(3, 14);
    let b: Vec<Vec<f64>> = (0..4)
        .map(|_| linalg::scale(&s.random_unit_vector(&mut rng), 2.0))
        .collect();
    let fs: Vec<Functional> = (1..3).map(|i| s.unit_functional(&e(i, 3)).unwrap()).collect();
    let schedule: Vec<f64> = (0..10).map(|m| 2f64.powi(-m)).collect();
    let rep =
        kwusch_diagnostic(&s, &SetDescriptor::UnitBall, &b, 2, &fs, &schedule, 20, 3).unwrap();
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
}

#[test]
fn property_test_decay_for_ball_and_point() {
    let s = space(NormDescriptor::euclidean(3));
    let u = e(0, 3);
    let b = SetDescriptor::FinitePointSet {
        points: vec![linalg::scale(&u, 2.0)],
    };
    // minimizing sequences collapsing to the radial projection u
    let n_max = 25;
    let mut seqs = Vec::new();
    for i in 0..3 {
        let mut seq = Vec::new();
        for n in 1..=n_max {
            let t = 1.0 / (n as f64 + 1.0);
            let mut v = u.clone();
            v[1] += t * (i as f64 - 1.0) * 0.5;
            seq.push(s.radial_project(&v).unwrap());
        }
        seqs.push(seq);
    }
    let y_seq = vec![linalg::scale(&u, 2.0); n_max];
    let fs: Vec<Functional> = (1..3).map(|i| s.unit_functional(&e(i, 3)).unwrap()).collect();
    let rep = property_kwuc_test(
        &s,
        &SetDescriptor::UnitBall,
        &b,
        2,
        &fs,
        &seqs,
        &y_seq,
        0.05,
    )
    .unwrap();
    assert!((rep.d_ab - 1.0).abs() < 1e-9);
    assert!(rep.hypothesis_ok);
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
}

#[test]
fn property_test_shared_sequence_zero_distance() {
    let s = space(NormDescriptor::euclidean(2));
    let a = SetDescriptor::UnitBall;
    let b = SetDescriptor::UnitBall;
    let n_max = 12;
    let mk = |off: f64| -> Vec<Vec<f64>> {
        (1..=n_max)
            .map(|n| {
                let t = off * 2f64.powi(-(n as i32));
                s.radial_project(&[1.0, t]).unwrap()
            })
            .collect()
    };
    let seqs = vec![mk(0.3), mk(-0.3)];
    let y_seq = mk(0.0);
    let f = s.unit_functional(&e(1, 2)).unwrap();
    let rep = property_kwuc_test(&s, &a, &b, 1, &[f], &seqs, &y_seq, 0.05).unwrap();
    assert_eq!(rep.d_ab, 0.0);
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
}

#[test]
fn membership_soundness_of_samples() {
    let s = space(NormDescriptor::sup(3));
    let sets = [
        SetDescriptor::UnitBall,
        SetDescriptor::ScaledSphere { r: 1.5 },
        SetDescriptor::Subspace {
            basis: vec![e(0, 3), e(1, 3)],
        },
        SetDescriptor::Polytope {
            vertices: vec![e(0, 3), e(1, 3), e(2, 3)],
        },
        SetDescriptor::SubspaceBall {
            basis: vec![e(0, 3), e(1, 3)],
        },
    ];
    let x = vec![2.0, 0.3, -0.5];
    for set in sets {
        let sample = near_projection_sample(&s, &x, &set, 0.25, 16, 11).unwrap();
        let bound = sample.distance + 0.25 + 1e-9;
        for y in &sample.points {
            assert!(set.contains(&s, y, 1e-7).unwrap(), "{set:?}: {y:?}");
            assert!(s.norm_unchecked(&linalg::sub(&x, y)) <= bound);
        }
    }
}
