use super::*;
use crate::space::WeightRule;

fn space(d: NormDescriptor) -> Space {
    Space::new(d).unwrap()
}

fn e(i: usize, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

#[test]
fn euclidean_modulus_near_closed_form() {
    // delta(1) = 1 - sqrt(3)/2 for the Euclidean norm.
    let s = space(NormDescriptor::euclidean(3));
    let mut q = ModulusQuery::new(ModulusMode::KUr, 1, 1.0);
    q.budget = SearchBudget {
        multistarts: 24,
        local_steps: 400,
    };
    q.seed = 7;
    let est = modulus_estimate(&s, &q).unwrap();
    let target = 1.0 - 3f64.sqrt() / 2.0;
    assert!(!est.infeasible);
    assert!(
        (est.value - target).abs() < 2e-2,
        "estimate {} target {target}",
        est.value
    );
    assert!(est.feasibility_gap <= 1e-9);
    // witness re-check
    for w in &est.witness {
        assert!((s.norm(w).unwrap() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn flat_face_modulus_is_exactly_zero() {
    let s = space(NormDescriptor::sup(2));
    let mut q = ModulusQuery::new(ModulusMode::KWur, 1, 1.5);
    q.functionals = vec![s.unit_functional(&[0.0, 1.0]).unwrap()];
    q.seed = 3;
    let est = modulus_estimate(&s, &q).unwrap();
    assert_eq!(est.value, 0.0);
    assert!(est.feasibility_gap <= 1e-9);
    assert_eq!(est.witness.len(), 2);
}

#[test]
fn infeasible_epsilon_returns_one() {
    // eps beyond the Hadamard bound k! 2^k can have no witness.
    let s = space(NormDescriptor::euclidean(2));
    let mut q = ModulusQuery::new(ModulusMode::KUr, 1, 5.0);
    q.budget = SearchBudget::small();
    let est = modulus_estimate(&s, &q).unwrap();
    assert!(est.infeasible);
    assert_eq!(est.value, 1.0);
    assert!(est.witness.is_empty());
}

#[test]
fn kwlur_anchored_mode_runs() {
    let s = space(NormDescriptor::sup(2));
    let mut q = ModulusQuery::new(ModulusMode::KWlur, 1, 0.5);
    q.functionals = vec![s.unit_functional(&[1.0, 0.0]).unwrap()];
    q.anchor = Some(vec![1.0, 1.0]);
    q.budget = SearchBudget::small();
    let est = modulus_estimate(&s, &q).unwrap();
    // x = (1,1) sits on a flat face; x_1 = (0.5, 1) keeps the mean on the
    // face with |f(x - x_1)| = 0.5, so the anchored modulus vanishes.
    assert!(est.value < 1e-9, "value {}", est.value);
}

#[test]
fn classify_l1_cube_not_2_rotund() {
    // The positive face of the l_1 ball in R^3 carries affinely
    // independent unit vectors whose mean is on the sphere.
    let s = space(NormDescriptor::one(3));
    let verdict = classify_k_rotund(&s, 2, 0.05, SearchBudget::small(), 5).unwrap();
    assert_eq!(verdict.classification, Classification::WitnessFound);
    let cert = verdict.certificate.unwrap();
    assert!(cert.volume >= 0.05);
    assert!(cert.sum_norm >= 3.0 * (1.0 - 1e-6));
    for n in &cert.norms {
        assert!((n - 1.0).abs() < 1e-7);
    }
}

#[test]
fn classify_euclidean_is_rotund() {
    let s = space(NormDescriptor::euclidean(3));
    let verdict = classify_k_rotund(
        &s,
        1,
        0.05,
        SearchBudget {
            multistarts: 12,
            local_steps: 150,
        },
        5,
    )
    .unwrap();
    assert_eq!(verdict.classification, Classification::NoWitnessAtBudget);
    assert!(verdict.certificate.is_none());
}

#[test]
fn classify_sullivan_separation_at_low_order() {
    // SullivanSum(dim 4, {1,2}): e_1, e_2 witnesses order-1 failure.
    let s = space(NormDescriptor::SullivanSum {
        dim: 4,
        indices: vec![1, 2],
    });
    let verdict = classify_k_rotund(&s, 1, 0.05, SearchBudget::small(), 5).unwrap();
    assert_eq!(verdict.classification, Classification::WitnessFound);
    let cert = verdict.certificate.unwrap();
    assert!(cert.volume >= 1.9, "expected V close to 2, got {}", cert.volume);
}

#[test]
fn wmlur_constant_sequences_decay() {
    let s = space(NormDescriptor::euclidean(2));
    let x = e(0, 2);
    let seqs = vec![vec![x.clone(); 6], vec![x.clone(); 6]];
    let fs = vec![vec![s.unit_functional(&[0.0, 1.0]).unwrap()]];
    let rep = wmlur_sequence_test(&s, 1, &x, &seqs, &fs, 1e-3).unwrap();
    assert!(rep.hypothesis_ok);
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
    assert!(rep.det_sup_per_n.iter().all(|&v| v == 0.0));
}

#[test]
fn wmlur_rotation_sequences_match_closed_form() {
    let s = space(NormDescriptor::euclidean(2));
    let x = e(0, 2);
    let n_max = 40;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for n in 1..=n_max {
        let t = 1.0 / n as f64;
        a.push(vec![t.cos(), t.sin()]);
        b.push(vec![t.cos(), -t.sin()]);
    }
    let fs = vec![vec![s.unit_functional(&[0.0, 1.0]).unwrap()]];
    let rep = wmlur_sequence_test(&s, 1, &x, &[a, b], &fs, 0.06).unwrap();
    assert!(rep.hypothesis_ok);
    for (n, sup) in rep.det_sup_per_n.iter().enumerate() {
        let t = 1.0 / (n + 1) as f64;
        let oracle = 2.0 * t.sin();
        assert!((sup - oracle).abs() < 1e-12, "n={} {} vs {}", n + 1, sup, oracle);
    }
    assert_eq!(rep.verdict, DecayVerdict::DecaysBelowTol);
}

#[test]
fn wmlur_square_stalls() {
    let s = space(NormDescriptor::sup(2));
    let x = vec![1.0, 0.0];
    let a = vec![vec![1.0, 0.5]; 8];
    let b = vec![vec![1.0, -0.5]; 8];
    let fs = vec![vec![s.unit_functional(&[0.0, 1.0]).unwrap()]];
    let rep = wmlur_sequence_test(&s, 1, &x, &[a, b], &fs, 1e-3).unwrap();
    assert!(rep.hypothesis_ok); // ||2x - sum|| = 0 identically
    assert_eq!(rep.verdict, DecayVerdict::StallsAboveFloor);
    assert!((rep.det_sup_per_n.last().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn quotient_sweep_trivial_subspace_matches_base() {
    let s = space(NormDescriptor::sup(3));
    let f = s.unit_functional(&[1.0, 0.0, 0.0]).unwrap();
    let res = quotient_modulus_sweep(
        &s,
        &[f],
        &[vec![]],
        0.5,
        SearchBudget::small(),
        11,
    )
    .unwrap();
    assert_eq!(res.entries.len(), 1);
    assert_eq!(res.entries[0].estimate.value, res.base_estimate.value);
}

#[test]
fn quotient_sweep_euclidean_matches_modulus() {
    let s = space(NormDescriptor::euclidean(4));
    let f = s.unit_functional(&e(0, 4)).unwrap();
    let res = quotient_modulus_sweep(
        &s,
        &[f],
        &[vec![e(3, 4)]],
        1.0,
        SearchBudget {
            multistarts: 24,
            local_steps: 400,
        },
        7,
    )
    .unwrap();
    let target = 1.0 - 3f64.sqrt() / 2.0;
    assert!(
        (res.family_infimum - target).abs() < 2e-2,
        "inf {} target {target}",
        res.family_infimum
    );
}

#[test]
fn quotient_sweep_flat_face_zero() {
    let s = space(NormDescriptor::sup(3));
    let f = s.unit_functional(&e(0, 3)).unwrap();
    let res = quotient_modulus_sweep(
        &s,
        &[f],
        &[vec![e(2, 3)]],
        0.5,
        SearchBudget::small(),
        5,
    )
    .unwrap();
    assert!(res.family_infimum < 1e-9, "inf {}", res.family_infimum);
}

#[test]
fn quotient_sweep_rejects_bad_subspace() {
    let s = space(NormDescriptor::euclidean(3));
    let f = s.unit_functional(&e(0, 3)).unwrap();
    let err = quotient_modulus_sweep(
        &s,
        &[f],
        &[vec![e(0, 3)]], // not inside ker f
        0.5,
        SearchBudget::small(),
        5,
    );
    assert!(matches!(err, Err(Error::KernelMismatch(_))));
}

#[test]
fn product_witness_square_factors() {
    let sup2 = space(NormDescriptor::sup(2));
    let factors = vec![sup2.clone(), sup2.clone()];
    let w = FactorWitness {
        x: vec![1.0, 1.0],
        y: vec![1.0, -1.0],
        functional: sup2.unit_functional(&[0.0, 1.0]).unwrap(),
    };
    let res = product_witness_build(
        &factors,
        &[w.clone(), w],
        PValue::new(2.0).unwrap(),
    )
    .unwrap();
    assert!((res.determinant.abs() - 2.0).abs() < 1e-12);
    assert!(res.identity_error < 1e-10);
    for n in &res.point_norms {
        assert!((n - 1.0).abs() < 1e-10);
    }
}

#[test]
fn product_witness_equal_pair_vanishes() {
    let sup2 = space(NormDescriptor::sup(2));
    let factors = vec![sup2.clone(), sup2.clone()];
    let w_live = FactorWitness {
        x: vec![1.0, 1.0],
        y: vec![1.0, -1.0],
        functional: sup2.unit_functional(&[0.0, 1.0]).unwrap(),
    };
    let w_dead = FactorWitness {
        x: vec![1.0, 0.0],
        y: vec![1.0, 0.0],
        functional: sup2.unit_functional(&[1.0, 0.0]).unwrap(),
    };
    let res = product_witness_build(
        &factors,
        &[w_live, w_dead],
        PValue::new(2.0).unwrap(),
    )
    .unwrap();
    assert_eq!(res.predicted, 0.0);
    assert!(res.determinant.abs() < 1e-12);
}

#[test]
fn product_witness_single_factor() {
    let sup2 = space(NormDescriptor::sup(2));
    let w = FactorWitness {
        x: vec![1.0, 1.0],
        y: vec![1.0, -1.0],
        functional: sup2.unit_functional(&[0.0, 1.0]).unwrap(),
    };
    for p in [1.0, 1.5, 2.0] {
        let res =
            product_witness_build(&[sup2.clone()], &[w.clone()], PValue::new(p).unwrap()).unwrap();
        // k = 1: |D_1| = 1^{-1/p} |f(x-y)| = 2
        assert!((res.determinant.abs() - 2.0).abs() < 1e-12);
        assert!(res.identity_error < 1e-12);
    }
}

#[test]
fn product_witness_rejects_non_unit() {
    let sup2 = space(NormDescriptor::sup(2));
    let w = FactorWitness {
        x: vec![2.0, 0.0],
        y: vec![1.0, -1.0],
        functional: sup2.unit_functional(&[0.0, 1.0]).unwrap(),
    };
    assert!(matches!(
        product_witness_build(&[sup2], &[w], PValue::new(2.0).unwrap()),
        Err(Error::NonUnitInput(_))
    ));
}

#[test]
fn mode_ordering_on_flat_square() {
    let s = space(NormDescriptor::sup(2));
    let f = s.unit_functional(&[0.0, 1.0]).unwrap();
    let mut qw = ModulusQuery::new(ModulusMode::KWur, 1, 1.0);
    qw.functionals = vec![f];
    qw.budget = SearchBudget::small();
    let west = modulus_estimate(&s, &qw).unwrap();
    let mut qu = ModulusQuery::new(ModulusMode::KUr, 1, 1.0);
    qu.budget = SearchBudget::small();
    qu.warm_starts = vec![west.witness.clone()];
    let uest = modulus_estimate(&s, &qu).unwrap();
    assert!(west.value >= uest.value - 1e-6);
}

#[test]
fn schur_harness_collapse_and_stall() {
    let s = space(NormDescriptor::sup(2));
    // collapsing tuples: everything goes to zero
    let collapse: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|i| {
            (1..=6)
                .map(|n| {
                    let t = 1.0 / n as f64;
                    vec![1.0, if i == 0 { t } else { -t }]
                })
                .collect()
        })
        .collect();
    let rep = schur_limit_harness(&s, 1, &collapse, 16, 3).unwrap();
    let last = rep.samples.last().unwrap();
    assert!(last.volume < 0.4);
    assert!(last.sampled_sup <= last.volume + 1e-12);
    // volume bounded below: dual-vertex sampling keeps a large determinant
    let spread: Vec<Vec<Vec<f64>>> = vec![
        vec![vec![1.0, 1.0]; 4],
        vec![vec![1.0, -1.0]; 4],
    ];
    let rep = schur_limit_harness(&s, 1, &spread, 16, 3).unwrap();
    for sam in &rep.samples {
        assert!((sam.volume - 2.0).abs() < 1e-10);
        assert!(sam.sampled_sup >= 0.5);
    }
}

#[test]
fn smith_turett_space_modulus_positive() {
    // Strictly convex renorming: no flat-face witness, so the kWUR
    // estimate at a macroscopic eps stays positive.
    let s = space(NormDescriptor::SmithTurett {
        dim: 3,
        weight_rule: WeightRule::Dyadic,
    });
    let f = s.unit_functional(&[1.0, 0.3, -0.2]).unwrap();
    let mut q = ModulusQuery::new(ModulusMode::KWur, 1, 0.8);
    q.functionals = vec![f];
    q.budget = SearchBudget::small();
    q.seed = 9;
    let est = modulus_estimate(&s, &q).unwrap();
    assert!(!est.infeasible);
    assert!(est.value > 1e-4, "value {}", est.value);
}

#[test]
fn quotient_rotundity_transfer() {
    // A flat-face witness in the sup norm survives passing to the
    // quotient by a kernel-line avoiding the difference span: the
    // quotient is again not 1-rotund, and the witness data project to a
    // quotient witness with unit norms and full sum.
    let base = space(NormDescriptor::sup(3));
    let x1 = vec![1.0, 1.0, 1.0];
    let x2 = vec![1.0, 1.0, -1.0];
    let f = base.support_functional(&linalg::add(&x1, &x2)).unwrap();
    assert!((f.apply(&x1) - 1.0).abs() < 1e-12);
    assert!((f.apply(&x2) - 1.0).abs() < 1e-12);
    // F = span{(1,-1,0)} lies in ker f and misses span{x1 - x2} = e_3.
    let fdir = vec![1.0, -1.0, 0.0];
    assert!(f.apply(&fdir).abs() < 1e-12);
    let quotient = space(NormDescriptor::Quotient {
        base: Box::new(NormDescriptor::sup(3)),
        subspace_basis: vec![fdir],
    });
    let q1 = quotient.project_from_base(&x1).unwrap();
    let q2 = quotient.project_from_base(&x2).unwrap();
    assert!((quotient.norm(&q1).unwrap() - 1.0).abs() < 1e-9);
    assert!((quotient.norm(&q2).unwrap() - 1.0).abs() < 1e-9);
    let sum = linalg::add(&q1, &q2);
    assert!((quotient.norm(&sum).unwrap() - 2.0).abs() < 1e-9);
    let vol = crate::volume::vk_volume(
        &quotient,
        &[q1, q2],
        1,
        crate::volume::VolumeStrategy::Auto,
        3,
    )
    .unwrap();
    assert!(vol.value > 0.5, "projected witness volume {}", vol.value);
    let verdict = classify_k_rotund(&quotient, 1, 0.05, SearchBudget::small(), 3).unwrap();
    assert_eq!(verdict.classification, Classification::WitnessFound);
}
