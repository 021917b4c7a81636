use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitflow::mode_model::*;
use splitflow::symplectic::{maslov_unitary, LagrangianFrame, LagrangianPath, SymplecticSpace};
use splitflow::{EndpointConvention, HalfInteger};
use std::collections::BTreeSet;
use std::f64::consts::PI;

const SYM: EndpointConvention = EndpointConvention::Symmetric;

#[test]
fn sobolev_norm_matches_direct_sum() {
    let s = TangentialSpectrum::linear(20, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let v = ModeVector {
            coeffs: DVector::from_fn(s.dim(), |_, _| rng.gen_range(-1.0..1.0)),
        };
        let sx: f64 = rng.gen_range(-1.0..1.0);
        let mut sum = 0.0;
        for k in (1..=20i64).flat_map(|k| [k, -k]) {
            let c = v.coeffs[s.axis(k)];
            let weight = if k.abs() <= 2 {
                1.0
            } else {
                (k.abs() - 2) as f64
            };
            sum += c * c * weight.powf(2.0 * sx);
        }
        assert!(
            (sobolev_norm(&s, &v, sx).unwrap() - sum.sqrt()).abs() < 1e-12 * sum.sqrt().max(1.0)
        );
    }
}

#[test]
fn aps_range_and_kernel_are_isotropic() {
    let s = TangentialSpectrum::linear(12, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for side in [TraceSide::Minus, TraceSide::Plus] {
        let t = TraceSpace::new(s.clone(), side);
        let p = aps_projector(&t);
        let q = DMatrix::identity(t.dim(), t.dim()) - &p;
        for _ in 0..20 {
            let u = DVector::from_fn(t.dim(), |_, _| rng.gen_range(-1.0..1.0));
            let v = DVector::from_fn(t.dim(), |_, _| rng.gen_range(-1.0..1.0));
            assert!(t.space().omega_vec(&(&p * &u), &(&p * &v)).abs() < 1e-14);
            assert!(t.space().omega_vec(&(&q * &u), &(&q * &v)).abs() < 1e-14);
        }
    }
}

#[test]
fn weighted_norm_and_form_agree_with_coefficients() {
    let s = TangentialSpectrum::linear(8, 0).unwrap();
    let t = TraceSpace::new(s.clone(), TraceSide::Minus);
    let x = ModeVector::basis(&s, 3);
    let y = ModeVector::basis(&s, -3);
    assert!((t.norm(&x).unwrap() - 3f64.sqrt()).abs() < 1e-15);
    assert!((t.omega(&x, &y).unwrap() - 1.0).abs() < 1e-15);
    let hx = t.to_hilbert(&x).unwrap();
    let hy = t.to_hilbert(&y).unwrap();
    assert!((t.space().omega_vec(&hx, &hy) - 1.0).abs() < 1e-15);
}

#[test]
fn compatibility_on_many_pairs() {
    let setup = ReductionSetup::new(TangentialSpectrum::linear(DEFAULT_ORDER, 2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    assert!(setup.compatibility_defect(&mut rng, 1000) < 1e-10);
}

#[test]
fn continuation_traces_reduce_across_sides() {
    let s = TangentialSpectrum::linear(24, 1).unwrap();
    let setup = ReductionSetup::new(s);
    let cyl = CappedCylinder::default();
    let big = cyl.cauchy_data(&setup.big).unwrap();
    let small = cyl.cauchy_data(&setup.small).unwrap();
    let reduced = reduce_lagrangian(&setup, &big).unwrap();
    assert!(reduced.gap(&small).unwrap() < 1e-12);
}

#[test]
fn continuation_projector_is_compact_perturbation() {
    let s = TangentialSpectrum::linear(DEFAULT_ORDER, 1).unwrap();
    let cyl = CappedCylinder::default();
    let table =
        projection_difference_report(|k| aps_vs_continuation(&s, &cyl, k), &SWEEP_ORDERS).unwrap();
    for r in &table.rows {
        eprintln!(
            "K={:4} norm={:.4} s8={:.3e} >0.5: {}",
            r.k,
            r.norm(),
            r.nth(8),
            r.count_above(LARGE_SINGULAR_VALUE)
        );
    }
    assert!(
        table.stabilizes(8, 0.05),
        "{:?}",
        table.last_relative_changes(8)
    );
    // Singular values of a tail mode decay with the mode number.
    let last = table.rows.last().unwrap();
    assert!(last.nth(2 * 100) < 1e-3);
}

#[test]
fn swapped_halves_differ_by_finite_rank() {
    let s = TangentialSpectrum::linear(DEFAULT_ORDER, 0).unwrap();
    let setup = ReductionSetup::new(s.clone());
    let mut axes = s.plus_axes();
    for k in [1i64, 4, 9] {
        axes[k as usize - 1] = s.axis(-k);
    }
    let target = LagrangianFrame::coordinate(setup.big.space(), &axes).unwrap();
    let chosen = choose_fg(&setup, &target, 10).unwrap();
    assert_eq!(chosen.dim_f(), 3);
    assert_eq!(chosen.lambda_minus().intersection_dim(&target).unwrap(), 0);
    let table =
        projection_difference_report(|k| aps_vs_swapped(&s, &chosen.f_pairs, k), &SWEEP_ORDERS)
            .unwrap();
    assert!(table.rank_at_most(2 * chosen.dim_f()));
}

#[test]
fn choose_fg_on_generic_target() {
    let s = TangentialSpectrum::linear(16, 0).unwrap();
    let setup = ReductionSetup::new(s);
    let target = CappedCylinder::default().cauchy_data(&setup.big).unwrap();
    let chosen = choose_fg(&setup, &target, 16).unwrap();
    assert_eq!(chosen.lambda_minus().intersection_dim(&target).unwrap(), 0);
    let none: BTreeSet<usize> = BTreeSet::new();
    assert_eq!(chosen.f_pairs, none);
}

#[test]
fn single_block_rotation_matches_block_oracle() {
    let s = TangentialSpectrum::linear(16, 0).unwrap();
    let setup = ReductionSetup::new(s.clone());
    let k = 5i64;
    let (a, b) = (s.axis(k), s.axis(-k));
    let turn = 2.3 * PI;
    let space = setup.big.space().clone();
    let sp = s.clone();
    let path = LagrangianPath::from_fn(move |t| {
        let mut x = DMatrix::zeros(32, 16);
        for p in 1..=16i64 {
            x[(sp.axis(p), p as usize - 1)] = 1.0;
            x[(sp.axis(-p), p as usize - 1)] = 0.3;
        }
        let th = 0.2 + turn * t;
        x[(a, 4)] = th.cos();
        x[(b, 4)] = th.sin();
        LagrangianFrame::new(&space, splitflow::linalg::orthonormalize(&x, 1e-8)?)
    })
    .unwrap();
    let r = split_and_reduce(&setup, &path, SYM).unwrap();
    assert!(r.agrees());
    let plane = SymplecticSpace::standard(1);
    let line = LagrangianPath::from_fn({
        let plane = plane.clone();
        move |t| {
            let th = 0.2 + turn * t;
            LagrangianFrame::new(
                &plane,
                DMatrix::from_column_slice(2, 1, &[th.cos(), th.sin()]),
            )
        }
    })
    .unwrap();
    let reference = LagrangianFrame::coordinate(&plane, &[1]).unwrap();
    let oracle = maslov_unitary(&line, &reference, SYM).unwrap();
    assert_eq!(r.before.value, oracle.value);
    assert_ne!(oracle.value, HalfInteger::ZERO);
}

#[test]
fn random_block_paths_keep_their_index() {
    let setup = ReductionSetup::new(TangentialSpectrum::linear(24, 1).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut nonzero = 0;
    for _ in 0..20 {
        let path = random_block_path(&mut rng, &setup, 3.0).unwrap();
        let r = split_and_reduce(&setup, &path, SYM).unwrap();
        assert!(r.agrees(), "{:?} vs {:?}", r.before.value, r.after.value);
        if r.before.value != HalfInteger::ZERO {
            nonzero += 1;
        }
    }
    assert!(nonzero >= 5, "only {nonzero} nontrivial paths");
}

#[test]
fn reduction_output_is_lagrangian() {
    let setup = ReductionSetup::new(TangentialSpectrum::linear(32, 0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let path = random_block_path(&mut rng, &setup, 2.0).unwrap();
        let nu = path.frame_at(rng.gen_range(0.0..1.0)).unwrap();
        let (orth, iso) = reduce_lagrangian(&setup, &nu).unwrap().defects();
        assert!(orth < 1e-10 && iso < 1e-10);
    }
}
