use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splitflow::formulas::*;
use splitflow::operator_lab::{
    aps_boundary_lagrangian, domain_lagrangian_d0, domain_lagrangian_d1, monodromy, OperatorFamily,
    Side, ZeroModeRule,
};
use splitflow::symplectic::{
    hormander_index, random, LagrangianFrame, Polarization, SymplecticSpace,
};
use splitflow::{EndpointConvention, HalfInteger};

const SYM: EndpointConvention = EndpointConvention::Symmetric;

fn h(n: i64) -> HalfInteger {
    HalfInteger::from_int(n)
}

#[test]
fn ramp_splits_with_closed_form_total() {
    let fam = OperatorFamily::ramp().unwrap();
    // Monodromy of the ramp at level λ is rotation by 2π(λ − t): identity
    // exactly when λ − t is an integer, so λ = 0 is crossed once, doubly.
    let m = monodromy(&fam, 0.5, 0.5).unwrap();
    assert!((m - nalgebra::Matrix2::identity()).norm() < 1e-9);
    for conv in [
        EndpointConvention::Symmetric,
        EndpointConvention::LeftClosed,
    ] {
        let r = verify_splitting(&fam, conv).unwrap();
        assert_eq!(r.sf_total, h(2));
        assert!(r.holds(), "{r:?}");
    }
}

#[test]
fn random_families_split() {
    for (i, seed) in instance_seeds(2024, 8).into_iter().enumerate() {
        let inst = generate(i, seed, FamilyKind::Mixed, |fam| {
            let r = verify_splitting(fam, SYM)?;
            let s = r.near_zero_stretch;
            Ok((r, s))
        })
        .unwrap();
        assert!(inst.result.holds(), "{:?}", inst.result);
    }
}

#[test]
fn aps_splitting_and_loop_corollary() {
    for (i, seed) in instance_seeds(77, 6).into_iter().enumerate() {
        let inst = generate(i, seed, FamilyKind::Mixed, |fam| {
            let r = verify_aps_splitting(fam, ZeroModeRule::default(), SYM)?;
            let s = r.near_zero_stretch;
            Ok((r, s))
        })
        .unwrap();
        let r = &inst.result;
        assert!(r.holds(), "{r:?}");
        if i % 2 == 1 {
            assert_eq!(r.hormander_minus, HalfInteger::ZERO);
            assert_eq!(r.hormander_plus, HalfInteger::ZERO);
        }
    }
}

#[test]
fn maslov_form_for_both_boundary_types() {
    let fam = family_from_seed(9, false).unwrap();
    let boundaries = [
        (Side::Minus, domain_lagrangian_d0(&fam).unwrap()),
        (Side::Plus, domain_lagrangian_d1(&fam).unwrap()),
        (
            Side::Minus,
            aps_boundary_lagrangian(&fam, 0, ZeroModeRule::default()).unwrap(),
        ),
        (
            Side::Plus,
            aps_boundary_lagrangian(&fam, 1, ZeroModeRule::default()).unwrap(),
        ),
    ];
    let rev = fam.reversed().unwrap();
    for (side, b) in &boundaries {
        let (sf, mas) = maslov_form_of_sf(&fam, *side, b, SYM).unwrap();
        assert_eq!(sf.report.value, mas.value);
        let (sf_r, mas_r) = maslov_form_of_sf(&rev, *side, b, SYM).unwrap();
        assert_eq!(sf_r.report.value, -sf.report.value);
        assert_eq!(mas_r.value, -mas.value);
    }
}

#[test]
fn mirrored_halves_have_zero_asymmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..4 {
        let base = OperatorFamily::random_trig(&mut rng, 1.0).unwrap();
        let fam = reflection_symmetric(&base).unwrap();
        for t in [0.0, 0.6] {
            let r = asymmetry_index(&fam, t, ZeroModeRule::default(), SYM).unwrap();
            assert!(r.symmetric(), "defect {}", r.symmetry_defect);
            assert!(r.certificate.as_ref().unwrap().vanishes());
            assert_eq!(r.value, HalfInteger::ZERO);
        }
    }
}

#[test]
fn generic_asymmetry_is_path_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nonzero = 0;
    for _ in 0..10 {
        let fam = OperatorFamily::random_trig(&mut rng, 1.5).unwrap();
        let r = asymmetry_index(&fam, 0.0, ZeroModeRule::default(), SYM).unwrap();
        assert!(r.path_independent(), "{r:?}");
        if r.value != HalfInteger::ZERO {
            nonzero += 1;
        }
    }
    eprintln!("nonzero asymmetry in {nonzero}/10 families");
}

#[test]
fn synthetic_symmetric_graphs_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2, 3, 4] {
        let pol = Polarization::standard(n).unwrap();
        for _ in 0..5 {
            let t = random::symmetric(&mut rng, n, 3.0);
            assert!(vanishing_certificate_for_graph(&pol, &t, SYM)
                .unwrap()
                .vanishes());
        }
    }
}

/// `ν = span{e_i : i < k in the second half} ⊕ graph(S)` on the remaining
/// coordinates, rotated by a block-diagonal orthogonal map that preserves
/// both halves.
fn forced_overlap<R: rand::Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
) -> (LagrangianFrame, LagrangianFrame) {
    let space = SymplecticSpace::standard(n);
    let s = random::symmetric(rng, n - k, 2.0);
    let mut x = nalgebra::DMatrix::zeros(2 * n, n);
    for i in 0..k {
        x[(n + i, i)] = 1.0;
    }
    for i in 0..n - k {
        x[(k + i, k + i)] = 1.0;
        for j in 0..n - k {
            x[(n + k + j, k + i)] = s[(j, i)];
        }
    }
    let o = random::orthogonal(rng, n);
    let mut rot = nalgebra::DMatrix::zeros(2 * n, 2 * n);
    rot.view_mut((0, 0), (n, n)).copy_from(&o);
    rot.view_mut((n, n), (n, n)).copy_from(&o);
    let nu = LagrangianFrame::new(&space, rot * x).unwrap();
    let plus = LagrangianFrame::coordinate(&space, &(0..n).collect::<Vec<_>>()).unwrap();
    (nu, plus)
}

#[test]
fn forced_overlap_instances_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in [2, 3, 4] {
        for k in 1..=n {
            let (nu, plus) = forced_overlap(&mut rng, n, k);
            let c = vanishing_certificate(&nu, &plus, SYM).unwrap();
            assert_eq!(c.ell0_dim, k);
            assert!(c.vanishes(), "{c:?}");
        }
    }
}

#[test]
fn hormander_skew_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let space = SymplecticSpace::standard(3);
    for _ in 0..10 {
        let f: Vec<_> = (0..4)
            .map(|_| random::lagrangian(&mut rng, &space).unwrap())
            .collect();
        let a = hormander_index(&f[0], &f[1], &f[2], &f[3], SYM).unwrap();
        let b = hormander_index(&f[0], &f[1], &f[3], &f[2], SYM).unwrap();
        assert_eq!(a, -b);
    }
}
