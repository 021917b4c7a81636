use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use splitflow::symplectic::{
    geodesic, graph_lagrangian, hormander_along, hormander_index, maslov_crossing, maslov_unitary,
    random, souriau_unitary, transversal_connecting_path, LagrangianFrame, LagrangianPath,
    Polarization, SymplecticSpace,
};
use splitflow::{EndpointConvention, HalfInteger};

const CONVENTIONS: [EndpointConvention; 2] = [
    EndpointConvention::Symmetric,
    EndpointConvention::LeftClosed,
];

fn line(space: &Arc<SymplecticSpace>, th: f64) -> LagrangianFrame {
    LagrangianFrame::new(
        space,
        DMatrix::from_column_slice(2, 1, &[th.cos(), th.sin()]),
    )
    .unwrap()
}

/// Independent count of eigenvalues of the Souriau unitary passing through
/// `−1`, from the continuously tracked phase of its determinant on a fine
/// grid and the eigen-angles at the two ends. Endpoint eigenvalues on `−1`
/// count one half.
fn souriau_oracle(path: &LagrangianPath, reference: &LagrangianFrame, steps: usize) -> HalfInteger {
    let u_at = |t: f64| souriau_unitary(&path.frame_at(t).unwrap(), reference).unwrap();
    let mut theta = 0.0;
    let mut prev = u_at(0.0).determinant();
    for i in 1..=steps {
        let d = u_at(i as f64 / steps as f64).determinant();
        theta += (d / prev).arg();
        prev = d;
    }
    // Angles measured from −1, in (−π, π].
    let psi = |t: f64| -> Vec<f64> {
        let u = u_at(t);
        let eig = u.clone().schur().unpack().1;
        (0..u.nrows()).map(|i| (-eig[(i, i)]).arg()).collect()
    };
    // h counts the points of 2πZ strictly below ψ plus half of one on it.
    let h = |p: f64| -> f64 {
        if p.abs() < 1e-7 {
            0.5
        } else if p > 0.0 {
            1.0
        } else {
            0.0
        }
    };
    let (p0, p1) = (psi(0.0), psi(1.0));
    let snap = |p: &f64| if p.abs() < 1e-7 { 0.0 } else { *p };
    let s0: f64 = p0.iter().map(snap).sum();
    let s1: f64 = p1.iter().map(snap).sum();
    let wraps = (theta - s1 + s0) / TAU;
    let v = wraps + p1.iter().map(|&p| h(p)).sum::<f64>() - p0.iter().map(|&p| h(p)).sum::<f64>();
    let halves = (2.0 * v).round();
    assert!(
        (2.0 * v - halves).abs() < 1e-6,
        "oracle not half-integral: {v}"
    );
    HalfInteger::from_halves(halves as i64)
}

#[test]
fn half_turn_of_a_line_has_index_one() {
    let s = SymplecticSpace::standard(1);
    let s2 = Arc::clone(&s);
    let path = LagrangianPath::from_fn(move |t| Ok(line(&s2, PI * t))).unwrap();
    let r = line(&s, 0.0);
    let c = maslov_crossing(&path, &r, EndpointConvention::Symmetric).unwrap();
    let u = maslov_unitary(&path, &r, EndpointConvention::Symmetric).unwrap();
    let oracle = souriau_oracle(&path, &r, 4000);
    assert_eq!(c.value, oracle);
    assert_eq!(u.value, oracle);
    assert_eq!(oracle.as_integer().map(i64::abs), Some(1));
    assert!(c.is_consistent() && u.is_consistent());
    // Left-closed: whole crossing weight sits at one end.
    let lc = maslov_crossing(&path, &r, EndpointConvention::LeftClosed).unwrap();
    assert_eq!(lc.value, oracle);
    assert_eq!(
        maslov_unitary(&path, &r, EndpointConvention::LeftClosed)
            .unwrap()
            .value,
        oracle
    );
}

#[test]
fn counterclockwise_rotation_is_positive() {
    let s = SymplecticSpace::standard(1);
    let s2 = Arc::clone(&s);
    let path = LagrangianPath::from_fn(move |t| Ok(line(&s2, 0.3 + PI * t))).unwrap();
    let r = line(&s, PI / 2.0);
    let c = maslov_crossing(&path, &r, EndpointConvention::Symmetric).unwrap();
    assert_eq!(c.crossings.len(), 1);
    assert_eq!(c.value, souriau_oracle(&path, &r, 4000));
}

#[test]
fn constant_path_is_zero() {
    let s = SymplecticSpace::standard(2);
    let f = LagrangianFrame::coordinate(&s, &[0, 1]).unwrap();
    let p = LagrangianPath::constant(f.clone());
    for conv in CONVENTIONS {
        assert!(maslov_crossing(&p, &f, conv).unwrap().value.is_zero());
        assert!(maslov_unitary(&p, &f, conv).unwrap().value.is_zero());
    }
}

#[test]
fn path_then_reverse_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let s = SymplecticSpace::standard(n);
        let p = random::smooth_path(&mut rng, &s, 3.0).unwrap();
        let r = random::lagrangian(&mut rng, &s).unwrap();
        let back = p.concat(&p.reversed().unwrap()).unwrap();
        for conv in CONVENTIONS {
            assert!(maslov_crossing(&back, &r, conv).unwrap().value.is_zero());
            assert!(maslov_unitary(&back, &r, conv).unwrap().value.is_zero());
        }
    }
}

#[test]
fn intersection_dim_matches_stacked_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = SymplecticSpace::standard(3);
    for trial in 0..20 {
        let a = random::lagrangian(&mut rng, &s).unwrap();
        // Force a shared subspace of dimension `trial % 4`.
        let k = trial % 4;
        let b = if k == 0 {
            random::lagrangian(&mut rng, &s).unwrap()
        } else {
            let z = random::orthogonal(&mut rng, 3).map(|x| Complex64::new(x, 0.0));
            let mut d = DMatrix::<Complex64>::identity(3, 3);
            for i in k..3 {
                d[(i, i)] = Complex64::from_polar(1.0, rng.gen_range(0.3..2.8));
            }
            let za = &z * d * z.adjoint();
            LagrangianFrame::from_unitary(&a, &za).unwrap()
        };
        let stacked = DMatrix::from_fn(6, 6, |i, j| {
            if j < 3 {
                a.frame()[(i, j)]
            } else {
                b.frame()[(i, j - 3)]
            }
        });
        let rank = stacked
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&x| x > 1e-8)
            .count();
        assert_eq!(a.intersection_dim(&b).unwrap(), 6 - rank);
        assert_eq!(a.intersection_dim(&b).unwrap(), k);
    }
    let l = LagrangianFrame::coordinate(&s, &[0, 1, 2]).unwrap();
    assert_eq!(l.intersection_dim(&l).unwrap(), 3);
    assert_eq!(l.intersection_dim(&l.j_complement()).unwrap(), 0);
}

#[test]
fn random_graph_is_lagrangian() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pol = Polarization::standard(2).unwrap();
    for _ in 0..20 {
        let t = random::symmetric(&mut rng, 2, 2.0);
        let g = graph_lagrangian(&pol.plus, &pol.minus, &t).unwrap();
        let (orth, iso) = g.defects();
        assert!(orth < 1e-12 && iso < 1e-12);
        let w = pol.space().omega(g.frame(), g.frame());
        assert!(w.amax() < 1e-12);
    }
}

#[test]
fn connecting_path_avoids_graph_and_plus() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pol = Polarization::standard(2).unwrap();
    for _ in 0..20 {
        let t = random::symmetric(&mut rng, 2, 3.0);
        let path = transversal_connecting_path(&pol, &t).unwrap();
        let g = pol.graph(&t).unwrap();
        for k in 0..=200 {
            let f = path.frame_at(k as f64 / 200.0).unwrap();
            assert_eq!(f.intersection_dim(&g).unwrap(), 0);
            assert_eq!(f.intersection_dim(&pol.plus).unwrap(), 0);
        }
        assert!(path.end().gap(&pol.mirror_graph(&t, 1.0).unwrap()).unwrap() < 1e-14);
    }
}

#[test]
fn algorithms_agree_on_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0;
    for n in 1..=4 {
        let s = SymplecticSpace::standard(n);
        for _ in 0..30 {
            let p = random::smooth_path(&mut rng, &s, 2.5).unwrap();
            let r = random::lagrangian(&mut rng, &s).unwrap();
            for conv in CONVENTIONS {
                let c = maslov_crossing(&p, &r, conv).unwrap();
                let u = maslov_unitary(&p, &r, conv).unwrap();
                if c.value != u.value {
                    let o = souriau_oracle(&p, &r, 20000);
                    panic!(
                        "dim {} conv {conv}: crossing {} {:?} unitary {} {:?} oracle {}",
                        2 * n,
                        c.value,
                        c.crossings,
                        u.value,
                        u.crossings,
                        o
                    );
                }
                assert!(c.is_consistent() && u.is_consistent());
            }
            total += 1;
        }
    }
    assert!(total >= 100);
}

#[test]
fn algorithms_agree_on_random_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..100 {
        let n = 1 + i % 4;
        let s = SymplecticSpace::standard(n);
        let p = random::smooth_loop(&mut rng, &s).unwrap();
        assert!(p.start().gap(p.end()).unwrap() < 1e-12);
        let r = random::lagrangian(&mut rng, &s).unwrap();
        let c = maslov_crossing(&p, &r, EndpointConvention::Symmetric).unwrap();
        let u = maslov_unitary(&p, &r, EndpointConvention::Symmetric).unwrap();
        assert_eq!(c.value, u.value);
        assert!(c.value.is_integer());
    }
}

#[test]
fn endpoint_crossings_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 1..=3 {
        let s = SymplecticSpace::standard(n);
        for _ in 0..6 {
            let p = random::smooth_path(&mut rng, &s, 2.0).unwrap();
            // References through both ends of the path.
            for r in [p.start().clone(), p.end().clone()] {
                let oracle = souriau_oracle(&p, &r, 3000);
                let c = maslov_crossing(&p, &r, EndpointConvention::Symmetric).unwrap();
                let u = maslov_unitary(&p, &r, EndpointConvention::Symmetric).unwrap();
                assert_eq!(c.value, oracle);
                assert_eq!(u.value, oracle);
                let lc = maslov_crossing(&p, &r, EndpointConvention::LeftClosed).unwrap();
                assert_eq!(
                    lc.value,
                    maslov_unitary(&p, &r, EndpointConvention::LeftClosed)
                        .unwrap()
                        .value
                );
            }
        }
    }
}

#[test]
fn additivity_under_concatenation() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 1..=3 {
        let s = SymplecticSpace::standard(n);
        let a = random::smooth_path(&mut rng, &s, 2.0).unwrap();
        let b = geodesic(a.end(), &random::lagrangian(&mut rng, &s).unwrap()).unwrap();
        let ab = a.concat(&b).unwrap();
        let r = random::lagrangian(&mut rng, &s).unwrap();
        for conv in CONVENTIONS {
            let lhs = maslov_crossing(&ab, &r, conv).unwrap().value;
            let rhs = maslov_crossing(&a, &r, conv).unwrap().value
                + maslov_crossing(&b, &r, conv).unwrap().value;
            assert_eq!(lhs, rhs);
        }
        // Splitting at a point of the Maslov cycle.
        let r = a.end().clone();
        for conv in CONVENTIONS {
            let lhs = maslov_unitary(&ab, &r, conv).unwrap().value;
            let rhs = maslov_unitary(&a, &r, conv).unwrap().value
                + maslov_unitary(&b, &r, conv).unwrap().value;
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn discretization_does_not_change_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = SymplecticSpace::standard(3);
    let p = random::smooth_path(&mut rng, &s, 3.0).unwrap();
    let r = random::lagrangian(&mut rng, &s).unwrap();
    let coarse = maslov_unitary(&p, &r, EndpointConvention::Symmetric)
        .unwrap()
        .value;
    let mut fine = p.clone();
    fine.refine_until(0.05).unwrap();
    assert!(fine.samples().len() > p.samples().len());
    assert_eq!(
        maslov_unitary(&fine, &r, EndpointConvention::Symmetric)
            .unwrap()
            .value,
        coarse
    );
    assert_eq!(
        maslov_crossing(&fine, &r, EndpointConvention::Symmetric)
            .unwrap()
            .value,
        coarse
    );
}

#[test]
fn hormander_trivial_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = SymplecticSpace::standard(2);
    let v0 = random::lagrangian(&mut rng, &s).unwrap();
    let v1 = random::lagrangian(&mut rng, &s).unwrap();
    let l = random::lagrangian(&mut rng, &s).unwrap();
    let m = random::lagrangian(&mut rng, &s).unwrap();
    for conv in CONVENTIONS {
        assert!(hormander_index(&v0, &v0, &l, &m, conv).unwrap().is_zero());
        assert!(hormander_index(&v0, &v1, &l, &l, conv).unwrap().is_zero());
    }
}

#[test]
fn hormander_symmetries_and_path_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for i in 0..30 {
        let n = 1 + i % 3;
        let s = SymplecticSpace::standard(n);
        let pick = |rng: &mut ChaCha8Rng| {
            // Mix generic choices with coincidences that create endpoint crossings.
            random::lagrangian(rng, &s).unwrap()
        };
        let v0 = pick(&mut rng);
        let v1 = pick(&mut rng);
        let l = if i % 5 == 0 {
            v0.clone()
        } else {
            pick(&mut rng)
        };
        let m = if i % 7 == 0 {
            v1.clone()
        } else {
            pick(&mut rng)
        };
        for conv in CONVENTIONS {
            let h = hormander_index(&v0, &v1, &l, &m, conv).unwrap();
            assert_eq!(h, -hormander_index(&v0, &v1, &m, &l, conv).unwrap());
            assert_eq!(h, -hormander_index(&v1, &v0, &l, &m, conv).unwrap());
            // Through a random intermediate Lagrangian.
            let mid = pick(&mut rng);
            let other = geodesic(&v0, &mid)
                .unwrap()
                .concat(&geodesic(&mid, &v1).unwrap())
                .unwrap();
            assert_eq!(h, hormander_along(&other, &l, &m, conv).unwrap());
        }
    }
}
