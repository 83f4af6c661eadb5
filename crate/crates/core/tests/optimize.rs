use klcone::optimize::*;
use klcone::rational::{rat, ratio, to_f64, RationalMatrix};
use klcone::specht::SpechtBundle;
use klcone::tableaux::{partitions, Partition};
use nalgebra::DMatrix;
use num_traits::Zero;

fn bundle(parts: &[usize]) -> SpechtBundle {
    SpechtBundle::new(&Partition::new(parts.to_vec()).unwrap()).unwrap()
}

fn floats(ms: &[RationalMatrix]) -> Vec<DMatrix<f64>> {
    ms.iter().map(RationalMatrix::to_f64).collect()
}

#[test]
fn two_one_maximum_is_kl() {
    let b = bundle(&[2, 1]);
    let r = maximize_trace(&b, &MaxOptions::default()).unwrap();
    assert!((r.objective - 4.0).abs() < 1e-6, "{}", r.objective);
    assert!((r.point.a[(0, 1)] + 1.0).abs() < 1e-6);
    assert!(r.point.residual <= 1e-9);
    assert_eq!(r.local_maxima.len(), 1);
}

#[test]
fn two_one_probe_recovers_interval() {
    let b = bundle(&[2, 1]);
    let p = feasible_region_probe(&b, 200, 7, 1e-12).unwrap();
    let (lo, hi) = p.range(0, 1).unwrap();
    assert!((lo + 1.0).abs() < 1e-6 && (hi + 0.5).abs() < 1e-6, "[{lo}, {hi}]");
}

#[test]
fn one_row_is_trivial() {
    let b = bundle(&[4]);
    let min = minimize_trace(&b).unwrap();
    let max = maximize_trace(&b, &MaxOptions::default()).unwrap();
    assert_eq!(min.a_exact.unwrap(), RationalMatrix::identity(1));
    assert_eq!(min.objective_exact.unwrap(), b.gram[(0, 0)]);
    assert_eq!(max.point.a, DMatrix::identity(1, 1));
    let p = feasible_region_probe(&b, 10, 1, 1e-9).unwrap();
    assert!(p.ranges.is_empty());
}

#[test]
fn minimizer_is_seminormal_up_to_seven() {
    for n in 1..=7 {
        for shape in partitions(n) {
            let b = SpechtBundle::new(&shape).unwrap();
            let r = minimize_trace(&b).unwrap();
            assert_eq!(r.a_exact.as_ref().unwrap(), &b.a_sn, "{shape:?}");
            assert!(feasibility_exact(&b.a_sn, &b.ops).unwrap().is_none());
            // the gradient vanishes: GA_sn is lower triangular
            let ga = b.gram.mul(&b.a_sn);
            for i in 0..b.dim() {
                for j in i + 1..b.dim() {
                    assert!(ga[(i, j)].is_zero());
                }
            }
        }
    }
}

#[test]
fn descent_from_identity_reaches_seminormal() {
    for n in 2..=6 {
        for shape in partitions(n) {
            let b = SpechtBundle::new(&shape).unwrap();
            let a = descend_from_identity(&b.gram.to_f64(), 1e-13);
            let diff = (&a - b.a_sn.to_f64()).amax();
            assert!(diff <= 1e-8, "{shape:?}: {diff}");
        }
    }
}

#[test]
fn maximizer_is_kl_for_small_shapes() {
    let opts = MaxOptions { starts: 6, ..MaxOptions::default() };
    for parts in [vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![3, 2]] {
        let b = bundle(&parts);
        let r = maximize_trace(&b, &opts).unwrap();
        let diff = (&r.point.a - b.a_kl.to_f64()).amax();
        assert!(diff <= 1e-4, "{parts:?}: |A - A_kl| = {diff}");
        assert_eq!(r.local_maxima.len(), 1, "{parts:?}");
        assert!(r.converged && r.point.residual <= 1e-9);
    }
}

#[test]
fn kl_is_a_strict_local_maximum() {
    for n in 2..=5 {
        for shape in partitions(n) {
            let b = SpechtBundle::new(&shape).unwrap();
            assert!(strict_local_max_exact(&b.a_kl, &b.gram, &b.ops).unwrap(), "{shape:?}");
        }
    }
}

#[test]
fn two_two_one_has_a_second_local_maximum() {
    let b = bundle(&[2, 2, 1]);
    let mut a = b.a_sn.clone();
    a[(0, 1)] = rat(-1);
    assert!(feasibility_exact(&a, &b.ops).unwrap().is_none());
    assert!(strict_local_max_exact(&a, &b.gram, &b.ops).unwrap());
    assert_eq!(objective_exact(&a, &b.gram), rat(50));
    assert_eq!(objective_exact(&b.a_kl, &b.gram), rat(68));
    assert!(!strict_local_max_exact(&b.a_sn, &b.gram, &b.ops).unwrap());
}

#[test]
fn kl_beats_seminormal() {
    for n in 2..=6 {
        for shape in partitions(n) {
            let b = SpechtBundle::new(&shape).unwrap();
            let kl = objective_exact(&b.a_kl, &b.gram);
            let sn = objective_exact(&b.a_sn, &b.gram);
            if b.dim() > 1 {
                assert!(kl > sn, "{shape:?}");
            } else {
                assert_eq!(kl, sn);
            }
        }
    }
}

#[test]
fn kkt_holds_for_reflection_shapes() {
    for n in 2..=6 {
        let k = kkt_residual(n).unwrap();
        assert!(k.residual.is_zero(), "n={n}: {}", k.residual);
        assert_eq!(k.multipliers.len(), n - 1);
    }
}

#[test]
fn constraint_gradient_matches_differences() {
    let b = bundle(&[3, 1]);
    let ops = floats(&b.ops);
    let a = b.a_kl.to_f64() * 0.7 + b.a_sn.to_f64() * 0.3;
    let h = 1e-6;
    for (s, op) in ops.iter().enumerate() {
        for u in 0..3 {
            for w in u + 1..3 {
                let g = constraint_gradient(&a, op, u, w).unwrap();
                let mut plus = a.clone();
                plus[(u, w)] += h;
                let mut minus = a.clone();
                minus[(u, w)] -= h;
                let fd = (&conjugates(&plus, &ops).unwrap()[s] - &conjugates(&minus, &ops).unwrap()[s]) / (2.0 * h);
                assert!((&fd - &g).amax() <= 1e-6, "s={s} ({u},{w})");
            }
        }
    }
}

#[test]
fn volume_properties() {
    for shape in partitions(5) {
        let b = SpechtBundle::new(&shape).unwrap();
        assert_eq!(optimize_volume_det(&b.a_kl, &b.gram), b.gram.determinant());
        assert_eq!(normalized_volume_squared(&b.a_sn, &b.gram), rat(1));
        let v = normalized_volume(&b.a_kl.to_f64(), &b.gram.to_f64());
        assert!(v > 0.0 && v <= 1.0 + 1e-12);
        let exact = to_f64(&normalized_volume_squared(&b.a_kl, &b.gram));
        assert!((v * v - exact).abs() < 1e-12);
    }
    let b = bundle(&[2, 1]);
    assert_eq!(normalized_volume_squared(&RationalMatrix::identity(2), &b.gram), ratio(3, 4));
}

fn optimize_volume_det(a: &RationalMatrix, g: &RationalMatrix) -> klcone::rational::Rational {
    a.transpose().mul(g).mul(a).determinant()
}

#[test]
fn three_one_samples_stay_within_endpoint_norms() {
    let b = bundle(&[3, 1]);
    let p = feasible_region_probe(&b, 300, 11, 1e-9).unwrap();
    let norm = |m: &DMatrix<f64>| m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let bound = norm(&b.a_kl.to_f64()).max(norm(&b.a_sn.to_f64()));
    assert!(p.max_column_norm <= bound * (1.0 + 1e-6), "{} > {}", p.max_column_norm, bound);
}

#[test]
fn maximization_is_deterministic() {
    let b = bundle(&[3, 2]);
    let opts = MaxOptions { starts: 6, seed: 3, ..MaxOptions::default() };
    let x = maximize_trace(&b, &opts).unwrap().to_json();
    let y = maximize_trace(&b, &opts).unwrap().to_json();
    assert_eq!(x.to_string(), y.to_string());
}
