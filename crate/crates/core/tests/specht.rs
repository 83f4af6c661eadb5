use klcone::rational::{rat, Rational, RationalMatrix};
use klcone::specht::{ldl, PolytabloidBasis, SpechtBundle};
use klcone::tableaux::{partitions, standard_tableaux, Partition};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};

fn shapes_up_to(n: usize) -> Vec<Partition> {
    (1..=n).flat_map(partitions).collect()
}

/// All intertwiners X (A_s X = X K_s) by solving the d² linear system directly.
fn intertwiner_space(ops: &[RationalMatrix], kl_ops: &[RationalMatrix]) -> Vec<RationalMatrix> {
    let d = ops[0].nrows();
    let unknowns = d * d;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (a, k) in ops.iter().zip(kl_ops) {
        for i in 0..d {
            for j in 0..d {
                // (A X)_{ij} − (X K)_{ij}
                let mut row = vec![Rational::zero(); unknowns];
                for m in 0..d {
                    row[m * d + j] += &a[(i, m)];
                    row[i * d + m] -= &k[(m, j)];
                }
                rows.push(row);
            }
        }
    }
    let sys = RationalMatrix::from_fn(rows.len(), unknowns, |i, j| rows[i][j].clone());
    sys.kernel()
        .into_iter()
        .map(|v| RationalMatrix::from_fn(d, d, |i, j| v[i * d + j].clone()))
        .collect()
}

#[test]
fn kl_base_change_matches_direct_solve() {
    for shape in shapes_up_to(5).into_iter().filter(|s| s.n() > 1) {
        let b = SpechtBundle::new(&shape).unwrap();
        let space = intertwiner_space(&b.ops, &b.kl_ops);
        assert_eq!(space.len(), 1, "intertwiner space of {shape} is not a line");
        let x = &space[0];
        let scaled = x.scale(&(Rational::one() / &x[(0, 0)]));
        assert_eq!(scaled, b.a_kl, "shape {shape}");
    }
}

#[test]
fn bundle_invariants() {
    for shape in shapes_up_to(6) {
        let b = SpechtBundle::new(&shape).unwrap();
        let d = b.dim();
        assert!(b.a_sn.is_upper_unitriangular() && b.a_kl.is_upper_unitriangular());
        assert!(b.gram.is_symmetric());
        assert!(ldl(&b.gram).is_some(), "G of {shape} not positive definite");
        let gd = b.a_sn.transpose().mul(&b.gram).mul(&b.a_sn);
        assert!(gd.is_diagonal());
        for k in 0..d {
            assert_eq!(gd[(k, k)], b.sn_norms[k]);
            assert!(b.sn_norms[k] > Rational::zero());
        }
        let kl_inv = b.a_kl.inverse().unwrap();
        let sn_inv = b.a_sn.inverse().unwrap();
        for (s, a) in b.ops.iter().enumerate() {
            assert_eq!(a.mul(a), a.scale(&rat(2)));
            assert_eq!(a.transpose().mul(&b.gram), b.gram.mul(a), "G-self-adjointness");
            assert_eq!(kl_inv.mul(a).mul(&b.a_kl), b.kl_ops[s]);
            let sn = sn_inv.mul(a).mul(&b.a_sn);
            assert!(sn.is_nonnegative(), "seminormal operator of {shape} has a negative entry");
            assert_eq!(sn, b.seminormal[s], "seminormal normalization for {shape}, s_{}", s + 1);
        }
        assert!(kl_inv.is_nonnegative(), "A_kl⁻¹ of {shape}");
    }
}

#[test]
fn seminormal_braid_relations() {
    for shape in shapes_up_to(6) {
        let y = klcone::specht::seminormal_matrices(&shape);
        let id = RationalMatrix::identity(standard_tableaux(&shape).len());
        let s: Vec<_> = y.iter().map(|m| m.sub(&id)).collect();
        for i in 0..s.len() {
            assert_eq!(s[i].mul(&s[i]), id);
            if i + 1 < s.len() {
                assert_eq!(s[i].mul(&s[i + 1]).mul(&s[i]), s[i + 1].mul(&s[i]).mul(&s[i + 1]));
            }
            for j in i + 2..s.len() {
                assert_eq!(s[i].mul(&s[j]), s[j].mul(&s[i]));
            }
        }
    }
}

#[test]
fn traces_agree_across_bases() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for shape in shapes_up_to(6) {
        let b = SpechtBundle::new(&shape).unwrap();
        if b.ops.is_empty() {
            continue;
        }
        let d = b.dim();
        let id = RationalMatrix::identity(d);
        for _ in 0..5 {
            let word: Vec<usize> = (0..rng.gen_range(1..8)).map(|_| rng.gen_range(0..b.ops.len())).collect();
            let run = |mats: &[RationalMatrix]| {
                word.iter().fold(id.clone(), |acc, &s| acc.mul(&mats[s].sub(&id))).trace()
            };
            let t = run(&b.ops);
            assert_eq!(run(&b.seminormal), t);
            assert_eq!(run(&b.kl_ops), t);
        }
    }
}

#[test]
fn polytabloids_span_dimension() {
    for shape in shapes_up_to(7) {
        let basis = PolytabloidBasis::new(&shape);
        assert_eq!(basis.rank_of_spanning_set(), basis.dim());
    }
}

#[test]
fn kl_base_change_entries() {
    // the inverse is the non-negative one; A_kl itself has negative entries
    let b = SpechtBundle::new(&Partition::new(vec![2, 1]).unwrap()).unwrap();
    assert!(!b.a_kl.is_nonnegative());
    assert!(b.a_kl.inverse().unwrap().is_nonnegative());
}

#[test]
fn export_round_trips() {
    for parts in [vec![2, 1], vec![3, 2], vec![2, 2, 1]] {
        let b = SpechtBundle::new(&Partition::new(parts).unwrap()).unwrap();
        let e = b.export();
        let v = e.to_json();
        if e.shape.parts() == [2, 1] {
            assert_eq!(v["G"], serde_json::json!([["2", "1"], ["1", "2"]]));
        }
        let back = klcone::specht::SpechtExport::from_json(&v).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_json().to_string(), v.to_string());
    }
}
