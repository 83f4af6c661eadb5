use klcone::coxeter::{CoxeterGroup, CoxeterSpec};
use klcone::groupring::*;
use klcone::hecke::KlTable;
use klcone::rational::{rat, Rational};
use num_traits::Zero;

mod common;

use common::{FIG_A, FIG_B};

fn as_ints(b: &GroupRingBasis) -> Vec<Vec<i64>> {
    b.matrix()
        .iter()
        .map(|r| r.iter().map(|c| {
            assert!(c.is_integer());
            c.to_integer().try_into().unwrap()
        }).collect())
        .collect()
}

fn kl(spec: CoxeterSpec) -> (CoxeterGroup, GroupRingBasis) {
    let g = CoxeterGroup::new(spec).unwrap();
    let b = GroupRingBasis::kl_at_one(&g, &KlTable::compute(&g));
    (g, b)
}

#[test]
fn dihedral_element_order() {
    let g = CoxeterGroup::new(CoxeterSpec::Dihedral { m: 6 }).unwrap();
    let names: Vec<String> = g.elements().iter().map(|e| e.to_string()).collect();
    assert_eq!(names, ["e", "s", "t", "st", "ts", "sts", "tst", "stst", "tsts", "ststs", "tstst", "ststst"]);
}

#[test]
fn dihedral_basis_m6_coefficients() {
    let (_, b) = dihedral_min_basis(6, false).unwrap();
    let want: Vec<Vec<i64>> = FIG_A.iter().map(|r| r.to_vec()).collect();
    assert_eq!(as_ints(&b), want);
}

#[test]
fn dihedral_basis_m10_coefficients() {
    let (_, b) = dihedral_min_basis(10, false).unwrap();
    let want: Vec<Vec<i64>> = FIG_B.iter().map(|r| r.to_vec()).collect();
    assert_eq!(as_ints(&b), want);
}

#[test]
fn st_times_stst() {
    let (g, b) = dihedral_min_basis(6, false).unwrap();
    let st = g.from_word(&[0, 1]);
    let stst = g.from_word(&[0, 1, 0, 1]);
    let w0 = g.longest_element();
    let lhs = groupring_multiply(&g, b.column(st), b.column(stst));
    let rhs: Vec<Rational> = b.column(w0).iter().zip(b.column(st)).map(|(x, y)| x + y).collect();
    assert_eq!(lhs, rhs);
}

#[test]
fn dihedral_basis_is_feasible_without_longest_condition() {
    for m in [4, 6, 8, 10] {
        for mirror in [false, true] {
            let (g, b) = dihedral_min_basis(m, mirror).unwrap();
            assert_eq!(b.column(g.generator(0)), generator_plus_one(&g, 0).as_slice());
            assert_eq!(b.column(g.generator(1)), generator_plus_one(&g, 1).as_slice());
            let r = check_feasible_31(&g, &b, false);
            assert!(r.feasible, "m={m} {:?}", r.violation.map(|v| v.describe(&g)));
            let sc = StructureConstants::compute(&g, &b);
            assert!(sc.all_nonnegative() && sc.reproduces(&g, &b));
            let (_, klb) = kl(CoxeterSpec::Dihedral { m });
            assert!(r.objective <= klb.objective(), "m={m}");
        }
    }
}

#[test]
fn mirror_swaps_s_and_t() {
    let (g, b) = dihedral_min_basis(6, false).unwrap();
    let (_, mb) = dihedral_min_basis(6, true).unwrap();
    let swap = |w: usize| {
        let word: Vec<usize> = g.reduced_word(w).iter().map(|s| 1 - s).collect();
        g.from_word(&word)
    };
    for x in 0..g.len() {
        for y in 0..g.len() {
            assert_eq!(mb.coeff(swap(y), swap(x)), b.coeff(y, x));
        }
    }
}

#[test]
fn kl_at_one_examples() {
    let (g, b) = kl(CoxeterSpec::symmetric(3));
    assert_eq!(b.column(g.generator(0)), generator_plus_one(&g, 0).as_slice());
    assert_eq!(b.column(g.longest_element()), sum_of_all(&g).as_slice());
}

#[test]
fn kl_at_one_is_feasible() {
    let mut specs = vec![CoxeterSpec::symmetric(3), CoxeterSpec::symmetric(4)];
    specs.extend((2..=8).map(|m| CoxeterSpec::Dihedral { m }));
    for spec in specs {
        let (g, b) = kl(spec);
        let r = check_feasible_31(&g, &b, true);
        assert!(r.feasible, "{}: {:?}", spec.name(), r.violation.map(|v| v.describe(&g)));
        let sc = StructureConstants::compute(&g, &b);
        assert!(sc.all_nonnegative() && sc.reproduces(&g, &b));
        assert!(sc.map.values().all(|c| c.is_integer()));
    }
}

#[test]
fn type_a_recursion_for_kl() {
    let (g, b) = kl(CoxeterSpec::symmetric(3));
    let r = check_feasible_33(&g, &b);
    assert!(r.feasible, "{:?}", r.violation);
    assert!(r.mu.values().all(|c| *c == rat(1)));
    let (g, b) = kl(CoxeterSpec::symmetric(4));
    let r = check_feasible_33(&g, &b);
    assert!(r.feasible, "{:?}", r.violation);
    // μ̃ matches μ from the KL table
    let table = KlTable::compute(&g);
    for ((y, x), c) in &r.mu {
        assert_eq!(*c, rat(table.mu(*y, *x)));
    }
}

#[test]
fn perturbed_kl_is_infeasible() {
    for spec in [CoxeterSpec::symmetric(3), CoxeterSpec::symmetric(4)] {
        let (g, b) = kl(spec);
        assert!(feasible_perturbations(&g, &b, true).is_empty(), "{}", spec.name());
    }
}

#[test]
fn search_in_s3_returns_kl() {
    let (g, r) = groupring_search(CoxeterSpec::symmetric(3), &SearchOptions::default()).unwrap();
    let table = KlTable::compute(&g);
    let sum: i64 = (0..g.len())
        .flat_map(|x| (0..g.len()).map(move |y| (y, x)))
        .map(|(y, x)| table.h(y, x).eval_at_one())
        .sum();
    assert_eq!(r.objective, rat(sum));
    assert_eq!(sum, 19);
    assert!(!r.differs_from_kl && !r.improves_on_kl && r.local_minimum);
}

#[test]
fn search_without_longest_condition_leaves_kl() {
    let opts = SearchOptions { with_longest: false, ..SearchOptions::default() };
    let (g, r) = groupring_search(CoxeterSpec::Dihedral { m: 4 }, &opts).unwrap();
    assert!(r.differs_from_kl && r.improves_on_kl);
    assert!(check_feasible_31(&g, &r.basis, false).feasible);
    assert!(!check_feasible_31(&g, &r.basis, true).feasible);
}

#[test]
fn empty_budget_returns_seed() {
    let opts = SearchOptions { budget: 0, ..SearchOptions::default() };
    let (_, r) = groupring_search(CoxeterSpec::Dihedral { m: 4 }, &opts).unwrap();
    assert!(!r.differs_from_kl && r.evaluations == 0);
}

#[test]
fn basis_json_round_trip() {
    let (g, b) = dihedral_min_basis(6, false).unwrap();
    let v = b.to_json(&g);
    assert_eq!(v["order"][3], "st");
    assert_eq!(GroupRingBasis::from_json(&g, &v).unwrap(), b);
    let first = &v["columns"]["s"];
    assert_eq!(first[0]["y"], "e");
    assert!(b.coeff(0, 0).is_integer() && !b.coeff(0, 1).is_zero());
}
