use std::collections::{HashMap, HashSet};

use klcone::coxeter::{CoxeterGroup, CoxeterSpec, GroupElement};
use klcone::hecke::{
    cell_matrices_at_one, left_cells, wgraph, wgraph_from_table, Hecke, HeckeElement, KlTable, LaurentPoly,
    WGraph, WGraphMethod,
};
use klcone::rational::rat;
use klcone::tableaux::{partitions, robinson_schensted, standard_tableaux, Partition, StandardTableau};

fn certify(group: &CoxeterGroup) {
    let table = KlTable::compute(group);
    let bar = Hecke::new(group).bar_table();
    for x in 0..group.len() {
        let b = table.kl_basis_element(x);
        assert_eq!(bar.apply(&b), b, "b_{x} not bar invariant in {}", group.spec().name());
        assert_eq!(b.coeff(x), LaurentPoly::one());
        for (y, p) in b.terms() {
            if y != x {
                assert!(p.in_v_zv() && p.has_nonnegative_coeffs(), "h({y},{x}) = {p}");
                assert!(group.bruhat_leq(y, x));
            }
        }
    }
    let w0 = group.longest_element();
    let top = group.length(w0) as i32;
    for y in 0..group.len() {
        assert_eq!(table.h(y, w0), LaurentPoly::monomial(1, top - group.length(y) as i32));
    }
}

#[test]
fn kl_basis_self_certifies_in_type_a() {
    for n in 2..=5 {
        certify(&CoxeterGroup::new(CoxeterSpec::symmetric(n)).unwrap());
    }
}

#[test]
fn kl_basis_self_certifies_in_s6() {
    certify(&CoxeterGroup::new(CoxeterSpec::symmetric(6)).unwrap());
}

#[test]
fn kl_basis_self_certifies_for_dihedral_groups() {
    for m in 2..=12 {
        let g = CoxeterGroup::new(CoxeterSpec::Dihedral { m }).unwrap();
        certify(&g);
        // dihedral KL polynomials are monomials
        let t = KlTable::compute(&g);
        for x in 0..g.len() {
            for y in 0..g.len() {
                if g.bruhat_leq(y, x) {
                    assert_eq!(t.h(y, x), LaurentPoly::monomial(1, (g.length(x) - g.length(y)) as i32));
                }
            }
        }
    }
}

#[test]
fn recursion_agrees_with_hecke_products() {
    // b_s b_x = b_{sx} + Σ_{y<x, sy<y} μ(y,x) b_y whenever sx > x
    let g = CoxeterGroup::new(CoxeterSpec::symmetric(4)).unwrap();
    let t = KlTable::compute(&g);
    let h = Hecke::new(&g);
    for x in 0..g.len() {
        for s in 0..g.rank() {
            if g.is_left_descent(s, x) {
                continue;
            }
            let lhs = h.multiply(&t.kl_basis_element(g.generator(s)), &t.kl_basis_element(x));
            let mut rhs = t.kl_basis_element(g.lmul(s, x));
            for y in 0..x {
                let m = t.mu(y, x);
                if m != 0 && g.is_left_descent(s, y) {
                    rhs = rhs.add(&t.kl_basis_element(y).scale(&LaurentPoly::monomial(m, 0)));
                }
            }
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn multiplication_is_associative_on_samples() {
    let g = CoxeterGroup::new(CoxeterSpec::symmetric(4)).unwrap();
    let h = Hecke::new(&g);
    let p = LaurentPoly::from_terms(&[(1, 2), (-1, -1)]);
    let a = HeckeElement::delta(5).add(&HeckeElement::term(11, p.clone()));
    let b = HeckeElement::delta(17).add(&HeckeElement::term(2, LaurentPoly::monomial(3, 2)));
    let c = HeckeElement::term(20, p);
    assert_eq!(h.multiply(&h.multiply(&a, &b), &c), h.multiply(&a, &h.multiply(&b, &c)));
    assert_eq!(h.multiply(&HeckeElement::delta(0), &a), a);
}

fn q_tableau(g: &CoxeterGroup, x: usize) -> StandardTableau {
    let GroupElement::Perm(p) = g.element(x) else { unreachable!() };
    robinson_schensted(p).1
}

#[test]
fn left_cells_are_q_tableau_classes() {
    for n in 2..=5 {
        let g = CoxeterGroup::new(CoxeterSpec::symmetric(n)).unwrap();
        let cells = left_cells(&g, &KlTable::compute(&g));
        let mut by_q: HashMap<StandardTableau, Vec<usize>> = HashMap::new();
        for x in 0..g.len() {
            by_q.entry(q_tableau(&g, x)).or_default().push(x);
        }
        let mut want: Vec<Vec<usize>> = by_q.into_values().collect();
        want.sort();
        assert_eq!(cells, want, "n = {n}");
    }
}

#[test]
fn three_two_wgraph() {
    let shape = Partition::new(vec![3, 2]).unwrap();
    let g = wgraph(&shape, WGraphMethod::FullKl).unwrap();
    let names: Vec<String> = g.vertices.iter().map(|t| t.to_string()).collect();
    assert_eq!(names, ["135/24", "125/34", "134/25", "124/35", "123/45"]);
    assert_eq!(g.labels, vec![vec![1, 3], vec![2], vec![1, 4], vec![2, 4], vec![3]]);
    let edges: HashSet<(usize, usize)> = g.edges.iter().map(|e| (e.a, e.b)).collect();
    // T24=0, T34=1, T25=2, T35=3, T45=4
    let want: HashSet<(usize, usize)> = [(0, 1), (0, 2), (2, 3), (1, 3), (3, 4), (0, 4)].into_iter().collect();
    assert_eq!(edges, want);
    assert!(g.edges.iter().all(|e| e.mu_ab == 1 && e.mu_ba == 1));
}

#[test]
fn full_and_parabolic_methods_agree() {
    for n in 1..=6 {
        for shape in partitions(n) {
            let a = wgraph(&shape, WGraphMethod::FullKl).unwrap();
            let b = wgraph(&shape, WGraphMethod::Parabolic).unwrap();
            assert_eq!(a, b, "shape {shape}");
        }
    }
}

#[test]
fn wgraph_independent_of_chosen_cell() {
    let g = CoxeterGroup::new(CoxeterSpec::symmetric(5)).unwrap();
    let t = KlTable::compute(&g);
    for shape in partitions(5) {
        let tabs = standard_tableaux(&shape);
        let first = wgraph_from_table(&shape, &g, &t, &tabs[0]).unwrap();
        for q in &tabs[1..] {
            assert_eq!(wgraph_from_table(&shape, &g, &t, q).unwrap(), first);
        }
    }
}

#[test]
fn reflection_representation_is_a_path() {
    for n in 2..=7 {
        let shape = Partition::new(vec![n, 1]).unwrap();
        let g = wgraph(&shape, WGraphMethod::Parabolic).unwrap();
        assert_eq!(g.dim(), n);
        for (k, l) in g.labels.iter().enumerate() {
            assert_eq!(l, &vec![k + 1]);
        }
        let edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(edges, (0..n - 1).map(|k| (k, k + 1)).collect::<Vec<_>>());
    }
}

#[test]
fn cell_matrices_satisfy_idempotent_relation() {
    for n in 1..=6 {
        for shape in partitions(n) {
            let g = wgraph(&shape, WGraphMethod::Parabolic).unwrap();
            let m = cell_matrices_at_one(&g);
            assert_eq!(m.ops.len(), n - 1);
            for op in &m.ops {
                assert!(op.is_nonnegative());
                assert_eq!(op.mul(op), op.scale(&rat(2)), "shape {shape}");
            }
            // braid relations of the underlying s = op − 1
            let id = klcone::rational::RationalMatrix::identity(g.dim());
            let s: Vec<_> = m.ops.iter().map(|o| o.sub(&id)).collect();
            for i in 0..s.len().saturating_sub(1) {
                let l = s[i].mul(&s[i + 1]).mul(&s[i]);
                let r = s[i + 1].mul(&s[i]).mul(&s[i + 1]);
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn large_shape_dimensions() {
    let g = wgraph(&Partition::new(vec![4, 4, 1]).unwrap(), WGraphMethod::Parabolic).unwrap();
    assert_eq!(g.dim(), 84);
    assert!(g.edges.iter().all(|e| e.mu_ab == e.mu_ba));
}

#[test]
fn wgraph_json_round_trips() {
    for parts in [vec![3, 2], vec![5], vec![3, 2, 1], vec![4, 4, 1]] {
        let g = wgraph(&Partition::new(parts).unwrap(), WGraphMethod::Parabolic).unwrap();
        let v = g.to_json();
        let back = WGraph::from_json(&v).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json().to_string(), v.to_string());
    }
    let g = wgraph(&Partition::new(vec![3, 2]).unwrap(), WGraphMethod::Parabolic).unwrap();
    let v = g.to_json();
    assert_eq!(v["vertices"][0]["tableau"], "135/24");
    assert_eq!(v["vertices"][0]["descents"], serde_json::json!([1, 3]));
}
