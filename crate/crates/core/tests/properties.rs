use klcone::coxeter::{CoxeterGroup, CoxeterSpec};
use klcone::groupring::groupring_multiply;
use klcone::hecke::{Hecke, HeckeElement, LaurentPoly};
use klcone::optimize::{gradient, objective};
use klcone::rational::{rat, RationalMatrix};
use klcone::specht::SpechtBundle;
use klcone::tableaux::{partitions, robinson_schensted, standard_tableaux};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i32..5, -3i64..4), 0..5).prop_map(|t| LaurentPoly::from_terms(&t))
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<u8>> {
    Just((1..=n as u8).collect::<Vec<u8>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn laurent_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), LaurentPoly::zero());
        prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!(a.mul(&b).eval_at_one(), a.eval_at_one() * b.eval_at_one());
    }

    #[test]
    fn robinson_schensted_shapes_match(p in (1usize..9).prop_flat_map(permutation)) {
        let (ins, rec) = robinson_schensted(&p);
        prop_assert_eq!(ins.shape(), rec.shape());
        prop_assert_eq!(ins.n(), p.len());
        // inverting the permutation swaps P and Q
        let mut inv = vec![0u8; p.len()];
        for (i, &x) in p.iter().enumerate() {
            inv[x as usize - 1] = i as u8 + 1;
        }
        let (ins2, rec2) = robinson_schensted(&inv);
        prop_assert_eq!(ins2, rec);
        prop_assert_eq!(rec2, ins);
    }

    #[test]
    fn tableau_swaps_are_involutions(n in 2usize..8, pick in any::<prop::sample::Index>(), i in 1usize..7) {
        let shapes = partitions(n);
        let shape = pick.get(&shapes);
        for t in standard_tableaux(shape) {
            if i < n {
                if let Some(u) = t.swap(i) {
                    prop_assert_eq!(u.swap(i), Some(t.clone()));
                    prop_assert_eq!(u.axial_distance(i), -t.axial_distance(i));
                }
            }
            prop_assert_eq!(t.transpose().transpose(), t.clone());
        }
    }

    #[test]
    fn hecke_product_is_associative(x in 0usize..24, y in 0usize..24, z in 0usize..24) {
        let g = CoxeterGroup::new(CoxeterSpec::symmetric(4)).unwrap();
        let h = Hecke::new(&g);
        let (a, b, c) = (HeckeElement::delta(x), HeckeElement::delta(y), HeckeElement::delta(z));
        prop_assert_eq!(h.multiply(&h.multiply(&a, &b), &c), h.multiply(&a, &h.multiply(&b, &c)));
        // the bar involution is a ring map
        prop_assert_eq!(h.bar(&h.multiply(&a, &b)), h.multiply(&h.bar(&a), &h.bar(&b)));
    }

    #[test]
    fn group_ring_product_is_associative(
        m in 2usize..7,
        a in prop::collection::vec(-2i64..3, 12),
        b in prop::collection::vec(-2i64..3, 12),
        c in prop::collection::vec(-2i64..3, 12),
    ) {
        let g = CoxeterGroup::new(CoxeterSpec::Dihedral { m }).unwrap();
        let v = |xs: &[i64]| xs[..g.len()].iter().map(|&x| rat(x)).collect::<Vec<_>>();
        let (a, b, c) = (v(&a), v(&b), v(&c));
        let left = groupring_multiply(&g, &groupring_multiply(&g, &a, &b), &c);
        let right = groupring_multiply(&g, &a, &groupring_multiply(&g, &b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn gradient_matches_finite_differences(
        pick in 0usize..7,
        entries in prop::collection::vec(-3.0f64..3.0, 36),
    ) {
        let shapes = partitions(5);
        let b = SpechtBundle::new(&shapes[pick]).unwrap();
        let d = b.dim();
        let g = b.gram.to_f64();
        let a = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else if i < j { entries[i * 6 + j] } else { 0.0 });
        let grad = gradient(&a, &g);
        let h = 1e-5;
        for u in 0..d {
            for w in u + 1..d {
                let mut plus = a.clone();
                plus[(u, w)] += h;
                let mut minus = a.clone();
                minus[(u, w)] -= h;
                let fd = (objective(&plus, &g) - objective(&minus, &g)) / (2.0 * h);
                prop_assert!((fd - grad[(u, w)]).abs() <= 1e-5 * grad[(u, w)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn unitriangular_inverse(entries in prop::collection::vec(-5i64..6, 25)) {
        let m = RationalMatrix::from_fn(5, 5, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => rat(entries[i * 5 + j]),
            std::cmp::Ordering::Equal => rat(1),
            std::cmp::Ordering::Greater => rat(0),
        });
        let inv = m.inverse().unwrap();
        prop_assert!(inv.is_upper_unitriangular());
        prop_assert_eq!(m.mul(&inv), RationalMatrix::identity(5));
    }
}
