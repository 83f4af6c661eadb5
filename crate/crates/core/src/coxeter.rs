//! Finite Coxeter groups of type A (symmetric groups) and dihedral type I_2(m).
//!
//! A [`CoxeterGroup`] enumerates its elements once, ordered by length and then
//! by normal form, and keeps left/right multiplication tables by the simple
//! reflections. Everything downstream works with element indices into that
//! list; [`GroupElement`] is the canonical value form used at the edges.

use std::collections::HashMap;
use std::fmt;

/// Default cap on |W|: 10!.
pub const DEFAULT_ELEMENT_CAP: usize = 3_628_800;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("group has {size} elements, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("invalid Coxeter spec: {0}")]
    InvalidSpec(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoxeterSpec {
    /// Symmetric group S_{rank+1}.
    TypeA { rank: usize },
    /// Dihedral group of order 2m.
    Dihedral { m: usize },
}

impl CoxeterSpec {
    pub fn symmetric(n: usize) -> Self {
        CoxeterSpec::TypeA { rank: n.saturating_sub(1) }
    }

    pub fn rank(&self) -> usize {
        match *self {
            CoxeterSpec::TypeA { rank } => rank,
            CoxeterSpec::Dihedral { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<(), CoxeterError> {
        match *self {
            CoxeterSpec::TypeA { rank } if rank < 1 => {
                Err(CoxeterError::InvalidSpec("type A needs rank >= 1".into()))
            }
            CoxeterSpec::Dihedral { m } if m < 2 => {
                Err(CoxeterError::InvalidSpec("dihedral type needs m >= 2".into()))
            }
            _ => Ok(()),
        }
    }

    /// |W|, saturating on overflow.
    pub fn order(&self) -> usize {
        match *self {
            CoxeterSpec::TypeA { rank } => {
                (1..=rank + 1).try_fold(1usize, |acc, k| acc.checked_mul(k)).unwrap_or(usize::MAX)
            }
            CoxeterSpec::Dihedral { m } => 2 * m,
        }
    }

    /// Human-readable name, e.g. `A3` or `I2(6)`.
    pub fn name(&self) -> String {
        match *self {
            CoxeterSpec::TypeA { rank } => format!("A{rank}"),
            CoxeterSpec::Dihedral { m } => format!("I2({m})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Canonical form of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    /// One-line notation `w(1) … w(n)`, values 1-based.
    Perm(Vec<u8>),
    /// Alternating word of the given length starting with `first` (0 = s, 1 = t).
    /// The identity is `(0, 0)`; the longest element uses `first = 0`.
    Dihedral { length: usize, first: u8 },
}

impl GroupElement {
    /// Normal-form comparison key after length.
    fn lex_key(&self) -> Vec<u8> {
        match self {
            GroupElement::Perm(p) => p.clone(),
            GroupElement::Dihedral { first, .. } => vec![*first],
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Perm(p) => {
                let sep = if p.len() > 9 { "." } else { "" };
                let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", parts.join(sep))
            }
            GroupElement::Dihedral { length, first } => {
                if *length == 0 {
                    return write!(f, "e");
                }
                let word: String = (0..*length)
                    .map(|k| if (usize::from(*first) + k) % 2 == 0 { 's' } else { 't' })
                    .collect();
                write!(f, "{word}")
            }
        }
    }
}

/// A sequence of simple-reflection indices (0-based).
pub type ReducedWord = Vec<usize>;

/// Fully enumerated finite Coxeter group.
#[derive(Clone, Debug)]
pub struct CoxeterGroup {
    spec: CoxeterSpec,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    lengths: Vec<usize>,
    /// `left[s][w]` is the index of `s·w`.
    left: Vec<Vec<usize>>,
    /// `right[s][w]` is the index of `w·s`.
    right: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl CoxeterGroup {
    pub fn new(spec: CoxeterSpec) -> Result<Self, CoxeterError> {
        Self::with_cap(spec, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(spec: CoxeterSpec, cap: usize) -> Result<Self, CoxeterError> {
        spec.validate()?;
        let size = spec.order();
        if size > cap {
            return Err(CoxeterError::CapExceeded { size, cap });
        }
        let mut elements = match spec {
            CoxeterSpec::TypeA { rank } => all_permutations(rank + 1),
            CoxeterSpec::Dihedral { m } => dihedral_elements(m),
        };
        let lengths_of = |e: &GroupElement| match e {
            GroupElement::Perm(p) => inversions(p),
            GroupElement::Dihedral { length, .. } => *length,
        };
        elements.sort_by_cached_key(|e| (lengths_of(e), e.lex_key()));
        let index: HashMap<GroupElement, usize> =
            elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let lengths: Vec<usize> = elements.iter().map(lengths_of).collect();
        let rank = spec.rank();
        let mut left = vec![vec![0; elements.len()]; rank];
        let mut right = vec![vec![0; elements.len()]; rank];
        for (w, e) in elements.iter().enumerate() {
            for s in 0..rank {
                left[s][w] = index[&mul_generator(spec, e, s, Side::Left)];
                right[s][w] = index[&mul_generator(spec, e, s, Side::Right)];
            }
        }
        let mut group = CoxeterGroup {
            spec,
            elements,
            index,
            lengths,
            left,
            right,
            inverse: Vec::new(),
        };
        group.inverse = (0..group.len())
            .map(|w| {
                let mut word = group.reduced_word(w);
                word.reverse();
                group.from_word(&word)
            })
            .collect();
        Ok(group)
    }

    pub fn spec(&self) -> CoxeterSpec {
        self.spec
    }

    /// Number of simple reflections.
    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements ordered by (length, normal form); identity first.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, w: usize) -> &GroupElement {
        &self.elements[w]
    }

    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn length(&self, w: usize) -> usize {
        self.lengths[w]
    }

    pub fn lmul(&self, s: usize, w: usize) -> usize {
        self.left[s][w]
    }

    pub fn rmul(&self, w: usize, s: usize) -> usize {
        self.right[s][w]
    }

    pub fn inverse(&self, w: usize) -> usize {
        self.inverse[w]
    }

    /// Index of the simple reflection `s`.
    pub fn generator(&self, s: usize) -> usize {
        self.left[s][0]
    }

    pub fn is_left_descent(&self, s: usize, w: usize) -> bool {
        self.lengths[self.left[s][w]] < self.lengths[w]
    }

    pub fn is_right_descent(&self, w: usize, s: usize) -> bool {
        self.lengths[self.right[s][w]] < self.lengths[w]
    }

    pub fn descents(&self, w: usize, side: Side) -> Vec<usize> {
        (0..self.rank())
            .filter(|&s| match side {
                Side::Left => self.is_left_descent(s, w),
                Side::Right => self.is_right_descent(w, s),
            })
            .collect()
    }

    /// The lexicographically first reduced word, read left to right.
    pub fn reduced_word(&self, w: usize) -> ReducedWord {
        let mut word = Vec::with_capacity(self.lengths[w]);
        let mut cur = w;
        while cur != 0 {
            let s = (0..self.rank()).find(|&s| self.is_left_descent(s, cur)).expect("non-identity has a descent");
            word.push(s);
            cur = self.left[s][cur];
        }
        word
    }

    /// Evaluate a word (not necessarily reduced).
    pub fn from_word(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |w, &s| self.right[s][w])
    }

    /// Product `x·y`.
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.reduced_word(y).iter().fold(x, |w, &s| self.right[s][w])
    }

    /// Bruhat order via the subword property on the fixed reduced word of `y`:
    /// scanning that word from the right, drop each letter that shortens `x`.
    pub fn bruhat_leq(&self, x: usize, y: usize) -> bool {
        if self.lengths[x] > self.lengths[y] {
            return false;
        }
        let mut cur = x;
        for &s in self.reduced_word(y).iter().rev() {
            if self.is_right_descent(cur, s) {
                cur = self.right[s][cur];
            }
        }
        cur == 0
    }

    pub fn longest_element(&self) -> usize {
        self.len() - 1
    }
}

fn inversions(p: &[u8]) -> usize {
    let mut count = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                count += 1;
            }
        }
    }
    count
}

fn all_permutations(n: usize) -> Vec<GroupElement> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (1..=n as u8).collect();
    loop {
        out.push(GroupElement::Perm(cur.clone()));
        if !next_permutation(&mut cur) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn dihedral_elements(m: usize) -> Vec<GroupElement> {
    let mut out = vec![GroupElement::Dihedral { length: 0, first: 0 }];
    for length in 1..m {
        for first in 0..2 {
            out.push(GroupElement::Dihedral { length, first });
        }
    }
    out.push(GroupElement::Dihedral { length: m, first: 0 });
    out
}

fn dihedral_canon(m: usize, length: usize, first: u8) -> GroupElement {
    if length == 0 || length == m {
        GroupElement::Dihedral { length, first: 0 }
    } else {
        GroupElement::Dihedral { length, first }
    }
}

fn mul_generator(spec: CoxeterSpec, e: &GroupElement, s: usize, side: Side) -> GroupElement {
    match (spec, e) {
        (CoxeterSpec::TypeA { .. }, GroupElement::Perm(p)) => {
            let mut q = p.clone();
            match side {
                // s_i·w swaps the values i and i+1.
                Side::Left => {
                    let (a, b) = (s as u8 + 1, s as u8 + 2);
                    for v in q.iter_mut() {
                        if *v == a {
                            *v = b;
                        } else if *v == b {
                            *v = a;
                        }
                    }
                }
                // w·s_i swaps the positions i and i+1.
                Side::Right => q.swap(s, s + 1),
            }
            GroupElement::Perm(q)
        }
        (CoxeterSpec::Dihedral { m }, GroupElement::Dihedral { length, first }) => {
            let (length, first, s) = (*length, *first, s as u8);
            if length == 0 {
                return dihedral_canon(m, 1, s);
            }
            if length == m {
                // Both letters are descents of w_0.
                let other = 1 - s;
                let first = match side {
                    Side::Left => other,
                    Side::Right if m % 2 == 0 => other,
                    Side::Right => s,
                };
                return dihedral_canon(m, m - 1, first);
            }
            match side {
                Side::Left => {
                    if first == s {
                        dihedral_canon(m, length - 1, 1 - first)
                    } else {
                        dihedral_canon(m, length + 1, s)
                    }
                }
                Side::Right => {
                    let last = if length % 2 == 1 { first } else { 1 - first };
                    if last == s {
                        dihedral_canon(m, length - 1, first)
                    } else {
                        dihedral_canon(m, length + 1, first)
                    }
                }
            }
        }
        _ => unreachable!("element does not belong to this group family"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> CoxeterGroup {
        CoxeterGroup::new(CoxeterSpec::TypeA { rank: 2 }).unwrap()
    }

    #[test]
    fn small_groups_have_expected_order() {
        assert_eq!(CoxeterGroup::new(CoxeterSpec::TypeA { rank: 1 }).unwrap().len(), 2);
        assert_eq!(s3().len(), 6);
        assert_eq!(CoxeterGroup::new(CoxeterSpec::Dihedral { m: 6 }).unwrap().len(), 12);
    }

    #[test]
    fn identity_first_and_longest_last() {
        let g = s3();
        assert_eq!(g.length(0), 0);
        assert_eq!(g.length(g.longest_element()), 3);
        let sts = g.from_word(&[0, 1, 0]);
        let tst = g.from_word(&[1, 0, 1]);
        assert_eq!(sts, tst);
        assert_eq!(sts, g.longest_element());
        assert_eq!(g.descents(sts, Side::Left), vec![0, 1]);
    }

    #[test]
    fn left_descent_of_st() {
        let g = s3();
        let st = g.from_word(&[0, 1]);
        assert_eq!(g.descents(st, Side::Left), vec![0]);
        assert_eq!(g.descents(st, Side::Right), vec![1]);
    }

    #[test]
    fn bruhat_examples() {
        let g = s3();
        let s = g.from_word(&[0]);
        let st = g.from_word(&[0, 1]);
        let ts = g.from_word(&[1, 0]);
        assert!(g.bruhat_leq(s, st));
        assert!(!g.bruhat_leq(st, ts));
        assert!(!g.bruhat_leq(ts, st));
        for w in 0..g.len() {
            assert!(g.bruhat_leq(0, w));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = CoxeterGroup::with_cap(CoxeterSpec::TypeA { rank: 4 }, 100).unwrap_err();
        assert_eq!(err, CoxeterError::CapExceeded { size: 120, cap: 100 });
    }

    #[test]
    fn dihedral_order_matches_word_listing() {
        let g = CoxeterGroup::new(CoxeterSpec::Dihedral { m: 6 }).unwrap();
        let names: Vec<String> = g.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(&names[..7], &["e", "s", "t", "st", "ts", "sts", "tst"]);
        assert_eq!(names[11], "ststst");
        // sts...(m letters) = tst...(m letters)
        assert_eq!(g.from_word(&[0, 1, 0, 1, 0, 1]), g.from_word(&[1, 0, 1, 0, 1, 0]));
    }

    #[test]
    fn inverse_and_product_agree() {
        for spec in [CoxeterSpec::TypeA { rank: 3 }, CoxeterSpec::Dihedral { m: 5 }] {
            let g = CoxeterGroup::new(spec).unwrap();
            for w in 0..g.len() {
                assert_eq!(g.mul(w, g.inverse(w)), 0);
                assert_eq!(g.length(g.inverse(w)), g.length(w));
            }
        }
    }
}
