//! Hecke algebra arithmetic, Kazhdan–Lusztig bases, left cells and W-graphs.
//!
//! Conventions: δ_s² = (v⁻¹ − v)δ_s + 1, b_s = δ_s + v, and
//! b_x = δ_x + Σ_{y<x} h_{y,x} δ_y with h_{y,x} ∈ vZ[v].
//!
//! The KL recursion runs on a [`KlModule`]: a left H-module with a standard
//! basis m_x on which δ_s acts by one of three rules. The regular module
//! (m_x = δ_x) gives the ordinary KL basis; the type-A module
//! H·b_{w_J} (m_x = δ_x b_{w_J}, x minimal in xW_J) gives the parabolic
//! canonical basis b_{x w_J}, whose coefficients are the ordinary
//! h_{y w_J, x w_J}. The latter is what makes W-graphs of large shapes cheap.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use petgraph::graph::DiGraph;
use serde_json::{json, Value};

use crate::coxeter::{CoxeterError, CoxeterGroup, CoxeterSpec, GroupElement, Side};
use crate::rational::{rat, RationalMatrix};
use crate::tableaux::{robinson_schensted, standard_tableaux, Partition, StandardTableau};

#[derive(thiserror::Error, Debug)]
pub enum HeckeError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("full KL computation for n = {n} exceeds the cap n <= {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("W-graph labels disagree with tableau descents at vertex {0}")]
    LabelMismatch(String),
    #[error("malformed W-graph JSON: {0}")]
    Json(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Integer Laurent polynomial in `v`, stored densely from the lowest exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    lo: i32,
    coeffs: Vec<i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: i64, e: i32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            LaurentPoly { lo: e, coeffs: vec![c] }
        }
    }

    /// Build from `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: &[(i32, i64)]) -> Self {
        let mut p = Self::zero();
        for &(e, c) in terms {
            p.add_scaled(&Self::monomial(c, e), 1, 0);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i32) -> i64 {
        let k = e - self.lo;
        if k < 0 {
            0
        } else {
            self.coeffs.get(k as usize).copied().unwrap_or(0)
        }
    }

    pub fn min_exponent(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn max_exponent(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.lo + self.coeffs.len() as i32 - 1)
    }

    /// Non-zero terms `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(k, &c)| (self.lo + k as i32, c))
    }

    /// `self += c · v^shift · other`.
    pub fn add_scaled(&mut self, other: &LaurentPoly, c: i64, shift: i32) {
        if other.is_zero() || c == 0 {
            return;
        }
        let olo = other.lo + shift;
        let ohi = olo + other.coeffs.len() as i32 - 1;
        if self.is_zero() {
            self.lo = olo;
            self.coeffs = other.coeffs.iter().map(|&a| a * c).collect();
            return;
        }
        let hi = self.lo + self.coeffs.len() as i32 - 1;
        if olo < self.lo {
            let pad = (self.lo - olo) as usize;
            let mut v = vec![0; pad];
            v.extend_from_slice(&self.coeffs);
            self.coeffs = v;
            self.lo = olo;
        }
        if ohi > hi {
            self.coeffs.resize(self.coeffs.len() + (ohi - hi) as usize, 0);
        }
        let off = (olo - self.lo) as usize;
        for (k, &a) in other.coeffs.iter().enumerate() {
            self.coeffs[off + k] += a * c;
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out.add_scaled(other, 1, 0);
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out.add_scaled(other, -1, 0);
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let mut out = LaurentPoly { lo: self.lo + other.lo, coeffs };
        out.normalize();
        out
    }

    pub fn scale(&self, c: i64) -> LaurentPoly {
        let mut out = Self::zero();
        out.add_scaled(self, c, 0);
        out
    }

    pub fn shift(&self, e: i32) -> LaurentPoly {
        let mut out = Self::zero();
        out.add_scaled(self, 1, e);
        out
    }

    /// v ↦ v⁻¹.
    pub fn bar(&self) -> LaurentPoly {
        match self.max_exponent() {
            None => Self::zero(),
            Some(hi) => {
                let mut coeffs = self.coeffs.clone();
                coeffs.reverse();
                LaurentPoly { lo: -hi, coeffs }
            }
        }
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// Membership in vZ[v].
    pub fn in_v_zv(&self) -> bool {
        self.is_zero() || self.lo >= 1
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let mono = match e {
                0 => String::new(),
                1 => "v".to_string(),
                _ => format!("v^{e}"),
            };
            let coef = if a == 1 && e != 0 { String::new() } else { a.to_string() };
            write!(f, "{sign}{coef}{mono}")?;
            first = false;
        }
        Ok(())
    }
}

/// Element of the Hecke algebra in the standard basis, keyed by group index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElement {
    terms: BTreeMap<usize, LaurentPoly>,
}

impl HeckeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn delta(x: usize) -> Self {
        Self::term(x, LaurentPoly::one())
    }

    pub fn term(x: usize, p: LaurentPoly) -> Self {
        let mut h = Self::zero();
        h.add_term(x, &p, 1, 0);
        h
    }

    pub fn coeff(&self, x: usize) -> LaurentPoly {
        self.terms.get(&x).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &LaurentPoly)> {
        self.terms.iter().map(|(&x, p)| (x, p))
    }

    pub fn support(&self) -> Vec<usize> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += c · v^shift · p · δ_x`.
    pub fn add_term(&mut self, x: usize, p: &LaurentPoly, c: i64, shift: i32) {
        let entry = self.terms.entry(x).or_default();
        entry.add_scaled(p, c, shift);
        if entry.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn add(&self, other: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (x, p) in other.terms() {
            out.add_term(x, p, 1, 0);
        }
        out
    }

    pub fn sub(&self, other: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (x, p) in other.terms() {
            out.add_term(x, p, -1, 0);
        }
        out
    }

    pub fn scale(&self, q: &LaurentPoly) -> HeckeElement {
        let mut out = Self::zero();
        for (x, p) in self.terms() {
            out.add_term(x, &p.mul(q), 1, 0);
        }
        out
    }
}

/// Hecke algebra of a fully enumerated Coxeter group.
pub struct Hecke<'g> {
    group: &'g CoxeterGroup,
}

impl<'g> Hecke<'g> {
    pub fn new(group: &'g CoxeterGroup) -> Self {
        Hecke { group }
    }

    pub fn group(&self) -> &CoxeterGroup {
        self.group
    }

    /// `h · δ_s`.
    pub fn mul_generator_right(&self, h: &HeckeElement, s: usize) -> HeckeElement {
        let g = self.group;
        let mut out = HeckeElement::zero();
        for (y, p) in h.terms() {
            let ys = g.rmul(y, s);
            out.add_term(ys, p, 1, 0);
            if g.length(ys) < g.length(y) {
                out.add_term(y, p, 1, -1);
                out.add_term(y, p, -1, 1);
            }
        }
        out
    }

    /// `δ_s · h`.
    pub fn mul_generator_left(&self, s: usize, h: &HeckeElement) -> HeckeElement {
        let g = self.group;
        let mut out = HeckeElement::zero();
        for (y, p) in h.terms() {
            let sy = g.lmul(s, y);
            out.add_term(sy, p, 1, 0);
            if g.length(sy) < g.length(y) {
                out.add_term(y, p, 1, -1);
                out.add_term(y, p, -1, 1);
            }
        }
        out
    }

    pub fn multiply(&self, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (y, q) in b.terms() {
            let mut part = a.clone();
            for s in self.group.reduced_word(y) {
                part = self.mul_generator_right(&part, s);
            }
            out = out.add(&part.scale(q));
        }
        out
    }

    /// Images of all δ_x under the bar involution.
    pub fn bar_table(&self) -> BarTable {
        let g = self.group;
        let mut deltas: Vec<HeckeElement> = Vec::with_capacity(g.len());
        deltas.push(HeckeElement::delta(0));
        for x in 1..g.len() {
            let s = g.descents(x, Side::Right)[0];
            let prev = &deltas[g.rmul(x, s)];
            // bar(δ_s) = δ_s + (v − v⁻¹)
            let mut next = self.mul_generator_right(prev, s);
            for (y, p) in prev.terms() {
                next.add_term(y, p, 1, 1);
                next.add_term(y, p, -1, -1);
            }
            deltas.push(next);
        }
        BarTable { deltas }
    }

    pub fn bar(&self, h: &HeckeElement) -> HeckeElement {
        self.bar_table().apply(h)
    }
}

/// Precomputed bar(δ_x) for every x.
pub struct BarTable {
    deltas: Vec<HeckeElement>,
}

impl BarTable {
    pub fn apply(&self, h: &HeckeElement) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (x, p) in h.terms() {
            let pb = p.bar();
            for (y, q) in self.deltas[x].terms() {
                out.add_term(y, &pb.mul(q), 1, 0);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    /// s·x < x.
    Down(u32),
    /// s·x > x inside the module basis.
    Up(u32),
    /// s·x = x·t with t ∈ J; δ_s acts by v⁻¹.
    Fixed,
}

/// A left H-module with standard basis indexed `0..len`, sorted by length.
#[derive(Clone, Debug)]
pub struct KlModule {
    lengths: Vec<usize>,
    /// `act[s][x]`.
    act: Vec<Vec<Action>>,
}

impl KlModule {
    /// The regular module H itself.
    pub fn regular(group: &CoxeterGroup) -> Self {
        let act = (0..group.rank())
            .map(|s| {
                (0..group.len())
                    .map(|x| {
                        let sx = group.lmul(s, x);
                        if group.length(sx) < group.length(x) {
                            Action::Down(sx as u32)
                        } else {
                            Action::Up(sx as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        KlModule { lengths: (0..group.len()).map(|x| group.length(x)).collect(), act }
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.act.len()
    }

    pub fn length(&self, x: usize) -> usize {
        self.lengths[x]
    }

    pub fn action(&self, s: usize, x: usize) -> Action {
        self.act[s][x]
    }

    /// s is a left descent of the module element (of x·w_J in the parabolic case).
    pub fn is_descent(&self, s: usize, x: usize) -> bool {
        !matches!(self.act[s][x], Action::Up(_))
    }
}

/// The type-A module H·b_{w_J} for a Young subgroup with the given block sizes.
#[derive(Clone, Debug)]
pub struct ParabolicModule {
    pub blocks: Vec<usize>,
    /// Minimal coset representatives in one-line notation, sorted by length.
    pub reps: Vec<Vec<u8>>,
    pub module: KlModule,
}

impl ParabolicModule {
    pub fn type_a(blocks: &[usize]) -> Self {
        let n: usize = blocks.iter().sum();
        let mut block_of_pos = Vec::with_capacity(n);
        let mut starts = Vec::with_capacity(blocks.len());
        for (b, &size) in blocks.iter().enumerate() {
            starts.push(block_of_pos.len());
            block_of_pos.extend(std::iter::repeat(b).take(size));
        }
        // A representative is determined by which block each value lands in.
        let mut labels = block_of_pos.clone();
        let mut reps = Vec::new();
        loop {
            let mut next = starts.clone();
            let mut x = vec![0u8; n];
            for (v, &b) in labels.iter().enumerate() {
                x[next[b]] = (v + 1) as u8;
                next[b] += 1;
            }
            reps.push(x);
            if !next_multiset_permutation(&mut labels) {
                break;
            }
        }
        let inv = |p: &[u8]| {
            let mut c = 0;
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    c += usize::from(p[i] > p[j]);
                }
            }
            c
        };
        reps.sort_by_cached_key(|p| (inv(p), p.clone()));
        let index: HashMap<Vec<u8>, usize> = reps.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let act = (0..n.saturating_sub(1))
            .map(|s| {
                let (a, b) = (s as u8 + 1, s as u8 + 2);
                reps.iter()
                    .map(|x| {
                        let pa = x.iter().position(|&v| v == a).unwrap();
                        let pb = x.iter().position(|&v| v == b).unwrap();
                        let mut sx = x.clone();
                        sx.swap(pa, pb);
                        if pb < pa {
                            Action::Down(index[&sx] as u32)
                        } else if block_of_pos[pa] == block_of_pos[pb] {
                            Action::Fixed
                        } else {
                            Action::Up(index[&sx] as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        let lengths = reps.iter().map(|p| inv(p)).collect();
        ParabolicModule { blocks: blocks.to_vec(), reps, module: KlModule { lengths, act } }
    }

    /// One-line notation of x·w_J: each block of x reversed.
    pub fn longest_in_coset(&self, x: usize) -> Vec<u8> {
        let mut out = self.reps[x].clone();
        let mut start = 0;
        for &size in &self.blocks {
            out[start..start + size].reverse();
            start += size;
        }
        out
    }
}

fn next_multiset_permutation(p: &mut [usize]) -> bool {
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

/// Canonical basis of a [`KlModule`]: `columns[x]` lists `(y, h_{y,x})`
/// in increasing `y`, including `(x, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlBasis {
    columns: Vec<Vec<(u32, LaurentPoly)>>,
}

impl KlBasis {
    /// b_x from b_s·b_{sx}, removing constant terms top-down.
    pub fn compute(module: &KlModule) -> Self {
        let d = module.len();
        let mut columns: Vec<Vec<(u32, LaurentPoly)>> = Vec::with_capacity(d);
        let mut acc: Vec<LaurentPoly> = vec![LaurentPoly::zero(); d];
        for x in 0..d {
            let down = (0..module.rank()).find_map(|s| match module.act[s][x] {
                Action::Down(w) => Some((s, w as usize)),
                _ => None,
            });
            let Some((s, w)) = down else {
                columns.push(vec![(x as u32, LaurentPoly::one())]);
                continue;
            };
            let mut touched = BTreeSet::new();
            for (y, p) in &columns[w] {
                let y = *y as usize;
                match module.act[s][y] {
                    Action::Down(sy) => {
                        acc[y].add_scaled(p, 1, -1);
                        acc[sy as usize].add_scaled(p, 1, 0);
                        touched.insert(sy as usize);
                    }
                    Action::Up(sy) => {
                        acc[sy as usize].add_scaled(p, 1, 0);
                        acc[y].add_scaled(p, 1, 1);
                        touched.insert(sy as usize);
                    }
                    Action::Fixed => {
                        acc[y].add_scaled(p, 1, 1);
                        acc[y].add_scaled(p, 1, -1);
                    }
                }
                touched.insert(y);
            }
            let mut col = Vec::new();
            while let Some(y) = touched.pop_last() {
                let mut p = std::mem::take(&mut acc[y]);
                if p.is_zero() {
                    continue;
                }
                if y != x {
                    let c = p.coeff(0);
                    if c != 0 {
                        for (z, q) in &columns[y] {
                            let z = *z as usize;
                            if z == y {
                                p.add_scaled(q, -c, 0);
                            } else {
                                acc[z].add_scaled(q, -c, 0);
                                touched.insert(z);
                            }
                        }
                    }
                    assert!(p.in_v_zv(), "KL coefficient outside vZ[v] at ({y},{x}): {p}");
                    if p.is_zero() {
                        continue;
                    }
                } else {
                    assert_eq!(p, LaurentPoly::one(), "leading coefficient of b_{x} is not 1");
                }
                col.push((y as u32, p));
            }
            col.reverse();
            columns.push(col);
        }
        KlBasis { columns }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, x: usize) -> &[(u32, LaurentPoly)] {
        &self.columns[x]
    }

    pub fn h(&self, y: usize, x: usize) -> Option<&LaurentPoly> {
        let col = &self.columns[x];
        col.binary_search_by_key(&(y as u32), |(z, _)| *z).ok().map(|k| &col[k].1)
    }

    /// Coefficient of v in h_{y,x}; zero on the diagonal.
    pub fn mu(&self, y: usize, x: usize) -> i64 {
        if y == x {
            return 0;
        }
        self.h(y, x).map_or(0, |p| p.coeff(1))
    }

    /// μ̃(x,y) = μ of the ordered pair, whichever way it is comparable.
    pub fn mu_sym(&self, x: usize, y: usize) -> i64 {
        if x < y {
            self.mu(x, y)
        } else {
            self.mu(y, x)
        }
    }
}

/// KL polynomials of a whole Coxeter group.
#[derive(Clone, Debug)]
pub struct KlTable {
    spec: CoxeterSpec,
    basis: KlBasis,
}

const CACHE_MAGIC: &[u8; 4] = b"KLC1";

impl KlTable {
    pub fn compute(group: &CoxeterGroup) -> Self {
        KlTable { spec: group.spec(), basis: KlBasis::compute(&KlModule::regular(group)) }
    }

    /// Load from `dir` if a matching cache file exists, otherwise compute and
    /// store it there.
    pub fn compute_cached(group: &CoxeterGroup, dir: Option<&Path>) -> Result<Self, HeckeError> {
        let Some(dir) = dir else {
            return Ok(Self::compute(group));
        };
        let path = dir.join(format!("kl-{}.klc", group.spec().name()));
        if path.exists() {
            if let Ok(table) = Self::load(&path) {
                if table.spec == group.spec() && table.basis.len() == group.len() {
                    return Ok(table);
                }
            }
        }
        let table = Self::compute(group);
        std::fs::create_dir_all(dir)?;
        table.save(&path)?;
        Ok(table)
    }

    pub fn spec(&self) -> CoxeterSpec {
        self.spec
    }

    pub fn basis(&self) -> &KlBasis {
        &self.basis
    }

    /// h_{y,x}, zero when y ≰ x.
    pub fn h(&self, y: usize, x: usize) -> LaurentPoly {
        self.basis.h(y, x).cloned().unwrap_or_default()
    }

    pub fn mu(&self, y: usize, x: usize) -> i64 {
        self.basis.mu(y, x)
    }

    pub fn kl_basis_element(&self, x: usize) -> HeckeElement {
        let mut h = HeckeElement::zero();
        for (y, p) in self.basis.column(x) {
            h.add_term(*y as usize, p, 1, 0);
        }
        h
    }

    /// Binary cache: magic, family tag, parameter, then each column as
    /// `(count, [(y, lo, len, coeffs…)])`, all little-endian.
    pub fn save(&self, path: &Path) -> Result<(), HeckeError> {
        let mut buf = Vec::new();
        buf.extend_from_slice(CACHE_MAGIC);
        let (tag, param) = match self.spec {
            CoxeterSpec::TypeA { rank } => (0u8, rank as u32),
            CoxeterSpec::Dihedral { m } => (1u8, m as u32),
        };
        buf.push(tag);
        buf.extend_from_slice(&param.to_le_bytes());
        buf.extend_from_slice(&(self.basis.columns.len() as u32).to_le_bytes());
        for col in &self.basis.columns {
            buf.extend_from_slice(&(col.len() as u32).to_le_bytes());
            for (y, p) in col {
                buf.extend_from_slice(&y.to_le_bytes());
                buf.extend_from_slice(&p.lo.to_le_bytes());
                buf.extend_from_slice(&(p.coeffs.len() as u32).to_le_bytes());
                for c in &p.coeffs {
                    buf.extend_from_slice(&c.to_le_bytes());
                }
            }
        }
        std::fs::File::create(path)?.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HeckeError> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let mut r = ByteReader { buf: &buf, pos: 0 };
        if r.take(4)? != CACHE_MAGIC {
            return Err(HeckeError::Cache("bad header".into()));
        }
        let tag = r.take(1)?[0];
        let param = r.u32()? as usize;
        let spec = match tag {
            0 => CoxeterSpec::TypeA { rank: param },
            1 => CoxeterSpec::Dihedral { m: param },
            _ => return Err(HeckeError::Cache("unknown family".into())),
        };
        let ncols = r.u32()? as usize;
        let mut columns = Vec::with_capacity(ncols);
        for _ in 0..ncols {
            let len = r.u32()? as usize;
            let mut col = Vec::with_capacity(len);
            for _ in 0..len {
                let y = r.u32()?;
                let lo = r.u32()? as i32;
                let k = r.u32()? as usize;
                let mut coeffs = Vec::with_capacity(k);
                for _ in 0..k {
                    coeffs.push(i64::from_le_bytes(r.take(8)?.try_into().unwrap()));
                }
                col.push((y, LaurentPoly { lo, coeffs }));
            }
            columns.push(col);
        }
        if r.pos != buf.len() {
            return Err(HeckeError::Cache("trailing bytes".into()));
        }
        Ok(KlTable { spec, basis: KlBasis { columns } })
    }
}

struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], HeckeError> {
        if self.pos + k > self.buf.len() {
            return Err(HeckeError::Cache("truncated file".into()));
        }
        let out = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, HeckeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Left cells as strongly connected components of "b_y appears in b_s b_x".
/// Cells are sorted internally and listed by their smallest element.
pub fn left_cells(group: &CoxeterGroup, table: &KlTable) -> Vec<Vec<usize>> {
    let mut graph = DiGraph::<(), ()>::with_capacity(group.len(), 0);
    let nodes: Vec<_> = (0..group.len()).map(|_| graph.add_node(())).collect();
    for x in 0..group.len() {
        for s in 0..group.rank() {
            if group.is_left_descent(s, x) {
                continue;
            }
            // b_s b_x = b_{sx} + Σ_{y<x, sy<y} μ(y,x) b_y
            graph.add_edge(nodes[x], nodes[group.lmul(s, x)], ());
            for (y, _) in table.basis().column(x) {
                let y = *y as usize;
                if y != x && group.is_left_descent(s, y) && table.mu(y, x) != 0 {
                    graph.add_edge(nodes[x], nodes[y], ());
                }
            }
        }
    }
    let mut cells: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    cells.sort();
    cells
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WGraphMethod {
    FullKl,
    Parabolic,
}

/// Default largest n for the full regular KL table.
pub const DEFAULT_FULL_KL_CAP: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WEdge {
    pub a: usize,
    pub b: usize,
    /// Weight used when acting on `b` produces `a`.
    pub mu_ab: i64,
    pub mu_ba: i64,
}

/// W-graph Γ^λ: vertices are Std(λ) in last letter order, labelled by D(T).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WGraph {
    pub shape: Partition,
    pub vertices: Vec<StandardTableau>,
    /// I(x) as 1-based indices i of s_i.
    pub labels: Vec<Vec<usize>>,
    /// Edges with `a < b`.
    pub edges: Vec<WEdge>,
}

impl WGraph {
    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    /// μ(x,y): weight of `y` in the action on `x`… stored per direction.
    pub fn mu(&self, y: usize, x: usize) -> i64 {
        let (a, b) = if y < x { (y, x) } else { (x, y) };
        self.edges
            .iter()
            .find(|e| e.a == a && e.b == b)
            .map_or(0, |e| if y < x { e.mu_ab } else { e.mu_ba })
    }

    pub fn has_label(&self, x: usize, i: usize) -> bool {
        self.labels[x].contains(&i)
    }

    /// Dense μ matrix, `m[y][x]`.
    pub fn mu_matrix(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        let mut m = vec![vec![0; d]; d];
        for e in &self.edges {
            m[e.a][e.b] = e.mu_ab;
            m[e.b][e.a] = e.mu_ba;
        }
        m
    }

    fn from_mu(shape: Partition, vertices: Vec<StandardTableau>, labels: Vec<Vec<usize>>, mu: impl Fn(usize, usize) -> i64) -> Self {
        let d = vertices.len();
        let mut edges = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                let (mu_ab, mu_ba) = (mu(a, b), mu(b, a));
                if mu_ab != 0 || mu_ba != 0 {
                    edges.push(WEdge { a, b, mu_ab, mu_ba });
                }
            }
        }
        WGraph { shape, vertices, labels, edges }
    }

    /// Γ^{λ'} from Γ^λ: transpose tableaux, complement labels, keep edges.
    pub fn conjugate(&self) -> WGraph {
        let shape = self.shape.conjugate();
        let vertices = standard_tableaux(&shape);
        let old: HashMap<StandardTableau, usize> =
            self.vertices.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let map: Vec<usize> = vertices.iter().map(|t| old[&t.transpose()]).collect();
        let n = self.n();
        let labels = map
            .iter()
            .map(|&o| (1..n).filter(|i| !self.labels[o].contains(i)).collect())
            .collect();
        let mu = self.mu_matrix();
        WGraph::from_mu(shape, vertices, labels, |y, x| mu[map[y]][map[x]])
    }

    /// `{lambda, vertices:[{index, tableau, descents}], edges:[{from, to, mu}]}`.
    /// Each edge is listed once with `from < to`; a reverse entry appears only
    /// when the weights differ by direction.
    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, t)| json!({"index": i, "tableau": t.to_string(), "descents": self.labels[i]}))
            .collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            edges.push(json!({"from": e.a, "to": e.b, "mu": e.mu_ab}));
            if e.mu_ba != e.mu_ab {
                edges.push(json!({"from": e.b, "to": e.a, "mu": e.mu_ba}));
            }
        }
        json!({"lambda": self.shape.to_string(), "vertices": vertices, "edges": edges})
    }

    pub fn from_json(v: &Value) -> Result<WGraph, HeckeError> {
        let bad = |m: &str| HeckeError::Json(m.to_string());
        let shape = v["lambda"]
            .as_str()
            .and_then(|s| Partition::parse(s).ok())
            .ok_or_else(|| bad("lambda"))?;
        let mut vertices = Vec::new();
        let mut labels = Vec::new();
        for (i, x) in v["vertices"].as_array().ok_or_else(|| bad("vertices"))?.iter().enumerate() {
            if x["index"].as_u64() != Some(i as u64) {
                return Err(bad("vertex indices must be 0, 1, 2, ..."));
            }
            let t = x["tableau"]
                .as_str()
                .and_then(|s| StandardTableau::parse(s).ok())
                .filter(|t| t.shape() == shape)
                .ok_or_else(|| bad("tableau"))?;
            let d: Option<Vec<usize>> = x["descents"]
                .as_array()
                .ok_or_else(|| bad("descents"))?
                .iter()
                .map(|k| k.as_u64().map(|k| k as usize))
                .collect();
            vertices.push(t);
            labels.push(d.ok_or_else(|| bad("descents"))?);
        }
        let mut mu: HashMap<(usize, usize), i64> = HashMap::new();
        for e in v["edges"].as_array().ok_or_else(|| bad("edges"))? {
            let (Some(a), Some(b), Some(m)) = (e["from"].as_u64(), e["to"].as_u64(), e["mu"].as_i64()) else {
                return Err(bad("edge"));
            };
            let (a, b) = (a as usize, b as usize);
            if a >= vertices.len() || b >= vertices.len() || a == b {
                return Err(bad("edge endpoint"));
            }
            mu.insert((a, b), m);
        }
        let weight = |y: usize, x: usize| {
            let (a, b) = (y.min(x), y.max(x));
            let forward = mu.get(&(a, b)).copied().unwrap_or(0);
            if y < x {
                forward
            } else {
                mu.get(&(b, a)).copied().unwrap_or(forward)
            }
        };
        Ok(WGraph::from_mu(shape, vertices, labels, weight))
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph \"Gamma{}\" {{\n", self.shape);
        for (i, t) in self.vertices.iter().enumerate() {
            let label: Vec<String> = self.labels[i].iter().map(|d| d.to_string()).collect();
            out.push_str(&format!("  {i} [label=\"{{{}}}\", tableau=\"{t}\"];\n", label.join(",")));
        }
        for e in &self.edges {
            if e.mu_ab == e.mu_ba {
                out.push_str(&format!("  {} -- {} [label=\"{}\"];\n", e.a, e.b, e.mu_ab));
            } else {
                out.push_str(&format!("  {} -- {} [label=\"{}/{}\"];\n", e.a, e.b, e.mu_ab, e.mu_ba));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn wgraph(shape: &Partition, method: WGraphMethod) -> Result<WGraph, HeckeError> {
    wgraph_with_cap(shape, method, DEFAULT_FULL_KL_CAP)
}

pub fn wgraph_with_cap(shape: &Partition, method: WGraphMethod, full_kl_cap: usize) -> Result<WGraph, HeckeError> {
    match method {
        WGraphMethod::FullKl if shape.n() > 1 => {
            let n = shape.n();
            if n > full_kl_cap {
                return Err(HeckeError::CapExceeded { n, cap: full_kl_cap });
            }
            let group = CoxeterGroup::new(CoxeterSpec::symmetric(n))?;
            let table = KlTable::compute(&group);
            let q0 = standard_tableaux(shape).into_iter().next().expect("Std(λ) is non-empty");
            wgraph_from_table(shape, &group, &table, &q0)
        }
        _ => wgraph_parabolic(shape),
    }
}

/// Γ^λ read off the left cell {x : Q(x) = q0} of a full KL table.
pub fn wgraph_from_table(
    shape: &Partition,
    group: &CoxeterGroup,
    table: &KlTable,
    q0: &StandardTableau,
) -> Result<WGraph, HeckeError> {
    let mut by_p: HashMap<StandardTableau, usize> = HashMap::new();
    for x in 0..group.len() {
        let GroupElement::Perm(p) = group.element(x) else {
            unreachable!("type A elements are permutations")
        };
        let (pt, qt) = robinson_schensted(p);
        if &qt == q0 {
            by_p.insert(pt, x);
        }
    }
    let vertices = standard_tableaux(shape);
    let elems: Vec<usize> = vertices.iter().map(|t| by_p[t]).collect();
    let mut labels = Vec::with_capacity(vertices.len());
    for (t, &x) in vertices.iter().zip(&elems) {
        let l: Vec<usize> = group.descents(x, Side::Left).into_iter().map(|s| s + 1).collect();
        if l != t.descent_set() {
            return Err(HeckeError::LabelMismatch(t.to_string()));
        }
        labels.push(l);
    }
    Ok(WGraph::from_mu(shape.clone(), vertices, labels, |y, x| table.basis().mu_sym(elems[y], elems[x])))
}

/// Γ^λ from the parabolic module of whichever of λ, λ' has the larger Young
/// subgroup. The cell of w_J has shape μ' for blocks μ; when that is λ' the
/// graph is conjugated back.
pub fn wgraph_parabolic(shape: &Partition) -> Result<WGraph, HeckeError> {
    let conj = shape.conjugate();
    let (blocks, cell_shape) = if shape.factorial_product() >= conj.factorial_product() {
        (shape.clone(), conj.clone())
    } else {
        (conj.clone(), shape.clone())
    };
    let pm = ParabolicModule::type_a(blocks.parts());
    let basis = KlBasis::compute(&pm.module);
    let (_, q0) = robinson_schensted(&pm.longest_in_coset(0));
    let mut by_p: HashMap<StandardTableau, usize> = HashMap::new();
    for x in 0..pm.reps.len() {
        let (pt, qt) = robinson_schensted(&pm.longest_in_coset(x));
        if qt == q0 {
            by_p.insert(pt, x);
        }
    }
    let vertices = standard_tableaux(&cell_shape);
    let elems: Vec<usize> = vertices.iter().map(|t| by_p[t]).collect();
    let n = shape.n();
    let mut labels = Vec::with_capacity(vertices.len());
    for (t, &x) in vertices.iter().zip(&elems) {
        let l: Vec<usize> = (0..n - 1).filter(|&s| pm.module.is_descent(s, x)).map(|s| s + 1).collect();
        if l != t.descent_set() {
            return Err(HeckeError::LabelMismatch(t.to_string()));
        }
        labels.push(l);
    }
    let graph = WGraph::from_mu(cell_shape.clone(), vertices, labels, |y, x| basis.mu_sym(elems[y], elems[x]));
    Ok(if &cell_shape == shape { graph } else { graph.conjugate() })
}

/// Matrices of 1+s_i at v=1 in the W-graph basis, and their transposes.
#[derive(Clone, Debug)]
pub struct CellMatrices {
    /// `ops[i-1]` is the matrix of 1+s_i.
    pub ops: Vec<RationalMatrix>,
    pub duals: Vec<RationalMatrix>,
}

/// Column x of 1+s: zero if s ∈ I(x); otherwise 2 on the diagonal plus
/// μ(y,x) at every y with s ∈ I(y).
pub fn cell_matrices_at_one(graph: &WGraph) -> CellMatrices {
    let d = graph.dim();
    let mu = graph.mu_matrix();
    let ops: Vec<RationalMatrix> = (1..graph.n())
        .map(|i| {
            let mut m = RationalMatrix::zeros(d, d);
            for x in 0..d {
                if graph.has_label(x, i) {
                    continue;
                }
                m[(x, x)] = rat(2);
                for y in 0..d {
                    if y != x && graph.has_label(y, i) && mu[y][x] != 0 {
                        m[(y, x)] = rat(mu[y][x]);
                    }
                }
            }
            m
        })
        .collect();
    let duals = ops.iter().map(RationalMatrix::transpose).collect();
    CellMatrices { ops, duals }
}
