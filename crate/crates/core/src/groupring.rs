//! Group-ring bases A_x = Σ_{y≤x} a_{y,x} y of ℝ[W]: feasibility of the
//! positivity problem, the type-A recursion constraints, the recursive
//! dihedral basis and a small local search.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::coxeter::{CoxeterError, CoxeterGroup, CoxeterSpec};
use crate::hecke::KlTable;
use crate::rational::{parse_rational, rat, rational_to_string, ratio, Rational};

/// Dense coefficient vector over the group's element indices.
pub type GroupRingElement = Vec<Rational>;

#[derive(thiserror::Error, Debug)]
pub enum GroupRingError {
    #[error("basis does not span the group ring (column {0})")]
    NotSpanning(usize),
    #[error("dihedral basis needs an even m >= 4, got {0}")]
    InvalidDihedral(usize),
    #[error("the two recursion branches disagree at element {0}")]
    BranchMismatch(String),
    #[error("budget exhausted before a feasible basis was found")]
    BudgetExhausted,
    #[error("group has {0} elements, search is capped at {1}")]
    TooLarge(usize, usize),
    #[error("malformed basis JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

pub fn zero(group: &CoxeterGroup) -> GroupRingElement {
    vec![Rational::zero(); group.len()]
}

pub fn unit(group: &CoxeterGroup) -> GroupRingElement {
    let mut e = zero(group);
    e[group.identity()] = Rational::one();
    e
}

/// s + 1.
pub fn generator_plus_one(group: &CoxeterGroup, s: usize) -> GroupRingElement {
    let mut e = unit(group);
    e[group.generator(s)] = Rational::one();
    e
}

/// Σ_{y ∈ W} y.
pub fn sum_of_all(group: &CoxeterGroup) -> GroupRingElement {
    vec![Rational::one(); group.len()]
}

pub fn groupring_multiply(group: &CoxeterGroup, a: &[Rational], b: &[Rational]) -> GroupRingElement {
    let mut out = zero(group);
    for (x, ax) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (y, by) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            out[group.mul(x, y)] += ax * by;
        }
    }
    out
}

fn sub(a: &[Rational], b: &[Rational]) -> GroupRingElement {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A unitriangular family indexed by the group elements. The group's element
/// order is length-compatible, hence Bruhat-compatible.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingBasis {
    spec: CoxeterSpec,
    columns: Vec<GroupRingElement>,
}

impl GroupRingBasis {
    /// Columns must be triangular in element order with non-zero diagonal.
    pub fn new(group: &CoxeterGroup, columns: Vec<GroupRingElement>) -> Result<Self, GroupRingError> {
        if columns.len() != group.len() {
            return Err(GroupRingError::NotSpanning(columns.len().min(group.len())));
        }
        for (x, col) in columns.iter().enumerate() {
            if col.len() != group.len() || col[x].is_zero() || col[x + 1..].iter().any(|c| !c.is_zero()) {
                return Err(GroupRingError::NotSpanning(x));
            }
        }
        Ok(GroupRingBasis { spec: group.spec(), columns })
    }

    /// The KL basis at v = 1: A_x = Σ_y h_{y,x}(1) y.
    pub fn kl_at_one(group: &CoxeterGroup, table: &KlTable) -> Self {
        let n = group.len();
        let columns = (0..n)
            .map(|x| (0..n).map(|y| rat(table.h(y, x).eval_at_one())).collect())
            .collect();
        GroupRingBasis { spec: group.spec(), columns }
    }

    pub fn spec(&self) -> CoxeterSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, x: usize) -> &[Rational] {
        &self.columns[x]
    }

    pub fn coeff(&self, y: usize, x: usize) -> &Rational {
        &self.columns[x][y]
    }

    pub fn set_coeff(&mut self, y: usize, x: usize, value: Rational) {
        assert!(y < x, "only strictly triangular entries may change");
        self.columns[x][y] = value;
    }

    /// Σ_x Σ_y a_{y,x}.
    pub fn objective(&self) -> Rational {
        self.columns.iter().flatten().sum()
    }

    /// Coefficient matrix with entry (y, x) = a_{y,x}.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.len();
        (0..n).map(|y| (0..n).map(|x| self.columns[x][y].clone()).collect()).collect()
    }

    /// Coordinates of `v` in this basis, by back-substitution from the
    /// longest element down.
    pub fn decompose(&self, v: &[Rational]) -> GroupRingElement {
        let mut r = v.to_vec();
        let mut c = vec![Rational::zero(); r.len()];
        for z in (0..r.len()).rev() {
            if r[z].is_zero() {
                continue;
            }
            let k = &r[z] / &self.columns[z][z];
            for (ri, ai) in r[..=z].iter_mut().zip(&self.columns[z]) {
                if !ai.is_zero() {
                    *ri -= &k * ai;
                }
            }
            c[z] = k;
        }
        c
    }

    pub fn to_json(&self, group: &CoxeterGroup) -> Value {
        let name = |w: usize| group.element(w).to_string();
        let mut columns = Map::new();
        for (x, col) in self.columns.iter().enumerate() {
            let entries: Vec<Value> = col
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(y, c)| json!({"y": name(y), "coeff": rational_to_string(c)}))
                .collect();
            columns.insert(name(x), Value::Array(entries));
        }
        json!({
            "group": self.spec.name(),
            "order": (0..group.len()).map(name).collect::<Vec<_>>(),
            "columns": columns,
        })
    }

    pub fn from_json(group: &CoxeterGroup, v: &Value) -> Result<Self, GroupRingError> {
        let bad = |m: &str| GroupRingError::Json(m.to_string());
        if v["group"].as_str() != Some(group.spec().name().as_str()) {
            return Err(bad("group does not match"));
        }
        let names: BTreeMap<String, usize> =
            (0..group.len()).map(|w| (group.element(w).to_string(), w)).collect();
        let cols = v["columns"].as_object().ok_or_else(|| bad("missing columns"))?;
        let mut columns = vec![zero(group); group.len()];
        for (xname, entries) in cols {
            let x = *names.get(xname).ok_or_else(|| bad(&format!("unknown element {xname}")))?;
            for e in entries.as_array().ok_or_else(|| bad("column is not an array"))? {
                let y = e["y"]
                    .as_str()
                    .and_then(|s| names.get(s))
                    .ok_or_else(|| bad("bad y"))?;
                let c = match &e["coeff"] {
                    Value::String(s) => parse_rational(s),
                    Value::Number(n) => n.as_i64().map(rat),
                    _ => None,
                }
                .ok_or_else(|| bad("bad coeff"))?;
                columns[x][*y] = c;
            }
        }
        Self::new(group, columns)
    }
}

/// μ_{xy}^z with A_xA_y = Σ_z μ_{xy}^z A_z.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StructureConstants {
    pub map: BTreeMap<(usize, usize, usize), Rational>,
}

impl StructureConstants {
    pub fn compute(group: &CoxeterGroup, basis: &GroupRingBasis) -> Self {
        let n = group.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
        let per_pair: Vec<Vec<((usize, usize, usize), Rational)>> = pairs
            .par_iter()
            .map(|&(x, y)| {
                let p = groupring_multiply(group, basis.column(x), basis.column(y));
                basis
                    .decompose(&p)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(z, c)| ((x, y, z), c))
                    .collect()
            })
            .collect();
        StructureConstants { map: per_pair.into_iter().flatten().collect() }
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> Rational {
        self.map.get(&(x, y, z)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.map.values().all(|c| !c.is_negative())
    }

    /// Checks Σ_z μ_{xy}^z A_z = A_xA_y for every pair.
    pub fn reproduces(&self, group: &CoxeterGroup, basis: &GroupRingBasis) -> bool {
        let n = group.len();
        (0..n).all(|x| {
            (0..n).all(|y| {
                let mut sum = zero(group);
                for z in 0..n {
                    let c = self.get(x, y, z);
                    if !c.is_zero() {
                        for (si, ai) in sum.iter_mut().zip(basis.column(z)) {
                            *si += &c * ai;
                        }
                    }
                }
                sum == groupring_multiply(group, basis.column(x), basis.column(y))
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation31 {
    NegativeCoefficient { y: usize, x: usize, value: Rational },
    OutsideBruhatInterval { y: usize, x: usize },
    Generator { s: usize },
    NegativeStructureConstant { x: usize, y: usize, z: usize, value: Rational },
    LongestElement,
}

impl Violation31 {
    pub fn describe(&self, group: &CoxeterGroup) -> String {
        let n = |w: &usize| group.element(*w).to_string();
        match self {
            Violation31::NegativeCoefficient { y, x, value } => {
                format!("a[{},{}] = {} < 0", n(y), n(x), rational_to_string(value))
            }
            Violation31::OutsideBruhatInterval { y, x } => {
                format!("a[{},{}] != 0 but {} is not below {}", n(y), n(x), n(y), n(x))
            }
            Violation31::Generator { s } => format!("A_s != s+1 for generator {s}"),
            Violation31::NegativeStructureConstant { x, y, z, value } => format!(
                "A_{}A_{} has coefficient {} at A_{}",
                n(x),
                n(y),
                rational_to_string(value),
                n(z)
            ),
            Violation31::LongestElement => "A_w0 != sum of all elements".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report31 {
    pub feasible: bool,
    pub objective: Rational,
    pub violation: Option<Violation31>,
}

/// Checks the four constraints in order and reports the first violation.
/// `with_longest` toggles the A_{w0} = Σ y condition.
pub fn check_feasible_31(group: &CoxeterGroup, basis: &GroupRingBasis, with_longest: bool) -> Report31 {
    let objective = basis.objective();
    let violation = first_violation_31(group, basis, with_longest);
    Report31 { feasible: violation.is_none(), objective, violation }
}

fn first_violation_31(group: &CoxeterGroup, basis: &GroupRingBasis, with_longest: bool) -> Option<Violation31> {
    let n = group.len();
    for x in 0..n {
        for y in 0..=x {
            let c = basis.coeff(y, x);
            if c.is_negative() {
                return Some(Violation31::NegativeCoefficient { y, x, value: c.clone() });
            }
            if !c.is_zero() && !group.bruhat_leq(y, x) {
                return Some(Violation31::OutsideBruhatInterval { y, x });
            }
        }
    }
    for s in 0..group.rank() {
        if basis.column(group.generator(s)) != generator_plus_one(group, s).as_slice() {
            return Some(Violation31::Generator { s });
        }
    }
    let found = (0..n * n).into_par_iter().find_map_first(|k| {
        let (x, y) = (k / n, k % n);
        let p = groupring_multiply(group, basis.column(x), basis.column(y));
        basis
            .decompose(&p)
            .into_iter()
            .enumerate()
            .find(|(_, c)| c.is_negative())
            .map(|(z, value)| Violation31::NegativeStructureConstant { x, y, z, value })
    });
    if found.is_some() {
        return found;
    }
    if with_longest && basis.column(group.longest_element()) != sum_of_all(group).as_slice() {
        return Some(Violation31::LongestElement);
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation33 {
    /// sx < x but A_sA_x ≠ 2A_x.
    NotDoubled { s: usize, x: usize },
    NegativeMu { s: usize, y: usize, x: usize, value: Rational },
    /// Non-zero coefficient at y outside {y < x, sy < y}.
    Support { s: usize, y: usize, x: usize },
    /// μ̃(y,x) differs between two generators.
    Inconsistent { y: usize, x: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report33 {
    pub feasible: bool,
    /// Non-zero μ̃(y,x), keyed by (y, x).
    pub mu: BTreeMap<(usize, usize), Rational>,
    pub violation: Option<Violation33>,
}

/// A_sA_x = 2A_x when sx < x, otherwise A_{sx} + Σ μ̃(y,x)A_y with μ̃ ≥ 0
/// supported on y < x with sy < y. μ̃ must not depend on s.
pub fn check_feasible_33(group: &CoxeterGroup, basis: &GroupRingBasis) -> Report33 {
    let mut mu: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    // μ̃(y,x) = 0 is also a value that other generators must agree with
    let mut seen: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let fail = |mu, v| Report33 { feasible: false, mu, violation: Some(v) };
    for x in 0..group.len() {
        for s in 0..group.rank() {
            let prod = groupring_multiply(group, &generator_plus_one(group, s), basis.column(x));
            let sx = group.lmul(s, x);
            if group.is_left_descent(s, x) {
                let twice: GroupRingElement = basis.column(x).iter().map(|c| c * rat(2)).collect();
                if prod != twice {
                    return fail(mu, Violation33::NotDoubled { s, x });
                }
                continue;
            }
            let coords = basis.decompose(&sub(&prod, basis.column(sx)));
            for (y, c) in coords.iter().enumerate() {
                let allowed = y != x && group.bruhat_leq(y, x) && group.is_left_descent(s, y);
                if !allowed {
                    if !c.is_zero() {
                        return fail(mu, Violation33::Support { s, y, x });
                    }
                    continue;
                }
                if c.is_negative() {
                    return fail(mu, Violation33::NegativeMu { s, y, x, value: c.clone() });
                }
                if let Some(prev) = seen.insert((y, x), c.clone()) {
                    if &prev != c {
                        return fail(mu, Violation33::Inconsistent { y, x });
                    }
                }
                if !c.is_zero() {
                    mu.insert((y, x), c.clone());
                }
            }
        }
    }
    Report33 { feasible: true, mu, violation: None }
}

/// The recursive dihedral basis for I_2(m). With `mirror` the roles of s and
/// t are exchanged.
pub fn dihedral_min_basis(m: usize, mirror: bool) -> Result<(CoxeterGroup, GroupRingBasis), GroupRingError> {
    if m < 4 || m % 2 == 1 {
        return Err(GroupRingError::InvalidDihedral(m));
    }
    let group = CoxeterGroup::new(CoxeterSpec::Dihedral { m })?;
    let (s, t) = if mirror { (1, 0) } else { (0, 1) };
    let gs = group.generator(s);
    let gt = group.generator(t);
    let n = group.len();
    let mut cols: Vec<GroupRingElement> = Vec::with_capacity(n);
    for x in 0..n {
        let len = group.length(x);
        let col = if len == 0 {
            unit(&group)
        } else if x == gs {
            generator_plus_one(&group, s)
        } else if x == gt {
            generator_plus_one(&group, t)
        } else if group.is_right_descent(x, s) {
            translate_right(&group, &cols[group.rmul(x, s)], gs)
        } else if group.is_left_descent(s, x) {
            translate_left(&group, gs, &cols[group.lmul(s, x)])
        } else if len == 3 {
            // x = tst
            groupring_multiply(&group, &cols[gt], &cols[group.lmul(t, x)])
        } else {
            let inner = group.mul(group.mul(gs, group.mul(gt, x)), group.mul(gt, gs));
            let a = sub(&groupring_multiply(&group, &cols[gt], &cols[group.lmul(t, x)]), &cols[inner]);
            let b = sub(&groupring_multiply(&group, &cols[group.rmul(x, t)], &cols[gt]), &cols[inner]);
            if a != b {
                return Err(GroupRingError::BranchMismatch(group.element(x).to_string()));
            }
            a
        };
        cols.push(col);
    }
    let basis = GroupRingBasis::new(&group, cols)?;
    Ok((group, basis))
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Number of feasibility evaluations allowed.
    pub budget: usize,
    pub seed: u64,
    pub with_longest: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 2000, seed: 0, with_longest: true }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub basis: GroupRingBasis,
    pub objective: Rational,
    pub kl_objective: Rational,
    /// Strictly smaller objective than the KL basis at v = 1.
    pub improves_on_kl: bool,
    pub differs_from_kl: bool,
    pub evaluations: usize,
    /// No improving move exists from the returned basis.
    pub local_minimum: bool,
}

impl SearchResult {
    pub fn to_json(&self, group: &CoxeterGroup) -> Value {
        json!({
            "basis": self.basis.to_json(group),
            "objective": rational_to_string(&self.objective),
            "kl_objective": rational_to_string(&self.kl_objective),
            "improves_on_kl": self.improves_on_kl,
            "differs_from_kl": self.differs_from_kl,
            "evaluations": self.evaluations,
            "local_minimum": self.local_minimum,
        })
    }
}

pub const SEARCH_CAP: usize = 24;

/// Local search from the KL basis at v = 1.
pub fn groupring_search(spec: CoxeterSpec, opts: &SearchOptions) -> Result<(CoxeterGroup, SearchResult), GroupRingError> {
    spec.validate()?;
    if spec.order() > SEARCH_CAP {
        return Err(GroupRingError::TooLarge(spec.order(), SEARCH_CAP));
    }
    let group = CoxeterGroup::new(spec)?;
    let table = KlTable::compute(&group);
    let seed = GroupRingBasis::kl_at_one(&group, &table);
    let r = search_from(&group, &seed, &seed, opts)?;
    Ok((group, r))
}

/// Greedy descent on the objective. A move changes one column: subtract a
/// lower column, lower a single coefficient, translate a neighbouring column
/// (A_x ← sA_{sx} or A_{xs}s) or take a product A_sA_{sx}. A move that breaks
/// feasibility is repaired by sweeping the higher columns through the same
/// translation and product candidates, each time keeping the candidate with
/// the least violation. A move is kept only if it ends exactly feasible with
/// a smaller objective. Every violation evaluation costs one unit of budget.
pub fn search_from(
    group: &CoxeterGroup,
    seed: &GroupRingBasis,
    kl: &GroupRingBasis,
    opts: &SearchOptions,
) -> Result<SearchResult, GroupRingError> {
    let kl_objective = kl.objective();
    let finish = |basis: GroupRingBasis, evaluations, local_minimum| {
        let objective = basis.objective();
        SearchResult {
            improves_on_kl: objective < kl_objective,
            differs_from_kl: &basis != kl,
            objective,
            kl_objective: kl_objective.clone(),
            basis,
            evaluations,
            local_minimum,
        }
    };
    if opts.budget == 0 {
        return Ok(finish(seed.clone(), 0, false));
    }
    let mut budget = Budget { used: 1, cap: opts.budget };
    if !violation(group, seed, opts.with_longest).is_zero() {
        return Err(GroupRingError::BudgetExhausted);
    }
    let n = group.len();
    let w0 = group.longest_element();
    let fixed = |x: usize| {
        x == group.identity()
            || (0..group.rank()).any(|s| group.generator(s) == x)
            || (opts.with_longest && x == w0)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut current = seed.clone();
    loop {
        let mut moves: Vec<(usize, GroupRingElement)> = Vec::new();
        for x in (0..n).filter(|&x| !fixed(x)) {
            for y in (0..x).filter(|&y| group.bruhat_leq(y, x)) {
                moves.push((x, sub(current.column(x), current.column(y))));
                for d in [rat(1), ratio(1, 2)] {
                    let mut col = current.column(x).to_vec();
                    col[y] -= d;
                    moves.push((x, col));
                }
            }
            moves.extend(column_candidates(group, &current, x).into_iter().map(|c| (x, c)));
        }
        moves.retain(|(x, col)| admissible(group, *x, col) && col.as_slice() != current.column(*x));
        moves.shuffle(&mut rng);
        let mut improved = false;
        for (x, col) in moves {
            let mut cand = current.clone();
            cand.columns[x] = col;
            if cand.objective() >= current.objective() {
                continue;
            }
            let Some(v) = budget.eval(group, &cand, opts.with_longest) else {
                return Ok(finish(current, budget.used, false));
            };
            let cand = if v.is_zero() {
                Some(cand)
            } else {
                match repair(group, cand, x, v, &fixed, opts.with_longest, &mut budget) {
                    Ok(r) => r,
                    Err(()) => return Ok(finish(current, budget.used, false)),
                }
            };
            if let Some(c) = cand.filter(|c| c.objective() < current.objective()) {
                current = c;
                improved = true;
                break;
            }
        }
        if !improved {
            return Ok(finish(current, budget.used, true));
        }
    }
}

struct Budget {
    used: usize,
    cap: usize,
}

impl Budget {
    fn eval(&mut self, group: &CoxeterGroup, b: &GroupRingBasis, with_longest: bool) -> Option<Rational> {
        if self.used >= self.cap {
            return None;
        }
        self.used += 1;
        Some(violation(group, b, with_longest))
    }
}

/// Up to three sweeps over the columns above `x`. Err(()) means the budget
/// ran out.
fn repair(
    group: &CoxeterGroup,
    mut b: GroupRingBasis,
    x: usize,
    mut v: Rational,
    fixed: &dyn Fn(usize) -> bool,
    with_longest: bool,
    budget: &mut Budget,
) -> Result<Option<GroupRingBasis>, ()> {
    for _ in 0..3 {
        let before = v.clone();
        for z in (x + 1..group.len()).filter(|&z| !fixed(z)) {
            for col in column_candidates(group, &b, z) {
                if !admissible(group, z, &col) || col.as_slice() == b.column(z) {
                    continue;
                }
                let mut cand = b.clone();
                cand.columns[z] = col;
                let cv = budget.eval(group, &cand, with_longest).ok_or(())?;
                if cv < v || (cv == v && cand.objective() < b.objective()) {
                    b = cand;
                    v = cv;
                }
            }
            if v.is_zero() {
                return Ok(Some(b));
            }
        }
        if v >= before {
            break;
        }
    }
    Ok(None)
}

/// sA_{sx}, A_{xs}s and A_sA_{sx}, A_{xs}A_s for every descent s of x.
fn column_candidates(group: &CoxeterGroup, b: &GroupRingBasis, x: usize) -> Vec<GroupRingElement> {
    let mut out = Vec::new();
    for s in 0..group.rank() {
        let gs = group.generator(s);
        if group.is_left_descent(s, x) {
            let sx = group.lmul(s, x);
            out.push(translate_left(group, gs, b.column(sx)));
            out.push(groupring_multiply(group, b.column(gs), b.column(sx)));
        }
        if group.is_right_descent(x, s) {
            let xs = group.rmul(x, s);
            out.push(translate_right(group, b.column(xs), gs));
            out.push(groupring_multiply(group, b.column(xs), b.column(gs)));
        }
    }
    out
}

/// Non-negative, coefficient 1 at x, supported below x.
fn admissible(group: &CoxeterGroup, x: usize, col: &[Rational]) -> bool {
    col[x].is_one()
        && col.iter().enumerate().all(|(y, c)| {
            c.is_zero() || (!c.is_negative() && (y == x || (y < x && group.bruhat_leq(y, x))))
        })
}

/// Total negative part of all structure constants, plus the distance of A_{w0}
/// from Σ y when that condition is on. Zero exactly on feasible bases whose
/// coefficients are already admissible.
pub fn violation(group: &CoxeterGroup, basis: &GroupRingBasis, with_longest: bool) -> Rational {
    let n = group.len();
    let mut v: Rational = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let p = groupring_multiply(group, basis.column(k / n), basis.column(k % n));
            basis.decompose(&p).into_iter().filter(|c| c.is_negative()).map(|c| -c).sum::<Rational>()
        })
        .sum();
    if with_longest {
        let w0 = basis.column(group.longest_element());
        v += w0.iter().map(|c| (c - Rational::one()).abs()).sum::<Rational>();
    }
    v
}

pub fn translate_left(group: &CoxeterGroup, g: usize, a: &[Rational]) -> GroupRingElement {
    let mut out = zero(group);
    for (y, c) in a.iter().enumerate() {
        out[group.mul(g, y)] += c;
    }
    out
}

pub fn translate_right(group: &CoxeterGroup, a: &[Rational], g: usize) -> GroupRingElement {
    let mut out = zero(group);
    for (y, c) in a.iter().enumerate() {
        out[group.mul(y, g)] += c;
    }
    out
}

/// Single-coefficient perturbations ±1, ±1/2 of every free entry of `basis`.
/// Returns the perturbations that stay feasible (empty for a locally unique
/// solution).
pub fn feasible_perturbations(
    group: &CoxeterGroup,
    basis: &GroupRingBasis,
    with_longest: bool,
) -> Vec<(usize, usize, Rational)> {
    let n = group.len();
    let w0 = group.longest_element();
    let mut cands = Vec::new();
    for x in 0..n {
        let fixed = x == group.identity()
            || (0..group.rank()).any(|s| group.generator(s) == x)
            || (with_longest && x == w0);
        if fixed {
            continue;
        }
        for y in (0..x).filter(|&y| group.bruhat_leq(y, x)) {
            for d in [rat(1), rat(-1), ratio(1, 2), ratio(-1, 2)] {
                let v = basis.coeff(y, x) + &d;
                if !v.is_negative() {
                    cands.push((y, x, v));
                }
            }
        }
    }
    cands
        .into_iter()
        .filter(|(y, x, v)| {
            let mut b = basis.clone();
            b.set_coeff(*y, *x, v.clone());
            check_feasible_31(group, &b, with_longest).feasible
        })
        .map(|(y, x, v)| (y, x, v - basis.coeff(y, x)))
        .collect()
}
