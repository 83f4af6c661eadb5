//! Invariant cones for the operators 1+s acting on the dual KL basis.
//!
//! In the coordinates used here the dual KL basis vectors w_T are the unit
//! vectors e_T, and 1+s acts by M_s = K_sᵗ.

use std::collections::{BTreeSet, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::hecke::{cell_matrices_at_one, wgraph, HeckeError, WGraphMethod};
use crate::lp::{in_cone_exact, nonnegative_solution};
use crate::rational::{rat, snap_to_rational, Rational, RationalMatrix};
use crate::tableaux::{standard_tableaux, Partition, StandardTableau};

#[derive(thiserror::Error, Debug)]
pub enum ConeError {
    #[error("power iteration did not converge in {0} steps")]
    NoConvergence(usize),
    #[error("LP failed numerically")]
    LpNumericalFailure,
    #[error("cone generators do not span the space")]
    NotSpanning,
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_iter: 100_000, tol: 1e-10 }
    }
}

/// Operators `mats[i-1]` for the generators s_i.
#[derive(Clone, Debug)]
pub struct OperatorFamily {
    pub mats: Vec<RationalMatrix>,
    pub floats: Vec<DMatrix<f64>>,
}

impl OperatorFamily {
    pub fn new(mats: Vec<RationalMatrix>) -> Self {
        let floats = mats.iter().map(RationalMatrix::to_f64).collect();
        OperatorFamily { mats, floats }
    }

    /// The transposed cell matrices K_sᵗ of Γ^λ, with Std(λ).
    pub fn dual_kl(shape: &Partition) -> Result<(Self, Vec<StandardTableau>), ConeError> {
        let graph = wgraph(shape, WGraphMethod::Parabolic)?;
        let m = cell_matrices_at_one(&graph);
        Ok((Self::new(m.duals), graph.vertices))
    }

    pub fn dim(&self) -> usize {
        self.mats.first().map_or(1, RationalMatrix::nrows)
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Advisory: random word products make a random vector cyclic for the
    /// family and for its transpose. A common invariant subspace would
    /// cap one of the two ranks below d.
    pub fn irreducibility_precheck(&self, seed: u64) -> bool {
        let d = self.dim();
        if self.is_empty() {
            return d == 1;
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let start = DVector::from_fn(d, |_, _| rng.gen_range(0.5..1.5));
        let mut fwd = Vec::new();
        let mut back = Vec::new();
        for _ in 0..200 {
            let len = rng.gen_range(0..=2 * d);
            let mut v = start.clone();
            let mut u = start.clone();
            for _ in 0..len {
                let s = rng.gen_range(0..self.len());
                v = &self.floats[s] * v;
                u = self.floats[s].transpose() * u;
                normalize(&mut v);
                normalize(&mut u);
            }
            fwd.push(v);
            back.push(u);
        }
        let rank = |cols: &[DVector<f64>]| DMatrix::from_columns(cols).rank(1e-9);
        rank(&fwd) == d && rank(&back) == d
    }
}

fn normalize(v: &mut DVector<f64>) {
    let n = v.norm();
    if n > 0.0 {
        *v /= n;
    }
}

/// Unit Perron vector and value of F = (1/|S|)Σ(1+s), by power iteration on
/// F + 1 (same eigenvector, no peripheral eigenvalues).
pub fn averaging_perron(family: &OperatorFamily, budget: Budget) -> Result<(DVector<f64>, f64), ConeError> {
    let d = family.dim();
    if family.is_empty() {
        return Ok((DVector::from_element(1, 1.0), 0.0));
    }
    let mut f = DMatrix::zeros(d, d);
    for m in &family.floats {
        f += m;
    }
    f /= family.len() as f64;
    let shifted = &f + DMatrix::identity(d, d);
    let mut v = DVector::from_element(d, 1.0 / (d as f64).sqrt());
    for _ in 0..budget.max_iter {
        let mut w = &shifted * &v;
        normalize(&mut w);
        let rho = (&f * &w).dot(&w);
        let residual = (&f * &w - &w * rho).norm();
        v = w;
        if residual <= 1e-12 {
            return Ok((v, rho));
        }
    }
    Err(ConeError::NoConvergence(budget.max_iter))
}

/// A_Tᵗ = Π_{i ∈ D^c(T)} (1+s_i)ᵗ, ascending.
pub fn product_operator(t: &StandardTableau, family: &OperatorFamily) -> RationalMatrix {
    product_exact(&t.descent_complement(), family)
}

fn product_exact(dc: &[usize], family: &OperatorFamily) -> RationalMatrix {
    dc.iter().fold(RationalMatrix::identity(family.dim()), |acc, &i| acc.mul(&family.mats[i - 1]))
}

fn product_float(dc: &[usize], family: &OperatorFamily) -> DMatrix<f64> {
    let d = family.dim();
    dc.iter().fold(DMatrix::identity(d, d), |acc, &i| acc * &family.floats[i - 1])
}

fn product_apply_exact(dc: &[usize], family: &OperatorFamily, v: &[Rational]) -> Vec<Rational> {
    dc.iter().rev().fold(v.to_vec(), |acc, &i| family.mats[i - 1].mul_vec(&acc))
}

/// Largest eigenvalue modulus, from a Schur decomposition. If QR iteration
/// stalls, falls back to Gelfand's formula ρ = lim |A^N|^{1/N} by squaring.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    let d = a.nrows();
    if let Some(schur) = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 1000 * d.max(1)) {
        return schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let mut b = a.clone();
    let mut log_scale = 0.0;
    let mut exponent = 1.0;
    for _ in 0..60 {
        let m = b.amax();
        if m == 0.0 {
            return 0.0;
        }
        b /= m;
        log_scale += m.ln() / exponent;
        b = &b * &b;
        exponent *= 2.0;
    }
    (log_scale + b.amax().ln() / exponent).exp()
}

/// Outcome of the eigenvalue lemma check for one tableau.
#[derive(Clone, Debug)]
pub struct EigenCheck {
    pub top: f64,
    pub expected: f64,
    /// dim ker(A − 2^k), exact.
    pub eigenspace_dim: usize,
    /// The eigenspace lies in span{w_T' : D^c(T) ⊆ D^c(T')}.
    pub eigenspace_in_span: bool,
}

pub fn eigen_check(t: &StandardTableau, tableaux: &[StandardTableau], family: &OperatorFamily) -> EigenCheck {
    let dc = t.descent_complement();
    let a = product_exact(&dc, family);
    let expected = 2f64.powi(dc.len() as i32);
    let top = spectral_radius(&a.to_f64());
    let shifted = a.sub(&RationalMatrix::identity(a.nrows()).scale(&rat(1 << dc.len())));
    let kernel = shifted.kernel();
    let own: BTreeSet<usize> = dc.iter().copied().collect();
    let allowed: Vec<bool> = tableaux
        .iter()
        .map(|u| own.is_subset(&u.descent_complement().into_iter().collect()))
        .collect();
    let eigenspace_in_span = kernel.iter().all(|v| v.iter().zip(&allowed).all(|(x, ok)| *ok || x.is_zero()));
    EigenCheck { top, expected, eigenspace_dim: kernel.len(), eigenspace_in_span }
}

/// Raw normalized iteration v ← Av/|Av| until successive iterates agree
/// within `budget.tol`.
pub fn power_converge(a: &DMatrix<f64>, v: &DVector<f64>, budget: Budget) -> Result<DVector<f64>, ConeError> {
    let mut x = v.clone();
    normalize(&mut x);
    for _ in 0..budget.max_iter {
        let mut y = a * &x;
        if y.norm() == 0.0 {
            return Err(ConeError::NoConvergence(0));
        }
        normalize(&mut y);
        let delta = (&y - &x).norm();
        x = y;
        if delta <= budget.tol {
            return Ok(x);
        }
    }
    Err(ConeError::NoConvergence(budget.max_iter))
}

/// lim (A/top)^{2^m} by repeated squaring; None if the powers blow up or
/// fail to settle.
fn limit_projector(a: &DMatrix<f64>, top: f64) -> Option<DMatrix<f64>> {
    let mut b = a / top;
    for _ in 0..64 {
        let b2 = &b * &b;
        let scale = b2.amax().max(1.0);
        let diff = (&b2 - &b).amax();
        b = b2;
        if scale > 1e12 {
            return None;
        }
        if diff <= 1e-13 * scale {
            return Some(b);
        }
    }
    None
}

/// Cone spanned by the columns of A is inside the cone of B: B⁻¹A ≥ 0.
pub fn cone_contains(a: &RationalMatrix, b: &RationalMatrix) -> bool {
    b.inverse().map_or(false, |bi| bi.mul(a).is_nonnegative())
}

pub fn cone_contains_f64(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    b.clone().try_inverse().map_or(false, |bi| (bi * a).iter().all(|&x| x >= -tol))
}

/// B* = G⁻¹B⁻ᵗ, so (b*_i, b_j)_G = δ_ij.
pub fn dual_basis(b: &RationalMatrix, g: &RationalMatrix) -> RationalMatrix {
    let gi = g.inverse().expect("G is invertible");
    let bit = b.inverse().expect("B is invertible").transpose();
    gi.mul(&bit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCone {
    pub generators: Vec<Vec<Rational>>,
}

impl PolyhedralCone {
    pub fn new(generators: Vec<Vec<Rational>>) -> Self {
        PolyhedralCone { generators }
    }

    pub fn from_columns(m: &RationalMatrix) -> Self {
        Self::new((0..m.ncols()).map(|j| m.column(j)).collect())
    }

    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_columns(&self.generators)
    }

    /// No non-trivial non-negative combination of generators vanishes.
    pub fn is_pointed(&self) -> bool {
        let g = self.matrix();
        let m = g.ncols();
        let mut rows: Vec<Vec<Rational>> = (0..g.nrows()).map(|i| g.row(i)).collect();
        rows.push(vec![Rational::one(); m]);
        let mut rhs = vec![Rational::zero(); g.nrows()];
        rhs.push(Rational::one());
        nonnegative_solution(&rows, &rhs, m).is_none()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        in_cone_exact(&self.matrix(), v).is_some()
    }
}

/// Largest dimension handled by the exact simplex; above it the float LP is used.
pub const EXACT_LP_DIM: usize = 100;

/// Every M g is a non-negative combination of generators.
///
/// A simplicial cone is checked through the inverse. With one extra
/// generator the solution set of G c = y is a line c₀ + t k, and feasibility
/// is an interval test. Anything else goes to the simplex.
pub fn invariance_check(cone: &PolyhedralCone, family: &OperatorFamily) -> Result<bool, ConeError> {
    let g = cone.matrix();
    let d = g.nrows();
    let mut echelon = g.clone();
    let pivots = echelon.rref();
    if pivots.len() < d {
        return Err(ConeError::NotSpanning);
    }
    let kernel = g.kernel();
    let basis_cols: Vec<Vec<Rational>> = pivots.iter().map(|&j| g.column(j)).collect();
    let basis_inv = RationalMatrix::from_columns(&basis_cols).inverse().ok_or(ConeError::NotSpanning)?;
    let targets = cone.generators.iter().flat_map(|gen| family.mats.iter().map(move |m| m.mul_vec(gen)));
    match kernel.len() {
        0 | 1 => {
            for y in targets {
                let sol = basis_inv.mul_vec(&y);
                let mut c0 = vec![Rational::zero(); g.ncols()];
                for (k, &j) in pivots.iter().enumerate() {
                    c0[j] = sol[k].clone();
                }
                let ok = match kernel.first() {
                    None => c0.iter().all(|x| !x.is_negative()),
                    Some(k) => line_meets_orthant(&c0, k),
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ if d <= EXACT_LP_DIM => {
            for y in targets {
                if in_cone_exact(&g, &y).is_none() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => {
            let gf: Vec<Vec<f64>> = (0..d).map(|i| g.row(i).iter().map(crate::rational::to_f64).collect()).collect();
            for y in targets {
                let yf: Vec<f64> = y.iter().map(crate::rational::to_f64).collect();
                if nonnegative_solution(&gf, &yf, g.ncols()).is_none() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Is there t with c₀ + t·k ≥ 0?
fn line_meets_orthant(c0: &[Rational], k: &[Rational]) -> bool {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for (c, kk) in c0.iter().zip(k) {
        if kk.is_zero() {
            if c.is_negative() {
                return false;
            }
            continue;
        }
        let bound = -c / kk;
        if kk.is_positive() {
            if lo.as_ref().map_or(true, |l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().map_or(true, |h| bound < *h) {
            hi = Some(bound);
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => l <= h,
        _ => true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyMode {
    /// Seed with every D^c-maximal tableau.
    Standard,
    /// Seed with the last tableau only and accept w_T' appearing in a step
    /// from w_T only when T' < T.
    LastTableau,
}

#[derive(Clone, Copy, Debug)]
pub struct StrategyOptions {
    pub budget: Budget,
    pub max_denominator: i64,
    pub mode: StrategyMode,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions { budget: Budget::default(), max_denominator: 1_000_000, mode: StrategyMode::Standard }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeStatus {
    VerifiedMinimal,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReachMode {
    Exact,
    Limit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Perron,
    Vertex(usize),
}

/// How w_T was obtained: start from `source`, apply 1+s_`operator`, then
/// (for limits) iterate A_Tᵗ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub source: Source,
    pub operator: Option<usize>,
    pub limit: Option<Vec<usize>>,
    pub mode: ReachMode,
}

#[derive(Clone, Debug)]
pub struct ConeReport {
    pub shape: Partition,
    pub tableaux: Vec<StandardTableau>,
    /// `(vertex, witness)` in the order reached.
    pub reached: Vec<(usize, Witness)>,
    pub unreached: Vec<usize>,
    pub status: ConeStatus,
}

impl ConeReport {
    pub fn word(&self, w: &Witness) -> Vec<String> {
        let mut out = vec![match w.source {
            Source::Perron => "perron".to_string(),
            Source::Vertex(v) => format!("w[{}]", self.tableaux[v]),
        }];
        if let Some(s) = w.operator {
            out.push(format!("s{s}"));
        }
        if let Some(dc) = &w.limit {
            let ops: Vec<String> = dc.iter().map(|i| format!("s{i}")).collect();
            out.push(format!("limit({})", ops.join(",")));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lambda": self.shape.to_string(),
            "status": match self.status {
                ConeStatus::VerifiedMinimal => "verified_minimal",
                ConeStatus::Failed => "failed",
            },
            "reached": self.reached.iter().map(|(v, w)| json!({
                "tableau": self.tableaux[*v].to_string(),
                "word": self.word(w),
                "mode": match w.mode { ReachMode::Exact => "exact", ReachMode::Limit => "limit" },
            })).collect::<Vec<_>>(),
            "unreached": self.unreached.iter().map(|&v| self.tableaux[v].to_string()).collect::<Vec<_>>(),
        })
    }

    /// Re-run a witness in floating point and return the distance of the
    /// normalized result from w_T.
    pub fn replay(&self, family: &OperatorFamily, vertex: usize, w: &Witness, budget: Budget) -> Result<f64, ConeError> {
        let d = family.dim();
        let mut v = match w.source {
            Source::Perron => averaging_perron(family, budget)?.0,
            Source::Vertex(u) => unit(d, u),
        };
        if let Some(s) = w.operator {
            v = &family.floats[s - 1] * v;
        }
        if let Some(dc) = &w.limit {
            v = power_converge(&product_float(dc, family), &v, budget)?;
        }
        normalize(&mut v);
        Ok((v - unit(d, vertex)).norm())
    }
}

fn unit(d: usize, k: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[k] = 1.0;
    v
}

pub fn minimal_cone_strategy(shape: &Partition, opts: StrategyOptions) -> Result<ConeReport, ConeError> {
    let (family, tableaux) = OperatorFamily::dual_kl(shape)?;
    strategy_on_family(shape, &family, tableaux, opts)
}

struct LimitCache<'a> {
    family: &'a OperatorFamily,
    projectors: HashMap<Vec<usize>, Option<DMatrix<f64>>>,
}

impl LimitCache<'_> {
    fn projector(&mut self, dc: &[usize]) -> Option<&DMatrix<f64>> {
        let family = self.family;
        self.projectors
            .entry(dc.to_vec())
            .or_insert_with(|| limit_projector(&product_float(dc, family), 2f64.powi(dc.len() as i32)))
            .as_ref()
    }
}

/// Does A^n v/|A^n v| converge to e_target, with A = A_Tᵗ for D^c = `dc`?
/// The projector screens; the limit is then snapped, certified exactly as a
/// 2^k-eigenvector, and confirmed by raw power iteration.
fn limit_hits(
    cache: &mut LimitCache,
    dc: &[usize],
    v: &DVector<f64>,
    target: usize,
    opts: &StrategyOptions,
) -> bool {
    let Some(p) = cache.projector(dc) else { return false };
    let w = p * v;
    let scale = w.amax();
    if scale <= 1e-9 * v.amax() {
        return false;
    }
    let snapped: Option<Vec<Rational>> =
        w.iter().map(|x| snap_to_rational(x / scale, opts.max_denominator)).collect();
    let Some(snapped) = snapped else { return false };
    let support: Vec<usize> = (0..snapped.len()).filter(|&k| !snapped[k].is_zero()).collect();
    if support != [target] || !snapped[target].is_positive() {
        return false;
    }
    let mut e = vec![Rational::zero(); snapped.len()];
    e[target] = Rational::one();
    let image = product_apply_exact(dc, cache.family, &e);
    let top = rat(1i64 << dc.len());
    if image.iter().enumerate().any(|(k, x)| *x != if k == target { top.clone() } else { Rational::zero() }) {
        return false;
    }
    let a = product_float(dc, cache.family);
    match power_converge(&a, v, opts.budget) {
        Ok(x) => (x.abs() - unit(v.len(), target)).amax() <= 1e-8,
        Err(_) => false,
    }
}

pub fn strategy_on_family(
    shape: &Partition,
    family: &OperatorFamily,
    tableaux: Vec<StandardTableau>,
    opts: StrategyOptions,
) -> Result<ConeReport, ConeError> {
    let d = tableaux.len();
    let dcs: Vec<Vec<usize>> = tableaux.iter().map(StandardTableau::descent_complement).collect();
    let mut reached: Vec<Option<Witness>> = vec![None; d];
    let mut order: Vec<usize> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut cache = LimitCache { family, projectors: HashMap::new() };

    if d == 1 {
        let w = Witness { source: Source::Perron, operator: None, limit: None, mode: ReachMode::Exact };
        return Ok(ConeReport {
            shape: shape.clone(),
            tableaux,
            reached: vec![(0, w)],
            unreached: vec![],
            status: ConeStatus::VerifiedMinimal,
        });
    }

    // step (1): seeds
    let seeds: Vec<usize> = match opts.mode {
        StrategyMode::Standard => (0..d)
            .filter(|&t| {
                let own: BTreeSet<usize> = dcs[t].iter().copied().collect();
                !(0..d).any(|u| {
                    let other: BTreeSet<usize> = dcs[u].iter().copied().collect();
                    own.is_subset(&other) && own.len() < other.len()
                })
            })
            .collect(),
        StrategyMode::LastTableau => vec![d - 1],
    };
    let (perron, _) = averaging_perron(family, opts.budget)?;
    for &t in &seeds {
        for target in 0..d {
            if reached[target].is_none() && limit_hits(&mut cache, &dcs[t], &perron, target, &opts) {
                reached[target] = Some(Witness {
                    source: Source::Perron,
                    operator: None,
                    limit: Some(dcs[t].clone()),
                    mode: ReachMode::Limit,
                });
                order.push(target);
                queue.push_back(target);
            }
        }
    }

    // step (2): breadth first over (reached T, s)
    while let Some(t) = queue.pop_front() {
        for s in 1..=family.len() {
            let mut e = vec![Rational::zero(); d];
            e[t] = Rational::one();
            let v = family.mats[s - 1].mul_vec(&e);
            let support: Vec<usize> = (0..d).filter(|&k| !v[k].is_zero()).collect();
            if support.is_empty() {
                continue;
            }
            let candidates: Vec<usize> = match opts.mode {
                StrategyMode::Standard => (0..d).filter(|&k| reached[k].is_none()).collect(),
                StrategyMode::LastTableau => {
                    support.iter().copied().filter(|&k| k < t && reached[k].is_none()).collect()
                }
            };
            if candidates.is_empty() {
                continue;
            }
            if support.len() == 1 && candidates.contains(&support[0]) {
                let target = support[0];
                reached[target] =
                    Some(Witness { source: Source::Vertex(t), operator: Some(s), limit: None, mode: ReachMode::Exact });
                order.push(target);
                queue.push_back(target);
                continue;
            }
            let vf = DVector::from_iterator(d, v.iter().map(crate::rational::to_f64));
            for target in candidates {
                if reached[target].is_none() && limit_hits(&mut cache, &dcs[target], &vf, target, &opts) {
                    reached[target] = Some(Witness {
                        source: Source::Vertex(t),
                        operator: Some(s),
                        limit: Some(dcs[target].clone()),
                        mode: ReachMode::Limit,
                    });
                    order.push(target);
                    queue.push_back(target);
                }
            }
        }
    }

    let unreached: Vec<usize> = (0..d).filter(|&k| reached[k].is_none()).collect();
    let status = if unreached.is_empty() { ConeStatus::VerifiedMinimal } else { ConeStatus::Failed };
    let reached = order.into_iter().map(|k| (k, reached[k].clone().unwrap())).collect();
    Ok(ConeReport { shape: shape.clone(), tableaux, reached, unreached, status })
}

/// The (4,4,1) certificate cone: all w_T except w_14, plus w_14+w_44 and
/// w_14+w_84 (1-based indices in last letter order).
pub fn augmented_cone(d: usize, missing: usize, partners: &[usize]) -> PolyhedralCone {
    let e = |k: usize| {
        let mut v = vec![Rational::zero(); d];
        v[k] = Rational::one();
        v
    };
    let mut gens: Vec<Vec<Rational>> = (0..d).filter(|&k| k != missing).map(e).collect();
    for &p in partners {
        let mut v = e(missing);
        v[p] = Rational::one();
        gens.push(v);
    }
    PolyhedralCone::new(gens)
}

/// Convenience: Std(λ) paired with the dual KL family.
pub fn tableaux_and_family(shape: &Partition) -> Result<(Vec<StandardTableau>, OperatorFamily), ConeError> {
    let (f, t) = OperatorFamily::dual_kl(shape)?;
    debug_assert_eq!(t, standard_tableaux(shape));
    Ok((t, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn two_one_perron() {
        let (f, _) = OperatorFamily::dual_kl(&shape(&[2, 1])).unwrap();
        let (v, rho) = averaging_perron(&f, Budget::default()).unwrap();
        assert!((rho - 1.5).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12 && v[0] > 0.0);
    }

    #[test]
    fn power_converge_identity() {
        let a = DMatrix::identity(3, 3) * 2.0;
        let v = DVector::from_vec(vec![3.0, 0.0, 4.0]);
        let x = power_converge(&a, &v, Budget::default()).unwrap();
        assert!((x - DVector::from_vec(vec![0.6, 0.0, 0.8])).norm() < 1e-12);
    }

    #[test]
    fn line_orthant_intervals() {
        let c0 = vec![rat(1), rat(-1)];
        assert!(line_meets_orthant(&c0, &[rat(1), rat(-1)]));
        assert!(!line_meets_orthant(&[rat(1), rat(-2)], &[rat(1), rat(-1)]));
        assert!(!line_meets_orthant(&c0, &[rat(0), rat(0)]));
    }

    #[test]
    fn orthant_is_invariant_under_nonnegative_family() {
        let (f, _) = OperatorFamily::dual_kl(&shape(&[3, 2])).unwrap();
        let cone = PolyhedralCone::from_columns(&RationalMatrix::identity(5));
        assert!(cone.is_pointed());
        assert!(invariance_check(&cone, &f).unwrap());
        assert!(f.irreducibility_precheck(1));
    }
}
