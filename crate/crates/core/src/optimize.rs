//! Trace optimization over unitriangular base changes A with A⁻¹A_sA ≥ 0.
//!
//! f(A) = Tr(AᵗGA). The minimum is the seminormal base change (exact, via
//! LDLᵗ). The maximum is searched numerically on the bilinear form
//! A_sA = AP_s, P_s ≥ 0 with an augmented Lagrangian.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::rational::{rat, to_f64, Rational, RationalMatrix};
use crate::specht::{SpechtBundle, SpechtError};
use crate::tableaux::Partition;

#[derive(thiserror::Error, Debug)]
pub enum OptError {
    #[error("A is singular")]
    SingularA,
    #[error("no start reached a feasible point (best residual {0:e})")]
    NoFeasibleStart(f64),
    #[error("({n},1) needs n >= 2")]
    NotReflection { n: usize },
    #[error(transparent)]
    Specht(#[from] SpechtError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Min,
    Max,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Min => "min",
            Mode::Max => "max",
        }
    }
}

pub fn objective(a: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    (a.transpose() * g * a).trace()
}

pub fn objective_exact(a: &RationalMatrix, g: &RationalMatrix) -> Rational {
    a.transpose().mul(g).mul(a).trace()
}

/// Strict upper triangle of 2GA; the other entries are zero.
pub fn gradient(a: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    strict_upper(&(g * a * 2.0))
}

fn strict_upper(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i < j { m[(i, j)] } else { 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feasibility {
    /// max(0, −min entry of A⁻¹A_sA) over all s.
    pub residual: f64,
    /// (s, i, j) of the most negative entry, 0-based.
    pub worst: Option<(usize, usize, usize)>,
}

pub fn conjugates(a: &DMatrix<f64>, ops: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>, OptError> {
    let inv = a.clone().try_inverse().ok_or(OptError::SingularA)?;
    Ok(ops.iter().map(|s| &inv * s * a).collect())
}

pub fn feasibility(a: &DMatrix<f64>, ops: &[DMatrix<f64>]) -> Result<Feasibility, OptError> {
    let mut out = Feasibility { residual: 0.0, worst: None };
    let mut lowest = 0.0;
    for (s, m) in conjugates(a, ops)?.iter().enumerate() {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] < lowest {
                    lowest = m[(i, j)];
                    out.worst = Some((s, i, j));
                }
            }
        }
    }
    out.residual = -lowest;
    Ok(out)
}

/// Exact feasibility: the most negative entry of A⁻¹A_sA, if any.
pub fn feasibility_exact(a: &RationalMatrix, ops: &[RationalMatrix]) -> Result<Option<(Rational, usize, usize, usize)>, OptError> {
    let inv = a.inverse().ok_or(OptError::SingularA)?;
    let mut worst: Option<(Rational, usize, usize, usize)> = None;
    for (s, op) in ops.iter().enumerate() {
        if let Some((v, i, j)) = inv.mul(op).mul(a).min_entry() {
            if v < Rational::zero() && worst.as_ref().map_or(true, |w| v < w.0) {
                worst = Some((v, s, i, j));
            }
        }
    }
    Ok(worst)
}

/// ‖A_sA − AP_s‖_∞ over all s.
pub fn equality_residual(a: &DMatrix<f64>, p: &[DMatrix<f64>], ops: &[DMatrix<f64>]) -> f64 {
    ops.iter().zip(p).map(|(s, ps)| (s * a - a * ps).amax()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct FeasiblePoint {
    pub a: DMatrix<f64>,
    pub p: Vec<DMatrix<f64>>,
    pub residual: f64,
}

impl FeasiblePoint {
    fn at(a: DMatrix<f64>, ops: &[DMatrix<f64>]) -> Result<Self, OptError> {
        let p: Vec<DMatrix<f64>> = conjugates(&a, ops)?.into_iter().map(|m| m.map(|x| x.max(0.0))).collect();
        let residual = feasibility(&a, ops)?.residual;
        Ok(FeasiblePoint { a, p, residual })
    }
}

#[derive(Clone, Debug)]
pub struct LocalMaximum {
    pub objective: f64,
    pub a: DMatrix<f64>,
    /// Start indices that ended here.
    pub starts: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub shape: Partition,
    pub mode: Mode,
    pub point: FeasiblePoint,
    pub objective: f64,
    pub a_exact: Option<RationalMatrix>,
    pub objective_exact: Option<Rational>,
    pub starts: usize,
    /// Feasible, KKT-certified and off the search box.
    pub converged: bool,
    /// Starts that produced a certified point.
    pub certified_starts: usize,
    /// (s, i, j) with (A⁻¹A_sA)_{ij} = 0 at the optimum.
    pub active: Vec<(usize, usize, usize)>,
    pub local_maxima: Vec<LocalMaximum>,
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<f64>>()).collect::<Vec<_>>())
}

impl OptResult {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "lambda": self.shape.to_string(),
            "mode": self.mode.as_str(),
            "objective": self.objective,
            "A": matrix_json(&self.point.a),
            "residual": self.point.residual,
            "starts": self.starts,
            "converged": self.converged,
            "certified_starts": self.certified_starts,
            "active": self.active.iter().map(|&(s, i, j)| json!([s + 1, i + 1, j + 1])).collect::<Vec<_>>(),
            "local_maxima": self.local_maxima.iter().map(|m| json!({
                "objective": m.objective,
                "A": matrix_json(&m.a),
                "starts": m.starts,
            })).collect::<Vec<_>>(),
        });
        if let (Some(a), Some(f)) = (&self.a_exact, &self.objective_exact) {
            v["A_exact"] = json!(a.to_strings());
            v["objective_exact"] = json!(crate::rational::rational_to_string(f));
        }
        v
    }
}

fn active_set(a: &DMatrix<f64>, ops: &[DMatrix<f64>], tol: f64) -> Vec<(usize, usize, usize)> {
    let Ok(ms) = conjugates(a, ops) else { return Vec::new() };
    let mut out = Vec::new();
    for (s, m) in ms.iter().enumerate() {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].abs() <= tol {
                    out.push((s, i, j));
                }
            }
        }
    }
    out
}

/// The minimizer: A_sn = (Lᵗ)⁻¹ from G = LDLᵗ. Certified feasible exactly.
pub fn minimize_trace(bundle: &SpechtBundle) -> Result<OptResult, OptError> {
    let a = bundle.a_sn.clone();
    if feasibility_exact(&a, &bundle.ops)?.is_some() {
        return Err(OptError::NoFeasibleStart(f64::NAN));
    }
    let ops: Vec<DMatrix<f64>> = bundle.ops.iter().map(RationalMatrix::to_f64).collect();
    let af = a.to_f64();
    let f = objective_exact(&a, &bundle.gram);
    let active = active_set(&af, &ops, 1e-12);
    Ok(OptResult {
        shape: bundle.shape.clone(),
        mode: Mode::Min,
        objective: to_f64(&f),
        point: FeasiblePoint::at(af, &ops)?,
        a_exact: Some(a),
        objective_exact: Some(f),
        starts: 1,
        converged: true,
        certified_starts: 1,
        active,
        local_maxima: Vec::new(),
    })
}

/// Unconstrained descent from A = I by conjugate gradients on the strict
/// upper entries. The Hessian is X ↦ strict upper of 2GX.
pub fn descend_from_identity(g: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = g.nrows();
    let mut a = DMatrix::<f64>::identity(d, d);
    let mut r = -gradient(&a, g);
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    for _ in 0..d * d + 1 {
        if rr.sqrt() <= tol {
            break;
        }
        let hp = strict_upper(&(g * &p * 2.0));
        let alpha = rr / p.dot(&hp);
        a += &p * alpha;
        r -= &hp * alpha;
        let next = r.norm_squared();
        p = &r + &p * (next / rr);
        rr = next;
    }
    a
}

#[derive(Clone, Debug)]
pub struct MaxOptions {
    pub starts: usize,
    pub seed: u64,
    pub outer_iters: usize,
    /// Projected-gradient steps per outer iteration. Stationarity is
    /// measured relative to max(1, ‖∇f‖_∞).
    pub inner_iters: usize,
    pub rho0: f64,
    pub rho_growth: f64,
    pub feas_tol: f64,
    pub eq_tol: f64,
    pub grad_tol: f64,
    pub gap: f64,
    /// Steps of projected-gradient ascent on the exactly feasible set.
    pub refine_iters: usize,
    /// Perturbed restarts around each certified point.
    pub kicks: usize,
    /// Box |A_uw| ≤ box_factor·(1 + max|entry| of A_kl, A_sn) on the free
    /// entries. The penalized problem is unbounded without it.
    pub box_factor: f64,
    /// Optional sparsity pattern for P_s: `mask[s][(i,j)] == false` pins the
    /// entry to zero.
    pub p_mask: Option<Vec<DMatrix<bool>>>,
}

impl Default for MaxOptions {
    fn default() -> Self {
        MaxOptions {
            starts: 8,
            seed: 0,
            outer_iters: 40,
            inner_iters: 4000,
            rho0: 10.0,
            rho_growth: 10.0,
            feas_tol: 1e-9,
            eq_tol: 1e-8,
            grad_tol: 1e-8,
            gap: 1e-6,
            kicks: 2,
            refine_iters: 500,
            box_factor: 4.0,
            p_mask: None,
        }
    }
}

struct Problem<'a> {
    g: &'a DMatrix<f64>,
    ops: &'a [DMatrix<f64>],
    mask: Option<&'a [DMatrix<bool>]>,
    bound: f64,
}

#[derive(Clone)]
struct State {
    a: DMatrix<f64>,
    p: Vec<DMatrix<f64>>,
}

impl State {
    fn dot(&self, o: &State) -> f64 {
        self.a.dot(&o.a) + self.p.iter().zip(&o.p).map(|(x, y)| x.dot(y)).sum::<f64>()
    }

    fn axpy(&self, t: f64, o: &State) -> State {
        State {
            a: &self.a + &o.a * t,
            p: self.p.iter().zip(&o.p).map(|(x, y)| x + y * t).collect(),
        }
    }

    fn sub(&self, o: &State) -> State {
        self.axpy(-1.0, o)
    }

    fn amax(&self) -> f64 {
        self.p.iter().map(DMatrix::amax).fold(self.a.amax(), f64::max)
    }
}

impl Problem<'_> {
    fn project(&self, x: &mut State) {
        let d = x.a.nrows();
        for i in 0..d {
            for j in 0..d {
                x.a[(i, j)] = match i.cmp(&j) {
                    std::cmp::Ordering::Less => x.a[(i, j)].clamp(-self.bound, self.bound),
                    std::cmp::Ordering::Equal => 1.0,
                    std::cmp::Ordering::Greater => 0.0,
                };
            }
        }
        for (s, p) in x.p.iter_mut().enumerate() {
            for j in 0..d {
                for i in 0..d {
                    let pinned = self.mask.is_some_and(|m| !m[s][(i, j)]);
                    if pinned || p[(i, j)] < 0.0 {
                        p[(i, j)] = 0.0;
                    }
                }
            }
        }
    }

    fn constraints(&self, x: &State) -> Vec<DMatrix<f64>> {
        self.ops.iter().zip(&x.p).map(|(s, p)| s * &x.a - &x.a * p).collect()
    }

    /// Φ = −f + Σ⟨Λ_s, C_s⟩ + ρ/2 Σ‖C_s‖².
    fn merit(&self, x: &State, lam: &[DMatrix<f64>], rho: f64) -> f64 {
        let c = self.constraints(x);
        let mut v = -objective(&x.a, self.g);
        for (l, c) in lam.iter().zip(&c) {
            v += l.dot(c) + 0.5 * rho * c.norm_squared();
        }
        v
    }

    fn merit_gradient(&self, x: &State, lam: &[DMatrix<f64>], rho: f64) -> State {
        let c = self.constraints(x);
        let mut ga = -(self.g * &x.a * 2.0);
        let mut gp = Vec::with_capacity(self.ops.len());
        for ((s, p), (l, c)) in self.ops.iter().zip(&x.p).zip(lam.iter().zip(&c)) {
            let lt = l + c * rho;
            ga += s.transpose() * &lt - &lt * p.transpose();
            gp.push(-(x.a.transpose() * &lt));
        }
        State { a: strict_upper(&ga), p: gp }
    }

    fn projected_gradient_norm(&self, x: &State, grad: &State) -> f64 {
        let mut y = x.axpy(-1.0, grad);
        self.project(&mut y);
        y.sub(x).amax()
    }

    /// Spectral projected gradient with Armijo backtracking.
    fn inner(&self, x: &mut State, lam: &[DMatrix<f64>], rho: f64, iters: usize, tol: f64) -> bool {
        let mut grad = self.merit_gradient(x, lam, rho);
        let mut phi = self.merit(x, lam, rho);
        let mut step = 1.0 / (1.0 + rho);
        for _ in 0..iters {
            if self.projected_gradient_norm(x, &grad) <= tol {
                return true;
            }
            let mut t = step;
            let (next, next_phi) = loop {
                let mut y = x.axpy(-t, &grad);
                self.project(&mut y);
                let dy = y.sub(x);
                let y_phi = self.merit(&y, lam, rho);
                if y_phi <= phi + 1e-4 * grad.dot(&dy) || t < 1e-16 {
                    break (y, y_phi);
                }
                t *= 0.5;
            };
            let next_grad = self.merit_gradient(&next, lam, rho);
            let s = next.sub(x);
            let yv = next_grad.sub(&grad);
            let sy = s.dot(&yv);
            step = if sy > 0.0 { (s.dot(&s) / sy).clamp(1e-12, 1e6) } else { 1.0 / (1.0 + rho) };
            *x = next;
            grad = next_grad;
            phi = next_phi;
            if !phi.is_finite() || x.amax() > 1e8 {
                return false;
            }
        }
        self.projected_gradient_norm(x, &grad) <= tol
    }
}

/// d(A⁻¹A_sA)_{ij}/dA_{uw} = (A⁻¹A_s)_{iu}δ_{jw} − (A⁻¹)_{iu}(A⁻¹A_sA)_{wj}.
pub fn constraint_gradient(a: &DMatrix<f64>, op: &DMatrix<f64>, u: usize, w: usize) -> Result<DMatrix<f64>, OptError> {
    let inv = a.clone().try_inverse().ok_or(OptError::SingularA)?;
    let e = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| if (i, j) == (u, w) { 1.0 } else { 0.0 });
    Ok(&inv * op * &e - &inv * &e * &inv * op * a)
}

fn free_entries(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|u| (u + 1..d).map(move |w| (u, w))).collect()
}

/// Rows: the listed constraints (s, i, j); columns: the free entries (u, w).
fn constraint_jacobian(
    a: &DMatrix<f64>,
    ops: &[DMatrix<f64>],
    rows: &[(usize, usize, usize)],
    free: &[(usize, usize)],
) -> Option<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
    let inv = a.clone().try_inverse()?;
    let bs: Vec<DMatrix<f64>> = ops.iter().map(|s| &inv * s).collect();
    let ms: Vec<DMatrix<f64>> = bs.iter().map(|b| b * a).collect();
    let jac = DMatrix::from_fn(rows.len(), free.len(), |r, c| {
        let (s, i, j) = rows[r];
        let (u, w) = free[c];
        let first = if j == w { bs[s][(i, u)] } else { 0.0 };
        first - inv[(i, u)] * ms[s][(w, j)]
    });
    Some((jac, ms))
}

/// Newton steps pushing the near-zero entries of A⁻¹A_sA to exactly zero
/// with minimum-norm moves of the strict upper entries of A.
fn polish(a: &DMatrix<f64>, ops: &[DMatrix<f64>], zero_tol: f64) -> DMatrix<f64> {
    restore(a, ops, &active_set(a, ops, zero_tol))
}

fn restore(a: &DMatrix<f64>, ops: &[DMatrix<f64>], zeros: &[(usize, usize, usize)]) -> DMatrix<f64> {
    let free = free_entries(a.nrows());
    if free.is_empty() || zeros.is_empty() {
        return a.clone();
    }
    let mut x = a.clone();
    for _ in 0..8 {
        let Some((jac, ms)) = constraint_jacobian(&x, ops, zeros, &free) else { break };
        let rhs = nalgebra::DVector::from_iterator(zeros.len(), zeros.iter().map(|&(s, i, j)| -ms[s][(i, j)]));
        if rhs.amax() < 1e-15 {
            break;
        }
        let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-12) else { break };
        for (c, &(u, w)) in free.iter().enumerate() {
            x[(u, w)] += step[c];
        }
    }
    x
}

/// Projection of ∇f onto the tangent cone {d : ∇C_i·d ≥ 0} of the active
/// constraints, as (direction on the free entries, the active rows, their
/// Jacobian).
fn tangent_ascent(
    a: &DMatrix<f64>,
    g: &DMatrix<f64>,
    ops: &[DMatrix<f64>],
    active_tol: f64,
) -> Option<(nalgebra::DVector<f64>, Vec<(usize, usize, usize)>, DMatrix<f64>)> {
    let free = free_entries(a.nrows());
    let grad = gradient(a, g);
    let b = nalgebra::DVector::from_iterator(free.len(), free.iter().map(|&e| grad[e]));
    let active = active_set(a, ops, active_tol);
    if active.is_empty() {
        return Some((b, active, DMatrix::zeros(0, free.len())));
    }
    let (jac, _) = constraint_jacobian(a, ops, &active, &free)?;
    let m = jac.transpose();
    let mu = nnls(&m, &(-&b));
    Some((b + m * mu, active, jac))
}

/// Ascent along the projected gradient with feasibility restored after
/// every step; stops when the projected gradient is below `tol`.
fn refine(a: &DMatrix<f64>, g: &DMatrix<f64>, ops: &[DMatrix<f64>], opts: &MaxOptions, tol: f64) -> DMatrix<f64> {
    let free = free_entries(a.nrows());
    let mut x = a.clone();
    let mut fx = objective(&x, g);
    let mut t = 1.0 / g.symmetric_eigenvalues().max().max(1.0);
    for _ in 0..opts.refine_iters {
        let Some((dir, active, jac)) = tangent_ascent(&x, g, ops, 1e-9) else { break };
        if dir.amax() <= tol {
            break;
        }
        let slope = &jac * &dir;
        let tight: Vec<(usize, usize, usize)> =
            active.iter().zip(slope.iter()).filter(|(_, v)| **v <= 1e-12 * dir.norm()).map(|(r, _)| *r).collect();
        let mut accepted = false;
        while t > 1e-14 {
            let mut y = x.clone();
            for (c, &e) in free.iter().enumerate() {
                y[e] += t * dir[c];
            }
            let mut zeros = tight.clone();
            if let Ok(ms) = conjugates(&y, ops) {
                for (s, m) in ms.iter().enumerate() {
                    for i in 0..m.nrows() {
                        for j in 0..m.ncols() {
                            if m[(i, j)] < 0.0 && !zeros.contains(&(s, i, j)) {
                                zeros.push((s, i, j));
                            }
                        }
                    }
                }
            }
            let y = restore(&y, ops, &zeros);
            let fy = objective(&y, g);
            if fy > fx && feasibility(&y, ops).is_ok_and(|f| f.residual <= opts.feas_tol) {
                x = y;
                fx = fy;
                t *= 2.0;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

/// Lawson–Hanson non-negative least squares: argmin ‖Mx − b‖ over x ≥ 0.
pub fn nnls(m: &DMatrix<f64>, b: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
    let n = m.ncols();
    let mut x = nalgebra::DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * m.amax().max(1.0) * b.amax().max(1.0);
    let solve = |passive: &[bool]| -> nalgebra::DVector<f64> {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(m.nrows(), cols.len(), |i, k| m[(i, cols[k])]);
        let z = sub.svd(true, true).solve(b, 1e-13).expect("svd has both factors");
        let mut full = nalgebra::DVector::zeros(n);
        for (k, &j) in cols.iter().enumerate() {
            full[j] = z[k];
        }
        full
    };
    for _ in 0..3 * n + 10 {
        let w = m.transpose() * (b - m * &x);
        let Some(enter) = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j])) else {
            break;
        };
        passive[enter] = true;
        loop {
            let z = solve(&passive);
            if (0..n).all(|j| !passive[j] || z[j] > 0.0) {
                x = z;
                break;
            }
            let alpha = (0..n)
                .filter(|&j| passive[j] && z[j] <= 0.0)
                .map(|j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= tol {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    x
}

/// First-order certificate for a local maximum: min over μ ≥ 0 of
/// ‖∇f + Σ μ ∇C‖_∞ on the free entries, with C ranging over the entries of
/// A⁻¹A_sA within `active_tol` of zero.
pub fn kkt_stationarity(a: &DMatrix<f64>, g: &DMatrix<f64>, ops: &[DMatrix<f64>], active_tol: f64) -> Result<f64, OptError> {
    let free = free_entries(a.nrows());
    if free.is_empty() {
        return Ok(0.0);
    }
    let grad = gradient(a, g);
    let b = nalgebra::DVector::from_iterator(free.len(), free.iter().map(|&e| -grad[e]));
    let active = active_set(a, ops, active_tol);
    if active.is_empty() {
        return Ok(b.amax());
    }
    let (jac, _) = constraint_jacobian(a, ops, &active, &free).ok_or(OptError::SingularA)?;
    let m = jac.transpose();
    let mu = nnls(&m, &b);
    Ok((m * mu - b).amax())
}

struct StartOutcome {
    index: usize,
    point: FeasiblePoint,
    objective: f64,
    converged: bool,
}

fn perturbed(base: &DMatrix<f64>, sigma: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let normal = rand_distr::Normal::new(0.0, sigma).expect("positive sigma");
    let mut a = base.clone();
    for u in 0..a.nrows() {
        for w in u + 1..a.ncols() {
            a[(u, w)] += rng.sample(normal);
        }
    }
    a
}

/// Start k: 0 ↦ A_kl + noise, 1 ↦ A_sn + noise, then convex combinations
/// tA_kl + (1−t)A_sn with t uniform, then wider noise around either.
fn start_point(k: usize, a_kl: &DMatrix<f64>, a_sn: &DMatrix<f64>, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
    match k % 4 {
        0 => perturbed(a_kl, 1e-2, &mut rng),
        1 => perturbed(a_sn, 1e-2, &mut rng),
        2 => {
            let t: f64 = rng.gen();
            perturbed(&(a_kl * t + a_sn * (1.0 - t)), 1e-3, &mut rng)
        }
        _ => {
            let base = if rng.gen_bool(0.5) { a_kl } else { a_sn };
            perturbed(base, 0.1, &mut rng)
        }
    }
}

fn run_start(prob: &Problem, a0: DMatrix<f64>, index: usize, opts: &MaxOptions) -> Option<StartOutcome> {
    let mut x = State { a: a0, p: Vec::new() };
    x.p = conjugates(&x.a, prob.ops).ok()?.into_iter().map(|m| m.map(|v| v.max(0.0))).collect();
    prob.project(&mut x);
    let d = x.a.nrows();
    let mut lam: Vec<DMatrix<f64>> = vec![DMatrix::zeros(d, d); prob.ops.len()];
    let scale = prob.g.symmetric_eigenvalues().max().max(1.0);
    let mut rho = opts.rho0 * scale;
    let mut prev = f64::INFINITY;
    let mut best: Option<(FeasiblePoint, f64)> = None;
    for _ in 0..opts.outer_iters {
        let gscale = gradient(&x.a, prob.g).amax().max(1.0);
        let tol = gscale * opts.grad_tol.max(0.1 * prev.min(1.0));
        prob.inner(&mut x, &lam, rho, opts.inner_iters, tol);
        if !x.a.iter().all(|v| v.is_finite()) || x.amax() > 1e8 {
            return None;
        }
        let c = prob.constraints(&x);
        let viol = c.iter().map(DMatrix::amax).fold(0.0, f64::max);
        for (l, c) in lam.iter_mut().zip(&c) {
            *l += c * rho;
        }
        if viol <= opts.eq_tol {
            let a = polish(&x.a, prob.ops, 1e-5);
            let a = refine(&a, prob.g, prob.ops, opts, opts.grad_tol * scale);
            let point = FeasiblePoint::at(a, prob.ops).ok()?;
            let kkt = kkt_stationarity(&point.a, prob.g, prob.ops, 1e-9).ok()?;
            let done = point.residual <= opts.feas_tol && kkt <= opts.grad_tol * scale;
            if point.residual <= opts.feas_tol {
                x.a = point.a.clone();
                x.p = point.p.clone();
            }
            best = Some((point, kkt));
            if done {
                break;
            }
        }
        if viol > opts.eq_tol && viol > 0.25 * prev {
            rho = (rho * opts.rho_growth).min(1e10);
        }
        prev = viol;
    }
    let (point, kkt) = match best {
        Some(b) => b,
        None => {
            let point = FeasiblePoint::at(polish(&x.a, prob.ops, 1e-5), prob.ops).ok()?;
            (point, f64::INFINITY)
        }
    };
    let objective = objective(&point.a, prob.g);
    let inside = strict_upper(&point.a).amax() < prob.bound * (1.0 - 1e-6);
    Some(StartOutcome {
        index,
        converged: inside && point.residual <= opts.feas_tol && kkt <= opts.grad_tol * scale,
        point,
        objective,
    })
}

/// A certified point is only a first-order point. Re-run the ascent from
/// small perturbations; if one of them ends higher, move there and repeat.
fn kick(prob: &Problem, mut out: StartOutcome, opts: &MaxOptions) -> StartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (out.index as u64).wrapping_mul(0xA076_1D64_78BD_642F));
    let mut tries = 0;
    while out.converged && tries < opts.kicks {
        tries += 1;
        let a0 = perturbed(&out.point.a, 1e-2, &mut rng);
        if let Some(next) = run_start(prob, a0, out.index, opts) {
            if next.converged && next.objective > out.objective + opts.gap {
                out = next;
                tries = 0;
            }
        }
    }
    out
}

/// Multi-start search for the maximum. Every start runs independently; the
/// merge orders by (objective desc, start index asc).
pub fn maximize_trace(bundle: &SpechtBundle, opts: &MaxOptions) -> Result<OptResult, OptError> {
    let g = bundle.gram.to_f64();
    let ops: Vec<DMatrix<f64>> = bundle.ops.iter().map(RationalMatrix::to_f64).collect();
    let a_kl = bundle.a_kl.to_f64();
    let a_sn = bundle.a_sn.to_f64();
    let d = bundle.dim();
    if d == 1 {
        let point = FeasiblePoint::at(DMatrix::identity(1, 1), &ops)?;
        let objective = objective(&point.a, &g);
        return Ok(OptResult {
            shape: bundle.shape.clone(),
            mode: Mode::Max,
            local_maxima: vec![LocalMaximum { objective, a: point.a.clone(), starts: vec![0] }],
            objective,
            a_exact: Some(RationalMatrix::identity(1)),
            objective_exact: Some(bundle.gram[(0, 0)].clone()),
            starts: 1,
            converged: true,
            certified_starts: 1,
            active: active_set(&point.a, &ops, 1e-9),
            point,
        });
    }
    let mask = opts.p_mask.as_deref();
    let bound = opts.box_factor * (1.0 + strict_upper(&a_kl).amax().max(strict_upper(&a_sn).amax()));
    let prob = Problem { g: &g, ops: &ops, mask, bound };
    let mut outcomes: Vec<StartOutcome> = (0..opts.starts.max(1))
        .into_par_iter()
        .filter_map(|k| {
            let first = run_start(&prob, start_point(k, &a_kl, &a_sn, opts.seed), k, opts)?;
            Some(kick(&prob, first, opts))
        })
        .collect();
    outcomes.sort_by(|x, y| y.objective.total_cmp(&x.objective).then(x.index.cmp(&y.index)));
    let best_residual = outcomes.iter().map(|o| o.point.residual).fold(f64::INFINITY, f64::min);
    let feasible: Vec<&StartOutcome> = outcomes.iter().filter(|o| o.point.residual <= opts.feas_tol).collect();
    let certified: Vec<&StartOutcome> = feasible.iter().copied().filter(|o| o.converged).collect();
    let Some(best) = certified.first().or(feasible.first()) else {
        return Err(OptError::NoFeasibleStart(best_residual));
    };
    // only KKT-certified points count as local maxima
    let mut local_maxima: Vec<LocalMaximum> = Vec::new();
    for o in &certified {
        match local_maxima.last_mut() {
            Some(m) if m.objective - o.objective <= opts.gap => m.starts.push(o.index),
            _ => local_maxima.push(LocalMaximum { objective: o.objective, a: o.point.a.clone(), starts: vec![o.index] }),
        }
    }
    Ok(OptResult {
        shape: bundle.shape.clone(),
        mode: Mode::Max,
        objective: best.objective,
        active: active_set(&best.point.a, &ops, 1e-7),
        point: best.point.clone(),
        a_exact: None,
        objective_exact: None,
        starts: opts.starts.max(1),
        converged: best.converged,
        certified_starts: certified.len(),
        local_maxima,
    })
}

/// Exact first-order sufficient test for a strict local maximum at a
/// feasible A: no d ≠ 0 on the free entries with ∇C_i·d ≥ 0 for every zero
/// entry of A⁻¹A_sA and ∇f·d ≥ 0. When it holds, f(A') < f(A) for all
/// feasible A' ≠ A near A. Returns false when A is infeasible or the test is
/// inconclusive.
pub fn strict_local_max_exact(a: &RationalMatrix, g: &RationalMatrix, ops: &[RationalMatrix]) -> Result<bool, OptError> {
    let d = a.nrows();
    let inv = a.inverse().ok_or(OptError::SingularA)?;
    let free = free_entries(d);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for op in ops {
        let b = inv.mul(op);
        let m = b.mul(a);
        for i in 0..d {
            for j in 0..d {
                if m[(i, j)] < Rational::zero() {
                    return Ok(false);
                }
                if m[(i, j)].is_zero() {
                    rows.push(
                        free.iter()
                            .map(|&(u, w)| {
                                let first = if j == w { b[(i, u)].clone() } else { Rational::zero() };
                                first - &inv[(i, u)] * &m[(w, j)]
                            })
                            .collect(),
                    );
                }
            }
        }
    }
    if free.is_empty() {
        return Ok(true);
    }
    let grad = g.mul(a);
    rows.push(free.iter().map(|&(u, w)| rat(2) * &grad[(u, w)]).collect());
    let r = RationalMatrix::from_fn(rows.len(), free.len(), |i, j| rows[i][j].clone());
    if r.rank() < free.len() {
        return Ok(false);
    }
    // R(d⁺ − d⁻) − σ = 0, Σσ = 1 with d⁺, d⁻, σ ≥ 0 is solvable iff a
    // nonzero d exists (R has full column rank).
    let (k, m) = (rows.len(), free.len());
    let mut lp: Vec<Vec<Rational>> = Vec::with_capacity(k + 1);
    for (i, row) in rows.iter().enumerate() {
        let mut l: Vec<Rational> = row.clone();
        l.extend(row.iter().map(|x| -x));
        l.extend((0..k).map(|t| if t == i { -Rational::one() } else { Rational::zero() }));
        lp.push(l);
    }
    let mut last = vec![Rational::zero(); 2 * m];
    last.extend((0..k).map(|_| Rational::one()));
    lp.push(last);
    let mut rhs = vec![Rational::zero(); k];
    rhs.push(Rational::one());
    Ok(crate::lp::nonnegative_solution(&lp, &rhs, 2 * m + k).is_none())
}

#[derive(Clone, Debug)]
pub struct KktReport {
    pub residual: Rational,
    /// (s, i, j, μ), 0-based, nonzero multipliers only.
    pub multipliers: Vec<(usize, usize, usize, Rational)>,
}

/// Stationarity at A = I for λ = (n,1) in KL coordinates: the objective is
/// Tr(AᵗG̃A) with G̃ = A_klᵗGA_kl and the constraints are A⁻¹K_sA ≥ 0.
/// The multipliers are μ = 1 on the entry (i−1, i) of the constraint for
/// s_{i+1}, i = 1..n−1, and 0 elsewhere. Returns the largest entry of
/// ∇f̃ + Σ μ∇C over the strict upper triangle.
pub fn kkt_residual(n: usize) -> Result<KktReport, OptError> {
    if n < 2 {
        return Err(OptError::NotReflection { n });
    }
    let shape = Partition::new(vec![n, 1]).expect("valid partition");
    let bundle = SpechtBundle::new(&shape)?;
    let d = bundle.dim();
    let gt = bundle.a_kl.transpose().mul(&bundle.gram).mul(&bundle.a_kl);
    let multipliers: Vec<(usize, usize, usize, Rational)> = (1..d).map(|i| (i, i - 1, i, Rational::one())).collect();
    let mut residual = Rational::zero();
    for u in 0..d {
        for w in u + 1..d {
            // ∇f̃ + Σμ∇C_s(I)[E_uw], with ∇C_s(I)[E_uw] = K_sE_uw − E_uwK_s
            let mut r = rat(2) * &gt[(u, w)];
            for (s, i, j, mu) in &multipliers {
                let k = &bundle.kl_ops[*s];
                let mut entry = Rational::zero();
                if *j == w {
                    entry += &k[(*i, u)];
                }
                if *i == u {
                    entry -= &k[(w, *j)];
                }
                r += mu * entry;
            }
            if r.clone().abs() > residual {
                residual = r.abs();
            }
        }
    }
    Ok(KktReport { residual, multipliers })
}

/// det(G_A)/Π(G_A)_{ii} for G_A = AᵗGA; the square of the normalized volume.
pub fn normalized_volume_squared(a: &RationalMatrix, g: &RationalMatrix) -> Rational {
    let ga = a.transpose().mul(g).mul(a);
    let mut prod = Rational::one();
    for i in 0..ga.nrows() {
        prod *= &ga[(i, i)];
    }
    ga.determinant() / prod
}

pub fn normalized_volume(a: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let ga = a.transpose() * g * a;
    let prod: f64 = (0..ga.nrows()).map(|i| ga[(i, i)]).product();
    (ga.determinant() / prod).sqrt()
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub samples: usize,
    pub accepted: usize,
    /// Observed [min, max] of each strict upper entry (u, w).
    pub ranges: Vec<((usize, usize), f64, f64)>,
    pub max_column_norm: f64,
}

impl ProbeReport {
    pub fn range(&self, u: usize, w: usize) -> Option<(f64, f64)> {
        self.ranges.iter().find(|r| r.0 == (u, w)).map(|r| (r.1, r.2))
    }
}

fn max_column_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Hit-and-run inside {A : residual(A) ≤ tol}: from the current point pick a
/// random direction in the strict upper triangle, locate the chord ends by
/// doubling and bisection, record them, and move to a uniform point of the
/// chord. Only corroborates boundedness; chords that leave and re-enter the
/// region are cut at the first exit.
pub fn feasible_region_probe(bundle: &SpechtBundle, samples: usize, seed: u64, tol: f64) -> Result<ProbeReport, OptError> {
    let ops: Vec<DMatrix<f64>> = bundle.ops.iter().map(RationalMatrix::to_f64).collect();
    let d = bundle.dim();
    let free: Vec<(usize, usize)> = (0..d).flat_map(|u| (u + 1..d).map(move |w| (u, w))).collect();
    let mid = (bundle.a_kl.to_f64() + bundle.a_sn.to_f64()) * 0.5;
    let ok = |a: &DMatrix<f64>| feasibility(a, &ops).is_ok_and(|f| f.residual <= tol);
    let mut x = if ok(&mid) { mid } else { bundle.a_kl.to_f64() };
    let mut report = ProbeReport {
        samples,
        accepted: 1,
        ranges: free.iter().map(|&(u, w)| ((u, w), x[(u, w)], x[(u, w)])).collect(),
        max_column_norm: max_column_norm(&x),
    };
    if free.is_empty() {
        return Ok(report);
    }
    let record = |a: &DMatrix<f64>, report: &mut ProbeReport| {
        for r in report.ranges.iter_mut() {
            let v = a[r.0];
            r.1 = r.1.min(v);
            r.2 = r.2.max(v);
        }
        report.max_column_norm = report.max_column_norm.max(max_column_norm(a));
        report.accepted += 1;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr::StandardNormal;
    for _ in 0..samples {
        let mut dir = DMatrix::<f64>::zeros(d, d);
        for &(u, w) in &free {
            dir[(u, w)] = rng.sample::<f64, _>(normal);
        }
        dir /= dir.norm();
        let reach = |sign: f64| -> f64 {
            let mut lo = 0.0;
            let mut hi = 1e-3;
            while hi < 1e4 && ok(&(&x + &dir * (sign * hi))) {
                lo = hi;
                hi *= 2.0;
            }
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if ok(&(&x + &dir * (sign * m))) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            lo
        };
        let (fwd, back) = (reach(1.0), reach(-1.0));
        let ends = [&x + &dir * fwd, &x - &dir * back];
        for e in &ends {
            record(e, &mut report);
        }
        let t: f64 = rng.gen_range(-back..=fwd);
        let y = &x + &dir * t;
        if ok(&y) {
            record(&y, &mut report);
            x = y;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn two_one() -> SpechtBundle {
        SpechtBundle::new(&Partition::new(vec![2, 1]).unwrap()).unwrap()
    }

    fn a_of(x: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, x, 0.0, 1.0])
    }

    #[test]
    fn two_one_objective_is_the_quadratic() {
        let g = two_one().gram.to_f64();
        for x in [-1.3, -1.0, -0.5, 0.0, 0.7] {
            assert!((objective(&a_of(x), &g) - (4.0 + 2.0 * x + 2.0 * x * x)).abs() < 1e-12);
        }
        assert_eq!(objective(&DMatrix::identity(2, 2), &g), g.trace());
    }

    #[test]
    fn two_one_feasible_interval() {
        let b = two_one();
        let ops: Vec<_> = b.ops.iter().map(RationalMatrix::to_f64).collect();
        assert_eq!(feasibility(&a_of(-0.75), &ops).unwrap().residual, 0.0);
        let out = feasibility(&a_of(-1.1), &ops).unwrap();
        assert!(out.residual > 0.0 && out.worst.is_some());
        assert!(feasibility(&a_of(-0.4), &ops).unwrap().residual > 0.0);
        assert!(feasibility_exact(&b.a_kl, &b.ops).unwrap().is_none());
    }

    #[test]
    fn two_one_minimum() {
        let r = minimize_trace(&two_one()).unwrap();
        assert_eq!(r.a_exact.as_ref().unwrap()[(0, 1)], ratio(-1, 2));
        assert_eq!(r.objective_exact.unwrap(), ratio(7, 2));
    }

    #[test]
    fn identity_volume_of_two_one() {
        let b = two_one();
        assert_eq!(normalized_volume_squared(&RationalMatrix::identity(2), &b.gram), ratio(3, 4));
        assert_eq!(normalized_volume_squared(&b.a_sn, &b.gram), rat(1));
    }

    #[test]
    fn singular_a_is_reported() {
        let ops = vec![DMatrix::<f64>::identity(2, 2)];
        assert!(matches!(feasibility(&DMatrix::zeros(2, 2), &ops), Err(OptError::SingularA)));
    }
}
