//! Specht modules in the polytabloid, seminormal and Kazhdan–Lusztig bases.
//!
//! Every basis is indexed by Std(λ) in last letter order, and every operator
//! is stored as the matrix of 1+s_i (index i-1).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::hecke::{cell_matrices_at_one, wgraph, HeckeError, WGraphMethod};
use crate::rational::{rat, Rational, RationalMatrix};
use crate::tableaux::{standard_tableaux, Partition, StandardTableau};

#[derive(thiserror::Error, Debug)]
pub enum SpechtError {
    #[error("intertwiner system has no unitriangular solution")]
    NoSolution,
    #[error("vector is not in the span of the standard polytabloids")]
    NotInSpan,
    #[error("malformed Specht JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// A tabloid, stored as the row index of each entry 1..n.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tabloid(pub Vec<u8>);

impl Tabloid {
    pub fn of_rows(rows: &[Vec<u8>]) -> Self {
        let n: usize = rows.iter().map(Vec::len).sum();
        let mut r = vec![0u8; n];
        for (i, row) in rows.iter().enumerate() {
            for &k in row {
                r[k as usize - 1] = i as u8;
            }
        }
        Tabloid(r)
    }

    /// s_i acting by swapping the entries i and i+1.
    pub fn swap(&self, i: usize) -> Tabloid {
        let mut r = self.0.clone();
        r.swap(i - 1, i);
        Tabloid(r)
    }
}

impl fmt::Display for Tabloid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.0.iter().copied().max().map_or(0, |m| m as usize + 1);
        let parts: Vec<String> = (0..rows)
            .map(|r| {
                self.0
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x as usize == r)
                    .map(|(k, _)| (k + 1).to_string())
                    .collect::<String>()
            })
            .collect();
        write!(f, "{{{}}}", parts.join("|"))
    }
}

/// Integer combination of tabloids.
pub type TabloidVector = BTreeMap<Tabloid, i64>;

fn signed_permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = vec![(Vec::new(), 1)];
    for m in 0..k {
        let mut next = Vec::with_capacity(out.len() * (m + 1));
        for (p, sign) in &out {
            // insert m at every slot; moving it past j entries flips sign j times
            for slot in 0..=m {
                let mut q: Vec<usize> = p.clone();
                q.insert(slot, m);
                let flips = (m - slot) as i64;
                next.push((q, if flips % 2 == 0 { *sign } else { -*sign }));
            }
        }
        out = next;
    }
    out
}

/// v_T = Σ_{σ ∈ C(T)} sgn(σ)·{σT} for any filling `rows` of a Young diagram.
pub fn polytabloid(rows: &[Vec<u8>]) -> TabloidVector {
    let ncols = rows[0].len();
    let columns: Vec<Vec<(usize, usize)>> = (0..ncols)
        .map(|c| (0..rows.len()).filter(|&r| rows[r].len() > c).map(|r| (r, c)).collect())
        .collect();
    let mut out = TabloidVector::new();
    let mut filling = rows.to_vec();
    let perms: Vec<Vec<(Vec<usize>, i64)>> = columns.iter().map(|c| signed_permutations(c.len())).collect();
    let mut choice = vec![0usize; ncols];
    loop {
        let mut sign = 1;
        for (c, cells) in columns.iter().enumerate() {
            let (p, s) = &perms[c][choice[c]];
            sign *= s;
            for (k, &(r, col)) in cells.iter().enumerate() {
                let (sr, sc) = cells[p[k]];
                filling[r][col] = rows[sr][sc];
            }
        }
        *out.entry(Tabloid::of_rows(&filling)).or_insert(0) += sign;
        let mut c = 0;
        loop {
            if c == ncols {
                out.retain(|_, v| *v != 0);
                return out;
            }
            choice[c] += 1;
            if choice[c] < perms[c].len() {
                break;
            }
            choice[c] = 0;
            c += 1;
        }
    }
}

fn act(s_index: usize, v: &TabloidVector) -> TabloidVector {
    v.iter().map(|(t, &c)| (t.swap(s_index), c)).collect()
}

fn dot(a: &TabloidVector, b: &TabloidVector) -> i64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().map(|(t, c)| c * large.get(t).copied().unwrap_or(0)).sum()
}

/// The standard polytabloids of λ with a coordinate solver.
pub struct PolytabloidBasis {
    pub shape: Partition,
    pub tableaux: Vec<StandardTableau>,
    pub vectors: Vec<TabloidVector>,
    std_tabloids: Vec<Tabloid>,
    /// Inverse of the matrix of standard polytabloids restricted to the
    /// standard tabloids.
    restricted_inverse: RationalMatrix,
}

impl PolytabloidBasis {
    pub fn new(shape: &Partition) -> Self {
        let tableaux = standard_tableaux(shape);
        let vectors: Vec<TabloidVector> = tableaux.iter().map(|t| polytabloid(t.rows())).collect();
        let std_tabloids: Vec<Tabloid> = tableaux.iter().map(|t| Tabloid::of_rows(t.rows())).collect();
        let d = tableaux.len();
        let m = RationalMatrix::from_fn(d, d, |i, j| rat(vectors[j].get(&std_tabloids[i]).copied().unwrap_or(0)));
        let restricted_inverse = m.inverse().expect("standard polytabloids are independent on standard tabloids");
        PolytabloidBasis { shape: shape.clone(), tableaux, vectors, std_tabloids, restricted_inverse }
    }

    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    /// Coordinates of `v` in the standard polytabloid basis, checked by
    /// reconstructing `v` on every tabloid.
    pub fn coordinates(&self, v: &TabloidVector) -> Result<Vec<Rational>, SpechtError> {
        let rhs: Vec<Rational> = self.std_tabloids.iter().map(|t| rat(v.get(t).copied().unwrap_or(0))).collect();
        let coords = self.restricted_inverse.mul_vec(&rhs);
        let mut recon: BTreeMap<&Tabloid, Rational> = BTreeMap::new();
        for (c, vec) in coords.iter().zip(&self.vectors) {
            if c.is_zero() {
                continue;
            }
            for (t, &a) in vec {
                *recon.entry(t).or_insert_with(Rational::zero) += c * rat(a);
            }
        }
        let consistent = recon.iter().all(|(t, c)| *c == rat(v.get(*t).copied().unwrap_or(0)))
            && v.keys().all(|t| recon.contains_key(t));
        if consistent {
            Ok(coords)
        } else {
            Err(SpechtError::NotInSpan)
        }
    }

    /// A_s: matrix of 1+s_i in the polytabloid basis.
    pub fn operator_matrices(&self) -> Vec<RationalMatrix> {
        let d = self.dim();
        (1..self.shape.n())
            .map(|i| {
                let cols: Vec<Vec<Rational>> = self
                    .vectors
                    .iter()
                    .map(|v| {
                        let mut w = act(i, v);
                        for (t, &c) in v {
                            *w.entry(t.clone()).or_insert(0) += c;
                        }
                        w.retain(|_, c| *c != 0);
                        self.coordinates(&w).expect("S^λ is S_n-stable")
                    })
                    .collect();
                let m = RationalMatrix::from_columns(&cols);
                debug_assert_eq!(m.nrows(), d);
                m
            })
            .collect()
    }

    pub fn gram_matrix(&self) -> RationalMatrix {
        let d = self.dim();
        RationalMatrix::from_fn(d, d, |i, j| rat(dot(&self.vectors[i], &self.vectors[j])))
    }

    pub fn rank_of_spanning_set(&self) -> usize {
        let mut index: HashMap<&Tabloid, usize> = HashMap::new();
        for v in &self.vectors {
            for t in v.keys() {
                let k = index.len();
                index.entry(t).or_insert(k);
            }
        }
        let m = RationalMatrix::from_fn(index.len(), self.dim(), |_, _| Rational::zero());
        let mut m = m;
        for (j, v) in self.vectors.iter().enumerate() {
            for (t, &c) in v {
                m[(index[t], j)] = rat(c);
            }
        }
        m.rank()
    }
}

pub fn operator_matrices(shape: &Partition) -> Vec<RationalMatrix> {
    PolytabloidBasis::new(shape).operator_matrices()
}

pub fn gram_matrix(shape: &Partition) -> RationalMatrix {
    PolytabloidBasis::new(shape).gram_matrix()
}

/// Young's seminormal form: matrices of 1+s_i in the basis {e_T}.
///
/// With a = a_i(T): s_i e_T = e_T (same row), −e_T (same column), and
/// otherwise s_i e_T = a⁻¹e_T + e_{s_iT} if T < s_iT, or
/// s_i e_T = a⁻¹e_T + (1 − a⁻²)e_{s_iT} if s_iT < T.
pub fn seminormal_matrices(shape: &Partition) -> Vec<RationalMatrix> {
    let tabs = standard_tableaux(shape);
    let index: HashMap<&StandardTableau, usize> = tabs.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let d = tabs.len();
    (1..shape.n())
        .map(|i| {
            let mut m = RationalMatrix::identity(d);
            for (x, t) in tabs.iter().enumerate() {
                let a = t.axial_distance(i);
                let inv = Rational::new(1.into(), a.into());
                m[(x, x)] += &inv;
                if let Some(st) = t.swap(i) {
                    let y = index[&st];
                    m[(y, x)] = if x < y { Rational::one() } else { Rational::one() - &inv * &inv };
                }
            }
            m
        })
        .collect()
}

/// Exact LDLᵗ: returns the lower unitriangular L and the diagonal of D.
pub fn ldl(g: &RationalMatrix) -> Option<(RationalMatrix, Vec<Rational>)> {
    let d = g.nrows();
    let mut l = RationalMatrix::identity(d);
    let mut diag: Vec<Rational> = Vec::with_capacity(d);
    for j in 0..d {
        let mut dj = g[(j, j)].clone();
        for k in 0..j {
            dj -= &l[(j, k)] * &l[(j, k)] * &diag[k];
        }
        if dj <= Rational::zero() {
            return None;
        }
        for i in j + 1..d {
            let mut v = g[(i, j)].clone();
            for k in 0..j {
                v -= &l[(i, k)] * &l[(j, k)] * &diag[k];
            }
            l[(i, j)] = v / &dj;
        }
        diag.push(dj);
    }
    Some((l, diag))
}

/// The unique upper unitriangular A_sn with A_snᵗ G A_sn diagonal, and that
/// diagonal.
pub fn seminormal_base_change(gram: &RationalMatrix) -> (RationalMatrix, Vec<Rational>) {
    let (l, diag) = ldl(gram).expect("Gram matrix is positive definite");
    (l.transpose().inverse().expect("unitriangular"), diag)
}

/// The upper unitriangular intertwiner X with A_s X = X K_s for all s.
///
/// X e_1 = e_1, so X ρ_K(w) e_1 = ρ_A(w) e_1 for every word w; words are
/// explored breadth first until the ρ_K(w) e_1 span the space.
pub fn kl_base_change(ops: &[RationalMatrix], kl_ops: &[RationalMatrix]) -> Result<RationalMatrix, SpechtError> {
    let d = kl_ops.first().map_or(1, RationalMatrix::nrows);
    let mut e1 = vec![Rational::zero(); d];
    e1[0] = Rational::one();
    let mut kvecs: Vec<Vec<Rational>> = vec![e1.clone()];
    let mut avecs: Vec<Vec<Rational>> = vec![e1];
    let mut echelon = RationalMatrix::from_columns(&kvecs);
    let mut frontier = 0;
    while kvecs.len() < d && frontier < kvecs.len() {
        for (a, k) in ops.iter().zip(kl_ops) {
            if kvecs.len() == d {
                break;
            }
            let kv = k.mul_vec(&kvecs[frontier]);
            let mut trial = kvecs.clone();
            trial.push(kv.clone());
            let candidate = RationalMatrix::from_columns(&trial);
            if candidate.rank() > echelon.ncols() {
                echelon = candidate;
                avecs.push(a.mul_vec(&avecs[frontier]));
                kvecs = trial;
            }
        }
        frontier += 1;
    }
    if kvecs.len() < d {
        return Err(SpechtError::NoSolution);
    }
    let k = RationalMatrix::from_columns(&kvecs);
    let p = RationalMatrix::from_columns(&avecs);
    let x = p.mul(&k.inverse().ok_or(SpechtError::NoSolution)?);
    let intertwines = ops.iter().zip(kl_ops).all(|(a, k)| a.mul(&x) == x.mul(k));
    if intertwines && x.is_upper_unitriangular() {
        Ok(x)
    } else {
        Err(SpechtError::NoSolution)
    }
}

/// Everything about S^λ in one place.
#[derive(Clone, Debug)]
pub struct SpechtBundle {
    pub shape: Partition,
    pub basis: Vec<StandardTableau>,
    /// A_s, matrices of 1+s_i on polytabloids.
    pub ops: Vec<RationalMatrix>,
    pub gram: RationalMatrix,
    pub seminormal: Vec<RationalMatrix>,
    pub a_sn: RationalMatrix,
    /// diag(A_snᵗ G A_sn).
    pub sn_norms: Vec<Rational>,
    /// K_s, matrices of 1+s_i in the KL basis.
    pub kl_ops: Vec<RationalMatrix>,
    pub a_kl: RationalMatrix,
}

impl SpechtBundle {
    pub fn new(shape: &Partition) -> Result<Self, SpechtError> {
        let basis = PolytabloidBasis::new(shape);
        let ops = basis.operator_matrices();
        let gram = basis.gram_matrix();
        let (a_sn, sn_norms) = seminormal_base_change(&gram);
        let graph = wgraph(shape, WGraphMethod::Parabolic)?;
        let kl_ops = cell_matrices_at_one(&graph).ops;
        let a_kl = kl_base_change(&ops, &kl_ops)?;
        Ok(SpechtBundle {
            shape: shape.clone(),
            basis: basis.tableaux,
            ops,
            gram,
            seminormal: seminormal_matrices(shape),
            a_sn,
            sn_norms,
            kl_ops,
            a_kl,
        })
    }

    pub fn export(&self) -> SpechtExport {
        SpechtExport {
            shape: self.shape.clone(),
            basis_order: self.basis.clone(),
            ops: self.ops.clone(),
            gram: self.gram.clone(),
            a_sn: self.a_sn.clone(),
            a_kl: self.a_kl.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// The matrices written to and read from `{lambda, basis_order, A_s, G, A_sn, A_kl}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpechtExport {
    pub shape: Partition,
    pub basis_order: Vec<StandardTableau>,
    pub ops: Vec<RationalMatrix>,
    pub gram: RationalMatrix,
    pub a_sn: RationalMatrix,
    pub a_kl: RationalMatrix,
}

impl SpechtExport {
    pub fn to_json(&self) -> Value {
        json!({
            "lambda": self.shape.to_string(),
            "basis_order": self.basis_order.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "A_s": self.ops.iter().map(RationalMatrix::to_strings).collect::<Vec<_>>(),
            "G": self.gram.to_strings(),
            "A_sn": self.a_sn.to_strings(),
            "A_kl": self.a_kl.to_strings(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, SpechtError> {
        let bad = |m: &str| SpechtError::Json(m.to_string());
        let matrix = |v: &Value, what: &str| -> Result<RationalMatrix, SpechtError> {
            let rows: Vec<Vec<String>> = serde_json::from_value(v.clone()).map_err(|_| bad(what))?;
            RationalMatrix::from_strings(&rows).ok_or_else(|| bad(what))
        };
        let shape = v["lambda"].as_str().and_then(|s| Partition::parse(s).ok()).ok_or_else(|| bad("lambda"))?;
        let basis_order = v["basis_order"]
            .as_array()
            .ok_or_else(|| bad("basis_order"))?
            .iter()
            .map(|t| t.as_str().and_then(|s| StandardTableau::parse(s).ok()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("basis_order"))?;
        let ops = v["A_s"]
            .as_array()
            .ok_or_else(|| bad("A_s"))?
            .iter()
            .map(|m| matrix(m, "A_s"))
            .collect::<Result<Vec<_>, _>>()?;
        let d = basis_order.len();
        let out = SpechtExport {
            shape,
            basis_order,
            ops,
            gram: matrix(&v["G"], "G")?,
            a_sn: matrix(&v["A_sn"], "A_sn")?,
            a_kl: matrix(&v["A_kl"], "A_kl")?,
        };
        let square = |m: &RationalMatrix| m.nrows() == d && m.ncols() == d;
        if !out.ops.iter().chain([&out.gram, &out.a_sn, &out.a_kl]).all(square) {
            return Err(bad("matrix size does not match the basis"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn small_polytabloids() {
        let v = polytabloid(&[vec![1, 2], vec![3]]);
        let want: TabloidVector =
            [(Tabloid(vec![0, 0, 1]), 1), (Tabloid(vec![1, 0, 0]), -1)].into_iter().collect();
        assert_eq!(v, want);
        assert_eq!(Tabloid(vec![1, 0, 0]).to_string(), "{23|1}");
        assert_eq!(polytabloid(&[vec![3, 1, 2]]).len(), 1);
    }

    #[test]
    fn signed_permutation_count() {
        let p = signed_permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i64>(), 0);
    }

    #[test]
    fn two_one_bundle() {
        let b = SpechtBundle::new(&shape(&[2, 1])).unwrap();
        assert_eq!(b.gram, RationalMatrix::from_i64(&[vec![2, 1], vec![1, 2]]));
        assert_eq!(b.ops[0], RationalMatrix::from_i64(&[vec![0, -1], vec![0, 2]]));
        assert_eq!(b.ops[1], RationalMatrix::from_i64(&[vec![1, 1], vec![1, 1]]));
        assert_eq!(b.a_kl, RationalMatrix::from_i64(&[vec![1, -1], vec![0, 1]]));
        assert_eq!(b.a_sn[(0, 1)], Rational::new((-1).into(), 2.into()));
    }

    #[test]
    fn trivial_shape() {
        let b = SpechtBundle::new(&shape(&[4])).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(b.ops.iter().all(|m| m[(0, 0)] == rat(2)));
        assert_eq!(b.gram[(0, 0)], rat(1));
        assert_eq!(b.a_kl, RationalMatrix::identity(1));
    }
}
