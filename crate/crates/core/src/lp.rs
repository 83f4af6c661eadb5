//! Phase-one simplex with Bland's rule: is `b` a non-negative combination of
//! the columns of `A`?

use num_traits::{One, Signed, Zero};

use crate::rational::{Rational, RationalMatrix};

/// Field operations the simplex needs. `f64` compares against a tolerance.
pub trait LpScalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
}

impl LpScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

pub const FLOAT_TOL: f64 = 1e-9;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

/// Returns `c ≥ 0` with `A c = b`, or `None` if infeasible. `a` is row-major
/// with `m` columns. Iteration cap guards the float path against stalling.
pub fn nonnegative_solution<T: LpScalar>(a: &[Vec<T>], b: &[T], m: usize) -> Option<Vec<T>> {
    let d = a.len();
    let width = m + d + 1;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(d + 1);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_neg();
        let mut r: Vec<T> = Vec::with_capacity(width);
        for x in row {
            r.push(if flip { x.neg() } else { x.clone() });
        }
        for k in 0..d {
            r.push(if k == i { T::one() } else { T::zero() });
        }
        r.push(if flip { b[i].neg() } else { b[i].clone() });
        tab.push(r);
    }
    // reduced costs of the phase-one objective Σ artificials
    let mut cost = vec![T::zero(); width];
    for r in &tab {
        for j in 0..m {
            cost[j] = cost[j].sub(&r[j]);
        }
        cost[width - 1] = cost[width - 1].sub(&r[width - 1]);
    }
    let mut basis: Vec<usize> = (m..m + d).collect();
    let max_iter = 50 * (m + d).max(10);
    for _ in 0..max_iter {
        let Some(enter) = (0..m + d).find(|&j| cost[j].is_neg()) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..d {
            if tab[i][enter].is_pos() {
                let ratio = tab[i][width - 1].div(&tab[i][enter]);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio.lt(lr) || (!lr.lt(&ratio) && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (p, _) = leave?;
        let piv = tab[p][enter].clone();
        for j in 0..width {
            tab[p][j] = tab[p][j].div(&piv);
        }
        let prow = tab[p].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != p {
                let f = row[enter].clone();
                if f.is_pos() || f.is_neg() {
                    for j in 0..width {
                        row[j] = row[j].sub(&f.mul(&prow[j]));
                    }
                }
            }
        }
        let f = cost[enter].clone();
        for j in 0..width {
            cost[j] = cost[j].sub(&f.mul(&prow[j]));
        }
        basis[p] = enter;
    }
    if cost[width - 1].is_neg() || cost[width - 1].is_pos() {
        return None;
    }
    let mut c = vec![T::zero(); m];
    for (i, &j) in basis.iter().enumerate() {
        if j < m {
            c[j] = tab[i][width - 1].clone();
        } else if tab[i][width - 1].is_pos() {
            return None;
        }
    }
    Some(c)
}

/// Exact check on a rational generator matrix (generators as columns).
pub fn in_cone_exact(gens: &RationalMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let a: Vec<Vec<Rational>> = (0..gens.nrows()).map(|i| gens.row(i)).collect();
    nonnegative_solution(&a, b, gens.ncols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn finds_nonnegative_combination() {
        let gens = RationalMatrix::from_i64(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let c = in_cone_exact(&gens, &[rat(2), rat(3)]).unwrap();
        assert_eq!(gens.mul_vec(&c), vec![rat(2), rat(3)]);
        assert!(c.iter().all(|x| *x >= rat(0)));
        assert!(in_cone_exact(&gens, &[rat(-1), rat(3)]).is_none());
    }

    #[test]
    fn degenerate_cone() {
        // four generators of a 3-dimensional non-simplicial cone
        let gens = RationalMatrix::from_i64(&[vec![1, 0, -1, 0], vec![0, 1, 0, -1], vec![1, 1, 1, 1]]);
        assert!(in_cone_exact(&gens, &[rat(0), rat(0), rat(1)]).is_some());
        assert!(in_cone_exact(&gens, &[ratio(3, 2), rat(0), rat(1)]).is_none());
        let floats: Vec<Vec<f64>> = vec![vec![1., 0., -1., 0.], vec![0., 1., 0., -1.], vec![1., 1., 1., 1.]];
        assert!(nonnegative_solution(&floats, &[0.5, 0.0, 1.0], 4).is_some());
        assert!(nonnegative_solution(&floats, &[1.5, 0.0, 1.0], 4).is_none());
    }
}
