//! Partitions, standard Young tableaux, last letter order, descents, axial
//! distances, Robinson–Schensted insertion and cup diagrams for two-row shapes
//! with a short second row.

use std::cmp::Ordering;
use std::fmt;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum TableauxError {
    #[error("invalid partition {0:?}")]
    InvalidPartition(Vec<usize>),
    #[error("rows {0:?} do not form a standard tableau")]
    NotStandard(Vec<Vec<u8>>),
    #[error("expected shape {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
}

/// A weakly decreasing sequence of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, TableauxError> {
        let ok = !parts.is_empty()
            && parts.iter().all(|&p| p > 0)
            && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition(parts))
        } else {
            Err(TableauxError::InvalidPartition(parts))
        }
    }

    /// Parse `"4,4,1"` or `"(4,4,1)"`.
    pub fn parse(s: &str) -> Result<Self, TableauxError> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
        match parts {
            Ok(p) => Partition::new(p),
            Err(_) => Err(TableauxError::InvalidPartition(Vec::new())),
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn num_rows(&self) -> usize {
        self.0.len()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.0[0];
        Partition((0..cols).map(|c| self.0.iter().filter(|&&p| p > c).count()).collect())
    }

    /// λ! = Π λ_i!, the order of the Young subgroup.
    pub fn factorial_product(&self) -> u128 {
        self.0.iter().map(|&p| (1..=p as u128).product::<u128>()).product()
    }

    pub fn is_hook(&self) -> bool {
        self.0.iter().skip(1).all(|&p| p == 1)
    }

    pub fn is_two_column(&self) -> bool {
        self.0[0] <= 2
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of `n` in reverse-lexicographic order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// A standard Young tableau, stored as rows plus the inverse position map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    rows: Vec<Vec<u8>>,
    /// `pos[k-1] = (row, col)` of entry `k`, 0-based.
    pos: Vec<(usize, usize)>,
}

impl StandardTableau {
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self, TableauxError> {
        let n: usize = rows.iter().map(|r| r.len()).sum();
        let mut pos = vec![(usize::MAX, usize::MAX); n];
        let shape_ok = !rows.is_empty()
            && rows.iter().all(|r| !r.is_empty())
            && rows.windows(2).all(|w| w[0].len() >= w[1].len());
        let mut ok = shape_ok;
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let k = v as usize;
                if k == 0 || k > n || pos[k - 1].0 != usize::MAX {
                    ok = false;
                    continue;
                }
                pos[k - 1] = (r, c);
                if c > 0 && row[c - 1] >= v {
                    ok = false;
                }
                if r > 0 && rows[r - 1][c] >= v {
                    ok = false;
                }
            }
        }
        if ok {
            Ok(StandardTableau { rows, pos })
        } else {
            Err(TableauxError::NotStandard(rows))
        }
    }

    /// Inverse of `Display`: `"134/25"`, or comma-separated entries within
    /// rows once n > 9.
    pub fn parse(s: &str) -> Result<Self, TableauxError> {
        let bad = || TableauxError::NotStandard(Vec::new());
        let digits = s.chars().filter(|c| *c != '/').count() <= 9 && !s.contains(',');
        let rows: Option<Vec<Vec<u8>>> = s
            .trim()
            .split('/')
            .map(|r| {
                if digits {
                    r.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
                } else {
                    r.split(',').map(|v| v.trim().parse::<u8>().ok()).collect()
                }
            })
            .collect();
        Self::from_rows(rows.ok_or_else(bad)?)
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.pos.len()
    }

    pub fn shape(&self) -> Partition {
        Partition(self.rows.iter().map(|r| r.len()).collect())
    }

    /// 0-based (row, column) of entry `k` (1-based).
    pub fn position(&self, k: usize) -> (usize, usize) {
        self.pos[k - 1]
    }

    pub fn row_of(&self, k: usize) -> usize {
        self.pos[k - 1].0
    }

    /// D(T): all `i` with `i+1` strictly south of `i`.
    pub fn descent_set(&self) -> Vec<usize> {
        (1..self.n()).filter(|&i| self.row_of(i + 1) > self.row_of(i)).collect()
    }

    /// D^c(T) = {1..n-1} \ D(T).
    pub fn descent_complement(&self) -> Vec<usize> {
        (1..self.n()).filter(|&i| self.row_of(i + 1) <= self.row_of(i)).collect()
    }

    /// a_i(T) = (c_{i+1} - r_{i+1}) - (c_i - r_i).
    pub fn axial_distance(&self, i: usize) -> i64 {
        let content = |k: usize| {
            let (r, c) = self.position(k);
            c as i64 - r as i64
        };
        content(i + 1) - content(i)
    }

    /// s_i·T, i.e. `T` with `i` and `i+1` swapped, when that is standard.
    pub fn swap(&self, i: usize) -> Option<StandardTableau> {
        let (a, b) = (self.position(i), self.position(i + 1));
        if a.0 == b.0 || a.1 == b.1 {
            return None;
        }
        let mut rows = self.rows.clone();
        rows[a.0][a.1] = (i + 1) as u8;
        rows[b.0][b.1] = i as u8;
        StandardTableau::from_rows(rows).ok()
    }

    pub fn transpose(&self) -> StandardTableau {
        let cols = self.rows[0].len();
        let rows: Vec<Vec<u8>> = (0..cols)
            .map(|c| self.rows.iter().filter(|r| r.len() > c).map(|r| r[c]).collect())
            .collect();
        StandardTableau::from_rows(rows).expect("transpose of a standard tableau is standard")
    }

    /// The second-row entries `(i, j)` of a shape `(n-2,2)` tableau.
    pub fn second_row_pair(&self) -> Option<(usize, usize)> {
        if self.rows.len() == 2 && self.rows[1].len() == 2 {
            Some((self.rows[1][0] as usize, self.rows[1][1] as usize))
        } else {
            None
        }
    }

    /// Last letter order: compare the rows of `n`, then `n-1`, …; the tableau
    /// whose entry sits in the higher row (smaller index) is smaller.
    pub fn last_letter_cmp(&self, other: &StandardTableau) -> Ordering {
        self.n().cmp(&other.n()).then_with(|| {
            for k in (1..=self.n()).rev() {
                match self.row_of(k).cmp(&other.row_of(k)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for StandardTableau {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StandardTableau {
    fn cmp(&self, other: &Self) -> Ordering {
        self.last_letter_cmp(other)
    }
}

impl fmt::Display for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n() > 9 { "," } else { "" };
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep))
            .collect();
        write!(f, "{}", rows.join("/"))
    }
}

/// Std(λ) in last letter order.
///
/// The order is built directly: place `n` in each removable corner, top row
/// first, and recurse on the smaller shape.
pub fn standard_tableaux(shape: &Partition) -> Vec<StandardTableau> {
    fn rec(shape: &mut Vec<usize>, k: usize) -> Vec<Vec<(usize, usize)>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for r in 0..shape.len() {
            let removable = shape[r] > 0 && (r + 1 == shape.len() || shape[r + 1] < shape[r]);
            if !removable {
                continue;
            }
            shape[r] -= 1;
            let col = shape[r];
            for mut prefix in rec(shape, k - 1) {
                prefix.push((r, col));
                out.push(prefix);
            }
            shape[r] += 1;
        }
        out
    }
    let mut parts = shape.parts().to_vec();
    let placements = rec(&mut parts, shape.n());
    placements
        .into_iter()
        .map(|pos| {
            let mut rows: Vec<Vec<u8>> = shape.parts().iter().map(|&p| vec![0; p]).collect();
            for (k, &(r, c)) in pos.iter().enumerate() {
                rows[r][c] = (k + 1) as u8;
            }
            StandardTableau { rows, pos }
        })
        .collect()
}

/// Row-insertion tableau P and recording tableau Q of a permutation in
/// one-line notation.
pub fn robinson_schensted(perm: &[u8]) -> (StandardTableau, StandardTableau) {
    let mut p: Vec<Vec<u8>> = Vec::new();
    let mut q: Vec<Vec<u8>> = Vec::new();
    for (step, &x) in perm.iter().enumerate() {
        let mut bump = x;
        let mut r = 0;
        loop {
            if r == p.len() {
                p.push(vec![bump]);
                q.push(vec![(step + 1) as u8]);
                break;
            }
            match p[r].iter().position(|&y| y > bump) {
                Some(c) => {
                    std::mem::swap(&mut p[r][c], &mut bump);
                    r += 1;
                }
                None => {
                    p[r].push(bump);
                    q[r].push((step + 1) as u8);
                    break;
                }
            }
        }
    }
    (
        StandardTableau::from_rows(p).expect("insertion tableau is standard"),
        StandardTableau::from_rows(q).expect("recording tableau is standard"),
    )
}

/// Non-crossing cups on dots `1..=n`; uncovered dots carry vertical strands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupDiagram {
    pub n: usize,
    pub cups: Vec<(usize, usize)>,
    pub strands: Vec<usize>,
}

impl CupDiagram {
    /// `k` is a descent iff `k` and `k+1` are joined by a cup.
    pub fn descents(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.cups.iter().filter(|(a, b)| b == &(a + 1)).map(|&(a, _)| a).collect();
        d.sort_unstable();
        d
    }
}

/// Cup diagram of T_{i,j} of shape (n-2,2).
pub fn cup_diagram(t: &StandardTableau) -> Result<CupDiagram, TableauxError> {
    let n = t.n();
    let (i, j) = match t.second_row_pair() {
        Some(pair) if n >= 4 => pair,
        _ => {
            return Err(TableauxError::ShapeMismatch {
                expected: "(n-2,2)".into(),
                got: t.shape().to_string(),
            })
        }
    };
    let mut cups = if i + 1 != j { vec![(i - 1, i), (j - 1, j)] } else { vec![(i - 1, i), (j - 3, j)] };
    cups.sort_unstable();
    let strands = (1..=n).filter(|k| cups.iter().all(|&(a, b)| a != *k && b != *k)).collect();
    Ok(CupDiagram { n, cups, strands })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[&[u8]]) -> StandardTableau {
        StandardTableau::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn tableau_display_round_trips() {
        for shape in [vec![3, 2], vec![4, 4, 1], vec![1; 10], vec![5, 3, 2]] {
            for t in standard_tableaux(&Partition::new(shape).unwrap()).iter().take(50) {
                assert_eq!(&StandardTableau::parse(&t.to_string()).unwrap(), t);
            }
        }
        assert_eq!(Partition::parse("(4,4,1)").unwrap(), Partition::parse("4,4,1").unwrap());
        assert!(StandardTableau::parse("21/3").is_err());
    }

    #[test]
    fn partitions_of_four() {
        let p: Vec<Vec<usize>> = partitions(4).into_iter().map(|p| p.0).collect();
        assert_eq!(p, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
        assert_eq!(partitions(1), vec![Partition(vec![1])]);
    }

    #[test]
    fn table_one_order_and_descents() {
        let std = standard_tableaux(&Partition::new(vec![3, 2]).unwrap());
        let expected = [
            (t(&[&[1, 3, 5], &[2, 4]]), vec![1, 3]),
            (t(&[&[1, 2, 5], &[3, 4]]), vec![2]),
            (t(&[&[1, 3, 4], &[2, 5]]), vec![1, 4]),
            (t(&[&[1, 2, 4], &[3, 5]]), vec![2, 4]),
            (t(&[&[1, 2, 3], &[4, 5]]), vec![3]),
        ];
        assert_eq!(std.len(), 5);
        for (got, (want, d)) in std.iter().zip(expected.iter()) {
            assert_eq!(got, want);
            assert_eq!(&got.descent_set(), d);
        }
        assert_eq!(std[1].descent_complement(), vec![1, 3, 4]);
    }

    #[test]
    fn axial_distances() {
        let tab = t(&[&[1, 2], &[3]]);
        assert_eq!(tab.axial_distance(1), 1);
        assert_eq!(tab.axial_distance(2), -2);
        let col = t(&[&[1], &[2]]);
        assert_eq!(col.axial_distance(1), -1);
    }

    #[test]
    fn rs_of_identity_and_reversal() {
        let (p, q) = robinson_schensted(&[1, 2, 3, 4]);
        assert_eq!(p.rows(), &[vec![1, 2, 3, 4]]);
        assert_eq!(q, p);
        let (p, q) = robinson_schensted(&[4, 3, 2, 1]);
        assert_eq!(p.shape().parts(), &[1, 1, 1, 1]);
        assert_eq!(q.shape().parts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn cup_diagrams_of_table_one() {
        let c = cup_diagram(&t(&[&[1, 3, 5], &[2, 4]])).unwrap();
        assert_eq!(c.cups, vec![(1, 2), (3, 4)]);
        assert_eq!(c.strands, vec![5]);
        let c = cup_diagram(&t(&[&[1, 2, 5], &[3, 4]])).unwrap();
        assert_eq!(c.cups, vec![(1, 4), (2, 3)]);
        assert_eq!(c.strands, vec![5]);
        assert_eq!(c.descents(), vec![2]);
        assert!(cup_diagram(&t(&[&[1, 2], &[3]])).is_err());
    }

    #[test]
    fn transpose_complements_descents() {
        for tab in standard_tableaux(&Partition::new(vec![3, 2, 1]).unwrap()) {
            assert_eq!(tab.transpose().descent_set(), tab.descent_complement());
        }
    }

    #[test]
    fn conjugate_partition() {
        let p = Partition::new(vec![4, 4, 1]).unwrap();
        assert_eq!(p.conjugate().parts(), &[3, 2, 2, 2]);
        assert_eq!(p.factorial_product(), 576);
    }
}
