//! Small exact-rational vector/matrix helpers: dot products, primitive
//! normalization, reduced row echelon form, and linear maps with adjoints.

use num::{BigInt, Integer, One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::xreal::{parse_rat, rat_to_string, Rat};

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg_vec(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn scale_vec(t: &Rat, a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| t * x).collect()
}

pub fn zeros(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn unit(n: usize, i: usize) -> Vec<Rat> {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

/// Scale a nonzero rational vector to primitive integer form: integral
/// entries with gcd 1, direction preserved (positive factor only).
pub fn primitive(v: &[Rat]) -> Vec<Rat> {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for n in &ints {
        gcd = gcd.gcd(n);
    }
    ints.into_iter()
        .map(|n| Rat::from_integer(n / &gcd))
        .collect()
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let adj = &f * &m[r][j];
                    m[i][j] = &m[i][j] - adj;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Reduce `v` modulo the row space of an RREF basis: zero out the pivot
/// coordinates. The result is the canonical coset representative.
pub fn reduce_mod_rowspace(v: &[Rat], basis: &[Vec<Rat>], pivots: &[usize]) -> Vec<Rat> {
    let mut out = v.to_vec();
    for (row, &p) in basis.iter().zip(pivots) {
        if !out[p].is_zero() {
            let f = out[p].clone();
            for j in 0..out.len() {
                let adj = &f * &row[j];
                out[j] = &out[j] - adj;
            }
        }
    }
    out
}

/// Compare rational vectors lexicographically (for canonical sorting).
pub fn lex_cmp(a: &[Rat], b: &[Rat]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Exact rational matrix acting as a linear map; the adjoint is the transpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    /// Row-major entries; `rows × cols` maps Q^cols → Q^rows.
    pub matrix: Vec<Vec<Rat>>,
}

impl Serialize for LinMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(rat_to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let matrix: Result<Vec<Vec<Rat>>> = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect())
            .collect();
        let matrix = matrix.map_err(|e| D::Error::custom(e.to_string()))?;
        LinMap::new(matrix).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl LinMap {
    pub fn new(matrix: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = matrix.first().map_or(0, |r| r.len());
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged linear map matrix".to_string()));
        }
        Ok(LinMap { matrix })
    }

    pub fn identity(n: usize) -> Self {
        LinMap {
            matrix: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    /// Zero map Q^cols → Q^rows.
    pub fn zero(rows: usize, cols: usize) -> Self {
        LinMap {
            matrix: vec![zeros(cols); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, |r| r.len())
    }

    pub fn apply(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        if x.len() != self.cols() {
            return Err(Error::dim(format!(
                "linear map expects {} coordinates, got {}",
                self.cols(),
                x.len()
            )));
        }
        Ok(self.matrix.iter().map(|row| dot(row, x)).collect())
    }

    /// Adjoint (transpose), mapping dual covectors backwards.
    pub fn adjoint(&self) -> LinMap {
        let (r, c) = (self.rows(), self.cols());
        LinMap {
            matrix: (0..c)
                .map(|j| (0..r).map(|i| self.matrix[i][j].clone()).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rat;

    #[test]
    fn primitive_normalizes() {
        let v = vec![rat(2, 3), rat(-4, 3)];
        assert_eq!(primitive(&v), vec![rat(1, 1), rat(-2, 1)]);
        let w = vec![rat(0, 1), rat(6, 1), rat(-9, 1)];
        assert_eq!(primitive(&w), vec![rat(0, 1), rat(2, 1), rat(-3, 1)]);
    }

    #[test]
    fn rref_small() {
        let rows = vec![
            vec![rat(2, 1), rat(4, 1), rat(2, 1)],
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
        ];
        let (m, piv) = rref(&rows);
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], vec![rat(1, 1), rat(2, 1), rat(0, 1)]);
        assert_eq!(m[1], vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
    }

    #[test]
    fn adjoint_is_transpose() {
        let t = LinMap::new(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]]).unwrap();
        let x = vec![rat(1, 1), rat(1, 1)];
        let y = vec![rat(2, 1), rat(-1, 1)];
        // <Tx, y> = <x, T*y>
        let lhs = dot(&t.apply(&x).unwrap(), &y);
        let rhs = dot(&x, &t.adjoint().apply(&y).unwrap());
        assert_eq!(lhs, rhs);
    }
}
