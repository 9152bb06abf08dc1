//! Exact linear algebra over the rationals: RREF, kernel bases, fraction-free
//! (Bareiss) rank, and a mod-p rank backend for speed.

use num::{One, Signed, Zero};

use crate::{Q, Z};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c).clone());
            }
        }
        t
    }

    /// Determinant of a square matrix by exact Gaussian elimination.
    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m.at(i, k).is_zero()) else {
                return Q::zero();
            };
            if p != k {
                for c in 0..n {
                    let tmp = m.at(p, c).clone();
                    m.set(p, c, m.at(k, c).clone());
                    m.set(k, c, tmp);
                }
                det = -det;
            }
            let pivot = m.at(k, k).clone();
            det *= &pivot;
            for i in k + 1..n {
                if m.at(i, k).is_zero() {
                    continue;
                }
                let factor = m.at(i, k) / &pivot;
                for c in k..n {
                    let v = m.at(i, c) - &factor * m.at(k, c);
                    m.set(i, c, v);
                }
            }
        }
        det
    }

    /// In-place reduced row echelon form; returns the pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let tmp = self.at(p, j).clone();
                    let rv = self.at(r, j).clone();
                    self.set(p, j, rv);
                    self.set(r, j, tmp);
                }
            }
            let inv = self.at(r, c).clone();
            for j in 0..self.cols {
                let v = self.at(r, j) / &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.at(i, c).is_zero() {
                    continue;
                }
                let f = self.at(i, c).clone();
                for j in 0..self.cols {
                    let v = self.at(i, j) - &f * self.at(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of the right kernel {x : Ax = 0}, one vector per free column.
    pub fn right_kernel(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_set.contains(&f) {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(i, f).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of the left kernel {w : wA = 0}.
    pub fn left_kernel(&self) -> Vec<Vec<Q>> {
        self.transpose().right_kernel()
    }

    /// Exact rank by fraction-free (Bareiss) elimination on a denominator-cleared
    /// integer copy. Row scaling by positive integers does not change rank.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<Z>> = (0..self.rows)
            .map(|r| {
                let mut lcm = Z::one();
                for c in 0..self.cols {
                    lcm = num::integer::lcm(lcm, self.at(r, c).denom().clone());
                }
                (0..self.cols)
                    .map(|c| {
                        let q = self.at(r, c);
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect();
        bareiss_rank(&mut m)
    }

    /// Rank over the prime field F_p with p = 2^62 - 57. Entries with
    /// denominators divisible by p would be rejected; our integral inputs never
    /// hit that case.
    pub fn rank_mod_p(&self) -> usize {
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| {
                        let q = self.at(r, c);
                        let n = mod_p(q.numer());
                        let d = mod_p(q.denom());
                        assert!(d != 0, "denominator divisible by p");
                        mul_p(n, inv_p(d))
                    })
                    .collect()
            })
            .collect();
        rank_mod_p_impl(&mut m)
    }
}

/// Fixed 62-bit prime for the modular rank backend.
pub const MOD_P: u64 = (1u64 << 62) - 57;

fn mod_p(z: &Z) -> u64 {
    use num::ToPrimitive;
    let m = z % Z::from(MOD_P);
    let m = if m.is_negative() {
        m + Z::from(MOD_P)
    } else {
        m
    };
    m.to_u64().unwrap()
}

fn mul_p(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn pow_p(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_p(acc, b);
        }
        b = mul_p(b, b);
        e >>= 1;
    }
    acc
}

fn inv_p(a: u64) -> u64 {
    pow_p(a, MOD_P - 2)
}

fn rank_mod_p_impl(m: &mut [Vec<u64>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = inv_p(m[r][c]);
        for i in r + 1..rows {
            if m[i][c] == 0 {
                continue;
            }
            let f = mul_p(m[i][c], inv);
            #[allow(clippy::needless_range_loop)]
            for j in c..cols {
                let sub = mul_p(f, m[r][j]);
                m[i][j] = (m[i][j] + MOD_P - sub) % MOD_P;
            }
        }
        r += 1;
    }
    r
}

/// Rank of an integer matrix by single-step Bareiss elimination with row swaps.
/// Every intermediate entry is a minor of the input, so the division below is
/// exact and coefficient growth stays polynomial.
pub fn bareiss_rank(m: &mut [Vec<Z>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = Z::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = Z::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}
