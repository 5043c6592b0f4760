//! Dense matrices over the prime field GF(2^31 - 1).

use rand::Rng;

use crate::error::{Error, Result};

/// The field modulus `2^31 - 1`. Products of two residues fit in `u64`.
pub const PRIME: u64 = (1 << 31) - 1;

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= PRIME {
        s - PRIME
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + PRIME - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    (a * b) % PRIME
}

pub fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    base %= PRIME;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat. `a` must be nonzero.
pub fn inv(a: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(PRIME));
    pow(a, PRIME - 2)
}

/// Maps a signed integer to its residue.
pub fn from_i64(x: i64) -> u64 {
    x.rem_euclid(PRIME as i64) as u64
}

/// Row-major matrix of residues in `[0, PRIME)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl PrimeFieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PrimeFieldMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % PRIME);
            }
        }
        PrimeFieldMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Uniformly random residues.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| rng.random_range(0..PRIME))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % PRIME;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul_mat(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(0, |acc, k| add(acc, mul(self.get(i, k), other.get(k, j))))
        }))
    }

    /// True iff every row and every column holds exactly one `1` and the
    /// rest zeros.
    pub fn is_permutation(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let ok_line = |entries: &mut dyn Iterator<Item = u64>| {
            let mut ones = 0;
            for e in entries {
                match e {
                    0 => {}
                    1 => ones += 1,
                    _ => return false,
                }
            }
            ones == 1
        };
        (0..self.rows).all(|i| ok_line(&mut (0..self.cols).map(|j| self.get(i, j))))
            && (0..self.cols).all(|j| ok_line(&mut (0..self.rows).map(|i| self.get(i, j))))
    }
}

/// Exact rank over GF(p) by Gaussian elimination.
pub fn gf_rank(m: &PrimeFieldMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in col..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let pinv = inv(a[rank * cols + col]);
        for j in col..cols {
            a[rank * cols + j] = mul(a[rank * cols + j], pinv);
        }
        for r in rank + 1..rows {
            let f = a[r * cols + col];
            if f == 0 {
                continue;
            }
            for j in col..cols {
                let v = mul(f, a[rank * cols + j]);
                a[r * cols + j] = sub(a[r * cols + j], v);
            }
        }
        rank += 1;
    }
    rank
}
