//! Smith normal form over the integers with unimodular transforms, p-local
//! forms, local-global reconstruction, and equivalence decisions.
//!
//! The elimination uses Bezout 2x2 row/column blocks with a
//! minimal-absolute-value pivot rule. Before a pivot is finalized it is made
//! to divide every entry of the remaining submatrix, so the divisibility
//! chain d_i | d_{i+1} holds by construction.

use std::cmp::min;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exec;
use crate::matrix::Matrix;
use crate::ring::{bezout_gcd, int_ord, is_prime_u64, Prime, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmithError {
    #[error("entry at ({row}, {col}) is not an integer")]
    NonIntegralEntry { row: usize, col: usize },
    #[error("matrices are {a_rows}x{a_cols} and {b_rows}x{b_cols}")]
    DimensionMismatch {
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },
    #[error("prime {prime} appears more than once")]
    DuplicatePrime { prime: BigUint },
    #[error("local forms disagree with rank {rank} and size {size}")]
    InconsistentLocals { rank: usize, size: usize },
    #[error("rank {rank} exceeds size {size}")]
    RankExceedsSize { rank: usize, size: usize },
    #[error("cofactor {cofactor} is out of factorization range")]
    FactorizationOutOfRange { cofactor: BigUint },
}

/// Unimodular decomposition `U * A * V = S` with `S` diagonal and the
/// invariant factors forming a divisibility chain.
///
/// The identity `U * A * V = S` is checked exactly at construction.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    s: Matrix,
    u: Matrix,
    v: Matrix,
    invariant_factors: Vec<BigInt>,
    rank: usize,
}

impl SmithDecomposition {
    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    /// Positive invariant factors d_1 | d_2 | ... | d_r.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of diagonal slots of `S`: min(rows, cols).
    pub fn size(&self) -> usize {
        min(self.s.nrows(), self.s.ncols())
    }

    /// Distinct primes dividing the invariant factors, ascending.
    pub fn prime_support(&self) -> Result<Vec<Prime>, SmithError> {
        match self.invariant_factors.last() {
            None => Ok(Vec::new()),
            Some(last) => factor_support(&last.magnitude().clone()),
        }
    }
}

struct Worker {
    rows: usize,
    cols: usize,
    a: Vec<BigInt>,
    u: Vec<BigInt>,
    v: Vec<BigInt>,
}

impl Worker {
    fn new(rows: usize, cols: usize, a: Vec<BigInt>) -> Self {
        let ident = |n: usize| {
            let mut m = vec![BigInt::zero(); n * n];
            for i in 0..n {
                m[i * n + i] = BigInt::one();
            }
            m
        };
        Worker {
            rows,
            cols,
            a,
            u: ident(rows),
            v: ident(cols),
        }
    }

    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.cols + j]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
        for c in 0..self.rows {
            self.u.swap(i * self.rows + c, j * self.rows + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.a.swap(r * self.cols + i, r * self.cols + j);
        }
        for r in 0..self.cols {
            self.v.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let idx = i * self.cols + c;
            let v = -std::mem::take(&mut self.a[idx]);
            self.a[idx] = v;
        }
        for c in 0..self.rows {
            let idx = i * self.rows + c;
            let v = -std::mem::take(&mut self.u[idx]);
            self.u[idx] = v;
        }
    }

    /// row_i -= q * row_t (determinant-one elementary op).
    fn row_axpy(&mut self, i: usize, t: usize, q: &BigInt) {
        for c in 0..self.cols {
            let delta = q * &self.a[t * self.cols + c];
            self.a[i * self.cols + c] -= delta;
        }
        for c in 0..self.rows {
            let delta = q * &self.u[t * self.rows + c];
            self.u[i * self.rows + c] -= delta;
        }
    }

    /// col_j -= q * col_t.
    fn col_axpy(&mut self, j: usize, t: usize, q: &BigInt) {
        for r in 0..self.rows {
            let delta = q * &self.a[r * self.cols + t];
            self.a[r * self.cols + j] -= delta;
        }
        for r in 0..self.cols {
            let delta = q * &self.v[r * self.cols + t];
            self.v[r * self.cols + j] -= delta;
        }
    }

    /// row_t += row_i.
    fn row_add(&mut self, t: usize, i: usize) {
        for c in 0..self.cols {
            let delta = self.a[i * self.cols + c].clone();
            self.a[t * self.cols + c] += delta;
        }
        for c in 0..self.rows {
            let delta = self.u[i * self.rows + c].clone();
            self.u[t * self.rows + c] += delta;
        }
    }

    /// Unimodular 2x2 block on rows (t, i): replaces the pivot at (t, t)
    /// with gcd(a[t][t], a[i][t]) and zeroes a[i][t].
    fn row_bezout(&mut self, t: usize, i: usize) {
        let x = self.at(t, t).clone();
        let y = self.at(i, t).clone();
        let (g, s, w) = bezout_gcd(&x, &y);
        let aa = &x / &g;
        let bb = &y / &g;
        let combine = |buf: &mut [BigInt], width: usize| {
            for c in 0..width {
                let p = buf[t * width + c].clone();
                let q = buf[i * width + c].clone();
                buf[t * width + c] = &s * &p + &w * &q;
                buf[i * width + c] = &aa * &q - &bb * &p;
            }
        };
        combine(&mut self.a, self.cols);
        combine(&mut self.u, self.rows);
    }

    /// Unimodular 2x2 block on columns (t, j).
    fn col_bezout(&mut self, t: usize, j: usize) {
        let x = self.at(t, t).clone();
        let y = self.at(t, j).clone();
        let (g, s, w) = bezout_gcd(&x, &y);
        let aa = &x / &g;
        let bb = &y / &g;
        let rows = self.rows;
        let cols = self.cols;
        for r in 0..rows {
            let p = self.a[r * cols + t].clone();
            let q = self.a[r * cols + j].clone();
            self.a[r * cols + t] = &s * &p + &w * &q;
            self.a[r * cols + j] = &aa * &q - &bb * &p;
        }
        for r in 0..cols {
            let p = self.v[r * cols + t].clone();
            let q = self.v[r * cols + j].clone();
            self.v[r * cols + t] = &s * &p + &w * &q;
            self.v[r * cols + j] = &aa * &q - &bb * &p;
        }
    }

    fn min_abs_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let v = self.at(i, j);
                if v.is_zero() {
                    continue;
                }
                let mag = v.abs();
                match &best {
                    Some((_, _, b)) if *b <= mag => {}
                    _ => best = Some((i, j, mag)),
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Zeroes row t and column t outside the pivot. Bezout blocks shrink the
    /// pivot to a gcd and may refill the other line, so iterate; once the
    /// pivot divides everything in its cross only axpy steps remain and the
    /// loop exits.
    fn clear_pivot_cross(&mut self, t: usize) {
        loop {
            for i in t + 1..self.rows {
                if self.at(i, t).is_zero() {
                    continue;
                }
                let (q, r) = num_integer::Integer::div_rem(self.at(i, t), self.at(t, t));
                if r.is_zero() {
                    self.row_axpy(i, t, &q);
                } else {
                    self.row_bezout(t, i);
                }
            }
            for j in t + 1..self.cols {
                if self.at(t, j).is_zero() {
                    continue;
                }
                let (q, r) = num_integer::Integer::div_rem(self.at(t, j), self.at(t, t));
                if r.is_zero() {
                    self.col_axpy(j, t, &q);
                } else {
                    self.col_bezout(t, j);
                }
            }
            let col_clear = (t + 1..self.rows).all(|i| self.at(i, t).is_zero());
            let row_clear = (t + 1..self.cols).all(|j| self.at(t, j).is_zero());
            if col_clear && row_clear {
                return;
            }
        }
    }

    /// Full elimination; returns the rank.
    fn eliminate(&mut self) -> usize {
        let limit = min(self.rows, self.cols);
        let mut t = 0;
        while t < limit {
            let Some((pi, pj)) = self.min_abs_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                self.clear_pivot_cross(t);
                // make the pivot divide the remaining submatrix
                let pivot = self.at(t, t).clone();
                let offender = (t + 1..self.rows).find(|&i| {
                    (t + 1..self.cols).any(|j| !(self.at(i, j) % &pivot).is_zero())
                });
                match offender {
                    Some(i) => self.row_add(t, i),
                    None => break,
                }
            }
            if self.at(t, t).is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Exact check that `u * a_orig * v == a` (the eliminated form).
    fn verify(&self, orig: &[BigInt]) -> bool {
        let (m, n) = (self.rows, self.cols);
        // ua = u * orig
        let mut ua = vec![BigInt::zero(); m * n];
        for i in 0..m {
            for k in 0..m {
                let f = &self.u[i * m + k];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let delta = f * &orig[k * n + j];
                    ua[i * n + j] += delta;
                }
            }
        }
        // uav = ua * v
        for i in 0..m {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..n {
                    acc += &ua[i * n + k] * &self.v[k * n + j];
                }
                if acc != self.a[i * n + j] {
                    return false;
                }
            }
        }
        true
    }
}

fn int_entries(a: &Matrix) -> Result<Vec<BigInt>, SmithError> {
    a.to_bigint_entries().ok_or_else(|| {
        let (row, col) = a.first_non_integral().expect("non-integral entry");
        SmithError::NonIntegralEntry { row, col }
    })
}

fn bigint_matrix(rows: usize, cols: usize, data: &[BigInt]) -> Matrix {
    Matrix::from_fn(rows, cols, |r, c| {
        Scalar::from_integer(data[r * cols + c].clone())
    })
}

/// Smith normal form `U * A * V = S` of an integer matrix. Rectangular
/// inputs are allowed; entries with denominators are rejected.
pub fn smith_normal_form(a: &Matrix) -> Result<SmithDecomposition, SmithError> {
    let entries = int_entries(a)?;
    let (rows, cols) = a.shape();
    let mut worker = Worker::new(rows, cols, entries.clone());
    let rank = worker.eliminate();
    assert!(worker.verify(&entries), "U*A*V != S after elimination");
    let invariant_factors: Vec<BigInt> =
        (0..rank).map(|i| worker.at(i, i).clone()).collect();
    for w in invariant_factors.windows(2) {
        debug_assert!((&w[1] % &w[0]).is_zero(), "divisibility chain violated");
    }
    Ok(SmithDecomposition {
        s: bigint_matrix(rows, cols, &worker.a),
        u: bigint_matrix(rows, rows, &worker.u),
        v: bigint_matrix(cols, cols, &worker.v),
        invariant_factors,
        rank,
    })
}

/// Decomposes a batch of matrices; with the `parallel` feature the batch is
/// sharded across threads.
pub fn smith_normal_form_batch(mats: &[Matrix]) -> Result<Vec<SmithDecomposition>, SmithError> {
    exec::map_indexed(mats.len(), |i| smith_normal_form(&mats[i]))
        .into_iter()
        .collect()
}

/// Smith normal form over the localization at `p`:
/// `diag(p^a_1, ..., p^a_r, 0, ..., 0)` recorded by its exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalSmithForm {
    prime: Prime,
    exponents: Vec<u64>,
    rank: usize,
    size: usize,
}

impl LocalSmithForm {
    pub fn new(
        prime: Prime,
        exponents: Vec<u64>,
        size: usize,
    ) -> Result<Self, SmithError> {
        let rank = exponents.len();
        if rank > size {
            return Err(SmithError::RankExceedsSize { rank, size });
        }
        debug_assert!(exponents.windows(2).all(|w| w[0] <= w[1]));
        Ok(LocalSmithForm {
            prime,
            exponents,
            rank,
            size,
        })
    }

    pub fn prime(&self) -> &Prime {
        &self.prime
    }

    /// Nondecreasing p-exponents of the invariant factors.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Diagonal slot count of the source matrix: min(rows, cols).
    pub fn size(&self) -> usize {
        self.size
    }
}

/// p-local Smith form: exponents are the p-adic valuations of the invariant
/// factors.
pub fn local_smith_form(a: &Matrix, p: &Prime) -> Result<LocalSmithForm, SmithError> {
    let snf = smith_normal_form(a)?;
    Ok(local_form_of(&snf, p))
}

/// Local form read off an existing decomposition.
pub fn local_form_of(snf: &SmithDecomposition, p: &Prime) -> LocalSmithForm {
    let pb = p.to_bigint();
    let exponents: Vec<u64> = snf
        .invariant_factors()
        .iter()
        .map(|d| int_ord(d, &pb) as u64)
        .collect();
    LocalSmithForm::new(p.clone(), exponents, snf.size()).expect("rank bounded by size")
}

/// Rebuilds the global diagonal from local forms: entry `i` is the product
/// over the given primes of `p^(a_i,p)` for `i < rank`, zero beyond. When the
/// primes cover the whole divisor set of a matrix, this reproduces the
/// diagonal of its Smith normal form.
pub fn local_global_reconstruct(
    locals: &[LocalSmithForm],
    rank: usize,
    size: usize,
) -> Result<Matrix, SmithError> {
    if rank > size {
        return Err(SmithError::RankExceedsSize { rank, size });
    }
    for lf in locals {
        if lf.rank() != rank || lf.size() != size {
            return Err(SmithError::InconsistentLocals { rank, size });
        }
    }
    for (i, lf) in locals.iter().enumerate() {
        if locals[..i].iter().any(|o| o.prime() == lf.prime()) {
            return Err(SmithError::DuplicatePrime {
                prime: lf.prime().value().clone(),
            });
        }
    }
    let mut diagonal = vec![Scalar::zero(); size];
    for (i, slot) in diagonal.iter_mut().enumerate().take(rank) {
        let mut acc = BigInt::one();
        for lf in locals {
            let e = lf.exponents()[i];
            acc *= lf.prime().to_bigint().pow(e as u32);
        }
        *slot = Scalar::from_integer(acc);
    }
    Ok(Matrix::diagonal(&diagonal))
}

/// Equivalence over the integers: true iff the invariant-factor lists (and
/// hence ranks) coincide. This decides the existence of invertible `Q`, `P`
/// with `B = Q^-1 A P`.
pub fn equivalent(a: &Matrix, b: &Matrix) -> Result<bool, SmithError> {
    check_same_shape(a, b)?;
    let fa = smith_normal_form(a)?;
    let fb = smith_normal_form(b)?;
    Ok(fa.invariant_factors() == fb.invariant_factors())
}

/// Equivalence over the localization at `p`: true iff the p-exponent lists
/// (and ranks) coincide.
pub fn equivalent_local(a: &Matrix, b: &Matrix, p: &Prime) -> Result<bool, SmithError> {
    check_same_shape(a, b)?;
    let fa = local_smith_form(a, p)?;
    let fb = local_smith_form(b, p)?;
    Ok(fa.exponents() == fb.exponents() && fa.rank() == fb.rank())
}

fn check_same_shape(a: &Matrix, b: &Matrix) -> Result<(), SmithError> {
    if a.shape() != b.shape() {
        return Err(SmithError::DimensionMismatch {
            a_rows: a.nrows(),
            a_cols: a.ncols(),
            b_rows: b.nrows(),
            b_cols: b.ncols(),
        });
    }
    Ok(())
}

/// Distinct primes dividing any invariant factor of `a`, ascending.
pub fn prime_support(a: &Matrix) -> Result<Vec<Prime>, SmithError> {
    smith_normal_form(a)?.prime_support()
}

const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let bound = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; bound + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= bound {
            if sieve[i] {
                let mut j = i * i;
                while j <= bound {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (2..=bound).filter(|&i| sieve[i]).map(|i| i as u64).collect()
    })
}

/// Factors `n` into its distinct prime divisors by trial division up to 10^6
/// followed by a deterministic 64-bit primality certificate on the cofactor.
/// Cofactors that are composite or exceed 2^64 are rejected.
fn factor_support(n: &BigUint) -> Result<Vec<Prime>, SmithError> {
    let mut remaining = n.clone();
    let mut primes = Vec::new();
    if remaining.is_one() {
        return Ok(primes);
    }
    for &p in small_primes() {
        if let Some(r) = remaining.to_u64() {
            if p.saturating_mul(p) > r {
                break;
            }
        }
        if (&remaining % p).is_zero() {
            primes.push(Prime::from_u64(p).expect("sieve yields primes"));
            while (&remaining % p).is_zero() {
                remaining /= p;
            }
        }
    }
    if !remaining.is_one() {
        match remaining.to_u64() {
            Some(r) if is_prime_u64(r) => {
                primes.push(Prime::from_u64(r).expect("certified prime"));
            }
            _ => {
                return Err(SmithError::FactorizationOutOfRange {
                    cofactor: remaining,
                })
            }
        }
    }
    Ok(primes)
}
