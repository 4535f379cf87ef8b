//! Dense exact linear algebra.
//!
//! Three layers, matching the three scalar regimes of the crate:
//!
//! * generic elimination over a field-like [`Scalar`] (rationals,
//!   cyclotomics): rank, kernel, solve, inverse, and the division-free
//!   Berkowitz characteristic polynomial (which works over any scalar);
//! * integer lattice routines over `BigInt`: row Hermite normal form in a
//!   canonical shape (positive pivots, entries above a pivot reduced into
//!   `[0, pivot)`) and saturated integer kernels via HNF of an augmented
//!   matrix;
//! * `Z/p^M` routines built on a Smith-type diagonalization with unit row
//!   and column transforms: kernels, solving, and invariant factors.
//!
//! Vectors are `Vec<T>` and matrices act on column vectors.

use crate::ring::{Scalar, ZpM};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

impl<T: std::fmt::Debug> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Mat<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Mat { rows: r, cols: c, data }
    }

    /// Column `j` of the matrix built from the images of basis vectors.
    pub fn from_cols(cols: Vec<Vec<T>>) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a.clone() * rhs.at(k, j).clone();
                    *out.at_mut(i, j) = out.at(i, j).clone() + t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    acc = acc + self.at(i, j).clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &T) -> Self {
        let data = self.data.iter().map(|a| a.clone() * c.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// `self - c * Id`.
    pub fn sub_scalar_diag(&self, c: &T) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            *m.at_mut(i, i) = m.at(i, i).clone() - c.clone();
        }
        m
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc + self.at(i, i).clone();
        }
        acc
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    // -- field-style elimination ------------------------------------------

    /// Reduced row echelon form in place; returns the pivot columns.
    /// Requires every nonzero entry encountered as a pivot to be invertible
    /// (true over a field).
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let piv = (r..self.rows).find(|&i| !self.at(i, c).is_zero());
            let Some(piv) = piv else { continue };
            self.swap_rows(r, piv);
            let inv = self
                .at(r, c)
                .try_inv()
                .expect("rref requires invertible pivots (field scalars)");
            for j in c..self.cols {
                *self.at_mut(r, j) = self.at(r, j).clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let t = f.clone() * self.at(r, j).clone();
                        *self.at_mut(i, j) = self.at(i, j).clone() - t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel `{x : Ax = 0}` over a field.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut base = Vec::new();
        let mut piv_iter = pivots.iter().peekable();
        let mut pivot_rows: Vec<(usize, usize)> = Vec::new();
        for (r, &c) in pivots.iter().enumerate() {
            pivot_rows.push((r, c));
        }
        for f in 0..self.cols {
            if piv_iter.peek() == Some(&&f) {
                piv_iter.next();
                continue;
            }
            let mut v = vec![T::zero(); self.cols];
            v[f] = T::one();
            for &(r, c) in &pivot_rows {
                v[c] = T::zero() - m.at(r, f).clone();
            }
            base.push(v);
        }
        base
    }

    /// One solution of `Ax = b` over a field, if consistent.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse over a field.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = T::one();
        }
        let pivots = aug.rref();
        if pivots.len() != n {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Some(out)
    }

    /// Coefficients of `det(lambda I - A)`, ascending in `lambda`
    /// (so the last entry is 1).  Division-free Berkowitz algorithm,
    /// valid over any commutative scalar ring.
    pub fn charpoly(&self) -> Vec<T> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        // descending-order coefficient vector, leading 1 first
        let mut p = vec![T::one()];
        for r in 1..=n {
            // principal r x r block; M is its top-left (r-1) x (r-1) corner
            let a_rr = self.at(r - 1, r - 1).clone();
            // first column of the (r+1) x r Toeplitz matrix
            let mut colv = Vec::with_capacity(r + 1);
            colv.push(T::one());
            colv.push(T::zero() - a_rr);
            if r >= 2 {
                // iterate v <- M v starting from C, recording R . v
                let mut v: Vec<T> = (0..r - 1).map(|i| self.at(i, r - 1).clone()).collect();
                for _ in 0..r - 1 {
                    let mut s = T::zero();
                    for j in 0..r - 1 {
                        s = s + self.at(r - 1, j).clone() * v[j].clone();
                    }
                    colv.push(T::zero() - s);
                    if colv.len() == r + 1 {
                        break;
                    }
                    let mut nv = vec![T::zero(); r - 1];
                    for i in 0..r - 1 {
                        for j in 0..r - 1 {
                            nv[i] = nv[i].clone() + self.at(i, j).clone() * v[j].clone();
                        }
                    }
                    v = nv;
                }
            }
            // Toeplitz product: q[i] = sum_j colv[i - j] p[j]
            let mut q = vec![T::zero(); r + 1];
            for (j, pj) in p.iter().enumerate() {
                for (i, qi) in q.iter_mut().enumerate() {
                    if i >= j && i - j < colv.len() {
                        *qi = qi.clone() + colv[i - j].clone() * pj.clone();
                    }
                }
            }
            p = q;
        }
        p.reverse();
        p
    }

    pub fn det(&self) -> T {
        let n = self.rows;
        let c0 = self.charpoly().remove(0);
        // det(0*I - A) = (-1)^n det(A)
        if n % 2 == 1 {
            T::zero() - c0
        } else {
            c0
        }
    }
}

// ---------------------------------------------------------------------------
// Integer lattice routines.
// ---------------------------------------------------------------------------

/// Row Hermite normal form, canonical shape: row echelon, pivots positive,
/// entries above each pivot reduced into `[0, pivot)`.  Returns the full
/// matrix including zero rows at the bottom.
pub fn hnf_full(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        // gcd the column below r into position r by extended-euclid row ops
        loop {
            let mut best: Option<usize> = None;
            for i in r..nrows {
                if !m[i][c].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if m[i][c].abs() < m[b][c].abs() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..nrows {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = div_round(&m[i][c], &m[r][c]);
                for j in 0..cols {
                    let t = &q * &m[r][j];
                    m[i][j] -= t;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for j in 0..cols {
                m[r][j] = -m[r][j].clone();
            }
        }
        // reduce entries above the pivot into [0, pivot)
        for i in 0..r {
            let q = m[i][c].div_floor(&m[r][c]);
            if !q.is_zero() {
                for j in 0..cols {
                    let t = &q * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    m
}

/// Nonzero rows of the canonical row HNF.
pub fn hnf(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    hnf_full(rows)
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // round(a/b) with ties toward floor; adequate for size reduction
    let two = BigInt::from(2);
    let (q, r) = a.div_mod_floor(b);
    if &r * &two > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Basis of the saturated integer kernel `{x in Z^n : Ax = 0}` of an
/// integer matrix given by rows (`m` rows, `n` columns).
///
/// Method: row ops on `[A^T | I_n]`; rows whose `A^T`-part vanishes carry a
/// basis of the kernel lattice in the identity part.
pub fn int_kernel(a_rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let m = a_rows.len();
    if m == 0 {
        return Vec::new();
    }
    let n = a_rows[0].len();
    let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(m + n);
        for a_row in a_rows {
            row.push(a_row[j].clone());
        }
        for k in 0..n {
            row.push(if k == j { BigInt::one() } else { BigInt::zero() });
        }
        aug.push(row);
    }
    let h = hnf_full(&aug);
    let mut out = Vec::new();
    for row in h {
        if row[..m].iter().all(|x| x.is_zero()) && row[m..].iter().any(|x| !x.is_zero()) {
            out.push(row[m..].to_vec());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Z/p^M routines.
// ---------------------------------------------------------------------------

/// Smith-type diagonalization over `Z/p^M`: returns `(u, d, v)` with
/// `u * a * v = d`, `u` and `v` invertible, `d` diagonal with entries
/// `p^{e_1} | p^{e_2} | ...` followed by zeros.
pub fn zpm_smith(a: &Mat<ZpM>) -> (Mat<ZpM>, Mat<ZpM>, Mat<ZpM>) {
    let mut d = a.clone();
    let mut u = Mat::<ZpM>::identity(a.rows);
    let mut v = Mat::<ZpM>::identity(a.cols);
    let n = a.rows.min(a.cols);
    for k in 0..n {
        // locate the minimum-valuation entry in the remaining block
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..d.rows {
            for j in k..d.cols {
                let x = d.at(i, j);
                if x.is_zero() {
                    continue;
                }
                let val = x.valuation();
                if best.map(|(_, _, bv)| val < bv).unwrap_or(true) {
                    best = Some((i, j, val));
                }
            }
        }
        let Some((pi, pj, pval)) = best else { break };
        swap_rows_zpm(&mut d, k, pi);
        swap_rows_zpm(&mut u, k, pi);
        swap_cols_zpm(&mut d, k, pj);
        swap_cols_zpm(&mut v, k, pj);
        // normalize pivot to p^val by scaling the row with the unit part
        let piv = *d.at(k, k);
        let unit = piv
            .div_exact_p(pval)
            .expect("pivot valuation")
            .try_inv()
            .expect("unit part");
        scale_row_zpm(&mut d, k, unit);
        scale_row_zpm(&mut u, k, unit);
        // clear column and row; all other entries have valuation >= pval
        for i in k + 1..d.rows {
            let x = *d.at(i, k);
            if x.is_zero() {
                continue;
            }
            let f = x.div_exact_p(pval).expect("divisibility by pivot");
            row_axpy_zpm(&mut d, i, k, f);
            row_axpy_zpm(&mut u, i, k, f);
        }
        for j in k + 1..d.cols {
            let x = *d.at(k, j);
            if x.is_zero() {
                continue;
            }
            let f = x.div_exact_p(pval).expect("divisibility by pivot");
            col_axpy_zpm(&mut d, j, k, f);
            col_axpy_zpm(&mut v, j, k, f);
        }
    }
    (u, d, v)
}

fn swap_rows_zpm(m: &mut Mat<ZpM>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        let t = *m.at(a, j);
        *m.at_mut(a, j) = *m.at(b, j);
        *m.at_mut(b, j) = t;
    }
}

fn swap_cols_zpm(m: &mut Mat<ZpM>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows {
        let t = *m.at(i, a);
        *m.at_mut(i, a) = *m.at(i, b);
        *m.at_mut(i, b) = t;
    }
}

fn scale_row_zpm(m: &mut Mat<ZpM>, r: usize, c: ZpM) {
    for j in 0..m.cols {
        *m.at_mut(r, j) = *m.at(r, j) * c;
    }
}

/// row_i -= f * row_k
fn row_axpy_zpm(m: &mut Mat<ZpM>, i: usize, k: usize, f: ZpM) {
    for j in 0..m.cols {
        let t = f * *m.at(k, j);
        *m.at_mut(i, j) = *m.at(i, j) - t;
    }
}

/// col_j -= f * col_k
fn col_axpy_zpm(m: &mut Mat<ZpM>, j: usize, k: usize, f: ZpM) {
    for i in 0..m.rows {
        let t = f * *m.at(i, k);
        *m.at_mut(i, j) = *m.at(i, j) - t;
    }
}

/// Valuations of the nonzero invariant factors of `a` over `Z/p^M`
/// (ascending; a value `M` would mean the factor is 0 and is omitted).
pub fn zpm_invariants(a: &Mat<ZpM>, m_prec: u32) -> Vec<u32> {
    let (_, d, _) = zpm_smith(a);
    let mut out = Vec::new();
    for k in 0..d.rows.min(d.cols) {
        let x = d.at(k, k);
        if x.is_zero() {
            break;
        }
        let v = x.valuation();
        if v < m_prec {
            out.push(v);
        }
    }
    out
}

/// Generating set of `{x : ax = 0}` over `Z/p^M`.
pub fn zpm_kernel(a: &Mat<ZpM>) -> Vec<Vec<ZpM>> {
    let (_, d, v) = zpm_smith(a);
    let n = a.cols;
    let mut gens = Vec::new();
    let prec = first_precision(a);
    for j in 0..n {
        let dv = if j < d.rows.min(d.cols) {
            let x = d.at(j, j);
            if x.is_zero() {
                Some(None)
            } else {
                let val = x.valuation();
                if val == 0 {
                    None
                } else {
                    Some(Some(val))
                }
            }
        } else {
            Some(None)
        };
        let Some(scale) = dv else { continue };
        let col = v.col(j);
        match (scale, prec) {
            (None, _) => gens.push(col),
            (Some(val), Some((p, m))) => {
                let f = ZpM::new(p as i64, p, m).pow((m - val) as u64);
                gens.push(col.into_iter().map(|x| x * f).collect());
            }
            (Some(_), None) => {}
        }
    }
    gens
}

fn first_precision(a: &Mat<ZpM>) -> Option<(u64, u32)> {
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a.at(i, j);
            if x.modulus() != 0 {
                return Some((x.prime(), x.precision()));
            }
        }
    }
    None
}

/// Solve `ax = b` over `Z/p^M` by elimination with unit pivots.
/// Returns `None` when no unit pivot is available or the system is
/// inconsistent; sufficient for the invertible systems used here.
pub fn zpm_solve(a: &Mat<ZpM>, b: &[ZpM]) -> Option<Vec<ZpM>> {
    assert_eq!(a.rows, b.len());
    let mut aug = Mat::<ZpM>::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            *aug.at_mut(i, j) = *a.at(i, j);
        }
        *aug.at_mut(i, a.cols) = b[i];
    }
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let piv = (r..a.rows).find(|&i| aug.at(i, c).is_unit());
        let Some(piv) = piv else {
            if (r..a.rows).any(|i| !aug.at(i, c).is_zero()) {
                return None;
            }
            continue;
        };
        swap_rows_zpm(&mut aug, r, piv);
        let inv = aug.at(r, c).try_inv().unwrap();
        scale_row_zpm(&mut aug, r, inv);
        for i in 0..a.rows {
            if i != r {
                let f = *aug.at(i, c);
                if !f.is_zero() {
                    row_axpy_zpm(&mut aug, i, r, f);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    for i in r..a.rows {
        if !aug.at(i, a.cols).is_zero() {
            return None;
        }
    }
    let mut x = vec![ZpM::zero(); a.cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = *aug.at(row, a.cols);
    }
    Some(x)
}
