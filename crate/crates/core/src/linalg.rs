//! Dense matrices over [`Scalar`].
//!
//! Exact matrices use Gauss–Jordan elimination over the Gaussian rationals.
//! Float matrices go through `nalgebra` (LU for inverses, SVD for ranks and
//! kernels, Schur for eigenvalues).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Relative singular-value threshold used for float ranks and kernels.
pub const SVD_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    mode: Mode,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, mode: Mode) -> Self {
        Matrix {
            rows,
            cols,
            mode,
            data: vec![Scalar::zero(mode); rows * cols],
        }
    }

    pub fn identity(n: usize, mode: Mode) -> Self {
        let mut m = Self::zeros(n, n, mode);
        for i in 0..n {
            m.set(i, i, Scalar::one(mode));
        }
        m
    }

    /// Rows must be non-empty and of equal length; the mode is the join of
    /// all entry modes.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mode = rows
            .iter()
            .flatten()
            .fold(Mode::Exact, |m, s| m.join(s.mode()));
        let data = rows.into_iter().flatten().map(|s| s.to_mode(mode)).collect();
        Matrix {
            rows: r,
            cols: c,
            mode,
            data,
        }
    }

    pub fn from_columns(cols: &[Vec<Scalar>]) -> Self {
        let n = cols.first().map_or(0, Vec::len);
        let rows = (0..n)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        Self::from_rows(rows)
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mode = entries.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
        let mut m = Self::zeros(entries.len(), entries.len(), mode);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.to_mode(mode));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        if v.mode() != self.mode {
            *self = self.to_mode(self.mode.join(v.mode()));
        }
        let mode = self.mode;
        self.data[i * self.cols + j] = v.to_mode(mode);
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_mode(&self, mode: Mode) -> Self {
        if mode == self.mode {
            return self.clone();
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            mode,
            data: self.data.iter().map(|s| s.to_mode(mode)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.mode);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mode = self.mode.join(other.mode);
        let mut out = Self::zeros(self.rows, other.cols, mode);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Scalar::zero(self.mode), |acc, j| {
                    &acc + &(self.get(i, j) * &v[j])
                })
            })
            .collect())
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let data: Vec<Scalar> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            mode: self.mode.join(other.mode),
            data,
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        let neg = other.scale(&Scalar::from_i64(-1, other.mode));
        self.sub(&neg)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data: Vec<Scalar> = self.data.iter().map(|a| a * c).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            mode: self.mode.join(c.mode()),
            data,
        }
    }

    /// `self - λ·I`.
    pub fn shifted(&self, lambda: &Scalar) -> Matrix {
        let mut m = self.to_mode(self.mode.join(lambda.mode()));
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i) - lambda;
            m.set(i, i, v);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::norm).fold(0.0, f64::max)
    }

    /// Entrywise zero test (exact zero or below `tol` for floats).
    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|s| s.is_negligible(tol))
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_complex())
    }

    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Matrix {
        let rows = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| Scalar::complex(m[(i, j)])).collect())
            .collect();
        Matrix::from_rows(rows)
    }

    /// Reduced row echelon form and pivot columns (exact mode).
    fn rref_exact(&self) -> (Matrix, Vec<usize>) {
        let real: Option<Vec<BigRational>> = self
            .data
            .iter()
            .map(|x| x.as_gaussian().filter(|g| g.is_real()).map(|g| g.re.clone()))
            .collect();
        if let Some(data) = real {
            let (data, pivots) = rref_rational(self.rows, self.cols, data);
            let m = Matrix {
                rows: self.rows,
                cols: self.cols,
                mode: Mode::Exact,
                data: data.into_iter().map(Scalar::rational).collect(),
            };
            return (m, pivots);
        }
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, r * a.cols + j);
                }
            }
            let inv = a.get(r, c).inv().expect("pivot is nonzero");
            // operands are sparse; touch only the pivot row's nonzeros
            let support: Vec<usize> = (c..a.cols).filter(|&j| !a.get(r, j).is_zero()).collect();
            for &j in &support {
                let v = a.get(r, j) * &inv;
                a.data[r * a.cols + j] = v;
            }
            for i in 0..a.rows {
                if i == r {
                    continue;
                }
                let factor = a.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for &j in &support {
                    let v = a.get(i, j) - &(&factor * a.get(r, j));
                    a.data[i * a.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        self.to_dmatrix()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    }

    pub fn rank(&self) -> usize {
        match self.mode {
            Mode::Exact => self.rref_exact().1.len(),
            Mode::Float => {
                let sv = self.singular_values();
                let max = sv.iter().copied().fold(0.0, f64::max);
                if max == 0.0 {
                    return 0;
                }
                sv.iter().filter(|&&s| s > SVD_REL_TOL * max).count()
            }
        }
    }

    /// Basis of the right kernel `{v : A v = 0}`.
    ///
    /// Exact mode returns the RREF basis (one free variable set to 1 per
    /// vector); float mode returns orthonormal right singular vectors for
    /// singular values below `SVD_REL_TOL·σ_max`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        self.kernel_with_tol(SVD_REL_TOL)
    }

    pub fn kernel_with_tol(&self, rel_tol: f64) -> Vec<Vec<Scalar>> {
        match self.mode {
            Mode::Exact => self.kernel_exact(),
            Mode::Float => self.kernel_float(rel_tol),
        }
    }

    fn kernel_exact(&self) -> Vec<Vec<Scalar>> {
        if self.full_column_rank_mod_p() {
            return Vec::new();
        }
        let (r, pivots) = self.rref_exact();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(Mode::Exact); self.cols];
                v[f] = Scalar::one(Mode::Exact);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    /// Rank modulo a prime never exceeds the rational rank, so full column
    /// rank mod p proves the kernel trivial. `false` means "unknown".
    fn full_column_rank_mod_p(&self) -> bool {
        if self.cols == 0 || self.rows < self.cols {
            return self.cols == 0;
        }
        let mut m = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                let Some(g) = self.get(i, j).as_gaussian().filter(|g| g.is_real()) else {
                    return false;
                };
                let Some(v) = mod_p(&g.re) else {
                    return false;
                };
                row.push(v);
            }
            m.push(row);
        }
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| m[i][c] != 0) else {
                return false;
            };
            m.swap(p, r);
            let inv = pow_mod(m[r][c], PRIME - 2);
            for i in r + 1..self.rows {
                if m[i][c] == 0 {
                    continue;
                }
                let f = mul_mod(m[i][c], inv);
                let (top, bottom) = m.split_at_mut(i);
                for (x, &p) in bottom[0][c..].iter_mut().zip(&top[r][c..]) {
                    *x = (*x + PRIME - mul_mod(f, p)) % PRIME;
                }
            }
            r += 1;
        }
        true
    }

    fn kernel_float(&self, rel_tol: f64) -> Vec<Vec<Scalar>> {
        let n = self.cols;
        if n == 0 {
            return Vec::new();
        }
        // pad with zero rows so the SVD yields a full set of right vectors
        let rows = self.rows.max(n);
        let mut a = DMatrix::<Complex64>::zeros(rows, n);
        for i in 0..self.rows {
            for j in 0..n {
                a[(i, j)] = self.get(i, j).to_complex();
            }
        }
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let sv = &svd.singular_values;
        let max = sv.iter().copied().fold(0.0, f64::max);
        let mut out = Vec::new();
        for (k, &s) in sv.iter().enumerate() {
            if max == 0.0 || s <= rel_tol * max {
                out.push((0..n).map(|j| Scalar::complex(v_t[(k, j)].conj())).collect());
            }
        }
        out
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        match self.mode {
            Mode::Exact => {
                let mut a = self.clone();
                let n = self.rows;
                let mut det = Scalar::one(Mode::Exact);
                for c in 0..n {
                    let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                        return Ok(Scalar::zero(Mode::Exact));
                    };
                    if p != c {
                        for j in 0..n {
                            a.data.swap(p * n + j, c * n + j);
                        }
                        det = -det;
                    }
                    let pivot = a.get(c, c).clone();
                    det = &det * &pivot;
                    let inv = pivot.inv().expect("nonzero pivot");
                    for i in c + 1..n {
                        let f = a.get(i, c) * &inv;
                        if f.is_zero() {
                            continue;
                        }
                        for j in c..n {
                            let v = a.get(i, j) - &(&f * a.get(c, j));
                            a.data[i * n + j] = v;
                        }
                    }
                }
                Ok(det)
            }
            Mode::Float => Ok(Scalar::complex(self.to_dmatrix().determinant())),
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        match self.mode {
            Mode::Exact => {
                let mut aug = Matrix::zeros(n, 2 * n, Mode::Exact);
                for i in 0..n {
                    for j in 0..n {
                        aug.data[i * 2 * n + j] = self.get(i, j).clone();
                    }
                    aug.data[i * 2 * n + n + i] = Scalar::one(Mode::Exact);
                }
                let (r, pivots) = aug.rref_exact();
                if pivots.len() < n || pivots[n - 1] != n - 1 {
                    return Err(Error::Singular);
                }
                let rows = (0..n)
                    .map(|i| (0..n).map(|j| r.get(i, n + j).clone()).collect())
                    .collect();
                Ok(Matrix::from_rows(rows))
            }
            Mode::Float => {
                let m = self.to_dmatrix();
                let sv = self.singular_values();
                let max = sv.iter().copied().fold(0.0, f64::max);
                let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
                if max == 0.0 || min <= 1e-14 * max {
                    return Err(Error::Singular);
                }
                let inv = m.try_inverse().ok_or(Error::Singular)?;
                Ok(Matrix::from_dmatrix(&inv))
            }
        }
    }

    /// 2-norm condition number (float evaluation).
    pub fn condition_number(&self) -> f64 {
        let sv = self.singular_values();
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Characteristic polynomial `det(tI − A)`, coefficients in ascending
    /// powers of `t`, by the Faddeev–LeVerrier recursion.
    pub fn char_poly(&self) -> Result<Vec<Scalar>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mode = self.mode;
        let mut coeffs = vec![Scalar::zero(mode); n + 1];
        coeffs[n] = Scalar::one(mode);
        let mut m = Matrix::zeros(n, n, mode);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m)?;
            for i in 0..n {
                let v = next.get(i, i) + &coeffs[n - k + 1];
                next.set(i, i, v);
            }
            let am = self.mul(&next)?;
            let trace = (0..n).fold(Scalar::zero(mode), |acc, i| &acc + am.get(i, i));
            coeffs[n - k] = -(&trace / &Scalar::from_i64(k as i64, mode));
            m = next;
        }
        Ok(coeffs)
    }

    /// Eigenvalues from a complex Schur decomposition (float evaluation).
    pub fn eigenvalues_numeric(&self) -> Vec<Complex64> {
        let m = self.to_dmatrix();
        let n = m.nrows();
        if n == 0 {
            return Vec::new();
        }
        match nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000) {
            Some(schur) => {
                let (_, t) = schur.unpack();
                (0..n).map(|i| t[(i, i)]).collect()
            }
            None => companion_free_fallback(&m),
        }
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>> {
        let inv = self.inverse()?;
        inv.mul_vec(b)
    }
}

/// Last-resort eigenvalues when Schur iteration does not converge: the
/// diagonal after repeated unshifted QR sweeps.
fn companion_free_fallback(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let mut a = m.clone();
    for _ in 0..500 {
        let qr = a.clone().qr();
        a = qr.r() * qr.q();
    }
    (0..a.nrows()).map(|i| a[(i, i)]).collect()
}

/// Numeric roots of `Σ coeffs[k] t^k` (ascending) via companion-matrix
/// eigenvalues, each refined with a few Newton steps.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let roots = Matrix::from_dmatrix(&comp).eigenvalues_numeric();
    roots
        .into_iter()
        .map(|mut r| {
            for _ in 0..8 {
                let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for a in c.iter().rev() {
                    dp = dp * r + p;
                    p = p * r + a;
                }
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                r -= step;
                if step.norm() <= 1e-16 * r.norm().max(1.0) {
                    break;
                }
            }
            r
        })
        .collect()
}

/// Synthetic division of `Σ coeffs[k] t^k` by `(t − root)`; returns the
/// quotient and the remainder.
pub fn deflate(coeffs: &[Scalar], root: &Scalar) -> (Vec<Scalar>, Scalar) {
    let n = coeffs.len();
    if n == 0 {
        return (Vec::new(), Scalar::zero(root.mode()));
    }
    let mut q = vec![Scalar::zero(root.mode()); n - 1];
    let mut carry = coeffs[n - 1].clone();
    for k in (0..n - 1).rev() {
        q[k] = carry.clone();
        carry = &coeffs[k] + &(&carry * root);
    }
    (q, carry)
}

/// Solves a float linear system with partial-pivot LU (used by Newton).
pub(crate) fn lu_solve(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Option<DVector<Complex64>> {
    a.lu().solve(&b)
}
/// Gauss–Jordan over the rationals on a row-major `rows × cols` array.
/// Elimination runs on primitive integer rows, which keeps entries small;
/// only the final normalization divides.
fn rref_rational(rows: usize, cols: usize, a: Vec<BigRational>) -> (Vec<BigRational>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = a
        .chunks(cols.max(1))
        .take(rows)
        .map(|row| {
            let den = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let mut ints: Vec<BigInt> = row.iter().map(|x| x.numer() * (&den / x.denom())).collect();
            make_primitive(&mut ints);
            ints
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let support: Vec<usize> = (0..cols).filter(|&j| !m[r][j].is_zero()).collect();
        let pivot = m[r][c].clone();
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let g = pivot.gcd(&m[i][c]);
            let scale_i = &pivot / &g;
            let scale_r = &m[i][c] / &g;
            let (row_r, row_i) = if i < r {
                let (lo, hi) = m.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            if !scale_i.is_one() {
                for x in row_i.iter_mut().filter(|x| !x.is_zero()) {
                    *x *= &scale_i;
                }
            }
            for &j in &support {
                row_i[j] -= &scale_r * &row_r[j];
            }
            make_primitive(row_i);
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = vec![BigRational::zero(); rows * cols];
    for (row, &c) in pivots.iter().enumerate() {
        let p = m[row][c].clone();
        for j in 0..cols {
            if !m[row][j].is_zero() {
                out[row * cols + j] = BigRational::new(m[row][j].clone(), p.clone());
            }
        }
    }
    (out, pivots)
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// 2^61 − 1.
const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    acc
}

/// `None` when the denominator vanishes mod p.
fn mod_p(x: &BigRational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let reduce = |v: &BigInt| v.mod_floor(&p).to_u64().expect("reduced below p");
    let den = reduce(x.denom());
    if den == 0 {
        return None;
    }
    Some(mul_mod(reduce(x.numer()), pow_mod(den, PRIME - 2)))
}
