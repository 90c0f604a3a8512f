//! Small dense matrices and the matrix exponential.
//!
//! The chains handled here have a handful of states, so matrices are stored
//! inline (no heap allocation up to 4x4) and every routine is written for
//! that size class. The exponential uses scaling and squaring with the
//! Padé approximants of Higham (2005), degree 13 being the workhorse.

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

type Storage<T> = SmallVec<[T; 16]>;

/// Real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Storage<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: SmallVec::from_elem(0.0, n * n),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Storage::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `vᵀ M` for a row vector `v`.
    pub fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * self.get(i, j);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Storage<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: SmallVec::from_elem(Complex64::new(0.0, 0.0), n * n),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Storage::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn real(&self) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|c| c.re).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `Σ cᵢ Mᵢ`, all matrices of the same size.
    fn lincomb(terms: &[(f64, &CMatrix)]) -> CMatrix {
        let n = terms[0].1.n;
        let mut out = CMatrix::zeros(n);
        for (c, m) in terms {
            for (o, v) in out.data.iter_mut().zip(m.data.iter()) {
                *o += v * *c;
            }
        }
        out
    }

    fn add_identity(&mut self, c: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += c;
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `q0ᵀ M 𝟏`.
    pub fn bilinear_ones(&self, q0: &[f64]) -> Complex64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &q) in q0.iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let row: Complex64 = self.data[i * n..(i + 1) * n].iter().sum();
            acc += row * q;
        }
        acc
    }
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.n;
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| lu.get(p, col).norm().total_cmp(&lu.get(q, col).norm()))
            .unwrap_or(col);
        let pivot = lu.get(pivot_row, col);
        if pivot.norm() == 0.0 || !pivot.norm().is_finite() {
            return Err(Error::Numerical("singular matrix in linear solve".into()));
        }
        if pivot_row != col {
            for j in 0..n {
                lu.data.swap(col * n + j, pivot_row * n + j);
                x.data.swap(col * n + j, pivot_row * n + j);
            }
        }
        let inv = pivot.inv();
        for row in col + 1..n {
            let factor = lu.get(row, col) * inv;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = lu.get(col, j);
                lu.data[row * n + j] -= factor * v;
            }
            for j in 0..n {
                let v = x.get(col, j);
                x.data[row * n + j] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = lu.get(col, col).inv();
        for j in 0..n {
            let mut s = x.get(col, j);
            for k in col + 1..n {
                s -= lu.get(col, k) * x.get(k, j);
            }
            x.data[col * n + j] = s * inv;
        }
    }
    Ok(x)
}

// Higham (2005), Table 2.3: largest 1-norm for which each Padé degree is
// accurate to unit roundoff.
const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential of a complex square matrix.
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix exponential of non-finite matrix"));
    }
    let n = m.n;
    if n == 0 {
        return Ok(CMatrix::zeros(0));
    }
    if n == 1 {
        let mut out = CMatrix::zeros(1);
        out.data[0] = m.data[0].exp();
        return Ok(out);
    }
    let norm = m.norm_1();
    if norm <= THETA_9 {
        let a2 = m.matmul(m);
        let (u, v) = if norm <= THETA_3 {
            pade_low(m, &a2, &B3)
        } else if norm <= THETA_5 {
            pade_low(m, &a2, &B5)
        } else if norm <= THETA_7 {
            pade_low(m, &a2, &B7)
        } else {
            pade_low(m, &a2, &B9)
        };
        return solve(&v.sub(&u), &v.add(&u));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = m.scale(Complex64::new(2f64.powi(-s), 0.0));
    let (u, v) = pade13(&scaled);
    let mut r = solve(&v.sub(&u), &v.add(&u))?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// Odd/even parts `(U, V)` of a Padé approximant of degree 3, 5, 7 or 9.
fn pade_low(a: &CMatrix, a2: &CMatrix, b: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.n;
    let degree = b.len() - 1;
    let mut powers = vec![CMatrix::identity(n), a2.clone()];
    while powers.len() <= degree / 2 {
        let next = powers.last().unwrap().matmul(a2);
        powers.push(next);
    }
    let mut odd = CMatrix::zeros(n);
    let mut even = CMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        let (be, bo) = (b[2 * k], b[2 * k + 1]);
        for ((e, o), v) in even.data.iter_mut().zip(odd.data.iter_mut()).zip(p.data.iter()) {
            *e += v * be;
            *o += v * bo;
        }
    }
    (a.matmul(&odd), even)
}

fn pade13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &B13;
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);
    let w1 = CMatrix::lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let mut w2 = CMatrix::lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)]);
    w2.add_identity(b[1]);
    let u = a.matmul(&w1.matmul(&a6).add(&w2));
    let z1 = CMatrix::lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let mut z2 = CMatrix::lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)]);
    z2.add_identity(b[0]);
    let v = z1.matmul(&a6).add(&z2);
    (u, v)
}

/// Fixed-size complex square matrix for the hot path of the Laplace
/// transform, where chains have two to four states.
pub type Fixed<const N: usize> = [[Complex64; N]; N];

fn f_zero<const N: usize>() -> Fixed<N> {
    [[Complex64::new(0.0, 0.0); N]; N]
}

fn f_mul<const N: usize>(a: &Fixed<N>, b: &Fixed<N>) -> Fixed<N> {
    let mut out = f_zero::<N>();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn f_lincomb<const N: usize>(terms: &[(f64, &Fixed<N>)], identity: f64) -> Fixed<N> {
    let mut out = f_zero::<N>();
    for (c, m) in terms {
        for i in 0..N {
            for j in 0..N {
                out[i][j] += m[i][j] * *c;
            }
        }
    }
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += identity;
    }
    out
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn f_solve<const N: usize>(mut a: Fixed<N>, mut b: Fixed<N>) -> Option<Fixed<N>> {
    for col in 0..N {
        let p = (col..N).max_by(|&p, &q| a[p][col].norm_sqr().total_cmp(&a[q][col].norm_sqr()))?;
        let pivot = a[p][col];
        if pivot.norm_sqr() == 0.0 || !pivot.is_finite() {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        let inv = pivot.inv();
        for row in col + 1..N {
            let f = a[row][col] * inv;
            for j in col..N {
                let v = a[col][j];
                a[row][j] -= f * v;
            }
            for j in 0..N {
                let v = b[col][j];
                b[row][j] -= f * v;
            }
        }
    }
    for col in (0..N).rev() {
        let inv = a[col][col].inv();
        for j in 0..N {
            let mut s = b[col][j];
            for k in col + 1..N {
                s -= a[col][k] * b[k][j];
            }
            b[col][j] = s * inv;
        }
    }
    Some(b)
}

fn f_norm1<const N: usize>(m: &Fixed<N>) -> f64 {
    (0..N).map(|j| (0..N).map(|i| m[i][j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// [`expm`] on a fixed-size matrix; same algorithm, no allocation.
/// Returns `None` for non-finite input.
pub fn expm_fixed<const N: usize>(m: &Fixed<N>) -> Option<Fixed<N>> {
    let norm = f_norm1(m);
    if !norm.is_finite() {
        return None;
    }
    let pade_low = |a: &Fixed<N>, b: &[f64]| -> (Fixed<N>, Fixed<N>) {
        let a2 = f_mul(a, a);
        let mut p = a2;
        let mut odd = f_lincomb(&[], b[1]);
        let mut even = f_lincomb(&[], b[0]);
        for k in 1..b.len() / 2 {
            odd = f_lincomb(&[(1.0, &odd), (b[2 * k + 1], &p)], 0.0);
            even = f_lincomb(&[(1.0, &even), (b[2 * k], &p)], 0.0);
            if 2 * k + 2 < b.len() {
                p = f_mul(&p, &a2);
            }
        }
        (f_mul(a, &odd), even)
    };
    let (u, v, s) = if norm <= THETA_9 {
        let b: &[f64] = if norm <= THETA_3 {
            &B3
        } else if norm <= THETA_5 {
            &B5
        } else if norm <= THETA_7 {
            &B7
        } else {
            &B9
        };
        let (u, v) = pade_low(m, b);
        (u, v, 0)
    } else {
        let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
        let c = 2f64.powi(-s);
        let a = f_lincomb(&[(c, m)], 0.0);
        let b = &B13;
        let a2 = f_mul(&a, &a);
        let a4 = f_mul(&a2, &a2);
        let a6 = f_mul(&a2, &a4);
        let w1 = f_lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0);
        let w2 = f_lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1]);
        let w = f_lincomb(&[(1.0, &f_mul(&w1, &a6)), (1.0, &w2)], 0.0);
        let u = f_mul(&a, &w);
        let z1 = f_lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0);
        let z2 = f_lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0]);
        let v = f_lincomb(&[(1.0, &f_mul(&z1, &a6)), (1.0, &z2)], 0.0);
        (u, v, s)
    };
    let mut r = f_solve(f_lincomb(&[(1.0, &v), (-1.0, &u)], 0.0), f_lincomb(&[(1.0, &v), (1.0, &u)], 0.0))?;
    for _ in 0..s {
        r = f_mul(&r, &r);
    }
    Some(r)
}
