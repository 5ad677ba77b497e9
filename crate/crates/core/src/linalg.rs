//! Dense complex linear algebra for the small matrices that show up here:
//! single-party operators, reduced density matrices and their dilations.
//!
//! Nothing in this module is larger than 8×8, so everything is a flat
//! row-major `Vec` and the eigensolver is a cyclic complex Jacobi sweep.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest dimension accepted by [`eig_hermitian`].
pub const MAX_DIM: usize = 8;
/// Relative asymmetry `‖M − M†‖ / ‖M‖` tolerated by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal threshold (relative to `‖M‖`) that ends the Jacobi sweeps.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Negative eigenvalues above `-PSD_TOL` are clamped to zero by [`psd_sqrt`].
pub const PSD_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix from {} entries",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            rows: n,
            cols: m,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let v: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| re(x)).collect())
            .collect();
        Self::from_rows(&v)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| re(x)).collect();
        Self::from_diag(&d)
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols[0].len();
        let mut m = Self::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n, "ragged columns");
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Self::from_rows(&[vec![re(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), re(0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diag(&[1.0, -1.0])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖M − M†‖_F`
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Determinant by LU with partial pivoting; closed form for 2×2.
    pub fn det(&self) -> C64 {
        assert!(self.is_square(), "det of non-square matrix");
        let n = self.rows;
        if n == 1 {
            return self.data[0];
        }
        if n == 2 {
            return self.data[0] * self.data[3] - self.data[1] * self.data[2];
        }
        let mut a = self.data.clone();
        let mut det = re(1.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                .unwrap();
            if a[p * n + k] == C64::default() {
                return C64::default();
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for j in k..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular);
        }
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                .unwrap();
            if a[p * n + k].norm() <= f64::EPSILON * scale {
                return Err(Error::Singular);
            }
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
                inv.swap(k * n + j, p * n + j);
            }
            let pivot = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= pivot;
                inv[k * n + j] /= pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == C64::default() {
                    continue;
                }
                for j in 0..n {
                    let (ak, ik) = (a[k * n + j], inv[k * n + j]);
                    a[i * n + j] -= f * ak;
                    inv[i * n + j] -= f * ik;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: n,
            data: inv,
        })
    }

    /// Operator 2-norm condition number via singular values.
    pub fn condition_number(&self) -> Result<f64> {
        let sv = singular_values(self)?;
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        if smin == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(smax / smin)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (self - other).frobenius_norm() <= tol
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V Λ V†`
    pub fn reconstruct(&self) -> CMatrix {
        let lam = CMatrix::from_real_diag(&self.eigenvalues);
        &(&self.eigenvectors * &lam) * &self.eigenvectors.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `m_pq` with a diagonal
/// unitary, then zeroes it with a real Givens rotation.
pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_DIM });
    }
    let norm = m.frobenius_norm();
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * norm {
        return Err(Error::NonHermitian {
            asymmetry: defect / norm.max(f64::MIN_POSITIVE),
        });
    }

    // Work on the exactly Hermitian part.
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = re(m[(i, i)].re);
        for j in i + 1..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = CMatrix::identity(n);

    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let threshold = JACOBI_OFF_TOL * norm;
    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                if r <= 1e-3 * threshold / n as f64 {
                    a[(p, q)] = C64::default();
                    a[(q, p)] = C64::default();
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // J = diag(1, e^{-iθ}) · [[c, s], [-s, c]] on the (p, q) plane.
                let jpp = re(cs);
                let jpq = re(sn);
                let jqp = phase.conj() * (-sn);
                let jqq = phase.conj() * cs;
                // A ← A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
                a[(p, p)] = re(a[(p, p)].re);
                a[(q, q)] = re(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, k)] = v[(r, i)];
        }
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = eig_hermitian(m)?;
    let tol = PSD_TOL * m.frobenius_norm().max(1.0);
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &lam in &eig.eigenvalues {
        if lam < -tol {
            return Err(Error::NotPsd { eigenvalue: lam });
        }
        roots.push(lam.max(0.0).sqrt());
    }
    let d = CMatrix::from_real_diag(&roots);
    Ok(&(&eig.eigenvectors * &d) * &eig.eigenvectors.adjoint())
}

/// Singular values (descending) from the eigenvalues of the Hermitian
/// dilation `[[0, M], [M†, 0]]`, which are `±σ_i` plus `|m − n|` zeros.
///
/// Accurate to `ε‖M‖` in absolute terms, so small singular values do not
/// suffer the square-root loss of going through `M M†`.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let (r, k) = (m.rows, m.cols);
    let n = r + k;
    let mut h = CMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..k {
            h[(i, r + j)] = m[(i, j)];
            h[(r + j, i)] = m[(i, j)].conj();
        }
    }
    let eig = eig_hermitian(&h)?;
    Ok(eig.eigenvalues[..r.min(k)]
        .iter()
        .map(|&s| s.max(0.0))
        .collect())
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit vector along `v`; `None` if `v` vanishes.
pub fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = vec_norm(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

/// Completes a unit 2-vector `u` to the unitary with rows `u†` and `u⊥†`,
/// so that it maps `u` to `|0⟩`.
pub fn unitary_to_zero(u: &[C64]) -> CMatrix {
    assert_eq!(u.len(), 2);
    let perp = [-u[1].conj(), u[0].conj()];
    CMatrix::from_rows(&[
        vec![u[0].conj(), u[1].conj()],
        vec![perp[0].conj(), perp[1].conj()],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn herm(rows: &[Vec<C64>]) -> CMatrix {
        CMatrix::from_rows(rows)
    }

    #[test]
    fn identity_and_pauli_x_spectra() {
        let e = eig_hermitian(&CMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        let e = eig_hermitian(&CMatrix::pauli_x()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.eigenvalues[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn pauli_y_eigenvectors_are_complex() {
        let y = CMatrix::pauli_y();
        let e = eig_hermitian(&y).unwrap();
        assert!(e.reconstruct().approx_eq(&y, 1e-14));
        let v = e.eigenvector(0);
        let yv = y.matvec(&v);
        for (a, b) in yv.iter().zip(&v) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn too_large_is_rejected() {
        let m = CMatrix::identity(9);
        assert!(matches!(eig_hermitian(&m), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let e = eig_hermitian(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn psd_sqrt_examples() {
        assert!(psd_sqrt(&CMatrix::identity(4))
            .unwrap()
            .approx_eq(&CMatrix::identity(4), 1e-15));
        let r = psd_sqrt(&CMatrix::from_real_diag(&[4.0, 1.0])).unwrap();
        assert!(r.approx_eq(&CMatrix::from_real_diag(&[2.0, 1.0]), 1e-14));
        let neg = CMatrix::from_real_diag(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
        // tiny negative round-off is clamped
        let tiny = CMatrix::from_real_diag(&[1.0, -1e-14]);
        assert!(psd_sqrt(&tiny).is_ok());
    }

    #[test]
    fn kron_examples() {
        let i4 = kron(&CMatrix::identity(2), &CMatrix::identity(2));
        assert!(i4.approx_eq(&CMatrix::identity(4), 0.0));
        let p0 = CMatrix::from_real_diag(&[1.0, 0.0]);
        let k = kron(&p0, &p0);
        assert!(k.approx_eq(&CMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]), 0.0));
        let x = CMatrix::pauli_x();
        let z = CMatrix::pauli_z();
        let xz = kron(&x, &z);
        assert_eq!(xz.rows(), 4);
        assert_eq!(xz[(0, 2)], re(1.0));
        assert_eq!(xz[(1, 3)], re(-1.0));
    }

    #[test]
    fn det_and_inverse() {
        let m = herm(&[
            vec![re(2.0), c(1.0, 1.0), re(0.0)],
            vec![c(1.0, -1.0), re(3.0), c(0.0, 2.0)],
            vec![re(0.0), c(0.0, -2.0), re(5.0)],
        ]);
        // cofactor expansion by hand: 2(15-4) - (1+i)(5(1-i)) = 22 - 10 = 12
        assert!((m.det() - re(12.0)).norm() < 1e-12);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).approx_eq(&CMatrix::identity(3), 1e-13));
        let sing = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(sing.inverse(), Err(Error::Singular));
    }

    #[test]
    fn singular_values_of_rectangular() {
        // [[3, 0], [0, 4], [0, 0]] has singular values 4, 3
        let m = CMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 4.0], &[0.0, 0.0]]);
        let s = singular_values(&m).unwrap();
        assert_abs_diff_eq!(s[0], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 3.0, epsilon = 1e-14);
        let tiny = CMatrix::from_real_diag(&[1.0, 1e-13]);
        let s = singular_values(&tiny).unwrap();
        assert_abs_diff_eq!(s[1], 1e-13, epsilon = 1e-16);
    }

    #[test]
    fn unitary_to_zero_maps_vector() {
        let u = normalized(&[c(0.3, 0.4), c(-0.2, 0.7)]).unwrap();
        let w = unitary_to_zero(&u);
        assert!((&w * &w.adjoint()).approx_eq(&CMatrix::identity(2), 1e-14));
        let img = w.matvec(&u);
        assert!((img[0] - re(1.0)).norm() < 1e-14);
        assert!(img[1].norm() < 1e-14);
    }
}
