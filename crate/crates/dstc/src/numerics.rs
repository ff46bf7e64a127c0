//! Complex dense linear-algebra kernels used throughout the crate.
//!
//! Everything here targets tiny matrices (a few rows/columns); robustness and
//! determinism win over asymptotic speed. The eigendecomposition is a cyclic
//! Jacobi sweep, solves go through Cholesky, and the determinant through LU
//! with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-entry tolerance when checking that an input is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal convergence threshold for the Jacobi eigensolver.
pub const JACOBI_TOL: f64 = 1e-14;
/// Relative singular-value cutoff for the pseudo-inverse.
pub const PINV_RCOND: f64 = 1e-12;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major slice of entries.
    pub fn from_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        CMatrix {
            rows,
            cols,
            data: entries.to_vec(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn col_vec(entries: &[Complex64]) -> Self {
        CMatrix::from_slice(entries.len(), 1, entries)
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let z: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::diag(&z)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn hermitian(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conjugate(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scaled(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn scaled_re(&self, s: f64) -> CMatrix {
        self.scaled(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn col(&self, j: usize) -> CMatrix {
        let mut v = CMatrix::zeros(self.rows, 1);
        for r in 0..self.rows {
            v[(r, 0)] = self[(r, j)];
        }
        v
    }

    pub fn set_col(&mut self, j: usize, v: &CMatrix) {
        assert_eq!(v.rows, self.rows);
        for r in 0..self.rows {
            self[(r, j)] = v[(r, 0)];
        }
    }

    /// Stack `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = CMatrix::zeros(self.rows + other.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)];
            }
        }
        for r in 0..other.rows {
            for c in 0..self.cols {
                out[(self.rows + r, c)] = other[(r, c)];
            }
        }
        out
    }

    /// a^H b for column vectors.
    pub fn inner(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.cols, 1);
        assert_eq!(other.cols, 1);
        assert_eq!(self.rows, other.rows);
        (0..self.rows)
            .map(|r| self[(r, 0)].conj() * other[(r, 0)])
            .sum()
    }

    /// a b^H for column vectors.
    pub fn outer(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, 1);
        assert_eq!(other.cols, 1);
        CMatrix::from_fn(self.rows, other.rows, |r, c| {
            self[(r, 0)] * other[(c, 0)].conj()
        })
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                if (self[(r, c)] - self[(c, r)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// sqrt(sum |entry|^2).
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Real eigenvalues, sorted non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: CMatrix,
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Returns m = U diag(lambda) U^H with eigenvalues sorted non-increasing.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let scale = frobenius_norm(m).max(1.0);
    if !m.is_hermitian(HERMITIAN_TOL * scale) {
        return Err(Error::NotHermitian {
            tol: HERMITIAN_TOL,
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    // Symmetrize to kill the sub-tolerance skew part.
    for r in 0..n {
        for c in 0..n {
            let avg = 0.5 * (a[(r, c)] + a[(c, r)].conj());
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
        a[(r, r)] = Complex64::new(a[(r, r)].re, 0.0);
    }
    let mut u = CMatrix::identity(n);

    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let threshold = JACOBI_TOL * scale;
    for _sweep in 0..100 {
        if off(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= threshold / (n as f64) {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let abs_apq = apq.norm();
                let phase = apq / abs_apq;
                // tan(2 theta) = 2|a_pq| / (a_pp - a_qq)
                let theta = 0.5 * (2.0 * abs_apq).atan2(app - aqq);
                let c = theta.cos();
                let s = phase * theta.sin();
                // Left-multiply rows p, q of A by V^H, right-multiply the
                // columns of A and U by V, with V the embedded 2x2 rotation
                // [[cos, -e^{i phi} sin], [e^{-i phi} sin, cos]].
                for ccol in 0..n {
                    let apc = a[(p, ccol)];
                    let aqc = a[(q, ccol)];
                    a[(p, ccol)] = apc * c + aqc * s;
                    a[(q, ccol)] = -apc * s.conj() + aqc * c;
                }
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * c + arq * s.conj();
                    a[(r, q)] = -arp * s + arq * c;
                }
                for r in 0..n {
                    let urp = u[(r, p)];
                    let urq = u[(r, q)];
                    u[(r, p)] = urp * c + urq * s.conj();
                    u[(r, q)] = -urp * s + urq * c;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|(v, _)| *v).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (out_col, (_, src_col)) in pairs.iter().enumerate() {
        let col = u.col(*src_col);
        vecs.set_col(out_col, &col);
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Solve a x = b for Hermitian positive-definite a via Cholesky.
pub fn solve_hermitian_pd(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let scale = frobenius_norm(a).max(1.0);
    if !a.is_hermitian(HERMITIAN_TOL * scale) {
        return Err(Error::NotHermitian {
            tol: HERMITIAN_TOL,
        });
    }
    if a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "solve: a is {}x{} but b has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let n = a.rows();
    // Lower-triangular factor L with a = L L^H.
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                if sum.re <= 0.0 || sum.re < 1e-14 * scale * scale / (n as f64) {
                    return Err(Error::NotPositiveDefinite);
                }
                l[(i, j)] = Complex64::new(sum.re.sqrt(), 0.0);
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    // Forward/back substitution column by column.
    let mut x = CMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut sum = b[(i, c)];
            for k in 0..i {
                sum -= l[(i, k)] * y[k];
            }
            y[i] = sum / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = sum / l[(i, i)];
        }
    }
    Ok(x)
}

/// Moore-Penrose pseudo-inverse via the Hermitian eigendecomposition of m^H m.
pub fn pseudo_inverse(m: &CMatrix) -> CMatrix {
    let gram = m.hermitian().mul(m); // cols x cols, Hermitian PSD
    let eig = hermitian_eig(&gram).expect("gram matrix is Hermitian by construction");
    let smax = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = smax * PINV_RCOND;
    // m = sum_i sigma_i u_i v_i^H with v_i eigenvectors of the gram matrix,
    // sigma_i = sqrt(lambda_i), u_i = m v_i / sigma_i. Then
    // m^+ = sum_i sigma_i^-1 v_i u_i^H.
    let mut out = CMatrix::zeros(m.cols(), m.rows());
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= cutoff || lam <= 0.0 {
            continue;
        }
        let sigma = lam.sqrt();
        let v = eig.eigenvectors.col(i);
        let u = m.mul(&v).scaled_re(1.0 / sigma);
        out = out.add(&v.outer(&u).scaled_re(1.0 / sigma));
    }
    out
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &CMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot = k;
        let mut best = a[(k, k)].norm();
        for r in (k + 1)..n {
            let mag = a[(r, k)].norm();
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != k {
            for c in 0..n {
                let tmp = a[(k, c)];
                a[(k, c)] = a[(pivot, c)];
                a[(pivot, c)] = tmp;
            }
            det = -det;
        }
        det *= a[(k, k)];
        for r in (k + 1)..n {
            let factor = a[(r, k)] / a[(k, k)];
            for c in k..n {
                let akc = a[(k, c)];
                a[(r, c)] -= factor * akc;
            }
        }
    }
    Ok(det)
}
