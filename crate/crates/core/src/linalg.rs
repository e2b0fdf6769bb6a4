//! Complex dense/sparse matrix kernel shared by every other module:
//! Kronecker products, Hermitian eigendecomposition, linear solves, and the
//! trace norm. Factorizations and eigensolves are delegated to `faer`; the
//! storage, Kronecker algebra, and all contracts on top are local.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::C64;

/// Hard cap on the row/column count any kron product may produce.
pub const MAX_KRON_DIM: usize = 1 << 17;

/// Absolute tolerance on `max |m - m^dag|` below which a matrix is accepted
/// as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Row-major dense entries, length `rows * cols`.
    Dense(Vec<C64>),
    /// Coordinate triplets sorted by (col, row), duplicates merged,
    /// exact zeros dropped.
    Coo(Vec<(usize, usize, C64)>),
}

/// Complex matrix with a dense or sparse backing store.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dims must be >= 1");
        Self { rows, cols, storage: Storage::Dense(vec![C64::new(0.0, 0.0); rows * cols]) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn sparse_identity(n: usize) -> Self {
        let entries = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Self { rows: n, cols: n, storage: Storage::Coo(entries) }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, storage: Storage::Dense(data) }
    }

    /// Sparse matrix from unsorted triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: Vec<(usize, usize, C64)>) -> Self {
        for &(i, j, _) in &triplets {
            assert!(i < rows && j < cols, "triplet index out of bounds");
        }
        let mut m = Self { rows, cols, storage: Storage::Coo(triplets) };
        m.normalize_coo();
        m
    }

    fn normalize_coo(&mut self) {
        if let Storage::Coo(t) = &mut self.storage {
            t.sort_unstable_by_key(|&(i, j, _)| (j, i));
            let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(t.len());
            for &(i, j, v) in t.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == i && last.1 == j => last.2 += v,
                    _ => merged.push((i, j, v)),
                }
            }
            merged.retain(|&(_, _, v)| v != C64::new(0.0, 0.0));
            *t = merged;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Coo(_))
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|v| **v != C64::new(0.0, 0.0)).count(),
            Storage::Coo(t) => t.len(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i < self.rows && j < self.cols);
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols + j],
            Storage::Coo(t) => t
                .binary_search_by_key(&(j, i), |&(r, c, _)| (c, r))
                .map(|k| t[k].2)
                .unwrap_or(C64::new(0.0, 0.0)),
        }
    }

    /// Only valid on dense storage.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(i < self.rows && j < self.cols);
        match &mut self.storage {
            Storage::Dense(d) => d[i * self.cols + j] = v,
            Storage::Coo(_) => panic!("set() on sparse storage; convert to dense first"),
        }
    }

    pub fn to_dense(&self) -> Self {
        match &self.storage {
            Storage::Dense(_) => self.clone(),
            Storage::Coo(t) => {
                let mut m = Self::zeros(self.rows, self.cols);
                for &(i, j, v) in t {
                    m.set(i, j, v);
                }
                m
            }
        }
    }

    pub fn to_sparse(&self) -> Self {
        match &self.storage {
            Storage::Coo(_) => self.clone(),
            Storage::Dense(d) => {
                let mut t = Vec::new();
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        let v = d[i * self.cols + j];
                        if v != C64::new(0.0, 0.0) {
                            t.push((i, j, v));
                        }
                    }
                }
                let mut m = Self { rows: self.rows, cols: self.cols, storage: Storage::Coo(t) };
                m.normalize_coo();
                m
            }
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Coo(t) => t.clone(),
            Storage::Dense(_) => match self.to_sparse().storage {
                Storage::Coo(t) => t,
                _ => unreachable!(),
            },
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        match &mut out.storage {
            Storage::Dense(d) => d.iter_mut().for_each(|v| *v *= s),
            Storage::Coo(t) => {
                t.iter_mut().for_each(|(_, _, v)| *v *= s);
                out.normalize_coo();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        match (&self.storage, &other.storage) {
            (Storage::Coo(a), Storage::Coo(b)) => {
                let mut t = a.clone();
                t.extend_from_slice(b);
                Ok(Self::from_triplets(self.rows, self.cols, t))
            }
            _ => {
                let a = self.to_dense();
                let b = other.to_dense();
                Ok(Self::from_fn(self.rows, self.cols, |i, j| a.get(i, j) + b.get(i, j)))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let a = self.to_dense();
        let b = other.to_dense();
        let (Storage::Dense(ad), Storage::Dense(bd)) = (&a.storage, &b.storage) else {
            unreachable!()
        };
        let mut out = vec![C64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = ad[i * self.cols + k];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[i * other.cols + j] += aik * bd[k * other.cols + j];
                }
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, storage: Storage::Dense(out) })
    }

    pub fn transpose(&self) -> Self {
        match &self.storage {
            Storage::Dense(_) => Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i)),
            Storage::Coo(t) => Self::from_triplets(
                self.cols,
                self.rows,
                t.iter().map(|&(i, j, v)| (j, i, v)).collect(),
            ),
        }
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        match &mut out.storage {
            Storage::Dense(d) => d.iter_mut().for_each(|v| *v = v.conj()),
            Storage::Coo(t) => t.iter_mut().for_each(|(_, _, v)| *v = v.conj()),
        }
        out
    }

    pub fn dagger(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Dense(d) => {
                (0..self.rows.min(self.cols)).map(|i| d[i * self.cols + i]).sum()
            }
            Storage::Coo(t) => {
                t.iter().filter(|&&(i, j, _)| i == j).map(|&(_, _, v)| v).sum()
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Coo(t) => t.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let mut row_sums = vec![0.0; self.rows];
        match &self.storage {
            Storage::Dense(d) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        row_sums[i] += d[i * self.cols + j].norm();
                    }
                }
            }
            Storage::Coo(t) => {
                for &(i, _, v) in t {
                    row_sums[i] += v.norm();
                }
            }
        }
        row_sums.into_iter().fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        let sq: f64 = match &self.storage {
            Storage::Dense(d) => d.iter().map(|v| v.norm_sqr()).sum(),
            Storage::Coo(t) => t.iter().map(|(_, _, v)| v.norm_sqr()).sum(),
        };
        sq.sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "mul_vec: matrix {}x{} with vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        match &self.storage {
            Storage::Dense(d) => {
                for i in 0..self.rows {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..self.cols {
                        acc += d[i * self.cols + j] * v[j];
                    }
                    out[i] = acc;
                }
            }
            Storage::Coo(t) => {
                for &(i, j, a) in t {
                    out[i] += a * v[j];
                }
            }
        }
        Ok(out)
    }

    /// `max |self - self^dag|` over entries; zero for an exactly Hermitian
    /// matrix.
    pub fn asymmetry(&self) -> f64 {
        self.sub(&self.dagger()).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "hermitian op on {}x{}",
                self.rows, self.cols
            )));
        }
        let asym = self.asymmetry();
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(())
    }

    fn to_faer(&self) -> Mat<C64> {
        let d = self.to_dense();
        Mat::from_fn(self.rows, self.cols, |i, j| d.get(i, j))
    }

    /// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending;
    /// eigenvectors as the columns of the returned matrix.
    pub fn hermitian_eig(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        self.require_hermitian()?;
        let eig = self.to_faer().self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigFailed)?;
        let n = self.rows;
        let s = eig.S().column_vector();
        let vals: Vec<f64> = (0..n).map(|k| s.get(k).re).collect();
        let u = eig.U();
        let vecs = ComplexMatrix::from_fn(n, n, |i, j| *u.get(i, j));
        Ok((vals, vecs))
    }

    /// Eigenvalues only (ascending) of a Hermitian matrix.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_hermitian()?;
        let vals = self
            .to_faer()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigFailed)?;
        Ok(vals)
    }

    /// Dense LU solve of `self * x = b`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("solve on {}x{}", self.rows, self.cols)));
        }
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix {}x{} with rhs of length {}",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let a = self.to_faer();
        let lu = a.partial_piv_lu();
        let threshold = 1e-14 * self.max_abs();
        let min_pivot = (0..self.rows).map(|i| lu.U().get(i, i).norm()).fold(f64::INFINITY, f64::min);
        if !(min_pivot > threshold) {
            return Err(Error::Singular { pivot: min_pivot, threshold });
        }
        let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        let x = lu.solve(&rhs);
        let out: Vec<C64> = (0..b.len()).map(|i| *x.get(i, 0)).collect();
        if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Singular { pivot: min_pivot, threshold });
        }
        Ok(out)
    }

    /// Sparse LU solve of `self * x = b`; `self` may be in either storage.
    pub fn solve_sparse(&self, b: &[C64]) -> Result<Vec<C64>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("solve on {}x{}", self.rows, self.cols)));
        }
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix {}x{} with rhs of length {}",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let triplets: Vec<Triplet<usize, usize, C64>> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| Triplet { row: i, col: j, val: v })
            .collect();
        let mat = SparseColMat::<usize, C64>::try_new_from_triplets(self.rows, self.cols, &triplets)
            .map_err(|e| Error::DimensionMismatch(format!("sparse assembly: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|_| Error::Singular { pivot: 0.0, threshold: 0.0 })?;
        let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        let x = lu.solve(&rhs);
        let x: Vec<C64> = (0..b.len()).map(|i| *x.get(i, 0)).collect();
        // Singular systems surface as non-finite or residual-failing solutions.
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Singular { pivot: 0.0, threshold: 1e-14 * self.max_abs() });
        }
        Ok(x)
    }

    /// `sum_k |lambda_k|` over the eigenvalues of a Hermitian matrix.
    pub fn trace_norm_hermitian(&self) -> Result<f64> {
        let vals = self.hermitian_eigenvalues()?;
        Ok(vals.iter().map(|l| l.abs()).sum())
    }

    /// All singular values, nonincreasing.
    pub fn singular_values_all(&self) -> Result<Vec<f64>> {
        self.to_faer().singular_values().map_err(|_| Error::EigFailed)
    }

    /// Eigenvalues of a general square matrix, in no particular order.
    pub fn eigenvalues_general(&self) -> Result<Vec<C64>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "eigenvalues of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.to_faer().eigenvalues().map_err(|_| Error::EigFailed)
    }

    /// Largest singular value; for Hermitian input this is `max |lambda|`.
    pub fn spectral_norm(&self) -> f64 {
        self.to_faer()
            .singular_values()
            .map(|s| s.first().copied().unwrap_or(0.0))
            .unwrap_or(f64::NAN)
    }
}

/// Kronecker product. Output storage is sparse iff either input is sparse.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or(Error::DimensionOverflow {
        requested: usize::MAX,
        max: MAX_KRON_DIM,
    })?;
    let cols = a.cols.checked_mul(b.cols).ok_or(Error::DimensionOverflow {
        requested: usize::MAX,
        max: MAX_KRON_DIM,
    })?;
    if rows > MAX_KRON_DIM || cols > MAX_KRON_DIM {
        return Err(Error::DimensionOverflow { requested: rows.max(cols), max: MAX_KRON_DIM });
    }
    if a.is_sparse() || b.is_sparse() {
        let at = a.triplets();
        let bt = b.triplets();
        let mut t = Vec::with_capacity(at.len() * bt.len());
        for &(ia, ja, va) in &at {
            for &(ib, jb, vb) in &bt {
                t.push((ia * b.rows + ib, ja * b.cols + jb, va * vb));
            }
        }
        Ok(ComplexMatrix::from_triplets(rows, cols, t))
    } else {
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
            a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut StdRng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n);
        a.add(&a.dagger()).unwrap().scale(c(0.5, 0.0))
    }

    #[test]
    fn kron_identity_case() {
        let i2 = ComplexMatrix::identity(2);
        let k = kron(&i2, &i2).unwrap();
        assert_eq!(k, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_block_structure() {
        // kron([[0,1],[0,0]], I2) has ones at (0,2) and (1,3).
        let mut a = ComplexMatrix::zeros(2, 2);
        a.set(0, 1, c(1.0, 0.0));
        let k = kron(&a, &ComplexMatrix::identity(2)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected =
                    if (i, j) == (0, 2) || (i, j) == (1, 3) { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert_eq!(k.get(i, j), expected, "at ({i},{j})");
            }
        }
    }

    #[test]
    fn kron_matches_quadruple_loop_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 3);
        let k = kron(&a, &b).unwrap();
        for ia in 0..3 {
            for ja in 0..3 {
                for ib in 0..3 {
                    for jb in 0..3 {
                        let expected = a.get(ia, ja) * b.get(ib, jb);
                        let got = k.get(ia * 3 + ib, ja * 3 + jb);
                        assert!((got - expected).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_associativity_and_trace_product() {
        let mut rng = StdRng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 3);
        let cm = random_matrix(&mut rng, 2);
        let lhs = kron(&kron(&a, &b).unwrap(), &cm).unwrap();
        let rhs = kron(&a, &kron(&b, &cm).unwrap()).unwrap();
        assert_eq!(lhs.rows(), rhs.rows());
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                assert!((lhs.get(i, j) - rhs.get(i, j)).norm() < 1e-12);
            }
        }
        let tr = kron(&a, &b).unwrap().trace();
        assert!((tr - a.trace() * b.trace()).norm() < 1e-10);
    }

    #[test]
    fn kron_dimension_overflow_rejected() {
        let big = ComplexMatrix::sparse_identity(1 << 10);
        let bigger = ComplexMatrix::sparse_identity(1 << 9);
        match kron(&big, &bigger) {
            Err(Error::DimensionOverflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn sparse_dense_round_trip_is_lossless() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 5);
        assert_eq!(a.to_sparse().to_dense(), a);
    }

    #[test]
    fn eig_diagonal_case() {
        let mut h = ComplexMatrix::zeros(3, 3);
        h.set(0, 0, c(3.0, 0.0));
        h.set(1, 1, c(1.0, 0.0));
        h.set(2, 2, c(2.0, 0.0));
        let (vals, _) = h.hermitian_eig().unwrap();
        assert_eq!(vals.len(), 3);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eig_pauli_x() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h.set(0, 1, c(1.0, 0.0));
        h.set(1, 0, c(1.0, 0.0));
        let (vals, _) = h.hermitian_eig().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstruction_residual() {
        let mut rng = StdRng::seed_from_u64(19);
        let h = random_hermitian(&mut rng, 20);
        let norm = h.spectral_norm();
        let (vals, vecs) = h.hermitian_eig().unwrap();
        // residual ||h v - lambda v|| per eigenpair
        for k in 0..20 {
            let v: Vec<C64> = (0..20).map(|i| vecs.get(i, k)).collect();
            let hv = h.mul_vec(&v).unwrap();
            let res: f64 = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * c(vals[k], 0.0)).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-8 * norm, "residual {res} for eigenpair {k}");
        }
        // orthonormality
        for k in 0..20 {
            for l in 0..20 {
                let dot: C64 =
                    (0..20).map(|i| vecs.get(i, k).conj() * vecs.get(i, l)).sum();
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((dot - c(expected, 0.0)).norm() < 1e-8);
            }
        }
        // eigenvalue sum equals trace
        let sum: f64 = vals.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-8 * norm.max(1.0));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, c(1.0, 0.0));
        match m.hermitian_eig() {
            Err(Error::NotHermitian { asymmetry }) => assert!((asymmetry - 1.0).abs() < 1e-12),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let x = ComplexMatrix::identity(2).solve(&b).unwrap();
        assert!((x[0] - b[0]).norm() < 1e-14);
        assert!((x[1] - b[1]).norm() < 1e-14);

        let mut a = ComplexMatrix::zeros(2, 2);
        a.set(0, 0, c(2.0, 0.0));
        a.set(1, 1, c(4.0, 0.0));
        let x = a.solve(&[c(2.0, 0.0), c(8.0, 0.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((x[1] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_residual_bound_random_50() {
        let mut rng = StdRng::seed_from_u64(23);
        // diagonally dominant, hence well conditioned
        let mut a = random_matrix(&mut rng, 50);
        for i in 0..50 {
            a.set(i, i, a.get(i, i) + c(50.0, 0.0));
        }
        let b: Vec<C64> =
            (0..50).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let x = a.solve(&b).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        let res: f64 =
            ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        let xn: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(res <= 1e-8 * (a.fro_norm() * xn + bn));
    }

    #[test]
    fn solve_detects_singular() {
        let a = ComplexMatrix::zeros(3, 3);
        match a.solve(&[c(1.0, 0.0); 3]) {
            Err(Error::Singular { .. }) => {}
            other => panic!("expected Singular, got {other:?}"),
        }
    }

    #[test]
    fn sparse_solve_matches_dense() {
        let mut rng = StdRng::seed_from_u64(31);
        let mut a = random_matrix(&mut rng, 30);
        for i in 0..30 {
            a.set(i, i, a.get(i, i) + c(30.0, 0.0));
        }
        let b: Vec<C64> =
            (0..30).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let xd = a.solve(&b).unwrap();
        let xs = a.to_sparse().solve_sparse(&b).unwrap();
        for (p, q) in xd.iter().zip(&xs) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn trace_norm_examples() {
        // diag(0.5, -0.5) -> 1.0
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, c(0.5, 0.0));
        m.set(1, 1, c(-0.5, 0.0));
        assert!((m.trace_norm_hermitian().unwrap() - 1.0).abs() < 1e-12);

        // any density matrix -> 1.0
        let mut rho = ComplexMatrix::zeros(3, 3);
        rho.set(0, 0, c(0.2, 0.0));
        rho.set(1, 1, c(0.3, 0.0));
        rho.set(2, 2, c(0.5, 0.0));
        assert!((rho.trace_norm_hermitian().unwrap() - 1.0).abs() < 1e-12);

        let mut n = ComplexMatrix::zeros(2, 2);
        n.set(0, 1, c(1.0, 0.0));
        assert!(n.trace_norm_hermitian().is_err());
    }

    #[test]
    fn trace_norm_bell_partial_transpose() {
        // Partial transpose of the two-qubit Bell state (|00> + |11>)/sqrt(2)
        // has eigenvalues {1/2, 1/2, 1/2, -1/2}; trace norm 2.
        let mut pt = ComplexMatrix::zeros(4, 4);
        // rho = 1/2 (|00><00| + |00><11| + |11><00| + |11><11|)
        // PT over the second qubit swaps |00><11| -> |01><10|.
        pt.set(0, 0, c(0.5, 0.0));
        pt.set(3, 3, c(0.5, 0.0));
        pt.set(1, 2, c(0.5, 0.0));
        pt.set(2, 1, c(0.5, 0.0));
        assert!((pt.trace_norm_hermitian().unwrap() - 2.0).abs() < 1e-12);
    }
}
