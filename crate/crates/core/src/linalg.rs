//! Incremental orthogonal-projection engine.
//!
//! [`ActiveSetState`] keeps an orthonormal basis of the selected columns, the
//! current residual `Q_M y`, and every candidate column residualized against
//! the basis (`Q_M X_j`). Adding a column costs one pass over the candidate
//! block, so the marginal SSR reduction of every candidate is available after
//! each update without refitting.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Candidates whose residualized squared norm falls below this fraction of
/// their original squared norm lie in the span of the model.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Dense `n x p` design, stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DesignMatrix {
    /// Builds a design from column-major storage.
    pub fn from_column_major(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::EmptyDesign);
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "design",
                index,
            });
        }
        Ok(Self { n, p, values })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * p);
        for col in columns {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: col.len(),
                });
            }
            values.extend_from_slice(col);
        }
        Self::from_column_major(n, p, values)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut values = vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                values[j * n + i] = v;
            }
        }
        Self::from_column_major(n, p, values)
    }

    pub fn from_fn(n: usize, p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * p);
        for j in 0..p {
            for i in 0..n {
                values.push(f(i, j));
            }
        }
        Self::from_column_major(n, p, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.values
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    /// Copies the listed columns into a new design.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(self.n * cols.len());
        for &j in cols {
            if j >= self.p {
                return Err(Error::IndexOutOfRange { index: j, p: self.p });
            }
            values.extend_from_slice(self.column(j));
        }
        Self::from_column_major(self.n, cols.len(), values)
    }

    /// Copies the listed rows into a new design.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * self.p);
        for col in self.columns() {
            for &i in rows {
                if i >= self.n {
                    return Err(Error::IndexOutOfRange { index: i, p: self.n });
                }
                values.push(col[i]);
            }
        }
        Self::from_column_major(rows.len(), self.p, values)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.n, self.p, &self.values)
    }
}

/// Response vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseVector(Vec<f64>);

impl ResponseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "response",
                index,
            });
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| v * c).collect())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self(rows.iter().map(|&i| self.0[i]).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ResponseVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Inner product with four partial sums.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ac = a.chunks_exact(4);
    let bc = b.chunks_exact(4);
    let (at, bt) = (ac.remainder(), bc.remainder());
    for (xs, ys) in ac.zip(bc) {
        for i in 0..4 {
            acc[i] += xs[i] * ys[i];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in at.iter().zip(bt) {
        s += x * y;
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Marginal SSR reduction from adding column `index` to the current model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateGain {
    pub index: usize,
    pub gain: f64,
    pub degenerate: bool,
}

/// Outcome of orthonormalizing one column during [`ActiveSetState::add_columns`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AddedColumn {
    pub index: usize,
    /// SSR reduction realized by this column given everything added before it.
    pub realized_gain: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct ActiveSetState {
    n: usize,
    p: usize,
    selected: Vec<usize>,
    in_model: Vec<bool>,
    /// Orthonormal basis vectors, each of length `n`, stored back to back.
    basis: Vec<f64>,
    residual: Vec<f64>,
    /// Column `j` holds `Q_M X_j`; columns in the model are zeroed.
    resid_columns: Vec<f64>,
    resid_norms_sq: Vec<f64>,
    /// `(Q_M X_j)^T Q_M y` for every column.
    resid_dots: Vec<f64>,
    orig_norms_sq: Vec<f64>,
    y_norm_sq: f64,
    ssr: f64,
}

impl ActiveSetState {
    /// Starts from the null model: residual `y`, candidate columns untouched.
    pub fn new(x: &DesignMatrix, y: &ResponseVector) -> Result<Self> {
        if y.len() != x.n() {
            return Err(Error::DimensionMismatch {
                expected: x.n(),
                got: y.len(),
            });
        }
        let residual = y.as_slice().to_vec();
        let resid_columns = x.as_column_major().to_vec();
        let orig_norms_sq: Vec<f64> = x.columns().map(|c| dot(c, c)).collect();
        let resid_dots = x.columns().map(|c| dot(c, &residual)).collect();
        let ssr = dot(&residual, &residual);
        Ok(Self {
            n: x.n(),
            p: x.p(),
            selected: Vec::new(),
            in_model: vec![false; x.p()],
            basis: Vec::new(),
            residual,
            resid_columns,
            resid_norms_sq: orig_norms_sq.clone(),
            resid_dots,
            orig_norms_sq,
            y_norm_sq: ssr,
            ssr,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn is_selected(&self, j: usize) -> bool {
        self.in_model.get(j).copied().unwrap_or(false)
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len() / self.n
    }

    pub fn basis_vector(&self, k: usize) -> &[f64] {
        &self.basis[k * self.n..(k + 1) * self.n]
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn resid_column(&self, j: usize) -> &[f64] {
        &self.resid_columns[j * self.n..(j + 1) * self.n]
    }

    pub fn resid_norms_sq(&self) -> &[f64] {
        &self.resid_norms_sq
    }

    /// `|X_j^T Q_M y|` is the marginal score against the current residual.
    pub fn resid_dot(&self, j: usize) -> f64 {
        self.resid_dots[j]
    }

    pub fn y_norm_sq(&self) -> f64 {
        self.y_norm_sq
    }

    /// Cached `||Q_M y||^2`.
    pub fn sum_squared_residuals(&self) -> f64 {
        self.ssr
    }

    pub fn is_degenerate(&self, j: usize) -> bool {
        let orig = self.orig_norms_sq[j];
        orig == 0.0 || self.resid_norms_sq[j] < DEGENERACY_TOL * orig
    }

    /// `|X_j^T Q_M y|^2 / ||Q_M X_j||^2`, or a zero degenerate gain when
    /// `X_j` lies (numerically) in the span of the model.
    pub fn candidate_gain(&self, j: usize) -> Result<CandidateGain> {
        if j >= self.p {
            return Err(Error::IndexOutOfRange { index: j, p: self.p });
        }
        if self.in_model[j] {
            return Err(Error::AlreadySelected(j));
        }
        Ok(self.gain_unchecked(j))
    }

    #[inline]
    pub(crate) fn gain_unchecked(&self, j: usize) -> CandidateGain {
        if self.is_degenerate(j) {
            return CandidateGain {
                index: j,
                gain: 0.0,
                degenerate: true,
            };
        }
        let d = self.resid_dots[j];
        CandidateGain {
            index: j,
            gain: d * d / self.resid_norms_sq[j],
            degenerate: false,
        }
    }

    /// Adds `indices` to the model in order.
    ///
    /// Each residualized column is orthogonalized against the columns added
    /// earlier in the same call, then once more against the whole basis.
    /// Columns that turn out degenerate are recorded as selected but add no
    /// basis vector. All remaining candidates are then residualized against
    /// the new block in a single pass.
    pub fn add_columns(&mut self, indices: &[usize]) -> Result<Vec<AddedColumn>> {
        for (pos, &j) in indices.iter().enumerate() {
            if j >= self.p {
                return Err(Error::IndexOutOfRange { index: j, p: self.p });
            }
            if self.in_model[j] || indices[..pos].contains(&j) {
                return Err(Error::AlreadySelected(j));
            }
        }
        let size = self.selected.len() + indices.len();
        if size > self.n {
            return Err(Error::ModelTooLarge { size, n: self.n });
        }

        let n = self.n;
        let old_basis_len = self.basis.len();
        let mut added = Vec::with_capacity(indices.len());
        let mut v = vec![0.0; n];
        for &j in indices {
            v.copy_from_slice(&self.resid_columns[j * n..(j + 1) * n]);
            // MGS against this block, then a full reorthogonalization pass.
            for q in self.basis[old_basis_len..].chunks_exact(n) {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
            for q in self.basis.chunks_exact(n) {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
            let norm_sq = dot(&v, &v);
            let orig = self.orig_norms_sq[j];
            let degenerate = orig == 0.0 || norm_sq < DEGENERACY_TOL * orig;
            let mut realized_gain = 0.0;
            if !degenerate {
                let inv = norm_sq.sqrt().recip();
                v.iter_mut().for_each(|x| *x *= inv);
                let c = dot(&v, &self.residual);
                axpy(-c, &v, &mut self.residual);
                realized_gain = c * c;
                self.basis.extend_from_slice(&v);
            }
            self.in_model[j] = true;
            self.selected.push(j);
            self.resid_columns[j * n..(j + 1) * n].fill(0.0);
            self.resid_norms_sq[j] = 0.0;
            self.resid_dots[j] = 0.0;
            added.push(AddedColumn {
                index: j,
                realized_gain,
                degenerate,
            });
        }

        let block = &self.basis[old_basis_len..];
        if !block.is_empty() {
            project_out_block(
                block,
                n,
                &mut self.resid_columns,
                &self.residual,
                &mut self.resid_norms_sq,
                &mut self.resid_dots,
            );
        }
        self.ssr = dot(&self.residual, &self.residual);
        Ok(added)
    }
}

/// `R <- R - B (B^T R)` for the orthonormal `block` `B` and the column-major
/// `n x p` matrix `R`, then `norms[j] = ||R_j||^2` and `dots[j] = R_j . r`.
/// Model columns are zero and stay zero.
fn project_out_block(
    block: &[f64],
    n: usize,
    cols: &mut [f64],
    residual: &[f64],
    norms: &mut [f64],
    dots: &mut [f64],
) {
    for group in block.chunks(4 * n) {
        match group.len() / n {
            1 => project_group::<1>(group, n, cols, residual, norms, dots),
            2 => project_group::<2>(group, n, cols, residual, norms, dots),
            3 => project_group::<3>(group, n, cols, residual, norms, dots),
            _ => project_group::<4>(group, n, cols, residual, norms, dots),
        }
    }
}

/// One sweep per column: `K` inner products, then the update fused with the
/// norm and residual inner product.
fn project_group<const K: usize>(
    group: &[f64],
    n: usize,
    cols: &mut [f64],
    residual: &[f64],
    norms: &mut [f64],
    dots: &mut [f64],
) {
    let q: [&[f64]; K] = std::array::from_fn(|b| &group[b * n..(b + 1) * n]);
    let body = n - n % 4;
    for (j, col) in cols.chunks_exact_mut(n).enumerate() {
        let c: [f64; K] = std::array::from_fn(|b| dot(q[b], col));
        let mut ns = [0.0f64; 4];
        let mut ds = [0.0f64; 4];
        for (t, (xs, rs)) in col.chunks_exact_mut(4).zip(residual.chunks_exact(4)).enumerate() {
            let qt: [&[f64; 4]; K] = std::array::from_fn(|b| q[b][4 * t..4 * t + 4].try_into().unwrap());
            for l in 0..4 {
                let mut v = xs[l];
                for b in 0..K {
                    v -= c[b] * qt[b][l];
                }
                xs[l] = v;
                ns[l] += v * v;
                ds[l] += v * rs[l];
            }
        }
        let mut norm_sq = (ns[0] + ns[1]) + (ns[2] + ns[3]);
        let mut rdot = (ds[0] + ds[1]) + (ds[2] + ds[3]);
        for t in body..n {
            let mut v = col[t];
            for b in 0..K {
                v -= c[b] * q[b][t];
            }
            col[t] = v;
            norm_sq += v * v;
            rdot += v * residual[t];
        }
        norms[j] = norm_sq;
        dots[j] = rdot;
    }
}

/// Least-squares coefficients of `y` on the listed columns through the
/// SVD pseudo-inverse (minimum-norm for rank-deficient blocks).
pub fn least_squares(x: &DesignMatrix, cols: &[usize], y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            got: y.len(),
        });
    }
    if cols.is_empty() {
        return Ok(Vec::new());
    }
    let sub = x.select_columns(cols)?.to_nalgebra();
    let rhs = nalgebra::DVector::from_column_slice(y);
    let svd = sub.svd(true, true);
    let tol = svd.singular_values.max() * (x.n().max(cols.len()) as f64) * f64::EPSILON;
    let coef = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::ConditionUndefined(e.to_string()))?;
    Ok(coef.iter().copied().collect())
}
