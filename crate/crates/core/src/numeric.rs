//! Dense complex kernels: SVD-backed rank, pseudoinverse, polar decomposition,
//! positive square root and the eigen helpers used across the crate.
//!
//! Every decision about "is this singular value zero" goes through
//! [`rank_cutoff`] so that ranges, nullspaces and ranks computed in different
//! modules agree with each other.

use std::cmp::Ordering;

use nalgebra::DVector;

use crate::scalar::{c, CMat, Real, Tolerance, C};
use crate::{Error, Result};

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    CMat::identity(n, n)
}

pub fn zeros<R: Real>(rows: usize, cols: usize) -> CMat<R> {
    CMat::zeros(rows, cols)
}

/// Builds a complex matrix from real row-major entries.
pub fn from_real_rows<R: Real>(rows: &[&[f64]]) -> CMat<R> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(nrows, ncols, |i, j| c(R::lit(rows[i][j])))
}

/// Diagonal matrix from real entries.
pub fn diag<R: Real>(entries: &[f64]) -> CMat<R> {
    let n = entries.len();
    CMat::from_fn(n, n, |i, j| if i == j { c(R::lit(entries[i])) } else { C::new(R::zero(), R::zero()) })
}

pub fn check_finite<R: Real>(m: &CMat<R>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn check_square<R: Real>(m: &CMat<R>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

fn check_nonempty<R: Real>(m: &CMat<R>) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Empty);
    }
    check_finite(m)
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values<R: Real>(m: &CMat<R>) -> DVector<R> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let mut s = R::singular_values(m);
    sort_desc(&mut s);
    DVector::from_vec(s)
}

fn sort_desc<R: Real>(v: &mut [R]) {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
}

/// Operator norm: the largest singular value (0 for empty matrices).
pub fn op_norm<R: Real>(m: &CMat<R>) -> R {
    singular_values(m).iter().copied().fold(R::zero(), R::max)
}

/// Operator-norm distance between two matrices of equal shape.
pub fn dist<R: Real>(a: &CMat<R>, b: &CMat<R>) -> R {
    op_norm(&(a - b))
}

/// `max(||m - m*||, ||m^2 - m||)`: how far a square matrix is from an orthogonal projection.
pub fn projector_residual<R: Real>(m: &CMat<R>) -> R {
    let herm = dist(m, &m.adjoint());
    let idem = dist(&(m * m), m);
    herm.max(idem)
}

pub fn hermitian_residual<R: Real>(m: &CMat<R>) -> R {
    dist(m, &m.adjoint())
}

/// Rank cutoff `rank_rel * max(rows, cols) * scale`.
pub fn rank_cutoff<R: Real>(rows: usize, cols: usize, scale: R, tol: &Tolerance<R>) -> R {
    tol.rank_rel * R::from_usize(rows.max(cols)).unwrap_or(R::one()) * scale
}

/// Number of singular values strictly above `rank_rel * max(m, n) * sigma_max`.
pub fn numerical_rank<R: Real>(m: &CMat<R>, tol: &Tolerance<R>) -> Result<usize> {
    check_nonempty(m)?;
    let s = singular_values(m);
    let smax = s.iter().copied().fold(R::zero(), R::max);
    let cut = rank_cutoff(m.nrows(), m.ncols(), smax, tol);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Numerical rank against an externally supplied scale instead of the matrix's own
/// largest singular value.
///
/// Used for differences such as `A - A^2` whose own norm may be pure rounding noise
/// while the operands are of unit size.
pub fn numerical_rank_scaled<R: Real>(m: &CMat<R>, scale: R, tol: &Tolerance<R>) -> Result<usize> {
    check_nonempty(m)?;
    let s = singular_values(m);
    let smax = s.iter().copied().fold(R::zero(), R::max);
    let cut = rank_cutoff(m.nrows(), m.ncols(), smax.max(scale), tol);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Thin SVD with descending singular values and the rank decided by `tol`.
pub(crate) struct RankedSvd<R: Real> {
    pub u: CMat<R>,
    pub s: DVector<R>,
    pub v: CMat<R>,
    pub rank: usize,
}

pub(crate) fn ranked_svd<R: Real>(m: &CMat<R>, scale: Option<R>, tol: &Tolerance<R>) -> RankedSvd<R> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return RankedSvd { u: zeros(rows, 0), s: DVector::zeros(0), v: zeros(cols, 0), rank: 0 };
    }
    let (u, sv, v) = R::thin_svd(m);
    let k = sv.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let u = u.select_columns(order.iter());
    let v = v.select_columns(order.iter());
    let s = DVector::from_iterator(k, order.iter().map(|&i| sv[i]));
    let smax = if k > 0 { s[0] } else { R::zero() };
    let cut = rank_cutoff(rows, cols, smax.max(scale.unwrap_or(R::zero())), tol);
    let rank = s.iter().filter(|&&x| x > cut).count();
    RankedSvd { u, s, v, rank }
}

/// Full SVD `m = U diag(s) V*` with square unitary `U` (rows x rows) and `V`
/// (cols x cols); `s` has `min(rows, cols)` entries in descending order.
pub struct FullSvd<R: Real> {
    pub u: CMat<R>,
    pub s: DVector<R>,
    pub v: CMat<R>,
}

pub fn full_svd<R: Real>(m: &CMat<R>) -> FullSvd<R> {
    let tol = Tolerance::default();
    let thin = ranked_svd(m, None, &tol);
    let u = extend_to_unitary(&thin.u, m.nrows());
    let v = extend_to_unitary(&thin.v, m.ncols());
    FullSvd { u, s: thin.s, v }
}

fn extend_to_unitary<R: Real>(cols: &CMat<R>, n: usize) -> CMat<R> {
    if cols.ncols() >= n {
        return cols.columns(0, n).into_owned();
    }
    let comp = orthonormal_complement(cols, n);
    let mut out = zeros(n, cols.ncols() + comp.ncols());
    out.columns_mut(0, cols.ncols()).copy_from(cols);
    out.columns_mut(cols.ncols(), comp.ncols()).copy_from(&comp);
    out
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `basis` inside an `n`-dimensional space.
pub fn orthonormal_complement<R: Real>(basis: &CMat<R>, n: usize) -> CMat<R> {
    let k = basis.ncols();
    if k == 0 {
        return identity(n);
    }
    if k >= n {
        return zeros(n, 0);
    }
    let residual = identity::<R>(n) - basis * basis.adjoint();
    let (_, vecs) = hermitian_eigen(&residual);
    // eigenvalues ascending: the top n - k are ~1
    vecs.columns(k, n - k).into_owned()
}

/// Eigen-decomposition of the Hermitian part of `a`; eigenvalues ascending with
/// matching eigenvector columns.
pub fn hermitian_eigen<R: Real>(a: &CMat<R>) -> (DVector<R>, CMat<R>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), zeros(0, 0));
    }
    let half = c(R::lit(0.5));
    let h = (a + a.adjoint()) * half;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[x].partial_cmp(&eig.eigenvalues[y]).unwrap_or(Ordering::Equal).then(x.cmp(&y))
    });
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vecs = eig.eigenvectors.select_columns(order.iter());
    (vals, vecs)
}

/// Applies a real function to the spectrum of the Hermitian part of `a`.
pub fn hermitian_fn<R: Real>(a: &CMat<R>, f: impl Fn(R) -> R) -> CMat<R> {
    let (vals, vecs) = hermitian_eigen(a);
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let fl = c(f(l));
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= fl);
    }
    scaled * vecs.adjoint()
}

/// Smallest eigenvalue of the Hermitian part (+inf for the empty matrix).
pub fn min_eigenvalue<R: Real>(a: &CMat<R>) -> R {
    let (vals, _) = hermitian_eigen(a);
    vals.iter().copied().fold(R::max_value().unwrap_or(R::one()), R::min)
}

/// Moore-Penrose pseudoinverse via the rank-truncated SVD.
pub fn pinv<R: Real>(m: &CMat<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    check_nonempty(m)?;
    let svd = ranked_svd(m, None, tol);
    let mut out = zeros(m.ncols(), m.nrows());
    for k in 0..svd.rank {
        let inv = c(R::one() / svd.s[k]);
        out += svd.v.column(k) * svd.u.column(k).adjoint() * inv;
    }
    Ok(out)
}

/// Largest residual among the four Penrose identities for `x` as pseudoinverse of `m`.
pub fn penrose_residual<R: Real>(m: &CMat<R>, x: &CMat<R>) -> R {
    let mx = m * x;
    let xm = x * m;
    [dist(&(&mx * m), m), dist(&(&xm * x), x), hermitian_residual(&mx), hermitian_residual(&xm)]
        .into_iter()
        .fold(R::zero(), R::max)
}

/// Polar factors of a square matrix `T = V |T| = |T*| V`.
#[derive(Clone, Debug)]
pub struct Polar<R: Real> {
    /// Isometric part: partial isometry with `N(V) = N(T)` and `R(V) = R(T)`.
    pub v: CMat<R>,
    /// `|T| = (T*T)^{1/2}`.
    pub abs: CMat<R>,
    /// `|T*| = (TT*)^{1/2}`.
    pub abs_adj: CMat<R>,
    pub rank: usize,
}

pub fn polar_decompose<R: Real>(m: &CMat<R>, tol: &Tolerance<R>) -> Result<Polar<R>> {
    polar_decompose_scaled(m, None, tol)
}

/// Polar decomposition with the rank cutoff taken against `max(sigma_max, scale)`.
pub fn polar_decompose_scaled<R: Real>(m: &CMat<R>, scale: Option<R>, tol: &Tolerance<R>) -> Result<Polar<R>> {
    check_nonempty(m)?;
    let n = check_square(m)?;
    let svd = ranked_svd(m, scale, tol);
    let mut v = zeros(n, n);
    let mut abs = zeros(n, n);
    let mut abs_adj = zeros(n, n);
    for k in 0..svd.rank {
        let uk = svd.u.column(k);
        let vk = svd.v.column(k);
        let s = c(svd.s[k]);
        v += uk * vk.adjoint();
        abs += vk * vk.adjoint() * s;
        abs_adj += uk * uk.adjoint() * s;
    }
    Ok(Polar { v, abs, abs_adj, rank: svd.rank })
}

/// Positive square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[psd_floor, 0)` are clamped to zero; anything more negative is
/// rejected. Eigenvalues below `n * eps * max(1, ||a||)` are treated as zero.
pub fn positive_sqrt<R: Real>(a: &CMat<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    check_nonempty(a)?;
    check_square(a)?;
    let scale = op_norm(a).max(R::one());
    let herm = hermitian_residual(a);
    if herm > tol.eq_atol * scale {
        return Err(Error::NotPsd { min_eigenvalue: f64::NAN });
    }
    let (vals, _) = hermitian_eigen(a);
    let lo = vals.iter().copied().fold(R::zero(), R::min);
    if lo < tol.psd_floor * scale {
        return Err(Error::NotPsd { min_eigenvalue: lo.as_f64() });
    }
    Ok(clamped_sqrt(a))
}

/// Square root of the positive part of the Hermitian part of `a`, with
/// eigenvalues below `n * eps * max(1, ||a||)` treated as zero.
pub fn clamped_sqrt<R: Real>(a: &CMat<R>) -> CMat<R> {
    // eigenvalues at rounding level are zeros; their square roots would not be
    let scale = op_norm(a).max(R::one());
    let noise = R::default_epsilon() * R::from_usize(a.nrows()).unwrap_or(R::one()) * scale;
    hermitian_fn(a, |l| if l <= noise { R::zero() } else { l.sqrt() })
}

/// Eigenvalues of a general square matrix from its complex Schur form.
pub fn eigenvalues<R: Real>(m: &CMat<R>) -> Result<Vec<C<R>>> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    check_finite(m)?;
    // the deflation test at machine epsilon can stall; a few ulps is enough
    let schur = [8.0, 64.0]
        .into_iter()
        .find_map(|f| nalgebra::Schur::try_new(m.clone(), R::default_epsilon() * R::lit(f), 10_000))
        .ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Nearest matrix with orthonormal columns and the same column span (polar factor).
pub fn orthonormalize<R: Real>(m: &CMat<R>) -> CMat<R> {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = ranked_svd(m, None, &Tolerance::default());
    let k = m.ncols().min(m.nrows());
    svd.u.columns(0, k) * svd.v.columns(0, k).adjoint()
}
