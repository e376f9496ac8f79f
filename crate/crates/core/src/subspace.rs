//! Subspaces of `C^n` carried by orthonormal bases, with meets, joins,
//! complements and principal-angle cosines.
//!
//! Intersections are read off principal vectors: the SVD of `Ba* Bb` gives the
//! cosines of the principal angles and a cosine of at least `1 - cos_atol`
//! marks a shared direction. `meet`, `join` and `ominus` all use that single
//! rule so the dimension formula `dim(M+N) = dim M + dim N - dim(M∩N)` holds
//! exactly.

use crate::numeric::{self, full_svd, orthonormal_complement, orthonormalize, ranked_svd, zeros};
use crate::scalar::{CMat, Real, Tolerance};
use crate::{Error, Result};

/// A subspace of `C^ambient` given by orthonormal basis columns.
#[derive(Clone, Debug)]
pub struct Subspace<R: Real> {
    basis: CMat<R>,
}

impl<R: Real> Subspace<R> {
    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(basis: CMat<R>) -> Self {
        Subspace { basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { basis: zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { basis: numeric::identity(ambient) }
    }

    /// Orthonormal basis of the column span of `generators`.
    pub fn from_span(generators: &CMat<R>, tol: &Tolerance<R>) -> Result<Self> {
        numeric::check_finite(generators)?;
        Ok(Self::span_with_scale(generators, None, tol))
    }

    /// Column span where "zero" singular values are judged against `scale` rather
    /// than the generators' own largest singular value.
    pub fn from_span_scaled(generators: &CMat<R>, scale: R, tol: &Tolerance<R>) -> Result<Self> {
        numeric::check_finite(generators)?;
        Ok(Self::span_with_scale(generators, Some(scale), tol))
    }

    fn span_with_scale(generators: &CMat<R>, scale: Option<R>, tol: &Tolerance<R>) -> Self {
        let svd = ranked_svd(generators, scale, tol);
        Subspace { basis: svd.u.columns(0, svd.rank).into_owned() }
    }

    /// Range of a matrix.
    pub fn range_of(m: &CMat<R>, tol: &Tolerance<R>) -> Result<Self> {
        Self::from_span(m, tol)
    }

    /// Nullspace of a matrix.
    pub fn kernel_of(m: &CMat<R>, tol: &Tolerance<R>) -> Result<Self> {
        Ok(Self::from_span(&m.adjoint(), tol)?.complement())
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMat<R> {
        &self.basis
    }

    /// Orthogonal projection `B B*` onto the subspace.
    pub fn projector(&self) -> CMat<R> {
        &self.basis * self.basis.adjoint()
    }

    pub fn complement(&self) -> Self {
        Subspace { basis: orthonormal_complement(&self.basis, self.ambient()) }
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of C^{} and C^{}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    /// Principal-angle cosines between the two subspaces, descending, `min(dim a, dim b)` of them.
    pub fn principal_cosines(&self, other: &Self) -> Result<Vec<R>> {
        self.same_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Vec::new());
        }
        let s = numeric::singular_values(&(self.basis.adjoint() * &other.basis));
        Ok(s.iter().map(|&x| x.min(R::one())).collect())
    }

    /// Splits `self` along the principal vectors against `other`: the directions
    /// shared with `other` and the rest.
    fn split_against(&self, other: &Self, tol: &Tolerance<R>) -> (CMat<R>, CMat<R>) {
        let ka = self.dim();
        if ka == 0 || other.is_zero() {
            return (zeros(self.ambient(), 0), self.basis.clone());
        }
        let svd = full_svd(&(self.basis.adjoint() * &other.basis));
        let threshold = R::one() - tol.cos_atol;
        let shared = svd.s.iter().take_while(|&&s| s >= threshold).count();
        let rotated = &self.basis * &svd.u;
        (rotated.columns(0, shared).into_owned(), rotated.columns(shared, ka - shared).into_owned())
    }

    /// Intersection `self ∩ other`.
    pub fn meet(&self, other: &Self, tol: &Tolerance<R>) -> Result<Self> {
        self.same_ambient(other)?;
        let (shared, _) = self.split_against(other, tol);
        Ok(Subspace { basis: shared })
    }

    /// `self ⊖ other = self ∩ (self ∩ other)^⊥`.
    pub fn ominus(&self, other: &Self, tol: &Tolerance<R>) -> Result<Self> {
        self.same_ambient(other)?;
        let (_, rest) = self.split_against(other, tol);
        Ok(Subspace { basis: rest })
    }

    /// Sum `self + other`.
    pub fn join(&self, other: &Self, tol: &Tolerance<R>) -> Result<Self> {
        self.same_ambient(other)?;
        let (_, extra) = other.split_against(self, tol);
        if extra.ncols() == 0 {
            return Ok(self.clone());
        }
        // components of the non-shared principal vectors orthogonal to self
        let residual = &extra - &self.basis * (self.basis.adjoint() * &extra);
        let mut combined = zeros(self.ambient(), self.dim() + extra.ncols());
        combined.columns_mut(0, self.dim()).copy_from(&self.basis);
        combined.columns_mut(self.dim(), extra.ncols()).copy_from(&orthonormalize(&residual));
        Ok(Subspace { basis: orthonormalize(&combined) })
    }

    /// Dixmier cosine `||P_M P_N||`: the largest principal cosine.
    pub fn dixmier_cos(&self, other: &Self) -> Result<R> {
        Ok(self.principal_cosines(other)?.first().copied().unwrap_or(R::zero()))
    }

    /// Friedrichs cosine: the Dixmier cosine of `M ⊖ N` against `N ⊖ M`.
    pub fn friedrichs_cos(&self, other: &Self, tol: &Tolerance<R>) -> Result<R> {
        let a = self.ominus(other, tol)?;
        let b = other.ominus(self, tol)?;
        a.dixmier_cos(&b)
    }

    /// Equal dimensions and every principal cosine at least `1 - cos_atol`.
    pub fn approx_eq(&self, other: &Self, tol: &Tolerance<R>) -> bool {
        if self.ambient() != other.ambient() || self.dim() != other.dim() {
            return false;
        }
        match self.principal_cosines(other) {
            Ok(cos) => cos.iter().all(|&x| x >= R::one() - tol.cos_atol),
            Err(_) => false,
        }
    }

    /// Whether `self` lies inside `other` (every principal cosine of `self` at least `1 - cos_atol`).
    pub fn is_within(&self, other: &Self, tol: &Tolerance<R>) -> bool {
        if self.ambient() != other.ambient() || self.dim() > other.dim() {
            return false;
        }
        self.meet(other, tol).map(|m| m.dim() == self.dim()).unwrap_or(false)
    }
}

/// The four cases for `(||P(I-Q)||, ||Q(I-P)||)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairCase {
    /// Both norms below one.
    BothBelow = 1,
    /// `||P(I-Q)|| = 1 > ||Q(I-P)||`.
    FirstAtOne = 2,
    /// `||Q(I-P)|| = 1 > ||P(I-Q)||`.
    SecondAtOne = 3,
    /// Both norms equal one.
    BothAtOne = 4,
}

impl PairCase {
    pub fn id(self) -> u8 {
        self as u8
    }

    fn from_flags(first_at_one: bool, second_at_one: bool) -> Self {
        match (first_at_one, second_at_one) {
            (false, false) => PairCase::BothBelow,
            (true, false) => PairCase::FirstAtOne,
            (false, true) => PairCase::SecondAtOne,
            (true, true) => PairCase::BothAtOne,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PairClass<R> {
    pub case: PairCase,
    pub norm_p_minus_q: R,
    /// `||P(I-Q)||`
    pub norm_p_iq: R,
    /// `||Q(I-P)||`
    pub norm_q_ip: R,
    /// Case read from the sums `R(P)+N(Q)` and `N(P)+R(Q)` instead of the norms.
    pub case_from_subspaces: PairCase,
}

impl<R> PairClass<R> {
    pub fn consistent(&self) -> bool {
        self.case == self.case_from_subspaces
    }
}

/// Checks that `p` is an orthogonal projection within `eq_atol` and returns its range.
pub fn projector_range<R: Real>(p: &CMat<R>, what: &'static str, tol: &Tolerance<R>) -> Result<Subspace<R>> {
    numeric::check_finite(p)?;
    numeric::check_square(p)?;
    let residual = numeric::projector_residual(p);
    if residual > tol.eq_atol {
        return Err(Error::NotProjector { what, residual: residual.as_f64() });
    }
    Subspace::from_span_scaled(p, R::one(), tol)
}

/// Classifies a pair of orthogonal projections by the norms of `P(I-Q)` and `Q(I-P)`.
pub fn classify_pair<R: Real>(p: &CMat<R>, q: &CMat<R>, tol: &Tolerance<R>) -> Result<PairClass<R>> {
    let rp = projector_range(p, "P", tol)?;
    let rq = projector_range(q, "Q", tol)?;
    if rp.ambient() != rq.ambient() {
        return Err(Error::DimensionMismatch("P and Q differ in size".into()));
    }
    let n = rp.ambient();
    let id = numeric::identity::<R>(n);
    let norm_p_minus_q = numeric::dist(p, q);
    let norm_p_iq = numeric::op_norm(&(p * (&id - q)));
    let norm_q_ip = numeric::op_norm(&(q * (&id - p)));
    let one = R::one() - tol.eq_atol;
    let case = PairCase::from_flags(norm_p_iq >= one, norm_q_ip >= one);

    // R(P) + N(Q) = H with a direct sum iff ||P(I-Q)|| < 1, same for N(P) + R(Q)
    let nq = rq.complement();
    let np = rp.complement();
    let first_sum = rp.join(&nq, tol)?;
    let second_sum = np.join(&rq, tol)?;
    let first_direct = rp.meet(&nq, tol)?.is_zero();
    let second_direct = np.meet(&rq, tol)?.is_zero();
    let case_from_subspaces = match (first_sum.dim() == n, second_sum.dim() == n) {
        (true, true) if first_direct && second_direct => PairCase::BothBelow,
        (true, false) => PairCase::FirstAtOne,
        (false, true) => PairCase::SecondAtOne,
        (false, false) => PairCase::BothAtOne,
        // both sums full but not direct cannot happen in finite dimension
        (true, true) => PairCase::from_flags(!first_direct, !second_direct),
    };
    Ok(PairClass { case, norm_p_minus_q, norm_p_iq, norm_q_ip, case_from_subspaces })
}
