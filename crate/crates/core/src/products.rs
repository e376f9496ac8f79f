//! The sets `X = {PQ}` and `Y = {PQP}` of products of orthogonal projections.
//!
//! Membership in `X` is decided by `T^2 = T T* T` (or, equivalently, by
//! `||Tx||^2 = <Tx, x>` on `N(T)^⊥`). Every member factors canonically as
//! `P_{R(T)} P_{N(T)^⊥}`; the other factorizations add mutually orthogonal
//! pieces of `R(T)^⊥ ∩ N(T)` to the two ranges. Pairs with a prescribed
//! compression `PQP = A` are parametrized by `(P, A, U, Qhat)` in block form
//! relative to `R(P) ⊕ N(P)`.

use nalgebra::ComplexField;
use rand::Rng;

use crate::numeric::{self, dist, identity, min_eigenvalue, op_norm, polar_decompose_scaled};
use crate::random::{self, random_isometry_between, random_orthogonal_pair_of, rng_from_seed};
use crate::scalar::{CMat, Real, Tolerance};
use crate::subspace::{projector_range, Subspace};
use crate::{Error, Result};

/// A factorization `T = P Q` into orthogonal projections.
#[derive(Clone, Debug)]
pub struct FactorPair<R: Real> {
    pub p: CMat<R>,
    pub q: CMat<R>,
    pub canonical: bool,
}

impl<R: Real> FactorPair<R> {
    /// `||P - Q||`.
    pub fn gap(&self) -> R {
        dist(&self.p, &self.q)
    }

    pub fn product(&self) -> CMat<R> {
        &self.p * &self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// `T^2 = T T* T`
    Crimmins,
    /// `||Tx||^2 = <Tx, x>` for `x ⊥ N(T)`
    Sebestyen,
}

#[derive(Clone, Copy, Debug)]
pub struct Membership<R> {
    pub member: bool,
    pub residual: R,
}

/// `||T^2 - T T* T|| / max(1, ||T||^3)`.
pub fn crimmins_residual<R: Real>(t: &CMat<R>) -> R {
    let lhs = t * t;
    let rhs = t * t.adjoint() * t;
    let scale = op_norm(t).powi(3).max(R::one());
    dist(&lhs, &rhs) / scale
}

/// `||B* T* T B - B* T B|| / max(1, ||T||^2)` with `B` an orthonormal basis of `N(T)^⊥`.
pub fn sebestyen_residual<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<R> {
    let coimage = Subspace::from_span(&t.adjoint(), tol)?;
    if coimage.is_zero() {
        return Ok(R::zero());
    }
    let b = coimage.basis();
    let gram = b.adjoint() * t.adjoint() * t * b;
    let form = b.adjoint() * t * b;
    let scale = op_norm(t).powi(2).max(R::one());
    Ok(dist(&gram, &form) / scale)
}

fn check_operator<R: Real>(t: &CMat<R>) -> Result<usize> {
    numeric::check_finite(t)?;
    let n = numeric::check_square(t)?;
    if n == 0 {
        return Err(Error::Empty);
    }
    Ok(n)
}

/// Decides whether `t` is a product of two orthogonal projections.
pub fn is_in_x<R: Real>(t: &CMat<R>, tol: &Tolerance<R>, criterion: Criterion) -> Result<Membership<R>> {
    check_operator(t)?;
    let residual = match criterion {
        Criterion::Crimmins => crimmins_residual(t),
        Criterion::Sebestyen => sebestyen_residual(t, tol)?,
    };
    Ok(Membership { member: residual <= tol.eq_atol, residual })
}

fn require_x<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<()> {
    let m = is_in_x(t, tol, Criterion::Crimmins)?;
    if !m.member {
        return Err(Error::NotInX { residual: m.residual.as_f64() });
    }
    Ok(())
}

/// `R(T)` and `N(T)^⊥` of a member of `X`.
fn canonical_spaces<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<(Subspace<R>, Subspace<R>)> {
    Ok((Subspace::range_of(t, tol)?, Subspace::from_span(&t.adjoint(), tol)?))
}

/// The canonical factorization `T = P_{R(T)} P_{N(T)^⊥}`.
pub fn canonical_factorization<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<FactorPair<R>> {
    require_x(t, tol)?;
    let (range, coimage) = canonical_spaces(t, tol)?;
    Ok(FactorPair { p: range.projector(), q: coimage.projector(), canonical: true })
}

/// `R(T)^⊥ ∩ N(T)`: the room left for non-canonical factorizations.
pub fn free_space<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<Subspace<R>> {
    let (range, coimage) = canonical_spaces(t, tol)?;
    range.complement().meet(&coimage.complement(), tol)
}

/// Canonical pair followed by `count` seeded random factorizations
/// `P = P_{R(T)} + P_{M1}`, `Q = P_{N(T)^⊥} + P_{N1}` with `M1 ⊥ N1` inside
/// `R(T)^⊥ ∩ N(T)` and `M1 ⊕ N1 ≠ {0}`.
///
/// When that intersection is trivial only the canonical pair is returned.
pub fn sample_factorizations<R: Real>(
    t: &CMat<R>,
    count: usize,
    seed: u64,
    tol: &Tolerance<R>,
) -> Result<Vec<FactorPair<R>>> {
    let canonical = canonical_factorization(t, tol)?;
    let free = free_space(t, tol)?;
    let mut out = vec![canonical.clone()];
    if free.is_zero() {
        return Ok(out);
    }
    let mut rng = rng_from_seed(seed);
    let k = free.dim();
    for _ in 0..count {
        let total = rng.random_range(1..=k);
        let k1 = rng.random_range(0..=total);
        let (m1, n1) = random_orthogonal_pair_of(&free, k1, total - k1, &mut rng);
        out.push(FactorPair { p: &canonical.p + m1.projector(), q: &canonical.q + n1.projector(), canonical: false });
    }
    Ok(out)
}

/// Whether the canonical factorization is the only one.
pub fn factorization_unique<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<bool> {
    require_x(t, tol)?;
    Ok(free_space(t, tol)?.is_zero())
}

/// The canonical pair and its gap `||P - Q||`, the smallest over all factorizations.
pub fn min_norm_pair<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<(FactorPair<R>, R)> {
    let pair = canonical_factorization(t, tol)?;
    let gap = pair.gap();
    Ok((pair, gap))
}

/// Membership in `Y = {PQP}`: `0 <= A <= I` and `dim R(A - A^2) <= dim N(A)`.
pub fn is_in_y<R: Real>(a: &CMat<R>, tol: &Tolerance<R>) -> Result<bool> {
    Ok(y_obstruction(a, tol)?.is_none())
}

/// `None` for members of `Y`, otherwise the reason for rejection.
pub fn y_obstruction<R: Real>(a: &CMat<R>, tol: &Tolerance<R>) -> Result<Option<String>> {
    let n = check_operator(a)?;
    let herm = numeric::hermitian_residual(a);
    if herm > tol.eq_atol {
        return Ok(Some(format!("not Hermitian (residual {:e})", herm.as_f64())));
    }
    let lo = min_eigenvalue(a);
    if lo < tol.psd_floor {
        return Ok(Some(format!("not positive (eigenvalue {:e})", lo.as_f64())));
    }
    let norm = op_norm(a);
    if norm > R::one() + tol.eq_atol {
        return Ok(Some(format!("norm {} exceeds 1", norm.as_f64())));
    }
    let rank_a = numeric::numerical_rank(a, tol)?;
    let rank_defect = numeric::numerical_rank_scaled(&(a - a * a), R::one(), tol)?;
    if rank_defect > n - rank_a {
        return Ok(Some(format!("dim R(A - A^2) = {rank_defect} exceeds dim N(A) = {}", n - rank_a)));
    }
    Ok(None)
}

fn require_y<R: Real>(a: &CMat<R>, tol: &Tolerance<R>) -> Result<()> {
    match y_obstruction(a, tol)? {
        None => Ok(()),
        Some(reason) => Err(Error::NotInY(reason)),
    }
}

/// Gap statistics over sampled pairs `(P, Q)` with `PQP = S`.
#[derive(Clone, Debug)]
pub struct YsNorms<R> {
    /// `||P_{R(S)} - S||^{1/2}`.
    pub canonical_norm: R,
    pub canonical_samples: usize,
    pub other_samples: usize,
    /// Largest `| ||P - Q||^2 - ||P_{R(S)} - S|| |` over canonical samples.
    pub canonical_deviation: R,
    /// Smallest gap among non-canonical samples.
    pub other_min_gap: Option<R>,
    /// Canonical samples sit at `canonical_norm` and all others at 1.
    pub two_strata: bool,
}

/// `||P_{R(T)} - P_{N(T)^⊥}||` for any `T` with `T T* = S`, plus a sampled check
/// that every other pair in `{(P, Q): PQP = S}` has gap 1.
pub fn ys_norms<R: Real>(s: &CMat<R>, tol: &Tolerance<R>) -> Result<YsNorms<R>> {
    ys_norms_sampled(s, 6, 0, tol)
}

pub fn ys_norms_sampled<R: Real>(s: &CMat<R>, samples: usize, seed: u64, tol: &Tolerance<R>) -> Result<YsNorms<R>> {
    require_y(s, tol)?;
    let range = Subspace::range_of(s, tol)?;
    let p = range.projector();
    let defect = op_norm(&(&p - s));
    let canonical_norm = defect.sqrt();

    let mut rng = rng_from_seed(seed);
    let null_p = range.complement();
    let init = Subspace::from_span_scaled(&(s - s * s), R::one(), tol)?;
    let mut canonical_samples = 0;
    let mut other_samples = 0;
    let mut canonical_deviation = R::zero();
    let mut other_min_gap: Option<R> = None;
    let mut record = |pair: &FactorPair<R>, canonical: bool| {
        let gap = pair.gap();
        if canonical {
            canonical_samples += 1;
            canonical_deviation = canonical_deviation.max((gap * gap - defect).abs());
        } else {
            other_samples += 1;
            other_min_gap = Some(other_min_gap.map_or(gap, |g: R| g.min(gap)));
        }
    };
    for i in 0..samples {
        let rest = null_p.dim() - init.dim();
        let qhat_dim = rng.random_range(0..=rest);
        let (w, qhat_space) = random_orthogonal_pair_of(&null_p, init.dim(), qhat_dim, &mut rng);
        let u = random_isometry_between(&init, &w, &mut rng);
        let q = ando_build(&AndoData { p: p.clone(), a: s.clone(), u, qhat: qhat_space.projector() }, tol)?;
        let t = &p * &q;
        let direct = FactorPair { p: p.clone(), q, canonical: false };
        let canonical = canonical_factorization(&t, tol)?;
        let direct_is_canonical = same_projection(&direct.q, &canonical.q, tol);
        record(&direct, direct_is_canonical);
        for pair in sample_factorizations(&t, 2, seed ^ (i as u64 + 1), tol)? {
            record(&pair, pair.canonical);
        }
    }
    let one = R::one() - tol.eq_atol;
    let two_strata = canonical_deviation <= tol.cos_atol && other_min_gap.is_none_or(|g| g >= one);
    Ok(YsNorms { canonical_norm, canonical_samples, other_samples, canonical_deviation, other_min_gap, two_strata })
}

fn same_projection<R: Real>(a: &CMat<R>, b: &CMat<R>, tol: &Tolerance<R>) -> bool {
    match (Subspace::from_span_scaled(a, R::one(), tol), Subspace::from_span_scaled(b, R::one(), tol)) {
        (Ok(x), Ok(y)) => x.approx_eq(&y, tol),
        _ => false,
    }
}

/// Parameters `(P, A, U, Qhat)` of an orthogonal projection `Q` relative to `P`:
///
/// ```text
/// Q = [ A                   A^{1/2}(P-A)^{1/2} U*  ]
///     [ U A^{1/2}(P-A)^{1/2}   U (P-A) U* + Qhat    ]
/// ```
///
/// in the decomposition `R(P) ⊕ N(P)`, stored as ambient matrices.
#[derive(Clone, Debug)]
pub struct AndoData<R: Real> {
    pub p: CMat<R>,
    /// `A = PQP`, with `0 <= A <= P`.
    pub a: CMat<R>,
    /// Partial isometry from `R(A(P-A))` into `N(P)`.
    pub u: CMat<R>,
    /// Orthogonal projection onto a subspace of `N(P) ⊖ R(U)`.
    pub qhat: CMat<R>,
}

/// `(A - A^2)^{1/2}`, which equals `A^{1/2}(P - A)^{1/2}` whenever `PA = A`.
fn off_diagonal_modulus<R: Real>(a: &CMat<R>) -> CMat<R> {
    numeric::clamped_sqrt(&(a - a * a))
}

/// Recovers `(A, U, Qhat)` from a pair of orthogonal projections.
pub fn ando_extract<R: Real>(p: &CMat<R>, q: &CMat<R>, tol: &Tolerance<R>) -> Result<AndoData<R>> {
    projector_range(p, "P", tol)?;
    projector_range(q, "Q", tol)?;
    if p.shape() != q.shape() {
        return Err(Error::DimensionMismatch("P and Q differ in size".into()));
    }
    let n = p.nrows();
    let ip = identity::<R>(n) - p;
    let a = p * q * p;
    let lower_left = &ip * q * p;
    let polar = polar_decompose_scaled(&lower_left, Some(R::one()), tol)?;
    let u = polar.v;
    let lower_right = &ip * q * &ip;
    let qhat = lower_right - &u * (p - &a) * u.adjoint();
    Ok(AndoData { p: p.clone(), a, u, qhat })
}

fn invalid(what: &str, residual: impl Real) -> Error {
    Error::InvalidParametrization(format!("{what} (residual {:e})", residual.as_f64()))
}

/// Validates the invariants of [`AndoData`], naming the first failing condition.
pub fn ando_check<R: Real>(d: &AndoData<R>, tol: &Tolerance<R>) -> Result<()> {
    let n = check_operator(&d.p)?;
    for (name, m) in [("A", &d.a), ("U", &d.u), ("Qhat", &d.qhat)] {
        numeric::check_finite(m)?;
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("{name} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
        }
    }
    let eq = tol.eq_atol;
    let r = numeric::projector_residual(&d.p);
    if r > eq {
        return Err(invalid("P is not an orthogonal projection", r));
    }
    let r = numeric::hermitian_residual(&d.a);
    if r > eq {
        return Err(invalid("A is not Hermitian", r));
    }
    let r = dist(&(&d.p * &d.a), &d.a).max(dist(&(&d.a * &d.p), &d.a));
    if r > eq {
        return Err(invalid("PA = AP = A fails", r));
    }
    let lo = min_eigenvalue(&d.a);
    if lo < tol.psd_floor {
        return Err(invalid("A is not positive", lo));
    }
    let lo = min_eigenvalue(&(&d.p - &d.a));
    if lo < tol.psd_floor {
        return Err(invalid("A <= P fails", lo));
    }
    let init = Subspace::from_span_scaled(&(&d.a - &d.a * &d.a), R::one(), tol)?;
    let r = dist(&(d.u.adjoint() * &d.u), &init.projector());
    if r > eq {
        return Err(invalid("U*U is not the projection onto R(A(P-A))", r));
    }
    let r = op_norm(&(&d.p * &d.u));
    if r > eq {
        return Err(invalid("final space of U is not inside N(P)", r));
    }
    let r = numeric::projector_residual(&d.qhat);
    if r > eq {
        return Err(invalid("Qhat is not an orthogonal projection", r));
    }
    let r = op_norm(&(&d.p * &d.qhat)).max(op_norm(&(d.u.adjoint() * &d.qhat)));
    if r > eq {
        return Err(invalid("R(Qhat) is not inside N(P) ⊖ R(U)", r));
    }
    Ok(())
}

/// Assembles the orthogonal projection `Q` described by `d`.
pub fn ando_build<R: Real>(d: &AndoData<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    ando_check(d, tol)?;
    let k = off_diagonal_modulus(&d.a);
    let u = &d.u;
    let ua = u.adjoint();
    Ok(&d.a + &k * &ua + u * &k + u * (&d.p - &d.a) * &ua + &d.qhat)
}

/// Seeded orthogonal projections `H` with `P H P = (PQP)^{1/2}`.
pub fn sqrt_solutions<R: Real>(
    p: &CMat<R>,
    q: &CMat<R>,
    count: usize,
    seed: u64,
    tol: &Tolerance<R>,
) -> Result<Vec<CMat<R>>> {
    let range_p = projector_range(p, "P", tol)?;
    projector_range(q, "Q", tol)?;
    if p.shape() != q.shape() {
        return Err(Error::DimensionMismatch("P and Q differ in size".into()));
    }
    let a = compression_sqrt(p, q, tol)?;
    let init = Subspace::from_span_scaled(&(&a - &a * &a), R::one(), tol)?;
    let null_p = range_p.complement();
    if init.dim() > null_p.dim() {
        // cannot happen for genuine projections
        return Err(Error::InvalidParametrization(format!(
            "dim R(A(P-A)) = {} exceeds dim N(P) = {}",
            init.dim(),
            null_p.dim()
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let qhat_dim = rng.random_range(0..=null_p.dim() - init.dim());
        let (w, qhat_space) = random_orthogonal_pair_of(&null_p, init.dim(), qhat_dim, &mut rng);
        let u = random_isometry_between(&init, &w, &mut rng);
        let d = AndoData { p: p.clone(), a: a.clone(), u, qhat: qhat_space.projector() };
        out.push(ando_build(&d, tol)?);
    }
    Ok(out)
}

/// `(PQP)^{1/2}`, computed as `|T*|` for `T = PQ` with rank decided at unit scale.
pub fn compression_sqrt<R: Real>(p: &CMat<R>, q: &CMat<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    Ok(polar_decompose_scaled(&(p * q), Some(R::one()), tol)?.abs_adj)
}

/// Eigenvalue counts behind the spectral characterization of `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumCounts {
    pub zeros: usize,
    pub interior: usize,
    pub ones: usize,
    /// Eigenvalues off the real segment `[0, 1]`.
    pub outside: usize,
}

impl SpectrumCounts {
    /// `#{0 < λ < 1} <= #{λ = 0}` with nothing outside `[0, 1]`.
    pub fn holds(&self) -> bool {
        self.outside == 0 && self.interior <= self.zeros
    }
}

pub fn spectrum_counts<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<SpectrumCounts> {
    check_operator(t)?;
    let eps = tol.eig_atol;
    let mut counts = SpectrumCounts { zeros: 0, interior: 0, ones: 0, outside: 0 };
    for z in numeric::eigenvalues(t)? {
        if z.im.abs() > eps || z.re < -eps || z.re > R::one() + eps {
            counts.outside += 1;
        } else if z.modulus() <= eps {
            counts.zeros += 1;
        } else if (z.re - R::one()).abs() <= eps {
            counts.ones += 1;
        } else {
            counts.interior += 1;
        }
    }
    Ok(counts)
}

/// Whether the spectrum of `t` is that of a product of two projections:
/// real, inside `[0, 1]`, and with no more eigenvalues in `(0, 1)` than zeros.
pub fn nelson_neumann_check<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<bool> {
    Ok(spectrum_counts(t, tol)?.holds())
}

/// Range identities for `0 <= A <= P`:
/// `R(P-A) = R(P-A^2) = R(P-A^{1/2})` and `R(A-A^2) = R(A(P-A)) = R(P_A - A)`.
#[derive(Clone, Copy, Debug)]
pub struct RangeIdentities {
    pub complement_ranges_agree: bool,
    pub defect_ranges_agree: bool,
}

impl RangeIdentities {
    pub fn hold(&self) -> bool {
        self.complement_ranges_agree && self.defect_ranges_agree
    }
}

pub fn range_identities<R: Real>(p: &CMat<R>, a: &CMat<R>, tol: &Tolerance<R>) -> Result<RangeIdentities> {
    projector_range(p, "P", tol)?;
    if min_eigenvalue(a) < tol.psd_floor || min_eigenvalue(&(p - a)) < tol.psd_floor {
        return Err(Error::InvalidParametrization("0 <= A <= P fails".into()));
    }
    let span = |m: CMat<R>| Subspace::from_span_scaled(&m, R::one(), tol);
    let sqrt_a = numeric::positive_sqrt(a, tol)?;
    let pa = Subspace::from_span(a, tol)?.projector();
    let r1 = span(p - a)?;
    let r2 = span(p - a * a)?;
    let r3 = span(p - &sqrt_a)?;
    let d1 = span(a - a * a)?;
    let d2 = span(a * (p - a))?;
    let d3 = span(&pa - a)?;
    Ok(RangeIdentities {
        complement_ranges_agree: r1.approx_eq(&r2, tol) && r1.approx_eq(&r3, tol),
        defect_ranges_agree: d1.approx_eq(&d2, tol) && d1.approx_eq(&d3, tol),
    })
}

/// Random `(P, Q)` helper for callers that only need the pair of projections.
pub fn random_pair<R: Real>(n: usize, rng: &mut impl Rng) -> (CMat<R>, CMat<R>) {
    let (m, k) = random::random_projection_pair::<R>(n, rng);
    (m.projector(), k.projector())
}
