//! Seeded random operators: Haar unitaries and subspaces, contractions, and
//! random members of the parametrized families used by the sampling routines
//! and the verification ensembles.
//!
//! All generators draw from a caller-supplied RNG so results are a pure
//! function of the seed.

use nalgebra::ComplexField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numeric::{op_norm, zeros};
use crate::products::AndoData;
use crate::scalar::{c, CMat, Real, Tolerance, C};
use crate::subspace::Subspace;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussians (real and imaginary parts N(0, 1/2)).
pub fn gaussian<R: Real>(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat<R> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C::new(R::lit(re * h), R::lit(im * h))
    })
}

/// Haar-distributed `n x n` unitary: QR of a complex Gaussian with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Real>(n: usize, rng: &mut impl Rng) -> CMat<R> {
    if n == 0 {
        return zeros(0, 0);
    }
    let qr = gaussian::<R>(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let modulus = d.modulus();
        if modulus > R::zero() {
            let phase = d / c(modulus);
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// Haar-random `k`-dimensional subspace of `C^n`.
pub fn haar_subspace<R: Real>(n: usize, k: usize, rng: &mut impl Rng) -> Subspace<R> {
    let u = haar_unitary::<R>(n, rng);
    Subspace::from_orthonormal(u.columns(0, k.min(n)).into_owned())
}

/// Haar subspace of `C^n` with dimension uniform in `0..=n`.
pub fn random_subspace<R: Real>(n: usize, rng: &mut impl Rng) -> Subspace<R> {
    let k = rng.random_range(0..=n);
    haar_subspace(n, k, rng)
}

/// Random `k`-dimensional subspace of `within` (Haar inside its basis coordinates).
pub fn random_subspace_of<R: Real>(within: &Subspace<R>, k: usize, rng: &mut impl Rng) -> Subspace<R> {
    let d = within.dim();
    let u = haar_unitary::<R>(d, rng);
    let b = within.basis() * u.columns(0, k.min(d));
    Subspace::from_orthonormal(b)
}

/// Splits `within` into two random orthogonal pieces of dimensions `k1` and `k2`.
pub fn random_orthogonal_pair_of<R: Real>(
    within: &Subspace<R>,
    k1: usize,
    k2: usize,
    rng: &mut impl Rng,
) -> (Subspace<R>, Subspace<R>) {
    let d = within.dim();
    assert!(k1 + k2 <= d, "pieces exceed the available dimension");
    let rotated = within.basis() * haar_unitary::<R>(d, rng);
    (
        Subspace::from_orthonormal(rotated.columns(0, k1).into_owned()),
        Subspace::from_orthonormal(rotated.columns(k1, k2).into_owned()),
    )
}

/// Random partial isometry with initial space `from` and final space `onto`
/// (equal dimensions): `B_onto W B_from*` with Haar `W`.
pub fn random_isometry_between<R: Real>(from: &Subspace<R>, onto: &Subspace<R>, rng: &mut impl Rng) -> CMat<R> {
    assert_eq!(from.dim(), onto.dim(), "initial and final spaces must have equal dimension");
    let w = haar_unitary::<R>(from.dim(), rng);
    onto.basis() * w * from.basis().adjoint()
}

/// Non-normal contraction `u G / ||G||` with `u` uniform in `[0.5, 1]`.
pub fn random_contraction<R: Real>(n: usize, rng: &mut impl Rng) -> CMat<R> {
    let g = gaussian::<R>(n, n, rng);
    let scale: f64 = rng.random_range(0.5..=1.0);
    let norm = op_norm(&g);
    g * c(R::lit(scale) / norm)
}

/// Hermitian `B` with eigenvalues uniform in `[0, 1]` and Haar eigenvectors.
pub fn random_psd_unit<R: Real>(n: usize, rng: &mut impl Rng) -> CMat<R> {
    let u = haar_unitary::<R>(n, rng);
    let vals: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
    with_spectrum(&u, &vals)
}

fn with_spectrum<R: Real>(basis: &CMat<R>, vals: &[f64]) -> CMat<R> {
    let mut scaled = basis.clone();
    for (j, &l) in vals.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= c(R::lit(l)));
    }
    scaled * basis.adjoint()
}

/// An orthogonal projection `P` together with `0 <= A <= P`, where `A` mixes
/// eigenvalues 0, 1 and values strictly between on `R(P)`.
pub fn random_projection_and_contraction<R: Real>(n: usize, rng: &mut impl Rng) -> (CMat<R>, CMat<R>) {
    let k = rng.random_range(0..=n);
    let m = haar_subspace::<R>(n, k, rng);
    let inner = haar_unitary::<R>(k, rng);
    let vals: Vec<f64> = (0..k)
        .map(|_| match rng.random_range(0..4u8) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.05..0.95),
        })
        .collect();
    let b = m.basis() * inner;
    (m.projector(), with_spectrum(&b, &vals))
}

/// Random member of `{PQP}`: a positive contraction `A` whose number of
/// eigenvalues strictly inside `(0, 1)` does not exceed `dim N(A)`.
pub fn random_y_member<R: Real>(n: usize, rng: &mut impl Rng) -> CMat<R> {
    let r = rng.random_range(0..=n);
    let interior_max = r.min(n - r);
    let interior = rng.random_range(0..=interior_max);
    let mut vals = vec![0.0; n];
    for (i, v) in vals.iter_mut().take(r).enumerate() {
        *v = if i < interior { rng.random_range(0.05..0.95) } else { 1.0 };
    }
    let u = haar_unitary::<R>(n, rng);
    with_spectrum(&u, &vals)
}

/// Random `U` admissible for a fiber/isometric-part construction over `A`: a
/// partial isometry from a random subspace of `N(A)` onto `R(P_A - A^2)`.
pub fn random_fiber_isometry<R: Real>(a: &CMat<R>, tol: &Tolerance<R>, rng: &mut impl Rng) -> crate::Result<CMat<R>> {
    let n = a.nrows();
    let range_a = Subspace::from_span(a, tol)?;
    let pa = range_a.projector();
    let target = Subspace::from_span_scaled(&(&pa - a * a), R::one(), tol)?;
    let null_a = range_a.complement();
    if target.dim() > null_a.dim() {
        return Err(crate::Error::NotInY(format!(
            "dim R(P - A^2) = {} exceeds dim N(A) = {}",
            target.dim(),
            null_a.dim()
        )));
    }
    let from = random_subspace_of(&null_a, target.dim(), rng);
    let u = random_isometry_between(&from, &target, rng);
    debug_assert_eq!(u.nrows(), n);
    Ok(u)
}

/// Random valid Ando parameters `(P, A, U, Qhat)`.
pub fn random_ando_data<R: Real>(n: usize, tol: &Tolerance<R>, rng: &mut impl Rng) -> crate::Result<AndoData<R>> {
    // redraw until A(P - A) fits into N(P); a few tries suffice in practice
    loop {
        let (p, a) = random_projection_and_contraction::<R>(n, rng);
        let init = Subspace::from_span_scaled(&(&a - &a * &a), R::one(), tol)?;
        let range_p = Subspace::from_span_scaled(&p, R::one(), tol)?;
        let null_p = range_p.complement();
        if init.dim() > null_p.dim() {
            continue;
        }
        let rest_dim = null_p.dim() - init.dim();
        let qhat_dim = rng.random_range(0..=rest_dim);
        let (w, qhat_space) = random_orthogonal_pair_of(&null_p, init.dim(), qhat_dim, rng);
        let u = random_isometry_between(&init, &w, rng);
        return Ok(AndoData { p, a, u, qhat: qhat_space.projector() });
    }
}

/// Pair of orthogonal projections onto independent Haar subspaces of random dimension.
pub fn random_projection_pair<R: Real>(n: usize, rng: &mut impl Rng) -> (Subspace<R>, Subspace<R>) {
    let m = random_subspace(n, rng);
    let k = random_subspace(n, rng);
    (m, k)
}
