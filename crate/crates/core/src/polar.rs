//! Isometric parts of products of projections.
//!
//! A partial isometry `V` is the isometric part of some `T = PQ` exactly when
//! `V^2 V*` is positive with range `R(V)`; squaring is then a bijection from
//! those `V` onto the products themselves. The positive parts `|T*|` of products
//! are the compressions `PQP`, and every fiber over such an `A` is parametrized
//! by a partial isometry `U` into `R(P_A - A^2)`.

use crate::numeric::{self, dist, min_eigenvalue, op_norm, polar_decompose};
use crate::products;
use crate::scalar::{CMat, Real, Tolerance};
use crate::subspace::Subspace;
use crate::{Error, Result};

/// A partial isometry with its initial space `N(V)^⊥` and final space `R(V)`.
#[derive(Clone, Debug)]
pub struct PartialIsometry<R: Real> {
    pub v: CMat<R>,
    pub initial: Subspace<R>,
    pub final_space: Subspace<R>,
    /// The input was slightly off and has been replaced by its polar factor.
    pub repaired: bool,
}

impl<R: Real> PartialIsometry<R> {
    /// Validates `v`; inputs within `10 * eq_atol` of a partial isometry are
    /// replaced by their isometric part and marked `repaired`.
    pub fn new(v: CMat<R>, tol: &Tolerance<R>) -> Result<Self> {
        numeric::check_finite(&v)?;
        numeric::check_square(&v)?;
        if v.nrows() == 0 {
            return Err(Error::Empty);
        }
        let residual = isometry_residual(&v, tol)?;
        if residual <= tol.eq_atol {
            return Ok(Self::with_spaces(v, false, tol));
        }
        if residual <= tol.eq_atol * R::lit(10.0) {
            let fixed = polar_decompose(&v, tol)?.v;
            return Ok(Self::with_spaces(fixed, true, tol));
        }
        Err(Error::NotPartialIsometry { residual: residual.as_f64() })
    }

    fn with_spaces(v: CMat<R>, repaired: bool, tol: &Tolerance<R>) -> Self {
        let initial = Subspace::from_span_scaled(&v.adjoint(), R::one(), tol).expect("nonempty");
        let final_space = Subspace::from_span_scaled(&v, R::one(), tol).expect("nonempty");
        PartialIsometry { v, initial, final_space, repaired }
    }

    /// Isometric part of `t` from its polar decomposition.
    pub fn isometric_part(t: &CMat<R>, tol: &Tolerance<R>) -> Result<Self> {
        let polar = polar_decompose(t, tol)?;
        Ok(Self::with_spaces(polar.v, false, tol))
    }

    pub fn ambient(&self) -> usize {
        self.v.nrows()
    }
}

/// `max(||V*V - P_init||, ||VV* - P_fin||)` with the spaces read off `V` at unit scale.
pub fn isometry_residual<R: Real>(v: &CMat<R>, tol: &Tolerance<R>) -> Result<R> {
    let initial = Subspace::from_span_scaled(&v.adjoint(), R::one(), tol)?;
    let final_space = Subspace::from_span_scaled(v, R::one(), tol)?;
    let a = dist(&(v.adjoint() * v), &initial.projector());
    let b = dist(&(v * v.adjoint()), &final_space.projector());
    Ok(a.max(b))
}

/// Whether `V` is the isometric part of a product of two orthogonal projections:
/// `V^2 V*` is positive and its range is `R(V)`.
pub fn is_jx<R: Real>(v: &PartialIsometry<R>, tol: &Tolerance<R>) -> bool {
    let w = &v.v * &v.v * v.v.adjoint();
    if numeric::hermitian_residual(&w) > tol.eq_atol {
        return false;
    }
    if min_eigenvalue(&w) < tol.psd_floor {
        return false;
    }
    match Subspace::from_span_scaled(&w, R::one(), tol) {
        Ok(range) => range.approx_eq(&v.final_space, tol),
        Err(_) => false,
    }
}

/// `V -> V^2`, defined on isometric parts of products.
pub fn square_map<R: Real>(v: &PartialIsometry<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    if !is_jx(v, tol) {
        return Err(Error::NotInJX);
    }
    Ok(&v.v * &v.v)
}

/// `V = A + (P - A^2)^{1/2} U` with `P = P_{R(A)}`.
///
/// `U` must be a partial isometry from a subspace of `N(P)` onto `R(P - A^2)`.
pub fn piso_build<R: Real>(a: &CMat<R>, u: &CMat<R>, tol: &Tolerance<R>) -> Result<PartialIsometry<R>> {
    let n = numeric::check_square(a)?;
    if n == 0 {
        return Err(Error::Empty);
    }
    numeric::check_finite(a)?;
    numeric::check_finite(u)?;
    if u.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("U is {}x{}, expected {n}x{n}", u.nrows(), u.ncols())));
    }
    let bad = |m: String| Error::InvalidParametrization(m);
    if numeric::hermitian_residual(a) > tol.eq_atol || min_eigenvalue(a) < tol.psd_floor {
        return Err(bad("A is not positive".into()));
    }
    let range_a = Subspace::from_span(a, tol)?;
    let p = range_a.projector();
    let gap = &p - a * a;
    if min_eigenvalue(&gap) < tol.psd_floor {
        return Err(bad("A^2 <= P fails".into()));
    }
    let target = Subspace::from_span_scaled(&gap, R::one(), tol)?;
    if target.dim() > n - range_a.dim() {
        return Err(bad(format!("dim R(P - A^2) = {} exceeds dim N(A) = {}", target.dim(), n - range_a.dim())));
    }
    let r = dist(&(u * u.adjoint()), &target.projector());
    if r > tol.eq_atol {
        return Err(bad(format!("UU* is not the projection onto R(P - A^2) (residual {:e})", r.as_f64())));
    }
    let initial = Subspace::from_span_scaled(&u.adjoint(), R::one(), tol)?;
    let r = dist(&(u.adjoint() * u), &initial.projector());
    if r > tol.eq_atol {
        return Err(bad(format!("U is not a partial isometry (residual {:e})", r.as_f64())));
    }
    let r = op_norm(&(u * &p));
    if r > tol.eq_atol {
        return Err(bad(format!("initial space of U meets R(A) (residual {:e})", r.as_f64())));
    }
    let k = numeric::clamped_sqrt(&gap);
    let v = PartialIsometry::new(a + k * u, tol)?;
    let r = dist(&(&v.v * v.v.adjoint()), &p);
    if r > tol.eq_atol {
        return Err(bad(format!("VV* differs from P (residual {:e})", r.as_f64())));
    }
    Ok(v)
}

/// A product `T` of two projections with `|T*| = A`, namely `T = A V` for
/// `V = piso_build(A, U)`.
pub fn fiber_build<R: Real>(a: &CMat<R>, u: &CMat<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    if let Some(reason) = products::y_obstruction(a, tol)? {
        return Err(Error::NotInY(reason));
    }
    let v = piso_build(a, u, tol)?;
    Ok(a * v.v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{diag, from_real_rows, identity, zeros};

    type M = CMat<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn piso(v: M) -> PartialIsometry<f64> {
        PartialIsometry::new(v, &tol()).unwrap()
    }

    fn v_fixture() -> M {
        from_real_rows(&[&[0.6, 0.8], &[0.0, 0.0]])
    }

    #[test]
    fn jx_examples() {
        assert!(is_jx(&piso(v_fixture()), &tol()));
        assert!(!is_jx(&piso(from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])), &tol()));
        assert!(is_jx(&piso(identity(3)), &tol()));
    }

    #[test]
    fn validation_and_repair() {
        assert!(matches!(
            PartialIsometry::new(diag::<f64>(&[0.5, 0.0]), &tol()),
            Err(Error::NotPartialIsometry { .. })
        ));
        let mut nudged = v_fixture();
        nudged[(0, 0)].re += 2e-9;
        let v = PartialIsometry::new(nudged, &tol()).unwrap();
        assert!(v.repaired);
        assert!(isometry_residual(&v.v, &tol()).unwrap() < 1e-14);
        assert!(!piso(v_fixture()).repaired);
    }

    #[test]
    fn square_map_examples() {
        let t = square_map(&piso(v_fixture()), &tol()).unwrap();
        assert!(dist(&t, &from_real_rows(&[&[0.36, 0.48], &[0.0, 0.0]])) < 1e-15);
        let p = from_real_rows::<f64>(&[&[0.36, 0.48], &[0.48, 0.64]]);
        assert!(dist(&square_map(&piso(p.clone()), &tol()).unwrap(), &p) < 1e-14);
        assert!(matches!(square_map(&piso(from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])), &tol()), Err(Error::NotInJX)));
    }

    #[test]
    fn zero_is_its_own_square() {
        let v = piso(zeros(2, 2));
        assert!(is_jx(&v, &tol()));
        assert_eq!(square_map(&v, &tol()).unwrap(), zeros(2, 2));
    }

    #[test]
    fn piso_build_examples() {
        let u = from_real_rows::<f64>(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let v = piso_build(&diag(&[0.6, 0.0]), &u, &tol()).unwrap();
        assert!(dist(&v.v, &v_fixture()) < 1e-15);
        assert!(is_jx(&v, &tol()));

        let p = diag::<f64>(&[1.0, 1.0, 0.0]);
        let v = piso_build(&p, &zeros(3, 3), &tol()).unwrap();
        assert!(dist(&v.v, &p) < 1e-15);

        let v = piso_build(&zeros::<f64>(1, 1), &zeros(1, 1), &tol()).unwrap();
        assert_eq!(v.v, zeros(1, 1));
    }

    #[test]
    fn piso_build_rejects_bad_u() {
        // U = 0 leaves R(P - A^2) uncovered
        let err = piso_build(&diag::<f64>(&[0.6, 0.0]), &zeros(2, 2), &tol()).unwrap_err();
        assert!(matches!(err, Error::InvalidParametrization(_)));
        // obstruction: no room in N(A)
        let err = piso_build(&diag::<f64>(&[0.6, 0.6]), &zeros(2, 2), &tol()).unwrap_err();
        assert!(matches!(&err, Error::InvalidParametrization(m) if m.contains("exceeds")));
    }

    #[test]
    fn fiber_build_examples() {
        let a = diag::<f64>(&[0.6, 0.0]);
        let u = from_real_rows::<f64>(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let t = fiber_build(&a, &u, &tol()).unwrap();
        assert!(dist(&t, &from_real_rows(&[&[0.36, 0.48], &[0.0, 0.0]])) < 1e-15);
        let abs_adj = polar_decompose(&t, &tol()).unwrap().abs_adj;
        assert!(dist(&abs_adj, &a) < 1e-14);

        let q = from_real_rows::<f64>(&[&[0.36, 0.48], &[0.48, 0.64]]);
        assert!(dist(&fiber_build(&q, &zeros(2, 2), &tol()).unwrap(), &q) < 1e-14);
        assert_eq!(fiber_build(&zeros::<f64>(2, 2), &zeros(2, 2), &tol()).unwrap(), zeros(2, 2));

        assert!(matches!(fiber_build(&diag::<f64>(&[0.5, 0.5]), &zeros(2, 2), &tol()), Err(Error::NotInY(_))));
    }
}
