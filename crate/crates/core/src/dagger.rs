//! Pseudoinverses of products of projections are idempotents, and the other
//! way around: `(P_{N^⊥} P_M)^† = P_{M//N}`.
//!
//! In finite dimension every idempotent is bounded, so the oblique projections
//! here are ordinary matrices `E = E^2` with complementary range and nullspace.

use crate::numeric::{self, dist, op_norm, pinv, polar_decompose};
use crate::products;
use crate::scalar::{CMat, Real, Tolerance};
use crate::subspace::Subspace;
use crate::{Error, Result};

/// Idempotent `E` onto `range` along `nullspace`.
#[derive(Clone, Debug)]
pub struct ObliqueProj<R: Real> {
    pub e: CMat<R>,
    pub range: Subspace<R>,
    pub nullspace: Subspace<R>,
    /// `||E||`, which is `1 / sin` of the minimal angle between range and nullspace
    /// (1 when either is trivial).
    pub conditioning: R,
}

impl<R: Real> ObliqueProj<R> {
    /// Wraps an idempotent matrix, reading off its range and nullspace.
    pub fn from_matrix(e: CMat<R>, tol: &Tolerance<R>) -> Result<Self> {
        numeric::check_finite(&e)?;
        numeric::check_square(&e)?;
        let r = idempotent_residual(&e);
        if r > tol.eq_atol * op_norm(&e).powi(2).max(R::one()) {
            return Err(Error::NotProjector { what: "E", residual: r.as_f64() });
        }
        let range = Subspace::from_span(&e, tol)?;
        let nullspace = Subspace::kernel_of(&e, tol)?;
        let conditioning = op_norm(&e);
        Ok(ObliqueProj { e, range, nullspace, conditioning })
    }

    pub fn validate(&self, tol: &Tolerance<R>) -> Result<()> {
        let scale = self.conditioning.powi(2).max(R::one());
        let r = idempotent_residual(&self.e);
        if r > tol.eq_atol * scale {
            return Err(Error::NotProjector { what: "E", residual: r.as_f64() });
        }
        let on_range = dist(&(&self.e * self.range.basis()), self.range.basis());
        let on_null = op_norm(&(&self.e * self.nullspace.basis()));
        let r = on_range.max(on_null);
        if r > tol.eq_atol * scale {
            return Err(Error::NotProjector { what: "E on its range and nullspace", residual: r.as_f64() });
        }
        if self.range.dim() + self.nullspace.dim() != self.e.nrows() {
            return Err(Error::NotComplementary {
                intersection_dim: 0,
                sum_dim: self.range.dim() + self.nullspace.dim(),
                ambient: self.e.nrows(),
            });
        }
        Ok(())
    }
}

/// `||E^2 - E||`.
pub fn idempotent_residual<R: Real>(e: &CMat<R>) -> R {
    dist(&(e * e), e)
}

/// The projection onto `m` along `n`, from `E [B_m B_n] = [B_m 0]`.
pub fn oblique_projector<R: Real>(m: &Subspace<R>, n: &Subspace<R>, tol: &Tolerance<R>) -> Result<ObliqueProj<R>> {
    let ambient = m.ambient();
    if n.ambient() != ambient {
        return Err(Error::DimensionMismatch(format!("subspaces of C^{ambient} and C^{}", n.ambient())));
    }
    let meet = m.meet(n, tol)?;
    let join = m.join(n, tol)?;
    if meet.dim() > 0 || join.dim() != ambient || m.dim() + n.dim() != ambient {
        return Err(Error::NotComplementary { intersection_dim: meet.dim(), sum_dim: join.dim(), ambient });
    }
    let mut b = numeric::zeros::<R>(ambient, ambient);
    b.columns_mut(0, m.dim()).copy_from(m.basis());
    b.columns_mut(m.dim(), n.dim()).copy_from(n.basis());
    let mut rhs = numeric::zeros::<R>(ambient, ambient);
    rhs.columns_mut(0, m.dim()).copy_from(m.basis());
    let inv = b.try_inverse().ok_or(Error::NotComplementary {
        intersection_dim: meet.dim(),
        sum_dim: join.dim(),
        ambient,
    })?;
    let e = rhs * inv;
    let conditioning = op_norm(&e).max(if m.is_zero() { R::zero() } else { R::one() });
    Ok(ObliqueProj { e, range: m.clone(), nullspace: n.clone(), conditioning })
}

/// `T^†` for a product `T` of projections, as the idempotent onto `N(T)^⊥`
/// along `R(T)^⊥`.
pub fn dagger_of_product<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<ObliqueProj<R>> {
    let m = products::is_in_x(t, tol, products::Criterion::Crimmins)?;
    if !m.member {
        return Err(Error::NotInX { residual: m.residual.as_f64() });
    }
    let e = pinv(t, tol)?;
    let range = Subspace::from_span(&t.adjoint(), tol)?;
    let nullspace = Subspace::range_of(t, tol)?.complement();
    let conditioning = op_norm(&e);
    Ok(ObliqueProj { e, range, nullspace, conditioning })
}

/// `P_{N^⊥} P_M`, the pseudoinverse of `P_{M//N}`.
pub fn product_of_dagger<R: Real>(e: &ObliqueProj<R>, tol: &Tolerance<R>) -> Result<CMat<R>> {
    e.validate(tol)?;
    Ok(e.nullspace.complement().projector() * e.range.projector())
}

/// Whether `T^†` is idempotent, relative to `||T^†||^2`.
pub fn greville_check<R: Real>(t: &CMat<R>, tol: &Tolerance<R>) -> Result<bool> {
    numeric::check_square(t)?;
    let x = pinv(t, tol)?;
    let scale = op_norm(&x).powi(2).max(R::one());
    Ok(idempotent_residual(&x) <= tol.eq_atol * scale)
}

/// Polar structure of an idempotent `E` with `T = E^†`.
#[derive(Clone, Debug)]
pub struct ProjectionPolar<R: Real> {
    /// `V*`, the isometric part of `E`.
    pub v_adj: CMat<R>,
    /// `||E - |T|^† V*||`.
    pub left_residual: R,
    /// `||E - V* |T*|^†||`.
    pub right_residual: R,
    /// `|| |T*|^† - |E| ||`: the inverted positive part of `T` is the modulus of `E`.
    pub positive_part_residual: R,
}

impl<R: Real> ProjectionPolar<R> {
    pub fn max_residual(&self) -> R {
        self.left_residual.max(self.right_residual).max(self.positive_part_residual)
    }
}

pub fn projection_polar_parts<R: Real>(e: &ObliqueProj<R>, tol: &Tolerance<R>) -> Result<ProjectionPolar<R>> {
    let t = product_of_dagger(e, tol)?;
    let polar = polar_decompose(&t, tol)?;
    let v_adj = polar.v.adjoint();
    let abs_inv = pinv(&polar.abs, tol)?;
    let abs_adj_inv = pinv(&polar.abs_adj, tol)?;
    let modulus = polar_decompose(&e.e, tol)?.abs;
    Ok(ProjectionPolar {
        left_residual: dist(&e.e, &(abs_inv * &v_adj)),
        right_residual: dist(&e.e, &(&v_adj * &abs_adj_inv)),
        positive_part_residual: dist(&abs_adj_inv, &modulus),
        v_adj,
    })
}
