use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real field underlying the complex scalars: f32 or f64.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Default `(rank_rel, eq_atol, psd_floor, cos_atol, eig_atol)` at this precision.
    const TOLERANCES: [f64; 5];

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Thin SVD `m = U diag(s) V*` with `k = min(rows, cols)` columns in `U` and `V`.
    fn thin_svd(m: &CMat<Self>) -> (CMat<Self>, Vec<Self>, CMat<Self>);

    fn singular_values(m: &CMat<Self>) -> Vec<Self>;
}

fn to_faer<T: Copy>(m: &DMatrix<Complex<T>>) -> faer::Mat<Complex<T>> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer<T: nalgebra::Scalar + Copy>(m: faer::MatRef<'_, Complex<T>>) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

macro_rules! real_impl {
    ($t:ty, $tols:expr) => {
        impl Real for $t {
            const TOLERANCES: [f64; 5] = $tols;

            fn thin_svd(m: &CMat<Self>) -> (CMat<Self>, Vec<Self>, CMat<Self>) {
                let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
                let s = svd.S().column_vector().iter().map(|z| z.re).collect();
                (from_faer(svd.U()), s, from_faer(svd.V()))
            }

            fn singular_values(m: &CMat<Self>) -> Vec<Self> {
                to_faer(m).singular_values().expect("SVD of a finite matrix converges")
            }
        }
    };
}

real_impl!(f64, [1e-11, 1e-9, -1e-10, 1e-8, 1e-8]);
real_impl!(f32, [1e-5, 1e-4, -1e-5, 1e-3, 1e-3]);

/// Complex scalar over `R`.
pub type C<R> = Complex<R>;
/// Dense complex matrix over `R`.
pub type CMat<R> = DMatrix<Complex<R>>;
/// Dense complex column vector over `R`.
pub type CVec<R> = DVector<Complex<R>>;

pub(crate) fn c<R: Real>(re: R) -> C<R> {
    Complex::new(re, R::zero())
}

/// Tolerance policy shared by every rank, PSD and equality decision.
///
/// The rank cutoff of an `m x n` matrix is `rank_rel * max(m, n) * sigma_max`.
/// `cos_atol` is the principal-angle threshold: cosines at least `1 - cos_atol`
/// mark common directions and cosines at most `cos_atol` mark orthogonal ones.
/// `eig_atol` governs eigenvalue classification of non-normal matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<R> {
    pub rank_rel: R,
    pub eq_atol: R,
    pub psd_floor: R,
    pub cos_atol: R,
    pub eig_atol: R,
}

impl<R: Real> Default for Tolerance<R> {
    fn default() -> Self {
        let [rank_rel, eq_atol, psd_floor, cos_atol, eig_atol] = R::TOLERANCES;
        Tolerance {
            rank_rel: R::lit(rank_rel),
            eq_atol: R::lit(eq_atol),
            psd_floor: R::lit(psd_floor),
            cos_atol: R::lit(cos_atol),
            eig_atol: R::lit(eig_atol),
        }
    }
}

impl<R: Real> Tolerance<R> {
    pub fn with_eq_atol(mut self, eq_atol: R) -> Self {
        self.eq_atol = eq_atol;
        self
    }

    pub fn with_rank_rel(mut self, rank_rel: R) -> Self {
        self.rank_rel = rank_rel;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("rank_rel", self.rank_rel),
            ("eq_atol", self.eq_atol),
            ("cos_atol", self.cos_atol),
            ("eig_atol", self.eig_atol),
        ];
        for (name, v) in positive {
            if v.partial_cmp(&R::zero()) != Some(Ordering::Greater) || !v.is_finite() {
                return Err(crate::Error::BadTolerance(format!("{name} must be positive and finite")));
            }
        }
        if self.psd_floor.partial_cmp(&R::zero()).is_none_or(|o| o == Ordering::Greater) || !self.psd_floor.is_finite()
        {
            return Err(crate::Error::BadTolerance("psd_floor must be non-positive".into()));
        }
        Ok(())
    }
}
