//! Canonical form of a pair of orthogonal projections.
//!
//! With `M = R(P)` and `N = R(Q)` the space splits as
//! `(M∩N) ⊕ (M∩N^⊥) ⊕ (M^⊥∩N) ⊕ (M^⊥∩N^⊥) ⊕ M0 ⊕ M1`, where `M0 ⊂ M` and
//! `M1 ⊂ M^⊥` carry the generic position. Identifying `M1` with `M0` through a
//! unitary `R`, the pair reads
//!
//! ```text
//! P = I ⊕ I ⊕ 0 ⊕ 0 ⊕ [I 0; 0 0]
//! Q = I ⊕ 0 ⊕ I ⊕ 0 ⊕ [C^2 CS; CS S^2]
//! ```
//!
//! with commuting positive `C, S` that have trivial kernels and `C^2 + S^2 = I`.

use crate::numeric::{self, dist, full_svd, op_norm, orthonormal_complement, orthonormalize, zeros};
use crate::products::SpectrumCounts;
use crate::scalar::{c, CMat, Real, Tolerance};
use crate::subspace::{projector_range, Subspace};
use crate::{Error, Result};
use nalgebra::ComplexField;

#[derive(Clone, Debug)]
pub struct HalmosForm<R: Real> {
    /// `M ∩ N`
    pub mn: Subspace<R>,
    /// `M ∩ N^⊥`
    pub mnp: Subspace<R>,
    /// `M^⊥ ∩ N`
    pub mpn: Subspace<R>,
    /// `M^⊥ ∩ N^⊥`
    pub mpnp: Subspace<R>,
    /// Generic part of `M`.
    pub m0: Subspace<R>,
    /// Generic part of `M^⊥`.
    pub m1: Subspace<R>,
    /// Diagonal cosines on `M0` coordinates.
    pub c: CMat<R>,
    /// Diagonal sines on `M0` coordinates.
    pub s: CMat<R>,
    /// Unitary from `M1` coordinates to `M0` coordinates.
    pub r: CMat<R>,
    /// Some principal cosine lies within a factor 10 of a peeling threshold.
    pub near_threshold: bool,
}

/// Makes the first entry of `col` with modulus above `floor` real and positive;
/// returns the phase that was divided out.
fn normalize_phase<R: Real>(col: &mut CMat<R>, j: usize, floor: R) -> crate::C<R> {
    let lead = col.column(j).iter().copied().find(|z| z.modulus() > floor);
    match lead {
        Some(z) => {
            let phase = z / c(z.modulus());
            col.column_mut(j).iter_mut().for_each(|w| *w /= phase);
            phase
        }
        None => c(R::one()),
    }
}

fn columns<R: Real>(basis: &CMat<R>, idx: &[usize]) -> CMat<R> {
    basis.select_columns(idx.iter())
}

fn hcat<R: Real>(parts: &[&CMat<R>]) -> CMat<R> {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        out.columns_mut(at, p.ncols()).copy_from(*p);
        at += p.ncols();
    }
    out
}

/// Splits the pair `(P, Q)` into its canonical pieces.
///
/// Cosines at least `1 - cos_atol` go to `M ∩ N`, cosines at most `cos_atol`
/// to the orthogonal intersections, and the rest to the generic part.
pub fn halmos_decompose<R: Real>(p: &CMat<R>, q: &CMat<R>, tol: &Tolerance<R>) -> Result<HalmosForm<R>> {
    let m = projector_range(p, "P", tol)?;
    let nsp = projector_range(q, "Q", tol)?;
    if m.ambient() != nsp.ambient() {
        return Err(Error::DimensionMismatch("P and Q differ in size".into()));
    }
    let n = m.ambient();
    let (pd, qd) = (m.dim(), nsp.dim());
    let svd = full_svd(&(m.basis().adjoint() * nsp.basis()));
    let mut um = m.basis() * &svd.u;
    let mut vn = nsp.basis() * &svd.v;
    let k = pd.min(qd);
    let hi = R::one() - tol.cos_atol;
    let lo = tol.cos_atol;
    let ten = R::lit(10.0);

    let mut shared = Vec::new();
    let mut generic = Vec::new();
    let mut near_threshold = false;
    for i in 0..k {
        let sigma = svd.s[i];
        let gap = R::one() - sigma;
        near_threshold |= (gap >= lo / ten && gap <= lo * ten) || (sigma >= lo / ten && sigma <= lo * ten);
        if sigma >= hi {
            shared.push(i);
        } else if sigma > lo {
            generic.push(i);
        }
    }
    let orth_m: Vec<usize> = (0..pd).filter(|i| !shared.contains(i) && !generic.contains(i)).collect();
    let orth_n: Vec<usize> = (0..qd).filter(|i| !shared.contains(i) && !generic.contains(i)).collect();

    let floor = tol.cos_atol;
    let mut cos = Vec::with_capacity(generic.len());
    let mut sin = Vec::with_capacity(generic.len());
    for &i in &generic {
        let phase = normalize_phase(&mut um, i, floor);
        vn.column_mut(i).iter_mut().for_each(|w| *w /= phase);
        cos.push(svd.s[i]);
        sin.push((R::one() - svd.s[i] * svd.s[i]).max(R::zero()).sqrt());
    }
    let b0 = columns(&um, &generic);
    let bn0 = columns(&vn, &generic);
    // w_i = (v_i - c_i u_i) / s_i lies in M^⊥ and is the twin of u_i
    let mut w = zeros::<R>(n, generic.len());
    for j in 0..generic.len() {
        let col = (bn0.column(j) - b0.column(j) * c(cos[j])) * c(R::one() / sin[j]);
        w.column_mut(j).copy_from(&col);
    }
    let b1 = orthonormalize(&w);
    let r = orthonormalize(&(w.adjoint() * &b1));

    let mn = Subspace::from_orthonormal(columns(&um, &shared));
    let mnp = Subspace::from_orthonormal(columns(&um, &orth_m));
    let mpn = Subspace::from_orthonormal(columns(&vn, &orth_n));
    let taken = orthonormalize(&hcat(&[mn.basis(), mnp.basis(), &b0, mpn.basis(), &b1]));
    let mpnp = Subspace::from_orthonormal(orthonormal_complement(&taken, n));

    let real_diag = |v: &[R]| CMat::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))));
    Ok(HalmosForm {
        mn,
        mnp,
        mpn,
        mpnp,
        m0: Subspace::from_orthonormal(b0),
        m1: Subspace::from_orthonormal(b1),
        c: real_diag(&cos),
        s: real_diag(&sin),
        r,
        near_threshold,
    })
}

impl<R: Real> HalmosForm<R> {
    pub fn ambient(&self) -> usize {
        self.mn.ambient()
    }

    /// Dimension of the generic part of `M`.
    pub fn generic_dim(&self) -> usize {
        self.m0.dim()
    }

    fn pieces(&self) -> [(&'static str, &Subspace<R>); 6] {
        [
            ("M∩N", &self.mn),
            ("M∩N^⊥", &self.mnp),
            ("M^⊥∩N", &self.mpn),
            ("M^⊥∩N^⊥", &self.mpnp),
            ("M0", &self.m0),
            ("M1", &self.m1),
        ]
    }

    /// Checks orthogonality and spanning of the six pieces and the `(C, S, R)` relations.
    pub fn validate(&self, tol: &Tolerance<R>) -> Result<()> {
        let n = self.ambient();
        let pieces = self.pieces();
        let bad = |m: String| Err(Error::InvalidForm(m));
        let mut total = 0;
        for (i, (name_a, a)) in pieces.iter().enumerate() {
            if a.ambient() != n {
                return bad(format!("{name_a} lives in the wrong ambient space"));
            }
            total += a.dim();
            for (name_b, b) in &pieces[i + 1..] {
                let overlap = op_norm(&(a.basis().adjoint() * b.basis()));
                if overlap > tol.eq_atol {
                    return bad(format!("{name_a} and {name_b} are not orthogonal ({:e})", overlap.as_f64()));
                }
            }
        }
        if total != n {
            return bad(format!("pieces have total dimension {total} in C^{n}"));
        }
        let k = self.m0.dim();
        if self.m1.dim() != k {
            return bad(format!("dim M0 = {k} but dim M1 = {}", self.m1.dim()));
        }
        for (name, m) in [("C", &self.c), ("S", &self.s), ("R", &self.r)] {
            if m.shape() != (k, k) {
                return bad(format!("{name} is {}x{}, expected {k}x{k}", m.nrows(), m.ncols()));
            }
        }
        let r = dist(&(&self.c * &self.c + &self.s * &self.s), &numeric::identity(k));
        if r > tol.eq_atol {
            return bad(format!("C^2 + S^2 differs from I by {:e}", r.as_f64()));
        }
        let r = dist(&(&self.c * &self.s), &(&self.s * &self.c))
            .max(numeric::hermitian_residual(&self.c))
            .max(numeric::hermitian_residual(&self.s));
        if r > tol.eq_atol {
            return bad("C and S must be commuting Hermitian operators".into());
        }
        if k > 0 {
            let cut = numeric::rank_cutoff(k, k, R::one(), tol);
            for (name, m) in [("C", &self.c), ("S", &self.s)] {
                let lo = numeric::min_eigenvalue(m);
                if lo <= cut {
                    return bad(format!("{name} has a nontrivial kernel (eigenvalue {:e})", lo.as_f64()));
                }
            }
            let r = dist(&(self.r.adjoint() * &self.r), &numeric::identity(k));
            if r > tol.eq_atol {
                return bad(format!("R is not unitary ({:e})", r.as_f64()));
            }
        }
        Ok(())
    }

    /// Basis of `M1` arranged so that column `j` is the twin of column `j` of `M0`.
    fn twin_basis(&self) -> CMat<R> {
        self.m1.basis() * self.r.adjoint()
    }

    /// `[B0 B1'] [[a, b], [c, d]] [B0 B1']*` for `k x k` blocks.
    fn generic_block(&self, blocks: [&CMat<R>; 4]) -> CMat<R> {
        let b0 = self.m0.basis();
        let b1 = self.twin_basis();
        let [a, b, cc, d] = blocks;
        b0 * a * b0.adjoint() + b0 * b * b1.adjoint() + &b1 * cc * b0.adjoint() + &b1 * d * b1.adjoint()
    }

    fn cs(&self) -> CMat<R> {
        &self.c * &self.s
    }

    fn zero_block(&self) -> CMat<R> {
        zeros(self.generic_dim(), self.generic_dim())
    }
}

/// `(P, Q)` assembled from the block formulas.
pub fn halmos_reconstruct<R: Real>(h: &HalmosForm<R>, tol: &Tolerance<R>) -> Result<(CMat<R>, CMat<R>)> {
    h.validate(tol)?;
    let p = h.mn.projector() + h.mnp.projector() + h.m0.projector();
    let c2 = &h.c * &h.c;
    let s2 = &h.s * &h.s;
    let cs = h.cs();
    let q = h.mn.projector() + h.mpn.projector() + h.generic_block([&c2, &cs, &cs, &s2]);
    Ok((p, q))
}

/// `PQ`, `PQP` and `P - Q` from the block formulas.
#[derive(Clone, Debug)]
pub struct HalmosProducts<R: Real> {
    pub pq: CMat<R>,
    pub pqp: CMat<R>,
    pub p_minus_q: CMat<R>,
}

pub fn halmos_products<R: Real>(h: &HalmosForm<R>, tol: &Tolerance<R>) -> Result<HalmosProducts<R>> {
    h.validate(tol)?;
    let c2 = &h.c * &h.c;
    let s2 = &h.s * &h.s;
    let cs = h.cs();
    let z = h.zero_block();
    let pq = h.mn.projector() + h.generic_block([&c2, &cs, &z, &z]);
    let pqp = h.mn.projector() + h.generic_block([&c2, &z, &z, &z]);
    let neg_cs = -&cs;
    let neg_s2 = -&s2;
    let p_minus_q = h.mnp.projector() - h.mpn.projector() + h.generic_block([&s2, &neg_cs, &neg_cs, &neg_s2]);
    Ok(HalmosProducts { pq, pqp, p_minus_q })
}

/// `||P - Q||` read off the form: 1 if an orthogonal intersection is nonzero,
/// otherwise the largest sine.
pub fn gap_from_form<R: Real>(h: &HalmosForm<R>) -> R {
    if !h.mnp.is_zero() || !h.mpn.is_zero() {
        return R::one();
    }
    h.s.diagonal().iter().map(|z| z.re).fold(R::zero(), R::max)
}

/// Spectrum of `PQP` from the form, ascending: zeros, the squared cosines, then
/// ones for `M ∩ N`.
pub fn pqp_spectrum<R: Real>(h: &HalmosForm<R>) -> Vec<R> {
    let n = h.ambient();
    let k = h.generic_dim();
    let ones = h.mn.dim();
    let mut vals = vec![R::zero(); n - k - ones];
    let mut c2: Vec<R> = h.c.diagonal().iter().map(|z| z.re * z.re).collect();
    c2.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    vals.extend(c2);
    vals.extend(std::iter::repeat_n(R::one(), ones));
    vals
}

/// Eigenvalue counts of `PQ` predicted by the form, classified with `eig_atol`.
pub fn spectrum_counts_from_form<R: Real>(h: &HalmosForm<R>, tol: &Tolerance<R>) -> SpectrumCounts {
    let mut counts = SpectrumCounts { zeros: 0, interior: 0, ones: 0, outside: 0 };
    for l in pqp_spectrum(h) {
        if l <= tol.eig_atol {
            counts.zeros += 1;
        } else if (l - R::one()).abs() <= tol.eig_atol {
            counts.ones += 1;
        } else {
            counts.interior += 1;
        }
    }
    counts
}
