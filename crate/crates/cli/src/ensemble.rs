//! Seeded ensemble verification.
//!
//! Each `(dim, trial)` cell gets its own RNG seeded from
//! `splitmix64(seed ^ (dim << 32) ^ trial)`, so the cells can run in any
//! order or in parallel. Per-property aggregation keeps the worst value and
//! breaks ties by `(dim, trial)`, which makes the report independent of
//! scheduling.

use std::cmp::Ordering;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use twoproj::dagger::{self, ObliqueProj};
use twoproj::numeric::{self, dist, op_norm, pinv, polar_decompose};
use twoproj::polar::{self, PartialIsometry};
use twoproj::products::{self, Criterion};
use twoproj::random::{self, rng_from_seed, SeededRng};
use twoproj::subspace::{classify_pair, Subspace};
use twoproj::{halmos, Mat, Tol};

use crate::canon::to_canonical;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials_per_dim: usize,
    pub tol: Tol,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpecError {
    #[error("dims must be nonempty")]
    NoDims,
    #[error("dimension {0} is invalid; dims must be at least 1")]
    BadDim(usize),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("{0}")]
    Tolerance(String),
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.dims.is_empty() {
            return Err(SpecError::NoDims);
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0) {
            return Err(SpecError::BadDim(d));
        }
        if self.trials_per_dim == 0 {
            return Err(SpecError::NoTrials);
        }
        self.tol.validate().map_err(|e| SpecError::Tolerance(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "dims": self.dims,
            "trials_per_dim": self.trials_per_dim,
            "tol": {
                "rank_rel": self.tol.rank_rel,
                "eq_atol": self.tol.eq_atol,
                "psd_floor": self.tol.psd_floor,
                "cos_atol": self.tol.cos_atol,
                "eig_atol": self.tol.eig_atol,
            },
        })
    }

    /// SHA-256 of the canonical spec JSON.
    pub fn digest(&self) -> String {
        hex(&Sha256::digest(to_canonical(&self.to_json()).as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, dim: usize, trial: usize) -> u64 {
    splitmix64(seed ^ ((dim as u64) << 32) ^ trial as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Passes when every value is at most the bound.
    AtMost,
    /// Passes when every value is at least the bound.
    AtLeast,
}

pub struct PropertyDef {
    pub id: &'static str,
    pub description: &'static str,
    pub direction: Direction,
    pub bound: f64,
}

const fn at_most(id: &'static str, description: &'static str, bound: f64) -> PropertyDef {
    PropertyDef { id, description, direction: Direction::AtMost, bound }
}

const fn at_least(id: &'static str, description: &'static str, bound: f64) -> PropertyDef {
    PropertyDef { id, description, direction: Direction::AtLeast, bound }
}

/// Indicator properties record 1 for a violation and 0 otherwise.
const fn flag(id: &'static str, description: &'static str) -> PropertyDef {
    at_most(id, description, 0.0)
}

#[derive(Clone, Copy)]
#[repr(usize)]
enum P {
    XProducts,
    XCanonical,
    XContractions,
    XCriteriaAgree,
    XNelsonNeumann,
    XDirectSum,
    Kkm,
    ClassifyConsistent,
    MinNormCanonical,
    MinNormOthers,
    MinNormOptimality,
    YsFormula,
    YsStrata,
    AndoRoundtrip,
    AndoBuild,
    SqrtSolutions,
    DaggerDouble,
    DaggerIdempotent,
    DaggerGreville,
    DaggerOblique,
    DaggerPolar,
    JxMember,
    JxSquare,
    JxDirectSum,
    XPlusInY,
    XPlusFiber,
    HalmosReconstruct,
    HalmosCs,
    HalmosProducts,
    HalmosSpectrum,
    HalmosCounts,
    AngleDuality,
    RangeIdentities,
    SqrtOfSquare,
    Penrose,
}

pub const PROPERTIES: [PropertyDef; 35] = [
    at_most("x.products", "Crimmins residual of T = PQ, relative to max(1, |T|^3)", 1e-10),
    at_most("x.canonical", "|P_can Q_can - T| for T = PQ", 1e-10),
    at_least("x.contractions", "Crimmins residual of random non-normal contractions", 1e-6),
    flag("x.criteria_agree", "Crimmins and Sebestyen verdicts differ (products and contractions)"),
    flag("x.nelson_neumann", "spectral count condition fails for T = PQ"),
    flag("x.direct_sum", "R(T) and N(T) are not complementary"),
    at_most("kkm", "| |P-Q| - max(|P(I-Q)|, |Q(I-P)|) |", 1e-10),
    flag("classify.consistent", "norm and subspace classifications of (P, Q) differ"),
    at_most("minnorm.canonical", "|P_can - Q_can| for T != 0", 1.0 - 1e-8),
    at_least("minnorm.others", "|P - Q| over sampled non-canonical factorizations", 1.0 - 1e-8),
    at_least("minnorm.optimality", "min eigenvalue of (P-Q)^2 - (P_can-Q_can)^2", -1e-10),
    at_most("ys.formula", "| |P_can - Q_can|^2 - |P_R(S) - S| | with S = TT*", 1e-8),
    flag("ys.strata", "sampled pairs over S = TT* leave the two gap levels"),
    at_most("ando.roundtrip", "|ando_build(ando_extract(P, Q)) - Q|", 1e-9),
    at_most("ando.build", "projection and compression residual of Q built from random parameters", 1e-9),
    at_most("ando.sqrt_solutions", "projection and |PHP - (PQP)^(1/2)| residual of sampled solutions", 1e-9),
    at_most("dagger.double", "|(T^+)^+ - T|", 1e-9),
    at_most("dagger.idempotent", "|E^2 - E| for E = T^+", 1e-9),
    flag("dagger.greville", "idempotency of the pseudoinverse disagrees with membership"),
    at_most("dagger.oblique", "oblique projection round trip, relative to max(1, |E|^2)", 1e-9),
    at_most("dagger.polar", "polar factorizations of E = T^+, relative to max(1, |E|^2)", 1e-9),
    flag("jx.member", "isometric part of T = PQ fails the positivity and range test"),
    at_most("jx.square", "|V^2 - T| for the isometric part V of T", 1e-9),
    flag("jx.direct_sum", "R(V) + N(V) is not the whole space"),
    flag("xplus.in_y", "|T*| is not of the form PQP"),
    at_most("xplus.fiber", "| |T*| - A | for T built over a random PQP member A", 1e-9),
    at_most("halmos.reconstruct", "|P - P_form|, |Q - Q_form|", 1e-9),
    at_most("halmos.cs", "|C^2 + S^2 - I|", 1e-10),
    at_most("halmos.products", "PQ, PQP, P-Q and |P-Q| from the canonical form", 1e-9),
    at_most("halmos.spectrum", "eigenvalues of PQP from the form against a direct eigensolve", 1e-7),
    flag("halmos.counts", "spectral counts of PQ from the form differ from a direct eigensolve"),
    at_most("angles.duality", "|c(M, N) - c(M^perp, N^perp)| for Friedrichs cosines", 1e-8),
    flag("ranges.identities", "range identities for 0 <= A <= P fail"),
    at_most("sqrt.square", "|sqrt(B^2) - B| for random 0 <= B <= I", 1e-8),
    at_most("pinv.penrose", "Penrose identities for random rank-deficient matrices, relative", 1e-9),
];

struct Recorder {
    values: Vec<(usize, f64)>,
}

impl Recorder {
    fn put(&mut self, p: P, value: f64) {
        self.values.push((p as usize, value));
    }

    fn flag(&mut self, p: P, violated: bool) {
        self.put(p, if violated { 1.0 } else { 0.0 });
    }

    /// Runs a check; errors count as the worst possible value.
    fn check(&mut self, p: P, f: impl FnOnce() -> twoproj::Result<f64>) {
        let worst = match PROPERTIES[p as usize].direction {
            Direction::AtMost => f64::INFINITY,
            Direction::AtLeast => f64::NEG_INFINITY,
        };
        let v = f().unwrap_or(worst);
        self.put(p, if v.is_nan() { worst } else { v });
    }

    fn check_flag(&mut self, p: P, f: impl FnOnce() -> twoproj::Result<bool>) {
        let violated = f().map(|ok| !ok).unwrap_or(true);
        self.flag(p, violated);
    }
}

fn pair(n: usize, rng: &mut SeededRng) -> (Mat, Mat) {
    let (m, k) = random::random_projection_pair::<f64>(n, rng);
    (m.projector(), k.projector())
}

/// All property values for one `(dim, trial)` cell.
fn run_trial(n: usize, seed: u64, tol: &Tol) -> Vec<(usize, f64)> {
    let mut rng = rng_from_seed(seed);
    let mut rec = Recorder { values: Vec::new() };
    let (p, q) = pair(n, &mut rng);
    let t = &p * &q;
    let g = random::random_contraction::<f64>(n, &mut rng);

    // membership
    rec.check(P::XProducts, || Ok(products::crimmins_residual(&t)));
    rec.check(P::XCanonical, || Ok(dist(&products::canonical_factorization(&t, tol)?.product(), &t)));
    if n >= 2 {
        rec.check(P::XContractions, || Ok(products::crimmins_residual(&g)));
    }
    for m in [&t, &g] {
        rec.check_flag(P::XCriteriaAgree, || {
            let a = products::is_in_x(m, tol, Criterion::Crimmins)?.member;
            let b = products::is_in_x(m, tol, Criterion::Sebestyen)?.member;
            Ok(a == b)
        });
        rec.check_flag(P::DaggerGreville, || {
            Ok(dagger::greville_check(m, tol)? == products::is_in_x(m, tol, Criterion::Crimmins)?.member)
        });
    }
    rec.check_flag(P::XNelsonNeumann, || products::nelson_neumann_check(&t, tol));
    rec.check_flag(P::XDirectSum, || {
        let range = Subspace::range_of(&t, tol)?;
        let kernel = Subspace::kernel_of(&t, tol)?;
        Ok(range.meet(&kernel, tol)?.is_zero() && range.join(&kernel, tol)?.dim() == n)
    });

    // norms and factorizations
    match classify_pair(&p, &q, tol) {
        Ok(class) => {
            rec.put(P::Kkm, (class.norm_p_minus_q - class.norm_p_iq.max(class.norm_q_ip)).abs());
            rec.flag(P::ClassifyConsistent, !class.consistent());
        }
        Err(_) => {
            rec.put(P::Kkm, f64::INFINITY);
            rec.flag(P::ClassifyConsistent, true);
        }
    }
    match products::canonical_factorization(&t, tol) {
        Ok(can) => {
            if numeric::numerical_rank(&t, tol).unwrap_or(0) > 0 {
                rec.put(P::MinNormCanonical, can.gap());
            }
            let d_can = (&can.p - &can.q) * (&can.p - &can.q);
            match products::sample_factorizations(&t, 3, seed, tol) {
                Ok(pairs) => {
                    for other in pairs.iter().skip(1) {
                        let d = (&other.p - &other.q) * (&other.p - &other.q);
                        rec.put(P::MinNormOthers, other.gap());
                        rec.put(P::MinNormOptimality, numeric::min_eigenvalue(&(d - &d_can)));
                    }
                }
                Err(_) => rec.put(P::MinNormOthers, f64::NEG_INFINITY),
            }
            rec.check(P::YsFormula, || {
                let s = &t * t.adjoint();
                let ps = Subspace::range_of(&s, tol)?.projector();
                Ok((can.gap().powi(2) - op_norm(&(ps - &s))).abs())
            });
        }
        Err(_) => rec.put(P::MinNormCanonical, f64::INFINITY),
    }
    rec.check_flag(P::YsStrata, || {
        let s = &t * t.adjoint();
        Ok(products::ys_norms_sampled(&s, 1, seed, tol)?.two_strata)
    });

    // Ando parametrization
    rec.check(P::AndoRoundtrip, || {
        let d = products::ando_extract(&p, &q, tol)?;
        Ok(dist(&products::ando_build(&d, tol)?, &q))
    });
    rec.check(P::AndoBuild, || {
        let d = random::random_ando_data::<f64>(n, tol, &mut rng)?;
        let built = products::ando_build(&d, tol)?;
        Ok(numeric::projector_residual(&built).max(dist(&(&d.p * &built * &d.p), &d.a)))
    });
    rec.check(P::SqrtSolutions, || {
        let a = products::compression_sqrt(&p, &q, tol)?;
        let mut worst: f64 = 0.0;
        for h in products::sqrt_solutions(&p, &q, 2, seed, tol)? {
            worst = worst.max(numeric::projector_residual(&h)).max(dist(&(&p * &h * &p), &a));
        }
        Ok(worst)
    });

    // pseudoinverses
    match dagger::dagger_of_product(&t, tol) {
        Ok(e) => {
            rec.check(P::DaggerDouble, || Ok(dist(&pinv(&e.e, tol)?, &t)));
            rec.put(P::DaggerIdempotent, dagger::idempotent_residual(&e.e));
            rec.check(P::DaggerPolar, || {
                let parts = dagger::projection_polar_parts(&e, tol)?;
                Ok(parts.max_residual() / e.conditioning.powi(2).max(1.0))
            });
        }
        Err(_) => {
            rec.put(P::DaggerDouble, f64::INFINITY);
            rec.put(P::DaggerIdempotent, f64::INFINITY);
        }
    }
    rec.check(P::DaggerOblique, || {
        let m = random::random_subspace::<f64>(n, &mut rng);
        let k = random::haar_subspace::<f64>(n, n - m.dim(), &mut rng);
        let e = dagger::oblique_projector(&m, &k, tol)?;
        let prod = dagger::product_of_dagger(&e, tol)?;
        let back: ObliqueProj<f64> = dagger::dagger_of_product(&prod, tol)?;
        Ok(dist(&back.e, &e.e) / e.conditioning.powi(2).max(1.0))
    });

    // isometric and positive parts
    match PartialIsometry::isometric_part(&t, tol) {
        Ok(v) => {
            rec.flag(P::JxMember, !polar::is_jx(&v, tol));
            rec.check(P::JxSquare, || Ok(dist(&polar::square_map(&v, tol)?, &t)));
            rec.check_flag(
                P::JxDirectSum,
                || Ok(v.final_space.join(&Subspace::kernel_of(&v.v, tol)?, tol)?.dim() == n),
            );
        }
        Err(_) => rec.flag(P::JxMember, true),
    }
    rec.check_flag(P::XPlusInY, || products::is_in_y(&polar_decompose(&t, tol)?.abs_adj, tol));
    rec.check(P::XPlusFiber, || {
        let a = random::random_y_member::<f64>(n, &mut rng);
        let u = random::random_fiber_isometry(&a, tol, &mut rng)?;
        let built = polar::fiber_build(&a, &u, tol)?;
        Ok(dist(&polar_decompose(&built, tol)?.abs_adj, &a))
    });

    // canonical form
    match halmos::halmos_decompose(&p, &q, tol) {
        Ok(h) => {
            rec.check(P::HalmosReconstruct, || {
                let (pr, qr) = halmos::halmos_reconstruct(&h, tol)?;
                Ok(dist(&pr, &p).max(dist(&qr, &q)))
            });
            let k = h.generic_dim();
            rec.put(P::HalmosCs, dist(&(&h.c * &h.c + &h.s * &h.s), &numeric::identity(k)));
            rec.check(P::HalmosProducts, || {
                let prods = halmos::halmos_products(&h, tol)?;
                Ok(dist(&prods.pq, &t)
                    .max(dist(&prods.pqp, &(&t * &p)))
                    .max(dist(&prods.p_minus_q, &(&p - &q)))
                    .max((halmos::gap_from_form(&h) - dist(&p, &q)).abs()))
            });
            let (direct, _) = numeric::hermitian_eigen(&(&t * &p));
            let from_form = halmos::pqp_spectrum(&h);
            rec.put(
                P::HalmosSpectrum,
                from_form.iter().zip(direct.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            );
            rec.check_flag(P::HalmosCounts, || {
                Ok(halmos::spectrum_counts_from_form(&h, tol) == products::spectrum_counts(&t, tol)?)
            });
        }
        Err(_) => rec.put(P::HalmosReconstruct, f64::INFINITY),
    }

    // subspaces and helpers
    rec.check(P::AngleDuality, || {
        let m = random::random_subspace::<f64>(n, &mut rng);
        let k = random::random_subspace::<f64>(n, &mut rng);
        let direct = m.friedrichs_cos(&k, tol)?;
        let dual = m.complement().friedrichs_cos(&k.complement(), tol)?;
        Ok((direct - dual).abs())
    });
    rec.check_flag(P::RangeIdentities, || {
        let (pp, a) = random::random_projection_and_contraction::<f64>(n, &mut rng);
        Ok(products::range_identities(&pp, &a, tol)?.hold())
    });
    rec.check(P::SqrtOfSquare, || {
        let b = random::random_psd_unit::<f64>(n, &mut rng);
        Ok(dist(&numeric::positive_sqrt(&(&b * &b), tol)?, &b))
    });
    rec.check(P::Penrose, || {
        use rand::Rng;
        let r = rng.random_range(0..=n);
        let m = random::gaussian::<f64>(n, r, &mut rng) * random::gaussian::<f64>(r, n, &mut rng);
        let x = pinv(&m, tol)?;
        let scale = (op_norm(&m).max(1.0) * op_norm(&x).max(1.0)).powi(2);
        Ok(numeric::penrose_residual(&m, &x) / scale)
    });
    rec.values
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyRecord {
    pub id: &'static str,
    pub description: &'static str,
    pub direction: Direction,
    pub bound: f64,
    pub trials: usize,
    pub violations: usize,
    /// Worst value seen: the maximum for upper bounds, the minimum for lower bounds.
    pub worst: Option<f64>,
    pub worst_dim: Option<usize>,
    pub worst_seed: Option<u64>,
    pub pass: bool,
}

impl PropertyRecord {
    fn new(def: &PropertyDef) -> Self {
        PropertyRecord {
            id: def.id,
            description: def.description,
            direction: def.direction,
            bound: def.bound,
            trials: 0,
            violations: 0,
            worst: None,
            worst_dim: None,
            worst_seed: None,
            pass: true,
        }
    }

    fn violates(&self, v: f64) -> bool {
        match self.direction {
            Direction::AtMost => !matches!(v.partial_cmp(&self.bound), Some(Ordering::Less | Ordering::Equal)),
            Direction::AtLeast => !matches!(v.partial_cmp(&self.bound), Some(Ordering::Greater | Ordering::Equal)),
        }
    }

    fn worse(&self, v: f64) -> bool {
        match (self.worst, self.direction) {
            (None, _) => true,
            (Some(w), Direction::AtMost) => v > w,
            (Some(w), Direction::AtLeast) => v < w,
        }
    }

    fn absorb(&mut self, v: f64, dim: usize, seed: u64) {
        self.trials += 1;
        if self.violates(v) {
            self.violations += 1;
            self.pass = false;
        }
        if self.worse(v) {
            self.worst = Some(v);
            self.worst_dim = Some(dim);
            self.worst_seed = Some(seed);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "description": self.description,
            "bound": self.bound,
            "direction": match self.direction { Direction::AtMost => "at_most", Direction::AtLeast => "at_least" },
            "trials": self.trials,
            "violations": self.violations,
            "max_residual": self.worst.map(json_float),
            "worst_dim": self.worst_dim,
            "worst_seed": self.worst_seed,
            "pass": self.pass,
        })
    }
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub spec: EnsembleSpec,
    pub properties: Vec<PropertyRecord>,
    pub pass: bool,
    pub tool_version: String,
    pub input_digest: String,
    pub timestamp: u64,
}

impl Report {
    pub fn property(&self, id: &str) -> Option<&PropertyRecord> {
        self.properties.iter().find(|p| p.id == id)
    }

    pub fn to_json(&self, with_timestamp: bool) -> Value {
        let mut v = json!({
            "suite": self.suite,
            "spec": self.spec.to_json(),
            "properties": self.properties.iter().map(PropertyRecord::to_json).collect::<Vec<_>>(),
            "pass": self.pass,
            "tool_version": self.tool_version,
            "input_digest": self.input_digest,
        });
        if with_timestamp {
            v["timestamp"] = json!(self.timestamp);
        }
        v
    }

    /// Canonical bytes without the timestamp; equal specs give equal bytes.
    pub fn canonical_body(&self) -> String {
        to_canonical(&self.to_json(false))
    }
}

/// Runs every property over every `(dim, trial)` cell.
pub fn verify_ensemble(spec: &EnsembleSpec) -> Result<Report, SpecError> {
    verify_ensemble_with(spec, true)
}

/// As [`verify_ensemble`], optionally on a single thread.
pub fn verify_ensemble_with(spec: &EnsembleSpec, parallel: bool) -> Result<Report, SpecError> {
    spec.validate()?;
    let cells: Vec<(usize, usize)> =
        spec.dims.iter().flat_map(|&d| (0..spec.trials_per_dim).map(move |t| (d, t))).collect();
    let work = |&(dim, trial): &(usize, usize)| {
        let seed = trial_seed(spec.seed, dim, trial);
        (dim, seed, run_trial(dim, seed, &spec.tol))
    };
    let results: Vec<_> =
        if parallel { cells.par_iter().map(work).collect() } else { cells.iter().map(work).collect() };

    let mut records: Vec<PropertyRecord> = PROPERTIES.iter().map(PropertyRecord::new).collect();
    for (dim, seed, values) in &results {
        for &(idx, v) in values {
            records[idx].absorb(v, *dim, *seed);
        }
    }
    let pass = records.iter().all(|r| r.pass);
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(Report {
        suite: "twoproj-verify".into(),
        input_digest: spec.digest(),
        spec: spec.clone(),
        properties: records,
        pass,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dims: Vec<usize>, trials: usize) -> EnsembleSpec {
        EnsembleSpec { seed: 42, dims, trials_per_dim: trials, tol: Tol::default() }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(spec(vec![], 3).validate(), Err(SpecError::NoDims));
        assert_eq!(spec(vec![2, 0], 3).validate(), Err(SpecError::BadDim(0)));
        assert_eq!(spec(vec![2], 0).validate(), Err(SpecError::NoTrials));
        assert!(verify_ensemble(&spec(vec![2], 0)).is_err());
    }

    #[test]
    fn property_table_matches_indices() {
        assert_eq!(PROPERTIES[P::Penrose as usize].id, "pinv.penrose");
        assert_eq!(PROPERTIES[P::HalmosCounts as usize].id, "halmos.counts");
        let mut ids: Vec<_> = PROPERTIES.iter().map(|p| p.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), PROPERTIES.len());
    }

    #[test]
    fn one_dimensional_cells_pass() {
        let r = verify_ensemble(&spec(vec![1], 20)).unwrap();
        let failing: Vec<_> = r.properties.iter().filter(|p| !p.pass).map(|p| p.id).collect();
        assert!(r.pass, "{failing:?}");
    }

    #[test]
    fn parallel_equals_serial() {
        let s = spec(vec![2, 3, 4], 4);
        let a = verify_ensemble_with(&s, true).unwrap();
        let b = verify_ensemble_with(&s, false).unwrap();
        assert_eq!(a.canonical_body(), b.canonical_body());
    }

    #[test]
    fn digest_tracks_the_spec() {
        assert_eq!(spec(vec![2], 1).digest(), spec(vec![2], 1).digest());
        assert_ne!(spec(vec![2], 1).digest(), spec(vec![2], 2).digest());
    }
}
