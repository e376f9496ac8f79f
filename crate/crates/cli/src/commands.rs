//! Argument parsing and the single-shot commands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use twoproj::numeric::{self, dist, op_norm, polar_decompose};
use twoproj::polar::{self, PartialIsometry};
use twoproj::products::{self, Criterion};
use twoproj::subspace::{classify_pair, PairCase};
use twoproj::{dagger, halmos, AndoData, Error, Mat, Subspace, Tol};

use crate::canon::{to_canonical, to_text};
use crate::ensemble::{verify_ensemble_with, EnsembleSpec};
use crate::matrix_io::{matrix_json, parse_matrix, InputError};

#[derive(Parser, Debug)]
#[command(name = "twoproj", version, about = "Products of two orthogonal projections")]
pub struct Cli {
    /// Equality tolerance (eq_atol).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Relative rank cutoff.
    #[arg(long, global = true)]
    pub rank_rel: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Ambient dimensions: `a..b` (inclusive) or a comma list.
    #[arg(long, global = true, default_value = "2..10", value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long, global = true, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

pub fn parse_dims(s: &str) -> Result<Dims, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
        if a > b {
            return Err(format!("empty range {s:?}"));
        }
        return Ok(Dims((a..=b).collect()));
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad dimension {x:?}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Dims)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Crimmins,
    Sebestyen,
}

#[derive(Args, Debug)]
pub struct PairFiles {
    /// Orthogonal projection P.
    pub p: PathBuf,
    /// Orthogonal projection Q.
    pub q: PathBuf,
}

#[derive(Args, Debug)]
pub struct SpanFiles {
    /// Columns spanning M.
    pub m: PathBuf,
    /// Columns spanning N.
    pub n: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Is T a product of two orthogonal projections?
    CheckX {
        t: PathBuf,
        #[arg(long, value_enum, default_value_t = CriterionArg::Crimmins)]
        criterion: CriterionArg,
    },
    /// Is A of the form PQP?
    CheckY { a: PathBuf },
    /// Canonical factorization of T.
    Canonical { t: PathBuf },
    /// Sampled factorizations of T.
    Factorizations {
        t: PathBuf,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Minimal-norm factorization of T.
    MinNorm { t: PathBuf },
    /// Parameters (A, U, Qhat) of Q relative to P.
    AndoExtract(PairFiles),
    /// Projection Q built from (P, A, U, Qhat).
    AndoBuild { p: PathBuf, a: PathBuf, u: PathBuf, qhat: PathBuf },
    /// Projections H with PHP = (PQP)^(1/2).
    SqrtSolutions {
        #[command(flatten)]
        pair: PairFiles,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Polar decomposition of T.
    Polar { t: PathBuf },
    /// Is V the isometric part of a product of projections?
    IsJx { v: PathBuf },
    /// Pseudoinverse of T as an oblique projection.
    PinvProj { t: PathBuf },
    /// Oblique projection onto M along N.
    Oblique(SpanFiles),
    /// Canonical form of the pair (P, Q).
    Halmos(PairFiles),
    /// Principal angles and angle cosines between M and N.
    Angles(SpanFiles),
    /// Case of the pair (P, Q) by the norms of P(I-Q) and Q(I-P).
    Classify(PairFiles),
    /// Seeded ensemble verification.
    Verify {
        /// Run trials on one thread.
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    /// A false verdict reported as an error by the library.
    Negative(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotInX { .. } | Error::NotInY(_) | Error::NotInJX => Failure::Negative(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (code, value) = match execute(&cli) {
        Ok(pair) => pair,
        Err(Failure::Input(msg)) => {
            return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
        Err(Failure::Negative(msg)) => (1, json!({ "verdict": false, "reason": msg })),
    };
    let body = match cli.format {
        Format::Json => to_canonical(&value),
        Format::Text => to_text(&value),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) },
        },
        None => Outcome { code, stdout: body, stderr: String::new() },
    }
}

fn tolerance(cli: &Cli) -> Result<Tol, Failure> {
    let mut tol = Tol::default();
    if let Some(t) = cli.tol {
        tol = tol.with_eq_atol(t);
    }
    if let Some(r) = cli.rank_rel {
        tol = tol.with_rank_rel(r);
    }
    tol.validate()?;
    Ok(tol)
}

fn verdict(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

fn pair_json(p: &Mat, q: &Mat) -> Value {
    json!({ "p": matrix_json(p), "q": matrix_json(q), "norm_p_minus_q": dist(p, q) })
}

fn smallest_nonzero_singular_value(m: &Mat, tol: &Tol) -> Result<Option<f64>, Failure> {
    let rank = numeric::numerical_rank(m, tol)?;
    Ok((rank > 0).then(|| numeric::singular_values(m)[rank - 1]))
}

fn execute(cli: &Cli) -> Result<(i32, Value), Failure> {
    let tol = tolerance(cli)?;
    let tol = &tol;
    let out = match &cli.command {
        Command::CheckX { t, criterion } => {
            let t = parse_matrix(t)?;
            let criterion = match criterion {
                CriterionArg::Crimmins => Criterion::Crimmins,
                CriterionArg::Sebestyen => Criterion::Sebestyen,
            };
            let m = products::is_in_x(&t, tol, criterion)?;
            let name = match criterion {
                Criterion::Crimmins => "crimmins",
                Criterion::Sebestyen => "sebestyen",
            };
            (verdict(m.member), json!({ "verdict": m.member, "criterion": name, "residual": m.residual }))
        }
        Command::CheckY { a } => {
            let a = parse_matrix(a)?;
            let obstruction = products::y_obstruction(&a, tol)?;
            (verdict(obstruction.is_none()), json!({ "verdict": obstruction.is_none(), "obstruction": obstruction }))
        }
        Command::Canonical { t } => {
            let t = parse_matrix(t)?;
            let pair = products::canonical_factorization(&t, tol)?;
            let mut v = pair_json(&pair.p, &pair.q);
            v["residual"] = json!(dist(&pair.product(), &t));
            v["unique"] = json!(products::factorization_unique(&t, tol)?);
            (0, v)
        }
        Command::Factorizations { t, count } => {
            let t = parse_matrix(t)?;
            let pairs = products::sample_factorizations(&t, *count, cli.seed, tol)?;
            let free = products::free_space(&t, tol)?;
            let list: Vec<Value> = pairs
                .iter()
                .map(|f| {
                    let mut v = pair_json(&f.p, &f.q);
                    v["canonical"] = json!(f.canonical);
                    v["residual"] = json!(dist(&f.product(), &t));
                    v
                })
                .collect();
            (0, json!({ "free_dim": free.dim(), "unique": free.is_zero(), "pairs": list }))
        }
        Command::MinNorm { t } => {
            let t = parse_matrix(t)?;
            let (pair, norm) = products::min_norm_pair(&t, tol)?;
            let s = &t * t.adjoint();
            let ys = products::ys_norms(&s, tol)?;
            let mut v = pair_json(&pair.p, &pair.q);
            v["min_norm"] = json!(norm);
            v["ys_canonical_norm"] = json!(ys.canonical_norm);
            (0, v)
        }
        Command::AndoExtract(files) => {
            let (p, q) = (parse_matrix(&files.p)?, parse_matrix(&files.q)?);
            let d = products::ando_extract(&p, &q, tol)?;
            let rebuilt = products::ando_build(&d, tol)?;
            (
                0,
                json!({
                    "a": matrix_json(&d.a),
                    "u": matrix_json(&d.u),
                    "qhat": matrix_json(&d.qhat),
                    "roundtrip_residual": dist(&rebuilt, &q),
                }),
            )
        }
        Command::AndoBuild { p, a, u, qhat } => {
            let d =
                AndoData { p: parse_matrix(p)?, a: parse_matrix(a)?, u: parse_matrix(u)?, qhat: parse_matrix(qhat)? };
            let q = products::ando_build(&d, tol)?;
            (
                0,
                json!({
                    "q": matrix_json(&q),
                    "projection_residual": numeric::projector_residual(&q),
                    "compression_residual": dist(&(&d.p * &q * &d.p), &d.a),
                }),
            )
        }
        Command::SqrtSolutions { pair, count } => {
            let (p, q) = (parse_matrix(&pair.p)?, parse_matrix(&pair.q)?);
            let root = products::compression_sqrt(&p, &q, tol)?;
            let sols = products::sqrt_solutions(&p, &q, *count, cli.seed, tol)?;
            let list: Vec<Value> = sols
                .iter()
                .map(|h| {
                    json!({
                        "h": matrix_json(h),
                        "projection_residual": numeric::projector_residual(h),
                        "compression_residual": dist(&(&p * h * &p), &root),
                    })
                })
                .collect();
            (0, json!({ "pqp_sqrt": matrix_json(&root), "solutions": list }))
        }
        Command::Polar { t } => {
            let t = parse_matrix(t)?;
            let pd = polar_decompose(&t, tol)?;
            let v = PartialIsometry::isometric_part(&t, tol)?;
            (
                0,
                json!({
                    "v": matrix_json(&pd.v),
                    "abs": matrix_json(&pd.abs),
                    "abs_adj": matrix_json(&pd.abs_adj),
                    "residual": dist(&(&pd.v * &pd.abs), &t),
                    "initial_dim": v.initial.dim(),
                    "final_dim": v.final_space.dim(),
                }),
            )
        }
        Command::IsJx { v } => {
            let v = PartialIsometry::new(parse_matrix(v)?, tol)?;
            let member = polar::is_jx(&v, tol);
            let mut out = json!({ "verdict": member, "repaired": v.repaired });
            if member {
                out["square"] = matrix_json(&polar::square_map(&v, tol)?);
            }
            (verdict(member), out)
        }
        Command::PinvProj { t } => {
            let t = parse_matrix(t)?;
            let e = dagger::dagger_of_product(&t, tol)?;
            let parts = dagger::projection_polar_parts(&e, tol)?;
            (
                0,
                json!({
                    "e": matrix_json(&e.e),
                    "range_dim": e.range.dim(),
                    "nullspace_dim": e.nullspace.dim(),
                    "idempotent_residual": dagger::idempotent_residual(&e.e),
                    "conditioning": e.conditioning,
                    "smallest_singular_value": smallest_nonzero_singular_value(&t, tol)?,
                    "polar_residual": parts.max_residual(),
                }),
            )
        }
        Command::Oblique(files) => {
            let m = Subspace::from_span(&parse_matrix(&files.m)?, tol)?;
            let n = Subspace::from_span(&parse_matrix(&files.n)?, tol)?;
            let e = dagger::oblique_projector(&m, &n, tol)?;
            let t = dagger::product_of_dagger(&e, tol)?;
            (
                0,
                json!({
                    "e": matrix_json(&e.e),
                    "conditioning": e.conditioning,
                    "idempotent_residual": dagger::idempotent_residual(&e.e),
                    "pinv": matrix_json(&t),
                    "pinv_in_x": products::is_in_x(&t, tol, Criterion::Crimmins)?.member,
                }),
            )
        }
        Command::Halmos(files) => {
            let (p, q) = (parse_matrix(&files.p)?, parse_matrix(&files.q)?);
            let h = halmos::halmos_decompose(&p, &q, tol)?;
            let (pr, qr) = halmos::halmos_reconstruct(&h, tol)?;
            let cosines: Vec<f64> = (0..h.generic_dim()).map(|i| h.c[(i, i)].re).collect();
            (
                0,
                json!({
                    "dims": {
                        "m_meet_n": h.mn.dim(),
                        "m_meet_n_perp": h.mnp.dim(),
                        "m_perp_meet_n": h.mpn.dim(),
                        "m_perp_meet_n_perp": h.mpnp.dim(),
                        "generic": h.generic_dim(),
                    },
                    "cosines": cosines,
                    "near_threshold": h.near_threshold,
                    "reconstruction_residual": dist(&pr, &p).max(dist(&qr, &q)),
                    "gap": halmos::gap_from_form(&h),
                    "pqp_spectrum": halmos::pqp_spectrum(&h),
                }),
            )
        }
        Command::Angles(files) => {
            let m = Subspace::from_span(&parse_matrix(&files.m)?, tol)?;
            let n = Subspace::from_span(&parse_matrix(&files.n)?, tol)?;
            if m.ambient() != n.ambient() {
                return Err(Failure::Input("M and N live in different dimensions".into()));
            }
            let friedrichs = m.friedrichs_cos(&n, tol)?;
            let dual = m.complement().friedrichs_cos(&n.complement(), tol)?;
            (
                0,
                json!({
                    "principal_cosines": m.principal_cosines(&n)?,
                    "dixmier_cos": m.dixmier_cos(&n)?,
                    "friedrichs_cos": friedrichs,
                    "friedrichs_cos_complements": dual,
                    "intersection_dim": m.meet(&n, tol)?.dim(),
                }),
            )
        }
        Command::Classify(files) => {
            let (p, q) = (parse_matrix(&files.p)?, parse_matrix(&files.q)?);
            let c = classify_pair(&p, &q, tol)?;
            let name = |k: PairCase| match k {
                PairCase::BothBelow => "both_below_one",
                PairCase::FirstAtOne => "first_at_one",
                PairCase::SecondAtOne => "second_at_one",
                PairCase::BothAtOne => "both_at_one",
            };
            (
                0,
                json!({
                    "case": c.case.id(),
                    "case_name": name(c.case),
                    "consistent": c.consistent(),
                    "norm_p_minus_q": c.norm_p_minus_q,
                    "norm_p_i_minus_q": c.norm_p_iq,
                    "norm_q_i_minus_p": c.norm_q_ip,
                    "op_norm_pq": op_norm(&(&p * &q)),
                }),
            )
        }
        Command::Verify { serial } => {
            let spec = EnsembleSpec { seed: cli.seed, dims: cli.dims.0.clone(), trials_per_dim: cli.trials, tol: *tol };
            let report = verify_ensemble_with(&spec, !serial).map_err(|e| Failure::Input(e.to_string()))?;
            (verdict(report.pass), report.to_json(true))
        }
    };
    Ok(out)
}
