//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;

use rand::Rng;
use twoproj::numeric::{dist, from_real_rows, hermitian_residual, polar_decompose, projector_residual};
use twoproj::polar::{self, PartialIsometry};
use twoproj::products::{self, Criterion};
use twoproj::random::{self, rng_from_seed};
use twoproj::{dagger, Tol};
use twoproj_cli::{run, verify_ensemble, verify_ensemble_with, EnsembleSpec, Report};

const SEED: u64 = 42;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn spec() -> EnsembleSpec {
    EnsembleSpec { seed: SEED, dims: (2..=10).collect(), trials_per_dim: 50, tol: Tol::default() }
}

/// All listed properties pass; the detail names the worst value of each.
fn props(report: &Report, ids: &[&str]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ids {
        match report.property(id) {
            Some(p) => {
                ok &= p.pass && p.trials > 0;
                parts.push(format!("{id}={:.2e}/{}", p.worst.unwrap_or(f64::NAN), p.trials));
            }
            None => {
                ok = false;
                parts.push(format!("{id}=missing"));
            }
        }
    }
    outcome(ok, parts.join(" "))
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    outcome(a.ok && b.ok, format!("{}; {}", a.detail, b.detail))
}

fn dim(rng: &mut impl Rng) -> usize {
    rng.random_range(2..=10)
}

fn crimmins(report: &Report, tol: &Tol) -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 1);
    let mut min_residual = f64::INFINITY;
    let mut accepted = 0;
    for _ in 0..500 {
        let g = random::random_contraction::<f64>(dim(&mut rng), &mut rng);
        let m = products::is_in_x(&g, tol, Criterion::Crimmins).expect("square finite input");
        accepted += m.member as usize;
        min_residual = min_residual.min(m.residual);
    }
    let dedicated = outcome(
        accepted == 0 && min_residual > 1e-6,
        format!("contractions accepted={accepted}/500 min_residual={min_residual:.2e}"),
    );
    both(props(report, &["x.products", "x.canonical"]), dedicated)
}

fn sebestyen(report: &Report, tol: &Tol) -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 1);
    let mut disagreements = 0;
    for _ in 0..500 {
        let g = random::random_contraction::<f64>(dim(&mut rng), &mut rng);
        let a = products::is_in_x(&g, tol, Criterion::Crimmins).unwrap().member;
        let b = products::is_in_x(&g, tol, Criterion::Sebestyen).unwrap().member;
        disagreements += (a != b) as usize;
    }
    both(
        props(report, &["x.criteria_agree"]),
        outcome(disagreements == 0, format!("contraction disagreements={disagreements}")),
    )
}

fn ando(report: &Report, tol: &Tol) -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 6);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..200 {
        let n = dim(&mut rng);
        match random::random_ando_data::<f64>(n, tol, &mut rng).and_then(|d| products::ando_build(&d, tol)) {
            Ok(q) => worst = worst.max(projector_residual(&q)).max(hermitian_residual(&q)),
            Err(_) => errors += 1,
        }
    }
    let dedicated = outcome(errors == 0 && worst <= 1e-9, format!("built={} worst={worst:.2e}", 200 - errors));
    both(props(report, &["ando.roundtrip", "ando.sqrt_solutions"]), dedicated)
}

fn fixtures(tol: &Tol) -> Outcome {
    let p = from_real_rows::<f64>(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let q = from_real_rows::<f64>(&[&[0.36, 0.48], &[0.48, 0.64]]);
    let t = &p * &q;
    let gap_err = (dist(&p, &q) - 0.8).abs();
    let entrywise = |a: &twoproj::Mat, b: &twoproj::Mat| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dagger_err = dagger::dagger_of_product(&t, tol)
        .map(|e| entrywise(&e.e, &from_real_rows(&[&[1.0, 0.0], &[4.0 / 3.0, 0.0]])))
        .unwrap_or(f64::INFINITY);
    let v_err = polar_decompose(&t, tol)
        .map(|pd| entrywise(&pd.v, &from_real_rows(&[&[0.6, 0.8], &[0.0, 0.0]])))
        .unwrap_or(f64::INFINITY);
    let ys_err = products::ys_norms(&from_real_rows::<f64>(&[&[0.36, 0.0], &[0.0, 0.0]]), tol)
        .map(|y| (y.canonical_norm - 0.8).abs())
        .unwrap_or(f64::INFINITY);
    let worst = gap_err.max(dagger_err).max(v_err).max(ys_err);
    outcome(worst <= 1e-12, format!("gap={gap_err:.1e} dagger={dagger_err:.1e} v={v_err:.1e} ys={ys_err:.1e}"))
}

fn jx(report: &Report, tol: &Tol) -> Outcome {
    let v = from_real_rows::<f64>(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let rejected = PartialIsometry::new(v, tol).map(|v| !polar::is_jx(&v, tol)).unwrap_or(false);
    both(props(report, &["jx.member", "jx.square"]), outcome(rejected, format!("nilpotent rejected={rejected}")))
}

fn xplus(report: &Report, tol: &Tol) -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 10);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..200 {
        let a = random::random_y_member::<f64>(dim(&mut rng), &mut rng);
        let residual = random::random_fiber_isometry(&a, tol, &mut rng)
            .and_then(|u| polar::fiber_build(&a, &u, tol))
            .and_then(|t| Ok(dist(&polar_decompose(&t, tol)?.abs_adj, &a)));
        match residual {
            Ok(r) => worst = worst.max(r),
            Err(_) => errors += 1,
        }
    }
    let dedicated = outcome(errors == 0 && worst <= 1e-9, format!("fibers={} worst={worst:.2e}", 200 - errors));
    both(props(report, &["xplus.in_y"]), dedicated)
}

fn angles(tol: &Tol) -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 12);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = dim(&mut rng);
        let m = random::random_subspace::<f64>(n, &mut rng);
        let k = random::random_subspace::<f64>(n, &mut rng);
        let direct = m.friedrichs_cos(&k, tol).unwrap_or(f64::NAN);
        let dual = m.complement().friedrichs_cos(&k.complement(), tol).unwrap_or(f64::NAN);
        let d = (direct - dual).abs();
        worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
    }
    outcome(worst <= 1e-8, format!("pairs=500 worst={worst:.2e}"))
}

fn range_identities(tol: &Tol) -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 13);
    let mut failures = 0;
    for _ in 0..200 {
        let (p, a) = random::random_projection_and_contraction::<f64>(dim(&mut rng), &mut rng);
        failures += !products::range_identities(&p, &a, tol).map(|r| r.hold()).unwrap_or(false) as usize;
    }
    outcome(failures == 0, format!("pairs=200 failures={failures}"))
}

fn determinism(first: &Report) -> Outcome {
    let second = verify_ensemble(&spec()).expect("valid spec");
    let serial = verify_ensemble_with(&spec(), false).expect("valid spec");
    let body = first.canonical_body();
    let same = body == second.canonical_body();
    let same_serial = body == serial.canonical_body();
    outcome(same && same_serial, format!("rerun_identical={same} serial_identical={same_serial} bytes={}", body.len()))
}

fn main() -> ExitCode {
    let tol = Tol::default();
    let cli = run(["twoproj", "verify", "--seed", "42", "--dims", "2..10", "--trials", "50"]);
    let report = verify_ensemble(&spec()).expect("valid spec");
    let via_cli = outcome(cli.code == 0 && report.pass, format!("cli exit={} report pass={}", cli.code, report.pass));

    let criteria: Vec<(&str, Outcome)> = vec![
        ("crimmins equivalence", crimmins(&report, &tol)),
        ("crimmins and sebestyen agree", sebestyen(&report, &tol)),
        ("kkm equality", props(&report, &["kkm"])),
        ("min-norm factorization", props(&report, &["minnorm.canonical", "minnorm.others"])),
        ("canonical gap formula", props(&report, &["ys.formula"])),
        ("ando parametrization", ando(&report, &tol)),
        ("fixture exactness", fixtures(&tol)),
        ("dagger bijection", props(&report, &["dagger.double", "dagger.idempotent", "dagger.greville"])),
        ("isometric parts", jx(&report, &tol)),
        ("positive parts", xplus(&report, &tol)),
        (
            "canonical form cross-check",
            props(&report, &["halmos.reconstruct", "halmos.cs", "halmos.spectrum", "halmos.counts"]),
        ),
        ("angle duality", angles(&tol)),
        ("range identities", range_identities(&tol)),
        ("determinism", determinism(&report)),
    ];

    let mut failed = 0;
    println!("acceptance: verify --seed 42 --dims 2..10 --trials 50 ({})", via_cli.detail);
    if !via_cli.ok {
        failed += 1;
    }
    for (i, (name, o)) in criteria.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += !o.ok as usize;
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} failing");
        ExitCode::FAILURE
    }
}
