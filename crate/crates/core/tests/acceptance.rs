//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use mutlab::abelian::EulerSearch;
use mutlab::checks;
use mutlab::fixtures::{self, Fixtures};
use mutlab::groups::{Family, SU3Element, UnitQuaternion};
use mutlab::report::{CheckRecord, ClaimId};
use mutlab::solver::{find_representations, rotation_number_count, SolveConfig};
use mutlab::words::{brieskorn, SplittingData};

struct Outcome {
    claim: ClaimId,
    ok: bool,
    elapsed: Duration,
    limit: Duration,
    detail: String,
}

fn residual(r: &CheckRecord, key: &str) -> f64 {
    *r.residuals.get(key).unwrap_or(&f64::NAN)
}

fn count(r: &CheckRecord, key: &str) -> u64 {
    r.values.get(key).and_then(|v| v.as_u64()).unwrap_or(0)
}

fn run(
    claim: ClaimId,
    limit: Duration,
    f: impl FnOnce() -> Result<(bool, String), String>,
) -> Outcome {
    let t = Instant::now();
    let res = f();
    let elapsed = t.elapsed();
    let (ok, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { claim, ok: ok && elapsed < limit, elapsed, limit, detail }
}

fn main() {
    let cfg = SolveConfig::default();
    let secs = Duration::from_secs;
    let mut outcomes = Vec::new();

    outcomes.push(run(ClaimId::TauRelator, Duration::from_millis(1), || {
        let r = checks::tau_relator().map_err(|e| e.to_string())?;
        let literal = "b1^-1 a1 b1 a1^-1 b1^-1 b2 a2 b2^-1 a2^-1 b1";
        let image = r.values["image"].as_str().unwrap_or_default().to_string();
        Ok((r.status.ok() && image == literal, format!("tau_*(R) = {image}")))
    }));

    outcomes.push(run(ClaimId::SymmrepTrace, secs(60), || {
        let r = checks::symmrep_trace(500, 1e-6, &cfg).map_err(|e| e.to_string())?;
        let ok = count(&r, "representations") >= 500
            && residual(&r, "max_rep_residual") <= 1e-10
            && residual(&r, "max_trace_gap") <= 1e-6
            && residual(&r, "max_conjugator_residual") <= 1e-8
            && count(&r, "conjugator_failures") == 0;
        Ok((ok, r.summary()))
    }));

    outcomes.push(run(ClaimId::F2Conjugator, secs(10), || {
        let r = checks::f2_conjugator_check(10_000, 11);
        Ok((count(&r, "pairs") == 10_000 && residual(&r, "max_residual") <= 1e-10, r.summary()))
    }));

    outcomes.push(run(ClaimId::H1Maptorus, secs(1), || {
        let r = checks::h1_maptorus(&EulerSearch::default()).map_err(|e| e.to_string())?;
        let e = r.values.get("euler_class").and_then(|v| v.as_i64());
        let h = serde_json::json!({ "torsion": [2, 2, 2, 2], "free_rank": 1 });
        Ok((r.status.ok() && e == Some(-3) && r.values["h1"] == h, r.summary()))
    }));

    let t = Instant::now();
    let fx = match Fixtures::build(0, &cfg) {
        Ok(fx) => fx,
        Err(e) => {
            println!("FAIL fixtures: {e}");
            std::process::exit(1);
        }
    };
    println!("---- fixtures built in {:.2?}: {} reps, {} random splittings", t.elapsed(), fx.reps.len(), fx.random_splittings.len());
    let repo_fixtures = fixtures::fixture_dir(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    let mut fixtures_ok = true;
    if repo_fixtures.is_dir() {
        let stale = fx.diff_dir(&repo_fixtures);
        fixtures_ok = stale.is_empty();
        println!(
            "---- {} fixtures in {}: {}",
            if fixtures_ok { "reproduced" } else { "STALE" },
            repo_fixtures.display(),
            if fixtures_ok { "byte-identical".to_string() } else { stale.join(", ") }
        );
    }

    outcomes.push(run(ClaimId::WtauH1, secs(60), || {
        let sp: Vec<&SplittingData> = fx.random_splittings.iter().map(|r| &r.splitting).collect();
        let r = checks::wtau_h1(&sp, 100).map_err(|e| e.to_string())?;
        Ok((r.status.ok() && count(&r, "homology_spheres") >= 100 && count(&r, "failures") == 0, r.summary()))
    }));

    outcomes.push(run(ClaimId::ExtensionCount, secs(60), || {
        let r = checks::extension_count(&fx, 16, &cfg).map_err(|e| e.to_string())?;
        let ok = r.status.ok()
            && count(&r, "representations") == fx.reps.len() as u64
            && residual(&r, "max_extension_residual") <= 1e-8
            && residual(&r, "max_z_trace_gap") <= 1e-6
            && residual(&r, "max_scan_distance") <= 1e-6;
        Ok((ok, r.summary()))
    }));

    outcomes.push(run(ClaimId::Su2Oracle, secs(300), || {
        let cfg = SolveConfig { restarts: 10_000, ..cfg };
        let mut ok = true;
        let mut parts = Vec::new();
        for a in [[2, 3, 5], [2, 3, 7]] {
            let p = brieskorn(a).map_err(|e| e.to_string())?;
            let out = find_representations::<UnitQuaternion>(&p, Family::Su2, &cfg).map_err(|e| e.to_string())?;
            let oracle = rotation_number_count(a[0], a[1], a[2]).map_err(|e| e.to_string())?;
            ok &= out.irreducible_count() == oracle && out.warnings.is_empty();
            parts.push(format!("{a:?}: solver {} oracle {oracle}", out.irreducible_count()));
        }
        Ok((ok, parts.join("; ")))
    }));

    outcomes.push(run(ClaimId::BodenSu3, secs(1800), || {
        let p = brieskorn([2, 3, 7]).map_err(|e| e.to_string())?;
        let out = find_representations::<SU3Element>(&p, Family::Su3, &cfg).map_err(|e| e.to_string())?;
        let r = checks::boden_record(&out).map_err(|e| e.to_string())?;
        let ok = count(&r, "irreducible") == 4
            && count(&r, "fixed") == 2
            && count(&r, "swapped_pairs") == 1
            && count(&r, "unresolved") == 0;
        Ok((ok && r.status.ok(), r.summary()))
    }));

    outcomes.push(run(ClaimId::HeegaardInvariance, secs(10), || {
        let r = checks::heegaard_invariance(1000, 13).map_err(|e| e.to_string())?;
        let ok = residual(&r, "max_gap_su2") <= 1e-10 && residual(&r, "max_gap_so3") <= 1e-10;
        Ok((ok, r.summary()))
    }));

    outcomes.push(run(ClaimId::PathCheck, secs(30), || {
        let r = checks::path_check(101, &cfg).map_err(|e| e.to_string())?;
        let ok = r.status.ok()
            && count(&r, "grid_points") == 101
            && residual(&r, "max_surface_residual") <= 1e-12
            && residual(&r, "max_conjugator_residual") <= 1e-8
            && residual(&r, "max_endpoint_gap") <= 1e-10;
        let flags = r.notes.len();
        Ok((ok, format!("{} ({flags} flags)", r.summary())))
    }));

    outcomes.push(run(ClaimId::MutationInvolution, secs(60), || {
        let r = checks::mutation_involution(&fx, 1e-6, &cfg).map_err(|e| e.to_string())?;
        Ok((r.status.ok() && residual(&r, "max_fingerprint_gap") <= 1e-6, r.summary()))
    }));

    outcomes.sort_by_key(|o| ClaimId::ALL.iter().position(|c| *c == o.claim));
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.ok { "pass" } else { "FAIL" };
        let slow = if o.elapsed >= o.limit { " (over time limit)" } else { "" };
        println!("{status} {:<20} {:>9.2?} < {:?}{slow} | {}", o.claim.label(), o.elapsed, o.limit, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 || !fixtures_ok {
        std::process::exit(1);
    }
}
