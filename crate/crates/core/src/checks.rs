//! One function per registered claim, each returning a [`CheckRecord`].
//! Shared by the CLI subcommands and the acceptance suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abelian::{h1, solve_euler_class, AbelianInvariants, EulerSearch};
use crate::fixtures::Fixtures;
use crate::groups::{fingerprint, Family, Representation, SU3Element, UnitQuaternion};
use crate::mutation::{
    f2_conjugator, f2_conjugator_residual, heegaard_mutate, involution_gap, mutate_rep, scan_extensions,
    su3_duality_orbits, surface_conjugator, verify_path, MutationError, DUALITY_TOL,
};
use crate::report::{CheckRecord, ClaimId};
use crate::solver::{rotation_number_count, sample_representations, SolveConfig, SolveOutcome, SolverError};
use crate::words::{
    build_amalgam, build_mapping_torus, build_wtau, free_group, inversion_map, surface_group, surface_relator,
    tau_map, SplittingData, Word, WordError,
};

pub const SURFACE_REP_TOL: f64 = 1e-10;
pub const F2_TOL: f64 = 1e-10;
pub const HEEGAARD_TOL: f64 = 1e-10;
pub const Z_TRACE_TOL: f64 = 1e-6;

/// `τ_*(R)` against `b1⁻¹ R b1`, exact.
pub fn tau_relator() -> Result<CheckRecord, WordError> {
    let r = surface_relator();
    let image = tau_map().apply(&r)?;
    let b1 = Word::parse("b1")?;
    let expected = b1.inverse().concat(&r).concat(&b1);
    Ok(CheckRecord::new(ClaimId::TauRelator)
        .value("image", image.to_string())
        .value("expected", expected.to_string())
        .require(image == expected, "tau_*(R) differs from b1^-1 R b1"))
}

/// Solves for `samples` surface reps and checks trace symmetry and the conjugator.
pub fn symmrep_trace(samples: usize, trace_tol: f64, cfg: &SolveConfig) -> Result<CheckRecord, MutationError> {
    let surface = surface_group();
    let cfg = SolveConfig { restarts: samples + samples / 4 + 1, ..*cfg };
    let reps: Vec<Representation<UnitQuaternion>> = sample_representations(&surface, Family::Su2, &cfg)?
        .into_iter()
        .filter(|r| r.residual <= SURFACE_REP_TOL)
        .take(samples)
        .collect();
    let tau = tau_map();
    let mut trace_gap: f64 = 0.0;
    let mut conj: f64 = 0.0;
    let mut max_rep: f64 = 0.0;
    let mut failures = 0;
    for rho in &reps {
        max_rep = max_rep.max(rho.residual);
        let twisted = rho.precompose(&tau)?;
        trace_gap = trace_gap.max(fingerprint(&twisted).distance(&fingerprint(rho)));
        match surface_conjugator(rho, &cfg) {
            Ok(c) => conj = conj.max(c.residual),
            Err(_) => failures += 1,
        }
    }
    Ok(CheckRecord::new(ClaimId::SymmrepTrace)
        .residual("max_rep_residual", max_rep)
        .residual("max_trace_gap", trace_gap)
        .residual("max_conjugator_residual", conj)
        .value("representations", reps.len())
        .value("conjugator_failures", failures)
        .require(reps.len() >= samples, format!("only {} reps reached {SURFACE_REP_TOL:e}", reps.len()))
        .require(trace_gap <= trace_tol, "trace gap above tolerance")
        .require(failures == 0 && conj <= cfg.accept_tol, "surface conjugator residual above tolerance"))
}

pub fn f2_conjugator_check(samples: usize, seed: u64) -> CheckRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (a, b) = (UnitQuaternion::haar(&mut rng), UnitQuaternion::haar(&mut rng));
        worst = worst.max(f2_conjugator_residual(a, b, f2_conjugator(a, b)));
    }
    CheckRecord::new(ClaimId::F2Conjugator)
        .residual("max_residual", worst)
        .value("pairs", samples)
        .require(worst <= F2_TOL, "conjugator residual above 1e-10")
}

/// `fingerprint(ρ∘T_*)` against `fingerprint(ρ)` on `F2 = <x, y>`, SU(2) and SO(3).
pub fn heegaard_invariance(samples: usize, seed: u64) -> Result<CheckRecord, MutationError> {
    let f2 = free_group("F2", &["x", "y"]);
    let t = inversion_map(f2.generators());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = CheckRecord::new(ClaimId::HeegaardInvariance);
    let mut ok = true;
    for family in [Family::Su2, Family::So3] {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let images = vec![UnitQuaternion::haar(&mut rng), UnitQuaternion::haar(&mut rng)];
            let rho = Representation::for_presentation(family, &f2, images);
            let moved = heegaard_mutate(&rho, &t)?;
            worst = worst.max(fingerprint(&moved).distance(&fingerprint(&rho)));
        }
        ok &= worst <= HEEGAARD_TOL;
        rec = rec.residual(&format!("max_gap_{family}"), worst);
    }
    Ok(rec.value("samples_per_family", samples).require(ok, "fingerprint gap above 1e-10"))
}

/// `H_1` of the τ mapping torus and the Euler-class scan over the `2^6` family.
pub fn h1_maptorus(search: &EulerSearch) -> Result<CheckRecord, WordError> {
    let p = build_mapping_torus(&tau_map(), &surface_group())?;
    let got = h1(&p);
    let want = AbelianInvariants::new(&[2, 2, 2, 2], 1);
    let e = solve_euler_class(&[2; 6], &got, search);
    let mut rec = CheckRecord::new(ClaimId::H1Maptorus)
        .value("h1", &got)
        .value("window", [search.lo, search.hi])
        .require(got == want, format!("H1 = {got}"));
    rec = match e {
        Ok(e) => rec.value("euler_class", e).require(e == -3, format!("Euler class {e}")),
        Err(err) => rec.require(false, err.to_string()),
    };
    Ok(rec)
}

/// The record for `h1 --splitting`: H1 of the amalgam, `W^τ` and the τ-reglued amalgam.
pub fn wtau_h1(splittings: &[&SplittingData], min_count: usize) -> Result<CheckRecord, WordError> {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut skipped = 0;
    for s in splittings {
        if !h1(&build_amalgam(s, None)?).is_trivial() {
            skipped += 1;
            continue;
        }
        checked += 1;
        let w = h1(&build_wtau(s)?);
        let m = h1(&build_amalgam(s, Some(&tau_map()))?);
        if w != AbelianInvariants::new(&[], 1) || !m.is_trivial() {
            bad.push(format!("{}: H1(W^tau) = {w}, H1(M^tau) = {m}", s.name));
        }
    }
    let mut rec = CheckRecord::new(ClaimId::WtauH1)
        .value("homology_spheres", checked)
        .value("skipped_nontrivial_h1", skipped)
        .value("failures", bad.len());
    for b in &bad {
        rec = rec.note(b.clone());
    }
    rec = rec
        .require(bad.is_empty(), "some splitting violates the H1 predicate")
        .require(checked >= min_count, format!("{checked} homology-sphere splittings, need {min_count}"));
    if checked == 0 && min_count == 0 {
        rec = rec.flag("the amalgam has nontrivial H1, so the claim does not apply");
    }
    Ok(rec)
}

/// Extension count and z order for every fixture rep.
pub fn extension_count(fx: &Fixtures, samples: usize, cfg: &SolveConfig) -> Result<CheckRecord, MutationError> {
    let mut rec = CheckRecord::new(ClaimId::ExtensionCount);
    let (mut ext, mut trace, mut scan): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut ok = true;
    let mut checked = 0;
    for (meta, rep) in &fx.reps {
        let s = fx.splitting(&meta.splitting).ok_or_else(|| MutationError::InvalidInput(meta.splitting.clone()))?;
        let res = mutate_rep(s, rep, cfg)?;
        if !res.irreducible_on_sigma {
            continue;
        }
        checked += 1;
        let z = res.z_order();
        let e = res.residuals.extension_plus.max(res.residuals.extension_minus);
        ext = ext.max(e);
        trace = trace.max((z.so3_trace + 1.0).abs());
        let (worst, converged) = scan_extensions(&res, samples, cfg.seed, cfg)?;
        scan = scan.max(worst);
        let this = res.extension_count == Some(2)
            && e <= cfg.accept_tol
            && res.so3_extensions_coincide
            && (z.so3_trace + 1.0).abs() <= Z_TRACE_TOL
            && (samples == 0 || (converged > 0 && worst <= Z_TRACE_TOL));
        if !this {
            rec = rec.note(format!("{} fails: count {:?}, residual {e:e}, trace {}", meta.file, res.extension_count, z.so3_trace));
        }
        ok &= this;
    }
    Ok(rec
        .residual("max_extension_residual", ext)
        .residual("max_z_trace_gap", trace)
        .residual("max_scan_distance", scan)
        .value("representations", checked)
        .require(ok && checked > 0, "some Sigma-irreducible fixture rep has a bad extension"))
}

/// The z-order check on a single mutation result, for `z-order --result`.
pub fn z_order_record(z: UnitQuaternion) -> CheckRecord {
    let r = crate::mutation::z_order_report(z);
    CheckRecord::new(ClaimId::ExtensionCount)
        .residual("real_part", r.real_part.abs())
        .residual("so3_trace_gap", (r.so3_trace + 1.0).abs())
        .value("z", r.z)
        .require(r.pass && (r.so3_trace + 1.0).abs() <= Z_TRACE_TOL, "z-image is not of order two in SO(3)")
}

pub fn su2_oracle_record(a: [i64; 3], outcome: &SolveOutcome<UnitQuaternion>) -> Result<CheckRecord, SolverError> {
    let oracle = rotation_number_count(a[0], a[1], a[2])?;
    let found = outcome.irreducible_count();
    let mut rec = CheckRecord::new(ClaimId::Su2Oracle)
        .value("brieskorn", a)
        .value("solver_irreducible", found)
        .value("rotation_number_count", oracle)
        .value("restarts", outcome.restarts)
        .require(found == oracle, "solver and oracle disagree");
    for w in &outcome.warnings {
        rec = rec.note(w.clone());
    }
    Ok(rec)
}

/// Irreducible count and duality orbits of an SU(3) solve of `Σ(2,3,7)`.
pub fn boden_record(outcome: &SolveOutcome<SU3Element>) -> Result<CheckRecord, MutationError> {
    let irreducible: Vec<_> = outcome.irreducible().cloned().collect();
    let orbits = su3_duality_orbits(&irreducible, DUALITY_TOL)?;
    let mut rec = CheckRecord::new(ClaimId::BodenSu3)
        .value("irreducible", irreducible.len())
        .value("fixed", orbits.fixed.len())
        .value("swapped_pairs", orbits.swapped.len())
        .value("unresolved", orbits.unresolved.len())
        .value("classes", outcome.classes.len())
        .value("restarts", outcome.restarts)
        .require(irreducible.len() == 4, format!("{} irreducible classes", irreducible.len()))
        .require(
            orbits.fixed.len() == 2 && orbits.swapped.len() == 1 && orbits.unresolved.is_empty(),
            "orbits differ from 2 fixed + 1 swapped pair",
        );
    for w in &outcome.warnings {
        rec = rec.note(w.clone());
    }
    Ok(rec)
}

/// `n` evenly spaced points of `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn path_check(grid_points: usize, cfg: &SolveConfig) -> Result<CheckRecord, MutationError> {
    let r = verify_path(&unit_grid(grid_points), cfg)?;
    let mut rec = CheckRecord::new(ClaimId::PathCheck)
        .residual("max_surface_residual", r.max_surface_residual)
        .residual("max_conjugator_residual", r.max_conjugator_residual)
        .residual("max_derived_deviation", r.max_derived_deviation)
        .residual("max_piece_residual", r.max_piece_residual)
        .residual("max_endpoint_gap", r.endpoint_gaps.iter().cloned().fold(0.0, f64::max))
        .residual("printed_formula_max_residual", r.printed_formula_max_residual)
        .value("grid_points", r.grid_points)
        .value("max_step_ratio", r.max_step_ratio)
        .value("r0_commutant_dimension", r.r0_commutant_dimension)
        .value("r0_axis", r.r0_axis)
        .require(grid_points >= 2, "grid needs at least two points")
        .require(r.pass(), r.broken.clone().unwrap_or_default());
    for f in &r.flags {
        rec = rec.flag(f.clone());
    }
    Ok(rec)
}

pub fn mutation_involution(
    fx: &Fixtures,
    trace_tol: f64,
    cfg: &SolveConfig,
) -> Result<CheckRecord, MutationError> {
    let mut worst: f64 = 0.0;
    for (meta, rep) in &fx.reps {
        let s = fx.splitting(&meta.splitting).ok_or_else(|| MutationError::InvalidInput(meta.splitting.clone()))?;
        worst = worst.max(involution_gap(s, rep, cfg)?);
    }
    Ok(CheckRecord::new(ClaimId::MutationInvolution)
        .residual("max_fingerprint_gap", worst)
        .value("representations", fx.reps.len())
        .require(!fx.reps.is_empty() && worst <= trace_tol, "fingerprint gap above tolerance"))
}

/// Involution gap for a single splitting and rep, for `mutate`.
pub fn involution_record(
    s: &SplittingData,
    rep: &Representation<UnitQuaternion>,
    trace_tol: f64,
    cfg: &SolveConfig,
) -> Result<CheckRecord, MutationError> {
    let gap = involution_gap(s, rep, cfg)?;
    Ok(CheckRecord::new(ClaimId::MutationInvolution)
        .residual("fingerprint_gap", gap)
        .require(gap <= trace_tol, "fingerprint gap above tolerance"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_claims_pass() {
        assert!(tau_relator().unwrap().status.ok());
        assert!(f2_conjugator_check(100, 1).status.ok());
        assert!(heegaard_invariance(50, 2).unwrap().status.ok());
        assert!(h1_maptorus(&EulerSearch::default()).unwrap().status.ok());
    }

    #[test]
    fn grid_endpoints() {
        let g = unit_grid(101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!((g[50] - 0.5).abs() < 1e-16);
    }

    #[test]
    fn wtau_on_standard_splitting_flags() {
        let s = crate::words::standard_splitting();
        let rec = wtau_h1(&[&s], 0).unwrap();
        assert_eq!(rec.status, crate::report::Status::Flag);
    }
}
