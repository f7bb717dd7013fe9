use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use mutlab::abelian::{h1, solve_euler_class, AbelianInvariants, EulerSearch};
use mutlab::checks;
use mutlab::fixtures::{self, Fixtures, RandomSplitting};
use mutlab::groups::{Family, Representation, RepresentationFile, SU3Element, UnitQuaternion};
use mutlab::mutation::{mutate_rep, su3_duality_orbits, MutationRecord, DUALITY_TOL};
use mutlab::report::{CheckRecord, ClaimId, Report, RunConfig};
use mutlab::solver::{
    find_representations, rotation_number_count, RepClass, RepClassRecord, SolveConfig, SolveOutcome,
};
use mutlab::words::{
    build_amalgam, build_mapping_torus, build_wtau, surface_group, tau_map, Presentation, SeifertData,
    SplittingData,
};

#[derive(Debug, Error)]
enum CliError {
    /// Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Exit code 1.
    #[error("{0}")]
    Failed(String),
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Parser)]
#[command(name = "mutlab", version, about = "Flat representations and genus-2 mutation checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Acceptance tolerance on relator residuals.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate representation classes of a presentation.
    Solve {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, default_value = "su2")]
        family: String,
    },
    /// Mutate a representation of a splitting's amalgam.
    Mutate {
        #[arg(long)]
        splitting: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        /// Random starts used to confirm there are no other z-images.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Surface-group symmetry, the F2 conjugator and the Heegaard action.
    VerifySymmrep {
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Duality orbits of SU(3) classes written by `solve --out`.
    Su3Orbits {
        #[arg(long)]
        classes: PathBuf,
    },
    /// The three-piece path on the tau mapping torus.
    PathCheck {
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Order of the z-image in a mutation record written by `mutate --out`.
    ZOrder {
        #[arg(long)]
        result: PathBuf,
    },
    /// First homology of a presentation, or of the groups built from a splitting.
    H1 {
        #[arg(long, conflicts_with = "splitting", required_unless_present = "splitting")]
        presentation: Option<PathBuf>,
        #[arg(long)]
        splitting: Option<PathBuf>,
    },
    /// Euler class of S^2(a_1..a_n; e) matching the homology of a presentation.
    EulerClass {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2,2,2,2")]
        multiplicities: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-50,50")]
        window: Vec<i64>,
    },
    /// Rotation-number count of irreducible SU(2) classes of a Brieskorn sphere,
    /// compared with the solver.
    OracleCount {
        #[arg(long, conflicts_with = "multiplicities", required_unless_present = "multiplicities")]
        presentation: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        multiplicities: Option<Vec<i64>>,
        /// Skip the solver and report the oracle alone.
        #[arg(long)]
        no_solve: bool,
    },
    /// Write the bundled fixtures (to --out, default the fixture directory).
    MakeFixtures,
}

struct Ctx {
    config: RunConfig,
    fixtures: PathBuf,
    out: Option<PathBuf>,
}

impl Ctx {
    fn new(g: &Global) -> Result<Self, CliError> {
        let fixtures = fixtures::fixture_dir(Path::new(fixtures::DEFAULT_DIR));
        let mut config = RunConfig { seed: g.seed, fixtures: fixtures.display().to_string(), ..RunConfig::default() };
        if let Some(t) = g.tol {
            config.accept_tol = t;
        }
        if let Some(r) = g.restarts {
            config.restarts = r;
        }
        config.out = g.out.as_ref().map(|p| p.display().to_string());
        config.solve_config().validate().map_err(input)?;
        Ok(Ctx { config, fixtures, out: g.out.clone() })
    }

    fn cfg(&self) -> SolveConfig {
        self.config.solve_config()
    }

    fn report(&self, command: &str) -> Report {
        Report::new(command, self.config.clone())
    }

    /// The path as given if it exists, else the same name under the fixture directory.
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.exists() {
            return p.to_path_buf();
        }
        let joined = self.fixtures.join(p);
        if joined.exists() {
            return joined;
        }
        match p.file_name() {
            Some(name) if self.fixtures.join(name).exists() => self.fixtures.join(name),
            _ => p.to_path_buf(),
        }
    }

    fn read<T: serde::de::DeserializeOwned>(&self, p: &Path) -> Result<T, CliError> {
        let path = self.resolve(p);
        let text = std::fs::read_to_string(&path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
    }

    fn write_out(&self, v: &impl Serialize) -> Result<(), CliError> {
        if let Some(p) = &self.out {
            write_json(p, v)?;
        }
        Ok(())
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn write_json(p: &Path, v: &impl Serialize) -> Result<(), CliError> {
    std::fs::write(p, to_json(v)).map_err(|e| failed(format!("{}: {e}", p.display())))
}

fn h1_json(a: &AbelianInvariants) -> serde_json::Value {
    // AbelianInvariants already serializes as {"torsion", "free_rank"}.
    serde_json::to_value(a).expect("serializable invariants")
}

fn brieskorn_multiplicities(p: &Presentation) -> Option<[i64; 3]> {
    let d = SeifertData::from_presentation(p).ok()?;
    if d.multiplicities.len() == 3 && d.is_homology_sphere() {
        Some([d.multiplicities[0], d.multiplicities[1], d.multiplicities[2]])
    } else {
        None
    }
}

fn class_summary<G: mutlab::groups::LieGroup>(report: &mut Report, out: &SolveOutcome<G>) {
    report.set("classes", out.classes.len());
    report.set("irreducible", out.irreducible_count());
    report.set("accepted", out.accepted);
    report.set("restarts", out.restarts);
    report.set("reran", out.reran);
    report.set("warnings", &out.warnings);
    let stabilizers: Vec<_> = out.classes.iter().map(|c| (c.stabilizer, c.hits)).collect();
    report.set("stabilizers_and_hits", stabilizers);
}

fn solve(ctx: &Ctx, presentation: &Path, family: &str) -> Result<Report, CliError> {
    let p: Presentation = ctx.read(presentation)?;
    let family: Family = family.parse().map_err(input)?;
    let mut report = ctx.report("solve");
    report.set("presentation", &p.name);
    report.set("family", family);
    let brieskorn = brieskorn_multiplicities(&p);
    let records: Vec<RepClassRecord> = match family {
        Family::Su2 | Family::So3 => {
            let out = find_representations::<UnitQuaternion>(&p, family, &ctx.cfg()).map_err(failed)?;
            class_summary(&mut report, &out);
            if let (Some(a), Family::Su2) = (brieskorn, family) {
                report.push(checks::su2_oracle_record(a, &out).map_err(failed)?);
            }
            out.classes.iter().map(|c| c.to_record()).collect()
        }
        Family::Su3 => {
            let out = find_representations::<SU3Element>(&p, family, &ctx.cfg()).map_err(failed)?;
            class_summary(&mut report, &out);
            if brieskorn == Some([2, 3, 7]) {
                report.push(checks::boden_record(&out).map_err(failed)?);
            }
            out.classes.iter().map(|c| c.to_record()).collect()
        }
    };
    ctx.write_out(&records)?;
    Ok(report)
}

fn mutate(ctx: &Ctx, splitting: &Path, rep: &Path, samples: usize) -> Result<Report, CliError> {
    let s: SplittingData = ctx.read(splitting)?;
    let file: RepresentationFile = ctx.read(rep)?;
    if file.family == Family::Su3 {
        return Err(input("mutation needs an SU(2) or SO(3) representation"));
    }
    let phi = Representation::<UnitQuaternion>::from_file(&file).map_err(input)?;
    let cfg = ctx.cfg();
    let res = mutate_rep(&s, &phi, &cfg).map_err(|e| match e {
        mutlab::mutation::MutationError::InvalidInput(m) => input(m),
        other => failed(other),
    })?;
    let mut report = ctx.report("mutate");
    report.set("splitting", &s.name);
    report.set("residuals", res.residuals);
    report.set("flags", &res.flags);
    let z = res.z_order();
    let mut ext = CheckRecord::new(ClaimId::ExtensionCount)
        .residual("extension_plus", res.residuals.extension_plus)
        .residual("extension_minus", res.residuals.extension_minus)
        .residual("so3_trace_gap", (z.so3_trace + 1.0).abs())
        .value("extension_count", res.extension_count)
        .value("so3_extensions_coincide", res.so3_extensions_coincide)
        .value("z", z.z);
    if res.irreducible_on_sigma {
        let (worst, converged) = mutlab::mutation::scan_extensions(&res, samples, ctx.config.seed, &cfg).map_err(failed)?;
        ext = ext
            .residual("max_scan_distance", worst)
            .value("scan_converged", converged)
            .require(res.extension_count == Some(2), "extension count is not two")
            .require(res.residuals.extension_plus.max(res.residuals.extension_minus) <= cfg.accept_tol, "extension residual")
            .require(res.so3_extensions_coincide, "SO(3) extensions differ")
            .require(z.pass && (z.so3_trace + 1.0).abs() <= checks::Z_TRACE_TOL, "z-image not of order two")
            .require(samples == 0 || (converged > 0 && worst <= checks::Z_TRACE_TOL), "scan found another z-image");
    } else {
        ext = ext.flag(format!(
            "reducible on the surface (commutant dimension {}): the count applies to irreducible restrictions only",
            res.sigma_commutant_dimension
        ));
    }
    report.push(ext);
    report.push(checks::involution_record(&s, &phi, ctx.config.trace_tol, &cfg).map_err(failed)?);
    ctx.write_out(&res.to_record())?;
    Ok(report)
}

fn verify_symmrep(ctx: &Ctx, samples: usize) -> Result<Report, CliError> {
    if samples == 0 {
        return Err(input("--samples must be positive"));
    }
    let cfg = ctx.cfg();
    let mut report = ctx.report("verify-symmrep");
    report.push(checks::tau_relator().map_err(failed)?);
    report.push(checks::symmrep_trace(samples, ctx.config.trace_tol, &cfg).map_err(failed)?);
    report.push(checks::f2_conjugator_check(samples.max(10_000), ctx.config.seed));
    report.push(checks::heegaard_invariance(samples.max(1000), ctx.config.seed.wrapping_add(1)).map_err(failed)?);
    ctx.write_out(&report)?;
    Ok(report)
}

fn su3_orbits(ctx: &Ctx, classes: &Path) -> Result<Report, CliError> {
    let records: Vec<RepClassRecord> = ctx.read(classes)?;
    let classes: Vec<RepClass<SU3Element>> =
        records.iter().map(RepClass::from_record).collect::<Result<_, _>>().map_err(input)?;
    let irreducible: Vec<RepClass<SU3Element>> = classes.into_iter().filter(|c| c.is_irreducible()).collect();
    let orbits = su3_duality_orbits(&irreducible, DUALITY_TOL).map_err(failed)?;
    let mut report = ctx.report("su3-orbits");
    report.set("orbits", &orbits);
    let mut rec = CheckRecord::new(ClaimId::BodenSu3)
        .value("irreducible", irreducible.len())
        .value("fixed", orbits.fixed.len())
        .value("swapped_pairs", orbits.swapped.len())
        .value("unresolved", orbits.unresolved.len())
        .require(orbits.unresolved.is_empty(), "some classes match several conjugates");
    if (irreducible.len(), orbits.fixed.len(), orbits.swapped.len()) != (4, 2, 1) {
        rec = rec.flag("counts differ from the Sigma(2,3,7) values 4 = 2 fixed + 1 swapped pair");
    }
    report.push(rec);
    ctx.write_out(&report)?;
    Ok(report)
}

fn path_check(ctx: &Ctx, grid: usize) -> Result<Report, CliError> {
    if grid < 2 {
        return Err(input("--grid needs at least two points"));
    }
    let mut report = ctx.report("path-check");
    report.push(checks::path_check(grid, &ctx.cfg()).map_err(failed)?);
    ctx.write_out(&report)?;
    Ok(report)
}

fn z_order(ctx: &Ctx, result: &Path) -> Result<Report, CliError> {
    let rec: MutationRecord = ctx.read(result)?;
    let z = rec.z_image().map_err(input)?;
    let mut report = ctx.report("z-order");
    report.set("splitting", &rec.splitting);
    let mut check = checks::z_order_record(z);
    if !rec.irreducible_on_sigma {
        check = check.note("the input is reducible on the surface; order two is only claimed for irreducible restrictions");
    }
    report.push(check);
    ctx.write_out(&report)?;
    Ok(report)
}

/// Returns the report and the JSON printed on stdout.
fn h1_cmd(ctx: &Ctx, presentation: Option<&Path>, splitting: Option<&Path>) -> Result<(Report, String), CliError> {
    let mut report = ctx.report("h1");
    let stdout = if let Some(path) = presentation {
        let p: Presentation = ctx.read(path)?;
        let inv = h1(&p);
        report.set("presentation", &p.name);
        report.set("h1", &inv);
        let maptorus = build_mapping_torus(&tau_map(), &surface_group()).map_err(failed)?;
        if p.generators() == maptorus.generators() && p.relators() == maptorus.relators() {
            let want = AbelianInvariants::new(&[2, 2, 2, 2], 1);
            report.push(
                CheckRecord::new(ClaimId::H1Maptorus).value("h1", &inv).require(inv == want, format!("H1 = {inv}")),
            );
        }
        to_json(&h1_json(&inv))
    } else {
        let path = splitting.expect("clap requires one input");
        let s: SplittingData = ctx.read(path)?;
        let am = h1(&build_amalgam(&s, None).map_err(input)?);
        let w = h1(&build_wtau(&s).map_err(input)?);
        let mt = h1(&build_amalgam(&s, Some(&tau_map())).map_err(input)?);
        let out = serde_json::json!({ "amalgam": h1_json(&am), "wtau": h1_json(&w), "amalgam_tau": h1_json(&mt) });
        report.set("splitting", &s.name);
        report.set("h1", &out);
        report.push(checks::wtau_h1(&[&s], 0).map_err(failed)?);
        to_json(&out)
    };
    ctx.write_out(&report)?;
    Ok((report, stdout))
}

fn euler_class(ctx: &Ctx, presentation: &Path, multiplicities: &[i64], window: &[i64]) -> Result<Report, CliError> {
    let p: Presentation = ctx.read(presentation)?;
    let [lo, hi] = window else {
        return Err(input("--window takes two integers lo,hi"));
    };
    if lo > hi {
        return Err(input("--window needs lo <= hi"));
    }
    if multiplicities.iter().any(|&a| a < 2) || multiplicities.is_empty() {
        return Err(input("multiplicities must be at least 2"));
    }
    let target = h1(&p);
    let search = EulerSearch { lo: *lo, hi: *hi, b: None };
    let mut report = ctx.report("euler-class");
    report.set("presentation", &p.name);
    report.set("target", &target);
    let mut rec = CheckRecord::new(ClaimId::H1Maptorus)
        .value("multiplicities", multiplicities)
        .value("window", [lo, hi])
        .value("target", &target);
    match solve_euler_class(multiplicities, &target, &search) {
        Ok(e) => {
            report.set("euler_class", e);
            rec = rec.value("euler_class", e);
        }
        Err(err) => rec = rec.require(false, err.to_string()),
    }
    report.push(rec);
    ctx.write_out(&report)?;
    Ok(report)
}

fn oracle_count(
    ctx: &Ctx,
    presentation: Option<&Path>,
    multiplicities: Option<&[i64]>,
    no_solve: bool,
) -> Result<Report, CliError> {
    let (a, p) = match (presentation, multiplicities) {
        (Some(path), _) => {
            let p: Presentation = ctx.read(path)?;
            let a = brieskorn_multiplicities(&p)
                .ok_or_else(|| input(format!("{} is not a three-fiber Seifert homology sphere", p.name)))?;
            (a, p)
        }
        (None, Some(m)) => {
            let [a1, a2, a3] = m else {
                return Err(input("--multiplicities takes three integers"));
            };
            let a = [*a1, *a2, *a3];
            (a, mutlab::words::brieskorn(a).map_err(input)?)
        }
        (None, None) => return Err(input("need --presentation or --multiplicities")),
    };
    let count = rotation_number_count(a[0], a[1], a[2]).map_err(input)?;
    let mut report = ctx.report("oracle-count");
    report.set("brieskorn", a);
    report.set("rotation_number_count", count);
    if !no_solve {
        let out = find_representations::<UnitQuaternion>(&p, Family::Su2, &ctx.cfg()).map_err(failed)?;
        class_summary(&mut report, &out);
        report.push(checks::su2_oracle_record(a, &out).map_err(failed)?);
    }
    ctx.write_out(&report)?;
    Ok(report)
}

fn make_fixtures(ctx: &Ctx) -> Result<Report, CliError> {
    let dir = ctx.out.clone().unwrap_or_else(|| ctx.fixtures.clone());
    let cfg = ctx.cfg();
    let fx = Fixtures::build(ctx.config.seed, &cfg).map_err(failed)?;
    let written = fx.write(&dir).map_err(failed)?;
    let mut report = ctx.report("make-fixtures");
    report.set("files", written.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy()).collect::<Vec<_>>());
    report.push(checks::h1_maptorus(&EulerSearch::default()).map_err(failed)?);
    let sp: Vec<&SplittingData> = fx.random_splittings.iter().map(|r: &RandomSplitting| &r.splitting).collect();
    report.push(checks::wtau_h1(&sp, fixtures::RANDOM_SPLITTINGS).map_err(failed)?);
    Ok(report)
}

fn run(cli: Cli) -> Result<(Report, Option<String>), CliError> {
    let ctx = Ctx::new(&cli.global)?;
    Ok(match &cli.command {
        Command::Solve { presentation, family } => (solve(&ctx, presentation, family)?, None),
        Command::Mutate { splitting, rep, samples } => (mutate(&ctx, splitting, rep, *samples)?, None),
        Command::VerifySymmrep { samples } => (verify_symmrep(&ctx, *samples)?, None),
        Command::Su3Orbits { classes } => (su3_orbits(&ctx, classes)?, None),
        Command::PathCheck { grid } => (path_check(&ctx, *grid)?, None),
        Command::ZOrder { result } => (z_order(&ctx, result)?, None),
        Command::H1 { presentation, splitting } => {
            let (r, s) = h1_cmd(&ctx, presentation.as_deref(), splitting.as_deref())?;
            (r, Some(s))
        }
        Command::EulerClass { presentation, multiplicities, window } => {
            (euler_class(&ctx, presentation, multiplicities, window)?, None)
        }
        Command::OracleCount { presentation, multiplicities, no_solve } => {
            (oracle_count(&ctx, presentation.as_deref(), multiplicities.as_deref(), *no_solve)?, None)
        }
        Command::MakeFixtures => (make_fixtures(&ctx)?, None),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((report, stdout)) => {
            for r in &report.records {
                eprintln!("{}", r.summary());
            }
            print!("{}", stdout.unwrap_or_else(|| report.to_json()));
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
