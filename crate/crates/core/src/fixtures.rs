//! Bundled presentations, splittings and representations. Every fixture is
//! checked against its own predicate before it is returned or written.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{h1, AbelianInvariants};
use crate::groups::{commutant_dimension, Family, Representation, UnitQuaternion};
use crate::solver::{find_representations, SolveConfig, SolverError};
use crate::words::{
    brieskorn, brieskorn_data, build_amalgam, build_mapping_torus, standard_splitting, surface_group,
    surface_moves, surface_relator, tau_map, twisted_splitting, GroupMap, Presentation, SeifertData,
    SplittingData, SurfaceMove, WordError,
};

pub const DEFAULT_DIR: &str = "fixtures";
pub const ENV_VAR: &str = "MUTLAB_FIXTURES";

/// Homology-sphere splittings kept from the seeded scan.
pub const RANDOM_SPLITTINGS: usize = 120;
pub const SCAN_LIMIT: u64 = 5000;
pub const MOVES_MIN: usize = 12;
pub const MOVES_MAX: usize = 30;
/// Haar-random reps of the standard splitting.
pub const STANDARD_REPS: usize = 8;
pub const SEIFERT_EULER: [i64; 7] = [-6, -5, -4, -3, -2, -1, 0];
pub const BRIESKORN: [[i64; 3]; 3] = [[2, 3, 5], [2, 3, 7], [2, 3, 11]];
/// Restarts used when solving for reps of the rep-carrying splitting.
pub const SPLITTING_SOLVE_RESTARTS: usize = 200;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture {name} failed validation: {reason}")]
    ValidationFailed { name: String, reason: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn invalid(name: &str, reason: impl Into<String>) -> FixtureError {
    FixtureError::ValidationFailed { name: name.to_string(), reason: reason.into() }
}

/// `$MUTLAB_FIXTURES` if set, else `fallback`.
pub fn fixture_dir(fallback: &Path) -> PathBuf {
    std::env::var_os(ENV_VAR).map(PathBuf::from).unwrap_or_else(|| fallback.to_path_buf())
}

/// Move names for a seeded random splitting.
pub fn random_moves(seed: u64) -> Vec<&'static str> {
    let moves = surface_moves();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(MOVES_MIN..=MOVES_MAX);
    (0..len).map(|_| moves[rng.random_range(0..moves.len())].name).collect()
}

/// `i_b = i_0 ∘ φ` with `φ` drawn from the surface-move table.
pub fn random_splitting(seed: u64) -> Result<RandomSplitting, WordError> {
    let moves = surface_moves();
    let names = random_moves(seed);
    let seq: Vec<&SurfaceMove> =
        names.iter().map(|n| moves.iter().find(|m| m.name == *n).expect("move from the table")).collect();
    let splitting = twisted_splitting(&format!("r{seed}"), &seq)?;
    Ok(RandomSplitting { seed, moves: names.iter().map(|s| s.to_string()).collect(), splitting })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSplitting {
    pub seed: u64,
    pub moves: Vec<String>,
    pub splitting: SplittingData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepSource {
    Haar,
    Solved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFixture {
    pub file: String,
    /// File name of the splitting whose untwisted amalgam carries the rep.
    pub splitting: String,
    pub source: RepSource,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
struct IndexEntry {
    file: String,
    checks: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Fixtures {
    pub seed: u64,
    pub surface: Presentation,
    pub maptorus_tau: Presentation,
    pub maptorus_id: Presentation,
    pub seifert: Vec<(i64, Presentation)>,
    pub brieskorn: Vec<([i64; 3], Presentation)>,
    /// `(file name, splitting)` for splittings that carry fixture reps.
    pub splittings: Vec<(String, SplittingData)>,
    pub random_splittings: Vec<RandomSplitting>,
    pub reps: Vec<(RepFixture, Representation<UnitQuaternion>)>,
    index: Vec<IndexEntry>,
}

/// `(Z/2)^4 ⊕ Z/(4|e+3|)`, the SNF of the 2^6 Seifert family with all `b_i = 1`.
pub fn seifert_2x6_h1(e: i64) -> AbelianInvariants {
    AbelianInvariants::from_cyclic_orders(&[2, 2, 2, 2, 4 * (e + 3).abs()], 0)
}

pub fn seifert_file(e: i64) -> String {
    format!("seifert_2_2_2_2_2_2_e{e}.json")
}

pub fn brieskorn_file(a: [i64; 3]) -> String {
    format!("brieskorn_{}_{}_{}.json", a[0], a[1], a[2])
}

pub const STANDARD_SPLITTING_FILE: &str = "splitting_i0.json";

/// Reps of the standard splitting: `x = u`, `y = v` Haar random.
fn standard_reps(seed: u64) -> Result<Vec<(RepFixture, Representation<UnitQuaternion>)>, FixtureError> {
    let s = standard_splitting();
    let p = build_amalgam(&s, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for k in 0..STANDARD_REPS {
        let (x, y) = (UnitQuaternion::haar(&mut rng), UnitQuaternion::haar(&mut rng));
        let rep = Representation::for_presentation(Family::Su2, &p, vec![x, y, x, y]);
        let meta = RepFixture {
            file: format!("rep_i0_{k}.json"),
            splitting: STANDARD_SPLITTING_FILE.to_string(),
            source: RepSource::Haar,
            seed,
        };
        out.push((meta, rep));
    }
    Ok(out)
}

fn sigma_irreducible(s: &SplittingData, rep: &Representation<UnitQuaternion>) -> Result<bool, FixtureError> {
    let sigma = rep
        .restrict(s.side_a.generators())
        .and_then(|r| r.precompose(&s.i_a))
        .map_err(|e| invalid(&s.name, e.to_string()))?;
    Ok(commutant_dimension(&sigma) == 0)
}

/// Σ-irreducible SU(2) classes of the amalgam of `s`, solved with the
/// splitting's own seed.
fn solved_reps(r: &RandomSplitting, cfg: &SolveConfig) -> Result<Vec<Representation<UnitQuaternion>>, FixtureError> {
    let p = build_amalgam(&r.splitting, None)?;
    let cfg = SolveConfig { restarts: SPLITTING_SOLVE_RESTARTS, seed: r.seed, ..*cfg };
    let out = find_representations::<UnitQuaternion>(&p, Family::Su2, &cfg)?;
    let mut reps = Vec::new();
    for c in out.irreducible() {
        if sigma_irreducible(&r.splitting, &c.representative)? {
            reps.push(c.representative.clone());
        }
    }
    Ok(reps)
}

fn expect_h1(name: &str, p: &Presentation, want: &AbelianInvariants) -> Result<String, FixtureError> {
    let got = h1(p);
    if &got != want {
        return Err(invalid(name, format!("H1 = {got}, expected {want}")));
    }
    Ok(format!("H1 = {want}"))
}

impl Fixtures {
    /// Builds and validates every fixture. Solver tolerances come from `cfg`;
    /// the global seed only drives the Haar reps.
    pub fn build(seed: u64, cfg: &SolveConfig) -> Result<Self, FixtureError> {
        let mut index = Vec::new();
        let mut note = |file: &str, checks: Vec<String>| index.push(IndexEntry { file: file.into(), checks });

        let surface = surface_group();
        let c = expect_h1("surface", &surface, &AbelianInvariants::new(&[], 4))?;
        note("surface.json", vec![c]);

        let maptorus_tau = build_mapping_torus(&tau_map(), &surface)?;
        if maptorus_tau.generators().len() != 5 || maptorus_tau.relators().len() != 5 {
            return Err(invalid("maptorus_tau", "expected 5 generators and 5 relators"));
        }
        let c = expect_h1("maptorus_tau", &maptorus_tau, &AbelianInvariants::new(&[2, 2, 2, 2], 1))?;
        note("maptorus_tau.json", vec!["5 generators, 5 relators".into(), c]);

        let maptorus_id = build_mapping_torus(&GroupMap::identity(surface.generators()), &surface)?;
        let c = expect_h1("maptorus_id", &maptorus_id, &AbelianInvariants::new(&[], 5))?;
        note("maptorus_id.json", vec![c]);

        let mut seifert = Vec::new();
        for e in SEIFERT_EULER {
            let p = SeifertData::new(vec![2; 6], e, vec![1; 6])?.presentation();
            let file = seifert_file(e);
            let c = expect_h1(&file, &p, &seifert_2x6_h1(e))?;
            note(&file, vec![c]);
            seifert.push((e, p));
        }

        let mut brieskorn_fx = Vec::new();
        for a in BRIESKORN {
            let d = brieskorn_data(a)?;
            let file = brieskorn_file(a);
            if !d.is_homology_sphere() {
                return Err(invalid(&file, "Seifert data is not a homology sphere"));
            }
            let p = brieskorn(a)?;
            let c = expect_h1(&file, &p, &AbelianInvariants::trivial())?;
            note(&file, vec![format!("b = {:?}, e = {}", d.b, d.e), c]);
            brieskorn_fx.push((a, p));
        }

        let i0 = standard_splitting();
        for (label, m) in [("i_a", &i0.i_a), ("i_b", &i0.i_b)] {
            let r = m.apply(&surface_relator())?;
            if !r.is_empty() {
                return Err(invalid(STANDARD_SPLITTING_FILE, format!("{label}(R) = {r}")));
            }
        }
        let c = expect_h1(STANDARD_SPLITTING_FILE, &build_amalgam(&i0, None)?, &AbelianInvariants::new(&[], 2))?;
        note(STANDARD_SPLITTING_FILE, vec!["i_a(R) and i_b(R) reduce to the empty word".into(), format!("amalgam {c}")]);

        let mut random_splittings = Vec::new();
        let mut seed_scan = 0;
        while random_splittings.len() < RANDOM_SPLITTINGS {
            if seed_scan >= SCAN_LIMIT {
                return Err(invalid("random_splittings.json", format!("fewer than {RANDOM_SPLITTINGS} homology spheres")));
            }
            let r = random_splitting(seed_scan)?;
            if h1(&build_amalgam(&r.splitting, None)?).is_trivial() {
                random_splittings.push(r);
            }
            seed_scan += 1;
        }
        note(
            "random_splittings.json",
            vec![format!("{RANDOM_SPLITTINGS} splittings from seeds below {seed_scan}, each with amalgam H1 = 0")],
        );

        let mut reps = standard_reps(seed)?;
        let mut splittings = vec![(STANDARD_SPLITTING_FILE.to_string(), i0.clone())];
        let carrier = random_splittings
            .iter()
            .find_map(|r| match solved_reps(r, cfg) {
                Ok(v) if !v.is_empty() => Some(Ok((r, v))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
            .transpose()?
            .ok_or_else(|| invalid("reps", "no random splitting carries a Sigma-irreducible SU(2) rep"))?;
        let (carrier, solved) = carrier;
        let carrier_file = format!("splitting_{}.json", carrier.splitting.name);
        for (k, rep) in solved.into_iter().enumerate() {
            let meta = RepFixture {
                file: format!("rep_{}_{k}.json", carrier.splitting.name),
                splitting: carrier_file.clone(),
                source: RepSource::Solved,
                seed: carrier.seed,
            };
            reps.push((meta, rep));
        }
        note(&carrier_file, vec![format!("random splitting seed {}, amalgam H1 = 0", carrier.seed)]);
        splittings.push((carrier_file, carrier.splitting.clone()));

        for (meta, rep) in &reps {
            let s = &splittings.iter().find(|(f, _)| *f == meta.splitting).expect("known splitting").1;
            let p = build_amalgam(s, None)?;
            let residual = rep.relator_residual(&p);
            if !(residual <= cfg.accept_tol) {
                return Err(invalid(&meta.file, format!("residual {residual:e} above {:e}", cfg.accept_tol)));
            }
            if !sigma_irreducible(s, rep)? {
                return Err(invalid(&meta.file, "reducible on the surface"));
            }
            note(&meta.file, vec![format!("residual <= {:e} on {}", cfg.accept_tol, p.name), "irreducible on Sigma".into()]);
        }

        Ok(Fixtures {
            seed,
            surface,
            maptorus_tau,
            maptorus_id,
            seifert,
            brieskorn: brieskorn_fx,
            splittings,
            random_splittings,
            reps,
            index,
        })
    }

    pub fn splitting(&self, file: &str) -> Option<&SplittingData> {
        self.splittings.iter().find(|(f, _)| f == file).map(|(_, s)| s)
    }

    pub fn brieskorn(&self, a: [i64; 3]) -> Option<&Presentation> {
        self.brieskorn.iter().find(|(b, _)| *b == a).map(|(_, p)| p)
    }

    /// `(file name, contents)` in write order.
    pub fn files(&self) -> Vec<(String, String)> {
        fn json(v: &impl Serialize) -> String {
            let mut s = serde_json::to_string_pretty(v).expect("fixture serializes");
            s.push('\n');
            s
        }
        let mut out = vec![
            ("surface.json".to_string(), json(&self.surface)),
            ("maptorus_tau.json".to_string(), json(&self.maptorus_tau)),
            ("maptorus_id.json".to_string(), json(&self.maptorus_id)),
        ];
        out.extend(self.seifert.iter().map(|(e, p)| (seifert_file(*e), json(p))));
        out.extend(self.brieskorn.iter().map(|(a, p)| (brieskorn_file(*a), json(p))));
        out.extend(self.splittings.iter().map(|(f, s)| (f.clone(), json(s))));
        out.push(("random_splittings.json".to_string(), json(&self.random_splittings)));
        out.extend(self.reps.iter().map(|(m, r)| (m.file.clone(), json(&r.to_file()))));
        let metas: Vec<&RepFixture> = self.reps.iter().map(|(m, _)| m).collect();
        out.push(("reps.json".to_string(), json(&metas)));
        out.push((
            "index.json".to_string(),
            json(&serde_json::json!({ "seed": self.seed, "fixtures": self.index })),
        ));
        out
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, FixtureError> {
        let io = |p: &Path, e: std::io::Error| FixtureError::Io { path: p.display().to_string(), msg: e.to_string() };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::new();
        for (name, contents) in self.files() {
            let path = dir.join(&name);
            std::fs::write(&path, contents).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }

    /// Names of files in `dir` that are missing or differ from this build.
    pub fn diff_dir(&self, dir: &Path) -> Vec<String> {
        self.files()
            .into_iter()
            .filter(|(name, contents)| std::fs::read_to_string(dir.join(name)).ok().as_deref() != Some(contents))
            .map(|(name, _)| name)
            .collect()
    }
}

pub fn make_fixtures(dir: &Path, seed: u64, cfg: &SolveConfig) -> Result<Fixtures, FixtureError> {
    let fx = Fixtures::build(seed, cfg)?;
    fx.write(dir)?;
    Ok(fx)
}
