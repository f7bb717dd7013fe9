//! Random-restart least squares for flat representations, class
//! deduplication, conjugator search and the Brieskorn rotation-number oracle.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{
    commutant_dimension, family_distance, fingerprint, stabilizer_label, CharacterFingerprint, Family, GroupError,
    LieGroup, Representation, RepresentationFile, Stabilizer,
};
use crate::words::{brieskorn_data, Defect, Presentation, SeifertData, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("family {0} is not supported by this element type")]
    UnsupportedFamily(Family),
    #[error("relator {relator} has defect -1, which is not central in {family}")]
    UnsupportedDefect { family: Family, relator: usize },
    #[error("fingerprint clustering is not a partition: {0}")]
    PartitionViolation(String),
    #[error("representations are not conjugate (residual {residual:e})")]
    NotConjugate { residual: f64 },
    #[error("bad multiplicities: {0}")]
    BadMultiplicities(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub restarts: usize,
    pub seed: u64,
    pub accept_tol: f64,
    pub dedup_tol: f64,
    pub max_iters: usize,
    /// Gauss–Newton iteration cap after the damped phase.
    pub polish: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { restarts: 2000, seed: 0, accept_tol: 1e-8, dedup_tol: 1e-4, max_iters: 400, polish: 30 }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.accept_tol > 0.0 && self.accept_tol < self.dedup_tol) {
            return Err(SolverError::InvalidConfig(format!(
                "need 0 < accept_tol ({}) < dedup_tol ({})",
                self.accept_tol, self.dedup_tol
            )));
        }
        if self.restarts == 0 {
            return Err(SolverError::InvalidConfig("restarts must be positive".into()));
        }
        Ok(())
    }
}

/// One conjugacy class found by the solver.
#[derive(Debug, Clone)]
pub struct RepClass<G: LieGroup> {
    pub representative: Representation<G>,
    pub fingerprint: CharacterFingerprint,
    pub stabilizer: Stabilizer,
    pub commutant_dimension: usize,
    pub residual: f64,
    pub hits: usize,
}

impl<G: LieGroup> RepClass<G> {
    pub fn is_irreducible(&self) -> bool {
        self.stabilizer == Stabilizer::Irreducible
    }

    pub fn to_record(&self) -> RepClassRecord {
        RepClassRecord {
            representative: self.representative.to_file(),
            fingerprint: self.fingerprint.traces.iter().map(|c| [c.re, c.im]).collect(),
            stabilizer: self.stabilizer,
            commutant_dimension: self.commutant_dimension,
            residual: self.residual,
            hits: self.hits,
        }
    }

    /// Rebuilds a class from its record; fingerprint and stabilizer are
    /// recomputed from the representative.
    pub fn from_record(r: &RepClassRecord) -> Result<Self, SolverError> {
        let rep = Representation::<G>::from_file(&r.representative)?;
        if !G::supports(rep.family) {
            return Err(SolverError::UnsupportedFamily(rep.family));
        }
        Ok(RepClass {
            fingerprint: fingerprint(&rep),
            stabilizer: stabilizer_label(&rep),
            commutant_dimension: commutant_dimension(&rep),
            residual: r.residual,
            hits: r.hits,
            representative: rep,
        })
    }
}

/// On-disk form of a [`RepClass`], as written by `solve --out`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepClassRecord {
    pub representative: RepresentationFile,
    pub fingerprint: Vec<[f64; 2]>,
    pub stabilizer: Stabilizer,
    pub commutant_dimension: usize,
    pub residual: f64,
    pub hits: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<G: LieGroup> {
    pub family: Family,
    pub classes: Vec<RepClass<G>>,
    pub restarts: usize,
    pub accepted: usize,
    pub reran: bool,
    pub warnings: Vec<String>,
}

impl<G: LieGroup> SolveOutcome<G> {
    pub fn irreducible_count(&self) -> usize {
        self.classes.iter().filter(|c| c.is_irreducible()).count()
    }

    pub fn irreducible(&self) -> impl Iterator<Item = &RepClass<G>> {
        self.classes.iter().filter(|c| c.is_irreducible())
    }
}

/// Nonlinear least-squares residual with a right-trivialized Jacobian:
/// column block `k` is the derivative along `x_k ↦ x_k·exp(δ)`.
trait LsqModel<G: LieGroup>: Sync {
    fn residuals(&self, x: &[G]) -> DVector<f64>;
    fn linearize(&self, x: &[G]) -> (DVector<f64>, DMatrix<f64>);
}

fn retract<G: LieGroup>(x: &[G], delta: &DVector<f64>) -> Vec<G> {
    let n = G::ALGEBRA_DIM;
    x.iter()
        .enumerate()
        .map(|(k, g)| {
            let d: Vec<f64> = (0..n).map(|j| delta[k * n + j]).collect();
            g.compose(&G::exp_algebra(&d)).renormalize()
        })
        .collect()
}

/// Levenberg damping followed by pseudo-inverse Gauss–Newton steps.
/// Returns the final point and its residual norm.
fn minimize<G: LieGroup, M: LsqModel<G>>(
    model: &M,
    mut x: Vec<G>,
    max_iters: usize,
    polish: usize,
    stop: f64,
) -> (Vec<G>, f64) {
    if x.is_empty() {
        let r = model.residuals(&x);
        return (x, r.norm());
    }
    let (mut r, mut jac) = model.linearize(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut stalls = 0;
    for _ in 0..max_iters {
        if cost.sqrt() < stop {
            break;
        }
        let jt = jac.transpose();
        let grad = &jt * &r;
        if grad.norm() < 1e-15 {
            break;
        }
        let jtj = &jt * &jac;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda;
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let delta = -chol.solve(&grad);
            let trial = retract(&x, &delta);
            let r_trial = model.residuals(&trial);
            let c_trial = r_trial.norm_squared();
            if c_trial < cost {
                stalls = if c_trial > cost * (1.0 - 1e-6) { stalls + 1 } else { 0 };
                x = trial;
                cost = c_trial;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved || stalls > 20 || lambda > 1e10 {
            break;
        }
        (r, jac) = model.linearize(&x);
        // Stuck in a local minimum well away from zero.
        if cost > 1e-4 && grad.norm() < 1e-10 {
            break;
        }
    }
    for _ in 0..polish {
        if cost.sqrt() < 1e-15 {
            break;
        }
        let (r0, j0) = model.linearize(&x);
        let svd = j0.svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let Ok(step) = svd.solve(&r0, 1e-10 * smax.max(1e-300)) else {
            break;
        };
        let trial = retract(&x, &(-step));
        let c_trial = model.residuals(&trial).norm_squared();
        if c_trial < cost {
            x = trial;
            cost = c_trial;
        } else {
            break;
        }
    }
    (x, cost.sqrt())
}

#[derive(Debug, Clone)]
struct CompiledRelator<G> {
    letters: Vec<(usize, bool)>,
    /// `None` means the nearest central element (SO(3) lifts).
    target: Option<G>,
}

fn compile_word(p: &Presentation, w: &Word) -> Vec<(usize, bool)> {
    w.letters()
        .iter()
        .map(|l| (p.index_of(&l.generator).expect("validated presentation"), l.exponent < 0))
        .collect()
}

fn eval_letters<G: LieGroup>(values: &[G], letters: &[(usize, bool)]) -> G {
    let mut acc = G::identity();
    for (n, &(k, inv)) in letters.iter().enumerate() {
        acc = if inv { acc.compose(&values[k].inv()) } else { acc.compose(&values[k]) };
        if (n + 1) % crate::groups::RENORMALIZE_EVERY == 0 {
            acc = acc.renormalize();
        }
    }
    acc
}

fn nearest_central<G: LieGroup>(g: &G) -> G {
    G::center()
        .into_iter()
        .min_by(|a, b| g.ambient_distance(a).total_cmp(&g.ambient_distance(b)))
        .expect("nonempty center")
}

/// Relator system with some generators pinned to fixed values.
struct RelatorModel<G: LieGroup> {
    relators: Vec<CompiledRelator<G>>,
    /// Values of all generators; free ones are overwritten from `x`.
    base: Vec<G>,
    /// For each generator, its block index among the unknowns.
    slot: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl<G: LieGroup> RelatorModel<G> {
    fn values(&self, x: &[G]) -> Vec<G> {
        let mut v = self.base.clone();
        for (i, &k) in self.free.iter().enumerate() {
            v[k] = x[i];
        }
        v
    }

    fn target(&self, rel: &CompiledRelator<G>, value: &G) -> G {
        rel.target.unwrap_or_else(|| nearest_central(value))
    }
}

impl<G: LieGroup> LsqModel<G> for RelatorModel<G> {
    fn residuals(&self, x: &[G]) -> DVector<f64> {
        let m = G::AMBIENT_DIM;
        let values = self.values(x);
        let mut out = DVector::zeros(m * self.relators.len());
        let mut buf = vec![0.0; m];
        for (ri, rel) in self.relators.iter().enumerate() {
            let v = eval_letters(&values, &rel.letters);
            let t = self.target(rel, &v);
            G::flatten(&(v.ambient() - t.ambient()), &mut buf);
            out.rows_mut(ri * m, m).copy_from_slice(&buf);
        }
        out
    }

    fn linearize(&self, x: &[G]) -> (DVector<f64>, DMatrix<f64>) {
        let m = G::AMBIENT_DIM;
        let n = G::ALGEBRA_DIM;
        let values = self.values(x);
        let basis: Vec<G::Ambient> = (0..n).map(G::algebra_basis).collect();
        let mut r = DVector::zeros(m * self.relators.len());
        let mut jac = DMatrix::zeros(m * self.relators.len(), n * self.free.len());
        let mut buf = vec![0.0; m];
        for (ri, rel) in self.relators.iter().enumerate() {
            let len = rel.letters.len();
            let letter = |t: usize| {
                let (k, inv) = rel.letters[t];
                if inv { values[k].inv() } else { values[k] }
            };
            let mut pre = Vec::with_capacity(len + 1);
            pre.push(G::identity());
            for t in 0..len {
                let next = pre[t].compose(&letter(t));
                pre.push(next);
            }
            let mut suf = vec![G::identity(); len + 1];
            for t in (0..len).rev() {
                suf[t] = letter(t).compose(&suf[t + 1]);
            }
            let v = pre[len].renormalize();
            let tgt = self.target(rel, &v);
            G::flatten(&(v.ambient() - tgt.ambient()), &mut buf);
            r.rows_mut(ri * m, m).copy_from_slice(&buf);
            for t in 0..len {
                let (k, inv) = rel.letters[t];
                let Some(block) = self.slot[k] else { continue };
                // +1: pre[t]·g·X·suf[t+1];  −1: −pre[t]·X·g⁻¹·suf[t+1].
                let (left, right) = if inv { (pre[t].ambient(), suf[t].ambient()) } else { (pre[t + 1].ambient(), suf[t + 1].ambient()) };
                for (j, x_j) in basis.iter().enumerate() {
                    let d = if inv { -(left * *x_j * right) } else { left * *x_j * right };
                    G::flatten(&d, &mut buf);
                    for (row, val) in buf.iter().enumerate() {
                        jac[(ri * m + row, block * n + j)] += *val;
                    }
                }
            }
        }
        (r, jac)
    }
}

/// Generators `c` with a commutator relator `[c^±, g^±]` for every other `g`.
pub fn central_generators(p: &Presentation) -> Vec<usize> {
    let gens = p.generators();
    if gens.len() < 2 {
        return Vec::new();
    }
    let is_commutator_of = |w: &Word, a: usize, b: usize| {
        let l = w.letters();
        if l.len() != 4 {
            return false;
        }
        let (Some(x), Some(y)) = (p.index_of(&l[0].generator), p.index_of(&l[1].generator)) else {
            return false;
        };
        l[2].generator == l[0].generator
            && l[3].generator == l[1].generator
            && l[2].exponent == -l[0].exponent
            && l[3].exponent == -l[1].exponent
            && ((x == a && y == b) || (x == b && y == a))
    };
    (0..gens.len())
        .filter(|&c| {
            (0..gens.len())
                .filter(|&g| g != c)
                .all(|g| p.relators().iter().any(|r| is_commutator_of(&r.word, c, g)))
        })
        .collect()
}

const MAX_PIN_PATTERNS: usize = 64;

fn pin_patterns<G: LieGroup>(central: &[usize]) -> Vec<Vec<(usize, G)>> {
    let center = G::center();
    let total = center.len().checked_pow(central.len() as u32).unwrap_or(usize::MAX);
    if central.is_empty() || total > MAX_PIN_PATTERNS {
        return Vec::new();
    }
    (0..total)
        .map(|mut code| {
            central
                .iter()
                .map(|&k| {
                    let v = center[code % center.len()];
                    code /= center.len();
                    (k, v)
                })
                .collect()
        })
        .collect()
}

struct Problem<G: LieGroup> {
    family: Family,
    relators: Vec<CompiledRelator<G>>,
    n_gens: usize,
    patterns: Vec<Vec<(usize, G)>>,
}

impl<G: LieGroup> Problem<G> {
    fn new(p: &Presentation, family: Family) -> Result<Self, SolverError> {
        if !G::supports(family) {
            return Err(SolverError::UnsupportedFamily(family));
        }
        let mut relators = Vec::with_capacity(p.relators().len());
        for (i, r) in p.relators().iter().enumerate() {
            let target = if family == Family::So3 {
                None
            } else {
                Some(G::central(r.defect).ok_or(SolverError::UnsupportedDefect { family, relator: i })?)
            };
            relators.push(CompiledRelator { letters: compile_word(p, &r.word), target });
        }
        Ok(Problem { family, relators, n_gens: p.generators().len(), patterns: pin_patterns::<G>(&central_generators(p)) })
    }

    /// Restart `i` uses pin pattern `i mod (P+1)`; the last bucket is unpinned.
    fn model_for(&self, restart: usize) -> RelatorModel<G> {
        let bucket = restart % (self.patterns.len() + 1);
        let pins: &[(usize, G)] = self.patterns.get(bucket).map(|v| v.as_slice()).unwrap_or(&[]);
        let mut base = vec![G::identity(); self.n_gens];
        let mut slot = vec![None; self.n_gens];
        let mut free = Vec::new();
        for k in 0..self.n_gens {
            if let Some((_, v)) = pins.iter().find(|(j, _)| *j == k) {
                base[k] = *v;
            } else {
                slot[k] = Some(free.len());
                free.push(k);
            }
        }
        RelatorModel { relators: self.relators.clone(), base, slot, free }
    }

    fn run(&self, restart: usize, seed: u64, cfg: &SolveConfig) -> Option<Vec<G>> {
        let model = self.model_for(restart);
        let x0: Vec<G> = if restart == 0 {
            vec![G::identity(); model.free.len()]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
            (0..model.free.len()).map(|_| G::haar(&mut rng)).collect()
        };
        let (x, _) = minimize(&model, x0, cfg.max_iters, cfg.polish, cfg.accept_tol * 1e-4);
        let values = model.values(&x);
        let worst = model
            .relators
            .iter()
            .map(|rel| {
                let v = eval_letters(&values, &rel.letters);
                v.ambient_distance(&model.target(rel, &v))
            })
            .fold(0.0, f64::max);
        (worst <= cfg.accept_tol).then_some(values)
    }
}

/// Raw accepted solutions, one per successful restart, in restart order.
pub fn sample_representations<G: LieGroup>(
    p: &Presentation,
    family: Family,
    cfg: &SolveConfig,
) -> Result<Vec<Representation<G>>, SolverError> {
    cfg.validate()?;
    let problem = Problem::<G>::new(p, family)?;
    let found: Vec<Option<Vec<G>>> =
        (0..cfg.restarts).into_par_iter().map(|i| problem.run(i, cfg.seed, cfg)).collect();
    Ok(found
        .into_iter()
        .flatten()
        .map(|images| Representation::for_presentation(problem.family, p, images))
        .filter(|rep| rep.residual <= cfg.accept_tol)
        .collect())
}

/// Greedy clustering of fingerprints sorted lexicographically. Every point
/// must lie within `tol` of exactly one cluster seed.
fn cluster<G: LieGroup>(
    mut reps: Vec<(Representation<G>, CharacterFingerprint)>,
    tol: f64,
) -> Result<Vec<Vec<(Representation<G>, CharacterFingerprint)>>, SolverError> {
    reps.sort_by(|a, b| a.1.lex_cmp(&b.1).then(a.0.residual.total_cmp(&b.0.residual)));
    let mut clusters: Vec<Vec<(Representation<G>, CharacterFingerprint)>> = Vec::new();
    for item in reps {
        match clusters.iter_mut().find(|c| c[0].1.distance(&item.1) <= tol) {
            Some(c) => c.push(item),
            None => clusters.push(vec![item]),
        }
    }
    for (ci, c) in clusters.iter().enumerate() {
        for (_, fp) in c {
            let near = clusters.iter().filter(|d| d[0].1.distance(fp) <= tol).count();
            if near != 1 {
                return Err(SolverError::PartitionViolation(format!(
                    "a member of class {ci} lies within {tol:e} of {near} class seeds"
                )));
            }
        }
    }
    Ok(clusters)
}

fn classify<G: LieGroup>(
    reps: Vec<Representation<G>>,
    cfg: &SolveConfig,
) -> Result<Vec<RepClass<G>>, SolverError> {
    let with_fp: Vec<_> = reps.into_iter().map(|r| {
        let fp = fingerprint(&r);
        (r, fp)
    }).collect();
    let clusters = cluster(with_fp, cfg.dedup_tol)?;
    Ok(clusters
        .into_iter()
        .map(|members| {
            let hits = members.len();
            let (rep, fp) = members
                .into_iter()
                .min_by(|a, b| a.0.residual.total_cmp(&b.0.residual))
                .expect("nonempty cluster");
            let dim = commutant_dimension(&rep);
            RepClass {
                stabilizer: stabilizer_label(&rep),
                commutant_dimension: dim,
                residual: rep.residual,
                fingerprint: fp,
                representative: rep,
                hits,
            }
        })
        .collect())
}

/// Saturation threshold: non-central classes below this share of restarts
/// trigger one rerun with twice the restarts.
pub const SATURATION_SHARE: f64 = 0.02;

fn undersampled<G: LieGroup>(classes: &[RepClass<G>], restarts: usize) -> Vec<usize> {
    classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.stabilizer != Stabilizer::Central && (c.hits as f64) < SATURATION_SHARE * restarts as f64)
        .map(|(i, _)| i)
        .collect()
}

pub fn find_representations<G: LieGroup>(
    p: &Presentation,
    family: Family,
    cfg: &SolveConfig,
) -> Result<SolveOutcome<G>, SolverError> {
    let mut cfg = *cfg;
    let mut reran = false;
    loop {
        let reps = sample_representations::<G>(p, family, &cfg)?;
        let accepted = reps.len();
        let classes = classify(reps, &cfg)?;
        let low = undersampled(&classes, cfg.restarts);
        if !low.is_empty() && !reran {
            reran = true;
            cfg.restarts *= 2;
            continue;
        }
        let mut warnings = Vec::new();
        if classes.is_empty() {
            warnings.push("no representation reached the acceptance tolerance".to_string());
        }
        let trivial_admissible = p.relators().iter().all(|r| r.defect == Defect::Plus) || family == Family::So3;
        if trivial_admissible && !classes.iter().any(|c| c.stabilizer == Stabilizer::Central) {
            warnings.push("the trivial representation is admissible but was not found".to_string());
        }
        for i in low {
            warnings.push(format!(
                "class {i} found by {} of {} restarts (below {}%): enumeration may be incomplete",
                classes[i].hits,
                cfg.restarts,
                SATURATION_SHARE * 100.0
            ));
        }
        return Ok(SolveOutcome { family, classes, restarts: cfg.restarts, accepted, reran, warnings });
    }
}

fn check_oracle_multiplicities(a: &[i64]) -> Result<(), SolverError> {
    if a.len() != 3 {
        return Err(SolverError::BadMultiplicities(format!("expected three multiplicities, got {}", a.len())));
    }
    if let Some(x) = a.iter().find(|&&x| x < 1) {
        return Err(SolverError::BadMultiplicities(format!("multiplicity {x} < 1")));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if num_integer::gcd(a[i], a[j]) != 1 {
                return Err(SolverError::BadMultiplicities(format!("{a:?} not pairwise coprime")));
            }
        }
    }
    Ok(())
}

/// Irreducible SU(2) classes of `Σ(a1, a2, a3)` by rotation numbers, using
/// the same Seifert data as the bundled Brieskorn fixtures.
pub fn rotation_number_count(a1: i64, a2: i64, a3: i64) -> Result<usize, SolverError> {
    check_oracle_multiplicities(&[a1, a2, a3])?;
    if [a1, a2, a3].contains(&1) {
        return Ok(0);
    }
    let data = brieskorn_data([a1, a2, a3]).map_err(|e| SolverError::BadMultiplicities(e.to_string()))?;
    rotation_number_count_for(&data)
}

/// Counts triples `0 < ℓ_i < a_i` for each central value `ε = ρ(h) = ±1`.
///
/// `x_i^{a_i} = ε^{b_i}` forces angle `θ_i = πℓ_i/a_i` with `(−1)^{ℓ_i} = ε^{b_i}`;
/// `x1 x2 = ε^e x3⁻¹` turns `θ3` into `π − θ3` when `ε^e = −1`. Nonabelian
/// solutions are the strict spherical-triangle triples, one class each.
pub fn rotation_number_count_for(d: &SeifertData) -> Result<usize, SolverError> {
    check_oracle_multiplicities(&d.multiplicities)?;
    let a = &d.multiplicities;
    let pow = |eps: i64, k: i64| if eps == 1 || k.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut count = 0;
    for eps in [1i64, -1] {
        let angles = |i: usize| -> Vec<i64> {
            (1..a[i]).filter(|l| (if l % 2 == 0 { 1 } else { -1 }) == pow(eps, d.b[i])).collect()
        };
        let flip = pow(eps, d.e) == -1;
        for &l1 in &angles(0) {
            for &l2 in &angles(1) {
                for &l3 in &angles(2) {
                    // Compare θ's as exact rationals over the common denominator.
                    let den = a[0] * a[1] * a[2];
                    let t1 = l1 * a[1] * a[2];
                    let t2 = l2 * a[0] * a[2];
                    let mut t3 = l3 * a[0] * a[1];
                    if flip {
                        t3 = den - t3;
                    }
                    if (t1 - t2).abs() < t3 && t3 < (t1 + t2).min(2 * den - t1 - t2) {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `g` with `g·ρ(x)·g⁻¹ = σ(x)` for every generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjugacy<G> {
    pub element: G,
    pub residual: f64,
}

/// `max_x dist(g ρ(x) g⁻¹, σ(x))`, sign-blind for SO(3).
pub fn conjugation_residual<G: LieGroup>(rho: &Representation<G>, sigma: &Representation<G>, g: &G) -> f64 {
    let gi = g.inv();
    rho.images()
        .iter()
        .zip(sigma.images())
        .map(|(a, b)| family_distance(rho.family, &g.compose(a).compose(&gi), b))
        .fold(0.0, f64::max)
}

/// Real matrix of `g ↦ (g·A_i − s_i·B_i·g)_i` on ambient coordinates.
fn intertwiner_operator<G: LieGroup>(a: &[G], b: &[G], signs: &[G]) -> DMatrix<f64> {
    let m = G::AMBIENT_DIM;
    let mut op = DMatrix::zeros(m * a.len().max(1), m);
    let mut e = vec![0.0; m];
    let mut buf = vec![0.0; m];
    for k in 0..m {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[k] = 1.0;
        let ek = G::unflatten(&e);
        for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
            let sb = signs[i].compose(bi).ambient();
            G::flatten(&(ek * ai.ambient() - sb * ek), &mut buf);
            for (r, v) in buf.iter().enumerate() {
                op[(i * m + r, k)] = *v;
            }
        }
    }
    op
}

/// Real dimension of `{g in the ambient algebra : g·ρ(x) = σ(x)·g for all x}`.
/// For SU(2) a value of 1 means the unit solutions are exactly `±g`.
pub fn intertwiner_dimension<G: LieGroup>(rho: &Representation<G>, sigma: &Representation<G>) -> usize {
    let signs = vec![G::identity(); rho.images().len()];
    let op = intertwiner_operator(rho.images(), sigma.images(), &signs);
    let sv = op.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max).max(1e-300);
    sv.iter().filter(|s| **s < crate::groups::COMMUTANT_THRESHOLD * largest).count()
}

struct ConjugationModel<G> {
    a: Vec<G>,
    b: Vec<G>,
}

impl<G: LieGroup> LsqModel<G> for ConjugationModel<G> {
    fn residuals(&self, x: &[G]) -> DVector<f64> {
        self.linearize(x).0
    }

    fn linearize(&self, x: &[G]) -> (DVector<f64>, DMatrix<f64>) {
        let m = G::AMBIENT_DIM;
        let n = G::ALGEBRA_DIM;
        let g = x[0];
        let gi = g.inv();
        let mut r = DVector::zeros(m * self.a.len());
        let mut jac = DMatrix::zeros(m * self.a.len(), n);
        let mut buf = vec![0.0; m];
        for (i, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let v = g.compose(a).compose(&gi);
            G::flatten(&(v.ambient() - b.ambient()), &mut buf);
            r.rows_mut(i * m, m).copy_from_slice(&buf);
            for j in 0..n {
                let xj = G::algebra_basis(j);
                let d = g.ambient() * (xj * a.ambient() - a.ambient() * xj) * gi.ambient();
                G::flatten(&d, &mut buf);
                for (row, val) in buf.iter().enumerate() {
                    jac[(i * m + row, j)] = *val;
                }
            }
        }
        (r, jac)
    }
}

fn sign_patterns<G: LieGroup>(family: Family, n: usize) -> Vec<Vec<G>> {
    if family != Family::So3 || n == 0 {
        return vec![vec![G::identity(); n]];
    }
    let center = G::center();
    (0..center.len().pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let c = center[code % center.len()];
                    code /= center.len();
                    c
                })
                .collect()
        })
        .collect()
}

/// Finds `g` with `g ρ g⁻¹ = σ`. The identity is tried first. Otherwise the
/// near-null space of the linear intertwiner equation seeds a damped
/// refinement; SO(3) runs over all sign patterns of the targets.
pub fn find_conjugator<G: LieGroup>(
    rho: &Representation<G>,
    sigma: &Representation<G>,
    cfg: &SolveConfig,
) -> Result<Conjugacy<G>, SolverError> {
    if rho.family != sigma.family {
        return Err(GroupError::FamilyMismatch { expected: rho.family, got: sigma.family }.into());
    }
    let sigma = sigma.restrict(rho.generators())?;
    let fp_gap = fingerprint(rho).distance(&fingerprint(&sigma));
    if fp_gap > cfg.dedup_tol {
        return Err(SolverError::NotConjugate { residual: fp_gap });
    }
    let id = G::identity();
    let id_res = conjugation_residual(rho, &sigma, &id);
    if id_res <= cfg.accept_tol {
        return Ok(Conjugacy { element: id, residual: id_res });
    }
    let m = G::AMBIENT_DIM;
    let mut best = Conjugacy { element: id, residual: id_res };
    for signs in sign_patterns::<G>(rho.family, rho.images().len()) {
        let op = intertwiner_operator(rho.images(), sigma.images(), &signs);
        let svd = op.svd(false, true);
        let v_t = svd.v_t.expect("v_t");
        let sv = &svd.singular_values;
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
        let smallest = sv[order[0]];
        let largest = sv.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let near: Vec<usize> =
            order.iter().copied().filter(|&i| sv[i] <= (smallest * 10.0).max(1e-6 * largest)).collect();
        let mut candidates: Vec<Vec<f64>> = near.iter().map(|&i| v_t.row(i).iter().copied().collect()).collect();
        if near.len() > 1 {
            let mut combo = vec![0.0; m];
            for (w, &i) in near.iter().enumerate() {
                for (c, v) in combo.iter_mut().zip(v_t.row(i).iter()) {
                    *c += (1.0 + w as f64 * 0.618) * v;
                }
            }
            candidates.push(combo);
        }
        let targets: Vec<G> = sigma.images().iter().zip(&signs).map(|(b, s)| s.compose(b)).collect();
        let model = ConjugationModel { a: rho.images().to_vec(), b: targets };
        for c in candidates {
            let g0 = G::project(G::unflatten(&c));
            let (x, _) = minimize(&model, vec![g0], cfg.max_iters, cfg.polish, cfg.accept_tol * 1e-4);
            let res = conjugation_residual(rho, &sigma, &x[0]);
            if res < best.residual {
                best = Conjugacy { element: x[0], residual: res };
            }
        }
        if best.residual <= cfg.accept_tol * 1e-2 {
            break;
        }
    }
    if best.residual <= cfg.accept_tol {
        Ok(best)
    } else {
        Err(SolverError::NotConjugate { residual: best.residual })
    }
}

/// Damped refinement of `g ρ g⁻¹ = σ` from a given start, without the
/// linear seeding of [`find_conjugator`].
pub fn refine_conjugator<G: LieGroup>(
    rho: &Representation<G>,
    sigma: &Representation<G>,
    start: G,
    cfg: &SolveConfig,
) -> Result<Conjugacy<G>, SolverError> {
    let sigma = sigma.restrict(rho.generators())?;
    let model = ConjugationModel { a: rho.images().to_vec(), b: sigma.images().to_vec() };
    let (x, _) = minimize(&model, vec![start], cfg.max_iters, cfg.polish, cfg.accept_tol * 1e-4);
    let residual = conjugation_residual(rho, &sigma, &x[0]);
    Ok(Conjugacy { element: x[0], residual })
}
