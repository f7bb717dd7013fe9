//! Mutation of representations along a genus-2 splitting, extensions over the
//! mapping cylinder `W^τ`, Heegaard and duality actions, and the explicit
//! mapping-torus path.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{
    commutant_dimension, fingerprint, CharacterFingerprint, Family, GroupError, ProjectiveQuaternion, Quaternion,
    Representation, RepresentationFile, SU3Element, UnitQuaternion,
};
use crate::solver::{
    find_conjugator, intertwiner_dimension, refine_conjugator, RepClass, SolveConfig, SolverError,
};
use crate::words::{
    build_amalgam, build_mapping_torus, build_wtau, gen, surface_generators, surface_group, tau_map, GroupMap,
    SplittingData, WordError, STABLE_LETTER,
};

/// Bound on `|Re z|` for an SO(3) element of order two.
pub const Z_ORDER_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MutationError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("representations are not conjugate (residual {residual:e})")]
    NotConjugate { residual: f64 },
    #[error("z-image is not of order two in SO(3): real part {real_part:e}, SO(3) trace {so3_trace}")]
    OrderCheckFailed { real_part: f64, so3_trace: f64 },
    #[error("class {0} has no class with the conjugate fingerprint")]
    UnmatchedClass(usize),
    #[error(transparent)]
    Solver(SolverError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl From<SolverError> for MutationError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NotConjugate { residual } => MutationError::NotConjugate { residual },
            SolverError::Group(g) => MutationError::Group(g),
            other => MutationError::Solver(other),
        }
    }
}

fn unit_axis(q: UnitQuaternion) -> Option<[f64; 3]> {
    let v = q.quaternion().imag();
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 1e-14).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = dot3(v, v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn reject3(v: [f64; 3], n: [f64; 3]) -> [f64; 3] {
    let d = dot3(v, n);
    [v[0] - d * n[0], v[1] - d * n[1], v[2] - d * n[2]]
}

/// Pure unit quaternion orthogonal to `n`: the first of `ı, ȷ, k` least
/// aligned with `n`, made orthogonal by Gram–Schmidt.
fn orthogonal_unit(n: [f64; 3]) -> [f64; 3] {
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let e = basis
        .iter()
        .copied()
        .min_by(|a, b| dot3(*a, n).abs().total_cmp(&dot3(*b, n).abs()))
        .expect("basis");
    normalize3(reject3(e, n))
}

/// Pure unit `q` with `q A q⁻¹ = A⁻¹` and `q B q⁻¹ = B⁻¹`: a unit vector
/// orthogonal to both rotation axes. Central inputs impose no condition;
/// `ı` is used when both are central.
pub fn f2_conjugator(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion {
    let v = match (unit_axis(a), unit_axis(b)) {
        (None, None) => [1.0, 0.0, 0.0],
        (Some(n), None) | (None, Some(n)) => orthogonal_unit(n),
        (Some(na), Some(nb)) => {
            let c = cross3(na, nb);
            if dot3(c, c).sqrt() < 1e-9 {
                orthogonal_unit(na)
            } else {
                let q = normalize3(c);
                normalize3(reject3(reject3(q, na), nb))
            }
        }
    };
    UnitQuaternion::from_quaternion(Quaternion::pure(v)).canonical_sign()
}

/// `max(‖qAq⁻¹ − A⁻¹‖, ‖qBq⁻¹ − B⁻¹‖)`.
pub fn f2_conjugator_residual(a: UnitQuaternion, b: UnitQuaternion, q: UnitQuaternion) -> f64 {
    let qi = q.inverse();
    (q * a * qi).distance(a.inverse()).max((q * b * qi).distance(b.inverse()))
}

/// The conjugator of `ρ_Σ∘τ_*` to `ρ_Σ` with both SU(2) lifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceConjugator {
    /// Lift with nonnegative first nonzero coordinate.
    pub element: UnitQuaternion,
    pub lifts: [UnitQuaternion; 2],
    pub residual: f64,
    /// Real dimension of the intertwiner space; 1 means the lifts are the only solutions.
    pub intertwiner_dimension: usize,
}

fn surface_part(rho: &Representation<UnitQuaternion>) -> Result<Representation<UnitQuaternion>, MutationError> {
    Ok(rho.restrict(&surface_generators())?)
}

/// `g` with `g·ρ_Σ(τ_* x)·g⁻¹ = ρ_Σ(x)` for all surface generators `x`.
pub fn surface_conjugator(
    rho_sigma: &Representation<UnitQuaternion>,
    cfg: &SolveConfig,
) -> Result<SurfaceConjugator, MutationError> {
    let rho = surface_part(rho_sigma)?;
    let twisted = rho.precompose(&tau_map())?;
    let c = find_conjugator(&twisted, &rho, cfg)?;
    let g = c.element.canonical_sign();
    Ok(SurfaceConjugator {
        element: g,
        lifts: [g, -g],
        residual: c.residual,
        intertwiner_dimension: intertwiner_dimension(&twisted, &rho),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZOrderReport {
    pub z: [f64; 4],
    pub real_part: f64,
    pub so3_trace: f64,
    pub pass: bool,
}

/// Order two in SO(3) means a pure imaginary lift: SO(3) trace `−1`.
pub fn z_order_report(z: UnitQuaternion) -> ZOrderReport {
    let q = z.quaternion();
    ZOrderReport { z: q.to_array(), real_part: q.w, so3_trace: z.so3_trace(), pass: q.w.abs() <= Z_ORDER_TOL }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationResiduals {
    pub input: f64,
    pub conjugator: f64,
    pub mutant: f64,
    pub extension_plus: f64,
    pub extension_minus: f64,
    /// `max ‖ext(a) − φ_A(a)‖` over side-A generators.
    pub a_side: f64,
    /// `max ‖ext(z u z⁻¹) − g φ_B(u) g⁻¹‖` over side-B generators.
    pub b_side: f64,
}

#[derive(Debug, Clone)]
pub struct MutationResult {
    pub splitting: String,
    pub input: Representation<UnitQuaternion>,
    pub conjugator: SurfaceConjugator,
    /// `(φ_A, g φ_B g⁻¹)` on the τ-reglued amalgam.
    pub mutant: Representation<UnitQuaternion>,
    /// The splitting whose untwisted amalgam carries `mutant`.
    pub mutant_splitting: SplittingData,
    /// `A ↦ φ_A, B ↦ φ_B, z ↦ g` on `W^τ`.
    pub extension: Representation<UnitQuaternion>,
    pub residuals: MutationResiduals,
    pub sigma_commutant_dimension: usize,
    pub irreducible_on_sigma: bool,
    /// `Some(2)` when the only extensions are `z ↦ ±g`; `None` when the
    /// intertwiner space is positive dimensional.
    pub extension_count: Option<usize>,
    pub so3_extensions_coincide: bool,
    pub flags: Vec<String>,
}

impl MutationResult {
    pub fn z_image(&self) -> UnitQuaternion {
        *self.extension.image(&gen(STABLE_LETTER)).expect("extension assigns z")
    }

    pub fn z_order(&self) -> ZOrderReport {
        z_order_report(self.z_image())
    }

    pub fn to_record(&self) -> MutationRecord {
        MutationRecord {
            splitting: self.splitting.clone(),
            input: self.input.to_file(),
            conjugator: self.conjugator.element.quaternion().to_array(),
            lifts: self.conjugator.lifts.map(|q| q.quaternion().to_array()),
            intertwiner_dimension: self.conjugator.intertwiner_dimension,
            mutant: self.mutant.to_file(),
            mutant_splitting: self.mutant_splitting.clone(),
            extension: self.extension.to_file(),
            residuals: self.residuals,
            sigma_commutant_dimension: self.sigma_commutant_dimension,
            irreducible_on_sigma: self.irreducible_on_sigma,
            extension_count: self.extension_count,
            so3_extensions_coincide: self.so3_extensions_coincide,
            z_order: self.z_order(),
            flags: self.flags.clone(),
        }
    }
}

/// On-disk form of a [`MutationResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MutationRecord {
    pub splitting: String,
    pub input: RepresentationFile,
    pub conjugator: [f64; 4],
    pub lifts: [[f64; 4]; 2],
    pub intertwiner_dimension: usize,
    pub mutant: RepresentationFile,
    pub mutant_splitting: SplittingData,
    pub extension: RepresentationFile,
    pub residuals: MutationResiduals,
    pub sigma_commutant_dimension: usize,
    pub irreducible_on_sigma: bool,
    pub extension_count: Option<usize>,
    pub so3_extensions_coincide: bool,
    pub z_order: ZOrderReport,
    pub flags: Vec<String>,
}

impl MutationRecord {
    pub fn z_image(&self) -> Result<UnitQuaternion, MutationError> {
        let ext = Representation::<UnitQuaternion>::from_file(&self.extension)?;
        ext.image(&gen(STABLE_LETTER))
            .copied()
            .ok_or_else(|| MutationError::InvalidInput("extension has no z-image".into()))
    }
}

/// Fails with `OrderCheckFailed` unless the z-image is pure imaginary.
pub fn check_z_order(res: &MutationResult) -> Result<ZOrderReport, MutationError> {
    let r = res.z_order();
    if r.pass { Ok(r) } else { Err(MutationError::OrderCheckFailed { real_part: r.real_part, so3_trace: r.so3_trace }) }
}

/// Mutates `φ`, a representation of the untwisted amalgam of `s`.
pub fn mutate_rep(
    s: &SplittingData,
    phi: &Representation<UnitQuaternion>,
    cfg: &SolveConfig,
) -> Result<MutationResult, MutationError> {
    let amalgam = build_amalgam(s, None)?;
    let mut phi = phi.restrict(amalgam.generators())?;
    phi.residual = phi.relator_residual(&amalgam);
    if !(phi.residual <= cfg.accept_tol) {
        return Err(MutationError::InvalidInput(format!(
            "input residual {:e} exceeds {:e} on {}",
            phi.residual, cfg.accept_tol, amalgam.name
        )));
    }
    let family = phi.family;
    let phi_a = phi.restrict(s.side_a.generators())?;
    let phi_b = phi.restrict(s.side_b.generators())?;
    let phi_sigma = phi_a.precompose(&s.i_a)?;
    let dim = commutant_dimension(&phi_sigma);
    let conj = surface_conjugator(&phi_sigma, cfg)?;
    let g = conj.element;
    let gi = g.inverse();

    let mutant_p = build_amalgam(s, Some(&tau_map()))?;
    let mut images = phi_a.images().to_vec();
    images.extend(phi_b.images().iter().map(|u| g * *u * gi));
    let mutant = Representation::for_presentation(family, &mutant_p, images);
    let mutant_splitting = s.reglued(&tau_map(), format!("{}^tau", s.name))?;

    let wtau = build_wtau(s)?;
    let extend = |z: UnitQuaternion| {
        let mut images = phi_a.images().to_vec();
        images.extend(phi_b.images().iter().copied());
        images.push(z);
        Representation::for_presentation(family, &wtau, images)
    };
    let extension = extend(g);
    let minus = extend(-g);

    let zw = crate::words::Word::generator(&gen(STABLE_LETTER));
    let mut a_side: f64 = 0.0;
    for (x, v) in phi_a.generators().iter().zip(phi_a.images()) {
        a_side = a_side.max(extension.image(x).expect("side A generator").distance(*v));
    }
    let mut b_side: f64 = 0.0;
    for (u, v) in phi_b.generators().iter().zip(phi_b.images()) {
        let w = zw.concat(&crate::words::Word::generator(u)).concat(&zw.inverse());
        b_side = b_side.max(extension.evaluate(&w)?.distance(g * *v * gi));
    }

    let irreducible = dim == 0;
    let mut flags = Vec::new();
    if !irreducible {
        flags.push(format!(
            "reducible on the surface (commutant dimension {dim}): extensions are parameterized by the stabilizer"
        ));
    }
    let extension_count = (conj.intertwiner_dimension == 1).then_some(2);
    Ok(MutationResult {
        splitting: s.name.clone(),
        residuals: MutationResiduals {
            input: phi.residual,
            conjugator: conj.residual,
            mutant: mutant.residual,
            extension_plus: extension.residual,
            extension_minus: minus.residual,
            a_side,
            b_side,
        },
        so3_extensions_coincide: ProjectiveQuaternion(g) == ProjectiveQuaternion(-g),
        input: phi,
        conjugator: conj,
        mutant,
        mutant_splitting,
        extension,
        sigma_commutant_dimension: dim,
        irreducible_on_sigma: irreducible,
        extension_count,
        flags,
    })
}

/// Solves for z-images from `samples` Haar-random starts and returns the
/// largest distance of a converged solution from `{g, −g}`, with the number
/// of converged starts.
pub fn scan_extensions(
    res: &MutationResult,
    samples: usize,
    seed: u64,
    cfg: &SolveConfig,
) -> Result<(f64, usize), MutationError> {
    let sigma = surface_part(&res.input.restrict(res.mutant_splitting.side_a.generators())?.precompose(
        &res.mutant_splitting.i_a,
    )?)?;
    let twisted = sigma.precompose(&tau_map())?;
    let g = res.conjugator.element;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut converged = 0;
    for _ in 0..samples {
        let start = UnitQuaternion::haar(&mut rng);
        let c = refine_conjugator(&twisted, &sigma, start, cfg)?;
        if c.residual <= cfg.accept_tol {
            converged += 1;
            worst = worst.max(c.element.distance(g).min(c.element.distance(-g)));
        }
    }
    Ok((worst, converged))
}

/// `ρ∘T_*`, with generators in the source order of `T`.
pub fn heegaard_mutate<G: crate::groups::LieGroup>(
    rho: &Representation<G>,
    t: &GroupMap,
) -> Result<Representation<G>, MutationError> {
    Ok(rho.precompose(t)?)
}

/// Duality action on SU(3) representations: entrywise conjugation.
pub fn su3_dual(rho: &Representation<SU3Element>) -> Representation<SU3Element> {
    rho.dual()
}

/// Default trace tolerance for pairing classes under duality.
pub const DUALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityOrbits {
    pub fixed: Vec<usize>,
    pub swapped: Vec<(usize, usize)>,
    pub unresolved: Vec<usize>,
}

/// Pairs each fingerprint with the one equal to its complex conjugate.
pub fn duality_orbits(fps: &[CharacterFingerprint], tol: f64) -> Result<DualityOrbits, MutationError> {
    let matches: Vec<Vec<usize>> = fps
        .iter()
        .map(|f| {
            let c = f.conj();
            (0..fps.len()).filter(|&j| c.distance(&fps[j]) <= tol).collect()
        })
        .collect();
    let mut out = DualityOrbits { fixed: Vec::new(), swapped: Vec::new(), unresolved: Vec::new() };
    for (i, m) in matches.iter().enumerate() {
        match m.as_slice() {
            [] => return Err(MutationError::UnmatchedClass(i)),
            [j] if *j == i => out.fixed.push(i),
            [j] if matches[*j].as_slice() == [i] => {
                if i < *j {
                    out.swapped.push((i, *j));
                }
            }
            _ => out.unresolved.push(i),
        }
    }
    Ok(out)
}

pub fn su3_duality_orbits(classes: &[RepClass<SU3Element>], tol: f64) -> Result<DualityOrbits, MutationError> {
    let fps: Vec<CharacterFingerprint> = classes.iter().map(|c| c.fingerprint.clone()).collect();
    duality_orbits(&fps, tol)
}

fn quat(w: f64, x: f64, y: f64, z: f64) -> UnitQuaternion {
    UnitQuaternion::new(w, x, y, z)
}

fn maptorus_rep(a: UnitQuaternion, b: UnitQuaternion, z: UnitQuaternion) -> Representation<UnitQuaternion> {
    let p = build_mapping_torus(&tau_map(), &surface_group()).expect("mapping torus");
    Representation::for_presentation(Family::Su2, &p, vec![a, b, a, b, z])
}

fn path_surface_values(r: f64) -> (UnitQuaternion, UnitQuaternion) {
    (crate::groups::exp_su2([-PI * r / 2.0, 0.0, 0.0]), quat(0.0, 0.0, 1.0, 0.0))
}

/// The printed path: `a_i ↦ exp(−(πr/2)ı)`, `b_i ↦ ȷ`, `z ↦ exp((π(1−r)/2)ȷ)`.
pub fn maptorus_path(r: f64) -> Representation<UnitQuaternion> {
    let (a, b) = path_surface_values(r);
    maptorus_rep(a, b, crate::groups::exp_su2([0.0, PI * (1.0 - r) / 2.0, 0.0]))
}

/// The printed bridge at `r = 0`: `z ↦ ı(sin(πs) + cos(πs)ȷ) = sin(πs)ı + cos(πs)k`.
pub fn maptorus_bridge(s: f64) -> Representation<UnitQuaternion> {
    let (a, b) = path_surface_values(0.0);
    maptorus_rep(a, b, quat(0.0, (PI * s).sin(), 0.0, (PI * s).cos()))
}

/// The path with the z-image that satisfies the HNN relations for the τ
/// table in use: `z ↦ sign·(sin(πr/2)ȷ + cos(πr/2)k)`.
pub fn maptorus_path_derived(r: f64, sign: f64) -> Representation<UnitQuaternion> {
    let (a, b) = path_surface_values(r);
    let t = PI * r / 2.0;
    maptorus_rep(a, b, quat(0.0, 0.0, sign * t.sin(), sign * t.cos()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub grid_points: usize,
    pub max_surface_residual: f64,
    pub max_conjugator_residual: f64,
    /// Largest distance of a found conjugator from the derived z-image, up to sign.
    pub max_derived_deviation: f64,
    /// Largest jump of the sign-aligned conjugators between grid neighbours, over `(π/2)Δr`.
    pub max_step_ratio: f64,
    pub max_piece_residual: f64,
    /// Piece 1 at r=0 vs bridge at s=0; bridge at s=1 vs piece 3 at r=0; piece 1 vs piece 3 at r=1 with z negated.
    pub endpoint_gaps: [f64; 3],
    pub printed_formula_max_residual: f64,
    pub r0_commutant_dimension: usize,
    pub r0_axis: [f64; 3],
    pub flags: Vec<String>,
    pub broken: Option<String>,
}

impl PathReport {
    pub fn pass(&self) -> bool {
        self.broken.is_none()
    }
}

pub const PATH_SURFACE_TOL: f64 = 1e-12;
pub const PATH_ENDPOINT_TOL: f64 = 1e-10;

fn rep_gap(a: &Representation<UnitQuaternion>, b: &Representation<UnitQuaternion>) -> f64 {
    a.images().iter().zip(b.images()).map(|(x, y)| x.distance(*y)).fold(0.0, f64::max)
}

/// Checks the three-piece path on the given grid of `r`-values (also used
/// as the `s`-grid of the bridge).
pub fn verify_path(grid: &[f64], cfg: &SolveConfig) -> Result<PathReport, MutationError> {
    let surface = surface_group();
    let mut rep = PathReport {
        grid_points: grid.len(),
        max_surface_residual: 0.0,
        max_conjugator_residual: 0.0,
        max_derived_deviation: 0.0,
        max_step_ratio: 0.0,
        max_piece_residual: 0.0,
        endpoint_gaps: [0.0; 3],
        printed_formula_max_residual: 0.0,
        r0_commutant_dimension: 0,
        r0_axis: [0.0; 3],
        flags: Vec::new(),
        broken: None,
    };
    let mut broken: Vec<String> = Vec::new();
    let mut previous: Option<(f64, UnitQuaternion)> = None;
    for &r in grid {
        let printed = maptorus_path(r);
        let sigma = printed.restrict(&surface_generators())?;
        let surf_res = Representation::for_presentation(Family::Su2, &surface, sigma.images().to_vec()).residual;
        rep.max_surface_residual = rep.max_surface_residual.max(surf_res);
        if surf_res > PATH_SURFACE_TOL {
            broken.push(format!("piece 1: surface relator residual {surf_res:e} at r = {r}"));
        }
        rep.printed_formula_max_residual = rep.printed_formula_max_residual.max(printed.residual);
        let conj = match surface_conjugator(&sigma, cfg) {
            Ok(c) => c,
            Err(e) => {
                broken.push(format!("piece 1: no surface conjugator at r = {r}: {e}"));
                continue;
            }
        };
        rep.max_conjugator_residual = rep.max_conjugator_residual.max(conj.residual);
        for sign in [1.0, -1.0] {
            let d = maptorus_path_derived(r, sign);
            rep.max_piece_residual = rep.max_piece_residual.max(d.residual);
        }
        if r > 0.0 {
            let z = *maptorus_path_derived(r, 1.0).image(&gen(STABLE_LETTER)).expect("z");
            let found = conj.element;
            rep.max_derived_deviation = rep.max_derived_deviation.max(found.distance(z).min(found.distance(-z)));
            let aligned = match previous {
                Some((_, p)) if found.distance(p) > found.distance(-p) => -found,
                _ => found,
            };
            if let Some((r_prev, p)) = previous {
                let dr = (r - r_prev).abs();
                if dr > 0.0 {
                    rep.max_step_ratio = rep.max_step_ratio.max(aligned.distance(p) / (PI / 2.0 * dr));
                }
            }
            previous = Some((r, aligned));
        }
    }
    for &s in grid {
        rep.max_piece_residual = rep.max_piece_residual.max(maptorus_bridge(s).residual);
    }
    if rep.max_conjugator_residual > cfg.accept_tol {
        broken.push(format!("piece 1: conjugator residual {:e}", rep.max_conjugator_residual));
    }
    if rep.max_derived_deviation > 1e-6 {
        broken.push(format!("piece 1: found conjugators deviate {:e} from the derived z-image", rep.max_derived_deviation));
    }
    if rep.max_step_ratio > 1.01 {
        broken.push(format!("piece 1: conjugator jumps (ratio {})", rep.max_step_ratio));
    }
    if rep.max_piece_residual > PATH_ENDPOINT_TOL {
        broken.push(format!("pieces: HNN residual {:e}", rep.max_piece_residual));
    }
    let p1_0 = maptorus_path_derived(0.0, 1.0);
    let p3_0 = maptorus_path_derived(0.0, -1.0);
    let p1_1 = maptorus_path_derived(1.0, 1.0);
    let p3_1 = maptorus_path_derived(1.0, -1.0);
    let z = gen(STABLE_LETTER);
    let mut p3_1_flipped = p3_1.clone();
    p3_1_flipped.set_image(&z, -*p3_1.image(&z).expect("z"))?;
    rep.endpoint_gaps = [
        rep_gap(&p1_0, &maptorus_bridge(0.0)),
        rep_gap(&maptorus_bridge(1.0), &p3_0),
        rep_gap(&p1_1, &p3_1_flipped),
    ];
    for (i, gap) in rep.endpoint_gaps.iter().enumerate() {
        if *gap > PATH_ENDPOINT_TOL {
            broken.push(format!("endpoint pair {i}: gap {gap:e}"));
        }
    }
    if p1_1.image(&z) == p3_1.image(&z) {
        broken.push("endpoints at r = 1 do not differ in the z-sign".into());
    }

    let sigma0 = maptorus_path(0.0).restrict(&surface_generators())?;
    rep.r0_commutant_dimension = commutant_dimension(&sigma0);
    let axis = sigma0
        .images()
        .iter()
        .find_map(|q| unit_axis(*q))
        .unwrap_or([0.0; 3]);
    rep.r0_axis = axis;
    if rep.r0_commutant_dimension != 1 {
        broken.push(format!("r = 0 restriction has commutant dimension {}", rep.r0_commutant_dimension));
    }
    if rep.printed_formula_max_residual > cfg.accept_tol {
        rep.flags.push(format!(
            "printed z-image exp((π(1−r)/2)ȷ) fails the HNN relations (max residual {:.3}); derived z-image sin(πr/2)ȷ + cos(πr/2)k used",
            rep.printed_formula_max_residual
        ));
    }
    if (axis[2].abs() - 1.0).abs() > 1e-12 {
        rep.flags.push(format!(
            "r = 0 restriction lies in the circle through {axis:?}, not the one containing k"
        ));
    }
    rep.broken = (!broken.is_empty()).then(|| broken.join("; "));
    Ok(rep)
}

/// Tolerance used when comparing two fingerprints after mutation.
pub const TRACE_TOL: f64 = 1e-6;

/// `fingerprint(mutate(mutate(φ)))` against `fingerprint(φ)`.
pub fn involution_gap(
    s: &SplittingData,
    phi: &Representation<UnitQuaternion>,
    cfg: &SolveConfig,
) -> Result<f64, MutationError> {
    let once = mutate_rep(s, phi, cfg)?;
    let twice = mutate_rep(&once.mutant_splitting, &once.mutant, cfg)?;
    Ok(fingerprint(&once.input).distance(&fingerprint(&twice.mutant)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{exp_su2, haar_sample};
    use crate::words::{inversion_map, mapping_torus_involution, standard_splitting, Defect};

    #[test]
    fn f2_conjugator_examples() {
        let a = exp_su2([PI / 3.0, 0.0, 0.0]);
        let b = exp_su2([0.0, PI / 4.0, 0.0]);
        let q = f2_conjugator(a, b);
        assert!(q.distance(UnitQuaternion::new(0.0, 0.0, 0.0, 1.0)) < 1e-15);
        assert!(f2_conjugator_residual(a, b, q) < 1e-15);
        let one = UnitQuaternion::IDENTITY;
        assert_eq!(f2_conjugator(one, one), UnitQuaternion::new(0.0, 1.0, 0.0, 0.0));
        let c = exp_su2([0.7, 0.0, 0.0]);
        assert!(f2_conjugator(c, c).distance(UnitQuaternion::new(0.0, 0.0, 1.0, 0.0)) < 1e-15);
        for seed in 0..200 {
            let (a, b): (UnitQuaternion, UnitQuaternion) = (haar_sample(2 * seed), haar_sample(2 * seed + 1));
            assert!(f2_conjugator_residual(a, b, f2_conjugator(a, b)) < 1e-12);
        }
    }

    fn standard_rep(seed: u64) -> Representation<UnitQuaternion> {
        let s = standard_splitting();
        let p = build_amalgam(&s, None).unwrap();
        let (x, y): (UnitQuaternion, UnitQuaternion) = (haar_sample(seed), haar_sample(seed + 1000));
        Representation::for_presentation(Family::Su2, &p, vec![x, y, x, y])
    }

    #[test]
    fn mutation_of_standard_splitting_rep() {
        let s = standard_splitting();
        let cfg = SolveConfig::default();
        let res = mutate_rep(&s, &standard_rep(3), &cfg).unwrap();
        assert!(res.irreducible_on_sigma);
        assert!(res.residuals.mutant <= 1e-8, "{:?}", res.residuals);
        assert!(res.residuals.extension_plus <= 1e-8 && res.residuals.extension_minus <= 1e-8);
        assert_eq!(res.residuals.a_side, 0.0);
        assert!(res.residuals.b_side < 1e-14);
        assert_eq!(res.extension_count, Some(2));
        assert!(res.so3_extensions_coincide);
        let z = check_z_order(&res).unwrap();
        assert!((z.so3_trace + 1.0).abs() < 1e-6);
        let (worst, converged) = scan_extensions(&res, 20, 1, &cfg).unwrap();
        assert!(converged > 0);
        assert!(worst < 1e-6);
        assert!(involution_gap(&s, &standard_rep(3), &cfg).unwrap() < 1e-6);
        let rec = res.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: MutationRecord = serde_json::from_str(&json).unwrap();
        assert!(back.z_image().unwrap().distance(res.z_image()) < 1e-15);
    }

    #[test]
    fn trivial_mutation() {
        let s = standard_splitting();
        let p = build_amalgam(&s, None).unwrap();
        let phi = Representation::<UnitQuaternion>::trivial(Family::Su2, p.generators());
        let res = mutate_rep(&s, &phi, &SolveConfig::default()).unwrap();
        assert_eq!(res.conjugator.element, UnitQuaternion::IDENTITY);
        assert!(res.mutant.images().iter().all(|g| *g == UnitQuaternion::IDENTITY));
        assert!(!res.irreducible_on_sigma);
        assert!(matches!(check_z_order(&res), Err(MutationError::OrderCheckFailed { .. })));
    }

    #[test]
    fn bad_input_rejected() {
        let s = standard_splitting();
        let p = build_amalgam(&s, None).unwrap();
        let phi = Representation::new(
            Family::Su2,
            p.generators().to_vec(),
            (0..4).map(|i| haar_sample::<UnitQuaternion>(i)).collect(),
        );
        assert!(matches!(mutate_rep(&s, &phi, &SolveConfig::default()), Err(MutationError::InvalidInput(_))));
    }

    #[test]
    fn heegaard_inversion_fixes_fingerprints() {
        let gens = vec![gen("x"), gen("y")];
        let t = inversion_map(&gens);
        for seed in 0..50 {
            let rho = Representation::<UnitQuaternion>::new(Family::Su2, gens.clone(), vec![haar_sample(seed), haar_sample(seed + 77)]);
            let m = heegaard_mutate(&rho, &t).unwrap();
            assert!(fingerprint(&rho).distance(&fingerprint(&m)) < 1e-10);
        }
        let triv = Representation::<UnitQuaternion>::trivial(Family::Su2, &gens);
        assert_eq!(heegaard_mutate(&triv, &t).unwrap().images(), triv.images());
    }

    #[test]
    fn path_examples() {
        let z = gen(STABLE_LETTER);
        assert!(maptorus_path(0.0).image(&z).unwrap().distance(UnitQuaternion::new(0.0, 0.0, 1.0, 0.0)) < 1e-15);
        assert!(maptorus_bridge(0.0).image(&z).unwrap().distance(UnitQuaternion::new(0.0, 0.0, 0.0, 1.0)) < 1e-15);
        assert!(maptorus_bridge(1.0).image(&z).unwrap().distance(UnitQuaternion::new(0.0, 0.0, 0.0, -1.0)) < 1e-15);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let rep = verify_path(&grid, &SolveConfig::default()).unwrap();
        assert!(rep.pass(), "{:?}", rep);
        assert_eq!(rep.flags.len(), 2, "{:?}", rep.flags);
        assert!(z_order_report(*maptorus_bridge(0.0).image(&z).unwrap()).pass);
    }

    #[test]
    fn duality_orbit_examples() {
        let real = CharacterFingerprint { traces: vec![num_complex::Complex64::new(1.0, 0.0)], tolerance: 0.0 };
        let c = CharacterFingerprint { traces: vec![num_complex::Complex64::new(0.5, 0.3)], tolerance: 0.0 };
        let o = duality_orbits(&[real.clone(), c.clone(), c.conj()], 1e-6).unwrap();
        assert_eq!(o.fixed, vec![0]);
        assert_eq!(o.swapped, vec![(1, 2)]);
        assert!(matches!(duality_orbits(&[c], 1e-6), Err(MutationError::UnmatchedClass(0))));
        let o = duality_orbits(&[real.clone(), real], 1e-6).unwrap();
        assert_eq!(o.unresolved, vec![0, 1]);
    }

    /// Solutions on the τ mapping torus with defect −1 on the surface
    /// relator are SO(3)-conjugate to their image under `z ↦ z, g ↦ τ(g)`.
    #[test]
    fn maptorus_reps_fixed_by_involution() {
        let cfg = SolveConfig { restarts: 40, seed: 3, ..SolveConfig::default() };
        {
            let p = build_mapping_torus(&tau_map(), &surface_group()).unwrap().with_defect(0, Defect::Minus);
            let reps = crate::solver::sample_representations::<UnitQuaternion>(&p, Family::Su2, &cfg).unwrap();
            assert!(!reps.is_empty());
            let t = mapping_torus_involution(&tau_map());
            for rho in &reps {
                let so3 = rho.clone().with_family(Family::So3);
                let moved = heegaard_mutate(&so3, &t).unwrap();
                let c = find_conjugator(&moved, &so3, &cfg).unwrap();
                assert!(c.residual <= 1e-8);
            }
        }
    }
}
