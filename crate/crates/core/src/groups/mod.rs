//! Compact group families, word evaluation, characters and commutants.
//!
//! SU(2) elements are unit quaternions. SO(3) representations are stored as
//! SU(2) lifts tagged with [`Family::So3`]; only their sign classes and the
//! traces `4w² − 1` are meaningful. SU(3) elements are 3×3 complex matrices.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use indexmap::IndexMap;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Defect, Generator, GroupMap, Presentation, Word};

mod quaternion;
mod su3;

pub use quaternion::{exp_su2, log_su2, ProjectiveQuaternion, Quaternion, UnitQuaternion};
pub use su3::{Mat3, SU3Element};

/// Product chains longer than this are re-projected onto the group.
pub const RENORMALIZE_EVERY: usize = 32;

/// Relative singular-value cutoff for commutant dimensions.
pub const COMMUTANT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("log is undefined at -1")]
    LogAtAntipode,
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("family mismatch: expected {expected}, got {got}")]
    FamilyMismatch { expected: Family, got: Family },
    #[error("malformed representation: {0}")]
    Malformed(String),
    #[error("defect -1 is not central in {0}")]
    UnsupportedDefect(Family),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Su2,
    So3,
    Su3,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Su2 => "su2",
            Family::So3 => "so3",
            Family::Su3 => "su3",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, GroupError> {
        match s {
            "su2" => Ok(Family::Su2),
            "so3" => Ok(Family::So3),
            "su3" => Ok(Family::Su3),
            other => Err(GroupError::Malformed(format!("unknown family {other:?}"))),
        }
    }
}

/// A matrix Lie group embedded in a real associative algebra.
///
/// Tangent vectors at `g` are written `g·X` with `X` in the Lie algebra, so
/// derivatives of words are products in the ambient algebra.
pub trait LieGroup: Copy + Debug + Send + Sync + PartialEq + 'static {
    type Ambient: Copy
        + Debug
        + Send
        + Sync
        + Mul<Output = Self::Ambient>
        + Add<Output = Self::Ambient>
        + Sub<Output = Self::Ambient>
        + Neg<Output = Self::Ambient>;

    const ALGEBRA_DIM: usize;
    /// Number of real coordinates of the ambient algebra.
    const AMBIENT_DIM: usize;

    fn identity() -> Self;
    fn compose(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    fn ambient(&self) -> Self::Ambient;
    fn algebra_basis(k: usize) -> Self::Ambient;
    fn exp_algebra(coords: &[f64]) -> Self;
    /// Retraction of an ambient point onto the group.
    fn project(a: Self::Ambient) -> Self;
    fn flatten(a: &Self::Ambient, out: &mut [f64]);
    fn unflatten(v: &[f64]) -> Self::Ambient;
    fn trace(&self, family: Family) -> Complex64;
    /// `±I`, when central in the group.
    fn central(defect: Defect) -> Option<Self>;
    fn center() -> Vec<Self>;
    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Distance of the stored value from the group constraints.
    fn constraint_residual(&self) -> f64;
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Option<Self>;
    fn supports(family: Family) -> bool;

    fn ambient_distance(&self, other: &Self) -> f64 {
        let mut buf = vec![0.0; Self::AMBIENT_DIM];
        Self::flatten(&(self.ambient() - other.ambient()), &mut buf);
        buf.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn renormalize(&self) -> Self {
        Self::project(self.ambient())
    }
}

impl LieGroup for UnitQuaternion {
    type Ambient = Quaternion;
    const ALGEBRA_DIM: usize = 3;
    const AMBIENT_DIM: usize = 4;

    fn identity() -> Self {
        UnitQuaternion::IDENTITY
    }
    fn compose(&self, other: &Self) -> Self {
        *self * *other
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
    fn ambient(&self) -> Quaternion {
        self.quaternion()
    }
    fn algebra_basis(k: usize) -> Quaternion {
        [Quaternion::I, Quaternion::J, Quaternion::K][k]
    }
    fn exp_algebra(c: &[f64]) -> Self {
        exp_su2([c[0], c[1], c[2]])
    }
    fn project(a: Quaternion) -> Self {
        UnitQuaternion::from_quaternion(a)
    }
    fn flatten(a: &Quaternion, out: &mut [f64]) {
        out.copy_from_slice(&a.to_array());
    }
    fn unflatten(v: &[f64]) -> Quaternion {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }
    fn trace(&self, family: Family) -> Complex64 {
        match family {
            Family::So3 => Complex64::new(self.so3_trace(), 0.0),
            _ => Complex64::new(UnitQuaternion::trace(*self), 0.0),
        }
    }
    fn central(defect: Defect) -> Option<Self> {
        Some(match defect {
            Defect::Plus => UnitQuaternion::IDENTITY,
            Defect::Minus => -UnitQuaternion::IDENTITY,
        })
    }
    fn center() -> Vec<Self> {
        vec![UnitQuaternion::IDENTITY, -UnitQuaternion::IDENTITY]
    }
    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        UnitQuaternion::haar(rng)
    }
    fn constraint_residual(&self) -> f64 {
        (self.quaternion().norm() - 1.0).abs()
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.quaternion().to_array())
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        let a: [f64; 4] = serde_json::from_value(v.clone()).ok()?;
        let q = Quaternion::from_array(a);
        (q.norm() > 0.0).then(|| UnitQuaternion::from_quaternion(q))
    }
    fn supports(family: Family) -> bool {
        matches!(family, Family::Su2 | Family::So3)
    }
}

impl LieGroup for SU3Element {
    type Ambient = Mat3;
    const ALGEBRA_DIM: usize = 8;
    const AMBIENT_DIM: usize = 18;

    fn identity() -> Self {
        SU3Element::identity()
    }
    fn compose(&self, other: &Self) -> Self {
        *self * *other
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
    fn ambient(&self) -> Mat3 {
        *self.matrix()
    }
    fn algebra_basis(k: usize) -> Mat3 {
        SU3Element::algebra_basis(k)
    }
    fn exp_algebra(c: &[f64]) -> Self {
        SU3Element::exp_algebra(c)
    }
    fn project(a: Mat3) -> Self {
        SU3Element::project(a)
    }
    fn flatten(a: &Mat3, out: &mut [f64]) {
        for i in 0..3 {
            for j in 0..3 {
                let c = a[(i, j)];
                out[6 * i + 2 * j] = c.re;
                out[6 * i + 2 * j + 1] = c.im;
            }
        }
    }
    fn unflatten(v: &[f64]) -> Mat3 {
        Mat3::from_fn(|i, j| Complex64::new(v[6 * i + 2 * j], v[6 * i + 2 * j + 1]))
    }
    fn trace(&self, _family: Family) -> Complex64 {
        SU3Element::trace(self)
    }
    fn central(defect: Defect) -> Option<Self> {
        match defect {
            Defect::Plus => Some(SU3Element::identity()),
            Defect::Minus => None,
        }
    }
    fn center() -> Vec<Self> {
        SU3Element::center().to_vec()
    }
    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        SU3Element::haar(rng)
    }
    fn constraint_residual(&self) -> f64 {
        self.unitarity_residual()
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_pairs())
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_value(v.clone()).ok()?;
        SU3Element::from_pairs(&pairs)
    }
    fn supports(family: Family) -> bool {
        family == Family::Su3
    }
}

/// Distance in the group of the family: sign-blind for SO(3).
pub fn family_distance<G: LieGroup>(family: Family, a: &G, b: &G) -> f64 {
    if family == Family::So3 {
        G::center().iter().map(|c| a.ambient_distance(&c.compose(b))).fold(f64::INFINITY, f64::min)
    } else {
        a.ambient_distance(b)
    }
}

/// Deterministic Haar sample for a seed.
pub fn haar_sample<G: LieGroup>(seed: u64) -> G {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    G::haar(&mut rng)
}

/// A homomorphism from a free group on `generators` to `G`, together with
/// the residual against the presentation it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<G: LieGroup> {
    pub family: Family,
    generators: Vec<Generator>,
    images: Vec<G>,
    pub residual: f64,
}

impl<G: LieGroup> Representation<G> {
    pub fn new(family: Family, generators: Vec<Generator>, images: Vec<G>) -> Self {
        assert_eq!(generators.len(), images.len(), "one image per generator");
        Representation { family, generators, images, residual: f64::NAN }
    }

    pub fn trivial(family: Family, generators: &[Generator]) -> Self {
        Representation::new(family, generators.to_vec(), vec![G::identity(); generators.len()])
    }

    /// Assigns images in the presentation's generator order and records the residual.
    pub fn for_presentation(family: Family, p: &Presentation, images: Vec<G>) -> Self {
        let mut rep = Representation::new(family, p.generators().to_vec(), images);
        rep.residual = rep.relator_residual(p);
        rep
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn images(&self) -> &[G] {
        &self.images
    }

    pub fn image(&self, g: &Generator) -> Option<&G> {
        self.generators.iter().position(|h| h == g).map(|i| &self.images[i])
    }

    pub fn set_image(&mut self, g: &Generator, value: G) -> Result<(), GroupError> {
        let i = self
            .generators
            .iter()
            .position(|h| h == g)
            .ok_or_else(|| GroupError::UnknownGenerator(g.to_string()))?;
        self.images[i] = value;
        Ok(())
    }

    /// Left-to-right product of images, re-projected every
    /// [`RENORMALIZE_EVERY`] letters.
    pub fn evaluate(&self, w: &Word) -> Result<G, GroupError> {
        let mut acc = G::identity();
        for (n, l) in w.letters().iter().enumerate() {
            let g = self.image(&l.generator).ok_or_else(|| GroupError::UnknownGenerator(l.generator.to_string()))?;
            acc = if l.exponent == 1 { acc.compose(g) } else { acc.compose(&g.inv()) };
            if (n + 1) % RENORMALIZE_EVERY == 0 {
                acc = acc.renormalize();
            }
        }
        Ok(acc)
    }

    /// `max_r ‖ρ(r) − defect_r·I‖` in ambient coordinates. For SO(3) the
    /// defect is ignored and the distance is taken to the nearer lift of 1.
    pub fn relator_residual(&self, p: &Presentation) -> f64 {
        p.relators()
            .iter()
            .map(|r| {
                let target = match G::central(r.defect) {
                    Some(c) => c,
                    None => return f64::INFINITY,
                };
                match self.evaluate(&r.word) {
                    Ok(v) if self.family == Family::So3 => family_distance(self.family, &v, &G::identity()),
                    Ok(v) => v.ambient_distance(&target),
                    Err(_) => f64::INFINITY,
                }
            })
            .fold(0.0, f64::max)
    }

    /// `ρ ∘ m`, a representation on the source generators of `m`.
    pub fn precompose(&self, m: &GroupMap) -> Result<Representation<G>, GroupError> {
        let mut gens = Vec::new();
        let mut images = Vec::new();
        for (g, w) in m.iter() {
            gens.push(g.clone());
            images.push(self.evaluate(w)?);
        }
        Ok(Representation::new(self.family, gens, images))
    }

    /// `g ρ g⁻¹`.
    pub fn conjugate(&self, g: &G) -> Representation<G> {
        let gi = g.inv();
        let images = self.images.iter().map(|x| g.compose(x).compose(&gi)).collect();
        Representation { family: self.family, generators: self.generators.clone(), images, residual: self.residual }
    }

    /// Restriction to a subset of generators, in the given order.
    pub fn restrict(&self, generators: &[Generator]) -> Result<Representation<G>, GroupError> {
        let images = generators
            .iter()
            .map(|g| self.image(g).copied().ok_or_else(|| GroupError::UnknownGenerator(g.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Representation::new(self.family, generators.to_vec(), images))
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn map_images(&self, f: impl Fn(&G) -> G) -> Representation<G> {
        Representation {
            family: self.family,
            generators: self.generators.clone(),
            images: self.images.iter().map(f).collect(),
            residual: self.residual,
        }
    }
}

impl Representation<SU3Element> {
    /// Entrywise complex conjugate `ρ̄`.
    pub fn dual(&self) -> Representation<SU3Element> {
        self.map_images(|x| x.conj())
    }
}

/// The fixed word list used for fingerprints: generators, ordered pairs of
/// distinct generators, ordered triples of distinct generators and the
/// commutators `[g_i, g_j]`, `i < j`.
pub fn fingerprint_words(generators: &[Generator]) -> Vec<Word> {
    let n = generators.len();
    let gw: Vec<Word> = generators.iter().map(Word::generator).collect();
    let mut words = gw.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                words.push(gw[i].concat(&gw[j]));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    words.push(gw[i].concat(&gw[j]).concat(&gw[k]));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            words.push(Word::commutator(&gw[i], &gw[j]));
        }
    }
    words
}

/// Complex traces on [`fingerprint_words`]; the conjugacy-class key.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterFingerprint {
    pub traces: Vec<Complex64>,
    /// Expected agreement between conjugate representations, `10·residual`.
    pub tolerance: f64,
}

impl CharacterFingerprint {
    /// Entrywise maximum modulus of the difference; infinite on length mismatch.
    pub fn distance(&self, other: &CharacterFingerprint) -> f64 {
        if self.traces.len() != other.traces.len() {
            return f64::INFINITY;
        }
        self.traces.iter().zip(&other.traces).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> CharacterFingerprint {
        CharacterFingerprint { traces: self.traces.iter().map(|c| c.conj()).collect(), tolerance: self.tolerance }
    }

    pub fn max_imag(&self) -> f64 {
        self.traces.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Lexicographic order on `(re, im)` pairs, used to sort before clustering.
    pub fn lex_cmp(&self, other: &CharacterFingerprint) -> std::cmp::Ordering {
        for (a, b) in self.traces.iter().zip(&other.traces) {
            let ord = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
            if ord.is_ne() {
                return ord;
            }
        }
        self.traces.len().cmp(&other.traces.len())
    }
}

impl Serialize for CharacterFingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.traces.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

pub fn fingerprint<G: LieGroup>(rho: &Representation<G>) -> CharacterFingerprint {
    let words = fingerprint_words(rho.generators());
    let traces = words
        .iter()
        .map(|w| rho.evaluate(w).expect("fingerprint words use rho's generators").trace(rho.family))
        .collect();
    let residual = if rho.residual.is_finite() { rho.residual } else { 0.0 };
    CharacterFingerprint { traces, tolerance: 10.0 * residual }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilizer {
    /// Commutant zero: stabilizer is the center (Z/2 in SU(2), Z/3 in SU(3)).
    Irreducible,
    /// SU(2) with a one-dimensional commutant: stabilizer U(1).
    Circle,
    /// SU(3) with a nonzero commutant.
    Reducible,
    /// Every image central.
    Central,
}

/// Stacked matrix of `X ↦ X·A − A·X` over the generator images, on the
/// Lie-algebra basis.
fn commutator_operator<G: LieGroup>(images: &[G]) -> DMatrix<f64> {
    let n = G::ALGEBRA_DIM;
    let m = G::AMBIENT_DIM;
    let mut op = DMatrix::zeros(m * images.len().max(1), n);
    let mut buf = vec![0.0; m];
    for (gi, a) in images.iter().enumerate() {
        let a = a.ambient();
        for k in 0..n {
            let x = G::algebra_basis(k);
            G::flatten(&(x * a - a * x), &mut buf);
            for (r, v) in buf.iter().enumerate() {
                op[(gi * m + r, k)] = *v;
            }
        }
    }
    op
}

/// Dimension of the common centralizer of the images in the Lie algebra.
pub fn commutant_dimension<G: LieGroup>(rho: &Representation<G>) -> usize {
    let op = commutator_operator(rho.images());
    let sv = op.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest < 1e-9 {
        return G::ALGEBRA_DIM;
    }
    // SVD of a tall matrix returns ALGEBRA_DIM singular values.
    sv.iter().filter(|s| **s < COMMUTANT_THRESHOLD * largest).count()
}

pub fn stabilizer_label<G: LieGroup>(rho: &Representation<G>) -> Stabilizer {
    let d = commutant_dimension(rho);
    if d == 0 {
        Stabilizer::Irreducible
    } else if d == G::ALGEBRA_DIM {
        Stabilizer::Central
    } else if G::ALGEBRA_DIM == 3 {
        Stabilizer::Circle
    } else {
        Stabilizer::Reducible
    }
}

/// On-disk representation record shared by all families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub family: Family,
    pub assignments: IndexMap<String, serde_json::Value>,
    pub residual: f64,
}

impl<G: LieGroup> Representation<G> {
    pub fn to_file(&self) -> RepresentationFile {
        RepresentationFile {
            family: self.family,
            assignments: self.generators.iter().zip(&self.images).map(|(g, x)| (g.to_string(), x.to_json())).collect(),
            residual: if self.residual.is_finite() { self.residual } else { -1.0 },
        }
    }

    pub fn from_file(f: &RepresentationFile) -> Result<Self, GroupError> {
        let mut gens = Vec::new();
        let mut images = Vec::new();
        for (g, v) in &f.assignments {
            gens.push(Generator::new(g.clone()).map_err(|e| GroupError::Malformed(e.to_string()))?);
            images.push(G::from_json(v).ok_or_else(|| GroupError::Malformed(format!("bad element for {g}")))?);
        }
        let mut rep = Representation::new(f.family, gens, images);
        rep.residual = f.residual;
        Ok(rep)
    }
}

/// A representation in any of the three families.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyRepresentation {
    Quaternionic(Representation<UnitQuaternion>),
    Su3(Representation<SU3Element>),
}

impl AnyRepresentation {
    pub fn family(&self) -> Family {
        match self {
            AnyRepresentation::Quaternionic(r) => r.family,
            AnyRepresentation::Su3(r) => r.family,
        }
    }

    pub fn from_file(f: &RepresentationFile) -> Result<Self, GroupError> {
        Ok(match f.family {
            Family::Su2 | Family::So3 => AnyRepresentation::Quaternionic(Representation::from_file(f)?),
            Family::Su3 => AnyRepresentation::Su3(Representation::from_file(f)?),
        })
    }

    pub fn to_file(&self) -> RepresentationFile {
        match self {
            AnyRepresentation::Quaternionic(r) => r.to_file(),
            AnyRepresentation::Su3(r) => r.to_file(),
        }
    }
}
