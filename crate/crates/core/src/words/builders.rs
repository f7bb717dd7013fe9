//! Presentations used throughout the crate: the genus-2 surface group, the
//! hyperelliptic action on it, mapping tori, amalgams, the cobordism group
//! with stable letter `z`, and Seifert fibered spaces over the sphere.

use indexmap::IndexMap;

use super::{gen, Defect, Generator, GroupMap, Presentation, Relator, Word, WordError};

pub const SURFACE_GENERATORS: [&str; 4] = ["a1", "b1", "a2", "b2"];
pub const STABLE_LETTER: &str = "z";

fn w(s: &str) -> Word {
    Word::parse(s).expect("static word")
}

pub fn surface_generators() -> Vec<Generator> {
    SURFACE_GENERATORS.iter().map(|g| gen(g)).collect()
}

/// `R = a1 b1 a1^-1 b1^-1 b2 a2 b2^-1 a2^-1`.
pub fn surface_relator() -> Word {
    w("a1 b1 a1^-1 b1^-1 b2 a2 b2^-1 a2^-1")
}

pub fn surface_group() -> Presentation {
    Presentation::from_words("surface_genus2", surface_generators(), vec![surface_relator()])
        .expect("surface group")
}

/// Action of the hyperelliptic involution on the surface generators.
pub fn tau_map() -> GroupMap {
    GroupMap::from_strs(&[
        ("a1", "a1^-1"),
        ("b1", "a1 b1^-1 a1^-1"),
        ("a2", "b1^-1 b2 a2^-1 b2^-1 b1"),
        ("b2", "b1^-1 b2 a2 b2^-1 a2^-1 b2^-1 b1"),
    ])
    .expect("tau table")
}

/// Inverse automorphism of [`tau_map`] on the free group of rank 4.
pub fn tau_inverse_map() -> GroupMap {
    GroupMap::from_strs(&[
        ("a1", "a1^-1"),
        ("b1", "a1 b1^-1 a1^-1"),
        ("a2", "a1 b1^-1 a1^-1 a2 b2 a2^-1 b2^-1 a2^-1 a1 b1 a1^-1"),
        ("b2", "a1 b1^-1 a1^-1 a2 b2^-1 a2^-1 a1 b1 a1^-1"),
    ])
    .expect("tau inverse table")
}

pub fn free_group(name: &str, generators: &[&str]) -> Presentation {
    Presentation::free(name, generators.iter().map(|g| gen(g)).collect()).expect("free group")
}

/// `x -> x^-1` on every generator of a free group.
pub fn inversion_map(generators: &[Generator]) -> GroupMap {
    GroupMap::new(generators.iter().map(|g| (g.clone(), Word::generator(g).inverse())).collect())
}

/// HNN presentation `<base, z | base relators, z^-1 g z = phi(g)>`.
pub fn build_mapping_torus(phi: &GroupMap, base: &Presentation) -> Result<Presentation, WordError> {
    let z = gen(STABLE_LETTER);
    if base.contains(&z) {
        return Err(WordError::DuplicateGenerator(STABLE_LETTER.into()));
    }
    let zw = Word::generator(&z);
    let mut relators = base.relators().to_vec();
    for g in base.generators() {
        let img = phi.image(g).ok_or_else(|| WordError::UnknownGenerator(g.to_string()))?;
        if let Some(bad) = img.generators().find(|h| !base.contains(h)) {
            return Err(WordError::UnknownGenerator(bad.to_string()));
        }
        let word = zw.inverse().concat(&Word::generator(g)).concat(&zw).concat(&img.inverse());
        relators.push(Relator { word, defect: Defect::Plus });
    }
    let mut generators = base.generators().to_vec();
    generators.push(z);
    Presentation::new(format!("maptorus({})", base.name), generators, relators)
}

/// `t -> t, g -> tau(g)` on a mapping torus of the surface.
pub fn mapping_torus_involution(tau: &GroupMap) -> GroupMap {
    let mut images: IndexMap<Generator, Word> =
        tau.iter().map(|(g, img)| (g.clone(), img.clone())).collect();
    let z = gen(STABLE_LETTER);
    images.insert(z.clone(), Word::generator(&z));
    GroupMap::new(images)
}

/// Unnormalized Seifert invariants over the sphere.
///
/// Presentation convention: generators `x1..xn, h`; relators `[x_i, h]`,
/// `x_i^{a_i} h^{b_i}` and `x1 ⋯ xn h^{-e}`, so that `x1 ⋯ xn = h^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeifertData {
    pub multiplicities: Vec<i64>,
    pub b: Vec<i64>,
    pub e: i64,
}

impl SeifertData {
    pub fn new(multiplicities: Vec<i64>, e: i64, b: Vec<i64>) -> Result<Self, WordError> {
        if multiplicities.is_empty() {
            return Err(WordError::BadSeifertData("no exceptional fibers".into()));
        }
        if multiplicities.len() != b.len() {
            return Err(WordError::BadSeifertData(format!(
                "{} multiplicities but {} b-values",
                multiplicities.len(),
                b.len()
            )));
        }
        if let Some(a) = multiplicities.iter().find(|&&a| a < 2) {
            return Err(WordError::BadSeifertData(format!("multiplicity {a} < 2")));
        }
        Ok(SeifertData { multiplicities, b, e })
    }

    /// Rational Euler number `-(e + Σ b_i/a_i)` as a reduced fraction `(num, den)`.
    pub fn euler_number(&self) -> (i64, i64) {
        let den: i64 = self.multiplicities.iter().product();
        let mut num = self.e * den;
        for (a, b) in self.multiplicities.iter().zip(&self.b) {
            num += b * (den / a);
        }
        let g = num_integer::gcd(num, den).max(1);
        (-num / g, den / g)
    }

    /// `Π a_i · (e + Σ b_i/a_i) = ±1` characterizes integral homology spheres.
    pub fn is_homology_sphere(&self) -> bool {
        let den: i64 = self.multiplicities.iter().product();
        let mut num = self.e * den;
        for (a, b) in self.multiplicities.iter().zip(&self.b) {
            num += b * (den / a);
        }
        num.abs() == 1
    }

    pub fn presentation(&self) -> Presentation {
        let n = self.multiplicities.len();
        let xs: Vec<Generator> = (1..=n).map(|i| gen(&format!("x{i}"))).collect();
        let h = gen("h");
        let hw = Word::generator(&h);
        let mut relators = Vec::new();
        for x in &xs {
            relators.push(Word::commutator(&Word::generator(x), &hw));
        }
        for ((x, a), b) in xs.iter().zip(&self.multiplicities).zip(&self.b) {
            relators.push(Word::generator(x).pow(*a).concat(&hw.pow(*b)));
        }
        let mut product = xs.iter().fold(Word::empty(), |acc, x| acc.concat(&Word::generator(x)));
        product = product.concat(&hw.pow(-self.e));
        relators.push(product);
        let mut generators = xs;
        generators.push(h);
        let label = self.multiplicities.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        Presentation::from_words(format!("seifert({label};{})", self.e), generators, relators)
            .expect("seifert presentation")
    }

    /// Recovers the invariants from a presentation laid out as by
    /// [`SeifertData::presentation`]: `n` commutators, `n` power relators,
    /// then the product relator.
    pub fn from_presentation(p: &Presentation) -> Result<Self, WordError> {
        let bad = |msg: &str| WordError::BadSeifertData(format!("{}: {msg}", p.name));
        let gens = p.generators();
        let n = gens.len().saturating_sub(1);
        let h = gen("h");
        if n == 0 || gens[n] != h {
            return Err(bad("last generator must be h"));
        }
        let rels = p.relators();
        if rels.len() != 2 * n + 1 {
            return Err(bad("expected 2n+1 relators"));
        }
        let hw = Word::generator(&h);
        // Splits `x-part · h^k` into the x-letters and k.
        let split = |word: &Word| -> Result<(Vec<Generator>, i64), WordError> {
            let letters = word.letters();
            let cut = letters.iter().position(|l| l.generator == h).unwrap_or(letters.len());
            if letters[cut..].iter().any(|l| l.generator != h) {
                return Err(bad("h must trail the relator"));
            }
            if letters[..cut].iter().any(|l| l.exponent != 1) {
                return Err(bad("fiber generators must appear positively"));
            }
            Ok((letters[..cut].iter().map(|l| l.generator.clone()).collect(), word.exponent_sum(&h)))
        };
        let mut multiplicities = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for (i, x) in gens[..n].iter().enumerate() {
            if rels[i].word != Word::commutator(&Word::generator(x), &hw) {
                return Err(bad("missing commutator with h"));
            }
            let (xs, k) = split(&rels[n + i].word)?;
            if xs.iter().any(|y| y != x) {
                return Err(bad("power relator mixes fibers"));
            }
            multiplicities.push(xs.len() as i64);
            b.push(k);
        }
        let (xs, k) = split(&rels[2 * n].word)?;
        if xs != gens[..n] {
            return Err(bad("product relator must be x1 ... xn h^k"));
        }
        SeifertData::new(multiplicities, -k, b)
    }
}

pub fn build_seifert(multiplicities: &[i64], e: i64, b: &[i64]) -> Result<Presentation, WordError> {
    Ok(SeifertData::new(multiplicities.to_vec(), e, b.to_vec())?.presentation())
}

/// Seifert data of the Brieskorn sphere `Σ(a1, a2, a3)`: the first
/// `(b1, b2, b3)` in lexicographic order with `0 < b_i < a_i` admitting an
/// integral `e` that makes the space a homology sphere.
pub fn brieskorn_data(a: [i64; 3]) -> Result<SeifertData, WordError> {
    if a.iter().any(|&x| x < 2) {
        return Err(WordError::BadSeifertData(format!("multiplicities {a:?} must be >= 2")));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if num_integer::gcd(a[i], a[j]) != 1 {
                return Err(WordError::BadSeifertData(format!("{a:?} not pairwise coprime")));
            }
        }
    }
    let prod = a[0] * a[1] * a[2];
    for b1 in 1..a[0] {
        for b2 in 1..a[1] {
            for b3 in 1..a[2] {
                let s = b1 * (prod / a[0]) + b2 * (prod / a[1]) + b3 * (prod / a[2]);
                for target in [1i64, -1] {
                    if (target - s) % prod == 0 {
                        return SeifertData::new(a.to_vec(), (target - s) / prod, vec![b1, b2, b3]);
                    }
                }
            }
        }
    }
    Err(WordError::BadSeifertData(format!("no homology-sphere data for {a:?}")))
}

pub fn brieskorn(a: [i64; 3]) -> Result<Presentation, WordError> {
    let mut p = brieskorn_data(a)?.presentation();
    p.name = format!("brieskorn_{}_{}_{}", a[0], a[1], a[2]);
    Ok(p)
}

/// Genus-2 splitting `M = A ∪_Σ B` given by the inclusion-induced maps.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "SplittingFile", into = "SplittingFile")]
pub struct SplittingData {
    pub name: String,
    pub side_a: Presentation,
    pub side_b: Presentation,
    pub i_a: GroupMap,
    pub i_b: GroupMap,
    /// Relator-image checks that could not be decided by free reduction.
    pub assumptions: Vec<String>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SplittingFile {
    name: String,
    side_a: Presentation,
    side_b: Presentation,
    i_a: GroupMap,
    i_b: GroupMap,
}

impl TryFrom<SplittingFile> for SplittingData {
    type Error = WordError;
    fn try_from(f: SplittingFile) -> Result<Self, WordError> {
        SplittingData::new(f.name, f.side_a, f.side_b, f.i_a, f.i_b)
    }
}

impl From<SplittingData> for SplittingFile {
    fn from(s: SplittingData) -> Self {
        SplittingFile { name: s.name, side_a: s.side_a, side_b: s.side_b, i_a: s.i_a, i_b: s.i_b }
    }
}

impl SplittingData {
    pub fn new(
        name: impl Into<String>,
        side_a: Presentation,
        side_b: Presentation,
        i_a: GroupMap,
        i_b: GroupMap,
    ) -> Result<Self, WordError> {
        let invalid = |m: String| WordError::InvalidSplitting(m);
        let surface = surface_generators();
        let z = gen(STABLE_LETTER);
        for g in side_a.generators() {
            if side_b.contains(g) || *g == z {
                return Err(invalid(format!("generator {g} is not unique across the splitting")));
            }
        }
        if side_b.contains(&z) {
            return Err(invalid("side B uses the stable letter".into()));
        }
        let mut assumptions = Vec::new();
        for (label, map, side) in [("i_a", &i_a, &side_a), ("i_b", &i_b, &side_b)] {
            let sources: Vec<&Generator> = map.sources().collect();
            if sources.len() != 4 || surface.iter().any(|g| !sources.contains(&g)) {
                return Err(invalid(format!("{label} must be defined exactly on a1,b1,a2,b2")));
            }
            for (_, img) in map.iter() {
                if let Some(g) = img.generators().find(|g| !side.contains(g)) {
                    return Err(invalid(format!("{label} image uses {g}, not in {}", side.name)));
                }
            }
            let r = map.apply(&surface_relator())?;
            if side.is_free() {
                if !r.is_empty() {
                    return Err(invalid(format!("{label}(R) = {r} is not trivial")));
                }
            } else {
                assumptions.push(format!("{label}(R) = {r} assumed trivial in {}", side.name));
            }
        }
        Ok(SplittingData { name: name.into(), side_a, side_b, i_a, i_b, assumptions })
    }

    /// The splitting of `A ∪_twist B`: `i_b` precomposed with `twist`.
    pub fn reglued(&self, twist: &GroupMap, name: impl Into<String>) -> Result<Self, WordError> {
        SplittingData::new(
            name,
            self.side_a.clone(),
            self.side_b.clone(),
            self.i_a.clone(),
            self.i_b.compose(twist)?,
        )
    }
}

/// `<A, B | rel(A), rel(B), i_a(g) = i_b(twist(g))>`; `None` means the identity.
pub fn build_amalgam(s: &SplittingData, twist: Option<&GroupMap>) -> Result<Presentation, WordError> {
    let mut generators = s.side_a.generators().to_vec();
    generators.extend(s.side_b.generators().iter().cloned());
    let mut relators = s.side_a.relators().to_vec();
    relators.extend(s.side_b.relators().iter().cloned());
    for g in surface_generators() {
        let gw = Word::generator(&g);
        let twisted = match twist {
            Some(t) => t.apply(&gw).map_err(|e| WordError::InvalidSplitting(e.to_string()))?,
            None => gw.clone(),
        };
        let word = s.i_a.apply(&gw)?.concat(&s.i_b.apply(&twisted)?.inverse());
        relators.push(Relator { word, defect: Defect::Plus });
    }
    let suffix = if twist.is_some() { "^tau" } else { "" };
    Presentation::new(format!("amalgam({}){suffix}", s.name), generators, relators)
}

/// `<A, B, z | rel(A), rel(B), z^-1 i_a(g) z = i_b(tau(g))>`.
pub fn build_wtau(s: &SplittingData) -> Result<Presentation, WordError> {
    let tau = tau_map();
    let z = gen(STABLE_LETTER);
    let zw = Word::generator(&z);
    let mut generators = s.side_a.generators().to_vec();
    generators.extend(s.side_b.generators().iter().cloned());
    generators.push(z);
    let mut relators = s.side_a.relators().to_vec();
    relators.extend(s.side_b.relators().iter().cloned());
    for g in surface_generators() {
        let gw = Word::generator(&g);
        let lhs = zw.inverse().concat(&s.i_a.apply(&gw)?).concat(&zw);
        let rhs = s.i_b.apply(&tau.apply(&gw)?)?;
        relators.push(Relator { word: lhs.concat(&rhs.inverse()), defect: Defect::Plus });
    }
    Presentation::new(format!("wtau({})", s.name), generators, relators)
}

/// Standard handlebody map `a1 -> x, b1 -> 1, a2 -> y, b2 -> 1` into `<x, y>`.
pub fn handlebody_map(x: &str, y: &str) -> GroupMap {
    GroupMap::from_strs(&[("a1", x), ("b1", ""), ("a2", y), ("b2", "")]).expect("handlebody map")
}

/// The splitting of `S^1×S^2 # S^1×S^2` by two copies of the standard handlebody.
pub fn standard_splitting() -> SplittingData {
    SplittingData::new(
        "standard",
        free_group("A", &["x", "y"]),
        free_group("B", &["u", "v"]),
        handlebody_map("x", "y"),
        handlebody_map("u", "v"),
    )
    .expect("standard splitting")
}

/// A relator-preserving surface automorphism with a label.
#[derive(Debug, Clone)]
pub struct SurfaceMove {
    pub name: &'static str,
    pub map: GroupMap,
}

/// Dehn-twist actions (and inverses) on the surface generators, including one
/// twist mixing the two handles. Each entry is validated against the relator.
pub fn surface_moves() -> Vec<SurfaceMove> {
    let table: [(&'static str, [(&str, &str); 4]); 10] = [
        ("twist_b1", [("a1", "a1 b1"), ("b1", "b1"), ("a2", "a2"), ("b2", "b2")]),
        ("twist_b1_inv", [("a1", "a1 b1^-1"), ("b1", "b1"), ("a2", "a2"), ("b2", "b2")]),
        ("twist_a1", [("a1", "a1"), ("b1", "b1 a1"), ("a2", "a2"), ("b2", "b2")]),
        ("twist_a1_inv", [("a1", "a1"), ("b1", "b1 a1^-1"), ("a2", "a2"), ("b2", "b2")]),
        ("twist_b2", [("a1", "a1"), ("b1", "b1"), ("a2", "a2 b2"), ("b2", "b2")]),
        ("twist_b2_inv", [("a1", "a1"), ("b1", "b1"), ("a2", "a2 b2^-1"), ("b2", "b2")]),
        ("twist_a2", [("a1", "a1"), ("b1", "b1"), ("a2", "a2"), ("b2", "b2 a2")]),
        ("twist_a2_inv", [("a1", "a1"), ("b1", "b1"), ("a2", "a2"), ("b2", "b2 a2^-1")]),
        ("twist_mix", [("a1", "b1^-1 b2 a1"), ("b1", "b1"), ("a2", "b1^-1 b2 a2"), ("b2", "b2")]),
        ("twist_mix_inv", [("a1", "b2^-1 b1 a1"), ("b1", "b1"), ("a2", "b2^-1 b1 a2"), ("b2", "b2")]),
    ];
    let surface = surface_group();
    table
        .iter()
        .map(|(name, entries)| {
            let map = GroupMap::from_strs(entries).expect("move table");
            map.check_relators_conjugate(&surface).expect("surface move preserves the relator");
            SurfaceMove { name, map }
        })
        .collect()
}

/// Splitting with `i_b = i_0 ∘ φ`, `φ` the composition of the given moves
/// (first move applied innermost).
pub fn twisted_splitting(name: &str, moves: &[&SurfaceMove]) -> Result<SplittingData, WordError> {
    let mut phi = GroupMap::identity(&surface_generators());
    for m in moves {
        phi = phi.compose(&m.map)?;
    }
    let base = standard_splitting();
    SplittingData::new(name, base.side_a, base.side_b, base.i_a, base.i_b.compose(&phi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::free_reduce;

    /// Repeatedly deletes the first cancelling pair; independent of the stack pass.
    fn naive_reduce(w: &Word) -> Word {
        let mut letters = w.letters().to_vec();
        loop {
            let pos = letters.windows(2).position(|p| {
                p[0].generator == p[1].generator && p[0].exponent == -p[1].exponent
            });
            match pos {
                Some(i) => {
                    letters.drain(i..i + 2);
                }
                None => return Word::from_letters(letters),
            }
        }
    }

    fn literal_substitution(m: &GroupMap, w: &Word) -> Word {
        let mut out = Word::empty();
        for l in w.letters() {
            let img = m.image(&l.generator).unwrap();
            out = out.concat(&if l.exponent == 1 { img.clone() } else { img.inverse() });
        }
        out
    }

    #[test]
    fn surface_relator_already_reduced() {
        let r = surface_relator();
        assert_eq!(free_reduce(&r), r);
    }

    #[test]
    fn tau_generator_images() {
        let tau = tau_map();
        let a1 = Word::parse("a1").unwrap();
        assert_eq!(tau.apply(&a1).unwrap(), Word::parse("a1^-1").unwrap());
        let b2 = Word::parse("b2").unwrap();
        assert_eq!(
            tau.apply(&b2).unwrap(),
            Word::parse("b1^-1 b2 a2 b2^-1 a2^-1 b2^-1 b1").unwrap()
        );
        let b1 = Word::parse("b1").unwrap();
        let twice = literal_substitution(&tau, &literal_substitution(&tau, &b1));
        assert_eq!(naive_reduce(&twice), b1);
        assert_eq!(tau.apply(&tau.apply(&b1).unwrap()).unwrap(), b1);
    }

    #[test]
    fn tau_of_relator_is_conjugate_by_b1() {
        let r = surface_relator();
        let expected = naive_reduce(&Word::parse("b1^-1").unwrap().concat(&r).concat(&Word::parse("b1").unwrap()));
        let image = naive_reduce(&literal_substitution(&tau_map(), &r));
        assert_eq!(image, expected);
        assert_eq!(tau_map().apply(&r).unwrap(), expected);
        assert_eq!(image.conjugator_to(&r).unwrap(), Word::parse("b1^-1").unwrap());
    }

    #[test]
    fn tau_inverse_is_two_sided() {
        let tau = tau_map();
        let inv = tau_inverse_map();
        for g in surface_generators() {
            let gw = Word::generator(&g);
            assert_eq!(tau.apply(&inv.apply(&gw).unwrap()).unwrap(), gw, "tau∘tau^-1 on {g}");
            assert_eq!(inv.apply(&tau.apply(&gw).unwrap()).unwrap(), gw, "tau^-1∘tau on {g}");
        }
    }

    #[test]
    fn mapping_torus_structure() {
        let p = build_mapping_torus(&tau_map(), &surface_group()).unwrap();
        assert_eq!(p.generators().len(), 5);
        assert_eq!(p.relators().len(), 5);
        let id = GroupMap::identity(&surface_generators());
        for phi in [id, surface_moves()[8].map.clone()] {
            let p = build_mapping_torus(&phi, &surface_group()).unwrap();
            assert_eq!(p.relators().len(), 5);
        }
        let t = mapping_torus_involution(&tau_map());
        assert_eq!(t.image(&gen("z")).unwrap(), &Word::parse("z").unwrap());
    }

    #[test]
    fn wtau_and_amalgam_structure() {
        let s = standard_splitting();
        let w = build_wtau(&s).unwrap();
        assert_eq!(w.generators().len(), 5);
        assert_eq!(w.relators().len(), 4);
        let m = build_amalgam(&s, None).unwrap();
        assert_eq!(m.generators().len(), 4);
        assert_eq!(m.relators()[0].word, Word::parse("x u^-1").unwrap());
        assert!(m.relators()[1].word.is_empty());
        assert!(s.i_a.apply(&surface_relator()).unwrap().is_empty());
    }

    #[test]
    fn splitting_validation() {
        let bad = SplittingData::new(
            "bad",
            free_group("A", &["x", "y"]),
            free_group("B", &["u", "v"]),
            handlebody_map("x", "y"),
            GroupMap::from_strs(&[("a1", "u"), ("b1", "v"), ("a2", ""), ("b2", "")]).unwrap(),
        );
        assert!(matches!(bad, Err(WordError::InvalidSplitting(_))));
        let clash = SplittingData::new(
            "clash",
            free_group("A", &["x", "y"]),
            free_group("B", &["x", "v"]),
            handlebody_map("x", "y"),
            handlebody_map("x", "v"),
        );
        assert!(matches!(clash, Err(WordError::InvalidSplitting(_))));
        let s = standard_splitting();
        let json = serde_json::to_string(&s).unwrap();
        let back: SplittingData = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn surface_moves_are_automorphisms() {
        let moves = surface_moves();
        assert_eq!(moves.len(), 10);
        for pair in moves.chunks(2) {
            let composed = pair[0].map.compose(&pair[1].map).unwrap();
            assert!(composed.is_identity(), "{} and {} are inverse", pair[0].name, pair[1].name);
        }
        let s = twisted_splitting("t", &[&moves[0], &moves[8], &moves[6]]).unwrap();
        assert!(s.i_b.apply(&surface_relator()).unwrap().is_empty());
    }

    #[test]
    fn seifert_presentation_round_trip() {
        let d = SeifertData::new(vec![2, 2, 2, 2, 2, 2], -3, vec![1; 6]).unwrap();
        let p = d.presentation();
        assert_eq!(p.generators().len(), 7);
        assert_eq!(p.relators().len(), 13);
        assert_eq!(SeifertData::from_presentation(&p).unwrap(), d);
        assert_eq!(d.euler_number(), (0, 1));
        assert!(SeifertData::new(vec![1, 2], 0, vec![0, 1]).is_err());
        assert!(SeifertData::new(vec![2, 3], 0, vec![1]).is_err());
    }

    #[test]
    fn brieskorn_data_is_homology_sphere() {
        for a in [[2, 3, 5], [2, 3, 7], [2, 3, 11], [2, 5, 7]] {
            let d = brieskorn_data(a).unwrap();
            assert!(d.is_homology_sphere(), "{a:?}");
            let p = brieskorn(a).unwrap();
            assert_eq!(SeifertData::from_presentation(&p).unwrap(), d);
        }
        assert_eq!(brieskorn_data([2, 3, 7]).unwrap(), SeifertData { multiplicities: vec![2, 3, 7], b: vec![1, 1, 1], e: -1 });
        assert!(brieskorn_data([2, 4, 5]).is_err());
    }
}
