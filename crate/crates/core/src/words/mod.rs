//! Free-group words, group maps and the presentations built from them.
//!
//! A [`Word`] is a sequence of letters `(generator, ±1)`. Every constructor
//! that produces a "canonical" word goes through [`free_reduce`]. Presentations
//! carry an optional central defect per relator: a relator tagged
//! [`Defect::Minus`] must evaluate to minus the identity instead of the
//! identity, which is how SO(3) problems with non-vanishing second
//! Stiefel-Whitney class are lifted to SU(2).

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub mod builders;
pub use builders::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid generator name {0:?}")]
    InvalidGeneratorName(String),
    #[error("cannot parse token {0:?}")]
    Parse(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("bad Seifert data: {0}")]
    BadSeifertData(String),
    #[error("map does not respect relator {relator}: image reduces to {image}")]
    RelatorNotPreserved { relator: String, image: String },
}

/// A generator symbol: letters, digits and underscores only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(String);

impl Generator {
    pub fn new(name: impl Into<String>) -> Result<Self, WordError> {
        let name = name.into();
        let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(Generator(name))
        } else {
            Err(WordError::InvalidGeneratorName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Generator::new(s).map_err(serde::de::Error::custom)
    }
}

/// Convenience constructor for names known to be valid at compile time.
pub(crate) fn gen(name: &str) -> Generator {
    Generator::new(name).expect("static generator name")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    /// Either `1` or `-1`.
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: Generator, exponent: i8) -> Self {
        debug_assert!(exponent == 1 || exponent == -1);
        Letter { generator, exponent }
    }

    pub fn inverse(&self) -> Letter {
        Letter::new(self.generator.clone(), -self.exponent)
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.generator == other.generator && self.exponent == -other.exponent
    }
}

/// A word in a free group. Not necessarily reduced; see [`Word::reduced`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn generator(g: &Generator) -> Self {
        Word { letters: vec![Letter::new(g.clone(), 1)] }
    }

    /// Parses the whitespace-separated grammar `name`, `name^-1`, `name^k`.
    /// Powers are expanded into letters; the result is not reduced.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for token in s.split_whitespace() {
            let (name, power) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, p)) => {
                    let p: i64 = p.parse().map_err(|_| WordError::Parse(token.to_string()))?;
                    (name, p)
                }
            };
            let g = Generator::new(name).map_err(|_| WordError::Parse(token.to_string()))?;
            let exponent = if power < 0 { -1 } else { 1 };
            for _ in 0..power.unsigned_abs() {
                letters.push(Letter::new(g.clone(), exponent));
            }
        }
        Ok(Word { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inverse).collect() }
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }

    /// `self^k` without reduction; negative `k` uses the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend(base.letters.iter().cloned());
        }
        Word { letters }
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn reduced(&self) -> Word {
        free_reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].cancels(&w[1]))
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.letters.iter().map(|l| &l.generator)
    }

    /// Exponent sum of `g`.
    pub fn exponent_sum(&self, g: &Generator) -> i64 {
        self.letters.iter().filter(|l| &l.generator == g).map(|l| l.exponent as i64).sum()
    }

    /// Splits a reduced word as `c · core · c^-1` with `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let w = self.reduced();
        let n = w.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && w.letters[k].cancels(&w.letters[n - 1 - k]) {
            k += 1;
        }
        let conj = Word { letters: w.letters[..k].to_vec() };
        let core = Word { letters: w.letters[k..n - k].to_vec() };
        (conj, core)
    }

    /// Returns `c` with `reduce(c^-1 · self · c) = other` if the two words are
    /// conjugate in the free group.
    pub fn conjugator_to(&self, other: &Word) -> Option<Word> {
        let (c1, core1) = self.cyclic_reduction();
        let (c2, core2) = other.cyclic_reduction();
        if core1.len() != core2.len() {
            return None;
        }
        if core1.is_empty() {
            return Some(Word::empty());
        }
        let n = core1.len();
        // core1 = p·q, core2 = q·p  ⇒  core2 = p^-1 core1 p.
        for k in 0..n {
            let rotated = core1.letters[k..].iter().chain(core1.letters[..k].iter());
            if rotated.eq(core2.letters.iter()) {
                let p = Word { letters: core1.letters[..k].to_vec() };
                // self = c1 core1 c1^-1, other = c2 core2 c2^-1.
                let c = c1.concat(&p).concat(&c2.inverse()).reduced();
                return Some(c);
            }
        }
        None
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if l.exponent == 1 {
                write!(f, "{}", l.generator)?;
            } else {
                write!(f, "{}^-1", l.generator)?;
            }
        }
        Ok(())
    }
}

/// Unique freely reduced form of `w`, by a single left-to-right stack pass.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for l in &w.letters {
        match stack.last() {
            Some(top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l.clone()),
        }
    }
    Word { letters: stack }
}

/// Central defect of a relator: the relator must evaluate to `+I` or `-I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Defect {
    #[default]
    Plus,
    Minus,
}

impl Defect {
    pub fn sign(self) -> f64 {
        match self {
            Defect::Plus => 1.0,
            Defect::Minus => -1.0,
        }
    }
}

impl Serialize for Defect {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(match self {
            Defect::Plus => 1,
            Defect::Minus => -1,
        })
    }
}

impl<'de> Deserialize<'de> for Defect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match i64::deserialize(d)? {
            1 => Ok(Defect::Plus),
            -1 => Ok(Defect::Minus),
            other => Err(serde::de::Error::custom(format!("defect must be 1 or -1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub word: Word,
    pub defect: Defect,
}

/// A finitely presented group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    generators: Vec<Generator>,
    relators: Vec<Relator>,
}

impl Presentation {
    /// Validates generator uniqueness and relator letters; relators are stored reduced.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Generator>,
        relators: Vec<Relator>,
    ) -> Result<Self, WordError> {
        let mut seen = HashSet::new();
        for g in &generators {
            if !seen.insert(g.clone()) {
                return Err(WordError::DuplicateGenerator(g.to_string()));
            }
        }
        let relators = relators
            .into_iter()
            .map(|r| {
                if let Some(g) = r.word.generators().find(|g| !seen.contains(*g)) {
                    return Err(WordError::UnknownGenerator(g.to_string()));
                }
                Ok(Relator { word: r.word.reduced(), defect: r.defect })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation { name: name.into(), generators, relators })
    }

    /// Presentation whose relators all carry defect `+1`.
    pub fn from_words(
        name: impl Into<String>,
        generators: Vec<Generator>,
        relators: Vec<Word>,
    ) -> Result<Self, WordError> {
        let relators = relators.into_iter().map(|word| Relator { word, defect: Defect::Plus }).collect();
        Presentation::new(name, generators, relators)
    }

    pub fn free(name: impl Into<String>, generators: Vec<Generator>) -> Result<Self, WordError> {
        Presentation::new(name, generators, Vec::new())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn is_free(&self) -> bool {
        self.relators.iter().all(|r| r.word.is_empty() && r.defect == Defect::Plus)
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.generators.contains(g)
    }

    pub fn index_of(&self, g: &Generator) -> Option<usize> {
        self.generators.iter().position(|h| h == g)
    }

    /// Copy with the defect of relator `index` replaced.
    pub fn with_defect(&self, index: usize, defect: Defect) -> Presentation {
        let mut p = self.clone();
        p.relators[index].defect = defect;
        p
    }
}

#[derive(Serialize, Deserialize)]
struct RelatorFile {
    word: String,
    defect: Defect,
}

#[derive(Serialize, Deserialize)]
struct PresentationFile {
    name: String,
    generators: Vec<Generator>,
    relators: Vec<RelatorFile>,
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PresentationFile {
            name: self.name.clone(),
            generators: self.generators.clone(),
            relators: self
                .relators
                .iter()
                .map(|r| RelatorFile { word: r.word.to_string(), defect: r.defect })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PresentationFile::deserialize(d)?;
        let relators = raw
            .relators
            .into_iter()
            .map(|r| Ok(Relator { word: Word::parse(&r.word)?, defect: r.defect }))
            .collect::<Result<Vec<_>, WordError>>()
            .map_err(serde::de::Error::custom)?;
        Presentation::new(raw.name, raw.generators, relators).map_err(serde::de::Error::custom)
    }
}

/// A homomorphism of free groups given on generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupMap {
    images: IndexMap<Generator, Word>,
}

impl GroupMap {
    pub fn new(images: IndexMap<Generator, Word>) -> Self {
        let images = images.into_iter().map(|(g, w)| (g, w.reduced())).collect();
        GroupMap { images }
    }

    /// Builds a map from `(generator, word string)` pairs.
    pub fn from_strs(entries: &[(&str, &str)]) -> Result<Self, WordError> {
        let mut images = IndexMap::new();
        for (g, w) in entries {
            images.insert(Generator::new(*g)?, Word::parse(w)?);
        }
        Ok(GroupMap::new(images))
    }

    pub fn identity(generators: &[Generator]) -> Self {
        GroupMap { images: generators.iter().map(|g| (g.clone(), Word::generator(g))).collect() }
    }

    pub fn image(&self, g: &Generator) -> Option<&Word> {
        self.images.get(g)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Generator> {
        self.images.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Generator, &Word)> {
        self.images.iter()
    }

    /// Letterwise substitution followed by free reduction.
    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for l in w.letters() {
            let img = self
                .images
                .get(&l.generator)
                .ok_or_else(|| WordError::UnknownGenerator(l.generator.to_string()))?;
            if l.exponent == 1 {
                out.extend(img.letters().iter().cloned());
            } else {
                out.extend(img.letters().iter().rev().map(Letter::inverse));
            }
        }
        Ok(free_reduce(&Word::from_letters(out)))
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &GroupMap) -> Result<GroupMap, WordError> {
        let mut images = IndexMap::new();
        for (g, w) in &inner.images {
            images.insert(g.clone(), self.apply(w)?);
        }
        Ok(GroupMap { images })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|(g, w)| w.len() == 1 && w.letters()[0] == Letter::new(g.clone(), 1))
    }

    /// Checks that every relator of `source` maps to the empty word (target free).
    pub fn check_relators_trivial(&self, source: &Presentation) -> Result<(), WordError> {
        for r in source.relators() {
            let img = self.apply(&r.word)?;
            if !img.is_empty() {
                return Err(WordError::RelatorNotPreserved {
                    relator: r.word.to_string(),
                    image: img.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Checks that every relator of `p` maps to a free-group conjugate of itself.
    pub fn check_relators_conjugate(&self, p: &Presentation) -> Result<(), WordError> {
        for r in p.relators() {
            let img = self.apply(&r.word)?;
            if img.conjugator_to(&r.word).is_none() {
                return Err(WordError::RelatorNotPreserved {
                    relator: r.word.to_string(),
                    image: img.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GroupMapFile {
    map: IndexMap<Generator, String>,
}

impl Serialize for GroupMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupMapFile { map: self.images.iter().map(|(g, w)| (g.clone(), w.to_string())).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GroupMapFile::deserialize(d)?;
        let mut images = IndexMap::new();
        for (g, w) in raw.map {
            images.insert(g, Word::parse(&w).map_err(serde::de::Error::custom)?);
        }
        Ok(GroupMap::new(images))
    }
}
