use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{LabError, Result};
use crate::hyp_geom::{HPoint, MoebiusIsometry};

/// A group element acting by isometries on a metric space.
pub trait Isometry: Clone + Send + Sync + Debug {
    type Point: Clone + Send + Sync + Debug;
    /// Hashable fingerprint identifying elements up to tolerance (and up to
    /// sign for projective matrices).
    type Key: Hash + Eq + Clone + Send + Sync;

    fn act(&self, p: &Self::Point) -> Self::Point;
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn identity_like(&self) -> Self;
    fn is_identity(&self, tol: f64) -> bool;
    fn key(&self) -> Self::Key;
    fn distance(p: &Self::Point, q: &Self::Point) -> f64;
    fn dim_hint(&self) -> usize;

    fn displacement(&self, p: &Self::Point) -> f64 {
        Self::distance(&self.act(p), p)
    }
}

const MOEBIUS_KEY_SCALE: f64 = 1e6;

impl Isometry for MoebiusIsometry {
    type Point = HPoint;
    type Key = [i64; 8];

    fn act(&self, p: &HPoint) -> HPoint {
        MoebiusIsometry::act(self, p)
    }
    fn compose(&self, other: &Self) -> Self {
        MoebiusIsometry::compose(self, other)
    }
    fn inverse(&self) -> Self {
        MoebiusIsometry::inverse(self)
    }
    fn identity_like(&self) -> Self {
        MoebiusIsometry::identity(self.field())
    }
    fn is_identity(&self, tol: f64) -> bool {
        MoebiusIsometry::is_identity(self, tol)
    }
    /// The sign is fixed by the first entry that is clearly nonzero at the
    /// key resolution, so roundoff near zero cannot split an element in two.
    fn key(&self) -> [i64; 8] {
        let m = self.entries();
        let flip = m
            .iter()
            .find(|z| z.norm() * MOEBIUS_KEY_SCALE > 0.5)
            .map(|z| z.re < -0.5 / MOEBIUS_KEY_SCALE || (z.re.abs() <= 0.5 / MOEBIUS_KEY_SCALE && z.im < 0.0))
            .unwrap_or(false);
        let s = if flip { -1.0 } else { 1.0 };
        let mut k = [0i64; 8];
        for (i, z) in m.iter().enumerate() {
            k[2 * i] = (s * z.re * MOEBIUS_KEY_SCALE).round() as i64;
            k[2 * i + 1] = (s * z.im * MOEBIUS_KEY_SCALE).round() as i64;
        }
        // -0 and 0 must agree
        k.map(|x| if x == 0 { 0 } else { x })
    }
    fn distance(p: &HPoint, q: &HPoint) -> f64 {
        p.distance_to(q)
    }
    fn dim_hint(&self) -> usize {
        match self.field() {
            crate::hyp_geom::Field::Real => 2,
            crate::hyp_geom::Field::Complex => 3,
        }
    }
}

/// Generators of a group of isometries of one geometry. The symmetric
/// generating set (generators and their inverses, deduplicated) is kept
/// alongside.
#[derive(Debug, Clone, Serialize)]
pub struct FinitelyGeneratedGroup<G: Isometry> {
    generators: Vec<G>,
    /// `letters[k]` is the element for letter `k`; `letter_names[k]` is its
    /// signed generator index (`+i` for generator `i - 1`, `-i` for its
    /// inverse).
    #[serde(skip)]
    letters: Vec<G>,
    letter_names: Vec<i32>,
    pub exact: bool,
    pub name: Option<String>,
}

impl<G: Isometry> FinitelyGeneratedGroup<G> {
    pub fn new(generators: Vec<G>, exact: bool, name: Option<String>) -> Result<Self> {
        if generators.is_empty() {
            return Err(LabError::Empty("generator list".into()));
        }
        let mut letters = Vec::new();
        let mut letter_names = Vec::new();
        let mut seen = HashSet::new();
        for (i, g) in generators.iter().enumerate() {
            for (sign, h) in [(1, g.clone()), (-1, g.inverse())] {
                if h.is_identity(1e-12) {
                    continue;
                }
                if seen.insert(h.key()) {
                    letters.push(h);
                    letter_names.push(sign * (i as i32 + 1));
                }
            }
        }
        Ok(Self { generators, letters, letter_names, exact, name })
    }

    pub fn generators(&self) -> &[G] {
        &self.generators
    }

    /// The symmetric generating set as `(signed generator index, element)`.
    pub fn symmetric_generators(&self) -> impl Iterator<Item = (i32, &G)> {
        self.letter_names.iter().copied().zip(self.letters.iter())
    }

    pub fn dim_hint(&self) -> usize {
        self.generators[0].dim_hint()
    }

    /// Conjugates every generator by `h`: the group `h Gamma h^{-1}`.
    pub fn conjugated(&self, h: &G) -> Result<Self> {
        let hinv = h.inverse();
        let gens = self.generators.iter().map(|g| h.compose(g).compose(&hinv)).collect();
        Self::new(gens, self.exact, self.name.clone())
    }

    /// All elements of word length at most `radius` over the symmetric
    /// generating set, each stored once with a shortest word.
    ///
    /// Frontiers are expanded in parallel and merged in a fixed order, so
    /// the result does not depend on the thread count.
    pub fn word_ball(&self, radius: usize, cap: usize) -> Result<WordBall<G>> {
        let id = self.generators[0].identity_like();
        let mut seen: HashSet<G::Key> = HashSet::new();
        seen.insert(id.key());
        let mut entries = vec![BallEntry { word: Vec::new(), element: id }];
        let mut frontier: Vec<usize> = vec![0];
        for _ in 0..radius {
            let candidates: Vec<Vec<(Vec<i32>, G, G::Key)>> = frontier
                .par_iter()
                .map(|&idx| {
                    let base = &entries[idx];
                    self.letters
                        .iter()
                        .zip(&self.letter_names)
                        .filter(|(_, &name)| base.word.last() != Some(&-name))
                        .map(|(g, &name)| {
                            let element = base.element.compose(g);
                            let key = element.key();
                            let mut word = base.word.clone();
                            word.push(name);
                            (word, element, key)
                        })
                        .collect()
                })
                .collect();
            let mut next = Vec::new();
            for (word, element, key) in candidates.into_iter().flatten() {
                if seen.insert(key) {
                    if entries.len() >= cap {
                        return Err(LabError::CapExceeded { cap });
                    }
                    next.push(entries.len());
                    entries.push(BallEntry { word, element });
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(WordBall { radius, entries })
    }
}

/// Default cap on word-ball size.
pub const WORD_BALL_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct BallEntry<G> {
    /// Reduced word in signed generator indices (`+i` / `-i`).
    pub word: Vec<i32>,
    #[serde(skip)]
    pub element: G,
}

/// A finite truncation of the group: the word ball of radius `radius`.
#[derive(Debug, Clone, Serialize)]
pub struct WordBall<G> {
    pub radius: usize,
    pub entries: Vec<BallEntry<G>>,
}

impl<G: Isometry> WordBall<G> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &G> {
        self.entries.iter().map(|e| &e.element)
    }

    /// Entries other than the identity.
    pub fn nontrivial(&self) -> impl Iterator<Item = &BallEntry<G>> {
        self.entries.iter().filter(|e| !e.element.is_identity(1e-10))
    }
}

/// Renders a signed-index word as `g1 g2^-1 ...`.
pub fn format_word(word: &[i32]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(|&l| if l > 0 { format!("g{l}") } else { format!("g{}^-1", -l) }).collect::<Vec<_>>().join(" ")
}
