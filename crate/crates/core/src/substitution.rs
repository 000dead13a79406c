//! Substitution rules, word expansion and the occurrence matrix.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{self, Matrix};
use crate::poly::IntPoly;

/// Default cap on explicitly generated word lengths.
pub const DEFAULT_LENGTH_CAP: usize = 10_000_000;

/// Names of the built-in families, in canonical order.
pub const BUILTIN_FAMILIES: [&str; 5] = ["periodic", "fibonacci", "thue-morse", "period-doubling", "rudin-shapiro"];

/// A word is a sequence of letter indices into some alphabet.
pub type Word = Vec<u8>;

/// A substitution on a finite alphabet, with an optional projection of letters
/// onto a (smaller) tile alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    name: Option<String>,
    alphabet: Vec<String>,
    images: Vec<Word>,
    tile_alphabet: Vec<String>,
    projection: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    alphabet: Vec<String>,
    images: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    projection: Option<BTreeMap<String, String>>,
}

impl SubstitutionRule {
    /// Builds a rule from letter names and image strings. Image strings are
    /// tokenized by longest match against the alphabet.
    pub fn new(name: Option<&str>, alphabet: &[&str], images: &[&str]) -> Result<Self> {
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        let images = images.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self::build(name.map(str::to_string), alphabet, images, None)
    }

    /// Adds a letter-to-tile projection; `tiles[i]` is the tile name of letter `i`.
    pub fn with_projection(mut self, tiles: &[&str]) -> Result<Self> {
        if tiles.len() != self.alphabet.len() {
            return Err(Error::InvalidRule("projection must list one tile per letter".into()));
        }
        let (ta, proj) = project_names(tiles.iter().map(|s| s.to_string()))?;
        self.tile_alphabet = ta;
        self.projection = proj;
        Ok(self)
    }

    fn build(name: Option<String>, alphabet: Vec<String>, images: Vec<String>, projection: Option<Vec<String>>) -> Result<Self> {
        if alphabet.len() < 2 {
            return Err(Error::InvalidRule("alphabet needs at least two letters".into()));
        }
        if alphabet.len() > 255 {
            return Err(Error::InvalidRule("alphabet larger than 255 letters".into()));
        }
        for (i, l) in alphabet.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidRule("empty letter".into()));
            }
            if alphabet[..i].contains(l) {
                return Err(Error::InvalidRule(format!("duplicate letter {l:?}")));
            }
        }
        if images.len() != alphabet.len() {
            return Err(Error::InvalidRule("one image per letter required".into()));
        }
        let images = images.iter().map(|s| tokenize(&alphabet, s)).collect::<Result<Vec<_>>>()?;
        if images.iter().any(Vec::is_empty) {
            return Err(Error::InvalidRule("images must be nonempty".into()));
        }
        let (tile_alphabet, projection) = match projection {
            Some(p) => project_names(p.into_iter())?,
            None => (alphabet.clone(), (0..alphabet.len() as u8).collect()),
        };
        Ok(SubstitutionRule { name, alphabet, images, tile_alphabet, projection })
    }

    /// One of the built-in families.
    pub fn builtin(family: &str) -> Result<Self> {
        let rule = match family {
            "periodic" => Self::new(Some(family), &["a", "b"], &["ab", "ab"])?,
            "fibonacci" => Self::new(Some(family), &["a", "b"], &["ab", "a"])?,
            "thue-morse" => Self::new(Some(family), &["a", "b"], &["ab", "ba"])?,
            "period-doubling" => Self::new(Some(family), &["a", "b"], &["ab", "aa"])?,
            "rudin-shapiro" => Self::new(Some(family), &["A", "B", "C", "D"], &["AB", "AC", "DB", "DC"])?
                .with_projection(&["a", "b", "a", "b"])?,
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        Ok(rule)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RuleJson = serde_json::from_str(text).map_err(|e| Error::InvalidRule(e.to_string()))?;
        let mut images = Vec::with_capacity(raw.alphabet.len());
        for l in &raw.alphabet {
            let img = raw.images.get(l).ok_or_else(|| Error::InvalidRule(format!("no image for letter {l:?}")))?;
            images.push(img.clone());
        }
        if let Some(extra) = raw.images.keys().find(|k| !raw.alphabet.contains(k)) {
            return Err(Error::UnknownLetter(extra.clone()));
        }
        let projection = match raw.projection {
            Some(p) => {
                let mut v = Vec::with_capacity(raw.alphabet.len());
                for l in &raw.alphabet {
                    v.push(p.get(l).ok_or_else(|| Error::InvalidRule(format!("no projection for {l:?}")))?.clone());
                }
                Some(v)
            }
            None => None,
        };
        Self::build(raw.name, raw.alphabet, images, projection)
    }

    pub fn to_json(&self) -> String {
        let images = self.alphabet.iter().cloned().zip(self.images.iter().map(|w| self.render(w))).collect();
        let projection = self.has_projection().then(|| {
            self.alphabet
                .iter()
                .cloned()
                .zip(self.projection.iter().map(|&t| self.tile_alphabet[t as usize].clone()))
                .collect()
        });
        let raw = RuleJson { name: self.name.clone(), alphabet: self.alphabet.clone(), images, projection };
        serde_json::to_string(&raw).expect("rule serializes")
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, letter: u8) -> &[u8] {
        &self.images[letter as usize]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn letter_index(&self, letter: &str) -> Result<u8> {
        self.alphabet
            .iter()
            .position(|l| l == letter)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    pub fn has_projection(&self) -> bool {
        self.projection.iter().enumerate().any(|(i, &t)| i != t as usize) || self.tile_alphabet != self.alphabet
    }

    pub fn tile_alphabet(&self) -> &[String] {
        &self.tile_alphabet
    }

    /// Tile index of each letter.
    pub fn projection(&self) -> &[u8] {
        &self.projection
    }

    pub fn project(&self, word: &[u8]) -> Word {
        word.iter().map(|&l| self.projection[l as usize]).collect()
    }

    pub fn render(&self, word: &[u8]) -> String {
        word.iter().map(|&l| self.alphabet[l as usize].as_str()).collect()
    }

    pub fn render_tiles(&self, tiles: &[u8]) -> String {
        tiles.iter().map(|&l| self.tile_alphabet[l as usize].as_str()).collect()
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        tokenize(&self.alphabet, s)
    }

    /// Applies the substitution once.
    pub fn apply(&self, word: &[u8]) -> Word {
        let mut out = Vec::with_capacity(word.len() * 2);
        for &l in word {
            out.extend_from_slice(&self.images[l as usize]);
        }
        out
    }

    /// The rule `σ^k`.
    pub fn power(&self, k: u32) -> SubstitutionRule {
        let mut images: Vec<Word> = (0..self.size() as u8).map(|l| vec![l]).collect();
        for _ in 0..k {
            images = images.iter().map(|w| self.apply(w)).collect();
        }
        SubstitutionRule { images, ..self.clone() }
    }

    /// `|σ^order(letter)|` for every letter, saturating at `u128::MAX`.
    pub fn image_lengths(&self, order: u32) -> Vec<u128> {
        let mut len = vec![1u128; self.size()];
        for _ in 0..order {
            len = self
                .images
                .iter()
                .map(|img| img.iter().fold(0u128, |acc, &l| acc.saturating_add(len[l as usize])))
                .collect();
        }
        len
    }
}

fn project_names(tiles: impl Iterator<Item = String>) -> Result<(Vec<String>, Vec<u8>)> {
    let mut alphabet: Vec<String> = Vec::new();
    let mut proj = Vec::new();
    for t in tiles {
        if t.is_empty() {
            return Err(Error::InvalidRule("empty tile name".into()));
        }
        let idx = match alphabet.iter().position(|x| *x == t) {
            Some(i) => i,
            None => {
                alphabet.push(t);
                alphabet.len() - 1
            }
        };
        proj.push(idx as u8);
    }
    Ok((alphabet, proj))
}

fn tokenize(alphabet: &[String], s: &str) -> Result<Word> {
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let best = alphabet
            .iter()
            .enumerate()
            .filter(|(_, l)| rest.starts_with(l.as_str()))
            .max_by_key(|(_, l)| l.len());
        match best {
            Some((i, l)) => {
                out.push(i as u8);
                rest = &rest[l.len()..];
            }
            None => {
                let c = rest.chars().next().unwrap();
                return Err(Error::UnknownLetter(c.to_string()));
            }
        }
    }
    Ok(out)
}

/// Letter-count matrix with `m[i][j]` the number of letter `j` in the image of
/// letter `i`; for two letters this is `[[α, β], [γ, δ]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceMatrix {
    m: Matrix<i64>,
}

impl OccurrenceMatrix {
    pub fn new(m: Matrix<i64>) -> Self {
        assert!(m.is_square(), "occurrence matrix must be square");
        OccurrenceMatrix { m }
    }

    pub fn matrix(&self) -> &Matrix<i64> {
        &self.m
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> i64 {
        self.m.trace()
    }

    pub fn det(&self) -> i64 {
        self.m.det()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.m.to_rows()
    }

    pub fn char_poly(&self) -> IntPoly {
        IntPoly::new(intmat::char_poly(&intmat::to_big(&self.m)))
    }

    /// Some power `M^k`, `k ≤ (a-1)^2 + 1`, is strictly positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let bool_mul = |a: &[bool], b: &[bool]| {
            let mut out = vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if a[i * n + k] {
                        for j in 0..n {
                            out[i * n + j] |= b[k * n + j];
                        }
                    }
                }
            }
            out
        };
        let base: Vec<bool> = (0..n * n).map(|x| self.m[(x / n, x % n)] > 0).collect();
        let mut p = base.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 0..bound.max(n * n) {
            if p.iter().all(|&x| x) {
                return true;
            }
            p = bool_mul(&p, &base);
        }
        p.iter().all(|&x| x)
    }
}

pub fn occurrence_matrix(rule: &SubstitutionRule) -> OccurrenceMatrix {
    let n = rule.size();
    let mut m = Matrix::zeros(n, n);
    for (i, img) in rule.images().iter().enumerate() {
        for &l in img {
            m[(i, l as usize)] += 1;
        }
    }
    OccurrenceMatrix { m }
}

/// `F_0 = 0, F_1 = 1, F_{k+1} = t F_k - p F_{k-1}` with `t = Tr M`, `p = det M`,
/// in arbitrary precision.
pub fn recurrence_sequence_big(m: &OccurrenceMatrix, n: usize) -> Vec<BigInt> {
    let t = BigInt::from(m.trace());
    let p = BigInt::from(m.det());
    let mut out = vec![BigInt::zero()];
    if n >= 1 {
        out.push(BigInt::from(1));
    }
    while out.len() <= n {
        let k = out.len();
        out.push(&t * &out[k - 1] - &p * &out[k - 2]);
    }
    out
}

/// As [`recurrence_sequence_big`], reporting [`Error::Overflow`] when a term
/// does not fit in `i64`.
pub fn recurrence_sequence(m: &OccurrenceMatrix, n: usize) -> Result<Vec<i64>> {
    let (t, p) = (m.trace(), m.det());
    let mut out = vec![0i64];
    if n >= 1 {
        out.push(1);
    }
    while out.len() <= n {
        let k = out.len();
        let next = t
            .checked_mul(out[k - 1])
            .and_then(|a| p.checked_mul(out[k - 2]).and_then(|b| a.checked_sub(b)))
            .ok_or(Error::Overflow(k))?;
        out.push(next);
    }
    Ok(out)
}

/// `σ^order(seed)` under the default length cap.
pub fn expand_word(rule: &SubstitutionRule, seed: u8, order: u32) -> Result<Word> {
    expand_word_capped(rule, seed, order, DEFAULT_LENGTH_CAP)
}

pub fn expand_word_capped(rule: &SubstitutionRule, seed: u8, order: u32, cap: usize) -> Result<Word> {
    if seed as usize >= rule.size() {
        return Err(Error::UnknownLetter(format!("#{seed}")));
    }
    let len = rule.image_lengths(order)[seed as usize];
    if len > cap as u128 {
        return Err(Error::LengthLimit { requested: len, cap });
    }
    let mut w = vec![seed];
    for _ in 0..order {
        w = rule.apply(&w);
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LetterStats {
    pub counts: Vec<usize>,
    pub freqs: Vec<f64>,
}

/// Per-letter counts and frequencies over an alphabet of `size` letters.
pub fn letter_statistics(word: &[u8], size: usize) -> Result<LetterStats> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut counts = vec![0usize; size];
    for &l in word {
        let slot = counts.get_mut(l as usize).ok_or_else(|| Error::UnknownLetter(format!("#{l}")))?;
        *slot += 1;
    }
    let n = word.len() as f64;
    let freqs = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(LetterStats { counts, freqs })
}
