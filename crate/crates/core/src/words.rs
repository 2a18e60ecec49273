//! Reduced words in a free group, endomorphisms, and Fox calculus.
//!
//! Letters are signed 1-based generator indices: `+k` is the k-th generator,
//! `-k` its inverse. In the text grammar the k-th generator is the k-th
//! lowercase letter `a..z` and its inverse the corresponding uppercase letter;
//! tokens are separated by whitespace and the empty string is the identity.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A signed generator index. Never zero; `|letter| <= rank` of the ambient group.
pub type Letter = i8;

/// Maximal supported rank (letters map onto `a..z`).
pub const MAX_RANK: usize = 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at token {pos}: {token:?} is not a generator letter")]
    BadToken { pos: usize, token: String },
    #[error("generator out of range at token {pos}: {token:?} exceeds rank {rank}")]
    OutOfRange { pos: usize, token: String, rank: usize },
}

/// A freely reduced word in a free group.
///
/// The reduction invariant (no adjacent `x x^-1` pair) is maintained by every
/// constructor and operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    /// The k-th generator as a word (1-based).
    pub fn generator(k: usize) -> Self {
        assert!(k >= 1 && k <= MAX_RANK);
        Word { letters: vec![k as Letter] }
    }

    /// Builds a word from raw letters, freely reducing.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            debug_assert!(l != 0);
            if let Some(&top) = stack.last() {
                if top == -l {
                    stack.pop();
                    continue;
                }
            }
            stack.push(l);
        }
        Word { letters: stack }
    }

    /// Parses the whitespace-separated letter grammar. Multi-character tokens
    /// are accepted as concatenated letters (used by certificate files).
    pub fn parse(text: &str, rank: usize) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for (pos, token) in text.split_whitespace().enumerate() {
            for ch in token.chars() {
                let l: Letter = if ch.is_ascii_lowercase() {
                    (ch as u8 - b'a' + 1) as Letter
                } else if ch.is_ascii_uppercase() {
                    -(((ch as u8 - b'A') + 1) as Letter)
                } else {
                    return Err(WordError::BadToken { pos, token: token.to_string() });
                };
                if l.unsigned_abs() as usize > rank {
                    return Err(WordError::OutOfRange { pos, token: token.to_string(), rank });
                }
                letters.push(l);
            }
        }
        Ok(Word::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used (0 for the identity).
    pub fn max_index(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Freely reduced product. Length is at most `|self| + |other|`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            if let Some(&top) = stack.last() {
                if top == -l {
                    stack.pop();
                    continue;
                }
            }
            stack.push(l);
        }
        Word { letters: stack }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.mul(self).mul(&c.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Exponent sum of each generator, as a length-`rank` vector.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0i64; rank];
        for &l in &self.letters {
            let idx = l.unsigned_abs() as usize - 1;
            sums[idx] += if l > 0 { 1 } else { -1 };
        }
        sums
    }
}

pub fn letter_char(l: Letter) -> char {
    debug_assert!(l != 0);
    if l > 0 {
        (b'a' + l as u8 - 1) as char
    } else {
        (b'A' + (-l) as u8 - 1) as char
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", letter_char(l))?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "Word(1)")
        } else {
            write!(f, "Word({})", self)
        }
    }
}

/// A finitely supported element of the integral group ring of a free group.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FreePoly {
    terms: BTreeMap<Word, BigInt>,
}

impl FreePoly {
    pub fn zero() -> Self {
        FreePoly::default()
    }

    pub fn one() -> Self {
        FreePoly::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, BigInt::one());
        FreePoly { terms }
    }

    pub fn from_term(w: Word, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        FreePoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: Word, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> FreePoly {
        FreePoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &FreePoly) -> FreePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                out.add_term(u.mul(v), &(cu * cv));
            }
        }
        out
    }

    pub fn mul_word_left(&self, w: &Word) -> FreePoly {
        FreePoly { terms: self.terms.iter().map(|(u, c)| (w.mul(u), c.clone())).collect() }
    }

    /// Substitutes each generator by its image under `map` (a homomorphism of
    /// free groups given on generators).
    pub fn substitute(&self, map: &Endomorphism) -> FreePoly {
        let mut out = FreePoly::zero();
        for (w, c) in &self.terms {
            out.add_term(map.apply(w), c);
        }
        out
    }
}

impl fmt::Debug for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::Signed;
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let abs = c.abs();
            if w.is_identity() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", w)?;
            } else {
                write!(f, "{}*({})", abs, w)?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Fox derivative of a reduced word with respect to the i-th generator
/// (1-based), as an element of the free group ring.
///
/// Uses the closed form: each occurrence of `s_i` contributes its prefix, each
/// occurrence of `s_i^-1` contributes minus the prefix including the letter.
pub fn fox_derivative(w: &Word, i: usize) -> FreePoly {
    let target = i as Letter;
    let mut out = FreePoly::zero();
    let mut prefix = Word::identity();
    for &l in w.letters() {
        if l == target {
            out.add_term(prefix.clone(), &BigInt::one());
        }
        let next = prefix.mul(&Word { letters: vec![l] });
        if l == -target {
            out.add_term(next.clone(), &(-BigInt::one()));
        }
        prefix = next;
    }
    out
}

/// Checks the identity `sum_i d(w)/d(s_i) * (1 - s_i) = 1 - w` exactly.
pub fn fundamental_formula_check(w: &Word, rank: usize) -> bool {
    let mut lhs = FreePoly::zero();
    for i in 1..=rank {
        let d = fox_derivative(w, i);
        let one_minus_si = FreePoly::one().sub(&FreePoly::from_word(Word::generator(i)));
        lhs = lhs.add(&d.mul(&one_minus_si));
    }
    let rhs = FreePoly::one().sub(&FreePoly::from_word(w.clone()));
    lhs == rhs
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EndoError {
    #[error("rank must be between 1 and {max}, got {rank}", max = MAX_RANK)]
    BadRank { rank: usize },
    #[error("image of generator {gen} uses letter outside rank {rank}")]
    ImageOutOfRange { gen: usize, rank: usize },
    #[error("endomorphism file: {0}")]
    Format(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A self-map of the free group of the given rank, defined on generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Self, EndoError> {
        if rank == 0 || rank > MAX_RANK {
            return Err(EndoError::BadRank { rank });
        }
        if images.len() != rank {
            return Err(EndoError::Format(format!(
                "expected {} generator images, got {}",
                rank,
                images.len()
            )));
        }
        for (k, w) in images.iter().enumerate() {
            if w.max_index() > rank {
                return Err(EndoError::ImageOutOfRange { gen: k + 1, rank });
            }
        }
        Ok(Endomorphism { rank, images })
    }

    pub fn identity(rank: usize) -> Self {
        Endomorphism::new(rank, (1..=rank).map(Word::generator).collect()).unwrap()
    }

    /// Parses the endomorphism file format: a `rank: n` line followed by one
    /// `a -> <word>` line per generator.
    pub fn parse(text: &str) -> Result<Self, EndoError> {
        let mut rank: Option<usize> = None;
        let mut images: Vec<Option<Word>> = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("rank:") {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| EndoError::Format(format!("bad rank line {:?}", line)))?;
                if n == 0 || n > MAX_RANK {
                    return Err(EndoError::BadRank { rank: n });
                }
                rank = Some(n);
                images = vec![None; n];
                continue;
            }
            let n = rank.ok_or_else(|| EndoError::Format("missing rank: line".into()))?;
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| EndoError::Format(format!("expected `a -> word`, got {:?}", line)))?;
            let gen = lhs.trim();
            if gen.len() != 1 || !gen.chars().next().unwrap().is_ascii_lowercase() {
                return Err(EndoError::Format(format!("bad generator name {:?}", gen)));
            }
            let idx = (gen.as_bytes()[0] - b'a') as usize;
            if idx >= n {
                return Err(EndoError::Format(format!("generator {:?} outside rank {}", gen, n)));
            }
            let w = Word::parse(rhs.trim(), n)?;
            images[idx] = Some(w);
        }
        let n = rank.ok_or_else(|| EndoError::Format("missing rank: line".into()))?;
        let mut out = Vec::with_capacity(n);
        for (i, img) in images.into_iter().enumerate() {
            out.push(img.ok_or_else(|| {
                EndoError::Format(format!("missing image for generator {}", letter_char((i + 1) as Letter)))
            })?);
        }
        Endomorphism::new(n, out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, k: usize) -> &Word {
        &self.images[k - 1]
    }

    /// Applies the endomorphism to a word.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                out = out.mul(img);
            } else {
                out = out.mul(&img.inverse());
            }
        }
        out
    }

    pub fn apply_power(&self, w: &Word, k: usize) -> Word {
        let mut out = w.clone();
        for _ in 0..k {
            out = self.apply(&out);
        }
        out
    }

    /// `self ∘ other` (first `other`, then `self`).
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        assert_eq!(self.rank, other.rank);
        Endomorphism {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    /// Postcomposes with conjugation: `u -> c g(u) c^-1`.
    pub fn postcompose_conjugation(&self, c: &Word) -> Endomorphism {
        Endomorphism {
            rank: self.rank,
            images: self.images.iter().map(|w| w.conjugate_by(c)).collect(),
        }
    }

    /// The abelianized matrix `M` with `M[i][j]` the exponent sum of generator
    /// j+1 in the image of generator i+1.
    pub fn abelianization_matrix(&self) -> Vec<Vec<i64>> {
        self.images.iter().map(|w| w.exponent_sums(self.rank)).collect()
    }

    pub fn display(&self) -> String {
        let mut s = format!("rank: {}\n", self.rank);
        for (i, w) in self.images.iter().enumerate() {
            s.push_str(&format!("{} -> {}\n", letter_char((i + 1) as Letter), w));
        }
        s
    }
}
