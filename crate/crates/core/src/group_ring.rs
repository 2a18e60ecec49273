//! Finitely supported elements of the integral group ring of the HNN
//! extension, Fox matrices, and the square matrices `A(g; S, s)`.

use crate::hnn::{AbelianizationData, GroupContext, HnnElement};
use crate::laurent::LaurentPoly;
use crate::words::{fox_derivative, FreePoly, Word};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// An element of `ZG` with support in normal form and no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<HnnElement, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> GroupRingElement {
        GroupRingElement::default()
    }

    pub fn one() -> GroupRingElement {
        GroupRingElement::from_element(HnnElement::one())
    }

    pub fn from_element(x: HnnElement) -> GroupRingElement {
        GroupRingElement::from_term(x, BigInt::one())
    }

    pub fn from_term(x: HnnElement, c: BigInt) -> GroupRingElement {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(x, c);
        }
        GroupRingElement { terms }
    }

    pub fn from_word(w: Word) -> GroupRingElement {
        GroupRingElement::from_element(HnnElement::from_word(w))
    }

    /// Embeds an element of the free group ring.
    pub fn from_free(p: &FreePoly) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (w, c) in p.terms() {
            out.add_term(HnnElement::from_word(w.clone()), c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HnnElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &HnnElement> {
        self.terms.keys()
    }

    pub fn coeff(&self, x: &HnnElement) -> BigInt {
        self.terms.get(x).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, x: HnnElement, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(x) {
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

    pub fn add(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> GroupRingElement {
        GroupRingElement { terms: self.terms.iter().map(|(x, c)| (x.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &GroupRingElement) -> GroupRingElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> GroupRingElement {
        if c.is_zero() {
            return GroupRingElement::zero();
        }
        GroupRingElement { terms: self.terms.iter().map(|(x, k)| (x.clone(), k * c)).collect() }
    }

    pub fn mul(&self, ctx: &GroupContext, other: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                out.add_term(HnnElement::multiply(ctx, x, y), &(cx * cy));
            }
        }
        out
    }

    pub fn mul_element_left(&self, ctx: &GroupContext, x: &HnnElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (y, c) in &self.terms {
            out.add_term(HnnElement::multiply(ctx, x, y), c);
        }
        out
    }

    /// `p_0`: ring homomorphism onto the Laurent ring of `H_1(G)_f`.
    pub fn project_p0(&self, ab: &AbelianizationData) -> LaurentPoly {
        let mut out = LaurentPoly::zero(ab.rank);
        for (x, c) in &self.terms {
            out.add_term(ab.project_element(x), c);
        }
        out
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::Signed;
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (x, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let abs = c.abs();
            if x.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "({})", x)?;
            } else {
                write!(f, "{}*({})", abs, x)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// The Fox matrix `F(g)` with entries `d g(s_i) / d s_j` in the free group ring.
#[derive(Clone, Debug)]
pub struct FoxMatrix {
    pub entries: Vec<Vec<FreePoly>>,
}

pub fn fox_matrix(g: &crate::words::Endomorphism) -> FoxMatrix {
    let n = g.rank();
    let entries = (1..=n)
        .map(|i| (1..=n).map(|j| fox_derivative(g.image(i), j)).collect())
        .collect();
    FoxMatrix { entries }
}

/// Which column of `A(g; S)` to remove: a generator or the stable letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SIndex {
    Gen(usize),
    T,
}

impl SIndex {
    /// `p_0(s)` of the removed generator.
    pub fn projected(&self, ab: &AbelianizationData) -> Vec<i64> {
        match self {
            SIndex::Gen(k) => ab.gen_image(*k).to_vec(),
            SIndex::T => ab.t_image(),
        }
    }

    pub fn element(&self) -> HnnElement {
        match self {
            SIndex::Gen(k) => HnnElement::from_word(Word::generator(*k)),
            SIndex::T => HnnElement::t_power(1),
        }
    }
}

/// The `n x (n+1)` matrix `A(g; S) = [Id - t F(g) | (s_i - 1)]` over `ZG`.
pub fn build_full_a(ctx: &GroupContext) -> Vec<Vec<GroupRingElement>> {
    let n = ctx.rank();
    let fox = fox_matrix(ctx.endo());
    let t = HnnElement::t_power(1);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n + 1);
        for j in 0..n {
            let mut entry = GroupRingElement::zero();
            if i == j {
                entry = GroupRingElement::one();
            }
            let tfox =
                GroupRingElement::from_free(&fox.entries[i][j]).mul_element_left(ctx, &t);
            row.push(entry.sub(&tfox));
        }
        let si = GroupRingElement::from_word(Word::generator(i + 1));
        row.push(si.sub(&GroupRingElement::one()));
        rows.push(row);
    }
    rows
}

/// The square matrix `A(g; S, s)`: the full matrix with the `s`-column removed.
pub fn build_a(ctx: &GroupContext, s: SIndex) -> Vec<Vec<GroupRingElement>> {
    let n = ctx.rank();
    let full = build_full_a(ctx);
    let removed = match s {
        SIndex::Gen(k) => {
            assert!(k >= 1 && k <= n, "removed generator out of range");
            k - 1
        }
        SIndex::T => n,
    };
    full.into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .filter(|(j, _)| *j != removed)
                .map(|(_, e)| e)
                .collect()
        })
        .collect()
}
