//! Multivariate Laurent polynomials over the integers, with exact division
//! and fraction-free determinants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("division leaves a nonzero remainder")]
    InexactDivision,
    #[error("division by zero")]
    DivisionByZero,
}

/// Exponent vector in `Z^rank`.
pub type Monomial = Vec<i64>;

/// A finitely supported map `Z^rank -> Z` with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> LaurentPoly {
        LaurentPoly { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> LaurentPoly {
        LaurentPoly::monomial(vec![0; rank], BigInt::one())
    }

    pub fn monomial(exponents: Monomial, coeff: BigInt) -> LaurentPoly {
        let rank = exponents.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponents, coeff);
        }
        LaurentPoly { rank, terms }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn support(&self) -> Vec<Monomial> {
        self.terms.keys().cloned().collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.len(), self.rank);
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
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

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            rank: self.rank,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.rank);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, &(c1 * c2));
            }
        }
        out
    }

    pub fn shift(&self, by: &[i64]) -> LaurentPoly {
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn exponent_box(&self) -> Option<(Monomial, Monomial)> {
        let mut lo: Option<Monomial> = None;
        let mut hi: Option<Monomial> = None;
        for m in self.terms.keys() {
            match (&mut lo, &mut hi) {
                (Some(l), Some(h)) => {
                    for i in 0..self.rank {
                        l[i] = l[i].min(m[i]);
                        h[i] = h[i].max(m[i]);
                    }
                }
                _ => {
                    lo = Some(m.clone());
                    hi = Some(m.clone());
                }
            }
        }
        lo.zip(hi)
    }

    /// Exact division: returns the quotient if `self = q * divisor` in the
    /// Laurent ring, else an error.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.rank));
        }
        // Newton-polytope bound on the quotient support.
        let (flo, fhi) = self.exponent_box().unwrap();
        let (dlo, dhi) = divisor.exponent_box().unwrap();
        let qlo: Monomial = flo.iter().zip(&dhi).map(|(a, b)| a - b).collect();
        let qhi: Monomial = fhi.iter().zip(&dlo).map(|(a, b)| a - b).collect();

        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero(self.rank);
        let (dm, dc) = divisor.leading().unwrap();
        let (dm, dc) = (dm.clone(), dc.clone());
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm: Monomial = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            if qm.iter().zip(&qlo).any(|(x, l)| x < l) || qm.iter().zip(&qhi).any(|(x, h)| x > h) {
                return Err(LaurentError::InexactDivision);
            }
            let (qc, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return Err(LaurentError::InexactDivision);
            }
            let term = LaurentPoly::monomial(qm, qc);
            rem = rem.sub(&term.mul(divisor));
            quot = quot.add(&term);
        }
        Ok(quot)
    }

    /// Normalizes up to `±monomial`: the lexicographically smallest support
    /// point is moved to the origin and its coefficient made positive.
    pub fn unit_normalize(&self) -> LaurentPoly {
        match self.terms.iter().next() {
            None => self.clone(),
            Some((m, c)) => {
                let shift: Monomial = m.iter().map(|x| -x).collect();
                let out = self.shift(&shift);
                if c.is_negative() {
                    out.neg()
                } else {
                    out
                }
            }
        }
    }

    /// Equality up to multiplication by `±monomial`.
    pub fn eq_up_to_unit(&self, other: &LaurentPoly) -> bool {
        self.unit_normalize() == other.unit_normalize()
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&default_names(self.rank)))
    }
}

fn default_names(rank: usize) -> Vec<String> {
    (0..rank).map(|i| format!("x{}", i + 1)).collect()
}

impl LaurentPoly {
    /// Human-readable sorted-monomial form with the given variable names.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mut mono = String::new();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                if e == 1 {
                    mono.push_str(&names[i]);
                } else {
                    mono.push_str(&format!("{}^{}", names[i], e));
                }
            }
            let sign = if c.is_negative() { " - " } else { " + " };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(sign);
            }
            let abs = c.abs();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", abs, mono));
            }
        }
        out
    }
}

/// Determinant by cofactor expansion along the first row (oracle for small sizes).
pub fn cofactor_det(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    let rank = if n == 0 { 0 } else { m[0][0].rank() };
    if n == 0 {
        return LaurentPoly::one(rank);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = LaurentPoly::zero(rank);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPoly>> = (1..n)
            .map(|i| (0..n).filter(|&c| c != j).map(|c| m[i][c].clone()).collect())
            .collect();
        let term = m[0][j].mul(&cofactor_det(&minor));
        if j % 2 == 0 {
            det = det.add(&term);
        } else {
            det = det.sub(&term);
        }
    }
    det
}

/// Fraction-free Bareiss determinant over the Laurent ring.
///
/// Every division performed is exact by the Sylvester identity; a failed
/// division signals a genuine bug, so it panics.
pub fn bareiss_det(matrix: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = matrix.len();
    let rank = if n == 0 { 0 } else { matrix[0][0].rank() };
    if n == 0 {
        return LaurentPoly::one(rank);
    }
    let mut m: Vec<Vec<LaurentPoly>> = matrix.to_vec();
    let mut sign = false;
    let mut prev = LaurentPoly::one(rank);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return LaurentPoly::zero(rank),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev).expect("Bareiss division must be exact");
            }
            m[i][k] = LaurentPoly::zero(rank);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_minus(rank: usize, c: i64) -> LaurentPoly {
        // 1 - c*T in variable `rank-1` (a convenience for tests)
        let mut p = LaurentPoly::one(rank);
        let mut m = vec![0i64; rank];
        m[rank - 1] = 1;
        p.add_term(m, &BigInt::from(-c));
        p
    }

    #[test]
    fn det_of_scaled_identity() {
        // (1-T) Id_2 has determinant (1-T)^2
        let rank = 1;
        let p = t_minus(rank, 1);
        let z = LaurentPoly::zero(rank);
        let m = vec![vec![p.clone(), z.clone()], vec![z, p.clone()]];
        let det = bareiss_det(&m);
        assert_eq!(det, p.mul(&p));
        assert_eq!(det, cofactor_det(&m));
    }

    #[test]
    fn exact_division_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut p = LaurentPoly::zero(2);
                for _ in 0..rng.gen_range(1..4) {
                    p.add_term(
                        vec![rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2)],
                        &BigInt::from(rng.gen_range(-3i64..=3)),
                    );
                }
                p
            };
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            if b.is_zero() {
                continue;
            }
            let prod = a.mul(&b);
            let q = prod.exact_div(&b).unwrap();
            assert_eq!(q, a);
        }
    }

    #[test]
    fn inexact_division_detected() {
        let mut a = LaurentPoly::one(1);
        a.add_term(vec![1], &BigInt::from(1)); // 1 + T
        let mut b = LaurentPoly::one(1);
        b.add_term(vec![1], &BigInt::from(-1)); // 1 - T
        assert_eq!(a.exact_div(&b), Err(LaurentError::InexactDivision));
        let two = LaurentPoly::monomial(vec![0], BigInt::from(2));
        assert_eq!(a.exact_div(&two), Err(LaurentError::InexactDivision));
    }

    #[test]
    fn bareiss_matches_cofactor_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let n = 3;
            let m: Vec<Vec<LaurentPoly>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let mut p = LaurentPoly::zero(2);
                            for _ in 0..rng.gen_range(0..3) {
                                p.add_term(
                                    vec![rng.gen_range(-1i64..=1), rng.gen_range(-1i64..=1)],
                                    &BigInt::from(rng.gen_range(-2i64..=2)),
                                );
                            }
                            p
                        })
                        .collect()
                })
                .collect();
            assert_eq!(bareiss_det(&m), cofactor_det(&m));
        }
    }

    #[test]
    fn unit_normalization() {
        let mut p = LaurentPoly::zero(1);
        p.add_term(vec![2], &BigInt::from(-1));
        p.add_term(vec![1], &BigInt::from(-1));
        let n = p.unit_normalize();
        assert_eq!(n.coeff(&vec![0]), BigInt::from(1));
        assert_eq!(n.coeff(&vec![1]), BigInt::from(1));
        assert!(p.eq_up_to_unit(&n));
    }
}
