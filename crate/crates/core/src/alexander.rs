//! The commutative layer: Alexander polynomial, polytope, and seminorm,
//! computed through the abelianized matrix `p_0(A(g; S, s))`.

use crate::group_ring::{build_a, SIndex};
use crate::hnn::{Character, GroupContext};
use crate::laurent::{bareiss_det, LaurentError, LaurentPoly};
use crate::polytopes::{IntPolytope, VirtualPolytope};
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlexanderError {
    #[error("removed generator has trivial image in H_1(G)_f")]
    DegenerateRemoval,
    #[error("determinant is not divisible by (p_0(s) - 1); orientation or implementation bug")]
    InexactDivision(#[from] LaurentError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum B1Case {
    One,
    AtLeastTwo,
}

#[derive(Clone, Debug)]
pub struct AlexanderResult {
    /// The Alexander polynomial, normalized up to `±monomial`.
    pub delta: LaurentPoly,
    /// Its Newton polytope as a virtual polytope (genuine by construction).
    pub polytope: VirtualPolytope,
    pub b1_case: B1Case,
    pub removed: SIndex,
    /// The raw determinant of `p_0(A(g; S, s))` before division.
    pub determinant: LaurentPoly,
}

/// Commutative determinant of `p_0(A(g; S, s))`.
pub fn abelianized_determinant(ctx: &GroupContext, s: SIndex) -> LaurentPoly {
    let matrix = build_a(ctx, s);
    let projected: Vec<Vec<LaurentPoly>> = matrix
        .iter()
        .map(|row| row.iter().map(|e| e.project_p0(ctx.ab())).collect())
        .collect();
    bareiss_det(&projected)
}

/// Alexander polynomial for a chosen removed column `s` with `p_0(s) != 0`.
pub fn alexander_polynomial_with(
    ctx: &GroupContext,
    s: SIndex,
) -> Result<AlexanderResult, AlexanderError> {
    let ab = ctx.ab();
    let b1 = ab.rank;
    let det = abelianized_determinant(ctx, s);
    let delta = if b1 >= 2 {
        let ps = s.projected(ab);
        if ps.iter().all(|&x| x == 0) {
            return Err(AlexanderError::DegenerateRemoval);
        }
        let divisor =
            LaurentPoly::monomial(ps, num_bigint::BigInt::from(1)).sub(&LaurentPoly::one(b1));
        det.exact_div(&divisor)?
    } else {
        det.clone()
    };
    let delta = delta.unit_normalize();
    let polytope = newton_polytope(&delta, b1);
    Ok(AlexanderResult {
        delta,
        polytope,
        b1_case: if b1 >= 2 { B1Case::AtLeastTwo } else { B1Case::One },
        removed: s,
        determinant: det,
    })
}

/// Alexander polynomial with the default removal `s = t` (always valid since
/// `p_0(t)` generates the stable-letter coordinate).
pub fn alexander_polynomial(ctx: &GroupContext) -> Result<AlexanderResult, AlexanderError> {
    alexander_polynomial_with(ctx, SIndex::T)
}

/// Newton polytope of a Laurent polynomial as a virtual polytope.
pub fn newton_polytope(p: &LaurentPoly, rank: usize) -> VirtualPolytope {
    if p.is_zero() {
        return VirtualPolytope::zero(rank);
    }
    VirtualPolytope::from_polytope(IntPolytope::from_points(rank, &p.support()))
}

/// The Alexander norm `delta_0(phi)`: seminorm of the Alexander polytope.
pub fn alexander_norm(res: &AlexanderResult, phi: &Character) -> BigRational {
    res.polytope.seminorm_eval(&phi.coords)
}
