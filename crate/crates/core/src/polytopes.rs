//! Exact lattice-polytope algebra: integral polytopes under Minkowski sum,
//! virtual (formal difference) polytopes modulo translation, face maps,
//! seminorms, and reconstruction from support-function oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// A lattice point of `Z^rank`.
pub type Point = Vec<i64>;

fn ratio(x: i64) -> BigRational {
    BigRational::from(BigInt::from(x))
}

fn point_add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn point_sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(mut v: Vec<i64>) -> Vec<i64> {
    let mut g: i64 = 0;
    for &x in &v {
        g = num_integer::gcd(g, x.abs());
    }
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
    v
}

/// Rank (over Q) of a set of integer vectors.
fn rank_of(rows: &[Point]) -> usize {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut work: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&x| ratio(x)).collect()).collect();
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(pr) = (rank..work.len()).find(|&i| !work[i][c].is_zero()) else { continue };
        work.swap(rank, pr);
        let inv = work[rank][c].recip();
        for x in work[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..work.len() {
            if i != rank && !work[i][c].is_zero() {
                let f = work[i][c].clone();
                for j in 0..cols {
                    let t = &work[rank][j] * &f;
                    work[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Greedy independent subset of integer vectors (basis of their span).
fn independent_subset(vectors: &[Point]) -> Vec<Point> {
    let mut basis: Vec<Point> = Vec::new();
    for v in vectors {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(v.clone());
        if rank_of(&trial) == trial.len() {
            basis = trial;
        }
    }
    basis
}

/// Affine dimension of a point set and an integer basis of its direction space.
fn affine_dim(points: &[Point]) -> (usize, Vec<Point>) {
    if points.len() <= 1 {
        return (0, vec![]);
    }
    let base = &points[0];
    let diffs: Vec<Point> = points[1..].iter().map(|p| point_sub(p, base)).collect();
    let basis = independent_subset(&diffs);
    (basis.len(), basis)
}

/// Coordinate positions whose selection is injective on the span of `basis`.
fn coordinate_selection(basis: &[Point], dim: usize) -> Option<Vec<usize>> {
    let cols = basis.first()?.len();
    let mut chosen: Vec<usize> = Vec::new();
    let mut work: Vec<Vec<BigRational>> =
        basis.iter().map(|r| r.iter().map(|&x| ratio(x)).collect()).collect();
    let mut rank = 0usize;
    for c in 0..cols {
        if rank == dim {
            break;
        }
        let Some(pr) = (rank..work.len()).find(|&i| !work[i][c].is_zero()) else { continue };
        work.swap(rank, pr);
        let inv = work[rank][c].recip();
        for x in work[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..work.len() {
            if i != rank && !work[i][c].is_zero() {
                let f = work[i][c].clone();
                for j in 0..cols {
                    let t = &work[rank][j] * &f;
                    work[i][j] -= t;
                }
            }
        }
        chosen.push(c);
        rank += 1;
    }
    if rank == dim {
        Some(chosen)
    } else {
        None
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 as i128 - o.0 as i128) * (b.1 as i128 - o.1 as i128)
        - (a.1 as i128 - o.1 as i128) * (b.0 as i128 - o.0 as i128)
}

/// Counterclockwise convex hull cycle of 2D points, collinear points dropped.
fn hull_cycle_2d(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 1 && pts.len() >= 2 {
        // fully collinear sets are handled before reaching here
        return pts;
    }
    lower
}

/// Exact feasibility test `p in conv(others)` by phase-1 simplex over Q.
fn in_convex_hull(p: &Point, others: &[Point]) -> bool {
    let m = others.len();
    if m == 0 {
        return false;
    }
    let d = p.len();
    let rows = d + 1;
    // [A | b] with b >= 0, then identity artificial block.
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = (0..m)
                .map(|j| if r < d { ratio(others[j][r]) } else { BigRational::one() })
                .collect();
            row.push(if r < d { ratio(p[r]) } else { BigRational::one() });
            row
        })
        .collect();
    for row in a.iter_mut() {
        if row[m].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let cols = m + rows + 1;
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols]; rows];
    for r in 0..rows {
        for j in 0..m {
            t[r][j] = a[r][j].clone();
        }
        t[r][m + r] = BigRational::one();
        t[r][cols - 1] = a[r][m].clone();
    }
    let mut basis: Vec<usize> = (m..m + rows).collect();
    let cost = |j: usize| -> BigRational {
        if j >= m && j < m + rows {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    };
    loop {
        // Reduced costs under the current basis (minimizing sum of artificials).
        let mut entering: Option<usize> = None;
        for j in 0..cols - 1 {
            if basis.contains(&j) {
                continue;
            }
            let z: BigRational = (0..rows).map(|r| cost(basis[r]) * &t[r][j]).sum();
            if cost(j) - z < BigRational::zero() {
                entering = Some(j);
                break; // Bland's rule
            }
        }
        let Some(j) = entering else { break };
        let mut leaving: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for r in 0..rows {
            if t[r][j] > BigRational::zero() {
                let ratio_val = &t[r][cols - 1] / &t[r][j];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio_val < *b || (ratio_val == *b && basis[r] < basis[leaving.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio_val);
                    leaving = Some(r);
                }
            }
        }
        let Some(r) = leaving else { return false }; // unbounded: cannot happen
        let pivot = t[r][j].clone();
        for x in t[r].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..rows {
            if i != r && !t[i][j].is_zero() {
                let f = t[i][j].clone();
                for c in 0..cols {
                    let s = &t[r][c] * &f;
                    t[i][c] -= s;
                }
            }
        }
        basis[r] = j;
    }
    let objective: BigRational = (0..rows).map(|r| cost(basis[r]) * &t[r][cols - 1]).sum();
    objective.is_zero()
}

/// Canonical vertex set of the convex hull of a point set.
pub fn extreme_points(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 1 {
        return pts;
    }
    let (dim, dirs) = affine_dim(&pts);
    match dim {
        0 => vec![pts[0].clone()],
        1 => {
            let d = primitive(dirs[0].clone());
            let lo = pts.iter().min_by_key(|p| dot(&d, p)).unwrap().clone();
            let hi = pts.iter().max_by_key(|p| dot(&d, p)).unwrap().clone();
            let mut out = vec![lo, hi];
            out.sort();
            out.dedup();
            out
        }
        2 => {
            let basis = independent_subset(&dirs);
            let sel = coordinate_selection(&basis, 2).expect("rank-2 span has a coordinate chart");
            let proj: Vec<(i64, i64)> = pts.iter().map(|p| (p[sel[0]], p[sel[1]])).collect();
            let cyc = hull_cycle_2d(&proj);
            let keep: BTreeSet<(i64, i64)> = cyc.into_iter().collect();
            let mut out: Vec<Point> = pts
                .iter()
                .filter(|p| keep.contains(&(p[sel[0]], p[sel[1]])))
                .cloned()
                .collect();
            out.sort();
            out
        }
        _ => {
            let mut out = Vec::new();
            for (i, p) in pts.iter().enumerate() {
                let others: Vec<Point> = pts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| q.clone())
                    .collect();
                if !in_convex_hull(p, &others) {
                    out.push(p.clone());
                }
            }
            out
        }
    }
}

/// An integral polytope stored as the canonical (sorted) vertex set of its hull.
#[derive(Clone, PartialEq, Eq)]
pub struct IntPolytope {
    rank: usize,
    vertices: Vec<Point>,
}

impl IntPolytope {
    pub fn from_points(rank: usize, points: &[Point]) -> IntPolytope {
        assert!(!points.is_empty(), "polytope needs a nonempty point set");
        for p in points {
            assert_eq!(p.len(), rank);
        }
        IntPolytope { rank, vertices: extreme_points(points) }
    }

    pub fn origin(rank: usize) -> IntPolytope {
        IntPolytope::from_points(rank, &[vec![0; rank]])
    }

    pub fn point(p: Point) -> IntPolytope {
        let rank = p.len();
        IntPolytope { rank, vertices: vec![p] }
    }

    pub fn segment(a: Point, b: Point) -> IntPolytope {
        let rank = a.len();
        IntPolytope::from_points(rank, &[a, b])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn dim(&self) -> usize {
        affine_dim(&self.vertices).0
    }

    pub fn translate(&self, by: &[i64]) -> IntPolytope {
        IntPolytope {
            rank: self.rank,
            vertices: self.vertices.iter().map(|v| point_add(v, by)).collect(),
        }
    }

    /// Translation with the lexicographically smallest vertex at the origin.
    pub fn normalize_translation(&self) -> IntPolytope {
        let lexmin = self.vertices.first().unwrap().clone();
        self.translate(&lexmin.iter().map(|x| -x).collect::<Vec<_>>())
    }

    pub fn minkowski_sum(&self, other: &IntPolytope) -> IntPolytope {
        assert_eq!(self.rank, other.rank, "rank mismatch in Minkowski sum");
        let mut sums = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                sums.push(point_add(a, b));
            }
        }
        IntPolytope::from_points(self.rank, &sums)
    }

    pub fn min_level(&self, dir: &[i64]) -> i64 {
        self.vertices.iter().map(|v| dot(dir, v)).min().unwrap()
    }

    pub fn max_level(&self, dir: &[i64]) -> i64 {
        self.vertices.iter().map(|v| dot(dir, v)).max().unwrap()
    }

    fn value(&self, phi: &[BigRational], v: &[i64]) -> BigRational {
        phi.iter().zip(v).map(|(c, &x)| c * ratio(x)).sum()
    }

    /// The minimal face `F_phi`: vertices attaining the minimum of `phi`.
    pub fn face_min(&self, phi: &[BigRational]) -> IntPolytope {
        let values: Vec<BigRational> =
            self.vertices.iter().map(|v| self.value(phi, v)).collect();
        let min = values.iter().min().unwrap().clone();
        let verts: Vec<Point> = self
            .vertices
            .iter()
            .zip(&values)
            .filter(|(_, val)| **val == min)
            .map(|(v, _)| v.clone())
            .collect();
        IntPolytope { rank: self.rank, vertices: verts }
    }

    /// Width `max phi - min phi` over the polytope.
    pub fn width(&self, phi: &[BigRational]) -> BigRational {
        let values: Vec<BigRational> =
            self.vertices.iter().map(|v| self.value(phi, v)).collect();
        values.iter().max().unwrap() - values.iter().min().unwrap()
    }
}

impl fmt::Debug for IntPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polytope{:?}", self.vertices)
    }
}

/// A formal difference `plus - minus` of integral polytopes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VirtualPolytope {
    pub plus: IntPolytope,
    pub minus: IntPolytope,
}

impl VirtualPolytope {
    pub fn from_polytope(p: IntPolytope) -> VirtualPolytope {
        let rank = p.rank();
        VirtualPolytope { plus: p, minus: IntPolytope::origin(rank) }
    }

    pub fn zero(rank: usize) -> VirtualPolytope {
        VirtualPolytope { plus: IntPolytope::origin(rank), minus: IntPolytope::origin(rank) }
    }

    pub fn rank(&self) -> usize {
        self.plus.rank()
    }

    pub fn add(&self, other: &VirtualPolytope) -> VirtualPolytope {
        VirtualPolytope {
            plus: self.plus.minkowski_sum(&other.plus),
            minus: self.minus.minkowski_sum(&other.minus),
        }
    }

    pub fn neg(&self) -> VirtualPolytope {
        VirtualPolytope { plus: self.minus.clone(), minus: self.plus.clone() }
    }

    pub fn sub(&self, other: &VirtualPolytope) -> VirtualPolytope {
        self.add(&other.neg())
    }

    /// Equality in `Pol_T(H)`: `plus + other.minus = other.plus + minus` up to
    /// translation.
    pub fn polt_equal(&self, other: &VirtualPolytope) -> bool {
        let lhs = self.plus.minkowski_sum(&other.minus).normalize_translation();
        let rhs = other.plus.minkowski_sum(&self.minus).normalize_translation();
        lhs == rhs
    }

    /// Whether the class is a single polytope (the minus part is a point).
    pub fn is_single(&self) -> bool {
        self.minus.is_point()
    }

    /// When `is_single`, the translated representative polytope.
    pub fn single(&self) -> Option<IntPolytope> {
        if self.is_single() {
            let shift: Vec<i64> = self.minus.vertices()[0].iter().map(|x| -x).collect();
            Some(self.plus.translate(&shift))
        } else {
            None
        }
    }

    /// `F_phi(plus) - F_phi(minus)`: zero in `Pol_T` iff both faces are points.
    pub fn face_min(&self, phi: &[BigRational]) -> VirtualPolytope {
        VirtualPolytope { plus: self.plus.face_min(phi), minus: self.minus.face_min(phi) }
    }

    pub fn face_is_zero(&self, phi: &[BigRational]) -> bool {
        let f = self.face_min(phi);
        f.plus.is_point() && f.minus.is_point()
    }

    /// The seminorm difference `|phi|_plus - |phi|_minus`.
    pub fn seminorm_eval(&self, phi: &[BigRational]) -> BigRational {
        self.plus.width(phi) - self.minus.width(phi)
    }

    pub fn to_json(&self, basis: &[String]) -> serde_json::Value {
        serde_json::json!({
            "basis": basis,
            "plus": self.plus.vertices(),
            "minus": self.minus.vertices(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<VirtualPolytope> {
        let to_points = |val: &serde_json::Value| -> Option<Vec<Point>> {
            val.as_array()?
                .iter()
                .map(|p| p.as_array()?.iter().map(|x| x.as_i64()).collect::<Option<Point>>())
                .collect()
        };
        let plus = to_points(&v["plus"])?;
        let minus = to_points(&v["minus"])?;
        let rank = plus.first()?.len();
        Some(VirtualPolytope {
            plus: IntPolytope::from_points(rank, &plus),
            minus: IntPolytope::from_points(rank, &minus),
        })
    }
}

/// One support-function query: the minimum level of the target in a direction
/// plus lattice witnesses attaining it. `level: None` means undetermined.
#[derive(Clone, Debug)]
pub struct SupportQuery {
    pub level: Option<i64>,
    pub witnesses: Vec<Point>,
}

/// Result of reconstructing a polytope from support data.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub polytope: Option<IntPolytope>,
    pub verified: bool,
    /// Directions where the oracle could not be matched (empty when verified).
    pub failures: Vec<Point>,
}

/// Reconstructs an integral polytope from a min-support oracle.
///
/// Exact for affine dimension <= 2, best-effort certified for dimension 3.
/// The result is `verified` only if every facet-normal query and every fresh
/// check direction agrees exactly with the candidate hull.
pub fn reconstruct_from_support<F>(
    rank: usize,
    mut oracle: F,
    check_dirs: usize,
    seed: u64,
) -> Reconstruction
where
    F: FnMut(&[i64]) -> SupportQuery,
{
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut witnesses: BTreeSet<Point> = BTreeSet::new();
    let mut failures: Vec<Point> = Vec::new();

    let mut probe_dirs: Vec<Point> = Vec::new();
    for i in 0..rank {
        let mut e = vec![0i64; rank];
        e[i] = 1;
        probe_dirs.push(e.clone());
        e[i] = -1;
        probe_dirs.push(e);
    }
    for _ in 0..4 * rank {
        let d: Point = (0..rank).map(|_| rng.gen_range(-3i64..=3)).collect();
        if d.iter().any(|&x| x != 0) {
            probe_dirs.push(primitive(d));
        }
    }
    for d in &probe_dirs {
        let q = oracle(d);
        if q.level.is_none() {
            failures.push(d.clone());
        }
        witnesses.extend(q.witnesses);
    }
    if witnesses.is_empty() {
        return Reconstruction { polytope: None, verified: false, failures: probe_dirs };
    }

    // Refine until every supporting direction of the candidate hull matches.
    for _round in 0..64 {
        let pts: Vec<Point> = witnesses.iter().cloned().collect();
        let hull = IntPolytope::from_points(rank, &pts);
        let mut normals: Vec<Point> = Vec::new();
        let (dim, dirs) = affine_dim(hull.vertices());
        match dim {
            0 => {
                // point: probed directions suffice; nothing to refine
            }
            1 => {
                let d = primitive(dirs[0].clone());
                normals.push(d.clone());
                normals.push(d.iter().map(|x| -x).collect());
            }
            2 => {
                let basis = independent_subset(&dirs);
                if let Some(sel) = coordinate_selection(&basis, 2) {
                    let proj: Vec<(i64, i64)> =
                        hull.vertices().iter().map(|p| (p[sel[0]], p[sel[1]])).collect();
                    let cyc = hull_cycle_2d(&proj);
                    let m = cyc.len();
                    for k in 0..m {
                        let v1 = cyc[k];
                        let v2 = cyc[(k + 1) % m];
                        let e = (v2.0 - v1.0, v2.1 - v1.1);
                        // inward normal of a CCW edge, lifted through the chart
                        let eta2 = (-e.1, e.0);
                        let mut eta = vec![0i64; rank];
                        eta[sel[0]] = eta2.0;
                        eta[sel[1]] = eta2.1;
                        normals.push(primitive(eta));
                    }
                }
            }
            3 => {
                let verts = hull.vertices();
                for i in 0..verts.len() {
                    for j in i + 1..verts.len() {
                        for k in j + 1..verts.len() {
                            if let Some(n) = facet_normal(verts, i, j, k, &dirs) {
                                normals.push(n);
                            }
                        }
                    }
                }
                normals.sort();
                normals.dedup();
            }
            _ => {
                return Reconstruction { polytope: Some(hull), verified: false, failures };
            }
        }
        // Off-span probes catch polytopes thicker than the current span.
        for _ in 0..rank {
            let d: Point = (0..rank).map(|_| rng.gen_range(-3i64..=3)).collect();
            if d.iter().any(|&x| x != 0) {
                normals.push(primitive(d));
            }
        }

        let mut grew = false;
        for eta in &normals {
            let expected = hull.min_level(eta);
            let q = oracle(eta);
            match q.level {
                Some(lvl) if lvl < expected => {
                    let before = witnesses.len();
                    witnesses.extend(q.witnesses);
                    if witnesses.len() == before {
                        failures.push(eta.clone());
                    } else {
                        grew = true;
                    }
                }
                Some(lvl) if lvl > expected => {
                    failures.push(eta.clone());
                }
                Some(_) => {}
                None => failures.push(eta.clone()),
            }
        }
        if !grew {
            let polytope = hull;
            // Fresh random verification directions.
            let mut ok = failures.is_empty();
            for _ in 0..check_dirs {
                let d: Point = (0..rank).map(|_| rng.gen_range(-5i64..=5)).collect();
                if d.iter().all(|&x| x == 0) {
                    continue;
                }
                let d = primitive(d);
                let q = oracle(&d);
                match q.level {
                    Some(lvl) if lvl == polytope.min_level(&d) => {}
                    _ => {
                        ok = false;
                        failures.push(d);
                    }
                }
            }
            return Reconstruction { polytope: Some(polytope), verified: ok, failures };
        }
    }
    Reconstruction { polytope: None, verified: false, failures }
}

/// Exact witness-free reconstruction in the plane: queries the full primitive
/// normal fan up to the bounding-box bound (which contains every edge normal
/// of a lattice polygon inside the box), takes the lattice points satisfying
/// all support constraints, and verifies every constraint against the hull.
///
/// Returns `None` when a needed level is undetermined, the box exceeds
/// `max_extent`, or some constraint is not met exactly (a virtual class).
pub fn reconstruct_from_levels_2d<F>(mut level_oracle: F, max_extent: i64) -> Option<IntPolytope>
where
    F: FnMut(&[i64]) -> Option<i64>,
{
    let min_x = level_oracle(&[1, 0])?;
    let max_x = -level_oracle(&[-1, 0])?;
    let min_y = level_oracle(&[0, 1])?;
    let max_y = -level_oracle(&[0, -1])?;
    if max_x < min_x || max_y < min_y {
        return None;
    }
    let bound = (max_x - min_x).max(max_y - min_y) + 1;
    if bound > max_extent {
        return None;
    }
    let mut constraints: Vec<(Point, i64)> = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            if (a, b) == (0, 0) || num_integer::gcd(a.abs(), b.abs()) != 1 {
                continue;
            }
            let m = level_oracle(&[a, b])?;
            constraints.push((vec![a, b], m));
        }
    }
    let mut pts: Vec<Point> = Vec::new();
    for x in min_x..=max_x {
        for y in min_y..=max_y {
            if constraints.iter().all(|(n, m)| n[0] * x + n[1] * y >= *m) {
                pts.push(vec![x, y]);
            }
        }
    }
    if pts.is_empty() {
        return None;
    }
    let hull = IntPolytope::from_points(2, &pts);
    for (n, m) in &constraints {
        if hull.min_level(n) != *m {
            return None;
        }
    }
    Some(hull)
}

/// Normal of a supporting plane through three vertices, pointing inward
/// (all vertices on the non-negative side), if the plane is supporting.
fn facet_normal(verts: &[Point], i: usize, j: usize, k: usize, span: &[Point]) -> Option<Point> {
    let u = point_sub(&verts[j], &verts[i]);
    let v = point_sub(&verts[k], &verts[i]);
    // Work in a 3D coordinate chart of the span.
    let basis = independent_subset(span);
    let sel = coordinate_selection(&basis, 3)?;
    let u3 = [u[sel[0]], u[sel[1]], u[sel[2]]];
    let v3 = [v[sel[0]], v[sel[1]], v[sel[2]]];
    let n3 = [
        u3[1] * v3[2] - u3[2] * v3[1],
        u3[2] * v3[0] - u3[0] * v3[2],
        u3[0] * v3[1] - u3[1] * v3[0],
    ];
    if n3 == [0, 0, 0] {
        return None;
    }
    let mut eta = vec![0i64; verts[0].len()];
    eta[sel[0]] = n3[0];
    eta[sel[1]] = n3[1];
    eta[sel[2]] = n3[2];
    let base = dot(&eta, &verts[i]);
    let mut has_pos = false;
    let mut has_neg = false;
    for w in verts {
        let d = dot(&eta, w) - base;
        if d > 0 {
            has_pos = true;
        }
        if d < 0 {
            has_neg = true;
        }
    }
    match (has_pos, has_neg) {
        (true, false) | (false, false) => Some(primitive(eta)),
        (false, true) => Some(primitive(eta.iter().map(|x| -x).collect())),
        (true, true) => None,
    }
}
