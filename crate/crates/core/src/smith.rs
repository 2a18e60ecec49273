//! Smith normal form of integer matrices, tracking the column transform.
//!
//! `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with the
//! divisibility chain `d_1 | d_2 | ...`. Only `V` is needed downstream (it
//! carries the basis change of the generator lattice), but `U` is kept for
//! testing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub diag: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| &a[i][l] * &b[l][j]).sum::<BigInt>())
                .collect()
        })
        .collect()
}

/// Computes the Smith normal form of a (square or rectangular) matrix.
pub fn smith_normal_form(a: &[Vec<BigInt>]) -> SmithNormalForm {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut k = 0usize;
    while k < rows.min(cols) {
        // Pivot: smallest nonzero |entry| in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !m[i][j].is_zero() {
                    let better = match &pivot {
                        None => true,
                        Some((pi, pj)) => m[i][j].abs() < m[*pi][*pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(k, pi);
        u.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        for row in v.iter_mut() {
            row.swap(k, pj);
        }

        let mut clean = true;
        for i in k + 1..rows {
            if !m[i][k].is_zero() {
                let q = m[i][k].div_floor(&m[k][k]);
                for j in 0..cols {
                    let t = &m[k][j] * &q;
                    m[i][j] -= t;
                }
                for j in 0..rows {
                    let t = &u[k][j] * &q;
                    u[i][j] -= t;
                }
                if !m[i][k].is_zero() {
                    clean = false;
                }
            }
        }
        for j in k + 1..cols {
            if !m[k][j].is_zero() {
                let q = m[k][j].div_floor(&m[k][k]);
                for i in 0..rows {
                    let t = &m[i][k] * &q;
                    m[i][j] -= t;
                }
                for i in 0..cols {
                    let t = &v[i][k] * &q;
                    v[i][j] -= t;
                }
                if !m[k][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // smaller remainders appeared; re-pivot this corner
        }
        // Divisibility fix: fold any non-multiple into the pivot's column.
        let mut fixed = true;
        'outer: for i in k + 1..rows {
            for j in k + 1..cols {
                if !(&m[i][j] % &m[k][k]).is_zero() {
                    for col in 0..cols {
                        let t = m[i][col].clone();
                        m[k][col] += t;
                    }
                    for col in 0..rows {
                        let t = u[i][col].clone();
                        u[k][col] += t;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            if m[k][k].is_negative() {
                for j in 0..cols {
                    m[k][j] = -m[k][j].clone();
                }
                for j in 0..rows {
                    u[k][j] = -u[k][j].clone();
                }
            }
            k += 1;
        }
    }

    let diag = (0..rows.min(cols)).map(|i| m[i][i].clone()).collect();
    SmithNormalForm { diag, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(a: &[Vec<BigInt>]) -> SmithNormalForm {
        let snf = smith_normal_form(a);
        // U A V must be diagonal with the recorded diagonal.
        let uav = mat_mul(&mat_mul(&snf.u, a), &snf.v);
        for (i, row) in uav.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j && i < snf.diag.len() {
                    assert_eq!(x, &snf.diag[i]);
                } else {
                    assert!(x.is_zero(), "UAV not diagonal at ({}, {})", i, j);
                }
            }
        }
        for w in snf.diag.windows(2) {
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
            } else {
                assert!(w[1].is_zero());
            }
        }
        snf
    }

    #[test]
    fn permutation_difference() {
        // I - M for the 3-cycle permutation has diag (1, 1, 0).
        let a = big(&[&[1, -1, 0], &[0, 1, -1], &[-1, 0, 1]]);
        let snf = check(&a);
        assert_eq!(snf.diag, vec![BigInt::from(1), BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn torsion_entry() {
        let a = big(&[&[2]]);
        let snf = check(&a);
        assert_eq!(snf.diag, vec![BigInt::from(2)]);
    }

    #[test]
    fn random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.gen_range(1..5usize);
            let m = rng.gen_range(1..5usize);
            let a: Vec<Vec<BigInt>> = (0..n)
                .map(|_| (0..m).map(|_| BigInt::from(rng.gen_range(-6i64..=6))).collect())
                .collect();
            check(&a);
        }
    }
}
