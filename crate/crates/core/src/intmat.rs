//! Integer matrices: Smith normal form with transforms, determinants, kernels, 2x2 helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type IMat = Vec<Vec<i64>>;
pub type M2 = [[i64; 2]; 2];

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn mul(a: &IMat, b: &IMat) -> IMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
        .collect()
}

pub fn transpose(a: &IMat) -> IMat {
    let n = a.first().map_or(0, |r| r.len());
    (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_vec(a: &IMat, v: &[i64]) -> Vec<i64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Smith normal form: returns (u, d, v) with u * a * v = d, u and v unimodular,
/// d diagonal with nonnegative entries d_0 | d_1 | ...
pub fn smith(a: &IMat) -> (IMat, IMat, IMat) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let swap_rows = |x: &mut IMat, i: usize, j: usize| x.swap(i, j);
    let swap_cols = |x: &mut IMat, i: usize, j: usize| {
        for r in x.iter_mut() {
            r.swap(i, j);
        }
    };
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(u, d, v);
            };
            swap_rows(&mut d, t, bi);
            swap_rows(&mut u, t, bi);
            swap_cols(&mut d, t, bj);
            swap_cols(&mut v, t, bj);
            let mut dirty = false;
            for i in t + 1..m {
                let q = d[i][t].div_euclid(d[t][t]);
                if q != 0 {
                    for j in 0..n {
                        d[i][j] -= q * d[t][j];
                    }
                    for j in 0..m {
                        u[i][j] -= q * u[t][j];
                    }
                }
                dirty |= d[i][t] != 0;
            }
            for j in t + 1..n {
                let q = d[t][j].div_euclid(d[t][t]);
                if q != 0 {
                    for i in 0..m {
                        d[i][j] -= q * d[i][t];
                    }
                    for i in 0..n {
                        v[i][j] -= q * v[i][t];
                    }
                }
                dirty |= d[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block
            let p = d[t][t];
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[i][j] % p != 0));
            if let Some(i) = bad {
                for j in 0..n {
                    d[t][j] += d[i][j];
                }
                for j in 0..m {
                    u[t][j] += u[i][j];
                }
                continue;
            }
            break;
        }
        if d[t][t] < 0 {
            for j in 0..n {
                d[t][j] = -d[t][j];
            }
            for j in 0..m {
                u[t][j] = -u[t][j];
            }
        }
    }
    finish(u, d, v)
}

fn finish(u: IMat, d: IMat, v: IMat) -> (IMat, IMat, IMat) {
    (u, d, v)
}

pub fn det(a: &IMat) -> i128 {
    // Bareiss fraction-free elimination
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn to_rat(a: &IMat) -> Vec<Vec<BigRational>> {
    a.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect()
}

/// Inverse over Q.
pub fn inverse_q(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let rows: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::from_integer(1.into())
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    let (red, piv) = crate::linalg::rref(&rows);
    if piv.len() < n || piv.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Adjugate of an integer matrix (det * inverse).
pub fn adjugate(a: &IMat) -> IMat {
    let d = det(a);
    assert!(d != 0, "adjugate of a singular matrix");
    let inv = inverse_q(&to_rat(a)).expect("nonsingular");
    let dq = BigRational::from_integer(BigInt::from(d));
    inv.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let y = x * &dq;
                    assert!(y.is_integer());
                    y.to_integer().to_i64().expect("adjugate entry fits i64")
                })
                .collect()
        })
        .collect()
}

/// Integer inverse of a unimodular matrix.
pub fn inverse_unimodular(a: &IMat) -> IMat {
    let d = det(a);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    let adj = adjugate(a);
    adj.iter().map(|r| r.iter().map(|&x| x * d as i64).collect()).collect()
}

/// Z-basis (as rows) of the kernel {x in Z^n : a x = 0}.
pub fn kernel(a: &IMat, n: usize) -> IMat {
    if a.is_empty() {
        return identity(n);
    }
    let (_, d, v) = smith(a);
    let rank = (0..a.len().min(n)).filter(|&i| d[i][i] != 0).count();
    (rank..n).map(|j| v.iter().map(|r| r[j]).collect()).collect()
}

/// Z-basis (as rows) of the row lattice spanned by the rows of g.
pub fn row_lattice_basis(g: &IMat) -> IMat {
    let n = g.first().map_or(0, |r| r.len());
    let (_, d, v) = smith(g);
    let vinv = inverse_unimodular(&v);
    (0..g.len().min(n))
        .filter(|&i| d[i][i] != 0)
        .map(|i| vinv[i].iter().map(|&x| x * d[i][i]).collect())
        .collect()
}

pub fn m2_mul(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn m2_det(a: &M2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Inverse of a matrix with determinant +-1.
pub fn m2_inv(a: &M2) -> M2 {
    let d = m2_det(a);
    assert!(d == 1 || d == -1);
    [[a[1][1] * d, -a[0][1] * d], [-a[1][0] * d, a[0][0] * d]]
}

/// Adjugate (d, -b; -c, a).
pub fn m2_adj(a: &M2) -> M2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub const M2_ID: M2 = [[1, 0], [0, 1]];
pub const M2_S: M2 = [[0, 1], [-1, 0]];

pub fn m2_t(k: i64) -> M2 {
    [[1, k], [0, 1]]
}

pub fn m2_neg(a: &M2) -> M2 {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_a2_and_e8_like() {
        let a = vec![vec![2, 1], vec![1, 2]];
        let (u, d, v) = smith(&a);
        assert_eq!(mul(&mul(&u, &a), &v), d);
        assert_eq!((d[0][0], d[1][1]), (1, 3));
        let b = vec![vec![4, 6, 2], vec![6, 12, 0], vec![2, 0, 8]];
        let (u, d, v) = smith(&b);
        assert_eq!(mul(&mul(&u, &b), &v), d);
        for i in 0..2 {
            assert!(d[i + 1][i + 1] % d[i][i].max(1) == 0 || d[i + 1][i + 1] == 0);
        }
        assert_eq!(det(&u).abs(), 1);
        assert_eq!(det(&v).abs(), 1);
    }

    #[test]
    fn kernel_and_basis() {
        let a = vec![vec![1, 2, 3]];
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for r in &k {
            assert_eq!(mat_vec(&a, r), vec![0]);
        }
        let g = vec![vec![2, 0], vec![0, 2], vec![1, 1]];
        let b = row_lattice_basis(&g);
        assert_eq!(b.len(), 2);
        assert_eq!(det(&b).abs(), 2);
    }
}
