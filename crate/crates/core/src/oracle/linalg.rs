//! Small dense linear algebra: Gaussian elimination, Cholesky, and a cyclic
//! Jacobi eigenvalue sweep. Written in-repo so the oracles carry no
//! external numerical dependencies.

const EPS: f64 = 1e-12;

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < EPS {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite
/// matrix, or `None` if the matrix is not positive definite.
pub fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solve `A x = b` given the Cholesky factor of `A`.
pub fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// Reduce the symmetric pencil `(A, C C')` to the standard symmetric matrix
/// `C^-1 A C^-T`, whose eigenvalues are the generalized eigenvalues.
pub fn congruence_reduce(a: &[Vec<f64>], c: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    // First solve C Y = A columnwise, then C Z' = Y' rowwise.
    let mut y = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in 0..n {
            let mut s = a[i][col];
            for k in 0..i {
                s -= c[i][k] * y[k][col];
            }
            y[i][col] = s / c[i][i];
        }
    }
    let mut z = vec![vec![0.0; n]; n];
    for row in 0..n {
        for j in 0..n {
            let mut s = y[row][j];
            for k in 0..j {
                s -= c[j][k] * z[row][k];
            }
            z[row][j] = s / c[j][j];
        }
    }
    // Symmetrize against rounding.
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (z[i][j] + z[j][i]);
            z[i][j] = m;
            z[j][i] = m;
        }
    }
    z
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let scale: f64 = m
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_linear(a, vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-9);
        assert!((x[1] - 1.4).abs() < 1e-9);
    }

    #[test]
    fn jacobi_known_eigenvalues() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let mut e = jacobi_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        e.sort_by(f64::total_cmp);
        assert!((e[0] - 1.0).abs() < 1e-9);
        assert!((e[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn cholesky_roundtrip() {
        let a = vec![
            vec![4.0, 2.0, 0.4],
            vec![2.0, 5.0, 1.0],
            vec![0.4, 1.0, 3.0],
        ];
        let l = cholesky(&a).unwrap();
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let got: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
            assert!((got - (i as f64 + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn congruence_identity() {
        // With C = I the reduction is a no-op.
        let a = vec![vec![3.0, 1.0], vec![1.0, 2.0]];
        let c = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let z = congruence_reduce(&a, &c);
        assert!((z[0][0] - 3.0).abs() < 1e-12 && (z[0][1] - 1.0).abs() < 1e-12);
    }
}
