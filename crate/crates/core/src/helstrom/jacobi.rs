//! Cyclic Jacobi eigen-solver for dense real symmetric matrices.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Row-major `n×n` matrix whose columns are the eigenvectors, in the
    /// order of `values`. Only filled when requested.
    pub vectors: Option<Vec<f64>>,
    pub sweeps: usize,
}

/// Diagonalizes the symmetric `n×n` row-major matrix `a` by cyclic Jacobi
/// rotations. Only the upper triangle is read.
///
/// Each sweep annihilates every off-diagonal element once. For the first
/// three sweeps only elements above a threshold are rotated; afterwards,
/// elements that are negligible next to both diagonal entries are zeroed.
pub fn symmetric_eigen(a: &[f64], n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let mut a = a.to_vec();
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 1..=MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        if off == 0.0 {
            return Ok(finish(d, v, n, sweep - 1));
        }
        let threshold = if sweep < 4 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;

                let mut rotate = |i: usize, j: usize, k: usize, l: usize| {
                    let g = a[i * n + j];
                    let h = a[k * n + l];
                    a[i * n + j] = g - s * (h + g * tau);
                    a[k * n + l] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(j, p, j, q);
                }
                for j in p + 1..q {
                    rotate(p, j, j, q);
                }
                for j in q + 1..n {
                    rotate(p, j, q, j);
                }
                if let Some(v) = v.as_mut() {
                    for j in 0..n {
                        let g = v[j * n + p];
                        let h = v[j * n + q];
                        v[j * n + p] = g - s * (h + g * tau);
                        v[j * n + q] = h + s * (g - h * tau);
                    }
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }

    let off_diagonal = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .map(|(p, q)| a[p * n + q].powi(2))
        .sum::<f64>()
        .sqrt();
    Err(Error::EigenSolver {
        dim: n,
        sweeps: MAX_SWEEPS,
        off_diagonal,
    })
}

fn finish(d: Vec<f64>, v: Option<Vec<f64>>, n: usize, sweeps: usize) -> SymmetricEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = v.map(|v| {
        let mut sorted = vec![0.0; n * n];
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                sorted[row * n + col] = v[row * n + src];
            }
        }
        sorted
    });
    SymmetricEigen {
        values,
        vectors,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_returned_sorted() {
        let a = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        let e = symmetric_eigen(&a, 3, true).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let e = symmetric_eigen(&[2.0, 1.0, 1.0, 2.0], 2, true).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] - 3.0).abs() < 1e-15);
        let v = e.vectors.unwrap();
        // Column for eigenvalue 3 is ±(1, 1)/√2.
        assert!((v[1].abs() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((v[3].abs() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reconstructs_the_input() {
        let n = 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = ((i + 1) * (j + 1)) as f64 / (i + j + 1) as f64;
            }
        }
        let e = symmetric_eigen(&a, n, true).unwrap();
        let v = e.vectors.unwrap();
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| v[i * n + k] * e.values[k] * v[j * n + k])
                    .sum();
                assert!((r - a[i * n + j]).abs() < 1e-13, "({i},{j})");
                let o: f64 = (0..n).map(|k| v[k * n + i] * v[k * n + j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((o - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn empty_and_scalar_matrices() {
        assert!(symmetric_eigen(&[], 0, false).unwrap().values.is_empty());
        assert_eq!(symmetric_eigen(&[4.5], 1, false).unwrap().values, vec![4.5]);
    }
}
