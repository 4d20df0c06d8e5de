//! Small dense symmetric eigenproblems, row-major `n × n` storage.

use crate::error::{Error, Result};

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Conditioning {
                        condition: f64::INFINITY,
                    });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Eigenvalues (ascending) and column eigenvectors by cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let vals = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (col, &i) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + col] = v[k * n + i];
        }
    }
    (vals, vecs)
}

/// Solution of `A c = ρ B c` for symmetric `A` and positive-definite `B`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub values: Vec<f64>,
    /// Column `j` holds the eigenvector of `values[j]`, normalised so `cᵀ B c = 1`.
    pub vectors: Vec<f64>,
    /// Spectral condition number of `B` after symmetric diagonal scaling.
    pub condition: f64,
}

/// Congruence reduction: scale `B` to unit diagonal, factor `B = L Lᵀ`, then
/// diagonalise `L⁻¹ A L⁻ᵀ`.
pub fn generalized_eigen(a: &[f64], b: &[f64], n: usize, max_condition: f64) -> Result<GeneralizedEigen> {
    let d: Vec<f64> = (0..n).map(|i| 1.0 / b[i * n + i].sqrt()).collect();
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::Conditioning {
            condition: f64::INFINITY,
        });
    }
    let scale = |m: &[f64]| -> Vec<f64> { (0..n * n).map(|ij| m[ij] * d[ij / n] * d[ij % n]).collect() };
    let bs = scale(b);
    let as_ = scale(a);
    let (bvals, _) = symmetric_eigen(&bs, n);
    let condition = if bvals[0] > 0.0 {
        bvals[n - 1] / bvals[0]
    } else {
        f64::INFINITY
    };
    if !(condition <= max_condition) {
        return Err(Error::Conditioning { condition });
    }
    let l = cholesky(&bs, n)?;
    // C = L^{-1} A L^{-T}: forward-solve columns, then rows
    let mut x = as_.clone();
    for col in 0..n {
        for i in 0..n {
            let mut s = x[i * n + col];
            for k in 0..i {
                s -= l[i * n + k] * x[k * n + col];
            }
            x[i * n + col] = s / l[i * n + i];
        }
    }
    let mut c = vec![0.0; n * n];
    for row in 0..n {
        for i in 0..n {
            let mut s = x[row * n + i];
            for k in 0..i {
                s -= l[i * n + k] * c[row * n + k];
            }
            c[row * n + i] = s / l[i * n + i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i * n + j] + c[j * n + i]);
            c[i * n + j] = avg;
            c[j * n + i] = avg;
        }
    }
    let (values, y) = symmetric_eigen(&c, n);
    // back-substitute L^T z = y, then undo the scaling
    let mut vectors = vec![0.0; n * n];
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = y[i * n + col];
            for k in i + 1..n {
                s -= l[k * n + i] * vectors[k * n + col];
            }
            vectors[i * n + col] = s / l[i * n + i];
        }
        for i in 0..n {
            vectors[i * n + col] *= d[i];
        }
    }
    Ok(GeneralizedEigen {
        values,
        vectors,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_small() {
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let (vals, vecs) = symmetric_eigen(&a, 3);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        assert!((vals[2] - 5.0).abs() < 1e-14);
        // A v = lambda v for the first eigenpair
        for i in 0..3 {
            let av: f64 = (0..3).map(|k| a[i * 3 + k] * vecs[k * 3]).sum();
            assert!((av - vals[0] * vecs[i * 3]).abs() < 1e-14);
        }
    }

    #[test]
    fn generalized_matches_direct() {
        // B = diag(1, 4), A = [[2, 1], [1, 8]]: B^{-1/2} A B^{-1/2} = [[2, 0.5], [0.5, 2]]
        let a = [2.0, 1.0, 1.0, 8.0];
        let b = [1.0, 0.0, 0.0, 4.0];
        let g = generalized_eigen(&a, &b, 2, 1e12).unwrap();
        assert!((g.values[0] - 1.5).abs() < 1e-14);
        assert!((g.values[1] - 2.5).abs() < 1e-14);
        let (c0, c1) = (g.vectors[0], g.vectors[2]);
        let btb = c0 * c0 + 4.0 * c1 * c1;
        assert!((btb - 1.0).abs() < 1e-14);
        assert_eq!(g.condition, 1.0);
    }

    #[test]
    fn rejects_indefinite_and_ill_conditioned() {
        let a = [1.0, 0.0, 0.0, 1.0];
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_err());
        let b = [1.0, 1.0 - 1e-14, 1.0 - 1e-14, 1.0];
        assert!(matches!(
            generalized_eigen(&a, &b, 2, 1e12),
            Err(Error::Conditioning { .. })
        ));
    }
}
