//! Dense symmetric eigensolver with a checked fallback.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;
const JACOBI_SWEEPS: usize = 100;

/// Eigen-decomposition `a = V diag(w) Vᵀ` of a real symmetric matrix.
///
/// Uses nalgebra's QR solver and falls back to cyclic Jacobi rotations
/// when the result fails a reconstruction check.
pub(crate) fn symmetric_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let scale = a.amax().max(1.0);
    let eig = SymmetricEigen::new(a.clone());
    if reconstruction_error(a, &eig.eigenvalues, &eig.eigenvectors) <= RECONSTRUCTION_TOLERANCE * scale {
        return (eig.eigenvalues, eig.eigenvectors);
    }
    jacobi(a)
}

fn reconstruction_error(a: &DMatrix<f64>, w: &DVector<f64>, v: &DMatrix<f64>) -> f64 {
    let rebuilt = v * DMatrix::from_diagonal(w) * v.transpose();
    let orth = v.transpose() * v - DMatrix::identity(a.nrows(), a.ncols());
    (rebuilt - a).amax().max(orth.amax())
}

fn jacobi(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (m.diagonal(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::pst_couplings;
    use crate::hilbert::Evolver;

    fn check(a: &DMatrix<f64>, w: &DVector<f64>, v: &DMatrix<f64>) -> f64 {
        reconstruction_error(a, w, v)
    }

    #[test]
    fn jacobi_diagonalizes_degenerate_blocks() {
        let n = 5;
        let ev = Evolver::new(&pst_couplings(n, 1.0).unwrap()).unwrap();
        let h = ev.hamiltonian().to_dense();
        for w in 0..=n {
            let idx: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() as usize == w).collect();
            let d = idx.len();
            let block = DMatrix::from_fn(d, d, |i, j| h[(idx[i], idx[j])]);
            let (vals, vecs) = jacobi(&block);
            assert!(check(&block, &vals, &vecs) < 1e-12, "weight {w}");
            let (vals, vecs) = symmetric_eigen(&block);
            assert!(check(&block, &vals, &vecs) < 1e-12, "weight {w}");
        }
    }

    #[test]
    fn jacobi_handles_trivial_sizes() {
        let a = DMatrix::from_element(1, 1, 3.0);
        let (w, v) = jacobi(&a);
        assert_eq!(w[0], 3.0);
        assert_eq!(v[(0, 0)], 1.0);
        let z = DMatrix::<f64>::zeros(3, 3);
        let (w, _) = jacobi(&z);
        assert!(w.iter().all(|&x| x == 0.0));
    }
}
