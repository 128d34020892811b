//! Small dense linear-algebra helpers shared by the Fock and Fisher modules.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;

/// Connected components of the nonzero pattern of a square matrix.
///
/// A Hermitian matrix is block diagonal (up to permutation) over these
/// index sets, so spectral work can be done one block at a time.
pub fn support_blocks(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

pub fn sub_matrix(m: &DMatrix<C64>, idx: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Eigendecomposition of one Hermitian block.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m);
    (eig.eigenvalues, eig.eigenvectors)
}

/// All eigenvalues of a Hermitian matrix, computed block by block.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    support_blocks(m)
        .iter()
        .flat_map(|idx| {
            if idx.len() == 1 {
                vec![m[(idx[0], idx[0])].re]
            } else {
                hermitian_eigen(sub_matrix(m, idx))
                    .0
                    .iter()
                    .copied()
                    .collect()
            }
        })
        .collect()
}

/// Largest entry-wise deviation from Hermiticity.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue_real(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_split_on_zero_pattern() {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 2)] = C64::new(0.5, 0.0);
        m[(2, 0)] = C64::new(0.5, 0.0);
        m[(1, 1)] = C64::new(2.0, 0.0);
        let blocks = support_blocks(&m);
        assert_eq!(blocks, vec![vec![0, 2], vec![1], vec![3]]);
        let mut ev = hermitian_eigenvalues(&m);
        ev.sort_by(f64::total_cmp);
        let h = 0.5 * 2f64.sqrt();
        assert!((ev[0] - (0.5 - h)).abs() < 1e-14);
        assert!(ev[1].abs() < 1e-14);
        assert!((ev[2] - (0.5 + h)).abs() < 1e-14);
        assert!((ev[3] - 2.0).abs() < 1e-14);
    }
}
