//! Dense Hermitian eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::basis::{OperatorMatrix, C64};
use crate::{Error, Result};

/// Relative Hermiticity defect above which input is rejected.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Ascending eigenvalues and the matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }

    /// max ‖Hv − Ev‖ over all pairs.
    pub fn max_residual(&self, h: &OperatorMatrix) -> f64 {
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                (&h.0 * &v - v.map(|c| c * self.values[k])).norm()
            })
            .fold(0.0, f64::max)
    }

    /// max |V†V − 1|.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.vectors.ncols();
        let g = self.vectors.adjoint() * &self.vectors;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Diagonalize a Hermitian matrix. Real input takes the real-symmetric path.
pub fn solve(h: &OperatorMatrix) -> Result<Eigenpairs> {
    if !h.0.is_square() {
        return Err(Error::InvalidParameter("eigensolve of a non-square matrix".into()));
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitian { defect });
    }
    let n = h.dim();
    if n == 0 {
        return Ok(Eigenpairs {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }

    let (values, vectors) = if h.is_real() {
        let re = h.0.map(|c| c.re);
        let re = (&re + re.transpose()) * 0.5;
        let eig = re.symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors.map(|v| C64::new(v, 0.0)))
    } else {
        let sym = (&h.0 + h.0.adjoint()).map(|c| c * 0.5);
        let eig = sym.symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let mut sorted_vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }
    Ok(Eigenpairs {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Extract the principal sub-matrix on `indices`.
pub fn sub_matrix(h: &OperatorMatrix, indices: &[usize]) -> OperatorMatrix {
    let k = indices.len();
    OperatorMatrix(DMatrix::from_fn(k, k, |i, j| h.0[(indices[i], indices[j])]))
}

/// Diagonalize each invariant block separately. `blocks` must partition the
/// index set and `h` must have no element coupling two blocks. Returns one
/// eigendecomposition per block with eigenvectors embedded in the full space.
pub fn solve_blocks(h: &OperatorMatrix, blocks: &[Vec<usize>]) -> Result<Vec<Eigenpairs>> {
    let n = h.dim();
    let mut owner = vec![usize::MAX; n];
    for (b, idx) in blocks.iter().enumerate() {
        for &i in idx {
            if i >= n || owner[i] != usize::MAX {
                return Err(Error::InvalidParameter("blocks do not partition the basis".into()));
            }
            owner[i] = b;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::InvalidParameter("blocks do not cover the basis".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if owner[i] != owner[j] && h.0[(i, j)] != C64::new(0.0, 0.0) {
                return Err(Error::BasisMismatch(format!(
                    "element ({i}, {j}) couples two invariant blocks"
                )));
            }
        }
    }
    blocks
        .iter()
        .map(|idx| {
            let sub = solve(&sub_matrix(h, idx))?;
            let mut vectors = DMatrix::zeros(n, sub.len());
            for k in 0..sub.len() {
                for (r, &i) in idx.iter().enumerate() {
                    vectors[(i, k)] = sub.vectors[(r, k)];
                }
            }
            Ok(Eigenpairs {
                values: sub.values,
                vectors,
            })
        })
        .collect()
}
