//! Mimetic (Corbino–Castillo) gradient, divergence and Laplacian operators.
//!
//! The second-order 1D gradient maps the `m + 2` scalar values to the `m + 1`
//! edges. Interior rows are the centered two-point difference; the two
//! boundary rows use the one-sided stencil `[-8/3, 3, -1/3] / dx` (mirrored at
//! the right end), which is exact for quadratics on the half-cell boundary
//! spacing. The divergence maps edges back to scalars and has zero boundary
//! rows. 2D operators are Kronecker lifts of the 1D ones using the augmented
//! identity, in the layout documented in [`crate::grid`].

use std::fmt;

use crate::error::Result;
use crate::grid::{OperatorOrder, StaggeredGrid1D, StaggeredGrid2D};
use crate::sparse::SparseMatrix;

/// Identity tolerance for the constant-field and composition checks.
pub const IDENTITY_TOL: f64 = 1e-12;

const BOUNDARY_STENCIL: [f64; 3] = [-8.0 / 3.0, 3.0, -1.0 / 3.0];

/// A grid on which gradient and divergence can be assembled.
pub trait MimeticGrid {
    fn gradient(&self, k: OperatorOrder) -> SparseMatrix;
    fn divergence(&self, k: OperatorOrder) -> SparseMatrix;
    fn scalar_len(&self) -> usize;
    fn edge_len(&self) -> usize;
}

impl MimeticGrid for StaggeredGrid1D {
    fn gradient(&self, k: OperatorOrder) -> SparseMatrix {
        debug_assert_eq!(k, OperatorOrder::SECOND);
        let m = self.cells();
        let inv = 1.0 / self.dx();
        let mut triplets = Vec::with_capacity(2 * m + 4);
        for (j, &c) in BOUNDARY_STENCIL.iter().enumerate() {
            triplets.push((0, j, c * inv));
            triplets.push((m, m + 1 - j, -c * inv));
        }
        for i in 1..m {
            triplets.push((i, i, -inv));
            triplets.push((i, i + 1, inv));
        }
        SparseMatrix::from_triplets(m + 1, m + 2, &triplets).expect("gradient stencil in bounds")
    }

    fn divergence(&self, k: OperatorOrder) -> SparseMatrix {
        debug_assert_eq!(k, OperatorOrder::SECOND);
        let m = self.cells();
        let inv = 1.0 / self.dx();
        let triplets: Vec<_> = (1..=m).flat_map(|i| [(i, i - 1, -inv), (i, i, inv)]).collect();
        SparseMatrix::from_triplets(m + 2, m + 1, &triplets).expect("divergence stencil in bounds")
    }

    fn scalar_len(&self) -> usize {
        StaggeredGrid1D::scalar_len(self)
    }

    fn edge_len(&self) -> usize {
        StaggeredGrid1D::edge_len(self)
    }
}

impl MimeticGrid for StaggeredGrid2D {
    fn gradient(&self, k: OperatorOrder) -> SparseMatrix {
        let gx = self.x.gradient(k);
        let gy = self.y.gradient(k);
        let ix_t = augmented_identity(self.mx()).transpose();
        let iy_t = augmented_identity(self.my()).transpose();
        SparseMatrix::vstack(&iy_t.kron(&gx), &gy.kron(&ix_t)).expect("gradient blocks share columns")
    }

    fn divergence(&self, k: OperatorOrder) -> SparseMatrix {
        let dx = self.x.divergence(k);
        let dy = self.y.divergence(k);
        let ix = augmented_identity(self.mx());
        let iy = augmented_identity(self.my());
        SparseMatrix::hstack(&iy.kron(&dx), &dy.kron(&ix)).expect("divergence blocks share rows")
    }

    fn scalar_len(&self) -> usize {
        StaggeredGrid2D::scalar_len(self)
    }

    fn edge_len(&self) -> usize {
        StaggeredGrid2D::edge_len(self)
    }
}

pub fn grad1d(k: OperatorOrder, m: usize, dx: f64) -> Result<SparseMatrix> {
    Ok(StaggeredGrid1D::new(m, dx)?.gradient(k))
}

pub fn div1d(k: OperatorOrder, m: usize, dx: f64) -> Result<SparseMatrix> {
    Ok(StaggeredGrid1D::new(m, dx)?.divergence(k))
}

pub fn grad2d(k: OperatorOrder, mx: usize, dx: f64, my: usize, dy: f64) -> Result<SparseMatrix> {
    Ok(StaggeredGrid2D::new(mx, dx, my, dy)?.gradient(k))
}

pub fn div2d(k: OperatorOrder, mx: usize, dx: f64, my: usize, dy: f64) -> Result<SparseMatrix> {
    Ok(StaggeredGrid2D::new(mx, dx, my, dy)?.divergence(k))
}

/// `(m + 2) x m` identity with zero first and last rows.
pub fn augmented_identity(m: usize) -> SparseMatrix {
    let triplets: Vec<_> = (0..m).map(|i| (i + 1, i, 1.0)).collect();
    SparseMatrix::from_triplets(m + 2, m, &triplets).expect("augmented identity in bounds")
}

/// `L = D G`, formed by sparse multiplication.
pub fn laplacian<G: MimeticGrid>(k: OperatorOrder, grid: &G) -> SparseMatrix {
    grid.divergence(k)
        .matmul(&grid.gradient(k))
        .expect("divergence columns match gradient rows")
}

/// Max-abs residuals of the discrete identities that do not need a curl.
///
/// Constant-field residuals are divided by the infinity norm of the operator
/// (at least 1), so roundoff in entries of size `1/dx^2` on fine grids is not
/// mistaken for an error; at unit spacing they are the plain max-abs values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `G f` for unit constant `f`.
    pub grad_const: f64,
    /// `D v` for unit constant `v`.
    pub div_const: f64,
    /// `L f` for unit constant `f`.
    pub lap_const: f64,
    /// `L f - D (G f)` for a fixed non-trivial `f`, relative to `max |L f|`.
    pub lap_composition: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.grad_const
            .max(self.div_const)
            .max(self.lap_const)
            .max(self.lap_composition)
    }

    pub fn passes(&self) -> bool {
        self.max_residual() <= IDENTITY_TOL
    }

    pub fn entries(&self) -> [(&'static str, f64); 4] {
        [
            ("grad_const", self.grad_const),
            ("div_const", self.div_const),
            ("lap_const", self.lap_const),
            ("lap_composition", self.lap_composition),
        ]
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in self.entries() {
            let status = if value <= IDENTITY_TOL { "ok" } else { "FAIL" };
            writeln!(f, "{name:<16} {value:.3e} {status}")?;
        }
        Ok(())
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

pub fn verify_identities<G: MimeticGrid>(k: OperatorOrder, grid: &G) -> IdentityReport {
    let grad = grid.gradient(k);
    let div = grid.divergence(k);
    let lap = div.matmul(&grad).expect("operator shapes agree");

    let c = 1.0;
    let f_const = vec![c; grid.scalar_len()];
    let v_const = vec![c; grid.edge_len()];
    let relative = |a: &SparseMatrix, x: &[f64]| max_abs(&a.matvec(x).unwrap()) / a.norm_inf().max(1.0);
    let grad_const = relative(&grad, &f_const);
    let div_const = relative(&div, &v_const);
    let lap_const = relative(&lap, &f_const);

    let f: Vec<f64> = (0..grid.scalar_len()).map(|i| (0.37 * i as f64).sin()).collect();
    let direct = lap.matvec(&f).unwrap();
    let composed = div.matvec(&grad.matvec(&f).unwrap()).unwrap();
    let scale = max_abs(&direct).max(1.0);
    let diff: Vec<f64> = direct.iter().zip(&composed).map(|(a, b)| a - b).collect();

    IdentityReport {
        grad_const,
        div_const,
        lap_const,
        lap_composition: max_abs(&diff) / scale,
    }
}
