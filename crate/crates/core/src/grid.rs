//! Staggered grid layouts.
//!
//! In 1D a grid of `m` cells carries `m + 2` scalar locations (the two
//! boundary nodes plus every cell center) and `m + 1` edge locations. The 2D
//! grid is the tensor product of two 1D grids:
//!
//! * scalars are flattened x-fastest: index `i + (mx + 2) * j`;
//! * edges hold the x-edge block (`my * (mx + 1)` entries, index
//!   `i + (mx + 1) * j` for edge column `i` and interior row `j + 1`) followed
//!   by the y-edge block (`mx * (my + 1)` entries, index `i + mx * j` for
//!   interior column `i + 1` and edge row `j`).
//!
//! The origin is 0, so the domain is `[0, m dx]` (and `[0, my dy]` in y).

use crate::error::{Error, Result};

/// Smallest cell count for which the two one-sided boundary stencils of the
/// second-order gradient do not overlap.
pub const MIN_CELLS: usize = 3;

/// Order of accuracy of the mimetic operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorOrder(u32);

impl OperatorOrder {
    pub const SECOND: OperatorOrder = OperatorOrder(2);

    pub fn new(k: u32) -> Result<Self> {
        match k {
            2 => Ok(Self(2)),
            k if k == 0 || k % 2 == 1 => Err(Error::InvalidOrder(k)),
            k => Err(Error::OrderNotImplemented(k)),
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl Default for OperatorOrder {
    fn default() -> Self {
        Self::SECOND
    }
}

fn check_cells(m: usize) -> Result<()> {
    if m < MIN_CELLS {
        return Err(Error::GridTooSmall {
            cells: m,
            min: MIN_CELLS,
        });
    }
    Ok(())
}

fn check_spacing(dx: f64) -> Result<()> {
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::InvalidSpacing(dx));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggeredGrid1D {
    m: usize,
    dx: f64,
}

impl StaggeredGrid1D {
    pub fn new(m: usize, dx: f64) -> Result<Self> {
        check_cells(m)?;
        check_spacing(dx)?;
        Ok(Self { m, dx })
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn scalar_len(&self) -> usize {
        self.m + 2
    }

    pub fn edge_len(&self) -> usize {
        self.m + 1
    }

    /// `[0, dx/2, 3dx/2, ..., (m - 1/2) dx, m dx]`
    pub fn scalar_coords(&self) -> Vec<f64> {
        let mut coords = Vec::with_capacity(self.scalar_len());
        coords.push(0.0);
        coords.extend((0..self.m).map(|i| (i as f64 + 0.5) * self.dx));
        coords.push(self.m as f64 * self.dx);
        coords
    }

    /// `[0, dx, ..., m dx]`
    pub fn edge_coords(&self) -> Vec<f64> {
        (0..=self.m).map(|i| i as f64 * self.dx).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggeredGrid2D {
    pub x: StaggeredGrid1D,
    pub y: StaggeredGrid1D,
}

impl StaggeredGrid2D {
    pub fn new(mx: usize, dx: f64, my: usize, dy: f64) -> Result<Self> {
        Ok(Self {
            x: StaggeredGrid1D::new(mx, dx)?,
            y: StaggeredGrid1D::new(my, dy)?,
        })
    }

    pub fn mx(&self) -> usize {
        self.x.cells()
    }

    pub fn my(&self) -> usize {
        self.y.cells()
    }

    /// Scalar field extent as `(nx, ny) = (mx + 2, my + 2)`.
    pub fn scalar_dims(&self) -> (usize, usize) {
        (self.x.scalar_len(), self.y.scalar_len())
    }

    pub fn scalar_len(&self) -> usize {
        self.x.scalar_len() * self.y.scalar_len()
    }

    pub fn scalar_index(&self, i: usize, j: usize) -> usize {
        i + self.x.scalar_len() * j
    }

    /// Extent of the x-edge block: `(mx + 1, my)`.
    pub fn x_edge_dims(&self) -> (usize, usize) {
        (self.x.edge_len(), self.my())
    }

    /// Extent of the y-edge block: `(mx, my + 1)`.
    pub fn y_edge_dims(&self) -> (usize, usize) {
        (self.mx(), self.y.edge_len())
    }

    pub fn x_edge_len(&self) -> usize {
        self.x.edge_len() * self.my()
    }

    pub fn y_edge_len(&self) -> usize {
        self.mx() * self.y.edge_len()
    }

    pub fn edge_len(&self) -> usize {
        self.x_edge_len() + self.y_edge_len()
    }

    /// Scalar coordinates in flattened (x-fastest) order.
    pub fn scalar_points(&self) -> Vec<(f64, f64)> {
        let xs = self.x.scalar_coords();
        let ys = self.y.scalar_coords();
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_validation() {
        assert_eq!(OperatorOrder::new(2).unwrap().get(), 2);
        assert_eq!(OperatorOrder::new(4), Err(Error::OrderNotImplemented(4)));
        assert_eq!(OperatorOrder::new(3), Err(Error::InvalidOrder(3)));
        assert_eq!(OperatorOrder::new(0), Err(Error::InvalidOrder(0)));
        let msg = OperatorOrder::new(6).unwrap_err().to_string();
        assert!(msg.contains("not implemented"));
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert_eq!(
            StaggeredGrid1D::new(2, 1.0),
            Err(Error::GridTooSmall { cells: 2, min: 3 })
        );
        assert!(StaggeredGrid1D::new(3, 0.0).is_err());
        assert!(StaggeredGrid1D::new(3, f64::NAN).is_err());
        assert!(StaggeredGrid1D::new(3, -1.0).is_err());
    }

    #[test]
    fn coordinates_1d() {
        let g = StaggeredGrid1D::new(4, 0.25).unwrap();
        let s = g.scalar_coords();
        let e = g.edge_coords();
        assert_eq!(s, vec![0.0, 0.125, 0.375, 0.625, 0.875, 1.0]);
        assert_eq!(e, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.len(), g.scalar_len());
        assert_eq!(e.len(), g.edge_len());
        assert_eq!(s[0], e[0]);
        assert_eq!(s[g.cells() + 1], e[g.cells()]);
        for i in 1..=g.cells() {
            assert!((s[i] - 0.5 * (e[i - 1] + e[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn layout_2d() {
        let g = StaggeredGrid2D::new(4, 1.0, 3, 1.0).unwrap();
        assert_eq!(g.scalar_dims(), (6, 5));
        assert_eq!(g.scalar_len(), 30);
        assert_eq!(g.x_edge_len(), 15);
        assert_eq!(g.y_edge_len(), 16);
        assert_eq!(g.edge_len(), 31);
        assert_eq!(g.scalar_index(1, 2), 13);
        let pts = g.scalar_points();
        assert_eq!(pts[13], (0.5, 1.5));
        assert_eq!(pts.len(), 30);
    }
}
