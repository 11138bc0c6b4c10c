//! Classical 1D Yee FDTD solver in normalized form.
//!
//! `ex` lives on integer nodes `0..=m`, `hy` on half nodes `0..m`. The update
//! coefficients carry the Courant factor 0.5 (`cb = 0.5` and the H update uses
//! 0.5 in free space), so the scheme is only consistent for `c0 dt / dz = 0.5`.
//!
//! The solver is written with explicit index loops and is used as an
//! independent reference for the operator-based mimetic solver.

use crate::error::{Error, Result};

/// Courant factor baked into the normalized update equations.
pub const COURANT_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflCheck {
    pub courant: f64,
    pub stable: bool,
}

pub fn cfl_check(dt: f64, dz: f64, c0: f64) -> CflCheck {
    let courant = c0 * dt / dz;
    CflCheck {
        courant,
        stable: courant <= 1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YeeCoefficients {
    pub ca: Vec<f64>,
    pub cb: Vec<f64>,
}

impl YeeCoefficients {
    pub fn free_space(len: usize) -> Self {
        Self {
            ca: vec![1.0; len],
            cb: vec![COURANT_FACTOR; len],
        }
    }

    pub fn len(&self) -> usize {
        self.ca.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ca.is_empty()
    }
}

/// Semi-implicit loss coefficients for a single node.
///
/// `loss = sigma dt / (2 eps0 eps_r)`, `ca = (1 - loss) / (1 + loss)`,
/// `cb = (0.5 / eps_r) / (1 + loss)`.
pub fn node_coefficients(eps_r: f64, sigma: f64, dt: f64, eps0: f64) -> (f64, f64, f64) {
    let loss = dt * sigma / (2.0 * eps0 * eps_r);
    let ca = (1.0 - loss) / (1.0 + loss);
    let cb = (COURANT_FACTOR / eps_r) / (1.0 + loss);
    (loss, ca, cb)
}

pub fn lossy_coefficients(eps_r: &[f64], sigma: &[f64], dt: f64, eps0: f64) -> Result<YeeCoefficients> {
    if eps_r.len() != sigma.len() {
        return Err(Error::Dimension {
            op: "lossy_coefficients",
            lhs: (eps_r.len(), 1),
            rhs: (sigma.len(), 1),
        });
    }
    let mut ca = Vec::with_capacity(eps_r.len());
    let mut cb = Vec::with_capacity(eps_r.len());
    for (node, (&er, &s)) in eps_r.iter().zip(sigma).enumerate() {
        if er.is_nan() || er < 1.0 {
            return Err(Error::validation(format!("eps_r[{node}]"), format!("{er} is below 1")));
        }
        if s.is_nan() || s < 0.0 {
            return Err(Error::validation(format!("sigma[{node}]"), format!("{s} is negative")));
        }
        let (loss, a, b) = node_coefficients(er, s, dt, eps0);
        if loss >= 1.0 {
            return Err(Error::OverDamped { node, loss });
        }
        ca.push(a);
        cb.push(b);
    }
    Ok(YeeCoefficients { ca, cb })
}

/// Stencil used for the outermost H half nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HClosure {
    /// Plain two-point difference everywhere.
    #[default]
    TwoPoint,
    /// One-sided `[-8/3, 3, -1/3]` closure at both ends, matching the mimetic
    /// gradient's boundary rows.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct YeeBoundary {
    /// Overwrite the end nodes with the previous values of their neighbours.
    pub abc: bool,
    pub closure: HClosure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YeeState {
    pub ex: Vec<f64>,
    pub hy: Vec<f64>,
    pub n: usize,
}

impl YeeState {
    /// Zero fields on `cells` cells (`cells + 1` nodes).
    pub fn new(cells: usize) -> Self {
        Self {
            ex: vec![0.0; cells + 1],
            hy: vec![0.0; cells],
            n: 0,
        }
    }
}

/// Advances one leapfrog step: E update, soft source, ABC, then H update.
pub fn yee_step(state: &mut YeeState, coeffs: &YeeCoefficients, source: Option<(usize, f64)>, boundary: YeeBoundary) {
    let ex = &mut state.ex;
    let hy = &mut state.hy;
    let last = ex.len() - 1;
    assert_eq!(hy.len(), last, "hy must have one fewer entry than ex");
    assert_eq!(coeffs.len(), ex.len(), "coefficients must cover every node");

    let saved = (ex[1], ex[last - 1]);

    // end nodes see no H on their outer side
    ex[0] *= coeffs.ca[0];
    ex[last] *= coeffs.ca[last];
    for i in 1..last {
        ex[i] = coeffs.ca[i] * ex[i] + coeffs.cb[i] * (hy[i - 1] - hy[i]);
    }

    if let Some((node, value)) = source {
        ex[node] += value;
    }

    if boundary.abc {
        ex[0] = saved.0;
        ex[last] = saved.1;
    }

    let h = COURANT_FACTOR;
    let n = last;
    let interior = match boundary.closure {
        HClosure::TwoPoint => 0..n,
        HClosure::OneSided => 1..n - 1,
    };
    for j in interior {
        hy[j] += h * (ex[j] - ex[j + 1]);
    }
    if boundary.closure == HClosure::OneSided {
        hy[0] -= h * (-8.0 / 3.0 * ex[0] + 3.0 * ex[1] - 1.0 / 3.0 * ex[2]);
        hy[n - 1] -= h * (1.0 / 3.0 * ex[n - 2] - 3.0 * ex[n - 1] + 8.0 / 3.0 * ex[n]);
    }
    state.n += 1;
}
