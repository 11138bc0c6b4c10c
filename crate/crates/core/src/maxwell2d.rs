//! 2D TMz solver with a polynomially graded absorbing layer.
//!
//! Works in normalized units (`c0 = mu0 = eps0 = 1`). The state is the
//! scalar field `e` (E_z) and an edge vector `b` stored in gradient-block
//! layout. The time step is
//!
//! ```text
//! b <- aB .* (b - dt G e)
//! e <- aE .* (e - dt D b)
//! ```
//!
//! with `aE = exp(-sigma dt)` sampled at scalar locations and `aB` at edges.
//! Outside the layer both damping vectors are exactly 1 and the update is the
//! plain mimetic leapfrog. `b` is a pseudo-flux: its x-edge block is `-B_y`
//! and its y-edge block is `+B_x`; see [`physical_b`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{OperatorOrder, StaggeredGrid2D};
use crate::mimetic::MimeticGrid;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmlSpec {
    /// Layer depth in cells.
    pub depth: usize,
    pub sigma_max: f64,
    /// Grading exponent.
    pub p: f64,
}

impl PmlSpec {
    pub fn validate(&self, mx: usize, my: usize) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::validation("pml.depth", "must be at least 1"));
        }
        if 2 * self.depth >= mx.min(my) {
            return Err(Error::validation(
                "pml.depth",
                format!(
                    "{} must be below half the smaller cell count {}",
                    self.depth,
                    mx.min(my)
                ),
            ));
        }
        if !(self.sigma_max.is_finite() && self.sigma_max > 0.0) {
            return Err(Error::validation("pml.sigma_max", "must be finite and positive"));
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::validation("pml.p", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    pub x: f64,
    pub y: f64,
    /// Coefficient `w` in `exp(-w r^2)`.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario2D {
    pub mx: usize,
    pub my: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub steps: usize,
    pub k: u32,
    pub pulse: Pulse,
    /// `None` disables damping (`aE = aB = 1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pml: Option<PmlSpec>,
}

impl Scenario2D {
    /// 100 x 100 cells on the unit square, centered Gaussian pulse, 30-cell
    /// layer with `sigma_max = 100`, `p = 4`, 140 steps.
    pub fn sullivan_upml() -> Self {
        let (mx, my) = (100, 100);
        let dx = 1.0 / mx as f64;
        let dy = 1.0 / my as f64;
        Self {
            mx,
            my,
            dx,
            dy,
            dt: 0.5 * dx.min(dy),
            steps: 140,
            k: 2,
            pulse: Pulse {
                x: 0.5,
                y: 0.5,
                width: 400.0,
            },
            pml: Some(PmlSpec {
                depth: 30,
                sigma_max: 100.0,
                p: 4.0,
            }),
        }
    }

    /// Domain enlarged by `factor` in each direction with the same spacing and
    /// time step, the pulse kept at the center, and no absorbing layer.
    pub fn enlarged(&self, factor: usize) -> Self {
        Self {
            mx: self.mx * factor,
            my: self.my * factor,
            pulse: Pulse {
                x: self.pulse.x + (factor - 1) as f64 / 2.0 * self.mx as f64 * self.dx,
                y: self.pulse.y + (factor - 1) as f64 / 2.0 * self.my as f64 * self.dy,
                ..self.pulse
            },
            pml: None,
            ..self.clone()
        }
    }

    pub fn grid(&self) -> Result<StaggeredGrid2D> {
        StaggeredGrid2D::new(self.mx, self.dx, self.my, self.dy)
    }

    /// `c dt / min(dx, dy)` with `c = 1`.
    pub fn courant(&self) -> f64 {
        self.dt / self.dx.min(self.dy)
    }

    pub fn validate(&self) -> Result<()> {
        OperatorOrder::new(self.k)?;
        self.grid()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::validation("dt", "must be finite and positive"));
        }
        let limit = 0.5 * self.dx.min(self.dy);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::validation(
                "dt",
                format!("{} exceeds 0.5 * min(dx, dy) = {limit}", self.dt),
            ));
        }
        if !(self.pulse.width.is_finite() && self.pulse.width > 0.0) {
            return Err(Error::validation("pulse.width", "must be finite and positive"));
        }
        if !(self.pulse.x.is_finite() && self.pulse.y.is_finite()) {
            return Err(Error::validation("pulse", "center must be finite"));
        }
        if let Some(pml) = &self.pml {
            pml.validate(self.mx, self.my)?;
        }
        Ok(())
    }
}

/// Graded conductivity over the `size` scalar locations of one axis.
///
/// With 1-based index `i`, the left layer covers `i <= depth` with
/// `sigma_max ((depth - i + 1) / depth)^p`, the right layer covers
/// `i >= size + 1 - depth` with `sigma_max ((i - (size - depth)) / depth)^p`.
pub fn sigma_profile_1d(size: usize, depth: usize, sigma_max: f64, p: f64) -> Result<Vec<f64>> {
    if depth == 0 || 2 * depth > size {
        return Err(Error::validation(
            "pml.depth",
            format!("left and right layers of depth {depth} overlap on {size} locations"),
        ));
    }
    let d = depth as f64;
    Ok((1..=size)
        .map(|i| {
            if i <= depth {
                sigma_max * ((d - i as f64 + 1.0) / d).powf(p)
            } else if i > size - depth {
                sigma_max * ((i - (size - depth)) as f64 / d).powf(p)
            } else {
                0.0
            }
        })
        .collect())
}

/// Rule-of-thumb maximum conductivity `0.8 (p + 1) / (eta dx)`.
pub fn sigma_max_estimate(p: f64, eta: f64, dx: f64) -> f64 {
    0.8 * (p + 1.0) / (eta * dx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Damping {
    /// Scalar layout.
    pub e: Vec<f64>,
    /// Edge layout.
    pub b: Vec<f64>,
}

impl Damping {
    pub fn unit(grid: &StaggeredGrid2D) -> Self {
        Self {
            e: vec![1.0; grid.scalar_len()],
            b: vec![1.0; grid.edge_len()],
        }
    }
}

/// Damping factors `exp(-sigma dt)` with `sigma(i, j) = sigma_x(i) + sigma_y(j)`.
///
/// Edge `i` along an axis takes the conductivity of scalar location `i` on
/// that axis; interior cell `j` takes scalar location `j + 1`.
pub fn damping_vectors(scenario: &Scenario2D) -> Result<Damping> {
    let grid = scenario.grid()?;
    let Some(pml) = scenario.pml else {
        return Ok(Damping::unit(&grid));
    };
    pml.validate(scenario.mx, scenario.my)?;
    let (nx, ny) = grid.scalar_dims();
    let sx = sigma_profile_1d(nx, pml.depth, pml.sigma_max, pml.p)?;
    let sy = sigma_profile_1d(ny, pml.depth, pml.sigma_max, pml.p)?;
    let dt = scenario.dt;
    let damp = |s: f64| (-s * dt).exp();

    let (sx, sy) = (&sx, &sy);
    let e: Vec<f64> = (0..ny)
        .flat_map(|j| sx.iter().map(move |&s| s + sy[j]))
        .map(damp)
        .collect();

    let (mx, my) = (scenario.mx, scenario.my);
    let mut b = Vec::with_capacity(grid.edge_len());
    // x-edges: edge column i, interior row j
    for j in 0..my {
        b.extend((0..=mx).map(|i| damp(sx[i] + sy[j + 1])));
    }
    // y-edges: interior column i, edge row j
    for &syj in &sy[..=my] {
        b.extend((0..mx).map(|i| damp(sx[i + 1] + syj)));
    }
    if e.len() != grid.scalar_len() || b.len() != grid.edge_len() {
        return Err(Error::validation(
            "pml",
            "damping layout does not match operator layout",
        ));
    }
    Ok(Damping { e, b })
}

pub fn gaussian(x: f64, y: f64, pulse: &Pulse) -> f64 {
    let r2 = (x - pulse.x).powi(2) + (y - pulse.y).powi(2);
    (-pulse.width * r2).exp()
}

/// Pulse sampled at every scalar location, boundaries included.
pub fn initial_pulse(grid: &StaggeredGrid2D, pulse: &Pulse) -> Vec<f64> {
    grid.scalar_points()
        .into_iter()
        .map(|(x, y)| gaussian(x, y, pulse))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimeticState2D {
    pub e: Vec<f64>,
    pub b: Vec<f64>,
    pub n: usize,
}

impl MimeticState2D {
    /// `sum e^2 + sum b^2`
    pub fn quadratic_energy(&self) -> f64 {
        self.e.iter().chain(&self.b).map(|v| v * v).sum()
    }

    pub fn max_abs_e(&self) -> f64 {
        self.e.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

/// Physical `(B_x, B_y)` from the pseudo-flux.
///
/// `B_x` lives on y-edges (`mx x (my + 1)`), `B_y` on x-edges
/// (`(mx + 1) x my`), both x-fastest.
pub fn physical_b(grid: &StaggeredGrid2D, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (bx_edges, by_edges) = b.split_at(grid.x_edge_len());
    let b_x = by_edges.to_vec();
    let b_y = bx_edges.iter().map(|v| -v).collect();
    (b_x, b_y)
}

/// Stepper with `dt`-scaled operators and damping vectors.
#[derive(Debug, Clone)]
pub struct Mimetic2D {
    pub scenario: Scenario2D,
    pub grid: StaggeredGrid2D,
    /// `dt * grad2d`
    pub grad: SparseMatrix,
    /// `dt * div2d`
    pub div: SparseMatrix,
    pub damping: Damping,
    pub state: MimeticState2D,
    ge: Vec<f64>,
    db: Vec<f64>,
}

impl Mimetic2D {
    /// Builds operators and damping, samples the pulse, and applies the
    /// damped half-step `b <- aB .* (b - 0.5 dt G e)`.
    pub fn new(scenario: &Scenario2D) -> Result<Self> {
        scenario.validate()?;
        let grid = scenario.grid()?;
        let e = initial_pulse(&grid, &scenario.pulse);
        let mut solver = Self::with_state(scenario, e, vec![0.0; grid.edge_len()])?;
        solver.grad.matvec_into(&solver.state.e, &mut solver.ge)?;
        for ((b, g), a) in solver.state.b.iter_mut().zip(&solver.ge).zip(&solver.damping.b) {
            *b = a * (*b - 0.5 * g);
        }
        Ok(solver)
    }

    /// Stepper from an explicit `(e, b)` without the half-step start-up.
    pub fn with_state(scenario: &Scenario2D, e: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        scenario.validate()?;
        let grid = scenario.grid()?;
        let k = OperatorOrder::new(scenario.k)?;
        if e.len() != grid.scalar_len() || b.len() != grid.edge_len() {
            return Err(Error::Dimension {
                op: "Mimetic2D::with_state",
                lhs: (grid.scalar_len(), grid.edge_len()),
                rhs: (e.len(), b.len()),
            });
        }
        let grad = grid.gradient(k).scale(scenario.dt);
        let div = grid.divergence(k).scale(scenario.dt);
        let damping = damping_vectors(scenario)?;
        Ok(Self {
            scenario: scenario.clone(),
            ge: vec![0.0; grid.edge_len()],
            db: vec![0.0; grid.scalar_len()],
            grid,
            grad,
            div,
            damping,
            state: MimeticState2D { e, b, n: 0 },
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let state = &mut self.state;
        self.grad.matvec_into(&state.e, &mut self.ge)?;
        for ((b, g), a) in state.b.iter_mut().zip(&self.ge).zip(&self.damping.b) {
            *b = a * (*b - g);
        }
        self.div.matvec_into(&state.b, &mut self.db)?;
        for ((e, d), a) in state.e.iter_mut().zip(&self.db).zip(&self.damping.e) {
            *e = a * (*e - d);
        }
        state.n += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot2D {
    pub step: usize,
    pub e: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run2D {
    pub grid: StaggeredGrid2D,
    pub snapshots: Vec<Snapshot2D>,
    pub final_state: MimeticState2D,
    /// `max |e|` over every step, the initial one included.
    pub max_abs_e: f64,
    /// Quadratic energy after each step, index 0 being the initial state.
    pub energy: Vec<f64>,
}

/// Default cadence: steps 0, 70 and 140 for the 140-step scenario.
pub const SNAPSHOT_EVERY: usize = 70;

pub fn run_2d(scenario: &Scenario2D, snapshot_every: usize) -> Result<Run2D> {
    let mut solver = Mimetic2D::new(scenario)?;
    let captures = crate::maxwell1d::capture_steps(scenario.steps, snapshot_every);
    let mut snapshots = Vec::with_capacity(captures.len());
    let mut energy = Vec::with_capacity(scenario.steps + 1);
    let mut max_abs_e: f64 = 0.0;
    let mut next = captures.iter().peekable();
    loop {
        let st = &solver.state;
        max_abs_e = max_abs_e.max(st.max_abs_e());
        energy.push(st.quadratic_energy());
        if next.peek() == Some(&&st.n) {
            next.next();
            snapshots.push(Snapshot2D {
                step: st.n,
                e: st.e.clone(),
                b: st.b.clone(),
            });
        }
        if st.n == scenario.steps {
            break;
        }
        solver.step()?;
    }
    Ok(Run2D {
        grid: solver.grid,
        snapshots,
        final_state: solver.state,
        max_abs_e,
        energy,
    })
}

/// Outcome of comparing a damped run with an enlarged undamped reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlReflection {
    pub step: usize,
    /// Max `|e - e_ref|` over the undamped interior, relative to the initial
    /// peak of the reference.
    pub max_rel_diff: f64,
}

/// Runs `scenario` and its [`Scenario2D::enlarged`] counterpart (in parallel)
/// and compares `e` at the final step on the locations where the layer is
/// inactive.
pub fn pml_reflection(scenario: &Scenario2D, factor: usize) -> Result<PmlReflection> {
    compare_with_enlarged(scenario, factor, scenario.steps.max(1)).map(|(_, r)| r)
}

/// As [`pml_reflection`], also returning the damped run with snapshots every
/// `snapshot_every` steps.
pub fn compare_with_enlarged(
    scenario: &Scenario2D,
    factor: usize,
    snapshot_every: usize,
) -> Result<(Run2D, PmlReflection)> {
    if factor < 3 || factor.is_multiple_of(2) {
        return Err(Error::validation("factor", "must be an odd integer >= 3"));
    }
    let pml = scenario
        .pml
        .ok_or_else(|| Error::validation("pml", "reflection check needs an absorbing layer"))?;
    let big = scenario.enlarged(factor);
    let (small_run, big_run) = std::thread::scope(|s| {
        let h = s.spawn(|| run_2d(&big, big.steps.max(1)));
        let small = run_2d(scenario, snapshot_every);
        (small, h.join().expect("reference run panicked"))
    });
    let (small_run, big_run) = (small_run?, big_run?);

    let peak = initial_pulse(&big_run.grid, &big.pulse)
        .iter()
        .fold(0.0, |a: f64, v| a.max(v.abs()));
    let off_x = (factor - 1) / 2 * scenario.mx;
    let off_y = (factor - 1) / 2 * scenario.my;
    let (nx, ny) = small_run.grid.scalar_dims();
    let inner_x = pml.depth..nx - pml.depth;
    let inner_y = pml.depth..ny - pml.depth;
    let mut max_diff: f64 = 0.0;
    for j in inner_y {
        for i in inner_x.clone() {
            let a = small_run.final_state.e[small_run.grid.scalar_index(i, j)];
            let b = big_run.final_state.e[big_run.grid.scalar_index(i + off_x, j + off_y)];
            max_diff = max_diff.max((a - b).abs());
        }
    }
    let reflection = PmlReflection {
        step: scenario.steps,
        max_rel_diff: max_diff / peak,
    };
    Ok((small_run, reflection))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        let s = sigma_profile_1d(102, 30, 100.0, 4.0).unwrap();
        assert_eq!(s.len(), 102);
        assert_eq!(s[0], 100.0);
        assert_eq!(s[101], 100.0);
        // 1-based i = 30, innermost left layer cell: 100 / 30^4
        assert!((s[29] - 1.234_567_9e-4).abs() < 1e-11, "{}", s[29]);
        assert_eq!(s[30], 0.0);
        assert_eq!(s[71], 0.0);
        assert!((s[72] - s[29]).abs() < 1e-18);
        for i in 0..102 {
            assert_eq!(s[i], s[101 - i]);
        }
        assert!(sigma_profile_1d(10, 6, 1.0, 2.0).is_err());
        assert!(sigma_profile_1d(10, 0, 1.0, 2.0).is_err());
    }

    #[test]
    fn sigma_max_rule() {
        assert!((sigma_max_estimate(4.0, 1.0, 0.01) - 400.0).abs() < 1e-9);
        assert_eq!(sigma_max_estimate(0.0, 1.0, 0.8), 1.0);
    }

    #[test]
    fn damping_layout_and_corners() {
        let s = Scenario2D::sullivan_upml();
        let d = damping_vectors(&s).unwrap();
        let grid = s.grid().unwrap();
        assert_eq!(d.e.len(), 102 * 102);
        assert_eq!(d.b.len(), 2 * 101 * 100);
        assert!((d.e[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(d.e[grid.scalar_index(50, 50)], 1.0);
        assert!(d.e.iter().chain(&d.b).all(|&a| a > 0.0 && a <= 1.0));
        // x-edge at column 50, interior row 50 and y-edge likewise are undamped
        assert_eq!(d.b[50 + 101 * 49], 1.0);
        assert_eq!(d.b[grid.x_edge_len() + 49 + 100 * 50], 1.0);
    }

    #[test]
    fn damping_on_rectangular_grid_is_transpose_consistent() {
        let s = Scenario2D {
            mx: 12,
            my: 9,
            dx: 0.1,
            dy: 0.1,
            dt: 0.05,
            steps: 1,
            k: 2,
            pulse: Pulse {
                x: 0.6,
                y: 0.45,
                width: 400.0,
            },
            pml: Some(PmlSpec {
                depth: 3,
                sigma_max: 10.0,
                p: 2.0,
            }),
        };
        let d = damping_vectors(&s).unwrap();
        let grid = s.grid().unwrap();
        assert_eq!(d.b.len(), grid.edge_len());
        let sx = sigma_profile_1d(14, 3, 10.0, 2.0).unwrap();
        let sy = sigma_profile_1d(11, 3, 10.0, 2.0).unwrap();
        // x-edge (i = 0, row j = 4) sits in the left layer, mid-height
        assert_eq!(d.b[4 * 13], (-(sx[0] + sy[5]) * 0.05).exp());
        // y-edge (column i = 5, row j = 0) sits in the bottom layer
        let k = grid.x_edge_len() + 5;
        assert_eq!(d.b[k], (-(sx[6] + sy[0]) * 0.05).exp());
    }

    #[test]
    fn no_layer_means_unit_damping() {
        let s = Scenario2D {
            pml: None,
            ..Scenario2D::sullivan_upml()
        };
        let d = damping_vectors(&s).unwrap();
        assert!(d.e.iter().chain(&d.b).all(|&a| a == 1.0));
    }

    #[test]
    fn pulse_samples() {
        let p = Pulse {
            x: 0.5,
            y: 0.5,
            width: 400.0,
        };
        assert_eq!(gaussian(0.5, 0.5, &p), 1.0);
        assert!((gaussian(0.5, 0.55, &p) - (-1.0f64).exp()).abs() < 1e-12);
        assert!(gaussian(0.0, 0.0, &p) < 1e-80);
        let grid = StaggeredGrid2D::new(100, 0.01, 100, 0.01).unwrap();
        let e = initial_pulse(&grid, &p);
        assert_eq!(e.len(), 102 * 102);
        assert!((e[0] - (-200.0f64).exp()).abs() < 1e-100);
    }

    #[test]
    fn validation() {
        let mut s = Scenario2D::sullivan_upml();
        s.dt = 0.006;
        assert!(s.validate().is_err());
        let mut s = Scenario2D::sullivan_upml();
        s.pml.as_mut().unwrap().depth = 50;
        assert!(s.validate().is_err());
        let mut s = Scenario2D::sullivan_upml();
        s.pml.as_mut().unwrap().sigma_max = 0.0;
        assert!(s.validate().is_err());
        let mut s = Scenario2D::sullivan_upml();
        s.pml.as_mut().unwrap().p = 0.5;
        assert!(s.validate().is_err());
        Scenario2D::sullivan_upml().validate().unwrap();
    }

    #[test]
    fn constant_field_is_a_fixed_point_without_damping() {
        let s = Scenario2D {
            mx: 6,
            my: 5,
            dx: 0.2,
            dy: 0.2,
            pml: None,
            ..Scenario2D::sullivan_upml()
        };
        let grid = s.grid().unwrap();
        let mut solver = Mimetic2D::with_state(&s, vec![0.3; grid.scalar_len()], vec![0.0; grid.edge_len()]).unwrap();
        for _ in 0..10 {
            solver.step().unwrap();
        }
        assert!(solver.state.e.iter().all(|v| (v - 0.3).abs() < 1e-15));
        assert!(solver.state.b.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn physical_b_sign_map() {
        let grid = StaggeredGrid2D::new(3, 1.0, 4, 1.0).unwrap();
        let b: Vec<f64> = (0..grid.edge_len()).map(|i| i as f64 + 1.0).collect();
        let (bx, by) = physical_b(&grid, &b);
        assert_eq!(by.len(), 4 * 4);
        assert_eq!(bx.len(), 3 * 5);
        assert_eq!(by[0], -1.0);
        assert_eq!(bx[0], 17.0);
    }

    #[test]
    fn enlarged_domain_keeps_pulse_centered() {
        let big = Scenario2D::sullivan_upml().enlarged(3);
        assert_eq!((big.mx, big.my), (300, 300));
        assert!((big.pulse.x - 1.5).abs() < 1e-12);
        assert!(big.pml.is_none());
    }
}
