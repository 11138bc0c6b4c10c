//! Operator-based 1D Maxwell solver: a sinusoidal soft source driving a wave
//! into a lossy dielectric slab.
//!
//! Each step is two sparse products:
//!
//! ```text
//! ex <- ca .* ex - cb .* (D hy)
//! ex[source] += amplitude * sin(2 pi f dt n)
//! ex[0], ex[m+1] <- previous ex[1], ex[m]      (simple ABC)
//! hy <- hy - 0.5 (G ex)
//! ```
//!
//! The operators are built with unit spacing; `ca`/`cb` carry the material
//! and the Courant factor. All indices are 0-based: the classic Sullivan
//! setup places its source at node 5 and the slab from node 100 in 1-based
//! terms, which are stored here as 4 and 99.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{OperatorOrder, StaggeredGrid1D};
use crate::mimetic::MimeticGrid;
use crate::sparse::SparseMatrix;
use crate::yee::{self, HClosure, YeeBoundary, YeeCoefficients, YeeState, COURANT_FACTOR};

/// Speed of light used by the 1D scenario (m/s).
pub const C0: f64 = 3e8;
/// Vacuum permittivity used by the 1D scenario (F/m).
pub const EPS0: f64 = 8.85419e-12;
/// Default snapshot cadence in steps.
pub const SNAPSHOT_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source1D {
    /// Scalar location (0-based).
    pub index: usize,
    /// Hz.
    pub frequency: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slab {
    /// First scalar location inside the slab (0-based); the slab runs to the
    /// right boundary inclusive.
    pub start: usize,
    pub eps_r: f64,
    /// S/m.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario1D {
    pub m: usize,
    pub k: u32,
    /// Cell size in metres. Only enters the Courant number and the loss term
    /// through `dt`; the operators use unit spacing.
    pub dz: f64,
    /// Seconds.
    pub dt: f64,
    pub steps: usize,
    pub eps0: f64,
    pub source: Source1D,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slab: Option<Slab>,
}

impl Scenario1D {
    /// 200 cells, 700 MHz source, slab with eps_r = 4 and sigma = 0.04 S/m
    /// over the right half, 500 steps at Courant number 0.5.
    pub fn sullivan() -> Self {
        Self {
            m: 200,
            k: 2,
            dz: 0.01,
            dt: 0.01 / (2.0 * 3e8),
            steps: 500,
            eps0: EPS0,
            source: Source1D {
                index: 4,
                frequency: 700e6,
                amplitude: 1.0,
            },
            slab: Some(Slab {
                start: 99,
                eps_r: 4.0,
                sigma: 0.04,
            }),
        }
    }

    /// Same as [`Scenario1D::sullivan`] without the slab.
    pub fn sullivan_free_space() -> Self {
        Self {
            slab: None,
            ..Self::sullivan()
        }
    }

    pub fn order(&self) -> Result<OperatorOrder> {
        OperatorOrder::new(self.k)
    }

    pub fn grid(&self) -> Result<StaggeredGrid1D> {
        StaggeredGrid1D::new(self.m, 1.0)
    }

    pub fn courant(&self) -> f64 {
        yee::cfl_check(self.dt, self.dz, C0).courant
    }

    pub fn validate(&self) -> Result<()> {
        self.order()?;
        self.grid()?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(name, format!("{v} must be finite and positive")))
            }
        };
        positive("dz", self.dz)?;
        positive("dt", self.dt)?;
        positive("eps0", self.eps0)?;
        let courant = self.courant();
        if (courant - COURANT_FACTOR).abs() > 1e-9 {
            return Err(Error::validation(
                "dt",
                format!("Courant number c0*dt/dz = {courant}; the normalized update requires 0.5"),
            ));
        }
        let src = &self.source;
        if src.index < 2 || src.index + 1 > self.m {
            return Err(Error::validation(
                "source.index",
                format!("{} outside [2, {}]", src.index, self.m - 1),
            ));
        }
        if !(src.frequency.is_finite() && src.frequency >= 0.0) {
            return Err(Error::validation("source.frequency", "must be finite and non-negative"));
        }
        if !src.amplitude.is_finite() {
            return Err(Error::validation("source.amplitude", "must be finite"));
        }
        if let Some(slab) = &self.slab {
            if slab.start < 2 || slab.start > self.m {
                return Err(Error::validation(
                    "slab.start",
                    format!("{} outside [2, {}]", slab.start, self.m),
                ));
            }
            if slab.eps_r.is_nan() || slab.eps_r < 1.0 {
                return Err(Error::validation("slab.eps_r", "must be >= 1"));
            }
            if slab.sigma.is_nan() || slab.sigma < 0.0 {
                return Err(Error::validation("slab.sigma", "must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn source_value(&self, n: usize) -> f64 {
        let s = &self.source;
        s.amplitude * (2.0 * std::f64::consts::PI * s.frequency * self.dt * n as f64).sin()
    }
}

/// Per-location `ca`/`cb` over the `m + 2` scalar locations.
pub fn material_vectors(scenario: &Scenario1D) -> Result<YeeCoefficients> {
    let len = scenario.m + 2;
    let mut eps_r = vec![1.0; len];
    let mut sigma = vec![0.0; len];
    if let Some(slab) = &scenario.slab {
        eps_r[slab.start..].fill(slab.eps_r);
        sigma[slab.start..].fill(slab.sigma);
    }
    yee::lossy_coefficients(&eps_r, &sigma, scenario.dt, scenario.eps0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimeticState1D {
    /// `m + 2` scalar values.
    pub ex: Vec<f64>,
    /// `m + 1` edge values, half a step ahead of `ex`.
    pub hy: Vec<f64>,
    pub n: usize,
}

impl MimeticState1D {
    pub fn zeros(m: usize) -> Self {
        Self {
            ex: vec![0.0; m + 2],
            hy: vec![0.0; m + 1],
            n: 0,
        }
    }
}

/// One step of the 1D update for step index `n` (1-based, as the source
/// phase uses `n`).
pub fn step_1d(
    state: &mut MimeticState1D,
    coeffs: &YeeCoefficients,
    div: &SparseMatrix,
    grad: &SparseMatrix,
    scenario: &Scenario1D,
    n: usize,
) -> Result<()> {
    let mut dh = vec![0.0; state.ex.len()];
    let mut ge = vec![0.0; state.hy.len()];
    advance(state, coeffs, div, grad, scenario, n, &mut dh, &mut ge)
}

#[allow(clippy::too_many_arguments)]
fn advance(
    state: &mut MimeticState1D,
    coeffs: &YeeCoefficients,
    div: &SparseMatrix,
    grad: &SparseMatrix,
    scenario: &Scenario1D,
    n: usize,
    dh: &mut [f64],
    ge: &mut [f64],
) -> Result<()> {
    let ex = &mut state.ex;
    let last = ex.len() - 1;
    let (left, right) = (ex[1], ex[last - 1]);

    div.matvec_into(&state.hy, dh)?;
    for ((e, d), (ca, cb)) in ex.iter_mut().zip(dh.iter()).zip(coeffs.ca.iter().zip(&coeffs.cb)) {
        *e = ca * *e - cb * d;
    }
    ex[scenario.source.index] += scenario.source_value(n);
    ex[0] = left;
    ex[last] = right;

    grad.matvec_into(ex, ge)?;
    for (h, g) in state.hy.iter_mut().zip(ge.iter()) {
        *h -= COURANT_FACTOR * g;
    }
    state.n = n;
    Ok(())
}

/// Stepper that owns the operators, coefficients and scratch space.
#[derive(Debug, Clone)]
pub struct Mimetic1D {
    pub scenario: Scenario1D,
    pub div: SparseMatrix,
    pub grad: SparseMatrix,
    pub coeffs: YeeCoefficients,
    pub state: MimeticState1D,
    dh: Vec<f64>,
    ge: Vec<f64>,
}

impl Mimetic1D {
    pub fn new(scenario: &Scenario1D) -> Result<Self> {
        scenario.validate()?;
        let grid = scenario.grid()?;
        let k = scenario.order()?;
        let m = scenario.m;
        Ok(Self {
            scenario: scenario.clone(),
            div: grid.divergence(k),
            grad: grid.gradient(k),
            coeffs: material_vectors(scenario)?,
            state: MimeticState1D::zeros(m),
            dh: vec![0.0; m + 2],
            ge: vec![0.0; m + 1],
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let n = self.state.n + 1;
        advance(
            &mut self.state,
            &self.coeffs,
            &self.div,
            &self.grad,
            &self.scenario,
            n,
            &mut self.dh,
            &mut self.ge,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot1D {
    pub step: usize,
    pub ex: Vec<f64>,
    pub hy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run1D {
    pub snapshots: Vec<Snapshot1D>,
    pub final_state: MimeticState1D,
}

/// Capture steps: 0, every multiple of `every`, and the last step.
pub fn capture_steps(steps: usize, every: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=steps).filter(|s| every > 0 && s % every == 0).collect();
    if out.first() != Some(&0) {
        out.insert(0, 0);
    }
    if out.last() != Some(&steps) {
        out.push(steps);
    }
    out
}

pub fn run_1d(scenario: &Scenario1D, snapshot_every: usize) -> Result<Run1D> {
    let mut solver = Mimetic1D::new(scenario)?;
    let captures = capture_steps(scenario.steps, snapshot_every);
    let mut snapshots = Vec::with_capacity(captures.len());
    let mut next = captures.iter().peekable();
    loop {
        let n = solver.state.n;
        if next.peek() == Some(&&n) {
            next.next();
            snapshots.push(Snapshot1D {
                step: n,
                ex: solver.state.ex.clone(),
                hy: solver.state.hy.clone(),
            });
        }
        if n == scenario.steps {
            break;
        }
        solver.step()?;
    }
    Ok(Run1D {
        snapshots,
        final_state: solver.state,
    })
}

/// Runs the scenario with the index-loop Yee solver on the same wiring: one
/// more cell than `m` so nodes line up with the `m + 2` scalar locations,
/// the same coefficients, source node and ABC.
pub fn run_yee_1d(scenario: &Scenario1D, closure: HClosure, snapshot_every: usize) -> Result<Run1D> {
    scenario.validate()?;
    let coeffs = material_vectors(scenario)?;
    let boundary = YeeBoundary { abc: true, closure };
    let mut state = YeeState::new(scenario.m + 1);
    let captures = capture_steps(scenario.steps, snapshot_every);
    let mut snapshots = Vec::with_capacity(captures.len());
    for n in 0..=scenario.steps {
        if n > 0 {
            let source = (scenario.source.index, scenario.source_value(n));
            yee::yee_step(&mut state, &coeffs, Some(source), boundary);
        }
        if captures.binary_search(&n).is_ok() {
            snapshots.push(Snapshot1D {
                step: n,
                ex: state.ex.clone(),
                hy: state.hy.clone(),
            });
        }
    }
    Ok(Run1D {
        snapshots,
        final_state: MimeticState1D {
            ex: state.ex,
            hy: state.hy,
            n: state.n,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sullivan_constants() {
        let s = Scenario1D::sullivan();
        assert_eq!(s.m, 200);
        assert_eq!(s.k, 2);
        assert_eq!(s.dt, 0.01 / (2.0 * 3e8));
        assert_eq!(s.steps, 500);
        assert_eq!(s.source.index, 4);
        assert_eq!(s.source.frequency, 700e6);
        assert_eq!(s.source.amplitude, 1.0);
        let slab = s.slab.as_ref().unwrap();
        assert_eq!((slab.start, slab.eps_r, slab.sigma), (99, 4.0, 0.04));
        assert_eq!(s.eps0, 8.85419e-12);
        assert!((s.courant() - 0.5).abs() < 1e-12);
        s.validate().unwrap();
    }

    #[test]
    fn material_profile() {
        let c = material_vectors(&Scenario1D::sullivan()).unwrap();
        assert_eq!(c.len(), 202);
        assert_eq!((c.ca[50], c.cb[50]), (1.0, 0.5));
        assert_eq!((c.ca[98], c.cb[98]), (1.0, 0.5));
        assert!((c.ca[150] - 0.981352).abs() < 1e-6);
        assert!((c.cb[150] - 0.123835).abs() < 1e-6);
        assert_eq!(c.ca[99], c.ca[201]);
        let free = material_vectors(&Scenario1D::sullivan_free_space()).unwrap();
        assert!(free.ca.iter().all(|v| *v == 1.0));
        assert!(free.cb.iter().all(|v| *v == 0.5));
    }

    #[test]
    fn validation_errors() {
        let mut s = Scenario1D::sullivan();
        s.source.index = 1;
        assert!(s.validate().is_err());
        let mut s = Scenario1D::sullivan();
        s.source.index = 200;
        assert!(s.validate().is_err());
        let mut s = Scenario1D::sullivan();
        s.slab.as_mut().unwrap().start = 201;
        assert!(s.validate().is_err());
        let mut s = Scenario1D::sullivan();
        s.dt *= 2.0;
        assert!(matches!(s.validate(), Err(Error::Validation { ref field, .. }) if field == "dt"));
        let mut s = Scenario1D::sullivan();
        s.k = 4;
        assert_eq!(s.validate(), Err(Error::OrderNotImplemented(4)));
        let mut s = Scenario1D::sullivan();
        s.m = 2;
        assert!(s.validate().is_err());
    }

    #[test]
    fn first_step_injects_source_only() {
        let s = Scenario1D::sullivan();
        let mut solver = Mimetic1D::new(&s).unwrap();
        solver.step().unwrap();
        let expected = (2.0 * std::f64::consts::PI * 700e6 * s.dt).sin();
        for (i, v) in solver.state.ex.iter().enumerate() {
            if i == 4 {
                assert_eq!(*v, expected);
            } else {
                assert_eq!(*v, 0.0, "ex[{i}]");
            }
        }
        assert_eq!(solver.state.n, 1);
    }

    #[test]
    fn zero_amplitude_keeps_zero_state() {
        let mut s = Scenario1D::sullivan();
        s.source.amplitude = 0.0;
        let run = run_1d(&s, 100).unwrap();
        assert!(run.final_state.ex.iter().all(|v| *v == 0.0));
        assert!(run.final_state.hy.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_field_is_stationary() {
        let mut s = Scenario1D::sullivan_free_space();
        s.source.amplitude = 0.0;
        let c = material_vectors(&s).unwrap();
        let grid = s.grid().unwrap();
        let (d, g) = (
            grid.divergence(OperatorOrder::SECOND),
            grid.gradient(OperatorOrder::SECOND),
        );
        let mut state = MimeticState1D::zeros(s.m);
        state.ex.fill(0.75);
        step_1d(&mut state, &c, &d, &g, &s, 1).unwrap();
        assert!(state.ex.iter().all(|v| *v == 0.75));
        assert!(state.hy.iter().all(|v| v.abs() < 1e-15), "{:?}", &state.hy[..3]);
    }

    #[test]
    fn capture_schedule() {
        assert_eq!(capture_steps(500, 50).len(), 11);
        assert_eq!(capture_steps(140, 70), vec![0, 70, 140]);
        assert_eq!(capture_steps(7, 3), vec![0, 3, 6, 7]);
        assert_eq!(capture_steps(0, 50), vec![0]);
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let mut s = Scenario1D::sullivan();
        s.steps = 0;
        let run = run_1d(&s, 50).unwrap();
        assert_eq!(run.snapshots.len(), 1);
        assert_eq!(run.final_state, MimeticState1D::zeros(200));
    }

    #[test]
    fn stepper_matches_free_function() {
        let s = Scenario1D::sullivan();
        let mut solver = Mimetic1D::new(&s).unwrap();
        let mut state = MimeticState1D::zeros(s.m);
        for n in 1..=40 {
            solver.step().unwrap();
            step_1d(&mut state, &solver.coeffs, &solver.div, &solver.grad, &s, n).unwrap();
        }
        assert_eq!(state, solver.state);
    }
}
