//! Strong-stability-preserving Runge-Kutta integrators and step control.

use crate::dgsolver::{apply_limiters, DgSolver, LimiterConfig, SolutionField};
use crate::error::{Error, Result};
use crate::physflux::{node_max_speed, source_frequency, Direction};

/// Default Courant number.
pub const DEFAULT_CFL: f64 = 0.15;
/// Default bound on `omega * dt` for the Lorentz coupling, where `omega` is
/// the local cyclotron/plasma frequency. SSP-RK2 amplifies undamped
/// oscillations by `1 + (omega dt)^4 / 8` per step.
pub const DEFAULT_SOURCE_CFL: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkScheme {
    Ssp2,
    Ssp3,
    /// Five-stage, fourth-order SSP method.
    Ssp4,
}

/// One Shu-Osher stage: `U_i = sum_m alpha[m] U_m + beta[m] dt L(U_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl RkScheme {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(RkScheme::Ssp2),
            3 => Ok(RkScheme::Ssp3),
            4 => Ok(RkScheme::Ssp4),
            _ => Err(Error::config(format!("no SSP-RK scheme of order {order}"))),
        }
    }

    /// Scheme paired with polynomial degree `k` (`k + 1` = order).
    pub fn for_degree(k: usize) -> Result<Self> {
        Self::from_order(k + 1)
    }

    pub fn order(self) -> usize {
        match self {
            RkScheme::Ssp2 => 2,
            RkScheme::Ssp3 => 3,
            RkScheme::Ssp4 => 4,
        }
    }

    pub fn stages(self) -> Vec<Stage> {
        let st = |alpha: &[f64], beta: &[f64]| Stage { alpha: alpha.to_vec(), beta: beta.to_vec() };
        match self {
            RkScheme::Ssp2 => vec![st(&[1.0], &[1.0]), st(&[0.5, 0.5], &[0.0, 0.5])],
            RkScheme::Ssp3 => vec![
                st(&[1.0], &[1.0]),
                st(&[0.75, 0.25], &[0.0, 0.25]),
                st(&[1.0 / 3.0, 0.0, 2.0 / 3.0], &[0.0, 0.0, 2.0 / 3.0]),
            ],
            RkScheme::Ssp4 => vec![
                st(&[1.0], &[0.39175222700392]),
                st(&[0.44437049406734, 0.55562950593266], &[0.0, 0.36841059262959]),
                st(&[0.62010185138540, 0.0, 0.37989814861460], &[0.0, 0.0, 0.25189177424738]),
                st(&[0.17807995410773, 0.0, 0.0, 0.82192004589227], &[0.0, 0.0, 0.0, 0.54497475021237]),
                st(
                    &[0.00683325884039, 0.0, 0.51723167208978, 0.12759831133288, 0.34833675773694],
                    &[0.0, 0.0, 0.0, 0.08460416338212, 0.22600748319395],
                ),
            ],
        }
    }

    /// Abscissae of the stage inputs `U_0..U_{s-1}` as fractions of the step.
    pub fn stage_times(self) -> Vec<f64> {
        let stages = self.stages();
        let mut c = vec![0.0];
        for s in &stages {
            let ci = s.alpha.iter().zip(&c).map(|(a, cm)| a * cm).sum::<f64>() + s.beta.iter().sum::<f64>();
            c.push(ci);
        }
        c
    }
}

/// Vector-space operations needed by the stage engine.
pub trait RkVector: Clone {
    fn scale(&mut self, a: f64);
    fn add_scaled(&mut self, a: f64, other: &Self);
}

impl RkVector for SolutionField {
    fn scale(&mut self, a: f64) {
        for u in self.data.iter_mut() {
            for x in u.iter_mut() {
                *x *= a;
            }
        }
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        SolutionField::add_scaled(self, a, other);
    }
}

impl RkVector for f64 {
    fn scale(&mut self, a: f64) {
        *self *= a;
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        *self += a * other;
    }
}

impl RkVector for Vec<f64> {
    fn scale(&mut self, a: f64) {
        self.iter_mut().for_each(|x| *x *= a);
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        self.iter_mut().zip(other).for_each(|(x, y)| *x += a * y);
    }
}

/// One step of a Shu-Osher scheme. `post` runs on every stage output and
/// receives the stage number (1-based).
pub fn shu_osher_step<T, L, P>(scheme: RkScheme, u0: &T, t: f64, dt: f64, mut rhs: L, mut post: P) -> Result<T>
where
    T: RkVector,
    L: FnMut(&T, f64) -> Result<T>,
    P: FnMut(&mut T, usize) -> Result<()>,
{
    let stages = scheme.stages();
    let c = scheme.stage_times();
    let mut us: Vec<T> = vec![u0.clone()];
    let mut ls: Vec<Option<T>> = vec![None];
    for (i, st) in stages.iter().enumerate() {
        for m in 0..st.beta.len() {
            if st.beta[m] != 0.0 && ls[m].is_none() {
                ls[m] = Some(rhs(&us[m], t + c[m] * dt).map_err(|e| stage_error(i + 1, e))?);
            }
        }
        let mut next: Option<T> = None;
        for m in 0..st.alpha.len() {
            if st.alpha[m] != 0.0 {
                match next.as_mut() {
                    None => {
                        let mut v = us[m].clone();
                        v.scale(st.alpha[m]);
                        next = Some(v);
                    }
                    Some(v) => v.add_scaled(st.alpha[m], &us[m]),
                }
            }
        }
        let mut next = next.expect("every stage has a nonzero alpha");
        for m in 0..st.beta.len() {
            if st.beta[m] != 0.0 {
                next.add_scaled(st.beta[m] * dt, ls[m].as_ref().expect("computed above"));
            }
        }
        post(&mut next, i + 1).map_err(|e| stage_error(i + 1, e))?;
        us.push(next);
        ls.push(None);
    }
    Ok(us.pop().expect("at least one stage"))
}

fn stage_error(stage: usize, e: Error) -> Error {
    Error::Stage { step: 0, stage, source: Box::new(e) }
}

/// How the x and y limits combine into a 2D time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CflRule {
    /// `CFL * min(dx/Lx + dy/Ly)`.
    Summed,
    /// `CFL * min(1 / (Lx/dx + Ly/dy))`.
    Harmonic,
}

impl CflRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "summed" => Ok(CflRule::Summed),
            "harmonic" => Ok(CflRule::Harmonic),
            _ => Err(Error::config(format!("unknown cfl rule `{s}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CflRule::Summed => "summed",
            CflRule::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub t_final: f64,
    pub max_steps: usize,
    pub rule: CflRule,
    /// Bound on `omega * dt` when Lorentz sources are on; zero disables it.
    pub source_cfl: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            cfl: DEFAULT_CFL,
            t_final: 1.0,
            max_steps: 10_000_000,
            rule: CflRule::Harmonic,
            source_cfl: DEFAULT_SOURCE_CFL,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::config(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::config("t_final must be finite and nonnegative"));
        }
        if !(self.source_cfl >= 0.0) || !self.source_cfl.is_finite() {
            return Err(Error::config(format!("source_cfl must be finite and nonnegative, got {}", self.source_cfl)));
        }
        Ok(())
    }
}

/// Stable time step from the largest characteristic speeds per element.
pub fn compute_dt(solver: &DgSolver, field: &SolutionField, control: &StepControl) -> Result<f64> {
    let prims = field.primitives(&solver.params)?;
    let npe = field.npe();
    let spacing = solver.ops.nodes[1] - solver.ops.nodes[0];
    let mut best = f64::INFINITY;
    let mut src_best = f64::INFINITY;
    let stiff_limit = solver.sources.lorentz && control.source_cfl > 0.0;
    for e in 0..field.elements() {
        let (ix, iy) = solver.mesh.cell_of(e);
        let el = &prims[e * npe..(e + 1) * npe];
        let lx = el.iter().map(|w| node_max_speed(w, &solver.params, Direction::X)).fold(0.0, f64::max);
        let dx = spacing * solver.mesh.x.width(ix);
        let cand = match &solver.mesh.y {
            None => dx / lx,
            Some(ay) => {
                let ly = el.iter().map(|w| node_max_speed(w, &solver.params, Direction::Y)).fold(0.0, f64::max);
                let dy = spacing * ay.width(iy);
                match control.rule {
                    CflRule::Summed => dx / lx + dy / ly,
                    CflRule::Harmonic => 1.0 / (lx / dx + ly / dy),
                }
            }
        };
        best = best.min(cand);
        if stiff_limit {
            let us = &field.data[e * npe..(e + 1) * npe];
            let om = us.iter().zip(el).map(|(u, w)| source_frequency(u, w, &solver.params)).fold(0.0, f64::max);
            if om > 0.0 {
                src_best = src_best.min(control.source_cfl / om);
            }
        }
    }
    let dt = (control.cfl * best).min(src_best);
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Stalled(format!("time step {dt} from wave speeds")));
    }
    Ok(dt)
}

/// Advance one step with limiting after every stage.
pub fn step(
    solver: &DgSolver,
    field: &SolutionField,
    t: f64,
    dt: f64,
    scheme: RkScheme,
    limiters: &LimiterConfig,
) -> Result<SolutionField> {
    shu_osher_step(
        scheme,
        field,
        t,
        dt,
        |u, tt| solver.residual(u, tt),
        |u, _| apply_limiters(solver, u, limiters),
    )
}

/// Information passed to integration observers.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct IntegrationSummary {
    pub field: SolutionField,
    pub t: f64,
    pub steps: usize,
    pub dts: Vec<f64>,
}

/// Integrate from `t0` to `control.t_final`. The observer sees the initial
/// field (step 0) and every accepted step; the last step lands exactly on
/// `t_final`.
pub fn integrate<O>(
    solver: &DgSolver,
    field: SolutionField,
    t0: f64,
    scheme: RkScheme,
    control: &StepControl,
    limiters: &LimiterConfig,
    mut observer: O,
) -> Result<IntegrationSummary>
where
    O: FnMut(&StepInfo, &SolutionField) -> Result<()>,
{
    control.validate()?;
    let mut u = field;
    let mut t = t0;
    let mut dts = Vec::new();
    let done = t >= control.t_final;
    observer(&StepInfo { step: 0, t, dt: 0.0, done }, &u)?;
    let mut n = 0;
    while t < control.t_final {
        if n >= control.max_steps {
            return Err(Error::Timeout(control.max_steps));
        }
        let mut dt = compute_dt(solver, &u, control).map_err(|e| with_step(n + 1, e))?;
        let last = t + dt >= control.t_final * (1.0 - 1e-14);
        if last {
            dt = control.t_final - t;
        }
        u = step(solver, &u, t, dt, scheme, limiters).map_err(|e| with_step(n + 1, e))?;
        t = if last { control.t_final } else { t + dt };
        n += 1;
        dts.push(dt);
        observer(&StepInfo { step: n, t, dt, done: last }, &u)?;
    }
    Ok(IntegrationSummary { field: u, t, steps: n, dts })
}

fn with_step(step: usize, e: Error) -> Error {
    match e {
        Error::Stage { stage, source, .. } => Error::Stage { step, stage, source },
        other => Error::Stage { step, stage: 0, source: Box::new(other) },
    }
}
