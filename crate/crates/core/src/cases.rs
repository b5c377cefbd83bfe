//! Benchmark configurations: initial data, exact or reference solutions,
//! forcing terms and the convergence sweep.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::dgsolver::{
    l1_error_in, Axis, BoundaryKind, DgSolver, ErrorNorm, Forcing, LimiterConfig, Mesh, Quantity, SolutionField, SourceConfig,
};
use crate::error::{Error, Result};
use crate::state::{em, EmState, FullPrim, GasParams, SpeciesPrim, EM, NVAR};
use crate::timeint::{integrate, IntegrationSummary, RkScheme, StepControl, StepInfo};

pub type InitialFn = Arc<dyn Fn(f64, f64) -> FullPrim + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64, f64, f64) -> FullPrim + Send + Sync>;

/// Names accepted by [`CaseSpec::by_name`].
pub const CASE_NAMES: [&str; 8] =
    ["accuracy_forced", "cp_waves", "brio_wu", "current_sheet", "orszag_tang", "blast_weak", "blast_strong", "gem"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent {
    pub lo: f64,
    pub hi: f64,
    pub bc_lo: BoundaryKind,
    pub bc_hi: BoundaryKind,
    pub cells: usize,
}

impl Extent {
    fn new(lo: f64, hi: f64, bc: BoundaryKind, cells: usize) -> Self {
        Extent { lo, hi, bc_lo: bc, bc_hi: bc, cells }
    }

    pub fn axis(&self, cells: usize) -> Result<Axis> {
        Axis::uniform(self.lo, self.hi, cells, self.bc_lo, self.bc_hi)
    }
}

#[derive(Clone)]
pub struct CaseSpec {
    pub name: &'static str,
    pub x: Extent,
    pub y: Option<Extent>,
    pub params: GasParams,
    pub t0: f64,
    pub t_final: f64,
    /// Polynomial degree used when none is requested.
    pub default_k: usize,
    pub ic: InitialFn,
    pub exact: Option<ExactFn>,
    pub forcing: Option<Forcing>,
    pub limiter: LimiterConfig,
    /// Quantities compared against `exact` in error reports.
    pub error_quantities: Vec<Quantity>,
    /// `B0` for the reconnection-flux diagnostic.
    pub reconnection_b0: Option<f64>,
}

impl std::fmt::Debug for CaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaseSpec")
            .field("name", &self.name)
            .field("x", &self.x)
            .field("y", &self.y)
            .field("params", &self.params)
            .field("t0", &self.t0)
            .field("t_final", &self.t_final)
            .finish_non_exhaustive()
    }
}

/// Per-run knobs layered over a case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub k: usize,
    pub cells: usize,
    pub cells_y: Option<usize>,
    pub scheme: RkScheme,
    pub control: StepControl,
    pub limiter: LimiterConfig,
    pub threads: usize,
}

impl CaseSpec {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "accuracy_forced" => Ok(case_accuracy_forced()),
            "cp_waves" => Ok(case_cp_waves()),
            "brio_wu" => Ok(case_brio_wu()),
            "brio_wu_rmhd" => Ok(case_brio_wu_rmhd()),
            "current_sheet" => Ok(case_current_sheet()),
            "orszag_tang" => Ok(case_orszag_tang()),
            "blast_weak" => Ok(case_blast(0.1)),
            "blast_strong" => Ok(case_blast(1.0)),
            "gem" => Ok(case_gem()),
            _ => Err(Error::config(format!("unknown case `{name}` (expected one of {})", CASE_NAMES.join(", ")))),
        }
    }

    pub fn dim(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    pub fn mesh(&self, nx: usize, ny: Option<usize>) -> Result<Mesh> {
        let ax = self.x.axis(nx)?;
        Ok(match &self.y {
            None => Mesh::one_d(ax),
            Some(ey) => Mesh::two_d(ax, ey.axis(ny.unwrap_or(ey.cells))?),
        })
    }

    /// Solver configured with the case's physics and source terms.
    pub fn solver(&self, k: usize, nx: usize, ny: Option<usize>) -> Result<DgSolver> {
        let sources = SourceConfig { forcing: self.forcing.clone(), ..SourceConfig::default() };
        Ok(DgSolver::new(self.mesh(nx, ny)?, k, self.params)?.with_sources(sources))
    }

    pub fn initial_field(&self, solver: &DgSolver) -> Result<SolutionField> {
        let ic = self.ic.clone();
        solver.project(move |x, y| ic(x, y))
    }

    /// Default options: the case's degree and mesh, paired RK order, CFL 0.15.
    pub fn default_options(&self) -> RunOptions {
        let k = self.default_k;
        RunOptions {
            k,
            cells: self.x.cells,
            cells_y: self.y.map(|e| e.cells),
            scheme: RkScheme::for_degree(k).expect("default degree is valid"),
            control: StepControl { t_final: self.t_final, ..StepControl::default() },
            limiter: self.limiter,
            threads: crate::dgsolver::parallel::default_threads(),
        }
    }

    /// Evaluate the initial data on a grid `samples` points per direction
    /// and fail on the first inadmissible state.
    pub fn check_initial_data(&self, samples: usize) -> Result<()> {
        let pts = |e: &Extent| -> Vec<f64> {
            (0..samples).map(|i| e.lo + (e.hi - e.lo) * i as f64 / (samples - 1) as f64).collect()
        };
        let xs = pts(&self.x);
        let ys = self.y.as_ref().map(pts).unwrap_or_else(|| vec![0.0]);
        for &y in &ys {
            for &x in &xs {
                self.ic.as_ref()(x, y)
                    .to_conserved(&self.params)
                    .map_err(|e| Error::admissibility(format!("{}: initial state at ({x}, {y}): {e}", self.name)))?;
            }
        }
        Ok(())
    }

    /// Run the case from `t0` with the given options.
    pub fn run<O>(&self, opts: &RunOptions, observer: O) -> Result<IntegrationSummary>
    where
        O: FnMut(&StepInfo, &SolutionField) -> Result<()>,
    {
        let solver = self.solver(opts.k, opts.cells, opts.cells_y)?.with_threads(opts.threads);
        let u0 = self.initial_field(&solver)?;
        integrate(&solver, u0, self.t0, opts.scheme, &opts.control, &opts.limiter, observer)
    }

    /// Quadrature L1 error of `q` against the exact solution at time `t`.
    pub fn error(&self, solver: &DgSolver, field: &SolutionField, q: Quantity, t: f64) -> Result<f64> {
        self.error_in(solver, field, q, t, ErrorNorm::Quadrature)
    }

    pub fn error_in(&self, solver: &DgSolver, field: &SolutionField, q: Quantity, t: f64, norm: ErrorNorm) -> Result<f64> {
        let exact = self.exact.as_ref().ok_or_else(|| Error::config(format!("case {} has no exact solution", self.name)))?;
        let params = self.params;
        let mut failure = None;
        let err = l1_error_in(solver, field, q, norm, |x, y| {
            let w = exact(x, y, t);
            match w.to_conserved(&params) {
                Ok(u) => q.eval(&u.to_array(), &w),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(err),
        }
    }
}

fn prim(rho: f64, v: [f64; 3], p: f64) -> SpeciesPrim {
    SpeciesPrim::new(rho, v[0], v[1], v[2], p)
}

fn gas(gamma: f64, r_i: f64, r_e: f64) -> GasParams {
    GasParams { gamma_i: gamma, gamma_e: gamma, r_i, r_e, ..GasParams::default() }
}

/// Smooth forced problem with a travelling density wave.
pub fn case_accuracy_forced() -> CaseSpec {
    let params = gas(5.0 / 3.0, 1.0, -2.0);
    let exact = |x: f64, _y: f64, t: f64| {
        let s = (2.0 * PI * (x - 0.5 * t)).sin();
        let fluid = prim(2.0 + s, [0.5, 0.0, 0.0], 1.0);
        FullPrim { ion: fluid, electron: fluid, em: EmState { by: 2.0 * s, ez: -s, ..EmState::default() } }
    };
    let chi = params.chi;
    let forcing: Forcing = Arc::new(move |x, _y, t| {
        let arg = 2.0 * PI * (x - 0.5 * t);
        let rho = 2.0 + arg.sin();
        let mut r = [0.0; NVAR];
        r[EM + em::EX] = -rho / 3f64.sqrt();
        r[EM + em::EZ] = -3.0 * PI * arg.cos();
        r[EM + em::PHI] = 2.0 * chi * rho / 3f64.sqrt();
        r
    });
    CaseSpec {
        name: "accuracy_forced",
        x: Extent::new(0.0, 1.0, BoundaryKind::Periodic, 32),
        y: None,
        params,
        t0: 0.0,
        t_final: 2.0,
        default_k: 1,
        ic: Arc::new(move |x, y| exact(x, y, 0.0)),
        exact: Some(Arc::new(exact)),
        forcing: Some(forcing),
        limiter: LimiterConfig::smooth(),
        error_quantities: vec![Quantity::Density(crate::state::Species::Ion)],
        reconnection_b0: None,
    }
}

/// Circularly polarized superluminal wave in a pair plasma.
pub fn case_cp_waves() -> CaseSpec {
    let k = 2.0 * PI;
    let omega = 2.0 * PI * 2f64.sqrt();
    let v0 = -1.0 / 5f64.sqrt();
    let b0 = 1.0;
    let e0 = -omega / k;
    let exact = move |x: f64, _y: f64, t: f64| {
        let (s, c) = (k * x - omega * t).sin_cos();
        let ion = prim(1.0, [0.0, v0 * c, -v0 * s], 0.25);
        let electron = prim(1.0, [0.0, -v0 * c, v0 * s], 0.25);
        FullPrim { ion, electron, em: EmState { by: b0 * c, bz: -b0 * s, ey: e0 * s, ez: e0 * c, ..EmState::default() } }
    };
    CaseSpec {
        name: "cp_waves",
        x: Extent::new(0.0, 1.0, BoundaryKind::Periodic, 32),
        y: None,
        params: gas(4.0 / 3.0, 2.0 * PI, -2.0 * PI),
        t0: 0.0,
        t_final: 1.0 / 2f64.sqrt(),
        default_k: 1,
        ic: Arc::new(move |x, y| exact(x, y, 0.0)),
        exact: Some(Arc::new(exact)),
        forcing: None,
        limiter: LimiterConfig::smooth(),
        error_quantities: vec![Quantity::Conserved(EM + em::BY), Quantity::Conserved(EM + em::EY)],
        reconnection_b0: None,
    }
}

fn brio_wu_with(name: &'static str, r: f64) -> CaseSpec {
    let ic = |x: f64, _y: f64| {
        let (rho, p, by) = if x < 0.0 { (0.5, 0.5, (4.0 * PI).sqrt()) } else { (0.0625, 0.05, -(4.0 * PI).sqrt()) };
        let fluid = SpeciesPrim::at_rest(rho, p);
        FullPrim { ion: fluid, electron: fluid, em: EmState { bx: PI.sqrt(), by, ..EmState::default() } }
    };
    CaseSpec {
        name,
        x: Extent::new(-0.5, 0.5, BoundaryKind::Neumann, 400),
        y: None,
        params: GasParams { source_scale: 4.0 * PI, ..gas(2.0, r, -r) },
        t0: 0.0,
        t_final: 0.4,
        default_k: 1,
        ic: Arc::new(ic),
        exact: None,
        forcing: None,
        limiter: LimiterConfig::default(),
        error_quantities: Vec::new(),
        reconnection_b0: None,
    }
}

/// Two-fluid relativistic Brio-Wu shock tube.
pub fn case_brio_wu() -> CaseSpec {
    brio_wu_with("brio_wu", 1e3 / (4.0 * PI).sqrt())
}

/// Brio-Wu with ten times larger charge-to-mass ratios, close to the RMHD limit.
pub fn case_brio_wu_rmhd() -> CaseSpec {
    brio_wu_with("brio_wu_rmhd", 1e4 / (4.0 * PI).sqrt())
}

/// Resistive self-similar current sheet; the reference is the erf profile.
pub fn case_current_sheet() -> CaseSpec {
    let (b0, eta, r, rho) = (1.0, 0.01, 1e3, 0.5);
    let d = eta;
    let exact = move |x: f64, _y: f64, t: f64| {
        let vz = b0 / (r * rho * (PI * d * t).sqrt()) * (-x * x / (4.0 * d * t)).exp();
        FullPrim {
            ion: prim(rho, [0.0, 0.0, vz], 25.0),
            electron: prim(rho, [0.0, 0.0, -vz], 25.0),
            em: EmState { by: b0 * libm::erf(x / (2.0 * (d * t).sqrt())), ..EmState::default() },
        }
    };
    CaseSpec {
        name: "current_sheet",
        x: Extent::new(-1.5, 1.5, BoundaryKind::Neumann, 400),
        y: None,
        params: GasParams { eta, ..gas(4.0 / 3.0, r, -r) },
        t0: 1.0,
        t_final: 9.0,
        default_k: 2,
        ic: Arc::new(move |x, y| exact(x, y, 1.0)),
        exact: Some(Arc::new(exact)),
        forcing: None,
        limiter: LimiterConfig::smooth(),
        error_quantities: vec![Quantity::Conserved(EM + em::BY)],
        reconnection_b0: None,
    }
}

/// Relativistic two-fluid Orszag-Tang vortex.
pub fn case_orszag_tang() -> CaseSpec {
    let ic = |x: f64, y: f64| {
        let v = [-(2.0 * PI * y).sin() / 2.0, (2.0 * PI * x).sin() / 2.0, 0.0];
        let fluid = prim(25.0 / (72.0 * PI), v, 5.0 / (24.0 * PI));
        let (bx, by) = (-(2.0 * PI * y).sin(), (4.0 * PI * x).sin());
        // E = -v x B with B_z = 0.
        let ez = -(v[0] * by - v[1] * bx);
        FullPrim { ion: fluid, electron: fluid, em: EmState { bx, by, ez, ..EmState::default() } }
    };
    let r = 1e3 / (4.0 * PI).sqrt();
    CaseSpec {
        name: "orszag_tang",
        x: Extent::new(0.0, 1.0, BoundaryKind::Periodic, 64),
        y: Some(Extent::new(0.0, 1.0, BoundaryKind::Periodic, 64)),
        params: GasParams { source_scale: 4.0 * PI, ..gas(5.0 / 3.0, r, -r) },
        t0: 0.0,
        t_final: 1.0,
        default_k: 2,
        ic: Arc::new(ic),
        exact: None,
        forcing: None,
        // M = 0 flattens the smooth vortex before the shocks form.
        limiter: LimiterConfig { tvb_m: 100.0, ..LimiterConfig::default() },
        error_quantities: Vec::new(),
        reconnection_b0: None,
    }
}

/// Cylindrical blast wave in a uniform field `B_x = b0`.
pub fn case_blast(b0: f64) -> CaseSpec {
    let (rho_in, p_in, rho_out, p_out) = (1e-2, 1.0, 1e-4, 5e-4);
    let ic = move |x: f64, y: f64| {
        let r = x.hypot(y);
        // Linear in r between 0.8 and 1.
        let s = ((r - 0.8) / 0.2).clamp(0.0, 1.0);
        let rho = rho_in + s * (rho_out - rho_in);
        let p = p_in + s * (p_out - p_in);
        let fluid = SpeciesPrim::at_rest(0.5 * rho, p);
        FullPrim { ion: fluid, electron: fluid, em: EmState { bx: b0, ..EmState::default() } }
    };
    CaseSpec {
        name: if b0 == 1.0 { "blast_strong" } else { "blast_weak" },
        x: Extent::new(-6.0, 6.0, BoundaryKind::Neumann, 100),
        y: Some(Extent::new(-6.0, 6.0, BoundaryKind::Neumann, 100)),
        params: gas(4.0 / 3.0, 1e3, -1e3),
        t0: 0.0,
        t_final: 4.0,
        default_k: 2,
        ic: Arc::new(ic),
        exact: None,
        forcing: None,
        limiter: LimiterConfig::default(),
        error_quantities: Vec::new(),
        reconnection_b0: None,
    }
}

/// GEM reconnection amplitude of the flux perturbation.
pub const GEM_PSI0: f64 = 0.1;

/// Two-fluid relativistic GEM reconnection problem.
///
/// Harris sheet `B_x = B0 tanh(y/d)` with the pressure balanced per species
/// and the drift velocities chosen so the initial current matches the curl of `B`.
pub fn case_gem() -> CaseSpec {
    let (lx, ly) = (8.0 * PI, 4.0 * PI);
    let (b0, d, psi0) = (1.0, 1.0, GEM_PSI0);
    let mass_ratio = 25.0;
    let ic = move |x: f64, y: f64| {
        let sech2 = 1.0 / (y / d).cosh().powi(2);
        let n = sech2 + 0.2;
        let p = 0.2 + b0 * b0 * sech2 / 4.0;
        let (kx, ky) = (2.0 * PI / lx, PI / ly);
        let (cx, sx, cy, sy) = ((kx * x).cos(), (kx * x).sin(), (ky * y).cos(), (ky * y).sin());
        let bx = b0 * (y / d).tanh() - b0 * psi0 * ky * cx * sy;
        let by = b0 * psi0 * kx * sx * cy;
        // j_z = dB_y/dx - dB_x/dy of the perturbed field, carried equally by
        // both species; an uncarried curl would radiate the perturbation away.
        let jz = b0 * psi0 * (kx * kx + ky * ky) * cx * cy - b0 * sech2 / d;
        let u = jz / (2.0 * n);
        let vz = u / (1.0 + u * u).sqrt();
        FullPrim {
            ion: prim(n, [0.0, 0.0, vz], p),
            electron: prim(n / mass_ratio, [0.0, 0.0, -vz], p),
            em: EmState { bx, by, ..EmState::default() },
        }
    };
    CaseSpec {
        name: "gem",
        x: Extent::new(-lx / 2.0, lx / 2.0, BoundaryKind::Periodic, 128),
        y: Some(Extent::new(-ly / 2.0, ly / 2.0, BoundaryKind::ConductingWall, 64)),
        params: GasParams { eta: 0.01, ..gas(4.0 / 3.0, 1.0, -mass_ratio) },
        t0: 0.0,
        t_final: 40.0,
        default_k: 2,
        ic: Arc::new(ic),
        exact: None,
        forcing: None,
        // Smooth until well past t = 40; minmod would smear the sheet.
        limiter: LimiterConfig::smooth(),
        error_quantities: Vec::new(),
        reconnection_b0: Some(b0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub order: usize,
    pub cells: usize,
    /// Quadrature L1 error.
    pub error: f64,
    /// Same error in the node-sum norm.
    pub node_sum: f64,
    /// `log2(e_{N/2} / e_N)` against the previous row of the same order.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub quantity: Quantity,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn rows_for(&self, order: usize) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.order == order)
    }
}

/// Observed orders `log2(e_i / e_{i+1})` for successive refinements by two.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Run every (order, N) pair to `t_final` and report the L1 error of each
/// quantity, one report per quantity. `order` is the formal order k + 1 and
/// selects the paired RK scheme; everything else comes from `base`.
pub fn convergence_sweep(
    case: &CaseSpec,
    orders: &[usize],
    resolutions: &[usize],
    quantities: &[Quantity],
    base: &RunOptions,
) -> Result<Vec<ConvergenceReport>> {
    let mut reports: Vec<ConvergenceReport> = quantities
        .iter()
        .map(|&quantity| ConvergenceReport { case: case.name.to_string(), quantity, rows: Vec::new() })
        .collect();
    for &order in orders {
        let k = order
            .checked_sub(1)
            .filter(|k| (1..=3).contains(k))
            .ok_or_else(|| Error::config(format!("order {order} not in 2..=4")))?;
        let mut prev: Vec<Option<(usize, f64)>> = vec![None; quantities.len()];
        for &n in resolutions {
            let annotate = |e: Error| Error::config(format!("{} order {order} N={n}: {e}", case.name));
            let opts = RunOptions {
                k,
                cells: n,
                cells_y: case.y.map(|_| n),
                scheme: RkScheme::from_order(order).map_err(annotate)?,
                ..*base
            };
            let solver = case.solver(k, n, opts.cells_y).map_err(annotate)?.with_threads(base.threads);
            let out = case.run(&opts, |_, _| Ok(())).map_err(annotate)?;
            for (i, &q) in quantities.iter().enumerate() {
                let error = case.error(&solver, &out.field, q, out.t).map_err(annotate)?;
                let node_sum = case.error_in(&solver, &out.field, q, out.t, ErrorNorm::NodeSum).map_err(annotate)?;
                let rate = prev[i].filter(|&(pn, _)| pn * 2 == n).map(|(_, pe)| (pe / error).log2());
                reports[i].rows.push(ConvergenceRow { order, cells: n, error, node_sum, rate });
                prev[i] = Some((n, error));
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Species;

    #[test]
    fn every_case_has_admissible_initial_data() {
        for name in CASE_NAMES.iter().chain(["brio_wu_rmhd"].iter()) {
            let c = CaseSpec::by_name(name).unwrap();
            assert_eq!(&c.name, name);
            // Ten times the default resolution in each direction.
            let samples = if c.dim() == 1 { 10 * c.x.cells } else { 4 * c.x.cells };
            c.check_initial_data(samples).unwrap();
        }
        assert!(CaseSpec::by_name("nope").is_err());
    }

    #[test]
    fn exact_solutions_match_initial_data() {
        for name in ["accuracy_forced", "cp_waves", "current_sheet"] {
            let c = CaseSpec::by_name(name).unwrap();
            let ex = c.exact.clone().unwrap();
            for i in 0..50 {
                let x = c.x.lo + (c.x.hi - c.x.lo) * i as f64 / 49.0;
                assert_eq!(c.ic.as_ref()(x, 0.0), ex(x, 0.0, c.t0));
            }
        }
    }

    #[test]
    fn forcing_balances_the_exact_solution() {
        // Pointwise residual of the continuous system with central differences.
        let c = case_accuracy_forced();
        let ex = c.exact.clone().unwrap();
        let f = c.forcing.clone().unwrap();
        let p = c.params;
        let h = 1e-5;
        let cons = |x: f64, t: f64| ex(x, 0.0, t).to_conserved(&p).unwrap().to_array();
        let flux = |x: f64, t: f64| {
            let w = ex(x, 0.0, t);
            crate::physflux::full_flux(&cons(x, t), &w, &p, crate::physflux::Direction::X)
        };
        for &(x, t) in &[(0.1, 0.0), (0.37, 0.4), (0.8, 1.3)] {
            let w = ex(x, 0.0, t);
            let u = cons(x, t);
            let mut src = crate::physflux::lorentz_source(&u, &w, &p);
            let r = f(x, 0.0, t);
            for k in 0..NVAR {
                let dt = (cons(x, t + h)[k] - cons(x, t - h)[k]) / (2.0 * h);
                let dx = (flux(x + h, t)[k] - flux(x - h, t)[k]) / (2.0 * h);
                src[k] += r[k];
                assert!((dt + dx - src[k]).abs() < 1e-6, "x={x} t={t} k={k}: {}", dt + dx - src[k]);
            }
        }
    }

    #[test]
    fn cp_wave_is_an_exact_solution() {
        let c = case_cp_waves();
        let ex = c.exact.clone().unwrap();
        let p = c.params;
        let h = 1e-5;
        let cons = |x: f64, t: f64| ex(x, 0.0, t).to_conserved(&p).unwrap().to_array();
        let flux = |x: f64, t: f64| {
            crate::physflux::full_flux(&cons(x, t), &ex(x, 0.0, t), &p, crate::physflux::Direction::X)
        };
        for &(x, t) in &[(0.05, 0.0), (0.41, 0.3), (0.77, 0.6)] {
            let src = crate::physflux::lorentz_source(&cons(x, t), &ex(x, 0.0, t), &p);
            for k in 0..NVAR {
                let dt = (cons(x, t + h)[k] - cons(x, t - h)[k]) / (2.0 * h);
                let dx = (flux(x + h, t)[k] - flux(x - h, t)[k]) / (2.0 * h);
                assert!((dt + dx - src[k]).abs() < 1e-5, "x={x} t={t} k={k}: {}", dt + dx - src[k]);
            }
        }
    }

    #[test]
    fn initial_data_spot_values() {
        let ot = case_orszag_tang();
        let w = ot.ic.as_ref()(0.25, 0.25);
        // v = (-1/2, 1/2, 0), B = (-1, 0, 0): E_z = -(v_x B_y - v_y B_x) = -1/2.
        assert!((w.em.ez + 0.5).abs() < 1e-15);
        assert!(w.ion.speed_sq() <= 0.5 + 1e-15);

        let bl = case_blast(0.1);
        let w = bl.ic.as_ref()(0.9, 0.0);
        assert!((w.ion.rho - 0.25 * (1e-2 + 1e-4)).abs() < 1e-15);
        assert!((w.ion.p - 0.5 * (1.0 + 5e-4)).abs() < 1e-14);

        let cs = case_current_sheet();
        assert_eq!(cs.ic.as_ref()(0.0, 0.0).em.by, 0.0);
        assert!((cs.ic.as_ref()(1.5, 0.0).em.by - 1.0).abs() < 1e-10);
        assert!((cs.ic.as_ref()(-1.5, 0.0).em.by + 1.0).abs() < 1e-10);

        let g = case_gem();
        let w = g.ic.as_ref()(0.0, 0.0);
        assert!((w.ion.rho - 1.2).abs() < 1e-15);
        assert_eq!(w.electron.velocity()[2], -w.ion.velocity()[2]);
        assert_eq!(w.electron.p, w.ion.p);
        assert!((g.ic.as_ref()(0.0, -2.0 * PI).ion.rho - 0.2).abs() < 2e-5);
    }

    #[test]
    fn gem_current_matches_field_curl() {
        let g = case_gem();
        let p = g.params;
        let h = 1e-5;
        for &(x, y) in &[(0.3, 0.0), (-2.0, 0.7), (5.0, -1.9)] {
            let w = g.ic.as_ref()(x, y);
            let u = w.to_conserved(&p).unwrap().to_array();
            let (_, j) = crate::physflux::charge_and_current(&u, &w, &p);
            let curl_z = (g.ic.as_ref()(x + h, y).em.by - g.ic.as_ref()(x - h, y).em.by) / (2.0 * h)
                - (g.ic.as_ref()(x, y + h).em.bx - g.ic.as_ref()(x, y - h).em.bx) / (2.0 * h);
            assert!((j[2] - curl_z).abs() < 1e-8, "{} vs {}", j[2], curl_z);
        }
    }

    #[test]
    fn collocated_initial_data_has_zero_nodal_error() {
        // The L1 norm uses the collocation nodes, where projection is exact.
        let c = case_cp_waves();
        for k in 1..=3 {
            let s = c.solver(k, 8, None).unwrap();
            let f = c.initial_field(&s).unwrap();
            for q in &c.error_quantities {
                assert!(c.error(&s, &f, *q, 0.0).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn sweep_reports_rates() {
        let c = CaseSpec { t_final: 0.05, ..case_accuracy_forced() };
        let reps = convergence_sweep(&c, &[3], &[8, 16], &[Quantity::Density(Species::Ion)], &c.default_options()).unwrap();
        let rep = &reps[0];
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows[0].rate.is_none());
        let r = rep.rows[1].rate.unwrap();
        assert!(r > 2.0 && r < 4.5, "{r}");
        assert!(convergence_sweep(&c, &[5], &[8], &[Quantity::Density(Species::Ion)], &c.default_options()).is_err());
    }
}
