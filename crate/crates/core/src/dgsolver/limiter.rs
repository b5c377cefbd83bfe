use super::boundary::ghost_average;
use super::field::SolutionField;
use super::residual::DgSolver;
use crate::error::{Error, Result};
use crate::physflux::Direction;
use crate::state::{Species, State, NFLUID, NVAR};

/// Threshold for detecting a troubled cell from its face values.
pub const TROUBLE_TOL: f64 = 1e-8;
/// Default admissibility margin of the bound-preserving limiter.
pub const BP_EPS: f64 = 1e-13;

/// Flavour of the slope limiter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeKind {
    /// One squeeze factor per block (ion, electron, Maxwell) taken from the
    /// most restrictive component. Never raises the entropy.
    Scaled,
    /// Classic per-component minmod reconstruction to a linear profile.
    Componentwise,
}

impl SlopeKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "scaled" => Ok(SlopeKind::Scaled),
            "componentwise" => Ok(SlopeKind::Componentwise),
            _ => Err(Error::config(format!("unknown slope limiter kind `{s}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SlopeKind::Scaled => "scaled",
            SlopeKind::Componentwise => "componentwise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub slope: bool,
    pub kind: SlopeKind,
    pub tvb_m: f64,
    pub bound_preserving: bool,
    pub eps: f64,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        LimiterConfig { slope: true, kind: SlopeKind::Scaled, tvb_m: 0.0, bound_preserving: true, eps: BP_EPS }
    }
}

impl LimiterConfig {
    /// Bound preservation only, as used for smooth problems.
    pub fn smooth() -> Self {
        LimiterConfig { slope: false, ..Self::default() }
    }

    pub fn none() -> Self {
        LimiterConfig { slope: false, bound_preserving: false, ..Self::default() }
    }
}

#[inline]
pub fn minmod(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// TVB-modified minmod: the first argument is kept when it is small on the scale `m h^2`.
#[inline]
pub fn minmod_tvb(a: f64, b: f64, c: f64, m: f64, h: f64) -> f64 {
    if a.abs() <= m * h * h {
        a
    } else {
        minmod(a, b, c)
    }
}

/// Cell averages of every element.
pub fn cell_averages(solver: &DgSolver, field: &SolutionField) -> Vec<State> {
    let w = &solver.ops.weights;
    let n = field.n;
    (0..field.elements())
        .map(|e| {
            let el = field.element(e);
            let mut avg = [0.0; NVAR];
            for (j, u) in el.iter().enumerate() {
                let wt = if field.dim == 2 { w[j % n] * w[j / n] / 4.0 } else { w[j] / 2.0 };
                for k in 0..NVAR {
                    avg[k] += wt * u[k];
                }
            }
            avg
        })
        .collect()
}

/// Neighbour averages `(lower, upper)` of element `(ix, iy)` along `dir`.
fn neighbours(solver: &DgSolver, avgs: &[State], ix: usize, iy: usize, dir: Direction) -> (State, State) {
    let mesh = &solver.mesh;
    let own = avgs[mesh.element(ix, iy)];
    let (axis, i, len) = match dir {
        Direction::X => (&mesh.x, ix, mesh.nx()),
        Direction::Y => (mesh.y.as_ref().expect("2D mesh"), iy, mesh.ny()),
    };
    let at = |j: usize| match dir {
        Direction::X => avgs[mesh.element(j, iy)],
        Direction::Y => avgs[mesh.element(ix, j)],
    };
    let lo = if i > 0 {
        at(i - 1)
    } else if axis.is_periodic() {
        at(len - 1)
    } else {
        ghost_average(&own, axis.lo, dir)
    };
    let hi = if i + 1 < len {
        at(i + 1)
    } else if axis.is_periodic() {
        at(0)
    } else {
        ghost_average(&own, axis.hi, dir)
    };
    (lo, hi)
}

/// Reference-coordinate slope (Legendre P1 coefficient) of nodal values along a line.
fn line_slope(solver: &DgSolver, vals: &[f64]) -> f64 {
    let ops = &solver.ops;
    if ops.k == 1 {
        return 0.5 * (vals[1] - vals[0]);
    }
    1.5 * ops.weights.iter().zip(&ops.nodes).zip(vals).map(|((w, x), v)| w * x * v).sum::<f64>()
}

/// Whether the face values are consistent with the neighbour averages.
#[inline]
fn troubled(avg: f64, lo_face: f64, hi_face: f64, lo_nb: f64, hi_nb: f64, m: f64, h: f64) -> bool {
    let dm = avg - lo_nb;
    let dp = hi_nb - avg;
    let ve1 = avg - minmod_tvb(avg - lo_face, dm, dp, m, h);
    let ve2 = avg + minmod_tvb(hi_face - avg, dm, dp, m, h);
    (ve1 - lo_face).abs() > TROUBLE_TOL || (ve2 - hi_face).abs() > TROUBLE_TOL
}

/// Componentwise minmod slope limiter. Cell averages are left untouched.
pub fn slope_limit(solver: &DgSolver, field: &mut SolutionField, tvb_m: f64) {
    let avgs = cell_averages(solver, field);
    if field.dim == 2 {
        slope_limit_2d(solver, field, &avgs, tvb_m);
        return;
    }
    let n = field.n;
    let ops = &solver.ops;
    let mut vals = vec![0.0; n];
    for e in 0..field.elements() {
        let (ix, iy) = solver.mesh.cell_of(e);
        let (lo, hi) = neighbours(solver, &avgs, ix, iy, Direction::X);
        let h = solver.mesh.x.width(ix);
        let avg = avgs[e];
        let el = field.element_mut(e);
        for k in 0..NVAR {
            if !troubled(avg[k], el[0][k], el[n - 1][k], lo[k], hi[k], tvb_m, h) {
                continue;
            }
            for (v, u) in vals.iter_mut().zip(el.iter()) {
                *v = u[k];
            }
            let s = line_slope(solver, &vals);
            let sl = minmod(s, 0.5 * (hi[k] - avg[k]), 0.5 * (avg[k] - lo[k]));
            for (j, u) in el.iter_mut().enumerate() {
                u[k] = avg[k] + sl * ops.nodes[j];
            }
        }
    }
}

fn slope_limit_2d(solver: &DgSolver, field: &mut SolutionField, avgs: &[State], tvb_m: f64) {
    let n = field.n;
    let ops = &solver.ops;
    let w = &ops.weights;
    let ay = solver.mesh.y.as_ref().expect("2D mesh");
    let mut line = vec![0.0; n];
    for e in 0..field.elements() {
        let (ix, iy) = solver.mesh.cell_of(e);
        let (west, east) = neighbours(solver, avgs, ix, iy, Direction::X);
        let (south, north) = neighbours(solver, avgs, ix, iy, Direction::Y);
        let (hx, hy) = (solver.mesh.x.width(ix), ay.width(iy));
        let avg = avgs[e];
        let el = field.element_mut(e);
        for k in 0..NVAR {
            // Face means and line-averaged slopes.
            let (mut fw, mut fe, mut fs, mut fn_) = (0.0, 0.0, 0.0, 0.0);
            let (mut sx, mut sy) = (0.0, 0.0);
            for a in 0..n {
                fw += 0.5 * w[a] * el[a * n][k];
                fe += 0.5 * w[a] * el[a * n + n - 1][k];
                fs += 0.5 * w[a] * el[a][k];
                fn_ += 0.5 * w[a] * el[(n - 1) * n + a][k];
                for (p, v) in line.iter_mut().enumerate() {
                    *v = el[a * n + p][k];
                }
                sx += 0.5 * w[a] * line_slope(solver, &line);
                for (q, v) in line.iter_mut().enumerate() {
                    *v = el[q * n + a][k];
                }
                sy += 0.5 * w[a] * line_slope(solver, &line);
            }
            let bad_x = troubled(avg[k], fw, fe, west[k], east[k], tvb_m, hx);
            let bad_y = troubled(avg[k], fs, fn_, south[k], north[k], tvb_m, hy);
            if !(bad_x || bad_y) {
                continue;
            }
            let sxl = minmod(sx, 0.5 * (east[k] - avg[k]), 0.5 * (avg[k] - west[k]));
            let syl = minmod(sy, 0.5 * (north[k] - avg[k]), 0.5 * (avg[k] - south[k]));
            for q in 0..n {
                for p in 0..n {
                    el[q * n + p][k] = avg[k] + sxl * ops.nodes[p] + syl * ops.nodes[q];
                }
            }
        }
    }
}

/// Component blocks squeezed together by the scaled limiter.
const BLOCKS: [(usize, usize); 3] = [(0, NFLUID), (NFLUID, 2 * NFLUID), (2 * NFLUID, NVAR)];

/// Admissible fraction of a face deviation `d` given neighbour differences.
#[inline]
fn face_ratio(d: f64, dm: f64, dp: f64, m: f64, h: f64) -> f64 {
    if d.abs() <= TROUBLE_TOL {
        return 1.0;
    }
    (minmod_tvb(d, dm, dp, m, h) / d).clamp(0.0, 1.0)
}

/// Scaled slope limiter: every block is pulled toward its cell average by a
/// common factor, chosen so that all face deviations of the block pass the
/// (TVB) minmod test. The average is kept and, as the block entropy is convex
/// and the quadrature weights are positive, the cell entropy cannot grow.
pub fn scaled_slope_limit(solver: &DgSolver, field: &mut SolutionField, tvb_m: f64) {
    let avgs = cell_averages(solver, field);
    let n = field.n;
    let w = &solver.ops.weights;
    let two_d = field.dim == 2;
    for e in 0..field.elements() {
        let (ix, iy) = solver.mesh.cell_of(e);
        let (west, east) = neighbours(solver, &avgs, ix, iy, Direction::X);
        let hx = solver.mesh.x.width(ix);
        let ny_info = if two_d {
            let (s, nb) = neighbours(solver, &avgs, ix, iy, Direction::Y);
            Some((s, nb, solver.mesh.y.as_ref().expect("2D mesh").width(iy)))
        } else {
            None
        };
        let avg = avgs[e];
        let el = field.element_mut(e);
        for &(b0, b1) in &BLOCKS {
            let mut theta = 1.0f64;
            for k in b0..b1 {
                let (fw, fe) = if two_d {
                    let mut f = (0.0, 0.0);
                    for a in 0..n {
                        f.0 += 0.5 * w[a] * el[a * n][k];
                        f.1 += 0.5 * w[a] * el[a * n + n - 1][k];
                    }
                    f
                } else {
                    (el[0][k], el[n - 1][k])
                };
                let (dm, dp) = (avg[k] - west[k], east[k] - avg[k]);
                theta = theta.min(face_ratio(avg[k] - fw, dm, dp, tvb_m, hx));
                theta = theta.min(face_ratio(fe - avg[k], dm, dp, tvb_m, hx));
                if let Some((south, north, hy)) = &ny_info {
                    let (mut fs, mut fn_) = (0.0, 0.0);
                    for a in 0..n {
                        fs += 0.5 * w[a] * el[a][k];
                        fn_ += 0.5 * w[a] * el[(n - 1) * n + a][k];
                    }
                    let (dm, dp) = (avg[k] - south[k], north[k] - avg[k]);
                    theta = theta.min(face_ratio(avg[k] - fs, dm, dp, tvb_m, *hy));
                    theta = theta.min(face_ratio(fn_ - avg[k], dm, dp, tvb_m, *hy));
                }
            }
            if theta < 1.0 {
                for u in el.iter_mut() {
                    for k in b0..b1 {
                        u[k] = avg[k] + theta * (u[k] - avg[k]);
                    }
                }
            }
        }
    }
}

#[inline]
fn energy_margin(u: &[f64]) -> f64 {
    u[4] - (u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]).sqrt()
}

/// Pull a whole species block toward its mean with one factor. The block
/// average is unchanged and, the entropy being convex, so is the sign of the
/// entropy change (it can only drop).
fn squeeze(el: &mut [State], o: usize, ub: &[f64], theta: f64) {
    for u in el.iter_mut() {
        for c in 0..NFLUID {
            u[o + c] = ub[c] + theta * (u[o + c] - ub[c]);
        }
    }
}

/// Scale fluid nodal states toward the cell average until `D >= eps` and
/// `E - sqrt(D^2 + |M|^2) >= eps` at every node. The Maxwell block is untouched.
pub fn bound_preserving_limit(solver: &DgSolver, field: &mut SolutionField, eps: f64) -> Result<()> {
    let avgs = cell_averages(solver, field);
    for (e, avg) in avgs.iter().enumerate() {
        let el = field.element_mut(e);
        for sp in Species::BOTH {
            let o = sp.offset();
            let ub = &avg[o..o + NFLUID];
            let qb = energy_margin(ub);
            if !(ub[0] > eps) || !(qb > eps) {
                return Err(Error::Limiter {
                    element: e,
                    reason: format!("{sp:?} cell average is inadmissible (D={}, E-|(D,M)|={qb})", ub[0]),
                });
            }
            let dmin = el.iter().map(|u| u[o]).fold(f64::INFINITY, f64::min);
            if dmin < eps {
                let theta = ((ub[0] - eps) / (ub[0] - dmin)).min(1.0);
                squeeze(el, o, ub, theta);
            }
            let qmin = el.iter().map(|u| energy_margin(&u[o..o + NFLUID])).fold(f64::INFINITY, f64::min);
            if qmin < eps {
                let theta = ((qb - eps) / (qb - qmin)).min(1.0);
                squeeze(el, o, ub, theta);
            }
        }
    }
    Ok(())
}

/// Apply the configured limiters in order: slope first, then bound preservation.
pub fn apply_limiters(solver: &DgSolver, field: &mut SolutionField, cfg: &LimiterConfig) -> Result<()> {
    if cfg.slope {
        match cfg.kind {
            SlopeKind::Scaled => scaled_slope_limit(solver, field, cfg.tvb_m),
            SlopeKind::Componentwise => slope_limit(solver, field, cfg.tvb_m),
        }
    }
    if cfg.bound_preserving {
        bound_preserving_limit(solver, field, cfg.eps)?;
    }
    Ok(())
}
