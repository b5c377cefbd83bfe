//! Entropy pairs, entropy variables and potentials, the logarithmic mean,
//! entropy-conservative two-point fluxes and the LLF interface flux.

use crate::error::{Error, Result};
use crate::physflux::{full_flux, maxwell_flux, max_wave_speed, Block, Direction};
use crate::state::{
    cons_to_prim, FullPrim, GasParams, Species, SpeciesCons, SpeciesPrim, State, ELECTRON, EM,
    ION, NEM, NFLUID, NVAR,
};

/// Switch point of the series branch of [`log_mean`], in terms of `f^2`.
pub const LOG_MEAN_SERIES_EPS: f64 = 1e-4;

/// Entropy variables, one per conserved component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyVars(pub State);

/// Entropy potentials of the three blocks for one direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EntropyPotential {
    pub psi_i: f64,
    pub psi_e: f64,
    pub psi_m: f64,
}

impl EntropyPotential {
    pub fn total(&self) -> f64 {
        self.psi_i + self.psi_e + self.psi_m
    }
}

#[inline]
fn specific_entropy(w: &SpeciesPrim, gamma: f64) -> f64 {
    w.p.ln() - gamma * w.rho.ln()
}

/// Fluid entropy `U = -rho*Gamma*s/(gamma-1)` and its fluxes `U*v_x`, `U*v_y`.
pub fn fluid_entropy(w: &SpeciesPrim, gamma: f64) -> (f64, f64, f64) {
    let s = specific_entropy(w, gamma);
    let u = -w.rho * w.lorentz_unchecked() * s / (gamma - 1.0);
    (u, u * w.vx, u * w.vy)
}

/// Quadratic electromagnetic entropy.
#[inline]
pub fn maxwell_entropy(m: &[f64]) -> f64 {
    0.5 * m[..NEM].iter().map(|x| x * x).sum::<f64>()
}

/// Total entropy density of a full state.
pub fn total_entropy_density(u: &State, w: &FullPrim, params: &GasParams) -> f64 {
    fluid_entropy(&w.ion, params.gamma_i).0
        + fluid_entropy(&w.electron, params.gamma_e).0
        + maxwell_entropy(&u[EM..])
}

/// Entropy variables of one species.
pub fn fluid_entropy_vars(w: &SpeciesPrim, gamma: f64) -> [f64; NFLUID] {
    let s = specific_entropy(w, gamma);
    let beta = w.rho / w.p;
    let lf = w.lorentz_unchecked();
    let gb = lf * beta;
    [
        (gamma - s) / (gamma - 1.0) + beta,
        gb * w.vx,
        gb * w.vy,
        gb * w.vz,
        -gb,
    ]
}

/// Full entropy variables; the Maxwell block is the state itself.
pub fn entropy_vars(u: &State, w: &FullPrim, params: &GasParams) -> EntropyVars {
    let mut v = [0.0; NVAR];
    v[ION..ION + NFLUID].copy_from_slice(&fluid_entropy_vars(&w.ion, params.gamma_i));
    v[ELECTRON..ELECTRON + NFLUID].copy_from_slice(&fluid_entropy_vars(&w.electron, params.gamma_e));
    v[EM..].copy_from_slice(&u[EM..]);
    EntropyVars(v)
}

/// Recover primitives from entropy variables of one species (inverse map).
pub fn fluid_prim_from_entropy_vars(v: &[f64], gamma: f64) -> Result<SpeciesPrim> {
    let gb = -v[4];
    if !(gb > 0.0) {
        return Err(Error::admissibility("entropy variable -Gamma*beta must be positive"));
    }
    let vel = [v[1] / gb, v[2] / gb, v[3] / gb];
    let v2 = vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2];
    if !(v2 < 1.0) {
        return Err(Error::admissibility("entropy variables imply superluminal velocity"));
    }
    let beta = gb * (1.0 - v2).sqrt();
    // v0 - beta = (gamma - ln p + gamma ln rho)/(gamma-1), with p = rho/beta.
    let s = gamma - (gamma - 1.0) * (v[0] - beta);
    // s = ln(rho/beta) - gamma ln rho = (1-gamma) ln rho - ln beta.
    let ln_rho = (s + beta.ln()) / (1.0 - gamma);
    let rho = ln_rho.exp();
    Ok(SpeciesPrim::new(rho, vel[0], vel[1], vel[2], rho / beta))
}

/// Entropy potentials `psi = V.f - F` for one direction.
pub fn entropy_potential(u: &State, w: &FullPrim, params: &GasParams, dir: Direction) -> EntropyPotential {
    let a = dir.axis();
    let fm = maxwell_flux(&u[EM..], params, dir);
    let psi_m = 0.5 * (0..NEM).map(|k| u[EM + k] * fm[k]).sum::<f64>();
    EntropyPotential {
        psi_i: u[ION] * w.ion.velocity()[a],
        psi_e: u[ELECTRON] * w.electron.velocity()[a],
        psi_m,
    }
}

/// Logarithmic mean `(a-b)/(ln a - ln b)` from precomputed logarithms.
#[inline]
pub fn log_mean_with_logs(a: f64, b: f64, ln_a: f64, ln_b: f64) -> f64 {
    let f = (a - b) / (a + b);
    let u = f * f;
    let big_f = if u < LOG_MEAN_SERIES_EPS {
        1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0))
    } else {
        (ln_a - ln_b) / (2.0 * f)
    };
    (a + b) / (2.0 * big_f)
}

/// Logarithmic mean of two positive numbers.
pub fn log_mean(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::admissibility(format!("log mean needs positive finite arguments, got ({a}, {b})")));
    }
    Ok(log_mean_with_logs(a, b, a.ln(), b.ln()))
}

/// Per-node quantities used by the entropy-conservative fluid flux.
#[derive(Debug, Clone, Copy, Default)]
pub struct FluidNode {
    pub rho: f64,
    pub ln_rho: f64,
    pub beta: f64,
    pub ln_beta: f64,
    pub lf: f64,
    /// Four-velocity `Gamma*v`.
    pub m: [f64; 3],
}

impl FluidNode {
    #[inline]
    pub fn new(w: &SpeciesPrim) -> Self {
        let lf = w.lorentz_unchecked();
        let beta = w.rho / w.p;
        FluidNode {
            rho: w.rho,
            ln_rho: w.rho.ln(),
            beta,
            ln_beta: beta.ln(),
            lf,
            m: [lf * w.vx, lf * w.vy, lf * w.vz],
        }
    }
}

/// Entropy-conservative fluid flux from precomputed node data.
#[inline]
pub fn ec_fluid_nodes(l: &FluidNode, r: &FluidNode, gamma: f64, dir: Direction) -> [f64; NFLUID] {
    let rho_ln = log_mean_with_logs(l.rho, r.rho, l.ln_rho, r.ln_rho);
    let beta_ln = log_mean_with_logs(l.beta, r.beta, l.ln_beta, r.ln_beta);
    let rho_avg = 0.5 * (l.rho + r.rho);
    let beta_avg = 0.5 * (l.beta + r.beta);
    let lf_avg = 0.5 * (l.lf + r.lf);
    let m = [0.5 * (l.m[0] + r.m[0]), 0.5 * (l.m[1] + r.m[1]), 0.5 * (l.m[2] + r.m[2])];
    let a = dir.axis();
    let md = m[a];
    let l_beta = 1.0 / ((gamma - 1.0) * beta_ln) + 1.0;
    let p_avg = rho_avg / beta_avg;
    let den = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] - lf_avg * lf_avg;
    let f5 = -lf_avg * (l_beta * rho_ln * md + md * p_avg) / den;
    let scale = f5 / lf_avg;
    let mut f = [rho_ln * md, m[0] * scale, m[1] * scale, m[2] * scale, f5];
    f[1 + a] += p_avg;
    f
}

/// Entropy-conservative fluid flux between two conserved species states.
pub fn ec_flux_fluid(ul: &SpeciesCons, ur: &SpeciesCons, gamma: f64, dir: Direction) -> Result<[f64; NFLUID]> {
    let wl = cons_to_prim(ul, gamma)?;
    let wr = cons_to_prim(ur, gamma)?;
    let (l, r) = (FluidNode::new(&wl), FluidNode::new(&wr));
    let den = (0..3).map(|k| (0.5 * (l.m[k] + r.m[k])).powi(2)).sum::<f64>() - (0.5 * (l.lf + r.lf)).powi(2);
    if !(den < 0.0) {
        return Err(Error::admissibility(format!("entropy-conservative flux denominator {den} is not negative")));
    }
    Ok(ec_fluid_nodes(&l, &r, gamma, dir))
}

/// Central Maxwell flux, entropy conservative for the quadratic entropy.
#[inline]
pub fn ec_flux_maxwell(ml: &[f64], mr: &[f64], params: &GasParams, dir: Direction) -> [f64; NEM] {
    let mut avg = [0.0; NEM];
    for k in 0..NEM {
        avg[k] = 0.5 * (ml[k] + mr[k]);
    }
    maxwell_flux(&avg, params, dir)
}

/// Full 18-component entropy-conservative flux.
pub fn ec_flux(ul: &State, wl: &FullPrim, ur: &State, wr: &FullPrim, params: &GasParams, dir: Direction) -> State {
    let mut f = [0.0; NVAR];
    for sp in Species::BOTH {
        let o = sp.offset();
        let g = params.gamma(sp);
        let fl = ec_fluid_nodes(&FluidNode::new(wl.species(sp)), &FluidNode::new(wr.species(sp)), g, dir);
        f[o..o + NFLUID].copy_from_slice(&fl);
    }
    f[EM..].copy_from_slice(&ec_flux_maxwell(&ul[EM..], &ur[EM..], params, dir));
    f
}

/// Blockwise local Lax-Friedrichs flux.
pub fn llf_flux(ul: &State, ur: &State, wl: &FullPrim, wr: &FullPrim, params: &GasParams, dir: Direction) -> State {
    let fl = full_flux(ul, wl, params, dir);
    let fr = full_flux(ur, wr, params, dir);
    let li = max_wave_speed(wl, wr, params, dir, Block::Ion);
    let le = max_wave_speed(wl, wr, params, dir, Block::Electron);
    let lm = max_wave_speed(wl, wr, params, dir, Block::Maxwell);
    let mut f = [0.0; NVAR];
    for k in 0..NVAR {
        let lam = if k < ELECTRON {
            li
        } else if k < EM {
            le
        } else {
            lm
        };
        f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * lam * (ur[k] - ul[k]);
    }
    f
}

/// Entropy production `(V_R - V_L).F - (psi_R - psi_L)` of a two-point flux.
/// Zero for entropy-conservative fluxes, nonpositive for entropy-stable ones.
pub fn entropy_production(
    ul: &State,
    wl: &FullPrim,
    ur: &State,
    wr: &FullPrim,
    f: &State,
    params: &GasParams,
    dir: Direction,
) -> f64 {
    let vl = entropy_vars(ul, wl, params).0;
    let vr = entropy_vars(ur, wr, params).0;
    let pl = entropy_potential(ul, wl, params, dir);
    let pr = entropy_potential(ur, wr, params, dir);
    let dv: f64 = (0..NVAR).map(|k| (vr[k] - vl[k]) * f[k]).sum();
    dv - (pr.total() - pl.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{full_prim, prim_to_cons, EmState};
    use approx::assert_relative_eq;

    #[test]
    fn log_mean_examples() {
        assert_eq!(log_mean(3.0, 3.0).unwrap(), 3.0);
        assert_relative_eq!(log_mean(1.0, std::f64::consts::E).unwrap(), std::f64::consts::E - 1.0, epsilon = 1e-14);
        let v = log_mean(1.0, 1.0 + 1e-12).unwrap();
        assert!(((v - (1.0 + 5e-13)) / v).abs() < 1e-10);
        assert!(log_mean(0.0, 1.0).is_err());
        assert!(log_mean(-1.0, 1.0).is_err());
    }

    #[test]
    fn log_mean_continuous_across_switch() {
        // Points on both sides of the series switch agree with a high-precision reference.
        for &f in &[0.0099, 0.00999999, 0.01, 0.0100001, 0.0101] {
            let (a, b): (f64, f64) = (1.0 + f, 1.0 - f);
            let exact = (a - b) / (a / b).ln();
            let v = log_mean(a, b).unwrap();
            assert!(((v - exact) / exact).abs() < 1e-14, "f={f}: {v} vs {exact}");
        }
    }

    #[test]
    fn fluid_entropy_examples() {
        let g = 5.0 / 3.0;
        let (u, fx, _) = fluid_entropy(&SpeciesPrim::at_rest(1.0, 1.0), g);
        assert_eq!(u, 0.0);
        assert_eq!(fx, 0.0);
        let w = SpeciesPrim::new(3.0, 0.5, 0.0, 0.0, 1.0);
        let (u, fx, fy) = fluid_entropy(&w, g);
        let expect = (2.0 / 3f64.sqrt()) * 3.0 * (5.0 / 3.0) * 3f64.ln() / (2.0 / 3.0);
        assert_relative_eq!(u, expect, epsilon = 1e-12);
        assert_relative_eq!(u, 9.51, epsilon = 5e-3);
        assert_relative_eq!(fx, 0.5 * u);
        assert_eq!(fy, 0.0);
    }

    #[test]
    fn entropy_vars_at_rest() {
        let v = fluid_entropy_vars(&SpeciesPrim::at_rest(1.0, 1.0), 5.0 / 3.0);
        assert_relative_eq!(v[0], 3.5, epsilon = 1e-14);
        assert_eq!(&v[1..], &[0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn entropy_vars_invert() {
        let g = 4.0 / 3.0;
        let w = SpeciesPrim::new(0.7, 0.3, -0.5, 0.2, 2.5);
        let v = fluid_entropy_vars(&w, g);
        let back = fluid_prim_from_entropy_vars(&v, g).unwrap();
        for (a, b) in w.to_array().iter().zip(back.to_array()) {
            assert_relative_eq!(*a, b, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn entropy_vars_are_the_gradient() {
        let g = 5.0 / 3.0;
        let w = SpeciesPrim::new(1.3, 0.4, -0.2, 0.3, 0.9);
        let u = prim_to_cons(&w, g).unwrap().to_array();
        let v = fluid_entropy_vars(&w, g);
        let ent = |c: &[f64; 5]| fluid_entropy(&cons_to_prim(&SpeciesCons::from_array(c), g).unwrap(), g).0;
        for k in 0..5 {
            let h = 1e-6;
            let (mut up, mut um) = (u, u);
            up[k] += h;
            um[k] -= h;
            let fd = (ent(&up) - ent(&um)) / (2.0 * h);
            assert!((fd - v[k]).abs() < 1e-7, "component {k}: {fd} vs {}", v[k]);
        }
    }

    #[test]
    fn potential_identity() {
        let p = GasParams::default();
        let prim = FullPrim {
            ion: SpeciesPrim::new(1.0, 0.2, 0.1, -0.3, 0.5),
            electron: SpeciesPrim::new(0.2, -0.6, 0.3, 0.1, 0.7),
            em: EmState::from_array(&[0.3, -0.1, 0.2, 0.5, 0.4, -0.7, 0.1, 0.2]),
        };
        let u = prim.to_conserved(&p).unwrap().to_array();
        for dir in Direction::BOTH {
            let v = entropy_vars(&u, &prim, &p).0;
            let f = full_flux(&u, &prim, &p, dir);
            let (_, fxi, fyi) = fluid_entropy(&prim.ion, p.gamma_i);
            let (_, fxe, fye) = fluid_entropy(&prim.electron, p.gamma_e);
            let fm = maxwell_flux(&u[EM..], &p, dir);
            let fent_m = 0.5 * (0..NEM).map(|k| u[EM + k] * fm[k]).sum::<f64>();
            let (fi, fe) = if dir == Direction::X { (fxi, fxe) } else { (fyi, fye) };
            let psi = entropy_potential(&u, &prim, &p, dir);
            let vf = |r: std::ops::Range<usize>| r.map(|k| v[k] * f[k]).sum::<f64>();
            assert_relative_eq!(psi.psi_i, vf(ION..ION + 5) - fi, epsilon = 1e-13);
            assert_relative_eq!(psi.psi_e, vf(ELECTRON..ELECTRON + 5) - fe, epsilon = 1e-13);
            assert_relative_eq!(psi.psi_m, vf(EM..NVAR) - fent_m, epsilon = 1e-13);
        }
    }

    #[test]
    fn ec_flux_consistency_and_symmetry() {
        let g = 5.0 / 3.0;
        let w = SpeciesPrim::new(1.1, 0.3, -0.4, 0.2, 0.6);
        let u = prim_to_cons(&w, g).unwrap();
        let w2 = SpeciesPrim::new(0.4, -0.1, 0.5, 0.0, 1.6);
        let u2 = prim_to_cons(&w2, g).unwrap();
        for dir in Direction::BOTH {
            let f = ec_flux_fluid(&u, &u, g, dir).unwrap();
            let exact = crate::physflux::fluid_flux(&w, &u, dir);
            for k in 0..5 {
                assert!((f[k] - exact[k]).abs() < 1e-13 * (1.0 + exact[k].abs()));
            }
            assert_eq!(ec_flux_fluid(&u, &u2, g, dir).unwrap(), ec_flux_fluid(&u2, &u, g, dir).unwrap());
        }
    }

    #[test]
    fn maxwell_jump_dissipation() {
        let p = GasParams::default();
        let rest = FullPrim {
            ion: SpeciesPrim::at_rest(1.0, 1.0),
            electron: SpeciesPrim::at_rest(1.0, 1.0),
            em: EmState::default(),
        };
        let mut ul = rest.to_conserved(&p).unwrap().to_array();
        let mut ur = ul;
        let jl = [0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.9];
        let jr = [-0.1, 0.4, 0.2, -0.6, 0.3, 0.1, -0.5, 0.0];
        ul[EM..].copy_from_slice(&jl);
        ur[EM..].copy_from_slice(&jr);
        let wl = full_prim(&ul, &p).unwrap();
        let wr = full_prim(&ur, &p).unwrap();
        let f = llf_flux(&ul, &ur, &wl, &wr, &p, Direction::X);
        let prod = entropy_production(&ul, &wl, &ur, &wr, &f, &p, Direction::X);
        let jump2: f64 = (0..NEM).map(|k| (jr[k] - jl[k]).powi(2)).sum();
        assert_relative_eq!(prod, -0.5 * jump2, epsilon = 1e-14);
        let fc = ec_flux(&ul, &wl, &ur, &wr, &p, Direction::Y);
        assert!(entropy_production(&ul, &wl, &ur, &wr, &fc, &p, Direction::Y).abs() < 1e-14);
    }

    #[test]
    fn maxwell_flux_is_linear() {
        let p = GasParams { kappa: 1.5, chi: 2.0, ..GasParams::default() };
        let ml = [0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.9];
        let mr = [-0.1, 0.4, 0.2, -0.6, 0.3, 0.1, -0.5, 0.0];
        let f = ec_flux_maxwell(&ml, &mr, &p, Direction::X);
        let a = 2.5;
        let f2 = ec_flux_maxwell(&ml.map(|x| a * x), &mr.map(|x| a * x), &p, Direction::X);
        for k in 0..NEM {
            assert_relative_eq!(f2[k], a * f[k], epsilon = 1e-15);
        }
        assert_eq!(ec_flux_maxwell(&ml, &ml, &p, Direction::Y), maxwell_flux(&ml, &p, Direction::Y));
    }
}
