//! Physical fluxes, Lorentz-force and resistive sources, and the
//! characteristic structure of the two-fluid system.

use crate::error::{Error, Result};
use crate::state::{
    em, sound_speed_with, FullPrim, FullState, GasParams, Species, SpeciesCons, SpeciesPrim,
    State, ELECTRON, EM, ION, NEM, NFLUID, NVAR,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::X, Direction::Y];

    /// Velocity component index (0 for x, 1 for y).
    pub fn axis(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }
}

/// Flux block selector for wave-speed estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Ion,
    Electron,
    Maxwell,
}

pub type FluxVector = State;

/// Euler flux of one relativistic species.
#[inline]
pub fn fluid_flux(w: &SpeciesPrim, u: &SpeciesCons, dir: Direction) -> [f64; NFLUID] {
    match dir {
        Direction::X => [u.d * w.vx, u.mx * w.vx + w.p, u.my * w.vx, u.mz * w.vx, u.mx],
        Direction::Y => [u.d * w.vy, u.mx * w.vy, u.my * w.vy + w.p, u.mz * w.vy, u.my],
    }
}

/// Linear flux of the perfectly hyperbolic Maxwell system.
#[inline]
pub fn maxwell_flux(m: &[f64], params: &GasParams, dir: Direction) -> [f64; NEM] {
    let (k, c) = (params.kappa, params.chi);
    match dir {
        Direction::X => [
            k * m[em::PSI],
            -m[em::EZ],
            m[em::EY],
            c * m[em::PHI],
            m[em::BZ],
            -m[em::BY],
            c * m[em::EX],
            k * m[em::BX],
        ],
        Direction::Y => [
            m[em::EZ],
            k * m[em::PSI],
            -m[em::EX],
            -m[em::BZ],
            c * m[em::PHI],
            m[em::BX],
            c * m[em::EY],
            k * m[em::BY],
        ],
    }
}

pub fn maxwell_flux_state(m: &crate::state::EmState, params: &GasParams, dir: Direction) -> [f64; NEM] {
    maxwell_flux(&m.to_array(), params, dir)
}

/// Euler flux evaluated purely from primitive variables. Used inside the
/// scheme so that it agrees bitwise in structure with the two-point fluxes,
/// which are also built from primitives.
#[inline]
pub fn fluid_flux_prim(w: &SpeciesPrim, gamma: f64, dir: Direction) -> [f64; NFLUID] {
    let lf2 = 1.0 / (1.0 - w.speed_sq());
    let lf = lf2.sqrt();
    let wh = (w.rho + gamma / (gamma - 1.0) * w.p) * lf2;
    let v = w.velocity();
    let vd = v[dir.axis()];
    let mut f = [w.rho * lf * vd, wh * v[0] * vd, wh * v[1] * vd, wh * v[2] * vd, wh * vd];
    f[1 + dir.axis()] += w.p;
    f
}

/// Full 18-component flux given conserved state and recovered primitives.
#[inline]
pub fn full_flux(u: &State, w: &FullPrim, params: &GasParams, dir: Direction) -> FluxVector {
    let mut f = [0.0; NVAR];
    let fi = fluid_flux_prim(&w.ion, params.gamma_i, dir);
    let fe = fluid_flux_prim(&w.electron, params.gamma_e, dir);
    let fm = maxwell_flux(&u[EM..], params, dir);
    f[ION..ION + NFLUID].copy_from_slice(&fi);
    f[ELECTRON..ELECTRON + NFLUID].copy_from_slice(&fe);
    f[EM..].copy_from_slice(&fm);
    f
}

/// Charge density and current of the two species (unscaled).
#[inline]
pub fn charge_and_current(u: &State, w: &FullPrim, params: &GasParams) -> (f64, [f64; 3]) {
    let (di, de) = (u[ION], u[ELECTRON]);
    let rho_c = params.r_i * di + params.r_e * de;
    let j = [
        params.r_i * di * w.ion.vx + params.r_e * de * w.electron.vx,
        params.r_i * di * w.ion.vy + params.r_e * de * w.electron.vy,
        params.r_i * di * w.ion.vz + params.r_e * de * w.electron.vz,
    ];
    (rho_c, j)
}

/// Lorentz-force coupling: fluid momentum/energy sources plus the Maxwell
/// current and charge sources.
#[inline]
pub fn lorentz_source(u: &State, w: &FullPrim, params: &GasParams) -> State {
    let mut s = [0.0; NVAR];
    let m = &u[EM..];
    let (bx, by, bz) = (m[em::BX], m[em::BY], m[em::BZ]);
    let (ex, ey, ez) = (m[em::EX], m[em::EY], m[em::EZ]);
    for sp in Species::BOTH {
        let o = sp.offset();
        let v = w.species(sp);
        let rd = params.charge_ratio(sp) * u[o];
        s[o + 1] = rd * (ex + v.vy * bz - v.vz * by);
        s[o + 2] = rd * (ey + v.vz * bx - v.vx * bz);
        s[o + 3] = rd * (ez + v.vx * by - v.vy * bx);
        s[o + 4] = rd * (v.vx * ex + v.vy * ey + v.vz * ez);
    }
    let (rho_c, j) = charge_and_current(u, w, params);
    let sc = params.source_scale;
    s[EM + em::EX] = -sc * j[0];
    s[EM + em::EY] = -sc * j[1];
    s[EM + em::EZ] = -sc * j[2];
    s[EM + em::PHI] = sc * params.chi * rho_c;
    s
}

/// Resistive momentum/energy exchange between the species. Antisymmetric by
/// construction, so total momentum and energy are untouched.
pub fn resistive_source(u: &State, w: &FullPrim, params: &GasParams) -> State {
    let mut s = [0.0; NVAR];
    if params.eta == 0.0 {
        return s;
    }
    let (ri, re) = (params.r_i, params.r_e);
    let (rho_i, rho_e) = (w.ion.rho, w.electron.rho);
    let (di, de) = (u[ION], u[ELECTRON]);
    let wp2 = ri * ri * rho_i + re * re * rho_e;
    let (rho_c, j) = charge_and_current(u, w, params);
    let phi = [j[0] / wp2, j[1] / wp2, j[2] / wp2];
    let lambda = (ri * ri * di + re * re * de) / wp2;
    let rho0 = lambda * rho_c - (j[0] * phi[0] + j[1] * phi[1] + j[2] * phi[2]);
    let coef = -params.eta * wp2 / (ri - re);
    for a in 0..3 {
        let r = coef * (j[a] - rho0 * phi[a]);
        s[ION + 1 + a] = r;
        s[ELECTRON + 1 + a] = -r;
    }
    let r0 = coef * (rho_c - rho0 * lambda);
    s[ION + 4] = r0;
    s[ELECTRON + 4] = -r0;
    s
}

/// Acoustic eigenvalue pair `(lambda_-, lambda_+)` of one species.
#[inline]
pub fn acoustic_speeds(w: &SpeciesPrim, gamma: f64, dir: Direction) -> (f64, f64) {
    let h = 1.0 + gamma / (gamma - 1.0) * w.p / w.rho;
    let c = sound_speed_with(w.rho, w.p, gamma, h);
    let c2 = c * c;
    let v = w.velocity();
    let vd = v[dir.axis()];
    let v2 = w.speed_sq();
    let lf = 1.0 / (1.0 - v2).sqrt();
    let q = 1.0 - vd * vd - c2 * (v2 - vd * vd);
    let root = (c / lf) * q.max(0.0).sqrt();
    let den = 1.0 - c2 * v2;
    (((1.0 - c2) * vd - root) / den, ((1.0 - c2) * vd + root) / den)
}

fn species_q(w: &SpeciesPrim, c2: f64, dir: Direction) -> f64 {
    let vd = w.velocity()[dir.axis()];
    1.0 - vd * vd - c2 * (w.speed_sq() - vd * vd)
}

/// All 18 eigenvalues, ordered as the ion, electron and Maxwell blocks.
pub fn eigenvalues(w: &FullPrim, params: &GasParams, dir: Direction) -> Result<[f64; NVAR]> {
    let mut lam = [0.0; NVAR];
    for sp in Species::BOTH {
        let ws = w.species(sp);
        ws.check()?;
        let gamma = params.gamma(sp);
        let h = 1.0 + gamma / (gamma - 1.0) * ws.p / ws.rho;
        let c = sound_speed_with(ws.rho, ws.p, gamma, h);
        if !(species_q(ws, c * c, dir) > 0.0) {
            return Err(Error::admissibility("nonpositive characteristic discriminant"));
        }
        let (lm, lp) = acoustic_speeds(ws, gamma, dir);
        let vd = ws.velocity()[dir.axis()];
        let o = sp.offset();
        lam[o..o + NFLUID].copy_from_slice(&[lm, vd, vd, vd, lp]);
    }
    let (k, c) = (params.kappa, params.chi);
    lam[EM..].copy_from_slice(&[-c, -k, -1.0, -1.0, 1.0, 1.0, k, c]);
    Ok(lam)
}

/// Eigenvalues and right eigenvectors of the flux Jacobian.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub lambdas: [f64; NVAR],
    /// Column `n` is the eigenvector for `lambdas[n]`.
    pub r: [[f64; NVAR]; NVAR],
}

/// `dU/dW` for one species, rows `(D, Mx, My, Mz, E)`, columns `(rho, vx, vy, vz, p)`.
pub fn cons_prim_jacobian(w: &SpeciesPrim, gamma: f64) -> [[f64; NFLUID]; NFLUID] {
    let v = w.velocity();
    let lf = w.lorentz_unchecked();
    let g2 = lf * lf;
    let g3 = g2 * lf;
    let g4 = g2 * g2;
    let k = gamma / (gamma - 1.0);
    let rho_h = w.rho + k * w.p;
    let wgt = rho_h * g2;
    let mut j = [[0.0; NFLUID]; NFLUID];
    j[0][0] = lf;
    for i in 0..3 {
        j[0][1 + i] = w.rho * g3 * v[i];
    }
    for a in 0..3 {
        j[1 + a][0] = g2 * v[a];
        j[1 + a][4] = k * g2 * v[a];
        for i in 0..3 {
            j[1 + a][1 + i] = 2.0 * rho_h * g4 * v[i] * v[a] + if a == i { wgt } else { 0.0 };
        }
    }
    j[4][0] = g2;
    j[4][4] = k * g2 - 1.0;
    for i in 0..3 {
        j[4][1 + i] = 2.0 * rho_h * g4 * v[i];
    }
    j
}

/// Right eigenvectors of the primitive-form Jacobian for one species.
pub fn primitive_eigenvectors(w: &SpeciesPrim, gamma: f64, dir: Direction) -> [[f64; NFLUID]; NFLUID] {
    let h = 1.0 + gamma / (gamma - 1.0) * w.p / w.rho;
    let c = sound_speed_with(w.rho, w.p, gamma, h);
    let lf = w.lorentz_unchecked();
    let q = species_q(w, c * c, dir).max(0.0).sqrt();
    let v = w.velocity();
    let d = dir.axis();
    // Tangential velocity slots in primitive ordering (rho, vx, vy, vz, p).
    let (t1, t2) = match dir {
        Direction::X => (1usize, 2usize),
        Direction::Y => (0usize, 2usize),
    };
    let vd = v[d];
    let mut r = [[0.0; NFLUID]; NFLUID];
    let acoustic_rho = 1.0 / (c * c * h);
    r[0][0] = acoustic_rho;
    r[0][4] = acoustic_rho;
    r[0][1] = 1.0;
    r[1 + d][0] = -q / (c * h * lf * w.rho);
    r[1 + d][4] = q / (c * h * lf * w.rho);
    let den = c * h * lf * lf * w.rho * (vd * vd - 1.0);
    for (col, t) in [(2usize, t1), (3usize, t2)] {
        r[1 + t][0] = (c - lf * q * vd) * v[t] / den;
        r[1 + t][4] = (c + lf * q * vd) * v[t] / den;
        r[1 + t][col] = 1.0;
    }
    r[4][0] = 1.0;
    r[4][4] = 1.0;
    r
}

/// Constant eigenvector matrix of the Maxwell block.
pub fn maxwell_eigenvectors(dir: Direction) -> [[f64; NEM]; NEM] {
    match dir {
        Direction::X => [
            [0., -1., 0., 0., 0., 0., 1., 0.],
            [0., 0., 0., 1., 0., -1., 0., 0.],
            [0., 0., -1., 0., 1., 0., 0., 0.],
            [-1., 0., 0., 0., 0., 0., 0., 1.],
            [0., 0., 1., 0., 1., 0., 0., 0.],
            [0., 0., 0., 1., 0., 1., 0., 0.],
            [1., 0., 0., 0., 0., 0., 0., 1.],
            [0., 1., 0., 0., 0., 0., 1., 0.],
        ],
        Direction::Y => [
            [0., 0., 0., -1., 0., 1., 0., 0.],
            [0., -1., 0., 0., 0., 0., 1., 0.],
            [0., 0., 1., 0., -1., 0., 0., 0.],
            [0., 0., 1., 0., 1., 0., 0., 0.],
            [-1., 0., 0., 0., 0., 0., 0., 1.],
            [0., 0., 0., 1., 0., 1., 0., 0.],
            [1., 0., 0., 0., 0., 0., 0., 1.],
            [0., 1., 0., 0., 0., 0., 1., 0.],
        ],
    }
}

/// Block-diagonal eigensystem: fluid blocks `dU/dW * R_W`, Maxwell block constant.
pub fn right_eigenvectors(w: &FullPrim, params: &GasParams, dir: Direction) -> Result<EigenSystem> {
    let lambdas = eigenvalues(w, params, dir)?;
    let mut r = [[0.0; NVAR]; NVAR];
    for sp in Species::BOTH {
        let ws = w.species(sp);
        let gamma = params.gamma(sp);
        let jac = cons_prim_jacobian(ws, gamma);
        let rw = primitive_eigenvectors(ws, gamma, dir);
        let o = sp.offset();
        for a in 0..NFLUID {
            for b in 0..NFLUID {
                r[o + a][o + b] = (0..NFLUID).map(|c| jac[a][c] * rw[c][b]).sum();
            }
        }
    }
    let rm = maxwell_eigenvectors(dir);
    for a in 0..NEM {
        for b in 0..NEM {
            r[EM + a][EM + b] = rm[a][b];
        }
    }
    Ok(EigenSystem { lambdas, r })
}

/// Largest characteristic speed magnitude of one species.
#[inline]
pub fn species_max_speed(w: &SpeciesPrim, gamma: f64, dir: Direction) -> f64 {
    let (lm, lp) = acoustic_speeds(w, gamma, dir);
    lm.abs().max(lp.abs())
}

#[inline]
pub fn maxwell_speed(params: &GasParams) -> f64 {
    1.0_f64.max(params.kappa).max(params.chi)
}

/// Blockwise local wave-speed bound over a left/right pair.
pub fn max_wave_speed(
    wl: &FullPrim,
    wr: &FullPrim,
    params: &GasParams,
    dir: Direction,
    block: Block,
) -> f64 {
    match block {
        Block::Ion => species_max_speed(&wl.ion, params.gamma_i, dir)
            .max(species_max_speed(&wr.ion, params.gamma_i, dir)),
        Block::Electron => species_max_speed(&wl.electron, params.gamma_e, dir)
            .max(species_max_speed(&wr.electron, params.gamma_e, dir)),
        Block::Maxwell => maxwell_speed(params),
    }
}

/// Rough upper bound on the oscillation frequency of the Lorentz coupling at
/// one node: cyclotron plus plasma frequency of each species, combined in
/// quadrature.
pub fn source_frequency(u: &State, w: &FullPrim, params: &GasParams) -> f64 {
    let m = &u[EM..];
    let b = (m[em::BX] * m[em::BX] + m[em::BY] * m[em::BY] + m[em::BZ] * m[em::BZ]).sqrt();
    let mut w2 = 0.0;
    for sp in Species::BOTH {
        let v = w.species(sp);
        let g = params.gamma(sp);
        let h = 1.0 + g / (g - 1.0) * v.p / v.rho;
        let lf = v.lorentz_unchecked();
        let r = params.charge_ratio(sp);
        let wc = r.abs() * b / (h * lf);
        w2 += wc * wc + params.source_scale * r * r * v.rho / (h * lf);
    }
    w2.sqrt()
}

/// Largest |eigenvalue| over all blocks at one node.
pub fn node_max_speed(w: &FullPrim, params: &GasParams, dir: Direction) -> f64 {
    species_max_speed(&w.ion, params.gamma_i, dir)
        .max(species_max_speed(&w.electron, params.gamma_e, dir))
        .max(maxwell_speed(params))
}

/// Convenience for callers holding a [`FullState`].
pub fn flux_of_state(u: &FullState, params: &GasParams, dir: Direction) -> Result<FluxVector> {
    let arr = u.to_array();
    let w = crate::state::full_prim(&arr, params)?;
    Ok(full_flux(&arr, &w, params, dir))
}
