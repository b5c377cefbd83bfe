//! State vectors, the ideal-gas closure and conservative/primitive conversion.
//!
//! The full nodal state carries 18 scalars in a fixed order: ion block
//! `(D, Mx, My, Mz, E)` in slots 0-4, electron block in slots 5-9 and the
//! electromagnetic block `(Bx, By, Bz, Ex, Ey, Ez, phi, psi)` in slots 10-17.

use crate::error::{Error, Result};

pub const NVAR: usize = 18;
pub const NFLUID: usize = 5;
pub const NEM: usize = 8;

pub const ION: usize = 0;
pub const ELECTRON: usize = 5;
pub const EM: usize = 10;

/// Offsets inside the electromagnetic block.
pub mod em {
    pub const BX: usize = 0;
    pub const BY: usize = 1;
    pub const BZ: usize = 2;
    pub const EX: usize = 3;
    pub const EY: usize = 4;
    pub const EZ: usize = 5;
    pub const PHI: usize = 6;
    pub const PSI: usize = 7;
}

/// A raw nodal state in the fixed 18-component ordering.
pub type State = [f64; NVAR];

/// Column names of the 18 components, in storage order.
pub const COMPONENT_NAMES: [&str; NVAR] = [
    "D_i", "Mx_i", "My_i", "Mz_i", "E_i", "D_e", "Mx_e", "My_e", "Mz_e", "E_e", "Bx", "By", "Bz", "Ex", "Ey", "Ez", "phi",
    "psi",
];

/// Bracket offset above the Newton root for the velocity upper bound.
pub const VELOCITY_BRACKET_DELTA: f64 = 1e-6;
/// Fixed Newton iteration count for the velocity quartic.
pub const NEWTON_ITERATIONS: usize = 10;
/// Scaled quartic residual above which the bisection fallback runs.
pub const QUARTIC_FALLBACK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    Ion,
    Electron,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::Ion, Species::Electron];

    pub fn offset(self) -> usize {
        match self {
            Species::Ion => ION,
            Species::Electron => ELECTRON,
        }
    }
}

/// Model constants shared by every node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    pub gamma_i: f64,
    pub gamma_e: f64,
    /// Charge-to-mass ratios (signed).
    pub r_i: f64,
    pub r_e: f64,
    /// Divergence-cleaning speeds for psi and phi.
    pub kappa: f64,
    pub chi: f64,
    /// Resistivity; zero disables the resistive exchange terms.
    pub eta: f64,
    /// Multiplier on the Maxwell current and charge sources (1 or 4 pi).
    pub source_scale: f64,
}

impl Default for GasParams {
    fn default() -> Self {
        Self {
            gamma_i: 4.0 / 3.0,
            gamma_e: 4.0 / 3.0,
            r_i: 1.0,
            r_e: -1.0,
            kappa: 1.0,
            chi: 1.0,
            eta: 0.0,
            source_scale: 1.0,
        }
    }
}

impl GasParams {
    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("gamma_i", self.gamma_i), ("gamma_e", self.gamma_e)] {
            if !(g > 1.0 && g <= 2.0) {
                return Err(Error::config(format!("{name}={g} outside (1, 2]")));
            }
        }
        for (name, v) in [("kappa", self.kappa), ("chi", self.chi), ("eta", self.eta)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name}={v} must be finite and >= 0")));
            }
        }
        if !self.source_scale.is_finite() {
            return Err(Error::config("source_scale must be finite"));
        }
        Ok(())
    }

    pub fn gamma(&self, s: Species) -> f64 {
        match s {
            Species::Ion => self.gamma_i,
            Species::Electron => self.gamma_e,
        }
    }

    pub fn charge_ratio(&self, s: Species) -> f64 {
        match s {
            Species::Ion => self.r_i,
            Species::Electron => self.r_e,
        }
    }
}

/// Primitive variables of one fluid species (proper density, velocity, pressure).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpeciesPrim {
    pub rho: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub p: f64,
}

/// Conserved variables of one fluid species.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpeciesCons {
    pub d: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmState {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
    pub phi: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FullState {
    pub ion: SpeciesCons,
    pub electron: SpeciesCons,
    pub em: EmState,
}

/// Primitive description of a full nodal state; the EM block is shared with
/// the conserved form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FullPrim {
    pub ion: SpeciesPrim,
    pub electron: SpeciesPrim,
    pub em: EmState,
}

impl SpeciesPrim {
    pub fn new(rho: f64, vx: f64, vy: f64, vz: f64, p: f64) -> Self {
        Self { rho, vx, vy, vz, p }
    }

    pub fn at_rest(rho: f64, p: f64) -> Self {
        Self::new(rho, 0.0, 0.0, 0.0, p)
    }

    pub fn velocity(&self) -> [f64; 3] {
        [self.vx, self.vy, self.vz]
    }

    pub fn speed_sq(&self) -> f64 {
        self.vx * self.vx + self.vy * self.vy + self.vz * self.vz
    }

    /// Lorentz factor without validation; callers hold an admissible state.
    #[inline]
    pub fn lorentz_unchecked(&self) -> f64 {
        1.0 / (1.0 - self.speed_sq()).sqrt()
    }

    pub fn is_admissible(&self) -> bool {
        self.rho > 0.0
            && self.p > 0.0
            && self.speed_sq() < 1.0
            && self.rho.is_finite()
            && self.p.is_finite()
    }

    pub fn check(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::admissibility(format!(
                "primitive (rho={}, v=({}, {}, {}), p={})",
                self.rho, self.vx, self.vy, self.vz, self.p
            )))
        }
    }

    pub fn to_array(&self) -> [f64; NFLUID] {
        [self.rho, self.vx, self.vy, self.vz, self.p]
    }

    pub fn from_array(a: &[f64]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }
}

impl SpeciesCons {
    pub fn new(d: f64, mx: f64, my: f64, mz: f64, e: f64) -> Self {
        Self { d, mx, my, mz, e }
    }

    pub fn momentum_sq(&self) -> f64 {
        self.mx * self.mx + self.my * self.my + self.mz * self.mz
    }

    /// `E - sqrt(D^2 + |M|^2)`; positive exactly on the admissible set.
    #[inline]
    pub fn energy_margin(&self) -> f64 {
        self.e - (self.d * self.d + self.momentum_sq()).sqrt()
    }

    pub fn is_admissible(&self) -> bool {
        self.d > 0.0 && self.energy_margin() > 0.0
    }

    pub fn to_array(&self) -> [f64; NFLUID] {
        [self.d, self.mx, self.my, self.mz, self.e]
    }

    pub fn from_array(a: &[f64]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }
}

impl EmState {
    pub fn to_array(&self) -> [f64; NEM] {
        [
            self.bx, self.by, self.bz, self.ex, self.ey, self.ez, self.phi, self.psi,
        ]
    }

    pub fn from_array(a: &[f64]) -> Self {
        Self {
            bx: a[0],
            by: a[1],
            bz: a[2],
            ex: a[3],
            ey: a[4],
            ez: a[5],
            phi: a[6],
            psi: a[7],
        }
    }

    pub fn b(&self) -> [f64; 3] {
        [self.bx, self.by, self.bz]
    }

    pub fn e(&self) -> [f64; 3] {
        [self.ex, self.ey, self.ez]
    }
}

impl FullState {
    pub fn to_array(&self) -> State {
        let mut u = [0.0; NVAR];
        u[ION..ION + NFLUID].copy_from_slice(&self.ion.to_array());
        u[ELECTRON..ELECTRON + NFLUID].copy_from_slice(&self.electron.to_array());
        u[EM..].copy_from_slice(&self.em.to_array());
        u
    }

    pub fn from_array(u: &State) -> Self {
        Self {
            ion: SpeciesCons::from_array(&u[ION..]),
            electron: SpeciesCons::from_array(&u[ELECTRON..]),
            em: EmState::from_array(&u[EM..]),
        }
    }

    pub fn species(&self, s: Species) -> &SpeciesCons {
        match s {
            Species::Ion => &self.ion,
            Species::Electron => &self.electron,
        }
    }
}

impl FullPrim {
    pub fn species(&self, s: Species) -> &SpeciesPrim {
        match s {
            Species::Ion => &self.ion,
            Species::Electron => &self.electron,
        }
    }

    pub fn to_conserved(&self, params: &GasParams) -> Result<FullState> {
        Ok(FullState {
            ion: prim_to_cons(&self.ion, params.gamma_i)?,
            electron: prim_to_cons(&self.electron, params.gamma_e)?,
            em: self.em,
        })
    }

    pub fn is_admissible(&self) -> bool {
        self.ion.is_admissible() && self.electron.is_admissible()
    }
}

/// Lorentz factor `1/sqrt(1-|v|^2)`.
pub fn lorentz(vx: f64, vy: f64, vz: f64) -> Result<f64> {
    let v2 = vx * vx + vy * vy + vz * vz;
    if !(v2 < 1.0) {
        return Err(Error::admissibility(format!(
            "superluminal velocity |v|^2 = {v2}"
        )));
    }
    Ok(1.0 / (1.0 - v2).sqrt())
}

/// Specific enthalpy of the ideal gas.
pub fn enthalpy(rho: f64, p: f64, gamma: f64) -> Result<f64> {
    if !(rho > 0.0 && p > 0.0) {
        return Err(Error::admissibility(format!(
            "enthalpy needs rho > 0 and p > 0, got rho={rho}, p={p}"
        )));
    }
    Ok(1.0 + gamma / (gamma - 1.0) * p / rho)
}

/// Relativistic sound speed, `c^2 = k p / (n rho h)` with `k = gamma/(gamma-1)`
/// and `n = k - 1`.
pub fn sound_speed(rho: f64, p: f64, gamma: f64) -> Result<f64> {
    let h = enthalpy(rho, p, gamma)?;
    Ok(sound_speed_with(rho, p, gamma, h))
}

#[inline]
pub(crate) fn sound_speed_with(rho: f64, p: f64, gamma: f64, h: f64) -> f64 {
    let k = gamma / (gamma - 1.0);
    let n = k - 1.0;
    (k * p / (n * rho * h)).sqrt()
}

pub fn prim_to_cons(w: &SpeciesPrim, gamma: f64) -> Result<SpeciesCons> {
    w.check()?;
    Ok(prim_to_cons_unchecked(w, gamma))
}

#[inline]
pub(crate) fn prim_to_cons_unchecked(w: &SpeciesPrim, gamma: f64) -> SpeciesCons {
    let lf = w.lorentz_unchecked();
    let rho_h = w.rho + gamma / (gamma - 1.0) * w.p;
    let wgt = rho_h * lf * lf;
    SpeciesCons {
        d: w.rho * lf,
        mx: wgt * w.vx,
        my: wgt * w.vy,
        mz: wgt * w.vz,
        e: wgt - w.p,
    }
}

/// Diagnostics of one velocity-quartic solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RecoveryInfo {
    /// Quartic residual scaled by the largest coefficient magnitude.
    pub residual: f64,
    /// Whether the bisection fallback ran after the fixed Newton sweep.
    pub used_fallback: bool,
    /// Whether the lower-bound discriminant went negative and was clamped.
    pub clamped_discriminant: bool,
}

/// Coefficients `(c0, c1, c2, c3)` of the monic velocity quartic.
pub fn velocity_quartic(d: f64, m: f64, e: f64, gamma: f64) -> [f64; 4] {
    let gm1 = gamma - 1.0;
    let den = gm1 * gm1 * (m * m + d * d);
    let c3 = -2.0 * gamma * gm1 * m * e / den;
    let c2 = (gamma * gamma * e * e + 2.0 * gm1 * m * m - gm1 * gm1 * d * d) / den;
    let c1 = -2.0 * gamma * m * e / den;
    let c0 = m * m / den;
    [c0, c1, c2, c3]
}

#[inline]
fn quartic_eval(c: &[f64; 4], v: f64) -> (f64, f64) {
    let f = (((v + c[3]) * v + c[2]) * v + c[1]) * v + c[0];
    let df = ((4.0 * v + 3.0 * c[3]) * v + 2.0 * c[2]) * v + c[1];
    (f, df)
}

fn quartic_scale(c: &[f64; 4]) -> f64 {
    c.iter().fold(1.0_f64, |a, x| a.max(x.abs()))
}

/// `v (E + p(v)) - |M|` with the pressure eliminated through the energy
/// equation, and its derivative.
fn pressure_form(d: f64, m: f64, e: f64, gamma: f64, v: f64) -> (f64, f64) {
    let g2 = 1.0 / (1.0 - v * v);
    let lf = g2.sqrt();
    let k = gamma / (gamma - 1.0);
    let a = k * g2 - 1.0;
    let p = (e - d * lf) / a;
    let dp = (-d * v * lf * g2 * a - (e - d * lf) * k * 2.0 * v * g2 * g2) / (a * a);
    (v * (e + p) - m, e + p + v * dp)
}

/// A few Newton steps on the pressure form. The quartic loses digits in the
/// hot, fast regime where its root is nearly double; this equation does not.
fn polish_velocity(d: f64, m: f64, e: f64, gamma: f64, v0: f64) -> f64 {
    let mut v = v0;
    let (mut g, _) = pressure_form(d, m, e, gamma, v);
    for _ in 0..3 {
        let (_, dg) = pressure_form(d, m, e, gamma, v);
        if !(dg.abs() > 0.0) {
            break;
        }
        let next = v - g / dg;
        if !(next >= 0.0 && next < 1.0) {
            break;
        }
        let (gn, _) = pressure_form(d, m, e, gamma, next);
        if !(gn.abs() < g.abs()) {
            break;
        }
        v = next;
        g = gn;
    }
    v
}

/// Recover `|v|` and the primitive state from conserved variables.
pub fn cons_to_prim(u: &SpeciesCons, gamma: f64) -> Result<SpeciesPrim> {
    cons_to_prim_with_info(u, gamma).map(|(w, _)| w)
}

pub fn cons_to_prim_with_info(u: &SpeciesCons, gamma: f64) -> Result<(SpeciesPrim, RecoveryInfo)> {
    let fail = |reason: &str| Error::Recovery {
        d: u.d,
        m: u.momentum_sq().sqrt(),
        e: u.e,
        reason: reason.to_string(),
    };
    if !(u.d > 0.0) || !u.e.is_finite() || !u.momentum_sq().is_finite() {
        return Err(fail("D must be positive and all components finite"));
    }
    if !(u.energy_margin() > 0.0) {
        return Err(fail("E <= sqrt(D^2 + |M|^2)"));
    }
    let gm1 = gamma - 1.0;
    let m2 = u.momentum_sq();
    let mut info = RecoveryInfo::default();
    if m2 == 0.0 {
        let p = gm1 * (u.e - u.d);
        let w = SpeciesPrim::at_rest(u.d, p);
        if !w.is_admissible() {
            return Err(fail("recovered pressure is not positive"));
        }
        return Ok((w, info));
    }
    let m = m2.sqrt();
    let c = velocity_quartic(u.d, m, u.e, gamma);

    let mut disc = gamma * gamma * u.e * u.e - 4.0 * gm1 * m2;
    if disc < 0.0 {
        disc = 0.0;
        info.clamped_discriminant = true;
    }
    let v_lb = (gamma * u.e - disc.sqrt()) / (2.0 * m * gm1);
    let v_ub = (m / u.e + VELOCITY_BRACKET_DELTA).min(1.0);
    let z = if v_lb > 1e-9 {
        0.5 * (1.0 - u.d / u.e) * (v_lb - v_ub)
    } else {
        0.0
    };
    let mut v = 0.5 * (v_lb + v_ub) + z;
    for _ in 0..NEWTON_ITERATIONS {
        let (f, df) = quartic_eval(&c, v);
        if df == 0.0 {
            break;
        }
        v -= f / df;
    }

    let scale = quartic_scale(&c);
    let mut residual = quartic_eval(&c, v).0.abs() / scale;
    // The quartic can have a second, unphysical root in [0, 1) below the
    // bracket (an artefact of squaring), so the bracket is enforced too.
    let in_bracket = v >= (v_lb - VELOCITY_BRACKET_DELTA).max(0.0) && v <= v_ub && v < 1.0;
    if !(residual <= QUARTIC_FALLBACK_TOL) || !in_bracket {
        // Bisection on the bracket, then Newton polishing from the midpoint.
        info.used_fallback = true;
        let (mut lo, mut hi) = (v_lb.max(0.0), v_ub);
        let mut f_lo = quartic_eval(&c, lo).0;
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            let f_mid = quartic_eval(&c, mid).0;
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (f_mid < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        v = 0.5 * (lo + hi);
        for _ in 0..NEWTON_ITERATIONS {
            let (f, df) = quartic_eval(&c, v);
            if df == 0.0 {
                break;
            }
            let next = v - f / df;
            if !(next >= 0.0 && next < 1.0) {
                break;
            }
            v = next;
        }
        residual = quartic_eval(&c, v).0.abs() / scale;
    }
    info.residual = residual;
    if !(v >= 0.0 && v < 1.0) {
        return Err(fail("velocity root outside [0, 1)"));
    }
    v = polish_velocity(u.d, m, u.e, gamma, v);
    info.residual = quartic_eval(&c, v).0.abs() / scale;

    let lf = 1.0 / (1.0 - v * v).sqrt();
    let rho = u.d / lf;
    let s = v / m;
    let (vx, vy, vz) = (u.mx * s, u.my * s, u.mz * s);
    let p = gm1 * (u.e - m * v - rho);
    let w = SpeciesPrim::new(rho, vx, vy, vz, p);
    if !w.is_admissible() {
        return Err(fail("recovered primitive state is not admissible"));
    }
    Ok((w, info))
}

/// Both species recovered; the EM block is copied.
pub fn full_prim(u: &State, params: &GasParams) -> Result<FullPrim> {
    let s = FullState::from_array(u);
    Ok(FullPrim {
        ion: cons_to_prim(&s.ion, params.gamma_i)?,
        electron: cons_to_prim(&s.electron, params.gamma_e)?,
        em: s.em,
    })
}

/// True iff both fluid blocks satisfy `D > 0` and `E > sqrt(D^2 + |M|^2)`.
pub fn admissible(u: &FullState) -> bool {
    u.ion.is_admissible() && u.electron.is_admissible()
}

pub fn admissible_array(u: &State) -> bool {
    admissible(&FullState::from_array(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lorentz_examples() {
        assert_eq!(lorentz(0.0, 0.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(lorentz(0.5, 0.0, 0.0).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(lorentz(0.5, 0.0, 0.0).unwrap(), 1.1547005, epsilon = 1e-7);
        assert!(lorentz(0.0, 0.6, 0.8).is_err());
        assert!(lorentz(0.0, 0.6, 0.8 * 0.999_999).is_ok());
    }

    #[test]
    fn enthalpy_examples() {
        assert_relative_eq!(enthalpy(1.0, 1.0, 5.0 / 3.0).unwrap(), 3.5, epsilon = 1e-14);
        assert_relative_eq!(enthalpy(2.0, 0.5, 4.0 / 3.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(enthalpy(1e-4, 5e-4, 4.0 / 3.0).unwrap(), 21.0, epsilon = 1e-12);
        assert!(enthalpy(0.0, 1.0, 1.4).is_err());
        assert!(enthalpy(1.0, -1.0, 1.4).is_err());
    }

    #[test]
    fn sound_speed_examples() {
        let c = sound_speed(1.0, 1.0, 5.0 / 3.0).unwrap();
        assert_relative_eq!(c, (2.5f64 / (1.5 * 3.5)).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(c, 0.6900656, epsilon = 1e-7);
        assert_relative_eq!(sound_speed(1.0, 1.0, 2.0).unwrap(), 0.8164966, epsilon = 1e-7);
        assert!(sound_speed(1.0, 1e-14, 5.0 / 3.0).unwrap() < 1e-6);
    }

    #[test]
    fn prim_to_cons_examples() {
        let u = prim_to_cons(&SpeciesPrim::at_rest(1.0, 1.0), 5.0 / 3.0).unwrap();
        assert_relative_eq!(u.d, 1.0);
        assert_eq!(u.mx, 0.0);
        assert_relative_eq!(u.e, 2.5, epsilon = 1e-14);

        let u = prim_to_cons(&SpeciesPrim::at_rest(0.5, 0.5), 2.0).unwrap();
        assert_relative_eq!(u.d, 0.5);
        assert_relative_eq!(u.e, 1.0, epsilon = 1e-14);

        assert!(prim_to_cons(&SpeciesPrim::new(1.0, 1.0, 0.0, 0.0, 1.0), 2.0).is_err());
    }

    #[test]
    fn cons_to_prim_rest_state() {
        let w = cons_to_prim(&SpeciesCons::new(1.0, 0.0, 0.0, 0.0, 2.5), 5.0 / 3.0).unwrap();
        assert_eq!(w.vx, 0.0);
        assert_relative_eq!(w.rho, 1.0);
        assert_relative_eq!(w.p, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cons_to_prim_smooth_case_data() {
        let gamma = 5.0 / 3.0;
        let rho = 2.0 + (2.0 * std::f64::consts::PI * 0.3).sin();
        let w = SpeciesPrim::new(rho, 0.5, 0.0, 0.0, 1.0);
        let back = cons_to_prim(&prim_to_cons(&w, gamma).unwrap(), gamma).unwrap();
        assert_relative_eq!(back.rho, w.rho, max_relative = 1e-10);
        assert_relative_eq!(back.vx, w.vx, max_relative = 1e-10);
        assert_relative_eq!(back.p, w.p, max_relative = 1e-10);
        assert!(back.vy.abs() < 1e-15);
    }

    #[test]
    fn cons_to_prim_fast_states() {
        let gamma = 4.0 / 3.0;
        for k in 0..50 {
            let th = 0.37 * k as f64;
            let ph = 0.11 * k as f64;
            let dir = [th.cos() * ph.sin(), th.sin() * ph.sin(), ph.cos()];
            let w = SpeciesPrim::new(
                1.0 + 0.1 * k as f64,
                0.95 * dir[0],
                0.95 * dir[1],
                0.95 * dir[2],
                0.3 + 0.05 * k as f64,
            );
            let back = cons_to_prim(&prim_to_cons(&w, gamma).unwrap(), gamma).unwrap();
            assert_relative_eq!(back.rho, w.rho, max_relative = 1e-9);
            assert_relative_eq!(back.p, w.p, max_relative = 1e-9);
            for (a, b) in back.velocity().iter().zip(w.velocity()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn inadmissible_states_are_rejected() {
        assert!(cons_to_prim(&SpeciesCons::new(1.0, 0.0, 0.0, 0.0, 0.5), 1.4).is_err());
        assert!(cons_to_prim(&SpeciesCons::new(-1.0, 0.0, 0.0, 0.0, 5.0), 1.4).is_err());
        let bad = SpeciesCons::new(1.0, 3.0, 0.0, 0.0, 3.0);
        assert!(!bad.is_admissible());
        assert!(matches!(cons_to_prim(&bad, 1.4), Err(Error::Recovery { .. })));
    }

    #[test]
    fn admissibility_of_full_state() {
        let p = GasParams::default();
        let prim = FullPrim {
            ion: SpeciesPrim::new(1.0, 0.3, 0.1, 0.0, 0.2),
            electron: SpeciesPrim::new(0.1, -0.6, 0.0, 0.2, 0.7),
            em: EmState::default(),
        };
        assert!(admissible(&prim.to_conserved(&p).unwrap()));
        let mut s = FullState::default();
        s.ion = SpeciesCons::new(1.0, 0.0, 0.0, 0.0, 0.5);
        s.electron = SpeciesCons::new(1.0, 0.0, 0.0, 0.0, 2.0);
        assert!(!admissible(&s));
    }

    #[test]
    fn params_validation() {
        assert!(GasParams::default().validate().is_ok());
        let bad = GasParams { gamma_i: 2.5, ..GasParams::default() };
        assert!(bad.validate().is_err());
        let bad = GasParams { eta: -1.0, ..GasParams::default() };
        assert!(bad.validate().is_err());
    }
}
