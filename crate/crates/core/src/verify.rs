//! Randomized property suites behind `esdg verify`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entflux::{ec_flux, entropy_potential, entropy_production, entropy_vars, llf_flux};
use crate::physflux::{full_flux, lorentz_source, right_eigenvectors, Direction};
use crate::sbp::SbpOperators;
use crate::state::{cons_to_prim_with_info, full_prim, prim_to_cons, EmState, FullPrim, GasParams, SpeciesPrim, State, EM, NFLUID, NVAR};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        SuiteReport { name, samples: 0, failures: 0, max_residual: 0.0, tolerance }
    }

    fn record(&mut self, residual: f64) {
        self.samples += 1;
        if !(residual <= self.tolerance) {
            self.failures += 1;
        }
        if residual.is_nan() {
            self.max_residual = f64::NAN;
        } else {
            self.max_residual = self.max_residual.max(residual);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.samples > 0
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<22} samples={:<6} failures={:<4} max={:.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.failures,
            self.max_residual,
            self.tolerance
        )
    }
}

/// Sampling ranges for random states.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    /// `rho` and `p` are log-uniform in `10^[-decades, decades]`.
    pub decades: f64,
    /// Speeds are uniform in the ball `|v| < vmax`.
    pub vmax: f64,
    /// Field components are uniform in `[-em, em]`.
    pub em: f64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { decades: 2.0, vmax: 0.95, em: 1.0 }
    }
}

impl Sampler {
    pub fn species(&self, rng: &mut impl Rng) -> SpeciesPrim {
        let v = loop {
            let v = [0; 3].map(|_| rng.gen_range(-self.vmax..self.vmax));
            if v.iter().map(|x| x * x).sum::<f64>() < self.vmax * self.vmax {
                break v;
            }
        };
        let rho = 10f64.powf(rng.gen_range(-self.decades..=self.decades));
        let p = 10f64.powf(rng.gen_range(-self.decades..=self.decades));
        SpeciesPrim::new(rho, v[0], v[1], v[2], p)
    }

    pub fn state(&self, rng: &mut impl Rng) -> FullPrim {
        let m = [0; 8].map(|_| rng.gen_range(-self.em..=self.em));
        FullPrim { ion: self.species(rng), electron: self.species(rng), em: EmState::from_array(&m) }
    }
}

/// Parameters used by the suites: distinct adiabatic indices and cleaning speeds.
pub fn suite_params() -> GasParams {
    GasParams { gamma_i: 5.0 / 3.0, gamma_e: 4.0 / 3.0, r_i: 1.0, r_e: -25.0, kappa: 1.0, chi: 1.5, ..GasParams::default() }
}

/// Conserved state and its recovered primitives, so both sides agree bitwise.
fn sample_pair(rng: &mut impl Rng, s: &Sampler, p: &GasParams) -> (State, FullPrim) {
    let w = s.state(rng);
    let u = w.to_conserved(p).expect("sampled state is admissible").to_array();
    let w = full_prim(&u, p).expect("sampled state recovers");
    (u, w)
}

pub fn sbp_suite() -> SuiteReport {
    let mut r = SuiteReport::new("sbp_identities", 1e-13);
    for k in 1..=3 {
        match SbpOperators::new(k) {
            Ok(ops) => ops.identity_residuals().iter().for_each(|&x| r.record(x)),
            Err(_) => r.record(f64::INFINITY),
        }
    }
    r
}

fn block_residual(
    range: std::ops::Range<usize>,
    vl: &State,
    vr: &State,
    f: &State,
    psi_l: f64,
    psi_r: f64,
) -> (f64, f64) {
    let mut sum = 0.0;
    let mut mag = psi_l.abs() + psi_r.abs();
    for k in range {
        let t = (vr[k] - vl[k]) * f[k];
        sum += t;
        mag += t.abs();
    }
    ((sum - (psi_r - psi_l)).abs(), 1.0 + mag)
}

/// Entropy-conservation residuals, split into fluid and Maxwell blocks, plus
/// the consistency `F(U, U) = f(U)`. Residuals are relative to the magnitude
/// of the terms entering the identity.
pub fn ec_suite(seed: u64, pairs: usize) -> [SuiteReport; 3] {
    let p = suite_params();
    let s = Sampler::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fluid = SuiteReport::new("ec_identity_fluid", 1e-12);
    let mut maxwell = SuiteReport::new("ec_identity_maxwell", 1e-14);
    let mut cons = SuiteReport::new("ec_consistency", 1e-13);
    for _ in 0..pairs {
        let (ul, wl) = sample_pair(&mut rng, &s, &p);
        let (ur, wr) = sample_pair(&mut rng, &s, &p);
        let vl = entropy_vars(&ul, &wl, &p).0;
        let vr = entropy_vars(&ur, &wr, &p).0;
        for dir in Direction::BOTH {
            let f = ec_flux(&ul, &wl, &ur, &wr, &p, dir);
            let pl = entropy_potential(&ul, &wl, &p, dir);
            let pr = entropy_potential(&ur, &wr, &p, dir);
            let (ri, si) = block_residual(0..EM, &vl, &vr, &f, pl.psi_i + pl.psi_e, pr.psi_i + pr.psi_e);
            fluid.record(ri / si);
            let (rm, sm) = block_residual(EM..NVAR, &vl, &vr, &f, pl.psi_m, pr.psi_m);
            maxwell.record(rm / sm);

            let fc = ec_flux(&ul, &wl, &ul, &wl, &p, dir);
            let fe = full_flux(&ul, &wl, &p, dir);
            let diff = fc.iter().zip(&fe).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let norm = fe.iter().map(|x| x.abs()).fold(0.0, f64::max);
            cons.record(diff / (1.0 + norm));
        }
    }
    [fluid, maxwell, cons]
}

/// Entropy production of the LLF flux: positive values violate stability.
pub fn llf_suite(seed: u64, pairs: usize) -> SuiteReport {
    let p = suite_params();
    let s = Sampler::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("llf_entropy_stability", 1e-12);
    for _ in 0..pairs {
        let (ul, wl) = sample_pair(&mut rng, &s, &p);
        let (ur, wr) = sample_pair(&mut rng, &s, &p);
        let vl = entropy_vars(&ul, &wl, &p).0;
        let vr = entropy_vars(&ur, &wr, &p).0;
        for dir in Direction::BOTH {
            let f = llf_flux(&ul, &ur, &wl, &wr, &p, dir);
            let prod = entropy_production(&ul, &wl, &ur, &wr, &f, &p, dir);
            let pl = entropy_potential(&ul, &wl, &p, dir).total();
            let pr = entropy_potential(&ur, &wr, &p, dir).total();
            let (_, scale) = block_residual(0..NVAR, &vl, &vr, &f, pl, pr);
            rep.record(prod.max(0.0) / scale);
        }
    }
    rep
}

/// Primitive -> conserved -> primitive. The error is relative in `rho` and
/// `p` and absolute in `v` (units of c). Also reports the quartic residual.
pub fn recovery_suite(seed: u64, samples: usize) -> [SuiteReport; 2] {
    let s = Sampler::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round = SuiteReport::new("recovery_roundtrip", 1e-9);
    let mut quartic = SuiteReport::new("recovery_quartic", 1e-12);
    for i in 0..samples {
        let gamma = [5.0 / 3.0, 4.0 / 3.0, 2.0][i % 3];
        let w = s.species(&mut rng);
        let Ok(u) = prim_to_cons(&w, gamma) else {
            round.record(f64::INFINITY);
            continue;
        };
        match cons_to_prim_with_info(&u, gamma) {
            Ok((w2, info)) => {
                round.record(roundtrip_error(&w, &w2));
                quartic.record(info.residual);
            }
            Err(_) => {
                round.record(f64::INFINITY);
                quartic.record(f64::INFINITY);
            }
        }
    }
    [round, quartic]
}

pub fn roundtrip_error(a: &SpeciesPrim, b: &SpeciesPrim) -> f64 {
    let dv = ((a.vx - b.vx).powi(2) + (a.vy - b.vy).powi(2) + (a.vz - b.vz).powi(2)).sqrt();
    ((a.rho - b.rho).abs() / a.rho).max((a.p - b.p).abs() / a.p).max(dv)
}

/// The Lorentz source does no work on the fluid entropy: `V_fluid . S_fluid = 0`.
pub fn source_suite(seed: u64, samples: usize) -> SuiteReport {
    let p = suite_params();
    let s = Sampler::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("source_orthogonality", 1e-12);
    for _ in 0..samples {
        let (u, w) = sample_pair(&mut rng, &s, &p);
        let v = entropy_vars(&u, &w, &p).0;
        let src = lorentz_source(&u, &w, &p);
        let (mut dot, mut mag) = (0.0, 0.0);
        for k in 0..2 * NFLUID {
            dot += v[k] * src[k];
            mag += (v[k] * src[k]).abs();
        }
        rep.record(dot.abs() / (1.0 + mag));
    }
    rep
}

/// Central-difference flux Jacobian `df/dU`.
pub fn jacobian_fd(u: &State, p: &GasParams, dir: Direction) -> Option<Vec<Vec<f64>>> {
    let mut a = vec![vec![0.0; NVAR]; NVAR];
    for col in 0..NVAR {
        let h = 1e-6 * u[col].abs().max(1.0);
        let (mut up, mut um) = (*u, *u);
        up[col] += h;
        um[col] -= h;
        let fp = full_flux(&up, &full_prim(&up, p).ok()?, p, dir);
        let fm = full_flux(&um, &full_prim(&um, p).ok()?, p, dir);
        for row in 0..NVAR {
            a[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Some(a)
}

/// `||A R - R Lambda||_F / (||A||_F ||R||_F)` against the finite-difference Jacobian.
pub fn eigen_suite(seed: u64, samples: usize) -> SuiteReport {
    let p = suite_params();
    let s = Sampler { decades: 1.0, vmax: 0.9, em: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("eigen_validation", 1e-6);
    for _ in 0..samples {
        let (u, w) = sample_pair(&mut rng, &s, &p);
        for dir in Direction::BOTH {
            let (Some(a), Ok(es)) = (jacobian_fd(&u, &p, dir), right_eigenvectors(&w, &p, dir)) else {
                rep.record(f64::INFINITY);
                continue;
            };
            rep.record(eigen_residual(&a, &es.r, &es.lambdas));
        }
    }
    rep
}

pub fn eigen_residual(a: &[Vec<f64>], r: &[[f64; NVAR]; NVAR], lambdas: &[f64; NVAR]) -> f64 {
    let (mut res, mut na, mut nr) = (0.0, 0.0, 0.0);
    for i in 0..NVAR {
        for n in 0..NVAR {
            let ar: f64 = (0..NVAR).map(|j| a[i][j] * r[j][n]).sum();
            res += (ar - lambdas[n] * r[i][n]).powi(2);
            na += a[i][n] * a[i][n];
            nr += r[i][n] * r[i][n];
        }
    }
    res.sqrt() / (na.sqrt() * nr.sqrt())
}

/// Every suite with `samples` random draws (eigen checks use `samples / 100`).
pub fn run_all(seed: u64, samples: usize) -> Vec<SuiteReport> {
    let mut out = vec![sbp_suite()];
    out.extend(ec_suite(seed, samples));
    out.push(llf_suite(seed.wrapping_add(1), samples));
    out.extend(recovery_suite(seed.wrapping_add(2), samples));
    out.push(source_suite(seed.wrapping_add(3), samples));
    out.push(eigen_suite(seed.wrapping_add(4), (samples / 100).max(1)));
    out
}
