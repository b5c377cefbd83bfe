use super::field::SolutionField;
use super::residual::DgSolver;
use crate::entflux::{fluid_entropy, maxwell_entropy};
use crate::error::{Error, Result};
use crate::state::{em, FullPrim, Species, State, COMPONENT_NAMES, EM, NVAR};

/// A scalar quantity that can be sampled at every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Conserved(usize),
    Density(Species),
    Pressure(Species),
    Velocity(Species, usize),
    Lorentz(Species),
}

impl Quantity {
    #[inline]
    pub fn eval(self, u: &State, w: &FullPrim) -> f64 {
        match self {
            Quantity::Conserved(k) => u[k],
            Quantity::Density(s) => w.species(s).rho,
            Quantity::Pressure(s) => w.species(s).p,
            Quantity::Velocity(s, a) => w.species(s).velocity()[a],
            Quantity::Lorentz(s) => w.species(s).lorentz_unchecked(),
        }
    }

    /// Name accepted by [`Quantity::parse`].
    pub fn name(self) -> String {
        let sfx = |s: Species| if s == Species::Ion { "i" } else { "e" };
        match self {
            Quantity::Conserved(k) => COMPONENT_NAMES[k].to_string(),
            Quantity::Density(s) => format!("rho_{}", sfx(s)),
            Quantity::Pressure(s) => format!("p_{}", sfx(s)),
            Quantity::Velocity(s, a) => format!("v{}_{}", ["x", "y", "z"][a], sfx(s)),
            Quantity::Lorentz(s) => format!("lorentz_{}", sfx(s)),
        }
    }

    /// Parse names such as `rho_i`, `p_e`, `vx_i`, `By`, `Ez`, or a raw index `u7`.
    pub fn parse(name: &str) -> Result<Self> {
        let species = |suffix: &str| match suffix {
            "i" => Ok(Species::Ion),
            "e" => Ok(Species::Electron),
            _ => Err(Error::config(format!("unknown quantity `{name}`"))),
        };
        let em_names = ["Bx", "By", "Bz", "Ex", "Ey", "Ez", "phi", "psi"];
        if let Some(i) = em_names.iter().position(|&n| n == name) {
            return Ok(Quantity::Conserved(EM + i));
        }
        if let Some(rest) = name.strip_prefix('u') {
            if let Ok(k) = rest.parse::<usize>() {
                if k < NVAR {
                    return Ok(Quantity::Conserved(k));
                }
            }
        }
        let (base, suffix) = name.rsplit_once('_').ok_or_else(|| Error::config(format!("unknown quantity `{name}`")))?;
        let s = species(suffix)?;
        Ok(match base {
            "rho" => Quantity::Density(s),
            "p" => Quantity::Pressure(s),
            "vx" => Quantity::Velocity(s, 0),
            "vy" => Quantity::Velocity(s, 1),
            "vz" => Quantity::Velocity(s, 2),
            "lorentz" => Quantity::Lorentz(s),
            "D" => Quantity::Conserved(s.offset()),
            "Mx" => Quantity::Conserved(s.offset() + 1),
            "My" => Quantity::Conserved(s.offset() + 2),
            "Mz" => Quantity::Conserved(s.offset() + 3),
            "E" => Quantity::Conserved(s.offset() + 4),
            _ => return Err(Error::config(format!("unknown quantity `{name}`"))),
        })
    }
}

/// Total fluid entropy (ion plus electron) and total electromagnetic entropy.
pub fn total_entropy(solver: &DgSolver, field: &SolutionField) -> Result<(f64, f64)> {
    let wts = solver.node_weights();
    let prims = field.primitives(&solver.params)?;
    let (mut fluid, mut emt) = (0.0, 0.0);
    for (i, u) in field.data.iter().enumerate() {
        let w = &prims[i];
        fluid += wts[i] * (fluid_entropy(&w.ion, solver.params.gamma_i).0 + fluid_entropy(&w.electron, solver.params.gamma_e).0);
        emt += wts[i] * maxwell_entropy(&u[EM..]);
    }
    Ok((fluid, emt))
}

/// Quadrature integral of every conserved component.
pub fn integrals(solver: &DgSolver, field: &SolutionField) -> State {
    let wts = solver.node_weights();
    let mut out = [0.0; NVAR];
    for (u, w) in field.data.iter().zip(&wts) {
        for k in 0..NVAR {
            out[k] += w * u[k];
        }
    }
    out
}

/// Discrete L1 norms of a nodal error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    /// GLL quadrature of the pointwise error.
    Quadrature,
    /// Cell volume times the plain sum over the cell's nodes. Larger than the
    /// quadrature norm by roughly the number of nodes per cell; this is the
    /// convention of the published accuracy tables.
    NodeSum,
}

impl ErrorNorm {
    fn weights(self, solver: &DgSolver) -> Vec<f64> {
        match self {
            ErrorNorm::Quadrature => solver.node_weights(),
            ErrorNorm::NodeSum => {
                let npe = solver.new_field().npe();
                let cells = solver.mesh.nx() * solver.mesh.ny();
                (0..cells)
                    .flat_map(|e| {
                        let (ix, iy) = solver.mesh.cell_of(e);
                        let vol = solver.mesh.x.width(ix) * solver.mesh.y.as_ref().map_or(1.0, |a| a.width(iy));
                        std::iter::repeat(vol).take(npe)
                    })
                    .collect()
            }
        }
    }
}

/// Quadrature-weighted L1 distance between a nodal quantity and a reference.
pub fn l1_error<F>(solver: &DgSolver, field: &SolutionField, q: Quantity, exact: F) -> Result<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    l1_error_in(solver, field, q, ErrorNorm::Quadrature, exact)
}

/// L1 distance in the chosen discrete norm.
pub fn l1_error_in<F>(solver: &DgSolver, field: &SolutionField, q: Quantity, norm: ErrorNorm, mut exact: F) -> Result<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    let wts = norm.weights(solver);
    let prims = field.primitives(&solver.params)?;
    let coords = solver.coordinates();
    let mut err = 0.0;
    for (i, u) in field.data.iter().enumerate() {
        let (x, y) = coords[i];
        err += wts[i] * (q.eval(u, &prims[i]) - exact(x, y)).abs();
    }
    Ok(err)
}

/// `1/(2 B0) * integral of |B_y|` along the line `y = 0`, which must coincide
/// with a row of element faces.
pub fn reconnection_flux(solver: &DgSolver, field: &SolutionField, b0: f64) -> Result<f64> {
    let ay = solver.mesh.y_axis()?;
    let ny = ay.cells();
    let j = (0..=ny)
        .find(|&j| ay.edges[j].abs() <= 1e-12 * (ay.hi_edge() - ay.lo_edge()))
        .ok_or_else(|| Error::config("reconnection flux needs an element face on y = 0"))?;
    let n = field.n;
    let w = &solver.ops.weights;
    let mut total = 0.0;
    for ix in 0..solver.mesh.nx() {
        let jx = 0.5 * solver.mesh.x.width(ix);
        let mut line = 0.0;
        for p in 0..n {
            let mut by = 0.0;
            let mut count = 0.0;
            if j > 0 {
                by += field.data[field.index(solver.mesh.element(ix, j - 1), p, n - 1)][EM + em::BY];
                count += 1.0;
            }
            if j < ny {
                by += field.data[field.index(solver.mesh.element(ix, j), p, 0)][EM + em::BY];
                count += 1.0;
            }
            line += w[p] * (by / count).abs();
        }
        total += jx * line;
    }
    Ok(total / (2.0 * b0))
}
