use std::sync::Arc;

use super::boundary::ghost_state;
use super::field::SolutionField;
use super::mesh::{Axis, Mesh};
use super::parallel::{default_threads, for_each_piece};
use crate::entflux::{ec_flux, ec_fluid_nodes, llf_flux, FluidNode};
use crate::error::{Error, Result};
use crate::physflux::{full_flux, lorentz_source, resistive_source, Direction};
use crate::sbp::SbpOperators;
use crate::state::{full_prim, FullPrim, GasParams, State, ELECTRON, EM, ION, NFLUID, NVAR};

/// Two-point flux used at element interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceFlux {
    /// Local Lax-Friedrichs (entropy stable).
    Llf,
    /// The volume entropy-conservative flux (no dissipation).
    EntropyConservative,
}

/// Extra forcing term `R(x, y, t)`.
pub type Forcing = Arc<dyn Fn(f64, f64, f64) -> State + Send + Sync>;

#[derive(Clone)]
pub struct SourceConfig {
    pub lorentz: bool,
    pub resistive: bool,
    pub forcing: Option<Forcing>,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig { lorentz: true, resistive: true, forcing: None }
    }
}

impl std::fmt::Debug for SourceConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SourceConfig")
            .field("lorentz", &self.lorentz)
            .field("resistive", &self.resistive)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

/// Everything needed to evaluate the semi-discrete right-hand side.
#[derive(Debug, Clone)]
pub struct DgSolver {
    pub mesh: Mesh,
    pub ops: SbpOperators,
    pub params: GasParams,
    pub interface: InterfaceFlux,
    pub sources: SourceConfig,
    pub threads: usize,
    coords: Vec<(f64, f64)>,
}

/// Per-node quantities shared by the volume and surface terms.
#[derive(Debug, Clone, Copy, Default)]
struct NodeData {
    prim: FullPrim,
    ion: FluidNode,
    electron: FluidNode,
    fx: State,
    fy: State,
}

impl DgSolver {
    pub fn new(mesh: Mesh, k: usize, params: GasParams) -> Result<Self> {
        params.validate()?;
        let ops = SbpOperators::new(k)?;
        let coords = SolutionField::zeros(&mesh, ops.n()).coordinates(&mesh, &ops);
        Ok(DgSolver {
            mesh,
            ops,
            params,
            interface: InterfaceFlux::Llf,
            sources: SourceConfig::default(),
            threads: default_threads(),
            coords,
        })
    }

    pub fn with_interface(mut self, interface: InterfaceFlux) -> Self {
        self.interface = interface;
        self
    }

    pub fn with_sources(mut self, sources: SourceConfig) -> Self {
        self.sources = sources;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn k(&self) -> usize {
        self.ops.k
    }

    /// Node coordinates in storage order.
    pub fn coordinates(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn new_field(&self) -> SolutionField {
        SolutionField::zeros(&self.mesh, self.ops.n())
    }

    pub fn project<F>(&self, ic: F) -> Result<SolutionField>
    where
        F: Fn(f64, f64) -> FullPrim,
    {
        super::field::project_initial(&self.mesh, &self.ops, &self.params, ic)
    }

    fn check_field(&self, field: &SolutionField) -> Result<()> {
        let expect = self.new_field();
        expect.check_shape(field)?;
        if field.nx != expect.nx || field.ny != expect.ny {
            return Err(Error::Shape { expected: expect.elements(), got: field.elements() });
        }
        Ok(())
    }

    fn node_data(&self, field: &SolutionField) -> Result<Vec<NodeData>> {
        let mut nd = vec![NodeData::default(); field.data.len()];
        let npe = field.npe();
        let two_d = field.dim == 2;
        let p = &self.params;
        for_each_piece(&mut nd, npe, self.threads, |first, chunk| {
            for (i, slot) in chunk.iter_mut().enumerate() {
                let gi = first * npe + i;
                let u = &field.data[gi];
                let prim = full_prim(u, p).map_err(|err| Error::Node {
                    element: gi / npe,
                    node: gi % npe,
                    source: Box::new(err),
                })?;
                *slot = NodeData {
                    prim,
                    ion: FluidNode::new(&prim.ion),
                    electron: FluidNode::new(&prim.electron),
                    fx: full_flux(u, &prim, p, Direction::X),
                    fy: if two_d { full_flux(u, &prim, p, Direction::Y) } else { [0.0; NVAR] },
                };
            }
            Ok(())
        })?;
        Ok(nd)
    }

    fn interface_flux(&self, ul: &State, wl: &FullPrim, ur: &State, wr: &FullPrim, dir: Direction) -> State {
        match self.interface {
            InterfaceFlux::Llf => llf_flux(ul, ur, wl, wr, &self.params, dir),
            InterfaceFlux::EntropyConservative => ec_flux(ul, wl, ur, wr, &self.params, dir),
        }
    }

    /// Flux across a face between a left node and a right node along `axis`;
    /// `None` marks a missing neighbour at a non-periodic boundary.
    fn face_flux(
        &self,
        field: &SolutionField,
        nd: &[NodeData],
        left: Option<usize>,
        right: Option<usize>,
        axis: &Axis,
        dir: Direction,
    ) -> Result<State> {
        let (ul, wl, ur, wr) = match (left, right) {
            (Some(l), Some(r)) => (field.data[l], nd[l].prim, field.data[r], nd[r].prim),
            (None, Some(r)) => {
                let (g, gw) = ghost_state(&field.data[r], &nd[r].prim, axis.lo, dir)?;
                (g, gw, field.data[r], nd[r].prim)
            }
            (Some(l), None) => {
                let (g, gw) = ghost_state(&field.data[l], &nd[l].prim, axis.hi, dir)?;
                (field.data[l], nd[l].prim, g, gw)
            }
            (None, None) => unreachable!("face without neighbours"),
        };
        Ok(self.interface_flux(&ul, &wl, &ur, &wr, dir))
    }

    /// Interface fluxes on x-faces: index `(iy * (nx + 1) + i) * qn + q`.
    fn x_faces(&self, field: &SolutionField, nd: &[NodeData]) -> Result<Vec<State>> {
        let (nx, ny, n) = (field.nx, field.ny, field.n);
        let qn = if field.dim == 2 { n } else { 1 };
        let mut out = vec![[0.0; NVAR]; ny * (nx + 1) * qn];
        let periodic = self.mesh.x.is_periodic();
        for_each_piece(&mut out, qn, self.threads, |first, chunk| {
            for (c, slot) in chunk.chunks_mut(qn).enumerate() {
                let f = first + c;
                let (iy, i) = (f / (nx + 1), f % (nx + 1));
                for (q, s) in slot.iter_mut().enumerate() {
                    let left = if i > 0 {
                        Some(field.index(self.mesh.element(i - 1, iy), n - 1, q))
                    } else if periodic {
                        Some(field.index(self.mesh.element(nx - 1, iy), n - 1, q))
                    } else {
                        None
                    };
                    let right = if i < nx {
                        Some(field.index(self.mesh.element(i, iy), 0, q))
                    } else if periodic {
                        Some(field.index(self.mesh.element(0, iy), 0, q))
                    } else {
                        None
                    };
                    *s = self.face_flux(field, nd, left, right, &self.mesh.x, Direction::X)?;
                }
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// Interface fluxes on y-faces: index `(j * nx + ix) * n + p`.
    fn y_faces(&self, field: &SolutionField, nd: &[NodeData]) -> Result<Vec<State>> {
        let axis = self.mesh.y_axis()?;
        let (nx, ny, n) = (field.nx, field.ny, field.n);
        let mut out = vec![[0.0; NVAR]; (ny + 1) * nx * n];
        let periodic = axis.is_periodic();
        for_each_piece(&mut out, n, self.threads, |first, chunk| {
            for (c, slot) in chunk.chunks_mut(n).enumerate() {
                let f = first + c;
                let (j, ix) = (f / nx, f % nx);
                for (p, s) in slot.iter_mut().enumerate() {
                    let below = if j > 0 {
                        Some(field.index(self.mesh.element(ix, j - 1), p, n - 1))
                    } else if periodic {
                        Some(field.index(self.mesh.element(ix, ny - 1), p, n - 1))
                    } else {
                        None
                    };
                    let above = if j < ny {
                        Some(field.index(self.mesh.element(ix, j), p, 0))
                    } else if periodic {
                        Some(field.index(self.mesh.element(ix, 0), p, 0))
                    } else {
                        None
                    };
                    *s = self.face_flux(field, nd, below, above, axis, Direction::Y)?;
                }
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// Flux-differencing volume term along one line of nodes.
    fn volume_line(&self, nd: &[NodeData], idx: &[usize], h: f64, dir: Direction, rhs: &mut [State]) {
        let d = &self.ops.d;
        let n = idx.len();
        let (gi, ge) = (self.params.gamma_i, self.params.gamma_e);
        for a in 0..n {
            let ia = idx[a];
            let fa = if dir == Direction::X { &nd[ia].fx } else { &nd[ia].fy };
            let c = 2.0 * h * d[a][a];
            for k in 0..EM {
                rhs[ia][k] -= c * fa[k];
            }
            // The central Maxwell flux reduces to differentiating the nodal flux.
            for m in 0..n {
                let fm = if dir == Direction::X { &nd[idx[m]].fx } else { &nd[idx[m]].fy };
                let c = h * d[a][m];
                for k in EM..NVAR {
                    rhs[ia][k] -= c * fm[k];
                }
            }
            for b in a + 1..n {
                let ib = idx[b];
                let fi = ec_fluid_nodes(&nd[ia].ion, &nd[ib].ion, gi, dir);
                let fe = ec_fluid_nodes(&nd[ia].electron, &nd[ib].electron, ge, dir);
                let (ca, cb) = (2.0 * h * d[a][b], 2.0 * h * d[b][a]);
                for k in 0..NFLUID {
                    rhs[ia][ION + k] -= ca * fi[k];
                    rhs[ib][ION + k] -= cb * fi[k];
                    rhs[ia][ELECTRON + k] -= ca * fe[k];
                    rhs[ib][ELECTRON + k] -= cb * fe[k];
                }
            }
        }
    }

    fn node_sources(&self, u: &State, w: &FullPrim, x: f64, y: f64, t: f64, out: &mut State) {
        if self.sources.lorentz {
            let s = lorentz_source(u, w, &self.params);
            for k in 0..NVAR {
                out[k] += s[k];
            }
        }
        if self.sources.resistive && self.params.eta != 0.0 {
            let s = resistive_source(u, w, &self.params);
            for k in 0..NVAR {
                out[k] += s[k];
            }
        }
        if let Some(f) = &self.sources.forcing {
            let s = f(x, y, t);
            for k in 0..NVAR {
                out[k] += s[k];
            }
        }
    }

    /// Semi-discrete time derivative of `field` at time `t`.
    pub fn residual(&self, field: &SolutionField, t: f64) -> Result<SolutionField> {
        self.check_field(field)?;
        let nd = self.node_data(field)?;
        let xf = self.x_faces(field, &nd)?;
        let yf = if field.dim == 2 { Some(self.y_faces(field, &nd)?) } else { None };
        let (nx, n) = (field.nx, field.n);
        let npe = field.npe();
        let qn = if field.dim == 2 { n } else { 1 };
        let w = &self.ops.weights;
        let mut out = field.zeros_like();
        for_each_piece(&mut out.data, npe, self.threads, |first, chunk| {
            let mut idx = vec![0usize; n];
            for (c, rhs) in chunk.chunks_mut(npe).enumerate() {
                let e = first + c;
                let (ix, iy) = self.mesh.cell_of(e);
                let base = e * npe;
                let lnd = &nd[base..base + npe];
                let hx = 2.0 / self.mesh.x.width(ix);
                for q in 0..qn {
                    for (p, slot) in idx.iter_mut().enumerate() {
                        *slot = q * n + p;
                    }
                    self.volume_line(lnd, &idx, hx, Direction::X, rhs);
                    let fl = &xf[(iy * (nx + 1) + ix) * qn + q];
                    let fr = &xf[(iy * (nx + 1) + ix + 1) * qn + q];
                    let (a, b) = (q * n, q * n + n - 1);
                    for k in 0..NVAR {
                        rhs[a][k] -= hx / w[0] * (lnd[a].fx[k] - fl[k]);
                        rhs[b][k] += hx / w[n - 1] * (lnd[b].fx[k] - fr[k]);
                    }
                }
                if let Some(yf) = &yf {
                    let hy = 2.0 / self.mesh.y.as_ref().expect("2D mesh").width(iy);
                    for p in 0..n {
                        for (q, slot) in idx.iter_mut().enumerate() {
                            *slot = q * n + p;
                        }
                        self.volume_line(lnd, &idx, hy, Direction::Y, rhs);
                        let fb = &yf[(iy * nx + ix) * n + p];
                        let ft = &yf[((iy + 1) * nx + ix) * n + p];
                        let (a, b) = (p, (n - 1) * n + p);
                        for k in 0..NVAR {
                            rhs[a][k] -= hy / w[0] * (lnd[a].fy[k] - fb[k]);
                            rhs[b][k] += hy / w[n - 1] * (lnd[b].fy[k] - ft[k]);
                        }
                    }
                }
                for (j, r) in rhs.iter_mut().enumerate() {
                    let (x, y) = self.coords[base + j];
                    self.node_sources(&field.data[base + j], &lnd[j].prim, x, y, t, r);
                }
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// Quadrature weight (including the Jacobian) of every node.
    pub fn node_weights(&self) -> Vec<f64> {
        let f = self.new_field();
        let n = f.n;
        let mut out = Vec::with_capacity(f.data.len());
        for e in 0..f.elements() {
            let (ix, iy) = self.mesh.cell_of(e);
            let jx = 0.5 * self.mesh.x.width(ix);
            match &self.mesh.y {
                Some(ay) => {
                    let jy = 0.5 * ay.width(iy);
                    for q in 0..n {
                        for p in 0..n {
                            out.push(jx * jy * self.ops.weights[p] * self.ops.weights[q]);
                        }
                    }
                }
                None => out.extend(self.ops.weights.iter().map(|w| jx * w)),
            }
        }
        out
    }

    /// Assembled entropy rate `sum_nodes weight * V . dU/dt` for a given residual.
    pub fn entropy_rate(&self, field: &SolutionField, rhs: &SolutionField) -> Result<f64> {
        let wts = self.node_weights();
        let prims = field.primitives(&self.params)?;
        let mut total = 0.0;
        for i in 0..field.data.len() {
            let v = crate::entflux::entropy_vars(&field.data[i], &prims[i], &self.params).0;
            total += wts[i] * (0..NVAR).map(|k| v[k] * rhs.data[i][k]).sum::<f64>();
        }
        Ok(total)
    }

    /// Scale against which [`DgSolver::entropy_rate`] is judged: the same sum with absolute values.
    pub fn entropy_rate_scale(&self, field: &SolutionField, rhs: &SolutionField) -> Result<f64> {
        let wts = self.node_weights();
        let prims = field.primitives(&self.params)?;
        let mut total = 0.0;
        for i in 0..field.data.len() {
            let v = crate::entflux::entropy_vars(&field.data[i], &prims[i], &self.params).0;
            total += wts[i] * (0..NVAR).map(|k| (v[k] * rhs.data[i][k]).abs()).sum::<f64>();
        }
        Ok(total)
    }
}
