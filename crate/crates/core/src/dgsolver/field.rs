use super::mesh::Mesh;
use crate::error::{Error, Result};
use crate::sbp::SbpOperators;
use crate::state::{full_prim, FullPrim, GasParams, State, NVAR};

/// Nodal values on every element. Node `(p, q)` of element `e` lives at
/// `e * npe + q * n + p`, with `q = 0` in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub nx: usize,
    pub ny: usize,
    pub dim: usize,
    /// Nodes per direction (`k + 1`).
    pub n: usize,
    pub data: Vec<State>,
}

impl SolutionField {
    pub fn zeros(mesh: &Mesh, n: usize) -> Self {
        let npe = if mesh.dim() == 2 { n * n } else { n };
        SolutionField {
            nx: mesh.nx(),
            ny: mesh.ny(),
            dim: mesh.dim(),
            n,
            data: vec![[0.0; NVAR]; mesh.elements() * npe],
        }
    }

    pub fn zeros_like(&self) -> Self {
        SolutionField { data: vec![[0.0; NVAR]; self.data.len()], ..*self }
    }

    /// Nodes per element.
    #[inline]
    pub fn npe(&self) -> usize {
        if self.dim == 2 {
            self.n * self.n
        } else {
            self.n
        }
    }

    pub fn elements(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, e: usize, p: usize, q: usize) -> usize {
        e * self.npe() + q * self.n + p
    }

    pub fn element(&self, e: usize) -> &[State] {
        let npe = self.npe();
        &self.data[e * npe..(e + 1) * npe]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [State] {
        let npe = self.npe();
        &mut self.data[e * npe..(e + 1) * npe]
    }

    pub fn check_shape(&self, other: &SolutionField) -> Result<()> {
        if self.data.len() != other.data.len() || self.n != other.n || self.dim != other.dim {
            return Err(Error::Shape { expected: self.data.len(), got: other.data.len() });
        }
        Ok(())
    }

    /// `self = a * self + b * other`.
    pub fn axpby(&mut self, a: f64, b: f64, other: &SolutionField) {
        for (u, v) in self.data.iter_mut().zip(&other.data) {
            for k in 0..NVAR {
                u[k] = a * u[k] + b * v[k];
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &SolutionField) {
        for (u, v) in self.data.iter_mut().zip(&other.data) {
            for k in 0..NVAR {
                u[k] += c * v[k];
            }
        }
    }

    /// Physical coordinates of every node, in storage order.
    pub fn coordinates(&self, mesh: &Mesh, ops: &SbpOperators) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.data.len());
        for e in 0..self.elements() {
            let (ix, iy) = mesh.cell_of(e);
            let qn = if self.dim == 2 { self.n } else { 1 };
            for q in 0..qn {
                for p in 0..self.n {
                    let x = mesh.x.map(ix, ops.nodes[p]);
                    let y = mesh.y.as_ref().map_or(0.0, |a| a.map(iy, ops.nodes[q]));
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Primitive variables at every node.
    pub fn primitives(&self, params: &GasParams) -> Result<Vec<FullPrim>> {
        let npe = self.npe();
        self.data
            .iter()
            .enumerate()
            .map(|(i, u)| {
                full_prim(u, params).map_err(|err| Error::Node {
                    element: i / npe,
                    node: i % npe,
                    source: Box::new(err),
                })
            })
            .collect()
    }
}

/// Collocate an initial condition given in primitive variables.
pub fn project_initial<F>(mesh: &Mesh, ops: &SbpOperators, params: &GasParams, ic: F) -> Result<SolutionField>
where
    F: Fn(f64, f64) -> FullPrim,
{
    let mut field = SolutionField::zeros(mesh, ops.n());
    let coords = field.coordinates(mesh, ops);
    for (u, &(x, y)) in field.data.iter_mut().zip(&coords) {
        let w = ic(x, y);
        let cons = w
            .to_conserved(params)
            .map_err(|e| Error::admissibility(format!("initial state at ({x}, {y}) is inadmissible: {e}")))?;
        *u = cons.to_array();
    }
    Ok(field)
}
