use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    Neumann,
    ConductingWall,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Neumann => "neumann",
            BoundaryKind::ConductingWall => "conducting_wall",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(BoundaryKind::Periodic),
            "neumann" => Ok(BoundaryKind::Neumann),
            "conducting_wall" | "wall" => Ok(BoundaryKind::ConductingWall),
            other => Err(Error::config(format!("unknown boundary tag `{other}`"))),
        }
    }
}

/// Cell edges along one coordinate plus the boundary tags at both ends.
#[derive(Debug, Clone)]
pub struct Axis {
    pub edges: Vec<f64>,
    pub lo: BoundaryKind,
    pub hi: BoundaryKind,
}

impl Axis {
    pub fn uniform(a: f64, b: f64, cells: usize, lo: BoundaryKind, hi: BoundaryKind) -> Result<Self> {
        if cells == 0 {
            return Err(Error::config("mesh needs at least one cell"));
        }
        let h = (b - a) / cells as f64;
        let mut edges: Vec<f64> = (0..=cells).map(|i| a + h * i as f64).collect();
        edges[cells] = b;
        Self::from_edges(edges, lo, hi)
    }

    pub fn from_edges(edges: Vec<f64>, lo: BoundaryKind, hi: BoundaryKind) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::config("mesh needs at least one cell"));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("cell edges must be strictly increasing"));
        }
        if (lo == BoundaryKind::Periodic) != (hi == BoundaryKind::Periodic) {
            return Err(Error::config("periodic boundaries must be paired"));
        }
        Ok(Axis { edges, lo, hi })
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn lo_edge(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi_edge(&self) -> f64 {
        self.edges[self.cells()]
    }

    /// Physical coordinate of reference point `xi` in cell `i`.
    pub fn map(&self, i: usize, xi: f64) -> f64 {
        self.center(i) + 0.5 * self.width(i) * xi
    }

    pub fn is_periodic(&self) -> bool {
        self.lo == BoundaryKind::Periodic
    }
}

/// Tensor-product mesh; `y` is `None` in one dimension.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub x: Axis,
    pub y: Option<Axis>,
}

impl Mesh {
    pub fn one_d(x: Axis) -> Self {
        Mesh { x, y: None }
    }

    pub fn two_d(x: Axis, y: Axis) -> Self {
        Mesh { x, y: Some(y) }
    }

    pub fn dim(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    pub fn nx(&self) -> usize {
        self.x.cells()
    }

    pub fn ny(&self) -> usize {
        self.y.as_ref().map_or(1, |a| a.cells())
    }

    pub fn elements(&self) -> usize {
        self.nx() * self.ny()
    }

    /// Element index of cell `(ix, iy)`.
    #[inline]
    pub fn element(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx() + ix
    }

    #[inline]
    pub fn cell_of(&self, e: usize) -> (usize, usize) {
        (e % self.nx(), e / self.nx())
    }

    pub fn y_axis(&self) -> Result<&Axis> {
        self.y.as_ref().ok_or_else(|| Error::config("operation needs a two-dimensional mesh"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_axis() {
        let a = Axis::uniform(0.0, 1.0, 4, BoundaryKind::Periodic, BoundaryKind::Periodic).unwrap();
        assert_eq!(a.cells(), 4);
        assert_eq!(a.width(2), 0.25);
        assert_eq!(a.map(0, -1.0), 0.0);
        assert_eq!(a.map(3, 1.0), 1.0);
        assert!(Axis::from_edges(vec![0.0, 0.5, 0.5], BoundaryKind::Neumann, BoundaryKind::Neumann).is_err());
        assert!(Axis::uniform(0.0, 1.0, 4, BoundaryKind::Periodic, BoundaryKind::Neumann).is_err());
        assert!(BoundaryKind::parse("bogus").is_err());
    }

    #[test]
    fn element_numbering() {
        let x = Axis::uniform(0.0, 1.0, 3, BoundaryKind::Periodic, BoundaryKind::Periodic).unwrap();
        let y = Axis::uniform(0.0, 1.0, 2, BoundaryKind::Neumann, BoundaryKind::Neumann).unwrap();
        let m = Mesh::two_d(x, y);
        assert_eq!(m.elements(), 6);
        assert_eq!(m.element(2, 1), 5);
        assert_eq!(m.cell_of(5), (2, 1));
    }
}
