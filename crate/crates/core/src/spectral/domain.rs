use crate::error::{Error, Result};

/// Which end of an axis a face sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Low,
    High,
}

/// An axis-aligned face `{x_axis = 0}` or `{x_axis = L_axis}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    pub fn low(axis: usize) -> Self {
        Face { axis, side: Side::Low }
    }

    pub fn high(axis: usize) -> Self {
        Face { axis, side: Side::High }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// Boundary conditions of the 1D factor along one axis, as (low end, high end).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKind {
    DirichletDirichlet,
    DirichletNeumann,
    NeumannDirichlet,
    NeumannNeumann,
}

impl AxisKind {
    /// Twice the frequency numerator: the k-th eigenvalue is (n pi / (2L))^2.
    pub fn doubled_index(self, k: usize) -> u64 {
        let k = k as u64;
        match self {
            AxisKind::DirichletDirichlet => 2 * (k + 1),
            AxisKind::DirichletNeumann | AxisKind::NeumannDirichlet => 2 * k + 1,
            AxisKind::NeumannNeumann => 2 * k,
        }
    }

    pub fn frequency(self, k: usize, length: f64) -> f64 {
        self.doubled_index(k) as f64 * std::f64::consts::PI / (2.0 * length)
    }

    /// L^2-normalized eigenfunction on [0, L].
    pub fn eval(self, k: usize, length: f64, x: f64) -> f64 {
        let nu = self.frequency(k, length);
        let c = (2.0 / length).sqrt();
        match self {
            AxisKind::DirichletDirichlet | AxisKind::DirichletNeumann => c * (nu * x).sin(),
            AxisKind::NeumannDirichlet => c * (nu * x).cos(),
            AxisKind::NeumannNeumann if k == 0 => 1.0 / length.sqrt(),
            AxisKind::NeumannNeumann => c * (nu * x).cos(),
        }
    }
}

/// Axis-aligned box `prod [0, L_i]` whose faces are each Dirichlet or Neumann.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedRectangleDomain {
    lengths: Vec<f64>,
    bc: Vec<[BoundaryKind; 2]>,
}

impl MixedRectangleDomain {
    /// Faces listed in `dirichlet` carry Dirichlet data; all others are Neumann.
    pub fn new(lengths: Vec<f64>, dirichlet: &[Face]) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidDomain("need at least one axis".into()));
        }
        if let Some(l) = lengths.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidDomain(format!("edge length {l} must be positive")));
        }
        let dim = lengths.len();
        let mut bc = vec![[BoundaryKind::Neumann; 2]; dim];
        for f in dirichlet {
            if f.axis >= dim {
                return Err(Error::InvalidDomain(format!(
                    "face on axis {} but domain has {dim} axes",
                    f.axis
                )));
            }
            bc[f.axis][side_slot(f.side)] = BoundaryKind::Dirichlet;
        }
        let n_d = bc.iter().flatten().filter(|b| **b == BoundaryKind::Dirichlet).count();
        if n_d == 0 {
            return Err(Error::InvalidDomain("Dirichlet part must be nonempty".into()));
        }
        if n_d == 2 * dim {
            return Err(Error::InvalidDomain(
                "Dirichlet part must be a strict subset of the boundary".into(),
            ));
        }
        Ok(Self { lengths, bc })
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn kind_of(&self, face: Face) -> BoundaryKind {
        self.bc[face.axis][side_slot(face.side)]
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        (0..self.dim()).flat_map(|a| [Face::low(a), Face::high(a)])
    }

    pub fn dirichlet_faces(&self) -> Vec<Face> {
        self.faces().filter(|f| self.kind_of(*f) == BoundaryKind::Dirichlet).collect()
    }

    pub fn neumann_faces(&self) -> Vec<Face> {
        self.faces().filter(|f| self.kind_of(*f) == BoundaryKind::Neumann).collect()
    }

    /// Pairs of adjacent (Dirichlet, Neumann) faces; their intersections form the interface.
    pub fn interface(&self) -> Vec<(Face, Face)> {
        let mut out = Vec::new();
        for d in self.dirichlet_faces() {
            for n in self.neumann_faces() {
                if d.axis != n.axis {
                    out.push((d, n));
                }
            }
        }
        out
    }

    pub fn axis_kind(&self, axis: usize) -> AxisKind {
        use BoundaryKind::*;
        match self.bc[axis] {
            [Dirichlet, Dirichlet] => AxisKind::DirichletDirichlet,
            [Dirichlet, Neumann] => AxisKind::DirichletNeumann,
            [Neumann, Dirichlet] => AxisKind::NeumannDirichlet,
            [Neumann, Neumann] => AxisKind::NeumannNeumann,
        }
    }

    /// Coordinate of a face along its axis.
    pub fn face_coordinate(&self, face: Face) -> f64 {
        match face.side {
            Side::Low => 0.0,
            Side::High => self.lengths[face.axis],
        }
    }

    pub fn distance_to_face(&self, x: &[f64], face: Face) -> f64 {
        // Faces are full rectangles, so the distance combines the normal offset
        // with any overshoot in the tangential directions.
        let mut d2 = (x[face.axis] - self.face_coordinate(face)).powi(2);
        for (a, (&xi, &l)) in x.iter().zip(&self.lengths).enumerate() {
            if a != face.axis {
                let o = if xi < 0.0 { -xi } else if xi > l { xi - l } else { 0.0 };
                d2 += o * o;
            }
        }
        d2.sqrt()
    }

    pub fn distance_to_dirichlet(&self, x: &[f64]) -> f64 {
        self.dirichlet_faces()
            .into_iter()
            .map(|f| self.distance_to_face(x, f))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.lengths).all(|(&xi, &l)| xi >= -tol && xi <= l + tol)
    }

    /// Faces (closed) containing the point, up to `tol`.
    pub fn faces_containing(&self, x: &[f64], tol: f64) -> Vec<Face> {
        if !self.contains(x, tol) {
            return Vec::new();
        }
        self.faces()
            .filter(|f| (x[f.axis] - self.face_coordinate(*f)).abs() <= tol)
            .collect()
    }

    /// Midpoint of a face.
    pub fn face_midpoint(&self, face: Face) -> Vec<f64> {
        let mut p: Vec<f64> = self.lengths.iter().map(|l| 0.5 * l).collect();
        p[face.axis] = self.face_coordinate(face);
        p
    }
}

fn side_slot(s: Side) -> usize {
    match s {
        Side::Low => 0,
        Side::High => 1,
    }
}
