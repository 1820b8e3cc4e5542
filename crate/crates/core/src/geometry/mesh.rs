use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, normalized, sub};

use super::simplex::{factorial, Simplex};

/// Axis-aligned box `Π (lo_i, hi_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::dims(format!("{} upper bounds", lo.len()), format!("{}", hi.len())));
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidConfig("box must satisfy lo < hi".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn unit(n: usize) -> Self {
        BoxDomain {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Simplicial mesh: shared vertex table and cells as vertex-index tuples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Triangulation {
    pub vertices: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
    /// Largest cell diameter.
    pub delta: f64,
    /// Smallest `vol(T) / δⁿ` over the cells.
    pub regularity: f64,
    pub bbox: BoxDomain,
}

/// A facet shared by two cells; `cells.0` lies on the `−ν` side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteriorFace {
    pub vertices: Vec<usize>,
    pub cells: (usize, usize),
    /// Unit normal pointing from `cells.0` into `cells.1`.
    pub normal: Vec<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FaceTable {
    pub interior: Vec<InteriorFace>,
    /// `(facet vertices, owning cell)` for facets on the mesh boundary.
    pub boundary: Vec<(Vec<usize>, usize)>,
}

impl Triangulation {
    /// Validates indices and cell nondegeneracy and derives `δ`, the
    /// regularity constant and the bounding box.
    pub fn from_parts(vertices: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let n = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidField("mesh has no vertices".into()))?;
        if cells.is_empty() {
            return Err(Error::InvalidField("mesh has no cells".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::dims(format!("{n}-dimensional vertices"), format!("{}", v.len())));
        }
        for c in &cells {
            if c.len() != n + 1 {
                return Err(Error::dims(format!("{} vertices per cell", n + 1), format!("{}", c.len())));
            }
            if let Some(&i) = c.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidField(format!("vertex index {i} out of range")));
            }
        }
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in &vertices {
            for i in 0..n {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let mut mesh = Triangulation {
            vertices,
            cells,
            delta: 0.0,
            regularity: 0.0,
            bbox: BoxDomain::new(lo, hi)?,
        };
        let simplices = (0..mesh.cells.len())
            .map(|i| mesh.try_cell(i))
            .collect::<Result<Vec<_>>>()?;
        mesh.delta = simplices.iter().map(Simplex::diameter).fold(0.0, f64::max);
        mesh.regularity = simplices
            .iter()
            .map(|s| s.volume() / mesh.delta.powi(n as i32))
            .fold(f64::INFINITY, f64::min);
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn try_cell(&self, i: usize) -> Result<Simplex> {
        Simplex::new(self.cells[i].iter().map(|&v| self.vertices[v].clone()).collect())
    }

    pub fn cell(&self, i: usize) -> Simplex {
        self.try_cell(i).expect("validated at construction")
    }

    pub fn simplices(&self) -> Vec<Simplex> {
        (0..self.len()).map(|i| self.cell(i)).collect()
    }

    pub fn total_volume(&self) -> f64 {
        self.simplices().iter().map(Simplex::volume).sum()
    }

    /// Index of a cell containing `x` (within `tol` in barycentric terms).
    pub fn locate(&self, x: &[f64], tol: f64) -> Option<usize> {
        (0..self.len()).find(|&i| self.cell(i).contains(x, tol))
    }

    /// Shared-facet table. Interior faces are listed once, sorted by their
    /// vertex tuple; normals are oriented by the cell centroids.
    pub fn faces(&self) -> FaceTable {
        let mut owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            for skip in 0..cell.len() {
                let mut key: Vec<usize> = cell
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                owners.entry(key).or_default().push(ci);
            }
        }
        let mut table = FaceTable::default();
        for (key, cells) in owners {
            match cells.as_slice() {
                [c] => table.boundary.push((key, *c)),
                [a, b] => {
                    let normal = self.facet_normal(&key, *a, *b);
                    table.interior.push(InteriorFace {
                        vertices: key,
                        cells: (*a, *b),
                        normal,
                    });
                }
                _ => {}
            }
        }
        table
    }

    fn facet_normal(&self, facet: &[usize], from: usize, to: usize) -> Vec<f64> {
        let p0 = &self.vertices[facet[0]];
        let mut span: Vec<Vec<f64>> = Vec::new();
        for &v in &facet[1..] {
            let mut e = sub(&self.vertices[v], p0);
            for s in &span {
                let c = dot(&e, s);
                axpy(&mut e, -c, s);
            }
            if let Some(e) = normalized(&e) {
                span.push(e);
            }
        }
        let mut r = sub(&self.cell(to).centroid(), &self.cell(from).centroid());
        for _ in 0..2 {
            for s in &span {
                let c = dot(&r, s);
                axpy(&mut r, -c, s);
            }
        }
        normalized(&r).expect("cells on opposite sides of a facet")
    }

    /// Checks that no cell centroid lies in the closure of another cell.
    pub fn has_disjoint_interiors(&self) -> bool {
        let simplices = self.simplices();
        let centroids: Vec<Vec<f64>> = simplices.iter().map(Simplex::centroid).collect();
        simplices.iter().enumerate().all(|(i, s)| {
            centroids
                .iter()
                .enumerate()
                .all(|(j, c)| i == j || !s.contains(c, 1e-12))
        })
    }
}

/// Freudenthal (Kuhn) triangulation of a box with `subdivisions` cells per
/// axis: each grid cell `corner + Π [0,h_i]` is split into `n!` simplices
/// `v_0 = corner`, `v_i = v_{i−1} + h_{π(i)} e_{π(i)}`, one per permutation
/// `π`.
pub fn freudenthal_mesh(domain: &BoxDomain, subdivisions: usize) -> Result<Triangulation> {
    if subdivisions == 0 {
        return Err(Error::ZeroSubdivisions);
    }
    let n = domain.dim();
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let s = subdivisions;
    let side = s + 1;
    let coord = |axis: usize, i: usize| {
        if i == s {
            domain.hi[axis]
        } else {
            domain.lo[axis] + (domain.hi[axis] - domain.lo[axis]) * (i as f64) / (s as f64)
        }
    };
    let index = |multi: &[usize]| multi.iter().rev().fold(0, |acc, &i| acc * side + i);

    let total = side.pow(n as u32);
    let mut vertices = Vec::with_capacity(total);
    for lin in 0..total {
        let mut rest = lin;
        let v: Vec<f64> = (0..n)
            .map(|axis| {
                let i = rest % side;
                rest /= side;
                coord(axis, i)
            })
            .collect();
        vertices.push(v);
    }

    let perms = permutations(n);
    let mut cells = Vec::with_capacity(s.pow(n as u32) * perms.len());
    for cube in 0..s.pow(n as u32) {
        let mut rest = cube;
        let corner: Vec<usize> = (0..n)
            .map(|_| {
                let i = rest % s;
                rest /= s;
                i
            })
            .collect();
        for p in &perms {
            let mut cur = corner.clone();
            let mut cell = vec![index(&cur)];
            for &axis in p {
                cur[axis] += 1;
                cell.push(index(&cur));
            }
            cells.push(cell);
        }
    }
    let mesh = Triangulation::from_parts(vertices, cells)?;
    debug_assert!(
        (mesh.regularity - regularity_constant(domain, s)).abs() <= 1e-9 * mesh.regularity
    );
    Ok(mesh)
}

/// `vol(T)/δⁿ` for a Kuhn cell of the grid; `1/(n!·n^{n/2})` for cubes.
pub fn regularity_constant(domain: &BoxDomain, subdivisions: usize) -> f64 {
    let n = domain.dim();
    let h: Vec<f64> = (0..n)
        .map(|i| (domain.hi[i] - domain.lo[i]) / subdivisions as f64)
        .collect();
    let vol = h.iter().product::<f64>() / factorial(n);
    let delta = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    vol / delta.powi(n as i32)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}
