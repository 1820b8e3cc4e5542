//! Simplicial meshes, piecewise-affine fields, exact hyperplane slicing of
//! simplices and partitioned integration over mesh faces.

mod face;
mod field;
mod mesh;
mod polytope;
mod simplex;
mod slice;

pub use face::{face_partition_integral, CutFamily, FaceIntegral, JumpForm, SUBCELL_CAP};
pub use field::{interpolate, AffineMap, PiecewiseAffineField};
pub use mesh::{freudenthal_mesh, regularity_constant, BoxDomain, FaceTable, InteriorFace, Triangulation};
pub use polytope::ConvexPolytope;
pub use simplex::Simplex;
pub use slice::{
    coarea_sum, slice_measure, slice_measure_mc, slice_measure_open, slice_polytope,
    tangent_basis, UNIT_TOL,
};
