//! Geometrically continuous networks of bicubic Hermite patches.
//!
//! Quad meshes of any corner valence are turned into bicubic Hermite patch
//! networks whose patches share a single tangent plane at every corner. The
//! corner conditions are homogeneous linear systems, solved with generalized
//! cross products from [`projective`].

pub mod continuity;
pub mod diagnostics;
pub mod exec;
pub mod hermite;
pub mod io;
pub mod mesh;
pub mod network;
pub mod projective;

pub use continuity::{CornerStar, NormalPolicy, SolveOptions, TangentSlot};
pub use exec::ExecutionMode;
pub use hermite::{CornerCode, CurveGeometry, PatchGeometry, Side, Vec3};
pub use mesh::TriangleMesh;
pub use network::{
    build_network, demo_cube, NetworkOptions, PatchNetwork, SolvedNetwork, TwistPolicy,
};
pub use projective::{HVec3, HVec4};
