//! Nil (Heisenberg) geometry: translations and metric, closed-form geodesics,
//! the two-point distance problem, fibre projection, geodesic spheres,
//! Apollonius and triangle surfaces, and Menelaus/Ceva configurations.

pub mod apollonius;
pub mod error;
pub mod geodesic;
pub mod nil;
pub mod mesh;
pub mod numeric;
pub mod projection;
pub mod solver;
pub mod sphere;
pub mod triangle_calculus;
pub mod triangle_surface;

pub use error::{NilError, Result};
pub use geodesic::{geodesic_ode_oracle, geodesic_point, geodesic_point_from, GeodesicParams};
pub use nil::{metric_at, tangent_norm, translate, translation_to_origin, MetricTensor, Point, TranslationParams};
pub use solver::{distance, point_at_ratio, solve_geodesic, GeodesicSolution};
pub use projection::{arc_length, circle_through, fibre_project, lift_arc_params, projected_arc, ArcDescriptor, ArcShape, Point2D};
pub use mesh::Mesh;
pub use sphere::{sphere_cross_section, sphere_mesh, sphere_point, SphereSpec};
pub use apollonius::{apollonius_field, apollonius_sample, ApolloniusSpec, BoundingBox, DistanceGrid, Lambda};
pub use triangle_surface::{classify_triangle, triangle_surface_mesh, triangle_surface_point, SurfaceOptions, TriangleSurface, TriangleType};
pub use triangle_calculus::{
    ceva_config, ceva_product, ceva_product_projected, menelaus_point, simple_ratio, surface_line, CevaConfig, CevaOptions, LineCase, LineOptions, SimpleRatio, SurfaceLine,
};
