#![allow(dead_code)]

use dfm::assembly::{Discretization, MeshSizes};
use dfm::geometry::{BoundaryCondition, Fracture, FractureNetwork, PorousDomain, ScalarField, Tensor3, Vec3};
use dfm::mesh::build_box_tet_mesh_with_divisions;

pub fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
    Vec3::new(x, y, z)
}

pub fn unit_cube(face_bc: [BoundaryCondition<f64>; 6]) -> PorousDomain<f64> {
    PorousDomain::new(
        v(0.0, 0.0, 0.0),
        v(1.0, 1.0, 1.0),
        Tensor3::isotropic(1.0),
        face_bc,
        ScalarField::zero(),
    )
    .unwrap()
}

pub fn dirichlet_cube(f: impl Fn(Vec3<f64>) -> f64 + Send + Sync + Clone + 'static) -> PorousDomain<f64> {
    unit_cube(std::array::from_fn(|_| {
        BoundaryCondition::Dirichlet(ScalarField::function(f.clone()))
    }))
}

pub fn zero_dirichlet_cube() -> PorousDomain<f64> {
    unit_cube(std::array::from_fn(|_| BoundaryCondition::dirichlet(0.0)))
}

/// Square fracture spanning the cube on the plane `z = c`.
pub fn plane_z(id: usize, c: f64, bc: BoundaryCondition<f64>) -> Fracture<f64> {
    let pts = vec![v(0.0, 0.0, c), v(1.0, 0.0, c), v(1.0, 1.0, c), v(0.0, 1.0, c)];
    Fracture::uniform(id, pts, bc, 1e-10).unwrap()
}

/// Square fracture spanning the cube on the plane `x = c`.
pub fn plane_x(id: usize, c: f64, bc: BoundaryCondition<f64>) -> Fracture<f64> {
    let pts = vec![v(c, 0.0, 0.0), v(c, 1.0, 0.0), v(c, 1.0, 1.0), v(c, 0.0, 1.0)];
    Fracture::uniform(id, pts, bc, 1e-10).unwrap()
}

/// Discretization on an `(n + 1) × n × (n + 1)` grid so that planes at `0.5` cut through tets.
pub fn discretize(network: FractureNetwork<f64>, n: usize, sizes: MeshSizes<f64>) -> Discretization<f64> {
    let tet = build_box_tet_mesh_with_divisions(&network.domain, [n + 1, n, n + 1]).unwrap();
    Discretization::build_with_tet_mesh(network, tet, sizes).unwrap()
}

/// Two perpendicular fractures `z = 0.5` and `x = 0.5` crossing along a unit trace,
/// inside a cube with zero head on every face.
pub fn crossing_pair(n: usize, sizes: MeshSizes<f64>) -> Discretization<f64> {
    let fr = vec![
        plane_z(0, 0.5, BoundaryCondition::dirichlet(0.0)),
        plane_x(1, 0.5, BoundaryCondition::insulated()),
    ];
    discretize(FractureNetwork::new(zero_dirichlet_cube(), fr).unwrap(), n, sizes)
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let s: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    d / s.max(f64::MIN_POSITIVE)
}
