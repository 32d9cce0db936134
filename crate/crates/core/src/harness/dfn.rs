//! Seeded random fracture networks and their multi-level solves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::time::Instant;

use crate::assembly::{assemble_system, Discretization, MeshSizes};
use crate::error::{Error, Result};
use crate::geometry::{
    compute_traces, BoundaryCondition, BoxFace, Fracture, FractureNetwork, PorousDomain, ScalarField, Tensor3, Vec2,
    Vec3,
};
use crate::solver::{solve_blocks, CgOptions, CgVariant, InnerSolvers, SolveReport, DEFAULT_INNER_TOL};
use crate::Scalar;

#[derive(Clone, Debug)]
pub struct DfnOptions {
    pub n_fractures: usize,
    /// Half-width of the cube centred at the origin.
    pub half_width: f64,
    /// Range of rectangle half-side lengths before clipping.
    pub half_side: (f64, f64),
    /// Smallest accepted angle between normals of intersecting fractures, degrees.
    pub min_normal_angle: f64,
    /// Smallest accepted trace length.
    pub min_trace_length: f64,
    /// Vertices of a clipped polygon closer than this are merged.
    pub min_edge: f64,
    /// Whole-network attempts before giving up.
    pub max_retries: usize,
    /// Candidate draws per fracture within one attempt.
    pub draws_per_fracture: usize,
}

impl Default for DfnOptions {
    fn default() -> Self {
        Self {
            n_fractures: 20,
            half_width: 1.0,
            half_side: (0.35, 0.8),
            min_normal_angle: 10.0,
            min_trace_length: 0.1,
            min_edge: 0.2,
            max_retries: 100,
            draws_per_fracture: 500,
        }
    }
}

/// Mesh sizes used for random networks: fracture meshes twice the tet size, trace
/// meshes twice the fracture size, and `q` meshes eight times the fracture size. Finer
/// `q` meshes add flux modes that barely change the functional and leave the reduced
/// Hessian too ill-conditioned for unpreconditioned CG.
pub fn dfn_mesh_sizes<T: Scalar>(delta_d: T) -> MeshSizes<T> {
    MeshSizes::from_ratios(delta_d, T::lit(2.0), T::lit(8.0), T::lit(2.0))
}

/// Summary statistics of a network.
#[derive(Clone, Debug, PartialEq)]
pub struct DfnStats {
    pub n_fractures: usize,
    pub n_traces: usize,
    pub traces_per_fracture: (usize, usize),
    /// Smallest angle between two crossing traces of one fracture, degrees.
    pub min_trace_angle: Option<f64>,
    /// Smallest angle between normals of intersecting fractures, degrees.
    pub min_normal_angle: Option<f64>,
    pub n_dirichlet_fractures: usize,
}

impl std::fmt::Display for DfnStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let deg = |v: Option<f64>| v.map_or("n/a".to_string(), |a| format!("{a:.1} degrees"));
        write!(
            f,
            "{} fractures, {} traces, {} to {} traces per fracture, min trace angle {}, min normal angle {}",
            self.n_fractures,
            self.n_traces,
            self.traces_per_fracture.0,
            self.traces_per_fracture.1,
            deg(self.min_trace_angle),
            deg(self.min_normal_angle)
        )
    }
}

/// Acute angle between two lines with directions `a` and `b`, degrees.
fn line_angle(cos: f64) -> f64 {
    cos.abs().min(1.0).acos().to_degrees()
}

fn segments_cross<T: Scalar>(a: [Vec2<T>; 2], b: [Vec2<T>; 2]) -> bool {
    let o = |p: Vec2<T>, q: Vec2<T>, r: Vec2<T>| (q - p).cross(r - p);
    let (d1, d2) = (o(a[0], a[1], b[0]), o(a[0], a[1], b[1]));
    let (d3, d4) = (o(b[0], b[1], a[0]), o(b[0], b[1], a[1]));
    d1 * d2 <= T::zero() && d3 * d4 <= T::zero()
}

pub fn dfn_stats<T: Scalar>(network: &FractureNetwork<T>) -> DfnStats {
    let nf = network.fractures.len();
    let counts: Vec<usize> = (0..nf).map(|i| network.traces_of(i).len()).collect();
    let mut min_trace: Option<f64> = None;
    for (i, f) in network.fractures.iter().enumerate() {
        let ts = network.traces_of(i);
        for (a, &ta) in ts.iter().enumerate() {
            for &tb in &ts[a + 1..] {
                let (sa, sb) = (&network.traces[ta], &network.traces[tb]);
                if !segments_cross(sa.local_endpoints(f), sb.local_endpoints(f)) {
                    continue;
                }
                let (da, db) = (sa.endpoints[1] - sa.endpoints[0], sb.endpoints[1] - sb.endpoints[0]);
                let angle = line_angle((da.dot(db) / (da.norm() * db.norm())).as_f64());
                min_trace = Some(min_trace.map_or(angle, |m: f64| m.min(angle)));
            }
        }
    }
    let mut min_normal: Option<f64> = None;
    for t in &network.traces {
        let (i, j) = t.fractures;
        let c = network.fractures[i].frame.normal.dot(network.fractures[j].frame.normal);
        let angle = line_angle(c.as_f64());
        min_normal = Some(min_normal.map_or(angle, |m: f64| m.min(angle)));
    }
    DfnStats {
        n_fractures: nf,
        n_traces: network.traces.len(),
        traces_per_fracture: (
            counts.iter().copied().min().unwrap_or(0),
            counts.iter().copied().max().unwrap_or(0),
        ),
        min_trace_angle: min_trace,
        min_normal_angle: min_normal,
        n_dirichlet_fractures: network.fractures.iter().filter(|f| f.has_dirichlet()).count(),
    }
}

/// Domain `[-w, w]³` with head 0 on the bottom face, insulated elsewhere.
pub fn dfn_domain<T: Scalar>(half_width: f64) -> Result<PorousDomain<T>> {
    let w = T::lit(half_width);
    let mut bc: [BoundaryCondition<T>; 6] = std::array::from_fn(|_| BoundaryCondition::insulated());
    bc[BoxFace::ZMin as usize] = BoundaryCondition::dirichlet(T::zero());
    PorousDomain::new(
        Vec3::new(-w, -w, -w),
        Vec3::new(w, w, w),
        Tensor3::isotropic(T::one()),
        bc,
        ScalarField::zero(),
    )
}

/// Clips a planar polygon to the cube `[-w, w]³`.
fn clip_to_box(poly: Vec<[f64; 3]>, w: f64) -> Vec<[f64; 3]> {
    let mut cur = poly;
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            // keep sign * p[axis] <= w
            let inside = |p: &[f64; 3]| sign * p[axis] <= w;
            let mut out = Vec::new();
            for k in 0..cur.len() {
                let (a, b) = (cur[k], cur[(k + 1) % cur.len()]);
                if inside(&a) {
                    out.push(a);
                }
                if inside(&a) != inside(&b) {
                    let t = (sign * w - a[axis]) / (b[axis] - a[axis]);
                    let mut x = [0.0; 3];
                    for c in 0..3 {
                        x[c] = a[c] + t * (b[c] - a[c]);
                    }
                    x[axis] = sign * w;
                    out.push(x);
                }
            }
            cur = out;
            if cur.len() < 3 {
                return cur;
            }
        }
    }
    cur
}

/// Drops vertices closer than `min_edge` to their predecessor.
fn merge_close(poly: Vec<[f64; 3]>, min_edge: f64) -> Vec<[f64; 3]> {
    let dist =
        |a: &[f64; 3], b: &[f64; 3]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    let mut out: Vec<[f64; 3]> = Vec::new();
    for p in poly {
        if out.last().is_none_or(|q| dist(q, &p) >= min_edge) {
            out.push(p);
        }
    }
    while out.len() > 1 && dist(&out[0], out.last().unwrap()) < min_edge {
        out.pop();
    }
    out
}

fn random_polygon(rng: &mut ChaCha8Rng, opts: &DfnOptions) -> Vec<[f64; 3]> {
    let w = opts.half_width;
    let c = [0, 1, 2].map(|_| rng.gen_range(-w..w));
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    let n = [r * phi.cos(), r * phi.sin(), z];
    // orthonormal in-plane axes, then a random rotation within the plane
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let norm = |a: [f64; 3]| {
        let l = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        a.map(|v| v / l)
    };
    let e1 = norm(cross(n, helper));
    let e2 = cross(n, e1);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (ct, st) = (theta.cos(), theta.sin());
    let a1 = [0, 1, 2].map(|k| ct * e1[k] + st * e2[k]);
    let a2 = [0, 1, 2].map(|k| -st * e1[k] + ct * e2[k]);
    let (lo, hi) = opts.half_side;
    let (hx, hy) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
    [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(sx, sy)| [0, 1, 2].map(|k| c[k] + sx * hx * a1[k] + sy * hy * a2[k]))
        .collect()
}

/// Fracture from a clipped polygon: edges on the top face get head 1, others are insulated.
fn make_fracture<T: Scalar>(id: usize, poly: &[[f64; 3]], w: f64, eps: T) -> Result<Fracture<T>> {
    let n = poly.len();
    let on_top = |p: &[f64; 3]| p[2] >= w - 1e-12;
    let edge_bc = (0..n)
        .map(|k| {
            if on_top(&poly[k]) && on_top(&poly[(k + 1) % n]) {
                BoundaryCondition::dirichlet(T::one())
            } else {
                BoundaryCondition::insulated()
            }
        })
        .collect();
    let vertices = poly.iter().map(|&p| Vec3::from_f64(p)).collect();
    Fracture::new(
        id,
        vertices,
        crate::geometry::Tensor2::isotropic(T::one()),
        edge_bc,
        eps,
    )
}

/// Checks that a candidate set of fractures meets the trace constraints.
fn acceptable<T: Scalar>(fractures: &[Fracture<T>], eps: T, opts: &DfnOptions) -> bool {
    let Ok(traces) = compute_traces(fractures, eps) else {
        return false;
    };
    let last = fractures.len() - 1;
    let mut hits = 0;
    for t in &traces {
        if t.fractures.1 != last {
            continue;
        }
        hits += 1;
        let c = fractures[t.fractures.0].frame.normal.dot(fractures[last].frame.normal);
        if line_angle(c.as_f64()) < opts.min_normal_angle || t.length().as_f64() < opts.min_trace_length {
            return false;
        }
    }
    last == 0 || hits > 0
}

/// Deterministic random network in `[-w, w]³`. Every fracture after the first must
/// intersect an earlier one, so the network is connected and every fracture has a trace.
/// At least one fracture reaches the top face.
pub fn generate_random_dfn<T: Scalar>(seed: u64, opts: &DfnOptions) -> Result<FractureNetwork<T>> {
    if opts.n_fractures == 0 {
        return Err(Error::InvalidParameter("a network needs at least one fracture".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = dfn_domain::<T>(opts.half_width)?;
    let eps = domain.eps_geo();
    'attempt: for _ in 0..opts.max_retries {
        let mut fractures: Vec<Fracture<T>> = Vec::with_capacity(opts.n_fractures);
        for id in 0..opts.n_fractures {
            let mut placed = false;
            for _ in 0..opts.draws_per_fracture {
                let poly = merge_close(
                    clip_to_box(random_polygon(&mut rng, opts), opts.half_width),
                    opts.min_edge,
                );
                if poly.len() < 3 {
                    continue;
                }
                let Ok(f) = make_fracture(id, &poly, opts.half_width, eps) else {
                    continue;
                };
                if f.area().as_f64() < opts.min_edge * opts.min_edge {
                    continue;
                }
                fractures.push(f);
                if acceptable(&fractures, eps, opts) {
                    placed = true;
                    break;
                }
                fractures.pop();
            }
            if !placed {
                continue 'attempt;
            }
        }
        if !fractures.iter().any(|f| f.has_dirichlet()) {
            continue;
        }
        let Ok(network) = FractureNetwork::new(domain.clone(), fractures) else {
            continue;
        };
        if network.is_connected()
            && (0..network.fractures.len()).all(|i| !network.traces_of(i).is_empty() || network.fractures.len() == 1)
        {
            return Ok(network);
        }
    }
    Err(Error::GenerationFailed(opts.max_retries))
}

/// Outcome of one CG variant on one level. Solver failures such as a breakdown of the
/// lagged variant are recorded rather than aborting the experiment.
#[derive(Debug)]
pub struct VariantRun<T> {
    pub variant: CgVariant,
    pub outcome: Result<SolveReport<T>>,
}

/// Results of one mesh level of a network experiment.
#[derive(Debug)]
pub struct DfnLevelReport<T> {
    pub delta_d: T,
    pub n_h: usize,
    pub n_q: usize,
    pub n_u: usize,
    pub n_tets: usize,
    pub runs: Vec<VariantRun<T>>,
}

impl<T: Scalar> DfnLevelReport<T> {
    pub fn n_unknowns(&self) -> usize {
        self.n_h + self.n_q + self.n_u
    }

    pub fn report(&self, variant: CgVariant) -> Option<&SolveReport<T>> {
        self.runs
            .iter()
            .find(|r| r.variant == variant)
            .and_then(|r| r.outcome.as_ref().ok())
    }
}

/// Solves the network at each tet size with every requested CG variant. Meshing,
/// assembly and factorization errors are returned; solver errors are kept per variant.
pub fn run_dfn_experiment<T: Scalar>(
    network: &FractureNetwork<T>,
    deltas: &[T],
    alpha: T,
    beta: T,
    variants: &[CgVariant],
    cg: &CgOptions<T>,
) -> Result<Vec<DfnLevelReport<T>>> {
    let mut out = Vec::new();
    for &delta in deltas {
        let disc = Discretization::build(network.clone(), dfn_mesh_sizes(delta))?;
        let start = Instant::now();
        let blocks = assemble_system(&disc, alpha, beta)?;
        let t = Instant::now();
        let inner = InnerSolvers::new(&disc, &blocks, T::lit(DEFAULT_INNER_TOL))?;
        let factorization = t.elapsed();
        let setup = start.elapsed();
        let runs = variants
            .iter()
            .map(|&variant| {
                let opts = CgOptions { variant, ..cg.clone() };
                let outcome = solve_blocks(&blocks, &inner, &opts).map(|sol| {
                    let mut report = sol.report;
                    let tm = &mut report.timings;
                    tm.mesh = disc.mesh_time;
                    tm.intersections = disc.intersection_time;
                    tm.factorization = factorization;
                    tm.total = disc.mesh_time + disc.intersection_time + setup + tm.cg;
                    report
                });
                VariantRun { variant, outcome }
            })
            .collect();
        out.push(DfnLevelReport {
            delta_d: delta,
            n_h: disc.layout.n_h(),
            n_q: disc.layout.n_q(),
            n_u: disc.layout.n_u(),
            n_tets: disc.tet_mesh.n_tets(),
            runs,
        });
    }
    Ok(out)
}
