//! Run configuration: a flat `key = value` format with `[section]` headers.
//!
//! ```text
//! [domain]
//! min = 0 0 -0.5
//! max = 1 1 0.5
//! face.zmin = dirichlet builtin problem2
//! [fracture.1]
//! vertices = 0 0 0; 1 0 0; 1 1 0; 0 1 0
//! edges = neumann 0; dirichlet 1; neumann 0; dirichlet 0
//! [numerics]
//! alpha = 1
//! ```
//!
//! Scalar fields are a number, `poly c0 cx cy cz cxx cyy czz cxy cyz cxz` (trailing
//! coefficients may be omitted), or `builtin problem1|problem2`. A builtin field means
//! the benchmark's source, its exact head for Dirichlet data, or its exact outward
//! flux for Neumann data.

use std::fmt::Write as _;
use std::path::Path;

use crate::assembly::MeshSizes;
use crate::error::{Error, Result};
use crate::geometry::{
    BoundaryCondition, BoxFace, Fracture, FractureNetwork, PorousDomain, ScalarField, Tensor2, Tensor3, Vec3,
};
use crate::harness::{dfn_domain, generate_random_dfn, Benchmark, DfnOptions};
use crate::solver::{CgOptions, CgVariant};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Constant(f64),
    /// Quadratic in `x, y, z`: coefficients of `1, x, y, z, x², y², z², xy, yz, xz`.
    Poly(Vec<f64>),
    Builtin(Benchmark),
}

#[derive(Clone, Debug, PartialEq)]
pub enum BcSpec {
    Dirichlet(FieldSpec),
    Neumann(FieldSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
    /// One isotropic value or nine row-major entries.
    pub permeability: Vec<f64>,
    /// In `xmin, xmax, ymin, ymax, zmin, zmax` order.
    pub faces: [BcSpec; 6],
    pub source: FieldSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FractureSpec {
    pub vertices: Vec<[f64; 3]>,
    /// One isotropic value or `xx xy yy` in the fracture frame.
    pub permeability: Vec<f64>,
    /// One condition for every edge, or one per edge `(v_k, v_{k+1})`.
    pub edges: Vec<BcSpec>,
    pub source: FieldSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub fractures: usize,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericsSpec {
    pub alpha: f64,
    pub beta: f64,
    pub delta_d: f64,
    pub f_ratio: f64,
    pub gamma_ratio: f64,
    pub s_ratio: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub variant: CgVariant,
}

impl Default for NumericsSpec {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            delta_d: 0.25,
            f_ratio: 2.0,
            gamma_ratio: 2.0,
            s_ratio: 2.0,
            tol: 1e-8,
            max_iter: 5000,
            variant: CgVariant::Coupled,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputSpec {
    pub vtk: bool,
    /// Write the assembled operators in Matrix Market format.
    pub matrices: bool,
    /// Benchmark whose exact solution the result is compared against.
    pub exact: Option<Benchmark>,
}

/// Either an explicit network or a generator, plus numerics and outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub domain: Option<DomainSpec>,
    pub fractures: Vec<FractureSpec>,
    pub generator: Option<GeneratorSpec>,
    pub numerics: NumericsSpec,
    pub output: OutputSpec,
}

struct Cursor<'a> {
    path: &'a str,
    line: usize,
    field: String,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::ConfigParse {
            path: self.path.to_string(),
            line: self.line,
            field: self.field.clone(),
            message: message.into(),
        }
    }

    fn num(&self, s: &str) -> Result<f64> {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("expected a number, got `{s}`")))
    }

    fn nums(&self, s: &str) -> Result<Vec<f64>> {
        s.split_whitespace().map(|t| self.num(t)).collect()
    }

    fn point(&self, s: &str) -> Result<[f64; 3]> {
        let v = self.nums(s)?;
        <[f64; 3]>::try_from(v).map_err(|v| self.err(format!("expected 3 coordinates, got {}", v.len())))
    }

    fn field(&self, s: &str) -> Result<FieldSpec> {
        let mut it = s.split_whitespace();
        match it.next() {
            Some("poly") => {
                let c = it.map(|t| self.num(t)).collect::<Result<Vec<_>>>()?;
                if c.is_empty() || c.len() > 10 {
                    return Err(self.err("poly takes between 1 and 10 coefficients"));
                }
                Ok(FieldSpec::Poly(c))
            }
            Some("builtin") => {
                let name = it.next().ok_or_else(|| self.err("builtin needs a name"))?;
                if it.next().is_some() {
                    return Err(self.err("unexpected text after builtin name"));
                }
                Benchmark::from_name(name)
                    .map(FieldSpec::Builtin)
                    .ok_or_else(|| self.err(format!("unknown builtin `{name}` (expected problem1 or problem2)")))
            }
            Some(t) if it.next().is_none() => Ok(FieldSpec::Constant(self.num(t)?)),
            _ => Err(self.err(format!("expected a number, `poly ...` or `builtin <name>`, got `{s}`"))),
        }
    }

    fn bc(&self, s: &str) -> Result<BcSpec> {
        let s = s.trim();
        let (kind, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        match kind {
            "dirichlet" => Ok(BcSpec::Dirichlet(self.field(rest)?)),
            "neumann" => Ok(BcSpec::Neumann(self.field(rest)?)),
            _ => Err(self.err(format!("expected `dirichlet <field>` or `neumann <field>`, got `{s}`"))),
        }
    }

    fn boolean(&self, s: &str) -> Result<bool> {
        match s {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.err(format!("expected true or false, got `{s}`"))),
        }
    }

    fn int<I: std::str::FromStr>(&self, s: &str) -> Result<I> {
        s.parse()
            .map_err(|_| self.err(format!("expected a non-negative integer, got `{s}`")))
    }
}

#[derive(Default)]
struct PartialDomain {
    line: usize,
    min: Option<[f64; 3]>,
    max: Option<[f64; 3]>,
    permeability: Option<Vec<f64>>,
    faces: [Option<BcSpec>; 6],
    source: Option<FieldSpec>,
}

#[derive(Default)]
struct PartialFracture {
    line: usize,
    number: usize,
    vertices: Option<Vec<[f64; 3]>>,
    permeability: Option<Vec<f64>>,
    edges: Option<Vec<BcSpec>>,
    source: Option<FieldSpec>,
}

enum Section {
    None,
    Domain,
    Fracture(usize),
    Generator,
    Numerics,
    Output,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigParse {
            path: path.display().to_string(),
            line: 0,
            field: String::new(),
            message: format!("cannot read file: {e}"),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses configuration text; `path` only labels diagnostics.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut cur = Cursor {
            path,
            line: 0,
            field: String::new(),
        };
        let mut section = Section::None;
        let mut domain: Option<PartialDomain> = None;
        let mut fractures: Vec<PartialFracture> = Vec::new();
        let mut generator: Option<(usize, Option<u64>, Option<usize>, Option<f64>)> = None;
        let mut numerics = NumericsSpec::default();
        let mut output = OutputSpec::default();

        for (ln, raw) in text.lines().enumerate() {
            cur.line = ln + 1;
            cur.field.clear();
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                section = match name {
                    "domain" => {
                        if domain.is_some() {
                            return Err(cur.err("duplicate [domain] section"));
                        }
                        domain = Some(PartialDomain {
                            line: cur.line,
                            ..Default::default()
                        });
                        Section::Domain
                    }
                    "generator" => {
                        if generator.is_some() {
                            return Err(cur.err("duplicate [generator] section"));
                        }
                        generator = Some((cur.line, None, None, None));
                        Section::Generator
                    }
                    "numerics" => Section::Numerics,
                    "output" => Section::Output,
                    _ => {
                        let n = name
                            .strip_prefix("fracture.")
                            .and_then(|n| n.parse::<usize>().ok())
                            .ok_or_else(|| cur.err(format!("unknown section [{name}]")))?;
                        if fractures.iter().any(|f| f.number == n) {
                            return Err(cur.err(format!("duplicate section [fracture.{n}]")));
                        }
                        fractures.push(PartialFracture {
                            line: cur.line,
                            number: n,
                            ..Default::default()
                        });
                        Section::Fracture(fractures.len() - 1)
                    }
                };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| cur.err(format!("expected `key = value`, got `{line}`")))?;
            cur.field = key.to_string();
            if value.is_empty() {
                return Err(cur.err("missing value"));
            }
            match &section {
                Section::None => return Err(cur.err("key outside any section")),
                Section::Domain => {
                    let d = domain.as_mut().expect("domain section open");
                    match key {
                        "min" => d.min = Some(cur.point(value)?),
                        "max" => d.max = Some(cur.point(value)?),
                        "permeability" => d.permeability = Some(cur.nums(value)?),
                        "source" => d.source = Some(cur.field(value)?),
                        _ => {
                            let face = key
                                .strip_prefix("face.")
                                .and_then(BoxFace::from_name)
                                .ok_or_else(|| cur.err("unknown key"))?;
                            d.faces[face as usize] = Some(cur.bc(value)?);
                        }
                    }
                }
                Section::Fracture(i) => {
                    let f = &mut fractures[*i];
                    match key {
                        "vertices" => f.vertices = Some(value.split(';').map(|p| cur.point(p)).collect::<Result<_>>()?),
                        "permeability" => f.permeability = Some(cur.nums(value)?),
                        "edges" => f.edges = Some(value.split(';').map(|b| cur.bc(b)).collect::<Result<_>>()?),
                        "source" => f.source = Some(cur.field(value)?),
                        _ => return Err(cur.err("unknown key")),
                    }
                }
                Section::Generator => {
                    let g = generator.as_mut().expect("generator section open");
                    match key {
                        "seed" => g.1 = Some(cur.int(value)?),
                        "fractures" => g.2 = Some(cur.int(value)?),
                        "half_width" => g.3 = Some(cur.num(value)?),
                        _ => return Err(cur.err("unknown key")),
                    }
                }
                Section::Numerics => match key {
                    "alpha" => numerics.alpha = cur.num(value)?,
                    "beta" => numerics.beta = cur.num(value)?,
                    "delta_d" => numerics.delta_d = cur.num(value)?,
                    "f_ratio" => numerics.f_ratio = cur.num(value)?,
                    "gamma_ratio" => numerics.gamma_ratio = cur.num(value)?,
                    "s_ratio" => numerics.s_ratio = cur.num(value)?,
                    "tol" => numerics.tol = cur.num(value)?,
                    "max_iter" => numerics.max_iter = cur.int(value)?,
                    "variant" => {
                        numerics.variant = value
                            .parse()
                            .map_err(|_| cur.err(format!("expected coupled or beta_lagged, got `{value}`")))?
                    }
                    _ => return Err(cur.err("unknown key")),
                },
                Section::Output => match key {
                    "vtk" => output.vtk = cur.boolean(value)?,
                    "matrices" => output.matrices = cur.boolean(value)?,
                    "exact" => {
                        output.exact = Some(
                            Benchmark::from_name(value)
                                .ok_or_else(|| cur.err(format!("unknown benchmark `{value}`")))?,
                        )
                    }
                    _ => return Err(cur.err("unknown key")),
                },
            }
        }

        let domain = domain
            .map(|d| {
                cur.line = d.line;
                cur.field = "min".into();
                let min = d.min.ok_or_else(|| cur.err("required key is missing"))?;
                cur.field = "max".into();
                let max = d.max.ok_or_else(|| cur.err("required key is missing"))?;
                let faces = d.faces.map(|f| f.unwrap_or(BcSpec::Neumann(FieldSpec::Constant(0.0))));
                Ok::<_, Error>(DomainSpec {
                    min,
                    max,
                    permeability: d.permeability.unwrap_or_else(|| vec![1.0]),
                    faces,
                    source: d.source.unwrap_or(FieldSpec::Constant(0.0)),
                })
            })
            .transpose()?;
        fractures.sort_by_key(|f| f.number);
        let fractures = fractures
            .into_iter()
            .map(|f| {
                cur.line = f.line;
                cur.field = "vertices".into();
                let vertices = f.vertices.ok_or_else(|| cur.err("required key is missing"))?;
                Ok(FractureSpec {
                    vertices,
                    permeability: f.permeability.unwrap_or_else(|| vec![1.0]),
                    edges: f
                        .edges
                        .unwrap_or_else(|| vec![BcSpec::Neumann(FieldSpec::Constant(0.0))]),
                    source: f.source.unwrap_or(FieldSpec::Constant(0.0)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let generator = generator
            .map(|(line, seed, n, hw)| {
                cur.line = line;
                cur.field = "seed".into();
                let seed = seed.ok_or_else(|| cur.err("required key is missing"))?;
                Ok::<_, Error>(GeneratorSpec {
                    seed,
                    fractures: n.unwrap_or(20),
                    half_width: hw.unwrap_or(1.0),
                })
            })
            .transpose()?;

        cur.line = 0;
        cur.field.clear();
        if generator.is_some() && (domain.is_some() || !fractures.is_empty()) {
            return Err(cur.err("[generator] cannot be combined with [domain] or [fracture.N] sections"));
        }
        if generator.is_none() && domain.is_none() {
            return Err(cur.err("either [domain] or [generator] is required"));
        }
        let config = RunConfig {
            domain,
            fractures,
            generator,
            numerics,
            output,
        };
        config.check_numerics(path)?;
        Ok(config)
    }

    fn check_numerics(&self, path: &str) -> Result<()> {
        let n = &self.numerics;
        let bad = |field: &str, message: &str| Error::ConfigParse {
            path: path.to_string(),
            line: 0,
            field: field.to_string(),
            message: message.to_string(),
        };
        let positive = [
            ("delta_d", n.delta_d),
            ("f_ratio", n.f_ratio),
            ("gamma_ratio", n.gamma_ratio),
            ("s_ratio", n.s_ratio),
            ("tol", n.tol),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(bad(k, "must be positive"));
        }
        if n.alpha < 0.0 {
            return Err(bad("alpha", "must be non-negative"));
        }
        if n.beta < 0.0 {
            return Err(bad("beta", "must be non-negative"));
        }
        if n.alpha == 0.0
            && self
                .fractures
                .iter()
                .any(|f| !f.edges.iter().any(|b| matches!(b, BcSpec::Dirichlet(_))))
        {
            return Err(bad("alpha", "alpha = 0 requires a Dirichlet edge on every fracture"));
        }
        if self.generator.is_some() && n.alpha == 0.0 {
            return Err(bad("alpha", "alpha = 0 is not allowed for generated networks"));
        }
        let domain_dirichlet = match (&self.domain, &self.generator) {
            (Some(d), _) => d.faces.iter().any(|b| matches!(b, BcSpec::Dirichlet(_))),
            _ => true,
        };
        if n.beta == 0.0 && !domain_dirichlet {
            return Err(bad("beta", "beta = 0 requires a Dirichlet face on the domain"));
        }
        Ok(())
    }

    /// Writes the configuration back in the text format.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        if let Some(d) = &self.domain {
            s.push_str("[domain]\n");
            let _ = writeln!(s, "min = {}", join(&d.min));
            let _ = writeln!(s, "max = {}", join(&d.max));
            let _ = writeln!(s, "permeability = {}", join(&d.permeability));
            let _ = writeln!(s, "source = {}", field_text(&d.source));
            for face in BoxFace::ALL {
                let _ = writeln!(s, "face.{} = {}", face.name(), bc_text(&d.faces[face as usize]));
            }
            s.push('\n');
        }
        for (i, f) in self.fractures.iter().enumerate() {
            let _ = writeln!(s, "[fracture.{}]", i + 1);
            let v: Vec<String> = f.vertices.iter().map(|p| join(p)).collect();
            let _ = writeln!(s, "vertices = {}", v.join("; "));
            let _ = writeln!(s, "permeability = {}", join(&f.permeability));
            let e: Vec<String> = f.edges.iter().map(bc_text).collect();
            let _ = writeln!(s, "edges = {}", e.join("; "));
            let _ = writeln!(s, "source = {}\n", field_text(&f.source));
        }
        if let Some(g) = &self.generator {
            let _ = writeln!(
                s,
                "[generator]\nseed = {}\nfractures = {}\nhalf_width = {}\n",
                g.seed, g.fractures, g.half_width
            );
        }
        let n = &self.numerics;
        let _ = writeln!(
            s,
            "[numerics]\nalpha = {}\nbeta = {}\ndelta_d = {}\nf_ratio = {}\ngamma_ratio = {}\ns_ratio = {}\ntol = {}\nmax_iter = {}\nvariant = {}\n",
            n.alpha,
            n.beta,
            n.delta_d,
            n.f_ratio,
            n.gamma_ratio,
            n.s_ratio,
            n.tol,
            n.max_iter,
            n.variant.name()
        );
        let o = &self.output;
        let _ = writeln!(s, "[output]\nvtk = {}\nmatrices = {}", o.vtk, o.matrices);
        if let Some(b) = o.exact {
            let _ = writeln!(s, "exact = {}", b.name());
        }
        s
    }

    /// Builds the fracture network described by the configuration.
    pub fn network<T: Scalar>(&self) -> Result<FractureNetwork<T>> {
        if let Some(g) = &self.generator {
            let opts = DfnOptions {
                n_fractures: g.fractures,
                half_width: g.half_width,
                ..Default::default()
            };
            return generate_random_dfn(g.seed, &opts);
        }
        let d = self.domain.as_ref().expect("validated: domain present");
        let domain = build_domain(d)?;
        let eps = domain.eps_geo();
        let fractures = self
            .fractures
            .iter()
            .enumerate()
            .map(|(i, f)| build_fracture(i, f, eps))
            .collect::<Result<Vec<_>>>()?;
        FractureNetwork::new(domain, fractures)
    }

    /// Domain used by generated networks, for reporting.
    pub fn generated_domain<T: Scalar>(&self) -> Option<Result<PorousDomain<T>>> {
        self.generator.as_ref().map(|g| dfn_domain(g.half_width))
    }

    pub fn mesh_sizes<T: Scalar>(&self) -> MeshSizes<T> {
        let n = &self.numerics;
        MeshSizes::from_ratios(
            T::lit(n.delta_d),
            T::lit(n.f_ratio),
            T::lit(n.gamma_ratio),
            T::lit(n.s_ratio),
        )
    }

    pub fn cg_options<T: Scalar>(&self, verbose: bool) -> CgOptions<T> {
        let n = &self.numerics;
        CgOptions {
            tol: T::lit(n.tol),
            max_iter: n.max_iter,
            variant: n.variant,
            verbose,
            ..CgOptions::default()
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

fn field_text(f: &FieldSpec) -> String {
    match f {
        FieldSpec::Constant(c) => format!("{c}"),
        FieldSpec::Poly(c) => format!("poly {}", join(c)),
        FieldSpec::Builtin(b) => format!("builtin {}", b.name()),
    }
}

fn bc_text(b: &BcSpec) -> String {
    match b {
        BcSpec::Dirichlet(f) => format!("dirichlet {}", field_text(f)),
        BcSpec::Neumann(f) => format!("neumann {}", field_text(f)),
    }
}

fn poly_field<T: Scalar>(c: &[f64]) -> ScalarField<T> {
    let mut k = [T::zero(); 10];
    for (dst, &src) in k.iter_mut().zip(c) {
        *dst = T::lit(src);
    }
    ScalarField::function(move |p: Vec3<T>| {
        k[0] + k[1] * p.x
            + k[2] * p.y
            + k[3] * p.z
            + k[4] * p.x * p.x
            + k[5] * p.y * p.y
            + k[6] * p.z * p.z
            + k[7] * p.x * p.y
            + k[8] * p.y * p.z
            + k[9] * p.x * p.z
    })
}

/// Where a field is used decides what a builtin stands for.
enum Role<T> {
    MatrixSource,
    FractureSource,
    Value,
    /// Exact outward flux through a boundary with this unit normal.
    Flux(Vec3<T>),
}

fn build_field<T: Scalar>(f: &FieldSpec, role: Role<T>) -> ScalarField<T> {
    match f {
        FieldSpec::Constant(c) => ScalarField::Constant(T::lit(*c)),
        FieldSpec::Poly(c) => poly_field(c),
        FieldSpec::Builtin(b) => {
            let exact = b.exact::<T>();
            match role {
                Role::MatrixSource => ScalarField::Constant(b.matrix_source()),
                Role::FractureSource => ScalarField::Constant(b.fracture_source()),
                Role::Value => ScalarField::function(move |p| exact.eval(p)),
                Role::Flux(n) => ScalarField::function(move |p| exact.grad(p).dot(n)),
            }
        }
    }
}

fn build_bc<T: Scalar>(b: &BcSpec, normal: Vec3<T>) -> BoundaryCondition<T> {
    match b {
        BcSpec::Dirichlet(f) => BoundaryCondition::Dirichlet(build_field(f, Role::Value)),
        BcSpec::Neumann(f) => BoundaryCondition::Neumann(build_field(f, Role::Flux(normal))),
    }
}

fn build_domain<T: Scalar>(d: &DomainSpec) -> Result<PorousDomain<T>> {
    let k = match d.permeability.as_slice() {
        [k] => Tensor3::isotropic(T::lit(*k)),
        m if m.len() == 9 => Tensor3 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| T::lit(m[3 * i + j]))),
        },
        m => {
            return Err(Error::InvalidParameter(format!(
                "domain permeability needs 1 or 9 values, got {}",
                m.len()
            )))
        }
    };
    let faces = std::array::from_fn(|i| {
        let face = BoxFace::ALL[i];
        let mut n = [T::zero(); 3];
        n[face.axis()] = if face.is_max() { T::one() } else { -T::one() };
        build_bc(&d.faces[i], Vec3::new(n[0], n[1], n[2]))
    });
    let p = |v: [f64; 3]| Vec3::from_f64(v);
    PorousDomain::new(p(d.min), p(d.max), k, faces, build_field(&d.source, Role::MatrixSource))
}

fn build_fracture<T: Scalar>(id: usize, f: &FractureSpec, eps: T) -> Result<Fracture<T>> {
    let k = match f.permeability.as_slice() {
        [k] => Tensor2::isotropic(T::lit(*k)),
        [xx, xy, yy] => Tensor2 {
            xx: T::lit(*xx),
            xy: T::lit(*xy),
            yy: T::lit(*yy),
        },
        m => {
            return Err(Error::InvalidParameter(format!(
                "fracture {} permeability needs 1 or 3 values, got {}",
                id + 1,
                m.len()
            )))
        }
    };
    let nv = f.vertices.len();
    let edges: Vec<&BcSpec> = match f.edges.len() {
        1 => vec![&f.edges[0]; nv],
        n if n == nv => f.edges.iter().collect(),
        n => {
            return Err(Error::InvalidParameter(format!(
                "fracture {} has {nv} edges but {n} edge conditions",
                id + 1
            )))
        }
    };
    let vertices: Vec<Vec3<T>> = f.vertices.iter().map(|&v| Vec3::from_f64(v)).collect();
    let placeholder = vec![BoundaryCondition::insulated(); nv];
    let mut fracture = Fracture::new(id, vertices, k, placeholder, eps)?;
    fracture.edge_bc = edges
        .iter()
        .enumerate()
        .map(|(e, b)| {
            let n2 = fracture.edge_normal(e);
            let n3 = fracture.frame.e1 * n2.x + fracture.frame.e2 * n2.y;
            build_bc(b, n3)
        })
        .collect();
    Ok(fracture.with_source(build_field(&f.source, Role::FractureSource)))
}
