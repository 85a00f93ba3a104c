//! The bump benchmark: configuration, initial data, observables at three
//! evaluation points, CSV output and a quick invariant suite.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::fem::{evaluate_field, CoefficientVector, FeSpace, Layout};
use crate::geometry::{bump_eta, GeometryEval, GraphSurface, Rect, SurfaceChart};
use crate::isfem::{build_isfem_system, interpolate_intrinsic, max_normal_defect, push_forward};
use crate::linalg::{dot, CsrMatrix, SolverKind};
use crate::mesh::{lift, triangulate, Grading, SurfaceMesh};
use crate::sfem::{build_scalar_system, build_tensor_system, interpolate, normal_residual_ratio};
use crate::timestep::TimeIntegrator;
use crate::{Error, Result, Vec2, Vec3};

pub const POINT_NAMES: [&str; 3] = ["x0", "x1", "x2"];

/// Evaluation points in the parameter plane, all at distance 0.5 from the origin.
pub fn evaluation_points() -> [Vec2; 3] {
    [
        Vec2::new(-0.5, 0.0),
        Vec2::new(-0.25 * SQRT_2, 0.25 * SQRT_2),
        Vec2::new(0.0, 0.5),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sfem,
    Isfem,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sfem => "sfem",
            Method::Isfem => "isfem",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sfem" => Ok(Method::Sfem),
            "isfem" => Ok(Method::Isfem),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected sfem or isfem)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub method: Method,
    pub rank: usize,
    pub alpha: f64,
    pub h: f64,
    pub dt: f64,
    pub order: usize,
    pub beta: f64,
    pub t_end: f64,
    /// Radius of the initial bump.
    pub eps: f64,
    pub obs_times: Vec<f64>,
    pub exact_geometry: bool,
    pub grading: Option<Grading>,
    pub solver: SolverKind,
    pub out: Option<PathBuf>,
    pub energy_out: Option<PathBuf>,
    pub vtk: Option<PathBuf>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            method: Method::Sfem,
            rank: 0,
            alpha: 1.0,
            h: 0.011,
            dt: 1e-3,
            order: 1,
            beta: 10.0,
            t_end: 1.0,
            eps: 0.2,
            obs_times: (1..=10).map(|i| i as f64 / 10.0).collect(),
            exact_geometry: false,
            grading: None,
            solver: SolverKind::Direct,
            out: None,
            energy_out: None,
            vtk: None,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as an integer")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "" | "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: cannot parse '{v}' as a flag"
        ))),
    }
}

impl BenchmarkConfig {
    /// Sets one option; keys are the long CLI flag names without dashes.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        match key.as_str() {
            "method" => self.method = value.parse()?,
            "rank" => self.rank = parse_usize(&key, value)?,
            "alpha" => self.alpha = parse_f64(&key, value)?,
            "h" => self.h = parse_f64(&key, value)?,
            "dt" => self.dt = parse_f64(&key, value)?,
            "order" => self.order = parse_usize(&key, value)?,
            "beta" => self.beta = parse_f64(&key, value)?,
            "tend" => self.t_end = parse_f64(&key, value)?,
            "eps" => self.eps = parse_f64(&key, value)?,
            "obs-times" => {
                self.obs_times = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_f64(&key, s))
                    .collect::<Result<_>>()?
            }
            "exact-geometry" => self.exact_geometry = parse_bool(&key, value)?,
            "grade" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 4 {
                    return Err(Error::Config("grade: expected cx,cy,radius,levels".into()));
                }
                self.grading = Some(Grading {
                    center: Vec2::new(parse_f64(&key, parts[0])?, parse_f64(&key, parts[1])?),
                    radius: parse_f64(&key, parts[2])?,
                    levels: parse_usize(&key, parts[3])? as u32,
                });
            }
            "solver" => {
                self.solver = match value.trim() {
                    "direct" => SolverKind::Direct,
                    "cg" => SolverKind::Cg {
                        tol: 1e-10,
                        maxit: 10_000,
                    },
                    other => {
                        return Err(Error::Config(format!(
                            "solver: unknown '{other}' (expected direct or cg)"
                        )))
                    }
                }
            }
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "energy-out" => self.energy_out = Some(PathBuf::from(value.trim())),
            "vtk" => self.vtk = Some(PathBuf::from(value.trim())),
            other => return Err(Error::Config(format!("unknown option '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            self.apply(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank > 2 {
            return Err(Error::UnsupportedRank {
                rank: self.rank,
                method: "the benchmark",
            });
        }
        if self.method == Method::Isfem && self.rank == 2 {
            return Err(Error::UnsupportedRank {
                rank: 2,
                method: "the intrinsic method (only ranks 0 and 1 are covered)",
            });
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Config(format!(
                "alpha must be nonnegative, got {}",
                self.alpha
            )));
        }
        for (name, v) in [
            ("h", self.h),
            ("dt", self.dt),
            ("beta", self.beta),
            ("eps", self.eps),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::Config(format!(
                "tend must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.order != 1 && self.order != 2 {
            return Err(Error::Config(format!(
                "order must be 1 or 2, got {}",
                self.order
            )));
        }
        if let Some(t) = self
            .obs_times
            .iter()
            .find(|&&t| !(0.0..=self.t_end + 1e-12).contains(&t))
        {
            return Err(Error::Config(format!(
                "observation time {t} lies outside [0, {}]",
                self.t_end
            )));
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        match self.method {
            Method::Sfem => Layout::Embedding.components(self.rank),
            Method::Isfem => Layout::Intrinsic.components(self.rank),
        }
    }

    pub fn surface(&self) -> SurfaceChart {
        SurfaceChart::benchmark(self.alpha)
    }

    pub fn build_mesh(&self) -> Result<SurfaceMesh> {
        let chart = self.surface();
        let pm = triangulate(chart.domain, self.h, self.grading.as_ref())?;
        // The intrinsic method always integrates on the exact chart.
        let exact = self.exact_geometry || self.method == Method::Isfem;
        lift(pm, Arc::new(chart), self.order, exact)
    }
}

/// Initial value `eps^-2 eta(|x - p| / eps) u_p` at surface point `x`, with
/// `p` the lifted origin and `u_p` = 1, `-e_1` or `e_1 x e_1` (row-major).
pub fn initial_condition(
    rank: usize,
    eps: f64,
    chart: &SurfaceChart,
) -> impl Fn(Vec3) -> Vec<f64> + use<> {
    let p = chart.point(Vec2::zeros());
    let cutoff = chart.cutoff;
    move |x: Vec3| {
        let s = bump_eta((x - p).norm() / eps, cutoff).0 / (eps * eps);
        match rank {
            0 => vec![s],
            1 => vec![-s, 0.0, 0.0],
            _ => {
                let mut v = vec![0.0; 9];
                v[0] = s;
                v
            }
        }
    }
}

/// Frobenius norm and angle to `e_1` (`e_1 x e_1` for rank 2, `+1` for
/// scalars). The angle is NaN when the norm is below `1e-12`.
pub fn observables(u: &[f64], rank: usize) -> (f64, f64) {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return (norm, f64::NAN);
    }
    let _ = rank;
    (norm, (u[0] / norm).clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub method: Method,
    pub rank: usize,
    pub alpha: f64,
    pub t: f64,
    pub point: usize,
    pub norm: f64,
    pub angle: f64,
    /// Embedding components, row-major for rank 2.
    pub components: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    /// `1^T M u / area` for scalar problems, NaN otherwise.
    pub mean: f64,
    /// `u^T L u` with the full spatial operator.
    pub energy: f64,
}

/// An assembled benchmark problem ready for time stepping.
pub struct Problem {
    pub config: BenchmarkConfig,
    pub mesh: SurfaceMesh,
    pub integrator: TimeIntegrator,
    pub initial: Vec<f64>,
    pub area: f64,
    locations: Vec<(usize, [f64; 3])>,
    point_geometry: Vec<GeometryEval>,
}

impl Problem {
    pub fn build(config: &BenchmarkConfig) -> Result<Self> {
        config.validate()?;
        let mesh = config.build_mesh()?;
        let chart = config.surface();
        let ic = initial_condition(config.rank, config.eps, &chart);
        let (mass, operator, initial) = match (config.method, config.rank) {
            (Method::Sfem, 0) => {
                let s = build_scalar_system(&mesh)?;
                (s.mass, s.stiffness, interpolate(&mesh, 1, ic))
            }
            (Method::Sfem, r) => {
                let s = build_tensor_system(&mesh, r, config.beta)?;
                let op = s.operator()?;
                (s.mass, op, interpolate(&mesh, config.components(), ic))
            }
            (Method::Isfem, r) => {
                let s = build_isfem_system(&mesh, r)?;
                (s.mass, s.stiffness, interpolate_intrinsic(&mesh, r, ic)?)
            }
        };
        let area = {
            let scalar = build_scalar_system(&mesh)?;
            scalar.mass.quadratic_form(&vec![1.0; mesh.num_nodes()])
        };
        let integrator = TimeIntegrator::new(mass, operator, config.dt, config.solver)?;
        let mut locations = Vec::new();
        let mut point_geometry = Vec::new();
        for p in evaluation_points() {
            locations.push(mesh.locate(p)?);
            point_geometry.push(chart.geometry(p)?);
        }
        Ok(Self {
            config: config.clone(),
            mesh,
            integrator,
            initial,
            area,
            locations,
            point_geometry,
        })
    }

    pub fn space(&self) -> FeSpace<'_> {
        FeSpace::new(&self.mesh, self.config.components())
    }

    fn layout(&self) -> Layout {
        match self.config.method {
            Method::Sfem => Layout::Embedding,
            Method::Isfem => Layout::Intrinsic,
        }
    }

    /// Embedding components of the discrete field at evaluation point `i`.
    pub fn evaluate(&self, u: &[f64], i: usize) -> Result<Vec<f64>> {
        let cv = CoefficientVector::from_values(
            &self.space(),
            self.config.rank,
            self.layout(),
            u.to_vec(),
        )?;
        let (e, bary) = self.locations[i];
        let v = evaluate_field(&self.mesh, &cv, e, bary);
        Ok(match self.config.method {
            Method::Sfem => v,
            Method::Isfem => push_forward(&self.point_geometry[i], self.config.rank, &v),
        })
    }

    pub fn mean_and_energy(&self, u: &[f64]) -> (f64, f64) {
        let mass = self.integrator.mass();
        let energy = self.integrator.operator().quadratic_form(u);
        let mean = if self.config.rank == 0 {
            dot(&vec![1.0; u.len()], &mass.mul_vec(u)) / self.area
        } else {
            f64::NAN
        };
        (mean, energy)
    }

    /// Relative size of the normal part of a vector or tensor field: the
    /// L2 ratio for the embedding method, the largest pointwise defect for
    /// the intrinsic one.
    pub fn normal_residual(&self, u: &[f64]) -> Result<f64> {
        match (self.config.method, self.config.rank) {
            (_, 0) => Ok(0.0),
            (Method::Sfem, r) => normal_residual_ratio(&self.mesh, u, r),
            (Method::Isfem, _) => max_normal_defect(&self.mesh, u),
        }
    }

    /// Nodal embedding components, pushing intrinsic fields forward.
    pub fn embedding_nodal(&self, u: &[f64]) -> Result<Vec<f64>> {
        match self.config.method {
            Method::Sfem => Ok(u.to_vec()),
            Method::Isfem => {
                let nc = self.config.components();
                let mut out =
                    Vec::with_capacity(self.mesh.num_nodes() * 3usize.pow(self.config.rank as u32));
                for (a, p) in self.mesh.node_params.iter().enumerate() {
                    let geo = self.mesh.surface.geometry(*p)?;
                    out.extend(push_forward(
                        &geo,
                        self.config.rank,
                        &u[a * nc..(a + 1) * nc],
                    ));
                }
                Ok(out)
            }
        }
    }

    /// Observation steps paired with their configured times.
    pub fn observation_steps(&self) -> Result<Vec<(usize, f64)>> {
        self.config
            .obs_times
            .iter()
            .map(|&t| Ok((self.integrator.steps_to(t)?, t)))
            .collect()
    }

    pub fn records_at(&self, u: &[f64], t: f64) -> Result<Vec<ObservationRecord>> {
        (0..3)
            .map(|i| {
                let c = self.evaluate(u, i)?;
                let (norm, angle) = observables(&c, self.config.rank);
                Ok(ObservationRecord {
                    method: self.config.method,
                    rank: self.config.rank,
                    alpha: self.config.alpha,
                    t,
                    point: i,
                    norm,
                    angle,
                    components: c,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<ObservationRecord>,
    pub energy: Vec<EnergyRecord>,
    pub final_state: Vec<f64>,
    pub num_dofs: usize,
    pub h_max: f64,
}

/// Builds and integrates the configured problem; no files are written.
pub fn run(config: &BenchmarkConfig) -> Result<(Problem, RunOutput)> {
    let problem = Problem::build(config)?;
    let n_steps = problem.integrator.steps_to(config.t_end)?;
    let obs = problem.observation_steps()?;
    let mut records = Vec::new();
    let mut energy = Vec::new();
    let final_state =
        problem
            .integrator
            .integrate(problem.initial.clone(), n_steps, |step, u| {
                for &(_, t) in obs.iter().filter(|(s, _)| *s == step) {
                    records.extend(problem.records_at(u, t)?);
                    let (mean, e) = problem.mean_and_energy(u);
                    energy.push(EnergyRecord { t, mean, energy: e });
                }
                if step == 0 && !obs.iter().any(|(s, _)| *s == 0) {
                    let (mean, e) = problem.mean_and_energy(u);
                    energy.push(EnergyRecord {
                        t: 0.0,
                        mean,
                        energy: e,
                    });
                }
                Ok(())
            })?;
    let out = RunOutput {
        records,
        energy,
        final_state,
        num_dofs: problem.initial.len(),
        h_max: problem.mesh.h_max,
    };
    Ok((problem, out))
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(out: &mut W, records: &[ObservationRecord]) -> Result<()> {
    let nc = records.first().map_or(1, |r| r.components.len());
    write!(out, "method,rank,alpha,t,point,norm,angle")?;
    for c in 0..nc {
        write!(out, ",c{c}")?;
    }
    writeln!(out)?;
    for r in records {
        write!(
            out,
            "{},{},{},{},{},{},{}",
            r.method,
            r.rank,
            num(r.alpha),
            num(r.t),
            POINT_NAMES[r.point],
            num(r.norm),
            num(r.angle)
        )?;
        for c in &r.components {
            write!(out, ",{}", num(*c))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_energy_csv<W: Write>(out: &mut W, records: &[EnergyRecord]) -> Result<()> {
    writeln!(out, "t,mean,energy")?;
    for r in records {
        writeln!(out, "{},{},{}", num(r.t), num(r.mean), num(r.energy))?;
    }
    Ok(())
}

/// Runs the configuration and writes the CSV (stdout when no path is set),
/// the optional energy CSV and the optional final-state VTK file.
pub fn execute(config: &BenchmarkConfig) -> Result<RunOutput> {
    let (problem, output) = run(config)?;
    match &config.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_csv(&mut f, &output.records)?;
            f.flush()?;
        }
        None => write_csv(&mut std::io::stdout().lock(), &output.records)?,
    }
    if let Some(path) = &config.energy_out {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_energy_csv(&mut f, &output.energy)?;
        f.flush()?;
    }
    if let Some(path) = &config.vtk {
        let nodal = problem.embedding_nodal(&output.final_state)?;
        let comps = 3usize.pow(config.rank as u32);
        let field =
            crate::vtk::Field::from_nodal("u", &nodal, comps).expect("1, 3 or 9 components");
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let title = format!(
            "{} rank {} alpha {} t {}",
            config.method, config.rank, config.alpha, config.t_end
        );
        crate::vtk::write_vtk(&mut f, &problem.mesh, &title, &[field])?;
        f.flush()?;
    }
    Ok(output)
}

/// Mesh statistics for `mesh-info`.
pub fn mesh_info(config: &BenchmarkConfig) -> Result<String> {
    let mesh = config.build_mesh()?;
    let area: f64 = (0..mesh.num_elements()).map(|e| mesh.facet_area(e)).sum();
    let (edges, _) = mesh.param.edges();
    Ok(format!(
        "vertices: {}\ntriangles: {}\nedges: {}\nboundary edges: {}\nnodes (order {}): {}\nh target: {}\nh max (lifted): {:.6e}\nfacet area: {:.12}\n",
        mesh.param.num_vertices(),
        mesh.param.num_triangles(),
        edges.len(),
        mesh.param.boundary_edges.len(),
        mesh.order,
        mesh.num_nodes(),
        config.h,
        mesh.h_max,
        area
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Quick invariant suite on coarse meshes.
pub fn verify() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // Pointwise geometry on a lattice over the bump.
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let chart = SurfaceChart::benchmark(alpha);
        for i in 0..40 {
            for j in 0..25 {
                let p = chart.center
                    + Vec2::new(
                        -0.26 + 0.52 * i as f64 / 39.0,
                        -0.26 + 0.52 * j as f64 / 24.0,
                    );
                let g = chart.geometry(p)?;
                let n = g.normal;
                worst = worst
                    .max((g.metric - g.jacobian.transpose() * g.jacobian).abs().max())
                    .max((n.norm() - 1.0).abs())
                    .max((g.weingarten * n).norm())
                    .max((g.weingarten - g.weingarten.transpose()).abs().max())
                    .max(g.frame[0].dot(&g.frame[1]).abs());
            }
        }
    }
    checks.push(check(
        "geometry invariants",
        worst < 1e-12,
        format!("max defect {worst:.3e}"),
    ));

    let box_ = Rect::new([-2.0, -2.0], [2.0, 2.0]);
    let pm = triangulate(box_, 0.1, None)?;
    let conform = pm.check_conformity();
    checks.push(check(
        "mesh conformity",
        conform.is_ok(),
        format!("{conform:?}"),
    ));
    let flat = lift(pm.clone(), Arc::new(SurfaceChart::benchmark(0.0)), 1, false)?;
    let area: f64 = (0..flat.num_elements()).map(|e| flat.facet_area(e)).sum();
    checks.push(check(
        "flat area",
        (area - 16.0).abs() < 1e-10,
        format!("area {area:.15}"),
    ));

    let bump = lift(pm, Arc::new(SurfaceChart::benchmark(1.0)), 1, false)?;
    let t = build_tensor_system(&bump, 1, 10.0)?;
    let sym = [&t.mass, &t.stiffness, &t.penalty]
        .iter()
        .map(|m| m.symmetry_error())
        .fold(0.0, f64::max);
    checks.push(check(
        "operator symmetry",
        sym < 1e-13,
        format!("relative asymmetry {sym:.3e}"),
    ));

    for method in [Method::Sfem, Method::Isfem] {
        let cfg = BenchmarkConfig {
            method,
            rank: 0,
            h: 0.1,
            dt: 0.01,
            t_end: 0.2,
            obs_times: vec![0.1, 0.2],
            ..Default::default()
        };
        let (_, out) = run(&cfg)?;
        let m0 = out.energy[0].mean;
        let drift = out
            .energy
            .iter()
            .map(|e| ((e.mean - m0) / m0).abs())
            .fold(0.0, f64::max);
        let name = if method == Method::Sfem {
            "mean conservation (sfem)"
        } else {
            "mean conservation (isfem)"
        };
        checks.push(check(
            name,
            drift < 1e-8,
            format!("relative drift {drift:.3e}"),
        ));
        let monotone = out.energy.windows(2).all(|w| w[1].energy <= w[0].energy);
        let name = if method == Method::Sfem {
            "energy decay (sfem)"
        } else {
            "energy decay (isfem)"
        };
        checks.push(check(
            name,
            monotone,
            format!(
                "{:?}",
                out.energy.iter().map(|e| e.energy).collect::<Vec<_>>()
            ),
        ));
    }

    let cfg = BenchmarkConfig {
        method: Method::Isfem,
        rank: 1,
        h: 0.1,
        dt: 0.01,
        t_end: 0.05,
        obs_times: vec![0.05],
        ..Default::default()
    };
    let (problem, out) = run(&cfg)?;
    let defect = problem.normal_residual(&out.final_state)?;
    checks.push(check(
        "intrinsic tangentiality",
        defect <= 1e-12,
        format!("max |<u,n>|/|u| {defect:.3e}"),
    ));

    let angle_ok = out
        .records
        .iter()
        .all(|r| r.point != 0 || r.norm <= 1e-3 || (r.angle - PI).abs() < 1e-3);
    checks.push(check("bump-axis angle", angle_ok, String::new()));
    Ok(checks)
}

/// Rebuilds a problem's matrices for inspection (tests and diagnostics).
pub fn assembled_operators(problem: &Problem) -> (&CsrMatrix, &CsrMatrix) {
    (problem.integrator.mass(), problem.integrator.operator())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_condition_examples() {
        let chart = SurfaceChart::benchmark(1.0);
        let ic = initial_condition(0, 0.2, &chart);
        assert!((ic(Vec3::zeros())[0] - 25.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((ic(Vec3::zeros())[0] - 9.19699).abs() < 1e-5);
        for p in evaluation_points() {
            assert_eq!(ic(chart.point(p))[0], 0.0);
        }
        let t = initial_condition(2, 0.2, &chart)(Vec3::zeros());
        assert!((t[0] - 9.19699).abs() < 1e-5);
        assert!(t[1..].iter().all(|&v| v == 0.0));
        assert!(
            (initial_condition(1, 0.2, &chart)(Vec3::zeros())[0] + 25.0 * (-1.0f64).exp()).abs()
                < 1e-12
        );
    }

    #[test]
    fn observable_examples() {
        let (n, a) = observables(&[-1.0, 0.0, 0.0], 1);
        assert_eq!((n, a), (1.0, PI));
        let mut e11 = [0.0; 9];
        e11[0] = 1.0;
        assert_eq!(observables(&e11, 2), (1.0, 0.0));
        assert!((observables(&[0.0, 1.0, 0.0], 1).1 - PI / 2.0).abs() < 1e-15);
        assert!(observables(&[0.0, 0.0, 0.0], 1).1.is_nan());
    }

    #[test]
    fn config_parsing() {
        let mut c = BenchmarkConfig::default();
        c.apply_text("method = isfem\nrank = 1 # vector\nalpha=2\nobs-times = 0.5, 1.0\ngrade = -0.5,0,0.3,2\nsolver = cg\n").unwrap();
        assert_eq!(c.method, Method::Isfem);
        assert_eq!(c.rank, 1);
        assert_eq!(c.alpha, 2.0);
        assert_eq!(c.obs_times, vec![0.5, 1.0]);
        assert_eq!(c.grading.unwrap().levels, 2);
        assert!(matches!(c.solver, SolverKind::Cg { .. }));
        assert!(c.apply("nonsense", "1").is_err());
        assert!(c.apply_text("rank 1").is_err());
        c.rank = 2;
        assert!(matches!(c.validate(), Err(Error::UnsupportedRank { .. })));
    }

    #[test]
    fn flat_scalar_run_produces_symmetric_rows() {
        let cfg = BenchmarkConfig {
            alpha: 0.0,
            h: 0.1,
            dt: 0.01,
            ..Default::default()
        };
        let (_, out) = run(&cfg).unwrap();
        assert_eq!(out.records.len(), 30);
        let mut csv = Vec::new();
        write_csv(&mut csv, &out.records).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("method,rank,alpha,t,point,norm,angle,c0\n"));
        assert_eq!(text.lines().count(), 31);
        // x0 and x2 are images under the diagonal swap and the reflection.
        for w in out.records.chunks(3) {
            let v0 = w[0].components[0];
            let v2 = w[2].components[0];
            assert!((v0 - v2).abs() < 1e-12 * v0.abs().max(1e-30), "{v0} {v2}");
        }
    }

    #[test]
    fn conserves_mean_on_bump() {
        for method in [Method::Sfem, Method::Isfem] {
            let cfg = BenchmarkConfig {
                method,
                h: 0.1,
                dt: 0.02,
                t_end: 0.2,
                obs_times: vec![0.1, 0.2],
                ..Default::default()
            };
            let (_, out) = run(&cfg).unwrap();
            let m0 = out.energy[0].mean;
            for e in &out.energy {
                assert!(((e.mean - m0) / m0).abs() < 1e-10);
            }
        }
    }
}
