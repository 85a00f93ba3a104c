//! Structured criss-cross triangulation of the parameter rectangle and its
//! lift onto the surface.

use std::collections::HashMap;
use std::sync::Arc;

use crate::geometry::{GraphSurface, Rect};
use crate::{Error, Mat2, Mat3, Mat3x2, Result, Vec2, Vec3};

/// Local refinement: mesh spacing is divided by `2^levels` inside the
/// axis-aligned strips that cover the disc `|x - center| < radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub center: Vec2,
    pub radius: f64,
    pub levels: u32,
}

#[derive(Debug, Clone)]
pub struct ParamMesh {
    pub domain: Rect,
    pub vertices: Vec<Vec2>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges, oriented counterclockwise around the domain.
    pub boundary_edges: Vec<[usize; 2]>,
    pub h_target: f64,
    /// Grid lines of the underlying rectangular cells.
    pub x_lines: Vec<f64>,
    pub y_lines: Vec<f64>,
}

fn subdivide(lo: f64, hi: f64, spacing: f64, out: &mut Vec<f64>) {
    let n = ((hi - lo) / spacing - 1e-9).ceil().max(1.0) as usize;
    let nf = n as f64;
    for i in 1..=n {
        let t = i as f64;
        // lo*(n-i)/n + hi*i/n keeps symmetric intervals bitwise symmetric.
        out.push(lo * (nf - t) / nf + hi * t / nf);
    }
}

fn axis_lines(lo: f64, hi: f64, h: f64, refine: Option<(f64, f64, u32)>) -> Vec<f64> {
    let mut lines = vec![lo];
    match refine {
        Some((c, r, levels)) if levels > 0 && c + r > lo && c - r < hi => {
            let a = (c - r).max(lo);
            let b = (c + r).min(hi);
            let fine = h / f64::from(1u32 << levels);
            if a > lo {
                subdivide(lo, a, h, &mut lines);
            }
            subdivide(a, b, fine, &mut lines);
            if b < hi {
                subdivide(b, hi, h, &mut lines);
            }
        }
        _ => subdivide(lo, hi, h, &mut lines),
    }
    lines
}

/// Criss-cross triangulation: every grid cell is split into four triangles
/// through its center.
pub fn triangulate(domain: Rect, h: f64, grading: Option<&Grading>) -> Result<ParamMesh> {
    if !(h > 0.0) {
        return Err(Error::InvalidMesh(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    if !(domain.width() > 0.0 && domain.height() > 0.0) {
        return Err(Error::InvalidMesh("degenerate domain".into()));
    }
    if h > domain.width().min(domain.height()) {
        return Err(Error::InvalidMesh(format!(
            "mesh size {h} exceeds the domain extent"
        )));
    }
    if let Some(g) = grading {
        if !(g.radius > 0.0) {
            return Err(Error::InvalidMesh("grading radius must be positive".into()));
        }
    }
    let xs = axis_lines(
        domain.min.x,
        domain.max.x,
        h,
        grading.map(|g| (g.center.x, g.radius, g.levels)),
    );
    let ys = axis_lines(
        domain.min.y,
        domain.max.y,
        h,
        grading.map(|g| (g.center.y, g.radius, g.levels)),
    );
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
    for &y in &ys {
        for &x in &xs {
            vertices.push(Vec2::new(x, y));
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            vertices.push(Vec2::new(
                0.5 * (xs[i] + xs[i + 1]),
                0.5 * (ys[j] + ys[j + 1]),
            ));
        }
    }
    let grid = |i: usize, j: usize| j * (nx + 1) + i;
    let center0 = (nx + 1) * (ny + 1);
    let mut triangles = Vec::with_capacity(4 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let c = center0 + j * nx + i;
            let (v00, v10, v11, v01) = (
                grid(i, j),
                grid(i + 1, j),
                grid(i + 1, j + 1),
                grid(i, j + 1),
            );
            triangles.push([v00, v10, c]);
            triangles.push([v10, v11, c]);
            triangles.push([v11, v01, c]);
            triangles.push([v01, v00, c]);
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push([grid(i, 0), grid(i + 1, 0)]);
    }
    for j in 0..ny {
        boundary_edges.push([grid(nx, j), grid(nx, j + 1)]);
    }
    for i in (0..nx).rev() {
        boundary_edges.push([grid(i + 1, ny), grid(i, ny)]);
    }
    for j in (0..ny).rev() {
        boundary_edges.push([grid(0, j + 1), grid(0, j)]);
    }
    Ok(ParamMesh {
        domain,
        vertices,
        triangles,
        boundary_edges,
        h_target: h,
        x_lines: xs,
        y_lines: ys,
    })
}

impl ParamMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Signed area of triangle `t`.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb - pa).perp(&(pc - pa)))
    }

    /// Unique edges in first-seen order and, per triangle, the ids of its
    /// edges `(0,1)`, `(1,2)`, `(2,0)`.
    pub fn edges(&self) -> (Vec<[usize; 2]>, Vec<[usize; 3]>) {
        let mut ids: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(3 * self.triangles.len() / 2);
        let mut edges = Vec::new();
        let mut tri_edges = Vec::with_capacity(self.triangles.len());
        for tri in &self.triangles {
            let mut te = [0; 3];
            for (k, (a, b)) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
                .into_iter()
                .enumerate()
            {
                let key = (a.min(b), a.max(b));
                te[k] = *ids.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
            }
            tri_edges.push(te);
        }
        (edges, tri_edges)
    }

    /// Edge-to-edge conformity, orientation and containment checks.
    pub fn check_conformity(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            if !(self.signed_area(t) > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not positively oriented"
                )));
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if !self.domain.contains(*v, 1e-12) {
                return Err(Error::InvalidMesh(format!(
                    "vertex {i} lies outside the domain"
                )));
            }
        }
        // Each directed edge appears once; interior edges appear in both directions.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                *directed.entry((a, b)).or_default() += 1;
            }
        }
        let boundary: std::collections::HashSet<(usize, usize)> =
            self.boundary_edges.iter().map(|e| (e[0], e[1])).collect();
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a}, {b}) used {count} times with one orientation"
                )));
            }
            let twin = directed.contains_key(&(b, a));
            let on_boundary = boundary.contains(&(a, b));
            if twin == on_boundary {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a}, {b}) is neither interior nor boundary"
                )));
            }
        }
        if boundary.len() != self.boundary_edges.len()
            || boundary.iter().any(|e| !directed.contains_key(e))
        {
            return Err(Error::InvalidMesh(
                "boundary edge list does not match the triangles".into(),
            ));
        }
        Ok(())
    }

    /// Barycentric coordinates of `p` in triangle `t`.
    pub fn barycentric(&self, t: usize, p: Vec2) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        let det = (pb - pa).perp(&(pc - pa));
        let l1 = (p - pa).perp(&(pc - pa)) / det;
        let l2 = (pb - pa).perp(&(p - pa)) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Containing triangle (lowest index on shared edges and vertices) and
    /// barycentric weights.
    pub fn locate(&self, p: Vec2) -> Result<(usize, [f64; 3])> {
        if !self.domain.contains(p, 1e-12) {
            return Err(Error::OutsideDomain(p.x, p.y));
        }
        const TOL: f64 = 1e-12;
        for t in 0..self.triangles.len() {
            let l = self.barycentric(t, p);
            if l.iter().all(|&w| w >= -TOL) {
                // Snap to the closed triangle so weights stay in [0, 1].
                let mut w = l.map(|x| x.max(0.0));
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                return Ok((t, w));
            }
        }
        Err(Error::OutsideDomain(p.x, p.y))
    }
}

/// A triangulation lifted onto the surface together with discrete geometry.
#[derive(Clone)]
pub struct SurfaceMesh {
    pub param: ParamMesh,
    pub surface: Arc<dyn GraphSurface>,
    /// Lagrange order of the finite element nodes and of the surface map.
    pub order: usize,
    /// Quadrature uses the exact chart instead of the interpolated surface.
    pub exact_geometry: bool,
    /// Parameter positions of all nodes: vertices first, then edge midpoints (order 2).
    pub node_params: Vec<Vec2>,
    /// Lifted node positions.
    pub nodes: Vec<Vec3>,
    element_nodes: Vec<usize>,
    nodes_per_element: usize,
    /// Unit normal of each flat lifted facet.
    pub facet_normals: Vec<Vec3>,
    /// Exact chart normal at every node.
    pub improved_normals: Vec<Vec3>,
    /// Exact `t_1 x t_2` at every node.
    pub node_normal_directions: Vec<Vec3>,
    /// Largest edge length of the lifted flat facets.
    pub h_max: f64,
}

impl std::fmt::Debug for SurfaceMesh {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceMesh")
            .field("order", &self.order)
            .field("exact_geometry", &self.exact_geometry)
            .field("nodes", &self.nodes.len())
            .field("elements", &self.num_elements())
            .field("h_max", &self.h_max)
            .finish()
    }
}

pub fn lift(
    pm: ParamMesh,
    surface: Arc<dyn GraphSurface>,
    order: usize,
    exact_geometry: bool,
) -> Result<SurfaceMesh> {
    if order != 1 && order != 2 {
        return Err(Error::Config(format!(
            "polynomial order must be 1 or 2, got {order}"
        )));
    }
    let mut node_params = pm.vertices.clone();
    let nodes_per_element = if order == 1 { 3 } else { 6 };
    let mut element_nodes = Vec::with_capacity(nodes_per_element * pm.triangles.len());
    if order == 1 {
        for tri in &pm.triangles {
            element_nodes.extend_from_slice(tri);
        }
    } else {
        let (edges, tri_edges) = pm.edges();
        let nv = pm.vertices.len();
        node_params.extend(
            edges
                .iter()
                .map(|e| (pm.vertices[e[0]] + pm.vertices[e[1]]) * 0.5),
        );
        for (tri, te) in pm.triangles.iter().zip(&tri_edges) {
            element_nodes.extend_from_slice(tri);
            element_nodes.extend(te.iter().map(|&e| nv + e));
        }
    }
    let mut nodes = Vec::with_capacity(node_params.len());
    let mut improved_normals = Vec::with_capacity(node_params.len());
    let mut node_normal_directions = Vec::with_capacity(node_params.len());
    for &p in &node_params {
        let g = surface.geometry(p)?;
        nodes.push(g.position);
        improved_normals.push(g.normal);
        node_normal_directions.push(g.normal_direction);
    }
    let mut facet_normals = Vec::with_capacity(pm.triangles.len());
    let mut h_max: f64 = 0.0;
    for (t, tri) in pm.triangles.iter().enumerate() {
        let (a, b, c) = (nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
        let m = (b - a).cross(&(c - a));
        let norm = m.norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateFacet(t));
        }
        facet_normals.push(m / norm);
        h_max = h_max
            .max((b - a).norm())
            .max((c - b).norm())
            .max((a - c).norm());
    }
    Ok(SurfaceMesh {
        param: pm,
        surface,
        order,
        exact_geometry,
        node_params,
        nodes,
        element_nodes,
        nodes_per_element,
        facet_normals,
        improved_normals,
        node_normal_directions,
        h_max,
    })
}

impl SurfaceMesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.param.triangles.len()
    }

    pub fn nodes_per_element(&self) -> usize {
        self.nodes_per_element
    }

    pub fn element(&self, e: usize) -> &[usize] {
        &self.element_nodes[e * self.nodes_per_element..(e + 1) * self.nodes_per_element]
    }

    pub fn locate(&self, p: Vec2) -> Result<(usize, [f64; 3])> {
        self.param.locate(p)
    }

    /// Affine map of the parameter triangle: `x^ = x^_0 + B (xi, eta)`.
    pub fn param_affine(&self, e: usize) -> (Vec2, Mat2) {
        let [a, b, c] = self.param.triangles[e];
        let p0 = self.param.vertices[a];
        let bm = Mat2::from_columns(&[self.param.vertices[b] - p0, self.param.vertices[c] - p0]);
        (p0, bm)
    }

    /// Area of the flat lifted facet.
    pub fn facet_area(&self, e: usize) -> f64 {
        let tri = self.param.triangles[e];
        let (a, b, c) = (self.nodes[tri[0]], self.nodes[tri[1]], self.nodes[tri[2]]);
        0.5 * (b - a).cross(&(c - a)).norm()
    }
}

/// Per-facet discrete Weingarten map `-|m_h|^-1 P_h grad(I_h m_h)` on the
/// flat lifted facets, with `m_h` interpolated linearly from the exact
/// `t_1 x t_2` at the vertices and `|m_h|` taken at the barycenter.
pub fn discrete_weingarten(sm: &SurfaceMesh) -> Result<Vec<Mat3>> {
    (0..sm.num_elements())
        .map(|e| facet_weingarten(sm, e))
        .collect()
}

pub fn facet_weingarten(sm: &SurfaceMesh, e: usize) -> Result<Mat3> {
    let tri = sm.param.triangles[e];
    let (_, bm) = sm.param_affine(e);
    let binv = bm.try_inverse().ok_or(Error::DegenerateFacet(e))?;
    let x = [sm.nodes[tri[0]], sm.nodes[tri[1]], sm.nodes[tri[2]]];
    let jac = Mat3x2::from_columns(&[x[1] - x[0], x[2] - x[0]]) * binv;
    let g = jac.transpose() * jac;
    let ginv = g.try_inverse().ok_or(Error::DegenerateFacet(e))?;
    // Reference gradients of the barycentric functions.
    let ref_grads = [
        Vec2::new(-1.0, -1.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
    ];
    let mut grad_m = Mat3::zeros();
    let mut m_bar = Vec3::zeros();
    for a in 0..3 {
        let sg = jac * (ginv * (binv.transpose() * ref_grads[a]));
        let m = sm.node_normal_directions[tri[a]];
        grad_m += m * sg.transpose();
        m_bar += m / 3.0;
    }
    let mnorm = m_bar.norm();
    if !(mnorm > 0.0) {
        return Err(Error::DegenerateFacet(e));
    }
    let n = sm.facet_normals[e];
    let p = Mat3::identity() - n * n.transpose();
    Ok(-(p * grad_m) / mnorm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HeightJet, SurfaceChart};

    fn bench_box() -> Rect {
        Rect::new([-2.0, -2.0], [2.0, 2.0])
    }

    #[test]
    fn coarse_grid_counts() {
        let m = triangulate(bench_box(), 2.0, None).unwrap();
        assert_eq!(m.num_vertices(), 13);
        assert_eq!(m.num_triangles(), 16);
        m.check_conformity().unwrap();
    }

    #[test]
    fn triangle_count_follows_construction_rule() {
        for h in [0.3, 0.11, 0.044, 0.022] {
            let m = triangulate(bench_box(), h, None).unwrap();
            let n = (4.0f64 / h - 1e-9).ceil() as usize;
            assert_eq!(m.num_triangles(), 4 * n * n);
            assert_eq!(m.num_vertices(), (n + 1) * (n + 1) + n * n);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(triangulate(bench_box(), 5.0, None).is_err());
        assert!(triangulate(bench_box(), 0.0, None).is_err());
        assert!(triangulate(bench_box(), -1.0, None).is_err());
    }

    #[test]
    fn graded_mesh_is_conforming_and_finer_in_disc() {
        let g = Grading {
            center: Vec2::new(-0.5, 0.0),
            radius: 0.3,
            levels: 2,
        };
        let m = triangulate(bench_box(), 0.2, Some(&g)).unwrap();
        m.check_conformity().unwrap();
        let fine = m
            .x_lines
            .windows(2)
            .filter(|w| w[0] >= -0.8 && w[1] <= -0.2)
            .map(|w| w[1] - w[0]);
        for dx in fine {
            assert!(dx <= 0.05 + 1e-12);
        }
        assert!(m.x_lines.windows(2).any(|w| w[1] - w[0] > 0.15));
    }

    #[test]
    fn vertex_set_is_mirror_symmetric() {
        // Adding 0.0 folds -0.0 into 0.0.
        let key = |x: f64, y: f64| ((x + 0.0).to_bits(), (y + 0.0).to_bits());
        let m = triangulate(bench_box(), 0.13, None).unwrap();
        let set: std::collections::HashSet<(u64, u64)> =
            m.vertices.iter().map(|v| key(v.x, v.y)).collect();
        for v in &m.vertices {
            assert!(set.contains(&key(v.x, -v.y)));
            assert!(set.contains(&key(-v.x, v.y)));
            assert!(set.contains(&key(v.y, v.x)));
        }
    }

    #[test]
    fn locate_examples() {
        let m = triangulate(bench_box(), 0.25, None).unwrap();
        let (t, w) = m.locate(m.vertices[7]).unwrap();
        let k = m.triangles[t].iter().position(|&v| v == 7).unwrap();
        assert!((w[k] - 1.0).abs() < 1e-12);
        let tri = m.triangles[0];
        let bc = (m.vertices[tri[0]] + m.vertices[tri[1]] + m.vertices[tri[2]]) / 3.0;
        let (t, w) = m.locate(bc).unwrap();
        assert_eq!(t, 0);
        for x in w {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
        let x1 = Vec2::new(-2f64.sqrt(), 2f64.sqrt()) * 0.25;
        let (_, w) = m.locate(x1).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(m.locate(Vec2::new(2.5, 0.0)).is_err());
    }

    #[test]
    fn flat_lift() {
        let pm = triangulate(bench_box(), 0.2, None).unwrap();
        let sm = lift(pm, Arc::new(SurfaceChart::benchmark(0.0)), 1, false).unwrap();
        let area: f64 = (0..sm.num_elements()).map(|e| sm.facet_area(e)).sum();
        assert!((area - 16.0).abs() < 1e-10);
        assert!(sm.facet_normals.iter().all(|n| *n == Vec3::z()));
        assert!(sm.improved_normals.iter().all(|n| *n == Vec3::z()));
        for h in discrete_weingarten(&sm).unwrap() {
            assert_eq!(h, Mat3::zeros());
        }
    }

    #[test]
    fn improved_normals_are_exact_chart_normals() {
        let chart = SurfaceChart::benchmark(1.0);
        let pm = triangulate(bench_box(), 0.1, None).unwrap();
        let sm = lift(pm, Arc::new(chart), 1, false).unwrap();
        for (p, n) in sm.node_params.iter().zip(&sm.improved_normals) {
            assert_eq!(*n, chart.geometry(*p).unwrap().normal);
        }
        for (e, n) in sm.facet_normals.iter().enumerate() {
            let t = sm.param.triangles[e];
            let (a, b, c) = (sm.nodes[t[0]], sm.nodes[t[1]], sm.nodes[t[2]]);
            let m = (b - a).cross(&(c - a));
            assert!((m / m.norm() - n).norm() < 1e-15);
            assert!((n.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_lift_adds_edge_nodes() {
        let pm = triangulate(bench_box(), 1.0, None).unwrap();
        let (edges, _) = pm.edges();
        let nv = pm.num_vertices();
        let sm = lift(pm, Arc::new(SurfaceChart::benchmark(1.0)), 2, false).unwrap();
        assert_eq!(sm.num_nodes(), nv + edges.len());
        let el = sm.element(3);
        let mid = (sm.node_params[el[0]] + sm.node_params[el[1]]) * 0.5;
        assert_eq!(sm.node_params[el[3]], mid);
    }

    fn flank_error(h: f64) -> f64 {
        let chart = SurfaceChart::benchmark(1.0);
        let pm = triangulate(bench_box(), h, None).unwrap();
        let sm = lift(pm, Arc::new(chart), 1, false).unwrap();
        let mut err: f64 = 0.0;
        for e in 0..sm.num_elements() {
            let tri = sm.param.triangles[e];
            let bc =
                (sm.node_params[tri[0]] + sm.node_params[tri[1]] + sm.node_params[tri[2]]) / 3.0;
            let rho = (bc - chart.center).norm() / chart.radius;
            if !(0.3..0.6).contains(&rho) {
                continue;
            }
            let exact = chart.geometry(bc).unwrap().weingarten;
            err = err.max((facet_weingarten(&sm, e).unwrap() - exact).abs().max());
        }
        err
    }

    #[test]
    fn discrete_weingarten_converges_first_order() {
        // h = 0.1 is 0.4 bump radii and still pre-asymptotic; the rate is
        // measured once the flank is resolved.
        let e: Vec<f64> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&h| flank_error(h))
            .collect();
        assert!(e[2] < e[0], "{e:?}");
        assert!(e[1] / e[2] > 1.8 && e[2] / e[3] > 1.8, "{e:?}");
    }

    /// Spherical cap z = sqrt(R^2 - |x|^2) over a small square.
    struct SphereCap {
        r: f64,
    }

    impl GraphSurface for SphereCap {
        fn jet(&self, x: Vec2) -> HeightJet {
            let z = (self.r * self.r - x.norm_squared()).sqrt();
            let grad = -x / z;
            let hess = -(Mat2::identity() / z + x * x.transpose() / (z * z * z));
            HeightJet {
                value: z,
                grad,
                hess,
            }
        }
    }

    fn cap_errors(h: f64) -> (f64, f64) {
        let r = 2.0;
        let pm = triangulate(Rect::new([-0.5, -0.5], [0.5, 0.5]), h, None).unwrap();
        let sm = lift(pm, Arc::new(SphereCap { r }), 1, false).unwrap();
        let mut eig_err: f64 = 0.0;
        let mut normal_leak: f64 = 0.0;
        for (e, hh) in discrete_weingarten(&sm).unwrap().iter().enumerate() {
            let n = sm.facet_normals[e];
            let sym = (hh + hh.transpose()) * 0.5;
            let mut ev: Vec<f64> = sym
                .symmetric_eigenvalues()
                .iter()
                .map(|x| x.abs())
                .collect();
            ev.sort_by(f64::total_cmp);
            eig_err = eig_err
                .max((ev[1] - 1.0 / r).abs())
                .max((ev[2] - 1.0 / r).abs());
            normal_leak = normal_leak
                .max((hh * n).norm())
                .max((hh.transpose() * n).norm());
        }
        (eig_err, normal_leak)
    }

    #[test]
    fn sphere_cap_curvature() {
        let (e1, l1) = cap_errors(0.1);
        let (e2, l2) = cap_errors(0.05);
        assert!(e1 < 0.05 && e2 < e1, "{e1} {e2}");
        // P_h on both sides makes the normal rows and columns vanish identically.
        assert!(l1 < 1e-12 && l2 < 1e-12, "{l1} {l2}");
    }
}
