//! Lagrange P1/P2 spaces on a lifted mesh, quadrature, and the element
//! kernels of the embedding method.

use crate::linalg::{block_pattern, CsrMatrix};
use crate::mesh::{facet_weingarten, SurfaceMesh};
use crate::{Error, Mat2, Mat3, Mat3x2, Result, Vec2, Vec3};

/// Quadrature on the reference triangle in barycentric coordinates; the
/// weights sum to one, so integrals are `area * sum w_q f(x_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Six-point rule, exact for cubics (Strang and Fix).
    pub fn order3() -> Self {
        let (a, b, c) = (0.659027622374092, 0.231933368553031, 0.109039009072877);
        let points = vec![
            [a, b, c],
            [a, c, b],
            [b, a, c],
            [b, c, a],
            [c, a, b],
            [c, b, a],
        ];
        Self {
            weights: vec![1.0 / 6.0; 6],
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Basis values and gradients with respect to the reference coordinates
/// `(xi, eta) = (lambda_1, lambda_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub grads: Vec<Vec2>,
}

/// Nodal Lagrange basis of order `k` at barycentric point `l`. P2 ordering:
/// vertices, then the midpoints of edges (0,1), (1,2), (2,0).
pub fn eval_basis(k: usize, l: [f64; 3]) -> BasisEval {
    let dl = [
        Vec2::new(-1.0, -1.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
    ];
    match k {
        1 => BasisEval {
            values: l.to_vec(),
            grads: dl.to_vec(),
        },
        2 => {
            let mut values = Vec::with_capacity(6);
            let mut grads = Vec::with_capacity(6);
            for i in 0..3 {
                values.push(l[i] * (2.0 * l[i] - 1.0));
                grads.push(dl[i] * (4.0 * l[i] - 1.0));
            }
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                values.push(4.0 * l[i] * l[j]);
                grads.push((dl[i] * l[j] + dl[j] * l[i]) * 4.0);
            }
            BasisEval { values, grads }
        }
        _ => panic!("unsupported polynomial order {k}"),
    }
}

/// Components per node: `3^n` in the embedding layout, `2^n` intrinsically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Embedding,
    Intrinsic,
}

impl Layout {
    pub fn components(self, rank: usize) -> usize {
        match self {
            Layout::Embedding => 3usize.pow(rank as u32),
            Layout::Intrinsic => 2usize.pow(rank as u32),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FeSpace<'a> {
    pub mesh: &'a SurfaceMesh,
    pub components: usize,
}

impl<'a> FeSpace<'a> {
    pub fn new(mesh: &'a SurfaceMesh, components: usize) -> Self {
        Self { mesh, components }
    }

    pub fn order(&self) -> usize {
        self.mesh.order
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_nodes() * self.components
    }

    pub fn dof(&self, node: usize, comp: usize) -> usize {
        node * self.components + comp
    }

    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let n = self.components;
        self.mesh
            .element(e)
            .iter()
            .flat_map(|&a| (0..n).map(move |c| a * n + c))
            .collect()
    }

    /// Zero matrix with the coupling pattern of this space.
    pub fn pattern(&self) -> Result<CsrMatrix> {
        let m = self.mesh;
        block_pattern(
            m.num_nodes(),
            (0..m.num_elements()).map(|e| m.element(e)),
            self.components,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
    pub rank: usize,
    pub layout: Layout,
}

impl CoefficientVector {
    pub fn zeros(space: &FeSpace<'_>, rank: usize, layout: Layout) -> Result<Self> {
        Self::from_values(space, rank, layout, vec![0.0; space.num_dofs()])
    }

    pub fn from_values(
        space: &FeSpace<'_>,
        rank: usize,
        layout: Layout,
        values: Vec<f64>,
    ) -> Result<Self> {
        if layout.components(rank) != space.components {
            return Err(Error::DimensionMismatch {
                expected: space.components,
                found: layout.components(rank),
            });
        }
        if values.len() != space.num_dofs() {
            return Err(Error::DimensionMismatch {
                expected: space.num_dofs(),
                found: values.len(),
            });
        }
        Ok(Self {
            values,
            rank,
            layout,
        })
    }

    pub fn components(&self) -> usize {
        self.layout.components(self.rank)
    }

    pub fn node(&self, a: usize) -> &[f64] {
        let n = self.components();
        &self.values[a * n..(a + 1) * n]
    }
}

/// Nodal interpolant value at a point of element `e`.
pub fn evaluate_field(
    mesh: &SurfaceMesh,
    u: &CoefficientVector,
    e: usize,
    bary: [f64; 3],
) -> Vec<f64> {
    let basis = eval_basis(mesh.order, bary);
    let mut out = vec![0.0; u.components()];
    for (phi, &a) in basis.values.iter().zip(mesh.element(e)) {
        for (o, v) in out.iter_mut().zip(u.node(a)) {
            *o += phi * v;
        }
    }
    out
}

/// Geometry and basis data at one quadrature point.
#[derive(Debug, Clone)]
pub struct QpData {
    /// Quadrature weight times the surface area element.
    pub measure: f64,
    pub param: Vec2,
    /// Tangent vectors with respect to the parameter coordinates.
    pub jacobian: Mat3x2,
    pub inverse_metric: Mat2,
    pub normal: Vec3,
    pub weingarten: Mat3,
    /// Interpolated and renormalized improved normal.
    pub sharp_normal: Vec3,
    pub values: Vec<f64>,
    /// Basis gradients with respect to the parameter coordinates.
    pub param_grads: Vec<Vec2>,
    /// Tangential surface gradients of the basis functions.
    pub grads: Vec<Vec3>,
}

impl QpData {
    pub fn projection(&self) -> Mat3 {
        Mat3::identity() - self.normal * self.normal.transpose()
    }
}

/// Evaluates geometry per quadrature point, either from the exact chart or
/// from the interpolated surface (flat facets for k = 1, isoparametric for k = 2).
pub struct ElementGeometry<'a> {
    mesh: &'a SurfaceMesh,
    rule: QuadratureRule,
    basis: Vec<BasisEval>,
}

impl<'a> ElementGeometry<'a> {
    pub fn new(mesh: &'a SurfaceMesh) -> Self {
        let rule = QuadratureRule::order3();
        let basis = rule
            .points
            .iter()
            .map(|&l| eval_basis(mesh.order, l))
            .collect();
        Self { mesh, rule, basis }
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn element(&self, e: usize) -> Result<Vec<QpData>> {
        let mesh = self.mesh;
        let nodes = mesh.element(e);
        let (p0, bm) = mesh.param_affine(e);
        let det_b = bm.determinant();
        let binv = bm.try_inverse().ok_or(Error::DegenerateFacet(e))?;
        let binv_t = binv.transpose();
        let facet_h = if mesh.exact_geometry || mesh.order != 1 {
            None
        } else {
            Some(facet_weingarten(mesh, e)?)
        };
        let mut out = Vec::with_capacity(self.rule.len());
        for (q, basis) in self.basis.iter().enumerate() {
            let l = self.rule.points[q];
            let param = p0 + bm * Vec2::new(l[1], l[2]);
            let param_grads: Vec<Vec2> = basis.grads.iter().map(|g| binv_t * g).collect();
            let (jacobian, normal, weingarten) = if mesh.exact_geometry {
                let g = mesh.surface.geometry(param)?;
                (g.jacobian, g.normal, g.weingarten)
            } else {
                let mut jref = Mat3x2::zeros();
                for (g, &a) in basis.grads.iter().zip(nodes) {
                    jref += mesh.nodes[a] * g.transpose();
                }
                let jac = jref * binv;
                let m = jac.column(0).cross(&jac.column(1));
                let mn = m.norm();
                if !(mn > 0.0) {
                    return Err(Error::DegenerateFacet(e));
                }
                let normal = if mesh.order == 1 {
                    mesh.facet_normals[e]
                } else {
                    m / mn
                };
                (jac, normal, Mat3::zeros())
            };
            let metric = jacobian.transpose() * jacobian;
            let det_g = metric.determinant();
            let inverse_metric = metric.try_inverse().ok_or(Error::DegenerateFacet(e))?;
            let grads: Vec<Vec3> = param_grads
                .iter()
                .map(|g| jacobian * (inverse_metric * g))
                .collect();
            let weingarten = match (mesh.exact_geometry, facet_h) {
                (true, _) => weingarten,
                (false, Some(h)) => h,
                (false, None) => {
                    // -|m_h|^-1 P_h grad(I_h m_h), evaluated pointwise.
                    let mut grad_m = Mat3::zeros();
                    let mut m_h = Vec3::zeros();
                    for ((phi, g), &a) in basis.values.iter().zip(&grads).zip(nodes) {
                        let m = mesh.node_normal_directions[a];
                        grad_m += m * g.transpose();
                        m_h += m * *phi;
                    }
                    let p = Mat3::identity() - normal * normal.transpose();
                    -(p * grad_m) / m_h.norm()
                }
            };
            let mut sharp = Vec3::zeros();
            for (phi, &a) in basis.values.iter().zip(nodes) {
                sharp += mesh.improved_normals[a] * *phi;
            }
            let sharp_normal = sharp / sharp.norm();
            out.push(QpData {
                measure: self.rule.weights[q] * 0.5 * det_b.abs() * det_g.sqrt(),
                param,
                jacobian,
                inverse_metric,
                normal,
                weingarten,
                sharp_normal,
                values: basis.values.clone(),
                param_grads,
                grads,
            });
        }
        Ok(out)
    }
}

/// Pointwise weight of a mass-type form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassWeight {
    /// `sum_c u_c v_c` over all components.
    Identity,
    /// Tangential projection on every index of a rank-`n` embedding tensor.
    Projected { rank: usize },
    /// Normal part `Id - P x ... x P` built from the improved normal.
    Normal { rank: usize },
}

fn kron(a: &[f64], na: usize, b: &[f64], nb: usize) -> Vec<f64> {
    let n = na * nb;
    let mut out = vec![0.0; n * n];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + j * nb + l] = a[i * na + j] * b[k * nb + l];
                }
            }
        }
    }
    out
}

fn mat3_slice(m: &Mat3) -> [f64; 9] {
    let mut s = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            s[i * 3 + j] = m[(i, j)];
        }
    }
    s
}

/// `P x ... x P` (rank factors) as a dense `3^n x 3^n` row-major matrix.
fn tensor_power(p: &Mat3, rank: usize) -> Vec<f64> {
    let ps = mat3_slice(p);
    let mut out = vec![1.0];
    let mut n = 1;
    for _ in 0..rank {
        out = kron(&out, n, &ps, 3);
        n *= 3;
    }
    out
}

fn weight_matrix(w: MassWeight, qp: &QpData, ncomp: usize) -> Result<Vec<f64>> {
    let check = |rank: usize| {
        let expected = 3usize.pow(rank as u32);
        if expected == ncomp {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: ncomp,
            })
        }
    };
    Ok(match w {
        MassWeight::Identity => {
            let mut m = vec![0.0; ncomp * ncomp];
            (0..ncomp).for_each(|i| m[i * ncomp + i] = 1.0);
            m
        }
        MassWeight::Projected { rank } => {
            check(rank)?;
            tensor_power(&qp.projection(), rank)
        }
        MassWeight::Normal { rank } => {
            check(rank)?;
            let n = qp.sharp_normal;
            let mut m = tensor_power(&(Mat3::identity() - n * n.transpose()), rank);
            m.iter_mut().for_each(|v| *v = -*v);
            (0..ncomp).for_each(|i| m[i * ncomp + i] += 1.0);
            m
        }
    })
}

fn assemble_with<F>(space: &FeSpace<'_>, mut local: F) -> Result<CsrMatrix>
where
    F: FnMut(&[QpData], &mut [f64]) -> Result<()>,
{
    let mut mat = space.pattern()?;
    let geo = ElementGeometry::new(space.mesh);
    let nloc = space.mesh.nodes_per_element() * space.components;
    let mut buf = vec![0.0; nloc * nloc];
    for e in 0..space.mesh.num_elements() {
        let qps = geo.element(e)?;
        buf.iter_mut().for_each(|v| *v = 0.0);
        local(&qps, &mut buf)?;
        mat.add_block(&space.element_dofs(e), &buf)?;
    }
    Ok(mat)
}

/// `M_ij = int phi_i W phi_j` with a pointwise component weight `W`.
pub fn assemble_mass(space: &FeSpace<'_>, weight: MassWeight) -> Result<CsrMatrix> {
    let nc = space.components;
    assemble_with(space, |qps, buf| {
        let npe = qps[0].values.len();
        let nloc = npe * nc;
        for qp in qps {
            let w = weight_matrix(weight, qp, nc)?;
            for a in 0..npe {
                for b in 0..npe {
                    let s = qp.measure * qp.values[a] * qp.values[b];
                    if s == 0.0 {
                        continue;
                    }
                    for c in 0..nc {
                        for d in 0..nc {
                            buf[(a * nc + c) * nloc + b * nc + d] += s * w[c * nc + d];
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

/// `A_ij = int grad_S phi_i . grad_S phi_j` for a scalar space.
pub fn assemble_stiffness_scalar(space: &FeSpace<'_>) -> Result<CsrMatrix> {
    if space.components != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: space.components,
        });
    }
    assemble_with(space, |qps, buf| {
        let npe = qps[0].values.len();
        for qp in qps {
            for a in 0..npe {
                for b in 0..npe {
                    buf[a * npe + b] += qp.measure * qp.grads[a].dot(&qp.grads[b]);
                }
            }
        }
        Ok(())
    })
}

/// Covariant gradient of the projected basis field `phi_a e_c`, flattened
/// row-major with the derivative index last. Rank 1 gives 9 entries, rank 2
/// gives 27.
pub fn projected_gradient(qp: &QpData, rank: usize, a: usize, comp: usize) -> Vec<f64> {
    let p = qp.projection();
    let h = &qp.weingarten;
    let n = &qp.normal;
    let gphi = &qp.grads[a];
    let phi = qp.values[a];
    match rank {
        1 => {
            let al = comp;
            let mut t = vec![0.0; 9];
            for r in 0..3 {
                for g in 0..3 {
                    t[r * 3 + g] = p[(r, al)] * gphi[g] + phi * n[al] * h[(r, g)];
                }
            }
            t
        }
        2 => {
            let (al, be) = (comp / 3, comp % 3);
            let mut t = vec![0.0; 27];
            for r in 0..3 {
                for s in 0..3 {
                    let pp = p[(r, al)] * p[(s, be)];
                    for g in 0..3 {
                        t[(r * 3 + s) * 3 + g] = pp * gphi[g]
                            + phi
                                * (h[(r, g)] * n[al] * p[(s, be)] + h[(s, g)] * p[(r, al)] * n[be]);
                    }
                }
            }
            t
        }
        _ => unreachable!("rank checked by caller"),
    }
}

/// `(grad_S P u + <u, n> H terms, same for v)` for embedding tensors of
/// rank 1 or 2.
pub fn assemble_tensor_operator(space: &FeSpace<'_>, rank: usize) -> Result<CsrMatrix> {
    if rank != 1 && rank != 2 {
        return Err(Error::UnsupportedRank {
            rank,
            method: "the tensor operator",
        });
    }
    let nc = 3usize.pow(rank as u32);
    if space.components != nc {
        return Err(Error::DimensionMismatch {
            expected: nc,
            found: space.components,
        });
    }
    assemble_with(space, |qps, buf| {
        let npe = qps[0].values.len();
        let nloc = npe * nc;
        let mut t = Vec::with_capacity(nloc);
        for qp in qps {
            t.clear();
            for a in 0..npe {
                for c in 0..nc {
                    t.push(projected_gradient(qp, rank, a, c));
                }
            }
            for i in 0..nloc {
                for j in i..nloc {
                    let v = qp.measure * crate::linalg::dot(&t[i], &t[j]);
                    buf[i * nloc + j] += v;
                    if j != i {
                        buf[j * nloc + i] += v;
                    }
                }
            }
        }
        Ok(())
    })
}

/// `K_ij = int Q# phi_i . Q# phi_j`, unscaled.
pub fn assemble_penalty(space: &FeSpace<'_>, rank: usize) -> Result<CsrMatrix> {
    if rank != 1 && rank != 2 {
        return Err(Error::UnsupportedRank {
            rank,
            method: "the penalty operator",
        });
    }
    assemble_mass(space, MassWeight::Normal { rank })
}
