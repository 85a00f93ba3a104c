//! Intrinsic surface FEM: fields are stored as contravariant components in
//! the orthogonalized tangent frame `t~_1, t~_2`, so no normal degrees of
//! freedom exist. All geometry comes from the exact chart at quadrature
//! points.
//!
//! Vector gradients use the connection coefficients of the frame itself.
//! The frame comes from Gram-Schmidt and is not a coordinate basis, so the
//! orthogonal-coordinate Christoffel formulas differ from it off the
//! symmetry axis of the bump.

use crate::fem::{eval_basis, FeSpace, QuadratureRule};
use crate::geometry::GeometryEval;
use crate::linalg::CsrMatrix;
use crate::mesh::SurfaceMesh;
use crate::{Error, Mat2, Result, Vec2, Vec3};

/// Chain-rule matrix between parameter derivatives and derivatives along
/// the frame directions: `d/ds^i = sum_j W_ij d/dx^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoordinateChange {
    pub w: Mat2,
}

impl FrameCoordinateChange {
    pub fn at(geo: &GeometryEval) -> Self {
        Self {
            w: geo.frame_change,
        }
    }

    /// Derivatives along `t~_1, t~_2` of a function with parameter gradient `grad`.
    pub fn frame_derivative(&self, grad: Vec2) -> Vec2 {
        self.w * grad
    }
}

/// `<u, v>` in frame components (without the area element):
/// `uv`, `sum h_i^2 u^i v^i`, or `sum h_i^2 h_j^2 u^ij v^ij`.
pub fn intrinsic_inner_product(u: &[f64], v: &[f64], rank: usize, lengths: Vec2) -> f64 {
    let h2 = [lengths.x * lengths.x, lengths.y * lengths.y];
    match rank {
        0 => u[0] * v[0],
        1 => h2[0] * u[0] * v[0] + h2[1] * u[1] * v[1],
        2 => (0..4).map(|k| h2[k / 2] * h2[k % 2] * u[k] * v[k]).sum(),
        _ => panic!("unsupported rank {rank}"),
    }
}

/// Contravariant frame components `g~^-1 W grad` of the surface gradient.
pub fn scalar_surface_gradient(grad: Vec2, geo: &GeometryEval) -> Vec2 {
    let ds = geo.frame_change * grad;
    let h = geo.frame_lengths;
    Vec2::new(ds.x / (h.x * h.x), ds.y / (h.y * h.y))
}

/// Covariant gradient of a vector field from its frame components `u` and
/// their frame derivatives `du[l] = d u / d s^l`. Entry `(l, k)` is
/// `g~^ll (d_l u^k + C^k_lj u^j)`.
pub fn vector_covariant_gradient(u: Vec2, du: [Vec2; 2], geo: &GeometryEval) -> Mat2 {
    let h = geo.frame_lengths;
    let mut out = Mat2::zeros();
    for l in 0..2 {
        for k in 0..2 {
            let conn: f64 = (0..2).map(|j| geo.connection[k][l][j] * u[j]).sum();
            out[(l, k)] = (du[l][k] + conn) / (h[l] * h[l]);
        }
    }
    out
}

/// Embedding vector or tensor `u^i t~_i` / `u^ij t~_i x t~_j` (row-major).
pub fn push_forward(geo: &GeometryEval, rank: usize, u: &[f64]) -> Vec<f64> {
    let t = &geo.frame;
    match rank {
        0 => vec![u[0]],
        1 => (t[0] * u[0] + t[1] * u[1]).iter().copied().collect(),
        2 => {
            let mut m = crate::Mat3::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    m += t[i] * t[j].transpose() * u[i * 2 + j];
                }
            }
            (0..9).map(|k| m[(k / 3, k % 3)]).collect()
        }
        _ => panic!("unsupported rank {rank}"),
    }
}

/// Frame components of an embedding vector or tensor; the normal part is dropped.
pub fn pull_back(geo: &GeometryEval, rank: usize, u: &[f64]) -> Vec<f64> {
    let t = &geo.frame;
    let h = geo.frame_lengths;
    let h2 = [h.x * h.x, h.y * h.y];
    match rank {
        0 => vec![u[0]],
        1 => {
            let v = Vec3::from_column_slice(u);
            (0..2).map(|i| v.dot(&t[i]) / h2[i]).collect()
        }
        2 => {
            let m = crate::Mat3::from_row_slice(u);
            (0..4)
                .map(|k| (t[k / 2].transpose() * m * t[k % 2])[0] / (h2[k / 2] * h2[k % 2]))
                .collect()
        }
        _ => panic!("unsupported rank {rank}"),
    }
}

#[derive(Debug, Clone)]
pub struct IsfemSystem {
    pub rank: usize,
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
}

/// Quadrature data shared by the intrinsic kernels.
struct IntrinsicQp {
    measure: f64,
    geo: GeometryEval,
    values: Vec<f64>,
    frame_grads: Vec<Vec2>,
}

fn element_qps(
    mesh: &SurfaceMesh,
    rule: &QuadratureRule,
    basis: &[crate::fem::BasisEval],
    e: usize,
) -> Result<Vec<IntrinsicQp>> {
    let (p0, bm) = mesh.param_affine(e);
    let det_b = bm.determinant().abs();
    let binv_t = bm
        .try_inverse()
        .ok_or(Error::DegenerateFacet(e))?
        .transpose();
    let mut out = Vec::with_capacity(rule.len());
    for (q, b) in basis.iter().enumerate() {
        let l = rule.points[q];
        let geo = mesh.surface.geometry(p0 + bm * Vec2::new(l[1], l[2]))?;
        let change = FrameCoordinateChange::at(&geo);
        let frame_grads = b
            .grads
            .iter()
            .map(|g| change.frame_derivative(binv_t * g))
            .collect();
        out.push(IntrinsicQp {
            measure: rule.weights[q] * 0.5 * det_b * geo.area_element,
            geo,
            values: b.values.clone(),
            frame_grads,
        });
    }
    Ok(out)
}

pub fn build_isfem_system(mesh: &SurfaceMesh, rank: usize) -> Result<IsfemSystem> {
    if rank > 1 {
        return Err(Error::UnsupportedRank {
            rank,
            method: "the intrinsic method (only ranks 0 and 1 are covered)",
        });
    }
    let nc = 2usize.pow(rank as u32);
    let space = FeSpace::new(mesh, nc);
    let mut mass = space.pattern()?;
    let mut stiffness = mass.clone();
    let rule = QuadratureRule::order3();
    let basis: Vec<_> = rule
        .points
        .iter()
        .map(|&l| eval_basis(mesh.order, l))
        .collect();
    let npe = mesh.nodes_per_element();
    let nloc = npe * nc;
    let mut mloc = vec![0.0; nloc * nloc];
    let mut aloc = vec![0.0; nloc * nloc];
    // Per local dof: the gradient in a frame where the inner product is Euclidean.
    let mut grads: Vec<Vec<f64>> = vec![Vec::new(); nloc];
    for e in 0..mesh.num_elements() {
        mloc.iter_mut().for_each(|v| *v = 0.0);
        aloc.iter_mut().for_each(|v| *v = 0.0);
        for qp in element_qps(mesh, &rule, &basis, e)? {
            let h = qp.geo.frame_lengths;
            for a in 0..npe {
                let phi = qp.values[a];
                let dphi = qp.frame_grads[a];
                if rank == 0 {
                    grads[a] = vec![dphi.x / h.x, dphi.y / h.y];
                } else {
                    for j in 0..2 {
                        let mut u = Vec2::zeros();
                        u[j] = phi;
                        let mut du = [Vec2::zeros(); 2];
                        du[0][j] = dphi.x;
                        du[1][j] = dphi.y;
                        let g = vector_covariant_gradient(u, du, &qp.geo);
                        // sum_lk h_l^2 h_k^2 g_lk^2 = sum_lk (h_l h_k g_lk)^2
                        grads[a * 2 + j] = (0..4)
                            .map(|i| h[i / 2] * h[i % 2] * g[(i / 2, i % 2)])
                            .collect();
                    }
                }
            }
            for a in 0..npe {
                for b in 0..npe {
                    let pp = qp.measure * qp.values[a] * qp.values[b];
                    for c in 0..nc {
                        let w = if rank == 0 { 1.0 } else { h[c] * h[c] };
                        mloc[(a * nc + c) * nloc + b * nc + c] += pp * w;
                    }
                }
            }
            for i in 0..nloc {
                for j in i..nloc {
                    let v = qp.measure * crate::linalg::dot(&grads[i], &grads[j]);
                    aloc[i * nloc + j] += v;
                    if i != j {
                        aloc[j * nloc + i] += v;
                    }
                }
            }
        }
        let dofs = space.element_dofs(e);
        mass.add_block(&dofs, &mloc)?;
        stiffness.add_block(&dofs, &aloc)?;
    }
    Ok(IsfemSystem {
        rank,
        mass,
        stiffness,
    })
}

/// Intrinsic nodal interpolation of an embedding-valued function: the value
/// at each node is decomposed onto the exact frame there.
pub fn interpolate_intrinsic<F>(mesh: &SurfaceMesh, rank: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(Vec3) -> Vec<f64>,
{
    let nc = 2usize.pow(rank as u32);
    let mut out = Vec::with_capacity(mesh.num_nodes() * nc);
    for (p, x) in mesh.node_params.iter().zip(&mesh.nodes) {
        let geo = mesh.surface.geometry(*p)?;
        out.extend(pull_back(&geo, rank, &f(*x)));
    }
    Ok(out)
}

/// Largest `|<u, n>| / |u|` of the pushed-forward vector field over all
/// quadrature points.
pub fn max_normal_defect(mesh: &SurfaceMesh, u: &[f64]) -> Result<f64> {
    let rule = QuadratureRule::order3();
    let basis: Vec<_> = rule
        .points
        .iter()
        .map(|&l| eval_basis(mesh.order, l))
        .collect();
    let mut worst: f64 = 0.0;
    for e in 0..mesh.num_elements() {
        let nodes = mesh.element(e);
        for qp in element_qps(mesh, &rule, &basis, e)? {
            let mut c = [0.0; 2];
            for (phi, &a) in qp.values.iter().zip(nodes) {
                c[0] += phi * u[2 * a];
                c[1] += phi * u[2 * a + 1];
            }
            let v = Vec3::from_column_slice(&push_forward(&qp.geo, 1, &c));
            let nv = v.norm();
            if nv > 0.0 {
                worst = worst.max(v.dot(&qp.geo.normal).abs() / nv);
            }
        }
    }
    Ok(worst)
}
