//! Embedding surface FEM: fields carry all `3^n` Cartesian components per
//! node and the normal part is suppressed by a `beta h^-2` penalty.

use crate::fem::{
    assemble_mass, assemble_penalty, assemble_stiffness_scalar, assemble_tensor_operator,
    ElementGeometry, FeSpace, MassWeight,
};
use crate::linalg::CsrMatrix;
use crate::mesh::SurfaceMesh;
use crate::{Error, Mat3, Result, Vec3};

/// Mass and stiffness of the scalar problem.
#[derive(Debug, Clone)]
pub struct ScalarSystem {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
}

pub fn build_scalar_system(mesh: &SurfaceMesh) -> Result<ScalarSystem> {
    let space = FeSpace::new(mesh, 1);
    Ok(ScalarSystem {
        mass: assemble_mass(&space, MassWeight::Identity)?,
        stiffness: assemble_stiffness_scalar(&space)?,
    })
}

/// Projected mass, curvature-augmented stiffness and unscaled penalty of a
/// rank-1 or rank-2 tensor problem.
#[derive(Debug, Clone)]
pub struct TensorSystem {
    pub rank: usize,
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub penalty: CsrMatrix,
    pub beta: f64,
    /// Mesh size entering the penalty scaling.
    pub h: f64,
}

impl TensorSystem {
    pub fn penalty_factor(&self) -> f64 {
        self.beta / (self.h * self.h)
    }

    /// `A + beta h^-2 K`.
    pub fn operator(&self) -> Result<CsrMatrix> {
        CsrMatrix::linear_combination(&[
            (1.0, &self.stiffness),
            (self.penalty_factor(), &self.penalty),
        ])
    }
}

pub fn build_tensor_system(mesh: &SurfaceMesh, rank: usize, beta: f64) -> Result<TensorSystem> {
    if rank != 1 && rank != 2 {
        return Err(Error::UnsupportedRank {
            rank,
            method: "the tensor SFEM system",
        });
    }
    if !(beta > 0.0) {
        return Err(Error::Config(format!(
            "penalty parameter must be positive, got {beta}"
        )));
    }
    let space = FeSpace::new(mesh, 3usize.pow(rank as u32));
    Ok(TensorSystem {
        rank,
        mass: assemble_mass(&space, MassWeight::Projected { rank })?,
        stiffness: assemble_tensor_operator(&space, rank)?,
        penalty: assemble_penalty(&space, rank)?,
        beta,
        h: mesh.h_max,
    })
}

/// Nodal interpolation of an embedding-valued function of the surface point.
pub fn interpolate<F>(mesh: &SurfaceMesh, components: usize, f: F) -> Vec<f64>
where
    F: Fn(Vec3) -> Vec<f64>,
{
    let mut out = Vec::with_capacity(mesh.num_nodes() * components);
    for x in &mesh.nodes {
        let v = f(*x);
        assert_eq!(v.len(), components);
        out.extend(v);
    }
    out
}

/// Applies `Id - P x ... x P` with `P = I - n n^T` to a rank-`n` embedding tensor.
pub fn normal_part(u: &[f64], rank: usize, n: &Vec3) -> Vec<f64> {
    let p = Mat3::identity() - n * n.transpose();
    match rank {
        0 => vec![0.0; u.len()],
        1 => {
            let v = Vec3::from_column_slice(u);
            (v - p * v).iter().copied().collect()
        }
        2 => {
            let m = Mat3::from_row_slice(u);
            let q = m - p * m * p;
            (0..9).map(|i| q[(i / 3, i % 3)]).collect()
        }
        _ => panic!("unsupported rank {rank}"),
    }
}

/// `|Q# u|_L2 / |u|_L2` by quadrature on the mesh.
pub fn normal_residual_ratio(mesh: &SurfaceMesh, u: &[f64], rank: usize) -> Result<f64> {
    let nc = 3usize.pow(rank as u32);
    if u.len() != mesh.num_nodes() * nc {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_nodes() * nc,
            found: u.len(),
        });
    }
    let geo = ElementGeometry::new(mesh);
    let (mut num, mut den) = (0.0, 0.0);
    let mut val = vec![0.0; nc];
    for e in 0..mesh.num_elements() {
        let nodes = mesh.element(e);
        for qp in geo.element(e)? {
            val.iter_mut().for_each(|v| *v = 0.0);
            for (phi, &a) in qp.values.iter().zip(nodes) {
                for c in 0..nc {
                    val[c] += phi * u[a * nc + c];
                }
            }
            let q = normal_part(&val, rank, &qp.sharp_normal);
            num += qp.measure * q.iter().map(|x| x * x).sum::<f64>();
            den += qp.measure * val.iter().map(|x| x * x).sum::<f64>();
        }
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { 0.0 })
}
