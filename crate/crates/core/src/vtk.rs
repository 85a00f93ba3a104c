//! Legacy ASCII VTK output of a lifted mesh with point data.
//!
//! The file is an `UNSTRUCTURED_GRID` with linear (type 5) or quadratic
//! (type 22) triangles. Point data fields are written as `SCALARS`,
//! `VECTORS` or `TENSORS` (3x3, row-major) sections.

use std::io::Write;

use crate::mesh::SurfaceMesh;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Scalar(Vec<f64>),
    Vector(Vec<[f64; 3]>),
    Tensor(Vec<[f64; 9]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub data: FieldData,
}

impl Field {
    /// Wraps a flat nodal array with 1, 3 or 9 components per node.
    pub fn from_nodal(name: &str, values: &[f64], components: usize) -> Option<Self> {
        let data = match components {
            1 => FieldData::Scalar(values.to_vec()),
            3 => FieldData::Vector(values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()),
            9 => FieldData::Tensor(
                values
                    .chunks_exact(9)
                    .map(|c| c.try_into().unwrap())
                    .collect(),
            ),
            _ => return None,
        };
        Some(Self {
            name: name.to_string(),
            data,
        })
    }

    fn len(&self) -> usize {
        match &self.data {
            FieldData::Scalar(v) => v.len(),
            FieldData::Vector(v) => v.len(),
            FieldData::Tensor(v) => v.len(),
        }
    }
}

pub fn write_vtk<W: Write>(
    out: &mut W,
    mesh: &SurfaceMesh,
    title: &str,
    fields: &[Field],
) -> Result<()> {
    let n = mesh.num_nodes();
    let ne = mesh.num_elements();
    let npe = mesh.nodes_per_element();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for x in &mesh.nodes {
        writeln!(out, "{:e} {:e} {:e}", x.x, x.y, x.z)?;
    }
    writeln!(out, "CELLS {ne} {}", ne * (npe + 1))?;
    for e in 0..ne {
        write!(out, "{npe}")?;
        for a in mesh.element(e) {
            write!(out, " {a}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {ne}")?;
    let cell_type = if npe == 3 { 5 } else { 22 };
    for _ in 0..ne {
        writeln!(out, "{cell_type}")?;
    }
    if fields.is_empty() {
        return Ok(());
    }
    writeln!(out, "POINT_DATA {n}")?;
    for f in fields {
        if f.len() != n {
            return Err(crate::Error::DimensionMismatch {
                expected: n,
                found: f.len(),
            });
        }
        let name = f.name.replace(char::is_whitespace, "_");
        match &f.data {
            FieldData::Scalar(v) => {
                writeln!(out, "SCALARS {name} double 1")?;
                writeln!(out, "LOOKUP_TABLE default")?;
                for x in v {
                    writeln!(out, "{x:e}")?;
                }
            }
            FieldData::Vector(v) => {
                writeln!(out, "VECTORS {name} double")?;
                for x in v {
                    writeln!(out, "{:e} {:e} {:e}", x[0], x[1], x[2])?;
                }
            }
            FieldData::Tensor(v) => {
                writeln!(out, "TENSORS {name} double")?;
                for x in v {
                    for r in 0..3 {
                        writeln!(out, "{:e} {:e} {:e}", x[3 * r], x[3 * r + 1], x[3 * r + 2])?;
                    }
                }
            }
        }
    }
    Ok(())
}
