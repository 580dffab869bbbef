//! Polygonal mesh representation: vertices, globally oriented edges,
//! counterclockwise cells, incidence, boundary flags, geometric quantities,
//! sub-triangulation, and shape-regularity audits.

mod families;

pub use families::{generate_family, MeshFamily};

use crate::geom::{self, Vec2};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Area, centroid, and diameter of one cell.
#[derive(Clone, Copy, Debug)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Vec2,
    pub diameter: f64,
}

/// Midpoint, length, and the globally fixed unit tangent/normal of one edge.
/// The tangent points from the lower vertex index to the higher; the normal
/// is the tangent rotated by -90 degrees.
#[derive(Clone, Copy, Debug)]
pub struct EdgeGeometry {
    pub midpoint: Vec2,
    pub length: f64,
    pub tangent: Vec2,
    pub normal: Vec2,
}

/// Shape-quality audit per Assumption A1/A2: never fails, only reports.
#[derive(Clone, Copy, Debug)]
pub struct RegularityReport {
    /// min over cells of (shortest edge of the cell) / h_P
    pub min_edge_ratio: f64,
    /// min over cells of (inscribed-ball radius estimate from the fan point) / h_P
    pub min_ball_ratio: f64,
}

/// A conforming polygonal mesh, immutable after construction.
#[derive(Clone, Debug)]
pub struct PolyMesh {
    vertices: Vec<Vec2>,
    cells: Vec<Vec<usize>>,
    /// Deduplicated edges as (a, b) with a < b; orientation globally fixed.
    edges: Vec<[usize; 2]>,
    /// Per cell, per side i (from cell vertex i to i+1): (edge id, true when
    /// the cell traverses the edge from a to b).
    cell_edges: Vec<Vec<(usize, bool)>>,
    /// One or two incident cells per edge.
    edge_cells: Vec<(usize, Option<usize>)>,
    vertex_on_boundary: Vec<bool>,
    edge_on_boundary: Vec<bool>,
    /// Star-shapedness fan points stored by generators for nonconvex cells.
    kernel_points: Vec<Option<Vec2>>,
    cell_geom: Vec<CellGeometry>,
    edge_geom: Vec<EdgeGeometry>,
    /// Characteristic vertex length: mean diameter of the cells sharing it.
    h_vertex: Vec<f64>,
}

impl PolyMesh {
    /// Validates and indexes a mesh from vertex positions and CCW cell loops.
    pub fn build(vertices: Vec<Vec2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let n = cells.len();
        Self::build_with_kernels(vertices, cells, vec![None; n])
    }

    pub fn build_with_kernels(
        vertices: Vec<Vec2>,
        cells: Vec<Vec<usize>>,
        kernel_points: Vec<Option<Vec2>>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyMesh);
        }
        assert_eq!(kernel_points.len(), cells.len());
        for (ci, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(Error::TooFewVertices {
                    cell: ci,
                    n: cell.len(),
                });
            }
            for &v in cell {
                if v >= vertices.len() {
                    return Err(Error::VertexIndexOutOfRange {
                        cell: ci,
                        index: v,
                        n_vertices: vertices.len(),
                    });
                }
            }
            let pts: Vec<Vec2> = cell.iter().map(|&v| vertices[v]).collect();
            if !geom::is_simple_polygon(&pts) {
                return Err(Error::NonSimplePolygon { cell: ci });
            }
            let area = geom::signed_area(&pts);
            if area <= 0.0 {
                return Err(Error::ClockwiseLoop { cell: ci, area });
            }
        }

        // Duplicate cells (same vertex set).
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for (ci, cell) in cells.iter().enumerate() {
            let mut key = cell.clone();
            key.sort_unstable();
            if let Some(&first) = seen.get(&key) {
                return Err(Error::DuplicateCell { first, second: ci });
            }
            seen.insert(key, ci);
        }

        // Edge dedup with the global orientation: lower vertex index first.
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_cells: Vec<(usize, Option<usize>)> = Vec::new();
        let mut cell_edges: Vec<Vec<(usize, bool)>> = Vec::with_capacity(cells.len());
        for (ci, cell) in cells.iter().enumerate() {
            let mut sides = Vec::with_capacity(cell.len());
            for s in 0..cell.len() {
                let u = cell[s];
                let v = cell[(s + 1) % cell.len()];
                let key = (u.min(v), u.max(v));
                let forward = u < v;
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_cells.push((usize::MAX, None));
                    edges.len() - 1
                });
                if edge_cells[id].0 == usize::MAX {
                    edge_cells[id].0 = ci;
                } else if edge_cells[id].1.is_none() {
                    edge_cells[id].1 = Some(ci);
                } else {
                    return Err(Error::NonManifoldEdge {
                        a: key.0,
                        b: key.1,
                    });
                }
                sides.push((id, forward));
            }
            cell_edges.push(sides);
        }

        // Dangling vertices.
        let mut used = vec![false; vertices.len()];
        for cell in &cells {
            for &v in cell {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(Error::DanglingVertex { vertex: v });
        }

        let edge_on_boundary: Vec<bool> = edge_cells.iter().map(|ec| ec.1.is_none()).collect();
        let mut vertex_on_boundary = vec![false; vertices.len()];
        for (e, &onb) in edge_on_boundary.iter().enumerate() {
            if onb {
                vertex_on_boundary[edges[e][0]] = true;
                vertex_on_boundary[edges[e][1]] = true;
            }
        }

        let cell_geom: Vec<CellGeometry> = cells
            .iter()
            .map(|cell| {
                let pts: Vec<Vec2> = cell.iter().map(|&v| vertices[v]).collect();
                CellGeometry {
                    area: geom::signed_area(&pts),
                    centroid: geom::centroid(&pts),
                    diameter: geom::diameter(&pts),
                }
            })
            .collect();

        let edge_geom: Vec<EdgeGeometry> = edges
            .iter()
            .map(|&[a, b]| {
                let pa = vertices[a];
                let pb = vertices[b];
                let tangent = (pb - pa).normalize();
                EdgeGeometry {
                    midpoint: (pa + pb) * 0.5,
                    length: pa.dist(pb),
                    tangent,
                    normal: tangent.rot_minus_90(),
                }
            })
            .collect();

        let mut h_sum = vec![0.0; vertices.len()];
        let mut h_cnt = vec![0usize; vertices.len()];
        for (ci, cell) in cells.iter().enumerate() {
            for &v in cell {
                h_sum[v] += cell_geom[ci].diameter;
                h_cnt[v] += 1;
            }
        }
        let h_vertex = h_sum
            .iter()
            .zip(&h_cnt)
            .map(|(&s, &c)| s / c as f64)
            .collect();

        Ok(Self {
            vertices,
            cells,
            edges,
            cell_edges,
            edge_cells,
            vertex_on_boundary,
            edge_on_boundary,
            kernel_points,
            cell_geom,
            edge_geom,
            h_vertex,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex(&self, v: usize) -> Vec2 {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn cell_points(&self, c: usize) -> Vec<Vec2> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// (edge id, cell traverses a->b) per side of the CCW cell loop.
    pub fn cell_edges(&self, c: usize) -> &[(usize, bool)] {
        &self.cell_edges[c]
    }

    pub fn edge_cells(&self, e: usize) -> (usize, Option<usize>) {
        self.edge_cells[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_on_boundary[e]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_on_boundary[v]
    }

    pub fn cell_geometry(&self, c: usize) -> CellGeometry {
        self.cell_geom[c]
    }

    pub fn edge_geometry(&self, e: usize) -> EdgeGeometry {
        self.edge_geom[e]
    }

    pub fn h_vertex(&self, v: usize) -> f64 {
        self.h_vertex[v]
    }

    pub fn h_max(&self) -> f64 {
        self.cell_geom
            .iter()
            .map(|g| g.diameter)
            .fold(0.0, f64::max)
    }

    pub fn kernel_point(&self, c: usize) -> Option<Vec2> {
        self.kernel_points[c]
    }

    /// +1 when the cell-outward normal on side `side` equals the global edge
    /// normal, -1 when it is the negation.
    ///
    /// For a CCW loop the interior lies left of the traversal, so the outward
    /// normal is the traversal direction rotated -90 degrees; it matches the
    /// global normal exactly when the cell traverses the edge a->b.
    pub fn outward_sign(&self, c: usize, side: usize) -> f64 {
        if self.cell_edges[c][side].1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Fan point used for sub-triangulation and the inscribed-ball estimate.
    pub fn fan_point(&self, c: usize) -> Vec2 {
        self.kernel_points[c].unwrap_or(self.cell_geom[c].centroid)
    }

    /// Positively oriented triangle fan covering the cell. Fans from the
    /// stored kernel point when present, else from the centroid; if the
    /// centroid fan fails (nonconvex cell without a stored kernel), vertex
    /// fans are tried before giving up.
    pub fn subtriangulate(&self, c: usize) -> Result<Vec<[Vec2; 3]>> {
        let pts = self.cell_points(c);
        let n = pts.len();
        let fan = |apex: Vec2| -> (Vec<[Vec2; 3]>, Option<(usize, f64)>) {
            let mut tris = Vec::with_capacity(n);
            for i in 0..n {
                let tri = [apex, pts[i], pts[(i + 1) % n]];
                let area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
                if area <= 0.0 {
                    return (tris, Some((i, area)));
                }
                tris.push(tri);
            }
            (tris, None)
        };
        let (tris, failure) = fan(self.fan_point(c));
        match failure {
            None => Ok(tris),
            Some((tri_idx, area)) => {
                if self.kernel_points[c].is_some() {
                    return Err(Error::NotStarShaped {
                        cell: c,
                        triangle: tri_idx,
                        area,
                    });
                }
                // Vertex-fan fallback for mildly nonconvex cells.
                for apex in 0..n {
                    let mut ok = true;
                    let mut tris = Vec::with_capacity(n - 2);
                    for i in 1..n - 1 {
                        let tri = [
                            pts[apex],
                            pts[(apex + i) % n],
                            pts[(apex + i + 1) % n],
                        ];
                        let a = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
                        if a <= 0.0 {
                            ok = false;
                            break;
                        }
                        tris.push(tri);
                    }
                    if ok {
                        return Ok(tris);
                    }
                }
                Err(Error::NotStarShaped {
                    cell: c,
                    triangle: tri_idx,
                    area,
                })
            }
        }
    }

    /// A1/A2 quality report over all cells.
    pub fn audit_regularity(&self) -> RegularityReport {
        let mut min_edge_ratio = f64::INFINITY;
        let mut min_ball_ratio = f64::INFINITY;
        for c in 0..self.n_cells() {
            let h_p = self.cell_geom[c].diameter;
            for &(e, _) in &self.cell_edges[c] {
                min_edge_ratio = min_edge_ratio.min(self.edge_geom[e].length / h_p);
            }
            let p = self.fan_point(c);
            let pts = self.cell_points(c);
            let mut r = f64::INFINITY;
            for i in 0..pts.len() {
                r = r.min(dist_point_segment(p, pts[i], pts[(i + 1) % pts.len()]));
            }
            min_ball_ratio = min_ball_ratio.min(r / h_p);
        }
        RegularityReport {
            min_edge_ratio,
            min_ball_ratio,
        }
    }

    /// Total area of all cells.
    pub fn total_area(&self) -> f64 {
        self.cell_geom.iter().map(|g| g.area).sum()
    }

    pub fn to_json(&self) -> String {
        let file = MeshFile {
            vertices: self.vertices.iter().map(|&v| [v.x, v.y]).collect(),
            cells: self.cells.clone(),
            kernel_points: if self.kernel_points.iter().any(Option::is_some) {
                Some(
                    self.kernel_points
                        .iter()
                        .map(|kp| kp.map(|p| [p.x, p.y]))
                        .collect(),
                )
            } else {
                None
            },
        };
        serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeshFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let vertices = file.vertices.iter().map(|&a| Vec2::from(a)).collect();
        let kernels = match file.kernel_points {
            Some(kps) => {
                if kps.len() != file.cells.len() {
                    return Err(Error::Format(
                        "kernel_points length differs from cells".into(),
                    ));
                }
                kps.iter().map(|kp| kp.map(Vec2::from)).collect()
            }
            None => vec![None; file.cells.len()],
        };
        Self::build_with_kernels(vertices, file.cells, kernels)
    }
}

fn dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// On-disk mesh interchange format.
#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel_points: Option<Vec<Option<[f64; 2]>>>,
}
