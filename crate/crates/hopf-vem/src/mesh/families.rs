//! Generators for the four mesh families used by the convergence studies:
//! smoothly remapped quadrilaterals, randomized quadrilaterals, smoothly
//! remapped hexagons, and nonconvex octagons, each on the unit square with
//! nine refinement levels.

use super::PolyMesh;
use crate::geom::Vec2;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Number of grid intervals per side at each refinement level.
pub const LEVEL_DIVISIONS: [usize; 9] = [5, 10, 20, 30, 40, 50, 60, 70, 80];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    RemappedQuad,
    RandomizedQuad,
    RemappedHex,
    NonconvexOctagon,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 4] = [
        MeshFamily::RemappedQuad,
        MeshFamily::RandomizedQuad,
        MeshFamily::RemappedHex,
        MeshFamily::NonconvexOctagon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::RemappedQuad => "remapped-quad",
            MeshFamily::RandomizedQuad => "randomized-quad",
            MeshFamily::RemappedHex => "remapped-hex",
            MeshFamily::NonconvexOctagon => "nonconvex-octagon",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "remapped-quad" => Ok(MeshFamily::RemappedQuad),
            "randomized-quad" => Ok(MeshFamily::RandomizedQuad),
            "remapped-hex" => Ok(MeshFamily::RemappedHex),
            "nonconvex-octagon" => Ok(MeshFamily::NonconvexOctagon),
            other => Err(format!(
                "unknown mesh family `{other}` (expected remapped-quad, randomized-quad, remapped-hex, or nonconvex-octagon)"
            )),
        }
    }
}

/// Smooth coordinate map applied to the remapped families; it fixes the
/// boundary of the unit square pointwise.
fn smooth_remap(p: Vec2) -> Vec2 {
    use std::f64::consts::PI;
    let d = 0.1 * (2.0 * PI * p.x).sin() * (2.0 * PI * p.y).sin();
    Vec2::new(p.x + d, p.y + d)
}

/// Generates the requested family at refinement level 0..=8. Only the
/// randomized-quad family consumes the seed; connectivity never depends on
/// it.
pub fn generate_family(family: MeshFamily, level: usize, seed: u64) -> Result<PolyMesh> {
    if level >= LEVEL_DIVISIONS.len() {
        return Err(Error::UnsupportedLevel { level });
    }
    let n = LEVEL_DIVISIONS[level];
    match family {
        MeshFamily::RemappedQuad => {
            let (mut verts, cells) = quad_grid_raw(n);
            for v in &mut verts {
                *v = smooth_remap(*v);
            }
            PolyMesh::build(verts, cells)
        }
        MeshFamily::RandomizedQuad => {
            let (mut verts, cells) = quad_grid_raw(n);
            let h = 1.0 / n as f64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for j in 0..=n {
                for i in 0..=n {
                    if i > 0 && i < n && j > 0 && j < n {
                        let dx: f64 = rng.random_range(-0.3..0.3);
                        let dy: f64 = rng.random_range(-0.3..0.3);
                        let v = &mut verts[j * (n + 1) + i];
                        *v += Vec2::new(dx * h, dy * h);
                    }
                }
            }
            PolyMesh::build(verts, cells)
        }
        MeshFamily::RemappedHex => hex_mesh(n + 1),
        MeshFamily::NonconvexOctagon => octagon_mesh(n),
    }
}

/// Uniform n x n quadrilateral grid on the unit square.
pub(crate) fn quad_grid_raw(n: usize) -> (Vec<Vec2>, Vec<Vec<usize>>) {
    let h = 1.0 / n as f64;
    let mut verts = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            verts.push(Vec2::new(i as f64 * h, j as f64 * h));
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    (verts, cells)
}

/// Hexagon-dominant tiling with m columns of m cells each, then the smooth
/// remap.
///
/// Columns are separated by vertical zigzag paths; odd columns are offset by
/// half a cell height, with a half-height bottom cell and a merged top cell
/// so that every column holds exactly m cells. Cells touching the boundary
/// keep a collinear mid-side vertex (except the four corner cells), which
/// matches the element/edge/vertex counts of the reference tables:
/// m^2 cells, 3m^2+4m-7 edges, 2m^2+4m-6 vertices.
///
/// All base coordinates are integer multiples of 1/(4m): a cell is 4 units
/// wide and tall, the zigzag amplitude is 1 unit.
fn hex_mesh(m: usize) -> Result<PolyMesh> {
    let q = 4 * (m as i64);
    // Does the vertical line between columns col-1 and col carry a cut of
    // `col` at height qy? Even columns cut at multiples of 4, odd columns at
    // 2 mod 4 (their top cut at 4m-2 is merged away).
    let is_cut = |col: i64, qy: i64| -> bool {
        if qy <= 0 || qy >= q {
            return false;
        }
        if col % 2 == 0 {
            qy % 4 == 0
        } else {
            qy % 4 == 2 && qy <= q - 6
        }
    };
    // x-offset (in quarter units) of the zigzag between columns col-1 and col
    // at height qy: bulges right where column col has a cut (a right-point of
    // column col-1 sits there), left where column col-1 has one.
    let zig_x = |col: i64, qy: i64| -> i64 {
        if qy == 0 || qy == q {
            4 * col
        } else if is_cut(col, qy) {
            4 * col + 1
        } else {
            debug_assert!(is_cut(col - 1, qy));
            4 * col - 1
        }
    };

    let mut verts: Vec<Vec2> = Vec::new();
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let scale = 1.0 / q as f64;
    let mut vid = |ix: i64, iy: i64| -> usize {
        *ids.entry((ix, iy)).or_insert_with(|| {
            verts.push(Vec2::new(ix as f64 * scale, iy as f64 * scale));
            verts.len() - 1
        })
    };

    let mi = m as i64;
    let mut cells = Vec::with_capacity(m * m);
    for c in 0..mi {
        // Vertical spans of the m cells in this column.
        let mut bounds = vec![0i64];
        for qy in 1..q {
            if is_cut(c, qy) {
                bounds.push(qy);
            }
        }
        bounds.push(q);
        debug_assert_eq!(bounds.len(), m + 1);

        for j in 0..mi {
            let lo = bounds[j as usize];
            let hi = bounds[j as usize + 1];
            let mut cell: Vec<usize> = Vec::with_capacity(8);

            // Bottom path, left to right.
            let bl = if c == 0 {
                (0, lo)
            } else if lo == 0 {
                (4 * c, 0)
            } else {
                (zig_x(c, lo), lo)
            };
            let br = if c == mi - 1 {
                (q, lo)
            } else if lo == 0 {
                (4 * (c + 1), 0)
            } else {
                (zig_x(c + 1, lo), lo)
            };
            cell.push(vid(bl.0, bl.1));
            if lo == 0 && c >= 1 && c <= mi - 2 {
                cell.push(vid(4 * c + 2, 0));
            }
            cell.push(vid(br.0, br.1));

            // Right path upward (corners excluded).
            if c == mi - 1 {
                if j >= 1 && j <= mi - 2 {
                    cell.push(vid(q, (lo + hi) / 2));
                }
            } else {
                for qy in (lo + 1..hi).filter(|qy| qy % 2 == 0) {
                    if is_cut(c + 1, qy) || is_cut(c, qy) {
                        cell.push(vid(zig_x(c + 1, qy), qy));
                    }
                }
            }

            // Top path, right to left.
            let tr = if c == mi - 1 {
                (q, hi)
            } else if hi == q {
                (4 * (c + 1), q)
            } else {
                (zig_x(c + 1, hi), hi)
            };
            let tl = if c == 0 {
                (0, hi)
            } else if hi == q {
                (4 * c, q)
            } else {
                (zig_x(c, hi), hi)
            };
            cell.push(vid(tr.0, tr.1));
            if hi == q && c >= 1 && c <= mi - 2 {
                cell.push(vid(4 * c + 2, q));
            }
            cell.push(vid(tl.0, tl.1));

            // Left path downward (corners excluded).
            if c == 0 {
                if j >= 1 && j <= mi - 2 {
                    cell.push(vid(0, (lo + hi) / 2));
                }
            } else {
                for qy in (lo + 1..hi).filter(|qy| qy % 2 == 0).rev() {
                    if is_cut(c, qy) || is_cut(c - 1, qy) {
                        cell.push(vid(zig_x(c, qy), qy));
                    }
                }
            }

            cells.push(cell);
        }
    }

    for v in &mut verts {
        *v = smooth_remap(*v);
    }
    PolyMesh::build(verts, cells)
}

/// Nonconvex octagons: each square of an n x n grid becomes an 8-gon by
/// inserting edge midpoints; a fixed pattern of midpoint displacements gives
/// every cell exactly one reflex vertex while interior midpoints shared by
/// two cells dent one and bulge the other. Cell centers are stored as kernel
/// points for the sub-triangulation.
fn octagon_mesh(n: usize) -> Result<PolyMesh> {
    let h = 1.0 / n as f64;
    let d = 0.2 * h;
    let nv = n + 1;
    let mut verts: Vec<Vec2> = Vec::with_capacity(nv * nv + 2 * n * nv);
    for j in 0..=n {
        for i in 0..=n {
            verts.push(Vec2::new(i as f64 * h, j as f64 * h));
        }
    }
    let grid = |i: usize, j: usize| j * nv + i;

    // Midpoints of vertical grid segments (i, j)-(i, j+1), displaced in x.
    let mut vmid = vec![vec![0usize; n]; nv];
    for i in 0..=n {
        for j in 0..n {
            let dx = if i == 0 || i == n {
                0.0
            } else if j == 0 {
                -d
            } else {
                d
            };
            verts.push(Vec2::new(i as f64 * h + dx, (j as f64 + 0.5) * h));
            vmid[i][j] = verts.len() - 1;
        }
    }
    // Midpoints of horizontal grid segments (i, j)-(i+1, j), displaced in y.
    let mut hmid = vec![vec![0usize; nv]; n];
    for i in 0..n {
        for j in 0..=n {
            let dy = if j == 0 || j == n {
                0.0
            } else if i == 0 {
                d
            } else if i == n - 1 && j == 1 {
                -d
            } else {
                0.0
            };
            verts.push(Vec2::new((i as f64 + 0.5) * h, j as f64 * h + dy));
            hmid[i][j] = verts.len() - 1;
        }
    }

    let mut cells = Vec::with_capacity(n * n);
    let mut kernels = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![
                grid(i, j),
                hmid[i][j],
                grid(i + 1, j),
                vmid[i + 1][j],
                grid(i + 1, j + 1),
                hmid[i][j + 1],
                grid(i, j + 1),
                vmid[i][j],
            ]);
            kernels.push(Some(Vec2::new(
                (i as f64 + 0.5) * h,
                (j as f64 + 0.5) * h,
            )));
        }
    }
    PolyMesh::build_with_kernels(verts, cells, kernels)
}
