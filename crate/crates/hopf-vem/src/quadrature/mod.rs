//! Scaled monomial bases and numerical integration on edges and polygonal
//! cells, exact to a requested polynomial degree.

mod green;
mod monomial;
mod rules;

pub use green::polygon_monomial_integrals;
pub use monomial::{multi_index_list, n_poly, MonomialBasis};
pub use rules::gauss_legendre_01;

use crate::geom::Vec2;
use crate::mesh::PolyMesh;
use crate::Result;

/// Nodes and weights integrating polynomials up to `degree` exactly over a
/// cell (weights carry area) or an edge (weights carry length).
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn integrate(&self, mut f: impl FnMut(Vec2) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Gauss-Legendre rule mapped onto the segment from `a` to `b`; weights sum
/// to the edge length.
pub fn edge_rule(a: Vec2, b: Vec2, degree: usize) -> QuadratureRule {
    let n = degree / 2 + 1;
    let (t, w) = gauss_legendre_01(n);
    let h = a.dist(b);
    let nodes = t.iter().map(|&ti| a + (b - a) * ti).collect();
    let weights = w.iter().map(|&wi| wi * h).collect();
    QuadratureRule {
        nodes,
        weights,
        degree,
    }
}

/// Per-triangle collapsed tensor Gauss rules over the sub-triangulation of a
/// cell, concatenated; exact for polynomials of the requested degree.
pub fn cell_rule(mesh: &PolyMesh, cell: usize, degree: usize) -> Result<QuadratureRule> {
    let tris = mesh.subtriangulate(cell)?;
    Ok(cell_rule_from_triangles(&tris, degree))
}

/// Quadrature over a union of positively oriented triangles.
pub fn cell_rule_from_triangles(tris: &[[Vec2; 3]], degree: usize) -> QuadratureRule {
    // Duffy collapse (r, s) = (u(1-v), uv) has Jacobian u, so a degree-d
    // integrand is degree d+1 in u and degree d in v.
    let nu = (degree + 1) / 2 + 1;
    let nv = degree / 2 + 1;
    let (tu, wu) = gauss_legendre_01(nu);
    let (tv, wv) = gauss_legendre_01(nv);
    let mut nodes = Vec::with_capacity(tris.len() * nu * nv);
    let mut weights = Vec::with_capacity(tris.len() * nu * nv);
    for tri in tris {
        let [p0, p1, p2] = *tri;
        let e1 = p1 - p0;
        let e2 = p2 - p0;
        let area2 = e1.cross(e2); // twice the triangle area
        for (iu, &u) in tu.iter().enumerate() {
            for (iv, &v) in tv.iter().enumerate() {
                let r = u * (1.0 - v);
                let s = u * v;
                nodes.push(p0 + e1 * r + e2 * s);
                weights.push(wu[iu] * wv[iv] * u * area2);
            }
        }
    }
    QuadratureRule {
        nodes,
        weights,
        degree,
    }
}
