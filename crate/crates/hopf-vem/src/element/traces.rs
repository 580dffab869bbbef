//! Reconstruction of edge traces from local degrees of freedom.
//!
//! On every edge, parameterized by t in [0, 1] along the global orientation,
//! the trace of a virtual element function is the unique polynomial of degree
//! r0(k) matching the endpoint values, endpoint tangential derivatives, and
//! the k-3 stored trace moments; its normal derivative (w.r.t. the global
//! edge normal) is the unique polynomial of degree r1(k) matching the
//! endpoint normal gradient components and the k-2 stored normal-derivative
//! moments. Both interpolation systems are universal in the t-parameter, so
//! their inverses are assembled once per order k.

use super::DofLayout;
use crate::mesh::PolyMesh;
use nalgebra::DMatrix;

/// Degree of the edge trace polynomial.
pub fn trace_degree(k: usize) -> usize {
    k.max(3)
}

/// Degree of the edge normal-derivative polynomial.
pub fn normal_degree(k: usize) -> usize {
    k - 1
}

/// int_0^1 (t - 1/2)^m dt.
fn centered_moment(m: usize) -> f64 {
    if m % 2 == 0 {
        (0.5f64).powi(m as i32) / (m as f64 + 1.0)
    } else {
        0.0
    }
}

/// Inverses of the two universal Hermite systems for order k.
#[derive(Clone, Debug)]
pub struct TraceBases {
    pub k: usize,
    /// Maps [p(0), p(1), p'(0), p'(1), moments 0..k-4] to the coefficients of
    /// p in the basis (t-1/2)^i.
    pub trace_inv: DMatrix<f64>,
    /// Maps [q(0), q(1), moments 0..k-3] to the coefficients of q.
    pub normal_inv: DMatrix<f64>,
}

impl TraceBases {
    pub fn new(k: usize) -> Self {
        assert!(k >= 2);
        let r0 = trace_degree(k);
        let n0 = r0 + 1;
        let mut m0 = DMatrix::zeros(n0, n0);
        for i in 0..n0 {
            m0[(0, i)] = (-0.5f64).powi(i as i32);
            m0[(1, i)] = (0.5f64).powi(i as i32);
            m0[(2, i)] = if i == 0 {
                0.0
            } else {
                i as f64 * (-0.5f64).powi(i as i32 - 1)
            };
            m0[(3, i)] = if i == 0 {
                0.0
            } else {
                i as f64 * (0.5f64).powi(i as i32 - 1)
            };
            for j in 0..k.saturating_sub(3) {
                m0[(4 + j, i)] = centered_moment(i + j);
            }
        }
        let r1 = normal_degree(k);
        let n1 = r1 + 1;
        let mut m1 = DMatrix::zeros(n1, n1);
        for i in 0..n1 {
            m1[(0, i)] = (-0.5f64).powi(i as i32);
            m1[(1, i)] = (0.5f64).powi(i as i32);
            for j in 0..k.saturating_sub(2) {
                m1[(2 + j, i)] = centered_moment(i + j);
            }
        }
        let trace_inv = m0
            .try_inverse()
            .expect("edge trace Hermite system is nonsingular for every k >= 2");
        let normal_inv = m1
            .try_inverse()
            .expect("edge normal Hermite system is nonsingular for every k >= 2");
        Self {
            k,
            trace_inv,
            normal_inv,
        }
    }

    /// Matrices mapping the local dof vector of `cell` to the coefficient
    /// vectors (in (t-1/2)^i) of the trace and of the normal derivative taken
    /// along the global edge normal, for the edge on side `side`.
    pub fn edge_matrices(
        &self,
        mesh: &PolyMesh,
        cell: usize,
        side: usize,
        layout: &DofLayout,
    ) -> (DMatrix<f64>, DMatrix<f64>) {
        let k = self.k;
        let loop_verts = mesh.cell_vertices(cell);
        let n_sides = loop_verts.len();
        let (edge, _) = mesh.cell_edges(cell)[side];
        let [ga, gb] = mesh.edge(edge);
        let eg = mesh.edge_geometry(edge);
        // Local vertex positions of the global endpoints a and b.
        let la = loop_verts.iter().position(|&v| v == ga).unwrap();
        let lb = loop_verts.iter().position(|&v| v == gb).unwrap();
        debug_assert!((la + 1) % n_sides == lb || (lb + 1) % n_sides == la);
        let ha = mesh.h_vertex(ga);
        let hb = mesh.h_vertex(gb);

        let n0 = trace_degree(k) + 1;
        let mut e0 = DMatrix::zeros(n0, layout.n_dofs);
        e0[(0, layout.vertex_value(la))] = 1.0;
        e0[(1, layout.vertex_value(lb))] = 1.0;
        // p'(t) = h_E * grad v . t_E, with gradient dofs stored as h_V-scaled.
        e0[(2, layout.vertex_grad_x(la))] = eg.length / ha * eg.tangent.x;
        e0[(2, layout.vertex_grad_y(la))] = eg.length / ha * eg.tangent.y;
        e0[(3, layout.vertex_grad_x(lb))] = eg.length / hb * eg.tangent.x;
        e0[(3, layout.vertex_grad_y(lb))] = eg.length / hb * eg.tangent.y;
        for j in 0..layout.d2_per_edge {
            e0[(4 + j, layout.d2(side, j))] = 1.0;
        }

        let n1 = normal_degree(k) + 1;
        let mut e1 = DMatrix::zeros(n1, layout.n_dofs);
        e1[(0, layout.vertex_grad_x(la))] = eg.normal.x / ha;
        e1[(0, layout.vertex_grad_y(la))] = eg.normal.y / ha;
        e1[(1, layout.vertex_grad_x(lb))] = eg.normal.x / hb;
        e1[(1, layout.vertex_grad_y(lb))] = eg.normal.y / hb;
        // Stored moments carry the ds = h_E dt factor and are taken along the
        // cell-outward normal; flip them back to the global normal here.
        let sign = mesh.outward_sign(cell, side);
        for j in 0..layout.d3_per_edge {
            e1[(2 + j, layout.d3(side, j))] = sign / eg.length;
        }

        (&self.trace_inv * e0, &self.normal_inv * e1)
    }
}

/// Evaluate a polynomial with coefficients in the (t-1/2)^i basis.
pub fn eval_centered(coeffs: &[f64], t: f64) -> f64 {
    let s = t - 0.5;
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * s + c;
    }
    acc
}
