//! Per-cell virtual element machinery: degree-of-freedom layout, the matrices
//! D, G, B, H, C, the combined elliptic projector and the L2 projector, and
//! the local stiffness/mass/load contributions.

mod traces;

pub use traces::{eval_centered, normal_degree, trace_degree, TraceBases};

use crate::geom::Vec2;
use crate::mesh::PolyMesh;
use crate::quadrature::{self, gauss_legendre_01, n_poly, MonomialBasis, QuadratureRule};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Constant coefficients of the fourth-order operator
/// a2*lap^2 - a1*lap + a0. The elliptic projector fixes only the constant
/// kernel mode, which requires a1 > 0; a2 > 0 keeps the problem fourth-order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelCoefficients {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl ModelCoefficients {
    pub fn new(alpha0: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha0.is_finite() && alpha1.is_finite() && alpha2.is_finite()) {
            return Err(Error::InvalidCoefficients(
                "coefficients must be finite".into(),
            ));
        }
        if alpha0 < 0.0 {
            return Err(Error::InvalidCoefficients(format!(
                "alpha0 = {alpha0} must be nonnegative"
            )));
        }
        if alpha1 <= 0.0 || alpha2 <= 0.0 {
            return Err(Error::InvalidCoefficients(format!(
                "alpha1 = {alpha1} and alpha2 = {alpha2} must be strictly positive"
            )));
        }
        Ok(Self {
            alpha0,
            alpha1,
            alpha2,
        })
    }

    pub fn unit() -> Self {
        Self {
            alpha0: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
        }
    }
}

/// Ordered local dof blocks of one cell: three vertex dofs (value and the
/// h_V-scaled gradient) per vertex, then k-3 trace moments per edge, then
/// k-2 normal-derivative moments per edge, then (k-1)k/2 cell moments.
#[derive(Clone, Copy, Debug)]
pub struct DofLayout {
    pub k: usize,
    pub n_cell_vertices: usize,
    pub d2_per_edge: usize,
    pub d3_per_edge: usize,
    pub n_cell_moments: usize,
    pub n_dofs: usize,
}

impl DofLayout {
    pub fn new(k: usize, n_cell_vertices: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::UnsupportedOrder {
                k,
                reason: "the C1 space needs k >= 2",
            });
        }
        let d2 = k.saturating_sub(3);
        let d3 = k - 2;
        let n_moments = n_poly(k - 2);
        Ok(Self {
            k,
            n_cell_vertices,
            d2_per_edge: d2,
            d3_per_edge: d3,
            n_cell_moments: n_moments,
            n_dofs: 3 * n_cell_vertices + (d2 + d3) * n_cell_vertices + n_moments,
        })
    }

    pub fn vertex_value(&self, i: usize) -> usize {
        3 * i
    }

    pub fn vertex_grad_x(&self, i: usize) -> usize {
        3 * i + 1
    }

    pub fn vertex_grad_y(&self, i: usize) -> usize {
        3 * i + 2
    }

    pub fn d2(&self, side: usize, j: usize) -> usize {
        3 * self.n_cell_vertices + side * self.d2_per_edge + j
    }

    pub fn d3(&self, side: usize, j: usize) -> usize {
        3 * self.n_cell_vertices
            + self.n_cell_vertices * self.d2_per_edge
            + side * self.d3_per_edge
            + j
    }

    pub fn d4(&self, moment: usize) -> usize {
        3 * self.n_cell_vertices
            + self.n_cell_vertices * (self.d2_per_edge + self.d3_per_edge)
            + moment
    }
}

/// The per-cell matrices of the discrete scheme, in the scaled monomial
/// basis (length n_k) and the local dof basis (length N_dofs).
#[derive(Clone, Debug)]
pub struct ElementOperators {
    pub layout: DofLayout,
    pub basis: MonomialBasis,
    /// dof_i(m_l), N_dofs x n_k.
    pub d: DMatrix<f64>,
    /// a2 int lap(m) lap(m)^T + a1 int grad(m).grad(m)^T.
    pub g_tilde: DMatrix<f64>,
    /// g_tilde plus the boundary-mean row that closes the constant kernel.
    pub g: DMatrix<f64>,
    /// Right-hand side of the projector system, n_k x N_dofs.
    pub b: DMatrix<f64>,
    /// Combined elliptic projector coefficients: pi_l = g^-1 b.
    pub pi_l: DMatrix<f64>,
    /// Monomial mass matrix int m m^T.
    pub h: DMatrix<f64>,
    /// Moments int m phi^T: low rows from cell-moment dofs, high rows through
    /// the elliptic projector (the enhancement property).
    pub c: DMatrix<f64>,
    /// L2 projector coefficients: pi_0 = h^-1 c.
    pub pi_0: DMatrix<f64>,
}

/// Local stiffness, mass, and load of one cell.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub load: DVector<f64>,
}

/// Builds element operators and local systems on the cells of one mesh for a
/// fixed order and coefficient set. Per-cell calls share no mutable state.
pub struct ElementBuilder<'a> {
    pub mesh: &'a PolyMesh,
    pub k: usize,
    pub coeffs: ModelCoefficients,
    traces: TraceBases,
}

impl<'a> ElementBuilder<'a> {
    pub fn new(mesh: &'a PolyMesh, k: usize, coeffs: ModelCoefficients) -> Result<Self> {
        if k < 2 {
            return Err(Error::UnsupportedOrder {
                k,
                reason: "the C1 space needs k >= 2",
            });
        }
        Ok(Self {
            mesh,
            k,
            coeffs,
            traces: TraceBases::new(k),
        })
    }

    pub fn layout(&self, cell: usize) -> DofLayout {
        DofLayout::new(self.k, self.mesh.cell_vertices(cell).len())
            .expect("order was validated at construction")
    }

    /// Trace and normal-derivative coefficient maps on one side of a cell,
    /// in the global edge parameterization; the normal map is taken along
    /// the global edge normal (multiply by the outward sign as needed).
    pub fn edge_trace_matrices(&self, cell: usize, side: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        let layout = self.layout(cell);
        self.traces.edge_matrices(self.mesh, cell, side, &layout)
    }

    /// Reconstructs the trace and global-normal derivative polynomials of a
    /// local dof vector on one side, as coefficients in (t-1/2)^i.
    pub fn edge_trace_polys(
        &self,
        cell: usize,
        side: usize,
        dofs: &DVector<f64>,
    ) -> (Vec<f64>, Vec<f64>) {
        let (t0, t1) = self.edge_trace_matrices(cell, side);
        (
            (t0 * dofs).iter().copied().collect(),
            (t1 * dofs).iter().copied().collect(),
        )
    }

    /// Builds D, both projector systems, and both projectors for one cell.
    pub fn operators(&self, cell: usize) -> Result<ElementOperators> {
        let k = self.k;
        let n_k = n_poly(k);
        let layout = self.layout(cell);
        let geom = self.mesh.cell_geometry(cell);
        let basis = MonomialBasis::new(k, geom.centroid, geom.diameter);
        let loop_verts = self.mesh.cell_vertices(cell);
        let n_sides = loop_verts.len();
        let n_dofs = layout.n_dofs;
        let a1 = self.coeffs.alpha1;
        let a2 = self.coeffs.alpha2;

        // Interior rule exact for products of two basis members.
        let rule = quadrature::cell_rule(self.mesh, cell, 2 * k)?;
        let (h, g_tilde) = self.mass_and_energy_grams(&basis, &rule);

        // Laplacian / bilaplacian coefficient tables of every basis member.
        let lap_co: Vec<Vec<f64>> = (0..n_k).map(|l| basis.laplacian_coeffs_of(l)).collect();
        let lap2_co: Vec<Vec<f64>> = lap_co.iter().map(|c| basis.laplacian_apply(c)).collect();

        let mut d = DMatrix::zeros(n_dofs, n_k);
        let mut b = DMatrix::zeros(n_k, n_dofs);
        let mut vals = vec![0.0; n_k];
        let mut grads = vec![Vec2::default(); n_k];

        // D1 rows: values and h_V-scaled gradients at the vertices.
        for (i, &v) in loop_verts.iter().enumerate() {
            let p = self.mesh.vertex(v);
            let hv = self.mesh.h_vertex(v);
            basis.eval_all(p, &mut vals);
            basis.grad_all(p, &mut grads);
            for l in 0..n_k {
                d[(layout.vertex_value(i), l)] = vals[l];
                d[(layout.vertex_grad_x(i), l)] = hv * grads[l].x;
                d[(layout.vertex_grad_y(i), l)] = hv * grads[l].y;
            }
        }

        // Volume part of B: the operator applied to a monomial has degree
        // k-2, so its moments are read off the D4 dofs.
        for l in 0..n_k {
            for mu in 0..layout.n_cell_moments {
                let w = a2 * lap2_co[l][mu] - a1 * lap_co[l][mu];
                if w != 0.0 {
                    b[(l, layout.d4(mu))] += w * geom.area;
                }
            }
        }

        let perimeter: f64 = (0..n_sides)
            .map(|s| {
                self.mesh
                    .edge_geometry(self.mesh.cell_edges(cell)[s].0)
                    .length
            })
            .sum();
        let mut g0_row = vec![0.0; n_k];
        let mut b0_row = vec![0.0; n_dofs];

        let (gt, gw) = gauss_legendre_01(k + 2);
        let mut trace_row = vec![0.0; n_dofs];
        let mut dn_row = vec![0.0; n_dofs];
        for side in 0..n_sides {
            let (edge, _) = self.mesh.cell_edges(cell)[side];
            let [ga, gb] = self.mesh.edge(edge);
            let (pa, pb) = (self.mesh.vertex(ga), self.mesh.vertex(gb));
            let eg = self.mesh.edge_geometry(edge);
            let sign = self.mesh.outward_sign(cell, side);
            let n_out = eg.normal * sign;
            let (t0, t1) = self.traces.edge_matrices(self.mesh, cell, side, &layout);
            let r0 = t0.nrows();
            let r1 = t1.nrows();

            for (&t, &w) in gt.iter().zip(&gw) {
                let x = pa + (pb - pa) * t;
                basis.eval_all(x, &mut vals);
                basis.grad_all(x, &mut grads);
                let s = t - 0.5;

                // D2/D3 rows of D.
                for j in 0..layout.d2_per_edge {
                    let q = w * s.powi(j as i32);
                    for l in 0..n_k {
                        d[(layout.d2(side, j), l)] += q * vals[l];
                    }
                }
                for j in 0..layout.d3_per_edge {
                    let q = w * eg.length * s.powi(j as i32);
                    for l in 0..n_k {
                        d[(layout.d3(side, j), l)] += q * grads[l].dot(n_out);
                    }
                }

                // Trace and outward normal-derivative values of every
                // Lagrangian basis function at this node.
                for (i, tr) in trace_row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    let mut sp = 1.0;
                    for c in 0..r0 {
                        acc += sp * t0[(c, i)];
                        sp *= s;
                    }
                    *tr = acc;
                }
                for (i, dn) in dn_row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    let mut sp = 1.0;
                    for c in 0..r1 {
                        acc += sp * t1[(c, i)];
                        sp *= s;
                    }
                    *dn = sign * acc;
                }

                let wh = w * eg.length;
                for l in 0..n_k {
                    // Value and gradient of lap(m_l) through its coefficients.
                    let co = &lap_co[l];
                    let mut lapval = 0.0;
                    let mut gl = Vec2::default();
                    for c in 0..n_k {
                        let cw = co[c];
                        if cw != 0.0 {
                            lapval += cw * vals[c];
                            gl += grads[c] * cw;
                        }
                    }
                    // grad(a1 m - a2 lap m) . n_out
                    let gval = (grads[l] * a1 - gl * a2).dot(n_out);
                    if gval != 0.0 {
                        for i in 0..n_dofs {
                            b[(l, i)] += wh * gval * trace_row[i];
                        }
                    }
                    let la = wh * a2 * lapval;
                    if la != 0.0 {
                        for i in 0..n_dofs {
                            b[(l, i)] += la * dn_row[i];
                        }
                    }
                }
                for l in 0..n_k {
                    g0_row[l] += wh * vals[l] / perimeter;
                }
                for i in 0..n_dofs {
                    b0_row[i] += wh * trace_row[i] / perimeter;
                }
            }
        }

        // D4 rows of D reuse the monomial mass matrix.
        for mu in 0..layout.n_cell_moments {
            for l in 0..n_k {
                d[(layout.d4(mu), l)] = h[(mu, l)] / geom.area;
            }
        }

        // The operator rows of G and B vanish on constants; the first row is
        // replaced by the boundary-mean condition fixing the kernel.
        let mut g = g_tilde.clone();
        for l in 0..n_k {
            g[(0, l)] += g0_row[l];
        }
        for i in 0..n_dofs {
            b[(0, i)] += b0_row[i];
        }

        let g_inv = invert_checked(&g, cell, "G")?;
        let pi_l = &g_inv * &b;

        // C: low rows straight from the D4 dofs, high rows by enhancement.
        let mut c = DMatrix::zeros(n_k, n_dofs);
        for mu in 0..layout.n_cell_moments {
            c[(mu, layout.d4(mu))] = geom.area;
        }
        for row in layout.n_cell_moments..n_k {
            let crow = h.row(row) * &pi_l;
            c.row_mut(row).copy_from(&crow);
        }
        let h_chol = h.clone().cholesky().ok_or(Error::IllConditionedCell {
            cell,
            matrix: "H",
            cond: f64::NAN,
        })?;
        let pi_0 = h_chol.solve(&c);

        Ok(ElementOperators {
            layout,
            basis,
            d,
            g_tilde,
            g,
            b,
            pi_l,
            h,
            c,
            pi_0,
        })
    }

    fn mass_and_energy_grams(
        &self,
        basis: &MonomialBasis,
        rule: &QuadratureRule,
    ) -> (DMatrix<f64>, DMatrix<f64>) {
        let n_k = basis.len();
        let mut h = DMatrix::zeros(n_k, n_k);
        let mut g_tilde = DMatrix::zeros(n_k, n_k);
        let mut vals = vec![0.0; n_k];
        let mut grads = vec![Vec2::default(); n_k];
        let mut laps = vec![0.0; n_k];
        let a1 = self.coeffs.alpha1;
        let a2 = self.coeffs.alpha2;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            basis.eval_all(x, &mut vals);
            basis.grad_all(x, &mut grads);
            basis.laplacian_all(x, &mut laps);
            for i in 0..n_k {
                for j in i..n_k {
                    h[(i, j)] += w * vals[i] * vals[j];
                    g_tilde[(i, j)] += w * (a2 * laps[i] * laps[j] + a1 * grads[i].dot(grads[j]));
                }
            }
        }
        for i in 0..n_k {
            for j in 0..i {
                h[(i, j)] = h[(j, i)];
                g_tilde[(i, j)] = g_tilde[(j, i)];
            }
        }
        (h, g_tilde)
    }

    /// K_P = pi_l^T g_tilde pi_l + tau (I - D pi_l)^T (I - D pi_l) with
    /// tau = trace of the consistency part / N_dofs.
    pub fn stiffness(&self, ops: &ElementOperators) -> DMatrix<f64> {
        let k_cons = ops.pi_l.transpose() * &ops.g_tilde * &ops.pi_l;
        let n = ops.layout.n_dofs;
        let residual = DMatrix::identity(n, n) - &ops.d * &ops.pi_l;
        let tau = k_cons.trace() / n as f64;
        &k_cons + residual.transpose() * residual * tau
    }

    /// M_P = a0 pi_0^T h pi_0; no stabilization term is needed here.
    pub fn mass(&self, ops: &ElementOperators) -> DMatrix<f64> {
        ops.pi_0.transpose() * &ops.h * &ops.pi_0 * self.coeffs.alpha0
    }

    /// F_P = (int f m^T) pi_0 with a degree 2k+3 interior rule.
    pub fn load(
        &self,
        cell: usize,
        ops: &ElementOperators,
        f: &dyn Fn(Vec2) -> f64,
    ) -> Result<DVector<f64>> {
        let rule = quadrature::cell_rule(self.mesh, cell, 2 * self.k + 3)?;
        let n_k = ops.basis.len();
        let mut r = DVector::zeros(n_k);
        let mut vals = vec![0.0; n_k];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            ops.basis.eval_all(x, &mut vals);
            let fw = w * f(x);
            for l in 0..n_k {
                r[l] += fw * vals[l];
            }
        }
        Ok(ops.pi_0.transpose() * r)
    }

    /// Operators plus the local stiffness/mass/load of one cell.
    pub fn local_system(
        &self,
        cell: usize,
        f: &dyn Fn(Vec2) -> f64,
    ) -> Result<(ElementOperators, LocalSystem)> {
        let ops = self.operators(cell)?;
        let stiffness = self.stiffness(&ops);
        let mass = self.mass(&ops);
        let load = self.load(cell, &ops, f)?;
        Ok((
            ops,
            LocalSystem {
                stiffness,
                mass,
                load,
            },
        ))
    }
}

fn invert_checked(m: &DMatrix<f64>, cell: usize, name: &'static str) -> Result<DMatrix<f64>> {
    let norm = m.norm();
    let inv = m.clone().try_inverse().ok_or(Error::IllConditionedCell {
        cell,
        matrix: name,
        cond: f64::INFINITY,
    })?;
    let cond = norm * inv.norm();
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::IllConditionedCell {
            cell,
            matrix: name,
            cond,
        });
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_family, MeshFamily};
    use approx::assert_relative_eq;

    fn unit_square() -> PolyMesh {
        PolyMesh::build(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn layout_counts_on_square() {
        for (k, expect) in [(2, 13), (3, 19), (4, 30)] {
            let layout = DofLayout::new(k, 4).unwrap();
            assert_eq!(layout.n_dofs, expect, "k = {k}");
        }
        assert!(matches!(
            DofLayout::new(1, 4),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    /// Local dofs of a polynomial with the given value/gradient/edge data.
    fn interpolate_poly(
        mesh: &PolyMesh,
        cell: usize,
        layout: &DofLayout,
        u: impl Fn(Vec2) -> f64,
        grad: impl Fn(Vec2) -> Vec2,
    ) -> DVector<f64> {
        let mut dofs = DVector::zeros(layout.n_dofs);
        let loop_verts = mesh.cell_vertices(cell);
        for (i, &v) in loop_verts.iter().enumerate() {
            let p = mesh.vertex(v);
            let hv = mesh.h_vertex(v);
            dofs[layout.vertex_value(i)] = u(p);
            dofs[layout.vertex_grad_x(i)] = hv * grad(p).x;
            dofs[layout.vertex_grad_y(i)] = hv * grad(p).y;
        }
        let (gt, gw) = gauss_legendre_01(layout.k + 3);
        for side in 0..loop_verts.len() {
            let (edge, _) = mesh.cell_edges(cell)[side];
            let [ga, gb] = mesh.edge(edge);
            let (pa, pb) = (mesh.vertex(ga), mesh.vertex(gb));
            let eg = mesh.edge_geometry(edge);
            for (&t, &w) in gt.iter().zip(&gw) {
                let x = pa + (pb - pa) * t;
                let s = t - 0.5;
                for j in 0..layout.d2_per_edge {
                    dofs[layout.d2(side, j)] += w * s.powi(j as i32) * u(x);
                }
                for j in 0..layout.d3_per_edge {
                    dofs[layout.d3(side, j)] +=
                        w * eg.length * s.powi(j as i32) * grad(x).dot(eg.normal);
                }
            }
        }
        let geomc = mesh.cell_geometry(cell);
        let basis = MonomialBasis::new(layout.k, geomc.centroid, geomc.diameter);
        let rule = quadrature::cell_rule(mesh, cell, 2 * layout.k + 3).unwrap();
        for mu in 0..layout.n_cell_moments {
            let v = rule.integrate(|x| basis.eval(mu, x) * u(x));
            dofs[layout.d4(mu)] = v / geomc.area;
        }
        // Convert global-normal D3 moments to the cell-outward convention.
        for side in 0..loop_verts.len() {
            let sign = mesh.outward_sign(cell, side);
            for j in 0..layout.d3_per_edge {
                dofs[layout.d3(side, j)] *= sign;
            }
        }
        dofs
    }

    #[test]
    fn trace_reconstruction_examples() {
        let mesh = unit_square();
        for k in [2usize, 3, 4] {
            let builder = ElementBuilder::new(&mesh, k, ModelCoefficients::unit()).unwrap();
            let layout = builder.layout(0);

            // u = x: on the bottom edge (0,0)->(1,0) the trace is t and the
            // normal derivative (global normal (0,-1)) is 0.
            let dofs = interpolate_poly(&mesh, 0, &layout, |p| p.x, |_| Vec2::new(1.0, 0.0));
            let bottom = mesh.cell_edges(0)[0].0;
            assert_eq!(mesh.edge(bottom), [0, 1]);
            let (tr, nd) = builder.edge_trace_polys(0, 0, &dofs);
            for (t, expect) in [(0.0, 0.0), (0.25, 0.25), (1.0, 1.0)] {
                assert_relative_eq!(eval_centered(&tr, t), expect, epsilon = 1e-12);
            }
            for t in [0.0, 0.3, 1.0] {
                assert_relative_eq!(eval_centered(&nd, t), 0.0, epsilon = 1e-12);
            }

            // u = 1: trace 1, normal derivative 0.
            let dofs = interpolate_poly(&mesh, 0, &layout, |_| 1.0, |_| Vec2::new(0.0, 0.0));
            let (tr, nd) = builder.edge_trace_polys(0, 0, &dofs);
            for t in [0.0, 0.5, 1.0] {
                assert_relative_eq!(eval_centered(&tr, t), 1.0, epsilon = 1e-12);
                assert_relative_eq!(eval_centered(&nd, t), 0.0, epsilon = 1e-12);
            }

            // Left edge (0,0)->(0,1), global normal (1,0) pointing in +x.
            // u = x^2: trace 0, normal derivative 0. u = x*y: derivative t.
            let side_left = 3;
            let (edge, _) = mesh.cell_edges(0)[side_left];
            assert_eq!(mesh.edge(edge), [0, 3]);
            let dofs =
                interpolate_poly(&mesh, 0, &layout, |p| p.x * p.x, |p| Vec2::new(2.0 * p.x, 0.0));
            let (tr, nd) = builder.edge_trace_polys(0, side_left, &dofs);
            for t in [0.0, 0.4, 1.0] {
                assert_relative_eq!(eval_centered(&tr, t), 0.0, epsilon = 1e-12);
                assert_relative_eq!(eval_centered(&nd, t), 0.0, epsilon = 1e-12);
            }
            let dofs =
                interpolate_poly(&mesh, 0, &layout, |p| p.x * p.y, |p| Vec2::new(p.y, p.x));
            let (_, nd) = builder.edge_trace_polys(0, side_left, &dofs);
            for t in [0.0, 0.4, 1.0] {
                assert_relative_eq!(eval_centered(&nd, t), t, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn matrix_d_constant_column_and_gradient_rows() {
        let mesh = unit_square();
        let builder = ElementBuilder::new(&mesh, 2, ModelCoefficients::unit()).unwrap();
        let ops = builder.operators(0).unwrap();
        let layout = ops.layout;
        // Column of m = 1: vertex values 1, gradients 0, D4 constant moment 1.
        for i in 0..4 {
            assert_relative_eq!(ops.d[(layout.vertex_value(i), 0)], 1.0);
            assert_relative_eq!(ops.d[(layout.vertex_grad_x(i), 0)], 0.0);
            assert_relative_eq!(ops.d[(layout.vertex_grad_y(i), 0)], 0.0);
        }
        assert_relative_eq!(ops.d[(layout.d4(0), 0)], 1.0, epsilon = 1e-13);
        // Row of a vertex d/dx dof against m_(1,0) is h_V/h_P.
        let hv = mesh.h_vertex(0);
        let hp = mesh.cell_geometry(0).diameter;
        assert_relative_eq!(ops.d[(layout.vertex_grad_x(0), 1)], hv / hp, epsilon = 1e-13);
    }

    #[test]
    fn projector_identities_on_unit_square() {
        let mesh = unit_square();
        for k in [2usize, 3, 4, 5] {
            let builder = ElementBuilder::new(&mesh, k, ModelCoefficients::unit()).unwrap();
            let ops = builder.operators(0).unwrap();
            let n_k = ops.basis.len();
            let eye = DMatrix::<f64>::identity(n_k, n_k);

            let pl_d = &ops.pi_l * &ops.d;
            assert!((pl_d - &eye).norm() < 1e-11 * eye.norm() * n_k as f64, "k = {k}");

            let p0_d = &ops.pi_0 * &ops.d;
            assert!((p0_d - &eye).norm() < 1e-10, "k = {k}");

            let bd = &ops.b * &ops.d;
            assert!((&bd - &ops.g).norm() < 1e-11 * ops.g.norm(), "k = {k}");

            // First row of G: boundary means of the monomials; the constant
            // gives exactly 1.
            assert_relative_eq!(ops.g[(0, 0)], 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn enhancement_rows_match_definition() {
        let mesh = unit_square();
        let builder = ElementBuilder::new(&mesh, 2, ModelCoefficients::unit()).unwrap();
        let ops = builder.operators(0).unwrap();
        // Rows 4..6 of C are (H rows 4..6) * pi_l by the same arithmetic path.
        for row in 3..6 {
            let expect = ops.h.row(row) * &ops.pi_l;
            for i in 0..ops.layout.n_dofs {
                assert_eq!(ops.c[(row, i)], expect[i]);
            }
        }
    }

    #[test]
    fn stiffness_kernel_and_consistency() {
        let mesh = unit_square();
        for k in [2usize, 3] {
            let builder = ElementBuilder::new(&mesh, k, ModelCoefficients::unit()).unwrap();
            let ops = builder.operators(0).unwrap();
            let kp = builder.stiffness(&ops);

            // Constants lie in the kernel.
            let ones = ops.d.column(0).clone_owned();
            let kv = &kp * &ones;
            assert!(kv.norm() < 1e-11 * kp.norm(), "k = {k}");

            // D^T K D equals the polynomial energy Gram, cross-checked by an
            // independent quadrature of different degree.
            let gram = ops.d.transpose() * &kp * &ops.d;
            let tris = mesh.subtriangulate(0).unwrap();
            let rule = quadrature::cell_rule_from_triangles(&tris, 2 * k + 2);
            let n_k = ops.basis.len();
            let mut exact = DMatrix::zeros(n_k, n_k);
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                for a in 0..n_k {
                    for b in 0..n_k {
                        exact[(a, b)] += w
                            * (ops.basis.laplacian(a, x) * ops.basis.laplacian(b, x)
                                + ops.basis.grad(a, x).dot(ops.basis.grad(b, x)));
                    }
                }
            }
            assert!(
                (&gram - &exact).norm() < 1e-11 * exact.norm().max(1.0),
                "k = {k}"
            );

            // Exactly one zero eigenvalue.
            let eig = nalgebra::SymmetricEigen::new(kp.clone());
            let lam_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let zeros = eig
                .eigenvalues
                .iter()
                .filter(|&&l| l.abs() <= 1e-9 * lam_max)
                .count();
            assert_eq!(zeros, 1, "k = {k}");
        }
    }

    #[test]
    fn mass_matrix_properties() {
        let mesh = unit_square();
        let coeffs = ModelCoefficients::new(0.7, 1.0, 1.0).unwrap();
        let builder = ElementBuilder::new(&mesh, 2, coeffs).unwrap();
        let ops = builder.operators(0).unwrap();
        let mp = builder.mass(&ops);

        let ones = ops.d.column(0).clone_owned();
        let m_const = (ones.transpose() * &mp * &ones)[(0, 0)];
        assert_relative_eq!(m_const, 0.7 * 1.0, epsilon = 1e-12);

        let gram = ops.d.transpose() * &mp * &ops.d;
        assert!((&gram - &ops.h * 0.7).norm() < 1e-12 * ops.h.norm());

        let zero = ModelCoefficients::new(0.0, 1.0, 1.0).unwrap();
        let b0 = ElementBuilder::new(&mesh, 2, zero).unwrap();
        let ops0 = b0.operators(0).unwrap();
        assert_eq!(b0.mass(&ops0).norm(), 0.0);
    }

    #[test]
    fn load_vector_cases() {
        let mesh = unit_square();
        let builder = ElementBuilder::new(&mesh, 2, ModelCoefficients::unit()).unwrap();
        let ops = builder.operators(0).unwrap();

        let f0 = builder.load(0, &ops, &|_| 0.0).unwrap();
        assert_eq!(f0.norm(), 0.0);

        // f = 1 puts |P| on the constant-moment dof and nothing else.
        let f1 = builder.load(0, &ops, &|_| 1.0).unwrap();
        let area = mesh.cell_geometry(0).area;
        for i in 0..ops.layout.n_dofs {
            let expect = if i == ops.layout.d4(0) { area } else { 0.0 };
            assert_relative_eq!(f1[i], expect, epsilon = 1e-12);
        }

        // f = m_(1,0): load equals (H row of m_(1,0)) * pi_0.
        let fm = builder
            .load(0, &ops, &|p| ops.basis.eval(1, p))
            .unwrap();
        let expect = (ops.h.row(1) * &ops.pi_0).transpose();
        assert!((fm - expect).norm() < 1e-12);
    }

    #[test]
    fn identities_hold_across_families_level0() {
        for family in MeshFamily::ALL {
            let mesh = generate_family(family, 0, 42).unwrap();
            for k in [2usize, 3] {
                let builder = ElementBuilder::new(&mesh, k, ModelCoefficients::unit()).unwrap();
                for cell in 0..mesh.n_cells() {
                    let ops = builder.operators(cell).unwrap();
                    let n_k = ops.basis.len();
                    let eye = DMatrix::<f64>::identity(n_k, n_k);
                    assert!(
                        (&ops.pi_l * &ops.d - &eye).norm() < 1e-10,
                        "pi_l {family} k={k} cell={cell}"
                    );
                    assert!(
                        (&ops.pi_0 * &ops.d - &eye).norm() < 1e-10,
                        "pi_0 {family} k={k} cell={cell}"
                    );
                    assert!(
                        (&ops.b * &ops.d - &ops.g).norm() <= 1e-11 * ops.g.norm().max(1.0),
                        "G=BD {family} k={k} cell={cell}"
                    );
                }
            }
        }
    }

    #[test]
    fn unisolvency_d_has_full_column_rank() {
        for family in MeshFamily::ALL {
            let mesh = generate_family(family, 0, 42).unwrap();
            let builder = ElementBuilder::new(&mesh, 3, ModelCoefficients::unit()).unwrap();
            for cell in [0, mesh.n_cells() / 2, mesh.n_cells() - 1] {
                let ops = builder.operators(cell).unwrap();
                let svd = ops.d.clone().svd(false, false);
                let smax = svd.singular_values.max();
                let smin = svd.singular_values.min();
                assert!(smin > 1e-8 * smax, "{family} cell {cell}");
            }
        }
    }

    #[test]
    fn scaling_leaves_projectors_and_kernel_invariant() {
        for lambda in [1e-3, 1.0, 1e3] {
            let mesh = PolyMesh::build(
                vec![
                    Vec2::new(0.0, 0.0),
                    Vec2::new(lambda, 0.0),
                    Vec2::new(lambda, lambda),
                    Vec2::new(0.0, lambda),
                ],
                vec![vec![0, 1, 2, 3]],
            )
            .unwrap();
            let builder = ElementBuilder::new(&mesh, 2, ModelCoefficients::unit()).unwrap();
            let ops = builder.operators(0).unwrap();
            let n_k = ops.basis.len();
            let eye = DMatrix::<f64>::identity(n_k, n_k);
            // Conditioning of G mixes the a2/h^2 and a1 scales, so the
            // identity degrades to ~1e-9 at extreme lambda.
            assert!((&ops.pi_l * &ops.d - &eye).norm() < 1e-8, "lambda = {lambda}");
            let kp = builder.stiffness(&ops);
            let eig = nalgebra::SymmetricEigen::new(kp);
            let lam_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let zeros = eig
                .eigenvalues
                .iter()
                .filter(|&&l| l.abs() <= 1e-9 * lam_max)
                .count();
            assert_eq!(zeros, 1, "lambda = {lambda}");
        }
    }

    #[test]
    fn coefficient_validation() {
        assert!(ModelCoefficients::new(0.0, 1.0, 1.0).is_ok());
        assert!(ModelCoefficients::new(1.0, 0.0, 1.0).is_err());
        assert!(ModelCoefficients::new(1.0, 1.0, 0.0).is_err());
        assert!(ModelCoefficients::new(-1.0, 1.0, 1.0).is_err());
        assert!(ModelCoefficients::new(f64::NAN, 1.0, 1.0).is_err());
    }
}
