//! Exact, quadrature-free integration of scaled monomials over a polygon via
//! the divergence theorem. Serves as the independent oracle for the
//! triangulation-based cell rules and for golden element fixtures.

use super::monomial::{multi_index_list, n_poly};
use crate::geom::Vec2;

/// Integrals of every scaled monomial ((x-c)/h)^nu with |nu| <= max_deg over
/// the polygon bounded by the counterclockwise loop `verts`, in graded-lex
/// order.
///
/// Uses div((x-c) m_nu) = (2 + |nu|) m_nu, so each cell integral reduces to
/// edge integrals of m_nu weighted by the constant (x-c).n per edge; the edge
/// integrals are expanded binomially and integrated in closed form.
pub fn polygon_monomial_integrals(verts: &[Vec2], center: Vec2, h: f64, max_deg: usize) -> Vec<f64> {
    let exps = multi_index_list(max_deg);
    let mut out = vec![0.0; n_poly(max_deg)];
    let n = verts.len();
    // Pascal's triangle up to max_deg.
    let mut binom = vec![vec![0.0f64; max_deg + 1]; max_deg + 1];
    for i in 0..=max_deg {
        binom[i][0] = 1.0;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + if j <= i - 1 { binom[i - 1][j] } else { 0.0 };
        }
    }
    for e in 0..n {
        let a = verts[e];
        let b = verts[(e + 1) % n];
        // Outward normal times edge length for a CCW loop.
        let n_len = (b - a).rot_minus_90();
        // (x(t) - c).n is constant along the edge.
        let c_n = n_len.dot(a - center);
        if c_n == 0.0 {
            continue;
        }
        let p = (a - center) / h;
        let q = (b - a) / h;
        // Coefficients of (p_x + t q_x)^j for all j, and same for y.
        // powx[j][i] = C(j,i) p_x^(j-i) q_x^i.
        let mut powx = vec![vec![0.0; max_deg + 1]; max_deg + 1];
        let mut powy = vec![vec![0.0; max_deg + 1]; max_deg + 1];
        for j in 0..=max_deg {
            for i in 0..=j {
                powx[j][i] = binom[j][i] * p.x.powi((j - i) as i32) * q.x.powi(i as i32);
                powy[j][i] = binom[j][i] * p.y.powi((j - i) as i32) * q.y.powi(i as i32);
            }
        }
        for (idx, &(nu1, nu2)) in exps.iter().enumerate() {
            // Expand m_nu(x(t)) = sum_j coeff_j t^j, integrate over [0,1].
            let mut edge_int = 0.0;
            for i in 0..=nu1 {
                for j in 0..=nu2 {
                    edge_int += powx[nu1][i] * powy[nu2][j] / (i + j + 1) as f64;
                }
            }
            out[idx] += c_n * edge_int / (2 + nu1 + nu2) as f64;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Vec<Vec2> {
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn constant_gives_area() {
        let ints = polygon_monomial_integrals(&unit_square(), Vec2::new(0.5, 0.5), 2f64.sqrt(), 0);
        assert_relative_eq!(ints[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn centered_odd_moments_vanish() {
        let ints = polygon_monomial_integrals(&unit_square(), Vec2::new(0.5, 0.5), 2f64.sqrt(), 3);
        // (1,0), (0,1), (3,0), (2,1), (1,2), (0,3) all vanish by symmetry.
        for idx in [1, 2, 6, 7, 8, 9] {
            assert_relative_eq!(ints[idx], 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn quadratic_moment_closed_form() {
        // int (x-1/2)^2 over the square = 1/12, scaled by h^2 = 2.
        let h = 2f64.sqrt();
        let ints = polygon_monomial_integrals(&unit_square(), Vec2::new(0.5, 0.5), h, 4);
        assert_relative_eq!(ints[3], (1.0 / 12.0) / (h * h), epsilon = 1e-15);
        // Separable quartic: int m_(2,0) m_(0,2) = (1/12)^2 / h^4 = 1/576.
        let i22 = crate::quadrature::MonomialBasis::index_of(2, 2);
        assert_relative_eq!(ints[i22], 1.0 / 576.0, epsilon = 1e-15);
    }

    #[test]
    fn triangle_area_and_moments() {
        let tri = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        let c = Vec2::new(1.0 / 3.0, 1.0 / 3.0);
        let ints = polygon_monomial_integrals(&tri, c, 2f64.sqrt(), 1);
        assert_relative_eq!(ints[0], 0.5, epsilon = 1e-15);
        // First moments about the centroid vanish.
        assert_relative_eq!(ints[1], 0.0, epsilon = 1e-16);
        assert_relative_eq!(ints[2], 0.0, epsilon = 1e-16);
    }
}
