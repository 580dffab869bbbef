//! Scaled monomial basis m_nu(x) = ((x - x_P)/h_P)^nu of the local polynomial
//! space, with closed-form derivative actions expressed in the same basis.

use crate::geom::Vec2;

/// Dimension of the polynomial space of total degree <= k in two variables.
pub fn n_poly(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Multi-indices (nu1, nu2) for all |nu| <= k in graded lexicographic order:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
pub fn multi_index_list(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_poly(k));
    for d in 0..=k {
        for nu2 in 0..=d {
            out.push((d - nu2, nu2));
        }
    }
    out
}

/// Basis of P_k on a cell with centroid `center` and diameter `h`.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub k: usize,
    pub center: Vec2,
    pub h: f64,
    pub exps: Vec<(usize, usize)>,
}

impl MonomialBasis {
    pub fn new(k: usize, center: Vec2, h: f64) -> Self {
        Self {
            k,
            center,
            h,
            exps: multi_index_list(k),
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Position of the multi-index (nu1, nu2) in graded-lex order.
    pub fn index_of(nu1: usize, nu2: usize) -> usize {
        let d = nu1 + nu2;
        d * (d + 1) / 2 + nu2
    }

    fn scaled(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.center.x) / self.h, (p.y - self.center.y) / self.h)
    }

    pub fn eval(&self, which: usize, p: Vec2) -> f64 {
        let (xi, eta) = self.scaled(p);
        let (a, b) = self.exps[which];
        xi.powi(a as i32) * eta.powi(b as i32)
    }

    /// Values of every basis member at `p`, by power tables.
    pub fn eval_all(&self, p: Vec2, out: &mut [f64]) {
        let (xi, eta) = self.scaled(p);
        let mut px = vec![1.0; self.k + 1];
        let mut py = vec![1.0; self.k + 1];
        for i in 1..=self.k {
            px[i] = px[i - 1] * xi;
            py[i] = py[i - 1] * eta;
        }
        for (i, &(a, b)) in self.exps.iter().enumerate() {
            out[i] = px[a] * py[b];
        }
    }

    pub fn grad(&self, which: usize, p: Vec2) -> Vec2 {
        let (xi, eta) = self.scaled(p);
        let (a, b) = self.exps[which];
        let gx = if a == 0 {
            0.0
        } else {
            a as f64 * xi.powi(a as i32 - 1) * eta.powi(b as i32) / self.h
        };
        let gy = if b == 0 {
            0.0
        } else {
            b as f64 * xi.powi(a as i32) * eta.powi(b as i32 - 1) / self.h
        };
        Vec2::new(gx, gy)
    }

    pub fn grad_all(&self, p: Vec2, out: &mut [Vec2]) {
        let (xi, eta) = self.scaled(p);
        let mut px = vec![1.0; self.k + 1];
        let mut py = vec![1.0; self.k + 1];
        for i in 1..=self.k {
            px[i] = px[i - 1] * xi;
            py[i] = py[i - 1] * eta;
        }
        for (i, &(a, b)) in self.exps.iter().enumerate() {
            let gx = if a == 0 {
                0.0
            } else {
                a as f64 * px[a - 1] * py[b] / self.h
            };
            let gy = if b == 0 {
                0.0
            } else {
                b as f64 * px[a] * py[b - 1] / self.h
            };
            out[i] = Vec2::new(gx, gy);
        }
    }

    pub fn laplacian(&self, which: usize, p: Vec2) -> f64 {
        let (a, b) = self.exps[which];
        let mut acc = 0.0;
        if a >= 2 {
            acc += (a * (a - 1)) as f64 * self.eval(Self::index_of(a - 2, b), p);
        }
        if b >= 2 {
            acc += (b * (b - 1)) as f64 * self.eval(Self::index_of(a, b - 2), p);
        }
        acc / (self.h * self.h)
    }

    pub fn laplacian_all(&self, p: Vec2, out: &mut [f64]) {
        let mut vals = vec![0.0; self.len()];
        self.eval_all(p, &mut vals);
        for (i, &(a, b)) in self.exps.iter().enumerate() {
            let mut acc = 0.0;
            if a >= 2 {
                acc += (a * (a - 1)) as f64 * vals[Self::index_of(a - 2, b)];
            }
            if b >= 2 {
                acc += (b * (b - 1)) as f64 * vals[Self::index_of(a, b - 2)];
            }
            out[i] = acc / (self.h * self.h);
        }
    }

    pub fn bilaplacian(&self, which: usize, p: Vec2) -> f64 {
        let c = self.laplacian_coeffs_of(which);
        let lc = self.laplacian_apply(&c);
        let mut vals = vec![0.0; self.len()];
        self.eval_all(p, &mut vals);
        lc.iter().zip(&vals).map(|(ci, vi)| ci * vi).sum()
    }

    /// Coefficients (in this basis) of the Laplacian of basis member `which`.
    pub fn laplacian_coeffs_of(&self, which: usize) -> Vec<f64> {
        let mut unit = vec![0.0; self.len()];
        unit[which] = 1.0;
        self.laplacian_apply(&unit)
    }

    /// Coefficient-space action of the Laplacian: given the coefficients of a
    /// polynomial p, returns the coefficients of lap(p).
    pub fn laplacian_apply(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let h2 = self.h * self.h;
        for (i, &(a, b)) in self.exps.iter().enumerate() {
            let c = coeffs[i];
            if c == 0.0 {
                continue;
            }
            if a >= 2 {
                out[Self::index_of(a - 2, b)] += c * (a * (a - 1)) as f64 / h2;
            }
            if b >= 2 {
                out[Self::index_of(a, b - 2)] += c * (b * (b - 1)) as f64 / h2;
            }
        }
        out
    }

    /// Evaluate a polynomial given by coefficients in this basis.
    pub fn eval_coeffs(&self, coeffs: &[f64], p: Vec2) -> f64 {
        let mut vals = vec![0.0; self.len()];
        self.eval_all(p, &mut vals);
        coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }

    /// Gradient of a polynomial given by coefficients in this basis.
    pub fn eval_coeffs_grad(&self, coeffs: &[f64], p: Vec2) -> Vec2 {
        let mut grads = vec![Vec2::default(); self.len()];
        self.grad_all(p, &mut grads);
        let mut g = Vec2::default();
        for (c, gi) in coeffs.iter().zip(&grads) {
            g += *gi * *c;
        }
        g
    }
}
