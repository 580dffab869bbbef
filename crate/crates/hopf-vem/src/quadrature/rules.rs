//! Gauss-Legendre nodes and weights.

/// Nodes and weights on [0, 1], exact for polynomials of degree 2n-1.
/// Roots of the Legendre polynomial are found by Newton iteration from the
/// Chebyshev initial guess.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            dp = if n == 1 {
                1.0
            } else {
                n as f64 * (x * p1 - p0) / (x * x - 1.0)
            };
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    // Map from [-1, 1] to [0, 1].
    for i in 0..n {
        nodes[i] = 0.5 * (1.0 - nodes[i]);
        weights[i] *= 0.5;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=12 {
            let (_, w) = gauss_legendre_01(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn exact_for_monomials() {
        for n in 1..=10 {
            let (t, w) = gauss_legendre_01(n);
            for d in 0..=(2 * n - 1) {
                let val: f64 = t.iter().zip(&w).map(|(&ti, &wi)| wi * ti.powi(d as i32)).sum();
                assert_relative_eq!(val, 1.0 / (d as f64 + 1.0), epsilon = 1e-13);
            }
        }
    }
}
