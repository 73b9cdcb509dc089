//! Gauss-Hermite quadrature via Golub-Welsch.
//!
//! Nodes are the eigenvalues of the Jacobi matrix of the (physicists')
//! Hermite recurrence, weights come from the first eigenvector components.
//! The eigenproblem is solved with QL iteration with implicit shifts, which
//! is plenty for the few hundred nodes used here.

use alloc::vec;
use alloc::vec::Vec;

/// Rule for integrals against exp(-x^2): sum_i w_i f(x_i).
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const SQRT_PI: f64 = 1.772_453_850_905_516;

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut d = vec![0.0; n]; // Jacobi diagonal is zero for Hermite
        let mut e = vec![0.0; n]; // e[i] couples i and i+1
        for (i, ei) in e.iter_mut().enumerate().take(n - 1) {
            *ei = libm::sqrt((i + 1) as f64 / 2.0);
        }
        let mut z = vec![0.0; n]; // first row of the eigenvector matrix
        z[0] = 1.0;
        tql_first_row(&mut d, &mut e, &mut z);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let mut nodes: Vec<f64> = order.iter().map(|&i| d[i]).collect();
        let mut weights: Vec<f64> = order.iter().map(|&i| SQRT_PI * z[i] * z[i]).collect();

        // The rule is symmetric; average the two halves so it is exactly so.
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = (nodes[j] - nodes[i]) / 2.0;
            nodes[i] = -x;
            nodes[j] = x;
            let w = (weights[i] + weights[j]) / 2.0;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussHermite { nodes, weights }
    }

    /// Same rule recast for expectations over Z ~ N(0,1):
    /// E[g(Z)] = sum_i pw_i g(pz_i). Returns (points, probability weights).
    pub fn normal_rule(&self) -> (Vec<f64>, Vec<f64>) {
        let pts = self.nodes.iter().map(|&x| core::f64::consts::SQRT_2 * x).collect();
        let wts = self.weights.iter().map(|&w| w / SQRT_PI).collect();
        (pts, wts)
    }

    /// E[g(Z)] for Z ~ N(0,1).
    pub fn expect_normal(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(core::f64::consts::SQRT_2 * x);
        }
        acc / SQRT_PI
    }
}

/// QL iteration with implicit shifts on a symmetric tridiagonal matrix,
/// rotating a single row vector `z` along with the eigenvectors. On return
/// `d` holds eigenvalues and `z[i]` the first component of eigenvector i.
fn tql_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible off-diagonal element.
            let mut m = l;
            while m + 1 < n {
                let dd = libm::fabs(d[m]) + libm::fabs(d[m + 1]);
                if libm::fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
