//! Legendre polynomials.

use crate::error::{domain, Result};
use crate::specfun::binomial::generalized_binomial_value;

/// Monomial coefficients of P_0, …, P_N from the closed form
/// P_n(t) = 2ⁿ Σ_k binom(n,k)·binom((n+k−1)/2, n)·tᵏ.
///
/// The table is exact enough for moderate degrees and serves as an
/// independent check on the recurrence in [`legendre_eval`].
#[derive(Debug, Clone)]
pub struct LegendreBasis {
    max_degree: usize,
    coefficients: Vec<Vec<f64>>,
}

impl LegendreBasis {
    pub fn new(max_degree: usize) -> Self {
        let coefficients = (0..=max_degree)
            .map(|n| {
                let scale = 2f64.powi(n as i32);
                (0..=n)
                    .map(|k| {
                        let a = generalized_binomial_value(n as f64, k).unwrap_or(0.0);
                        let b = generalized_binomial_value((n + k) as f64 / 2.0 - 0.5, n)
                            .unwrap_or(0.0);
                        scale * a * b
                    })
                    .collect()
            })
            .collect();
        Self {
            max_degree,
            coefficients,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Coefficients of P_n in increasing powers of t.
    pub fn coefficients(&self, n: usize) -> Option<&[f64]> {
        self.coefficients.get(n).map(Vec::as_slice)
    }

    /// P_n(t) from the monomial table, by Horner's rule.
    pub fn eval_explicit(&self, n: usize, t: f64) -> Option<f64> {
        let c = self.coefficients(n)?;
        Some(c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck))
    }
}

/// P_n(t) for |t| ≤ 1 by the three-term recurrence.
pub fn legendre_eval(n: usize, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return domain(format!("Legendre argument must lie in [-1, 1], got {t}"));
    }
    Ok(legendre_unchecked(n, t))
}

pub(crate) fn legendre_unchecked(n: usize, t: f64) -> f64 {
    legendre_with_derivative(n, t).0
}

/// (P_n(t), P_n′(t)); the derivative is only used away from t = ±1.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = t;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    let n = n as f64;
    let deriv = if t.abs() < 1.0 {
        n * (prev - t * cur) / (1.0 - t * t)
    } else {
        0.5 * n * (n + 1.0) * t.powi(n as i32 + 1)
    };
    (cur, deriv)
}

/// Gauss–Legendre nodes and weights on [−1, 1] with `n` points; exact for
/// polynomials of degree ≤ 2n − 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
