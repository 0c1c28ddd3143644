//! Gauss–Legendre rules on [-1, 1].

use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point rule from Newton iteration on P_n, started at the
/// Chebyshev-like guess `cos(π(i - 1/4)/(n + 1/2))`.
pub fn rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

pub fn gl16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| rule(16))
}

pub fn gl8() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| rule(8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 8, 16] {
            let r = rule(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_on_polynomials() {
        let r = gl16();
        for k in 0..32 {
            let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "x^{k}: {got} vs {want}");
        }
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        let r = gl8();
        for w in r.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..8 {
            assert!((r.nodes[i] + r.nodes[7 - i]).abs() < 1e-15);
        }
    }
}
