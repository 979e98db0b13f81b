//! One-dimensional quadrature rules.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Composite Simpson; the node count is rounded up to an odd number.
    Simpson,
    /// Equally weighted nodes over one period; spectrally accurate for
    /// smooth periodic integrands.
    Trapezoid,
}

/// Composite Simpson rule on `[a, b]` with `2·⌈n/2⌉` subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let m = n.max(2).div_ceil(2) * 2;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Mean of a `period`-periodic function over one period with `n` nodes.
pub fn periodic_mean<F: Fn(f64) -> f64>(rule: Rule, f: F, period: f64, n: usize) -> f64 {
    match rule {
        Rule::Simpson => simpson(f, 0.0, period, n) / period,
        Rule::Trapezoid => {
            let n = n.max(1);
            let h = period / n as f64;
            (0..n).map(|i| f(h * i as f64)).sum::<f64>() / n as f64
        }
    }
}
