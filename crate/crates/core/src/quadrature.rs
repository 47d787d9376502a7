//! Gauss–Legendre rules and an adaptive composite integrator.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`; nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
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
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<Complex64>()
            * half
    }

    /// Composite rule with `panels` equal panels.
    pub fn composite(&self, a: f64, b: f64, panels: usize, f: &impl Fn(f64) -> Complex64) -> Complex64 {
        let w = (b - a) / panels as f64;
        (0..panels)
            .map(|p| self.integrate(a + p as f64 * w, a + (p + 1) as f64 * w, f))
            .sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const MAX_DOUBLINGS: usize = 20;

/// `∫_a^b f` over the pieces between consecutive `breakpoints` (which must
/// include `a` and `b`, sorted), doubling the panel count on each piece
/// until successive values agree to `tol` relative.
pub fn integrate_adaptive(
    rule: &GaussLegendre,
    breakpoints: &[f64],
    f: impl Fn(f64) -> Complex64,
    tol: f64,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let mut panels = 1;
        let mut prev = rule.composite(a, b, panels, &f);
        let mut done = false;
        for _ in 0..MAX_DOUBLINGS {
            panels *= 2;
            let next = rule.composite(a, b, panels, &f);
            let change = (next - prev).norm();
            prev = next;
            if change <= tol * next.norm() || change == 0.0 {
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                iterations: MAX_DOUBLINGS,
                last_change: (prev.norm()).max(0.0),
            });
        }
        total += prev;
    }
    Ok(total)
}
