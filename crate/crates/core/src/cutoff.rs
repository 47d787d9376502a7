//! The standard smooth cutoff used for every spatial and frequency
//! localisation in the crate.
//!
//! `χ(s) = φ(2−|s|) / (φ(2−|s|) + φ(|s|−1))` with `φ(t) = exp(−1/t)` for
//! `t > 0` and `φ(t) = 0` otherwise. It is 1 on `[-1, 1]` and vanishes
//! outside `(-2, 2)`.

/// Below this argument `exp(-1/t)` and all its derivatives are zero in f64.
const PHI_FLOOR: f64 = 1.0 / 700.0;

fn phi(t: f64) -> [f64; 3] {
    if t <= PHI_FLOOR {
        return [0.0; 3];
    }
    let v = (-1.0 / t).exp();
    let t2 = t * t;
    let d1 = v / t2;
    let d2 = v * (1.0 / (t2 * t2) - 2.0 / (t2 * t));
    [v, d1, d2]
}

/// `(χ, χ', χ'')` at `s`.
pub fn bump_with_derivatives(s: f64) -> [f64; 3] {
    let a = s.abs();
    if a <= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    if a >= 2.0 {
        return [0.0; 3];
    }
    let [g, g1, g2] = {
        let [v, d1, d2] = phi(2.0 - a);
        [v, -d1, d2]
    };
    let [k, k1, k2] = phi(a - 1.0);
    let sum = g + k;
    let ds = g1 + k1;
    let value = g / sum;
    let num = g1 * k - g * k1;
    let d1 = num / (sum * sum);
    let d2 = (g2 * k - g * k2) / (sum * sum) - 2.0 * num * ds / (sum * sum * sum);
    [value, s.signum() * d1, d2]
}

pub fn bump(s: f64) -> f64 {
    bump_with_derivatives(s)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        for i in 0..=100 {
            let s = -1.0 + 0.02 * i as f64;
            assert_eq!(bump(s), 1.0);
        }
        for &s in &[2.0, 2.5, -2.0, -3.0, 10.0] {
            assert_eq!(bump(s), 0.0);
        }
        for i in 1..100 {
            let s = 1.0 + 0.01 * i as f64;
            let v = bump(s);
            assert!(v > 0.0 && v <= 1.0);
            assert!(v >= bump(s + 0.01));
            assert_eq!(v, bump(-s));
        }
        assert!((bump(1.5) - 0.5).abs() < 1e-15);
        assert!(bump(1.1) < 1.0 && bump(1.9) > 0.0);
    }

    #[test]
    fn derivatives_match_differences() {
        let d = 1e-5;
        for i in 1..200 {
            let s = -2.1 + 4.2 * i as f64 / 200.0;
            let [_, c1, c2] = bump_with_derivatives(s);
            let fd1 = (bump(s + d) - bump(s - d)) / (2.0 * d);
            let fd2 = (bump(s + d) - 2.0 * bump(s) + bump(s - d)) / (d * d);
            assert!((c1 - fd1).abs() < 1e-7, "s={s}: {c1} vs {fd1}");
            assert!((c2 - fd2).abs() < 1e-3 * (1.0 + c2.abs()), "s={s}: {c2} vs {fd2}");
        }
    }
}
