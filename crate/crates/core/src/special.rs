//! Special functions and quadrature rules used by the operator backends.

use std::sync::OnceLock;

pub use statrs::function::gamma::gamma;

/// Generalized binomial coefficients `C(alpha, j)` for `j = 0..=count`, by the
/// stable product recursion.
pub fn binomial_series(alpha: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count + 1);
    let mut c = 1.0;
    out.push(c);
    for j in 1..=count {
        c *= (alpha - (j as f64) + 1.0) / j as f64;
        out.push(c);
    }
    out
}

/// Grünwald–Letnikov weights `(-1)^j C(alpha, j)` for `j = 0..=count`.
pub fn grunwald_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count + 1);
    let mut w = 1.0;
    out.push(w);
    for j in 1..=count {
        w *= 1.0 - (alpha + 1.0) / j as f64;
        out.push(w);
    }
    out
}

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
];

/// Hurwitz zeta `ζ(s, a)` for real `s != 1` and `a > 0`, analytically continued
/// to `s < 1` through the Euler–Maclaurin remainder.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0 && (s - 1.0).abs() > 1e-12);
    const N: usize = 16;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + a).powf(-s);
    }
    let x = N as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2), times x^{-s-2j+1}
    let mut rising = s;
    let mut xpow = x.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += c * rising * xpow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xpow /= x * x;
    }
    sum
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=order {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = 0.5 * (1.0 - z);
            nodes[order - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[order - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    /// Shared 8-point rule.
    pub fn eight() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(8))
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let w = hi - lo;
        self.nodes.iter().zip(&self.weights).map(|(&t, &wt)| wt * f(lo + w * t)).sum::<f64>() * w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_matches_high_precision_values() {
        // reference values from a 30-digit evaluation
        let cases = [
            (0.5, 1.0, -1.460_354_508_809_586_8),
            (0.5, 0.25, 0.239_963_524_495_630_96),
            (0.3, 1.7, -1.632_408_698_658_045_9),
            (0.9, 1.01, -9.445_758_051_584_918_6),
            (0.01, 2.5, -2.006_451_505_029_634_5),
            (0.75, 1.0, -3.441_285_386_945_222_9),
        ];
        for (s, a, want) in cases {
            let got = hurwitz_zeta(s, a);
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{s} {a}: {got} vs {want}");
        }
    }

    #[test]
    fn hurwitz_at_zero_is_linear() {
        for a in [0.1, 0.5, 1.0, 1.9] {
            assert!((hurwitz_zeta(0.0, a) - (0.5 - a)).abs() < 1e-14);
        }
    }

    #[test]
    fn hurwitz_shift_recurrence() {
        for (s, a) in [(0.2, 0.3), (0.7, 1.4), (0.95, 0.05)] {
            let lhs = hurwitz_zeta(s, a);
            let rhs = a.powf(-s) + hurwitz_zeta(s, a + 1.0);
            assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        for p in 0..16 {
            let got = rule.integrate(0.0, 2.0, |x| x.powi(p));
            let want = 2f64.powi(p + 1) / (p as f64 + 1.0);
            assert!((got - want).abs() < 1e-12 * want, "degree {p}");
        }
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn binomial_and_grunwald_agree() {
        let b = binomial_series(0.5, 10);
        let w = grunwald_weights(0.5, 10);
        for j in 0..=10 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert!((sign * b[j] - w[j]).abs() < 1e-15);
        }
        // C(0.5, 2) = 0.5 * -0.5 / 2
        assert!((b[2] + 0.125).abs() < 1e-16);
        // integer order truncates
        let w1 = grunwald_weights(1.0, 5);
        assert_eq!(w1, vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
