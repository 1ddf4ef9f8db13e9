//! Quadrature building blocks for the integral model.
//!
//! The frequency integrals use Gauss–Legendre panels, optionally graded
//! geometrically toward the phase-matching ridge. The longitudinal integral
//! over one span uses a product rule: the smooth ISRS envelope is
//! interpolated by piecewise quadratics on a uniform grid while the damped
//! oscillatory factor `exp((-α + jψ)ζ)` is integrated exactly against each
//! interpolant, so accuracy does not degrade with the phase rate `ψ`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = nf * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Appends the rule mapped onto `[a, b]` to `out`.
    pub fn push_mapped(&self, a: f64, b: f64, out: &mut Rule) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.nodes.push(mid + half * x);
            out.weights.push(half * w);
        }
    }
}

/// A one-dimensional quadrature rule (nodes with weights).
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn clear(&mut self) {
        self.nodes.clear();
        self.weights.clear();
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// `panels` equal Gauss–Legendre panels covering `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize, gl: &GaussLegendre) -> Self {
        let mut r = Rule::default();
        r.push_uniform(a, b, panels, gl);
        r
    }

    pub fn push_uniform(&mut self, a: f64, b: f64, panels: usize, gl: &GaussLegendre) {
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            gl.push_mapped(a + p as f64 * h, a + (p + 1) as f64 * h, self);
        }
    }

    /// Gauss–Legendre panels on `[lo, hi]` shrinking geometrically (by
    /// `ratio` per panel) toward `center`, until the innermost panel is no
    /// wider than `min_width`.
    pub fn push_graded(
        &mut self,
        lo: f64,
        hi: f64,
        center: f64,
        min_width: f64,
        ratio: f64,
        gl: &GaussLegendre,
    ) {
        debug_assert!(lo <= center && center <= hi);
        debug_assert!(ratio > 0.0 && ratio < 1.0);
        for (sign, extent) in [(-1.0, center - lo), (1.0, hi - center)] {
            if extent <= 0.0 {
                continue;
            }
            let levels = graded_levels(extent, min_width, ratio);
            let mut outer = extent;
            for _ in 0..levels {
                let inner = outer * ratio;
                push_oriented(gl, center + sign * inner, center + sign * outer, self);
                outer = inner;
            }
            push_oriented(gl, center, center + sign * outer, self);
        }
    }
}

fn push_oriented(gl: &GaussLegendre, a: f64, b: f64, out: &mut Rule) {
    gl.push_mapped(a.min(b), a.max(b), out);
}

fn graded_levels(extent: f64, min_width: f64, ratio: f64) -> usize {
    if !(min_width > 0.0) {
        return 60;
    }
    if min_width >= extent {
        return 0;
    }
    ((extent / min_width).ln() / (1.0 / ratio).ln())
        .ceil()
        .clamp(0.0, 60.0) as usize
}

/// Moments `∫_0^2 τ^k e^{στ} dτ` for `k = 0, 1, 2`.
fn exp_moments(sigma: Complex64) -> [Complex64; 3] {
    if sigma.norm() <= 0.5 {
        let mut m = [Complex64::new(0.0, 0.0); 3];
        // σ^n 2^n / n!, then times 2^{k+1}/(n+k+1)
        let mut term = Complex64::new(1.0, 0.0);
        for n in 0..40 {
            for (k, mk) in m.iter_mut().enumerate() {
                let scale = 2f64.powi(k as i32 + 1) / (n + k + 1) as f64;
                *mk += term * scale;
            }
            term = term * sigma * 2.0 / (n + 1) as f64;
            if term.norm() < 1e-18 {
                break;
            }
        }
        m
    } else {
        let e2 = (sigma * 2.0).exp();
        let m0 = (e2 - 1.0) / sigma;
        let m1 = (e2 * 2.0 - m0) / sigma;
        let m2 = (e2 * 4.0 - m1 * 2.0) / sigma;
        [m0, m1, m2]
    }
}

/// Weights of the quadratic exponential-fitted rule on a double interval
/// `[0, 2h]` with samples at `0, h, 2h`.
pub fn filon_weights(s: Complex64, h: f64) -> [Complex64; 3] {
    let [m0, m1, m2] = exp_moments(s * h);
    [
        (m2 - m1 * 3.0 + m0 * 2.0) * (0.5 * h),
        (m1 * 2.0 - m2) * h,
        (m2 - m1) * (0.5 * h),
    ]
}

/// `∫_0^L e^{sζ} g(ζ) dζ` for samples `g_j = g(j·L/N)`, `j = 0..=N`, `N` even.
pub fn filon_integrate(s: Complex64, length: f64, samples: &[f64]) -> Complex64 {
    let intervals = samples.len() - 1;
    debug_assert!(intervals >= 2 && intervals.is_multiple_of(2));
    let h = length / intervals as f64;
    let [w0, w1, w2] = filon_weights(s, h);
    let step = (s * (2.0 * h)).exp();
    let mut phase = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for pair in samples[..intervals + 1].windows(3).step_by(2) {
        acc += phase * (w0 * pair[0] + w1 * pair[1] + w2 * pair[2]);
        phase *= step;
    }
    acc
}

/// `exp(-y)` with a short Taylor series for tiny arguments, which dominate the
/// inner loops of the integral model.
#[inline]
pub(crate) fn exp_neg(y: f64) -> f64 {
    if y.abs() < 1e-2 {
        let y2 = y * y;
        // degree 7, truncation below 3e-19
        1.0 - y
            + y2 * (0.5 - y / 6.0 + y2 * (1.0 / 24.0 - y / 120.0 + y2 * (1.0 / 720.0 - y / 5040.0)))
    } else {
        (-y).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1, 2, 5, 8, 16, 33] {
            let gl = GaussLegendre::new(n);
            let w: f64 = gl.weights.iter().sum();
            assert!((w - 2.0).abs() < 1e-14);
            for k in 0..(2 * n) {
                let q: f64 = gl
                    .nodes
                    .iter()
                    .zip(&gl.weights)
                    .map(|(x, w)| w * x.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    2.0 / (k + 1) as f64
                };
                assert!((q - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn graded_rule_resolves_narrow_lorentzian() {
        let gl = GaussLegendre::new(8);
        for eps in [1e-1, 1e-3, 1e-6] {
            let mut r = Rule::default();
            r.push_graded(-1.0, 2.0, 0.0, 0.5 * eps, 0.3, &gl);
            let q = r.integrate(|x| eps / (eps * eps + x * x));
            let exact = (1.0 / eps).atan() + (2.0 / eps).atan();
            assert!(
                ((q - exact) / exact).abs() < 1e-8,
                "eps={eps}: {q} vs {exact}"
            );
        }
    }

    #[test]
    fn graded_rule_handles_empty_sides() {
        let gl = GaussLegendre::new(4);
        let mut r = Rule::default();
        r.push_graded(0.0, 1.0, 0.0, 1e-3, 0.3, &gl);
        assert!((r.integrate(|x| x * x) - 1.0 / 3.0).abs() < 1e-14);
        assert!(r.nodes.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn filon_moments_continuous_across_branch() {
        // high-precision moments at σ = 0.3 + 0.4j, on the branch boundary
        let exact = [
            Complex64::new(2.414_751_703_835_872_5, 1.137_357_794_227_714_3),
            Complex64::new(2.512_028_892_304_355, 1.573_488_961_519_567_6),
            Complex64::new(3.394_972_796_950_421_5, 2.411_550_124_637_831_7),
        ];
        for scale in [1.0 - 1e-15, 1.0 + 1e-15] {
            let m = exp_moments(Complex64::new(0.3, 0.4) * scale);
            for k in 0..3 {
                assert!((m[k] - exact[k]).norm() < 1e-13 * exact[k].norm());
            }
        }
    }

    #[test]
    fn filon_is_exact_for_constant_envelope() {
        let alpha = 4.6e-5;
        let length = 1e5;
        for psi in [0.0, 1e-6, 1e-4, 3e-2, 0.5] {
            let s = Complex64::new(-alpha, psi);
            let q = filon_integrate(s, length, &vec![1.0; 129]);
            let exact = ((s * length).exp() - 1.0) / s;
            assert!((q - exact).norm() < 1e-11 * exact.norm(), "psi={psi}");
        }
    }

    #[test]
    fn filon_converges_for_smooth_envelope() {
        // g(ζ) = exp(-cζ) gives an exact answer with s - c
        let alpha = 4.6e-5;
        let c = 2e-5;
        let length = 1e5;
        let s = Complex64::new(-alpha, 1e-4);
        let exact = (((s - c) * length).exp() - 1.0) / (s - c);
        let mut prev_err = f64::INFINITY;
        for n in [32, 64, 128, 256] {
            let samples: Vec<f64> = (0..=n)
                .map(|j| (-c * j as f64 * length / n as f64).exp())
                .collect();
            let err = (filon_integrate(s, length, &samples) - exact).norm() / exact.norm();
            assert!(err < prev_err / 8.0 || err < 1e-13);
            prev_err = err;
        }
        assert!(prev_err < 1e-8);
    }

    #[test]
    fn small_argument_exponential() {
        for y in [-9e-3, -1e-5, 0.0, 3e-4, 9.9e-3, 0.02, 1.5] {
            assert!((exp_neg(y) - (-y).exp()).abs() < 4.5e-16 * (-y).exp().max(1.0));
        }
    }
}
