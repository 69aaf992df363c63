//! Numerical inverse Laplace transforms of the per-mode image functions.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{FluidParams, Inversion};

/// Image function evaluable on the positive real axis and, for contour
/// methods, in the cut plane |arg q| < pi.
pub trait LaplaceImage {
    fn eval_real(&self, q: f64) -> f64;
    fn eval_complex(&self, q: Complex64) -> Complex64;
}

/// Wraps a pair of closures as an image.
pub struct FnImage<R, C> {
    pub real: R,
    pub complex: C,
}

impl<R, C> LaplaceImage for FnImage<R, C>
where
    R: Fn(f64) -> f64,
    C: Fn(Complex64) -> Complex64,
{
    fn eval_real(&self, q: f64) -> f64 {
        (self.real)(q)
    }

    fn eval_complex(&self, q: Complex64) -> Complex64 {
        (self.complex)(q)
    }
}

/// F(q) = 1 / (q [q + alpha r_n^2 q^beta + nu r_n^2]) for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTransform {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rn2: f64,
}

/// Which per-mode image to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeImage {
    /// F(q), the velocity time kernel.
    Velocity,
    /// F(q) less its large-r_n terms 1 / (q r_n^2 s) - 1 / (r_n^4 s^2),
    /// s = alpha q^beta + nu. Only the first is removed when alpha = 0.
    VelocityTail,
    /// s F(q); the shear kernel divided by rho.
    Shear,
    /// s F(q) less 1 / (q r_n^2) - 1 / (r_n^4 s); only the first when alpha = 0.
    ShearTail,
}

#[inline]
fn cpow(q: Complex64, beta: f64) -> Complex64 {
    if beta == 1.0 {
        q
    } else {
        q.powf(beta)
    }
}

impl ModeTransform {
    pub fn new(params: &FluidParams, rn: f64) -> Self {
        ModeTransform {
            nu: params.nu(),
            alpha: params.alpha(),
            beta: params.beta,
            rn2: rn * rn,
        }
    }

    fn image_real(&self, kind: ModeImage, q: f64) -> f64 {
        let qb = if self.beta == 1.0 { q } else { q.powf(self.beta) };
        let visc = self.nu + self.alpha * qb;
        let den = q + self.rn2 * visc;
        let second = self.alpha != 0.0;
        match kind {
            ModeImage::Velocity => 1.0 / (q * den),
            ModeImage::VelocityTail if second => q / (self.rn2 * self.rn2 * visc * visc * den),
            ModeImage::VelocityTail => -1.0 / (self.rn2 * visc * den),
            ModeImage::Shear => visc / (q * den),
            ModeImage::ShearTail if second => q / (self.rn2 * self.rn2 * visc * den),
            ModeImage::ShearTail => -1.0 / (self.rn2 * den),
        }
    }

    fn image_complex(&self, kind: ModeImage, q: Complex64) -> Complex64 {
        let visc = self.alpha * cpow(q, self.beta) + self.nu;
        let den = q + visc * self.rn2;
        let second = self.alpha != 0.0;
        let rn4 = self.rn2 * self.rn2;
        match kind {
            ModeImage::Velocity => (q * den).inv(),
            ModeImage::VelocityTail if second => q / (visc * visc * den * rn4),
            ModeImage::VelocityTail => -(visc * den * self.rn2).inv(),
            ModeImage::Shear => visc / (q * den),
            ModeImage::ShearTail if second => q / (visc * den * rn4),
            ModeImage::ShearTail => -(den * self.rn2).inv(),
        }
    }

    pub fn image(&self, kind: ModeImage) -> impl LaplaceImage + '_ {
        FnImage {
            real: move |q| self.image_real(kind, q),
            complex: move |q| self.image_complex(kind, q),
        }
    }
}

/// Direct evaluation of F(q) for q > 0.
pub fn eval_transform(mt: &ModeTransform, q: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::domain(
            "eval_transform",
            format!("q must be positive, got {q}"),
        ));
    }
    Ok(mt.image_real(ModeImage::Velocity, q))
}

/// Gaver-Stehfest weights V_1..V_N.
pub fn stehfest_weights(n_terms: usize) -> Result<Vec<f64>> {
    if n_terms % 2 != 0 || !(8..=20).contains(&n_terms) {
        return Err(Error::domain(
            "invert_stehfest",
            format!("n_terms must be even and in [8, 20], got {n_terms}"),
        ));
    }
    let fact = |k: usize| (1..=k).fold(1.0f64, |acc, i| acc * i as f64);
    let half = n_terms / 2;
    let weights = (1..=n_terms)
        .map(|k| {
            let lo = (k + 1) / 2;
            let hi = k.min(half);
            let s: f64 = (lo..=hi)
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half) % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect();
    Ok(weights)
}

/// Gaver-Stehfest inversion on the real axis at q = k ln2 / t.
pub fn invert_stehfest(f: impl Fn(f64) -> f64, t: f64, n_terms: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("invert_stehfest", format!("t must be positive, got {t}")));
    }
    let weights = stehfest_weights(n_terms)?;
    let a = LN_2 / t;
    let sum: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * f((i + 1) as f64 * a))
        .sum();
    Ok(a * sum)
}

// Optimized cotangent contour z(theta) = (M/t) [a theta cot(b theta) - c + i d theta].
const TALBOT_A: f64 = 0.5017;
const TALBOT_B: f64 = 0.6407;
const TALBOT_C: f64 = 0.6122;
const TALBOT_D: f64 = 0.2645;

/// Inversion by the midpoint rule on an optimized Talbot contour enclosing
/// the negative real axis. The image must be analytic off that cut.
pub fn invert_talbot(f: impl Fn(Complex64) -> Complex64, t: f64, nodes: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("invert_talbot", format!("t must be positive, got {t}")));
    }
    if nodes < 2 || nodes % 2 != 0 {
        return Err(Error::domain("invert_talbot", "nodes must be even and >= 2"));
    }
    let m = nodes as f64;
    let h = 2.0 * PI / m;
    let scale = m / t;
    let mut sum = 0.0;
    // Nodes come in conjugate pairs; only theta > 0 is evaluated.
    for k in nodes / 2..nodes {
        let theta = -PI + (k as f64 + 0.5) * h;
        let bt = TALBOT_B * theta;
        let (s, c) = bt.sin_cos();
        let cot = c / s;
        let sigma = Complex64::new(TALBOT_A * theta * cot - TALBOT_C, TALBOT_D * theta);
        let dsigma = Complex64::new(
            TALBOT_A * cot - TALBOT_A * TALBOT_B * theta / (s * s),
            TALBOT_D,
        );
        let z = sigma * scale;
        let term = (sigma * m).exp() * f(z) * dsigma;
        sum += term.im;
    }
    Ok(2.0 * sum / t)
}

/// Inverts an image with the chosen method.
pub fn invert(image: &impl LaplaceImage, t: f64, method: Inversion) -> Result<f64> {
    match method {
        Inversion::Stehfest { n_terms } => invert_stehfest(|q| image.eval_real(q), t, n_terms),
        Inversion::Talbot { nodes } => invert_talbot(|q| image.eval_complex(q), t, nodes),
    }
}

/// L^{-1}{F}(t), the time kernel multiplying the n-th velocity mode.
pub fn invert_mode_velocity_kernel(mt: &ModeTransform, t: f64, method: Inversion) -> Result<f64> {
    invert(&mt.image(ModeImage::Velocity), t, method)
}

/// L^{-1}{1 / (q (alpha q^beta + nu))}(t), the common large-r_n limit of
/// r_n^2 times the velocity kernel.
pub fn tail_kernel(nu: f64, alpha: f64, beta: f64, t: f64, method: Inversion) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(1.0 / nu);
    }
    if beta == 1.0 {
        return Ok(-(-nu * t / alpha).exp_m1() / nu);
    }
    let image = FnImage {
        real: |q: f64| 1.0 / (q * (alpha * q.powf(beta) + nu)),
        complex: |q: Complex64| (q * (q.powf(beta) * alpha + nu)).inv(),
    };
    invert(&image, t, method)
}

/// L^{-1}{1 / s^2} and L^{-1}{1 / s}, s = alpha q^beta + nu: the
/// coefficients of r_n^-4 in the velocity and shear kernels. Both vanish
/// for alpha = 0, where the kernels have no algebraic tail beyond r_n^-2.
pub fn second_tail_kernels(nu: f64, alpha: f64, beta: f64, t: f64, method: Inversion) -> Result<(f64, f64)> {
    if alpha == 0.0 {
        return Ok((0.0, 0.0));
    }
    if beta == 1.0 {
        let e = (-nu * t / alpha).exp() / alpha;
        return Ok((t * e / alpha, e));
    }
    let sq = FnImage {
        real: |q: f64| (alpha * q.powf(beta) + nu).powi(-2),
        complex: |q: Complex64| (q.powf(beta) * alpha + nu).powi(-2),
    };
    let inv = FnImage {
        real: |q: f64| 1.0 / (alpha * q.powf(beta) + nu),
        complex: |q: Complex64| (q.powf(beta) * alpha + nu).inv(),
    };
    Ok((invert(&sq, t, method)?, invert(&inv, t, method)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TALBOT: Inversion = Inversion::Talbot { nodes: 32 };

    #[test]
    fn stehfest_elementary_pairs() {
        for &t in &[0.5, 1.0, 3.0] {
            // f64 roundoff against weights near 4e9 caps this at a few 1e-8
            let v = invert_stehfest(|q| 1.0 / (q * q), t, 16).unwrap();
            assert!((v - t).abs() < 1e-7 * t, "{v}");
        }
        let v = invert_stehfest(|q| 1.0 / (q + 1.0), 1.0, 16).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-7, "{v}");
    }

    #[test]
    fn stehfest_rejects_bad_term_counts() {
        assert!(invert_stehfest(|q| 1.0 / q, 1.0, 7).is_err());
        assert!(invert_stehfest(|q| 1.0 / q, 1.0, 22).is_err());
        assert!(invert_stehfest(|q| 1.0 / q, 0.0, 16).is_err());
    }

    #[test]
    fn stehfest_weights_invert_constants() {
        // L^{-1}{1/q} = 1 requires sum V_k / k = 1 exactly.
        let w = stehfest_weights(16).unwrap();
        let s: f64 = w.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).sum();
        assert!((s - 1.0).abs() < 1e-6);
    }

    #[test]
    fn talbot_elementary_pairs() {
        for &t in &[1e-3, 0.1, 1.0, 10.0] {
            let v = invert_talbot(|q| (q * q).inv(), t, 32).unwrap();
            assert!((v - t).abs() < 1e-12 * t, "t = {t}: {v}");
            let v = invert_talbot(|q| (q + 1.0).inv(), t, 32).unwrap();
            assert!((v - (-t).exp()).abs() < 1e-12, "t = {t}: {v}");
            let v = invert_talbot(|q| q.sqrt().inv(), t, 32).unwrap();
            let e = 1.0 / (PI * t).sqrt();
            assert!((v - e).abs() < 1e-11 * e, "t = {t}: {v}");
        }
    }

    #[test]
    fn transform_limits() {
        let mt = ModeTransform {
            nu: 0.2,
            alpha: 0.05,
            beta: 0.6,
            rn2: 3.0,
        };
        let big = 1e12;
        assert!((big * big * eval_transform(&mt, big).unwrap() - 1.0).abs() < 1e-5);
        let small = 1e-12;
        let lim = small * eval_transform(&mt, small).unwrap();
        assert!((lim - 1.0 / (mt.nu * mt.rn2)).abs() < 1e-6 * lim);
        assert!(eval_transform(&mt, 0.0).is_err());
        let sg = ModeTransform { beta: 1.0, ..mt };
        let q = 0.7;
        let direct = 1.0 / (q * (q * (1.0 + sg.alpha * sg.rn2) + sg.nu * sg.rn2));
        assert!((eval_transform(&sg, q).unwrap() - direct).abs() < 1e-15 * direct);
    }

    #[test]
    fn kernel_at_beta_one_is_exponential() {
        let mt = ModeTransform {
            nu: 1.48 / 1260.0,
            alpha: 0.009,
            beta: 1.0,
            rn2: 30.0,
        };
        for &t in &[0.1, 1.0, 5.0, 10.0] {
            let b = mt.nu * mt.rn2;
            let exact = -(-b * t / (1.0 + mt.alpha * mt.rn2)).exp_m1() / b;
            let k = invert_mode_velocity_kernel(&mt, t, TALBOT).unwrap();
            assert!((k - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn tail_images_are_consistent() {
        let mt = ModeTransform {
            nu: 0.01,
            alpha: 0.02,
            beta: 0.5,
            rn2: 40.0,
        };
        let t = 2.0;
        let full = invert(&mt.image(ModeImage::Velocity), t, TALBOT).unwrap();
        let tail = invert(&mt.image(ModeImage::VelocityTail), t, TALBOT).unwrap();
        let lead = tail_kernel(mt.nu, mt.alpha, mt.beta, t, TALBOT).unwrap() / mt.rn2;
        let (k2, l) = second_tail_kernels(mt.nu, mt.alpha, mt.beta, t, TALBOT).unwrap();
        let rn4 = mt.rn2 * mt.rn2;
        assert!((full - (tail + lead - k2 / rn4)).abs() < 1e-12 * full);
        let shear = invert(&mt.image(ModeImage::Shear), t, TALBOT).unwrap();
        let shear_tail = invert(&mt.image(ModeImage::ShearTail), t, TALBOT).unwrap();
        assert!((shear - (shear_tail + 1.0 / mt.rn2 - l / rn4)).abs() < 1e-12 * shear);
    }

    #[test]
    fn second_tail_kernels_match_mittag_leffler_series() {
        // L^{-1}{(q^b + z)^-g} = t^{gb-1} sum_k (g)_k (-z t^b)^k / (k! Gamma(bk + gb)).
        let (nu, alpha, beta, t): (f64, f64, f64, f64) = (0.01, 0.08, 0.5, 2.0);
        let z = nu / alpha;
        let prabhakar = |g: f64| {
            let x = -z * t.powf(beta);
            let mut sum = 0.0;
            let mut rising = 1.0;
            for k in 0..60 {
                let kf = k as f64;
                if k > 0 {
                    rising *= (g + kf - 1.0) / kf;
                }
                sum += rising * x.powi(k) / crate::special::gamma(beta * kf + g * beta).unwrap();
            }
            t.powf(g * beta - 1.0) * sum / alpha.powf(g)
        };
        let (k2, l) = second_tail_kernels(nu, alpha, beta, t, TALBOT).unwrap();
        assert!((k2 - prabhakar(2.0)).abs() < 1e-10 * k2.abs(), "{k2} vs {}", prabhakar(2.0));
        assert!((l - prabhakar(1.0)).abs() < 1e-10 * l.abs(), "{l} vs {}", prabhakar(1.0));

        let one = second_tail_kernels(nu, alpha, 1.0, t, TALBOT).unwrap();
        let e = (-z * t).exp();
        assert!((one.0 - t * e / (alpha * alpha)).abs() < 1e-14 * one.0);
        assert_eq!(second_tail_kernels(nu, 0.0, 0.5, t, TALBOT).unwrap(), (0.0, 0.0));
    }
}
