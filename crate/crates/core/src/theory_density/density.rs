use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, Tolerance};
use crate::scalar::Real;

use super::kernel::dx_kernel;
use super::params::TheoryParams;

/// Joint density of `(Re K_ab, Im K_ab)` as a function of `r = |K_ab|`:
/// `(α²/π) · D_x f(x, 2αr)` with `x = γ/2`.
pub fn radial_density<T: Real>(r: T, params: &TheoryParams<T>) -> Result<T> {
    let two = T::lit(2.0);
    let c = two * params.alpha * r.abs();
    let d = dx_kernel(params.x, c)?;
    let p = params.alpha * params.alpha * T::FRAC_1_PI() * d;
    // rounding noise in the tail is clamped; anything larger is a defect
    if p < T::zero() {
        if p < -T::lit(1e-12) {
            return Err(Error::NonFinite {
                x: params.x.to_f64_lossy(),
                c: c.to_f64_lossy(),
            });
        }
        return Ok(T::zero());
    }
    Ok(p)
}

pub fn joint_density<T: Real>(u1: T, u2: T, params: &TheoryParams<T>) -> Result<T> {
    radial_density(u1.hypot(u2), params)
}

/// Radius beyond which the joint density carries less than ~1e-15 of the
/// mass: the kernel decays at least like `e^{x − 2αr}`.
pub fn tail_radius<T: Real>(params: &TheoryParams<T>) -> T {
    (params.x + T::lit(40.0)) / (T::lit(2.0) * params.alpha)
}

/// Half-width of exported density grids, `max(5, 40/γ)`.
pub fn grid_half_width<T: Real>(params: &TheoryParams<T>) -> T {
    T::lit(5.0).max(T::lit(40.0) / params.gamma)
}

fn radial_breaks<T: Real>(lo: T, hi: T, params: &TheoryParams<T>) -> Vec<T> {
    // break the range at multiples of the natural width 1/√α so the
    // adaptive rule sees the peak and the exponential tail separately
    let scale = params.alpha.sqrt().recip();
    let mut out = vec![lo];
    for m in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let p = T::lit(m) * scale;
        if p > lo && p < hi {
            out.push(p);
        }
    }
    out.push(hi);
    out
}

/// `∫ P(u, v) dv`, using the radial symmetry `2∫₀^V P(√(u²+v²)) dv`.
pub fn marginal_density<T: Real>(u: T, params: &TheoryParams<T>) -> Result<T> {
    marginal_density_tol(u, params, Tolerance::default())
}

pub fn marginal_density_tol<T: Real>(
    u: T,
    params: &TheoryParams<T>,
    tol: Tolerance,
) -> Result<T> {
    let big_r = tail_radius(params);
    let u = u.abs();
    if u >= big_r {
        return Ok(T::zero());
    }
    let v_max = (big_r * big_r - u * u).sqrt();
    let mut failure = None;
    let breaks = radial_breaks(T::zero(), v_max, params);
    let est = integrate_piecewise(
        |v: T| match radial_density(u.hypot(v), params) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        &breaks,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(T::lit(2.0) * est.value)
}

fn radial_moment<T: Real>(power: i32, params: &TheoryParams<T>) -> Result<T> {
    let big_r = tail_radius(params);
    let breaks = radial_breaks(T::zero(), big_r, params);
    let mut failure = None;
    let est = integrate_piecewise(
        |r: T| match radial_density(r, params) {
            Ok(p) => p * r.powi(power),
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        &breaks,
        Tolerance::default(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est.value)
}

/// `∫∫ P(u₁, u₂) du₁ du₂` evaluated in polar form.
pub fn joint_normalization<T: Real>(params: &TheoryParams<T>) -> Result<T> {
    Ok(T::lit(2.0) * T::PI() * radial_moment(1, params)?)
}

/// Second moment of either marginal, `∫ u² P(u) du = π ∫ r³ P(r) dr`.
pub fn marginal_second_moment<T: Real>(params: &TheoryParams<T>) -> Result<T> {
    Ok(T::PI() * radial_moment(3, params)?)
}

/// Standard deviation of the Gaussian matched to the marginal's second moment.
pub fn matched_sigma<T: Real>(params: &TheoryParams<T>) -> Result<T> {
    Ok(marginal_second_moment(params)?.sqrt())
}

pub fn gaussian_baseline<T: Real>(u: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    let z = u / sigma;
    let norm = sigma * (T::lit(2.0) * T::PI()).sqrt();
    Ok((-(z * z) / T::lit(2.0)).exp() / norm)
}

/// Integral of the marginal over `[-R, R]`, an independent route to the
/// normalization used as a consistency check on the 1-D quadrature.
pub fn marginal_normalization<T: Real>(params: &TheoryParams<T>) -> Result<T> {
    let big_r = tail_radius(params);
    let breaks = radial_breaks(T::zero(), big_r, params);
    let mut failure = None;
    let tol = Tolerance {
        abs: 1e-12,
        rel: 1e-10,
        ..Tolerance::default()
    };
    let est = integrate_piecewise(
        |u: T| match marginal_density_tol(u, params, tol) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        &breaks,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(T::lit(2.0) * est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(g: f64) -> TheoryParams<f64> {
        TheoryParams::from_gamma(g).unwrap()
    }

    #[test]
    fn joint_symmetries_are_exact() {
        let q = p(5.39);
        for (a, b) in [(0.3, 0.7), (1.1, -0.2), (2.5, 0.0)] {
            let v = joint_density(a, b, &q).unwrap();
            assert_eq!(v, joint_density(b, a, &q).unwrap());
            assert_eq!(v, joint_density(-a, b, &q).unwrap());
            assert_eq!(v, joint_density(a, -b, &q).unwrap());
        }
    }

    #[test]
    fn origin_value_matches_closed_form() {
        // c = 0: e^{-x}[sinh(x)(2/x + 2/x² + 2/x³) + 2cosh(x)(1/x + 1/x²)]·α²/π
        let q = TheoryParams::from_alpha(1.35f64).unwrap();
        let x = q.x;
        assert_eq!(x, 2.7);
        let closed = (-x).exp()
            * (x.sinh() * (2.0 / x + 2.0 / (x * x) + 2.0 / x.powi(3))
                + 2.0 * x.cosh() * (1.0 / x + 1.0 / (x * x)))
            * q.alpha
            * q.alpha
            / std::f64::consts::PI;
        let got = joint_density(0.0, 0.0, &q).unwrap();
        assert!((got - closed).abs() < 1e-14 * closed);
        assert!((got - 0.618_213_309_237_976_4).abs() < 1e-14);
    }

    #[test]
    fn normalization_and_variance() {
        for g in [1.0, 5.39, 27.18, 100.0] {
            let q = p(g);
            let n = joint_normalization(&q).unwrap();
            assert!((n - 1.0).abs() < 1e-9, "gamma {g}: {n}");
            // per-component variance 1/(2α) = 2/γ (50-digit quadrature)
            let m2 = marginal_second_moment(&q).unwrap();
            assert!((m2 - 2.0 / g).abs() < 1e-9 * m2, "gamma {g}: {m2}");
        }
    }

    #[test]
    fn marginal_is_even_and_normalized() {
        let q = p(5.39);
        for u in [0.0, 0.1, 0.77, 2.4] {
            let a = marginal_density(u, &q).unwrap();
            let b = marginal_density(-u, &q).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
        }
        let n = marginal_normalization(&q).unwrap();
        assert!((n - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_baseline_basics() {
        let s = 0.7f64;
        let peak = gaussian_baseline(0.0, s).unwrap();
        assert!((peak - 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);
        assert!(gaussian_baseline(0.0, 0.0f64).is_err());
        let total = crate::quadrature::integrate(
            |u| gaussian_baseline(u, s).unwrap(),
            -12.0 * s,
            12.0 * s,
            Tolerance::default(),
        )
        .unwrap();
        assert!((total.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matched_gaussian_misses_small_gamma_peak() {
        let q = TheoryParams::from_alpha(1.35f64).unwrap();
        let sigma = matched_sigma(&q).unwrap();
        let exact = marginal_density(0.0, &q).unwrap();
        let gauss = gaussian_baseline(0.0, sigma).unwrap();
        assert!((exact - gauss).abs() / gauss > 0.05, "{exact} vs {gauss}");
    }

    #[test]
    fn f32_normalizes_loosely() {
        let q = TheoryParams::from_gamma(5.39f32).unwrap();
        let n = joint_normalization(&q).unwrap();
        assert!((n - 1.0).abs() < 1e-4);
        let q = TheoryParams::from_gamma(200f32).unwrap();
        assert!(radial_density(0.01f32, &q).unwrap().is_finite());
    }
}
