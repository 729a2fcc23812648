//! The radial kernel `f(x, c) = e^{-g}/g`, `g = √(x² + c²)`, its x-derivatives
//! and the operator `D_x = sinh(x)(1 + ∂²ₓ) − 2 cosh(x) ∂ₓ`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Value and first two x-derivatives of the kernel, each stored divided by
/// `exp(log_scale)` so that large arguments neither overflow nor underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet<T> {
    pub log_scale: T,
    pub value: T,
    pub dx: T,
    pub dxx: T,
}

impl<T: Real> KernelJet<T> {
    /// Jet from plain (unscaled) derivative values.
    pub fn unscaled(value: T, dx: T, dxx: T) -> Self {
        Self {
            log_scale: T::zero(),
            value,
            dx,
            dxx,
        }
    }

    /// `(f, f_x, f_xx)` with the scale folded back in.
    pub fn to_unscaled(&self) -> (T, T, T) {
        let s = self.log_scale.exp();
        (self.value * s, self.dx * s, self.dxx * s)
    }
}

fn check_args<T: Real>(x: T, c: T) -> Result<()> {
    if !x.is_finite() || !c.is_finite() || (x == T::zero() && c == T::zero()) {
        return Err(Error::SingularKernel {
            x: x.to_f64_lossy(),
            c: c.to_f64_lossy(),
        });
    }
    Ok(())
}

pub fn kernel<T: Real>(x: T, c: T) -> Result<T> {
    check_args(x, c)?;
    let g = x.hypot(c);
    Ok((-g).exp() / g)
}

/// Closed-form chain rule through `g(x) = √(x² + c²)`:
/// `g_x = x/g`, `g_xx = c²/g³`, and with `h(g) = e^{-g}/g`,
/// `h' = −e^{-g}(1/g + 1/g²)`, `h'' = e^{-g}(1/g + 2/g² + 2/g³)`.
pub fn kernel_jet<T: Real>(x: T, c: T) -> Result<KernelJet<T>> {
    check_args(x, c)?;
    let g = x.hypot(c);
    let inv = g.recip();
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    let two = T::lit(2.0);
    let h1 = -(inv + inv2);
    let h2 = inv + two * inv2 + two * inv3;
    let gx = x * inv;
    let gxx = c * c * inv3;
    Ok(KernelJet {
        log_scale: -g,
        value: inv,
        dx: h1 * gx,
        dxx: h2 * gx * gx + h1 * gxx,
    })
}

/// `D_x f = sinh(x)(f + f_xx) − 2 cosh(x) f_x` evaluated from a jet.
///
/// For `x ≥ 1` the hyperbolic functions are split into `e^{±x}` and merged
/// with the jet scale before multiplying.
pub fn apply_dx<T: Real>(x: T, jet: &KernelJet<T>) -> Result<T> {
    let two = T::lit(2.0);
    let a = jet.value + jet.dxx;
    let b = jet.dx;
    let out = if x.abs() < T::one() {
        jet.log_scale.exp() * (x.sinh() * a - two * x.cosh() * b)
    } else {
        let half = T::lit(0.5);
        let up = (x + jet.log_scale).exp();
        let down = (-x + jet.log_scale).exp();
        half * up * (a - two * b) - half * down * (a + two * b)
    };
    if !out.is_finite() {
        return Err(Error::NonFinite {
            x: x.to_f64_lossy(),
            c: f64::NAN,
        });
    }
    Ok(out)
}

/// `D_x` applied to the kernel at `(x, c)`.
pub fn dx_kernel<T: Real>(x: T, c: T) -> Result<T> {
    let jet = kernel_jet(x, c)?;
    apply_dx(x, &jet).map_err(|_| Error::NonFinite {
        x: x.to_f64_lossy(),
        c: c.to_f64_lossy(),
    })
}
