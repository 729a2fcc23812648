//! Two-port scattering matrices and the Wigner reaction matrix
//! `K = i(S − I)(S + I)⁻¹`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Mat2<T> = [[Complex<T>; 2]; 2];

/// Where a sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Graph,
    #[default]
    Rmt,
    Measured,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Graph => "graph",
            Source::Rmt => "rmt",
            Source::Measured => "measured",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "graph" => Some(Source::Graph),
            "rmt" => Some(Source::Rmt),
            "measured" => Some(Source::Measured),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SampleTag {
    pub source: Source,
    pub realization: u64,
    pub index: u64,
}

/// 2×2 scattering matrix at spectral coordinate `coord` (wavenumber for
/// graphs, energy for random-matrix samples, frequency for measurements).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort<T> {
    pub s: Mat2<T>,
    pub coord: T,
    pub tag: SampleTag,
}

/// Reaction matrix derived from a [`TwoPort`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMatrix<T> {
    pub k: Mat2<T>,
    pub coord: T,
    pub tag: SampleTag,
}

impl<T: Real> TwoPort<T> {
    pub fn new(s: Mat2<T>, coord: T, tag: SampleTag) -> Self {
        Self { s, coord, tag }
    }

    pub fn s_aa(&self) -> Complex<T> {
        self.s[0][0]
    }
    pub fn s_ab(&self) -> Complex<T> {
        self.s[0][1]
    }
    pub fn s_ba(&self) -> Complex<T> {
        self.s[1][0]
    }
    pub fn s_bb(&self) -> Complex<T> {
        self.s[1][1]
    }

    /// Largest singular value of S.
    pub fn norm(&self) -> T {
        spectral_norm(&self.s)
    }

    /// `max |(S†S − I)_ij|`.
    pub fn unitarity_defect(&self) -> T {
        let p = mul(&adjoint(&self.s), &self.s);
        let mut worst = T::zero();
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((v - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }
}

impl<T: Real> KMatrix<T> {
    pub fn k_aa(&self) -> Complex<T> {
        self.k[0][0]
    }
    pub fn k_ab(&self) -> Complex<T> {
        self.k[0][1]
    }
    pub fn k_ba(&self) -> Complex<T> {
        self.k[1][0]
    }
    pub fn k_bb(&self) -> Complex<T> {
        self.k[1][1]
    }

    /// Normalized impedance `z = iK` (so that `K = −i z`).
    pub fn impedance(&self) -> Mat2<T> {
        let i = Complex::new(T::zero(), T::one());
        scale(&self.k, i)
    }

    /// `max |K − K†|`.
    pub fn hermiticity_defect(&self) -> T {
        let h = adjoint(&self.k);
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.k[i][j] - h[i][j]).norm());
            }
        }
        worst
    }
}

pub fn identity<T: Real>() -> Mat2<T> {
    let o = Complex::new(T::one(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    [[o, z], [z, o]]
}

pub fn add<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn sub<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

pub fn mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn scale<T: Real>(a: &Mat2<T>, f: Complex<T>) -> Mat2<T> {
    [[a[0][0] * f, a[0][1] * f], [a[1][0] * f, a[1][1] * f]]
}

pub fn adjoint<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn max_abs<T: Real>(a: &Mat2<T>) -> T {
    a.iter()
        .flatten()
        .fold(T::zero(), |m, v| m.max(v.norm()))
}

/// Inverse of a 2×2 matrix; fails when `|det|` is below `rel_tol · ‖a‖²`.
pub fn inverse<T: Real>(a: &Mat2<T>, rel_tol: T) -> Option<Mat2<T>> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale_sq = max_abs(a).powi(2);
    if !(det.norm() > rel_tol * scale_sq) || !det.norm().is_finite() {
        return None;
    }
    let inv = det.inv();
    Some([
        [a[1][1] * inv, -a[0][1] * inv],
        [-a[1][0] * inv, a[0][0] * inv],
    ])
}

/// Largest singular value via the 2×2 Gram matrix eigenvalues.
pub fn spectral_norm<T: Real>(a: &Mat2<T>) -> T {
    let g = mul(&adjoint(a), a);
    let p = g[0][0].re;
    let q = g[1][1].re;
    let off = g[0][1].norm();
    let half = T::lit(0.5);
    let mean = half * (p + q);
    let rad = (half * (p - q)).hypot(off);
    (mean + rad).max(T::zero()).sqrt()
}

fn singular_tol<T: Real>() -> T {
    T::epsilon() * T::lit(64.0)
}

/// `K = i(S − I)(S + I)⁻¹`.
pub fn k_from_s<T: Real>(s: &TwoPort<T>) -> Result<KMatrix<T>> {
    let id = identity::<T>();
    let plus = add(&s.s, &id);
    let inv = inverse(&plus, singular_tol()).ok_or_else(|| {
        Error::Singular(format!(
            "S + I not invertible (S has eigenvalue -1) for sample {}/{}/{}",
            s.tag.source.as_str(),
            s.tag.realization,
            s.tag.index
        ))
    })?;
    let i = Complex::new(T::zero(), T::one());
    let k = scale(&mul(&sub(&s.s, &id), &inv), i);
    Ok(KMatrix {
        k,
        coord: s.coord,
        tag: s.tag,
    })
}

/// `S = (iI + K)(iI − K)⁻¹`, the inverse of [`k_from_s`].
pub fn s_from_k<T: Real>(k: &KMatrix<T>) -> Result<TwoPort<T>> {
    let ii = scale(&identity::<T>(), Complex::new(T::zero(), T::one()));
    let inv = inverse(&sub(&ii, &k.k), singular_tol()).ok_or_else(|| {
        Error::Singular(format!(
            "iI - K not invertible for sample {}/{}/{}",
            k.tag.source.as_str(),
            k.tag.realization,
            k.tag.index
        ))
    })?;
    Ok(TwoPort {
        s: mul(&add(&ii, &k.k), &inv),
        coord: k.coord,
        tag: k.tag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use proptest::prelude::*;

    fn two_port(s: Mat2<f64>) -> TwoPort<f64> {
        TwoPort::new(s, 0.0, SampleTag::default())
    }

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn max_dev(a: &Mat2<f64>, b: &Mat2<f64>) -> f64 {
        max_abs(&sub(a, b))
    }

    #[test]
    fn identity_gives_zero_k() {
        let k = k_from_s(&two_port(identity())).unwrap();
        assert_eq!(max_abs(&k.k), 0.0);
    }

    #[test]
    fn phase_identity_gives_minus_tan_half_angle() {
        // i(e^{iθ} − 1)/(e^{iθ} + 1) = −tan(θ/2)
        let theta = std::f64::consts::FRAC_PI_2;
        let e = C::from_polar(1.0, theta);
        let k = k_from_s(&two_port(scale(&identity(), e))).unwrap();
        let want = scale(&identity(), c(-(theta / 2.0).tan(), 0.0));
        assert!(max_dev(&k.k, &want) < 1e-15);
        assert!(max_dev(&k.k, &scale(&identity(), c(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn full_absorption_gives_minus_i() {
        let zero = [[c(0.0, 0.0); 2]; 2];
        let k = k_from_s(&two_port(zero)).unwrap();
        assert!(max_dev(&k.k, &scale(&identity(), c(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn eigenvalue_minus_one_is_singular() {
        let s = [[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.3, 0.0)]];
        let mut tp = two_port(s);
        tp.tag.index = 17;
        let err = k_from_s(&tp).unwrap_err();
        assert!(err.to_string().contains("17"));
    }

    #[test]
    fn s_from_k_examples() {
        let k = KMatrix {
            k: [[c(0.0, 0.0); 2]; 2],
            coord: 0.0,
            tag: SampleTag::default(),
        };
        assert!(max_dev(&s_from_k(&k).unwrap().s, &identity()) < 1e-15);
        let k = KMatrix {
            k: scale(&identity(), c(-1.0, 0.0)),
            ..k
        };
        // (i − 1)/(i + 1) = i
        assert!(max_dev(&s_from_k(&k).unwrap().s, &scale(&identity(), c(0.0, 1.0))) < 1e-15);
        let k = KMatrix {
            k: scale(&identity(), c(0.0, 1.0)),
            ..k
        };
        assert!(s_from_k(&k).is_err());
    }

    #[test]
    fn impedance_view() {
        let s = [[c(0.2, 0.1), c(0.3, -0.2)], [c(0.1, 0.4), c(-0.3, 0.0)]];
        let k = k_from_s(&two_port(s)).unwrap();
        let z = k.impedance();
        // K = −i z
        assert!(max_dev(&scale(&z, c(0.0, -1.0)), &k.k) < 1e-15);
    }

    fn arb_c() -> impl Strategy<Value = C> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
    }

    fn arb_mat() -> impl Strategy<Value = Mat2<f64>> {
        [[arb_c(), arb_c()], [arb_c(), arb_c()]]
    }

    /// Unitary from angles: e^{iφ} [[cos θ e^{iα}, sin θ e^{iβ}], [−sin θ e^{−iβ}, cos θ e^{−iα}]].
    fn arb_unitary() -> impl Strategy<Value = Mat2<f64>> {
        (0.0f64..6.28, 0.0f64..6.28, 0.0f64..6.28, 0.0f64..6.28).prop_map(|(phi, th, a, b)| {
            let g = C::from_polar(1.0, phi);
            [
                [g * C::from_polar(th.cos(), a), g * C::from_polar(th.sin(), b)],
                [g * C::from_polar(-th.sin(), -b), g * C::from_polar(th.cos(), -a)],
            ]
        })
    }

    proptest! {
        #[test]
        fn roundtrip_on_sub_unitary(m in arb_mat(), shrink in 0.05f64..0.95) {
            // rescale to spectral norm `shrink` < 1
            let n = spectral_norm(&m);
            prop_assume!(n > 1e-6);
            let s = scale(&m, c(shrink / n, 0.0));
            let tp = two_port(s);
            let k = k_from_s(&tp).unwrap();
            let back = s_from_k(&k).unwrap();
            prop_assert!(max_dev(&back.s, &s) < 1e-12);
            let k2 = k_from_s(&back).unwrap();
            prop_assert!(max_dev(&k2.k, &k.k) < 1e-12 * max_abs(&k.k).max(1.0));
        }

        #[test]
        fn unitary_s_gives_hermitian_k(u in arb_unitary()) {
            let tp = two_port(u);
            prop_assert!(tp.unitarity_defect() < 1e-14);
            if let Ok(k) = k_from_s(&tp) {
                let scale = max_abs(&k.k).max(1.0);
                prop_assert!(k.hermiticity_defect() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let s = [[c(0.3, 0.4), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -0.9)]];
        assert!((spectral_norm(&s) - 0.9).abs() < 1e-15);
    }
}
