use std::f64::consts::PI;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::error::{Error, Result};

use super::config::ChannelModel;

/// Sub-unitary branch `κ = (2 − T − 2√(1 − T))/T` of `T = 4κ/(1 + κ)²`.
pub fn kappa_from_transmission(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::invalid("T", format!("must lie in (0, 1], got {t}")));
    }
    // equivalently T/(1 + √(1−T))², free of cancellation at small T
    let d = 1.0 + (1.0 - t).sqrt();
    Ok(t / (d * d))
}

pub fn transmission_from_kappa(kappa: f64) -> f64 {
    4.0 * kappa / (1.0 + kappa).powi(2)
}

/// Channel vectors. Channel `c` couples to basis site `c` with real
/// amplitude `amplitudes[c]`; channels 0 and 1 are the antennas `a` and `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    pub n_dim: usize,
    pub rho0: f64,
    pub amplitudes: Vec<f64>,
}

impl Couplings {
    /// `|w|² = κ/(π²ρ₀)` for each channel.
    pub fn from_kappas(n_dim: usize, rho0: f64, kappas: &[f64]) -> Result<Self> {
        if kappas.len() > n_dim {
            return Err(Error::invalid(
                "channels",
                format!("{} channels exceed n_dim = {n_dim}", kappas.len()),
            ));
        }
        if !(rho0 > 0.0) {
            return Err(Error::invalid("rho0", "must be positive"));
        }
        Ok(Self {
            n_dim,
            rho0,
            amplitudes: kappas.iter().map(|k| (k / (PI * PI * rho0)).sqrt()).collect(),
        })
    }

    pub fn channel_count(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn kappa(&self, c: usize) -> f64 {
        PI * PI * self.rho0 * self.amplitudes[c].powi(2)
    }

    /// Dense `N × (2 + M)` channel matrix.
    pub fn matrix(&self) -> Mat<c64> {
        let mut w = Mat::<c64>::zeros(self.n_dim, self.channel_count());
        for (c, &a) in self.amplitudes.iter().enumerate() {
            w[(c, c)] = c64::new(a, 0.0);
        }
        w
    }
}

/// Uncalibrated couplings from the analytic `κ` branch. With `with_parasitic`
/// false only the two antennas are built.
pub fn coupling_vectors(model: &ChannelModel, n_dim: usize, rho0: f64) -> Result<Couplings> {
    build(model, n_dim, rho0, true)
}

pub(crate) fn build(model: &ChannelModel, n_dim: usize, rho0: f64, with_parasitic: bool) -> Result<Couplings> {
    model.validate()?;
    let mut k = vec![
        kappa_from_transmission(model.t_a)?,
        kappa_from_transmission(model.t_b)?,
    ];
    if with_parasitic && model.m > 0 {
        let kc = kappa_from_transmission(model.t_c)?;
        k.extend(std::iter::repeat(kc).take(model.m as usize));
    }
    Couplings::from_kappas(n_dim, rho0, &k)
}

/// Block of `S = I − 2πi W†(E − H + iεI + iπWW†)⁻¹W` on the listed channels.
pub fn s_block(h: &Mat<c64>, w: &Couplings, energy: f64, shift: f64, channels: &[usize]) -> Result<Mat<c64>> {
    let n = w.n_dim;
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::invalid("H", format!("expected {n}×{n}, got {}×{}", h.nrows(), h.ncols())));
    }
    if let Some(&c) = channels.iter().find(|&&c| c >= w.channel_count()) {
        return Err(Error::invalid("channels", format!("no channel {c}")));
    }
    let mut a = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            a[(i, j)] = -h[(i, j)];
        }
        a[(j, j)] += c64::new(energy, shift);
    }
    for (c, &amp) in w.amplitudes.iter().enumerate() {
        a[(c, c)] += c64::new(0.0, PI * amp * amp);
    }
    let mut rhs = Mat::<c64>::zeros(n, channels.len());
    for (j, &c) in channels.iter().enumerate() {
        rhs[(c, j)] = c64::new(w.amplitudes[c], 0.0);
    }
    let x = a.partial_piv_lu().solve(&rhs);
    let k = channels.len();
    let mut s = Mat::<c64>::zeros(k, k);
    let two_pi_i = c64::new(0.0, 2.0 * PI);
    for (j, _) in channels.iter().enumerate() {
        for (i, &ci) in channels.iter().enumerate() {
            let v = if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) };
            s[(i, j)] = v - two_pi_i * w.amplitudes[ci] * x[(ci, j)];
        }
    }
    for j in 0..k {
        for i in 0..k {
            if !(s[(i, j)].re.is_finite() && s[(i, j)].im.is_finite()) {
                return Err(Error::Singular(format!("resolvent solve failed at E = {energy}")));
            }
        }
    }
    Ok(s)
}

/// The full `(2 + M)`-channel scattering matrix.
pub fn s_matrix_full(h: &Mat<c64>, w: &Couplings, energy: f64, shift: f64) -> Result<Mat<c64>> {
    let all: Vec<usize> = (0..w.channel_count()).collect();
    s_block(h, w, energy, shift, &all)
}

/// The 2×2 block on the antenna channels.
pub fn s_matrix_ports(h: &Mat<c64>, w: &Couplings, energy: f64, shift: f64) -> Result<[[c64; 2]; 2]> {
    let s = s_block(h, w, energy, shift, &[0, 1])?;
    Ok([[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]])
}
