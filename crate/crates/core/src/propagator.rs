//! Conditioned one-excitation evolution.
//!
//! Per level the doublet `A = (D1+, D1-)` obeys `dA/dt = M A + Δ` with
//! `M = [[F, G], [G, H]]` and `Δ = A_l (-1, 1)`, `A_l = Y D0 / √2`, so
//!
//! ```text
//! A(t) = e^{Mt} (A(0) - A_ss) + A_ss,    A_ss = -M^{-1} Δ.
//! ```
//!
//! `e^{Mt}` is evaluated as `e^{χ1 t} [cosh(χ2 t) 1 + sinh(χ2 t)/χ2 (M - χ1)]`.
//! Both scalar functions depend on `χ2²` only, which keeps the coalescing
//! eigenvalue case regular without a special code path.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::steady_state::one_excitation_block;
use crate::{Error, Result, SystemParams, C64};

type Mat2 = [[C64; 2]; 2];

/// Below this `|χ2 t|` the exponential uses the even power series.
const SERIES_RADIUS: f64 = 0.1;

/// Spectral data of the one-excitation block at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigenSystem {
    pub f: C64,
    pub h: C64,
    pub g: f64,
    pub chi1: C64,
    pub chi2: C64,
    pub lambda1: C64,
    pub lambda2: C64,
    pub beta1p: C64,
    pub beta2p: C64,
    /// `F H - G²`; real and positive for every admissible parameter set.
    pub phi: C64,
}

pub fn block_eigensystem(p: &SystemParams, l: usize) -> BlockEigenSystem {
    let (f, h, g) = one_excitation_block(p, l);
    BlockEigenSystem::from_block(f, h, g)
}

pub fn block_eigensystems(p: &SystemParams) -> Vec<BlockEigenSystem> {
    (0..p.levels()).map(|l| block_eigensystem(p, l)).collect()
}

/// Principal square root, with the `Re = 0` tie sent to `Im ≥ 0`.
fn branch_sqrt(z: C64) -> C64 {
    let r = z.sqrt();
    if r.re == 0.0 && r.im < 0.0 {
        -r
    } else {
        r
    }
}

impl BlockEigenSystem {
    pub fn from_block(f: C64, h: C64, g: f64) -> Self {
        let chi1 = (f + h) / 2.0;
        let chi2 = branch_sqrt((f - h) * (f - h) + 4.0 * g * g) / 2.0;
        let lambda1 = chi1 + chi2;
        let lambda2 = chi1 - chi2;
        BlockEigenSystem {
            f,
            h,
            g,
            chi1,
            chi2,
            lambda1,
            lambda2,
            beta1p: f - lambda1,
            beta2p: f - lambda2,
            phi: f * h - g * g,
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let g = C64::new(self.g, 0.0);
        [[self.f, g], [g, self.h]]
    }

    /// `χ2²`, free of any branch choice.
    fn chi2_sq(&self) -> C64 {
        let d = (self.f - self.h) / 2.0;
        d * d + self.g * self.g
    }

    /// Slowest decay rate `min(-Re λ)`.
    pub fn slowest_rate(&self) -> f64 {
        (-self.lambda1.re).min(-self.lambda2.re)
    }

    /// `e^{Mt}`.
    pub fn exp(&self, t: f64) -> Mat2 {
        let (c, s) = if (self.chi2 * t).norm() < SERIES_RADIUS {
            self.scalars_series(t)
        } else {
            self.scalars_spectral(t)
        };
        let g = C64::new(self.g, 0.0);
        [
            [c + s * (self.f - self.chi1), s * g],
            [s * g, c + s * (self.h - self.chi1)],
        ]
    }

    /// `(e^{χ1 t} cosh χ2 t, e^{χ1 t} sinh(χ2 t)/χ2)` from the even power series.
    fn scalars_series(&self, t: f64) -> (C64, C64) {
        let (cosh, sinhc) = even_series(self.chi2_sq() * (t * t));
        let e = (self.chi1 * t).exp();
        (e * cosh, e * sinhc * t)
    }

    /// Same pair from the two eigen-exponentials.
    fn scalars_spectral(&self, t: f64) -> (C64, C64) {
        let e1 = (self.lambda1 * t).exp();
        let e2 = (self.lambda2 * t).exp();
        ((e1 + e2) / 2.0, (e1 - e2) / (2.0 * self.chi2))
    }

    /// Fixed point of the doublet for drive source `a = Y D0 / √2`.
    pub fn steady(&self, a: C64) -> [C64; 2] {
        let g = C64::new(self.g, 0.0);
        [a * (g + self.h) / self.phi, -a * (g + self.f) / self.phi]
    }

    /// Doublet at time `t` from `d` at time 0.
    pub fn evolve(&self, d: [C64; 2], a: C64, t: f64) -> [C64; 2] {
        if t == 0.0 {
            return d;
        }
        let ss = self.steady(a);
        let m = self.exp(t);
        let x = [d[0] - ss[0], d[1] - ss[1]];
        [
            m[0][0] * x[0] + m[0][1] * x[1] + ss[0],
            m[1][0] * x[0] + m[1][1] * x[1] + ss[1],
        ]
    }
}

/// `(cosh √w, sinh √w / √w)` by their power series in `w`.
fn even_series(w: C64) -> (C64, C64) {
    let mut cosh = C64::new(0.0, 0.0);
    let mut sinhc = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    for k in 0..10 {
        cosh += term;
        let k2 = (2 * k + 1) as f64;
        sinhc += term / k2;
        term *= w / (k2 * (k2 + 1.0));
    }
    (cosh, sinhc)
}

/// Evolves every level's one-excitation doublet by `tau` with the zero-excitation
/// source `d0g` held fixed.
pub fn evolve_one_excitation(
    eig: &[BlockEigenSystem],
    d1p0: &[C64],
    d1m0: &[C64],
    d0g: &[C64],
    drive: f64,
    tau: f64,
) -> Result<(Vec<C64>, Vec<C64>)> {
    for got in [d1p0.len(), d1m0.len(), d0g.len()] {
        if got != eig.len() {
            return Err(Error::LengthMismatch {
                expected: eig.len(),
                got,
            });
        }
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidGrid(format!("negative or non-finite tau {tau}")));
    }
    Ok(eig
        .iter()
        .enumerate()
        .map(|(l, b)| {
            let a = d0g[l] * (drive * FRAC_1_SQRT_2);
            let [p, m] = b.evolve([d1p0[l], d1m0[l]], a, tau);
            (p, m)
        })
        .unzip())
}
