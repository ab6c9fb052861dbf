//! System parameters, vibronic detunings and the dressed/bare amplitude bases.
//!
//! Within a vibronic level `l` the two dressed states of the `n`-excitation
//! manifold are `|n,l,±⟩ = (|g,n,l⟩ ± |e,n-1,l⟩)/√2`. Amplitudes in that basis
//! relate to the bare ones by `D_{n,l,±} = (C_{e,n-1,l} ± C_{g,n,l})/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Largest drive accepted by the finite-drive integrator.
pub const MAX_WEAK_DRIVE: f64 = 0.01;

/// Dimensionless model parameters. Rates are in units of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Atom-cavity coupling.
    pub g: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Atomic linewidth; the unit of all rates.
    pub gamma: f64,
    /// Vibronic detuning of the one-excitation `+` ladder per level.
    pub delta1: f64,
    /// Drive amplitude used by the finite-drive integrator.
    pub y_drive: f64,
    /// Highest vibronic level kept.
    pub l_max: usize,
}

impl SystemParams {
    pub const DEFAULT_Y_DRIVE: f64 = 1e-3;

    /// Builds and validates a parameter set with `gamma = 1` and the default drive.
    pub fn new(g: f64, kappa: f64, delta1: f64, l_max: usize) -> Result<Self> {
        SystemParams {
            g,
            kappa,
            gamma: 1.0,
            delta1,
            y_drive: Self::DEFAULT_Y_DRIVE,
            l_max,
        }
        .validate()
    }

    pub fn with_y_drive(self, y_drive: f64) -> Result<Self> {
        SystemParams { y_drive, ..self }.validate()
    }

    pub fn with_l_max(self, l_max: usize) -> Self {
        SystemParams { l_max, ..self }
    }

    pub fn validate(self) -> Result<Self> {
        for (name, v) in [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("delta1", self.delta1),
            ("y_drive", self.y_drive),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.g <= 0.0 {
            return Err(Error::NonpositiveCoupling(self.g));
        }
        if self.kappa <= 0.0 {
            return Err(Error::NonpositiveKappa(self.kappa));
        }
        if self.gamma != 1.0 {
            return Err(Error::GammaNotUnit(self.gamma));
        }
        if self.delta1 < 0.0 {
            return Err(Error::NegativeDetuning(self.delta1));
        }
        if self.y_drive <= 0.0 {
            return Err(Error::NonpositiveDrive(self.y_drive));
        }
        if self.y_drive > MAX_WEAK_DRIVE {
            return Err(Error::DriveTooLarge {
                value: self.y_drive,
                limit: MAX_WEAK_DRIVE,
            });
        }
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        self.l_max + 1
    }

    /// Effective coupling seen by vibronic level `l`: `g + delta1 * l`.
    pub fn level_coupling(&self, l: usize) -> f64 {
        self.delta1 * l as f64 + self.g
    }

    /// Energy of the dressed state `|n,l,sign⟩` relative to the ground ladder,
    /// which is the imaginary part of its damping coefficient.
    ///
    /// In the deep-trapping limit the `n = 2` ladder spacing is `√2` times the
    /// `n = 1` spacing, so `detuning(Two, l, s) = √2 · detuning(One, l, s)`.
    pub fn detuning(&self, manifold: Manifold, l: usize, sign: Sign) -> f64 {
        sign.value() * manifold.sqrt_n() * self.level_coupling(l)
    }

    /// Alias of [`validate`](Self::validate) under its operation name.
    pub fn validate_params(self) -> Result<Self> {
        self.validate()
    }
}

/// Excitation manifold carrying a dressed doublet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    One,
    Two,
}

impl Manifold {
    pub fn sqrt_n(self) -> f64 {
        match self {
            Manifold::One => 1.0,
            Manifold::Two => std::f64::consts::SQRT_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One complex amplitude tagged with its vibronic level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelAmplitude {
    pub l: usize,
    pub value: C64,
}

/// Weak-field wavefunction in the well-dressed basis, indexed by `l`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DressedAmplitudes {
    pub d0g: Vec<C64>,
    pub d1p: Vec<C64>,
    pub d1m: Vec<C64>,
    pub d2p: Vec<C64>,
    pub d2m: Vec<C64>,
}

/// The same wavefunction in the bare basis `|g,0⟩, |g,1⟩, |e,0⟩, |g,2⟩, |e,1⟩`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BareAmplitudes {
    pub cg0: Vec<C64>,
    pub cg1: Vec<C64>,
    pub ce0: Vec<C64>,
    pub cg2: Vec<C64>,
    pub ce1: Vec<C64>,
}

fn check_lengths(arrays: [&[C64]; 5]) -> Result<usize> {
    let expected = arrays[0].len();
    for a in &arrays[1..] {
        if a.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: a.len(),
            });
        }
    }
    Ok(expected)
}

fn norm_sq(arrays: [&[C64]; 5]) -> f64 {
    arrays
        .iter()
        .flat_map(|a| a.iter())
        .map(|c| c.norm_sqr())
        .sum()
}

impl DressedAmplitudes {
    pub fn zeros(levels: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); levels];
        DressedAmplitudes {
            d0g: z.clone(),
            d1p: z.clone(),
            d1m: z.clone(),
            d2p: z.clone(),
            d2m: z,
        }
    }

    fn arrays(&self) -> [&[C64]; 5] {
        [&self.d0g, &self.d1p, &self.d1m, &self.d2p, &self.d2m]
    }

    pub fn levels(&self) -> Result<usize> {
        check_lengths(self.arrays())
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(self.arrays())
    }
}

impl BareAmplitudes {
    pub fn zeros(levels: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); levels];
        BareAmplitudes {
            cg0: z.clone(),
            cg1: z.clone(),
            ce0: z.clone(),
            cg2: z.clone(),
            ce1: z,
        }
    }

    fn arrays(&self) -> [&[C64]; 5] {
        [&self.cg0, &self.cg1, &self.ce0, &self.cg2, &self.ce1]
    }

    pub fn levels(&self) -> Result<usize> {
        check_lengths(self.arrays())
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(self.arrays())
    }

    pub fn scale(&mut self, factor: C64) {
        for a in [
            &mut self.cg0,
            &mut self.cg1,
            &mut self.ce0,
            &mut self.cg2,
            &mut self.ce1,
        ] {
            a.iter_mut().for_each(|c| *c *= factor);
        }
    }
}

fn to_dressed(e: C64, g: C64) -> (C64, C64) {
    ((e + g) * FRAC_1_SQRT_2, (e - g) * FRAC_1_SQRT_2)
}

fn to_bare(p: C64, m: C64) -> (C64, C64) {
    // returns (excited, ground)
    ((p + m) * FRAC_1_SQRT_2, (p - m) * FRAC_1_SQRT_2)
}

pub fn dressed_from_bare(c: &BareAmplitudes) -> Result<DressedAmplitudes> {
    let levels = c.levels()?;
    let mut d = DressedAmplitudes::zeros(levels);
    for l in 0..levels {
        d.d0g[l] = c.cg0[l];
        (d.d1p[l], d.d1m[l]) = to_dressed(c.ce0[l], c.cg1[l]);
        (d.d2p[l], d.d2m[l]) = to_dressed(c.ce1[l], c.cg2[l]);
    }
    Ok(d)
}

pub fn bare_from_dressed(d: &DressedAmplitudes) -> Result<BareAmplitudes> {
    let levels = d.levels()?;
    let mut c = BareAmplitudes::zeros(levels);
    for l in 0..levels {
        c.cg0[l] = d.d0g[l];
        (c.ce0[l], c.cg1[l]) = to_bare(d.d1p[l], d.d1m[l]);
        (c.ce1[l], c.cg2[l]) = to_bare(d.d2p[l], d.d2m[l]);
    }
    Ok(c)
}

impl TryFrom<&BareAmplitudes> for DressedAmplitudes {
    type Error = Error;
    fn try_from(c: &BareAmplitudes) -> Result<Self> {
        dressed_from_bare(c)
    }
}

impl TryFrom<&DressedAmplitudes> for BareAmplitudes {
    type Error = Error;
    fn try_from(d: &DressedAmplitudes) -> Result<Self> {
        bare_from_dressed(d)
    }
}
