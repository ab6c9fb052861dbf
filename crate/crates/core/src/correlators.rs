//! Photon-photon and photon-field correlations for both detection channels.
//!
//! After a detection the conditioned one-excitation amplitudes are evolved in
//! closed form and compared with the steady state:
//!
//! ```text
//! g2_TT(τ) = Σ|C^c_{g,1,l}(τ)|² / Σ|C^ss_{g,1,l}|²
//! g2_FF(τ) = Σ|C^c_{e,0,l}(τ)|² / Σ|C^ss_{e,0,l}|²
//! h_TT(τ)  = Re[e^{iθ} Σ C^c*_{g,0,l} C^c_{g,1,l}(τ) / Σ C^ss*_{g,0,l} C^ss_{g,1,l}]
//! h_FF(τ)  = Re[e^{iθ} Σ C^c*_{g,0,l} C^c_{e,0,l}(τ) / Σ C^ss*_{g,0,l} C^ss_{e,0,l}]
//! ```
//!
//! The steady-state field `⟨a⟩` is real but the steady dipole `⟨σ-⟩` is purely
//! imaginary, so h is taken as the real part of the complex ratio; for the
//! transmitted channel this is the same as dividing by the real quadrature.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditioning::{Channel, ConditionedState};
use crate::propagator::{block_eigensystems, BlockEigenSystem};
use crate::steady_state::ANALYTIC_DRIVE;
use crate::{Error, MotionalState, Result, StateSpec, SteadyState, SystemParams, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "g2tt")]
    G2Tt,
    #[serde(rename = "g2ff")]
    G2Ff,
    #[serde(rename = "htt")]
    HTt,
    #[serde(rename = "hff")]
    HFf,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::G2Tt, Kind::G2Ff, Kind::HTt, Kind::HFf];

    pub fn channel(self) -> Channel {
        match self {
            Kind::G2Tt | Kind::HTt => Channel::Transmission,
            Kind::G2Ff | Kind::HFf => Channel::Fluorescence,
        }
    }

    pub fn is_h(self) -> bool {
        matches!(self, Kind::HTt | Kind::HFf)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::G2Tt => "g2tt",
            Kind::G2Ff => "g2ff",
            Kind::HTt => "htt",
            Kind::HFf => "hff",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!("unknown correlator kind {s:?} (g2tt | g2ff | htt | hff)"))
            })
    }
}

/// Delay grid: ascending, strictly increasing, starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TauGrid {
    taus: Vec<f64>,
}

impl TauGrid {
    pub const DEFAULT_POINTS: usize = 1000;
    pub const DEFAULT_TAU_MAX: f64 = 10.0;

    /// `points` evenly spaced delays on `[0, tau_max]`.
    pub fn uniform(points: usize, tau_max: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
        }
        if !(tau_max > 0.0) || !tau_max.is_finite() {
            return Err(Error::InvalidGrid(format!("tau_max must be positive, got {tau_max}")));
        }
        let step = tau_max / (points - 1) as f64;
        let mut taus: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
        taus[points - 1] = tau_max;
        Ok(TauGrid { taus })
    }

    pub fn new(taus: Vec<f64>) -> Result<Self> {
        match taus.first() {
            None => return Err(Error::InvalidGrid("empty".into())),
            Some(&t) if t != 0.0 => {
                return Err(Error::InvalidGrid(format!("first delay must be 0, got {t}")))
            }
            _ => {}
        }
        if taus.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite delay".into()));
        }
        if let Some(w) = taus.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "delays not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(TauGrid { taus })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn tau_max(&self) -> f64 {
        *self.taus.last().expect("grid is never empty")
    }
}

impl Default for TauGrid {
    fn default() -> Self {
        TauGrid::uniform(Self::DEFAULT_POINTS, Self::DEFAULT_TAU_MAX).expect("default grid is valid")
    }
}

impl TryFrom<Vec<f64>> for TauGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        TauGrid::new(v)
    }
}

impl From<TauGrid> for Vec<f64> {
    fn from(g: TauGrid) -> Self {
        g.taus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: Kind,
    /// Local-oscillator phase for h kinds.
    pub theta: Option<f64>,
    pub params: SystemParams,
    pub state: StateSpec,
}

impl CorrelationSeries {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if self.values.len() != self.taus.len() {
            return Err(Error::LengthMismatch {
                expected: self.taus.len(),
                got: self.values.len(),
            });
        }
        TauGrid::new(self.taus.clone())?;
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite correlation value".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatorOptions {
    /// Drive the conditioned evolution from the pre-detection motional
    /// amplitudes instead of the collapsed ones.
    pub precollapse_ground: bool,
}

/// Conditioned one-excitation amplitudes at one delay, in the bare basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedAmplitudes {
    pub cg1: Vec<C64>,
    pub ce0: Vec<C64>,
}

/// Steady state and block spectra for one `(params, state)` pair, reused for
/// every delay and every correlator.
#[derive(Debug, Clone)]
pub struct Correlator {
    params: SystemParams,
    state: MotionalState,
    steady: SteadyState,
    eig: Vec<BlockEigenSystem>,
    options: CorrelatorOptions,
}

struct Prepared {
    cond: ConditionedState,
    source: Vec<C64>,
    d1p0: Vec<C64>,
    d1m0: Vec<C64>,
}

impl Correlator {
    pub fn new(params: &SystemParams, state: &MotionalState) -> Result<Self> {
        Self::with_options(params, state, CorrelatorOptions::default())
    }

    pub fn with_options(
        params: &SystemParams,
        state: &MotionalState,
        options: CorrelatorOptions,
    ) -> Result<Self> {
        let params = params.validate()?;
        let steady = SteadyState::solve(&params, state)?;
        Ok(Correlator {
            params,
            state: state.clone(),
            steady,
            eig: block_eigensystems(&params),
            options,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn state(&self) -> &MotionalState {
        &self.state
    }

    pub fn steady(&self) -> &SteadyState {
        &self.steady
    }

    pub fn options(&self) -> CorrelatorOptions {
        self.options
    }

    pub fn conditioned(&self, channel: Channel) -> Result<ConditionedState> {
        ConditionedState::collapse(&self.steady.bare(), channel)
    }

    fn prepare(&self, channel: Channel) -> Result<Prepared> {
        let cond = self.conditioned(channel)?;
        let source = if self.options.precollapse_ground {
            // Pre-detection distribution carried with the collapse's global phase.
            let overlap: C64 = self
                .state
                .amps()
                .iter()
                .zip(&cond.bare.cg0)
                .map(|(a, b)| a.conj() * b)
                .sum();
            let phase = if overlap.norm() > 0.0 {
                overlap / overlap.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            self.state.amps().iter().map(|a| a * phase).collect()
        } else {
            cond.bare.cg0.clone()
        };
        let (d1p0, d1m0) = cond
            .bare
            .ce0
            .iter()
            .zip(&cond.bare.cg1)
            .map(|(&e, &g)| ((e + g) * FRAC_1_SQRT_2, (e - g) * FRAC_1_SQRT_2))
            .unzip();
        Ok(Prepared {
            cond,
            source,
            d1p0,
            d1m0,
        })
    }

    fn amplitudes(&self, prep: &Prepared, tau: f64) -> ConditionedAmplitudes {
        let a_scale = ANALYTIC_DRIVE * FRAC_1_SQRT_2;
        let (cg1, ce0) = self
            .eig
            .iter()
            .enumerate()
            .map(|(l, b)| {
                let [p, m] = b.evolve([prep.d1p0[l], prep.d1m0[l]], prep.source[l] * a_scale, tau);
                ((p - m) * FRAC_1_SQRT_2, (p + m) * FRAC_1_SQRT_2)
            })
            .unzip();
        ConditionedAmplitudes { cg1, ce0 }
    }

    /// Conditioned amplitudes after a `channel` detection, evolved by `tau`.
    pub fn conditioned_at(&self, channel: Channel, tau: f64) -> Result<ConditionedAmplitudes> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidGrid(format!("negative or non-finite tau {tau}")));
        }
        let prep = self.prepare(channel)?;
        Ok(self.amplitudes(&prep, tau))
    }

    /// Zero-excitation amplitudes multiplying the conditioned one-excitation
    /// ones in the field expectation.
    fn field_reference<'a>(&'a self, prep: &'a Prepared) -> &'a [C64] {
        if self.options.precollapse_ground {
            &prep.source
        } else {
            &prep.cond.bare.cg0
        }
    }

    pub fn series(&self, kind: Kind, theta: f64, grid: &TauGrid) -> Result<CorrelationSeries> {
        let prep = self.prepare(kind.channel())?;
        let ss = self.steady.bare();
        let ss_one = match kind.channel() {
            Channel::Transmission => &ss.cg1,
            Channel::Fluorescence => &ss.ce0,
        };
        let pick = |a: ConditionedAmplitudes| match kind.channel() {
            Channel::Transmission => a.cg1,
            Channel::Fluorescence => a.ce0,
        };
        let values: Vec<f64> = if kind.is_h() {
            let den: C64 = ss.cg0.iter().zip(ss_one).map(|(z, o)| z.conj() * o).sum();
            if den.norm() == 0.0 || !den.re.is_finite() {
                return Err(Error::Degenerate("vanishing steady-state field quadrature"));
            }
            let phase = C64::from_polar(1.0, theta) / den;
            let reference = self.field_reference(&prep);
            grid.taus()
                .par_iter()
                .map(|&tau| {
                    let one = pick(self.amplitudes(&prep, tau));
                    let num: C64 = reference.iter().zip(&one).map(|(z, o)| z.conj() * o).sum();
                    (phase * num).re
                })
                .collect()
        } else {
            let den: f64 = ss_one.iter().map(|c| c.norm_sqr()).sum();
            if !(den > 0.0) {
                return Err(Error::Degenerate("steady state has no emission in this channel"));
            }
            grid.taus()
                .par_iter()
                .map(|&tau| {
                    let one = pick(self.amplitudes(&prep, tau));
                    one.iter().map(|c| c.norm_sqr()).sum::<f64>() / den
                })
                .collect()
        };
        let series = CorrelationSeries {
            taus: grid.taus().to_vec(),
            values,
            kind,
            theta: kind.is_h().then_some(theta),
            params: self.params,
            state: self.state.descriptor().clone(),
        };
        series.validate()?;
        Ok(series)
    }
}

pub fn g2_tt(p: &SystemParams, state: &MotionalState, grid: &TauGrid) -> Result<CorrelationSeries> {
    Correlator::new(p, state)?.series(Kind::G2Tt, 0.0, grid)
}

pub fn g2_ff(p: &SystemParams, state: &MotionalState, grid: &TauGrid) -> Result<CorrelationSeries> {
    Correlator::new(p, state)?.series(Kind::G2Ff, 0.0, grid)
}

pub fn h_tt(
    p: &SystemParams,
    state: &MotionalState,
    theta: f64,
    grid: &TauGrid,
) -> Result<CorrelationSeries> {
    Correlator::new(p, state)?.series(Kind::HTt, theta, grid)
}

pub fn h_ff(
    p: &SystemParams,
    state: &MotionalState,
    theta: f64,
    grid: &TauGrid,
) -> Result<CorrelationSeries> {
    Correlator::new(p, state)?.series(Kind::HFf, theta, grid)
}

/// Decay required of `h - 1` at the end of the series before transforming.
pub const SPECTRUM_DECAY_LIMIT: f64 = 1e-4;

/// `S(ω) = ∫ cos(ωτ) [h(τ) - 1] dτ` by the trapezoid rule over the series grid.
pub fn squeezing_spectrum(series: &CorrelationSeries, omegas: &[f64]) -> Result<Vec<f64>> {
    if !series.kind.is_h() {
        return Err(Error::WrongKind {
            expected: "htt or hff",
            found: series.kind.to_string(),
        });
    }
    series.validate()?;
    let residual = (series.values[series.len() - 1] - 1.0).abs();
    if !(residual < SPECTRUM_DECAY_LIMIT) {
        return Err(Error::InsufficientDecay {
            residual,
            limit: SPECTRUM_DECAY_LIMIT,
        });
    }
    Ok(omegas
        .par_iter()
        .map(|&w| {
            let f = |i: usize| (w * series.taus[i]).cos() * (series.values[i] - 1.0);
            (1..series.len())
                .map(|i| 0.5 * (series.taus[i] - series.taus[i - 1]) * (f(i) + f(i - 1)))
                .sum()
        })
        .collect())
}
