//! Collapse of the steady state on a photon detection.
//!
//! A transmitted photon applies `a`, a fluorescent photon applies `σ-`. To
//! leading order in the drive the collapsed state keeps only the zero- and
//! one-excitation manifolds, and its norm is carried by the one-excitation
//! amplitudes of the steady state.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::BareAmplitudes;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Photon leaking through the output mirror (`a`).
    Transmission,
    /// Photon scattered by the atom out the side (`σ-`).
    Fluorescence,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Transmission => "transmission",
            Channel::Fluorescence => "fluorescence",
        })
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmission" | "tt" => Ok(Channel::Transmission),
            "fluorescence" | "ff" => Ok(Channel::Fluorescence),
            _ => Err(Error::InvalidConfig(format!("unknown channel {s:?}"))),
        }
    }
}

/// Normalized state right after a detection.
///
/// `bare` holds only `cg0`, `cg1` and `ce0`; the two-excitation arrays are
/// zero. Amplitudes are in the same drive units as the steady state they came
/// from, so `cg0` has unit norm and `cg1`, `ce0` are first order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedState {
    pub bare: BareAmplitudes,
    pub channel: Channel,
    /// Squared norm of the collapsed vector before normalization, to leading order.
    pub norm_sq_preclamp: f64,
}

impl ConditionedState {
    pub fn levels(&self) -> usize {
        self.bare.cg0.len()
    }

    pub fn collapse(ss: &BareAmplitudes, channel: Channel) -> Result<Self> {
        match channel {
            Channel::Transmission => collapse_transmission(ss),
            Channel::Fluorescence => collapse_fluorescence(ss),
        }
    }
}

fn normalize(
    ground: &[C64],
    one_g: impl Iterator<Item = C64>,
    one_e: impl Iterator<Item = C64>,
    channel: Channel,
    what: &'static str,
) -> Result<ConditionedState> {
    let levels = ground.len();
    let norm_sq: f64 = ground.iter().map(|c| c.norm_sqr()).sum();
    if !(norm_sq > 0.0) || !norm_sq.is_finite() {
        return Err(Error::Degenerate(what));
    }
    let inv = 1.0 / norm_sq.sqrt();
    let mut bare = BareAmplitudes::zeros(levels);
    bare.cg0 = ground.iter().map(|c| c * inv).collect();
    bare.cg1 = one_g.map(|c| c * inv).collect();
    bare.ce0 = one_e.map(|c| c * inv).collect();
    Ok(ConditionedState {
        bare,
        channel,
        norm_sq_preclamp: norm_sq,
    })
}

/// `a|ψ_ss⟩ / ‖a|ψ_ss⟩‖` to leading order.
pub fn collapse_transmission(ss: &BareAmplitudes) -> Result<ConditionedState> {
    ss.levels()?;
    normalize(
        &ss.cg1,
        ss.cg2.iter().map(|c| c * SQRT_2),
        ss.ce1.iter().copied(),
        Channel::Transmission,
        "steady state has no photon amplitude",
    )
}

/// `σ-|ψ_ss⟩ / ‖σ-|ψ_ss⟩‖` to leading order. Excited amplitudes are exactly zero.
pub fn collapse_fluorescence(ss: &BareAmplitudes) -> Result<ConditionedState> {
    let levels = ss.levels()?;
    normalize(
        &ss.ce0,
        ss.ce1.iter().copied(),
        std::iter::repeat_n(C64::new(0.0, 0.0), levels),
        Channel::Fluorescence,
        "steady state has no atomic excitation",
    )
}
