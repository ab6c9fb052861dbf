//! Initial motional distributions `C_{g,0,l}` of the zero-excitation manifold.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::basis::LevelAmplitude;
use crate::{Error, Result, C64};

/// Textual description of a motional state, replayable through [`FromStr`].
///
/// Grammar: `ground | mix:<l1>,<l2>,... | list:<c0>,<c1>,... |
/// gaussian:<sigma_ratio> | boltzmann:<beta_tilde>,<n> | equal:<n>`.
/// List entries are real (`0.5`) or complex (`0.3-0.4i`, `2i`).
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Ground,
    Mix(Vec<usize>),
    List(Vec<C64>),
    Gaussian { sigma_ratio: f64 },
    Boltzmann { beta_tilde: f64, n_levels: usize },
    Equal { n_states: usize },
}

pub const STATE_GRAMMAR: &str = "ground | mix:<l1>,<l2>,... | list:<c0>,<c1>,... | \
gaussian:<sigma_ratio> | boltzmann:<beta_tilde>,<n> | equal:<n>";

impl StateSpec {
    pub fn build(&self, l_max: usize) -> Result<MotionalState> {
        match self {
            StateSpec::Ground => Ok(ground_state(l_max)),
            StateSpec::Mix(levels) => superposition(levels, l_max),
            StateSpec::List(amps) => from_amplitudes(amps, l_max),
            StateSpec::Gaussian { sigma_ratio } => gaussian_state(*sigma_ratio, l_max),
            StateSpec::Boltzmann {
                beta_tilde,
                n_levels,
            } => pseudo_boltzmann(*beta_tilde, *n_levels, l_max),
            StateSpec::Equal { n_states } => equal_population(*n_states, l_max),
        }
    }

    /// Smallest truncation that can hold this state exactly, if there is one.
    pub fn min_l_max(&self) -> Option<usize> {
        match self {
            StateSpec::Ground => Some(0),
            StateSpec::Mix(levels) => levels.iter().max().copied(),
            StateSpec::List(amps) => Some(amps.len().saturating_sub(1)),
            StateSpec::Gaussian { .. } => None,
            StateSpec::Boltzmann { n_levels, .. } => Some(n_levels.saturating_sub(1)),
            StateSpec::Equal { n_states } => Some(n_states.saturating_sub(1)),
        }
    }
}

fn fmt_complex(c: &C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let s = s.trim();
    let bad = || format!("bad amplitude '{s}'");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T>(items: &[T], each: impl Fn(&T) -> String) -> String {
            items.iter().map(each).collect::<Vec<_>>().join(",")
        }
        match self {
            StateSpec::Ground => write!(f, "ground"),
            StateSpec::Mix(levels) => write!(f, "mix:{}", join(levels, |l| l.to_string())),
            StateSpec::List(amps) => write!(f, "list:{}", join(amps, fmt_complex)),
            StateSpec::Gaussian { sigma_ratio } => write!(f, "gaussian:{sigma_ratio}"),
            StateSpec::Boltzmann {
                beta_tilde,
                n_levels,
            } => write!(f, "boltzmann:{beta_tilde},{n_levels}"),
            StateSpec::Equal { n_states } => write!(f, "equal:{n_states}"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |why: String| Error::InvalidState(format!("{why}; expected {STATE_GRAMMAR}"));
        let s = s.trim();
        if s == "ground" {
            return Ok(StateSpec::Ground);
        }
        let Some((head, args)) = s.split_once(':') else {
            return Err(err(format!("unrecognised state '{s}'")));
        };
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let uint = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| err(format!("'{p}' is not a nonnegative integer")))
        };
        let real = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| err(format!("'{p}' is not a number")))
        };
        let arity = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(err(format!("'{head}' takes {n} argument(s)")))
            }
        };
        match head {
            "mix" => Ok(StateSpec::Mix(
                parts.iter().map(|p| uint(p)).collect::<Result<_>>()?,
            )),
            "list" => Ok(StateSpec::List(
                parts
                    .iter()
                    .map(|p| parse_complex(p).map_err(err))
                    .collect::<Result<_>>()?,
            )),
            "gaussian" => {
                arity(1)?;
                Ok(StateSpec::Gaussian {
                    sigma_ratio: real(parts[0])?,
                })
            }
            "boltzmann" => {
                arity(2)?;
                Ok(StateSpec::Boltzmann {
                    beta_tilde: real(parts[0])?,
                    n_levels: uint(parts[1])?,
                })
            }
            "equal" => {
                arity(1)?;
                Ok(StateSpec::Equal {
                    n_states: uint(parts[0])?,
                })
            }
            other => Err(err(format!("unrecognised state kind '{other}'"))),
        }
    }
}

impl Serialize for StateSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Unit-norm amplitudes over vibronic levels `0..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionalState {
    amps: Vec<C64>,
    descriptor: StateSpec,
}

impl MotionalState {
    fn normalized(mut amps: Vec<C64>, descriptor: StateSpec) -> Result<Self> {
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(format!(
                "'{descriptor}' has zero or non-finite norm"
            )));
        }
        amps.iter_mut().for_each(|c| *c /= norm);
        Ok(MotionalState { amps, descriptor })
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn descriptor(&self) -> &StateSpec {
        &self.descriptor
    }

    pub fn l_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn levels(&self) -> usize {
        self.amps.len()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn level_amplitudes(&self) -> impl Iterator<Item = LevelAmplitude> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(|(l, &value)| LevelAmplitude { l, value })
    }

    /// Same distribution with every amplitude multiplied by `factor` (then renormalized).
    pub fn scaled(&self, factor: C64) -> Result<Self> {
        MotionalState::normalized(
            self.amps.iter().map(|c| c * factor).collect(),
            self.descriptor.clone(),
        )
    }
}

pub fn ground_state(l_max: usize) -> MotionalState {
    let mut amps = vec![C64::new(0.0, 0.0); l_max + 1];
    amps[0] = C64::new(1.0, 0.0);
    MotionalState {
        amps,
        descriptor: StateSpec::Ground,
    }
}

/// Zero-pads `list` to `l_max + 1` levels and renormalizes, keeping phases.
pub fn from_amplitudes(list: &[C64], l_max: usize) -> Result<MotionalState> {
    if list.is_empty() || list.len() > l_max + 1 {
        return Err(Error::InvalidState(format!(
            "{} amplitudes do not fit levels 0..={l_max}",
            list.len()
        )));
    }
    if list.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::InvalidState("all-zero amplitude list".into()));
    }
    let mut amps = list.to_vec();
    amps.resize(l_max + 1, C64::new(0.0, 0.0));
    MotionalState::normalized(amps, StateSpec::List(list.to_vec()))
}

/// Equal-weight superposition of the listed levels, e.g. `(|0⟩ + |5⟩)/√2`.
pub fn superposition(levels: &[usize], l_max: usize) -> Result<MotionalState> {
    if levels.is_empty() {
        return Err(Error::InvalidState("empty level list".into()));
    }
    let mut amps = vec![C64::new(0.0, 0.0); l_max + 1];
    for &l in levels {
        if l > l_max {
            return Err(Error::LevelOutOfRange { l, l_max });
        }
        if amps[l].re != 0.0 {
            return Err(Error::InvalidState(format!("level {l} listed twice")));
        }
        amps[l] = C64::new(1.0, 0.0);
    }
    MotionalState::normalized(amps, StateSpec::Mix(levels.to_vec()))
}

pub fn equal_population(n_states: usize, l_max: usize) -> Result<MotionalState> {
    if n_states == 0 || n_states > l_max + 1 {
        return Err(Error::InvalidState(format!(
            "equal population over {n_states} states needs 1 <= n <= {}",
            l_max + 1
        )));
    }
    let amps = (0..=l_max)
        .map(|l| C64::new(if l < n_states { 1.0 } else { 0.0 }, 0.0))
        .collect();
    MotionalState::normalized(amps, StateSpec::Equal { n_states })
}

/// Pure state with populations `∝ exp(-beta_tilde · l)` over the first
/// `n_levels` levels and real positive amplitudes, i.e. all coherences kept.
pub fn pseudo_boltzmann(beta_tilde: f64, n_levels: usize, l_max: usize) -> Result<MotionalState> {
    if beta_tilde.is_nan() || beta_tilde <= 0.0 {
        return Err(Error::InvalidState(format!(
            "beta_tilde must be positive, got {beta_tilde}"
        )));
    }
    if n_levels == 0 || n_levels > l_max + 1 {
        return Err(Error::InvalidState(format!(
            "pseudo-Boltzmann over {n_levels} levels needs 1 <= n <= {}",
            l_max + 1
        )));
    }
    let amps = (0..=l_max)
        .map(|l| {
            let w = match l {
                0 => 1.0,
                _ if l < n_levels => (-0.5 * beta_tilde * l as f64).exp(),
                _ => 0.0,
            };
            C64::new(w, 0.0)
        })
        .collect();
    MotionalState::normalized(
        amps,
        StateSpec::Boltzmann {
            beta_tilde,
            n_levels,
        },
    )
}

/// Overlaps of a centred Gaussian of width `sigma_ratio · sigma_0` with the
/// oscillator eigenfunctions, before renormalization over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianOverlaps {
    pub amps: Vec<f64>,
    /// Fraction of the Gaussian's norm inside levels `0..=l_max`.
    pub captured: f64,
    /// Quadrature nodes on the half line at convergence.
    pub nodes: usize,
}

const OVERLAP_TOL: f64 = 1e-10;
const MAX_NODES: usize = 1 << 22;

/// Trapezoidal quadrature on `[0, half_width]` of `ψ_r(y) φ_l(y)` for even `l`,
/// doubled by parity. Uniform-node trapezoid converges geometrically for
/// these entire, Gaussian-decaying integrands.
fn overlap_quadrature(ratio: f64, l_max: usize, half_width: f64, nodes: usize) -> Vec<f64> {
    let h = half_width / (nodes - 1) as f64;
    let log_norm = -0.25 * (std::f64::consts::PI * ratio * ratio).ln()
        - 0.25 * std::f64::consts::PI.ln();
    let inv_r2 = 1.0 / (ratio * ratio);
    let mut out = vec![0.0; l_max + 1];
    let mut phi = vec![0.0; l_max + 1];
    const RESCALE: f64 = 1e150;
    for k in 0..nodes {
        let y = k as f64 * h;
        let weight = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
        // φ_l(y) = v_l · exp(log_scale - y²/2); v follows the normalized recurrence
        let mut log_w = log_norm - 0.5 * y * y * (1.0 + inv_r2);
        phi[0] = 1.0;
        if l_max >= 1 {
            phi[1] = std::f64::consts::SQRT_2 * y;
        }
        for n in 1..l_max {
            let nf = n as f64;
            phi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * phi[n] - (nf / (nf + 1.0)).sqrt() * phi[n - 1];
            if phi[n + 1].abs() > RESCALE {
                for v in &mut phi[..=n + 1] {
                    *v /= RESCALE;
                }
                log_w += RESCALE.ln();
            }
        }
        // entries rescaled together share one scale factor
        let scale = weight * log_w.exp();
        if scale == 0.0 {
            continue;
        }
        for l in (0..=l_max).step_by(2) {
            out[l] += scale * phi[l];
        }
    }
    for l in (0..=l_max).step_by(2) {
        out[l] *= 2.0 * h;
    }
    out
}

pub fn gaussian_overlaps(sigma_ratio: f64, l_max: usize) -> Result<GaussianOverlaps> {
    if !(sigma_ratio > 0.0 && sigma_ratio.is_finite()) {
        return Err(Error::InvalidState(format!(
            "sigma ratio must be positive, got {sigma_ratio}"
        )));
    }
    // both factors are below 1e-20 of their peak beyond these radii
    let half_width = (10.0 * sigma_ratio).min((2.0 * l_max as f64 + 1.0).sqrt() + 10.0);
    let mut nodes = (8 * l_max).max(64) + 1;
    let mut amps = overlap_quadrature(sigma_ratio, l_max, half_width, nodes);
    loop {
        let next_nodes = 2 * nodes - 1;
        let next = overlap_quadrature(sigma_ratio, l_max, half_width, next_nodes);
        let change = amps
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        amps = next;
        nodes = next_nodes;
        if change < OVERLAP_TOL {
            break;
        }
        if nodes > MAX_NODES {
            log::warn!("gaussian overlap quadrature stopped at {nodes} nodes, last change {change:e}");
            break;
        }
    }
    let captured = amps.iter().map(|a| a * a).sum();
    Ok(GaussianOverlaps {
        amps,
        captured,
        nodes,
    })
}

/// Gaussian centre-of-mass wavefunction of relative width `sigma_ratio`
/// projected onto levels `0..=l_max` and renormalized. Odd levels vanish by parity.
pub fn gaussian_state(sigma_ratio: f64, l_max: usize) -> Result<MotionalState> {
    let overlaps = gaussian_overlaps(sigma_ratio, l_max)?;
    if overlaps.captured < 0.999 {
        log::warn!(
            "gaussian:{sigma_ratio} keeps only {:.4}% of its norm in levels 0..={l_max}",
            100.0 * overlaps.captured
        );
    }
    MotionalState::normalized(
        overlaps.amps.iter().map(|&a| C64::new(a, 0.0)).collect(),
        StateSpec::Gaussian { sigma_ratio },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_unit(s: &MotionalState) {
        assert!((s.norm_sq() - 1.0).abs() < 1e-12, "norm {}", s.norm_sq());
    }

    #[test]
    fn ground() {
        assert_eq!(ground_state(0).amps(), &[C64::new(1.0, 0.0)]);
        let s = ground_state(5);
        assert_eq!(s.levels(), 6);
        assert_eq!(s.amps()[0], C64::new(1.0, 0.0));
        assert!(s.amps()[1..].iter().all(|c| c.norm() == 0.0));
        assert_unit(&s);
    }

    #[test]
    fn explicit_amplitudes() {
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let s = from_amplitudes(&[one, z, z, z, z, one], 19).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amps()[0].re - h).abs() < 1e-15);
        assert!((s.amps()[5].re - h).abs() < 1e-15);
        assert_eq!(s.levels(), 20);
        assert_unit(&s);

        let s = from_amplitudes(&[C64::new(2.0, 0.0), z], 1).unwrap();
        assert_eq!(s.amps(), &[one, z]);

        assert!(from_amplitudes(&[z, z], 1).is_err());
        assert!(from_amplitudes(&[one, one, one], 1).is_err());

        let s = from_amplitudes(&[C64::new(0.0, 3.0), C64::new(4.0, 0.0)], 1).unwrap();
        assert!((s.amps()[0] - C64::new(0.0, 0.6)).norm() < 1e-15);
    }

    #[test]
    fn mix_matches_explicit_list() {
        let a = superposition(&[0, 5], 19).unwrap();
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let b = from_amplitudes(&[one, z, z, z, z, one], 19).unwrap();
        assert_eq!(a.amps(), b.amps());
        assert!(superposition(&[0, 25], 19).is_err());
        assert!(superposition(&[3, 3], 19).is_err());
    }

    #[test]
    fn equal() {
        let s = equal_population(20, 19).unwrap();
        let a = 1.0 / 20f64.sqrt();
        assert!(s.amps().iter().all(|c| (c.re - a).abs() < 1e-15 && c.im == 0.0));
        assert_unit(&s);
        assert_eq!(equal_population(1, 7).unwrap().amps(), ground_state(7).amps());
        assert!(equal_population(0, 3).is_err());
        assert!(equal_population(5, 3).is_err());
    }

    #[test]
    fn boltzmann() {
        let s = pseudo_boltzmann(f64::INFINITY, 20, 19).unwrap();
        assert_eq!(s.amps(), ground_state(19).amps());

        let s = pseudo_boltzmann(2f64.ln(), 3, 5).unwrap();
        let p = s.populations();
        let z = 1.0 + 0.5 + 0.25;
        for (l, want) in [1.0 / z, 0.5 / z, 0.25 / z, 0.0, 0.0, 0.0].iter().enumerate() {
            assert!((p[l] - want).abs() < 1e-15, "l={l}");
        }

        let p = pseudo_boltzmann(2.0, 20, 19).unwrap().populations();
        assert!(p.windows(2).all(|w| w[0] > w[1]));

        assert!(pseudo_boltzmann(0.0, 3, 5).is_err());
        assert!(pseudo_boltzmann(1.0, 7, 5).is_err());
    }

    #[test]
    fn matched_gaussian_is_ground() {
        let s = gaussian_state(1.0, 12).unwrap();
        assert!((s.amps()[0].re - 1.0).abs() < 1e-10);
        assert!(s.amps()[1..].iter().all(|c| c.norm() < 1e-10));
    }

    #[test]
    fn gaussian_parity_and_errors() {
        for r in [0.3, 0.9, 2.0, 4.5] {
            let s = gaussian_state(r, 15).unwrap();
            assert!(s.amps().iter().skip(1).step_by(2).all(|c| *c == C64::new(0.0, 0.0)));
            assert_unit(&s);
        }
        assert!(gaussian_state(0.0, 4).is_err());
        assert!(gaussian_state(-1.0, 4).is_err());
    }

    /// Composite Simpson on [-L, L] with the textbook three-term Hermite
    /// recurrence, at ten times the node count the implementation used.
    fn simpson_overlaps(ratio: f64, l_max: usize, nodes: usize) -> Vec<f64> {
        let half = (10.0 * ratio).min((2.0 * l_max as f64 + 1.0).sqrt() + 10.0);
        let n = if nodes.is_multiple_of(2) { nodes } else { nodes + 1 };
        let h = 2.0 * half / n as f64;
        let mut out = vec![0.0; l_max + 1];
        for k in 0..=n {
            let y = -half + k as f64 * h;
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let psi = (std::f64::consts::PI * ratio * ratio).powf(-0.25)
                * (-y * y / (2.0 * ratio * ratio)).exp();
            let mut prev = 0.0;
            let mut cur = std::f64::consts::PI.powf(-0.25) * (-y * y / 2.0).exp();
            for (l, o) in out.iter_mut().enumerate() {
                *o += w * psi * cur;
                let next = (2.0 / (l as f64 + 1.0)).sqrt() * y * cur
                    - (l as f64 / (l as f64 + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
            }
        }
        out.iter().map(|o| o * h / 3.0).collect()
    }

    #[test]
    fn gaussian_matches_fine_grid_oracle() {
        let got = gaussian_overlaps(2.0, 10).unwrap();
        let oracle = simpson_overlaps(2.0, 10, 10 * 2 * got.nodes);
        for (l, (a, b)) in got.amps.iter().zip(&oracle).enumerate() {
            assert!((a - b).abs() < 1e-9, "l={l}: {a} vs {b}");
        }
        // closed form for the even coefficients: sqrt(2r/(1+r²)) sqrt((2k)!)/(2^k k!) q^k
        let r: f64 = 2.0;
        let q = (r * r - 1.0) / (r * r + 1.0);
        let mut c = (2.0 * r / (1.0 + r * r)).sqrt();
        for k in 0..=5 {
            assert!((got.amps[2 * k] - c).abs() < 1e-10, "k={k}");
            let kf = k as f64;
            c *= q * ((2.0 * kf + 1.0) * (2.0 * kf + 2.0)).sqrt() / (2.0 * (kf + 1.0));
        }
    }

    #[test]
    fn gaussian_high_levels_stay_finite() {
        let o = gaussian_overlaps(0.15, 400).unwrap();
        assert!(o.amps.iter().all(|a| a.is_finite()));
        assert!((o.captured - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grammar_round_trip() {
        for text in [
            "ground",
            "mix:0,5",
            "list:1,0,0.5-0.25i,2i",
            "gaussian:2",
            "boltzmann:2,20",
            "equal:20",
        ] {
            let spec: StateSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!(
            "mix:0,5".parse::<StateSpec>().unwrap(),
            StateSpec::Mix(vec![0, 5])
        );
        let err = "bogus".parse::<StateSpec>().unwrap_err().to_string();
        assert!(err.contains("ground | mix:"));
        assert!("equal:x".parse::<StateSpec>().is_err());
        assert!("boltzmann:2".parse::<StateSpec>().is_err());
        assert!("list:1,abc".parse::<StateSpec>().is_err());
    }

    proptest! {
        #[test]
        fn gaussian_continuity(r in 0.3..3.0f64) {
            let a = gaussian_state(r, 20).unwrap();
            let b = gaussian_state(r * (1.0 + 1e-6), 20).unwrap();
            for (x, y) in a.amps().iter().zip(b.amps()) {
                prop_assert!((x - y).norm() < 1e-4);
            }
        }

        #[test]
        fn near_matched_gaussian_leaks_quadratically(eps in 1e-3..3e-2f64) {
            let s = gaussian_state(1.0 + eps, 20).unwrap();
            let outside = 1.0 - s.populations()[0];
            prop_assert!(outside < eps * eps, "{outside} vs eps² {}", eps * eps);
        }

        #[test]
        fn constructors_are_unit_norm(n in 1usize..20, beta in 0.05..5.0f64) {
            assert_unit(&equal_population(n, 19).unwrap());
            assert_unit(&pseudo_boltzmann(beta, n, 19).unwrap());
            let p = pseudo_boltzmann(beta, n, 19).unwrap().populations();
            prop_assert!(p[..n].windows(2).all(|w| w[0] > w[1]));
        }
    }
}
