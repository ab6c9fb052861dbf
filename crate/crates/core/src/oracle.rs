//! Brute-force reference: fixed-step RK4 on the bare-basis amplitude equations
//! at finite drive.
//!
//! Per vibronic level the truncated state is `(C_{g,0}, C_{g,1}, C_{e,0},
//! C_{g,2}, C_{e,1})` evolving under `dC/dt = -i H C` with
//!
//! ```text
//! H = g_l (a† σ- + a σ+) + i Y (a - a†) - i κ a†a - i (γ/2) σ+σ-
//! ```
//!
//! where the Jaynes-Cummings coupling of the `n`-excitation manifold is the
//! `+` vibronic detuning of that manifold. Nothing here calls the closed-form
//! solvers; the only shared code is parameter handling and the amplitude
//! containers. Detections are applied as operators on the full truncated
//! state and expectation values are normalized by the state norm.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BareAmplitudes, Manifold, Sign, MAX_WEAK_DRIVE};
use crate::{
    Channel, CorrelationSeries, Error, Kind, MotionalState, Result, SystemParams, TauGrid, C64,
};

/// Upper limit on `dt` times the Gershgorin bound of the generator.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Relative change of the amplitude ratios per unit time that counts as steady.
pub const CONVERGENCE_RATE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    /// Step, in `1/gamma`.
    pub dt: f64,
    /// Longest time spent looking for the steady state.
    pub t_end: f64,
    /// Finite drive amplitude.
    pub y_drive: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            dt: 1e-3,
            t_end: 200.0,
            y_drive: 1e-3,
        }
    }
}

impl IntegrationConfig {
    pub fn with_y_drive(self, y_drive: f64) -> Self {
        IntegrationConfig { y_drive, ..self }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        IntegrationConfig { dt, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.y_drive >= 0.0) || !self.y_drive.is_finite() {
            return Err(Error::InvalidConfig(format!("drive must be non-negative, got {}", self.y_drive)));
        }
        if self.y_drive > MAX_WEAK_DRIVE {
            return Err(Error::DriveTooLarge {
                value: self.y_drive,
                limit: MAX_WEAK_DRIVE,
            });
        }
        Ok(())
    }
}

/// `[cg0, cg1, ce0, cg2, ce1]` for one level.
type Level = [C64; 5];
const CG0: usize = 0;
const CG1: usize = 1;
const CE0: usize = 2;
const CG2: usize = 3;
const CE1: usize = 4;

#[derive(Debug, Clone, Copy)]
struct LevelGenerator {
    c1: f64,
    c2: f64,
    kappa: f64,
    half_gamma: f64,
    y: f64,
}

impl LevelGenerator {
    fn new(p: &SystemParams, l: usize, y: f64) -> Self {
        LevelGenerator {
            c1: p.detuning(Manifold::One, l, Sign::Plus),
            c2: p.detuning(Manifold::Two, l, Sign::Plus),
            kappa: p.kappa,
            half_gamma: p.gamma / 2.0,
            y,
        }
    }

    fn apply(&self, c: &Level) -> Level {
        let i = C64::new(0.0, 1.0);
        let y = self.y;
        [
            y * c[CG1],
            -self.kappa * c[CG1] - i * self.c1 * c[CE0] - y * c[CG0] + SQRT_2 * y * c[CG2],
            -self.half_gamma * c[CE0] - i * self.c1 * c[CG1] + y * c[CE1],
            -2.0 * self.kappa * c[CG2] - i * self.c2 * c[CE1] - SQRT_2 * y * c[CG1],
            -(self.kappa + self.half_gamma) * c[CE1] - i * self.c2 * c[CG2] - y * c[CE0],
        ]
    }

    /// Largest absolute row sum of the generator.
    fn gershgorin(&self) -> f64 {
        let y = self.y;
        [
            y,
            self.kappa + self.c1.abs() + y + SQRT_2 * y,
            self.half_gamma + self.c1.abs() + y,
            2.0 * self.kappa + self.c2.abs() + SQRT_2 * y,
            self.kappa + self.half_gamma + self.c2.abs() + y,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn rk4(&self, c: &mut Level, h: f64) {
        let axpy = |a: &Level, k: &Level, s: f64| -> Level {
            let mut out = *a;
            out.iter_mut().zip(k).for_each(|(o, k)| *o += k * s);
            out
        };
        let k1 = self.apply(c);
        let k2 = self.apply(&axpy(c, &k1, h / 2.0));
        let k3 = self.apply(&axpy(c, &k2, h / 2.0));
        let k4 = self.apply(&axpy(c, &k3, h));
        for j in 0..5 {
            c[j] += (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]) * (h / 6.0);
        }
    }
}

/// `dt` times the Gershgorin bound, which must stay below [`STABILITY_LIMIT`].
pub fn stability_product(p: &SystemParams, cfg: &IntegrationConfig) -> f64 {
    (0..p.levels())
        .map(|l| LevelGenerator::new(p, l, cfg.y_drive).gershgorin())
        .fold(0.0, f64::max)
        * cfg.dt
}

struct Integrator {
    gens: Vec<LevelGenerator>,
    dt: f64,
}

impl Integrator {
    fn new(p: &SystemParams, cfg: &IntegrationConfig) -> Result<Self> {
        let p = p.validate_params()?;
        cfg.validate()?;
        let product = stability_product(&p, cfg);
        if !(product < STABILITY_LIMIT) {
            return Err(Error::StabilityGuard {
                product,
                limit: STABILITY_LIMIT,
            });
        }
        Ok(Integrator {
            gens: (0..p.levels())
                .map(|l| LevelGenerator::new(&p, l, cfg.y_drive))
                .collect(),
            dt: cfg.dt,
        })
    }

    fn steps(&self, state: &mut [Level], n: usize, h: f64) {
        for (g, c) in self.gens.iter().zip(state.iter_mut()) {
            for _ in 0..n {
                g.rk4(c, h);
            }
        }
    }

    /// Advances by `span` in equal steps no longer than `dt`.
    fn advance(&self, state: &mut [Level], span: f64) {
        if span <= 0.0 {
            return;
        }
        let n = (span / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        self.steps(state, n, span / n as f64);
    }
}

fn to_levels(c: &BareAmplitudes, levels: usize) -> Result<Vec<Level>> {
    let got = c.levels()?;
    if got != levels {
        return Err(Error::LengthMismatch {
            expected: levels,
            got,
        });
    }
    Ok((0..levels)
        .map(|l| [c.cg0[l], c.cg1[l], c.ce0[l], c.cg2[l], c.ce1[l]])
        .collect())
}

fn from_levels(state: &[Level]) -> BareAmplitudes {
    let col = |j: usize| state.iter().map(|c| c[j]).collect();
    BareAmplitudes {
        cg0: col(CG0),
        cg1: col(CG1),
        ce0: col(CE0),
        cg2: col(CG2),
        ce1: col(CE1),
    }
}

/// Integrates from `initial` and returns the state at each of `times`
/// (ascending, non-negative). Each interval is covered in equal steps no
/// longer than `cfg.dt`.
pub fn integrate_bare(
    p: &SystemParams,
    initial: &BareAmplitudes,
    cfg: &IntegrationConfig,
    times: &[f64],
) -> Result<Vec<BareAmplitudes>> {
    let integ = Integrator::new(p, cfg)?;
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("sample times must be ascending and non-negative".into()));
    }
    let mut state = to_levels(initial, p.levels())?;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        integ.advance(&mut state, t - now);
        now = t;
        out.push(from_levels(&state));
    }
    Ok(out)
}

fn renormalize(state: &mut [Level]) {
    let n: f64 = state.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        state.iter_mut().flatten().for_each(|c| *c /= n);
    }
}

/// Ratios `C_{n,l} / C_{g,0,l}` on levels with a populated ground amplitude,
/// grouped by manifold.
fn ratios(state: &[Level]) -> [Vec<C64>; 2] {
    let mut one = Vec::new();
    let mut two = Vec::new();
    for c in state.iter().filter(|c| c[CG0].norm() > 0.0) {
        one.extend([c[CG1] / c[CG0], c[CE0] / c[CG0]]);
        two.extend([c[CG2] / c[CG0], c[CE1] / c[CG0]]);
    }
    [one, two]
}

fn relative_change(new: &[C64], old: &[C64]) -> f64 {
    let scale = new.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    new.iter()
        .zip(old)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Drives the motional state from the empty cavity until the amplitude ratios
/// stop changing, and returns the unit-norm state.
pub fn steady_state_numeric(
    p: &SystemParams,
    state: &MotionalState,
    cfg: &IntegrationConfig,
) -> Result<BareAmplitudes> {
    if !(cfg.y_drive > 0.0) {
        return Err(Error::NonpositiveDrive(cfg.y_drive));
    }
    let integ = Integrator::new(p, cfg)?;
    let mut init = BareAmplitudes::zeros(p.levels());
    if state.levels() != p.levels() {
        return Err(Error::LengthMismatch {
            expected: p.levels(),
            got: state.levels(),
        });
    }
    init.cg0 = state.amps().to_vec();
    let mut levels = to_levels(&init, p.levels())?;
    let interval = 1.0 / p.gamma;
    let mut now = 0.0;
    let mut last = ratios(&levels);
    while now < cfg.t_end {
        let span = interval.min(cfg.t_end - now);
        integ.advance(&mut levels, span);
        renormalize(&mut levels);
        now += span;
        let cur = ratios(&levels);
        let change = cur
            .iter()
            .zip(&last)
            .map(|(a, b)| relative_change(a, b))
            .fold(0.0, f64::max)
            / span;
        last = cur;
        if change < CONVERGENCE_RATE {
            log::debug!("oracle steady state converged at t = {now}");
            return Ok(from_levels(&levels));
        }
    }
    Err(Error::NotConverged { t_end: cfg.t_end })
}

/// Applies the detection operator (`a` or `σ-`) to the full truncated state
/// and normalizes.
pub fn collapse_numeric(ss: &BareAmplitudes, channel: Channel) -> Result<BareAmplitudes> {
    let levels = ss.levels()?;
    let mut out = BareAmplitudes::zeros(levels);
    for l in 0..levels {
        match channel {
            Channel::Transmission => {
                out.cg0[l] = ss.cg1[l];
                out.cg1[l] = ss.cg2[l] * SQRT_2;
                out.ce0[l] = ss.ce1[l];
            }
            Channel::Fluorescence => {
                out.cg0[l] = ss.ce0[l];
                out.cg1[l] = ss.ce1[l];
            }
        }
    }
    let n = out.norm_sq().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Degenerate("numeric steady state has no emission in this channel"));
    }
    out.scale(C64::new(1.0 / n, 0.0));
    Ok(out)
}

/// Norm-weighted expectation values of a truncated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectations {
    pub photon_number: f64,
    pub excitation: f64,
    /// `⟨a⟩`.
    pub field: C64,
    /// `⟨σ-⟩`.
    pub dipole: C64,
}

pub fn expectations(c: &BareAmplitudes) -> Expectations {
    let mut e = Expectations {
        photon_number: 0.0,
        excitation: 0.0,
        field: C64::new(0.0, 0.0),
        dipole: C64::new(0.0, 0.0),
    };
    for l in 0..c.cg0.len() {
        e.photon_number += c.cg1[l].norm_sqr() + c.ce1[l].norm_sqr() + 2.0 * c.cg2[l].norm_sqr();
        e.excitation += c.ce0[l].norm_sqr() + c.ce1[l].norm_sqr();
        e.field += c.cg0[l].conj() * c.cg1[l]
            + SQRT_2 * c.cg1[l].conj() * c.cg2[l]
            + c.ce0[l].conj() * c.ce1[l];
        e.dipole += c.cg0[l].conj() * c.ce0[l] + c.cg1[l].conj() * c.ce1[l];
    }
    let n = c.norm_sq();
    e.photon_number /= n;
    e.excitation /= n;
    e.field /= n;
    e.dipole /= n;
    e
}

fn observable(e: &Expectations, kind: Kind) -> C64 {
    match kind {
        Kind::G2Tt => C64::new(e.photon_number, 0.0),
        Kind::G2Ff => C64::new(e.excitation, 0.0),
        Kind::HTt => e.field,
        Kind::HFf => e.dipole,
    }
}

/// Numeric steady state reused across correlators and delays.
#[derive(Debug, Clone)]
pub struct NumericCorrelator {
    params: SystemParams,
    state: MotionalState,
    cfg: IntegrationConfig,
    steady: BareAmplitudes,
}

impl NumericCorrelator {
    pub fn new(p: &SystemParams, state: &MotionalState, cfg: &IntegrationConfig) -> Result<Self> {
        let steady = steady_state_numeric(p, state, cfg)?;
        Ok(NumericCorrelator {
            params: *p,
            state: state.clone(),
            cfg: *cfg,
            steady,
        })
    }

    pub fn steady(&self) -> &BareAmplitudes {
        &self.steady
    }

    pub fn conditioned(&self, channel: Channel) -> Result<BareAmplitudes> {
        collapse_numeric(&self.steady, channel)
    }

    pub fn series(&self, kind: Kind, theta: f64, grid: &TauGrid) -> Result<CorrelationSeries> {
        let reference = observable(&expectations(&self.steady), kind);
        if reference.norm() == 0.0 {
            return Err(Error::Degenerate("numeric steady-state reference vanishes"));
        }
        let start = self.conditioned(kind.channel())?;
        let traj = integrate_bare(&self.params, &start, &self.cfg, grid.taus())?;
        let phase = C64::from_polar(1.0, theta);
        let values = traj
            .iter()
            .map(|c| {
                let r = observable(&expectations(c), kind) / reference;
                if kind.is_h() {
                    (phase * r).re
                } else {
                    r.re
                }
            })
            .collect();
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

    /// Several kinds at once, evaluated in parallel.
    pub fn series_many(&self, kinds: &[Kind], theta: f64, grid: &TauGrid) -> Result<Vec<CorrelationSeries>> {
        kinds.par_iter().map(|&k| self.series(k, theta, grid)).collect()
    }
}

pub fn correlation_numeric(
    p: &SystemParams,
    state: &MotionalState,
    kind: Kind,
    theta: f64,
    grid: &TauGrid,
    cfg: &IntegrationConfig,
) -> Result<CorrelationSeries> {
    NumericCorrelator::new(p, state, cfg)?.series(kind, theta, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ground_state, superposition};

    fn params(g: f64, kappa: f64, d1: f64, l_max: usize) -> SystemParams {
        SystemParams::new(g, kappa, d1, l_max).unwrap()
    }

    #[test]
    fn undriven_ground_is_stationary() {
        let p = params(2.0, 5.0, 0.1, 3);
        let mut init = BareAmplitudes::zeros(4);
        init.cg0[0] = C64::new(0.6, 0.0);
        init.cg0[2] = C64::new(0.0, 0.8);
        let cfg = IntegrationConfig::default().with_y_drive(0.0);
        let out = integrate_bare(&p, &init, &cfg, &[0.0, 1.0, 7.5]).unwrap();
        for c in &out {
            assert_eq!(c, &init);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let p = params(2.0, 5.0, 0.1, 2);
        let mut init = BareAmplitudes::zeros(3);
        init.cg0[0] = C64::new(1.0, 0.0);
        init.ce0[1] = C64::new(0.3, 0.1);
        init.cg2[2] = C64::new(-0.2, 0.4);
        let run = |dt: f64| {
            let cfg = IntegrationConfig::default().with_y_drive(0.01).with_dt(dt);
            integrate_bare(&p, &init, &cfg, &[2.0]).unwrap().pop().unwrap()
        };
        let reference = run(1e-4);
        let err = |c: BareAmplitudes| {
            let mut d = c;
            for (a, b) in [
                (&mut d.cg0, &reference.cg0),
                (&mut d.cg1, &reference.cg1),
                (&mut d.ce0, &reference.ce0),
                (&mut d.cg2, &reference.cg2),
                (&mut d.ce1, &reference.ce1),
            ] {
                a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
            }
            d.norm_sq().sqrt()
        };
        let ratio = err(run(0.006)) / err(run(0.003));
        assert!(ratio > 13.0 && ratio < 19.0, "ratio {ratio}");
    }

    #[test]
    fn norm_never_grows() {
        let p = params(3.0, 0.1, 0.1, 1);
        let mut init = BareAmplitudes::zeros(2);
        init.cg0[0] = C64::new(0.8, 0.0);
        init.ce0[0] = C64::new(0.6, 0.0);
        let cfg = IntegrationConfig::default().with_y_drive(0.0);
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let out = integrate_bare(&p, &init, &cfg, &times).unwrap();
        for w in out.windows(2) {
            assert!(w[1].norm_sq() < w[0].norm_sq());
        }
    }

    #[test]
    fn stability_guard_trips() {
        let p = params(2.2, 10.0, 0.1, 200);
        let cfg = IntegrationConfig::default().with_dt(0.01);
        assert!(matches!(
            integrate_bare(&p, &BareAmplitudes::zeros(201), &cfg, &[1.0]),
            Err(Error::StabilityGuard { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(IntegrationConfig::default().with_dt(0.0).validate().is_err());
        assert!(IntegrationConfig::default().with_y_drive(0.5).validate().is_err());
        assert!(IntegrationConfig::default().with_y_drive(-1e-3).validate().is_err());
    }

    #[test]
    fn resonant_photon_amplitude_sign() {
        // With this drive convention the steady field is real and negative.
        let p = params(2.0, 5.0, 0.1, 0);
        let ss = steady_state_numeric(&p, &ground_state(0), &IntegrationConfig::default()).unwrap();
        let r = ss.cg1[0] / ss.cg0[0];
        assert!(r.re < 0.0 && r.im.abs() < 1e-3 * r.norm(), "{r}");
        let d = ss.ce0[0] / ss.cg0[0];
        assert!(d.im > 0.0 && d.re.abs() < 1e-3 * d.norm(), "{d}");
    }

    #[test]
    fn converged_state_is_a_fixed_point() {
        let p = params(2.0, 5.0, 0.1, 5);
        let s = superposition(&[0, 5], 5).unwrap();
        let cfg = IntegrationConfig::default();
        let a = steady_state_numeric(&p, &s, &cfg).unwrap();
        let b = steady_state_numeric(&p, &s, &IntegrationConfig { t_end: 400.0, ..cfg }).unwrap();
        // both stop at the same convergence time
        for (x, y) in a.cg1.iter().zip(&b.cg1) {
            assert!((x - y).norm() < 1e-10 * (1.0 + x.norm()));
        }
        let later = integrate_bare(&p, &a, &cfg, &[5.0]).unwrap().pop().unwrap();
        for l in [0, 5] {
            let r0 = a.cg1[l] / a.cg0[l];
            let r1 = later.cg1[l] / later.cg0[l];
            assert!((r0 - r1).norm() < 1e-9 * r0.norm());
        }
    }

    #[test]
    fn too_short_horizon_does_not_converge() {
        let p = params(3.0, 0.1, 0.1, 0);
        let cfg = IntegrationConfig {
            t_end: 3.0,
            ..IntegrationConfig::default()
        };
        assert!(matches!(
            steady_state_numeric(&p, &ground_state(0), &cfg),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn fluorescence_collapse_starts_at_zero() {
        let p = params(1.0, 0.77, 0.1, 0);
        let nc = NumericCorrelator::new(&p, &ground_state(0), &IntegrationConfig::default()).unwrap();
        let grid = TauGrid::uniform(3, 0.01).unwrap();
        let s = nc.series(Kind::G2Ff, 0.0, &grid).unwrap();
        assert!(s.values[0].abs() < 1e-6);
    }
}
