//! Classical-field inequality checks on correlation curves.
//!
//! For a classical field with a positive P distribution
//!
//! - `g2(0) ≥ 1`,
//! - `g2(τ) ≤ g2(0)`,
//! - `|g2(τ) - 1| ≤ |g2(0) - 1|`,
//!
//! and for the intensity-field correlation `0 ≤ h(0) - 1 ≤ 1` and
//! `|h(τ) - 1| ≤ |h(0) - 1|`. Each violated inequality becomes a flag with the
//! delay at which it is worst and the margin by which it is broken.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{CorrelationSeries, Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    SubPoissonian,
    Antibunching,
    Undershoot,
    Overshoot,
    HZeroRange,
    HEnvelope,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::SubPoissonian => "sub_poissonian",
            ViolationKind::Antibunching => "antibunching",
            ViolationKind::Undershoot => "undershoot",
            ViolationKind::Overshoot => "overshoot",
            ViolationKind::HZeroRange => "h_zero_range",
            ViolationKind::HEnvelope => "h_envelope",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Delay where the inequality is broken by the largest amount.
    pub tau: f64,
    /// Amount by which the inequality is broken (always ≥ tolerance).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    pub tolerance: f64,
}

impl ViolationReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.get(kind).is_some()
    }

    pub fn get(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }

    pub fn is_classical(&self) -> bool {
        self.violations.is_empty()
    }

    /// `key=value` lines, one per flag plus the tolerance.
    pub fn to_record(&self) -> String {
        let mut out = format!("tolerance={:e}\n", self.tolerance);
        for v in &self.violations {
            let k = v.kind.as_str();
            let _ = writeln!(out, "{k}=true\n{k}.tau={}\n{k}.margin={:e}", v.tau, v.margin);
        }
        out
    }
}

fn check(series: &CorrelationSeries, want_h: bool, tol: f64) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if series.kind.is_h() != want_h {
        return Err(Error::WrongKind {
            expected: if want_h { "htt or hff" } else { "g2tt or g2ff" },
            found: series.kind.to_string(),
        });
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidConfig(format!("negative tolerance {tol}")));
    }
    series.validate()
}

/// Index and value of the largest `f(i)`; ties go to the earliest index.
fn argmax(n: usize, f: impl Fn(usize) -> f64) -> (usize, f64) {
    (0..n).map(|i| (i, f(i))).fold((0, f64::NEG_INFINITY), |best, cur| {
        if cur.1 > best.1 {
            cur
        } else {
            best
        }
    })
}

fn flag(out: &mut Vec<Violation>, kind: ViolationKind, tau: f64, margin: f64, tol: f64) {
    if margin > tol {
        out.push(Violation { kind, tau, margin });
    }
}

pub fn classify_g2(series: &CorrelationSeries, tol: f64) -> Result<ViolationReport> {
    check(series, false, tol)?;
    let v = &series.values;
    let t = &series.taus;
    let g0 = v[0];
    let env = (g0 - 1.0).abs();
    let mut out = Vec::new();
    flag(&mut out, ViolationKind::SubPoissonian, 0.0, 1.0 - g0, tol);
    if v.len() > 1 {
        flag(&mut out, ViolationKind::Antibunching, t[1], v[1] - g0, tol);
    }
    let (i, m) = argmax(v.len(), |i| (1.0 - env) - v[i]);
    flag(&mut out, ViolationKind::Undershoot, t[i], m, tol);
    let (i, m) = argmax(v.len(), |i| v[i] - (1.0 + env));
    flag(&mut out, ViolationKind::Overshoot, t[i], m, tol);
    Ok(ViolationReport {
        violations: out,
        tolerance: tol,
    })
}

pub fn classify_h(series: &CorrelationSeries, tol: f64) -> Result<ViolationReport> {
    check(series, true, tol)?;
    let v = &series.values;
    let t = &series.taus;
    let d0 = v[0] - 1.0;
    let mut out = Vec::new();
    flag(&mut out, ViolationKind::HZeroRange, 0.0, (-d0).max(d0 - 1.0), tol);
    let (i, m) = argmax(v.len(), |i| (v[i] - 1.0).abs() - d0.abs());
    flag(&mut out, ViolationKind::HEnvelope, t[i], m, tol);
    Ok(ViolationReport {
        violations: out,
        tolerance: tol,
    })
}

/// Dispatches on the series kind.
pub fn classify(series: &CorrelationSeries, tol: f64) -> Result<ViolationReport> {
    if series.kind.is_h() {
        classify_h(series, tol)
    } else {
        classify_g2(series, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::ground_state;
    use crate::{Correlator, Kind, StateSpec, SystemParams, TauGrid};
    use proptest::prelude::*;

    fn series(kind: Kind, values: Vec<f64>) -> CorrelationSeries {
        let n = values.len();
        CorrelationSeries {
            taus: (0..n).map(|i| i as f64 * 0.1).collect(),
            values,
            kind,
            theta: kind.is_h().then_some(0.0),
            params: SystemParams::new(2.0, 5.0, 0.1, 0).unwrap(),
            state: StateSpec::Ground,
        }
    }

    #[test]
    fn coherent_light_is_classical() {
        assert!(classify_g2(&series(Kind::G2Tt, vec![1.0; 20]), DEFAULT_TOLERANCE).unwrap().is_classical());
        assert!(classify_h(&series(Kind::HTt, vec![1.0; 20]), DEFAULT_TOLERANCE).unwrap().is_classical());
    }

    #[test]
    fn undershoot_below_mirror_of_g2_zero() {
        let r = classify_g2(&series(Kind::G2Tt, vec![1.1, 0.6, 0.0, 0.5, 1.0]), DEFAULT_TOLERANCE).unwrap();
        let u = r.get(ViolationKind::Undershoot).unwrap();
        assert_eq!(u.tau, 0.2);
        assert!((u.margin - 0.9).abs() < 1e-12);
        assert!(!r.has(ViolationKind::SubPoissonian));
        assert!(!r.has(ViolationKind::Overshoot));
    }

    #[test]
    fn fluorescence_h_starts_out_of_range() {
        let r = classify_h(&series(Kind::HFf, vec![0.0, 0.5, 1.0]), DEFAULT_TOLERANCE).unwrap();
        let f = r.get(ViolationKind::HZeroRange).unwrap();
        assert!((f.margin - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constructed_envelope_violation() {
        let r = classify_h(&series(Kind::HTt, vec![1.5, 1.2, 2.5, 1.0]), DEFAULT_TOLERANCE).unwrap();
        let e = r.get(ViolationKind::HEnvelope).unwrap();
        assert!((e.tau - 0.2).abs() < 1e-15);
        assert!((e.margin - 1.0).abs() < 1e-12);
        assert!(!r.has(ViolationKind::HZeroRange));
    }

    #[test]
    fn wrong_kind_and_empty() {
        assert!(matches!(
            classify_g2(&series(Kind::HTt, vec![1.0]), 1e-9),
            Err(Error::WrongKind { .. })
        ));
        assert!(matches!(classify_h(&series(Kind::HTt, vec![]), 1e-9), Err(Error::EmptySeries)));
    }

    #[test]
    fn vacuum_rabi_fluorescence_breaks_all_three() {
        let p = SystemParams::new(3.0, 0.1, 0.1, 0).unwrap();
        let c = Correlator::new(&p, &ground_state(0)).unwrap();
        let s = c.series(Kind::G2Ff, 0.0, &TauGrid::default()).unwrap();
        let r = classify_g2(&s, DEFAULT_TOLERANCE).unwrap();
        for k in [ViolationKind::SubPoissonian, ViolationKind::Antibunching, ViolationKind::Overshoot] {
            assert!(r.has(k), "{k:?} missing from {r:?}");
        }
    }

    #[test]
    fn record_format() {
        let r = classify_h(&series(Kind::HFf, vec![0.0, 1.0]), 1e-9).unwrap();
        let rec = r.to_record();
        assert!(rec.contains("h_zero_range=true"));
        assert!(rec.starts_with("tolerance=1e-9"));
    }

    fn curve() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0..3.0f64, 2..40)
    }

    proptest! {
        #[test]
        fn raising_tolerance_only_clears_flags(v in curve(), t1 in 0.0..0.5f64, t2 in 0.0..0.5f64) {
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            for kind in [Kind::G2Tt, Kind::HTt] {
                let s = series(kind, v.clone());
                let a = classify(&s, lo).unwrap();
                let b = classify(&s, hi).unwrap();
                for f in &b.violations {
                    prop_assert!(a.has(f.kind));
                    prop_assert!(f.margin >= hi);
                }
            }
        }

        #[test]
        fn margins_exceed_tolerance(v in curve(), tol in 0.0..0.3f64) {
            for kind in [Kind::G2Ff, Kind::HFf] {
                let r = classify(&series(kind, v.clone()), tol).unwrap();
                prop_assert!(r.violations.iter().all(|f| f.margin >= tol));
            }
        }
    }

    #[test]
    fn flags_stable_under_grid_refinement() {
        let p = SystemParams::new(2.0, 5.0, 0.1, 0).unwrap();
        let c = Correlator::new(&p, &ground_state(0)).unwrap();
        for kind in Kind::ALL {
            let a = classify(&c.series(kind, 0.0, &TauGrid::uniform(1000, 10.0).unwrap()).unwrap(), 1e-9).unwrap();
            let b = classify(&c.series(kind, 0.0, &TauGrid::uniform(1999, 10.0).unwrap()).unwrap(), 1e-9).unwrap();
            let ka: Vec<_> = a.violations.iter().map(|v| v.kind).collect();
            let kb: Vec<_> = b.violations.iter().map(|v| v.kind).collect();
            assert_eq!(ka, kb, "{kind}");
            for (x, y) in a.violations.iter().zip(&b.violations) {
                if x.kind != ViolationKind::Antibunching {
                    assert!((x.margin - y.margin).abs() < 1e-3, "{kind} {:?}", x.kind);
                }
            }
        }
    }
}
