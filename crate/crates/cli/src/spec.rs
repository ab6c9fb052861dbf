//! Run specification: defaults, flat `key=value` config files and flag overrides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use cavcorr::states::STATE_GRAMMAR;
use cavcorr::{CorrelatorOptions, IntegrationConfig, Kind, MotionalState, StateSpec, SystemParams, TauGrid};

use crate::error::{CliError, Result};

/// Prefix marking the embedded spec lines in CSV headers. A CSV written by
/// `run` can be passed back through `--config`.
pub const EMBED_PREFIX: &str = "# run: ";

pub const DEFAULT_L_MAX: usize = 19;

/// Flags shared by `run` and `verify`. Every field is optional so that values
/// from `--config` survive unless overridden.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat key=value file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Atom-cavity coupling g/gamma.
    #[arg(long)]
    pub g: Option<f64>,
    /// Cavity decay kappa/gamma.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Vibronic level spacing of the one-excitation + ladder, in gamma.
    #[arg(long)]
    pub delta1: Option<f64>,
    /// Highest vibronic level kept.
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Motional state, e.g. ground, mix:0,5, gaussian:1.0, boltzmann:2,20, equal:20.
    #[arg(long)]
    pub state: Option<String>,
    /// Correlators to compute (comma separated): g2tt, g2ff, htt, hff.
    #[arg(long, value_delimiter = ',')]
    pub kind: Option<Vec<String>>,
    /// Local-oscillator phases for h correlators, radians (comma separated).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Option<Vec<f64>>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub tau_points: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also run the brute-force integrator and compare.
    #[arg(long)]
    pub verify: bool,
    /// Source the conditioned evolution from the pre-detection motional state.
    #[arg(long)]
    pub precollapse_ground: bool,
    /// Finite drive used by the integrator.
    #[arg(long)]
    pub y_drive: Option<f64>,
    /// Integrator step, 1/gamma.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integrator horizon for the steady state, 1/gamma.
    #[arg(long)]
    pub t_end: Option<f64>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub params: SystemParams,
    pub state: StateSpec,
    pub kinds: Vec<Kind>,
    pub thetas: Vec<f64>,
    pub tau_max: f64,
    pub tau_points: usize,
    pub out: PathBuf,
    pub verify: bool,
    pub precollapse_ground: bool,
    pub integration: IntegrationConfig,
}

const KEYS: [&str; 15] = [
    "g",
    "kappa",
    "delta1",
    "l_max",
    "y_drive",
    "state",
    "kinds",
    "thetas",
    "tau_max",
    "tau_points",
    "out",
    "verify",
    "precollapse_ground",
    "dt",
    "t_end",
];

impl RunSpec {
    /// Builds the motional state; the spec has already checked it builds.
    pub fn motional_state(&self) -> MotionalState {
        self.state
            .build(self.params.l_max)
            .expect("state validated when the spec was parsed")
    }

    pub fn grid(&self) -> TauGrid {
        TauGrid::uniform(self.tau_points, self.tau_max).expect("grid validated when the spec was parsed")
    }

    pub fn options(&self) -> CorrelatorOptions {
        CorrelatorOptions {
            precollapse_ground: self.precollapse_ground,
        }
    }

    /// `(key, value)` pairs in a fixed order; parsing them back gives the same spec.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let join = |v: Vec<String>| v.join(",");
        vec![
            ("g", p.g.to_string()),
            ("kappa", p.kappa.to_string()),
            ("delta1", p.delta1.to_string()),
            ("l_max", p.l_max.to_string()),
            ("y_drive", p.y_drive.to_string()),
            ("state", self.state.to_string()),
            ("kinds", join(self.kinds.iter().map(|k| k.to_string()).collect())),
            ("thetas", join(self.thetas.iter().map(|t| t.to_string()).collect())),
            ("tau_max", self.tau_max.to_string()),
            ("tau_points", self.tau_points.to_string()),
            ("out", self.out.display().to_string()),
            ("verify", self.verify.to_string()),
            ("precollapse_ground", self.precollapse_ground.to_string()),
            ("dt", self.integration.dt.to_string()),
            ("t_end", self.integration.t_end.to_string()),
        ]
    }

    pub fn to_config(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Header lines for a CSV file.
    pub fn embedded_header(&self) -> String {
        let mut s = format!("# cavcorr {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{EMBED_PREFIX}{k}={v}");
        }
        s
    }
}

/// Parses a flat config. Blank lines and `#` comments are skipped, except
/// embedded `# run: key=value` lines; a `tau,value` line ends the header of a
/// CSV file and everything after it is ignored.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line == "tau,value" {
            break;
        }
        let body = if let Some(rest) = line.strip_prefix(EMBED_PREFIX.trim_end()) {
            rest.trim()
        } else if line.is_empty() || line.starts_with('#') {
            continue;
        } else {
            line
        };
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| CliError::Spec(format!("config line {}: expected key=value, got {raw:?}", n + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Spec(format!(
                "config line {}: unknown key {k:?} (known: {})",
                n + 1,
                KEYS.join(", ")
            )));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Spec(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| CliError::Spec(format!("bad value for {key}: {v:?} ({e})")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(|s| parse_value(key, s.trim())).collect()
}

fn parse_state(s: &str) -> Result<StateSpec> {
    s.parse()
        .map_err(|e| CliError::Spec(format!("{e}\nstate grammar: {STATE_GRAMMAR}")))
}

/// Merges defaults, the optional config file, then flags.
pub fn parse_run_spec(args: &RunArgs) -> Result<RunSpec> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let get = |k: &str| file.get(k).map(String::as_str);

    macro_rules! pick {
        ($flag:expr, $key:literal, $default:expr) => {
            match ($flag, get($key)) {
                (Some(v), _) => v,
                (None, Some(s)) => parse_value($key, s)?,
                (None, None) => $default,
            }
        };
    }

    let g: f64 = pick!(args.g, "g", 2.0);
    let kappa: f64 = pick!(args.kappa, "kappa", 5.0);
    let delta1: f64 = pick!(args.delta1, "delta1", 0.1);
    let y_drive: f64 = pick!(args.y_drive, "y_drive", SystemParams::DEFAULT_Y_DRIVE);
    let tau_max: f64 = pick!(args.tau_max, "tau_max", TauGrid::DEFAULT_TAU_MAX);
    let tau_points: usize = pick!(args.tau_points, "tau_points", TauGrid::DEFAULT_POINTS);
    let defaults = IntegrationConfig::default();
    let dt: f64 = pick!(args.dt, "dt", defaults.dt);
    let t_end: f64 = pick!(args.t_end, "t_end", defaults.t_end);
    let out: PathBuf = pick!(args.out.clone(), "out", PathBuf::from("cavcorr-out"));

    let state = match (args.state.as_deref(), get("state")) {
        (Some(s), _) | (None, Some(s)) => parse_state(s)?,
        (None, None) => StateSpec::Ground,
    };
    let l_max = match (args.l_max, get("l_max")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse_value("l_max", s)?,
        (None, None) => state.min_l_max().unwrap_or(0).max(DEFAULT_L_MAX),
    };
    let kinds: Vec<Kind> = match (&args.kind, get("kinds")) {
        (Some(v), _) => v.iter().map(|s| parse_value("kind", s)).collect::<Result<_>>()?,
        (None, Some(s)) => parse_list("kinds", s)?,
        (None, None) => vec![Kind::G2Tt],
    };
    let thetas: Vec<f64> = match (&args.theta, get("thetas")) {
        (Some(v), _) => v.clone(),
        (None, Some(s)) => parse_list("thetas", s)?,
        (None, None) => vec![0.0],
    };
    let flag = |set: bool, key: &str| -> Result<bool> {
        Ok(set || get(key).map(|s| parse_value::<bool>(key, s)).transpose()?.unwrap_or(false))
    };
    let verify = flag(args.verify, "verify")?;
    let precollapse_ground = flag(args.precollapse_ground, "precollapse_ground")?;

    let params = SystemParams {
        g,
        kappa,
        gamma: 1.0,
        delta1,
        y_drive,
        l_max,
    }
    .validate()
    .map_err(|e| CliError::Spec(e.to_string()))?;
    if kinds.is_empty() {
        return Err(CliError::Spec("no correlator kinds requested".into()));
    }
    if thetas.is_empty() || thetas.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Spec("thetas must be finite and non-empty".into()));
    }
    state
        .build(l_max)
        .map_err(|e| CliError::Spec(e.to_string()))?;
    TauGrid::uniform(tau_points, tau_max).map_err(|e| CliError::Spec(e.to_string()))?;
    let integration = IntegrationConfig { dt, t_end, y_drive };
    integration
        .validate()
        .map_err(|e| CliError::Spec(e.to_string()))?;

    Ok(RunSpec {
        params,
        state,
        kinds,
        thetas,
        tau_max,
        tau_points,
        out,
        verify,
        precollapse_ground,
        integration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> RunArgs {
        RunArgs::default()
    }

    #[test]
    fn defaults_are_valid() {
        let s = parse_run_spec(&args()).unwrap();
        assert_eq!(s.params.l_max, DEFAULT_L_MAX);
        assert_eq!(s.kinds, vec![Kind::G2Tt]);
        assert_eq!(s.thetas, vec![0.0]);
    }

    #[test]
    fn pairs_round_trip() {
        let mut a = args();
        a.state = Some("mix:0,5".into());
        a.kind = Some(vec!["g2tt".into(), "hff".into()]);
        a.theta = Some(vec![0.0, 0.5]);
        a.verify = true;
        let s = parse_run_spec(&a).unwrap();
        let map = parse_config(&s.to_config()).unwrap();
        assert_eq!(map.len(), KEYS.len());
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), s.to_config()).unwrap();
        let back = parse_run_spec(&RunArgs {
            config: Some(file.path().to_path_buf()),
            ..RunArgs::default()
        })
        .unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(parse_config("g=2\nfoo=1\n"), Err(CliError::Spec(_))));
    }

    #[test]
    fn embedded_header_parses() {
        let s = parse_run_spec(&args()).unwrap();
        let csv = format!("{}tau,value\n0,1\n", s.embedded_header());
        assert_eq!(parse_config(&csv).unwrap(), parse_config(&s.to_config()).unwrap());
    }

    #[test]
    fn bad_state_mentions_grammar() {
        let mut a = args();
        a.state = Some("bogus".into());
        match parse_run_spec(&a) {
            Err(CliError::Spec(m)) => assert!(m.contains("mix:<l1>")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_params_are_spec_errors() {
        let mut a = args();
        a.kappa = Some(-1.0);
        assert!(matches!(parse_run_spec(&a), Err(CliError::Spec(_))));
    }

    #[test]
    fn state_raises_default_truncation() {
        let mut a = args();
        a.state = Some("equal:30".into());
        assert_eq!(parse_run_spec(&a).unwrap().params.l_max, 29);
        a.l_max = Some(10);
        assert!(parse_run_spec(&a).is_err());
    }
}
