//! Parameter resolution: command-line flags over config file over defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use outage_core::{LinkParams, Scenario, SimConfig};

use crate::args::ParamArgs;

#[derive(Debug, Clone)]
pub struct Settings {
    pub lambda: f64,
    pub p: f64,
    pub alpha: f64,
    pub theta: f64,
    pub r: f64,
    pub n: usize,
    pub k: Option<f64>,
    pub q: u64,
    pub m: Option<usize>,
    pub seed: u64,
    pub reps: usize,
    pub slots: usize,
    pub radius: Option<f64>,
    pub tol: f64,
    pub corr: bool,
    pub out: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            p: 0.1,
            alpha: 4.0,
            theta: 1.0,
            r: 1.0,
            n: 1,
            k: None,
            q: 2,
            m: None,
            seed: 1,
            reps: 2000,
            slots: 200,
            radius: None,
            tol: 1e-10,
            corr: true,
            out: None,
        }
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
        map.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow!("config key `{key}`: cannot parse `{value}`"))
}

fn apply_config(s: &mut Settings, map: &BTreeMap<String, String>) -> Result<()> {
    for (key, v) in map {
        match key.as_str() {
            "lambda" => s.lambda = parse(key, v)?,
            "p" => s.p = parse(key, v)?,
            "alpha" => s.alpha = parse(key, v)?,
            "theta" => s.theta = parse(key, v)?,
            "r" => s.r = parse(key, v)?,
            "n" => s.n = parse(key, v)?,
            "k" => s.k = Some(parse(key, v)?),
            "q" => s.q = parse(key, v)?,
            "m" => s.m = Some(parse(key, v)?),
            "seed" => s.seed = parse(key, v)?,
            "reps" => s.reps = parse(key, v)?,
            "slots" => s.slots = parse(key, v)?,
            "radius" => s.radius = Some(parse(key, v)?),
            "tol" => s.tol = parse(key, v)?,
            "corr" => s.corr = parse(key, v)?,
            "out" => s.out = Some(PathBuf::from(v)),
            other => bail!("unknown config key `{other}`"),
        }
    }
    Ok(())
}

pub fn resolve(args: &ParamArgs) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        apply_config(&mut s, &parse_config(&text)?)?;
    }
    macro_rules! take {
        ($($f:ident),*) => { $( if let Some(v) = args.$f { s.$f = v; } )* };
    }
    take!(lambda, p, alpha, theta, r, n, q, seed, reps, slots, tol);
    if args.k.is_some() {
        s.k = args.k;
    }
    if args.m.is_some() {
        s.m = args.m;
    }
    if args.radius.is_some() {
        s.radius = args.radius;
    }
    if args.out.is_some() {
        s.out.clone_from(&args.out);
    }
    if args.corr {
        s.corr = true;
    }
    if args.no_corr {
        s.corr = false;
    }
    Ok(s)
}

impl Settings {
    pub fn link(&self) -> outage_core::Result<LinkParams> {
        LinkParams::new(self.lambda, self.p, self.alpha, self.theta, self.r)
    }

    pub fn scenario(&self) -> outage_core::Result<Scenario> {
        Scenario::new(self.lambda, self.p, self.alpha, self.theta, self.r)
    }

    pub fn sim_config(&self, scenario: &Scenario) -> outage_core::Result<SimConfig> {
        let cfg = SimConfig {
            radius: self.radius.unwrap_or_else(|| SimConfig::default_radius(scenario)),
            slots: self.slots,
            reps: self.reps,
            seed: self.seed,
            kappa: 1.0,
        };
        cfg.validate(scenario)?;
        Ok(cfg)
    }

    /// `--k` as a non-negative integer.
    pub fn k_count(&self, what: &str) -> Result<Option<usize>> {
        match self.k {
            None => Ok(None),
            Some(k) if k >= 0.0 && k.fract() == 0.0 => Ok(Some(k as usize)),
            Some(k) => Err(outage_core::Error::InvalidParameter {
                name: "k",
                reason: format!("{what} must be a non-negative integer, got {k}"),
            }
            .into()),
        }
    }

    /// Every resolved parameter as `(name, value)`; `radius` is reported as
    /// the effective radius when a scenario is given.
    pub fn describe(&self, scenario: Option<&Scenario>) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("lambda", fmt(self.lambda)),
            ("p", fmt(self.p)),
            ("alpha", fmt(self.alpha)),
            ("theta", fmt(self.theta)),
            ("r", fmt(self.r)),
            ("n", self.n.to_string()),
            ("k", self.k.map_or("unset".into(), fmt)),
            ("q", self.q.to_string()),
            ("m", self.m.map_or("unset".into(), |m| m.to_string())),
            ("tol", fmt(self.tol)),
            ("corr", self.corr.to_string()),
            ("seed", self.seed.to_string()),
            ("reps", self.reps.to_string()),
            ("slots", self.slots.to_string()),
        ];
        let radius = match (self.radius, scenario) {
            (Some(r), _) => fmt(r),
            (None, Some(s)) => fmt(SimConfig::default_radius(s)),
            (None, None) => "default".into(),
        };
        v.push(("radius", radius));
        v
    }
}

pub fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}

pub fn config_path_display(p: &Option<PathBuf>) -> String {
    p.as_deref().map_or("none".into(), |p: &Path| p.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_syntax() {
        let map = parse_config("# header\nlambda = 0.5  # comment\n\n  p=0.2\nn_lambda = 3\n").unwrap();
        assert_eq!(map["lambda"], "0.5");
        assert_eq!(map["p"], "0.2");
        assert_eq!(map["n-lambda"], "3");
        assert!(parse_config("lambda 0.5").is_err());
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let mut s = Settings::default();
        assert!(apply_config(&mut s, &parse_config("bogus = 1").unwrap()).is_err());
        assert!(apply_config(&mut s, &parse_config("p = abc").unwrap()).is_err());
        apply_config(&mut s, &parse_config("p = 0.3\ncorr = false").unwrap()).unwrap();
        assert_eq!(s.p, 0.3);
        assert!(!s.corr);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("outage-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.conf");
        fs::write(&path, "lambda = 0.5\np = 0.2\n").unwrap();
        let args = ParamArgs {
            p: Some(0.7),
            config: Some(path),
            ..Default::default()
        };
        let s = resolve(&args).unwrap();
        assert_eq!(s.lambda, 0.5);
        assert_eq!(s.p, 0.7);
        fs::remove_dir_all(dir).unwrap();
    }
}
