//! Sectioned key-value experiment files.
//!
//! ```text
//! [norm]
//! kind = randers          # euclidean | randers | shifted_max
//! drift = 0.5, 0.0        # randers only
//! dim = 2                 # defaults to the algebra dimension
//!
//! [algebra]
//! name = aff_r            # abelian2 | abelian3 | aff_r | heisenberg3 | so3 | custom
//! dim = 3                 # custom only
//! brackets = 0 1 2 1.0    # custom only: `i j k c` entries for i < j, `;`-separated
//!
//! [sweep]
//! eps_fractions = 0.5, 0.25, 0.125, 0.0625   # multiples of tau, or absolute `eps = ...`
//! span = 0, 3
//! step = 0.01
//! a0 = 1, 1
//! x0 = 0, 1
//! profile_grid = 4096     # angular nodes of the smoothed profile; `colat, azimuth` in 3D
//!
//! [tolerances]
//! cons_tol = 1e-6
//! mono_slack = 0.05
//!
//! [output]
//! dir = out
//! seed = 7
//! svg = false
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use finsmooth_core::converge::{SweepConfig, SweepSamples, MONO_SLACK};
use finsmooth_core::extremal::CONS_TOL;
use finsmooth_core::liealg::{AlgebraName, LieAlgebraModel};
use finsmooth_core::{asymnorm, NormConstants, NormModel, ProfileGrid, SmoothingOptions};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate key '{key}' in [{section}] (first set on line {first})")]
    Duplicate { line: usize, first: usize, section: String, key: String },
    #[error("unknown keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("missing required key {0}")]
    Missing(String),
    #[error("[{section}] {key}: {msg}")]
    Value { section: String, key: String, msg: String },
    #[error("eps = {eps} is not below tau = {tau:.6e} for this norm")]
    EpsTooLarge { eps: f64, tau: f64 },
    #[error("{0}")]
    Model(#[from] finsmooth_core::Error),
}

type Sections = BTreeMap<String, BTreeMap<String, (String, usize)>>;

const KNOWN: &[(&str, &[&str])] = &[
    ("norm", &["kind", "dim", "drift"]),
    ("algebra", &["name", "dim", "brackets"]),
    (
        "sweep",
        &[
            "eps",
            "eps_fractions",
            "span",
            "step",
            "a0",
            "x0",
            "grid_radii",
            "grid_directions",
            "lipschitz_pairs",
            "convexity_pairs",
            "sphere_samples",
            "profile_grid",
        ],
    ),
    ("tolerances", &["cons_tol", "mono_slack"]),
    ("output", &["dir", "seed", "svg"]),
];

/// Splits the text into sections; `#` and `;` at line start begin comments, `#` also trails.
fn parse_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    msg: format!("malformed section header '{line}'"),
                })?
                .trim()
                .to_string();
            out.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line: line_no, msg: format!("expected key = value, got '{line}'") })?;
        let section = current
            .clone()
            .ok_or_else(|| ConfigError::Syntax { line: line_no, msg: "key outside any section".into() })?;
        let key = key.trim().to_string();
        let entries = out.entry(section.clone()).or_default();
        if let Some((_, first)) = entries.get(&key) {
            return Err(ConfigError::Duplicate { line: line_no, first: *first, section, key });
        }
        entries.insert(key, (value.trim().to_string(), line_no));
    }
    let mut unknown = Vec::new();
    for (section, entries) in &out {
        match KNOWN.iter().find(|(s, _)| s == section) {
            None => unknown.push(format!("[{section}]")),
            Some((_, keys)) => {
                for key in entries.keys() {
                    if !keys.contains(&key.as_str()) {
                        unknown.push(format!("{section}.{key}"));
                    }
                }
            }
        }
    }
    if !unknown.is_empty() {
        return Err(ConfigError::UnknownKeys(unknown));
    }
    Ok(out)
}

struct Reader<'a> {
    sections: &'a Sections,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(|(v, _)| v.as_str())
    }

    fn err(section: &str, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Value { section: section.into(), key: key.into(), msg: msg.into() }
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(section, key)
            .map(|v| v.parse::<T>().map_err(|_| Self::err(section, key, format!("cannot parse '{v}'"))))
            .transpose()
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.raw(section, key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse::<f64>().map_err(|_| Self::err(section, key, format!("cannot parse '{x}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormChoice {
    Euclidean,
    Randers,
    ShiftedMax,
}

impl NormChoice {
    fn as_str(self) -> &'static str {
        match self {
            NormChoice::Euclidean => "euclidean",
            NormChoice::Randers => "randers",
            NormChoice::ShiftedMax => "shifted_max",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub norm_kind: NormChoice,
    pub dim: usize,
    pub drift: Vec<f64>,
    pub algebra: AlgebraName,
    /// Custom bracket entries `(i, j, k, c)` with `i < j`.
    pub brackets: Vec<(usize, usize, usize, f64)>,
    pub eps: Vec<f64>,
    pub span: (f64, f64),
    pub step: f64,
    pub a0: Vec<f64>,
    pub x0: Option<Vec<f64>>,
    pub samples: SweepSamples,
    pub profile_grid: ProfileGrid,
    pub cons_tol: f64,
    pub mono_slack: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub svg: bool,
    /// Constants of the configured norm, computed at load.
    pub constants: NormConstants,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = parse_sections(text)?;
        let r = Reader { sections: &sections };

        let algebra: AlgebraName = r
            .raw("algebra", "name")
            .ok_or_else(|| ConfigError::Missing("algebra.name".into()))?
            .parse()
            .map_err(|e: finsmooth_core::Error| Reader::err("algebra", "name", e.to_string()))?;
        let mut brackets = Vec::new();
        let alg_dim = if algebra == AlgebraName::Custom {
            let d: usize = r.parse("algebra", "dim")?.ok_or_else(|| ConfigError::Missing("algebra.dim".into()))?;
            for entry in r.raw("algebra", "brackets").unwrap_or("").split(';').filter(|e| !e.trim().is_empty()) {
                let f: Vec<&str> = entry.split_whitespace().collect();
                let bad = || Reader::err("algebra", "brackets", format!("expected 'i j k c', got '{}'", entry.trim()));
                if f.len() != 4 {
                    return Err(bad());
                }
                let idx = |s: &str| s.parse::<usize>().ok().filter(|v| *v < d);
                let (i, j, k) = (idx(f[0]).ok_or_else(bad)?, idx(f[1]).ok_or_else(bad)?, idx(f[2]).ok_or_else(bad)?);
                let c: f64 = f[3].parse().map_err(|_| bad())?;
                if i >= j {
                    return Err(Reader::err("algebra", "brackets", "entries need i < j"));
                }
                brackets.push((i, j, k, c));
            }
            d
        } else {
            if r.raw("algebra", "dim").is_some() || r.raw("algebra", "brackets").is_some() {
                return Err(Reader::err("algebra", "name", "dim and brackets are only valid for custom"));
            }
            LieAlgebraModel::named(algebra)?.dim()
        };

        let norm_kind = match r.raw("norm", "kind").ok_or_else(|| ConfigError::Missing("norm.kind".into()))? {
            "euclidean" => NormChoice::Euclidean,
            "randers" => NormChoice::Randers,
            "shifted_max" => NormChoice::ShiftedMax,
            other => return Err(Reader::err("norm", "kind", format!("unknown norm '{other}'"))),
        };
        let dim = r.parse("norm", "dim")?.unwrap_or(alg_dim);
        if dim != alg_dim {
            return Err(Reader::err("norm", "dim", format!("{dim} differs from algebra dimension {alg_dim}")));
        }
        let drift = match (norm_kind, r.list("norm", "drift")?) {
            (NormChoice::Randers, Some(b)) => b,
            (NormChoice::Randers, None) => return Err(ConfigError::Missing("norm.drift".into())),
            (_, Some(_)) => return Err(Reader::err("norm", "drift", "only valid for randers")),
            (_, None) => Vec::new(),
        };

        let defaults = SweepSamples::default_for(dim);
        let samples = SweepSamples {
            grid_radii: r.parse("sweep", "grid_radii")?.unwrap_or(defaults.grid_radii),
            grid_directions: r.parse("sweep", "grid_directions")?.unwrap_or(defaults.grid_directions),
            lipschitz_pairs: r.parse("sweep", "lipschitz_pairs")?.unwrap_or(defaults.lipschitz_pairs),
            convexity_pairs: r.parse("sweep", "convexity_pairs")?.unwrap_or(defaults.convexity_pairs),
            sphere_samples: r.parse("sweep", "sphere_samples")?.unwrap_or(defaults.sphere_samples),
        };
        let mut cfg = ExperimentConfig {
            norm_kind,
            dim,
            drift,
            algebra,
            brackets,
            eps: Vec::new(),
            span: (0.0, 3.0),
            step: 1e-2,
            a0: vec![1.0; dim],
            x0: None,
            samples,
            profile_grid: ProfileGrid::default_for(dim),
            cons_tol: r.parse("tolerances", "cons_tol")?.unwrap_or(CONS_TOL),
            mono_slack: r.parse("tolerances", "mono_slack")?.unwrap_or(MONO_SLACK),
            out_dir: r.raw("output", "dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
            seed: r.parse("output", "seed")?.unwrap_or(7),
            svg: r.parse("output", "svg")?.unwrap_or(false),
            constants: NormConstants::new(
                dim,
                1.0,
                1.0,
                finsmooth_core::Modulus { value: 1.0, source: finsmooth_core::GammaSource::Analytic },
            ),
        };
        if let Some(g) = r.list("sweep", "profile_grid")? {
            let bad = || Reader::err("sweep", "profile_grid", format!("expected {} positive integers", dim - 1));
            let ints: Vec<usize> = g
                .iter()
                .map(|v| if *v >= 1.0 && v.fract() == 0.0 { Some(*v as usize) } else { None })
                .collect::<Option<_>>()
                .ok_or_else(bad)?;
            cfg.profile_grid = match (dim, ints.as_slice()) {
                (2, [count]) => ProfileGrid::Circle { count: *count },
                (3, [colat, azimuth]) => ProfileGrid::Sphere { colat: *colat, azimuth: *azimuth },
                _ => return Err(bad()),
            };
        }
        let norm = cfg.norm()?;
        cfg.constants = asymnorm::constants(&norm, cfg.samples.sphere_samples)?;
        let tau = cfg.constants.tau;

        cfg.eps = match (r.list("sweep", "eps")?, r.list("sweep", "eps_fractions")?) {
            (Some(_), Some(_)) => return Err(Reader::err("sweep", "eps", "give either eps or eps_fractions")),
            (Some(e), None) => e,
            (None, Some(f)) => f.iter().map(|x| x * tau).collect(),
            (None, None) => [0.5, 0.25, 0.125, 0.0625].iter().map(|x| x * tau).collect(),
        };
        for &e in &cfg.eps {
            if e >= tau {
                return Err(ConfigError::EpsTooLarge { eps: e, tau });
            }
        }
        if let Some(s) = r.list("sweep", "span")? {
            if s.len() != 2 || !(s[0] <= 0.0 && s[1] >= 0.0 && s[1] > s[0]) {
                return Err(Reader::err("sweep", "span", "expected 'a, b' with a <= 0 <= b and a < b"));
            }
            cfg.span = (s[0], s[1]);
        }
        cfg.step = r.parse("sweep", "step")?.unwrap_or(cfg.step);
        if cfg.step.is_nan() || cfg.step <= 0.0 {
            return Err(Reader::err("sweep", "step", "must be positive"));
        }
        if let Some(a0) = r.list("sweep", "a0")? {
            if a0.len() != dim {
                return Err(Reader::err("sweep", "a0", format!("expected {dim} components")));
            }
            if a0.iter().all(|v| *v == 0.0) {
                return Err(Reader::err("sweep", "a0", "a0 must be nonzero"));
            }
            cfg.a0 = a0;
        }
        if let Some(x0) = r.list("sweep", "x0")? {
            cfg.algebra_model()?.element(&x0).map_err(|e| Reader::err("sweep", "x0", e.to_string()))?;
            cfg.x0 = Some(x0);
        }
        cfg.sweep_config().validate(tau).map_err(|e| Reader::err("sweep", "eps", e.to_string()))?;
        Ok(cfg)
    }

    pub fn norm(&self) -> Result<NormModel, ConfigError> {
        Ok(match self.norm_kind {
            NormChoice::Euclidean => NormModel::euclidean(self.dim)?,
            NormChoice::Randers => NormModel::randers(self.drift.clone())?,
            NormChoice::ShiftedMax => NormModel::shifted_max(self.dim)?,
        })
    }

    pub fn algebra_model(&self) -> Result<LieAlgebraModel, ConfigError> {
        if self.algebra != AlgebraName::Custom {
            return Ok(LieAlgebraModel::named(self.algebra)?);
        }
        let d = self.dim;
        let mut c = vec![0.0; d * d * d];
        for &(i, j, k, v) in &self.brackets {
            c[(i * d + j) * d + k] = v;
            c[(j * d + i) * d + k] = -v;
        }
        Ok(LieAlgebraModel::custom(d, c)?)
    }

    pub fn sweep_config(&self) -> SweepConfig {
        let mut s = SweepConfig::new(self.dim, self.eps.clone(), self.a0.clone(), self.span, self.step);
        s.x0 = self.x0.clone();
        s.samples = self.samples.clone();
        s.smoothing = SmoothingOptions { grid: self.profile_grid, ..SmoothingOptions::default_for(self.dim) };
        s.cons_tol = self.cons_tol;
        s.mono_slack = self.mono_slack;
        s.seed = self.seed;
        s
    }

    /// Fully explicit form; parsing it yields the same configuration.
    pub fn to_ini(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# tau = {:?}, r_m = {:?}, r_M = {:?}, gamma = {:?}, gamma0 = {:?}",
            self.constants.tau,
            self.constants.r_m,
            self.constants.r_max,
            self.constants.gamma.value,
            self.constants.gamma0
        );
        let _ = writeln!(s, "[norm]\nkind = {}\ndim = {}", self.norm_kind.as_str(), self.dim);
        if self.norm_kind == NormChoice::Randers {
            let _ = writeln!(s, "drift = {}", list(&self.drift));
        }
        let _ = writeln!(s, "\n[algebra]\nname = {}", self.algebra);
        if self.algebra == AlgebraName::Custom {
            let b: Vec<String> = self.brackets.iter().map(|(i, j, k, c)| format!("{i} {j} {k} {c:?}")).collect();
            let _ = writeln!(s, "dim = {}\nbrackets = {}", self.dim, b.join("; "));
        }
        let _ = writeln!(s, "\n[sweep]\neps = {}", list(&self.eps));
        let _ = writeln!(
            s,
            "span = {}\nstep = {:?}\na0 = {}",
            list(&[self.span.0, self.span.1]),
            self.step,
            list(&self.a0)
        );
        if let Some(x0) = &self.x0 {
            let _ = writeln!(s, "x0 = {}", list(x0));
        }
        let sm = &self.samples;
        let _ = writeln!(
            s,
            "grid_radii = {}\ngrid_directions = {}\nlipschitz_pairs = {}\nconvexity_pairs = {}\nsphere_samples = {}",
            sm.grid_radii, sm.grid_directions, sm.lipschitz_pairs, sm.convexity_pairs, sm.sphere_samples
        );
        let _ = match self.profile_grid {
            ProfileGrid::Circle { count } => writeln!(s, "profile_grid = {count}"),
            ProfileGrid::Sphere { colat, azimuth } => {
                writeln!(s, "profile_grid = {colat}, {azimuth}")
            }
        };
        let _ = writeln!(s, "\n[tolerances]\ncons_tol = {:?}\nmono_slack = {:?}", self.cons_tol, self.mono_slack);
        let _ = writeln!(s, "\n[output]\ndir = {}\nseed = {}\nsvg = {}", self.out_dir.display(), self.seed, self.svg);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves_defaults() {
        let c = ExperimentConfig::parse("[norm]\nkind = euclidean\n[algebra]\nname = abelian2\n").unwrap();
        assert_eq!(c.dim, 2);
        assert_eq!(c.eps.len(), 4);
        assert!((c.constants.tau - 0.999 / 16.0).abs() < 1e-12);
        assert!(c.eps.iter().all(|e| *e < c.constants.tau));
    }

    #[test]
    fn duplicate_key_names_line() {
        let e =
            ExperimentConfig::parse("[norm]\nkind = euclidean\nkind = randers\n[algebra]\nname = so3\n").unwrap_err();
        assert!(matches!(e, ConfigError::Duplicate { line: 3, first: 2, .. }), "{e}");
    }

    #[test]
    fn unknown_keys_are_listed() {
        let e = ExperimentConfig::parse("[norm]\nkind = euclidean\nfoo = 1\n[algebra]\nname = so3\nbar = 2\n[extra]\n")
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("norm.foo") && msg.contains("algebra.bar") && msg.contains("[extra]"), "{msg}");
    }

    #[test]
    fn eps_above_tau_rejected() {
        let e = ExperimentConfig::parse(
            "[norm]\nkind = randers\ndrift = 0.5, 0\n[algebra]\nname = aff_r\n[sweep]\neps = 1.0\n",
        )
        .unwrap_err();
        match e {
            ConfigError::EpsTooLarge { eps, tau } => {
                assert_eq!(eps, 1.0);
                assert!(tau < 1.0 / 48.0);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn zero_a0_rejected() {
        let e = ExperimentConfig::parse("[norm]\nkind = euclidean\n[algebra]\nname = aff_r\n[sweep]\na0 = 0, 0\n")
            .unwrap_err();
        assert!(e.to_string().contains("a0 must be nonzero"));
    }

    #[test]
    fn resolved_round_trip() {
        let c = ExperimentConfig::parse(
            "[norm]\nkind = randers\ndrift = 0.5, 0\n[algebra]\nname = aff_r\n[sweep]\neps_fractions = 0.5, 0.25\nx0 = 0.1, 2\n",
        )
        .unwrap();
        let again = ExperimentConfig::parse(&c.to_ini()).unwrap();
        assert_eq!(c.to_ini(), again.to_ini());
        assert_eq!(c.eps, again.eps);
    }

    #[test]
    fn custom_algebra_from_brackets() {
        let c = ExperimentConfig::parse(
            "[norm]\nkind = euclidean\n[algebra]\nname = custom\ndim = 3\nbrackets = 0 1 2 1.0\n",
        )
        .unwrap();
        let alg = c.algebra_model().unwrap();
        assert_eq!(alg.structure_constant(1, 0, 2), -1.0);
        assert!(!alg.has_realization());
    }
}
