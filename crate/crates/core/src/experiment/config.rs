//! Experiment configuration: defaults, a flat `key = value` file format and
//! command-line overrides, merged in that order of increasing precedence.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{BodyKind, ConvexBody};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Clt,
    VarianceScan,
    GammaScan,
    D1MomentScan,
    FloatingContainment,
    Lemma1Angle,
    WetPartExponent,
    VisibleDiameter,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::Clt,
        Self::VarianceScan,
        Self::GammaScan,
        Self::D1MomentScan,
        Self::FloatingContainment,
        Self::Lemma1Angle,
        Self::WetPartExponent,
        Self::VisibleDiameter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Clt => "clt",
            Self::VarianceScan => "variance-scan",
            Self::GammaScan => "gamma-scan",
            Self::D1MomentScan => "d1-moment-scan",
            Self::FloatingContainment => "floating-containment",
            Self::Lemma1Angle => "lemma1-angle",
            Self::WetPartExponent => "wet-part-exponent",
            Self::VisibleDiameter => "visible-diameter",
        }
    }

    pub fn is_geometry_check(self) -> bool {
        matches!(
            self,
            Self::FloatingContainment | Self::Lemma1Angle | Self::WetPartExponent | Self::VisibleDiameter
        )
    }

    fn default_grid(self) -> Vec<usize> {
        match self {
            Self::FloatingContainment | Self::GammaScan => vec![250, 500, 1000, 2000],
            _ => vec![250, 500, 1000, 2000, 4000],
        }
    }

    fn default_reps(self) -> usize {
        match self {
            Self::GammaScan => 1000,
            Self::FloatingContainment => 40_000,
            Self::VisibleDiameter => 20,
            Self::Lemma1Angle | Self::WetPartExponent => 2,
            _ => 2000,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let alias = match s {
            "d1-scan" => Some(Self::D1MomentScan),
            _ => None,
        };
        alias
            .or_else(|| Self::ALL.into_iter().find(|k| k.name() == s))
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                format!("unknown experiment `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Which intrinsic volumes to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSpec {
    All,
    One(usize),
}

impl IndexSpec {
    pub fn indices(self, n: usize) -> Vec<usize> {
        match self {
            Self::All => (1..=n).collect(),
            Self::One(j) => vec![j],
        }
    }
}

impl FromStr for IndexSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "all" => Ok(Self::All),
            t => t
                .parse()
                .map(Self::One)
                .map_err(|_| format!("`{t}` is neither an index nor `all`")),
        }
    }
}

/// Textual body descriptor: `ball`, `ball:<radius>` or `ellipsoid:<a1>,<a2>,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum BodySpec {
    Ball(f64),
    AxisEllipsoid(Vec<f64>),
}

impl BodySpec {
    pub fn build(&self, n: usize, normalize: bool) -> Result<ConvexBody> {
        let kind = match self {
            Self::Ball(r) if *r == 1.0 => BodyKind::UnitBall,
            Self::Ball(r) => BodyKind::ScaledBall(*r),
            Self::AxisEllipsoid(axes) => {
                if axes.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: axes.len(),
                    });
                }
                let mut a = vec![0.0; n * n];
                for (k, &s) in axes.iter().enumerate() {
                    a[k * n + k] = s;
                }
                BodyKind::Ellipsoid(a)
            }
        };
        ConvexBody::new(n, kind, normalize)
    }
}

impl FromStr for BodySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "ball" if tail.is_empty() => Ok(Self::Ball(1.0)),
            "ball" => tail
                .parse()
                .map(Self::Ball)
                .map_err(|_| format!("bad radius `{tail}`")),
            "ellipsoid" => parse_list::<f64>(tail).map(Self::AxisEllipsoid),
            _ => Err(format!("unknown body `{s}` (expected ball, ball:<r> or ellipsoid:<a1>,...)")),
        }
    }
}

impl fmt::Display for BodySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ball(r) => write!(f, "ball:{r}"),
            Self::AxisEllipsoid(a) => {
                let parts: Vec<String> = a.iter().map(f64::to_string).collect();
                write!(f, "ellipsoid:{}", parts.join(","))
            }
        }
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| format!("bad list entry `{p}`")))
        .collect()
}

/// Optional settings from one source (file or command line).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub experiment: Option<ExperimentKind>,
    pub n: Option<usize>,
    pub j: Option<IndexSpec>,
    pub body: Option<BodySpec>,
    pub normalize: Option<bool>,
    pub n_grid: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub kubota_subspaces: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub samples: Option<usize>,
    pub c: Option<f64>,
    pub variance_reps: Option<usize>,
    pub calibration_reps: Option<usize>,
    pub mixed_patterns: Option<usize>,
}

impl ConfigOverrides {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let location = format!("{origin}:{}", lineno + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                location: location.clone(),
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            out.set(key.trim(), value.trim())
                .map_err(|message| Error::Config { location, message })?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("`{key}`: cannot parse `{v}`"))
        }
        match key.replace('-', "_").as_str() {
            "experiment" => self.experiment = Some(value.parse()?),
            "n" => self.n = Some(num(key, value)?),
            "j" => self.j = Some(value.parse()?),
            "body" => self.body = Some(value.parse()?),
            "normalize" => self.normalize = Some(num(key, value)?),
            "n_grid" | "N_grid" => self.n_grid = Some(parse_list(value).map_err(|e| format!("`{key}`: {e}"))?),
            "reps" | "replications" | "M" => self.reps = Some(num(key, value)?),
            "kubota_subspaces" | "m" => self.kubota_subspaces = Some(num(key, value)?),
            "seed" => self.seed = Some(num(key, value)?),
            "output_dir" | "out" => self.output_dir = Some(PathBuf::from(value)),
            "samples" => self.samples = Some(num(key, value)?),
            "c" => self.c = Some(num(key, value)?),
            "variance_reps" => self.variance_reps = Some(num(key, value)?),
            "calibration_reps" => self.calibration_reps = Some(num(key, value)?),
            "mixed_patterns" => self.mixed_patterns = Some(num(key, value)?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Fields set here win over `base`.
    pub fn over(self, base: Self) -> Self {
        Self {
            experiment: self.experiment.or(base.experiment),
            n: self.n.or(base.n),
            j: self.j.or(base.j),
            body: self.body.or(base.body),
            normalize: self.normalize.or(base.normalize),
            n_grid: self.n_grid.or(base.n_grid),
            reps: self.reps.or(base.reps),
            kubota_subspaces: self.kubota_subspaces.or(base.kubota_subspaces),
            seed: self.seed.or(base.seed),
            output_dir: self.output_dir.or(base.output_dir),
            samples: self.samples.or(base.samples),
            c: self.c.or(base.c),
            variance_reps: self.variance_reps.or(base.variance_reps),
            calibration_reps: self.calibration_reps.or(base.calibration_reps),
            mixed_patterns: self.mixed_patterns.or(base.mixed_patterns),
        }
    }
}

/// A fully resolved and validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub j: IndexSpec,
    pub body: BodySpec,
    pub normalize: bool,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub kubota_subspaces: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Per-replicate sample count for Monte Carlo geometry checks.
    pub samples: usize,
    /// Multiplier in the floating-body parameter `t = c · vol(K) · log N / N`.
    pub c: f64,
    /// Replicates used for `Var W` in the γ scan.
    pub variance_reps: usize,
    /// Replicates of the independent calibration run in the containment check.
    pub calibration_reps: usize,
    pub mixed_patterns: usize,
}

impl ExperimentConfig {
    /// Defaults for `kind`, with `n = 2` and `j = n`.
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            n: 2,
            j: IndexSpec::One(2),
            body: BodySpec::Ball(1.0),
            normalize: false,
            n_grid: kind.default_grid(),
            reps: kind.default_reps(),
            kubota_subspaces: 64,
            seed: 1,
            output_dir: PathBuf::from("out"),
            samples: match kind {
                ExperimentKind::Lemma1Angle => 100_000,
                _ => 20_000,
            },
            c: 1.0,
            variance_reps: 10_000,
            calibration_reps: 10_000,
            mixed_patterns: 1,
        }
    }

    /// Merge `cli` over `file` over the defaults of the chosen experiment.
    pub fn resolve(file: ConfigOverrides, cli: ConfigOverrides) -> Result<Self> {
        let merged = cli.over(file);
        let kind = merged.experiment.ok_or_else(|| Error::Config {
            location: "experiment".into(),
            message: "no experiment given".into(),
        })?;
        let d = Self::defaults(kind);
        let n = merged.n.unwrap_or(d.n);
        let cfg = Self {
            experiment: kind,
            n,
            j: merged.j.unwrap_or(IndexSpec::One(n)),
            body: merged.body.unwrap_or(d.body),
            normalize: merged.normalize.unwrap_or(d.normalize),
            n_grid: merged.n_grid.unwrap_or(d.n_grid),
            reps: merged.reps.unwrap_or(d.reps),
            kubota_subspaces: merged.kubota_subspaces.unwrap_or(d.kubota_subspaces),
            seed: merged.seed.unwrap_or(d.seed),
            output_dir: merged.output_dir.unwrap_or(d.output_dir),
            samples: merged.samples.unwrap_or(d.samples),
            c: merged.c.unwrap_or(d.c),
            variance_reps: merged.variance_reps.unwrap_or(d.variance_reps),
            calibration_reps: merged.calibration_reps.unwrap_or(d.calibration_reps),
            mixed_patterns: merged.mixed_patterns.unwrap_or(d.mixed_patterns),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| {
            Err(Error::Config {
                location: field.to_string(),
                message,
            })
        };
        if self.n < 2 {
            return bad("n", format!("dimension must be at least 2, got {}", self.n));
        }
        if let IndexSpec::One(j) = self.j {
            if j == 0 || j > self.n {
                return bad("j", format!("need 1 ≤ j ≤ {}, got {j}", self.n));
            }
        }
        if self.n_grid.is_empty() {
            return bad("N_grid", "empty grid".into());
        }
        if let Some(w) = self.n_grid.windows(2).find(|w| w[1] <= w[0]) {
            return bad("N_grid", format!("not strictly increasing at {} → {}", w[0], w[1]));
        }
        if self.n_grid[0] < self.n + 3 {
            return bad("N_grid", format!("smallest N must be at least n + 3 = {}", self.n + 3));
        }
        if self.reps < 2 {
            return bad("reps", format!("need at least 2 replications, got {}", self.reps));
        }
        if self.kubota_subspaces < 2 {
            return bad("kubota_subspaces", "need at least 2 subspaces".into());
        }
        if self.variance_reps < 2 || self.calibration_reps < 2 {
            return bad("variance_reps", "auxiliary replicate counts must be at least 2".into());
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c", format!("{} is not a positive number", self.c));
        }
        if self.samples < 2 {
            return bad("samples", "need at least 2 samples".into());
        }
        self.body
            .build(self.n, self.normalize)
            .map_err(|e| Error::Config {
                location: "body".into(),
                message: e.to_string(),
            })?;
        Ok(())
    }

    pub fn build_body(&self) -> Result<ConvexBody> {
        self.body.build(self.n, self.normalize)
    }
}
