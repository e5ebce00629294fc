//! Run configuration: a flat `key = value` file overridden by command-line
//! flags.
//!
//! Recognized keys (flag names, `-` and `_` interchangeable):
//! `domain`, `n`, `problem`, `case`, `data`, `csv`, `b`, `r`, `alpha`, `p`,
//! `tau`, `delta_c`, `trace`, `out`, `refine`, `sizes`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dbar_core::solvers::ProblemData;
use dbar_core::verify::ManufacturedCase;
use dbar_core::{
    BoundaryCurve, BoundaryFunction, Complex64, DomainSpec, ProblemKind, RobinCoefficient, SolveConfig, TraceMethod,
};

use crate::expr::Expr;

pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_OUT: &str = "dbar-out";
pub const DEFAULT_ROBIN_B: &str = "0.5";

const KEYS: [&str; 16] = [
    "domain", "n", "problem", "case", "data", "csv", "b", "r", "alpha", "p", "tau", "delta_c", "trace", "out", "refine",
    "sizes",
];

/// Raw settings before validation; later sources override earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| format!("config line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key `{key}`", lineno + 1));
            }
            let value = value.trim().trim_matches('"').to_string();
            map.insert(key, value);
        }
        Ok(Self(map))
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.get(key).map(|v| v.parse::<T>().map_err(|_| format!("{key}: cannot parse `{v}`"))).transpose()
    }
}

#[derive(Clone, Debug)]
pub enum DataSource {
    Case(String),
    Expression(Expr),
    Csv(PathBuf),
}

impl DataSource {
    /// Data that can be regenerated on a finer grid.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, DataSource::Csv(_))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub problem: ProblemKind,
    pub source: DataSource,
    pub b: Expr,
    pub alpha: Option<Complex64>,
    pub solve: SolveConfig,
    pub out: PathBuf,
    pub refine: bool,
}

pub fn parse_domain(text: &str, n: usize) -> Result<DomainSpec, String> {
    let (kind, args) = text.split_once(':').unwrap_or((text, ""));
    let numbers = |s: &str| -> Result<Vec<f64>, String> {
        s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| format!("domain: bad number `{v}`"))).collect()
    };
    match kind.trim() {
        "disk" | "unit_disk" if args.is_empty() => Ok(DomainSpec::unit_disk(n)),
        "disk" => match numbers(args)?.as_slice() {
            [x, y, r] => Ok(DomainSpec::disk(Complex64::new(*x, *y), *r, n)),
            _ => Err("domain: expected disk:cx,cy,r".into()),
        },
        "square" | "unit_square" => Ok(DomainSpec::unit_square(n)),
        "ellipse" => match numbers(args)?.as_slice() {
            [a, b] => Ok(DomainSpec::ellipse(*a, *b, n)),
            _ => Err("domain: expected ellipse:a,b".into()),
        },
        "polygon" => {
            let vertices = args
                .split(';')
                .map(|pair| match numbers(pair)?.as_slice() {
                    [x, y] => Ok(Complex64::new(*x, *y)),
                    _ => Err(format!("domain: bad vertex `{pair}`")),
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(DomainSpec::polygon(vertices, n))
        }
        other => Err(format!("domain: unknown kind `{other}` (disk, square, ellipse:a,b, polygon:x,y;...)")),
    }
}

pub fn parse_trace(text: &str) -> Result<TraceMethod, String> {
    match text {
        "pv" | "pv_subtraction" => Ok(TraceMethod::PvSubtraction),
        "offset" | "offset_extrapolation" => Ok(TraceMethod::offset(2)),
        "offset1" => Ok(TraceMethod::offset(1)),
        other => Err(format!("trace: unknown method `{other}` (pv, offset, offset1)")),
    }
}

pub fn parse_bool(key: &str, text: &str) -> Result<bool, String> {
    match text {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("{key}: expected true or false, got `{other}`")),
    }
}

impl RunConfig {
    pub fn resolve(s: &Settings) -> Result<Self, String> {
        let n = s.parse_num::<usize>("n")?.unwrap_or(DEFAULT_NODES);
        let domain = parse_domain(s.get("domain").unwrap_or("disk"), n)?;
        let problem: ProblemKind = s.get("problem").unwrap_or("dirichlet").parse().map_err(|e| format!("{e}"))?;

        let mut sources = Vec::new();
        if let Some(name) = s.get("case") {
            sources.push(DataSource::Case(name.to_string()));
        }
        if let Some(e) = s.get("data") {
            sources.push(DataSource::Expression(Expr::parse(e).map_err(|m| format!("data: {m}"))?));
        }
        if let Some(e) = s.get("r") {
            if problem != ProblemKind::Robin {
                return Err("r: only applies to the robin problem".into());
            }
            sources.push(DataSource::Expression(Expr::parse(e).map_err(|m| format!("r: {m}"))?));
        }
        if let Some(path) = s.get("csv") {
            sources.push(DataSource::Csv(PathBuf::from(path)));
        }
        let source = match sources.len() {
            1 => sources.pop().expect("one source"),
            0 => return Err("no data source: give one of --case, --data, --r or --csv".into()),
            _ => return Err("more than one data source given".into()),
        };

        if s.get("b").is_some() && problem != ProblemKind::Robin {
            return Err("b: only applies to the robin problem".into());
        }
        let b = Expr::parse(s.get("b").unwrap_or(DEFAULT_ROBIN_B)).map_err(|m| format!("b: {m}"))?;
        if matches!(source, DataSource::Case(_)) && problem == ProblemKind::Robin && !b.is_constant() {
            return Err("b: catalog cases take a constant Robin coefficient".into());
        }
        let alpha = match s.get("alpha") {
            None => None,
            Some(text) => {
                if problem != ProblemKind::Neumann {
                    return Err("alpha: only applies to the neumann problem".into());
                }
                let e = Expr::parse(text).map_err(|m| format!("alpha: {m}"))?;
                Some(e.constant_value().ok_or("alpha: must be a constant")?)
            }
        };

        let mut solve = SolveConfig::default();
        if let Some(p) = s.parse_num::<f64>("p")? {
            solve.p = p;
        }
        if let Some(tau) = s.parse_num::<f64>("tau")? {
            solve.tau = tau;
        }
        if let Some(dc) = s.parse_num::<f64>("delta_c")? {
            solve.delta_c = dc;
        }
        if let Some(t) = s.get("trace") {
            solve.trace = parse_trace(t)?;
        }
        solve.validate().map_err(|e| e.to_string())?;
        let refine = s.get("refine").map(|v| parse_bool("refine", v)).transpose()?.unwrap_or(true);
        let out = PathBuf::from(s.get("out").unwrap_or(DEFAULT_OUT));
        Ok(Self { domain, problem, source, b, alpha, solve, out, refine })
    }

    fn function(&self, curve: &Arc<BoundaryCurve>, e: &Expr) -> dbar_core::Result<BoundaryFunction> {
        BoundaryFunction::from_fn(curve, |z, t| e.eval(z, t))
    }

    pub fn robin_coefficient(&self, curve: &Arc<BoundaryCurve>) -> dbar_core::Result<RobinCoefficient> {
        Ok(RobinCoefficient::new(self.function(curve, &self.b)?))
    }

    /// Problem data on `curve` from the configured source.
    pub fn problem_data(&self, curve: &Arc<BoundaryCurve>) -> dbar_core::Result<ProblemData> {
        let alpha = self.alpha.unwrap_or_else(|| curve.interior_reference());
        let data = match &self.source {
            DataSource::Case(name) => {
                let b = self.b.constant_value().unwrap_or(Complex64::new(0.5, 0.0));
                let case = ManufacturedCase::with_robin(name, curve, b)?;
                return Ok(match case.problem_data(self.problem) {
                    ProblemData::Neumann { g, .. } => ProblemData::Neumann { g, alpha: self.alpha.unwrap_or(case.alpha()) },
                    other => other,
                });
            }
            DataSource::Expression(e) => self.function(curve, e)?,
            DataSource::Csv(path) => BoundaryFunction::read_csv(curve, std::fs::File::open(path)?)?,
        };
        Ok(match self.problem {
            ProblemKind::Dirichlet => ProblemData::Dirichlet(data),
            ProblemKind::Regularity => ProblemData::Regularity(data),
            ProblemKind::Neumann => ProblemData::Neumann { g: data, alpha },
            ProblemKind::Robin => ProblemData::Robin { coef: self.robin_coefficient(curve)?, r: data },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let mut s = Settings::default();
        for (k, v) in pairs {
            s.set(k, Some(v.to_string()));
        }
        s
    }

    #[test]
    fn config_file_parsing() {
        let s = Settings::parse("# comment\ndomain = square\n\nn=128\ndelta-c = 1e-9\ncase = \"poly3\"\n").unwrap();
        assert_eq!(s.get("domain"), Some("square"));
        assert_eq!(s.get("delta_c"), Some("1e-9"));
        let cfg = RunConfig::resolve(&s).unwrap();
        assert_eq!(cfg.domain.n_nodes, 128);
        assert_eq!(cfg.solve.delta_c, 1e-9);
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("domain square").is_err());
    }

    #[test]
    fn exactly_one_source() {
        assert!(RunConfig::resolve(&settings(&[])).is_err());
        assert!(RunConfig::resolve(&settings(&[("case", "poly3"), ("data", "z")])).is_err());
        assert!(RunConfig::resolve(&settings(&[("data", "z"), ("r", "z")])).is_err());
        assert!(RunConfig::resolve(&settings(&[("problem", "robin"), ("r", "0"), ("b", "-1")])).is_ok());
    }

    #[test]
    fn domains() {
        assert!(parse_domain("disk", 64).is_ok());
        assert!(parse_domain("disk:0,0,2", 64).is_ok());
        assert!(parse_domain("ellipse:2,1", 64).is_ok());
        assert!(parse_domain("polygon:0,0;1,0;0,1", 64).is_ok());
        assert!(parse_domain("torus", 64).is_err());
        assert!(parse_domain("ellipse:2", 64).is_err());
    }

    #[test]
    fn option_scoping() {
        assert!(RunConfig::resolve(&settings(&[("data", "z"), ("alpha", "0.1")])).is_err());
        assert!(RunConfig::resolve(&settings(&[("data", "z"), ("b", "1")])).is_err());
        let cfg = RunConfig::resolve(&settings(&[("problem", "neumann"), ("data", "2*z^2"), ("alpha", "0.1+0.2i")])).unwrap();
        assert_eq!(cfg.alpha, Some(Complex64::new(0.1, 0.2)));
        assert!(RunConfig::resolve(&settings(&[("data", "z"), ("p", "1")])).is_err());
    }
}
