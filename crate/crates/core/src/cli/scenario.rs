use std::fmt;
use std::str::FromStr;

use super::config::{parse_sections, Section};
use crate::error::{Error, Result};
use crate::grid::PolarGrid;
use crate::oracle::SpectrumMode;
use crate::spectrum::{derived_scales, ModelParams, DEFAULT_TRUNC_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Timescales,
    Velocity,
    SpinTrace,
    DensityMap,
    SpinMap,
    JcVelocity,
    JcSpin,
    Cat,
    Fractional,
    Validate,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 10] = [
        ScenarioKind::Timescales,
        ScenarioKind::Velocity,
        ScenarioKind::SpinTrace,
        ScenarioKind::DensityMap,
        ScenarioKind::SpinMap,
        ScenarioKind::JcVelocity,
        ScenarioKind::JcSpin,
        ScenarioKind::Cat,
        ScenarioKind::Fractional,
        ScenarioKind::Validate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Timescales => "timescales",
            ScenarioKind::Velocity => "velocity",
            ScenarioKind::SpinTrace => "spin-trace",
            ScenarioKind::DensityMap => "density-map",
            ScenarioKind::SpinMap => "spin-map",
            ScenarioKind::JcVelocity => "jc-velocity",
            ScenarioKind::JcSpin => "jc-spin",
            ScenarioKind::Cat => "cat",
            ScenarioKind::Fractional => "fractional",
            ScenarioKind::Validate => "validate",
        }
    }

    fn is_time_series(&self) -> bool {
        matches!(
            self,
            ScenarioKind::Velocity
                | ScenarioKind::SpinTrace
                | ScenarioKind::JcVelocity
                | ScenarioKind::JcSpin
                | ScenarioKind::Cat
        )
    }

    fn is_map(&self) -> bool {
        matches!(
            self,
            ScenarioKind::DensityMap | ScenarioKind::SpinMap | ScenarioKind::Fractional
        )
    }

    /// Keys accepted in addition to the common ones.
    fn extra_keys(&self) -> &'static [&'static str] {
        match self {
            k if k.is_time_series() => &["t_start", "t_end", "n_samples"],
            ScenarioKind::DensityMap => &["tau", "rho_max", "n_rho", "n_theta", "packet", "spectrum"],
            ScenarioKind::SpinMap => &["tau", "rho_max", "n_rho", "n_theta"],
            ScenarioKind::Fractional => &["tau", "rho_max", "n_rho", "n_theta", "m", "n"],
            ScenarioKind::Validate => &["quick"],
            _ => &[],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Params(format!("unknown scenario `{s}`")))
    }
}

/// Field family drawn by a density map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapPacket {
    PositiveOnly,
    TwoBand,
    Classical,
}

impl MapPacket {
    pub fn as_str(&self) -> &'static str {
        match self {
            MapPacket::PositiveOnly => "positive_only",
            MapPacket::TwoBand => "two_band",
            MapPacket::Classical => "classical",
        }
    }
}

impl FromStr for MapPacket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive_only" => Ok(MapPacket::PositiveOnly),
            "two_band" => Ok(MapPacket::TwoBand),
            "classical" => Ok(MapPacket::Classical),
            other => Err(Error::Params(format!("unknown packet `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    Cyclotron,
    Damping,
    Revival,
}

impl Anchor {
    fn parse(token: &str) -> Option<Anchor> {
        match token {
            "T_cl" => Some(Anchor::Cyclotron),
            "T_D" => Some(Anchor::Damping),
            "T_R" => Some(Anchor::Revival),
            _ => None,
        }
    }
}

/// `coef` or `coef × anchor`, written like `1.2*T_R`, `T_cl/4` or `350`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeExpr {
    pub coef: f64,
    pub anchor: Option<Anchor>,
}

impl FromStr for TimeExpr {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut coef = 1.0;
        let mut anchor = None;
        let mut rest = s.trim();
        let mut op = '*';
        loop {
            let cut = rest.find(['*', '/']).unwrap_or(rest.len());
            let token = rest[..cut].trim();
            let factor = if let Some(a) = Anchor::parse(token) {
                if anchor.replace(a).is_some() || op == '/' {
                    return Err(format!("bad time expression `{s}`"));
                }
                1.0
            } else {
                token
                    .parse::<f64>()
                    .map_err(|_| format!("bad time expression `{s}`"))?
            };
            if op == '*' {
                coef *= factor;
            } else {
                coef /= factor;
            }
            if cut == rest.len() {
                break;
            }
            op = rest.as_bytes()[cut] as char;
            rest = &rest[cut + 1..];
        }
        if !coef.is_finite() {
            return Err(format!("bad time expression `{s}`"));
        }
        Ok(TimeExpr { coef, anchor })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl TimeSpec {
    pub fn times(&self) -> Vec<f64> {
        if self.n_samples == 1 {
            return vec![self.t_start];
        }
        let step = (self.t_end - self.t_start) / (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|k| self.t_start + k as f64 * step)
            .collect()
    }
}

/// A fully resolved scenario: symbolic times are already numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub params: ModelParams,
    pub time: Option<TimeSpec>,
    pub tau: Option<f64>,
    pub grid: Option<PolarGrid>,
    pub packet: Option<MapPacket>,
    pub spectrum: Option<SpectrumMode>,
    pub fractional: Option<(u64, u64)>,
    pub quick: bool,
    pub output: String,
    /// Keys filled from defaults, in the order they were applied.
    pub defaulted: Vec<String>,
}

const COMMON: [&str; 8] = [
    "name",
    "lambda_over_a",
    "qa",
    "alpha",
    "beta",
    "trunc_tol",
    "n_max",
    "output",
];

struct Reader<'a> {
    section: &'a Section,
    defaulted: Vec<String>,
}

impl<'a> Reader<'a> {
    fn raw(&self, key: &str) -> Option<(&'a str, usize)> {
        self.section.get(key).map(|e| (e.value.as_str(), e.line))
    }

    fn required(&self, key: &str, kind: &str) -> Result<(&'a str, usize)> {
        self.raw(key).ok_or_else(|| {
            Error::config(
                self.section.line,
                format!("missing key `{key}` for scenario `{kind}`"),
            )
        })
    }

    fn parse<T: FromStr>(&self, key: &str, value: &str, line: usize) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        value
            .parse::<T>()
            .map_err(|e| Error::config(line, format!("bad value for `{key}`: {e}")))
    }

    fn number(&self, key: &str, kind: &str) -> Result<f64> {
        let (v, line) = self.required(key, kind)?;
        self.parse(key, v, line)
    }

    fn or_default<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            Some((v, line)) => self.parse(key, v, line),
            None => {
                self.defaulted.push(key.to_string());
                Ok(default)
            }
        }
    }
}

fn resolve_time(
    expr: TimeExpr,
    params: &ModelParams,
    line: usize,
) -> Result<f64> {
    let Some(anchor) = expr.anchor else {
        return Ok(expr.coef);
    };
    let scales = derived_scales(params)
        .map_err(|e| Error::config(line, format!("cannot resolve symbolic time: {e}")))?;
    let base = match anchor {
        Anchor::Cyclotron => scales.t_cl,
        Anchor::Damping => scales.t_d,
        Anchor::Revival => scales.t_r,
    };
    Ok(expr.coef * base)
}

fn scenario_from_section(section: &Section) -> Result<Scenario> {
    let mut r = Reader {
        section,
        defaulted: Vec::new(),
    };
    let (name, name_line) = r.raw("name").ok_or_else(|| {
        Error::config(section.line, "missing key `name`")
    })?;
    let kind: ScenarioKind = r.parse("name", name, name_line)?;
    for e in &section.entries {
        if !COMMON.contains(&e.key.as_str()) && !kind.extra_keys().contains(&e.key.as_str()) {
            return Err(Error::config(
                e.line,
                format!("unknown key `{}` for scenario `{kind}`", e.key),
            ));
        }
    }
    let k = kind.as_str();
    let mut params = ModelParams::new(
        r.number("lambda_over_a", k)?,
        r.number("qa", k)?,
        r.number("alpha", k)?,
        r.number("beta", k)?,
    )
    .map_err(|e| Error::config(section.line, e.to_string()))?;
    let tol = r.or_default("trunc_tol", DEFAULT_TRUNC_TOL)?;
    params = params
        .with_trunc_tol(tol)
        .map_err(|e| Error::config(section.line, e.to_string()))?;
    if let Some((v, line)) = r.raw("n_max") {
        params = params.with_n_max(Some(r.parse("n_max", v, line)?));
    }
    let symbolic = |r: &Reader, key: &str| -> Result<f64> {
        let (v, line) = r.required(key, k)?;
        let expr: TimeExpr = r.parse(key, v, line)?;
        resolve_time(expr, &params, line)
    };

    let time = if kind.is_time_series() {
        let t_start = match r.raw("t_start") {
            Some(_) => symbolic(&r, "t_start")?,
            None => {
                r.defaulted.push("t_start".into());
                0.0
            }
        };
        let t_end = symbolic(&r, "t_end")?;
        let (v, line) = r.required("n_samples", k)?;
        let n_samples: usize = r.parse("n_samples", v, line)?;
        if n_samples < 2 || !(t_end > t_start) {
            return Err(Error::config(
                line,
                format!("need n_samples >= 2 and t_end > t_start (got {n_samples}, [{t_start}, {t_end}])"),
            ));
        }
        Some(TimeSpec {
            t_start,
            t_end,
            n_samples,
        })
    } else {
        None
    };

    let (tau, grid) = if kind.is_map() {
        let tau = symbolic(&r, "tau")?;
        let base = PolarGrid::default_for(&params);
        let rho_max: f64 = r.or_default("rho_max", base.rho_max)?;
        let n_rho: usize = r.or_default("n_rho", base.n_rho)?;
        let n_theta: usize = r.or_default("n_theta", base.n_theta)?;
        if !(rho_max > 0.0) || n_rho < 2 || n_theta < 1 {
            return Err(Error::config(section.line, "grid needs rho_max > 0, n_rho >= 2, n_theta >= 1"));
        }
        (Some(tau), Some(PolarGrid::new(rho_max, n_rho, n_theta)))
    } else {
        (None, None)
    };

    let (packet, spectrum) = if kind == ScenarioKind::DensityMap {
        let (v, line) = r.required("packet", k)?;
        let packet: MapPacket = r.parse("packet", v, line)?;
        let spectrum: SpectrumMode = r.or_default("spectrum", SpectrumMode::Exact)?;
        if spectrum == SpectrumMode::Taylor2 && packet == MapPacket::Classical {
            return Err(Error::config(line, "the classical packet has no spectrum option"));
        }
        (Some(packet), Some(spectrum))
    } else {
        (None, None)
    };

    let fractional = if kind == ScenarioKind::Fractional {
        let (m, ml) = r.required("m", k)?;
        let (n, nl) = r.required("n", k)?;
        let m: u64 = r.parse("m", m, ml)?;
        let n: u64 = r.parse("n", n, nl)?;
        crate::spectrum::fractional_revival_count(m, n)
            .map_err(|e| Error::config(nl, e.to_string()))?;
        Some((m, n))
    } else {
        None
    };

    let quick = if kind == ScenarioKind::Validate {
        r.or_default("quick", false)?
    } else {
        false
    };
    let output = r.or_default("output", format!("{k}.csv"))?;
    if output.contains('/') || output.contains('\\') || output.starts_with('.') {
        return Err(Error::config(section.line, format!("output must be a plain file name, got `{output}`")));
    }

    Ok(Scenario {
        kind,
        params,
        time,
        tau,
        grid,
        packet,
        spectrum,
        fractional,
        quick,
        output,
        defaulted: r.defaulted,
    })
}

/// Parses and resolves every `[scenario]` section.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>> {
    let scenarios = parse_sections(text)?
        .iter()
        .map(scenario_from_section)
        .collect::<Result<Vec<_>>>()?;
    for (i, s) in scenarios.iter().enumerate() {
        if scenarios[..i].iter().any(|p| p.output == s.output) {
            return Err(Error::config(0, format!("two scenarios write `{}`", s.output)));
        }
    }
    Ok(scenarios)
}

impl Scenario {
    /// `# key = value` lines that parse back to this scenario.
    pub fn provenance_lines(&self) -> Vec<String> {
        let p = &self.params;
        let mut kv: Vec<(&str, String)> = vec![
            ("name", self.kind.to_string()),
            ("lambda_over_a", p.lambda_over_a.to_string()),
            ("qa", p.qa.to_string()),
            ("alpha", p.alpha.to_string()),
            ("beta", p.beta.to_string()),
            ("trunc_tol", p.trunc_tol.to_string()),
        ];
        if let Some(n) = p.n_max_override {
            kv.push(("n_max", n.to_string()));
        }
        if let Some(t) = self.time {
            kv.push(("t_start", t.t_start.to_string()));
            kv.push(("t_end", t.t_end.to_string()));
            kv.push(("n_samples", t.n_samples.to_string()));
        }
        if let Some(tau) = self.tau {
            kv.push(("tau", tau.to_string()));
        }
        if let Some(g) = self.grid {
            kv.push(("rho_max", g.rho_max.to_string()));
            kv.push(("n_rho", g.n_rho.to_string()));
            kv.push(("n_theta", g.n_theta.to_string()));
        }
        if let Some(pk) = self.packet {
            kv.push(("packet", pk.as_str().to_string()));
        }
        if let Some(sp) = self.spectrum {
            kv.push(("spectrum", sp.as_str().to_string()));
        }
        if let Some((m, n)) = self.fractional {
            kv.push(("m", m.to_string()));
            kv.push(("n", n.to_string()));
        }
        if self.kind == ScenarioKind::Validate {
            kv.push(("quick", self.quick.to_string()));
        }
        kv.push(("output", self.output.clone()));
        kv.into_iter().map(|(k, v)| format!("# {k} = {v}")).collect()
    }

    /// Whether `other` is the same resolved plan, ignoring which keys were defaulted.
    pub fn same_plan(&self, other: &Scenario) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.defaulted.clear();
        b.defaulted.clear();
        a == b
    }
}
