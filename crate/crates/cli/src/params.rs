//! Experiment parameters: schema defaults, preset files, command-line flags
//! and sweep specifications.

use std::collections::BTreeMap;
use std::fmt;

/// A usage error: bad flag, unknown key, unparsable value. Exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub type UsageResult<T> = std::result::Result<T, UsageError>;

fn usage<T>(msg: impl Into<String>) -> UsageResult<T> {
    Err(UsageError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Real,
    Count,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn real(name: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: Kind::Real,
        default,
        help,
    }
}

pub const fn count(name: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: Kind::Count,
        default,
        help,
    }
}

/// Validated values for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Params {
    pub fn f(&self, name: &str) -> f64 {
        self.values[name]
    }

    pub fn n(&self, name: &str) -> usize {
        self.values[name] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.values.iter()
    }
}

fn parse_value(spec: &ParamSpec, raw: &str) -> UsageResult<f64> {
    let v: f64 = match raw.trim().parse() {
        Ok(v) => v,
        Err(_) => return usage(format!("{}: not a number: {raw:?}", spec.name)),
    };
    if !v.is_finite() {
        return usage(format!("{}: value must be finite", spec.name));
    }
    if spec.kind == Kind::Count && (v < 0.0 || v.fract() != 0.0) {
        return usage(format!(
            "{}: expected a non-negative integer, got {raw}",
            spec.name
        ));
    }
    Ok(v)
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_preset(text: &str) -> UsageResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                out.push((k.trim().to_string(), v.trim().to_string()))
            }
            _ => return usage(format!("preset line {}: expected key = value", i + 1)),
        }
    }
    Ok(out)
}

/// Merge defaults, preset pairs and flag pairs (later wins) against `schema`.
pub fn resolve(
    schema: &[ParamSpec],
    layers: &[Vec<(String, String)>],
    seed: u64,
) -> UsageResult<Params> {
    let mut values = BTreeMap::new();
    for s in schema {
        values.insert(s.name.to_string(), parse_value(s, s.default)?);
    }
    for layer in layers {
        for (k, v) in layer {
            let Some(s) = schema.iter().find(|s| s.name == k) else {
                return usage(format!("unknown parameter {k:?}"));
            };
            values.insert(k.clone(), parse_value(s, v)?);
        }
    }
    Ok(Params { values, seed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<f64>,
}

/// `key=a..b[:lin|:log][:n]` or `key=v1,v2,...`.
///
/// Log sweeps default to two points per decade plus the end point, linear
/// sweeps to 11 points.
pub fn parse_sweep(spec: &str) -> UsageResult<Sweep> {
    let Some((key, rest)) = spec.split_once('=') else {
        return usage(format!("sweep {spec:?}: expected key=range"));
    };
    let key = key.trim().to_string();
    let num = |s: &str| -> UsageResult<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map_or_else(|| usage(format!("sweep {spec:?}: bad number {s:?}")), Ok)
    };
    if !rest.contains("..") {
        let values = rest.split(',').map(num).collect::<UsageResult<Vec<_>>>()?;
        return Ok(Sweep { key, values });
    }
    let mut parts = rest.split(':');
    let range = parts.next().unwrap_or("");
    let (a, b) = range
        .split_once("..")
        .map_or_else(|| usage(format!("sweep {spec:?}: bad range")), Ok)?;
    let (a, b) = (num(a)?, num(b)?);
    let mode = parts.next().unwrap_or("lin");
    let n = match parts.next() {
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 2 => Some(n),
            _ => {
                return usage(format!(
                    "sweep {spec:?}: point count must be an integer >= 2"
                ))
            }
        },
        None => None,
    };
    if parts.next().is_some() {
        return usage(format!("sweep {spec:?}: too many fields"));
    }
    let values = match mode {
        "lin" => {
            let n = n.unwrap_or(11);
            (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect()
        }
        "log" => {
            if !(a > 0.0 && b > 0.0) {
                return usage(format!("sweep {spec:?}: log range needs positive ends"));
            }
            let decades = (b / a).log10().abs();
            let n = n.unwrap_or((2.0 * decades).round() as usize + 1).max(2);
            let (la, lb) = (a.log10(), b.log10());
            (0..n)
                .map(|i| 10f64.powf(la + (lb - la) * i as f64 / (n - 1) as f64))
                .collect()
        }
        other => {
            return usage(format!(
                "sweep {spec:?}: unknown scale {other:?} (lin or log)"
            ))
        }
    };
    Ok(Sweep { key, values })
}

/// Split `--key value` / `--key=value` pairs.
pub fn parse_flags(args: &[String]) -> UsageResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--") else {
            return usage(format!("unexpected argument {a:?}"));
        };
        if let Some((k, v)) = flag.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            match it.next() {
                Some(v) => out.push((flag.to_string(), v.clone())),
                None => return usage(format!("--{flag} needs a value")),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: [ParamSpec; 2] = [real("g0", "10", ""), count("points", "96", "")];

    #[test]
    fn layers_override_in_order() {
        let p = resolve(
            &SCHEMA,
            &[
                vec![("g0".into(), "3".into())],
                vec![("g0".into(), "4.5".into())],
            ],
            1,
        )
        .unwrap();
        assert_eq!(p.f("g0"), 4.5);
        assert_eq!(p.n("points"), 96);
    }

    #[test]
    fn schema_violations() {
        assert!(resolve(&SCHEMA, &[vec![("nope".into(), "1".into())]], 1).is_err());
        assert!(resolve(&SCHEMA, &[vec![("points".into(), "2.5".into())]], 1).is_err());
        assert!(resolve(&SCHEMA, &[vec![("g0".into(), "abc".into())]], 1).is_err());
    }

    #[test]
    fn sweeps() {
        let s = parse_sweep("g0=1..1000:log").unwrap();
        assert_eq!(s.values.len(), 7);
        assert!((s.values[6] - 1000.0).abs() < 1e-9);
        assert_eq!(
            parse_sweep("x=0..1:lin:3").unwrap().values,
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(parse_sweep("x=1,2,5").unwrap().values, vec![1.0, 2.0, 5.0]);
        assert!(parse_sweep("x=0..1:log").is_err());
        assert!(parse_sweep("x").is_err());
    }

    #[test]
    fn presets_and_flags() {
        let p = parse_preset("# c\n tau = 1e-9 # lifetime\n\nx=2\n").unwrap();
        assert_eq!(
            p,
            vec![("tau".into(), "1e-9".into()), ("x".into(), "2".into())]
        );
        assert!(parse_preset("junk").is_err());
        let f = parse_flags(&["--a".into(), "1".into(), "--b=2".into()]).unwrap();
        assert_eq!(f, vec![("a".into(), "1".into()), ("b".into(), "2".into())]);
        assert!(parse_flags(&["--a".into()]).is_err());
        assert!(parse_flags(&["a".into()]).is_err());
    }
}
