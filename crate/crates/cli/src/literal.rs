//! Typed literals of the config format: reals, integers, lists, regions, model
//! descriptors and schedules.

use asclt::asclt::Schedule;
use asclt::domain::{Halfspace, Region};
use asclt::functionals::{ModelKind, VolumeMethod};

pub type ParseResult<T> = std::result::Result<T, String>;

pub fn parse_real(s: &str) -> ParseResult<f64> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a real number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

pub fn parse_int<T: std::str::FromStr>(s: &str) -> ParseResult<T> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

pub fn parse_bool(s: &str) -> ParseResult<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

/// `[a, b, c]`; the empty list is `[]`.
pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> ParseResult<T>) -> ParseResult<Vec<T>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("`{s}` is not a list literal"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top_level(inner, ',').into_iter().map(|p| item(p)).collect()
}

pub fn format_list<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Splits on `sep` outside of parentheses and brackets.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// `name(args)` → `(name, args)`; a bare word has no arguments.
fn call(s: &str) -> ParseResult<(&str, Option<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, None)),
        Some(i) => {
            let args = s[i + 1..].strip_suffix(')').ok_or_else(|| format!("unbalanced parentheses in `{s}`"))?;
            Ok((s[..i].trim(), Some(args)))
        }
    }
}

fn reals(s: &str) -> ParseResult<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

/// `box(l1,l2; u1,u2)`, `ball(c1,c2; r)` or `halfspaces(a1,a2: b; …)`.
pub fn parse_region(s: &str) -> ParseResult<Region> {
    let (name, args) = call(s)?;
    let args = args.ok_or_else(|| format!("region `{s}` needs arguments"))?;
    let groups: Vec<&str> = args.split(';').map(str::trim).collect();
    let region = match name {
        "box" => {
            let [lo, hi] = groups[..] else { return Err(format!("box needs `lower; upper`, got `{s}`")) };
            Region::new_box(reals(lo)?, reals(hi)?)
        }
        "ball" => {
            let [c, r] = groups[..] else { return Err(format!("ball needs `center; radius`, got `{s}`")) };
            Region::ball(reals(c)?, parse_real(r)?)
        }
        "halfspaces" => {
            let hs = groups
                .iter()
                .map(|g| {
                    let (a, b) = g.split_once(':').ok_or_else(|| format!("halfspace `{g}` needs `normal: offset`"))?;
                    Ok(Halfspace::new(reals(a)?, parse_real(b)?))
                })
                .collect::<ParseResult<Vec<_>>>()?;
            Region::polytope(hs)
        }
        other => return Err(format!("unknown region kind `{other}`")),
    };
    region.map_err(|e| e.to_string())
}

/// `key=value` arguments of a descriptor, in order.
fn keyword_args(args: &str) -> ParseResult<Vec<(&str, &str)>> {
    split_top_level(args, ',')
        .into_iter()
        .map(|kv| kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| format!("expected key=value, got `{kv}`")))
        .collect()
}

fn take<'a>(kw: &[(&'a str, &'a str)], key: &str, descriptor: &str) -> ParseResult<&'a str> {
    kw.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).ok_or_else(|| format!("`{descriptor}` is missing `{key}`"))
}

fn check_keys(kw: &[(&str, &str)], allowed: &[&str], descriptor: &str) -> ParseResult<()> {
    match kw.iter().find(|(k, _)| !allowed.contains(k)) {
        Some((k, _)) => Err(format!("unknown argument `{k}` in `{descriptor}`")),
        None => Ok(()),
    }
}

pub fn parse_volume_method(s: &str) -> ParseResult<VolumeMethod> {
    match call(s)? {
        ("exact2d", None) => Ok(VolumeMethod::Exact2D),
        ("mc", Some(n)) => Ok(VolumeMethod::MonteCarlo { quadrature_count: parse_int(n)? }),
        _ => Err(format!("unknown volume method `{s}` (exact2d or mc(N))")),
    }
}

/// `count`, `knn(k=1, m=1)`, `clique(k=2, r=1)`, `voronoi(A=ball(0,0; 0.25), method=exact2d)`.
pub fn parse_model(s: &str) -> ParseResult<ModelKind> {
    let (name, args) = call(s)?;
    let kw = match args {
        Some(a) => keyword_args(a)?,
        None => Vec::new(),
    };
    match name {
        "count" if args.is_none() => Ok(ModelKind::Count),
        "knn" => {
            check_keys(&kw, &["k", "m"], s)?;
            Ok(ModelKind::KnnEdgeLength { k: parse_int(take(&kw, "k", s)?)?, m: parse_real(take(&kw, "m", s)?)? })
        }
        "clique" => {
            check_keys(&kw, &["k", "r"], s)?;
            Ok(ModelKind::CliqueCount { k: parse_int(take(&kw, "k", s)?)?, r: parse_real(take(&kw, "r", s)?)? })
        }
        "voronoi" => {
            check_keys(&kw, &["A", "method"], s)?;
            Ok(ModelKind::VoronoiVolume {
                a: parse_region(take(&kw, "A", s)?)?,
                method: parse_volume_method(take(&kw, "method", s)?)?,
            })
        }
        _ => Err(format!("unknown model `{s}`")),
    }
}

/// `complete` or `strided(base=B, stride=S)`.
pub fn parse_schedule(s: &str) -> ParseResult<Schedule> {
    match call(s)? {
        ("complete", None) => Ok(Schedule::Complete),
        ("strided", Some(a)) => {
            let kw = keyword_args(a)?;
            check_keys(&kw, &["base", "stride"], s)?;
            Ok(Schedule::Strided { base: parse_int(take(&kw, "base", s)?)?, stride: parse_int(take(&kw, "stride", s)?)? })
        }
        _ => Err(format!("unknown schedule `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_round_trip() {
        for lit in ["box(0,0; 1,1)", "ball(0,0; 0.25)", "box(-0.5; 0.5)", "halfspaces(1,0: 1; -1,0: 1; 0,1: 1; 0,-1: 1)"] {
            let r = parse_region(lit).unwrap();
            assert_eq!(parse_region(&r.to_string()).unwrap(), r, "{lit}");
        }
        assert_eq!(parse_region("ball(0,0;0.25)").unwrap(), Region::ball(vec![0.0, 0.0], 0.25).unwrap());
        assert!(parse_region("box(0,0; 1)").is_err());
        assert!(parse_region("sphere(0; 1)").is_err());
    }

    #[test]
    fn models_round_trip() {
        for lit in ["count", "knn(k=1, m=1)", "clique(k=2, r=1.0)", "voronoi(A=ball(0,0;0.25), method=exact2d)", "voronoi(A=box(-0.1,-0.1,-0.1; 0.1,0.1,0.1), method=mc(5000))"] {
            let m = parse_model(lit).unwrap();
            assert_eq!(parse_model(&m.to_string()).unwrap(), m, "{lit}");
        }
        assert!(parse_model("knn(k=1)").is_err());
        assert!(parse_model("knn(k=1, m=1, z=2)").is_err());
        assert!(parse_model("count(k=1)").is_err());
    }

    #[test]
    fn lists_and_schedules() {
        assert_eq!(parse_list("[1, 2,3]", parse_int::<u64>).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_list("[]", parse_real).unwrap(), Vec::<f64>::new());
        assert!(parse_list("1, 2", parse_real).is_err());
        let s = parse_schedule("strided(base=10, stride=5)").unwrap();
        assert_eq!(parse_schedule(&s.to_string()).unwrap(), s);
        assert_eq!(parse_schedule("complete").unwrap(), Schedule::Complete);
    }
}
