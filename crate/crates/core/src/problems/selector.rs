//! Problem selectors such as `dixon:d=3,eta=0.2` or `dixon2:r2=pi2/108`.

use super::{dixon2_transformed, dixon_exponent, separable_cubic, separable_cubic_with_r};
use super::{DixonSpec, Problem, DIXON2_DEFAULT_R};
use crate::error::{Error, Result};
use crate::local_model::SymMatrix;
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn fail(selector: &str, reason: impl Into<String>) -> Error {
    Error::Selector {
        selector: selector.to_string(),
        reason: reason.into(),
    }
}

/// Products and quotients of numbers, `pi` and `pi2`.
fn parse_value(text: &str) -> Option<f64> {
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = text.trim();
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let atom = rest[..end].trim();
        let v = match atom {
            "pi" => PI,
            "pi2" => PI * PI,
            _ => atom.parse::<f64>().ok()?,
        };
        value = if op == '*' { value * v } else { value / v };
        if end == rest.len() {
            return value.is_finite().then_some(value);
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
}

/// Resolves a selector into a library problem. An optional `g0=…` key
/// attaches a constant amplitude.
pub fn parse_selector(selector: &str) -> Result<Problem> {
    let (kind, args) = selector.split_once(':').unwrap_or((selector, ""));
    let mut params = BTreeMap::new();
    for pair in args.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| fail(selector, format!("expected key=value, got `{pair}`")))?;
        let v = parse_value(v).ok_or_else(|| fail(selector, format!("bad value `{v}` for `{k}`")))?;
        if params.insert(k.trim().to_string(), v).is_some() {
            return Err(fail(selector, format!("duplicate key `{k}`")));
        }
    }
    let mut take = |key: &str| params.remove(key);
    let int = |v: f64, key: &str| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(fail(selector, format!("`{key}` must be a positive integer")))
        }
    };

    let g0 = take("g0");
    let problem = match kind.trim() {
        "separable-cubic" => {
            let d = int(take("d").unwrap_or(2.0), "d")?;
            let gamma = take("gamma").unwrap_or(0.5);
            match take("r") {
                Some(r) => separable_cubic_with_r(d, gamma, r)?,
                None => separable_cubic(d, gamma)?,
            }
        }
        "dixon" => {
            let d = int(take("d").unwrap_or(2.0), "d")?;
            let eta = take("eta").unwrap_or(0.2);
            dixon_exponent(DixonSpec { d, eta })?
        }
        "dixon2" => {
            let r = match (take("r"), take("r2")) {
                (Some(_), Some(_)) => return Err(fail(selector, "give either r or r2")),
                (Some(r), None) => r,
                (None, Some(r2)) => r2.sqrt(),
                (None, None) => DIXON2_DEFAULT_R,
            };
            dixon2_transformed(r)?
        }
        "gaussian" => {
            let d = int(take("d").unwrap_or(2.0), "d")?;
            let scale = take("scale").unwrap_or(1.0);
            Problem::gaussian(SymMatrix::identity(d), scale)?
        }
        other => return Err(fail(selector, format!("unknown problem `{other}`"))),
    };
    if let Some((k, _)) = params.into_iter().next() {
        return Err(fail(selector, format!("unknown key `{k}`")));
    }
    match g0 {
        Some(g) => problem.with_constant_amplitude(g),
        None => Ok(problem),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(parse_value("0.25"), Some(0.25));
        assert!((parse_value("pi2/108").unwrap() - PI * PI / 108.0).abs() < 1e-16);
        assert!((parse_value("2*pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-16);
        assert_eq!(parse_value("x"), None);
        assert_eq!(parse_value("1/0"), None);
    }

    #[test]
    fn selectors() {
        let p = parse_selector("dixon2:r2=pi2/108").unwrap();
        assert!((p.local.r - DIXON2_DEFAULT_R).abs() < 1e-15);
        let p = parse_selector("dixon:d=3,eta=0.2").unwrap();
        assert_eq!(p.dim(), 3);
        let p = parse_selector("separable-cubic:d=2,gamma=0.5").unwrap();
        assert_eq!(p.local.alpha, 1.5);
        let p = parse_selector("gaussian:d=3,g0=2").unwrap();
        assert_eq!(p.amplitude.unwrap().data.g0, 2.0);
    }

    #[test]
    fn selector_errors() {
        for s in [
            "nope:d=2",
            "dixon:d=2,eta",
            "dixon:d=2.5",
            "dixon:d=2,foo=1",
            "dixon2:r=0.3,r2=0.09",
            "dixon:d=2,d=3",
        ] {
            assert!(matches!(parse_selector(s), Err(Error::Selector { .. })), "{s}");
        }
    }
}
