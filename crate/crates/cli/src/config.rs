//! Map and family configuration files (TOML or JSON) and command-line value
//! parsers.

use std::path::Path;

use newton_atlas::algebra::{Complex, Polynomial};
use newton_atlas::dynamics::{Family, ScanRegion, Viewport};
use newton_atlas::newton::{build_newton, NewtonSpec};
use serde::Deserialize;

use crate::error::CliError;

/// A coefficient: a real number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Real(f64),
    Pair([f64; 2]),
}

impl Coef {
    pub fn value(self) -> Complex {
        match self {
            Coef::Real(x) => Complex::new(x, 0.0),
            Coef::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

/// Family coefficients: entry `k` lists `[a_k]` or `[a_k, b_k]` for `a_k + b_k c`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub p: Vec<Vec<Coef>>,
    #[serde(default)]
    pub q: Vec<Vec<Coef>>,
    /// Parameter selecting one member.
    pub c: Option<Coef>,
}

/// Coefficients in ascending degree, or a family.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub p: Option<Vec<Coef>>,
    #[serde(default)]
    pub q: Option<Vec<Coef>>,
    pub family: Option<FamilyConfig>,
}

fn poly(coeffs: &[Coef]) -> Polynomial {
    Polynomial::new(coeffs.iter().map(|c| c.value()).collect())
}

pub fn parse_text(text: &str, path: &Path) -> Result<MapConfig, CliError> {
    let is_json =
        path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let parsed = if is_json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| CliError::Config {
        path: path.to_path_buf(),
        message: message.trim_end().to_string(),
    })
}

pub fn load(path: &Path) -> Result<MapConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_text(&text, path)
}

impl MapConfig {
    /// The affine family described by the file.
    pub fn family(&self, path: &Path) -> Result<Family, CliError> {
        let fam = self.family.as_ref().ok_or_else(|| CliError::Config {
            path: path.to_path_buf(),
            message: "missing [family] table".into(),
        })?;
        let split = |coeffs: &[Vec<Coef>],
                     name: &'static str|
         -> Result<(Polynomial, Polynomial), CliError> {
            let mut base = Vec::with_capacity(coeffs.len());
            let mut slope = Vec::with_capacity(coeffs.len());
            for (index, terms) in coeffs.iter().enumerate() {
                match terms.as_slice() {
                    [a] => {
                        base.push(a.value());
                        slope.push(Complex::new(0.0, 0.0));
                    }
                    [a, b] => {
                        base.push(a.value());
                        slope.push(b.value());
                    }
                    _ => {
                        return Err(CliError::NonAffine {
                            path: path.to_path_buf(),
                            polynomial: name,
                            index,
                            len: terms.len(),
                        })
                    }
                }
            }
            Ok((Polynomial::new(base), Polynomial::new(slope)))
        };
        let (p0, p1) = split(&fam.p, "p")?;
        let (q0, q1) = split(&fam.q, "q")?;
        Ok(Family::new(p0, p1, q0, q1))
    }

    /// The `(p, q)` pair: explicit coefficients, or the family at its `c`.
    pub fn polynomials(&self, path: &Path) -> Result<(Polynomial, Polynomial), CliError> {
        match (&self.p, &self.family) {
            (Some(p), None) => Ok((poly(p), self.q.as_deref().map(poly).unwrap_or_default())),
            (None, Some(fam)) => {
                let c = fam.c.ok_or_else(|| CliError::Config {
                    path: path.to_path_buf(),
                    message: "family map needs a parameter c".into(),
                })?;
                Ok(self.family(path)?.at(c.value()))
            }
            (Some(_), Some(_)) => Err(CliError::Config {
                path: path.to_path_buf(),
                message: "give either p/q or [family], not both".into(),
            }),
            (None, None) => Err(CliError::Config {
                path: path.to_path_buf(),
                message: "missing p".into(),
            }),
        }
    }

    pub fn spec(&self, path: &Path) -> Result<NewtonSpec, CliError> {
        let (p, q) = self.polynomials(path)?;
        Ok(build_newton(&p, &q)?)
    }
}

pub fn load_spec(path: &Path) -> Result<NewtonSpec, CliError> {
    load(path)?.spec(path)
}

fn numbers(s: &str, count: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == count && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!(
            "{what}: expected {count} comma-separated numbers, got {s:?}"
        ))),
    }
}

/// `cx,cy,w,h`.
pub fn parse_viewport(s: &str) -> Result<Viewport, CliError> {
    let v = numbers(s, 4, "--viewport")?;
    if v[2] < 0.0 || v[3] < 0.0 {
        return Err(CliError::Usage(
            "--viewport: width and height must be non-negative".into(),
        ));
    }
    Ok(Viewport::new(Complex::new(v[0], v[1]), v[2], v[3]))
}

pub fn viewport_region(vp: &Viewport) -> ScanRegion {
    ScanRegion::new(
        (vp.center.re - vp.width / 2.0, vp.center.re + vp.width / 2.0),
        (
            vp.center.im - vp.height / 2.0,
            vp.center.im + vp.height / 2.0,
        ),
    )
}

/// `WxH` or `N` for `N×N`.
pub fn parse_resolution(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--res: expected WxH, got {s:?}"));
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (w, h),
        None => (s, s),
    };
    Ok((
        w.trim().parse().map_err(|_| bad())?,
        h.trim().parse().map_err(|_| bad())?,
    ))
}

/// `basin:ray` pairs separated by commas, e.g. `1:0,2:1`.
pub fn parse_marking(s: &str) -> Result<Vec<(usize, usize)>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|pair| {
            let (b, r) = pair.split_once(':').ok_or_else(|| {
                CliError::Usage(format!("--mark: expected basin:ray, got {pair:?}"))
            })?;
            let parse = |x: &str| {
                x.trim().parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("--mark: expected basin:ray, got {pair:?}"))
                })
            };
            Ok((parse(b)?, parse(r)?))
        })
        .collect()
}

/// Comma-separated positive numbers.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| match x.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(CliError::Usage(format!(
                "{what}: expected positive numbers, got {x:?}"
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> &'static Path {
        Path::new("test.toml")
    }

    #[test]
    fn toml_and_json_agree() {
        let t = parse_text("p = [-0.25, 0, 1]\nq = [0, 1]\n", path()).unwrap();
        let j = parse_text(
            r#"{"p": [[-0.25, 0], [0, 0], [1, 0]], "q": [0, [1, 0]]}"#,
            Path::new("m.json"),
        )
        .unwrap();
        let (a, b) = (t.spec(path()).unwrap(), j.spec(path()).unwrap());
        assert_eq!(a.p, b.p);
        assert_eq!(a.q, b.q);
        assert_eq!(a.d, 3);
    }

    #[test]
    fn family_member_and_family() {
        let text = "[family]\np = [[0, 1], [0], [1]]\nq = [[0], [1]]\nc = 2\n";
        let cfg = parse_text(text, path()).unwrap();
        let spec = cfg.spec(path()).unwrap();
        assert_eq!(spec.p, Polynomial::from_real(&[2.0, 0.0, 1.0]));
        let fam = cfg.family(path()).unwrap();
        assert_eq!(fam.p1, Polynomial::from_real(&[1.0]));
    }

    #[test]
    fn non_affine_family_is_rejected() {
        let cfg = parse_text(
            "[family]\np = [[0, 1, 1], [0], [1]]\nq = [[0], [1]]\n",
            path(),
        )
        .unwrap();
        let err = cfg.family(path()).unwrap_err();
        assert!(matches!(
            err,
            CliError::NonAffine {
                index: 0,
                len: 3,
                ..
            }
        ));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_text("p = [1, 2\n", path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn constant_map_is_degenerate() {
        let err = parse_text("p = [0, 1]\n", path())
            .unwrap()
            .spec(path())
            .unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("constant Newton map"));
    }

    #[test]
    fn flag_values() {
        assert_eq!(parse_resolution("800x600").unwrap(), (800, 600));
        assert_eq!(parse_resolution("16").unwrap(), (16, 16));
        assert!(parse_resolution("axb").is_err());
        let vp = parse_viewport("0,0,6,4").unwrap();
        assert_eq!((vp.width, vp.height), (6.0, 4.0));
        assert!(parse_viewport("0,0,6").is_err());
        assert_eq!(parse_marking("1:0, 2:1").unwrap(), vec![(1, 0), (2, 1)]);
        assert!(parse_marking("1-0").is_err());
        assert_eq!(parse_list("5,10", "--radii").unwrap(), vec![5.0, 10.0]);
    }
}
