//! Surface spec strings.
//!
//! ```text
//! surface  := "sphere" [":r=" num]
//!           | "catenoid" [":a=" num]
//!           | "torus" [":a=" num]          (default a = 2)
//!           | "enneper"
//!           | "parallel:base=" surface ",mu=" num
//!           | "revolution:profile=" profile
//! ```
//!
//! `profile` is a profile spec, see [`Profile::from_spec`]. In `parallel:` the
//! base may itself contain commas; the split happens at the last `,mu=`.

use std::sync::Arc;

use super::SurfacePatch;
use crate::error::{Error, Result};
use crate::revolution::Profile;

pub(crate) fn parse_number(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("not a number: {text:?}")))
}

/// Value of a single `key=value` argument, or `default` when `args` is absent.
fn single_arg(name: &str, args: Option<&str>, key: &str, default: Option<f64>) -> Result<f64> {
    match args {
        None => default.ok_or_else(|| Error::Parse(format!("{name} needs {key}=<value>"))),
        Some(a) => {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected {key}=<value> in {a:?}")))?;
            if k.trim() != key {
                return Err(Error::Parse(format!("unknown key {k:?} for {name}")));
            }
            parse_number(v)
        }
    }
}

pub(super) fn parse_surface(text: &str) -> Result<SurfacePatch> {
    let text = text.trim();
    let (name, args) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    match name {
        "sphere" => SurfacePatch::sphere(single_arg(name, args, "r", Some(1.0))?),
        "catenoid" => SurfacePatch::catenoid(single_arg(name, args, "a", Some(1.0))?),
        "torus" => SurfacePatch::torus(single_arg(name, args, "a", Some(2.0))?),
        "enneper" => match args {
            None => Ok(SurfacePatch::enneper()),
            Some(_) => Err(Error::Parse("enneper takes no parameters".into())),
        },
        "parallel" => {
            let args = args.ok_or_else(|| Error::Parse("parallel needs base=..,mu=..".into()))?;
            let base = args
                .strip_prefix("base=")
                .ok_or_else(|| Error::Parse("parallel needs base=<surface>".into()))?;
            let (base, mu) = base
                .rsplit_once(",mu=")
                .ok_or_else(|| Error::Parse("parallel needs ,mu=<value>".into()))?;
            SurfacePatch::parallel(parse_surface(base)?, parse_number(mu)?)
        }
        "revolution" => {
            let args = args.ok_or_else(|| Error::Parse("revolution needs profile=..".into()))?;
            let profile = args
                .strip_prefix("profile=")
                .ok_or_else(|| Error::Parse("revolution needs profile=<profile>".into()))?;
            Ok(SurfacePatch::revolution(Arc::new(Profile::from_spec(profile)?)))
        }
        _ => Err(Error::Parse(format!("unknown surface {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        assert_eq!(parse_surface("sphere:r=1").unwrap().label(), "sphere:r=1");
        assert_eq!(parse_surface("sphere").unwrap().label(), "sphere:r=1");
        assert_eq!(parse_surface("torus").unwrap().label(), "torus:a=2");
        assert_eq!(parse_surface("enneper").unwrap().label(), "enneper");
        let p = parse_surface("parallel:base=catenoid:a=1,mu=0.5").unwrap();
        assert_eq!(p.label(), "parallel:base=catenoid:a=1,mu=0.5");
        assert_eq!(p.max_order(), 9);
    }

    #[test]
    fn nested_parallel_splits_at_last_mu() {
        let p = parse_surface("parallel:base=parallel:base=catenoid:a=1,mu=0.1,mu=0.2").unwrap();
        assert_eq!(p.max_order(), 8);
    }

    #[test]
    fn revolution_profiles_parse() {
        let s = parse_surface("revolution:profile=torus:a=2").unwrap();
        assert!(s.profile().is_some());
        let s = parse_surface("revolution:profile=phi:u;f0=0;u0=0;range=0:3.14159").unwrap();
        assert!(s.profile().is_some());
    }

    #[test]
    fn bad_specs_are_parse_errors() {
        for bad in ["cube", "sphere:q=1", "sphere:r=abc", "parallel:mu=1", "enneper:a=1", ""] {
            assert!(matches!(parse_surface(bad), Err(Error::Parse(_))), "{bad}");
        }
        assert!(matches!(parse_surface("torus:a=0.5"), Err(Error::InvalidParameter(_))));
    }
}
