//! Number formatting at a configurable number of significant digits.

use std::str::FromStr;

use serde_json::Value;

use crate::error::CliError;

/// Environment variable that overrides the default output precision.
pub const PRECISION_ENV: &str = "PULLIN_DYN_PRECISION";
/// Default significant digits for tabular output.
pub const TABLE_DIGITS: usize = 12;

/// Significant digits, or the shortest representation that round-trips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Digits(usize),
    Full,
}

impl FromStr for Precision {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(Precision::Full);
        }
        match s.parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(Precision::Digits(d)),
            _ => Err(CliError::Usage(format!("precision must be 1..=17 or `full`, got `{s}`"))),
        }
    }
}

impl Precision {
    /// Rounds `x` to the configured number of significant digits.
    pub fn round(self, x: f64) -> f64 {
        match self {
            Precision::Full => x,
            Precision::Digits(_) if !x.is_finite() || x == 0.0 => x,
            Precision::Digits(d) => format!("{:.*e}", d - 1, x).parse().expect("formatted float parses"),
        }
    }

    /// Text form: the shortest representation of the rounded value.
    pub fn fmt(self, x: f64) -> String {
        let r = self.round(x);
        if r.is_nan() {
            "nan".into()
        } else if r.is_infinite() {
            if r > 0.0 {
                "inf".into()
            } else {
                "-inf".into()
            }
        } else {
            format!("{r:?}")
        }
    }

    /// JSON form. Non-finite values become `null`.
    pub fn json(self, x: f64) -> Value {
        let r = self.round(x);
        serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
    }

    pub fn json_opt(self, x: Option<f64>) -> Value {
        x.map_or(Value::Null, |v| self.json(v))
    }
}

/// Resolves the effective precision: explicit flag, then environment, then
/// the command's default.
pub fn resolve(flag: Option<Precision>, env: Option<&str>, default: Precision) -> Result<Precision, CliError> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match env {
        Some(s) if !s.trim().is_empty() => s.parse(),
        _ => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_round_trip() {
        let p = Precision::Digits(12);
        assert_eq!(p.fmt(0.123_456_789_012_345), "0.123456789012");
        assert_eq!(p.fmt(1e-20 / 3.0), "3.33333333333e-21");
        for x in [std::f64::consts::PI, -2.5e300, 1e-310, 7.0] {
            let s = p.fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), p.round(x));
        }
        assert_eq!(Precision::Full.fmt(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(Precision::Digits(3).fmt(f64::NAN), "nan");
        assert_eq!(Precision::Full.json(f64::INFINITY), Value::Null);
    }

    #[test]
    fn parse_and_resolve() {
        assert_eq!("full".parse::<Precision>().unwrap(), Precision::Full);
        assert_eq!("6".parse::<Precision>().unwrap(), Precision::Digits(6));
        assert!("0".parse::<Precision>().is_err());
        assert!("18".parse::<Precision>().is_err());
        let d = Precision::Full;
        assert_eq!(resolve(None, Some("4"), d).unwrap(), Precision::Digits(4));
        assert_eq!(resolve(Some(Precision::Digits(9)), Some("4"), d).unwrap(), Precision::Digits(9));
        assert_eq!(resolve(None, None, d).unwrap(), d);
        assert!(resolve(None, Some("lots"), d).is_err());
    }
}
