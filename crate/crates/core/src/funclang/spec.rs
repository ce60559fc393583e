use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ast::complex_literal;
use super::catalog::{catalog_entry, Function};
use super::parse;
use crate::error::{Error, Result};
use crate::numerics::PowerSeries;

/// A test function: a catalog entry with parameters, a formula, or an
/// explicit list of Taylor coefficients.
///
/// JSON forms:
/// `{"kind":"catalog","name":"hille","params":{"epsilon":0.5}}`,
/// `{"kind":"expr","formula":"z/(1-z)^2"}`,
/// `{"kind":"series","coeffs":[[0,0],[1,0],[2,0]]}`.
/// Catalog parameters may be given as numbers or `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Catalog {
        name: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty", with = "param_map")]
        params: BTreeMap<String, Complex64>,
    },
    Expr {
        formula: String,
    },
    Series {
        #[serde(with = "pair_list")]
        coeffs: Vec<Complex64>,
    },
}

mod param_map {
    use std::collections::BTreeMap;

    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Value {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<&str, [f64; 2]> = m.iter().map(|(k, v)| (k.as_str(), [v.re, v.im])).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Complex64>, D::Error> {
        let raw = BTreeMap::<String, Value>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|(k, v)| {
                let c = match v {
                    Value::Real(x) => Complex64::new(x, 0.0),
                    Value::Pair([re, im]) => Complex64::new(re, im),
                };
                (k, c)
            })
            .collect())
    }
}

mod pair_list {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// Parses a constant complex number such as `0.5`, `1-2i`, `i` or `pi/4`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let ast = parse(text)?;
    if ast.contains_variable() {
        return Err(Error::BadParameter(format!("`{text}` is not a constant")));
    }
    ast.eval_value(Complex64::default())
}

impl FunctionSpec {
    pub fn catalog(name: &str) -> Self {
        FunctionSpec::Catalog { name: name.to_string(), params: BTreeMap::new() }
    }

    pub fn catalog_with(name: &str, params: &[(&str, Complex64)]) -> Self {
        FunctionSpec::Catalog {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn expr(formula: &str) -> Self {
        FunctionSpec::Expr { formula: formula.to_string() }
    }

    pub fn series(coeffs: Vec<Complex64>) -> Self {
        FunctionSpec::Series { coeffs }
    }

    /// Checks names and formulas without building anything expensive.
    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    pub fn compile(&self) -> Result<Function> {
        match self {
            FunctionSpec::Catalog { name, params } => {
                catalog_entry(name)?;
                let list: Vec<(String, Complex64)> = params.iter().map(|(k, v)| (k.clone(), *v)).collect();
                Function::catalog(name, &list)
            }
            FunctionSpec::Expr { formula } => Function::expr(formula),
            FunctionSpec::Series { coeffs } => Ok(Function::Series(PowerSeries::new(coeffs.clone())?)),
        }
    }
}

/// Compact command-line form: `catalog:NAME`, `catalog:NAME:k=v,k=v`,
/// `expr:FORMULA`, or `series:c0,c1,...` with complex literals.
impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::BadParameter(format!("`{s}`: expected catalog:, expr: or series: prefix")))?;
        let spec = match kind {
            "catalog" => {
                let (name, args) = rest.split_once(':').unwrap_or((rest, ""));
                let mut params = BTreeMap::new();
                for kv in args.split(',').filter(|a| !a.trim().is_empty()) {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::BadParameter(format!("`{kv}`: expected key=value")))?;
                    params.insert(k.trim().to_string(), parse_complex(v)?);
                }
                FunctionSpec::Catalog { name: name.to_string(), params }
            }
            "expr" => FunctionSpec::expr(rest),
            "series" => {
                let coeffs = rest.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                FunctionSpec::series(coeffs)
            }
            other => return Err(Error::BadParameter(format!("unknown function kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Catalog { name, params } => {
                write!(f, "catalog:{name}")?;
                for (i, (k, v)) in params.iter().enumerate() {
                    let sep = if i == 0 { ':' } else { ',' };
                    write!(f, "{sep}{k}={}", complex_literal(*v))?;
                }
                Ok(())
            }
            FunctionSpec::Expr { formula } => write!(f, "expr:{formula}"),
            FunctionSpec::Series { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|c| complex_literal(*c)).collect();
                write!(f, "series:{}", parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Analytic;

    #[test]
    fn json_forms() {
        let s: FunctionSpec = serde_json::from_str(r#"{"kind":"catalog","name":"phi"}"#).unwrap();
        assert_eq!(s, FunctionSpec::catalog("phi"));
        let s: FunctionSpec = serde_json::from_str(r#"{"kind":"expr","formula":"z/(1-z)^2"}"#).unwrap();
        assert_eq!(s, FunctionSpec::expr("z/(1-z)^2"));
        let s: FunctionSpec = serde_json::from_str(r#"{"kind":"series","coeffs":[[0,0],[1,0],[2,0]]}"#).unwrap();
        let f = s.compile().unwrap();
        let z = Complex64::new(0.1, 0.2);
        assert!((f.value(z).unwrap() - (z + 2.0 * z * z)).norm() < 1e-15);
        let s: FunctionSpec =
            serde_json::from_str(r#"{"kind":"catalog","name":"hille","params":{"epsilon":[0.5,0]}}"#).unwrap();
        let back: FunctionSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn command_line_forms() {
        let s: FunctionSpec = "catalog:spiral-koebe:lambda=pi/4".parse().unwrap();
        let back: FunctionSpec = s.to_string().parse().unwrap();
        assert_eq!(s, back);
        assert!(matches!("catalog:nope".parse::<FunctionSpec>(), Err(Error::UnknownCatalog(_))));
        assert!(matches!("expr:z/(1-".parse::<FunctionSpec>(), Err(Error::Syntax { offset: 5, .. })));
        let s: FunctionSpec = "series:0,1,0.5-1i".parse().unwrap();
        assert_eq!(s, FunctionSpec::series(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, -1.0)]));
    }
}
