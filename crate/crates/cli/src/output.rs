use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use schmidt_core::io::FileError;
use serde_json::{Map, Value};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or violated precondition (exit 1).
    Validation(String),
    /// A computed invariant failed (exit 2).
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical integrity: {m}"),
        }
    }
}

impl From<schmidt_core::Error> for CliError {
    fn from(e: schmidt_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Invalid(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Fails on nulls, which is where serde_json puts non-finite floats.
fn check_finite(v: &Value, path: &str) -> CliResult<()> {
    match v {
        Value::Null => Err(CliError::Numerical(format!("non-finite value at {path}"))),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .try_for_each(|(i, x)| check_finite(x, &format!("{path}[{i}]"))),
        Value::Object(map) => map
            .iter()
            .try_for_each(|(k, x)| check_finite(x, &format!("{path}.{k}"))),
        _ => Ok(()),
    }
}

/// Pretty JSON on stdout, with a `generated_at` stamp unless deterministic.
pub fn emit_json(value: Value, deterministic: bool) -> CliResult<()> {
    let mut value = value;
    check_finite(&value, "$")?;
    if !deterministic {
        if let Value::Object(map) = &mut value {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("generated_at".into(), Value::from(secs));
        }
    }
    println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    Ok(())
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
