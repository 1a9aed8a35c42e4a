//! Element specs such as `U:S1@0`, `K:1,0@2`, `sqrtK:-1,0@1`, `Z:S1@0` and `1`.

use std::fmt;

/// One parsed basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spec {
    Unit,
    Stalk { class: String, degree: usize },
    K { weight: Vec<i64>, degree: usize },
    SqrtK { weight: Vec<i64>, degree: usize },
    Z { class: String, degree: usize },
}

/// A parse error at a byte offset of the spec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub spec: String,
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse {:?} at position {}: {}", self.spec, self.position, self.message)
    }
}

impl Spec {
    pub fn is_derived(&self) -> bool {
        matches!(self, Spec::Z { .. })
    }

    /// Number of torus coordinates, used to pick a quiver.
    pub fn weight_len(&self) -> Option<usize> {
        match self {
            Spec::K { weight, .. } | Spec::SqrtK { weight, .. } => Some(weight.len()),
            _ => None,
        }
    }

    pub fn class_name(&self) -> Option<&str> {
        match self {
            Spec::Stalk { class, .. } | Spec::Z { class, .. } => Some(class),
            _ => None,
        }
    }
}

pub fn parse_spec(spec: &str) -> Result<Spec, ParseError> {
    let err = |position: usize, message: &str| ParseError { spec: spec.to_string(), position, message: message.to_string() };
    if spec.trim() == "1" {
        return Ok(Spec::Unit);
    }
    let colon = spec.find(':').ok_or_else(|| err(0, "expected KIND:BODY with KIND one of U, K, sqrtK, Z"))?;
    let kind = &spec[..colon];
    let body_start = colon + 1;
    let body = &spec[body_start..];
    // the degree defaults to 0, which is the only degree when t = 1
    let (head, degree) = match body.rfind('@') {
        Some(at) => {
            let text = &body[at + 1..];
            let degree: usize = text.parse().map_err(|_| err(body_start + at + 1, "expected a degree after '@'"))?;
            (&body[..at], degree)
        }
        None => (body, 0),
    };
    if head.trim().is_empty() {
        return Err(err(body_start, "empty body"));
    }
    match kind {
        "U" | "Z" => {
            let class = head.trim().to_string();
            Ok(if kind == "U" { Spec::Stalk { class, degree } } else { Spec::Z { class, degree } })
        }
        "K" | "sqrtK" => {
            let mut weight = Vec::new();
            let mut offset = body_start;
            for part in head.split(',') {
                let x: i64 = part.trim().parse().map_err(|_| err(offset, "expected an integer coordinate"))?;
                weight.push(x);
                offset += part.len() + 1;
            }
            Ok(if kind == "K" { Spec::K { weight, degree } } else { Spec::SqrtK { weight, degree } })
        }
        _ => Err(err(0, "unknown kind; expected U, K, sqrtK or Z")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!(parse_spec("U:S1@0").unwrap(), Spec::Stalk { class: "S1".into(), degree: 0 });
        assert_eq!(parse_spec("K:1,0@2").unwrap(), Spec::K { weight: vec![1, 0], degree: 2 });
        assert_eq!(parse_spec("sqrtK:-1,0@1").unwrap(), Spec::SqrtK { weight: vec![-1, 0], degree: 1 });
        assert_eq!(parse_spec("Z:S⊕S@0").unwrap(), Spec::Z { class: "S⊕S".into(), degree: 0 });
        assert_eq!(parse_spec("1").unwrap(), Spec::Unit);
        assert_eq!(parse_spec("U:S").unwrap(), Spec::Stalk { class: "S".into(), degree: 0 });
    }

    #[test]
    fn reports_positions() {
        assert_eq!(parse_spec("K:1,x@0").unwrap_err().position, 4);
        assert_eq!(parse_spec("U:S@y").unwrap_err().position, 4);
        assert_eq!(parse_spec("V:S@0").unwrap_err().position, 0);
        assert_eq!(parse_spec("S@0").unwrap_err().position, 0);
    }
}
