//! Cylinder quadrature and Riemann-sum norms.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CantorPoint, Dyadic, Word};
use crate::error::{Error, Result};

/// Exponent of the `L^p` norm used for residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn parse(s: &str) -> Result<Norm> {
        match s.trim() {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "infinity" | "∞" => Ok(Norm::LInf),
            other => Err(Error::Parse(format!("unsupported norm {other:?}"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::LInf => "inf",
        })
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Norm::L1 => s.serialize_u8(1),
            Norm::L2 => s.serialize_u8(2),
            Norm::LInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let s = match &v {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s.clone(),
            _ => return Err(serde::de::Error::custom("norm must be 1, 2 or \"inf\"")),
        };
        Norm::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A cylinder set `[w]` of sequences beginning with `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cylinder {
    pub word: Word,
}

impl Cylinder {
    pub fn new(word: Word) -> Self {
        Cylinder { word }
    }

    /// The block `1^(n-1) 0`.
    pub fn block(n: usize) -> Self {
        Cylinder { word: Word::block_marker(n) }
    }

    /// Bernoulli(1/2) mass `2^(-len)`.
    pub fn measure(&self) -> Dyadic {
        Dyadic::pow2_neg(self.word.len() as i32)
    }

    /// Upper bound on the diameter: points share the first `len` coordinates.
    pub fn diameter_bound(&self) -> Dyadic {
        Dyadic::pow2_neg(self.word.len() as i32 + 1)
    }

    pub fn contains(&self, x: &CantorPoint) -> bool {
        x.first_bits(self.word.len()) == self.word
    }
}

/// Bernoulli mass of a cylinder word.
pub fn cylinder_measure(w: &Word) -> Dyadic {
    Cylinder::new(w.clone()).measure()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureNode {
    pub word: Word,
    pub point: CantorPoint,
    pub weight: Dyadic,
}

/// One node per depth-`n` cylinder, placed at `w 0 0 ...`, weight `2^(-n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    depth: usize,
    nodes: Vec<QuadratureNode>,
}

impl Quadrature {
    pub fn new(depth: usize) -> Self {
        let weight = Dyadic::pow2_neg(depth as i32);
        let nodes = Word::all(depth)
            .map(|w| QuadratureNode { point: CantorPoint::zero_tail(&w), word: w, weight })
            .collect();
        Quadrature { depth, nodes }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight.to_f64()).collect()
    }

    /// Riemann-sum norm of node values.
    pub fn riemann_norm(&self, values: &[Complex64], p: Norm) -> Result<f64> {
        riemann_norm(&self.weights_f64(), values, p)
    }
}

/// Weighted discrete `p`-norm: `sum w|v|`, `sqrt(sum w|v|^2)` or `max |v|`.
pub fn riemann_norm(weights: &[f64], values: &[Complex64], p: Norm) -> Result<f64> {
    if weights.len() != values.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), got: values.len() });
    }
    let it = weights.iter().zip(values);
    Ok(match p {
        Norm::L1 => it.map(|(w, v)| w * v.norm()).sum(),
        Norm::L2 => it.map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt(),
        Norm::LInf => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_masses() {
        let c = Cylinder::new("1101".parse().unwrap());
        assert_eq!(c.measure(), Dyadic::pow2_neg(4));
        assert_eq!(Cylinder::block(3).diameter_bound(), Dyadic::pow2_neg(4));
        assert!(c.contains(&"11010|1".parse().unwrap()));
        assert!(!c.contains(&"1100|1".parse().unwrap()));
    }

    #[test]
    fn quadrature_layout() {
        let q = Quadrature::new(3);
        assert_eq!(q.len(), 8);
        let total: Dyadic = q.nodes().iter().map(|n| n.weight).sum();
        assert_eq!(total, Dyadic::ONE);
        assert_eq!(q.nodes()[5].point.to_string(), "101|0");
    }

    #[test]
    fn norms() {
        let q = Quadrature::new(1);
        let v = [Complex64::new(3.0, 4.0), Complex64::new(0.0, 1.0)];
        assert_eq!(q.riemann_norm(&v, Norm::L1).unwrap(), 3.0);
        assert!((q.riemann_norm(&v, Norm::L2).unwrap() - 13f64.sqrt()).abs() < 1e-15);
        assert_eq!(q.riemann_norm(&v, Norm::LInf).unwrap(), 5.0);
        assert!(matches!(
            q.riemann_norm(&v[..1], Norm::L2),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn norm_serde() {
        let n: Norm = serde_json::from_str("2").unwrap();
        assert_eq!(n, Norm::L2);
        let n: Norm = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(n, Norm::LInf);
        assert_eq!(serde_json::to_string(&Norm::L1).unwrap(), "1");
        assert!(serde_json::from_str::<Norm>("3").is_err());
    }
}
