//! Declarative recipes for finite-dimensional normed spaces.
//!
//! A descriptor is the JSON interchange object shared by every module and
//! the CLI; `Space::new` realizes it into an evaluable handle.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

/// Exponent of an l_p family; `PValue::INF` encodes the sup norm and
/// serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue(f64);

impl PValue {
    pub const INF: PValue = PValue(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidDescriptor(format!(
                "p must satisfy 1 <= p <= inf, got {p}"
            )));
        }
        Ok(PValue(p))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate exponent.
    pub fn conjugate(self) -> PValue {
        if self.0.is_infinite() {
            PValue(1.0)
        } else if self.0 == 1.0 {
            PValue::INF
        } else {
            PValue(self.0 / (self.0 - 1.0))
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let raw = Raw::deserialize(d)?;
        let p = match raw {
            Raw::Num(v) => v,
            Raw::Text(t) if t.eq_ignore_ascii_case("inf") || t == "∞" => f64::INFINITY,
            Raw::Text(t) => t
                .parse::<f64>()
                .map_err(|_| D::Error::custom(format!("bad exponent `{t}`")))?,
        };
        PValue::new(p).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Weight sequence for the Smith–Turett-style renorming.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    /// w_n = 2^(-n/2), n = 1, 2, ...
    #[default]
    Dyadic,
    /// w_n = ratio^n.
    Geometric { ratio: f64 },
}

impl WeightRule {
    pub fn weights(&self, dim: usize) -> Vec<f64> {
        match self {
            WeightRule::Dyadic => (1..=dim).map(|n| 2f64.powf(-(n as f64) / 2.0)).collect(),
            WeightRule::Geometric { ratio } => {
                (1..=dim).map(|n| ratio.powi(n as i32)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum NormDescriptor {
    /// Classical l_p norm on R^dim.
    Lp { p: PValue, dim: usize },
    /// The l_2 renorming whose selected coordinates are summed in l_1:
    /// ||x||^2 = (sum_j |x_{i_j}|)^2 + sum_{i not selected} x_i^2.
    /// `indices` are 1-based and strictly increasing.
    SullivanSum { dim: usize, indices: Vec<usize> },
    /// ||x||^2 = ||x||_1^2 + sum_n (w_n x_n)^2 on a finite truncation.
    SmithTurett {
        dim: usize,
        #[serde(default)]
        weight_rule: WeightRule,
    },
    /// Gauge of a symmetric, spanning vertex set.
    Polyhedral { vertices: Vec<Vec<f64>> },
    /// l_p direct sum of factor spaces.
    Product {
        p: PValue,
        factors: Vec<NormDescriptor>,
    },
    /// Quotient of `base` by the span of `subspace_basis`.
    Quotient {
        base: Box<NormDescriptor>,
        subspace_basis: Vec<Vec<f64>>,
    },
}

impl NormDescriptor {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Ok(NormDescriptor::Lp {
            p: PValue::new(p)?,
            dim,
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        NormDescriptor::Lp {
            p: PValue(2.0),
            dim,
        }
    }

    pub fn sup(dim: usize) -> Self {
        NormDescriptor::Lp { p: PValue::INF, dim }
    }

    pub fn one(dim: usize) -> Self {
        NormDescriptor::Lp { p: PValue(1.0), dim }
    }

    /// Ambient dimension induced by the descriptor.
    pub fn dim(&self) -> usize {
        match self {
            NormDescriptor::Lp { dim, .. }
            | NormDescriptor::SullivanSum { dim, .. }
            | NormDescriptor::SmithTurett { dim, .. } => *dim,
            NormDescriptor::Polyhedral { vertices } => {
                vertices.first().map_or(0, |v| v.len())
            }
            NormDescriptor::Product { factors, .. } => factors.iter().map(|f| f.dim()).sum(),
            NormDescriptor::Quotient {
                base,
                subspace_basis,
            } => base.dim().saturating_sub(subspace_basis.len()),
        }
    }

    /// Structural validation; norm-level checks happen in `Space::new`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            NormDescriptor::Lp { p, dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidDescriptor("dim must be >= 1".into()));
                }
                PValue::new(p.get())?;
                Ok(())
            }
            NormDescriptor::SullivanSum { dim, indices } => {
                if *dim == 0 {
                    return Err(Error::InvalidDescriptor("dim must be >= 1".into()));
                }
                if indices.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "sullivan_sum needs at least one selected index".into(),
                    ));
                }
                if !indices.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::InvalidDescriptor(
                        "sullivan_sum indices must be strictly increasing".into(),
                    ));
                }
                if indices[0] == 0 || *indices.last().unwrap() > *dim {
                    return Err(Error::InvalidDescriptor(
                        "sullivan_sum indices must lie in 1..=dim".into(),
                    ));
                }
                Ok(())
            }
            NormDescriptor::SmithTurett { dim, weight_rule } => {
                if *dim == 0 {
                    return Err(Error::InvalidDescriptor("dim must be >= 1".into()));
                }
                if weight_rule.weights(*dim).iter().any(|&w| !(w > 0.0)) {
                    return Err(Error::InvalidDescriptor(
                        "smith_turett weights must be positive".into(),
                    ));
                }
                Ok(())
            }
            NormDescriptor::Polyhedral { vertices } => {
                let dim = self.dim();
                if dim == 0 || vertices.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "polyhedral vertex set must be non-empty".into(),
                    ));
                }
                if vertices.iter().any(|v| v.len() != dim) {
                    return Err(Error::InvalidDescriptor(
                        "polyhedral vertices must share one dimension".into(),
                    ));
                }
                for v in vertices {
                    crate::error::ensure_finite(v)?;
                    let scale = linalg::norm2(v).max(1.0);
                    let has_neg = vertices.iter().any(|w| {
                        linalg::norm2(&linalg::add(v, w)) <= tol * scale
                    });
                    if !has_neg {
                        return Err(Error::AsymmetricVertices);
                    }
                }
                let m = linalg::to_dmatrix_cols(vertices);
                if linalg::rank(&m, 1e-10) < dim {
                    return Err(Error::InvalidDescriptor(
                        "polyhedral vertices must span the space".into(),
                    ));
                }
                Ok(())
            }
            NormDescriptor::Product { p, factors } => {
                PValue::new(p.get())?;
                if factors.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "product needs at least one factor".into(),
                    ));
                }
                for f in factors {
                    f.validate(tol)?;
                }
                Ok(())
            }
            NormDescriptor::Quotient {
                base,
                subspace_basis,
            } => {
                base.validate(tol)?;
                let bd = base.dim();
                if subspace_basis.iter().any(|v| v.len() != bd) {
                    return Err(Error::InvalidDescriptor(
                        "subspace basis vectors must match the base dimension".into(),
                    ));
                }
                for v in subspace_basis {
                    crate::error::ensure_finite(v)?;
                }
                linalg::check_independent(subspace_basis, 1e-10)?;
                if bd - subspace_basis.len() == 0 {
                    return Err(Error::InvalidDescriptor(
                        "quotient must keep dimension >= 1".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_serde() {
        let d = NormDescriptor::sup(2);
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"inf\""));
        let back: NormDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);

        let parsed: NormDescriptor =
            serde_json::from_str(r#"{"variant":"lp","p":2.0,"dim":3}"#).unwrap();
        assert_eq!(parsed, NormDescriptor::euclidean(3));
    }

    #[test]
    fn rejects_p_below_one() {
        assert!(NormDescriptor::lp(0.5, 2).is_err());
        assert!(serde_json::from_str::<NormDescriptor>(r#"{"variant":"lp","p":0.5,"dim":2}"#)
            .is_err());
    }

    #[test]
    fn asymmetric_vertices_rejected() {
        let d = NormDescriptor::Polyhedral {
            vertices: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]],
        };
        assert!(matches!(d.validate(1e-9), Err(Error::AsymmetricVertices)));
    }

    #[test]
    fn dependent_quotient_basis_rejected() {
        let d = NormDescriptor::Quotient {
            base: Box::new(NormDescriptor::euclidean(3)),
            subspace_basis: vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]],
        };
        assert!(matches!(d.validate(1e-9), Err(Error::DependentBasis)));
    }

    #[test]
    fn dyadic_weights_match_rule() {
        let w = WeightRule::Dyadic.weights(3);
        assert!((w[0] - 2f64.powf(-0.5)).abs() < 1e-15);
        assert!((w[1] - 0.5).abs() < 1e-15);
    }
}
