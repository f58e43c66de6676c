//! Point-to-point distance metrics.
//!
//! [`Distance`] is the extension point: neighbor selection is generic over
//! it, so a custom metric only has to implement `eval`. [`Metric`] enumerates
//! the built-in metrics selectable from the command line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A distance function over equal-length feature vectors.
///
/// Implementations must be non-negative, symmetric and return 0 for
/// identical inputs. `eval` may assume `a.len() == b.len()`; use
/// [`Distance::checked`] at API boundaries.
pub trait Distance: Sync {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64;

    fn checked(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(self.eval(a, b))
    }
}

/// L1 (city block) distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Manhattan;

impl Distance for Manhattan {
    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }
}

/// L2 distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Euclidean;

impl Distance for Euclidean {
    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Manhattan,
    Euclidean,
}

impl Distance for Metric {
    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Manhattan => Manhattan.eval(a, b),
            Metric::Euclidean => Euclidean.eval(a, b),
        }
    }
}

pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> Result<f64> {
    metric.checked(a, b)
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "manhattan" | "l1" => Ok(Metric::Manhattan),
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Manhattan => "manhattan",
            Metric::Euclidean => "euclidean",
        })
    }
}
