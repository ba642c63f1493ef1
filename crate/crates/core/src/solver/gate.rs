//! Smallness condition and the constants it depends on.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{estimate_constant, HypothesisSet, InequalityId, LabConfig};
use crate::report::{num, opt_num};
use crate::spectral::Grid;

/// Where `k0, k1, k2` come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstantsMode {
    Supplied { k0: f64, k1: f64, k2: f64 },
    /// Empirical maxima of the semigroup, Duhamel and bilinear estimates,
    /// raised to 1 where smaller.
    Estimated { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    #[serde(serialize_with = "num")]
    pub k0: f64,
    #[serde(serialize_with = "num")]
    pub k1: f64,
    #[serde(serialize_with = "num")]
    pub k2: f64,
    pub estimated: bool,
}

impl Constants {
    pub fn supplied(k0: f64, k1: f64, k2: f64) -> Result<Self> {
        for (name, k) in [("k0", k0), ("k1", k1), ("k2", k2)] {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be >= 1, got {k}")));
            }
        }
        Ok(Self {
            k0,
            k1,
            k2,
            estimated: false,
        })
    }

    pub fn resolve(mode: &ConstantsMode, h: &HypothesisSet, grid: Grid) -> Result<Self> {
        match *mode {
            ConstantsMode::Supplied { k0, k1, k2 } => Self::supplied(k0, k1, k2),
            ConstantsMode::Estimated { samples, seed } => {
                let cfg = LabConfig {
                    samples,
                    seed,
                    grid: Some(grid),
                    ..LabConfig::default()
                };
                let bilinear = if h.m == 1.0 {
                    InequalityId::BilinM1
                } else {
                    InequalityId::Bilin
                };
                let mut k = [0.0; 3];
                for (slot, id) in k
                    .iter_mut()
                    .zip([InequalityId::Semi, InequalityId::Duhamel, bilinear])
                {
                    *slot = estimate_constant(id, h, &cfg)?.max_ratio.max(1.0);
                }
                Ok(Self {
                    k0: k[0],
                    k1: k[1],
                    k2: k[2],
                    estimated: true,
                })
            }
        }
    }
}

/// `η`, `λ1` and the verdict for a given `K0` and `k2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateVerdict {
    #[serde(rename = "K0", serialize_with = "num")]
    pub k_zero: f64,
    #[serde(serialize_with = "num")]
    pub eta: f64,
    #[serde(serialize_with = "opt_num")]
    pub lambda1: Option<f64>,
    /// `4 k2 λ1`, the contraction factor on the ball of radius `λ1`.
    #[serde(serialize_with = "opt_num")]
    pub contraction: Option<f64>,
    pub gate: bool,
    pub reason: Option<String>,
}

pub fn gate_arithmetic(k_zero: f64, k2: f64) -> Result<GateVerdict> {
    if !(k2 >= 1.0 && k2.is_finite()) {
        return Err(Error::Parameter(format!("k2 must be >= 1, got {k2}")));
    }
    if !(k_zero >= 0.0 && k_zero.is_finite()) {
        return Err(Error::Parameter(format!("K0 must be finite and >= 0, got {k_zero}")));
    }
    let eta = 1.0 / (16.0 * k2);
    let disc = 1.0 - 4.0 * k2 * k_zero;
    if disc < 0.0 {
        return Ok(GateVerdict {
            k_zero,
            eta,
            lambda1: None,
            contraction: None,
            gate: false,
            reason: Some(format!(
                "discriminant negative (4 k2 K0 = {} > 1)",
                4.0 * k2 * k_zero
            )),
        });
    }
    // 2K0 / (1 + √disc) is the smaller root without the cancellation of
    // (1 - √disc) / 2k2 at small K0.
    let lambda1 = 2.0 * k_zero / (1.0 + disc.sqrt());
    let contraction = 4.0 * k2 * lambda1;
    let reason = if k_zero > eta {
        Some(format!("K0 = {k_zero} exceeds eta = {eta}"))
    } else if contraction >= 1.0 {
        Some(format!("4 k2 lambda1 = {contraction} is not below 1"))
    } else {
        None
    };
    Ok(GateVerdict {
        k_zero,
        eta,
        lambda1: Some(lambda1),
        contraction: Some(contraction),
        gate: reason.is_none(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root(k0: f64, k2: f64) -> f64 {
        (1.0 - (1.0 - 4.0 * k2 * k0).sqrt()) / (2.0 * k2)
    }

    #[test]
    fn pass_boundary_and_failure() {
        let v = gate_arithmetic(0.01, 1.0).unwrap();
        assert!(v.gate);
        assert!((v.lambda1.unwrap() - root(0.01, 1.0)).abs() < 1e-12);
        assert!((v.lambda1.unwrap() - 0.010103).abs() < 1e-6);

        let v = gate_arithmetic(1.0 / 16.0, 1.0).unwrap();
        assert!(v.gate);
        assert!((v.lambda1.unwrap() - 0.066987).abs() < 1e-6);
        assert!((v.contraction.unwrap() - 0.267949).abs() < 1e-6);

        let v = gate_arithmetic(0.3, 1.0).unwrap();
        assert!(!v.gate);
        assert_eq!(v.lambda1, None);
        assert!(v.reason.unwrap().contains("discriminant negative"));
    }

    #[test]
    fn constants_below_one_are_rejected() {
        assert!(matches!(Constants::supplied(1.0, 0.5, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(gate_arithmetic(0.01, 0.9), Err(Error::Parameter(_))));
    }

    #[test]
    fn eta_exceeded() {
        let v = gate_arithmetic(0.1, 1.0).unwrap();
        assert!(!v.gate);
        assert!(v.lambda1.is_some());
    }
}
