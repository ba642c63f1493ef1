//! Lorentz norms `L^{ρ,r}(0,T)` of piecewise-constant time trajectories.
//!
//! With `f*` the decreasing rearrangement,
//!
//! ```text
//! ‖f‖_{L^{ρ,r}} = ( ∫_0^∞ (t^{1/ρ} f*(t))^r dt/t )^{1/r},   r < ∞
//! ‖f‖_{L^{ρ,∞}} = sup_t t^{1/ρ} f*(t)
//! ```
//!
//! so that `L^{ρ,ρ} = L^ρ` without any prefactor. Every integral below is
//! evaluated in closed form on the steps.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step function taking `values[j]` on `(nodes[j-1], nodes[j]]`, with an
/// implicit left end at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSamples {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex {
    pub rho: f64,
    pub r: f64,
}

impl LorentzIndex {
    pub fn new(rho: f64, r: f64) -> Result<Self> {
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(Error::Parameter(format!(
                "Lorentz exponent rho must lie in (1, ∞), got {rho}"
            )));
        }
        if !(r >= 1.0) {
            return Err(Error::Parameter(format!(
                "Lorentz summation index must be >= 1, got {r}"
            )));
        }
        Ok(Self { rho, r })
    }
}

/// `count` nodes spaced log-uniformly from `T·10^{-6}` to `T`.
pub fn log_uniform_nodes(horizon: f64, count: usize) -> Vec<f64> {
    let lo = horizon * 1e-6;
    if count == 1 {
        return vec![horizon];
    }
    (0..count)
        .map(|j| {
            if j + 1 == count {
                horizon
            } else {
                lo * (1e6f64).powf(j as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

impl TimeSamples {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 2 {
            return Err(Error::Shape("a trajectory needs at least 2 nodes".into()));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter(
                "nodes must be positive and strictly increasing".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Parameter(format!(
                "trajectory values must be finite and >= 0, found {v}"
            )));
        }
        Ok(Self { nodes, values })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last_node(&self) -> f64 {
        *self.nodes.last().expect("at least two nodes")
    }

    /// Lengths of the steps `(t_{j-1}, t_j]`.
    pub fn lengths(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.nodes
            .iter()
            .map(|&t| {
                let d = t - prev;
                prev = t;
                d
            })
            .collect()
    }

    /// Value at time `t` (0 beyond the last node).
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.nodes.partition_point(|&n| n < t) {
            j if j < self.nodes.len() => self.values[j],
            _ => 0.0,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<TimeSamples> {
        TimeSamples::new(self.nodes.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Measure of `{t : f(t) > level}`.
    pub fn distribution(&self, level: f64) -> f64 {
        self.values
            .iter()
            .zip(self.lengths())
            .filter(|(v, _)| **v > level)
            .map(|(_, l)| l)
            .sum()
    }

    /// Pointwise product on the common refinement of the node sets.
    pub fn product(factors: &[&TimeSamples]) -> Result<TimeSamples> {
        if factors.is_empty() {
            return Err(Error::Shape("product of no factors".into()));
        }
        let mut nodes: Vec<f64> = factors.iter().flat_map(|f| f.nodes.iter().copied()).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let values = nodes
            .iter()
            .map(|&t| factors.iter().map(|f| f.value_at(t)).product())
            .collect();
        TimeSamples::new(nodes, values)
    }

    pub fn read_csv(path: &Path) -> Result<TimeSamples> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for row in rdr.deserialize() {
            let row: CsvRow = row?;
            nodes.push(row.t);
            values.push(row.value);
        }
        TimeSamples::new(nodes, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for (&t, &value) in self.nodes.iter().zip(&self.values) {
            w.serialize(CsvRow { t, value })?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    t: f64,
    value: f64,
}

/// Values sorted in decreasing order on consecutive intervals of the original
/// lengths, starting at 0.
pub fn decreasing_rearrangement(ts: &TimeSamples) -> TimeSamples {
    let mut steps: Vec<(f64, f64)> = ts.values.iter().copied().zip(ts.lengths()).collect();
    steps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut t = 0.0;
    let mut nodes = Vec::with_capacity(steps.len());
    let mut values = Vec::with_capacity(steps.len());
    for (v, len) in steps {
        t += len;
        nodes.push(t);
        values.push(v);
    }
    TimeSamples { nodes, values }
}

pub fn lorentz_norm(ts: &TimeSamples, idx: &LorentzIndex, horizon: f64) -> Result<f64> {
    if !(horizon >= ts.last_node()) {
        return Err(Error::Parameter(format!(
            "horizon {horizon} precedes the last node {}",
            ts.last_node()
        )));
    }
    let star = decreasing_rearrangement(ts);
    let (rho, r) = (idx.rho, idx.r);
    if r.is_infinite() {
        return Ok(star
            .nodes
            .iter()
            .zip(&star.values)
            .map(|(&c, &v)| v * c.powf(1.0 / rho))
            .fold(0.0, f64::max));
    }
    let e = r / rho;
    let mut prev = 0.0f64;
    let mut sum = 0.0;
    for (&c, &v) in star.nodes.iter().zip(&star.values) {
        let w = c.powf(e);
        if v > 0.0 {
            sum += v.powf(r) * (w - prev);
        }
        prev = w;
    }
    Ok((sum / e).powf(1.0 / r))
}

/// `(‖|f|^m‖_{L^{ρ,r}}, ‖f‖_{L^{mρ,mr}}^m)`; the two agree identically.
pub fn power_identity_check(ts: &TimeSamples, m: f64, idx: &LorentzIndex) -> Result<(f64, f64)> {
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::Parameter(format!("power must be >= 1, got {m}")));
    }
    let horizon = ts.last_node();
    let lhs = lorentz_norm(&ts.map(|v| v.powf(m))?, idx, horizon)?;
    let lifted = LorentzIndex::new(m * idx.rho, m * idx.r)?;
    let rhs = lorentz_norm(ts, &lifted, horizon)?.powf(m);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs_product: f64,
    /// `lhs / rhs_product`, 0 when the product vanishes identically.
    pub ratio: f64,
}

/// Compares `‖Π f_i‖_{L^{ρ,r}}` with `Π ‖f_i‖_{L^{ρ_i,r}}` for `Σ 1/ρ_i = 1/ρ`.
pub fn holder_product_check(
    factors: &[TimeSamples],
    rhos: &[f64],
    rho: f64,
    r: f64,
) -> Result<HolderCheck> {
    if factors.len() != rhos.len() || factors.is_empty() {
        return Err(Error::Parameter(format!(
            "{} factors but {} exponents",
            factors.len(),
            rhos.len()
        )));
    }
    let total: f64 = rhos.iter().map(|p| 1.0 / p).sum();
    if (total - 1.0 / rho).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "Σ 1/ρ_i = {total} differs from 1/ρ = {}",
            1.0 / rho
        )));
    }
    if rhos.iter().any(|&p| p < rho) {
        return Err(Error::Parameter("every ρ_i must be >= ρ".into()));
    }
    let refs: Vec<&TimeSamples> = factors.iter().collect();
    let prod = TimeSamples::product(&refs)?;
    let horizon = prod.last_node();
    let lhs = lorentz_norm(&prod, &LorentzIndex::new(rho, r)?, horizon)?;
    let mut rhs_product = 1.0;
    for (f, &p) in factors.iter().zip(rhos) {
        rhs_product *= lorentz_norm(f, &LorentzIndex::new(p, r)?, horizon)?;
    }
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs_product };
    Ok(HolderCheck {
        lhs,
        rhs_product,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator(len: f64, total: f64) -> TimeSamples {
        if len >= total {
            TimeSamples::new(vec![len / 2.0, len], vec![1.0, 1.0]).unwrap()
        } else {
            TimeSamples::new(vec![len, total], vec![1.0, 0.0]).unwrap()
        }
    }

    #[test]
    fn rearrangement_examples() {
        let c = TimeSamples::new(vec![0.5, 1.0, 2.0], vec![3.0; 3]).unwrap();
        let star = decreasing_rearrangement(&c);
        assert_eq!(star.values(), &[3.0; 3]);
        assert_eq!(star.last_node(), 2.0);

        let inc = TimeSamples::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]).unwrap();
        let star = decreasing_rearrangement(&inc);
        assert_eq!(star.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(star.nodes(), &[1.0, 2.0, 3.0]);

        let ind = TimeSamples::new(vec![0.5, 1.0, 1.5, 2.0], vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let star = decreasing_rearrangement(&ind);
        assert_eq!(star.value_at(0.9), 1.0);
        assert_eq!(star.value_at(1.1), 0.0);
        assert_eq!(star.distribution(0.5), 1.0);
    }

    #[test]
    fn indicator_closed_forms() {
        let ind = indicator(1.0, 2.0);
        let v = lorentz_norm(&ind, &LorentzIndex::new(2.0, 1.0).unwrap(), 2.0).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        for rho in [1.5, 3.0, 10.0] {
            let v = lorentz_norm(&ind, &LorentzIndex::new(rho, f64::INFINITY).unwrap(), 2.0).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn errors() {
        assert!(LorentzIndex::new(1.0, 2.0).is_err());
        assert!(LorentzIndex::new(2.0, 0.5).is_err());
        assert!(TimeSamples::new(vec![1.0], vec![1.0]).is_err());
        assert!(TimeSamples::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(TimeSamples::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(TimeSamples::new(vec![1.0, 2.0], vec![-1.0, 1.0]).is_err());
        let ind = indicator(1.0, 2.0);
        assert!(lorentz_norm(&ind, &LorentzIndex::new(2.0, 1.0).unwrap(), 1.5).is_err());
    }

    #[test]
    fn power_identity_examples() {
        let ts = TimeSamples::new(vec![0.1, 0.4, 1.0], vec![2.0, 0.5, 1.0]).unwrap();
        let idx = LorentzIndex::new(2.0, 3.0).unwrap();
        let (l, r) = power_identity_check(&ts, 1.0, &idx).unwrap();
        assert!((l - r).abs() <= 1e-15 * r);

        let zero = TimeSamples::new(vec![0.5, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(power_identity_check(&zero, 2.0, &idx).unwrap(), (0.0, 0.0));

        let ind = indicator(1.0, 2.0);
        let (l, r) = power_identity_check(&ind, 2.0, &LorentzIndex::new(2.0, 1.0).unwrap()).unwrap();
        assert!((l - 2.0).abs() < 1e-14 && (r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn holder_examples() {
        let ind = indicator(1.0, 2.0);
        let h = holder_product_check(&[ind.clone(), ind.clone()], &[4.0, 4.0], 2.0, 1.0).unwrap();
        assert!((h.lhs - 2.0).abs() < 1e-14);
        assert!((h.rhs_product - 16.0).abs() < 1e-12);
        assert!(h.ratio.is_finite());

        let zero = TimeSamples::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let h = holder_product_check(&[ind.clone(), zero], &[4.0, 4.0], 2.0, 1.0).unwrap();
        assert_eq!(h.lhs, 0.0);

        let ts = TimeSamples::new(vec![0.3, 0.7, 1.0], vec![1.0, 3.0, 2.0]).unwrap();
        let h = holder_product_check(&[ts], &[3.0], 3.0, 2.0).unwrap();
        assert!((h.ratio - 1.0).abs() < 1e-15);

        assert!(holder_product_check(&[ind.clone(), ind], &[4.0, 3.0], 2.0, 1.0).is_err());
    }

    #[test]
    fn product_refines_nodes() {
        let a = TimeSamples::new(vec![1.0, 2.0], vec![2.0, 3.0]).unwrap();
        let b = TimeSamples::new(vec![0.5, 3.0], vec![5.0, 7.0]).unwrap();
        let p = TimeSamples::product(&[&a, &b]).unwrap();
        assert_eq!(p.nodes(), &[0.5, 1.0, 2.0, 3.0]);
        assert_eq!(p.values(), &[10.0, 14.0, 21.0, 0.0]);
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let ts = TimeSamples::new(vec![0.25, 1.0], vec![1.5, 0.125]).unwrap();
        ts.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,value\n"));
        assert_eq!(TimeSamples::read_csv(&path).unwrap(), ts);
    }

    #[test]
    fn log_nodes_span() {
        let n = log_uniform_nodes(2.0, 7);
        assert_eq!(n.len(), 7);
        assert!((n[0] - 2e-6).abs() < 1e-20);
        assert_eq!(n[6], 2.0);
        assert!(n.windows(2).all(|w| w[1] > w[0]));
    }
}
