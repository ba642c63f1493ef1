use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::report::num;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    H0,
    H1,
    H2,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::H0 => "H0",
            Label::H1 => "H1",
            Label::H2 => "H2",
        }
    }
}

/// Raw exponents as supplied by a user. `r` defaults to 2 and `p0` to the
/// value fixed by `n/p0 = n/p + 2α/ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisInput {
    pub m: f64,
    pub n: usize,
    pub p: f64,
    pub rho: f64,
    pub alpha: f64,
    pub r: Option<f64>,
    pub p0: Option<f64>,
}

impl HypothesisInput {
    pub fn new(m: f64, n: usize, p: f64, alpha: f64, rho: f64) -> Self {
        Self {
            m,
            n,
            p,
            rho,
            alpha,
            r: None,
            p0: None,
        }
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r: Some(r), ..self }
    }

    pub fn with_p0(self, p0: f64) -> Self {
        Self {
            p0: Some(p0),
            ..self
        }
    }
}

/// Slack of one strict inequality; positive when it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margin {
    pub name: String,
    #[serde(serialize_with = "num")]
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    #[serde(serialize_with = "num")]
    pub s: f64,
    #[serde(serialize_with = "num")]
    pub s_tilde: f64,
    #[serde(serialize_with = "num")]
    pub rho_tilde: f64,
    #[serde(serialize_with = "num")]
    pub s0: f64,
    #[serde(serialize_with = "num")]
    pub p0: f64,
}

/// A validated exponent set together with its derived exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisSet {
    pub label: Label,
    #[serde(serialize_with = "num")]
    pub m: f64,
    pub n: usize,
    #[serde(serialize_with = "num")]
    pub p: f64,
    #[serde(serialize_with = "num")]
    pub p0: f64,
    #[serde(serialize_with = "num")]
    pub rho: f64,
    #[serde(serialize_with = "num")]
    pub r: f64,
    #[serde(serialize_with = "num")]
    pub alpha: f64,
    #[serde(serialize_with = "num")]
    pub s: f64,
    #[serde(serialize_with = "num")]
    pub s_tilde: f64,
    #[serde(serialize_with = "num")]
    pub rho_tilde: f64,
    #[serde(serialize_with = "num")]
    pub s0: f64,
    pub margins: Vec<Margin>,
}

#[derive(Clone, Copy)]
enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
}

struct Check {
    name: String,
    lhs: f64,
    rel: Rel,
    rhs: f64,
}

impl Check {
    fn new(name: impl Into<String>, lhs: f64, rel: Rel, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rel,
            rhs,
        }
    }

    fn holds(&self) -> bool {
        match self.rel {
            Rel::Lt => self.lhs < self.rhs,
            Rel::Le => self.lhs <= self.rhs,
            Rel::Gt => self.lhs > self.rhs,
            Rel::Ge => self.lhs >= self.rhs,
        }
    }

    fn slack(&self) -> f64 {
        match self.rel {
            Rel::Lt | Rel::Le => self.rhs - self.lhs,
            Rel::Gt | Rel::Ge => self.lhs - self.rhs,
        }
    }

    fn violation(&self) -> String {
        let negated = match self.rel {
            Rel::Lt => "≥",
            Rel::Le => ">",
            Rel::Gt => "≤",
            Rel::Ge => "<",
        };
        format!(
            "{} violated ({} {} {})",
            self.name,
            short(self.lhs),
            negated,
            short(self.rhs)
        )
    }
}

/// Up to four decimals, trailing zeros dropped.
fn short(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn checks_for(label: Label, m: f64, n: f64, p: f64, rho: f64, alpha: f64) -> Vec<Check> {
    let a = 2.0 * alpha / rho;
    let base = (2.0 * alpha - 1.0) / m;
    let mut c = vec![Check::new("ρ > m+1", rho, Rel::Gt, m + 1.0)];
    match label {
        Label::H0 => {
            c.push(Check::new("p > 1", p, Rel::Gt, 1.0));
            c.push(Check::new("α > 1/2", alpha, Rel::Gt, 0.5));
            c.push(Check::new("α < 1 + n/(2p)", alpha, Rel::Lt, 1.0 + n / (2.0 * p)));
            c.push(Check::new(
                "2α/ρ > 2α-1-n/(2p)",
                a,
                Rel::Gt,
                2.0 * alpha - 1.0 - n / (2.0 * p),
            ));
            c.push(Check::new("2α/ρ < 2α-1", a, Rel::Lt, 2.0 * alpha - 1.0));
        }
        Label::H1 => {
            let lo = ((m - 1.0) * n / (3.0 - m)).max((4.0 - m) / (3.0 - m));
            c.push(Check::new("p > max{(m-1)n/(3-m), (4-m)/(3-m)}", p, Rel::Gt, lo));
            c.push(Check::new("p < n/(m-1)", p, Rel::Lt, n / (m - 1.0)));
            c.push(Check::new(
                "α > 1/2 + m(2-m)n/(2(3-m)p)",
                alpha,
                Rel::Gt,
                0.5 + m * (2.0 - m) * n / (2.0 * (3.0 - m) * p),
            ));
            c.push(Check::new(
                "α < (m+1)/2 + mn/(2p)",
                alpha,
                Rel::Lt,
                (m + 1.0) / 2.0 + m * n / (2.0 * p),
            ));
            c.push(Check::new(
                "2α/ρ > (2α-1)/m - n/((m+1)p)",
                a,
                Rel::Gt,
                base - n / ((m + 1.0) * p),
            ));
            c.push(Check::new(
                "2α/ρ < (2α-1)/m - (2-m)n/((3-m)p)",
                a,
                Rel::Lt,
                base - (2.0 - m) * n / ((3.0 - m) * p),
            ));
        }
        Label::H2 => {
            c.push(Check::new("n ≤ p", n, Rel::Le, p));
            c.push(Check::new("p < 2n", p, Rel::Lt, 2.0 * n));
            c.push(Check::new("α > 1/2", alpha, Rel::Gt, 0.5));
            c.push(Check::new("α < 1/2 + mn/p", alpha, Rel::Lt, 0.5 + m * n / p));
            c.push(Check::new(
                "2α/ρ > (2α-1)/m + (1-2n/p)/(m+1)",
                a,
                Rel::Gt,
                base + (1.0 - 2.0 * n / p) / (m + 1.0),
            ));
            c.push(Check::new("2α/ρ < (2α-1)/m", a, Rel::Lt, base));
        }
    }
    c
}

/// Validates the exponents against the hypothesis selected by `m`
/// (`m = 1`: H0, `1 < m < 2`: H1, `m >= 2`: H2) and derives the rest.
///
/// The error lists every violated inequality.
pub fn check_hypotheses(input: &HypothesisInput) -> Result<HypothesisSet> {
    let HypothesisInput {
        m,
        n,
        p,
        rho,
        alpha,
        r,
        p0,
    } = *input;
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::Parameter(format!("power m must be >= 1, got {m}")));
    }
    if !(2..=3).contains(&n) {
        return Err(Error::Parameter(format!("dimension must be 2 or 3, got {n}")));
    }
    for (name, v) in [("p", p), ("rho", rho), ("alpha", alpha)] {
        if !v.is_finite() {
            return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
        }
    }
    let label = if m == 1.0 {
        Label::H0
    } else if m < 2.0 {
        Label::H1
    } else {
        Label::H2
    };
    let nf = n as f64;
    let mut checks = checks_for(label, m, nf, p, rho, alpha);
    let r = r.unwrap_or(2.0);
    checks.push(Check::new("r ≥ 1", r, Rel::Ge, 1.0));
    let p0 = p0.unwrap_or(nf / (nf / p + 2.0 * alpha / rho));
    checks.push(Check::new("p0 > 1", p0, Rel::Gt, 1.0));
    checks.push(Check::new("p0 ≤ p", p0, Rel::Le, p));

    let violations: Vec<String> = checks
        .iter()
        .filter(|c| !c.holds())
        .map(Check::violation)
        .collect();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }

    let mut set = HypothesisSet {
        label,
        m,
        n,
        p,
        p0,
        rho,
        r,
        alpha,
        s: 0.0,
        s_tilde: 0.0,
        rho_tilde: 0.0,
        s0: 0.0,
        margins: Vec::new(),
    };
    let ex = derive_exponents(&set)?;
    set.s = ex.s;
    set.s_tilde = ex.s_tilde;
    set.rho_tilde = ex.rho_tilde;
    set.s0 = ex.s0;
    set.margins = checks
        .iter()
        .filter(|c| matches!(c.rel, Rel::Lt | Rel::Gt))
        .chain(window_checks(&set, &ex).iter())
        .map(|c| Margin {
            name: c.name.clone(),
            slack: c.slack(),
        })
        .collect();
    Ok(set)
}

fn window_checks(h: &HypothesisSet, ex: &Exponents) -> [Check; 2] {
    let n = h.n as f64;
    let mid = ex.s - n / h.p;
    let edge = ex.s0 - n / ex.p0;
    [
        Check::new("s - n/p > s0 - n/p0 - 2α", mid, Rel::Gt, edge - 2.0 * h.alpha),
        Check::new("s - n/p < s0 - n/p0", mid, Rel::Lt, edge),
    ]
}

/// `s`, `s̃`, `ρ̃`, `s0`, `p0` from the primary exponents, after checking
/// `s - n/p - 2α/ρ = s0 - n/p0 - 2α` and the strict window around it.
pub fn derive_exponents(h: &HypothesisSet) -> Result<Exponents> {
    let n = h.n as f64;
    let (m, p, rho, alpha, p0) = (h.m, h.p, h.rho, h.alpha, h.p0);
    let s = n / p + 2.0 * alpha / rho - (2.0 * alpha - 1.0) / m - 2.0 * alpha;
    let s0 = n / p0 - (2.0 * alpha - 1.0) / m;
    let ex = Exponents {
        s,
        s_tilde: s + 2.0 * m * alpha / rho,
        rho_tilde: rho / (m + 1.0),
        s0,
        p0,
    };
    let gap = (s - n / p - 2.0 * alpha / rho) - (s0 - n / p0 - 2.0 * alpha);
    if gap.abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "s - n/p - 2α/ρ differs from s0 - n/p0 - 2α by {gap:e}"
        )));
    }
    let broken: Vec<String> = window_checks(h, &ex)
        .iter()
        .filter(|c| !c.holds())
        .map(Check::violation)
        .collect();
    if !broken.is_empty() {
        return Err(Error::Consistency(broken.join("; ")));
    }
    Ok(ex)
}

impl HypothesisSet {
    /// The solver additionally needs `p >= 2`.
    pub fn require_solver_range(&self) -> Result<()> {
        if self.p < 2.0 {
            return Err(Error::Validation(vec![format!(
                "p ≥ 2 violated ({} < 2)",
                short(self.p)
            )]));
        }
        Ok(())
    }

    /// Regularity used for the difference estimate of `J_m` (half the upper
    /// bound on `s`) and the companion index `r0`, after checking the
    /// admissible `r` range.
    pub fn difference_exponents(&self) -> Result<(f64, f64)> {
        let (m, n, p, r) = (self.m, self.n as f64, self.p, self.r);
        if m <= 1.0 {
            return Err(Error::Validation(vec![format!(
                "m > 1 violated ({} ≤ 1)",
                short(m)
            )]));
        }
        if m < 2.0 {
            if r < 1.0 / (m - 1.0) {
                return Err(Error::Validation(vec![format!(
                    "r ≥ 1/(m-1) violated ({} < {})",
                    short(r),
                    short(1.0 / (m - 1.0))
                )]));
            }
            Ok(((m - 1.0).min((m - 1.0).powi(2) * n / p) / 2.0, 1.0))
        } else {
            if r > 2f64.min(p) {
                return Err(Error::Validation(vec![format!(
                    "r ≤ min{{2, p}} violated ({} > {})",
                    short(r),
                    short(2f64.min(p))
                )]));
            }
            Ok(((m - 1.0).min(n / p) / 2.0, r))
        }
    }
}

/// Serialises a list of named numbers as a JSON object in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params(pub Vec<(String, f64)>);

impl Params {
    pub fn push(&mut self, name: &str, value: f64) {
        self.0.push((name.to_string(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn of(h: &HypothesisSet) -> Self {
        let mut p = Params::default();
        for (k, v) in [
            ("m", h.m),
            ("n", h.n as f64),
            ("p", h.p),
            ("p0", h.p0),
            ("rho", h.rho),
            ("r", h.r),
            ("alpha", h.alpha),
            ("s", h.s),
            ("s_tilde", h.s_tilde),
            ("rho_tilde", h.rho_tilde),
            ("s0", h.s0),
        ] {
            p.push(k, v);
        }
        p
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, &crate::report::Num(*v))?;
        }
        map.end()
    }
}
