//! Claim registry, run configuration and JSON check reports.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::solver::SolveConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    #[serde(rename = "TAU-RELATOR")]
    TauRelator,
    #[serde(rename = "SYMMREP-TRACE")]
    SymmrepTrace,
    #[serde(rename = "F2-CONJUGATOR")]
    F2Conjugator,
    #[serde(rename = "H1-MAPTORUS")]
    H1Maptorus,
    #[serde(rename = "WTAU-H1")]
    WtauH1,
    #[serde(rename = "EXTENSION-COUNT")]
    ExtensionCount,
    #[serde(rename = "SU2-ORACLE")]
    Su2Oracle,
    #[serde(rename = "BODEN-SU3")]
    BodenSu3,
    #[serde(rename = "HEEGAARD-INVARIANCE")]
    HeegaardInvariance,
    #[serde(rename = "PATH-CHECK")]
    PathCheck,
    #[serde(rename = "MUTATION-INVOLUTION")]
    MutationInvolution,
}

impl ClaimId {
    pub const ALL: [ClaimId; 11] = [
        ClaimId::TauRelator,
        ClaimId::SymmrepTrace,
        ClaimId::F2Conjugator,
        ClaimId::H1Maptorus,
        ClaimId::WtauH1,
        ClaimId::ExtensionCount,
        ClaimId::Su2Oracle,
        ClaimId::BodenSu3,
        ClaimId::HeegaardInvariance,
        ClaimId::PathCheck,
        ClaimId::MutationInvolution,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClaimId::TauRelator => "TAU-RELATOR",
            ClaimId::SymmrepTrace => "SYMMREP-TRACE",
            ClaimId::F2Conjugator => "F2-CONJUGATOR",
            ClaimId::H1Maptorus => "H1-MAPTORUS",
            ClaimId::WtauH1 => "WTAU-H1",
            ClaimId::ExtensionCount => "EXTENSION-COUNT",
            ClaimId::Su2Oracle => "SU2-ORACLE",
            ClaimId::BodenSu3 => "BODEN-SU3",
            ClaimId::HeegaardInvariance => "HEEGAARD-INVARIANCE",
            ClaimId::PathCheck => "PATH-CHECK",
            ClaimId::MutationInvolution => "MUTATION-INVOLUTION",
        }
    }

    /// The statement each check verifies.
    pub fn anchor(self) -> &'static str {
        match self {
            ClaimId::TauRelator => "tau_*(R) = b1^-1 R b1 in the free group on a1 b1 a2 b2",
            ClaimId::SymmrepTrace => {
                "tr rho(tau_* w) = tr rho(w) and rho o tau_* = g rho g^-1 for SU(2) representations rho of the genus-2 surface group"
            }
            ClaimId::F2Conjugator => "for A, B in SU(2) some q satisfies q A q^-1 = A^-1 and q B q^-1 = B^-1",
            ClaimId::H1Maptorus => {
                "H1(S^1 x_tau Sigma_2) = (Z/2)^4 + Z; among S^2(2,2,2,2,2,2; e) only e = -3 has that homology"
            }
            ClaimId::WtauH1 => "H1(A u_Sigma B) = 0 implies H1(W^tau) = Z and H1(A u_tau B) = 0",
            ClaimId::ExtensionCount => {
                "a Sigma-irreducible phi extends over W^tau exactly by z -> g or -g; both give one SO(3) extension with ext(z) of order two"
            }
            ClaimId::Su2Oracle => {
                "irreducible SU(2) classes of Sigma(2,3,5) and Sigma(2,3,7) found numerically equal the rotation-number count"
            }
            ClaimId::BodenSu3 => {
                "Sigma(2,3,7) has 4 irreducible SU(3) classes; complex conjugation fixes 2 and swaps the other 2"
            }
            ClaimId::HeegaardInvariance => "on F2 with T_*(x) = x^-1, T_*(y) = y^-1, tr rho(T_* w) = tr rho(w)",
            ClaimId::PathCheck => {
                "alpha_r(R) = 1 for r in [0,1], each alpha_r o tau_* is conjugate to alpha_r, and the three path pieces share endpoints"
            }
            ClaimId::MutationInvolution => "(phi^tau)^tau has the character of phi",
        }
    }
}

impl std::fmt::Display for ClaimId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Passes, with an annotation worth reading.
    Flag,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok { Status::Pass } else { Status::Fail }
    }

    pub fn ok(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub claim: ClaimId,
    pub anchor: String,
    pub status: Status,
    pub residuals: IndexMap<String, f64>,
    pub values: IndexMap<String, serde_json::Value>,
    pub notes: Vec<String>,
}

impl CheckRecord {
    pub fn new(claim: ClaimId) -> Self {
        CheckRecord {
            claim,
            anchor: claim.anchor().to_string(),
            status: Status::Pass,
            residuals: IndexMap::new(),
            values: IndexMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn residual(mut self, key: &str, v: f64) -> Self {
        self.residuals.insert(key.to_string(), v);
        self
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(key.to_string(), serde_json::to_value(v).expect("serializable value"));
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    /// Sets `Fail` unless `ok`; never upgrades a failure.
    pub fn require(mut self, ok: bool, why: impl Into<String>) -> Self {
        if !ok {
            self.status = Status::Fail;
            self.notes.push(format!("failed: {}", why.into()));
        }
        self
    }

    /// Marks a passing record as flagged.
    pub fn flag(mut self, why: impl Into<String>) -> Self {
        if self.status == Status::Pass {
            self.status = Status::Flag;
        }
        self.notes.push(why.into());
        self
    }

    /// One line for terminals: `PASS CLAIM key=value ...`.
    pub fn summary(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Flag => "FLAG",
        };
        let mut line = format!("{status} {}", self.claim);
        for (k, v) in &self.residuals {
            line.push_str(&format!(" {k}={v:.3e}"));
        }
        for (k, v) in &self.values {
            if !v.is_object() && !(v.is_array() && v.as_array().is_some_and(|a| a.len() > 8)) {
                line.push_str(&format!(" {k}={v}"));
            }
        }
        line
    }
}

/// Everything that influences a run. Equal configs give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub accept_tol: f64,
    pub dedup_tol: f64,
    pub trace_tol: f64,
    pub restarts: usize,
    pub fixtures: String,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolveConfig::default();
        RunConfig {
            seed: s.seed,
            accept_tol: s.accept_tol,
            dedup_tol: s.dedup_tol,
            trace_tol: crate::mutation::TRACE_TOL,
            restarts: s.restarts,
            fixtures: crate::fixtures::DEFAULT_DIR.to_string(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            restarts: self.restarts,
            seed: self.seed,
            accept_tol: self.accept_tol,
            dedup_tol: self.dedup_tol,
            ..SolveConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    /// Command-level values that are not tied to one claim.
    pub summary: IndexMap<String, serde_json::Value>,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: RunConfig) -> Self {
        Report { command: command.into(), config, summary: IndexMap::new(), records: Vec::new() }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(v).expect("serializable value"));
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status.ok())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_labels_round_trip() {
        for c in ClaimId::ALL {
            let v = serde_json::to_value(c).unwrap();
            assert_eq!(v, serde_json::Value::String(c.label().into()));
            assert_eq!(serde_json::from_value::<ClaimId>(v).unwrap(), c);
            assert!(!c.anchor().is_empty());
        }
    }

    #[test]
    fn status_logic() {
        let r = CheckRecord::new(ClaimId::PathCheck).flag("note");
        assert_eq!(r.status, Status::Flag);
        let r = r.require(false, "bad").flag("again");
        assert_eq!(r.status, Status::Fail);
        let mut rep = Report::new("x", RunConfig::default());
        rep.push(CheckRecord::new(ClaimId::TauRelator).flag("f"));
        assert!(rep.passed());
        rep.push(r);
        assert!(!rep.passed());
        assert!(rep.records[1].summary().starts_with("FAIL PATH-CHECK"));
    }
}
