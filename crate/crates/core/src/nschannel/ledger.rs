use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub t: f64,
    /// `1/2 ||u||^2`
    pub kinetic: f64,
    /// `nu ||grad u||^2`
    pub dissipation_rate: f64,
    /// `nu int_0^t ||grad u||^2 ds`
    pub cumulative_dissipation: f64,
}

/// Energy bookkeeping at the sample times of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    records: Vec<LedgerRecord>,
}

impl EnergyLedger {
    pub fn push(&mut self, r: LedgerRecord) {
        self.records.push(r);
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&LedgerRecord> {
        self.records.last()
    }

    /// `max_t (kinetic(t) + cumulative(t) - kinetic(0))`; positive values
    /// are energy created by the discretization.
    pub fn energy_residual(&self) -> f64 {
        let k0 = self.records.first().map_or(0.0, |r| r.kinetic);
        self.records
            .iter()
            .map(|r| r.kinetic + r.cumulative_dissipation - k0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `kinetic(t2) + diss(t1, t2) - kinetic(t1)` over sample pairs.
    pub fn max_interval_residual(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (a, ra) in self.records.iter().enumerate() {
            for rb in &self.records[a + 1..] {
                let r = rb.kinetic + (rb.cumulative_dissipation - ra.cumulative_dissipation) - ra.kinetic;
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn cumulative_is_monotone(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].cumulative_dissipation >= w[0].cumulative_dissipation)
    }

    /// CSV with header `t,kinetic,dissipation_rate,cumulative_dissipation`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,kinetic,dissipation_rate,cumulative_dissipation\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.t, r.kinetic, r.dissipation_rate, r.cumulative_dissipation
            ));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ledger = EnergyLedger::default();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Shape(format!("malformed ledger line {}", n + 1)))?;
            if v.len() != 4 {
                return Err(Error::Shape(format!("ledger line {} needs 4 columns", n + 1)));
            }
            ledger.push(LedgerRecord {
                t: v[0],
                kinetic: v[1],
                dissipation_rate: v[2],
                cumulative_dissipation: v[3],
            });
        }
        Ok(ledger)
    }
}
