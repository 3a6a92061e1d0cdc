//! Per-time-level diagnostics and their CSV persistence.
//!
//! Instantaneous quantities are recorded at each ledger row; the `int_*`
//! columns are trapezoidal time integrals accumulated over every step,
//! whatever the ledger stride.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::snapshot::write_atomic;

/// One row of the energy ledger. Field order is the CSV column order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerRow {
    pub step: u64,
    pub t: f64,
    /// Step size that led to this row (0 on the first row).
    pub dt: f64,

    /// `‖u‖²`
    pub u_l2_sq: f64,
    /// `‖ω‖²`
    pub w_l2_sq: f64,
    /// `‖∇u‖²`
    pub u_grad_sq: f64,
    /// `‖∇ω‖²`
    pub w_grad_sq: f64,
    /// `‖∇·ω‖²`
    pub w_div_sq: f64,
    /// `∫ (∇∧ω)·u`
    pub flux_u: f64,
    /// `∫ (∇∧u)·ω`
    pub flux_w: f64,
    pub int_u_grad_sq: f64,
    pub int_w_grad_sq: f64,
    pub int_w_l2_sq: f64,
    pub int_w_div_sq: f64,
    pub int_flux_u: f64,
    pub int_flux_w: f64,

    /// `‖D^τ u‖²`
    pub u_frac_sq: f64,
    /// `‖∇ D^τ u‖² = ‖u‖²_{Ḣ^{τ+1}}`
    pub u_frac_grad_sq: f64,
    /// `⟨D^τ ∇·(v⊗u), D^τ u⟩`
    pub u_frac_adv: f64,
    /// `⟨D^τ ∇p, D^τ u⟩`
    pub u_frac_press: f64,
    /// `⟨D^τ ∇∧ω, D^τ u⟩`
    pub u_frac_coupling: f64,
    pub int_u_frac_grad_sq: f64,
    pub int_u_frac_adv: f64,
    pub int_u_frac_press: f64,
    pub int_u_frac_coupling: f64,

    /// `‖L^σ ω‖²`
    pub w_frac_sq: f64,
    /// `‖∇ L^σ ω‖²`
    pub w_frac_grad_sq: f64,
    /// `‖L^σ ∇·ω‖²`
    pub w_frac_div_sq: f64,
    /// `⟨L^σ ∇·(v⊗ω), L^σ ω⟩`
    pub w_frac_adv: f64,
    /// `⟨L^σ ∇∧u, L^σ ω⟩`
    pub w_frac_coupling: f64,
    pub int_w_frac_l2_sq: f64,
    pub int_w_frac_grad_sq: f64,
    pub int_w_frac_div_sq: f64,
    pub int_w_frac_adv: f64,
    pub int_w_frac_coupling: f64,

    pub u_l2: f64,
    pub w_l2: f64,
    pub u_h_tau: f64,
    pub u_hdot_tau: f64,
    pub u_hdot_tau1: f64,
    pub w_h_sigma: f64,
    pub w_h_sigma1: f64,
    /// `‖ω‖²_{Ḣ^{σ+1}}`, summed over nonzero modes.
    pub w_hdot_sigma1_sq: f64,
    pub int_w_hdot_sigma1_sq: f64,

    /// `‖∇·u‖ / ‖u‖` (0 for the zero field).
    pub u_div_rel: f64,
    /// `max_x |v(x)|`.
    pub max_speed: f64,

    /// Unscaled balance residuals at this row.
    pub res_l2_u: f64,
    pub res_l2_w: f64,
    pub res_frac_u: f64,
    pub res_frac_w: f64,
}

impl LedgerRow {
    /// Column names in file order.
    pub fn columns() -> Vec<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(LedgerRow::default()).expect("in-memory csv");
        let bytes = w.into_inner().expect("in-memory csv");
        let mut r = csv::Reader::from_reader(bytes.as_slice());
        r.headers().expect("header row").iter().map(str::to_owned).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn first(&self) -> Result<&LedgerRow> {
        self.rows.first().ok_or_else(|| Error::Schema("empty ledger".into()))
    }

    pub fn last(&self) -> Result<&LedgerRow> {
        self.rows.last().ok_or_else(|| Error::Schema("empty ledger".into()))
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(LedgerRow::columns())
                .map_err(|e| Error::Schema(e.to_string()))?;
        }
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Schema(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Schema(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }

    /// Missing, extra or malformed columns are schema errors.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
        let expected = LedgerRow::columns();
        if headers.iter().ne(expected.iter().map(String::as_str)) {
            let missing: Vec<&str> = expected
                .iter()
                .map(String::as_str)
                .filter(|c| !headers.iter().any(|h| h == *c))
                .collect();
            return Err(Error::Schema(if missing.is_empty() {
                "unexpected ledger columns".to_string()
            } else {
                format!("missing ledger columns: {}", missing.join(", "))
            }));
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<LedgerRow>, _>>()
            .map_err(|e| Error::Schema(e.to_string()))?;
        Ok(EnergyLedger { rows })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_is_lossless() {
        let a = LedgerRow {
            t: 0.1,
            u_l2_sq: 1.0 / 3.0,
            flux_w: -2.5e-17,
            res_frac_w: f64::MIN_POSITIVE,
            ..Default::default()
        };
        let mut b = a.clone();
        b.step = 7;
        b.max_speed = 12345.678901234567;
        let l = EnergyLedger { rows: vec![a, b] };
        let back = EnergyLedger::read_csv(l.to_csv_bytes().unwrap().as_slice()).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn missing_column_is_schema_error() {
        let csv = "step,t\n0,0.0\n";
        match EnergyLedger::read_csv(csv.as_bytes()) {
            Err(Error::Schema(msg)) => assert!(msg.contains("u_l2_sq")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn empty_ledger_keeps_header() {
        let bytes = EnergyLedger::default().to_csv_bytes().unwrap();
        let back = EnergyLedger::read_csv(bytes.as_slice()).unwrap();
        assert!(back.is_empty());
        assert!(back.first().is_err());
    }
}
