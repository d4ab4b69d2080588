use serde::{Deserialize, Serialize};

use super::Check;
use crate::error::Result;
use crate::logreal::LogReal;
use crate::moments::{
    expected_n, expected_n2, expected_n2_independent, expected_x, expected_x2,
    expected_x2_independent, ModelParams,
};
use crate::oracle::GraphSpace;

pub const AUDIT_P_GRID: [f64; 4] = [0.2, 0.4, 0.5, 0.7];
pub const AUDIT_RTOL: f64 = 1e-10;

/// Closed forms vs the brute-force oracle at one (n, k, p).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub oracle_e_x: f64,
    pub oracle_e_x2: f64,
    pub oracle_e_n: f64,
    pub oracle_e_n2: f64,
    pub rel_err_e_x: f64,
    pub rel_err_e_x2: f64,
    pub rel_err_e_n: f64,
    pub rel_err_e_n2: f64,
    /// deviation of the independent-pairs forms (informational)
    pub rel_err_e_x2_independent: f64,
    pub rel_err_e_n2_independent: f64,
}

impl AuditRow {
    pub fn max_err(&self) -> f64 {
        self.rel_err_e_x
            .max(self.rel_err_e_x2)
            .max(self.rel_err_e_n)
            .max(self.rel_err_e_n2)
    }
}

pub fn audit_point(space: &GraphSpace, k: usize, p: f64) -> Result<AuditRow> {
    let n = space.n();
    let o = space.report(k, p)?;
    let params = ModelParams::new(n as u64, k as u64, p);
    let err = |f: LogReal, exact: f64| f.rel_err(&LogReal::from_f64(exact));
    Ok(AuditRow {
        n,
        k,
        p,
        oracle_e_x: o.e_x,
        oracle_e_x2: o.e_x2,
        oracle_e_n: o.e_n,
        oracle_e_n2: o.e_n2,
        rel_err_e_x: err(expected_x(&params), o.e_x),
        rel_err_e_x2: err(expected_x2(&params), o.e_x2),
        rel_err_e_n: err(expected_n(&params), o.e_n),
        rel_err_e_n2: err(expected_n2(&params), o.e_n2),
        rel_err_e_x2_independent: err(expected_x2_independent(&params), o.e_x2),
        rel_err_e_n2_independent: err(expected_n2_independent(&params), o.e_n2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub max_rel_err: f64,
    pub max_rel_err_independent: f64,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "n,k,p,oracle_e_x,oracle_e_x2,oracle_e_n,oracle_e_n2,rel_err_e_x,rel_err_e_x2,\
             rel_err_e_n,rel_err_e_n2,rel_err_e_x2_independent,rel_err_e_n2_independent\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e}\n",
                r.n, r.k, r.p, r.oracle_e_x, r.oracle_e_x2, r.oracle_e_n, r.oracle_e_n2,
                r.rel_err_e_x, r.rel_err_e_x2, r.rel_err_e_n, r.rel_err_e_n2,
                r.rel_err_e_x2_independent, r.rel_err_e_n2_independent
            ));
        }
        s
    }
}

/// Every n in `1..=n_max`, every k in `1..=n`, every p in `ps`, plus any
/// `extra` (n, k, p) points.
pub fn run_formula_audit(
    n_max: usize,
    ps: &[f64],
    extra: &[(usize, usize, f64)],
) -> Result<AuditReport> {
    let mut rows = Vec::new();
    let mut extra_ns: Vec<usize> = extra.iter().map(|e| e.0).filter(|&n| n > n_max).collect();
    extra_ns.sort_unstable();
    extra_ns.dedup();
    for n in 1..=n_max {
        let space = GraphSpace::enumerate(n)?;
        for k in 1..=n {
            for &p in ps {
                rows.push(audit_point(&space, k, p)?);
            }
        }
        for &(_, k, p) in extra.iter().filter(|e| e.0 == n) {
            rows.push(audit_point(&space, k, p)?);
        }
    }
    for n in extra_ns {
        let space = GraphSpace::enumerate(n)?;
        for &(_, k, p) in extra.iter().filter(|e| e.0 == n) {
            rows.push(audit_point(&space, k, p)?);
        }
    }
    let max_rel_err = rows.iter().map(AuditRow::max_err).fold(0.0, f64::max);
    let max_rel_err_independent = rows
        .iter()
        .map(|r| r.rel_err_e_x2_independent.max(r.rel_err_e_n2_independent))
        .fold(0.0, f64::max);

    let mut checks = vec![Check::new(
        "formula_oracle_agreement",
        max_rel_err <= AUDIT_RTOL,
        format!("max relative error {max_rel_err:.3e} over {} points (tolerance {AUDIT_RTOL:e})", rows.len()),
    )];
    let zero_col: Vec<_> = rows.iter().filter(|r| r.p == 0.0 && r.k < r.n).collect();
    if !zero_col.is_empty() {
        // edgeless graph: no dominating k-set, and only (n-1)-sets miss exactly one vertex
        let ok = zero_col.iter().all(|r| {
            let near = if r.k + 1 == r.n { r.n as f64 } else { 0.0 };
            r.oracle_e_x == 0.0 && r.oracle_e_x2 == 0.0 && r.oracle_e_n == near
        });
        checks.push(Check::new("edgeless_column", ok, format!("{} points", zero_col.len())));
    }
    Ok(AuditReport {
        rows,
        max_rel_err,
        max_rel_err_independent,
        checks,
    })
}
