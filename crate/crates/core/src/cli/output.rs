//! CSV and JSON writers.
//!
//! Floats are written with 17 significant digits so they re-parse to the
//! same bits.

use std::io::{self, Write};

use serde::Serialize;

use crate::oracle::{minimize_dsq, quartic_roots};
use crate::scatter::{denominator, ScatteringResult};
use crate::singular::{quartic_coeffs, region_of, root_nature, ss_closed_form, Branch, Region, RootNature, SSBranchSolution, ScanRow};

pub const SWEEP_HEADER: &str = "E,beta,re_r,im_r,re_t,im_t,R,T,absD";
pub const SCAN_HEADER: &str = "v1,v2,classification,E_plus,E_minus";

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_sweep_csv(out: &mut dyn Write, rows: &[ScatteringResult]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        let (e, beta) = (fmt_f64(row.energy), fmt_f64(row.beta));
        match (row.at_singularity, row.r, row.t) {
            (false, Some(r), Some(t)) => writeln!(
                out,
                "{e},{beta},{},{},{},{},{},{},{}",
                fmt_f64(r.re),
                fmt_f64(r.im),
                fmt_f64(t.re),
                fmt_f64(t.im),
                fmt_f64(row.big_r),
                fmt_f64(row.big_t),
                fmt_f64(row.d_value.norm()),
            )?,
            _ => writeln!(out, "{e},{beta},nan,nan,nan,nan,inf,inf,0e0")?,
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepJsonRow {
    #[serde(rename = "E")]
    energy: f64,
    beta: f64,
    r: Option<[f64; 2]>,
    t: Option<[f64; 2]>,
    /// null at a singularity
    #[serde(rename = "R")]
    big_r: Option<f64>,
    #[serde(rename = "T")]
    big_t: Option<f64>,
    #[serde(rename = "absD")]
    abs_d: f64,
    at_singularity: bool,
}

pub fn write_sweep_json(out: &mut dyn Write, rows: &[ScatteringResult]) -> io::Result<()> {
    let json: Vec<SweepJsonRow> = rows
        .iter()
        .map(|row| SweepJsonRow {
            energy: row.energy,
            beta: row.beta,
            r: row.r.map(|z| [z.re, z.im]),
            t: row.t.map(|z| [z.re, z.im]),
            big_r: (!row.at_singularity).then_some(row.big_r),
            big_t: (!row.at_singularity).then_some(row.big_t),
            abs_d: if row.at_singularity { 0.0 } else { row.d_value.norm() },
            at_singularity: row.at_singularity,
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &json)?;
    writeln!(out)
}

pub fn write_scan_csv(out: &mut dyn Write, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(row.v1),
            fmt_f64(row.v2),
            row.classification.as_str(),
            opt(row.e_plus),
            opt(row.e_minus)
        )?;
    }
    Ok(())
}

/// Numerical confirmation of one feasible branch.
#[derive(Debug, Clone, Serialize)]
pub struct BranchCheck {
    pub branch: Branch,
    /// `|D|` at the branch's `(g², β)`.
    pub abs_d: f64,
    /// Verdict on the quartic built with the branch's `g²`.
    pub root_nature: RootNature,
    /// Real root of multiplicity 2 found within 1e-6 of `β`.
    pub double_root: bool,
    /// Arg-min of `|D|²` on the default β window.
    pub minimizer_beta: f64,
}

/// JSON report of `qdelta ss`. NaN fields serialize as `null`.
#[derive(Debug, Clone, Serialize)]
pub struct SsReport {
    pub v1: f64,
    pub v2: f64,
    pub g2_plus: f64,
    pub g2_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    #[serde(rename = "E_plus")]
    pub e_plus: f64,
    #[serde(rename = "E_minus")]
    pub e_minus: f64,
    pub classification: Region,
    pub branches: [SSBranchSolution; 2],
    pub oracle: Vec<BranchCheck>,
}

impl SsReport {
    pub fn build(v1: f64, v2: f64) -> crate::Result<Self> {
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(crate::Error::Domain("v1 and v2 must be finite".into()));
        }
        let (plus, minus) = ss_closed_form(v1, v2);
        let mut oracle = Vec::new();
        for sol in [plus, minus].into_iter().filter(|s| s.feasible) {
            let p = sol.potential(v1, v2)?;
            let q = quartic_coeffs(&p);
            let roots = quartic_roots(&q)?;
            let double_root = roots
                .real_roots()
                .iter()
                .any(|&(x, m)| m == 2 && (x - sol.beta).abs() <= 1e-6 * sol.beta.max(1.0));
            let (minimizer_beta, _) = minimize_dsq(&p, crate::oracle::default_beta_max(&p))?;
            oracle.push(BranchCheck {
                branch: sol.branch,
                abs_d: denominator(&p, sol.beta).norm(),
                root_nature: root_nature(&q),
                double_root,
                minimizer_beta,
            });
        }
        Ok(SsReport {
            v1,
            v2,
            g2_plus: plus.g_squared,
            g2_minus: minus.g_squared,
            beta_plus: plus.beta,
            beta_minus: minus.beta,
            e_plus: plus.energy,
            e_minus: minus.energy,
            classification: region_of(&plus, &minus),
            branches: [plus, minus],
            oracle,
        })
    }

    pub fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "v1 = {}, v2 = {}: {}", self.v1, self.v2, self.classification.as_str())?;
        for b in &self.branches {
            let name = match b.branch {
                Branch::Plus => "plus ",
                Branch::Minus => "minus",
            };
            if b.feasible {
                writeln!(out, "  {name}: g^2 = {}, beta = {}, E = {}", b.g_squared, b.beta, b.energy)?;
            } else {
                writeln!(out, "  {name}: infeasible ({:?}), g^2 = {}, beta = {}", b.reason, b.g_squared, b.beta)?;
            }
        }
        for c in &self.oracle {
            writeln!(
                out,
                "  check {:?}: |D| = {:.3e}, {:?}, double root {}, argmin |D|^2 at beta = {}",
                c.branch, c.abs_d, c.root_nature, c.double_root, c.minimizer_beta
            )?;
        }
        Ok(())
    }
}
