//! Serializable documents and table rows emitted by the command line tool.
//!
//! Exact values are always written as `num/den` strings. Fields under
//! `approx` and the `*Approx` CSV columns are decimal renderings for plots
//! and carry no information beyond the exact fields.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::f3::{self, F3Report};
use crate::f4::{self, CornerFlags, F4Report, Mode, ModeInfo};
use crate::game::{Params, Profile, Slopes};
use crate::rational::Rational;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub a: Rational,
    pub b: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// `f3`, `f4`, or `limit` for the N -> infinity documents.
    pub framework: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumEntry {
    #[serde(rename = "nABC")]
    pub n_abc: u32,
    #[serde(rename = "nBAC")]
    pub n_bac: u32,
    #[serde(rename = "fABC")]
    pub f_abc: Rational,
    #[serde(rename = "fBAC")]
    pub f_bac: Rational,
}

impl EquilibriumEntry {
    fn new(params: &Params, p: Profile) -> Self {
        EquilibriumEntry { n_abc: p.n_abc, n_bac: p.n_bac, f_abc: params.fraction(p.n_abc), f_bac: params.fraction(p.n_bac) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Limits {
    pub f3_equilibrium: [Rational; 2],
    pub f3_hessian: [[Rational; 2]; 2],
    pub f3_hessian_positive_definite: bool,
    pub f4_fraction: Rational,
    pub f4_poa: Rational,
}

impl Limits {
    pub fn new(slopes: &Slopes) -> Self {
        let (x, y) = f3::nonatomic_equilibrium();
        let hessian = f3::nonatomic_hessian(slopes);
        Limits {
            f3_equilibrium: [x, y],
            f3_hessian: hessian,
            f3_hessian_positive_definite: f3::is_positive_definite(&hessian),
            f4_fraction: f4::limit_equilibrium(slopes),
            f4_poa: f4::limit_poa(slopes),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Approx {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_exact: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_formula: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_poa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDocument {
    pub schema_version: u32,
    pub instance: Instance,
    pub equilibria: Vec<EquilibriumEntry>,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_exact: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_formula: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_diverges: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Rational>,
    /// Connection count beyond which the F3 equilibrium count is constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner: Option<CornerFlags>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<Limits>,
    #[serde(default)]
    pub approx: Approx,
}

fn entries(params: &Params, set: &BTreeSet<Profile>) -> Vec<EquilibriumEntry> {
    set.iter().map(|&p| EquilibriumEntry::new(params, p)).collect()
}

fn instance(params: &Params, framework: &str) -> Instance {
    Instance { a: params.a(), b: params.b(), n: Some(params.n()), framework: framework.to_string() }
}

impl ReportDocument {
    pub fn from_f3(report: &F3Report) -> Self {
        let p = &report.params;
        let e = report.efficiency;
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            instance: instance(p, "f3"),
            equilibria: entries(p, &report.equilibria),
            count: report.equilibria.len(),
            poa_exact: Some(e.poa_exact),
            poa_formula: Some(e.poa_formula),
            poa_diverges: Some(e.diverges()),
            pos: Some(e.pos),
            threshold: Some(report.count.threshold),
            mode: None,
            corner: None,
            limits: None,
            approx: Approx {
                poa_exact: Some(e.poa_exact.to_f64()),
                poa_formula: Some(e.poa_formula.to_f64()),
                pos: Some(e.pos.to_f64()),
                ..Approx::default()
            },
        }
    }

    pub fn from_f4(report: &F4Report) -> Self {
        let p = &report.params;
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            instance: instance(p, "f4"),
            equilibria: entries(p, &report.equilibria),
            count: report.equilibria.len(),
            poa_exact: Some(report.poa_exact),
            poa_formula: None,
            poa_diverges: None,
            pos: Some(report.pos_exact),
            threshold: None,
            mode: report.mode_info,
            corner: Some(report.corners),
            limits: None,
            approx: Approx {
                poa_exact: Some(report.poa_exact.to_f64()),
                pos: Some(report.pos_exact.to_f64()),
                ..Approx::default()
            },
        }
    }

    pub fn limits(slopes: &Slopes) -> Self {
        let limits = Limits::new(slopes);
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            instance: Instance { a: slopes.a(), b: slopes.b(), n: None, framework: "limit".to_string() },
            equilibria: Vec::new(),
            count: 0,
            poa_exact: None,
            poa_formula: None,
            poa_diverges: None,
            pos: None,
            threshold: None,
            mode: None,
            corner: None,
            approx: Approx {
                limit_fraction: Some(limits.f4_fraction.to_f64()),
                limit_poa: Some(limits.f4_poa.to_f64()),
                ..Approx::default()
            },
            limits: Some(limits),
        }
    }
}

/// `x,y` pairs joined by `;`, in lexicographic order.
pub fn join_profiles<'a>(profiles: impl IntoIterator<Item = &'a Profile>) -> String {
    profiles
        .into_iter()
        .map(|p| format!("{},{}", p.n_abc, p.n_bac))
        .collect::<Vec<_>>()
        .join(";")
}

/// One row of `sweep` output. Column order is fixed by field order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "eqCount")]
    pub eq_count: usize,
    pub equilibria: String,
    #[serde(rename = "poaExact")]
    pub poa_exact: Rational,
    #[serde(rename = "poaFormula")]
    pub poa_formula: Option<Rational>,
    pub pos: Rational,
    pub mode: Option<Mode>,
    #[serde(rename = "poaExactApprox")]
    pub poa_exact_approx: f64,
    #[serde(rename = "poaFormulaApprox")]
    pub poa_formula_approx: Option<f64>,
    #[serde(rename = "posApprox")]
    pub pos_approx: f64,
}

impl SweepRow {
    pub fn from_f3(report: &F3Report) -> Self {
        let e = report.efficiency;
        SweepRow {
            n: report.params.n(),
            eq_count: report.equilibria.len(),
            equilibria: join_profiles(&report.equilibria),
            poa_exact: e.poa_exact,
            poa_formula: Some(e.poa_formula),
            pos: e.pos,
            mode: None,
            poa_exact_approx: e.poa_exact.to_f64(),
            poa_formula_approx: Some(e.poa_formula.to_f64()),
            pos_approx: e.pos.to_f64(),
        }
    }

    pub fn from_f4(report: &F4Report) -> Self {
        SweepRow {
            n: report.params.n(),
            eq_count: report.equilibria.len(),
            equilibria: join_profiles(&report.equilibria),
            poa_exact: report.poa_exact,
            poa_formula: None,
            pos: report.pos_exact,
            mode: report.mode_info.map(|m| m.mode),
            poa_exact_approx: report.poa_exact.to_f64(),
            poa_formula_approx: None,
            pos_approx: report.pos_exact.to_f64(),
        }
    }
}

/// One row of the `modes` timeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "nGamma")]
    pub n_gamma: Rational,
    #[serde(rename = "nTilde")]
    pub n_tilde: u32,
    pub z: Rational,
    pub mode: Mode,
    /// Equilibria the mode predicts around `nTilde`.
    pub pattern: String,
    /// The prediction equals the best-response enumeration.
    pub confirmed: bool,
    pub alpha: Rational,
    pub beta: Rational,
    #[serde(rename = "zApprox")]
    pub z_approx: f64,
}

impl ModeRow {
    pub fn new(params: &Params, info: &ModeInfo) -> Self {
        let predicted = f4::predict_equilibria(params).equilibria;
        let pattern: BTreeSet<Profile> = info.pattern().into_iter().collect();
        ModeRow {
            n: params.n(),
            n_gamma: info.n_gamma,
            n_tilde: info.n_tilde,
            z: info.z,
            mode: info.mode,
            pattern: join_profiles(&pattern),
            confirmed: predicted == pattern && predicted == f4::enumerate_equilibria(params),
            alpha: info.alpha,
            beta: info.beta,
            z_approx: info.z.to_f64(),
        }
    }
}
