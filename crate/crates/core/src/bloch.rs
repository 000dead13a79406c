//! Gap labels, the cohomology trace image and the Bragg module side by side.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cohomology::trace_image;
use crate::diffraction::{classify_spectrum_capped, BraggPrediction, FourierModule, PeakClass, PeakSearch, PredictBounds};
use crate::error::Result;
use crate::groups::{nearest_element, GroupElement, LabelGroup, SearchBounds, DEFAULT_TOL};
use crate::spectral::{spectrum_and_gaps, Gap, Model, DEFAULT_REL_THRESHOLD};
use crate::substitution::{expand_word_capped, SubstitutionRule, DEFAULT_LENGTH_CAP};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// Largest residual accepted for a gap label.
    pub tol: f64,
    pub bounds: SearchBounds,
    pub rel_threshold: f64,
    pub predict: PredictBounds,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            tol: DEFAULT_TOL,
            bounds: SearchBounds::default(),
            rel_threshold: DEFAULT_REL_THRESHOLD,
            predict: PredictBounds { coef: 30, depth: 12, q_max: 1.25 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochConfig {
    /// Substitution order of the chain used for the spectrum.
    pub spectral_order: u32,
    pub model: Model<f64>,
    /// Orders used for peak scaling.
    pub diffraction_orders: Vec<u32>,
    pub search: PeakSearch,
    pub thresholds: Thresholds,
    pub length_cap: usize,
}

impl BlochConfig {
    /// Defaults giving chains of about a thousand sites for the spectrum.
    pub fn for_rule(rule: &SubstitutionRule) -> Self {
        let mut order = 1;
        while rule.image_lengths(order + 1)[0] <= 1024 {
            order += 1;
        }
        let lengths = rule.image_lengths(20);
        let fast = lengths[0] >= 1 << 20;
        let diffraction_orders = if fast { (8..=12).collect() } else { (12..=17).collect() };
        BlochConfig {
            spectral_order: order,
            model: Model::onsite(0.0, 1.0),
            diffraction_orders,
            search: PeakSearch::default(),
            thresholds: Thresholds::default(),
            length_cap: DEFAULT_LENGTH_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapLabel {
    pub lower: f64,
    pub upper: f64,
    pub ids_value: f64,
    pub ids_bulk: Option<f64>,
    pub element: GroupElement,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BraggCheck {
    pub k: f64,
    /// `k / 2π`.
    pub q: f64,
    pub class: PeakClass,
    pub gamma: f64,
    pub module_element: Option<BraggPrediction>,
    /// Distance to the nearest module element, in units of `k/2π`.
    pub module_residual: f64,
    pub trace_element: GroupElement,
    pub trace_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub gaps_in_trace_group: bool,
    pub bragg_in_module: bool,
    pub diffraction_matches_trace: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub count: usize,
    pub max: f64,
    pub median: f64,
}

impl ResidualSummary {
    fn of(xs: &[f64]) -> Self {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let median = match v.len() {
            0 => 0.0,
            n if n % 2 == 1 => v[n / 2],
            n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
        };
        ResidualSummary { count: v.len(), max: v.last().copied().unwrap_or(0.0), median }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrespondenceReport {
    pub schema: u32,
    pub family: String,
    pub config: BlochConfig,
    pub sites: usize,
    pub trace_group: LabelGroup,
    pub fourier_module: String,
    pub spectral_tags: Vec<&'static str>,
    pub gap_labels: Vec<GapLabel>,
    pub gap_residuals: ResidualSummary,
    pub bragg_tolerance: f64,
    pub bragg_checks: Vec<BraggCheck>,
    pub verdicts: Verdicts,
}

impl CorrespondenceReport {
    /// Verdicts recomputed from the stored residuals and tolerances.
    pub fn recompute_verdicts(&self) -> Verdicts {
        let tol = self.config.thresholds.tol;
        let bragg: Vec<&BraggCheck> = self.bragg_checks.iter().filter(|b| b.class == PeakClass::Bragg).collect();
        let continuous = self.spectral_tags.iter().any(|t| *t == "SC" || *t == "AC");
        Verdicts {
            gaps_in_trace_group: self.gap_labels.iter().all(|g| g.residual <= tol),
            bragg_in_module: bragg.iter().all(|b| b.module_residual <= self.bragg_tolerance),
            diffraction_matches_trace: !continuous && bragg.iter().all(|b| b.trace_residual <= self.bragg_tolerance),
        }
    }
}

/// Runs the spectral, cohomological and diffraction sides for a built-in
/// family and compares their label groups.
pub fn bloch_report(family: &str, config: &BlochConfig) -> Result<CorrespondenceReport> {
    bloch_report_with_gaps(family, config, None)
}

/// As [`bloch_report`], labeling the given gaps (found on a chain of `sites`
/// sites) instead of computing a spectrum.
pub fn bloch_report_with_gaps(family: &str, config: &BlochConfig, given: Option<(Vec<Gap<f64>>, usize)>) -> Result<CorrespondenceReport> {
    let rule = SubstitutionRule::builtin(family)?;
    let trace_group = trace_image(&rule)?;
    let module = FourierModule::for_family(family)?;
    let th = &config.thresholds;

    let (gaps, sites) = match given {
        Some(g) => g,
        None => {
            let word = rule.project(&expand_word_capped(&rule, 0, config.spectral_order, config.length_cap)?);
            let (_, gaps) = spectrum_and_gaps(&word, &config.model, th.rel_threshold)?;
            (gaps, word.len())
        }
    };
    let gap_labels: Vec<GapLabel> = gaps
        .iter()
        .map(|g| {
            let (element, residual) = nearest_element(g.label_value(), &trace_group, &th.bounds);
            GapLabel { lower: g.lower, upper: g.upper, ids_value: g.ids_value, ids_bulk: g.ids_bulk, element, residual }
        })
        .collect();
    let residuals: Vec<f64> = gap_labels.iter().map(|g| g.residual).collect();

    let cls = classify_spectrum_capped(&rule, &config.diffraction_orders, &config.search, config.length_cap)?;
    let bragg_tolerance = th.tol.max(cls.resolution / (2.0 * PI));
    let predictions = module.predicted_bragg(&th.predict);
    let bragg_checks = cls
        .peaks
        .iter()
        .map(|p| {
            let k = *p.k_refined.last().unwrap_or(&p.k_star);
            let q = k / (2.0 * PI);
            let nearest = predictions.iter().min_by(|a, b| (a.q - q).abs().total_cmp(&(b.q - q).abs())).cloned();
            let module_residual = nearest.as_ref().map_or(f64::INFINITY, |m| (m.q - q).abs());
            let (trace_element, trace_residual) = nearest_element(q, &trace_group, &th.bounds);
            BraggCheck {
                k,
                q,
                class: p.classification,
                gamma: p.gamma_fit,
                module_element: nearest,
                module_residual,
                trace_element,
                trace_residual,
            }
        })
        .collect();

    let mut report = CorrespondenceReport {
        schema: REPORT_SCHEMA,
        family: family.to_string(),
        config: config.clone(),
        sites,
        trace_group,
        fourier_module: module.description(),
        spectral_tags: cls.tags.labels(),
        gap_labels,
        gap_residuals: ResidualSummary::of(&residuals),
        bragg_tolerance,
        bragg_checks,
        verdicts: Verdicts { gaps_in_trace_group: false, bragg_in_module: false, diffraction_matches_trace: false },
    };
    report.verdicts = report.recompute_verdicts();
    Ok(report)
}
