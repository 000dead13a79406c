//! Structure factors, peak scaling across substitution orders and Bragg
//! Fourier modules.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{perron_tile_lengths, positions_from_word, AtomChain};
use crate::groups::golden_inverse;
use crate::scalar::{linear_fit, Real};
use crate::substitution::{expand_word_capped, SubstitutionRule, DEFAULT_LENGTH_CAP};

const PAIRWISE_BLOCK: usize = 32;

/// Point scatterers: positions in units of the mean spacing and real
/// scattering amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scatterers<T> {
    pub x: Vec<T>,
    pub f: Vec<T>,
    /// Chain length in the same units.
    pub length: T,
}

impl<T: Real> Scatterers<T> {
    /// Identical unit scatterers on the atoms of `chain`, rescaled by its mean spacing.
    pub fn identical(chain: &AtomChain<T>) -> Self {
        let f = vec![T::one(); chain.len()];
        Self::weighted(chain, f)
    }

    /// Per-tile amplitudes.
    pub fn decorated(chain: &AtomChain<T>, amplitudes: &[T]) -> Self {
        let f = chain.tile_letters.iter().map(|&l| amplitudes[l as usize]).collect();
        Self::weighted(chain, f)
    }

    fn weighted(chain: &AtomChain<T>, f: Vec<T>) -> Self {
        let s = chain.mean_spacing;
        Scatterers { x: chain.positions.iter().map(|&x| x / s).collect(), f, length: chain.total_length / s }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `G(k) = Σ f_n e^{−ikx_n}` as `(re, im)`, summed pairwise.
    pub fn amplitude(&self, k: T) -> (T, T) {
        pairwise(&self.x, &self.f, k)
    }

    /// `|G(k)|² / N`.
    pub fn structure_factor(&self, k: T) -> T {
        let (re, im) = self.amplitude(k);
        (re * re + im * im) / T::from_usize_lossy(self.len())
    }
}

fn pairwise<T: Real>(x: &[T], f: &[T], k: T) -> (T, T) {
    if x.len() <= PAIRWISE_BLOCK {
        let mut re = T::zero();
        let mut im = T::zero();
        for (&xi, &fi) in x.iter().zip(f) {
            let (s, c) = (k * xi).sin_cos();
            re = re + fi * c;
            im = im - fi * s;
        }
        return (re, im);
    }
    let mid = x.len() / 2;
    let (a, b) = pairwise(&x[..mid], &f[..mid], k);
    let (c, d) = pairwise(&x[mid..], &f[mid..], k);
    (a + c, b + d)
}

/// `|G(k)|` for identical atoms at the raw chain positions.
pub fn fourier_amplitude<T: Real>(chain: &AtomChain<T>, k: T) -> T {
    let f = vec![T::one(); chain.len()];
    let (re, im) = pairwise(&chain.positions, &f, k);
    re.hypot(im)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffractionSpectrum<T> {
    pub k_values: Vec<T>,
    pub s: Vec<T>,
    pub n: usize,
    pub length: T,
}

fn uniform_grid<T: Real>(k_min: T, k_max: T, samples: usize) -> Result<Vec<T>> {
    if samples < 2 || !(k_min < k_max) {
        return Err(Error::InvalidArgument("need samples ≥ 2 and k_min < k_max".into()));
    }
    let step = (k_max - k_min) / T::from_usize_lossy(samples - 1);
    Ok((0..samples).map(|i| k_min + step * T::from_usize_lossy(i)).collect())
}

/// `S(k)` on a uniform grid for identical atoms at the raw chain positions.
pub fn structure_factor_grid<T: Real>(chain: &AtomChain<T>, k_min: T, k_max: T, samples: usize) -> Result<DiffractionSpectrum<T>> {
    let sc = Scatterers { x: chain.positions.clone(), f: vec![T::one(); chain.len()], length: chain.total_length };
    scatterer_grid(&sc, k_min, k_max, samples)
}

/// `S(k)` on a uniform grid, evaluated in parallel over samples.
pub fn scatterer_grid<T: Real>(sc: &Scatterers<T>, k_min: T, k_max: T, samples: usize) -> Result<DiffractionSpectrum<T>> {
    if sc.is_empty() {
        return Err(Error::EmptyWord);
    }
    let k_values = uniform_grid(k_min, k_max, samples)?;
    let s = k_values.par_iter().map(|&k| sc.structure_factor(k)).collect();
    Ok(DiffractionSpectrum { k_values, s, n: sc.len(), length: sc.length })
}

/// How atoms of a substitution chain scatter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoration {
    /// Perron tile lengths, identical atoms.
    Identical,
    /// Unit tile lengths, amplitudes `+1` on the first tile and `−1` on the second.
    Signed,
    /// `Identical` when the Perron tile lengths differ, otherwise `Signed`.
    Auto,
}

impl Decoration {
    pub fn resolve<T: Real>(self, rule: &SubstitutionRule) -> Result<Decoration> {
        if self != Decoration::Auto {
            return Ok(self);
        }
        let (lengths, _) = perron_tile_lengths::<T>(rule)?;
        let distinct = lengths.iter().any(|&d| (d - lengths[0]).abs() > T::c(1e-9));
        Ok(if distinct || lengths.len() != 2 { Decoration::Identical } else { Decoration::Signed })
    }
}

/// Scatterers of the projected chain `σ^order(a)`.
pub fn rule_scatterers<T: Real>(rule: &SubstitutionRule, order: u32, decoration: Decoration, cap: usize) -> Result<Scatterers<T>> {
    rule_scatterers_from(rule, 0, order, decoration, cap)
}

/// Scatterers of the projected chain `σ^order(seed)`.
pub fn rule_scatterers_from<T: Real>(rule: &SubstitutionRule, seed: u8, order: u32, decoration: Decoration, cap: usize) -> Result<Scatterers<T>> {
    let word = rule.project(&expand_word_capped(rule, seed, order, cap)?);
    match decoration.resolve::<T>(rule)? {
        Decoration::Signed => {
            let ntiles = rule.tile_alphabet().len();
            let chain = positions_from_word(&word, &vec![T::one(); ntiles])?;
            let amps: Vec<T> = (0..ntiles).map(|i| if i == 0 { T::one() } else { -T::one() }).collect();
            Ok(Scatterers::decorated(&chain, &amps))
        }
        _ => {
            let (lengths, dbar) = perron_tile_lengths::<T>(rule)?;
            let mut chain = positions_from_word(&word, &lengths)?;
            chain.mean_spacing = dbar;
            Ok(Scatterers::identical(&chain))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PeakClass {
    Bragg,
    SingularContinuous,
    Flat,
}

pub const BRAGG_GAMMA: f64 = 0.95;
pub const SC_GAMMA: f64 = 0.2;

impl PeakClass {
    pub fn from_gamma(g: f64) -> Self {
        if g >= BRAGG_GAMMA {
            PeakClass::Bragg
        } else if g >= SC_GAMMA {
            PeakClass::SingularContinuous
        } else {
            PeakClass::Flat
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakScaling {
    pub k_star: f64,
    pub orders: Vec<u32>,
    /// Refined peak position per order.
    pub k_refined: Vec<f64>,
    pub lengths: Vec<f64>,
    /// `|G_N(k)|` at the refined position.
    pub amplitudes: Vec<f64>,
    /// Exponent of `S_N ~ L_N^γ`, clamped to `[0, ∞)`.
    pub gamma: f64,
    /// Unclamped least-squares exponent.
    pub gamma_fit: f64,
    pub residual: f64,
    pub classification: PeakClass,
}

/// Maximizes `S` on `[a, b]` by golden-section search, also comparing the
/// interval center.
fn refine_peak(sc: &Scatterers<f64>, a: f64, b: f64) -> (f64, f64) {
    let g = golden_inverse();
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = sc.structure_factor(x1);
    let mut f2 = sc.structure_factor(x2);
    for _ in 0..60 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = sc.structure_factor(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = sc.structure_factor(x2);
        }
        if hi - lo < 1e-13 * (1.0 + hi.abs()) {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = sc.structure_factor(mid);
    let (kb, fb) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if fm > fb {
        (mid, fm)
    } else {
        (kb, fb)
    }
}

/// Growth exponent of the structure factor near `k_star` across orders.
///
/// At each order the peak is refined within `min(half_width, π/L_N)` of `k_star`.
pub fn peak_scaling(rule: &SubstitutionRule, k_star: f64, orders: &[u32], half_width: f64, decoration: Decoration) -> Result<PeakScaling> {
    peak_scaling_capped(rule, k_star, orders, half_width, decoration, DEFAULT_LENGTH_CAP)
}

pub fn peak_scaling_capped(
    rule: &SubstitutionRule,
    k_star: f64,
    orders: &[u32],
    half_width: f64,
    decoration: Decoration,
    cap: usize,
) -> Result<PeakScaling> {
    if orders.len() < 4 {
        return Err(Error::InvalidArgument("peak scaling needs at least four orders".into()));
    }
    let chains = orders
        .iter()
        .map(|&n| rule_scatterers::<f64>(rule, n, decoration, cap))
        .collect::<Result<Vec<_>>>()?;
    let per_order: Vec<(f64, f64, f64, f64)> = chains
        .par_iter()
        .map(|sc| {
            let hw = half_width.min(PI / sc.length);
            let (k, s) = refine_peak(sc, k_star - hw, k_star + hw);
            let amp = (s * sc.len() as f64).sqrt();
            (k, sc.length, amp, s)
        })
        .collect();
    let lengths: Vec<f64> = per_order.iter().map(|p| p.1).collect();
    let lx: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
    let ly: Vec<f64> = per_order.iter().map(|p| p.3.max(f64::MIN_POSITIVE).ln()).collect();
    let (gamma_fit, residual) = linear_fit(&lx, &ly);
    let gamma = gamma_fit.max(0.0);
    Ok(PeakScaling {
        k_star,
        orders: orders.to_vec(),
        k_refined: per_order.iter().map(|p| p.0).collect(),
        lengths,
        amplitudes: per_order.iter().map(|p| p.2).collect(),
        gamma,
        gamma_fit,
        residual,
        classification: PeakClass::from_gamma(gamma_fit),
    })
}

/// Search grid for spectrum classification, in units of `k / 2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeakSearch {
    pub q_min: f64,
    pub q_max: f64,
    /// Grid points per unit chain length per unit of `k/2π`.
    pub oversampling: f64,
    /// Candidate floor on `S/N`.
    pub floor: f64,
    /// Suppression radius in units of `1/L`.
    pub separation: f64,
    pub max_peaks: usize,
}

impl Default for PeakSearch {
    fn default() -> Self {
        PeakSearch { q_min: 0.02, q_max: 1.25, oversampling: 4.0, floor: 0.005, separation: 8.0, max_peaks: 8 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpectralTags {
    pub pp: bool,
    pub sc: bool,
    pub ac: bool,
}

impl SpectralTags {
    pub fn labels(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.pp {
            v.push("PP");
        }
        if self.sc {
            v.push("SC");
        }
        if self.ac {
            v.push("AC");
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumClassification {
    pub decoration: Decoration,
    pub peaks: Vec<PeakScaling>,
    /// `S/N` at each candidate at the largest order.
    pub heights: Vec<f64>,
    pub max_ratio: f64,
    /// Grid spacing in `k`.
    pub resolution: f64,
    pub tags: SpectralTags,
}

/// Finds the strongest separated maxima of `S` at the largest order and
/// classifies each by its scaling across `orders`.
pub fn classify_spectrum(rule: &SubstitutionRule, orders: &[u32], search: &PeakSearch) -> Result<SpectrumClassification> {
    classify_spectrum_capped(rule, orders, search, DEFAULT_LENGTH_CAP)
}

pub fn classify_spectrum_capped(rule: &SubstitutionRule, orders: &[u32], search: &PeakSearch, cap: usize) -> Result<SpectrumClassification> {
    let top = *orders.iter().max().ok_or_else(|| Error::InvalidArgument("no orders".into()))?;
    let decoration = Decoration::Auto.resolve::<f64>(rule)?;
    let sc = rule_scatterers::<f64>(rule, top, decoration, cap)?;
    let n = sc.len() as f64;
    let samples = ((search.q_max - search.q_min) * sc.length * search.oversampling).ceil().max(16.0) as usize;
    let spec = scatterer_grid(&sc, 2.0 * PI * search.q_min, 2.0 * PI * search.q_max, samples)?;
    let ks = &spec.k_values;
    let s = &spec.s;
    let h = ks[1] - ks[0];
    let max_ratio = s.iter().copied().fold(0.0, f64::max) / n;

    let mut cand: Vec<usize> = (1..s.len() - 1).filter(|&i| s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] / n >= search.floor).collect();
    cand.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let radius = 2.0 * PI * search.separation / sc.length;
    let mut keep: Vec<usize> = Vec::new();
    for i in cand {
        if keep.iter().all(|&j| (ks[i] - ks[j]).abs() > radius) {
            keep.push(i);
            if keep.len() == search.max_peaks {
                break;
            }
        }
    }

    let peaks = keep
        .iter()
        .map(|&i| peak_scaling_capped(rule, ks[i], orders, 0.5 * h, decoration, cap))
        .collect::<Result<Vec<_>>>()?;
    let heights = keep.iter().map(|&i| s[i] / n).collect();
    let pp = peaks.iter().any(|p| p.classification == PeakClass::Bragg);
    let scf = peaks.iter().any(|p| p.classification == PeakClass::SingularContinuous);
    let tags = SpectralTags { pp, sc: scf, ac: !pp && !scf };
    Ok(SpectrumClassification { decoration, peaks, heights, max_ratio, resolution: h, tags })
}

/// Support of the Bragg spectrum, in units of `k / 2π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FourierModule {
    /// `Z + ρZ`.
    TwoGenerator { rho: f64 },
    /// `(1/q) Z`.
    Cyclic { q: i64 },
    /// `a · m / 2^N`.
    Dyadic { scale: f64 },
    /// `(1/(2n+1)) · m / 2^N`.
    OddDyadic,
    Continuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictBounds {
    /// Cap on `|p|, |q|, |m|`.
    pub coef: i64,
    /// Cap on `N` and on `n`.
    pub depth: u32,
    /// Upper limit of `k/2π`.
    pub q_max: f64,
}

impl Default for PredictBounds {
    fn default() -> Self {
        PredictBounds { coef: 10, depth: 6, q_max: 1.25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BraggPrediction {
    /// Wave number `k`.
    pub k: f64,
    /// `k / 2π`.
    pub q: f64,
    pub label: Vec<i64>,
}

impl FourierModule {
    pub fn for_family(family: &str) -> Result<Self> {
        Ok(match family {
            "periodic" => FourierModule::Cyclic { q: 2 },
            "fibonacci" => FourierModule::TwoGenerator { rho: golden_inverse() },
            "thue-morse" => FourierModule::OddDyadic,
            "period-doubling" => FourierModule::Dyadic { scale: 1.0 },
            "rudin-shapiro" => FourierModule::Continuous,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    pub fn description(&self) -> String {
        match self {
            FourierModule::TwoGenerator { rho } => format!("2pi*(Z+rho*Z)(rho={rho:.10})"),
            FourierModule::Cyclic { q: 1 } => "2pi*Z".into(),
            FourierModule::Cyclic { q } => format!("2pi*(1/{q})Z"),
            FourierModule::Dyadic { scale } if *scale == 1.0 => "2pi*Z[1/2]".into(),
            FourierModule::Dyadic { scale } => format!("2pi*{scale}*Z[1/2]"),
            FourierModule::OddDyadic => "2pi*(1/(2n+1))*Z[1/2]".into(),
            FourierModule::Continuous => "continuous".into(),
        }
    }

    /// All elements with `0 ≤ k/2π ≤ q_max` within the bounds, with labels.
    fn elements(&self, b: &PredictBounds) -> Vec<(f64, Vec<i64>)> {
        let mut out = Vec::new();
        match *self {
            FourierModule::TwoGenerator { rho } => {
                for q in -b.coef..=b.coef {
                    for p in -b.coef..=b.coef {
                        out.push((p as f64 + q as f64 * rho, vec![p, q]));
                    }
                }
            }
            FourierModule::Cyclic { q } => {
                for m in 0..=b.coef {
                    out.push((m as f64 / q as f64, vec![m]));
                }
            }
            FourierModule::Dyadic { scale } => {
                for n in 0..=b.depth {
                    let den = (1i64 << n) as f64;
                    for m in 0..=(b.q_max * den / scale).floor() as i64 {
                        out.push((scale * m as f64 / den, vec![m, n as i64]));
                    }
                }
            }
            FourierModule::OddDyadic => {
                for odd in 0..=b.depth as i64 {
                    let o = (2 * odd + 1) as f64;
                    for n in 0..=b.depth {
                        let den = o * (1i64 << n) as f64;
                        for m in 0..=(b.q_max * den).floor() as i64 {
                            out.push((m as f64 / den, vec![odd, m, n as i64]));
                        }
                    }
                }
            }
            FourierModule::Continuous => {}
        }
        out.retain(|(v, _)| *v >= -1e-12 && *v <= b.q_max + 1e-12);
        out
    }

    /// Deduplicated predicted peaks sorted by `k`, keeping the first label found
    /// in lexicographic order of smallest coordinates.
    pub fn predicted_bragg(&self, b: &PredictBounds) -> Vec<BraggPrediction> {
        let mut e = self.elements(b);
        e.sort_by(|x, y| {
            x.0.total_cmp(&y.0).then_with(|| label_cost(&x.1).cmp(&label_cost(&y.1))).then_with(|| x.1.cmp(&y.1))
        });
        let mut out: Vec<BraggPrediction> = Vec::new();
        for (v, label) in e {
            if out.last().is_some_and(|p| (p.q - v).abs() < 1e-12) {
                continue;
            }
            out.push(BraggPrediction { k: 2.0 * PI * v, q: v, label });
        }
        out
    }

    /// Closest predicted peak to wave number `k` and its distance in `k`.
    pub fn nearest(&self, k: f64, b: &PredictBounds) -> Option<(BraggPrediction, f64)> {
        self.predicted_bragg(b)
            .into_iter()
            .map(|p| {
                let d = (p.k - k).abs();
                (p, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn label_cost(l: &[i64]) -> i64 {
    l.iter().map(|x| x.abs()).sum()
}

/// Sorted positions of local maxima of a sampled spectrum above `floor · N`.
pub fn local_maxima<T: Real>(spec: &DiffractionSpectrum<T>, floor: T) -> Vec<usize> {
    let s = &spec.s;
    let n = T::from_usize_lossy(spec.n);
    (1..s.len().saturating_sub(1)).filter(|&i| s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] / n >= floor).collect()
}

/// Sum of amplitudes, the value of `G(0)`.
pub fn total_amplitude<T: Real>(sc: &Scatterers<T>) -> T {
    sc.f.iter().fold(T::zero(), |a, &b| a + b)
}
