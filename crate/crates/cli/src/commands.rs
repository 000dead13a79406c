//! Subcommand implementations.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use aperiodix_core::bloch::{bloch_report_with_gaps, BlochConfig, Thresholds};
use aperiodix_core::cohomology::{cech_h1, trace_image_detail};
use aperiodix_core::cut_project::{cp_word, CPParams, Slope};
use aperiodix_core::diffraction::{rule_scatterers, rule_scatterers_from, scatterer_grid, Decoration, DiffractionSpectrum};
use aperiodix_core::geometry::{chain_from_rule, positions_from_word, AtomChain};
use aperiodix_core::groups::{group_for_family, nearest_element, GroupElement, LabelGroup, SearchBounds};
use aperiodix_core::perron::{perron_data, PerronData};
use aperiodix_core::spectral::{build_chain, bulk_ids, counting_function, detect_gaps, eigenvalues_tridiag, Boundary, EnergySpectrum, Gap, Model};
use aperiodix_core::substitution::{expand_word_capped, letter_statistics, occurrence_matrix, SubstitutionRule, Word};

use crate::output::{fmt_num, to_json, Csv, Sink, SCHEMA};
use crate::svg::{self, Axes, Panel, Series};
use crate::usage;

/// Settings shared by every subcommand.
pub struct Ctx {
    pub sink: Sink,
    pub cap: usize,
}

/// A substitution rule with where it came from.
pub struct Loaded {
    pub rule: SubstitutionRule,
    pub family: Option<String>,
    pub seed: u8,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SourceInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// The rule as JSON text, for rule files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phason: Option<f64>,
}

impl Loaded {
    pub fn new(family: Option<&str>, rule_file: Option<&Path>, seed_letter: Option<&str>) -> Result<Self> {
        let (rule, family) = match (family, rule_file) {
            (Some(f), None) => (SubstitutionRule::builtin(f).map_err(|e| usage!("{e}"))?, Some(f.to_string())),
            (None, Some(p)) => {
                let text = fs::read_to_string(p).map_err(|e| usage!("cannot read rule file {}: {e}", p.display()))?;
                (SubstitutionRule::from_json(&text).map_err(|e| usage!("{}: {e}", p.display()))?, None)
            }
            (Some(_), Some(_)) => return Err(usage!("--family and --rule-file are mutually exclusive")),
            (None, None) => return Err(usage!("one of --family or --rule-file is required")),
        };
        let seed = match seed_letter {
            Some(l) => rule.letter_index(l).map_err(|e| usage!("--seed-letter: {e}"))?,
            None => 0,
        };
        Ok(Loaded { rule, family, seed })
    }

    pub fn source(&self) -> SourceInfo {
        match &self.family {
            Some(f) => SourceInfo { family: Some(f.clone()), ..Default::default() },
            None => SourceInfo { rule: Some(self.rule.to_json()), ..Default::default() },
        }
    }

    fn seed_letter(&self) -> String {
        self.rule.alphabet()[self.seed as usize].clone()
    }

    fn tiles(&self, order: u32, cap: usize) -> Result<Word> {
        Ok(self.rule.project(&expand_word_capped(&self.rule, self.seed, order, cap)?))
    }

    /// The gap-labeling group: the table group for built-in families, the
    /// computed trace image otherwise.
    fn label_group(&self) -> Result<LabelGroup> {
        match &self.family {
            Some(f) => Ok(group_for_family(f)?),
            None => Ok(trace_image_detail(&self.rule)?.group),
        }
    }
}

fn rule_from_source(src: &SourceInfo) -> Result<Option<Loaded>> {
    let rule = match (&src.family, &src.rule) {
        (Some(f), _) => SubstitutionRule::builtin(f)?,
        (None, Some(r)) => SubstitutionRule::from_json(r)?,
        _ => return Ok(None),
    };
    Ok(Some(Loaded { rule, family: src.family.clone(), seed: 0 }))
}

#[derive(Serialize)]
struct WordReport {
    schema: u32,
    kind: &'static str,
    source: SourceInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_letter: Option<String>,
    length: usize,
    alphabet: Vec<String>,
    word: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    tile_alphabet: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tiles: Option<String>,
    counts: Vec<usize>,
    frequencies: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    perron: Option<PerronData<f64>>,
    tile_lengths: Vec<f64>,
    mean_spacing: f64,
    total_length: f64,
}

pub enum GenerateSource {
    Rule(Loaded, u32),
    CutProject { slope: String, phason: f64, count: usize },
}

pub fn generate(ctx: &Ctx, src: GenerateSource, json: bool) -> Result<()> {
    let (report, chain, letters) = match src {
        GenerateSource::Rule(l, order) => {
            let word = expand_word_capped(&l.rule, l.seed, order, ctx.cap)?;
            let tiles = l.rule.project(&word);
            let stats = letter_statistics(&word, l.rule.size())?;
            let perron = perron_data::<f64>(&occurrence_matrix(&l.rule)).ok();
            let chain = match chain_from_rule::<f64>(&l.rule, l.seed, order, ctx.cap) {
                Ok(c) => c,
                Err(_) => positions_from_word(&tiles, &vec![1.0; l.rule.tile_alphabet().len()])?,
            };
            let letters: Vec<String> = word.iter().map(|&c| l.rule.alphabet()[c as usize].clone()).collect();
            let report = WordReport {
                schema: SCHEMA,
                kind: "word",
                source: l.source(),
                order: Some(order),
                seed_letter: Some(l.seed_letter()),
                length: word.len(),
                alphabet: l.rule.alphabet().to_vec(),
                word: l.rule.render(&word),
                tile_alphabet: l.rule.has_projection().then(|| l.rule.tile_alphabet().to_vec()),
                tiles: l.rule.has_projection().then(|| l.rule.render_tiles(&tiles)),
                counts: stats.counts,
                frequencies: stats.freqs,
                perron,
                tile_lengths: chain.tile_lengths.clone(),
                mean_spacing: chain.mean_spacing,
                total_length: chain.total_length,
            };
            (report, chain, letters)
        }
        GenerateSource::CutProject { slope, phason, count } => {
            let s: Slope = slope.parse().map_err(|e| usage!("--slope: {e}"))?;
            let params = CPParams::new(s, phason);
            let word = cp_word(&params, 0, count);
            let stats = letter_statistics(&word, 2)?;
            let chain = positions_from_word(&word, &[1.0, 1.0])?;
            let alphabet: Vec<String> = params.alphabet().iter().map(|s| s.to_string()).collect();
            let letters: Vec<String> = word.iter().map(|&c| alphabet[c as usize].clone()).collect();
            let report = WordReport {
                schema: SCHEMA,
                kind: "word",
                source: SourceInfo { slope: Some(s.to_string()), phason: Some(params.phason()), ..Default::default() },
                order: None,
                seed_letter: None,
                length: word.len(),
                alphabet,
                word: params.render(&word),
                tile_alphabet: None,
                tiles: None,
                counts: stats.counts,
                frequencies: stats.freqs,
                perron: None,
                tile_lengths: chain.tile_lengths.clone(),
                mean_spacing: chain.mean_spacing,
                total_length: chain.total_length,
            };
            (report, chain, letters)
        }
    };
    let csv = chain_csv(&chain, &letters);
    let json_text = to_json(&report)?;
    if ctx.sink.to_dir() {
        ctx.sink.emit("word.json", &json_text)?;
        ctx.sink.emit("chain.csv", &csv)
    } else if json {
        ctx.sink.emit("word.json", &json_text)
    } else {
        ctx.sink.emit("chain.csv", &csv)
    }
}

fn chain_csv(chain: &AtomChain<f64>, letters: &[String]) -> String {
    let mut csv = Csv::new(&["index", "letter", "tile", "position"]);
    for (i, (&x, &t)) in chain.positions.iter().zip(&chain.tile_letters).enumerate() {
        csv.row(&[i.to_string(), letters[i].clone(), t.to_string(), fmt_num(x)]);
    }
    csv.into_string()
}

pub struct Grid {
    pub kmin: f64,
    pub kmax: f64,
    pub samples: usize,
}

/// Sample indices of local maxima of `S/N` at least `frac` of the largest value.
fn strong_maxima(spec: &DiffractionSpectrum<f64>, frac: f64) -> Vec<usize> {
    let s = &spec.s;
    let top = s.iter().copied().fold(0.0, f64::max);
    (0..s.len())
        .filter(|&i| {
            let left = i == 0 || s[i] > s[i - 1];
            let right = i + 1 == s.len() || s[i] >= s[i + 1];
            left && right && s[i] >= frac * top && top > 0.0
        })
        .collect()
}

pub fn diffract(ctx: &Ctx, l: &Loaded, order: u32, decoration: Decoration, grid: &Grid, svg_path: Option<&Path>) -> Result<()> {
    if grid.samples < 2 || !(grid.kmin < grid.kmax) {
        return Err(usage!("need --samples ≥ 2 and --kmin < --kmax"));
    }
    let sc = rule_scatterers_from::<f64>(&l.rule, l.seed, order, decoration, ctx.cap)?;
    let spec = scatterer_grid(&sc, grid.kmin, grid.kmax, grid.samples)?;
    let n = spec.n as f64;
    let mut csv = Csv::new(&["k", "S", "S_over_N"]);
    for (&k, &s) in spec.k_values.iter().zip(&spec.s) {
        csv.row(&[fmt_num(k), fmt_num(s), fmt_num(s / n)]);
    }
    ctx.sink.emit("diffraction.csv", &csv.into_string())?;
    if let Some(p) = svg_path {
        let mut series = Series::new("S/N", spec.k_values.iter().zip(&spec.s).map(|(&k, &s)| (k, s / n)).collect());
        series.markers = strong_maxima(&spec, 0.1).into_iter().map(|i| spec.k_values[i]).collect();
        let title = format!("{} order {order}, N = {}", l.family.as_deref().unwrap_or("rule"), spec.n);
        svg::emit_svg(&[series], &Axes::new(&title, "k", "S(k)/N"), p)?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    schema: u32,
    kind: String,
    source: SourceInfo,
    order: u32,
    seed_letter: String,
    model: Model<f64>,
    sites: usize,
    /// Tile word the chain was built from.
    tiles: String,
    eigenvalues: Vec<f64>,
}

fn spectrum_csv(e: &[f64]) -> String {
    let mut csv = Csv::new(&["index", "energy"]);
    for (i, &x) in e.iter().enumerate() {
        csv.row(&[i.to_string(), fmt_num(x)]);
    }
    csv.into_string()
}

pub fn spectrum(ctx: &Ctx, l: &Loaded, order: u32, model: &Model<f64>, json: bool) -> Result<()> {
    let tiles = l.tiles(order, ctx.cap)?;
    let spec = eigenvalues_tridiag(&build_chain(&tiles, model)?);
    let file = SpectrumFile {
        schema: SCHEMA,
        kind: "spectrum".into(),
        source: l.source(),
        order,
        seed_letter: l.seed_letter(),
        model: model.clone(),
        sites: spec.len(),
        tiles: l.rule.render_tiles(&tiles),
        eigenvalues: spec.eigenvalues.clone(),
    };
    let csv = spectrum_csv(&spec.eigenvalues);
    if ctx.sink.to_dir() {
        ctx.sink.emit("spectrum.csv", &csv)?;
        ctx.sink.emit("spectrum.json", &to_json(&file)?)
    } else if json {
        ctx.sink.emit("spectrum.json", &to_json(&file)?)
    } else {
        ctx.sink.emit("spectrum.csv", &csv)
    }
}

/// Contents of a file given to `gaps` or `bloch`.
enum Input {
    Spectrum { eigenvalues: Vec<f64>, bulk: Option<(Word, Model<f64>)>, source: Option<SourceInfo> },
    Gaps { gaps: Vec<Gap<f64>>, sites: usize, source: SourceInfo },
}

#[derive(Deserialize)]
struct Kind {
    kind: String,
}

#[derive(Deserialize)]
struct GapsIn {
    source: SourceInfo,
    sites: usize,
    gaps: Vec<Gap<f64>>,
}

fn parse_tiles(rule: &SubstitutionRule, s: &str) -> Option<Word> {
    let names = rule.tile_alphabet();
    if names.iter().any(|n| n.chars().count() != 1) {
        return None;
    }
    s.chars().map(|c| names.iter().position(|n| n.starts_with(c)).map(|i| i as u8)).collect()
}

fn read_input(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).map_err(|e| usage!("cannot read {}: {e}", path.display()))?;
    if !text.trim_start().starts_with('{') {
        let mut eigenvalues = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty()) {
            let field = line.split(',').nth(1).ok_or_else(|| anyhow!("{}:{}: expected index,energy", path.display(), i + 1))?;
            eigenvalues.push(field.trim().parse::<f64>().with_context(|| format!("{}:{}", path.display(), i + 1))?);
        }
        return Ok(Input::Spectrum { eigenvalues, bulk: None, source: None });
    }
    let kind: Kind = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match kind.kind.as_str() {
        "spectrum" => {
            let f: SpectrumFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let bulk = rule_from_source(&f.source)?.and_then(|l| parse_tiles(&l.rule, &f.tiles)).map(|w| (w, f.model.clone()));
            Ok(Input::Spectrum { eigenvalues: f.eigenvalues, bulk, source: Some(f.source) })
        }
        "gaps" => {
            let f: GapsIn = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok(Input::Gaps { gaps: f.gaps, sites: f.sites, source: f.source })
        }
        other => Err(usage!("{}: cannot use a {other:?} file here", path.display())),
    }
}

fn sorted_spectrum(mut e: Vec<f64>) -> Result<EnergySpectrum<f64>> {
    if e.iter().any(|x| !x.is_finite()) {
        return Err(anyhow!("spectrum contains non-finite energies"));
    }
    e.sort_by(f64::total_cmp);
    Ok(EnergySpectrum { eigenvalues: e, boundary: Boundary::Open })
}

fn gaps_of(spec: &EnergySpectrum<f64>, bulk: Option<&(Word, Model<f64>)>, rel: f64) -> Result<Vec<Gap<f64>>> {
    let mut gaps = detect_gaps(spec, rel)?;
    if let Some((w, m)) = bulk {
        if w.len() == spec.len() {
            bulk_ids(w, m, &mut gaps)?;
        }
    }
    Ok(gaps)
}

pub struct Labeling {
    pub rel_threshold: f64,
    pub bounds: SearchBounds,
    pub tol: f64,
}

#[derive(Serialize)]
struct GapEntry {
    #[serde(flatten)]
    gap: Gap<f64>,
    label: GroupElement,
    residual: f64,
    labeled: bool,
}

#[derive(Serialize)]
struct GapsFile {
    schema: u32,
    kind: &'static str,
    source: SourceInfo,
    group: LabelGroup,
    sites: usize,
    rel_threshold: f64,
    tol: f64,
    bounds: SearchBounds,
    all_labeled: bool,
    gaps: Vec<GapEntry>,
}

pub struct SpectralSide {
    pub order: u32,
    pub model: Model<f64>,
}

pub fn gaps(ctx: &Ctx, loaded: Option<Loaded>, side: &SpectralSide, lab: &Labeling, input: Option<&Path>) -> Result<()> {
    let (l, gaps, sites) = match input {
        Some(p) => {
            let (eigenvalues, bulk, file_source) = match read_input(p)? {
                Input::Spectrum { eigenvalues, bulk, source } => (eigenvalues, bulk, source),
                Input::Gaps { .. } => return Err(usage!("gaps expects a spectrum file")),
            };
            let l = match (loaded, file_source.as_ref().map(rule_from_source).transpose()?.flatten()) {
                (Some(l), _) | (None, Some(l)) => l,
                (None, None) => return Err(usage!("--family or --rule-file is required to label a CSV spectrum")),
            };
            let spec = sorted_spectrum(eigenvalues)?;
            (l, gaps_of(&spec, bulk.as_ref(), lab.rel_threshold)?, spec.len())
        }
        None => {
            let l = loaded.ok_or_else(|| usage!("one of --family or --rule-file is required"))?;
            let tiles = l.tiles(side.order, ctx.cap)?;
            let spec = eigenvalues_tridiag(&build_chain(&tiles, &side.model)?);
            let g = gaps_of(&spec, Some(&(tiles, side.model.clone())), lab.rel_threshold)?;
            (l, g, spec.len())
        }
    };
    let group = l.label_group()?;
    let entries: Vec<GapEntry> = gaps
        .into_iter()
        .map(|gap| {
            let (label, residual) = nearest_element(gap.label_value(), &group, &lab.bounds);
            GapEntry { gap, label, residual, labeled: residual <= lab.tol }
        })
        .collect();
    let file = GapsFile {
        schema: SCHEMA,
        kind: "gaps",
        source: l.source(),
        group,
        sites,
        rel_threshold: lab.rel_threshold,
        tol: lab.tol,
        bounds: lab.bounds,
        all_labeled: entries.iter().all(|e| e.labeled),
        gaps: entries,
    };
    ctx.sink.emit("gaps.json", &to_json(&file)?)
}

#[derive(Serialize)]
struct Localized {
    prime: u64,
    rank: usize,
}

#[derive(Serialize)]
struct CohomologyFile {
    schema: u32,
    kind: &'static str,
    source: SourceInfo,
    #[serde(rename = "H1")]
    h1: String,
    recognized: bool,
    free_rank: usize,
    localized: Vec<Localized>,
    rank: usize,
    char_poly: String,
    radius: usize,
    collared_symbols: usize,
    vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
}

pub fn cohomology(ctx: &Ctx, l: &Loaded) -> Result<()> {
    let h = cech_h1(&l.rule)?;
    let file = CohomologyFile {
        schema: SCHEMA,
        kind: "cohomology",
        source: l.source(),
        h1: h.group.to_string(),
        recognized: h.group.recognized,
        free_rank: h.group.free_rank,
        localized: h.group.localized.iter().map(|&(prime, rank)| Localized { prime, rank }).collect(),
        rank: h.group.rank(),
        char_poly: h.group.char_poly().to_string(),
        radius: h.radius,
        collared_symbols: h.collared_symbols,
        vertices: h.vertices,
        period: h.period,
    };
    ctx.sink.emit("cohomology.json", &to_json(&file)?)
}

#[derive(Serialize)]
struct TraceFile {
    schema: u32,
    kind: &'static str,
    source: SourceInfo,
    trace: LabelGroup,
    lambda: f64,
    symbols: Vec<String>,
    frequencies: Vec<String>,
    frequency_values: Vec<f64>,
}

pub fn trace(ctx: &Ctx, l: &Loaded) -> Result<()> {
    let t = trace_image_detail(&l.rule)?;
    let file = TraceFile {
        schema: SCHEMA,
        kind: "trace",
        source: l.source(),
        trace: t.group,
        lambda: t.lambda,
        symbols: t.symbols,
        frequencies: t.frequencies,
        frequency_values: t.frequency_values,
    };
    ctx.sink.emit("trace.json", &to_json(&file)?)
}

pub struct BlochArgs<'a> {
    pub family: &'a str,
    pub order: Option<u32>,
    pub model: Model<f64>,
    pub lab: Labeling,
    pub input: Option<&'a Path>,
    pub svg: Option<PathBuf>,
    pub samples: usize,
}

pub fn bloch(ctx: &Ctx, a: &BlochArgs) -> Result<()> {
    let l = Loaded::new(Some(a.family), None, None)?;
    let mut config = BlochConfig::for_rule(&l.rule);
    if let Some(o) = a.order {
        config.spectral_order = o;
    }
    config.model = a.model.clone();
    config.thresholds = Thresholds { tol: a.lab.tol, bounds: a.lab.bounds, rel_threshold: a.lab.rel_threshold, ..Thresholds::default() };
    config.length_cap = ctx.cap;

    // Energies for the plot, when known.
    let mut energies: Option<Vec<f64>> = None;
    let given = match a.input.map(read_input).transpose()? {
        None => None,
        Some(Input::Spectrum { eigenvalues, bulk, source }) => {
            check_family(source.as_ref(), a.family)?;
            let spec = sorted_spectrum(eigenvalues)?;
            let g = gaps_of(&spec, bulk.as_ref(), a.lab.rel_threshold)?;
            let n = spec.len();
            energies = Some(spec.eigenvalues);
            Some((g, n))
        }
        Some(Input::Gaps { gaps, sites, source }) => {
            check_family(Some(&source), a.family)?;
            Some((gaps, sites))
        }
    };
    let from_file = given.is_some();
    let report = bloch_report_with_gaps(a.family, &config, given)?;
    ctx.sink.emit("bloch.json", &to_json(&report)?)?;

    if let Some(path) = &a.svg {
        if energies.is_none() && !from_file {
            let tiles = l.tiles(config.spectral_order, ctx.cap)?;
            energies = Some(eigenvalues_tridiag(&build_chain(&tiles, &config.model)?).eigenvalues);
        }
        let order = *config.diffraction_orders.last().ok_or_else(|| anyhow!("no diffraction orders"))?;
        let sc = rule_scatterers::<f64>(&l.rule, order, Decoration::Auto, ctx.cap)?;
        let q_max = config.search.q_max;
        let spec = scatterer_grid(&sc, 0.0, 2.0 * PI * q_max, a.samples.max(2))?;
        let n = spec.n as f64;
        let mut top = Series::new("S/N", spec.k_values.iter().zip(&spec.s).map(|(&k, &s)| (k / (2.0 * PI), s / n)).collect());
        top.markers = report.bragg_checks.iter().map(|b| b.q).collect();
        let bottom = match energies {
            Some(e) => {
                let es = EnergySpectrum { eigenvalues: e, boundary: Boundary::Open };
                let pts = es.eigenvalues.iter().map(|&x| (x, counting_function(&es, x))).collect();
                vec![Series::new("counting function", pts)]
            }
            None => report.gap_labels.iter().map(|g| Series::new("", vec![(g.lower, g.ids_value), (g.upper, g.ids_value)])).collect(),
        };
        let panels = [
            Panel { axes: Axes::new(&format!("{} diffraction, N = {}", a.family, spec.n), "k/2π", "S(k)/N"), series: vec![top] },
            Panel { axes: Axes::new(&format!("{} spectrum, N = {}", a.family, report.sites), "energy", "counting function"), series: bottom },
        ];
        crate::output::write_file(path, &svg::render(&panels)?)?;
    }
    Ok(())
}

fn check_family(src: Option<&SourceInfo>, family: &str) -> Result<()> {
    match src.and_then(|s| s.family.as_deref()) {
        Some(f) if f != family => Err(usage!("input file is for {f:?}, not {family:?}")),
        _ => Ok(()),
    }
}
