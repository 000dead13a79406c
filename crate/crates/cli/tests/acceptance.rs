//! Acceptance criteria 1 to 12, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use aperiodix_core::bloch::{bloch_report, BlochConfig};
use aperiodix_core::cohomology::{cech_h1, trace_image, DirectLimitGroup};
use aperiodix_core::diffraction::{classify_spectrum, peak_scaling, rule_scatterers, scatterer_grid, Decoration, FourierModule, PeakClass, PeakSearch, PredictBounds};
use aperiodix_core::groups::{golden_inverse, group_for_family, nearest_element, LabelGroup, SearchBounds};
use aperiodix_core::spectral::{brute_force_eigs, build_chain, counting_function, eigenvalues_tridiag, spectrum_and_gaps, sturm_count, Model};
use aperiodix_core::substitution::{expand_word, letter_statistics, occurrence_matrix, SubstitutionRule, BUILTIN_FAMILIES};

type Outcome = Result<String, String>;

fn rule(f: &str) -> SubstitutionRule {
    SubstitutionRule::builtin(f).unwrap()
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn table_cohomology() -> Outcome {
    let expected = [
        ("periodic", "Z"),
        ("fibonacci", "Z²"),
        ("thue-morse", "Z ⊕ Z[1/2]"),
        ("period-doubling", "Z ⊕ Z[1/2]"),
        ("rudin-shapiro", "Z ⊕ Z[1/2] ⊕ Z²[1/2]"),
    ];
    let mut got = Vec::new();
    for (f, name) in expected {
        let h = cech_h1(&rule(f)).map_err(|e| format!("{f}: {e}"))?;
        let want = DirectLimitGroup::parse_name(name).ok_or_else(|| format!("cannot parse {name}"))?;
        ensure(h.group.recognized && (h.group.free_rank, h.group.localized.clone()) == want, format!("{f}: got {}, want {name}", h.group))?;
        got.push(format!("{f}={}", h.group));
    }
    Ok(got.join("; "))
}

fn table_traces() -> Outcome {
    let mut got = Vec::new();
    for f in BUILTIN_FAMILIES {
        let t = trace_image(&rule(f)).map_err(|e| format!("{f}: {e}"))?;
        let g = group_for_family(f).unwrap();
        ensure(t == g, format!("{f}: trace {t} differs from {g}"))?;
        let ok = match (f, &t) {
            // Z per two-letter unit cell of the word abab...
            ("periodic", LabelGroup::Cyclic { q: 2 }) => true,
            ("fibonacci", LabelGroup::TwoGen { rho }) => (rho - golden_inverse()).abs() < 1e-12,
            ("thue-morse" | "period-doubling", LabelGroup::ScaledLocalized { num: 1, den: 3, p: 2 }) => true,
            ("rudin-shapiro", LabelGroup::ScaledLocalized { num: 1, den: 1, p: 2 }) => true,
            _ => false,
        };
        ensure(ok, format!("{f}: unexpected trace {t}"))?;
        got.push(format!("{f}={t}"));
    }
    Ok(got.join("; "))
}

fn fibonacci_gaps() -> Outcome {
    let r = rule("fibonacci");
    let word = expand_word(&r, 0, 14).unwrap();
    ensure(word.len() == 987, format!("N = {}", word.len()))?;
    let (_, gaps) = spectrum_and_gaps(&word, &Model::onsite(0.0, 1.0), 10.0).map_err(|e| e.to_string())?;
    let group = LabelGroup::two_gen(golden_inverse());
    let bounds = SearchBounds { coef: 30, depth: 0 };
    let mut worst: f64 = 0.0;
    for g in &gaps {
        let (_, res) = nearest_element(g.label_value(), &group, &bounds);
        worst = worst.max(res);
    }
    ensure(worst <= 1e-3, format!("worst residual {worst:.3e}"))?;
    let mut by_width = gaps.clone();
    by_width.sort_by(|a, b| b.width.total_cmp(&a.width));
    let mut widest: Vec<(f64, i64)> = by_width[..2]
        .iter()
        .map(|g| {
            let (e, _) = nearest_element(g.label_value(), &group, &bounds);
            (g.label_value(), e.coordinates[1])
        })
        .collect();
    widest.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ok = (widest[0].0 - 0.381966).abs() < 2e-3 && (widest[1].0 - 0.618034).abs() < 2e-3 && widest.iter().all(|w| w.1.abs() == 1);
    ensure(ok, format!("widest gaps {widest:?}"))?;
    Ok(format!("{} gaps, worst residual {worst:.2e}, widest at {:.6} and {:.6}", gaps.len(), widest[0].0, widest[1].0))
}

fn dyadic_gaps() -> Outcome {
    let mut out = Vec::new();
    for (f, num, den) in [("thue-morse", 1, 3), ("period-doubling", 1, 3), ("rudin-shapiro", 1, 1)] {
        let r = rule(f);
        let word = r.project(&expand_word(&r, 0, 10).unwrap());
        let (_, gaps) = spectrum_and_gaps(&word, &Model::onsite(0.0, 1.0), 10.0).map_err(|e| e.to_string())?;
        let group = LabelGroup::scaled_localized(num, den, 2).unwrap();
        let bounds = SearchBounds { coef: 3, depth: 10 };
        let worst = gaps.iter().map(|g| nearest_element(g.label_value(), &group, &bounds).1).fold(0.0, f64::max);
        ensure(!gaps.is_empty() && worst <= 1e-3, format!("{f}: {} gaps, worst residual {worst:.3e}", gaps.len()))?;
        out.push(format!("{f}: {} gaps, worst {worst:.1e}", gaps.len()));
    }
    Ok(out.join("; "))
}

fn fibonacci_bragg_scaling() -> Outcome {
    let orders: Vec<u32> = (8..=16).collect();
    let cls = classify_spectrum(&rule("fibonacci"), &orders, &PeakSearch::default()).map_err(|e| e.to_string())?;
    let (i, _) = cls.heights.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).ok_or("no peaks")?;
    let p = &cls.peaks[i];
    ensure(p.gamma_fit >= 0.95, format!("gamma {:.4} at k = {:.5}", p.gamma_fit, p.k_star))?;
    Ok(format!("gamma {:.4} at k/2pi = {:.5}", p.gamma_fit, p.k_star / (2.0 * PI)))
}

fn thue_morse_scaling() -> Outcome {
    let orders: Vec<u32> = (8..=16).collect();
    let p = peak_scaling(&rule("thue-morse"), 2.0 * PI / 3.0, &orders, 1.0, Decoration::Auto).map_err(|e| e.to_string())?;
    let target = 3f64.log2() - 1.0;
    ensure((p.gamma_fit - target).abs() <= 0.08, format!("gamma {:.4}, target {target:.4}", p.gamma_fit))?;
    Ok(format!("gamma {:.4} vs log2(3) - 1 = {target:.4}, {} atoms at the top order", p.gamma_fit, 1 << 16))
}

fn rudin_shapiro_flatness() -> Outcome {
    let r = rule("rudin-shapiro");
    let mut maxima = Vec::new();
    for order in [8u32, 10, 12, 14] {
        let sc = rule_scatterers::<f64>(&r, order, Decoration::Auto, usize::MAX).map_err(|e| e.to_string())?;
        let samples = (0.96 * sc.length * 4.0).ceil() as usize;
        let spec = scatterer_grid(&sc, 2.0 * PI * 0.02, 2.0 * PI * 0.98, samples).map_err(|e| e.to_string())?;
        let m = spec.s.iter().copied().fold(0.0, f64::max) / spec.n as f64;
        maxima.push((order, m));
    }
    let at12 = maxima.iter().find(|m| m.0 == 12).unwrap().1;
    let decreasing = maxima.windows(2).all(|w| w[1].1 < w[0].1);
    ensure(at12 < 0.05 && decreasing, format!("max S/N by order {maxima:?}"))?;
    Ok(format!("max S/N {}", maxima.iter().map(|(o, m)| format!("{o}:{m:.2e}")).collect::<Vec<_>>().join(" ")))
}

fn bragg_modules() -> Outcome {
    let mut out = Vec::new();
    for f in ["fibonacci", "period-doubling"] {
        let r = rule(f);
        let cfg = BlochConfig::for_rule(&r);
        let cls = classify_spectrum(&r, &cfg.diffraction_orders, &cfg.search).map_err(|e| e.to_string())?;
        let module = FourierModule::for_family(f).unwrap();
        let bounds = PredictBounds { coef: 10, depth: 12, q_max: cfg.search.q_max + 0.1 };
        let bragg: Vec<_> = cls.peaks.iter().filter(|p| p.classification == PeakClass::Bragg).collect();
        ensure(!bragg.is_empty(), format!("{f}: no Bragg peaks"))?;
        let mut worst: f64 = 0.0;
        for p in &bragg {
            let k = *p.k_refined.last().unwrap();
            let (_, d) = module.nearest(k, &bounds).ok_or("empty module")?;
            worst = worst.max(d);
        }
        ensure(worst <= cls.resolution, format!("{f}: distance {worst:.3e} exceeds resolution {:.3e}", cls.resolution))?;
        out.push(format!("{f}: {} Bragg peaks, worst distance {worst:.1e} (resolution {:.1e})", bragg.len(), cls.resolution));
    }
    Ok(out.join("; "))
}

fn eigensolver_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let f = BUILTIN_FAMILIES[rng.random_range(0..BUILTIN_FAMILIES.len())];
        let r = rule(f);
        let n = rng.random_range(2..=12usize);
        let mut word = r.project(&expand_word(&r, 0, 6).unwrap());
        word.truncate(n);
        let (va, vb): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let model = if rng.random_bool(0.5) { Model::onsite(va, vb) } else { Model::hopping(rng.random_range(0.1..1.5), va, vb) };
        let chain = build_chain(&word, &model).map_err(|e| e.to_string())?;
        let fast = eigenvalues_tridiag(&chain);
        let slow = brute_force_eigs(&chain).map_err(|e| e.to_string())?;
        for (a, b) in fast.eigenvalues.iter().zip(&slow.eigenvalues) {
            worst = worst.max((a - b).abs());
        }
        ensure(worst <= 1e-10, format!("trial {trial} ({f}, N = {n}): deviation {worst:.3e} ({model:?})"))?;

        // energies solve H φ = 2eφ, so a potential shift c moves them by c/2
        let c: f64 = rng.random_range(-1.5..1.5);
        let shifted = eigenvalues_tridiag(&chain.shifted(c));
        let shift_ok = shifted.eigenvalues.iter().zip(&fast.eigenvalues).all(|(s, e)| (s - e - c / 2.0).abs() <= 1e-10);
        ensure(shift_ok, format!("trial {trial}: shift covariance"))?;

        if n >= 3 {
            let sub = eigenvalues_tridiag(&chain.truncate(n - 1));
            let e = &fast.eigenvalues;
            let interlace = sub.eigenvalues.iter().enumerate().all(|(i, &m)| e[i] - 1e-10 <= m && m <= e[i + 1] + 1e-10);
            ensure(interlace, format!("trial {trial}: interlacing"))?;
        }

        for _ in 0..8 {
            let x: f64 = rng.random_range(-4.0..4.0);
            let count = sturm_count(&chain, 2.0 * x);
            let near = fast.eigenvalues.iter().any(|e| (e - x).abs() < 1e-9);
            ensure(near || count as f64 == (n as f64 * counting_function(&fast, x)).round(), format!("trial {trial}: Sturm count at {x}"))?;
        }
    }
    Ok(format!("200 chains, worst deviation {worst:.2e}"))
}

fn frequency_convergence() -> Outcome {
    let mut out = Vec::new();
    for f in ["fibonacci", "thue-morse", "period-doubling"] {
        let r = rule(f);
        let m = occurrence_matrix(&r);
        let (alpha, beta, gamma, delta) = (m.get(0, 0) as f64, m.get(0, 1) as f64, m.get(1, 0) as f64, m.get(1, 1) as f64);
        let (tr, det) = (alpha + delta, alpha * delta - beta * gamma);
        let lambda = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
        let closed = [gamma / (lambda + gamma - alpha), beta / (lambda + beta - delta)];
        let word = expand_word(&r, 0, 20).unwrap();
        let stats = letter_statistics(&word, 2).unwrap();
        let err = (stats.freqs[0] - closed[0]).abs().max((stats.freqs[1] - closed[1]).abs());
        ensure(err <= 1e-6, format!("{f}: frequencies {:?} vs {closed:?}", stats.freqs))?;
        out.push(format!("{f}: error {err:.1e}"));
    }
    Ok(out.join("; "))
}

fn bloch_verdicts() -> Outcome {
    let mut out = Vec::new();
    for f in BUILTIN_FAMILIES {
        let r = bloch_report(f, &BlochConfig::for_rule(&rule(f))).map_err(|e| format!("{f}: {e}"))?;
        let expect_match = matches!(f, "periodic" | "fibonacci" | "period-doubling");
        let v = r.verdicts;
        ensure(
            v.gaps_in_trace_group && v.diffraction_matches_trace == expect_match,
            format!("{f}: gaps_in_trace_group {}, diffraction_matches_trace {} (tags {:?})", v.gaps_in_trace_group, v.diffraction_matches_trace, r.spectral_tags),
        )?;
        out.push(format!("{f}: match={} [{}]", v.diffraction_matches_trace, r.spectral_tags.join(",")));
    }
    Ok(out.join("; "))
}

/// Standard output plus every file written, for one invocation.
fn cli_outputs(args: &[&str], threads: Option<&str>, dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let _ = std::fs::remove_dir_all(dir);
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let svg = dir.join("plot.svg");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aperiodix"));
    cmd.args(args.iter().map(|a| if *a == "@svg" { svg.to_str().unwrap() } else { a }));
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let o = cmd.output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr).trim()));
    }
    let mut files = vec![("stdout".to_string(), o.stdout)];
    let mut names: Vec<_> = std::fs::read_dir(dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    names.sort();
    for p in names {
        files.push((p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).map_err(|e| e.to_string())?));
    }
    Ok(files)
}

fn cli_determinism() -> Outcome {
    let runs: [&[&str]; 9] = [
        &["generate", "--family", "rudin-shapiro", "--order", "8"],
        &["generate", "--slope", "1/golden", "--count", "300", "--format", "csv"],
        &["diffract", "--family", "fibonacci", "--order", "12", "--samples", "1500", "--svg", "@svg"],
        &["spectrum", "--family", "period-doubling", "--order", "9"],
        &["spectrum", "--family", "fibonacci", "--order", "12", "--model", "hopping", "--format", "json"],
        &["gaps", "--family", "thue-morse", "--order", "9"],
        &["cohomology", "--family", "rudin-shapiro"],
        &["trace", "--family", "fibonacci"],
        &["bloch", "--family", "period-doubling", "--svg", "@svg"],
    ];
    let tmp = std::env::temp_dir().join(format!("aperiodix-acceptance-{}", std::process::id()));
    let mut checked = 0;
    for args in runs {
        let base = cli_outputs(args, None, &tmp.join("a"))?;
        for threads in [Some("1"), Some("3"), None] {
            let other = cli_outputs(args, threads, &tmp.join("b"))?;
            ensure(base == other, format!("{} differs with --threads {threads:?}", args[0]))?;
            checked += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&tmp);
    Ok(format!("{} subcommand invocations, {checked} comparisons, all byte-identical", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("cohomology of the built-in families", table_cohomology),
        ("trace images of the built-in families", table_traces),
        ("Fibonacci gap labels", fibonacci_gaps),
        ("dyadic gap labels", dyadic_gaps),
        ("Fibonacci Bragg scaling", fibonacci_bragg_scaling),
        ("Thue-Morse scaling exponent", thue_morse_scaling),
        ("Rudin-Shapiro flatness", rudin_shapiro_flatness),
        ("Bragg module membership", bragg_modules),
        ("eigensolver oracle equivalence", eigensolver_oracle),
        ("frequency convergence", frequency_convergence),
        ("Bloch verdicts", bloch_verdicts),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
