use std::fs;

use serde_json::{json, Value};

use rawcode_core::baselines::{
    bernoulli_stream, coincidence_rate, markov_stream, run_waiting, run_waiting_mean_closed_form,
    BernoulliSpec, MarkovChainSpec,
};
use rawcode_core::coding::{encode_trajectory, refine_with_cap, Partition, SymbolStream};
use rawcode_core::coincidence::{
    analyze_streams, bridge_scenario, count_windows, hitting_experiment, CoincidenceQuery,
    SamplingScheme,
};
use rawcode_core::diagnostics::{
    ergodic_block_report, ulam_matrix, weak_mixing_series, BlockReport, CorrelationMode, MixingData,
};
use rawcode_core::dynamics::TrajectorySource;
use rawcode_core::rational::{format_rational, parse_rational, rat, to_f64, Rational};
use rawcode_core::rng::SeedSpec;

use crate::io;
use crate::report::{csv_header, envelope, interval_set_value, rational_value, to_value};
use crate::{
    AuditArgs, BridgeArgs, CliError, CodeArgs, CoincideArgs, Format, MixingArgs, MixingMode, Model,
    OracleArgs, OutputArgs, RefineArgs, SimulateArgs, System, UlamArgs,
};

fn write_output(out: &OutputArgs, text: String) -> Result<(), CliError> {
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(
    out: &OutputArgs,
    command: &str,
    config: Value,
    result: Value,
    csv: Option<String>,
) -> Result<(), CliError> {
    match out.format {
        Format::Json => {
            let doc = envelope(command, config, result);
            let mut text =
                serde_json::to_string_pretty(&doc).map_err(|e| CliError::runtime(e.to_string()))?;
            text.push('\n');
            write_output(out, text)
        }
        Format::Csv => {
            let body = csv.ok_or_else(|| {
                CliError::usage(format!("{command} has no CSV form; use --format json"))
            })?;
            write_output(out, format!("{}{body}", csv_header(command, &config)))
        }
    }
}

fn stream_paths(out: &OutputArgs, count: u64) -> Result<Vec<Option<std::path::PathBuf>>, CliError> {
    match (&out.output, count) {
        (None, 0 | 1) => Ok(vec![None]),
        (None, _) => Err(CliError::usage(
            "--output is required when writing more than one stream",
        )),
        (Some(path), 0 | 1) => Ok(vec![Some(path.clone())]),
        (Some(path), n) => Ok((0..n)
            .map(|j| Some(std::path::PathBuf::from(format!("{}.{j}", path.display()))))
            .collect()),
    }
}

fn write_stream(path: &Option<std::path::PathBuf>, stream: &SymbolStream) -> Result<(), CliError> {
    let text = io::render_stream(stream);
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    if args.length == 0 {
        return Err(CliError::usage("stream length must be positive"));
    }
    if args.streams == 0 {
        return Err(CliError::usage("need at least one stream"));
    }
    enum Source {
        B(BernoulliSpec),
        M(MarkovChainSpec),
    }
    let source = match args.model {
        Model::Bernoulli => {
            let probs = args
                .probs
                .as_deref()
                .ok_or_else(|| CliError::usage("--model bernoulli needs --probs"))?;
            let spec = BernoulliSpec::new(io::parse_rational_list(probs)?)
                .map_err(CliError::usage_from)?;
            Source::B(spec)
        }
        Model::Markov => {
            let matrix = args
                .matrix
                .as_deref()
                .ok_or_else(|| CliError::usage("--model markov needs --matrix"))?;
            let initial = args
                .initial
                .as_deref()
                .ok_or_else(|| CliError::usage("--model markov needs --initial"))?;
            let matrix = io::load_matrix(matrix)?;
            let spec = MarkovChainSpec::new(matrix, io::parse_rational_list(initial)?)
                .map_err(CliError::usage_from)?;
            Source::M(spec)
        }
    };
    let paths = stream_paths(&args.out, args.streams)?;
    let mut written = Vec::new();
    for (j, path) in paths.iter().enumerate() {
        let seed = SeedSpec::new(args.seed, j as u64);
        let stream = match &source {
            Source::B(spec) => bernoulli_stream(spec, seed, args.length),
            Source::M(spec) => markov_stream(spec, seed, args.length),
        };
        write_stream(path, &stream)?;
        if let Some(p) = path {
            written.push(p.display().to_string());
        }
    }
    if !written.is_empty() {
        let config = json!({
            "model": match args.model { Model::Bernoulli => "bernoulli", Model::Markov => "markov" },
            "probs": args.probs,
            "matrix": args.matrix.as_ref().map(|p| p.display().to_string()),
            "initial": args.initial,
            "length": args.length,
            "streams": args.streams,
            "seed": args.seed,
        });
        let doc = envelope("simulate", config, json!({ "written": written }));
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    }
    Ok(())
}

pub fn code(args: CodeArgs) -> Result<(), CliError> {
    if args.horizon == 0 {
        return Err(CliError::usage("horizon must be positive"));
    }
    let map = args.system.map()?;
    let partition = io::load_partition(&args.partition)?;
    let streams: Vec<SymbolStream> = if !args.x0.is_empty() {
        args.x0
            .iter()
            .map(|text| {
                let x0 = parse_rational(text).map_err(CliError::usage_from)?;
                let src = TrajectorySource::open_exact(&map, x0).map_err(CliError::usage_from)?;
                encode_trajectory(src, &partition, args.horizon).map_err(CliError::from)
            })
            .collect::<Result<_, _>>()?
    } else {
        (0..args.streams.max(1))
            .map(|j| {
                let src = TrajectorySource::open_seeded(
                    &map,
                    SeedSpec::new(args.seed, j),
                    args.horizon,
                    None,
                )?;
                encode_trajectory(src, &partition, args.horizon).map_err(CliError::from)
            })
            .collect::<Result<_, _>>()?
    };
    let paths = stream_paths(&args.out, streams.len() as u64)?;
    let mut written = Vec::new();
    for (stream, path) in streams.iter().zip(&paths) {
        write_stream(path, stream)?;
        if let Some(p) = path {
            written.push(p.display().to_string());
        }
    }
    if !written.is_empty() {
        let config = json!({
            "system": args.system.name(),
            "partition": args.partition,
            "horizon": args.horizon,
            "x0": args.x0,
            "seed": args.seed,
            "streams": streams.len(),
        });
        let doc = envelope("code", config, json!({ "written": written }));
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    }
    Ok(())
}

pub fn refine(args: RefineArgs) -> Result<(), CliError> {
    let map = args.system.map()?;
    let partition = io::load_partition(&args.partition)?;
    let table = refine_with_cap(&map, &partition, args.order, args.cap)?;
    let config = json!({
        "system": args.system.name(),
        "partition": args.partition,
        "order": args.order,
        "cap": args.cap,
    });
    let cylinders: Vec<Value> = table
        .cylinders()
        .iter()
        .map(|c| {
            json!({
                "word": c.word,
                "measure": rational_value(&c.measure),
                "support": interval_set_value(&c.support),
            })
        })
        .collect();
    let result = json!({
        "order": table.order(),
        "alphabet": table.alphabet(),
        "cylinder_count": table.len(),
        "total_measure": rational_value(&table.total_measure()),
        "cylinders": cylinders,
    });
    let mut csv = String::from("word,measure_exact,measure,support\n");
    for c in table.cylinders() {
        let word = c
            .word
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(".");
        let support = c
            .support
            .spans()
            .iter()
            .map(|iv| format!("{}:{}", format_rational(iv.lo()), format_rational(iv.hi())))
            .collect::<Vec<_>>()
            .join(";");
        csv.push_str(&format!(
            "{word},{},{},{support}\n",
            format_rational(&c.measure),
            to_f64(&c.measure)
        ));
    }
    emit(&args.out, "refine", config, result, Some(csv))
}

/// The doubling map with a uniform power-of-two partition codes i.i.d.
/// uniform symbols, so the run-waiting oracle applies with
/// q = M^(1-N).
/// Exact i.i.d.-reducible baseline for the doubling map with a uniform
/// 2^K-cell partition. A symbol is the K-bit window of the binary
/// expansion at the current offset, so N-stream symbol agreement at one
/// position means K consecutive positions of N-wise bit agreement — the
/// bit agreements are genuinely i.i.d. at rate 2^(1-N). Per-position
/// symbol agreement then has rate 2^(K(1-N)), and a length-L symbol window
/// is a length L+K-1 bit run, giving the exact mean completion time
/// mean_bit(2^(1-N), L+K-1) - (K-1). For K = 1 this is the plain streak
/// chain.
fn doubling_oracle(
    system: System,
    partition: &Partition,
    n_streams: u32,
    window: u32,
) -> Option<(Rational, Rational)> {
    if system != System::Doubling {
        return None;
    }
    let m = partition.len();
    if m < 2 || !m.is_power_of_two() {
        return None;
    }
    let width = partition.cell(0).length();
    if !partition.cells().iter().all(|c| c.length() == width) {
        return None;
    }
    let k = m.trailing_zeros();
    let mut bit_rate = rat(1, 1);
    for _ in 1..n_streams {
        bit_rate /= rat(2, 1);
    }
    let mut per_position = rat(1, 1);
    for _ in 0..k {
        per_position *= &bit_rate;
    }
    let mean =
        run_waiting_mean_closed_form(&bit_rate, window + k - 1) - rat(k as i64 - 1, 1);
    Some((per_position, mean))
}

pub fn coincide(args: CoincideArgs) -> Result<(), CliError> {
    if args.horizon < args.window as u64 + 1 {
        return Err(CliError::usage(format!(
            "horizon {} too short for window {} (needs window + 1)",
            args.horizon, args.window
        )));
    }
    if args.samples == 0 {
        return Err(CliError::usage("need at least one sample"));
    }
    let map = args.system.map()?;
    let partition = io::load_partition(&args.partition)?;
    // Rotation tuples keep their pairwise offset forever, so sampling with
    // a fixed canonical offset (2/5) is the default there; anything else
    // samples independently unless an offset is requested.
    let offset_text = match (&args.offset, args.system) {
        (Some(text), _) => text.clone(),
        (None, System::Rotation) => "2/5".to_string(),
        (None, _) => "none".to_string(),
    };
    let scheme = if offset_text == "none" {
        SamplingScheme::Independent
    } else {
        let d = parse_rational(&offset_text).map_err(CliError::usage_from)?;
        SamplingScheme::FixedOffset(d)
    };
    let query = CoincidenceQuery {
        n_streams: args.n_streams,
        window: args.window,
        horizon: args.horizon,
        samples: args.samples,
        seed: args.seed,
        scheme,
    };
    let stats = hitting_experiment(&map, &partition, &query)?;
    let oracle = doubling_oracle(args.system, &partition, args.n_streams, args.window).map(
        |(per_position, mean)| {
            json!({
                "per_step_rate": rational_value(&per_position),
                "mean_t_end": rational_value(&mean),
            })
        },
    );
    let config = json!({
        "system": args.system.name(),
        "partition": args.partition,
        "N": args.n_streams,
        "L": args.window,
        "horizon": args.horizon,
        "samples": args.samples,
        "seed": args.seed,
        "offset": offset_text,
    });
    let result = json!({
        "stats": to_value(&stats),
        "oracle": oracle,
    });
    let mut csv = format!(
        "# samples={} successes={} success_rate={} mean_t_end={}\nbin_lo,bin_hi,count\n",
        stats.samples,
        stats.successes,
        stats.success_rate,
        stats.mean_t_end.map_or("none".into(), |m| m.to_string()),
    );
    for bin in &stats.histogram {
        csv.push_str(&format!("{},{},{}\n", bin.lo, bin.hi, bin.count));
    }
    emit(&args.out, "coincide", config, result, Some(csv))
}

fn block_json(report: &BlockReport) -> Value {
    json!({
        "scc_count": report.scc_count,
        "sccs": report.sccs,
        "closed_sccs": report.closed_sccs,
        "primitive": report.primitivity.primitive,
        "kappa_or_period": report.primitivity.kappa.or(report.primitivity.period),
        "components": report
            .components
            .iter()
            .map(interval_set_value)
            .collect::<Vec<_>>(),
    })
}

pub fn bridge(args: BridgeArgs) -> Result<(), CliError> {
    if args.horizon < args.window as u64 + 1 {
        return Err(CliError::usage(format!(
            "horizon {} too short for window {} (needs window + 1)",
            args.horizon, args.window
        )));
    }
    if args.samples == 0 {
        return Err(CliError::usage("need at least one pair"));
    }
    let report = bridge_scenario(args.k, args.window, args.samples, args.horizon, args.seed)
        .map_err(|e| match e {
            rawcode_core::Error::Input(m) => CliError::usage(m),
            other => CliError::from(other),
        })?;
    let map = System::Bridge.map()?;
    let aligned = ergodic_block_report(&ulam_matrix(
        &map,
        &Partition::dyadic(args.aligned_bins).map_err(CliError::usage_from)?,
    ));
    let straddling = ergodic_block_report(&ulam_matrix(
        &map,
        &Partition::bridge(args.k).map_err(CliError::usage_from)?,
    ));
    let config = json!({
        "k": args.k,
        "L": args.window,
        "samples": args.samples,
        "horizon": args.horizon,
        "seed": args.seed,
        "aligned_bins": args.aligned_bins,
    });
    let result = json!({
        "scenario": to_value(&report),
        "ulam_aligned": block_json(&aligned),
        "ulam_straddling": block_json(&straddling),
    });
    let csv = {
        let stats = &report.stats;
        let mut text = format!(
            "# samples={} successes={} success_rate={} quadrant_invariant={}\nbin_lo,bin_hi,count\n",
            stats.samples, stats.successes, stats.success_rate, report.quadrant_invariant,
        );
        for bin in &stats.histogram {
            text.push_str(&format!("{},{},{}\n", bin.lo, bin.hi, bin.count));
        }
        text
    };
    emit(&args.out, "bridge", config, result, Some(csv))
}

pub fn mixing(args: MixingArgs) -> Result<(), CliError> {
    if args.terms == 0 {
        return Err(CliError::usage("need at least one correlation term"));
    }
    let map = args.system.map()?;
    let set_a = io::parse_interval_set(&args.set_a)?;
    let set_b = io::parse_interval_set(&args.set_b)?;
    let mode = match args.mode {
        MixingMode::Exact => CorrelationMode::Exact,
        MixingMode::Mc => CorrelationMode::MonteCarlo {
            samples: args.mc_samples,
        },
        MixingMode::Auto => CorrelationMode::Auto {
            samples: args.mc_samples,
        },
    };
    let series = weak_mixing_series(
        &map,
        &set_a,
        &set_b,
        args.terms,
        mode,
        SeedSpec::new(args.seed, 0),
    )?;
    let config = json!({
        "system": args.system.name(),
        "set_a": args.set_a,
        "set_b": args.set_b,
        "terms": args.terms,
        "mode": match args.mode { MixingMode::Exact => "exact", MixingMode::Mc => "mc", MixingMode::Auto => "auto" },
        "mc_samples": if matches!(args.mode, MixingMode::Exact) { None } else { Some(args.mc_samples) },
        "seed": args.seed,
    });
    let (result, csv) = match &series.data {
        MixingData::Exact { terms, cesaro } => {
            let mut csv = String::from("k,term,cesaro,term_exact,cesaro_exact\n");
            for (k, (t, w)) in terms.iter().zip(cesaro).enumerate() {
                csv.push_str(&format!(
                    "{k},{},{},{},{}\n",
                    to_f64(t),
                    to_f64(w),
                    format_rational(t),
                    format_rational(w)
                ));
            }
            let result = json!({
                "mode": "exact",
                "terms": terms.iter().map(rational_value).collect::<Vec<_>>(),
                "cesaro": cesaro.iter().map(rational_value).collect::<Vec<_>>(),
            });
            (result, csv)
        }
        MixingData::MonteCarlo { terms, cesaro } => {
            let mut csv = String::from("k,term,cesaro,ci99_halfwidth\n");
            for (k, (t, w)) in terms.iter().zip(cesaro).enumerate() {
                csv.push_str(&format!("{k},{},{w},{}\n", t.value, t.ci99_halfwidth));
            }
            let result = json!({
                "mode": "monte-carlo",
                "terms": to_value(terms),
                "cesaro": cesaro,
            });
            (result, csv)
        }
    };
    emit(&args.out, "mixing", config, result, Some(csv))
}

pub fn ulam(args: UlamArgs) -> Result<(), CliError> {
    let map = args.system.map()?;
    let bins = io::load_partition(&args.bins)?;
    if bins.len() > 4096 {
        return Err(CliError::usage(format!(
            "{} bins would need a dense {0}x{0} rational matrix; cap is 4096",
            bins.len()
        )));
    }
    let model = ulam_matrix(&map, &bins);
    let blocks = ergodic_block_report(&model);
    let config = json!({
        "system": args.system.name(),
        "bins": args.bins,
    });
    let matrix_rows: Vec<Vec<String>> = model
        .matrix
        .rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    let result = json!({
        "size": model.matrix.size(),
        "matrix": matrix_rows,
        "blocks": block_json(&blocks),
    });
    let mut csv = String::new();
    for row in model.matrix.rows() {
        let line = row
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(" ");
        csv.push_str(&line);
        csv.push('\n');
    }
    emit(&args.out, "ulam", config, result, Some(csv))
}

pub fn audit(args: AuditArgs) -> Result<(), CliError> {
    if args.streams.len() < 2 {
        return Err(CliError::usage("audit needs at least two stream files"));
    }
    if args.alphabet == 0 {
        return Err(CliError::usage("alphabet size must be positive"));
    }
    let mut streams = Vec::with_capacity(args.streams.len());
    for path in &args.streams {
        streams.push(io::read_stream_file(path, args.alphabet)?);
    }
    let min_len = streams.iter().map(|s| s.len()).min().unwrap_or(0);
    if min_len <= args.window as usize {
        return Err(CliError::runtime(format!(
            "streams too short ({min_len} symbols) for window {}",
            args.window
        )));
    }
    if streams.iter().any(|s| s.len() != min_len) {
        eprintln!("warning: stream lengths differ; truncating to {min_len} symbols");
        streams = streams
            .iter()
            .map(|s| SymbolStream::new(args.alphabet, s.symbols()[..min_len].to_vec()).unwrap())
            .collect();
    }

    let report = analyze_streams(&streams, args.window)?;
    let observed = count_windows(&streams, args.window)?;

    // Pooled symbol frequencies fit the independence baseline exactly.
    let n_streams = streams.len() as u32;
    let total = (min_len * streams.len()) as i64;
    let mut counts = vec![0i64; args.alphabet as usize];
    for s in &streams {
        for &sym in s.symbols() {
            counts[sym as usize] += 1;
        }
    }
    let fitted: Vec<Rational> = counts.iter().map(|&c| rat(c, total)).collect();
    let spec = BernoulliSpec::new(fitted.clone()).map_err(CliError::from)?;
    let q_c = coincidence_rate(&spec, n_streams).map_err(CliError::from)?;
    let mut q_pow = rat(1, 1);
    for _ in 0..args.window {
        q_pow *= &q_c;
    }
    let positions = rat(min_len as i64 - args.window as i64 + 1, 1);
    let expected = positions * &q_pow;
    let ratio = if expected > rat(0, 1) {
        Some(observed as f64 / to_f64(&expected))
    } else {
        None
    };

    let per_stream: Vec<Value> = streams
        .iter()
        .zip(&args.streams)
        .map(|(s, path)| {
            let mut c = vec![0u64; args.alphabet as usize];
            for &sym in s.symbols() {
                c[sym as usize] += 1;
            }
            json!({
                "path": path.display().to_string(),
                "length": s.len(),
                "frequencies": c
                    .iter()
                    .map(|&n| n as f64 / s.len() as f64)
                    .collect::<Vec<_>>(),
                "counts": c,
            })
        })
        .collect();

    let config = json!({
        "streams": args.streams.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "L": args.window,
        "alphabet": args.alphabet,
    });
    let result = json!({
        "length": min_len,
        "per_stream": per_stream,
        "pooled_frequencies": fitted.iter().map(rational_value).collect::<Vec<_>>(),
        "coincidence_rate": rational_value(&q_c),
        "agreement_count": report.agreement_count,
        "max_run": report.max_run,
        "first_window_t0": report.t0,
        "observed_windows": observed,
        "expected_windows": rational_value(&expected),
        "observed_over_expected": ratio,
    });
    let csv = format!(
        "length,agreement_count,max_run,observed_windows,expected_windows,ratio\n{},{},{},{},{},{}\n",
        min_len,
        report.agreement_count,
        report.max_run,
        observed,
        to_f64(&expected),
        ratio.map_or("none".into(), |r| r.to_string()),
    );
    emit(&args.out, "audit", config, result, Some(csv))
}

pub fn oracle(args: OracleArgs) -> Result<(), CliError> {
    let mut result = serde_json::Map::new();
    let mut csv: Option<String> = None;

    if let (Some(q_text), Some(window)) = (&args.per_step, args.window) {
        let q = parse_rational(q_text).map_err(CliError::usage_from)?;
        let dist = run_waiting(&q, window, args.horizon).map_err(|e| match e {
            rawcode_core::Error::Degenerate(m) => CliError::usage(m),
            other => CliError::from(other),
        })?;
        let closed = run_waiting_mean_closed_form(&q, window);
        result.insert(
            "run_waiting".into(),
            json!({
                "per_step": rational_value(&dist.per_step),
                "run_length": dist.run_length,
                "horizon": dist.horizon,
                "mean": rational_value(&dist.mean),
                "closed_form_mean": rational_value(&closed),
                "deficit": rational_value(&dist.deficit),
            }),
        );
        let mut rows = String::from("t,pmf\n");
        for (idx, p) in dist.pmf.iter().enumerate() {
            rows.push_str(&format!("{},{}\n", idx + 1, to_f64(p)));
        }
        csv = Some(rows);
    }

    if let (Some(probs), Some(word)) = (&args.probs, &args.word) {
        let spec =
            BernoulliSpec::new(io::parse_rational_list(probs)?).map_err(CliError::usage_from)?;
        let word = io::parse_word(word)?;
        let p = rawcode_core::baselines::window_match_probability(&spec, &word)
            .map_err(CliError::usage_from)?;
        let mut obj = serde_json::Map::new();
        obj.insert("word".into(), json!(word));
        obj.insert("probability".into(), rational_value(&p));
        if let Some(copies) = args.copies {
            let rate = coincidence_rate(&spec, copies).map_err(CliError::usage_from)?;
            obj.insert("coincidence_rate".into(), rational_value(&rate));
        }
        result.insert("word_match".into(), Value::Object(obj));
    }

    if result.is_empty() {
        return Err(CliError::usage(
            "oracle needs --per-step with --L, or --probs with --word",
        ));
    }
    let config = json!({
        "per_step": args.per_step,
        "L": args.window,
        "horizon": args.horizon,
        "probs": args.probs,
        "word": args.word,
        "copies": args.copies,
    });
    emit(&args.out, "oracle", config, Value::Object(result), csv)
}
