use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use pentropy::classify::{read_scores, write_scores, Label, LabeledScore};
use pentropy::filtration::FilteredComplex;
use pentropy::persistence::ORACLE_MAX_SIMPLICES;
use pentropy::synth::{read_manifest, write_corpus, CorpusSpec, MANIFEST_FILE};
use pentropy::{
    compute_barcode, cross_validate, generate_corpus, load_signal, lower_star_filtration,
    oracle_barcode, persistent_entropy, roc_curve, verify_stability, Barcode, Format, Signal,
};
use rayon::prelude::*;

use crate::error::{CliError, Kind};
use crate::{Cli, Command, InputFormat, ScoreArgs, SignalArgs};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| {
            CliError::new(
                Kind::Usage,
                format!("cannot start {} workers: {e}", cli.jobs),
            )
        })?;
    pool.install(|| match cli.command {
        Command::Entropy(args) => per_signal(&args, "entropy", |signal| {
            let (_, barcode) = barcode_of(signal, args.oracle_check)?;
            Ok(persistent_entropy(&barcode)?.to_json())
        }),
        Command::Barcode {
            signals,
            dump_filtration,
        } => per_signal(&signals, "barcode", |signal| {
            let (complex, barcode) = barcode_of(signal, signals.oracle_check)?;
            Ok(if dump_filtration {
                format!(
                    "{{\"filtration\":{},\"barcode\":{}}}",
                    complex.to_json(),
                    barcode.to_json()
                )
            } else {
                barcode.to_json()
            })
        }),
        Command::Compare {
            f,
            g,
            format,
            output,
        } => compare(&f, &g, format, output.as_deref()),
        Command::Roc(args) => {
            let scores = load_scores(&args)?;
            let curve = roc_curve(&scores, Label::Faulty)?;
            let mut buf = Vec::new();
            curve.write_csv(&mut buf).expect("writing to memory");
            emit(
                args.output.as_deref(),
                &String::from_utf8(buf).expect("CSV is UTF-8"),
            )
        }
        Command::Cv { scores, k, seed } => {
            let data = load_scores(&scores)?;
            let report = cross_validate(&data, k as usize, seed)?;
            emit(scores.output.as_deref(), &(report.to_json() + "\n"))
        }
        Command::Synth {
            dir,
            seed,
            good,
            faulty,
            length,
        } => {
            let defaults = CorpusSpec::default();
            let spec = CorpusSpec {
                seed: seed.unwrap_or(defaults.seed),
                good_count: good.unwrap_or(defaults.good_count),
                faulty_count: faulty.unwrap_or(defaults.faulty_count),
                length: length.unwrap_or(defaults.length),
                ..defaults
            };
            let manifest = write_corpus(&generate_corpus(&spec)?, &dir)?;
            let summary = serde_json::json!({
                "dir": dir.display().to_string(),
                "manifest": dir.join(MANIFEST_FILE).display().to_string(),
                "signals": manifest.entries.len(),
            });
            emit(None, &(summary.to_string() + "\n"))
        }
    })
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::new(Kind::Io, format!("stdout: {e}")))
        }
    }
}

fn read_signal(path: &Path, format: Option<InputFormat>) -> Result<Signal, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let format = format.map_or_else(|| Format::from_path(path), Format::from);
    let signal =
        load_signal(BufReader::new(file), format).map_err(|e| CliError::from(e).at(path))?;
    Ok(match signal.id() {
        Some(_) => signal,
        None => {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            signal.with_id(stem.unwrap_or_default())
        }
    })
}

/// Union-find barcode, optionally cross-checked against the reduction oracle.
fn barcode_of(signal: &Signal, oracle_check: bool) -> Result<(FilteredComplex, Barcode), CliError> {
    let complex = lower_star_filtration(signal);
    let barcode = compute_barcode(&complex);
    if oracle_check && complex.simplex_count() <= ORACLE_MAX_SIMPLICES {
        let oracle = oracle_barcode(&complex)?;
        if !barcode.same_multiset(&oracle) {
            return Err(CliError::new(
                Kind::OracleMismatch,
                format!(
                    "union-find barcode {} differs from boundary-matrix barcode {}",
                    barcode.to_json(),
                    oracle.to_json()
                ),
            ));
        }
    }
    Ok((complex, barcode))
}

fn is_signal_file(path: &Path) -> bool {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    path.is_file()
        && matches!(ext.as_deref(), Some("csv" | "json"))
        && path.file_name().is_some_and(|n| n != MANIFEST_FILE)
}

/// Expands directories into their signal files, sorted by name.
fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input).map_err(|e| CliError::io(input, e))?;
            let mut files = Vec::new();
            for entry in entries {
                let path = entry.map_err(|e| CliError::io(input, e))?.path();
                if is_signal_file(&path) {
                    files.push(path);
                }
            }
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

/// Runs `f` on every input signal. A single file input writes one JSON
/// document; otherwise each signal is handled independently, in parallel,
/// and failures are reported without discarding the other results.
fn per_signal<F>(args: &SignalArgs, suffix: &str, f: F) -> Result<(), CliError>
where
    F: Fn(&Signal) -> Result<String, CliError> + Sync,
{
    let batch = args.inputs.len() > 1 || args.inputs.iter().any(|p| p.is_dir());
    let files = expand_inputs(&args.inputs)?;
    let process =
        |path: &Path| read_signal(path, args.format).and_then(|s| f(&s).map_err(|e| e.at(path)));

    if !batch {
        let json = process(&files[0])?;
        return emit(args.output.as_deref(), &(json + "\n"));
    }

    if let Some(dir) = &args.output {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let results: Vec<Result<String, CliError>> = files
        .par_iter()
        .map(|path| {
            let json = process(path)?;
            match &args.output {
                Some(dir) => {
                    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                    let target = dir.join(format!("{stem}.{suffix}.json"));
                    std::fs::write(&target, json + "\n").map_err(|e| CliError::io(&target, e))?;
                    Ok(String::new())
                }
                None => Ok(format!(
                    "{{\"input\":{},\"result\":{json}}}\n",
                    serde_json::Value::from(path.display().to_string())
                )),
            }
        })
        .collect();

    let mut text = String::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(line) => text.push_str(&line),
            Err(e) => failures.push(e),
        }
    }
    emit(None, &text)?;
    match failures.first() {
        None => Ok(()),
        Some(first) => {
            for e in &failures {
                eprintln!("{}", e.to_json());
            }
            Err(CliError::new(
                first.kind,
                format!("{} of {} inputs failed", failures.len(), files.len()),
            ))
        }
    }
}

fn compare(
    f: &Path,
    g: &Path,
    format: Option<InputFormat>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let a = read_signal(f, format)?;
    let b = read_signal(g, format)?;
    let report = verify_stability(&a, &b)?;
    emit(output, &(report.to_json() + "\n"))?;
    if !report.diagram_bound_holds {
        return Err(CliError::new(
            Kind::Computation,
            format!(
                "bottleneck distance {} exceeds sup distance {}",
                report.bottleneck, report.sup_dist
            ),
        ));
    }
    if report.bound_epsilon.is_some() && !report.entropy_bound_holds {
        return Err(CliError::new(
            Kind::Computation,
            format!(
                "entropy gap {} exceeds the stability bound {:?}",
                report.entropy_gap, report.bound_epsilon
            ),
        ));
    }
    Ok(())
}

/// Scores from a CSV file, or computed from a corpus directory.
fn load_scores(args: &ScoreArgs) -> Result<Vec<LabeledScore>, CliError> {
    let input = &args.input;
    if !input.is_dir() {
        let file = File::open(input).map_err(|e| CliError::io(input, e))?;
        return read_scores(BufReader::new(file)).map_err(|e| CliError::from(e).at(input));
    }
    let manifest = read_manifest(input)?;
    let raw = args.raw && !args.normalized;
    let scores = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let path = input.join(&entry.file);
            let signal = read_signal(&path, args.format)?;
            let (_, barcode) = barcode_of(&signal, args.oracle_check).map_err(|e| e.at(&path))?;
            let h = persistent_entropy(&barcode).map_err(|e| CliError::from(e).at(&path))?;
            let score = if raw {
                h.raw_entropy
            } else {
                h.normalized_entropy
            };
            Ok(LabeledScore::new(&entry.id, score, entry.label))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if let Some(path) = &args.write_scores {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        write_scores(&scores, file).map_err(|e| CliError::io(path, e))?;
    }
    Ok(scores)
}
