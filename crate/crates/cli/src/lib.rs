//! `laisc` command implementations. [`run`] is the whole program minus the
//! process boundary, so it can be driven from tests.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SubsecRound, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use laisc_core::engine::{apply_filter, coverage, evaluate, Filter, VerdictStatus};
use laisc_core::io::data::{read_activations, read_grid, read_prob_table, write_grid, LabeledGrid};
use laisc_core::io::evidence::{format_timestamp, parse_timestamp, EvidenceBundle, EvidencePayload, EvidenceRecord};
use laisc_core::io::{parse_evidence, parse_landscape, serialize_evidence, serialize_report, ReportFormat};
use laisc_core::metrics::{
    augment_labels, clm_flags, miou, nap_distance, perturb, performance_gap, LabelAugmentationSpec, Measurement,
    MetricId, PerturbationSpec, DEFAULT_MIN_SAMPLES,
};
use laisc_core::model::{Landscape, Requirement};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Environment variable that pins the clock (RFC 3339, UTC).
pub const NOW_VAR: &str = "LAISC_NOW";

#[derive(Debug, Parser)]
#[command(name = "laisc", version, about = "Evaluate AI safety concern landscapes against evidence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a landscape definition and list coverage gaps.
    Validate {
        #[arg(long)]
        landscape: PathBuf,
    },
    /// Evaluate evidence and render the landscape table or argument tree.
    Evaluate {
        #[arg(long)]
        landscape: PathBuf,
        #[arg(long)]
        evidence: PathBuf,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// List coverage gaps (blind spots) of a landscape.
    Coverage {
        #[arg(long)]
        landscape: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compute a metric and optionally append it to an evidence bundle.
    Metric {
        #[command(subcommand)]
        metric: MetricCommand,
    },
    /// Write a perturbed copy of an image/mask dataset.
    Perturb {
        #[arg(long)]
        images: PathBuf,
        /// Mask directory; geometric perturbations are applied to masks too.
        #[arg(long)]
        masks: Option<PathBuf>,
        /// brightness:D, contrast:F, noise:SIGMA, occlusion:X,Y,W,H, flip,
        /// rotate90:K, or a JSON object with a `kind` field.
        #[arg(long)]
        spec: String,
        /// Base seed for noise; image i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a corrupted copy of a label mask dataset.
    AugmentLabels {
        #[arg(long)]
        masks: PathBuf,
        /// flip:RATE, dilate:R, erode:R, translate:DX,DY, or a JSON object
        /// with a `kind` field.
        #[arg(long)]
        spec: String,
        /// Base seed for pixel flips; mask i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Dot,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::Table,
            Format::Json => ReportFormat::Json,
            Format::Dot => ReportFormat::Dot,
        }
    }
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Concern id or name.
    #[arg(long)]
    concern: Option<String>,
    /// Life-cycle stage id or name.
    #[arg(long)]
    stage: Option<String>,
    /// System component id or name.
    #[arg(long)]
    component: Option<String>,
    /// Satisfied, Violated, Pending, Error or NotApplicable.
    #[arg(long)]
    status: Option<String>,
}

#[derive(Debug, Args)]
struct EvidenceArgs {
    /// Evidence bundle to append the result to (created if missing).
    #[arg(long, requires_all = ["landscape", "vr"])]
    out: Option<PathBuf>,
    /// Landscape whose fingerprint the record carries.
    #[arg(long)]
    landscape: Option<PathBuf>,
    /// Requirement the record evidences.
    #[arg(long)]
    vr: Option<String>,
    /// Dataset ids the result is bound to; defaults to the requirement's.
    #[arg(long = "dataset")]
    datasets: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum MetricCommand {
    /// Mean IoU over mask pairs matched by file name.
    Miou {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[command(flatten)]
        evidence: EvidenceArgs,
    },
    /// Absolute difference of two performance values.
    Gap {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[command(flatten)]
        evidence: EvidenceArgs,
    },
    /// Activation-distribution distance between two activation tables.
    Nap {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Layer the activations were captured at.
        #[arg(long, default_value = "")]
        layer: String,
        #[command(flatten)]
        evidence: EvidenceArgs,
    },
    /// Flag instances whose observed label has low predicted probability.
    Clm {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        evidence: EvidenceArgs,
    },
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Failure {
    message: String,
    code: i32,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            message: e.to_string(),
            code: EXIT_USAGE,
        }
    }
}

type CmdResult = Result<(String, i32), Failure>;

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: EXIT_USAGE,
    }
}

/// Runs one invocation. `args` includes the program name; `now` is the
/// value of [`NOW_VAR`], if set.
pub fn run<I, T>(args: I, now: Option<&str>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    stderr: text,
                    code: EXIT_USAGE,
                    ..Output::default()
                }
            } else {
                Output {
                    stdout: text,
                    code: EXIT_OK,
                    ..Output::default()
                }
            };
        }
    };
    let result = clock(now).and_then(|now| match cli.command {
        Command::Validate { landscape } => validate(&landscape),
        Command::Evaluate {
            landscape,
            evidence,
            filter,
            format,
        } => cmd_evaluate(&landscape, &evidence, filter, format, now),
        Command::Coverage { landscape, format } => cmd_coverage(&landscape, format),
        Command::Metric { metric } => cmd_metric(metric, now),
        Command::Perturb {
            images,
            masks,
            spec,
            seed,
            out,
        } => cmd_perturb(&images, masks.as_deref(), &spec, seed, &out),
        Command::AugmentLabels { masks, spec, seed, out } => cmd_augment(&masks, &spec, seed, &out),
    });
    match result {
        Ok((stdout, code)) => Output {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(f) => Output {
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
            code: f.code,
        },
    }
}

fn clock(now: Option<&str>) -> Result<DateTime<Utc>, Failure> {
    match now {
        Some(s) => parse_timestamp(s).ok_or_else(|| fail(format!("{NOW_VAR}=`{s}` is not an RFC 3339 UTC timestamp"))),
        None => Ok(Utc::now().trunc_subsecs(0)),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| fail(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_landscape(path: &Path) -> Result<Landscape, Failure> {
    parse_landscape(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn validate(path: &Path) -> CmdResult {
    let l = load_landscape(path)?;
    let gaps = coverage(&l);
    let mut out = format!(
        "valid, {} coverage gap{}\n",
        gaps.len(),
        if gaps.len() == 1 { "" } else { "s" }
    );
    out.push_str(&format!(
        "{}: {} concerns, {} goals, {} requirements, {} mitigation measures\nfingerprint {}\n",
        l.name(),
        l.concerns().len(),
        l.goals().len(),
        l.vrs().len(),
        l.mitigation_measures().len(),
        l.fingerprint()
    ));
    for g in &gaps {
        out.push_str(&format!("gap: {g}\n"));
    }
    Ok((out, if gaps.is_empty() { EXIT_OK } else { EXIT_INCOMPLETE }))
}

/// Exit code law: any Violated -> 1, else any Pending/Error -> 2, else 0.
pub fn exit_code(worst: Option<VerdictStatus>) -> i32 {
    match worst {
        Some(VerdictStatus::Violated) => EXIT_VIOLATED,
        Some(VerdictStatus::Pending | VerdictStatus::Error) => EXIT_INCOMPLETE,
        Some(VerdictStatus::Satisfied) | None => EXIT_OK,
    }
}

fn cmd_evaluate(landscape: &Path, evidence: &Path, f: FilterArgs, format: Format, now: DateTime<Utc>) -> CmdResult {
    let l = load_landscape(landscape)?;
    let bundle = parse_evidence(&read(evidence)?).map_err(|e| fail(format!("{}: {e}", evidence.display())))?;
    let report = evaluate(&l, &bundle, &format_timestamp(&now));
    let filter = Filter {
        concern: f.concern,
        stage: f.stage,
        component: f.component,
        status: f.status,
    };
    let view = apply_filter(&report, &filter)?;
    Ok((serialize_report(&view, format.into()), exit_code(view.worst_status())))
}

fn cmd_coverage(landscape: &Path, format: Format) -> CmdResult {
    let l = load_landscape(landscape)?;
    let gaps = coverage(&l);
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&gaps)?;
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s: String = gaps.iter().map(|g| format!("{}\t{}\n", g.kind, g.subject)).collect();
            s.push_str(&format!("{} coverage gaps\n", gaps.len()));
            s
        }
        Format::Dot => return Err(fail("coverage supports --format table or json")),
    };
    Ok((text, if gaps.is_empty() { EXIT_OK } else { EXIT_INCOMPLETE }))
}

/// `*.grid` files of a directory, sorted by file name.
fn grid_files(dir: &Path) -> Result<Vec<(String, LabeledGrid)>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| fail(format!("{}: {e}", dir.display())))?;
    let mut names = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "grid") {
            names.push(path.file_name().expect("has extension").to_string_lossy().into_owned());
        }
    }
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let path = dir.join(&n);
            let grid = read_grid(&read(&path)?).map_err(|e| fail(format!("{}: {e}", path.display())))?;
            Ok((n, grid))
        })
        .collect()
}

struct MetricRun {
    metric: MetricId,
    value: f64,
    config_note: String,
    warnings: Vec<String>,
    extra: Option<EvidencePayload>,
    summary: String,
}

fn default_datasets(req: &Requirement, run: &MetricRun) -> Option<Vec<String>> {
    let two_sided = laisc_core::io::evidence::is_gap_note(&run.config_note);
    match req {
        Requirement::MetricThreshold { dataset_id, .. } | Requirement::FlagResolution { dataset_id, .. } if !two_sided => {
            Some(vec![dataset_id.clone()])
        }
        Requirement::MetricGap {
            dataset_id_a,
            dataset_id_b,
            ..
        } if two_sided => Some(vec![dataset_id_a.clone(), dataset_id_b.clone()]),
        _ => None,
    }
}

fn append_evidence(args: &EvidenceArgs, mut run: MetricRun, now: DateTime<Utc>) -> CmdResult {
    let mut out = run.summary.clone();
    let Some(path) = &args.out else {
        return Ok((out, EXIT_OK));
    };
    let landscape = load_landscape(args.landscape.as_deref().expect("clap requires --landscape"))?;
    let vr_id = args.vr.as_deref().expect("clap requires --vr");
    let vr = landscape
        .vr(vr_id)
        .ok_or_else(|| fail(format!("requirement `{vr_id}` is not in the landscape")))?;
    if let Requirement::MetricGap { metric_id, .. } = &vr.requirement {
        if run.metric == MetricId::Gap {
            run.metric = *metric_id;
        }
    }
    let datasets = if args.datasets.is_empty() {
        default_datasets(&vr.requirement, &run)
            .ok_or_else(|| fail(format!("requirement `{vr_id}` does not determine the dataset; pass --dataset")))?
    } else {
        args.datasets.clone()
    };
    for d in &datasets {
        if !landscape.datasets().contains_key(d) {
            return Err(fail(format!("dataset `{d}` is not in the landscape manifest")));
        }
    }
    let mut bundle = if path.exists() {
        parse_evidence(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))?
    } else {
        EvidenceBundle::new("laisc")
    };
    let mut payloads = vec![EvidencePayload::MetricResult {
        metric_id: run.metric,
        dataset_ids: datasets.clone(),
        value: run.value,
        config_note: run.config_note,
        warnings: run.warnings,
    }];
    if let Some(EvidencePayload::FlagResolutionLog { flagged_ids, entries, .. }) = run.extra {
        payloads.push(EvidencePayload::FlagResolutionLog {
            dataset_id: datasets[0].clone(),
            flagged_ids,
            entries,
        });
    }
    for payload in payloads {
        let id = bundle.next_record_id();
        out.push_str(&format!("appended {id} ({}) for {vr_id} to {}\n", payload.kind_name(), path.display()));
        bundle.push(EvidenceRecord {
            id,
            vr_id: vr_id.to_string(),
            landscape_fingerprint: landscape.fingerprint().to_string(),
            timestamp: now,
            payload,
        })?;
    }
    write(path, &serialize_evidence(&bundle))?;
    Ok((out, EXIT_OK))
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn cmd_metric(cmd: MetricCommand, now: DateTime<Utc>) -> CmdResult {
    match cmd {
        MetricCommand::Miou { pred, truth, evidence } => {
            let preds = grid_files(&pred)?;
            let truths = grid_files(&truth)?;
            let pred_names: Vec<&str> = preds.iter().map(|(n, _)| n.as_str()).collect();
            let truth_names: Vec<&str> = truths.iter().map(|(n, _)| n.as_str()).collect();
            if pred_names != truth_names {
                return Err(fail(format!(
                    "prediction and ground-truth files differ: {pred_names:?} vs {truth_names:?}"
                )));
            }
            let p: Vec<LabeledGrid> = preds.into_iter().map(|(_, g)| g).collect();
            let t: Vec<LabeledGrid> = truths.into_iter().map(|(_, g)| g).collect();
            let value = miou(&p, &t)?;
            let m = Measurement::new(value, p.len(), DEFAULT_MIN_SAMPLES);
            let mut summary = format!("miou {} over {} pairs\n", fmt6(value), p.len());
            for w in &m.warnings {
                summary.push_str(&format!("warning: {w}\n"));
            }
            let run = MetricRun {
                metric: MetricId::Miou,
                value,
                config_note: format!("pairs={}", p.len()),
                warnings: m.warnings,
                extra: None,
                summary,
            };
            append_evidence(&evidence, run, now)
        }
        MetricCommand::Gap { a, b, evidence } => {
            let value = performance_gap(a, b)?;
            let run = MetricRun {
                metric: MetricId::Gap,
                value,
                config_note: "gap".into(),
                warnings: vec![],
                extra: None,
                summary: format!("gap {}\n", fmt6(value)),
            };
            append_evidence(&evidence, run, now)
        }
        MetricCommand::Nap { a, b, layer, evidence } => {
            let ta = read_activations(&read(&a)?).map_err(|e| fail(format!("{}: {e}", a.display())))?;
            let tb = read_activations(&read(&b)?).map_err(|e| fail(format!("{}: {e}", b.display())))?;
            let value = nap_distance(&ta, &tb)?;
            let n = ta.rows().len().min(tb.rows().len());
            let m = Measurement::new(value, n, DEFAULT_MIN_SAMPLES);
            let mut summary = format!("nap_distance {} over {} neurons\n", fmt6(value), ta.num_neurons());
            for w in &m.warnings {
                summary.push_str(&format!("warning: {w}\n"));
            }
            let run = MetricRun {
                metric: MetricId::NapDistance,
                value,
                config_note: if layer.is_empty() { "gap".into() } else { format!("gap; layer={layer}") },
                warnings: m.warnings,
                extra: None,
                summary,
            };
            append_evidence(&evidence, run, now)
        }
        MetricCommand::Clm {
            probs,
            threshold,
            evidence,
        } => {
            let t = read_prob_table(&read(&probs)?).map_err(|e| fail(format!("{}: {e}", probs.display())))?;
            let flags = clm_flags(&t, threshold)?;
            let n = t.rows().len();
            let value = if n == 0 { 0.0 } else { flags.flagged.len() as f64 / n as f64 };
            let mut summary = format!("clm_flags {} of {} instances below {}\n", flags.flagged.len(), n, threshold);
            for id in &flags.flagged {
                summary.push_str(&format!("flagged {id}\n"));
            }
            summary.push_str("confident joint (rows observed, columns estimated):\n");
            for row in &flags.confident_joint {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                summary.push_str(&format!("  {}\n", cells.join(" ")));
            }
            let run = MetricRun {
                metric: MetricId::ClmFlags,
                value,
                config_note: format!("threshold={threshold}; flagged={}", flags.flagged.len()),
                warnings: vec![],
                extra: Some(EvidencePayload::FlagResolutionLog {
                    dataset_id: String::new(),
                    flagged_ids: flags.flagged,
                    entries: vec![],
                }),
                summary,
            };
            append_evidence(&evidence, run, now)
        }
    }
}

fn parse_numbers<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(fail(format!("{what} expects {n} comma-separated values, got `{s}`")));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| fail(format!("{what}: cannot parse `{p}`"))))
        .collect()
}

fn parse_perturbation(spec: &str, seed: u64) -> Result<PerturbationSpec, Failure> {
    if spec.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(spec)?);
    }
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match name {
        "brightness" => PerturbationSpec::BrightnessShift {
            delta: parse_numbers(arg, 1, name)?[0],
        },
        "contrast" => PerturbationSpec::ContrastScale {
            factor: parse_numbers(arg, 1, name)?[0],
        },
        "noise" => PerturbationSpec::GaussianNoise {
            sigma: parse_numbers(arg, 1, name)?[0],
            seed,
        },
        "occlusion" => {
            let v: Vec<usize> = parse_numbers(arg, 4, name)?;
            PerturbationSpec::OcclusionPatch {
                x: v[0],
                y: v[1],
                w: v[2],
                h: v[3],
            }
        }
        "flip" => PerturbationSpec::HorizontalFlip,
        "rotate90" => PerturbationSpec::Rotate90 {
            k: parse_numbers(arg, 1, name)?[0],
        },
        other => return Err(fail(format!("unknown perturbation `{other}`"))),
    })
}

fn parse_augmentation(spec: &str, seed: u64) -> Result<LabelAugmentationSpec, Failure> {
    if spec.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(spec)?);
    }
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match name {
        "flip" => LabelAugmentationSpec::RandomPixelFlip {
            rate: parse_numbers(arg, 1, name)?[0],
            seed,
        },
        "dilate" => LabelAugmentationSpec::MaskDilate {
            radius: parse_numbers(arg, 1, name)?[0],
        },
        "erode" => LabelAugmentationSpec::MaskErode {
            radius: parse_numbers(arg, 1, name)?[0],
        },
        "translate" => {
            let v: Vec<i64> = parse_numbers(arg, 2, name)?;
            LabelAugmentationSpec::MaskTranslate { dx: v[0], dy: v[1] }
        }
        other => return Err(fail(format!("unknown label augmentation `{other}`"))),
    })
}

#[derive(Serialize)]
struct ManifestEntry<T> {
    file: String,
    spec: T,
}

#[derive(Serialize)]
struct Manifest<T> {
    command: &'static str,
    input: String,
    seed: u64,
    files: Vec<ManifestEntry<T>>,
}

fn write_manifest<T: Serialize>(out: &Path, manifest: &Manifest<T>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    write(&out.join("manifest.json"), &text)
}

fn with_seed(spec: &PerturbationSpec, seed: u64) -> PerturbationSpec {
    match spec {
        PerturbationSpec::GaussianNoise { sigma, .. } => PerturbationSpec::GaussianNoise { sigma: *sigma, seed },
        other => other.clone(),
    }
}

fn cmd_perturb(images: &Path, masks: Option<&Path>, spec: &str, seed: u64, out: &Path) -> CmdResult {
    let base = parse_perturbation(spec, seed)?;
    let base_seed = match base {
        PerturbationSpec::GaussianNoise { seed, .. } => seed,
        _ => seed,
    };
    let imgs = grid_files(images)?;
    let msks = match masks {
        Some(dir) => {
            let m = grid_files(dir)?;
            let a: Vec<&str> = imgs.iter().map(|(n, _)| n.as_str()).collect();
            let b: Vec<&str> = m.iter().map(|(n, _)| n.as_str()).collect();
            if a != b {
                return Err(fail(format!("image and mask files differ: {a:?} vs {b:?}")));
            }
            Some(m)
        }
        None => None,
    };
    let mut files = Vec::new();
    let mut written = Vec::new();
    for (i, (name, image)) in imgs.iter().enumerate() {
        let spec = with_seed(&base, base_seed.wrapping_add(i as u64));
        let mask = match &msks {
            Some(m) => m[i].1.clone(),
            None => LabeledGrid::filled(image.height(), image.width(), 0)?,
        };
        let (img2, mask2) = perturb(image, &mask, &spec).map_err(|e| fail(format!("{name}: {e}")))?;
        written.push((format!("images/{name}"), write_grid(&img2)));
        if msks.is_some() {
            written.push((format!("masks/{name}"), write_grid(&mask2)));
        }
        files.push(ManifestEntry { file: name.clone(), spec });
    }
    for (rel, text) in &written {
        write(&out.join(rel), text)?;
    }
    write_manifest(
        out,
        &Manifest {
            command: "perturb",
            input: images.display().to_string(),
            seed: base_seed,
            files,
        },
    )?;
    Ok((format!("perturbed {} images into {}\n", imgs.len(), out.display()), EXIT_OK))
}

fn cmd_augment(masks: &Path, spec: &str, seed: u64, out: &Path) -> CmdResult {
    let base = parse_augmentation(spec, seed)?;
    let base_seed = match base {
        LabelAugmentationSpec::RandomPixelFlip { seed, .. } => seed,
        _ => seed,
    };
    let msks = grid_files(masks)?;
    let mut files = Vec::new();
    let mut written = Vec::new();
    for (i, (name, mask)) in msks.iter().enumerate() {
        let spec = match &base {
            LabelAugmentationSpec::RandomPixelFlip { rate, .. } => LabelAugmentationSpec::RandomPixelFlip {
                rate: *rate,
                seed: base_seed.wrapping_add(i as u64),
            },
            other => other.clone(),
        };
        let m2 = augment_labels(mask, &spec).map_err(|e| fail(format!("{name}: {e}")))?;
        written.push((format!("masks/{name}"), write_grid(&m2)));
        files.push(ManifestEntry { file: name.clone(), spec });
    }
    for (rel, text) in &written {
        write(&out.join(rel), text)?;
    }
    write_manifest(
        out,
        &Manifest {
            command: "augment-labels",
            input: masks.display().to_string(),
            seed: base_seed,
            files,
        },
    )?;
    Ok((format!("augmented {} masks into {}\n", msks.len(), out.display()), EXIT_OK))
}
