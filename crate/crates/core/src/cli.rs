//! Command-line front end: `synth`, `track`, `train-tsn`, `eval`, `ablate`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::engine::{final_index, run_sequence_with, run_suite, RunOutput, Variant};
use crate::error::{Error, Result};
use crate::metrics::{compare_runs, curves_csv, evaluate, mean_report, EvalReport};
use crate::par::{self, Exec};
use crate::rng::XorShift64Star;
use crate::sequence::{
    encode_pgm, frame_file_name, read_results, read_sequence, write_atomic, write_results,
    write_sequence, Frame, SequenceDataset, TRUTH_FILE,
};
use crate::synth::{generate, suite_specs, ScenarioKind};
use crate::tsn::{self, RunSamples, TsnModel, DEFAULT_REG, DEFAULT_WINDOW};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mttrack", version, about = "Multi-trajectory single-object tracker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic sequence directories.
    Synth(SynthArgs),
    /// Track one sequence and write per-trajectory results.
    Track(TrackArgs),
    /// Train the trajectory scoring model on a suite.
    TrainTsn(TrainArgs),
    /// Score one results file against a sequence.
    Eval(EvalArgs),
    /// Compare every variant over a suite.
    Ablate(AblateArgs),
}

#[derive(Debug, Args, Default)]
pub struct ConfigArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. `--set delta1=0.4`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for pair in &self.overrides {
            cfg.set_pair(pair)?;
        }
        if let Some(v) = &self.variant {
            cfg.set("variant", v)?;
        }
        if let Some(m) = &self.model {
            cfg.model = Some(m.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.finalize()
    }
}

/// `all` or a comma-separated list of scenario kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct KindList(pub Vec<ScenarioKind>);

fn parse_kinds(s: &str) -> std::result::Result<KindList, String> {
    if s == "all" {
        return Ok(KindList(ScenarioKind::ALL.to_vec()));
    }
    s.split(',')
        .map(|k| k.trim().parse::<ScenarioKind>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()
        .map(KindList)
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// `all` or a comma-separated list of scenario kinds.
    #[arg(long, default_value = "all", value_parser = parse_kinds)]
    pub kinds: KindList,
    #[arg(long, default_value_t = crate::synth::DEFAULT_SUITE_PER_KIND)]
    pub per_kind: usize,
    #[arg(long, default_value_t = crate::synth::DEFAULT_SUITE_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Frames per sequence.
    #[arg(long, value_parser = clap::value_parser!(u64).range(10..))]
    pub length: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Sequence directory; falls back to `dataset` in the config.
    #[arg(long)]
    pub seq: Option<PathBuf>,
    /// Output directory; falls back to `output` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every attention map as `attention/NNNN.pgm`.
    #[arg(long)]
    pub dump_attention: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub suite: Option<PathBuf>,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_REG)]
    pub reg: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub seq: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::metrics::DEFAULT_PRESENCE_THRESHOLD)]
    pub presence_threshold: f64,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub suite: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Folds for cross-fitted selection when no model is given.
    #[arg(long, default_value_t = 2)]
    pub folds: usize,
    #[arg(long, default_value_t = DEFAULT_REG)]
    pub reg: f64,
    /// Also sweep delta1 over 0.3..=0.9 with delta2 fixed.
    #[arg(long)]
    pub delta_sweep: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Errors are reported on stderr as one
/// `error: kind=<kind> message=<json string>` line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            if !usage {
                return 0;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            report_error("usage", first.trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    par::init_from_env();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            exit_code(&e)
        }
    }
}

pub fn main() -> std::process::ExitCode {
    let code = run(std::env::args_os());
    std::process::ExitCode::from(code as u8)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn report_error(kind: &str, message: &str) {
    let quoted = serde_json::to_string(message).unwrap_or_else(|_| "\"\"".into());
    eprintln!("error: kind={kind} message={quoted}");
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => cmd_synth(&a),
        Command::Track(a) => cmd_track(&a),
        Command::TrainTsn(a) => cmd_train_tsn(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Ablate(a) => cmd_ablate(&a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn required(path: Option<&PathBuf>, fallback: Option<&PathBuf>, what: &str) -> Result<PathBuf> {
    path.or(fallback)
        .cloned()
        .ok_or_else(|| Error::Config(format!("no {what} given on the command line or in the config")))
}

/// Subdirectories of `dir` holding a truth file, in name order.
pub fn read_suite(dir: &Path) -> Result<Vec<SequenceDataset>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| Error::io(dir, e))?
            .path();
        if path.join(TRUTH_FILE).is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::Structure(format!("{}: no sequence directories", dir.display())));
    }
    let loaded = Exec::default().map(&dirs, |d| read_sequence(d));
    loaded.into_iter().collect()
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut specs = suite_specs(a.seed, a.per_kind, &a.kinds.0);
    if let Some(len) = a.length {
        specs.iter_mut().for_each(|s| s.length = len as usize);
    }
    create_dir(&a.out)?;
    let written: Vec<Result<PathBuf>> = Exec::default().map(&specs, |spec| {
        let d = generate(spec)?;
        let dir = a.out.join(&d.name);
        write_sequence(&d, &dir)?;
        Ok(dir)
    });
    let mut manifest = String::new();
    for (spec, dir) in specs.iter().zip(written) {
        let dir = dir?;
        let _ = writeln!(manifest, "{}={}", spec.name(), spec.seed);
        println!("{}", dir.display());
    }
    write_atomic(&a.out.join("manifest.txt"), manifest.as_bytes())
}

/// Final trajectory of a run: the fixed variants follow [`final_index`], the
/// TSN variant asks the model.
fn choose_final(variant: Variant, run: &RunOutput, d: &SequenceDataset, model: Option<&TsnModel>) -> usize {
    match (variant, model) {
        (Variant::Bs3tTsn, Some(m)) => {
            m.select(&RunSamples::new(&run.trajectories, d, run.memory.initial(), DEFAULT_WINDOW))
        }
        _ => final_index(variant, &run.trajectories),
    }
}

fn grid_frame(map: &crate::attention::AttentionMap, index: usize) -> Result<Frame> {
    let g = &map.values;
    Frame::new(g.width, g.height, g.values.iter().map(|&v| v as f32).collect(), index)
}

pub fn cmd_track(a: &TrackArgs) -> Result<()> {
    let cfg = a.config.resolve()?;
    let seq = required(a.seq.as_ref(), cfg.dataset.as_ref(), "sequence directory")?;
    let out = required(a.out.as_ref(), cfg.output.as_ref(), "output directory")?;
    let model = if cfg.variant == Variant::Bs3tTsn {
        Some(TsnModel::load(cfg.require_model()?)?)
    } else {
        None
    };
    let dataset = read_sequence(&seq)?;
    let run = run_sequence_with(&dataset, &cfg.tracker, a.dump_attention)?;
    create_dir(&out)?;
    for t in &run.trajectories {
        write_results(&t.results(), &out.join(format!("traj{}.trk", t.id)))?;
    }
    let k = choose_final(cfg.variant, &run, &dataset, model.as_ref());
    write_results(&run.trajectories[k].results(), &out.join("final.trk"))?;

    let mut manifest = cfg.to_text();
    let _ = writeln!(manifest, "sequence={}", dataset.name);
    let _ = writeln!(manifest, "frames={}", dataset.len());
    let _ = writeln!(manifest, "final=traj{}", run.trajectories[k].id);
    for t in &run.trajectories {
        let _ = writeln!(manifest, "mean_response.traj{}={}", t.id, t.mean_response());
    }
    for t in &run.trajectories {
        let tags: Vec<&str> = t.records.iter().map(|r| r.source.name()).collect();
        let _ = writeln!(manifest, "sources.traj{}={}", t.id, tags.join(","));
    }
    write_atomic(&out.join("manifest.txt"), manifest.as_bytes())?;

    if a.dump_attention {
        let dir = out.join("attention");
        create_dir(&dir)?;
        for (map, frame) in run.attention.iter().zip(&dataset.frames[1..]) {
            let img = grid_frame(map, frame.index)?;
            write_atomic(&dir.join(frame_file_name(frame.index)), &encode_pgm(&img))?;
        }
    }
    println!("{}", out.join("final.trk").display());
    Ok(())
}

fn samples_for(suite: &[SequenceDataset], runs: &[RunOutput]) -> Vec<RunSamples> {
    let pairs: Vec<(&SequenceDataset, &RunOutput)> = suite.iter().zip(runs).collect();
    Exec::default().map(&pairs, |(d, r)| {
        RunSamples::new(&r.trajectories, d, r.memory.initial(), DEFAULT_WINDOW)
    })
}

/// Runs every sequence with three trajectories.
fn beam_runs(suite: &[SequenceDataset], cfg: &RunConfig) -> Result<Vec<RunOutput>> {
    let mut tracker = cfg.tracker.clone();
    tracker.apply_variant(Variant::Bs3t);
    run_suite(suite, &tracker, Exec::default())
}

/// Seeded shuffle of `0..n`.
fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = XorShift64Star::new(seed);
    for i in (1..n).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        idx.swap(i, j);
    }
    idx
}

pub fn cmd_train_tsn(a: &TrainArgs) -> Result<()> {
    let cfg = a.config.resolve()?;
    let dir = required(a.suite.as_ref(), cfg.dataset.as_ref(), "suite directory")?;
    let suite = read_suite(&dir)?;
    let runs = beam_runs(&suite, &cfg)?;
    let samples = samples_for(&suite, &runs);

    if samples.len() >= 2 {
        let order = shuffled(samples.len(), cfg.seed);
        let (test, train) = order.split_at(samples.len() / 2);
        let model = tsn::train_on_runs(train.iter().map(|&i| &samples[i]), a.reg)?;
        let (mut pred, mut truth) = (Vec::new(), Vec::new());
        for &i in test {
            pred.extend(model.scores(&samples[i]));
            truth.extend(samples[i].quality.iter().copied());
        }
        println!("held_out_sequences={}", test.len());
        println!("held_out_pearson={:.4}", tsn::pearson(&pred, &truth));
    }
    let model = tsn::train_on_runs(&samples, a.reg)?;
    let windows: usize = samples.iter().map(|s| s.labelled().count()).sum();
    model.save(&a.out)?;
    println!("training_windows={windows}");
    println!("model={}", a.out.display());
    Ok(())
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&a.presence_threshold) {
        return Err(Error::Config(format!(
            "presence threshold {} must lie in [0, 1]",
            a.presence_threshold
        )));
    }
    let dataset = read_sequence(&a.seq)?;
    let pred = read_results(&a.results)?;
    let report = evaluate(&pred, &dataset, a.presence_threshold)?;
    write_report(&report, &a.out)?;
    println!(
        "success_auc={:.6} ao={:.6} sr_050={:.6} precision_at_20={:.6} max_gm={:.6}",
        report.success_auc, report.ao, report.sr_050, report.precision_at_20, report.max_gm
    );
    Ok(())
}

fn write_report(report: &EvalReport, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    write_atomic(&dir.join("curves.csv"), curves_csv(report).as_bytes())
}

/// Mean report for one fixed choice of trajectory per sequence.
fn pooled(suite: &[SequenceDataset], runs: &[RunOutput], picks: &[usize], thr: f64) -> Result<EvalReport> {
    let reports = suite
        .iter()
        .zip(runs)
        .zip(picks)
        .map(|((d, r), &k)| evaluate(&r.trajectories[k].results(), d, thr))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_report(&reports).expect("suite is not empty"))
}

pub fn cmd_ablate(a: &AblateArgs) -> Result<()> {
    let cfg = a.config.resolve()?;
    let dir = required(a.suite.as_ref(), cfg.dataset.as_ref(), "suite directory")?;
    let out = required(a.out.as_ref(), cfg.output.as_ref(), "output directory")?;
    let model = cfg.model.as_deref().map(TsnModel::load).transpose()?;
    let suite = read_suite(&dir)?;
    let runs = beam_runs(&suite, &cfg)?;
    let samples = samples_for(&suite, &runs);
    let learned = match &model {
        Some(m) => samples.iter().map(|s| m.select(s)).collect(),
        None => tsn::cross_fit_select(&samples, a.folds, a.reg)?,
    };

    let thr = cfg.presence_threshold;
    let mut named = Vec::new();
    let mut table = String::from("variant,ao,sr_050,success_auc,precision_at_20,max_gm\n");
    for v in Variant::ALL {
        let picks: Vec<usize> = match v {
            Variant::Bs3tTsn => learned.clone(),
            _ => runs.iter().map(|r| final_index(v, &r.trajectories)).collect(),
        };
        let r = pooled(&suite, &runs, &picks, thr)?;
        let _ = writeln!(
            table,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            v, r.ao, r.sr_050, r.success_auc, r.precision_at_20, r.max_gm
        );
        named.push((v.to_string(), r));
    }
    let cmp = compare_runs(&named)?;
    create_dir(&out)?;
    write_atomic(&out.join("variants.csv"), table.as_bytes())?;
    write_atomic(&out.join("comparison.csv"), cmp.to_csv().as_bytes())?;
    write_atomic(&out.join("deltas.csv"), cmp.deltas_csv().as_bytes())?;
    write_atomic(&out.join("comparison.json"), cmp.to_json().as_bytes())?;
    print!("{table}");

    if a.delta_sweep {
        let mut sweep = String::from("delta1,delta2,ao,sr_050,success_auc\n");
        for i in 3..=9 {
            let mut c = cfg.clone();
            c.tracker.delta1 = i as f64 / 10.0;
            c.tracker.validate()?;
            let runs = beam_runs(&suite, &c)?;
            let picks: Vec<usize> = runs.iter().map(|r| final_index(Variant::Bs3t, &r.trajectories)).collect();
            let r = pooled(&suite, &runs, &picks, thr)?;
            let _ = writeln!(
                sweep,
                "{:.1},{},{:.6},{:.6},{:.6}",
                c.tracker.delta1, c.tracker.delta2, r.ao, r.sr_050, r.success_auc
            );
        }
        write_atomic(&out.join("delta_sweep.csv"), sweep.as_bytes())?;
        print!("{sweep}");
    }
    Ok(())
}
