use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rutnet::artifact::{with_path, ModelArtifact};
use rutnet::mixspec::parse_mix_spec;
use rutnet::pipeline::{evaluate_csv, generate_csv, train_from_csv, TrainOptions};
use rutnet::server::{serve, AppState};
use rutnet::{Error, Result};
use rutnet_core::dataset::SplitMode;
use rutnet_core::mixture::validate;
use rutnet_core::predict::{parse_values, predict_curve, sensitivity_sweep, value_label, Factor};
use rutnet_core::synth::SynthConfig;

const MIX_HELP: &str = "Mixture as comma-separated key=value pairs using the CSV column names.
Required: grade (e.g. 64-22) or htpg_c and ltpg_c, plus ac_pct and nmas_mm.
Optional: mix_type (Plant|Lab, default Plant), gradation (Dense|SMA, default Dense),
agg_type (Limestone|Granite, default Limestone), rap_pct, ras_pct, crc_pct (default 0).
Example: grade=46-34,ac_pct=5.9,nmas_mm=12.5,rap_pct=25,ras_pct=16.1,crc_pct=10";

#[derive(Parser)]
#[command(
    name = "rutnet",
    version,
    about = "Hamburg wheel-tracking rut-depth curves from asphalt mixture design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Row,
    Curve,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset drawn from the reference rutting model.
    Gen {
        #[arg(long, default_value_t = 50)]
        mixes: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Standard deviation of the measurement noise, mm.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model; also writes <OUT>.summary.json with the loss history.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "row")]
        split: SplitArg,
        /// Seeds the split, weight initialization and minibatch order.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        epochs: usize,
        #[arg(long, default_value_t = 10)]
        batch: usize,
        #[arg(long, default_value_t = 0.001)]
        lr: f64,
        #[arg(long, default_value_t = 50)]
        patience: usize,
        /// Hidden layer widths.
        #[arg(long, value_delimiter = ',', default_value = "64,64")]
        hidden: Vec<usize>,
    },
    /// Accuracy of a model over every row of a CSV.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Predicted curve as a pass,raw_mm,clamped_mm table.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, long_help = MIX_HELP)]
        mix: String,
        #[arg(long, allow_hyphen_values = true)]
        temp: f64,
        /// Comma-separated passes; 100..20000 step 100 when omitted.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<u32>>,
    },
    /// One-factor-at-a-time sweep: clamped rut depth per pass for each value.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, long_help = MIX_HELP)]
        mix: String,
        #[arg(long, allow_hyphen_values = true)]
        temp: f64,
        /// grade, htpg_c, ac_pct, rap_pct, ras_pct, crc_pct, nmas_mm, gradation, agg_type, mix_type or temp_c.
        #[arg(long)]
        factor: String,
        /// Comma-separated values, e.g. 40,46,50 or 58-28,64-22.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Default DC(T) fracture-energy threshold, J/m², for /api/psd.
        #[arg(long)]
        fe_threshold: Option<f64>,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| with_path(e, path))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| with_path(e, path))
}

fn summary_path(model: &Path) -> PathBuf {
    let mut name = model.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn warn_ranges(artifact: &ModelArtifact, mix: &rutnet_core::MixtureDesign, temp: f64) {
    for v in validate(mix, temp, &artifact.ranges) {
        eprintln!(
            "warning: {} = {} outside training range [{}, {}]",
            v.feature, v.value, v.min, v.max
        );
    }
}

fn run(command: Command) -> Result<()> {
    let mut out = io::stdout().lock();
    match command {
        Command::Gen {
            mixes,
            seed,
            points,
            noise,
            out: path,
        } => {
            let csv = generate_csv(&SynthConfig {
                n_mixes: mixes,
                points_per_curve: points,
                noise_std_mm: noise,
                seed,
            })?;
            match path {
                Some(p) => write(&p, csv.as_bytes())?,
                None => out.write_all(csv.as_bytes())?,
            }
        }
        Command::Train {
            data,
            out: path,
            split,
            seed,
            epochs,
            batch,
            lr,
            patience,
            hidden,
        } => {
            let opts = TrainOptions {
                split_mode: match split {
                    SplitArg::Row => SplitMode::Row,
                    SplitArg::Curve => SplitMode::Curve,
                },
                seed,
                max_epochs: epochs,
                batch_size: batch,
                learning_rate: lr,
                patience,
                hidden,
                ..TrainOptions::default()
            };
            let outcome = train_from_csv(&read(&data)?, &opts)?;
            write(&path, outcome.artifact.to_json().as_bytes())?;
            let mut summary = serde_json::to_string_pretty(&outcome.summary()).expect("summary serializes");
            summary.push('\n');
            write(&summary_path(&path), summary.as_bytes())?;
            let h = &outcome.history;
            writeln!(
                out,
                "best_epoch={} stopped_epoch={} best_validation_mse={}",
                h.best_epoch, h.stopped_epoch, h.best_validation_loss
            )?;
            for m in &outcome.artifact.provenance.evaluation.partitions {
                writeln!(
                    out,
                    "{}: n={} r2={} rmse_mm={} mae_mm={}",
                    m.partition,
                    m.n,
                    m.r2.map_or_else(|| "undefined".into(), |v| v.to_string()),
                    m.rmse_mm,
                    m.mae_mm
                )?;
            }
        }
        Command::Eval { model, data } => {
            let artifact = ModelArtifact::load(&model)?;
            let report = evaluate_csv(&artifact, &read(&data)?)?;
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            )?;
        }
        Command::Predict { model, mix, temp, grid } => {
            let mix = parse_mix_spec(&mix)?;
            let artifact = ModelArtifact::load(&model)?;
            warn_ranges(&artifact, &mix, temp);
            let curve = predict_curve(&artifact.model, &mix, temp, grid.as_deref())?;
            writeln!(out, "pass,raw_mm,clamped_mm")?;
            for ((pass, raw), clamped) in curve.grid.iter().zip(&curve.raw_mm).zip(&curve.clamped_mm) {
                writeln!(out, "{pass},{raw},{clamped}")?;
            }
        }
        Command::Sweep {
            model,
            mix,
            temp,
            factor,
            values,
        } => {
            let mix = parse_mix_spec(&mix)?;
            let factor: Factor = factor.parse()?;
            let texts: Vec<&str> = values.iter().map(String::as_str).collect();
            let values = parse_values(factor, &texts)?;
            let artifact = ModelArtifact::load(&model)?;
            warn_ranges(&artifact, &mix, temp);
            let result = sensitivity_sweep(&artifact.model, &mix, temp, factor, &values)?;
            let labels: Vec<String> = result.entries.iter().map(|e| value_label(factor, &e.value)).collect();
            writeln!(out, "pass,{}", labels.join(","))?;
            for (i, pass) in result.base.grid.iter().enumerate() {
                let row: Vec<String> = result
                    .entries
                    .iter()
                    .map(|e| e.curve.clamped_mm[i].to_string())
                    .collect();
                writeln!(out, "{pass},{}", row.join(","))?;
            }
        }
        Command::Serve {
            model,
            port,
            host,
            fe_threshold,
        } => {
            let artifact = ModelArtifact::load(&model)?;
            let addr = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            runtime.block_on(serve(AppState::new(artifact, fe_threshold), addr))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {message}", e.code());
            if matches!(e, Error::Usage(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
