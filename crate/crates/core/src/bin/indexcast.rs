use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use indexcast::dataio::{load_ohlc_csv, write_ohlc_csv, DATE_FORMAT};
use indexcast::harness::{
    emit_report, forecast_frame, load_model, run_experiment, save_model, synth_ohlc, ExperimentConfig, ModelBundle,
    ReportFormat, SynthConfig,
};
use indexcast::{Error, Result};

#[derive(Parser)]
#[command(name = "indexcast", version, about = "Stock index forecasting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate every configured model.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Forecast from every record of an OHLC csv with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Write a synthetic logistic-map OHLC series.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn run(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let result = run_experiment(&cfg)?;
    mkdir(&out.join("predictions"))?;
    mkdir(&out.join("models"))?;
    write(
        &out.join("report.csv"),
        &emit_report(&result.report, ReportFormat::Csv)?,
    )?;
    let mut text = emit_report(&result.report, ReportFormat::Text)?;
    for prep in &result.prepared {
        text.push_str(&format!(
            "{}: persistence test rmse {:.5}\n",
            prep.name,
            prep.persistence_rmse()?
        ));
    }
    write(&out.join("report.txt"), &text)?;
    for series in &result.predictions {
        write(
            &out.join("predictions")
                .join(format!("{}_{}.csv", series.dataset, series.model)),
            &series.to_csv(),
        )?;
    }
    for (trained, prep) in result
        .models
        .iter()
        .map(|t| (t, result.prepared.iter().find(|p| p.name == t.dataset)))
    {
        let prep = prep.expect("every model belongs to a prepared dataset");
        let bundle = ModelBundle {
            features: prep.features.clone(),
            target: prep.target,
            horizon: prep.horizon,
            scaler: prep.scaler.clone(),
            model: trained.model.clone(),
        };
        let name = format!("{}_{}.model", trained.dataset, trained.model.kind());
        save_model(&out.join("models").join(name), &bundle)?;
    }
    print!("{text}");
    Ok(())
}

fn predict(model: &Path, data: &Path) -> Result<()> {
    let bundle = load_model(model)?;
    let file = fs::File::open(data).map_err(|e| Error::io(data, e))?;
    let frame = load_ohlc_csv(file, "input")?;
    let rows = forecast_frame(&bundle, &frame)?;
    let mut out = String::from("date,predicted\n");
    for (d, v) in rows {
        out.push_str(&format!("{},{v}\n", d.format(DATE_FORMAT)));
    }
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn synth(n: usize, out: &Path, seed: u64) -> Result<()> {
    let frame = synth_ohlc(&SynthConfig::new(n, seed))?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        mkdir(dir)?;
    }
    let file = fs::File::create(out).map_err(|e| Error::io(out, e))?;
    write_ohlc_csv(&frame, file)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out, seed } => run(config, out, *seed),
        Command::Predict { model, data } => predict(model, data),
        Command::Synth { n, out, seed } => synth(*n, out, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
