//! The full experiment: synthetic OHLC series, four models, text report,
//! and a saved model reloaded to forecast the last few days.

use std::path::Path;

use indexcast::harness::{
    emit_report, forecast_frame, load_model, run_experiment, save_model, synth_ohlc, ExperimentConfig, ModelBundle,
    ReportFormat, SynthConfig,
};

fn main() -> indexcast::Result<()> {
    let config_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/synthetic.conf");
    let cfg = ExperimentConfig::from_file(&config_path)?;
    let out = run_experiment(&cfg)?;
    print!("{}", emit_report(&out.report, ReportFormat::Text)?);
    for prep in &out.prepared {
        println!("{}: persistence test rmse {:.5}", prep.name, prep.persistence_rmse()?);
    }

    let prep = &out.prepared[0];
    let anfis = out
        .models
        .iter()
        .find(|m| m.model.kind().name() == "anfis")
        .expect("anfis is configured");
    let bundle = ModelBundle {
        features: prep.features.clone(),
        target: prep.target,
        horizon: prep.horizon,
        scaler: prep.scaler.clone(),
        model: anfis.model.clone(),
    };
    let dir = std::env::temp_dir().join("indexcast-example");
    std::fs::create_dir_all(&dir).map_err(|e| indexcast::Error::io(&dir, e))?;
    let path = dir.join("anfis.model");
    save_model(&path, &bundle)?;

    let frame = synth_ohlc(&SynthConfig::new(1000, cfg.seed))?;
    let forecasts = forecast_frame(&load_model(&path)?, &frame)?;
    let close = frame
        .column(indexcast::dataio::Column::Close)
        .expect("synthetic frames have closes");
    println!("\nlast forecasts from {}:", path.display());
    for (i, (date, f)) in forecasts.iter().enumerate().skip(forecasts.len() - 5) {
        let next = close.get(i + 1).map_or("-".to_string(), |c| format!("{c:.2}"));
        println!("  {date}  forecast {f:.2}  next close {next}");
    }
    Ok(())
}
