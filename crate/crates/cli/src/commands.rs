use std::fs;
use std::path::Path;

use plscq::analysis::{
    exact_distortion, high_rate_distortion, optimize_threshold, run_sweep,
    support_threshold_formula, CompanderSupport, SweepOptions,
};
use plscq::codec::{
    dequantize_file, generate_gaussian, monte_carlo_sqnr, quantize_file, write_samples,
};
use plscq::compressor::compressor_curve;
use plscq::fsutil::write_atomic;
use plscq::{build_codebook, Codebook, Error, Objective, QuantizerConfig, Result, SampleFormat};
use serde_json::json;

use crate::{
    Cli, Command, CurveArgs, DecodeArgs, DesignArgs, EvalArgs, GenerateArgs, MethodArg,
    ObjectiveArg, QuantizeArgs, SweepArgs,
};

/// Human-readable rounding: `db` decimals for decibels, two more for
/// thresholds.
#[derive(Clone, Copy)]
struct Precision {
    db: usize,
}

impl Precision {
    fn db(self, v: f64) -> String {
        format!("{v:.*}", self.db)
    }

    fn x(self, v: f64) -> String {
        format!("{v:.*}", self.db + 2)
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let p = Precision { db: cli.precision };
    match &cli.command {
        Command::Design(a) => design(a, p),
        Command::Eval(a) => eval(a, p),
        Command::Sweep(a) => sweep(a, p),
        Command::CompressCurve(a) => compress_curve(a),
        Command::Quantize(a) => quantize(a),
        Command::Decode(a) => decode(a),
        Command::Generate(a) => generate(a),
    }
}

fn objective(arg: ObjectiveArg) -> Objective {
    match arg {
        ObjectiveArg::Highrate => Objective::HighRateFormula,
        ObjectiveArg::Exact => Objective::ExactClosedForm,
    }
}

fn format_of(text: bool) -> SampleFormat {
    if text {
        SampleFormat::Text
    } else {
        SampleFormat::Binary
    }
}

fn load_codebook(path: &Path) -> Result<Codebook> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        offset: 0,
        source,
    })?;
    Codebook::from_json(&text)
}

fn design(a: &DesignArgs, p: Precision) -> Result<()> {
    let x_max = if let Some(x) = a.support.xmax {
        x
    } else if a.support.xmax_formula {
        support_threshold_formula(a.levels)?
    } else {
        optimize_threshold(a.levels, a.segments, objective(a.objective))?.x_max
    };
    let codebook = build_codebook(&QuantizerConfig::new(a.levels, a.segments, x_max)?)?;
    write_atomic(&a.out, codebook.to_json().as_bytes())?;

    let cells: Vec<String> = codebook
        .layout()
        .cells_per_segment
        .iter()
        .map(u32::to_string)
        .collect();
    println!(
        "N={} L={} x_max={} cells=[{}] -> {}",
        a.levels,
        a.segments,
        p.x(x_max),
        cells.join(","),
        a.out.display()
    );
    Ok(())
}

fn eval(a: &EvalArgs, p: Precision) -> Result<()> {
    let codebook = load_codebook(&a.codebook)?;
    let mut reports = Vec::new();
    if matches!(a.method, MethodArg::Highrate | MethodArg::Both) {
        reports.push(high_rate_distortion(&codebook));
    }
    if matches!(a.method, MethodArg::Exact | MethodArg::Both) {
        reports.push(exact_distortion(&codebook));
    }
    let mc =
        a.mc.map(|count| monte_carlo_sqnr(&codebook, a.seed, count))
            .transpose()?;

    let cfg = codebook.config();
    let mc_json = match &mc {
        Some(stats) => {
            let mut v = serde_json::to_value(stats)?;
            v["seed"] = json!(a.seed);
            v
        }
        None => serde_json::Value::Null,
    };
    let doc = json!({
        "N": cfg.levels(),
        "L": cfg.segments(),
        "x_max": cfg.x_max(),
        "reports": reports,
        "monte_carlo": mc_json,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);

    let mut line = format!(
        "N={} L={} x_max={}",
        cfg.levels(),
        cfg.segments(),
        p.x(cfg.x_max())
    );
    for r in &reports {
        line.push_str(&format!(" {}={} dB", r.method, p.db(r.sqnr_db)));
    }
    if let Some(stats) = mc {
        line.push_str(&format!(
            " MonteCarlo({} samples, seed {})={} dB",
            stats.count,
            a.seed,
            p.db(stats.sqnr_db)
        ));
    }
    eprintln!("{line}");
    Ok(())
}

fn parse_baseline(choice: &str, levels: u32) -> Result<CompanderSupport> {
    match choice {
        "unbounded" => Ok(CompanderSupport::Unbounded),
        "formula" => Ok(CompanderSupport::Threshold(support_threshold_formula(
            levels,
        )?)),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x > 0.0)
            .map(CompanderSupport::Threshold)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "--baseline must be `unbounded`, `formula` or a positive number (got {other:?})"
                ))
            }),
    }
}

fn sweep(a: &SweepArgs, p: Precision) -> Result<()> {
    let options = SweepOptions {
        objective: objective(a.objective),
        baseline: parse_baseline(&a.baseline, a.levels)?,
        include_uniform: a.uniform,
    };
    let result = run_sweep(a.levels, &a.segments_list, &options)?;
    let csv = result.to_csv();
    let json = a.json_out.as_ref().map(|_| result.to_json());
    write_atomic(&a.out, csv.as_bytes())?;
    if let (Some(path), Some(json)) = (&a.json_out, json) {
        write_atomic(path, json.as_bytes())?;
    }

    let base = result.baseline().map(|r| r.report.sqnr_db);
    println!("N={} objective={}", a.levels, options.objective);
    for r in &result.rows {
        let l = r
            .segments
            .map(|l| format!("L={l}"))
            .unwrap_or_else(|| "-".into());
        let x = if r.x_max.is_finite() {
            p.x(r.x_max)
        } else {
            "inf".into()
        };
        let gap = match base {
            Some(b) if r.segments.is_some() => format!("  gap={} dB", p.db(b - r.report.sqnr_db)),
            _ => String::new(),
        };
        println!(
            "{l:<5} {:<18} x_max={x:<8} SQNR={} dB{gap}",
            r.variant.to_string(),
            p.db(r.report.sqnr_db)
        );
    }
    Ok(())
}

fn compress_curve(a: &CurveArgs) -> Result<()> {
    let rows = compressor_curve(a.segments, a.xmax, a.points)?;
    let mut csv = String::from("x,c_optimal,c_piecewise\n");
    for [x, c_opt, c_pw] in rows {
        csv.push_str(&format!("{x},{c_opt},{c_pw}\n"));
    }
    write_atomic(&a.out, csv.as_bytes())
}

fn quantize(a: &QuantizeArgs) -> Result<()> {
    let codebook = load_codebook(&a.codebook)?;
    let stats = quantize_file(&codebook, &a.input, &a.output, format_of(a.text))?;
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}

fn decode(a: &DecodeArgs) -> Result<()> {
    let codebook = load_codebook(&a.codebook)?;
    let count = dequantize_file(&codebook, &a.input, &a.output, format_of(a.text))?;
    println!("{}", json!({ "count": count }));
    Ok(())
}

fn generate(a: &GenerateArgs) -> Result<()> {
    if a.count == 0 {
        return Err(Error::InvalidArgument("--count must be at least 1".into()));
    }
    let samples: Vec<f64> = generate_gaussian(a.seed, a.count).collect();
    write_samples(&a.output, &samples, format_of(a.text))
}
