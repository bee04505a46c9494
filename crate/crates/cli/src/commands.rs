use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tokenlink::pipeline::{calibrate_threshold, simulate_bler, table_from_thresholds};
use tokenlink::{
    assets, evaluate_information_gradient, load_image, save_image, train_codebook, zeroout, BudgetFormula,
    ChannelParams, Codebook, DctTokenizer, DctTokenizerConfig, Error, ImageF64, McsChoice, McsTable, PatchDataset,
    Pipeline, PipelineConfig, SweepAxis, TinyAutoencoder, TrainConfig, TransmissionReport, TruncationSampling,
    TurboCode, TurboConfig,
};

use crate::settings::{parse_list, Settings};
use crate::{
    CodebookTrainArgs, EvalGradientArgs, LinkArgs, McsCalibrateArgs, SweepArgs, TrainZerooutArgs, TransmitArgs,
};

fn bits_per_symbol(name: &str) -> tokenlink::Result<u32> {
    match name.to_ascii_lowercase().as_str() {
        "bpsk" => Ok(1),
        "qpsk" => Ok(2),
        "16qam" => Ok(4),
        "64qam" => Ok(6),
        other => Err(Error::Config(format!("unknown modulation `{other}`"))),
    }
}

fn load_input(s: &Settings, link: &LinkArgs) -> Result<ImageF64> {
    if let Some(name) = s.maybe(link.bundled.clone(), "bundled")? {
        return assets::image(&name).ok_or_else(|| Error::Config(format!("no bundled image `{name}`")).into());
    }
    let path: PathBuf = s
        .maybe(link.input.clone(), "input")?
        .ok_or_else(|| Error::Config("either --input or --bundled is required".into()))?;
    Ok(load_image(&path)?)
}

fn build_pipeline(s: &Settings, link: &LinkArgs) -> Result<Pipeline<f64>> {
    let codebook = match s.maybe(link.codebook.clone(), "codebook")? {
        Some(p) => Codebook::load(p)?,
        None => assets::default_codebook(),
    };
    let modulation: Option<String> = s.maybe(link.modulation.clone(), "modulation")?;
    let rate: Option<String> = s.maybe(link.rate.clone(), "rate")?;
    let mcs = match (modulation, rate) {
        (Some(m), Some(r)) => McsChoice::Fixed {
            bits_per_symbol: bits_per_symbol(&m)?,
            rate: r.parse()?,
        },
        (None, None) => match s.maybe(link.mcs_table.clone(), "mcs-table")? {
            Some(p) => McsChoice::Table(McsTable::load(p)?),
            None => McsChoice::Table(McsTable::default_table()),
        },
        _ => return Err(Error::Config("--modulation and --rate go together".into()).into()),
    };
    let noiseless = link.noiseless || s.get::<bool>("noiseless")?.unwrap_or(false);
    let seed = s.pick(link.seed, "seed", 0)?;
    let channel = if noiseless {
        ChannelParams {
            seed,
            ..ChannelParams::noiseless()
        }
    } else {
        ChannelParams::awgn(s.pick(link.snr, "snr", 6.0)?, seed)
    };
    let formula = match s.maybe(link.formula.clone(), "formula")?.as_deref() {
        None | Some("consistent") => BudgetFormula::Consistent,
        Some("modulation-in-denominator") => BudgetFormula::ModulationInDenominator,
        Some(other) => return Err(Error::Config(format!("unknown budget formula `{other}`")).into()),
    };
    let turbo = TurboConfig {
        iterations: s.pick(link.iterations, "iterations", TurboConfig::default().iterations)?,
        ..TurboConfig::default()
    };
    let cfg = PipelineConfig {
        tokenizer: DctTokenizerConfig::default(),
        target_cbr: s.pick(link.target_cbr, "target-cbr", 1.0 / 256.0)?,
        formula,
        turbo,
        mcs,
        channel,
    };
    Ok(Pipeline::new(cfg, codebook)?)
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn report_lines(r: &TransmissionReport) -> String {
    let fields: [(&str, String); 20] = [
        ("height", r.height.to_string()),
        ("width", r.width.to_string()),
        ("patches", r.patches.to_string()),
        ("snr_db", r.snr_db.to_string()),
        ("target_cbr", r.target_cbr.to_string()),
        ("cbr_actual", r.cbr_actual.to_string()),
        ("mcs", r.mcs.clone()),
        ("tokens_sent", r.tokens_sent.to_string()),
        ("tokens_budget", r.tokens_budget.to_string()),
        ("info_bits", r.info_bits.to_string()),
        ("coded_bits", r.coded_bits.to_string()),
        ("symbols", r.symbols.to_string()),
        ("pre_fec_bit_errors", r.pre_fec_bit_errors.to_string()),
        ("post_fec_bit_errors", r.post_fec_bit_errors.to_string()),
        ("pre_fec_ber", r.pre_fec_ber.to_string()),
        ("post_fec_ber", r.post_fec_ber.to_string()),
        ("token_errors", r.token_errors.to_string()),
        ("psnr_db", r.psnr_db.to_string()),
        ("rate", r.rate.to_string()),
        ("elapsed_ms", format!("{:.1}", r.elapsed_ms)),
    ];
    fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub fn transmit(s: &Settings, a: TransmitArgs) -> Result<()> {
    let pipeline = build_pipeline(s, &a.link)?;
    let img = load_input(s, &a.link)?;
    let (out, report) = pipeline.transmit(&img)?;
    if let Some(p) = s.maybe(a.output, "output")? {
        save_image::<f64>(&out, &p)?;
    }
    let text = report_lines(&report);
    print!("{text}");
    if let Some(p) = s.maybe(a.report, "report")? {
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

pub fn sweep(s: &Settings, a: SweepArgs) -> Result<()> {
    let pipeline = build_pipeline(s, &a.link)?;
    let img = load_input(s, &a.link)?;
    let values: Vec<f64> = parse_list(&s.pick(a.values, "values", "1,6,11".to_string())?)?;
    let axis = match s.pick(a.axis, "axis", "snr".to_string())?.as_str() {
        "snr" => SweepAxis::Snr(values),
        "cbr" => SweepAxis::Cbr(values),
        other => return Err(Error::Config(format!("unknown sweep axis `{other}`")).into()),
    };
    let rows = tokenlink::sweep(&pipeline, &img, &axis, s.pick(a.trials, "trials", 1)?)?;
    let csv: Option<PathBuf> = s.maybe(a.csv, "csv")?;
    tokenlink::write_csv(&rows, open_output(csv.as_ref())?)?;
    Ok(())
}

pub fn codebook_train(s: &Settings, a: CodebookTrainArgs) -> Result<()> {
    let images: Vec<ImageF64> = if a.images.is_empty() {
        assets::images().into_iter().map(|(_, img)| img).collect()
    } else {
        a.images.iter().map(load_image).collect::<tokenlink::Result<_>>()?
    };
    let k = s.pick(a.k, "k", 4096)?;
    let samples = s.pick(a.samples, "samples", 50_000)?;
    let seed = s.pick(a.seed, "seed", 1)?;
    let out: PathBuf = s.pick(a.out, "out", PathBuf::from("codebook.rtcb"))?;
    let cfg = DctTokenizerConfig::default();
    let tokenizer = DctTokenizer::<f64>::new(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::with_capacity(samples);
    while vectors.len() < samples {
        let img = &images[rng.random_range(0..images.len())];
        let r = rng.random_range(0..=img.height().saturating_sub(cfg.patch_height));
        let c = rng.random_range(0..=img.width().saturating_sub(cfg.patch_width));
        let crop = img.crop_replicate(r, c, cfg.patch_height, cfg.patch_width);
        let groups = tokenizer.groups(&crop)?;
        for i in 0..groups.count() {
            if vectors.len() < samples {
                vectors.push(groups.vector(i).to_vec());
            }
        }
    }
    let cb = train_codebook(&vectors, k, seed).context("codebook training")?;
    cb.save(&out)?;
    eprintln!(
        "wrote {} codewords of dimension {} to {}",
        cb.len(),
        cb.dim(),
        out.display()
    );
    Ok(())
}

fn load_patches(
    s: &Settings,
    blob: Option<PathBuf>,
    dir: Option<PathBuf>,
    patch_len: Option<usize>,
) -> Result<PatchDataset<f64>> {
    if let Some(d) = s.maybe(dir, "patch-dir")? {
        return Ok(PatchDataset::load_dir(d, s.pick(patch_len, "patch-len", 64)?)?);
    }
    Ok(match s.maybe(blob, "patches")? {
        Some(p) => PatchDataset::load(p)?,
        None => assets::default_patches(),
    })
}

pub fn train_zeroout(s: &Settings, a: TrainZerooutArgs) -> Result<()> {
    let seed = s.pick(a.seed, "seed", TrainConfig::default().seed)?;
    let data = match s.maybe(a.synthetic, "synthetic")? {
        Some(n) => {
            let rank = s.pick(a.rank, "rank", 48)?;
            zeroout::synthetic_low_rank_patches(n, 8, rank, s.pick(a.decay, "decay", 0.9)?, seed)?
        }
        None => load_patches(s, a.patches, a.patch_dir, a.patch_len)?,
    };
    if let Some(p) = s.maybe(a.save_patches, "save-patches")? {
        data.save(&p)?;
    }
    let tokens = s.pick(a.tokens, "tokens", 16)?;
    let token_dim = s.pick(a.token_dim, "token-dim", 4)?;
    let defaults = TrainConfig::default();
    let cfg = TrainConfig {
        key_count: s.pick(a.key_count, "key-count", defaults.key_count)?,
        batch_size: s.pick(a.batch_size, "batch-size", defaults.batch_size)?,
        learning_rate: s.pick(a.learning_rate, "learning-rate", defaults.learning_rate)?,
        steps: s.pick(a.steps, "steps", defaults.steps)?,
        seed,
        sampling: match s.pick(a.sampling, "sampling", "per-batch".to_string())?.as_str() {
            "per-sample" => TruncationSampling::PerSample,
            "per-batch" => TruncationSampling::PerBatch,
            other => return Err(Error::Config(format!("unknown truncation sampling `{other}`")).into()),
        },
    };
    let out: PathBuf = s.pick(a.out, "out", PathBuf::from("zeroout.rtae"))?;
    let mut model = TinyAutoencoder::<f64>::new(data.patch_len(), tokens, token_dim, cfg.seed)?;
    let losses = zeroout::train(&mut model, &data, &cfg)?;
    model.save(&out)?;
    let tail = losses.len().min(100);
    let mean = losses[losses.len() - tail..].iter().sum::<f64>() / tail.max(1) as f64;
    println!("steps={} final_loss_mean_last_{tail}={mean:.6}", losses.len());
    Ok(())
}

pub fn eval_gradient(s: &Settings, a: EvalGradientArgs) -> Result<()> {
    let model_path: PathBuf = s
        .maybe(a.model, "model")?
        .ok_or_else(|| Error::Config("--model is required".into()))?;
    let model = TinyAutoencoder::<f64>::load(&model_path)?;
    let data = load_patches(s, a.patches, None, None)?;
    let ts: Vec<usize> = parse_list(&s.pick(a.t, "t", "4,8,12,16".to_string())?)?;
    println!("t,mse");
    for (t, mse) in evaluate_information_gradient(&model, &data, &ts)? {
        println!("{t},{mse:.8}");
    }
    Ok(())
}

pub fn mcs_calibrate(s: &Settings, a: McsCalibrateArgs) -> Result<()> {
    let lo = s.pick(a.snr_min, "snr-min", -2.0)?;
    let hi = s.pick(a.snr_max, "snr-max", 16.0)?;
    let step = s.pick(a.snr_step, "snr-step", 0.5)?;
    let blocks = s.pick(a.blocks, "blocks", 200)?;
    let info_len = s.pick(a.info_len, "info-len", 1024)?;
    let target = s.pick(a.target_bler, "target-bler", 0.1)?;
    let seed = s.pick(a.seed, "seed", 1)?;
    if !(step > 0.0 && hi >= lo) {
        return Err(Error::Config("need snr-step > 0 and snr-max >= snr-min".into()).into());
    }
    let code = TurboCode::new(TurboConfig::default())?;
    let grid: Vec<f64> = (0..)
        .map(|i| lo + step * i as f64)
        .take_while(|&x| x <= hi + 1e-9)
        .collect();
    let mut candidates = Vec::new();
    for e in McsTable::default_table().entries() {
        let points = grid
            .iter()
            .map(|&snr| simulate_bler(&code, e.bits_per_symbol, e.rate, snr, info_len, blocks, seed))
            .collect::<tokenlink::Result<Vec<_>>>()?;
        for p in &points {
            eprintln!("{} snr={:.2} bler={:.4} ber={:.2e}", e.label, p.snr_db, p.bler, p.ber);
        }
        match calibrate_threshold(&points, target) {
            Some(th) => candidates.push((th, e.bits_per_symbol, e.rate, e.label.clone())),
            None => eprintln!("{}: BLER above {target} across the grid, dropped", e.label),
        }
    }
    if candidates.is_empty() {
        return Err(Error::Config("no scheme met the target BLER on the grid".into()).into());
    }
    let table = table_from_thresholds(&candidates)?;
    let out: Option<PathBuf> = s.maybe(a.out, "out")?;
    let mut w = open_output(out.as_ref())?;
    writeln!(
        w,
        "# calibrated: BLER <= {target} on {info_len}-bit blocks, {blocks} blocks per point"
    )?;
    for (th, _, _, label) in &candidates {
        writeln!(w, "# measured threshold {label}: {th} dB")?;
    }
    write!(w, "{}", table.to_text())?;
    w.flush()?;
    Ok(())
}
