use proptest::prelude::*;
use tokenlink::image::{decode_ppm, encode_ppm};
use tokenlink::{
    assets, derive_seed, load_image, save_image, select_tokens, sweep, write_csv, zero_pad, ChannelParams, CodeRate,
    Error, ImageF64, McsChoice, Pipeline64, PipelineConfig, SweepAxis,
};

fn pipeline(cfg: PipelineConfig) -> Pipeline64 {
    Pipeline64::new(cfg, assets::default_codebook()).unwrap()
}

fn fixed(m: u32, rate: CodeRate) -> McsChoice {
    McsChoice::Fixed {
        bits_per_symbol: m,
        rate,
    }
}

#[test]
fn noiseless_transmission_equals_module_composition() {
    let p = pipeline(PipelineConfig {
        channel: ChannelParams::noiseless(),
        ..Default::default()
    });
    for (name, img) in assets::images::<f64>() {
        let (out, report) = p.transmit(&img).unwrap();
        let key = p.tokenizer().config().key_count;
        let seqs: Vec<_> = p
            .tokenizer()
            .encode_tiled(&img, p.codebook())
            .unwrap()
            .iter()
            .map(|s| zero_pad(&select_tokens(s, report.tokens_budget).unwrap(), key, s.total()).unwrap())
            .collect();
        let expected = p
            .tokenizer()
            .decode_tiled(&seqs, img.height(), img.width(), p.codebook())
            .unwrap();
        assert_eq!(out, expected, "{name}");
        assert_eq!(report.post_fec_bit_errors, 0);
        assert_eq!(report.token_errors, 0);
    }
}

#[test]
fn reference_operating_point_report() {
    let p = pipeline(PipelineConfig {
        mcs: fixed(4, CodeRate::OneHalf),
        channel: ChannelParams::awgn(6.0, 3),
        ..Default::default()
    });
    let img = assets::image::<f64>("chelsea").unwrap();
    let (_, r) = p.transmit(&img).unwrap();
    assert_eq!((r.tokens_sent, r.tokens_budget, r.info_bits), (128, 96, 1536));
    assert_eq!(r.symbols, 768);
    assert_eq!(r.cbr_actual, 1.0 / 256.0);
    assert_eq!(r.mcs, "16QAM-1/2");
}

#[test]
fn infeasible_budget_is_an_error() {
    let p = pipeline(PipelineConfig {
        target_cbr: 0.001,
        ..Default::default()
    });
    let img = assets::image::<f64>("rocket").unwrap();
    assert!(matches!(p.transmit(&img), Err(Error::Infeasible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_conservation(cbr in 0.002f64..0.02, mi in 0usize..4, ri in 0usize..4, snr in -2.0f64..20.0, seed: u64) {
        let (m, rate) = ([1u32, 2, 4, 6][mi], CodeRate::ALL[ri]);
        let p = pipeline(PipelineConfig {
            target_cbr: cbr,
            mcs: fixed(m, rate),
            channel: ChannelParams::awgn(snr, seed),
            ..Default::default()
        });
        let img = ImageF64::filled(256, 256, 0.4);
        match p.transmit(&img) {
            Ok((_, r)) => {
                prop_assert_eq!(r.symbols, r.coded_bits.div_ceil(m as usize));
                prop_assert!(r.cbr_actual <= cbr);
                prop_assert_eq!(r.info_bits, r.tokens_sent * 12);
                prop_assert!(r.coded_bits <= r.symbols * m as usize);
                prop_assert!(r.post_fec_ber <= 1.0 && r.pre_fec_ber <= 1.0);
            }
            Err(Error::Infeasible(_)) => {
                let n_s = (cbr * 196608.0).round();
                prop_assert!(n_s * m as f64 * rate.as_f64() < 32.0 * 12.0);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn same_seed_same_result() {
    let p = pipeline(PipelineConfig {
        channel: ChannelParams::awgn(2.0, 42),
        ..Default::default()
    });
    let img = assets::image::<f64>("coffee").unwrap();
    let (a, ra) = p.transmit(&img).unwrap();
    let (b, rb) = p.transmit(&img).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.without_timing(), rb.without_timing());
    let (_, rc) = p.transmit_at(&img, ChannelParams::awgn(2.0, 43), 1.0 / 256.0).unwrap();
    assert_ne!(ra.pre_fec_bit_errors, rc.pre_fec_bit_errors);
}

#[test]
fn single_point_sweep_matches_direct_transmit() {
    let p = pipeline(PipelineConfig {
        channel: ChannelParams::awgn(1.0, 5),
        ..Default::default()
    });
    let img = assets::image::<f64>("chelsea").unwrap();
    let rows = sweep(&p, &img, &SweepAxis::Snr(vec![1.0]), 1).unwrap();
    let (_, r) = p
        .transmit_at(&img, ChannelParams::awgn(1.0, derive_seed(5, 0)), 1.0 / 256.0)
        .unwrap();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert!(row.is_ok());
    assert_eq!(
        (row.psnr_db, row.tokens_sent, row.cbr_actual),
        (r.psnr_db, r.tokens_sent, r.cbr_actual)
    );
    assert_eq!((row.pre_fec_ber, row.post_fec_ber), (r.pre_fec_ber, r.post_fec_ber));
    assert_eq!(row.token_errors, r.token_errors as f64);

    let mut csv = Vec::new();
    write_csv(&rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "schema_tag,snr_db,target_cbr,cbr_actual,mcs,tokens_sent,pre_fec_ber,post_fec_ber,token_errors,psnr_db,status"
    );
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "tokenlink-sweep-v1");
    assert_eq!(fields[9].parse::<f64>().unwrap(), r.psnr_db);
    assert_eq!(fields[10], "ok");
}

#[test]
fn cbr_sweep_degrades_gracefully() {
    let p = pipeline(PipelineConfig {
        channel: ChannelParams::awgn(6.0, 1),
        ..Default::default()
    });
    let img = assets::image::<f64>("chelsea").unwrap();
    let grid = vec![0.001, 0.002, 0.003, 0.004, 0.005, 0.006];
    let rows = sweep(&p, &img, &SweepAxis::Cbr(grid), 10).unwrap();
    // 0.001 cannot carry the key tokens at the 6 dB scheme
    assert!(rows[0].status.starts_with("error:"), "{}", rows[0].status);
    let psnr: Vec<f64> = rows[1..].iter().map(|r| r.psnr_db).collect();
    assert!(rows[1..].iter().all(|r| r.is_ok()));
    assert!(psnr.windows(2).all(|w| w[1] >= w[0]), "{psnr:?}");
}

#[test]
fn image_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bytes: Vec<u8> = (0..37 * 23 * 3).map(|i| (i * 97 % 256) as u8).collect();
    let img = ImageF64::from_rgb8(37, 23, &bytes).unwrap();
    for name in ["x.ppm", "x.png"] {
        let path = dir.path().join(name);
        save_image(&img, &path).unwrap();
        let back: ImageF64 = load_image(&path).unwrap();
        assert_eq!(back.to_rgb8(), bytes, "{name}");
    }
    let tiny = decode_ppm::<f64>(b"P6\n2 1\n255\n\xff\x00\x00\x00\x00\xff").unwrap();
    assert_eq!((tiny.height(), tiny.width()), (1, 2));
    assert_eq!(tiny.get(0, 0, 0), 1.0);
    assert_eq!(tiny.get(0, 0, 1), 0.0);
    assert_eq!(encode_ppm(&tiny), b"P6\n2 1\n255\n\xff\x00\x00\x00\x00\xff".to_vec());
    assert!(matches!(
        load_image::<f64>(dir.path().join("missing.ppm")),
        Err(Error::Io { .. })
    ));
}
