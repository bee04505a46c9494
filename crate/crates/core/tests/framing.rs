mod common;

use proptest::prelude::*;
use tokenlink::fec::rate_match;
use tokenlink::{
    compute_detail_budget, pack_tokens, select_tokens, unpack_tokens, BudgetFormula, CodeRate, FrameConfig,
    TokenSequence,
};

fn frame(target_cbr: f64) -> FrameConfig {
    FrameConfig {
        b_token: 12,
        key_count: 32,
        total_tokens: 256,
        target_cbr,
        height: 256,
        width: 256,
        formula: BudgetFormula::Consistent,
    }
}

#[test]
fn pack_is_a_bijection_for_small_widths() {
    common::check_pack_bijection(0).unwrap();
    // every ordered pair for the narrow widths
    for b in 1..=4u32 {
        for x in 0..1u32 << b {
            for y in 0..1u32 << b {
                let bs = pack_tokens(&[x, y], b).unwrap();
                assert_eq!(bs.len(), 2 * b as usize);
                assert_eq!(unpack_tokens(&bs, b, 2).unwrap(), vec![x, y]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pack_round_trips_12_bit_tokens(tokens in prop::collection::vec(0u32..4096, 0..300)) {
        let bs = pack_tokens(&tokens, 12).unwrap();
        prop_assert_eq!(bs.len(), tokens.len() * 12);
        prop_assert!(bs.as_bytes().len() * 8 >= bs.len());
        let pad = bs.as_bytes().len() * 8 - bs.len();
        if pad > 0 {
            let last = *bs.as_bytes().last().unwrap();
            prop_assert_eq!(last & ((1u8 << pad) - 1), 0);
        }
        prop_assert_eq!(unpack_tokens(&bs, 12, tokens.len()).unwrap(), tokens);
    }
}

proptest! {
    #[test]
    fn budget_is_monotone(cbr in 0.0005f64..0.05, step in 1.0f64..3.0) {
        let rates = CodeRate::ALL;
        let ms = [1u32, 2, 4, 6];
        for &r in &rates {
            for &m in &ms {
                let lo = compute_detail_budget(&frame(cbr), r, m).unwrap();
                let hi = compute_detail_budget(&frame(cbr * step), r, m).unwrap();
                prop_assert!(hi.detail_tokens >= lo.detail_tokens);
                prop_assert!(hi.token_capacity >= lo.token_capacity);
            }
        }
        for &m in &ms {
            for w in rates.windows(2) {
                let a = compute_detail_budget(&frame(cbr), w[0], m).unwrap();
                let b = compute_detail_budget(&frame(cbr), w[1], m).unwrap();
                prop_assert!(b.detail_tokens >= a.detail_tokens);
            }
        }
        for &r in &rates {
            for w in ms.windows(2) {
                let a = compute_detail_budget(&frame(cbr), r, w[0]).unwrap();
                let b = compute_detail_budget(&frame(cbr), r, w[1]).unwrap();
                prop_assert!(b.detail_tokens >= a.detail_tokens);
            }
        }
    }

    #[test]
    fn budget_is_conservative_and_tight(cbr in 0.0005f64..0.05, ri in 0usize..4, mi in 0usize..4) {
        let (r, m) = (CodeRate::ALL[ri], [1u32, 2, 4, 6][mi]);
        let cfg = frame(cbr);
        let b = compute_detail_budget(&cfg, r, m).unwrap();
        let info_capacity = b.symbols as f64 * m as f64 * r.as_f64();
        if b.feasible {
            let sent = cfg.key_count + b.detail_tokens;
            prop_assert!((sent * 12) as f64 <= info_capacity + 1e-9);
            if b.detail_tokens < cfg.total_tokens - cfg.key_count {
                prop_assert!(((sent + 1) * 12) as f64 > info_capacity - 1e-9);
            }
        } else {
            prop_assert!(((cfg.key_count) * 12) as f64 > info_capacity - 1e-9);
            prop_assert_eq!(b.detail_tokens, 0);
        }
    }
}

#[test]
fn reference_operating_point() {
    let b = compute_detail_budget(&frame(1.0 / 256.0), CodeRate::OneHalf, 4).unwrap();
    assert_eq!(
        (b.symbols, b.token_capacity, b.detail_tokens, b.feasible),
        (768, 128, 96, true)
    );
    let seq = TokenSequence::new((0..256).collect(), 32).unwrap();
    let sent = select_tokens(&seq, b.detail_tokens).unwrap();
    assert_eq!(sent, (0..128).collect::<Vec<u32>>());
    assert_eq!(pack_tokens(&sent, 12).unwrap().len(), 1536);
}

#[test]
fn punctured_lengths_are_frozen() {
    let mother = vec![0u8; 3 * 40 + 12];
    let lens: Vec<usize> = CodeRate::ALL
        .iter()
        .map(|&r| rate_match(&mother, r).unwrap().len())
        .collect();
    assert_eq!(lens, vec![132, 80, 60, 54]);
    let mother = vec![0u8; 3 * 1024 + 12];
    assert_eq!(rate_match(&mother, CodeRate::OneThird).unwrap().len(), 3084);
}
