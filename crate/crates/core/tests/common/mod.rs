//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tokenlink::fec::Trellis;
use tokenlink::{Autoencoder64, Codebook};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random::<bool>() as u8).collect()
}

/// Exhaustive nearest codeword, lowest index on ties.
pub fn brute_nearest(cb: &Codebook<f64>, v: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for k in 0..cb.len() {
        let d: f64 = cb.codeword(k).iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best.1 {
            best = (k, d);
        }
    }
    best.0
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Maximum-likelihood path through a terminated RSC trellis.
///
/// `sys`/`par` are LLRs (positive favours 0) over `n + memory` steps. Path
/// metric is the correlation `sum(+-sys + +-par)`, the same quantity the
/// max-log-MAP maximises. Returns the first `n` decided inputs.
pub fn viterbi(t: &Trellis, sys: &[f64], par: &[f64], n: usize) -> Vec<u8> {
    let steps = sys.len();
    let ns = t.states();
    let mut metric = vec![f64::NEG_INFINITY; ns];
    metric[0] = 0.0;
    let mut back: Vec<Vec<(usize, u8)>> = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut next = vec![f64::NEG_INFINITY; ns];
        let mut from = vec![(0usize, 0u8); ns];
        for s in 0..ns {
            if metric[s] == f64::NEG_INFINITY {
                continue;
            }
            for u in 0..2u8 {
                let p = t.parity_bit(s, u);
                let su = if u == 0 { sys[k] } else { -sys[k] };
                let sp = if p == 0 { par[k] } else { -par[k] };
                let m = metric[s] + su + sp;
                let to = t.next_state(s, u);
                if m > next[to] {
                    next[to] = m;
                    from[to] = (s, u);
                }
            }
        }
        metric = next;
        back.push(from);
    }
    let mut state = 0;
    let mut inputs = vec![0u8; steps];
    for k in (0..steps).rev() {
        let (prev, u) = back[k][state];
        inputs[k] = u;
        state = prev;
    }
    inputs.truncate(n);
    inputs
}

/// Gaussian tail probability.
pub fn q(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

pub type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `quantize` against the exhaustive scan on a random 4096-word codebook.
pub fn check_quantize(cases: usize) -> Check {
    let mut r = rng(11);
    let words = (0..4096 * 4).map(|_| r.random::<f64>()).collect();
    let cb = Codebook::from_flat(4096, 4, words).map_err(|e| e.to_string())?;
    for i in 0..cases {
        let v: Vec<f64> = (0..4).map(|_| r.random_range(-0.2..1.2)).collect();
        let got = cb.quantize(&v).map_err(|e| e.to_string())? as usize;
        let want = brute_nearest(&cb, &v);
        ensure(got == want, || format!("case {i}: quantize {got}, scan {want}"))?;
    }
    Ok(format!("{cases} cases"))
}

/// Exhaustive for widths up to 8, `cases` random 12-bit lists.
pub fn check_pack_bijection(cases: usize) -> Check {
    use tokenlink::{pack_tokens, unpack_tokens};
    let round = |t: &[u32], b: u32| -> Result<Vec<u32>, String> {
        let bs = pack_tokens(t, b).map_err(|e| e.to_string())?;
        unpack_tokens(&bs, b, t.len()).map_err(|e| e.to_string())
    };
    for b in 1..=8u32 {
        let all: Vec<u32> = (0..1u32 << b).collect();
        ensure(round(&all, b)? == all, || format!("width {b}"))?;
    }
    let mut r = rng(12);
    for i in 0..cases {
        let len = r.random_range(0..300);
        let t: Vec<u32> = (0..len).map(|_| r.random_range(0..4096)).collect();
        ensure(round(&t, 12)? == t, || format!("random list {i}"))?;
    }
    Ok(format!("widths 1-8 exhaustive, {cases} random 12-bit lists"))
}

pub fn check_qpp() -> Check {
    use tokenlink::fec::{qpp_interleave, QppTable};
    let rows = QppTable::standard().rows();
    for &(len, f1, f2) in rows {
        let mut perm = qpp_interleave(len, f1, f2).map_err(|e| e.to_string())?;
        perm.sort_unstable();
        ensure(perm.iter().enumerate().all(|(i, &p)| i == p), || {
            format!("length {len}")
        })?;
    }
    Ok(format!("{} lengths", rows.len()))
}

/// Max-log-MAP hard decisions against the Viterbi oracle on noisy short blocks.
pub fn check_bcjr_viterbi(blocks: usize) -> Check {
    use rand_distr::{Distribution, StandardNormal};
    let t = Trellis::lte();
    let mut r = rng(21);
    let sigma = 0.9;
    for block in 0..blocks {
        let n = r.random_range(8..=64);
        let info = random_bits(&mut r, n);
        let (par, tail_sys, tail_par) = t.encode(&info);
        let mut noisy = |bits: &[u8]| -> Vec<f64> {
            bits.iter()
                .map(|&b| {
                    let g: f64 = StandardNormal.sample(&mut r);
                    2.0 * (1.0 - 2.0 * b as f64 + sigma * g) / (sigma * sigma)
                })
                .collect()
        };
        let sys = noisy(&[info.as_slice(), &tail_sys].concat());
        let parl = noisy(&[par.as_slice(), &tail_par].concat());
        let mut app = vec![0.0; n];
        t.max_log_map(&sys, &parl, &vec![0.0; n], &mut app);
        let bcjr: Vec<u8> = app.iter().map(|&l| (l < 0.0) as u8).collect();
        ensure(bcjr == viterbi(&t, &sys, &parl, n), || format!("block {block} (n={n})"))?;
    }
    Ok(format!("{blocks} blocks"))
}

/// Gray adjacency on the integer grid and unit average energy, every label.
pub fn check_constellations() -> Check {
    use tokenlink::modem::{gray_table, SUPPORTED_BITS_PER_SYMBOL};
    use tokenlink::Constellation64;
    for m in SUPPORTED_BITS_PER_SYMBOL {
        let pts = gray_table(m).map_err(|e| e.to_string())?;
        ensure(pts.len() == 1 << m, || format!("m={m}: {} labels", pts.len()))?;
        let mut pairs = 0;
        for (a, &(ia, qa)) in pts.iter().enumerate() {
            for (b, &(ib, qb)) in pts.iter().enumerate().skip(a + 1) {
                let (di, dq) = ((ia - ib).abs(), (qa - qb).abs());
                if (di == 2 && dq == 0) || (di == 0 && dq == 2) {
                    pairs += 1;
                    ensure((a ^ b).count_ones() == 1, || format!("m={m}: neighbours {a} and {b}"))?;
                }
            }
        }
        ensure(pairs > 0, || format!("m={m}: no neighbours"))?;
        let c = Constellation64::new(m).map_err(|e| e.to_string())?;
        let e = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.points().len() as f64;
        ensure((e - 1.0).abs() < 1e-12, || format!("m={m}: energy {e}"))?;
    }
    Ok("m = 1, 2, 4, 6".into())
}

/// Model with every parameter drawn from N(0, 0.5^2), so no layer is inactive.
pub fn random_model(r: &mut impl Rng, p: usize, n: usize, d: usize) -> Autoencoder64 {
    use rand_distr::{Distribution, StandardNormal};
    let mut m = Autoencoder64::new(p, n, d, r.random()).expect("valid dims");
    for w in m.params_mut() {
        let g: f64 = StandardNormal.sample(r);
        *w = 0.5 * g;
    }
    m
}

/// Mean over samples of each sample's own truncated loss.
pub fn per_sample_loss(m: &Autoencoder64, batch: &[&[f64]], ts: &[usize]) -> f64 {
    batch
        .iter()
        .zip(ts)
        .map(|(x, &t)| m.loss(&[*x], t).unwrap())
        .sum::<f64>()
        / batch.len() as f64
}

/// Central differences (eps 1e-5) against both analytic gradients on
/// `configs` random shapes, 3-sample batches and random truncation points.
/// Relative error uses a 1e-6 floor on the magnitude.
pub fn check_gradients(configs: usize) -> Check {
    let mut r = rng(31);
    let eps = 1e-5;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-6);
    let mut worst: f64 = 0.0;
    for config in 0..configs {
        let (p, n, d) = (r.random_range(2..=10), r.random_range(2..=6), r.random_range(1..=3));
        let mut model = random_model(&mut r, p, n, d);
        let batch: Vec<Vec<f64>> = (0..3).map(|_| (0..p).map(|_| r.random()).collect()).collect();
        let refs: Vec<&[f64]> = batch.iter().map(Vec::as_slice).collect();
        let t = r.random_range(1..=n);
        let ts: Vec<usize> = (0..3).map(|_| r.random_range(1..=n)).collect();
        let (_, grad) = model.loss_and_gradient(&refs, t).map_err(|e| e.to_string())?;
        let (_, grad_ps) = model
            .loss_and_gradient_per_sample(&refs, &ts)
            .map_err(|e| e.to_string())?;
        let mut local: f64 = 0.0;
        for i in 0..model.params().len() {
            let w = model.params()[i];
            model.params_mut()[i] = w + eps;
            let up = (model.loss(&refs, t).unwrap(), per_sample_loss(&model, &refs, &ts));
            model.params_mut()[i] = w - eps;
            let down = (model.loss(&refs, t).unwrap(), per_sample_loss(&model, &refs, &ts));
            model.params_mut()[i] = w;
            local = local.max(rel(grad[i], (up.0 - down.0) / (2.0 * eps)));
            local = local.max(rel(grad_ps[i], (up.1 - down.1) / (2.0 * eps)));
        }
        ensure(local <= 1e-4, || {
            format!("config {config} (p={p}, N={n}, d={d}): relative error {local:.2e}")
        })?;
        worst = worst.max(local);
    }
    Ok(format!("{configs} configs, worst relative error {worst:.2e}"))
}
