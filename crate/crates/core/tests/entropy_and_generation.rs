use shiftdist::entropy::{
    block_census, conditional_entropy, estimate_entropy_rate, prefix_marginal_entropy, BlockCensus,
};
use shiftdist::generate::{quasi_generic_path, round_boundaries, sample_path};
use shiftdist::{ProcessSpec, Seed, Word};

fn markov() -> ProcessSpec {
    ProcessSpec::markov(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap()
}

fn mixture() -> ProcessSpec {
    ProcessSpec::mixture(
        vec![0.5, 0.5],
        vec![ProcessSpec::iid(vec![0.1, 0.9]).unwrap(), ProcessSpec::iid(vec![0.9, 0.1]).unwrap()],
    )
    .unwrap()
}

/// Total variation between the empirical m-block law and the spec's.
fn tv_distance(w: &Word, spec: &ProcessSpec, m: usize) -> f64 {
    let census = block_census(w, m).unwrap();
    let l = w.alphabet().size();
    let mut tv = 0.0;
    let mut block = vec![0u8; m];
    for code in 0..l.pow(m as u32) {
        let mut c = code;
        for s in block.iter_mut().rev() {
            *s = (c % l) as u8;
            c /= l;
        }
        tv += (census.frequency(&block) - spec.block_probability(&block)).abs();
    }
    tv / 2.0
}

#[test]
fn census_bounds_hold() {
    for (spec, seed) in [(markov(), 1), (ProcessSpec::iid(vec![0.2, 0.3, 0.5]).unwrap(), 2)] {
        let w = sample_path(&spec, 20_000, Seed(seed)).unwrap();
        let log_l = w.alphabet().log_size();
        for m in 1..=6 {
            let c = block_census(&w, m).unwrap();
            let h = c.entropy();
            assert!(h >= 0.0 && h <= m as f64 * log_l + 1e-12);
            assert_eq!(c.blocks().map(|(_, n)| n).sum::<u64>(), c.total());
            assert_eq!(c.total(), (w.len() - m + 1) as u64);
            let est = estimate_entropy_rate(&w, m).unwrap();
            let h1 = estimate_entropy_rate(&w, 1).unwrap().h_m;
            assert!(est.slope >= 0.0 && est.ratio >= 0.0);
            assert!(est.slope <= h1 + 1e-3, "m={m} slope={} h1={h1}", est.slope);
        }
    }
}

#[test]
fn conditional_entropy_matches_block_difference() {
    let w = sample_path(&markov(), 200_000, Seed(3)).unwrap();
    let log_l = w.alphabet().log_size();
    for m in 2..=8 {
        let joint = block_census(&w, m).unwrap();
        let marginal = block_census(&w, m - 1).unwrap();
        let ce = conditional_entropy(&joint, &marginal).unwrap();
        assert!(ce.consistent);
        // Exact identity with the joint's own prefix marginal.
        assert!((ce.nats - (joint.entropy() - prefix_marginal_entropy(&joint))).abs() < 1e-9);
        // Boundary effect of the one extra window in the marginal census.
        let diff = joint.entropy() - marginal.entropy();
        let total = joint.total() as f64;
        let bound = (m as f64 * log_l + (total + 1.0).ln()) / total;
        assert!((ce.nats - diff).abs() <= bound, "m={m}");
    }
}

#[test]
fn conditional_entropy_boundary_on_uniform_source() {
    let w = sample_path(&ProcessSpec::bernoulli(0.5).unwrap(), 200_000, Seed(8)).unwrap();
    for m in 2..=8 {
        let joint = block_census(&w, m).unwrap();
        let marginal = block_census(&w, m - 1).unwrap();
        let ce = conditional_entropy(&joint, &marginal).unwrap();
        let total = joint.total() as f64;
        let diff = joint.entropy() - marginal.entropy();
        assert!((ce.nats - diff).abs() <= m as f64 / total * std::f64::consts::LN_2);
    }
}

#[test]
fn conditional_entropy_oracles() {
    let iid = ProcessSpec::iid(vec![0.3, 0.7]).unwrap();
    let w = sample_path(&iid, 200_000, Seed(5)).unwrap();
    let h1 = block_census(&w, 1).unwrap().entropy();
    let ce = conditional_entropy(&block_census(&w, 2).unwrap(), &block_census(&w, 1).unwrap()).unwrap();
    assert!((ce.nats - h1).abs() < 5e-3);

    let w = sample_path(&markov(), 500_000, Seed(6)).unwrap();
    for m in [2, 3, 5] {
        let ce = conditional_entropy(&block_census(&w, m).unwrap(), &block_census(&w, m - 1).unwrap()).unwrap();
        assert!((ce.nats - markov().analytic_entropy()).abs() < 0.01, "m={m}");
    }
}

#[test]
fn slopes_are_non_increasing_up_to_noise() {
    // sigma from 20 seed replicates of each slope.
    let spec = markov();
    let seeds: Vec<u64> = (1..=20).collect();
    let slopes: Vec<Vec<f64>> = seeds
        .iter()
        .map(|&s| {
            let w = sample_path(&spec, 50_000, Seed(s)).unwrap();
            (1..=8).map(|m| estimate_entropy_rate(&w, m).unwrap().slope).collect()
        })
        .collect();
    for m in 1..8 {
        let diffs: Vec<f64> = slopes.iter().map(|s| s[m] - s[m - 1]).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64;
        assert!(mean <= 3.0 * var.sqrt() + 1e-4, "m={} mean increase {mean}", m + 1);
    }
}

#[test]
fn stationary_markov_paths() {
    let spec = markov();
    let w = sample_path(&spec, 400_000, Seed(9)).unwrap();
    let k = 10_000;
    let head = block_census(&w.prefix(w.len() - k), 3).unwrap();
    let tail = block_census(&Word::new(w.alphabet(), w[k..].to_vec()).unwrap(), 3).unwrap();
    for block in [[0u8, 0, 0], [0, 1, 1], [1, 1, 1], [1, 0, 1]] {
        let d = (head.frequency(&block) - tail.frequency(&block)).abs();
        assert!(d < 2.0 * k as f64 / w.len() as f64, "{block:?}: {d}");
        assert!((head.frequency(&block) - spec.block_probability(&block)).abs() < 0.01);
    }
}

#[test]
fn quasi_generic_frequencies() {
    let spec = mixture();
    let w = quasi_generic_path(&spec, 1_000_000, 100, Seed(1)).unwrap();
    let c1 = block_census(&w, 1).unwrap();
    let c2 = block_census(&w, 2).unwrap();
    assert!((c1.frequency(&[0]) - 0.5).abs() < 0.01);
    assert!((c2.frequency(&[0, 0]) - 0.41).abs() < 0.01);

    let zero = ProcessSpec::periodic_digits("0").unwrap();
    let one = ProcessSpec::periodic(Word::parse_digits("1").unwrap()).unwrap();
    let sym = ProcessSpec::mixture(vec![0.5, 0.5], vec![zero, one]).unwrap();
    let full: Vec<usize> = round_boundaries(&[0.5, 0.5], 1_000_000, 100)
        .into_iter()
        .filter(|&b| b < 1_000_000)
        .collect();
    for &n in full.iter().rev().take(3) {
        let w = quasi_generic_path(&sym, n, 100, Seed(0)).unwrap();
        let f0 = block_census(&w, 1).unwrap().frequency(&[0]);
        assert!((f0 - 0.5).abs() <= 100.0 / n as f64, "n={n} f0={f0}");
    }
}

#[test]
fn quasi_generic_convergence_improves_with_length() {
    let spec = mixture();
    let bounds: Vec<usize> = round_boundaries(&[0.5, 0.5], 1_000_000, 10)
        .into_iter()
        .filter(|&b| b < 1_000_000)
        .collect();
    // Last complete round at or below each length.
    let at = |n: usize| *bounds.iter().rev().find(|&&b| b <= n).unwrap();
    let paths: Vec<Word> = (0..8)
        .map(|s| quasi_generic_path(&spec, 1_000_000, 10, Seed(s)).unwrap())
        .collect();
    for m in 1..=3 {
        let errors: Vec<f64> = [10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| paths.iter().map(|w| tv_distance(&w.prefix(at(n)), &spec, m)).sum::<f64>() / 8.0)
            .collect();
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "m={m} {errors:?}");
    }
}

#[test]
fn single_component_mixture_looks_like_its_component() {
    let comp = markov();
    let mix = ProcessSpec::mixture(vec![1.0], vec![comp.clone()]).unwrap();
    let a = quasi_generic_path(&mix, 300_000, 100, Seed(2)).unwrap();
    let b = sample_path(&comp, 300_000, Seed(3)).unwrap();
    for block in [[0u8, 0], [0, 1], [1, 1]] {
        let fa = block_census(&a, 2).unwrap().frequency(&block);
        let fb = block_census(&b, 2).unwrap().frequency(&block);
        assert!((fa - fb).abs() < 0.01);
    }
}

#[test]
fn wide_alphabet_census_matches_byte_census() {
    let w = sample_path(&ProcessSpec::iid(vec![0.25; 4]).unwrap(), 5_000, Seed(1)).unwrap();
    let wide: Vec<u32> = w.iter().map(|&s| s as u32).collect();
    for m in 1..=5 {
        let a = block_census(&w, m).unwrap();
        let b = BlockCensus::of_symbols(&wide, 4, m).unwrap();
        assert_eq!(a, b);
    }
}
