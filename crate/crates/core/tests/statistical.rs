//! Seeded statistical invariants: frequency bands, oracle/empirical
//! distribution agreement, confidence-interval coverage. Everything here is
//! deterministic for the frozen seeds.

use rawcode_core::baselines::{
    bernoulli_stream, coincidence_rate, markov_stream, run_waiting, stationary_distribution,
    BernoulliSpec, MarkovChainSpec, StochasticMatrix,
};
use rawcode_core::coding::Partition;
use rawcode_core::coincidence::{agreement_stream, CoincidenceQuery, SamplingScheme};
use rawcode_core::diagnostics::{correlation_exact, correlation_mc};
use rawcode_core::dynamics::IntervalMap;
use rawcode_core::interval::{Interval, IntervalSet};
use rawcode_core::rational::{rat, to_f64, Rational};
use rawcode_core::rng::{sample_initial, SeedSpec};

#[test]
fn bernoulli_realizations_contain_any_fixed_word() {
    // For a word with match probability p, realizations of length
    // ceil(100/p) contain it at some position essentially always.
    let cases: [(BernoulliSpec, &[u32]); 2] = [
        (BernoulliSpec::fair_binary(), &[0, 1, 1, 0]),
        (
            BernoulliSpec::new(vec![rat(3, 10), rat(7, 10)]).unwrap(),
            &[0, 0, 1],
        ),
    ];
    for (case_idx, (spec, word)) in cases.iter().enumerate() {
        let p = rawcode_core::baselines::window_match_probability(spec, word).unwrap();
        let horizon = {
            let inv = Rational::new(100.into(), 1.into()) / &p;
            inv.ceil().to_integer().try_into().unwrap_or(u64::MAX)
        };
        let realizations = 10_000u64;
        let mut containing = 0u64;
        for i in 0..realizations {
            let stream = bernoulli_stream(spec, SeedSpec::new(8_601 + case_idx as u64, i), horizon);
            let symbols = stream.symbols();
            let found = symbols.windows(word.len()).any(|w| w == &word[..]);
            containing += found as u64;
        }
        let fraction = containing as f64 / realizations as f64;
        assert!(
            fraction >= 0.999,
            "case {case_idx}: only {fraction} of realizations contain the word"
        );
    }
}

#[test]
fn empirical_run_waiting_matches_oracle_histogram() {
    // Fair binary, two independent streams: per-position agreement is
    // Bernoulli(1/2). Compare the empirical distribution of the first
    // length-L window completion against the exact chain pmf, both
    // log2-binned, in total variation.
    let l = 4u32;
    let horizon = 1_024u64;
    let samples = 100_000u64;
    let spec = BernoulliSpec::fair_binary();
    let q = coincidence_rate(&spec, 2).unwrap();
    let oracle = run_waiting(&q, l, horizon).unwrap();

    let n_bins = 64 - (horizon - 1).leading_zeros() as usize + 1;
    let mut oracle_bins = vec![0.0f64; n_bins];
    for (idx, p) in oracle.pmf.iter().enumerate() {
        let t = idx as u64 + 1;
        oracle_bins[63 - t.leading_zeros() as usize] += to_f64(p);
    }
    let oracle_deficit = to_f64(&oracle.deficit);

    let mut empirical_bins = vec![0u64; n_bins];
    let mut misses = 0u64;
    for i in 0..samples {
        let a = bernoulli_stream(&spec, SeedSpec::new(40_271, 2 * i), horizon);
        let b = bernoulli_stream(&spec, SeedSpec::new(40_271, 2 * i + 1), horizon);
        let agree = agreement_stream(&[a, b]).unwrap();
        let mut run = 0u64;
        let mut t_end = None;
        for (t, ok) in agree.iter().enumerate() {
            if *ok {
                run += 1;
            } else {
                run = 0;
            }
            // Trials are indexed from 1 in the oracle; position 0 of the
            // agreement stream is trial 1.
            let trial = t as u64 + 1;
            if run >= l as u64 {
                t_end = Some(trial);
                break;
            }
        }
        match t_end {
            Some(t) => empirical_bins[63 - t.leading_zeros() as usize] += 1,
            None => misses += 1,
        }
    }

    let mut tv = (misses as f64 / samples as f64 - oracle_deficit).abs();
    for (bin, &count) in empirical_bins.iter().enumerate() {
        tv += (count as f64 / samples as f64 - oracle_bins[bin]).abs();
    }
    tv /= 2.0;
    assert!(tv <= 0.02, "total variation {tv}");
}

#[test]
fn fair_stream_frequency_band() {
    // 4-sigma CLT band for 10^6 fair draws.
    let spec = BernoulliSpec::fair_binary();
    let stream = bernoulli_stream(&spec, SeedSpec::new(777, 0), 1_000_000);
    let zeros = stream.symbols().iter().filter(|&&s| s == 0).count() as f64;
    let freq = zeros / 1e6;
    assert!((freq - 0.5).abs() < 0.002, "freq {freq}");
}

#[test]
fn markov_stationary_frequencies() {
    let matrix =
        StochasticMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 4), rat(3, 4)]])
            .unwrap();
    let stationary = stationary_distribution(&matrix).unwrap();
    assert_eq!(stationary, vec![rat(1, 3), rat(2, 3)]);
    let chain = MarkovChainSpec::new(matrix, stationary.clone()).unwrap();
    let n = 1_000_000u64;
    let stream = markov_stream(&chain, SeedSpec::new(424_242, 0), n);
    let zeros = stream.symbols().iter().filter(|&&s| s == 0).count() as f64;
    let freq = zeros / n as f64;
    // Binomial 4-sigma band inflated for the chain's autocorrelation
    // (spectral factor (1+lambda)/(1-lambda) = 5/3 at lambda = 1/4).
    let sigma = (to_f64(&stationary[0]) * to_f64(&stationary[1]) * (5.0 / 3.0) / n as f64).sqrt();
    assert!(
        (freq - 1.0 / 3.0).abs() < 4.0 * sigma,
        "freq {freq}, sigma {sigma}"
    );
}

#[test]
fn mc_confidence_intervals_cover_exact_values() {
    // Randomized (map, A, B, k) cases: the 99% bound must contain the
    // exact correlation in at least 985 of 1000 cases (it is conservative,
    // so in practice nearly all).
    let maps = [
        IntervalMap::doubling(),
        IntervalMap::bridge(),
        IntervalMap::rotation(64).unwrap(),
    ];
    let cases = 1_000u64;
    let samples = 1_000u64;
    let mut covered = 0u64;
    for i in 0..cases {
        let map = &maps[(i % 3) as usize];
        let a_lo = sample_initial(SeedSpec::new(90_000, 4 * i), 24);
        let a_hi = sample_initial(SeedSpec::new(90_000, 4 * i + 1), 24);
        let b_lo = sample_initial(SeedSpec::new(90_000, 4 * i + 2), 24);
        let b_hi = sample_initial(SeedSpec::new(90_000, 4 * i + 3), 24);
        let (a_lo, a_hi) = if a_lo < a_hi {
            (a_lo, a_hi)
        } else {
            (a_hi, a_lo)
        };
        let (b_lo, b_hi) = if b_lo < b_hi {
            (b_lo, b_hi)
        } else {
            (b_hi, b_lo)
        };
        if a_lo == a_hi || b_lo == b_hi {
            covered += 1; // degenerate draw, skip as trivially covered
            continue;
        }
        let a = IntervalSet::from_interval(Interval::new(a_lo, a_hi).unwrap());
        let b = IntervalSet::from_interval(Interval::new(b_lo, b_hi).unwrap());
        let k = i % 11;
        let exact = to_f64(&correlation_exact(map, &a, &b, k).unwrap());
        let est = correlation_mc(map, &a, &b, k, samples, SeedSpec::new(91_000 + i, 0)).unwrap();
        if (est.value - exact).abs() <= est.ci99_halfwidth {
            covered += 1;
        }
    }
    assert!(covered >= 985, "covered {covered} of {cases}");
}

#[test]
fn doubling_hitting_matches_oracle_mean_small() {
    // Small pilot of the acceptance setup: N=2, L=4 over the doubling map
    // with binary coding behaves like the q=1/2 run-waiting chain.
    let map = IntervalMap::doubling();
    let partition = Partition::binary();
    let query = CoincidenceQuery {
        n_streams: 2,
        window: 4,
        horizon: 4_096,
        samples: 20_000,
        seed: 1_234,
        scheme: SamplingScheme::Independent,
    };
    let stats = rawcode_core::coincidence::hitting_experiment(&map, &partition, &query).unwrap();
    let oracle_mean = 30.0;
    let mean = stats.mean_t_end.unwrap();
    assert!(stats.success_rate > 0.999);
    assert!(
        (mean / oracle_mean - 1.0).abs() < 0.05,
        "mean {mean} vs oracle {oracle_mean}"
    );
}
