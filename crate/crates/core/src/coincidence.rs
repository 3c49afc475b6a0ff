//! Time-aligned coincidence windows among symbol streams.
//!
//! Given N code streams, a length-L window at t0 means the streams agree
//! position-by-position at every t in {t0+1, ..., t0+L}. The window is
//! anchored after t0 (it never includes absolute position 0), which makes
//! the completion time t_end = t0 + L directly comparable to the i.i.d.
//! run-waiting oracle in [`crate::baselines`]: agreement trials effectively
//! start at position 1.
//!
//! The module searches materialized streams (audit path), runs seeded
//! Monte Carlo hitting experiments over the dynamical systems with
//! deterministic parallel aggregation, and carries the two scripted
//! scenarios: the cross-component bridge experiment and the rotation
//! saturation bound.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::coding::{EncodedTrajectory, Partition, SymbolStream};
use crate::dynamics::{sample_initial, IntervalMap, TrajectorySource};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::rational::{frac_mod1, rat, Rational};
use crate::rng::{BitBuffer, SeedSpec};

fn check_streams(streams: &[SymbolStream]) -> Result<usize> {
    if streams.len() < 2 {
        return Err(Error::Input(format!(
            "coincidence needs at least 2 streams, got {}",
            streams.len()
        )));
    }
    let len = streams[0].len();
    let alphabet = streams[0].alphabet();
    for (i, s) in streams.iter().enumerate().skip(1) {
        if s.len() != len {
            return Err(Error::Input(format!(
                "stream {i} has length {} but stream 0 has {len}",
                s.len()
            )));
        }
        if s.alphabet() != alphabet {
            return Err(Error::Input(format!(
                "stream {i} has alphabet {} but stream 0 has {alphabet}",
                s.alphabet()
            )));
        }
    }
    Ok(len)
}

/// Per-position predicate: true iff all N symbols at that time are equal.
pub fn agreement_stream(streams: &[SymbolStream]) -> Result<Vec<bool>> {
    let len = check_streams(streams)?;
    let mut agree = Vec::with_capacity(len);
    for t in 0..len {
        let first = streams[0].symbols()[t];
        agree.push(streams.iter().skip(1).all(|s| s.symbols()[t] == first));
    }
    Ok(agree)
}

fn find_window_in_agreement(agree: &[bool], window: u32) -> Option<u64> {
    let window = window as u64;
    let mut run = 0u64;
    for (t, &a) in agree.iter().enumerate() {
        let t = t as u64;
        if a {
            run += 1;
        } else {
            run = 0;
        }
        // Only positions >= 1 may belong to a window.
        if run.min(t) >= window {
            return Some(t - window);
        }
    }
    None
}

/// Smallest t0 >= 0 with agreement at every t in {t0+1, ..., t0+L}, or
/// `None` within the observed horizon (a miss is data, not an error).
pub fn find_window(streams: &[SymbolStream], window: u32) -> Result<Option<u64>> {
    if window == 0 {
        return Err(Error::Input("window length must be at least 1".into()));
    }
    let agree = agreement_stream(streams)?;
    Ok(find_window_in_agreement(&agree, window))
}

/// Length of the longest maximal block of consecutive all-agree positions.
pub fn max_run(streams: &[SymbolStream]) -> Result<u64> {
    let agree = agreement_stream(streams)?;
    let mut best = 0u64;
    let mut run = 0u64;
    for a in agree {
        if a {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    Ok(best)
}

/// Number of positions t (anywhere, including 0) at which the streams agree
/// on all of t, ..., t+L-1. Overlapping windows all count; under an i.i.d.
/// baseline the expectation is exactly (H-L+1) * q_c^L.
pub fn count_windows(streams: &[SymbolStream], window: u32) -> Result<u64> {
    if window == 0 {
        return Err(Error::Input("window length must be at least 1".into()));
    }
    let agree = agreement_stream(streams)?;
    let mut run = 0u64;
    let mut count = 0u64;
    for a in agree {
        if a {
            run += 1;
            if run >= window as u64 {
                count += 1;
            }
        } else {
            run = 0;
        }
    }
    Ok(count)
}

/// Full scan of a stream tuple: first window, completion time, longest run
/// and total agreement count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceReport {
    pub window: u32,
    pub t0: Option<u64>,
    pub t_end: Option<u64>,
    pub max_run: u64,
    pub agreement_count: u64,
}

pub fn analyze_streams(streams: &[SymbolStream], window: u32) -> Result<CoincidenceReport> {
    if window == 0 {
        return Err(Error::Input("window length must be at least 1".into()));
    }
    let agree = agreement_stream(streams)?;
    let t0 = find_window_in_agreement(&agree, window);
    let mut best = 0u64;
    let mut run = 0u64;
    let mut count = 0u64;
    for a in &agree {
        if *a {
            run += 1;
            best = best.max(run);
            count += 1;
        } else {
            run = 0;
        }
    }
    Ok(CoincidenceReport {
        window,
        t0,
        t_end: t0.map(|t| t + window as u64),
        max_run: best,
        agreement_count: count,
    })
}

/// Which half of [0,1) a coordinate lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrantLabel(pub Vec<Half>);

impl std::fmt::Display for QuadrantLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for h in &self.0 {
            f.write_str(match h {
                Half::Left => "L",
                Half::Right => "R",
            })?;
        }
        Ok(())
    }
}

/// Per-coordinate half indicator: Left iff the coordinate is below 1/2.
pub fn quadrant_of(points: &[Rational]) -> Result<QuadrantLabel> {
    let half = rat(1, 2);
    points
        .iter()
        .map(|x| {
            if !crate::rational::in_unit_interval(x) {
                return Err(Error::Domain(x.to_string()));
            }
            Ok(if x < &half { Half::Left } else { Half::Right })
        })
        .collect::<Result<Vec<_>>>()
        .map(QuadrantLabel)
}

/// How the N initial points of a sample are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingScheme {
    /// N independent uniform points.
    Independent,
    /// One uniform point x, the others at x + j*offset mod 1 (the natural
    /// protocol for products of identical rotations, where the pairwise
    /// offset is invariant along the orbit).
    FixedOffset(Rational),
    /// N = 2: first point uniform in [0,1/2), second uniform in [1/2,1).
    CrossHalves,
}

/// Parameters of a seeded coincidence experiment.
#[derive(Debug, Clone)]
pub struct CoincidenceQuery {
    pub n_streams: u32,
    pub window: u32,
    pub horizon: u64,
    pub samples: u64,
    pub seed: u64,
    pub scheme: SamplingScheme,
}

impl CoincidenceQuery {
    fn validate(&self) -> Result<()> {
        if self.n_streams < 2 {
            return Err(Error::Input(format!(
                "need at least 2 trajectories, got {}",
                self.n_streams
            )));
        }
        if self.window == 0 {
            return Err(Error::Input("window length must be at least 1".into()));
        }
        if self.horizon < self.window as u64 + 1 {
            return Err(Error::Input(format!(
                "horizon {} too short for window {} (needs window + 1)",
                self.horizon, self.window
            )));
        }
        if self.samples == 0 {
            return Err(Error::Input("need at least one sample".into()));
        }
        if matches!(self.scheme, SamplingScheme::CrossHalves) && self.n_streams != 2 {
            return Err(Error::Input(
                "cross-halves sampling is defined for exactly 2 trajectories".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HistogramBin {
    /// Inclusive lower edge (power of two).
    pub lo: u64,
    /// Exclusive upper edge.
    pub hi: u64,
    pub count: u64,
}

/// Aggregate of a hitting experiment. `t_end_sum` over successes is exact;
/// the floating-point mean is derived from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingStats {
    pub samples: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub t_end_sum: u128,
    pub mean_t_end: Option<f64>,
    pub histogram: Vec<HistogramBin>,
}

impl HittingStats {
    fn from_outcomes(samples: u64, t_ends: impl IntoIterator<Item = Option<u64>>) -> Self {
        let mut successes = 0u64;
        let mut sum = 0u128;
        let mut bins = std::collections::BTreeMap::new();
        for t in t_ends.into_iter().flatten() {
            successes += 1;
            sum += t as u128;
            let exp = 63 - t.max(1).leading_zeros() as u64;
            *bins.entry(exp).or_insert(0u64) += 1;
        }
        let histogram = bins
            .into_iter()
            .map(|(exp, count)| HistogramBin {
                lo: 1 << exp,
                hi: 1 << (exp + 1),
                count,
            })
            .collect();
        HittingStats {
            samples,
            successes,
            success_rate: successes as f64 / samples as f64,
            t_end_sum: sum,
            mean_t_end: if successes > 0 {
                Some(sum as f64 / successes as f64)
            } else {
                None
            },
            histogram,
        }
    }
}

fn open_tuple<'p>(
    map: &IntervalMap,
    partition: &'p Partition,
    query: &CoincidenceQuery,
    sample: u64,
) -> Result<Vec<EncodedTrajectory<'p>>> {
    let n = query.n_streams as u64;
    let mut cursors = Vec::with_capacity(query.n_streams as usize);
    match &query.scheme {
        SamplingScheme::Independent => {
            for j in 0..n {
                let seed = SeedSpec::new(query.seed, sample * n + j);
                let src = TrajectorySource::open_seeded(map, seed, query.horizon, None)?;
                cursors.push(EncodedTrajectory::new(src, partition));
            }
        }
        SamplingScheme::CrossHalves => {
            for j in 0..2u64 {
                let seed = SeedSpec::new(query.seed, sample * 2 + j);
                let src = TrajectorySource::open_seeded(map, seed, query.horizon, Some(j as u8))?;
                cursors.push(EncodedTrajectory::new(src, partition));
            }
        }
        SamplingScheme::FixedOffset(d) => {
            let bits = match map.backend() {
                crate::dynamics::Backend::RotationClosedForm { .. } => 64,
                _ => query.horizon + 64,
            };
            let x0 = sample_initial(SeedSpec::new(query.seed, sample), bits);
            for j in 0..n {
                let xj = frac_mod1(&(&x0 + d * rat(j as i64, 1)));
                let src = TrajectorySource::open(map, xj)?;
                cursors.push(EncodedTrajectory::new(src, partition));
            }
        }
    }
    Ok(cursors)
}

/// Scans one tuple of encoded trajectories for the first completed window;
/// returns t_end = t0 + L if found within the horizon.
fn scan_for_window(
    cursors: &mut [EncodedTrajectory<'_>],
    window: u32,
    horizon: u64,
) -> Result<Option<u64>> {
    let window = window as u64;
    let mut run = 0u64;
    for t in 0..horizon {
        let first = cursors[0].next_symbol()?;
        let mut agree = true;
        for c in &mut cursors[1..] {
            // Every cursor advances even after a mismatch is known.
            agree &= c.next_symbol()? == first;
        }
        if agree {
            run += 1;
        } else {
            run = 0;
        }
        if run.min(t) >= window {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Seeded Monte Carlo hitting experiment: samples independent N-tuples of
/// initial points, codes them, and aggregates first-window completion
/// times. Per-sample work fans out across the current rayon pool; results
/// are collected in sample order, so reports are byte-identical for a given
/// master seed regardless of worker count. Any per-sample error aborts the
/// whole experiment.
pub fn hitting_experiment(
    map: &IntervalMap,
    partition: &Partition,
    query: &CoincidenceQuery,
) -> Result<HittingStats> {
    query.validate()?;
    let outcomes: Vec<Option<u64>> = (0..query.samples)
        .into_par_iter()
        .map(|sample| {
            let mut cursors = open_tuple(map, partition, query, sample)?;
            scan_for_window(&mut cursors, query.window, query.horizon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HittingStats::from_outcomes(query.samples, outcomes))
}

/// Hitting report for the cross-component bridge experiment, plus the
/// per-step quadrant audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeReport {
    /// Exponent k of the straddling cell half-width 2^-k.
    pub half_width_exponent: u32,
    pub stats: HittingStats,
    /// Total orbit steps across samples at which half-membership was
    /// checked against the initial quadrant.
    pub quadrant_steps_checked: u64,
    pub quadrant_invariant: bool,
    /// Per pair, the first steps are also cross-validated point-by-point
    /// against exact rational iteration.
    pub exact_prefix_steps: u64,
}

/// Cross-component coincidence experiment on the bridge map with the
/// straddling partition `bridge:k`: pairs are sampled with x in [0,1/2) and
/// y in [1/2,1), windows are searched as usual, and along the way every
/// observed symbol pair is checked for consistency with the invariant
/// quadrant (symbols strictly left of the straddling cell can only come
/// from the left orbit, and vice versa). The first steps of every pair are
/// additionally cross-validated against exact rational iteration.
pub fn bridge_scenario(
    k: u32,
    window: u32,
    samples: u64,
    horizon: u64,
    seed: u64,
) -> Result<BridgeReport> {
    let map = IntervalMap::bridge();
    let partition = Partition::bridge(k)?;
    let query = CoincidenceQuery {
        n_streams: 2,
        window,
        horizon,
        samples,
        seed,
        scheme: SamplingScheme::CrossHalves,
    };
    query.validate()?;
    // Index of the straddling cell within the position-ordered partition.
    let straddle = partition
        .locate(&rat(1, 2))
        .expect("1/2 is in the partition");
    let prefix_steps = 64u64.min(horizon);

    struct SampleOutcome {
        t_end: Option<u64>,
        steps: u64,
        quadrant_ok: bool,
    }

    let outcomes: Vec<SampleOutcome> = (0..samples)
        .into_par_iter()
        .map(|sample| -> Result<SampleOutcome> {
            // Exact-prefix validation: iterate a truncation of each initial
            // point (enough bits for the prefix plus guard) under both the
            // stream backend and exact rational iteration and compare.
            let half = rat(1, 2);
            let trunc_bits = prefix_steps + 128;
            for j in 0..2u64 {
                let spec = SeedSpec::new(seed, sample * 2 + j);
                let x0 = BitBuffer::seeded(spec, trunc_bits, Some((j, 1))).to_rational();
                let mut probe = TrajectorySource::open(&map, x0.clone())?;
                let mut exact = TrajectorySource::open_exact(&map, x0)?;
                for t in 0..prefix_steps {
                    let a = probe.next_point()?;
                    let b = exact.next_point()?;
                    if a != b {
                        return Err(Error::Backend(format!(
                            "stream/exact orbit mismatch at step {t} of sample {sample}"
                        )));
                    }
                    let on_left = a < half;
                    if on_left != (j == 0) {
                        return Ok(SampleOutcome {
                            t_end: None,
                            steps: t,
                            quadrant_ok: false,
                        });
                    }
                }
            }

            // Full scan with the per-step quadrant consistency audit.
            let mut cursors = Vec::with_capacity(2);
            for j in 0..2u64 {
                let spec = SeedSpec::new(seed, sample * 2 + j);
                let src = TrajectorySource::open_seeded(&map, spec, horizon, Some(j as u8))?;
                cursors.push(EncodedTrajectory::new(src, &partition));
            }
            let window = window as u64;
            let mut run = 0u64;
            let mut t_end = None;
            let mut quadrant_ok = true;
            let mut steps = 0u64;
            for t in 0..horizon {
                let left = cursors[0].next_symbol()?;
                let right = cursors[1].next_symbol()?;
                steps = t + 1;
                if left > straddle || right < straddle {
                    quadrant_ok = false;
                    break;
                }
                if left == right {
                    run += 1;
                } else {
                    run = 0;
                }
                if run.min(t) >= window {
                    t_end = Some(t);
                    break;
                }
            }
            Ok(SampleOutcome {
                t_end,
                steps,
                quadrant_ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let quadrant_invariant = outcomes.iter().all(|o| o.quadrant_ok);
    let quadrant_steps_checked = outcomes.iter().map(|o| o.steps).sum();
    let stats = HittingStats::from_outcomes(samples, outcomes.iter().map(|o| o.t_end));
    Ok(BridgeReport {
        half_width_exponent: k,
        stats,
        quadrant_steps_checked,
        quadrant_invariant,
        exact_prefix_steps: prefix_steps,
    })
}

/// The set of positions x at which x and x + offset (mod 1) receive the
/// same code symbol.
pub fn agreement_set(partition: &Partition, offset: &Rational) -> Result<IntervalSet> {
    let minus = -offset;
    let mut out = IntervalSet::empty();
    for i in 0..partition.len() {
        let cell = partition.cell_set(i);
        let shifted = cell.translate_mod1(&minus)?;
        out = out.union(&cell.intersect(&shifted));
    }
    Ok(out)
}

/// Exact upper bound on agreement-run lengths for a pair of identical
/// rotations at a fixed pairwise offset: the largest L such that the arcs
/// S, S - angle, ..., S - (L-1)*angle still share a point, where S is the
/// agreement set. A run of length L starting anywhere requires the orbit
/// to visit that intersection, so no observed run can exceed the bound.
pub fn rotation_window_bound(
    angle: &Rational,
    partition: &Partition,
    offset: &Rational,
    cap: u64,
) -> Result<u64> {
    let s = agreement_set(partition, offset)?;
    if s.is_empty() {
        return Ok(0);
    }
    let mut inter = s.clone();
    let mut bound = 1u64;
    let mut shift = Rational::zero();
    loop {
        if bound > cap {
            return Err(Error::Resource(format!(
                "agreement arcs still intersect after {cap} translates"
            )));
        }
        shift = frac_mod1(&(shift - angle));
        let next = inter.intersect(&s.translate_mod1(&shift)?);
        if next.is_empty() {
            return Ok(bound);
        }
        inter = next;
        bound += 1;
    }
}

/// Longest all-agree run of N encoded trajectories at each checkpoint
/// horizon (checkpoints strictly increasing). Runs may start at position 0;
/// this is the saturation diagnostic, not the window search.
pub fn max_run_prefixes(
    cursors: &mut [EncodedTrajectory<'_>],
    checkpoints: &[u64],
) -> Result<Vec<u64>> {
    if cursors.len() < 2 {
        return Err(Error::Input("need at least 2 trajectories".into()));
    }
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input(
            "checkpoints must be strictly increasing and nonempty".into(),
        ));
    }
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut best = 0u64;
    let mut run = 0u64;
    let mut next_checkpoint = 0usize;
    let last = *checkpoints.last().unwrap();
    for t in 0..last {
        let first = cursors[0].next_symbol()?;
        let mut agree = true;
        for c in &mut cursors[1..] {
            agree &= c.next_symbol()? == first;
        }
        if agree {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
        if t + 1 == checkpoints[next_checkpoint] {
            out.push(best);
            next_checkpoint += 1;
        }
    }
    Ok(out)
}

/// Word-parallel fast path for the binary-coded full shift: the longest
/// agreement run of two seeded bit streams, at each checkpoint horizon.
/// Checkpoints must be multiples of 64. Equivalent to encoding the two
/// doubling-map trajectories through the binary partition and calling
/// [`max_run_prefixes`]; pinned against it by tests.
pub fn bit_pair_max_run(
    seed_a: SeedSpec,
    seed_b: SeedSpec,
    checkpoints: &[u64],
) -> Result<Vec<u64>> {
    if checkpoints.is_empty()
        || checkpoints.windows(2).any(|w| w[0] >= w[1])
        || checkpoints.iter().any(|c| c % 64 != 0 || *c == 0)
    {
        return Err(Error::Input(
            "checkpoints must be increasing positive multiples of 64".into(),
        ));
    }
    let horizon = *checkpoints.last().unwrap();
    // Symbol t of a doubling-map trajectory under the binary partition is
    // fractional bit t+1, so buffer word w covers symbols 64w .. 64w+63.
    let mut a = BitBuffer::seeded(seed_a, horizon + 64, None);
    let mut b = BitBuffer::seeded(seed_b, horizon + 64, None);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0usize;
    let mut best = 0u64;
    let mut run = 0u64;
    for w in 0..horizon / 64 {
        let eq = !(a.word(w) ^ b.word(w));
        if eq == u64::MAX {
            run += 64;
            best = best.max(run);
        } else {
            let lead = eq.leading_ones() as u64;
            best = best.max(run + lead);
            // Interior runs of ones.
            let mut v = eq << lead;
            loop {
                let zeros = v.leading_zeros();
                if zeros == 64 {
                    break;
                }
                v <<= zeros;
                let ones = v.leading_ones() as u64;
                best = best.max(ones);
                if ones == 64 {
                    break;
                }
                v <<= ones;
            }
            run = eq.trailing_ones() as u64;
        }
        if (w + 1) * 64 == checkpoints[next_checkpoint] {
            out.push(best);
            next_checkpoint += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::encode_trajectory;

    fn bin(symbols: &[u32]) -> SymbolStream {
        SymbolStream::new(2, symbols.to_vec()).unwrap()
    }

    #[test]
    fn agreement_examples() {
        let a = bin(&[0, 1, 1, 0]);
        let b = bin(&[1, 1, 1, 0]);
        assert_eq!(
            agreement_stream(&[a.clone(), b]).unwrap(),
            vec![false, true, true, true]
        );
        assert_eq!(
            agreement_stream(&[a.clone(), a.clone()]).unwrap(),
            vec![true; 4]
        );
        let c = bin(&[0, 1]);
        let d = bin(&[0, 1]);
        let e = bin(&[1, 1]);
        assert_eq!(agreement_stream(&[c, d, e]).unwrap(), vec![false, true]);
    }

    #[test]
    fn agreement_rejects_mismatch() {
        let a = bin(&[0, 1]);
        let b = bin(&[0, 1, 0]);
        assert!(agreement_stream(&[a.clone(), b]).is_err());
        let c = SymbolStream::new(3, vec![0, 1]).unwrap();
        assert!(agreement_stream(&[a.clone(), c]).is_err());
        assert!(agreement_stream(&[a]).is_err());
    }

    #[test]
    fn find_window_examples() {
        let s1 = bin(&[0, 1, 1, 0, 1, 0, 0]);
        let s2 = bin(&[1, 1, 1, 0, 1, 1, 0]);
        assert_eq!(find_window(&[s1.clone(), s2.clone()], 3).unwrap(), Some(0));
        assert_eq!(find_window(&[s1.clone(), s1.clone()], 5).unwrap(), Some(0));
        let zeros = bin(&[0; 16]);
        let ones = bin(&[1; 16]);
        assert_eq!(find_window(&[zeros, ones], 2).unwrap(), None);
        // The window never includes position 0: a run confined to the very
        // start does not count.
        let a = bin(&[1, 1, 0, 0, 0, 0]);
        let b = bin(&[1, 1, 0, 1, 1, 1]);
        // agreement: T T T F F F -> only eligible span is {1,2}.
        assert_eq!(find_window(&[a.clone(), b.clone()], 2).unwrap(), Some(0));
        assert_eq!(find_window(&[a, b], 3).unwrap(), None);
    }

    #[test]
    fn max_run_examples() {
        let s1 = bin(&[0, 1, 1, 0, 1, 0, 0]);
        let s2 = bin(&[1, 1, 1, 0, 1, 1, 0]);
        assert_eq!(max_run(&[s1.clone(), s2]).unwrap(), 4);
        let zeros = bin(&[0; 8]);
        let ones = bin(&[1; 8]);
        assert_eq!(max_run(&[zeros, ones]).unwrap(), 0);
        assert_eq!(max_run(&[s1.clone(), s1.clone()]).unwrap(), 7);
    }

    #[test]
    fn count_windows_counts_overlaps() {
        let a = bin(&[0, 0, 0, 0, 1, 0, 0]);
        let b = bin(&[0, 0, 0, 0, 0, 0, 0]);
        // agreement: T T T T F T T; length-2 windows start at t = 0, 1, 2, 5.
        assert_eq!(count_windows(&[a, b], 2).unwrap(), 4);
    }

    #[test]
    fn report_is_consistent() {
        let s1 = bin(&[0, 1, 1, 0, 1, 0, 0]);
        let s2 = bin(&[1, 1, 1, 0, 1, 1, 0]);
        let r = analyze_streams(&[s1, s2], 3).unwrap();
        assert_eq!(r.t0, Some(0));
        assert_eq!(r.t_end, Some(3));
        assert_eq!(r.max_run, 4);
        assert_eq!(r.agreement_count, 5);
    }

    #[test]
    fn quadrant_examples() {
        let q = quadrant_of(&[rat(1, 5), rat(7, 10)]).unwrap();
        assert_eq!(q.to_string(), "LR");
        let q = quadrant_of(&[rat(1, 2)]).unwrap();
        assert_eq!(q.to_string(), "R");
        let q = quadrant_of(&[rat(1, 10), rat(1, 10), rat(1, 10)]).unwrap();
        assert_eq!(q.to_string(), "LLL");
        assert!(quadrant_of(&[rat(3, 2)]).is_err());
    }

    #[test]
    fn identical_tuple_hits_immediately() {
        let map = IntervalMap::doubling();
        let partition = Partition::binary();
        let query = CoincidenceQuery {
            n_streams: 3,
            window: 4,
            horizon: 64,
            samples: 20,
            seed: 99,
            scheme: SamplingScheme::FixedOffset(rat(0, 1)),
        };
        let stats = hitting_experiment(&map, &partition, &query).unwrap();
        assert_eq!(stats.successes, 20);
        // All streams identical, so the first window completes at t = L,
        // i.e. t0 = 0 for every sample.
        assert_eq!(stats.t_end_sum, 20 * 4);
        // Histogram mass accounts for every success.
        let mass: u64 = stats.histogram.iter().map(|b| b.count).sum();
        assert_eq!(mass, stats.successes);
    }

    #[test]
    fn hitting_experiment_is_deterministic() {
        let map = IntervalMap::doubling();
        let partition = Partition::binary();
        let query = CoincidenceQuery {
            n_streams: 2,
            window: 4,
            horizon: 4096,
            samples: 500,
            seed: 7,
            scheme: SamplingScheme::Independent,
        };
        let a = hitting_experiment(&map, &partition, &query).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| hitting_experiment(&map, &partition, &query).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn query_validation() {
        let map = IntervalMap::doubling();
        let partition = Partition::binary();
        let mut query = CoincidenceQuery {
            n_streams: 1,
            window: 4,
            horizon: 100,
            samples: 1,
            seed: 0,
            scheme: SamplingScheme::Independent,
        };
        assert!(hitting_experiment(&map, &partition, &query).is_err());
        query.n_streams = 2;
        query.horizon = 4;
        assert!(hitting_experiment(&map, &partition, &query).is_err());
        query.horizon = 100;
        query.n_streams = 3;
        query.scheme = SamplingScheme::CrossHalves;
        assert!(hitting_experiment(&map, &partition, &query).is_err());
    }

    #[test]
    fn bridge_pair_near_fixed_point_hits_at_zero() {
        // The pair symmetric around 1/2 at distance 2^-(k+L+1) stays inside
        // the straddling cell for L steps on both sides: t0 = 0 exactly.
        let (k, l) = (2u32, 4u32);
        let map = IntervalMap::bridge();
        let partition = Partition::bridge(k).unwrap();
        let d = Rational::new(1.into(), (1i64 << (k + l + 1)).into());
        let x = rat(1, 2) - &d;
        let y = rat(1, 2) + &d;
        let sx = encode_trajectory(
            TrajectorySource::open_exact(&map, x).unwrap(),
            &partition,
            (l + 3) as u64,
        )
        .unwrap();
        let sy = encode_trajectory(
            TrajectorySource::open_exact(&map, y).unwrap(),
            &partition,
            (l + 3) as u64,
        )
        .unwrap();
        assert_eq!(find_window(&[sx, sy], l).unwrap(), Some(0));
    }

    #[test]
    fn bridge_scenario_smoke() {
        let report = bridge_scenario(2, 3, 40, 20_000, 5).unwrap();
        assert!(report.quadrant_invariant);
        assert_eq!(report.stats.samples, 40);
        assert_eq!(report.stats.successes, 40);
    }

    #[test]
    fn agreement_set_binary_offset() {
        // Binary partition, offset 2/5: agree iff x and x+2/5 share a half,
        // which happens exactly on [0,1/10) u [1/2,3/5).
        let s = agreement_set(&Partition::binary(), &rat(2, 5)).unwrap();
        let expect = IntervalSet::from_spans([
            crate::interval::Interval::new(rat(0, 1), rat(1, 10)).unwrap(),
            crate::interval::Interval::new(rat(1, 2), rat(3, 5)).unwrap(),
        ]);
        assert_eq!(s, expect);
    }

    #[test]
    fn rotation_bound_toy_cases() {
        let binary = Partition::binary();
        // Offset 1/2 makes the two coordinates always disagree: bound 0.
        assert_eq!(
            rotation_window_bound(&rat(1, 4), &binary, &rat(1, 2), 100).unwrap(),
            0
        );
        // angle 1/4, offset 1/4: S = [0,1/4) u [1/2,3/4);
        // S - 1/4 = [1/4,1/2) u [3/4,1) is disjoint from S: bound 1.
        assert_eq!(
            rotation_window_bound(&rat(1, 4), &binary, &rat(1, 4), 100).unwrap(),
            1
        );
        // Period-2 rotation with a symmetric agreement set never empties:
        // resource error at the cap.
        assert!(rotation_window_bound(&rat(1, 2), &binary, &rat(1, 5), 50).is_err());
    }

    #[test]
    fn rotation_runs_respect_bound() {
        let map = IntervalMap::rotation(64).unwrap();
        let angle = map.rotation_angle().unwrap().clone();
        let binary = Partition::binary();
        let d = rat(2, 5);
        let bound = rotation_window_bound(&angle, &binary, &d, 1000).unwrap();
        for i in 0..10u64 {
            let x0 = sample_initial(SeedSpec::new(55, i), 64);
            let y0 = frac_mod1(&(&x0 + &d));
            let mut cursors = vec![
                EncodedTrajectory::new(TrajectorySource::open(&map, x0).unwrap(), &binary),
                EncodedTrajectory::new(TrajectorySource::open(&map, y0).unwrap(), &binary),
            ];
            let runs = max_run_prefixes(&mut cursors, &[20_000]).unwrap();
            assert!(runs[0] <= bound, "run {} exceeds bound {bound}", runs[0]);
        }
    }

    #[test]
    fn bit_fast_path_matches_generic_scan() {
        let map = IntervalMap::doubling();
        let binary = Partition::binary();
        for i in 0..10u64 {
            let sa = SeedSpec::new(123, 2 * i);
            let sb = SeedSpec::new(123, 2 * i + 1);
            let fast = bit_pair_max_run(sa, sb, &[64, 1024, 4096]).unwrap();
            let mut cursors = vec![
                EncodedTrajectory::new(
                    TrajectorySource::open_seeded(&map, sa, 4096, None).unwrap(),
                    &binary,
                ),
                EncodedTrajectory::new(
                    TrajectorySource::open_seeded(&map, sb, 4096, None).unwrap(),
                    &binary,
                ),
            ];
            let slow = max_run_prefixes(&mut cursors, &[64, 1024, 4096]).unwrap();
            assert_eq!(fast, slow);
        }
    }
}
