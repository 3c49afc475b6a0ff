//! Computable mixing diagnostics for the interval maps.
//!
//! The central quantity is the correlation term |m(T^-k A intersect B) -
//! m(A) m(B)| and its Cesaro averages W_n: they vanish in the limit exactly
//! when the map mixes the two sets, and they stay bounded away from zero
//! for the rotation. Terms are computed exactly (iterated preimages and
//! interval algebra) when the interval count allows it, or by seeded Monte
//! Carlo with a distribution-free confidence bound otherwise.
//!
//! The Ulam model coarse-grains a map to a finite row-stochastic matrix
//! over a bin partition; its support digraph exposes ergodic decomposition
//! (closed communicating classes) and primitivity at the matrix level.

use serde::Serialize;

use crate::baselines::{
    is_primitive, strongly_connected_components, PrimitivityReport, StochasticMatrix,
};
use crate::coding::{preimage, Partition};
use crate::dynamics::{IntervalMap, TrajectorySource};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::rational::{to_f64, Rational};
use crate::rng::SeedSpec;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Piece-count cap for the exact correlation routes.
pub const DEFAULT_EXACT_INTERVAL_CAP: usize = 1 << 20;

/// Piecewise-constant density on [0,1): disjoint sorted pieces with
/// rational values, zero elsewhere. Closed under the transfer operator of
/// a piecewise-affine map, with only linear piece growth per step — which
/// is what makes exact correlation terms reachable at large k, where the
/// k-fold preimage would need exponentially many intervals.
#[derive(Debug, Clone)]
struct Density {
    pieces: Vec<(Rational, Rational, Rational)>, // (lo, hi, value)
}

impl Density {
    fn indicator(set: &IntervalSet) -> Self {
        Density {
            pieces: set
                .spans()
                .iter()
                .map(|iv| (iv.lo().clone(), iv.hi().clone(), Rational::one()))
                .collect(),
        }
    }

    /// Transfer-operator step: push the measure (density dx) forward
    /// through the map. Each branch maps a piece affinely and divides its
    /// value by the slope; overlapping images add.
    fn push_forward(&self, map: &IntervalMap) -> Self {
        let mut events: Vec<(Rational, Rational)> = Vec::new();
        for br in map.branches() {
            for (lo, hi, value) in &self.pieces {
                let clip_lo = if lo >= br.domain.lo() {
                    lo
                } else {
                    br.domain.lo()
                };
                let clip_hi = if hi <= br.domain.hi() {
                    hi
                } else {
                    br.domain.hi()
                };
                if clip_lo >= clip_hi {
                    continue;
                }
                let img_lo = clip_lo * &br.slope + &br.offset;
                let img_hi = clip_hi * &br.slope + &br.offset;
                let pushed = value / &br.slope;
                events.push((img_lo, pushed.clone()));
                events.push((img_hi, -pushed));
            }
        }
        events.sort_by(|x, y| x.0.cmp(&y.0));
        let mut pieces = Vec::new();
        let mut level = Rational::zero();
        let mut idx = 0;
        while idx < events.len() {
            let pos = events[idx].0.clone();
            while idx < events.len() && events[idx].0 == pos {
                level += &events[idx].1;
                idx += 1;
            }
            let next = match events.get(idx) {
                Some(e) => e.0.clone(),
                None => break,
            };
            if !level.is_zero() && pos < next {
                // Merge with the previous piece when values line up.
                match pieces.last_mut() {
                    Some((_, hi, value)) if *hi == pos && *value == level => {
                        *hi = next;
                    }
                    _ => pieces.push((pos, next, level.clone())),
                }
            }
        }
        Density { pieces }
    }

    fn integrate_over(&self, set: &IntervalSet) -> Rational {
        let mut total = Rational::zero();
        for (lo, hi, value) in &self.pieces {
            let piece = IntervalSet::from_interval(
                crate::interval::Interval::new(lo.clone(), hi.clone()).expect("nonempty piece"),
            );
            total += piece.intersect(set).measure() * value;
        }
        total
    }

    fn len(&self) -> usize {
        self.pieces.len()
    }
}

/// Exact m(T^-k A intersect B), default piece cap.
pub fn correlation_exact(
    map: &IntervalMap,
    a: &IntervalSet,
    b: &IntervalSet,
    k: u64,
) -> Result<Rational> {
    correlation_exact_with_cap(map, a, b, k, DEFAULT_EXACT_INTERVAL_CAP)
}

/// Exact m(T^-k A intersect B) = integral over A of the k-th pushforward
/// of the indicator of B.
pub fn correlation_exact_with_cap(
    map: &IntervalMap,
    a: &IntervalSet,
    b: &IntervalSet,
    k: u64,
    cap: usize,
) -> Result<Rational> {
    let mut density = Density::indicator(b);
    for step in 0..k {
        density = density.push_forward(map);
        if density.len() > cap {
            return Err(Error::Resource(format!(
                "pushforward density grew to {} pieces at step {} (cap {cap})",
                density.len(),
                step + 1
            )));
        }
    }
    Ok(density.integrate_over(a))
}

/// The same quantity by the textbook route — intersect B with the k-fold
/// preimage of A. Exponential in k for expanding maps, so this is the
/// small-k cross-check for the pushforward, not the workhorse.
pub fn correlation_exact_preimage(
    map: &IntervalMap,
    a: &IntervalSet,
    b: &IntervalSet,
    k: u64,
    cap: usize,
) -> Result<Rational> {
    let mut pulled = a.clone();
    for step in 0..k {
        pulled = preimage(map, &pulled);
        if pulled.span_count() > cap {
            return Err(Error::Resource(format!(
                "iterated preimage grew to {} intervals at step {} (cap {cap})",
                pulled.span_count(),
                step + 1
            )));
        }
    }
    Ok(pulled.intersect(b).measure())
}

/// Monte Carlo estimate with a 99% distribution-free confidence bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    /// Hoeffding half-width: containing the true mean with probability at
    /// least 0.99 regardless of the distribution.
    pub ci99_halfwidth: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Estimates m(T^-k A intersect B) as the fraction of uniform samples x
/// with x in B and T^k x in A.
pub fn correlation_mc(
    map: &IntervalMap,
    a: &IntervalSet,
    b: &IntervalSet,
    k: u64,
    samples: u64,
    seed: SeedSpec,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Input("need at least one sample".into()));
    }
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let sub = SeedSpec::new(seed.master, seed.stream.wrapping_add(i));
            let mut src = TrajectorySource::open_seeded(map, sub, k + 1, None)?;
            let x0 = src.next_point()?;
            if !b.contains(&x0) {
                return Ok(0);
            }
            let mut xk = x0;
            for _ in 0..k {
                xk = src.next_point()?;
            }
            Ok(a.contains(&xk) as u64)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    let n = samples as f64;
    Ok(McEstimate {
        value: hits as f64 / n,
        ci99_halfwidth: (f64::ln(2.0 / 0.01) / (2.0 * n)).sqrt(),
        hits,
        samples,
    })
}

/// How correlation terms are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    Exact,
    MonteCarlo {
        samples: u64,
    },
    /// Exact while the interval cap holds, Monte Carlo beyond (exact terms
    /// are reported with a zero confidence width).
    Auto {
        samples: u64,
    },
}

#[derive(Debug, Clone)]
pub enum MixingData {
    Exact {
        terms: Vec<Rational>,
        cesaro: Vec<Rational>,
    },
    MonteCarlo {
        terms: Vec<McEstimate>,
        cesaro: Vec<f64>,
    },
}

/// The correlation-defect series |m(T^-k A intersect B) - m(A) m(B)| for
/// k = 0..n-1 together with all Cesaro prefix averages W_1..W_n.
#[derive(Debug, Clone)]
pub struct MixingSeries {
    pub set_a: IntervalSet,
    pub set_b: IntervalSet,
    pub data: MixingData,
}

impl MixingSeries {
    /// Cesaro averages as floats, whichever way the terms were computed.
    pub fn cesaro_f64(&self) -> Vec<f64> {
        match &self.data {
            MixingData::Exact { cesaro, .. } => cesaro.iter().map(to_f64).collect(),
            MixingData::MonteCarlo { cesaro, .. } => cesaro.clone(),
        }
    }
}

fn cesaro_prefixes(terms: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(terms.len());
    let mut acc = Rational::zero();
    for (i, t) in terms.iter().enumerate() {
        acc += t;
        out.push(&acc / Rational::new((i as i64 + 1).into(), 1.into()));
    }
    out
}

pub fn weak_mixing_series(
    map: &IntervalMap,
    a: &IntervalSet,
    b: &IntervalSet,
    n: u64,
    mode: CorrelationMode,
    seed: SeedSpec,
) -> Result<MixingSeries> {
    if n == 0 {
        return Err(Error::Input("series length must be at least 1".into()));
    }
    let product = a.measure() * b.measure();
    match mode {
        CorrelationMode::Exact => {
            // One incremental forward pass covers every k.
            let mut density = Density::indicator(b);
            let mut terms = Vec::with_capacity(n as usize);
            for k in 0..n {
                if k > 0 {
                    density = density.push_forward(map);
                    if density.len() > DEFAULT_EXACT_INTERVAL_CAP {
                        return Err(Error::Resource(format!(
                            "pushforward density grew to {} pieces at step {k}",
                            density.len()
                        )));
                    }
                }
                terms.push((density.integrate_over(a) - &product).abs());
            }
            let cesaro = cesaro_prefixes(&terms);
            Ok(MixingSeries {
                set_a: a.clone(),
                set_b: b.clone(),
                data: MixingData::Exact { terms, cesaro },
            })
        }
        CorrelationMode::MonteCarlo { samples } => {
            let product_f = to_f64(&product);
            let mut terms = Vec::with_capacity(n as usize);
            for k in 0..n {
                let sub = SeedSpec::new(seed.master, seed.stream.wrapping_add(k << 32));
                let est = correlation_mc(map, a, b, k, samples, sub)?;
                terms.push(McEstimate {
                    value: (est.value - product_f).abs(),
                    ..est
                });
            }
            let values: Vec<f64> = terms.iter().map(|t| t.value).collect();
            let mut cesaro = Vec::with_capacity(values.len());
            let mut acc = 0.0;
            for (i, v) in values.iter().enumerate() {
                acc += v;
                cesaro.push(acc / (i as f64 + 1.0));
            }
            Ok(MixingSeries {
                set_a: a.clone(),
                set_b: b.clone(),
                data: MixingData::MonteCarlo { terms, cesaro },
            })
        }
        CorrelationMode::Auto { samples } => {
            // Exact as far as the piece cap allows, Monte Carlo from there
            // on; exact terms carry a zero confidence width.
            let product_f = to_f64(&product);
            let mut terms = Vec::with_capacity(n as usize);
            let mut density = Some(Density::indicator(b));
            for k in 0..n {
                if let Some(d) = density.take() {
                    let d = if k == 0 { d } else { d.push_forward(map) };
                    if d.len() <= DEFAULT_EXACT_INTERVAL_CAP {
                        let defect = (d.integrate_over(a) - &product).abs();
                        terms.push(McEstimate {
                            value: to_f64(&defect),
                            ci99_halfwidth: 0.0,
                            hits: 0,
                            samples: 0,
                        });
                        density = Some(d);
                        continue;
                    }
                }
                let sub = SeedSpec::new(seed.master, seed.stream.wrapping_add(k << 32));
                let est = correlation_mc(map, a, b, k, samples, sub)?;
                terms.push(McEstimate {
                    value: (est.value - product_f).abs(),
                    ..est
                });
            }
            let mut cesaro = Vec::with_capacity(terms.len());
            let mut acc = 0.0;
            for (i, t) in terms.iter().enumerate() {
                acc += t.value;
                cesaro.push(acc / (i as f64 + 1.0));
            }
            Ok(MixingSeries {
                set_a: a.clone(),
                set_b: b.clone(),
                data: MixingData::MonteCarlo { terms, cesaro },
            })
        }
    }
}

/// Finite coarse-graining of a map: bins plus the exact row-stochastic
/// matrix P_ij = m(B_i intersect T^-1 B_j) / m(B_i).
#[derive(Debug, Clone)]
pub struct UlamModel {
    pub bins: Partition,
    pub matrix: StochasticMatrix,
}

pub fn ulam_matrix(map: &IntervalMap, bins: &Partition) -> UlamModel {
    let m = bins.len();
    let preimages: Vec<IntervalSet> = (0..m).map(|j| preimage(map, &bins.cell_set(j))).collect();
    let rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let cell = bins.cell_set(i);
            let width = cell.measure();
            (0..m)
                .map(|j| cell.intersect(&preimages[j]).measure() / &width)
                .collect()
        })
        .collect();
    let matrix =
        StochasticMatrix::new(rows).expect("exact Ulam rows are stochastic by construction");
    UlamModel {
        bins: bins.clone(),
        matrix,
    }
}

/// Matrix-level ergodic structure of an Ulam model.
#[derive(Debug, Clone)]
pub struct BlockReport {
    pub scc_count: usize,
    /// All strongly connected components (bin indices, sorted).
    pub sccs: Vec<Vec<usize>>,
    /// Components with no outgoing edges: the candidate ergodic components.
    pub closed_sccs: Vec<Vec<usize>>,
    pub primitivity: PrimitivityReport,
    /// Bin unions of the closed components.
    pub components: Vec<IntervalSet>,
}

pub fn ergodic_block_report(model: &UlamModel) -> BlockReport {
    let adj = model.matrix.support();
    let sccs = strongly_connected_components(&adj);
    let n = adj.len();
    let mut comp_of = vec![0usize; n];
    for (id, members) in sccs.iter().enumerate() {
        for &v in members {
            comp_of[v] = id;
        }
    }
    let mut closed_sccs = Vec::new();
    let mut components = Vec::new();
    for (id, members) in sccs.iter().enumerate() {
        let closed = members
            .iter()
            .all(|&u| (0..n).all(|v| !adj[u][v] || comp_of[v] == id));
        if closed {
            closed_sccs.push(members.clone());
            let mut union = IntervalSet::empty();
            for &b in members {
                union = union.union(&model.bins.cell_set(b));
            }
            components.push(union);
        }
    }
    BlockReport {
        scc_count: sccs.len(),
        sccs,
        closed_sccs,
        primitivity: is_primitive(&model.matrix),
        components,
    }
}
