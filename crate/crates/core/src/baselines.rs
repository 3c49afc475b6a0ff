//! Exact stochastic baselines: Bernoulli and finite Markov symbol sources,
//! word-match probabilities, the per-step coincidence rate of N independent
//! copies, primitivity of transition matrices, and the absorbing-chain
//! oracle for run waiting times.
//!
//! The run-waiting oracle is the quantitative anchor for the coincidence
//! experiments: the mean completion time of a length-L success run is
//! computed by two independent routes (fundamental-matrix solve and the
//! closed form), which must agree exactly as rationals.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::coding::SymbolStream;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};
use crate::rng::SeedSpec;
use rand_core::RngCore;

/// Probabilities p_0..p_{M-1}, nonnegative rationals summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliSpec {
    probs: Vec<Rational>,
}

impl BernoulliSpec {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Input("need at least one symbol probability".into()));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::Input("probabilities must be nonnegative".into()));
        }
        let total: Rational = probs.iter().sum();
        if total != Rational::one() {
            return Err(Error::Input(format!(
                "probabilities must sum to 1, got {total}"
            )));
        }
        Ok(BernoulliSpec { probs })
    }

    /// Fair binary source.
    pub fn fair_binary() -> Self {
        BernoulliSpec::new(vec![
            Rational::new(1.into(), 2.into()),
            Rational::new(1.into(), 2.into()),
        ])
        .unwrap()
    }

    /// Uniform source over m symbols.
    pub fn uniform(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("alphabet must be nonempty".into()));
        }
        let p = Rational::new(1.into(), (m as i64).into());
        BernoulliSpec::new(vec![p; m as usize])
    }

    pub fn alphabet(&self) -> u32 {
        self.probs.len() as u32
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }
}

/// Exact probability that a realization matches the fixed word at a fixed
/// position: the product of the per-symbol probabilities.
pub fn window_match_probability(spec: &BernoulliSpec, word: &[u32]) -> Result<Rational> {
    let mut p = Rational::one();
    for &w in word {
        let pw = spec
            .probs
            .get(w as usize)
            .ok_or_else(|| Error::Input(format!("symbol {w} outside the alphabet")))?;
        p *= pw;
    }
    Ok(p)
}

/// Per-position probability that N independent draws from the source all
/// coincide: sum of p_i^N.
pub fn coincidence_rate(spec: &BernoulliSpec, n: u32) -> Result<Rational> {
    if n < 2 {
        return Err(Error::Input(format!("need at least 2 copies, got {n}")));
    }
    let mut q = Rational::zero();
    for p in &spec.probs {
        let mut term = Rational::one();
        for _ in 0..n {
            term *= p;
        }
        q += term;
    }
    Ok(q)
}

/// Exact distribution of the first completion time of a length-L success
/// run in i.i.d. Bernoulli(q) trials (trials indexed 1, 2, 3, ...).
#[derive(Debug, Clone)]
pub struct RunWaitingDistribution {
    pub per_step: Rational,
    pub run_length: u32,
    pub horizon: u64,
    /// pmf[t-1] = P(first run completes at trial t), t = 1..=horizon.
    pub pmf: Vec<Rational>,
    /// P(no completed run within the horizon).
    pub deficit: Rational,
    /// Exact expected completion time (over the unbounded horizon), from
    /// the fundamental-matrix solve of the streak chain.
    pub mean: Rational,
}

impl RunWaitingDistribution {
    pub fn pmf_f64(&self) -> Vec<f64> {
        self.pmf.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect()
    }
}

/// Closed-form mean completion time (1 - q^L) / ((1-q) q^L).
pub fn run_waiting_mean_closed_form(per_step: &Rational, run_length: u32) -> Rational {
    let mut ql = Rational::one();
    for _ in 0..run_length {
        ql *= per_step;
    }
    (Rational::one() - &ql) / ((Rational::one() - per_step) * ql)
}

/// Absorbing streak chain on states 0..L: exact pmf by state-vector
/// propagation and exact mean by a linear solve. The mean is checked
/// against the closed form by the tests (two independent routes).
pub fn run_waiting(
    per_step: &Rational,
    run_length: u32,
    horizon: u64,
) -> Result<RunWaitingDistribution> {
    if per_step <= &Rational::zero() || per_step >= &Rational::one() {
        return Err(Error::Degenerate(format!(
            "per-step success probability must be strictly between 0 and 1, got {per_step}"
        )));
    }
    if run_length == 0 {
        return Err(Error::Input("run length must be at least 1".into()));
    }
    let l = run_length as usize;
    let q = per_step.clone();
    let fail = Rational::one() - &q;

    // State s = current success streak, 0..L-1 transient; completion of the
    // L-th success absorbs.
    let mut state = vec![Rational::zero(); l];
    state[0] = Rational::one();
    let mut pmf = Vec::with_capacity(horizon.min(1 << 24) as usize);
    let mut absorbed = Rational::zero();
    for _ in 0..horizon {
        let complete = &q * &state[l - 1];
        let mut next = vec![Rational::zero(); l];
        let alive: Rational = state.iter().sum();
        next[0] = &fail * &alive;
        for s in 0..l - 1 {
            next[s + 1] = &q * &state[s];
        }
        absorbed += &complete;
        pmf.push(complete);
        state = next;
    }
    let deficit = Rational::one() - absorbed;

    // Fundamental-matrix route: (I - Q) m = 1, mean = m[0].
    let mut a = vec![vec![Rational::zero(); l]; l];
    for (s, row) in a.iter_mut().enumerate() {
        row[s] += Rational::one();
        // failure: s -> 0
        row[0] -= &fail;
        // success: s -> s+1 while transient
        if s + 1 < l {
            row[s + 1] -= &q;
        }
    }
    let b = vec![Rational::one(); l];
    let m = solve_linear(a, b).ok_or_else(|| {
        Error::Degenerate("streak chain has a singular fundamental system".into())
    })?;

    Ok(RunWaitingDistribution {
        per_step: q,
        run_length,
        horizon,
        pmf,
        deficit,
        mean: m[0].clone(),
    })
}

/// Gaussian elimination over exact rationals; `None` for singular systems.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &factor * &b[col];
            b[r] -= sub;
        }
    }
    Some(b)
}

/// Row-stochastic matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix {
    rows: Vec<Vec<Rational>>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Input("matrix must be nonempty".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|p| p.is_negative()) {
                return Err(Error::Input(format!("row {i} has a negative entry")));
            }
            let total: Rational = row.iter().sum();
            if total != Rational::one() {
                return Err(Error::Input(format!("row {i} sums to {total}, not 1")));
            }
        }
        Ok(StochasticMatrix { rows })
    }

    /// Parses the matrix file format: one row per line, whitespace-separated
    /// rationals. Blank lines and '#' comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        StochasticMatrix::new(rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    /// Adjacency of the support digraph: edge i -> j iff the entry is
    /// positive.
    pub fn support(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|p| p.is_positive()).collect())
            .collect()
    }
}

/// Finite Markov chain: transition matrix plus initial distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovChainSpec {
    pub matrix: StochasticMatrix,
    pub initial: Vec<Rational>,
}

impl MarkovChainSpec {
    pub fn new(matrix: StochasticMatrix, initial: Vec<Rational>) -> Result<Self> {
        if initial.len() != matrix.size() {
            return Err(Error::Input(format!(
                "initial distribution has {} entries for a {}-state chain",
                initial.len(),
                matrix.size()
            )));
        }
        if initial.iter().any(|p| p.is_negative()) {
            return Err(Error::Input(
                "initial distribution has a negative entry".into(),
            ));
        }
        let total: Rational = initial.iter().sum();
        if total != Rational::one() {
            return Err(Error::Input(format!(
                "initial distribution sums to {total}, not 1"
            )));
        }
        Ok(MarkovChainSpec { matrix, initial })
    }
}

/// 64-bit thresholds for exact-CDF inversion: a uniform draw r selects the
/// first symbol whose threshold exceeds r. Each symbol's realized
/// probability is within 2^-64 of the exact one.
fn cdf_thresholds(probs: &[Rational]) -> Vec<u128> {
    let scale = BigUint::one() << 64;
    let mut acc = Rational::zero();
    probs
        .iter()
        .map(|p| {
            acc += p;
            let scaled: BigUint = acc.numer().magnitude() * &scale / acc.denom().magnitude();
            scaled.to_u128().unwrap_or(u128::MAX)
        })
        .collect()
}

fn pick(thresholds: &[u128], draw: u64) -> u32 {
    thresholds.partition_point(|t| *t <= draw as u128) as u32
}

/// Seeded i.i.d. realization of the Bernoulli source.
pub fn bernoulli_stream(spec: &BernoulliSpec, seed: SeedSpec, length: u64) -> SymbolStream {
    let thresholds = cdf_thresholds(&spec.probs);
    let mut rng = seed.rng();
    let symbols = (0..length)
        .map(|_| pick(&thresholds, rng.next_u64()))
        .collect();
    SymbolStream::new(spec.alphabet(), symbols).expect("thresholds stay in range")
}

/// Seeded realization of the Markov chain.
pub fn markov_stream(spec: &MarkovChainSpec, seed: SeedSpec, length: u64) -> SymbolStream {
    let m = spec.matrix.size() as u32;
    let initial = cdf_thresholds(&spec.initial);
    let rows: Vec<Vec<u128>> = spec
        .matrix
        .rows()
        .iter()
        .map(|r| cdf_thresholds(r))
        .collect();
    let mut rng = seed.rng();
    let mut symbols = Vec::with_capacity(length.min(1 << 24) as usize);
    if length == 0 {
        return SymbolStream::new(m, symbols).unwrap();
    }
    let mut state = pick(&initial, rng.next_u64());
    symbols.push(state);
    for _ in 1..length {
        state = pick(&rows[state as usize], rng.next_u64());
        symbols.push(state);
    }
    SymbolStream::new(m, symbols).expect("states stay in range")
}

/// Primitivity verdict for a transition matrix: strong connectivity plus
/// aperiodicity, with the least positive power as witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitivityReport {
    pub primitive: bool,
    /// Least kappa with all entries of the kappa-th power positive, when
    /// primitive.
    pub kappa: Option<u64>,
    pub scc_count: usize,
    /// Cycle-length gcd of the support digraph, when strongly connected.
    pub period: Option<u64>,
}

/// Strongly connected components of an adjacency structure, iterative
/// Kosaraju. Component members are sorted; components come out in reverse
/// topological order of the condensation.
pub fn strongly_connected_components(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // Iterative post-order DFS.
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some((node, mut next)) = stack.pop() {
            let mut descended = false;
            while next < n {
                if adj[node][next] && !seen[next] {
                    seen[next] = true;
                    stack.push((node, next + 1));
                    stack.push((next, 0));
                    descended = true;
                    break;
                }
                next += 1;
            }
            if !descended {
                order.push(node);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut components = Vec::new();
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut stack = vec![start];
        while let Some(node) = stack.pop() {
            for prev in 0..n {
                // Reverse edge prev -> node.
                if adj[prev][node] && comp[prev] == usize::MAX {
                    comp[prev] = id;
                    members.push(prev);
                    stack.push(prev);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

fn graph_period(adj: &[Vec<bool>]) -> u64 {
    // BFS levels from node 0; the period is the gcd of depth(u)+1-depth(v)
    // over all edges u -> v (valid for strongly connected graphs).
    let n = adj.len();
    let mut depth = vec![i64::MIN; n];
    depth[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if adj[u][v] && depth[v] == i64::MIN {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: u64 = 0;
    for u in 0..n {
        for v in 0..n {
            if adj[u][v] {
                let diff = (depth[u] + 1 - depth[v]).unsigned_abs();
                g = num_integer::gcd(g, diff);
            }
        }
    }
    g.max(1)
}

/// Strong connectivity + aperiodicity check with the Wielandt-capped search
/// for the least positive power.
pub fn is_primitive(matrix: &StochasticMatrix) -> PrimitivityReport {
    let adj = matrix.support();
    let components = strongly_connected_components(&adj);
    let scc_count = components.len();
    if scc_count > 1 {
        return PrimitivityReport {
            primitive: false,
            kappa: None,
            scc_count,
            period: None,
        };
    }
    let period = graph_period(&adj);
    if period != 1 {
        return PrimitivityReport {
            primitive: false,
            kappa: None,
            scc_count,
            period: Some(period),
        };
    }
    // Aperiodic and strongly connected: primitive. Find the least kappa by
    // boolean powers, bounded by Wielandt's (n-1)^2 + 1.
    let n = adj.len();
    let wielandt = ((n as u64 - 1) * (n as u64 - 1)) + 1;
    let mut power = adj.clone();
    let mut kappa = 1u64;
    while kappa <= wielandt {
        if power.iter().all(|row| row.iter().all(|&x| x)) {
            return PrimitivityReport {
                primitive: true,
                kappa: Some(kappa),
                scc_count,
                period: Some(1),
            };
        }
        // power = power * adj (boolean).
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if power[i][k] {
                    for (j, cell) in next[i].iter_mut().enumerate() {
                        *cell |= adj[k][j];
                    }
                }
            }
        }
        power = next;
        kappa += 1;
    }
    // A strongly connected aperiodic support must go positive within the
    // Wielandt bound; reaching this point would mean the period detection
    // is wrong, so fail loudly in debug builds.
    debug_assert!(false, "primitive support did not reach positivity");
    PrimitivityReport {
        primitive: false,
        kappa: None,
        scc_count,
        period: Some(period),
    }
}

/// Exact stationary distribution of a chain with a unique one (solves
/// v^T pi = v^T with the normalization sum(v) = 1).
pub fn stationary_distribution(matrix: &StochasticMatrix) -> Result<Vec<Rational>> {
    let n = matrix.size();
    let mut a = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = matrix.entry(j, i).clone();
        }
        a[i][i] -= Rational::one();
    }
    // Replace the last equation with the normalization.
    for j in 0..n {
        a[n - 1][j] = Rational::one();
    }
    let mut b = vec![Rational::zero(); n];
    b[n - 1] = Rational::one();
    solve_linear(a, b)
        .ok_or_else(|| Error::Degenerate("chain has no unique stationary distribution".into()))
}
