//! Finite interval partitions, the raw-coding map, exact preimages and
//! refinement (cylinder) tables.
//!
//! A partition splits [0,1) into half-open rational intervals of positive
//! length; the code of an orbit is the sequence of cell indices it visits.
//! Refinements carry the same information set-wise: the order-n table lists
//! every nonempty cylinder (word of length n+1 together with its exact
//! support and Lebesgue measure).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::dynamics::{IntervalMap, ShiftRule, TrajectorySource};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rational::{in_unit_interval, parse_rational, Rational};
use crate::rng::BitBuffer;

/// Ordered list of half-open rational intervals tiling [0,1), each of
/// positive length. Cell indices are the code alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Interval>,
}

impl Partition {
    pub fn new(mut cells: Vec<Interval>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Input("a partition needs at least one cell".into()));
        }
        cells.sort_by(|a, b| a.lo().cmp(b.lo()));
        let mut cursor = Rational::zero();
        for cell in &cells {
            if cell.lo() != &cursor {
                return Err(Error::Input(format!(
                    "partition cells must tile [0,1): gap or overlap at {cursor}"
                )));
            }
            cursor = cell.hi().clone();
        }
        if cursor != Rational::one() {
            return Err(Error::Input(format!(
                "partition cells must tile [0,1): end at {cursor}, not 1"
            )));
        }
        Ok(Partition { cells })
    }

    /// {[0,1/2), [1/2,1)}.
    pub fn binary() -> Self {
        Partition::dyadic(1).unwrap()
    }

    /// 2^k equal dyadic cells.
    pub fn dyadic(k: u32) -> Result<Self> {
        if k > 20 {
            return Err(Error::Resource(format!(
                "dyadic partition order {k} exceeds the cap of 20"
            )));
        }
        let m = 1u64 << k;
        let cells = (0..m)
            .map(|i| {
                Interval::new(
                    Rational::new((i as i64).into(), (m as i64).into()),
                    Rational::new((i as i64 + 1).into(), (m as i64).into()),
                )
                .unwrap()
            })
            .collect();
        Ok(Partition { cells })
    }

    /// The straddling cell [1/2 - 2^-k, 1/2 + 2^-k) plus the maximal dyadic
    /// completion of its complement. Cells are listed in positional order.
    pub fn bridge(k: u32) -> Result<Self> {
        if k == 0 || k > 60 {
            return Err(Error::Input(format!(
                "bridge partition needs 1 <= k <= 60 so the straddling cell fits in [0,1), got {k}"
            )));
        }
        // Work in units of 2^-k: the straddling cell is [h-1, h+1) where
        // h = 2^(k-1).
        let unit = 1u64 << k;
        let half = unit / 2;
        let mut cells = dyadic_tiles(0, half - 1);
        cells.push((half - 1, half + 1));
        cells.extend(dyadic_tiles(half + 1, unit));
        let cells = cells
            .into_iter()
            .map(|(lo, hi)| {
                Interval::new(
                    Rational::new((lo as i64).into(), (unit as i64).into()),
                    Rational::new((hi as i64).into(), (unit as i64).into()),
                )
                .unwrap()
            })
            .collect();
        Partition::new(cells)
    }

    /// Parses the partition file format: one cell per line, "lo hi" with
    /// rational endpoints, sorted, tiling [0,1). Blank lines and lines
    /// starting with '#' are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        let mut prev_lo: Option<Rational> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (lo, hi) = match (parts.next(), parts.next(), parts.next()) {
                (Some(lo), Some(hi), None) => (lo, hi),
                _ => {
                    return Err(Error::Input(format!(
                        "partition line {}: expected \"lo hi\", got {line:?}",
                        lineno + 1
                    )))
                }
            };
            let lo = parse_rational(lo)?;
            let hi = parse_rational(hi)?;
            if let Some(prev) = &prev_lo {
                if &lo < prev {
                    return Err(Error::Input(format!(
                        "partition line {}: cells must be sorted",
                        lineno + 1
                    )));
                }
            }
            prev_lo = Some(lo.clone());
            cells.push(Interval::new(lo, hi)?);
        }
        Partition::new(cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn alphabet(&self) -> u32 {
        self.cells.len() as u32
    }

    pub fn cells(&self) -> &[Interval] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Interval {
        &self.cells[i]
    }

    pub fn cell_set(&self, i: usize) -> IntervalSet {
        IntervalSet::from_interval(self.cells[i].clone())
    }

    /// Internal boundaries c_1 < ... < c_{M-1} (cell i-1 ends where c_i
    /// starts).
    pub fn boundaries(&self) -> impl Iterator<Item = &Rational> {
        self.cells.iter().skip(1).map(|c| c.lo())
    }

    /// Index of the unique cell containing x.
    pub fn locate(&self, x: &Rational) -> Result<u32> {
        if !in_unit_interval(x) {
            return Err(Error::Domain(x.to_string()));
        }
        let idx = self.cells.partition_point(|c| c.lo() <= x);
        Ok(idx as u32 - 1)
    }
}

/// Greedy maximal dyadic tiling of the integer range [lo, hi).
fn dyadic_tiles(mut lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut tiles = Vec::new();
    while lo < hi {
        let align = if lo == 0 {
            u64::MAX
        } else {
            1 << lo.trailing_zeros()
        };
        let mut step = align.min(hi - lo);
        // Round the step down to a power of two.
        step = 1 << (63 - step.leading_zeros());
        tiles.push((lo, lo + step));
        lo += step;
    }
    tiles
}

/// Finite symbol sequence over the alphabet {0, ..., alphabet-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    alphabet: u32,
    symbols: Vec<u32>,
}

impl SymbolStream {
    pub fn new(alphabet: u32, symbols: Vec<u32>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::Input("alphabet size must be positive".into()));
        }
        if let Some(bad) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::Input(format!(
                "symbol {bad} outside the alphabet 0..{alphabet}"
            )));
        }
        Ok(SymbolStream { alphabet, symbols })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }
}

/// Returns the cell index of x.
pub fn encode_point(partition: &Partition, x: &Rational) -> Result<u32> {
    partition.locate(x)
}

/// Lazily generated binary expansion of a partition boundary, used to
/// classify bit-stream orbit points without materializing rationals.
struct BoundaryBits {
    bits: Vec<u8>,
    remainder: BigUint,
    denom: BigUint,
    terminated: bool,
}

impl BoundaryBits {
    fn new(c: &Rational) -> Self {
        BoundaryBits {
            bits: Vec::new(),
            remainder: c.numer().magnitude().clone(),
            denom: c.denom().magnitude().clone(),
            terminated: false,
        }
    }

    /// Fractional bit i (1-indexed); `None` once the expansion has
    /// terminated (dyadic boundary, all further bits zero).
    fn bit(&mut self, i: u64) -> Option<u8> {
        while (self.bits.len() as u64) < i {
            if self.terminated {
                return None;
            }
            self.remainder <<= 1;
            if self.remainder >= self.denom {
                self.remainder -= &self.denom;
                self.bits.push(1);
            } else {
                self.bits.push(0);
            }
            if self.remainder.is_zero() {
                self.terminated = true;
            }
        }
        self.bits.get((i - 1) as usize).copied()
    }
}

fn orbit_bit(buffer: &mut BitBuffer, rule: ShiftRule, head: u8, t: u64, i: u64) -> u8 {
    match rule {
        ShiftRule::DropFirst => buffer.bit(t + i),
        ShiftRule::KeepHeadDropSecond => {
            if i == 1 {
                head
            } else {
                buffer.bit(t + i)
            }
        }
    }
}

/// True iff the orbit point at time t is strictly below the boundary.
/// Exact, and always terminates: the orbit point is dyadic while a
/// non-dyadic boundary has infinitely many one-bits.
fn orbit_below(
    buffer: &mut BitBuffer,
    rule: ShiftRule,
    head: u8,
    t: u64,
    bound: &mut BoundaryBits,
) -> bool {
    let mut i = 1u64;
    loop {
        match bound.bit(i) {
            None => return false, // boundary tail is all zeros: point >= boundary
            Some(cb) => {
                let yb = orbit_bit(buffer, rule, head, t, i);
                if yb != cb {
                    return yb < cb;
                }
            }
        }
        i += 1;
    }
}

enum EncInner<'a> {
    Points { partition: &'a Partition },
    Bits { bounds: Vec<BoundaryBits> },
    Rotation { thresholds: Vec<BigUint> },
}

/// Lazy symbol cursor over a trajectory: yields the code of x, Tx, T^2 x,
/// ... one symbol at a time, exact under the source's backend.
pub struct EncodedTrajectory<'a> {
    source: TrajectorySource,
    inner: EncInner<'a>,
    alphabet: u32,
}

impl<'a> EncodedTrajectory<'a> {
    /// Wraps a trajectory source with the fastest exact classifier its
    /// backend supports.
    pub fn new(mut source: TrajectorySource, partition: &'a Partition) -> Self {
        let alphabet = partition.alphabet();
        let inner = if source.inner_bits().is_some() {
            EncInner::Bits {
                bounds: partition.boundaries().map(BoundaryBits::new).collect(),
            }
        } else if let Some((_, denom, _)) = source.inner_rotation() {
            // Point n/denom lies below boundary a/b iff n < ceil(a*denom/b).
            let thresholds = partition
                .boundaries()
                .map(|c| {
                    let a = c.numer().magnitude();
                    let b = c.denom().magnitude();
                    (a * denom + b - BigUint::one()).div_floor(b)
                })
                .collect();
            EncInner::Rotation { thresholds }
        } else {
            EncInner::Points { partition }
        };
        EncodedTrajectory {
            source,
            inner,
            alphabet,
        }
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn position(&self) -> u64 {
        self.source.position()
    }

    /// Code symbol of the current orbit point; advances the cursor.
    pub fn next_symbol(&mut self) -> Result<u32> {
        match &mut self.inner {
            EncInner::Points { partition } => {
                let x = self.source.next_point()?;
                partition.locate(&x)
            }
            EncInner::Bits { bounds } => {
                let t = self.source.position();
                self.source.bump_position()?;
                let (buffer, rule, head, _) = self.source.inner_bits().expect("bit source");
                let mut sym = 0u32;
                for bound in bounds.iter_mut() {
                    if orbit_below(buffer, rule, head, t, bound) {
                        break;
                    }
                    sym += 1;
                }
                Ok(sym)
            }
            EncInner::Rotation { thresholds } => {
                self.source.bump_position()?;
                let (numer, denom, step) = self.source.inner_rotation().expect("rotation source");
                let sym = thresholds.partition_point(|thr| thr <= &*numer) as u32;
                *numer += step;
                if &*numer >= denom {
                    *numer -= denom;
                }
                Ok(sym)
            }
        }
    }
}

/// Materializes the first `horizon` code symbols of a trajectory.
pub fn encode_trajectory(
    source: TrajectorySource,
    partition: &Partition,
    horizon: u64,
) -> Result<SymbolStream> {
    let mut cursor = EncodedTrajectory::new(source, partition);
    let mut symbols = Vec::with_capacity(horizon.min(1 << 24) as usize);
    for _ in 0..horizon {
        symbols.push(cursor.next_symbol()?);
    }
    SymbolStream::new(partition.alphabet(), symbols)
}

/// Exact T^-1(s): union of per-branch affine preimages clipped to the
/// branch domains.
pub fn preimage(map: &IntervalMap, s: &IntervalSet) -> IntervalSet {
    let mut spans = Vec::new();
    for br in map.branches() {
        let inv_slope = Rational::one() / &br.slope;
        let inv_offset = -&br.offset / &br.slope;
        let pulled = s
            .affine(&inv_slope, &inv_offset)
            .expect("map slopes are positive");
        let clipped = pulled.intersect(&IntervalSet::from_interval(br.domain.clone()));
        spans.extend(clipped.spans().iter().cloned());
    }
    IntervalSet::from_spans(spans)
}

/// Word of length n+1 together with its exact support and measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub word: Vec<u32>,
    pub support: IntervalSet,
    pub measure: Rational,
}

/// All nonempty cylinders of a given refinement order.
#[derive(Debug, Clone)]
pub struct RefinementTable {
    order: u32,
    alphabet: u32,
    cylinders: Vec<Cylinder>,
}

impl RefinementTable {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    /// The unique cylinder whose support contains x, if any.
    pub fn locate(&self, x: &Rational) -> Option<&Cylinder> {
        self.cylinders.iter().find(|c| c.support.contains(x))
    }

    /// Cylinder with an exact word match.
    pub fn find(&self, word: &[u32]) -> Option<&Cylinder> {
        self.cylinders.iter().find(|c| c.word == word)
    }

    pub fn total_measure(&self) -> Rational {
        let mut total = Rational::zero();
        for c in &self.cylinders {
            total += &c.measure;
        }
        total
    }
}

pub const DEFAULT_REFINE_CAP: u32 = 20;

/// Order-n refinement with the default order cap.
pub fn refine(map: &IntervalMap, partition: &Partition, n: u32) -> Result<RefinementTable> {
    refine_with_cap(map, partition, n, DEFAULT_REFINE_CAP)
}

/// Order-n refinement table: every nonempty cylinder of word length n+1.
///
/// Built by the refinement recursion — the order n+1 table is the common
/// refinement of the partition with the preimage of the order-n table —
/// pruning empty supports as words are extended, so cost scales with the
/// number of admissible words rather than with alphabet^(n+1).
pub fn refine_with_cap(
    map: &IntervalMap,
    partition: &Partition,
    n: u32,
    cap: u32,
) -> Result<RefinementTable> {
    if n > cap {
        return Err(Error::Resource(format!(
            "refinement order {n} exceeds the cap of {cap} \
             (cell counts can grow exponentially)"
        )));
    }
    let mut cylinders: Vec<Cylinder> = (0..partition.len())
        .map(|i| {
            let support = partition.cell_set(i);
            let measure = support.measure();
            Cylinder {
                word: vec![i as u32],
                support,
                measure,
            }
        })
        .collect();
    for _ in 0..n {
        let mut next = Vec::with_capacity(cylinders.len() * 2);
        for a in 0..partition.len() {
            let cell = partition.cell_set(a);
            for cyl in &cylinders {
                let pulled = preimage(map, &cyl.support);
                let support = cell.intersect(&pulled);
                if support.is_empty() {
                    continue;
                }
                let mut word = Vec::with_capacity(cyl.word.len() + 1);
                word.push(a as u32);
                word.extend_from_slice(&cyl.word);
                let measure = support.measure();
                next.push(Cylinder {
                    word,
                    support,
                    measure,
                });
            }
        }
        cylinders = next;
    }
    Ok(RefinementTable {
        order: n,
        alphabet: partition.alphabet(),
        cylinders,
    })
}

/// Exact Lebesgue measure of an interval set.
pub fn measure(s: &IntervalSet) -> Rational {
    s.measure()
}
