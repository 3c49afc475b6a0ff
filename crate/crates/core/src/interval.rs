//! Exact interval-set algebra.
//!
//! All sets here are finite unions of half-open rational intervals [a,b).
//! Sets are kept normalized (sorted, disjoint, adjacent spans merged), so
//! structural equality is set equality and Lebesgue measure is an exact
//! rational sum of lengths.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{frac_mod1, Rational};

/// Half-open interval [lo, hi) with rational endpoints, lo < hi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Input(format!(
                "empty or reversed interval [{lo}, {hi})"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        x >= &self.lo && x < &self.hi
    }
}

/// Normalized finite union of half-open intervals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalSet {
    spans: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { spans: Vec::new() }
    }

    /// The whole phase space [0,1).
    pub fn unit() -> Self {
        IntervalSet {
            spans: vec![Interval::new(Rational::zero(), Rational::one()).unwrap()],
        }
    }

    pub fn from_interval(iv: Interval) -> Self {
        IntervalSet { spans: vec![iv] }
    }

    /// Builds a normalized set from arbitrary spans (they may overlap,
    /// touch, or arrive unsorted).
    pub fn from_spans(spans: impl IntoIterator<Item = Interval>) -> Self {
        let mut spans: Vec<Interval> = spans.into_iter().collect();
        spans.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(spans.len());
        for iv in spans {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        IntervalSet { spans: merged }
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn spans(&self) -> &[Interval] {
        &self.spans
    }

    pub fn span_count(&self) -> usize {
        self.spans.len()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rational {
        let mut total = Rational::zero();
        for iv in &self.spans {
            total += iv.length();
        }
        total
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // Binary search on the sorted spans.
        let idx = self.spans.partition_point(|iv| iv.lo <= *x);
        idx > 0 && self.spans[idx - 1].contains(x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_spans(self.spans.iter().chain(other.spans.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let a = &self.spans[i];
            let b = &other.spans[j];
            let lo = if a.lo >= b.lo {
                a.lo.clone()
            } else {
                b.lo.clone()
            };
            let hi = if a.hi <= b.hi {
                a.hi.clone()
            } else {
                b.hi.clone()
            };
            if lo < hi {
                out.push(Interval { lo, hi });
            }
            if a.hi <= b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of pairwise intersections are already disjoint and sorted.
        IntervalSet { spans: out }
    }

    /// Image under x -> slope*x + offset with slope > 0 (order preserving,
    /// so half-open spans stay half-open).
    pub fn affine(&self, slope: &Rational, offset: &Rational) -> Result<IntervalSet> {
        if !slope.is_positive() {
            return Err(Error::Input(format!(
                "affine image requires a positive slope, got {slope}"
            )));
        }
        let spans = self
            .spans
            .iter()
            .map(|iv| Interval {
                lo: &iv.lo * slope + offset,
                hi: &iv.hi * slope + offset,
            })
            .collect();
        Ok(IntervalSet { spans })
    }

    /// Translation modulo 1 of a subset of [0,1).
    pub fn translate_mod1(&self, shift: &Rational) -> Result<IntervalSet> {
        let mut out = Vec::new();
        let one = Rational::one();
        for iv in &self.spans {
            if iv.lo < Rational::zero() || iv.hi > one {
                return Err(Error::Input(format!(
                    "translate_mod1 needs a subset of [0,1), got [{}, {})",
                    iv.lo, iv.hi
                )));
            }
            let lo = frac_mod1(&(&iv.lo + shift));
            let hi = &lo + iv.length();
            if hi <= one {
                out.push(Interval { lo, hi });
            } else {
                // Wraps around the circle: split at 1.
                out.push(Interval {
                    lo,
                    hi: one.clone(),
                });
                let wrapped_hi = hi - &one;
                if wrapped_hi.is_positive() {
                    out.push(Interval {
                        lo: Rational::zero(),
                        hi: wrapped_hi,
                    });
                }
            }
        }
        Ok(IntervalSet::from_spans(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(rat(lo.0, lo.1), rat(hi.0, hi.1)).unwrap()
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(Interval::new(rat(1, 2), rat(1, 2)).is_err());
        assert!(Interval::new(rat(2, 3), rat(1, 3)).is_err());
    }

    #[test]
    fn normalization_merges_adjacent() {
        // [a,b) u [b,c) = [a,c)
        let s = IntervalSet::from_spans([iv((1, 4), (1, 2)), iv((0, 1), (1, 4))]);
        assert_eq!(s, IntervalSet::from_interval(iv((0, 1), (1, 2))));
        assert_eq!(s.span_count(), 1);
    }

    #[test]
    fn normalization_merges_overlap() {
        let s = IntervalSet::from_spans([iv((0, 1), (1, 2)), iv((1, 4), (3, 4))]);
        assert_eq!(s, IntervalSet::from_interval(iv((0, 1), (3, 4))));
    }

    #[test]
    fn measure_examples() {
        let s = IntervalSet::from_spans([iv((0, 1), (1, 2)), iv((3, 4), (1, 1))]);
        assert_eq!(s.measure(), rat(3, 4));
        assert_eq!(IntervalSet::empty().measure(), rat(0, 1));
    }

    #[test]
    fn membership_is_half_open() {
        let s = IntervalSet::from_interval(iv((1, 4), (1, 2)));
        assert!(s.contains(&rat(1, 4)));
        assert!(!s.contains(&rat(1, 2)));
        assert!(s.contains(&rat(3, 8)));
        assert!(!s.contains(&rat(0, 1)));
    }

    #[test]
    fn intersect_and_union_agree_with_measure() {
        let a = IntervalSet::from_spans([iv((0, 1), (1, 2))]);
        let b = IntervalSet::from_spans([iv((1, 4), (3, 4))]);
        let i = a.intersect(&b);
        let u = a.union(&b);
        assert_eq!(i, IntervalSet::from_interval(iv((1, 4), (1, 2))));
        assert_eq!(u, IntervalSet::from_interval(iv((0, 1), (3, 4))));
        assert_eq!(a.measure() + b.measure(), i.measure() + u.measure());
    }

    #[test]
    fn translate_wraps() {
        let s = IntervalSet::from_interval(iv((3, 4), (1, 1)));
        let t = s.translate_mod1(&rat(1, 2)).unwrap();
        assert_eq!(t, IntervalSet::from_interval(iv((1, 4), (1, 2))));

        let s = IntervalSet::from_interval(iv((3, 4), (1, 1)));
        let t = s.translate_mod1(&rat(3, 8)).unwrap();
        // [3/4,1) + 3/8 = [9/8, 11/8) = [1/8, 3/8) after wrapping.
        assert_eq!(t, IntervalSet::from_interval(iv((1, 8), (3, 8))));
        assert_eq!(t.measure(), rat(1, 4));

        // Straddling split: [7/8,1) + 1/16 wraps into two pieces.
        let s = IntervalSet::from_interval(iv((7, 8), (1, 1)));
        let t = s.translate_mod1(&rat(1, 16)).unwrap();
        assert_eq!(t.span_count(), 2);
        assert_eq!(t.measure(), rat(1, 8));
    }
}
