//! Finite unions of closed intervals inside a window `[0, W]`.
//!
//! The canonical form keeps intervals sorted with strictly positive gaps
//! between consecutive members; touching or overlapping inputs are merged and
//! degenerate intervals (isolated points) are kept. No tolerance is applied
//! when merging.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    window_end: f64,
    intervals: Vec<(f64, f64)>,
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals.serialize(serializer)
    }
}

impl IntervalSet {
    /// Builds the canonical form of `intervals` clipped to `[0, window_end]`.
    /// Pairs with `l > r` (before or after clipping) are discarded.
    pub fn new(window_end: f64, intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        check_window(window_end)?;
        let mut raw: Vec<(f64, f64)> = intervals
            .into_iter()
            .filter(|(l, r)| !l.is_nan() && !r.is_nan())
            .map(|(l, r)| (l.max(0.0), r.min(window_end)))
            .filter(|(l, r)| l <= r)
            .collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (l, r) in raw {
            match merged.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        Ok(Self {
            window_end,
            intervals: merged,
        })
    }

    pub fn empty(window_end: f64) -> Result<Self> {
        check_window(window_end)?;
        Ok(Self {
            window_end,
            intervals: Vec::new(),
        })
    }

    pub fn full(window_end: f64) -> Result<Self> {
        check_window(window_end)?;
        Ok(Self {
            window_end,
            intervals: vec![(0.0, window_end)],
        })
    }

    /// `[0, W]` minus the union of the open intervals `(a, b)` in `cover`.
    ///
    /// Endpoints are not covered by their own interval, so two covering
    /// intervals that merely touch leave their common endpoint uncovered.
    /// Empty intervals (`b <= a`) cover nothing.
    pub fn complement_of_open_cover(window_end: f64, cover: &[(f64, f64)]) -> Result<Self> {
        check_window(window_end)?;
        let mut open: Vec<(f64, f64)> = cover
            .iter()
            .copied()
            .filter(|&(a, b)| b > a && a < window_end)
            .collect();
        open.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out = Vec::new();
        // `reach`: every point of [0, reach) is known covered except recorded gaps;
        // the point `reach` itself is uncovered so far.
        let mut reach = 0.0f64;
        for (a, b) in open {
            if a >= reach {
                out.push((reach, a.min(window_end)));
            }
            if b > reach {
                reach = b;
            }
            if reach > window_end {
                break;
            }
        }
        if reach <= window_end {
            out.push((reach, window_end));
        }
        Ok(Self {
            window_end,
            intervals: out,
        })
    }

    pub fn window_end(&self) -> f64 {
        self.window_end
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        let idx = self.intervals.partition_point(|&(l, _)| l <= x);
        idx > 0 && x <= self.intervals[idx - 1].1
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    /// Lebesgue measure of the set intersected with `[a, b]`.
    pub fn measure_on(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::Usage(format!(
                "measure_on requires a <= b, got [{a}, {b}]"
            )));
        }
        let mut total = 0.0;
        for &(l, r) in &self.intervals {
            if l >= b {
                break;
            }
            let lo = l.max(a);
            let hi = r.min(b);
            if hi > lo {
                total += hi - lo;
            }
        }
        Ok(total)
    }

    /// `measure_on(0, t)` for every `t` of a nondecreasing grid, in one sweep.
    pub fn measure_profile(&self, times: &[f64]) -> Vec<f64> {
        measure_profile_of(&self.intervals, times)
    }

    /// Closure of `[0, W]` minus the set.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut start = 0.0;
        for &(l, r) in &self.intervals {
            if l > start {
                out.push((start, l));
            }
            start = r;
        }
        if start < self.window_end {
            out.push((start, self.window_end));
        }
        if self.intervals.is_empty() {
            out = vec![(0.0, self.window_end)];
        }
        Self::new(self.window_end, out).expect("window already validated")
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_same_window(other)?;
        let mut out = Vec::new();
        intersect_into(&self.intervals, &other.intervals, &mut out);
        Ok(Self {
            window_end: self.window_end,
            intervals: out,
        })
    }

    /// Intersection of all sets in `sets`; `None` if `sets` is empty.
    pub fn intersect_all<'a>(sets: impl IntoIterator<Item = &'a Self>) -> Result<Option<Self>> {
        let mut iter = sets.into_iter();
        let Some(first) = iter.next() else {
            return Ok(None);
        };
        let mut acc = first.clone();
        for s in iter {
            acc = acc.intersect(s)?;
            if acc.is_empty() {
                break;
            }
        }
        Ok(Some(acc))
    }

    /// `(A + v) ∩ [0, W]`.
    pub fn shift_clip(&self, v: f64) -> Result<Self> {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("shift must be nonnegative, got {v}")));
        }
        let w = self.window_end;
        if v >= w {
            return Ok(Self {
                window_end: w,
                intervals: Vec::new(),
            });
        }
        let intervals = self
            .intervals
            .iter()
            .map(|&(l, r)| (l + v, (r + v).min(w)))
            .take_while(|&(l, _)| l <= w)
            .collect();
        Ok(Self {
            window_end: w,
            intervals,
        })
    }

    /// Union of `[l − h/2, r + h/2]` over the members, clipped to the window.
    pub fn dilate(&self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!(
                "dilation width must be positive, got {h}"
            )));
        }
        let half = h / 2.0;
        Self::new(
            self.window_end,
            self.intervals.iter().map(|&(l, r)| (l - half, r + half)),
        )
    }

    /// Lebesgue measure on the whole real line of the unclipped Minkowski
    /// sausage `S + [−h/2, h/2]`.
    pub fn sausage_measure(&self, h: f64) -> f64 {
        let half = h / 2.0;
        let mut total = 0.0;
        let mut current: Option<(f64, f64)> = None;
        for &(l, r) in &self.intervals {
            let (lo, hi) = (l - half, r + half);
            match current {
                Some((cl, ch)) if lo <= ch => current = Some((cl, ch.max(hi))),
                Some((cl, ch)) => {
                    total += ch - cl;
                    current = Some((lo, hi));
                }
                None => current = Some((lo, hi)),
            }
        }
        if let Some((cl, ch)) = current {
            total += ch - cl;
        }
        total
    }

    /// The part of the set inside `[0, t]`, same window.
    pub fn truncate(&self, t: f64) -> Self {
        let intervals = self
            .intervals
            .iter()
            .take_while(|&&(l, _)| l <= t)
            .map(|&(l, r)| (l, r.min(t)))
            .collect();
        Self {
            window_end: self.window_end,
            intervals,
        }
    }

    fn check_same_window(&self, other: &Self) -> Result<()> {
        if self.window_end != other.window_end {
            return Err(Error::Usage(format!(
                "interval sets live on different windows: {} vs {}",
                self.window_end, other.window_end
            )));
        }
        Ok(())
    }
}

fn check_window(window_end: f64) -> Result<()> {
    if !(window_end > 0.0) || !window_end.is_finite() {
        return Err(Error::Domain(format!(
            "window end must be positive, got {window_end}"
        )));
    }
    Ok(())
}

/// Two-pointer intersection of canonical interval lists, appended to `out`.
pub(crate) fn intersect_into(a: &[(f64, f64)], b: &[(f64, f64)], out: &mut Vec<(f64, f64)>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
}

pub(crate) fn measure_profile_of(intervals: &[(f64, f64)], times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut idx = 0;
    let mut closed = 0.0;
    for &t in times {
        while idx < intervals.len() && intervals[idx].1 <= t {
            closed += intervals[idx].1 - intervals[idx].0;
            idx += 1;
        }
        let partial = match intervals.get(idx) {
            Some(&(l, _)) if l < t => t - l,
            _ => 0.0,
        };
        out.push(closed + partial);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(w: f64, iv: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(w, iv.iter().copied()).unwrap()
    }

    #[test]
    fn complement_of_cover_examples() {
        let s = IntervalSet::complement_of_open_cover(1.0, &[(0.2, 0.5)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 0.2), (0.5, 1.0)]);
        let s = IntervalSet::complement_of_open_cover(1.0, &[]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 1.0)]);
        let s = IntervalSet::complement_of_open_cover(1.0, &[(0.1, 0.4), (0.3, 0.7)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 0.1), (0.7, 1.0)]);
    }

    #[test]
    fn touching_open_intervals_leave_their_endpoint() {
        let s = IntervalSet::complement_of_open_cover(1.0, &[(0.0, 0.5), (0.5, 1.0)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        assert!(s.contains(0.0) && s.contains(0.5) && !s.contains(0.25) && s.contains(1.0));
    }

    #[test]
    fn intersect_examples() {
        let full = IntervalSet::full(1.0).unwrap();
        let b = set(1.0, &[(0.1, 0.2), (0.5, 0.9)]);
        assert_eq!(full.intersect(&b).unwrap(), b);
        let a = set(1.0, &[(0.0, 0.3)]);
        let b = set(1.0, &[(0.2, 0.6)]);
        assert_eq!(a.intersect(&b).unwrap().intervals(), &[(0.2, 0.3)]);
        let c = set(2.0, &[(0.2, 0.6)]);
        assert!(matches!(a.intersect(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn shift_clip_examples() {
        let a = set(1.0, &[(0.0, 0.5)]);
        assert_eq!(a.shift_clip(0.0).unwrap(), a);
        assert_eq!(a.shift_clip(0.75).unwrap().intervals(), &[(0.75, 1.0)]);
        let gone = a.shift_clip(1.0).unwrap();
        assert!(gone.is_empty());
        assert_eq!(gone.measure(), 0.0);
        assert!(a.shift_clip(1.5).unwrap().is_empty());
        assert!(a.shift_clip(-0.1).is_err());
    }

    #[test]
    fn dilate_examples() {
        let pt = set(1.0, &[(0.5, 0.5)]);
        let d = pt.dilate(0.2).unwrap();
        assert!((d.intervals()[0].0 - 0.4).abs() < 1e-15);
        assert!((d.intervals()[0].1 - 0.6).abs() < 1e-15);
        assert!((d.measure() - 0.2).abs() < 1e-15);
        let full = IntervalSet::full(1.0).unwrap();
        assert_eq!(full.dilate(0.3).unwrap(), full);
        assert!(pt.dilate(0.0).is_err());
    }

    #[test]
    fn measure_on_examples() {
        let full = IntervalSet::full(1.0).unwrap();
        assert_eq!(full.measure_on(0.0, 0.4).unwrap(), 0.4);
        assert_eq!(
            IntervalSet::empty(1.0)
                .unwrap()
                .measure_on(0.0, 1.0)
                .unwrap(),
            0.0
        );
        let s = set(1.0, &[(0.0, 0.3), (0.6, 1.0)]);
        assert!((s.measure_on(0.2, 0.8).unwrap() - 0.3).abs() < 1e-15);
        assert!(s.measure_on(0.8, 0.2).is_err());
    }

    #[test]
    fn sausage_measure_is_unclipped() {
        let s = set(1.0, &[(0.0, 1.0)]);
        assert!((s.sausage_measure(0.1) - 1.1).abs() < 1e-15);
        let pts = set(1.0, &[(0.2, 0.2), (0.25, 0.25)]);
        assert!((pts.sausage_measure(0.1) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn measure_profile_matches_measure_on() {
        let s = set(1.0, &[(0.05, 0.1), (0.3, 0.3), (0.4, 0.75), (0.9, 1.0)]);
        let ts = [0.0, 0.07, 0.1, 0.35, 0.5, 0.75, 0.95, 1.0];
        let prof = s.measure_profile(&ts);
        for (t, m) in ts.iter().zip(prof) {
            assert!((m - s.measure_on(0.0, *t).unwrap()).abs() < 1e-15);
        }
    }

    fn random_cover(rng: &mut ChaCha8Rng, w: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|_| {
                let y = rng.random::<f64>() * w;
                (y, y + 0.02 / (1.0 - rng.random::<f64>()))
            })
            .collect()
    }

    #[test]
    fn cover_complement_matches_membership_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let cover = random_cover(&mut rng, 1.0, 25);
            let s = IntervalSet::complement_of_open_cover(1.0, &cover).unwrap();
            for _ in 0..10_000 {
                let x: f64 = rng.random();
                let covered = cover.iter().any(|&(a, b)| a < x && x < b);
                assert_eq!(s.contains(x), !covered, "x={x}");
            }
        }
    }

    #[test]
    fn intersect_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let a = IntervalSet::complement_of_open_cover(1.0, &random_cover(&mut rng, 1.0, 15))
                .unwrap();
            let b = IntervalSet::complement_of_open_cover(1.0, &random_cover(&mut rng, 1.0, 15))
                .unwrap();
            let c = a.intersect(&b).unwrap();
            for k in 0..=10_000 {
                let x = k as f64 / 10_000.0;
                assert_eq!(c.contains(x), a.contains(x) && b.contains(x), "x={x}");
            }
            assert!(c.measure() <= a.measure().min(b.measure()) + 1e-15);
        }
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..0.3), 0..12)
            .prop_map(|v| IntervalSet::new(1.0, v.into_iter().map(|(l, w)| (l, l + w))).unwrap())
    }

    proptest! {
        #[test]
        fn canonical_form_is_idempotent(s in arb_set()) {
            let again = IntervalSet::new(1.0, s.intervals().iter().copied()).unwrap();
            prop_assert_eq!(&again, &s);
            for w in s.intervals().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
        }

        #[test]
        fn complement_measures_add_up(s in arb_set()) {
            let total = s.measure_on(0.0, 1.0).unwrap()
                + s.complement().measure_on(0.0, 1.0).unwrap();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn intersect_commutes_and_associates(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
            let left = a.intersect(&b).unwrap().intersect(&c).unwrap();
            let right = a.intersect(&b.intersect(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn dilation_is_subadditive(s in arb_set(), h in 0.001f64..0.2) {
            let d = s.dilate(h).unwrap();
            prop_assert!(d.measure() <= s.measure() + h * s.len() as f64 + 1e-12);
        }
    }

    #[test]
    fn serializes_as_pairs() {
        let s = set(1.0, &[(0.0, 0.25), (0.5, 0.5)]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[0.0,0.25],[0.5,0.5]]");
    }
}
