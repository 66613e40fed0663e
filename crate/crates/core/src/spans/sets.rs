use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{ensure, Error, Result};

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn raw_number(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_g17(x)).expect("formatted float is valid JSON")
}

/// A finite union of disjoint closed intervals in `[0, ∞)`; degenerate
/// intervals are isolated points. Components are sorted and strictly separated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    iv: Vec<[f64; 2]>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { iv: Vec::new() }
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::from_intervals([[x, x]], 0.0)
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::from_intervals([[a, b]], 0.0)
    }

    /// Validates and canonicalizes: sorts, then merges components whose gap is
    /// at most `tol`.
    pub fn from_intervals<I: IntoIterator<Item = [f64; 2]>>(intervals: I, tol: f64) -> Result<Self> {
        let iv: Vec<[f64; 2]> = intervals.into_iter().collect();
        for &[a, b] in &iv {
            ensure!(a.is_finite() && b.is_finite(), "interval endpoints must be finite");
            ensure!(a <= b, "interval [{a}, {b}] has a > b");
            ensure!(a >= 0.0, "interval endpoint {a} is negative");
        }
        Ok(Self::canonical(iv, tol))
    }

    /// Canonicalizes intervals already known to be valid.
    pub(crate) fn canonical(mut iv: Vec<[f64; 2]>, tol: f64) -> Self {
        for x in iv.iter_mut() {
            // Normalize -0.0.
            x[0] += 0.0;
            x[1] += 0.0;
        }
        iv.sort_unstable_by(|x, y| x[0].total_cmp(&y[0]));
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(iv.len());
        for [a, b] in iv {
            match out.last_mut() {
                Some(last) if a - last[1] <= tol => last[1] = last[1].max(b),
                _ => out.push([a, b]),
            }
        }
        Self { iv: out }
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.iv
    }

    pub fn is_empty(&self) -> bool {
        self.iv.is_empty()
    }

    pub fn n_components(&self) -> usize {
        self.iv.len()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.iv.iter().map(|[a, b]| b - a).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.iv.first().map(|x| x[0])
    }

    pub fn max(&self) -> Option<f64> {
        self.iv.last().map(|x| x[1])
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.iv.partition_point(|iv| iv[1] < x);
        i < self.iv.len() && self.iv[i][0] <= x
    }

    /// Distance from `x` to the set (infinite when empty).
    pub fn dist(&self, x: f64) -> f64 {
        let i = self.iv.partition_point(|iv| iv[1] < x);
        let mut d = f64::INFINITY;
        if i < self.iv.len() {
            d = (self.iv[i][0] - x).max(0.0);
        }
        if i > 0 {
            d = d.min(x - self.iv[i - 1][1]);
        }
        d
    }

    pub fn union(&self, other: &Self, tol: f64) -> Self {
        Self::canonical(self.iv.iter().chain(&other.iv).copied().collect(), tol)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.iv.len() && j < other.iv.len() {
            let (a, b) = (self.iv[i], other.iv[j]);
            if a[1] < b[0] {
                i += 1;
            } else if b[1] < a[0] {
                j += 1;
            } else {
                return true;
            }
        }
        false
    }

    /// Intersection with `[l, u]`.
    pub fn clip(&self, l: f64, u: f64) -> Self {
        let iv = self
            .iv
            .iter()
            .filter(|x| x[1] >= l && x[0] <= u)
            .map(|x| [x[0].max(l), x[1].min(u)])
            .collect();
        Self { iv }
    }

    /// The image under `x ↦ c·x` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0);
        Self { iv: self.iv.iter().map(|x| [x[0] * c, x[1] * c]).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("interval sets always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let iv: Vec<[Box<RawValue>; 2]> =
            self.iv.iter().map(|&[a, b]| [raw_number(a), raw_number(b)]).collect();
        let mut st = ser.serialize_struct("IntervalSet", 1)?;
        st.serialize_field("intervals", &iv)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalSetJson {
    intervals: Vec<[f64; 2]>,
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = IntervalSetJson::deserialize(de)?;
        IntervalSet::from_intervals(raw.intervals, 0.0).map_err(D::Error::custom)
    }
}

fn fmt_num(x: f64) -> String {
    if x != 0.0 && !(1e-4..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.iv.is_empty() {
            return f.write_str("∅");
        }
        for (k, &[a, b]) in self.iv.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            if a == b {
                write!(f, "{{{}}}", fmt_num(a))?;
            } else {
                write!(f, "[{},{}]", fmt_num(a), fmt_num(b))?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntervalSet {
    type Err = Error;

    /// Parses the display notation, e.g. `[0,0.5] ∪ {1}`; `U`/`u` also denote
    /// union, braces may list several points, and `∅` or an empty string is the
    /// empty set. A leading `{"intervals": ...}` is read as JSON.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with("{\"") || s.starts_with("{ \"") {
            return Self::from_json(s);
        }
        if s.is_empty() || s == "∅" {
            return Ok(Self::empty());
        }
        let mut out = Vec::new();
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let (open, close) = match rest.chars().next() {
                Some('[') => ('[', ']'),
                Some('{') => ('{', '}'),
                _ => return Err(Error::Parse(format!("expected `[` or `{{` at `{rest}`"))),
            };
            let end = rest.find(close).ok_or_else(|| Error::Parse(format!("unclosed `{open}`")))?;
            let body = &rest[1..end];
            let nums = body
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{}`: {e}", t.trim()))))
                .collect::<Result<Vec<f64>>>()?;
            if open == '[' {
                if nums.len() != 2 {
                    return Err(Error::Parse("an interval needs exactly two endpoints".into()));
                }
                out.push([nums[0], nums[1]]);
            } else {
                out.extend(nums.into_iter().map(|x| [x, x]));
            }
            rest = rest[end + close.len_utf8()..].trim_start();
            if rest.is_empty() {
                break;
            }
            rest = if let Some(r) = rest.strip_prefix('∪') {
                r
            } else if let Some(r) = rest.strip_prefix('U').or_else(|| rest.strip_prefix('u')) {
                r
            } else {
                return Err(Error::Parse(format!("expected a union symbol at `{rest}`")));
            };
        }
        Self::from_intervals(out, 0.0).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Exact integer lags `k - l` with equal walk positions; always contains 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanSet {
    lags: Vec<u64>,
}

impl SpanSet {
    /// Sorts and deduplicates; the lags must include 0.
    pub fn from_lags(mut lags: Vec<u64>) -> Result<Self> {
        lags.sort_unstable();
        lags.dedup();
        ensure!(lags.first() == Some(&0), "a span set always contains the lag 0");
        Ok(Self { lags })
    }

    pub(crate) fn from_sorted(lags: Vec<u64>) -> Self {
        debug_assert!(lags.first() == Some(&0) && lags.windows(2).all(|w| w[0] < w[1]));
        Self { lags }
    }

    pub fn lags(&self) -> &[u64] {
        &self.lags
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: u64) -> bool {
        self.lags.binary_search(&k).is_ok()
    }

    /// The lags multiplied by `scale`, as a set of isolated points.
    pub fn to_interval_set(&self, scale: f64) -> IntervalSet {
        IntervalSet::canonical(self.lags.iter().map(|&k| [k as f64 * scale; 2]).collect(), 0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("span sets always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpanSetJson {
    lags: Vec<u64>,
}

impl<'de> Deserialize<'de> for SpanSet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = SpanSetJson::deserialize(de)?;
        SpanSet::from_lags(raw.lags).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(1e17), "1e+17");
        assert_eq!(format_g17(123456.0), "123456");
        for &x in &[0.1, 2.0 / 3.0, 1e-300, 7.25e20, std::f64::consts::PI] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn canonical_merging() {
        let s = IntervalSet::from_intervals([[2.0, 3.0], [0.0, 1.0], [1.0, 1.5], [3.0, 3.0]], 0.0).unwrap();
        assert_eq!(s.intervals(), &[[0.0, 1.5], [2.0, 3.0]]);
        let again = IntervalSet::from_intervals(s.intervals().to_vec(), 0.0).unwrap();
        assert_eq!(s, again);
        assert!(IntervalSet::from_intervals([[1.0, 0.0]], 0.0).is_err());
        assert!(IntervalSet::from_intervals([[-1.0, 0.0]], 0.0).is_err());
        assert!(IntervalSet::from_intervals([[0.0, f64::NAN]], 0.0).is_err());
    }

    #[test]
    fn display_and_parse() {
        let s: IntervalSet = "[0,0.5] ∪ {1}".parse().unwrap();
        assert_eq!(s.intervals(), &[[0.0, 0.5], [1.0, 1.0]]);
        assert_eq!(s.to_string(), "[0,0.5] ∪ {1}");
        let t: IntervalSet = "{3, 1} u [0, 0.25]".parse().unwrap();
        assert_eq!(t.to_string(), "[0,0.25] ∪ {1} ∪ {3}");
        assert_eq!("∅".parse::<IntervalSet>().unwrap(), IntervalSet::empty());
        assert!("[0,1".parse::<IntervalSet>().is_err());
        assert!("[0,1,2]".parse::<IntervalSet>().is_err());
        assert!("[0,1] x {2}".parse::<IntervalSet>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let s: IntervalSet = "[0,0.1] ∪ {1}".parse().unwrap();
        let j = s.to_json();
        assert_eq!(j, r#"{"intervals":[[0,0.10000000000000001],[1,1]]}"#);
        assert_eq!(IntervalSet::from_json(&j).unwrap(), s);
        assert!(IntervalSet::from_json(r#"{"intervals":[[1,0]]}"#).is_err());
        assert!(IntervalSet::from_json(r#"{"intervals":[],"x":0}"#).is_err());
        let sp = SpanSet::from_lags(vec![4, 0, 2, 2]).unwrap();
        assert_eq!(sp.to_json(), r#"{"lags":[0,2,4]}"#);
        assert_eq!(SpanSet::from_json(&sp.to_json()).unwrap(), sp);
        assert!(SpanSet::from_json(r#"{"lags":[1,2]}"#).is_err());
    }

    #[test]
    fn queries() {
        let s: IntervalSet = "[0,0.5] ∪ {1} ∪ [2,3]".parse().unwrap();
        assert!(s.contains(0.25) && s.contains(1.0) && !s.contains(0.75) && !s.contains(3.5));
        assert_eq!(s.dist(0.75), 0.25);
        assert_eq!(s.dist(1.75), 0.25);
        assert_eq!(s.dist(5.0), 2.0);
        assert_eq!(s.measure(), 1.5);
        let k: IntervalSet = "[0.6,0.9]".parse().unwrap();
        assert!(!s.intersects(&k));
        assert!(s.intersects(&"[0.9,1]".parse().unwrap()));
        assert_eq!(s.clip(0.25, 2.5).to_string(), "[0.25,0.5] ∪ {1} ∪ [2,2.5]");
    }
}
