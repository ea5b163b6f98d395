use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cmp_scalar, Scalar};

/// Closed numeric interval. Point measurements are stored as `[v, v]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::validation("interval bounds must be finite"));
        }
        if lo > hi {
            return Err(Error::validation(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(v: T) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) * T::half()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Distance from `x` to the nearest point of the interval (0 inside).
    pub fn gap_to(&self, x: T) -> T {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            T::zero()
        }
    }
}

/// Contiguous, non-empty run of ordinal levels, by level index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelRange {
    pub lo: usize,
    pub hi: usize,
}

impl LevelRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::validation(format!("level range {lo}..{hi} is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn single(level: usize) -> Self {
        Self { lo: level, hi: level }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Twice the midpoint, kept integral.
    pub(crate) fn mid2(&self) -> usize {
        self.lo + self.hi
    }
}

/// Value of a single component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", bound = "T: Scalar")]
pub enum Value<T> {
    Numeric(Interval<T>),
    Ordinal(LevelRange),
    Categorical(BTreeSet<String>),
}

impl<T: Scalar> Value<T> {
    pub fn number(v: T) -> Self {
        Value::Numeric(Interval::point(v))
    }

    pub fn interval(lo: T, hi: T) -> Result<Self> {
        Interval::new(lo, hi).map(Value::Numeric)
    }

    pub fn level(index: usize) -> Self {
        Value::Ordinal(LevelRange::single(index))
    }

    pub fn label(label: impl Into<String>) -> Self {
        Value::Categorical(BTreeSet::from([label.into()]))
    }

    pub fn labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Value::Categorical(labels.into_iter().map(Into::into).collect())
    }

    /// Intersection test; values of different kinds never intersect.
    pub fn intersects(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Numeric(a), Value::Numeric(b)) => a.intersects(b),
            (Value::Ordinal(a), Value::Ordinal(b)) => a.intersects(b),
            (Value::Categorical(a), Value::Categorical(b)) => !a.is_disjoint(b),
            _ => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Numeric(_) => "numeric",
            Value::Ordinal(_) => "ordinal",
            Value::Categorical(_) => "categorical",
        }
    }

    /// Deterministic order used for canonical sorting of antisyndromes and samples.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Numeric(a), Value::Numeric(b)) => {
                cmp_scalar(&a.lo, &b.lo).then_with(|| cmp_scalar(&a.hi, &b.hi))
            }
            (Value::Ordinal(a), Value::Ordinal(b)) => a.cmp(b),
            (Value::Categorical(a), Value::Categorical(b)) => a.iter().cmp(b.iter()),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

fn rank<T>(v: &Value<T>) -> u8 {
    match v {
        Value::Numeric(_) => 0,
        Value::Ordinal(_) => 1,
        Value::Categorical(_) => 2,
    }
}

/// A set of named components; at most one component per name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct CaseVector<T> {
    components: BTreeMap<String, Value<T>>,
}

impl<T> Default for CaseVector<T> {
    fn default() -> Self {
        Self {
            components: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> CaseVector<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector, rejecting duplicate component names.
    pub fn from_components<I, S>(components: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Value<T>)>,
        S: Into<String>,
    {
        let mut out = BTreeMap::new();
        for (name, value) in components {
            let name = name.into();
            if out.contains_key(&name) {
                return Err(Error::validation(format!("duplicate component `{name}`")));
            }
            out.insert(name, value);
        }
        Ok(Self { components: out })
    }

    /// Builder-style insert that replaces an existing component.
    pub fn with(mut self, name: impl Into<String>, value: Value<T>) -> Self {
        self.components.insert(name.into(), value);
        self
    }

    /// Sets a component, returning the previous value.
    pub fn set(&mut self, name: impl Into<String>, value: Value<T>) -> Option<Value<T>> {
        self.components.insert(name.into(), value)
    }

    pub fn remove(&mut self, name: &str) -> Option<Value<T>> {
        self.components.remove(name)
    }

    pub fn without(&self, name: &str) -> Self {
        let mut out = self.clone();
        out.components.remove(name);
        out
    }

    pub fn get(&self, name: &str) -> Option<&Value<T>> {
        self.components.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.components.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value<T>)> {
        self.components.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    /// `true` iff every component of `self` intersects the same-named component of `other`.
    pub fn is_subvector_of(&self, other: &Self) -> bool {
        self.components
            .iter()
            .all(|(name, v)| other.get(name).is_some_and(|w| v.intersects(w)))
    }

    /// Canonical order: cardinality, then component names, then values.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.names().cmp(other.names()))
            .then_with(|| {
                self.components
                    .values()
                    .zip(other.components.values())
                    .map(|(a, b)| a.canonical_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

impl<T: Scalar> FromIterator<(String, Value<T>)> for CaseVector<T> {
    /// Later duplicates replace earlier ones; use [`CaseVector::from_components`] to reject them.
    fn from_iter<I: IntoIterator<Item = (String, Value<T>)>>(iter: I) -> Self {
        Self {
            components: iter.into_iter().collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for CaseVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match v {
                Value::Numeric(iv) if iv.is_point() => write!(f, "{name}={}", iv.lo)?,
                Value::Numeric(iv) => write!(f, "{name}=[{}, {}]", iv.lo, iv.hi)?,
                Value::Ordinal(r) if r.lo == r.hi => write!(f, "{name}=#{}", r.lo)?,
                Value::Ordinal(r) => write!(f, "{name}=#{}..#{}", r.lo, r.hi)?,
                Value::Categorical(s) => {
                    let joined: Vec<&str> = s.iter().map(String::as_str).collect();
                    write!(f, "{name}={}", joined.join("|"))?
                }
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let err = CaseVector::<f64>::from_components([
            ("temperature", Value::number(37.0)),
            ("temperature", Value::number(38.0)),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn interval_rejects_inverted_bounds() {
        assert!(Interval::new(2.0_f64, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn empty_is_subvector_of_everything() {
        let x = CaseVector::new().with("a", Value::<f64>::level(1));
        assert!(CaseVector::new().is_subvector_of(&x));
        assert!(!x.is_subvector_of(&CaseVector::new()));
    }

    #[test]
    fn canonical_order_by_size_then_names() {
        let a = CaseVector::new().with("b", Value::<f64>::label("x"));
        let b = CaseVector::new()
            .with("a", Value::<f64>::label("x"))
            .with("b", Value::label("x"));
        let c = CaseVector::new().with("a", Value::<f64>::label("y"));
        let mut v = vec![b.clone(), a.clone(), c.clone()];
        v.sort_by(|x, y| x.canonical_cmp(y));
        assert_eq!(v, vec![c, a, b]);
    }
}
