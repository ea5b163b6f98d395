use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::value::{CaseVector, Interval, LevelRange, Value};
use crate::error::{Error, Result, SchemaIssue};
use crate::scalar::Scalar;

/// Identifier of a solution (diagnosis, plan, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolutionId(pub String);

impl SolutionId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SolutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SolutionId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub id: SolutionId,
    pub label: String,
}

/// Per-kind declaration data of a parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterKind<T> {
    Numeric {
        units: String,
        range: Interval<T>,
        norm: Option<Interval<T>>,
        /// Half-width of the measurement-error neighbourhood.
        radius: T,
    },
    Ordinal {
        levels: Vec<String>,
        norm: Option<LevelRange>,
        /// Neighbourhood size in level steps.
        radius: usize,
    },
    Categorical {
        labels: BTreeSet<String>,
        norm: Option<BTreeSet<String>>,
        neighbors: BTreeMap<String, BTreeSet<String>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDef<T> {
    pub name: String,
    pub kind: ParameterKind<T>,
    /// Informational weight, used by the metric and by precedent proximity.
    pub weight: T,
    pub help: Option<String>,
}

impl<T: Scalar> ParameterDef<T> {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ParameterKind::Numeric { .. } => "numeric",
            ParameterKind::Ordinal { .. } => "ordinal",
            ParameterKind::Categorical { .. } => "categorical",
        }
    }

    pub fn check_value(&self, value: &Value<T>) -> Result<()> {
        let bad = |reason: String| Err(Error::validation(format!("`{}`: {reason}", self.name)));
        match (&self.kind, value) {
            (ParameterKind::Numeric { range, .. }, Value::Numeric(iv)) => {
                if !iv.lo.is_finite() || !iv.hi.is_finite() || iv.lo > iv.hi {
                    return bad("malformed interval".into());
                }
                if !range.contains(iv) {
                    return bad(format!(
                        "[{}, {}] outside declared range [{}, {}]",
                        iv.lo, iv.hi, range.lo, range.hi
                    ));
                }
                Ok(())
            }
            (ParameterKind::Ordinal { levels, .. }, Value::Ordinal(r)) => {
                if r.lo > r.hi || r.hi >= levels.len() {
                    return bad(format!("level range {}..{} out of bounds", r.lo, r.hi));
                }
                Ok(())
            }
            (ParameterKind::Categorical { labels, .. }, Value::Categorical(set)) => {
                if set.is_empty() {
                    return bad("empty label set".into());
                }
                if let Some(l) = set.iter().find(|l| !labels.contains(*l)) {
                    return bad(format!("undeclared label `{l}`"));
                }
                Ok(())
            }
            (_, v) => bad(format!(
                "expected {} value, got {}",
                self.kind_name(),
                v.kind_name()
            )),
        }
    }

    pub fn parse_value(&self, raw: &RawValue<T>) -> Result<Value<T>> {
        let bad = |reason: &str| Err(Error::validation(format!("`{}`: {reason}", self.name)));
        let value = match (&self.kind, raw) {
            (ParameterKind::Numeric { .. }, RawValue::Number(v)) => Value::number(*v),
            (ParameterKind::Numeric { .. }, RawValue::Span([lo, hi])) => Value::interval(*lo, *hi)
                .map_err(|e| Error::validation(format!("`{}`: {e}", self.name)))?,
            (ParameterKind::Numeric { range, .. }, RawValue::Bound(b)) => {
                // open-ended conditions such as "> 38" are clipped to the declared range
                let lo = b.above.unwrap_or(range.lo).max(range.lo);
                let hi = b.below.unwrap_or(range.hi).min(range.hi);
                Value::interval(lo, hi)
                    .map_err(|e| Error::validation(format!("`{}`: {e}", self.name)))?
            }
            (ParameterKind::Ordinal { levels, .. }, RawValue::Text(level)) => {
                match levels.iter().position(|l| l == level) {
                    Some(i) => Value::level(i),
                    None => return bad(&format!("unknown level `{level}`")),
                }
            }
            (ParameterKind::Ordinal { levels, .. }, RawValue::List(list)) => {
                Value::Ordinal(level_run(levels, list).map_err(|reason| {
                    Error::validation(format!("`{}`: {reason}", self.name))
                })?)
            }
            (ParameterKind::Categorical { .. }, RawValue::Flag(b)) => Value::label(b.to_string()),
            (ParameterKind::Categorical { .. }, RawValue::Text(l)) => Value::label(l.clone()),
            (ParameterKind::Categorical { .. }, RawValue::List(ls)) => Value::labels(ls.iter().cloned()),
            _ => return bad(&format!("value not valid for a {} parameter", self.kind_name())),
        };
        self.check_value(&value)?;
        Ok(value)
    }

    pub fn render_value(&self, value: &Value<T>) -> RawValue<T> {
        match (&self.kind, value) {
            (_, Value::Numeric(iv)) if iv.is_point() => RawValue::Number(iv.lo),
            (_, Value::Numeric(iv)) => RawValue::Span([iv.lo, iv.hi]),
            (ParameterKind::Ordinal { levels, .. }, Value::Ordinal(r)) if r.lo == r.hi => {
                RawValue::Text(levels[r.lo].clone())
            }
            (ParameterKind::Ordinal { levels, .. }, Value::Ordinal(r)) => {
                RawValue::List(levels[r.lo..=r.hi].to_vec())
            }
            (_, Value::Ordinal(r)) => RawValue::List(vec![r.lo.to_string(), r.hi.to_string()]),
            (_, Value::Categorical(s)) if s.len() == 1 => {
                RawValue::Text(s.iter().next().cloned().unwrap_or_default())
            }
            (_, Value::Categorical(s)) => RawValue::List(s.iter().cloned().collect()),
        }
    }
}

fn level_run(levels: &[String], list: &[String]) -> std::result::Result<LevelRange, String> {
    let mut idx = Vec::with_capacity(list.len());
    for l in list {
        match levels.iter().position(|x| x == l) {
            Some(i) => idx.push(i),
            None => return Err(format!("unknown level `{l}`")),
        }
    }
    idx.sort_unstable();
    idx.dedup();
    let (Some(&lo), Some(&hi)) = (idx.first(), idx.last()) else {
        return Err("empty level list".into());
    };
    if hi - lo + 1 != idx.len() {
        return Err("levels are not contiguous".into());
    }
    Ok(LevelRange { lo, hi })
}

/// Metric configuration carried by the schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetricConfig<T> {
    /// Per-parameter distance when a component is present in exactly one vector.
    pub missing_penalty: T,
}

impl<T: Scalar> Default for MetricConfig<T> {
    fn default() -> Self {
        Self {
            missing_penalty: T::half(),
        }
    }
}

/// The parameter space X together with the solution set.
#[derive(Debug, Clone)]
pub struct DomainSchema<T> {
    id: String,
    parameters: Vec<ParameterDef<T>>,
    index: BTreeMap<String, usize>,
    solutions: Vec<Solution>,
    fallback: SolutionId,
    metric: MetricConfig<T>,
}

pub const DEFAULT_FALLBACK: &str = "undetermined";

impl<T: Scalar> DomainSchema<T> {
    pub fn from_doc(doc: &SchemaDoc<T>) -> Result<Self> {
        let issues = check_schema(doc);
        if !issues.is_empty() {
            return Err(Error::Schema(issues));
        }
        let parameters: Vec<ParameterDef<T>> = doc
            .parameters
            .iter()
            .map(|p| build_parameter(p).expect("checked"))
            .collect();
        let index = parameters
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), i))
            .collect();
        Ok(Self {
            id: doc.id.clone(),
            parameters,
            index,
            solutions: doc.solutions.iter().map(SolutionDoc::to_solution).collect(),
            fallback: SolutionId::new(doc.fallback.clone().unwrap_or_else(|| DEFAULT_FALLBACK.into())),
            metric: doc.metric.unwrap_or_default(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SchemaDoc<T> = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Dimension n of the space.
    pub fn dim(&self) -> usize {
        self.parameters.len()
    }

    pub fn parameters(&self) -> &[ParameterDef<T>] {
        &self.parameters
    }

    pub fn parameter(&self, name: &str) -> Result<&ParameterDef<T>> {
        self.index
            .get(name)
            .map(|&i| &self.parameters[i])
            .ok_or_else(|| Error::validation(format!("undeclared parameter `{name}`")))
    }

    pub fn parameter_names(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().map(|p| p.name.as_str())
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn solution_ids(&self) -> impl Iterator<Item = &SolutionId> {
        self.solutions.iter().map(|s| &s.id)
    }

    pub fn has_solution(&self, id: &SolutionId) -> bool {
        self.solutions.iter().any(|s| &s.id == id)
    }

    pub fn solution_label(&self, id: &SolutionId) -> Option<&str> {
        self.solutions
            .iter()
            .find(|s| &s.id == id)
            .map(|s| s.label.as_str())
    }

    pub fn fallback(&self) -> &SolutionId {
        &self.fallback
    }

    pub fn metric(&self) -> &MetricConfig<T> {
        &self.metric
    }

    pub fn check_value(&self, name: &str, value: &Value<T>) -> Result<()> {
        self.parameter(name)?.check_value(value)
    }

    /// Every component declared and well-formed.
    pub fn check_vector(&self, v: &CaseVector<T>) -> Result<()> {
        v.iter().try_for_each(|(name, value)| self.check_value(name, value))
    }

    pub fn is_full(&self, v: &CaseVector<T>) -> bool {
        v.len() == self.dim() && self.parameters.iter().all(|p| v.contains(&p.name))
    }

    pub fn parse_value(&self, name: &str, raw: &RawValue<T>) -> Result<Value<T>> {
        self.parameter(name)?.parse_value(raw)
    }

    pub fn parse_vector(&self, raw: &RawVector<T>) -> Result<CaseVector<T>> {
        CaseVector::from_components(
            raw.0
                .iter()
                .map(|(name, r)| Ok((name.clone(), self.parse_value(name, r)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn render_vector(&self, v: &CaseVector<T>) -> RawVector<T> {
        RawVector(
            v.iter()
                .map(|(name, value)| {
                    let raw = match self.parameter(name) {
                        Ok(p) => p.render_value(value),
                        Err(_) => RawValue::Text(format!("{value:?}")),
                    };
                    (name.to_owned(), raw)
                })
                .collect(),
        )
    }
}

/// Value as written in documents and request bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
pub enum RawValue<T> {
    Flag(bool),
    Number(T),
    Span([T; 2]),
    Text(String),
    List(Vec<String>),
    Bound(OpenBound<T>),
}

/// Open-ended numeric condition, e.g. `{"above": 38.0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct OpenBound<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<T>,
}

/// Name → raw value map. Duplicate keys are rejected on deserialization.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct RawVector<T>(pub BTreeMap<String, RawValue<T>>);

impl<'de, T: Scalar> Deserialize<'de> for RawVector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct Visitor<T>(std::marker::PhantomData<T>);
        impl<'de, T: Scalar> serde::de::Visitor<'de> for Visitor<T> {
            type Value = RawVector<T>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of parameter name to value")
            }
            fn visit_map<A: serde::de::MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = map.next_entry::<String, RawValue<T>>()? {
                    if out.contains_key(&k) {
                        return Err(serde::de::Error::custom(format!("duplicate component `{k}`")));
                    }
                    out.insert(k, v);
                }
                Ok(RawVector(out))
            }
        }
        de.deserialize_map(Visitor(std::marker::PhantomData))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    Numeric,
    Ordinal,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
pub enum RadiusDoc<T> {
    Width(T),
    Neighbors(BTreeMap<String, Vec<String>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ParameterDoc<T> {
    pub name: String,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[T; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<RawValue<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proximity_radius: Option<RadiusDoc<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub help: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolutionDoc {
    Id(String),
    Full { id: String, label: String },
}

impl SolutionDoc {
    pub fn id(&self) -> &str {
        match self {
            SolutionDoc::Id(id) | SolutionDoc::Full { id, .. } => id,
        }
    }

    fn to_solution(&self) -> Solution {
        match self {
            SolutionDoc::Id(id) => Solution {
                id: SolutionId::new(id.clone()),
                label: id.clone(),
            },
            SolutionDoc::Full { id, label } => Solution {
                id: SolutionId::new(id.clone()),
                label: label.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SchemaDoc<T> {
    #[serde(default = "default_domain_id")]
    pub id: String,
    pub parameters: Vec<ParameterDoc<T>>,
    pub solutions: Vec<SolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricConfig<T>>,
}

fn default_domain_id() -> String {
    "domain".into()
}

/// All problems in a schema document; empty means valid.
pub fn check_schema<T: Scalar>(doc: &SchemaDoc<T>) -> Vec<SchemaIssue> {
    let mut issues = Vec::new();
    if doc.parameters.is_empty() {
        issues.push(SchemaIssue::global("schema declares no parameters"));
    }
    if doc.solutions.len() < 2 {
        issues.push(SchemaIssue::global("schema needs at least two solutions"));
    }
    let mut seen = BTreeSet::new();
    for s in &doc.solutions {
        if s.id().is_empty() {
            issues.push(SchemaIssue::global("empty solution id"));
        }
        if !seen.insert(s.id()) {
            issues.push(SchemaIssue::global(format!("duplicate solution id `{}`", s.id())));
        }
    }
    if let Some(m) = &doc.metric {
        if !(m.missing_penalty >= T::zero() && m.missing_penalty <= T::one()) {
            issues.push(SchemaIssue::global("missing_penalty must lie in [0, 1]"));
        }
    }
    let mut names = BTreeSet::new();
    let mut total_weight = T::zero();
    for p in &doc.parameters {
        if !names.insert(p.name.as_str()) {
            issues.push(SchemaIssue::param(&p.name, "duplicate parameter name"));
            continue;
        }
        match build_parameter(p) {
            Ok(def) => total_weight = total_weight + def.weight,
            Err(mut errs) => issues.append(&mut errs),
        }
    }
    if !doc.parameters.is_empty() && issues.is_empty() && total_weight <= T::zero() {
        issues.push(SchemaIssue::global("parameter weights sum to zero"));
    }
    issues
}

fn build_parameter<T: Scalar>(p: &ParameterDoc<T>) -> std::result::Result<ParameterDef<T>, Vec<SchemaIssue>> {
    let issue = |reason: &str| vec![SchemaIssue::param(&p.name, reason)];
    if p.name.is_empty() {
        return Err(vec![SchemaIssue::global("parameter with empty name")]);
    }
    let weight = p.weight.unwrap_or_else(T::one);
    if !weight.is_finite() || weight < T::zero() {
        return Err(issue("weight must be a non-negative number"));
    }
    let kind = match p.kind {
        KindTag::Numeric => {
            let Some([lo, hi]) = p.range else {
                return Err(issue("numeric parameter needs a range"));
            };
            let range = Interval::new(lo, hi).map_err(|e| issue(&e.to_string()))?;
            if range.width() <= T::zero() {
                return Err(issue("zero-width range"));
            }
            let radius = match &p.proximity_radius {
                None => T::zero(),
                Some(RadiusDoc::Width(r)) if r.is_finite() && *r >= T::zero() => *r,
                Some(RadiusDoc::Width(_)) => return Err(issue("proximity_radius must be >= 0")),
                Some(RadiusDoc::Neighbors(_)) => {
                    return Err(issue("numeric proximity_radius must be a number"))
                }
            };
            let norm = match &p.norm {
                None => None,
                Some(RawValue::Span([a, b])) => {
                    let n = Interval::new(*a, *b).map_err(|e| issue(&e.to_string()))?;
                    if !range.contains(&n) {
                        return Err(issue("norm outside range"));
                    }
                    Some(n)
                }
                Some(RawValue::Number(a)) => {
                    if !range.contains(&Interval::point(*a)) {
                        return Err(issue("norm outside range"));
                    }
                    Some(Interval::point(*a))
                }
                Some(_) => return Err(issue("numeric norm must be [lo, hi]")),
            };
            ParameterKind::Numeric {
                units: p.units.clone().unwrap_or_default(),
                range,
                norm,
                radius,
            }
        }
        KindTag::Ordinal => {
            let Some(levels) = p.levels.clone() else {
                return Err(issue("ordinal parameter needs levels"));
            };
            if levels.len() < 2 {
                return Err(issue("ordinal parameter needs at least two levels"));
            }
            if levels.iter().collect::<BTreeSet<_>>().len() != levels.len() {
                return Err(issue("ordinal levels must be distinct"));
            }
            let radius = match &p.proximity_radius {
                None => 0,
                Some(RadiusDoc::Width(r)) if *r >= T::zero() && r.fract() == T::zero() => {
                    r.to_usize().ok_or_else(|| issue("proximity_radius out of range"))?
                }
                Some(_) => return Err(issue("ordinal proximity_radius must be a whole step count")),
            };
            let norm = match &p.norm {
                None => None,
                Some(RawValue::Text(l)) => Some(level_run(&levels, std::slice::from_ref(l))),
                Some(RawValue::List(ls)) => Some(level_run(&levels, ls)),
                Some(_) => return Err(issue("ordinal norm must be a level or list of levels")),
            }
            .transpose()
            .map_err(|reason| issue(&format!("norm outside range: {reason}")))?;
            ParameterKind::Ordinal {
                levels,
                norm,
                radius,
            }
        }
        KindTag::Categorical => {
            let Some(list) = &p.labels else {
                return Err(issue("categorical parameter needs labels"));
            };
            let labels: BTreeSet<String> = list.iter().cloned().collect();
            if labels.is_empty() || labels.len() != list.len() {
                return Err(issue("categorical labels must be non-empty and distinct"));
            }
            let norm = match &p.norm {
                None => None,
                Some(RawValue::Text(l)) => Some(BTreeSet::from([l.clone()])),
                Some(RawValue::Flag(b)) => Some(BTreeSet::from([b.to_string()])),
                Some(RawValue::List(ls)) => Some(ls.iter().cloned().collect()),
                Some(_) => return Err(issue("categorical norm must be a label or list of labels")),
            };
            if let Some(n) = &norm {
                if !n.is_subset(&labels) {
                    return Err(issue("norm outside range: undeclared label"));
                }
            }
            let neighbors = match &p.proximity_radius {
                None => BTreeMap::new(),
                Some(RadiusDoc::Neighbors(m)) => {
                    let mut out = BTreeMap::new();
                    for (k, vs) in m {
                        if !labels.contains(k) || vs.iter().any(|v| !labels.contains(v)) {
                            return Err(issue("neighbor map mentions an undeclared label"));
                        }
                        out.insert(k.clone(), vs.iter().cloned().collect());
                    }
                    out
                }
                Some(RadiusDoc::Width(w)) if *w == T::zero() => BTreeMap::new(),
                Some(RadiusDoc::Width(_)) => {
                    return Err(issue("categorical proximity_radius must be a neighbor map"))
                }
            };
            ParameterKind::Categorical {
                labels,
                norm,
                neighbors,
            }
        }
    };
    Ok(ParameterDef {
        name: p.name.clone(),
        kind,
        weight,
        help: p.help.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc() -> serde_json::Value {
        json!({
            "id": "t",
            "parameters": [
                {"name": "temperature", "kind": "numeric", "units": "C", "range": [35, 42],
                 "norm": [36.0, 37.2], "proximity_radius": 0.3},
                {"name": "headache", "kind": "ordinal",
                 "levels": ["none", "small", "moderate", "strong"], "norm": "none", "proximity_radius": 1},
                {"name": "cough", "kind": "categorical", "labels": ["no", "yes"], "norm": "no"}
            ],
            "solutions": ["cold", {"id": "flu", "label": "Flu"}]
        })
    }

    #[test]
    fn parses_valid_document() {
        let s = DomainSchema::<f64>::from_json(&doc().to_string()).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.fallback().as_str(), DEFAULT_FALLBACK);
        assert_eq!(s.solution_label(&"flu".into()), Some("Flu"));
    }

    #[test]
    fn norm_outside_range_names_parameter() {
        let mut d = doc();
        d["parameters"][0]["norm"] = json!([30.0, 37.0]);
        let err = DomainSchema::<f64>::from_json(&d.to_string()).unwrap_err();
        match err {
            Error::Schema(issues) => {
                assert_eq!(issues[0].parameter.as_deref(), Some("temperature"));
                assert!(issues[0].reason.contains("norm"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_parameter_rejected() {
        let mut d = doc();
        d["parameters"][2]["name"] = json!("headache");
        let err = DomainSchema::<f64>::from_json(&d.to_string()).unwrap_err();
        assert!(err.to_string().contains("duplicate parameter name"));
    }

    #[test]
    fn zero_width_range_rejected() {
        let mut d = doc();
        d["parameters"][0]["range"] = json!([37.0, 37.0]);
        d["parameters"][0]["norm"] = json!(37.0);
        assert!(DomainSchema::<f64>::from_json(&d.to_string())
            .unwrap_err()
            .to_string()
            .contains("zero-width"));
    }

    #[test]
    fn raw_values_round_trip_through_schema() {
        let s = DomainSchema::<f64>::from_json(&doc().to_string()).unwrap();
        let raw: RawVector<f64> = serde_json::from_value(json!({
            "temperature": 37.8, "headache": ["small", "moderate"], "cough": "no"
        }))
        .unwrap();
        let v = s.parse_vector(&raw).unwrap();
        assert_eq!(v.get("headache"), Some(&Value::Ordinal(LevelRange { lo: 1, hi: 2 })));
        assert_eq!(s.render_vector(&v), raw);
    }

    #[test]
    fn duplicate_json_keys_rejected() {
        let parsed: std::result::Result<RawVector<f64>, _> =
            serde_json::from_str(r#"{"temperature": 37.0, "temperature": 38.0}"#);
        assert!(parsed.is_err());
    }

    #[test]
    fn open_bound_clipped_to_range() {
        let s = DomainSchema::<f64>::from_json(&doc().to_string()).unwrap();
        let raw: RawValue<f64> = serde_json::from_value(json!({"above": 38.0})).unwrap();
        let v = s.parse_value("temperature", &raw).unwrap();
        assert_eq!(v, Value::interval(38.0, 42.0).unwrap());
    }

    #[test]
    fn undeclared_or_out_of_range_values_rejected() {
        let s = DomainSchema::<f64>::from_json(&doc().to_string()).unwrap();
        assert!(s.parse_value("pulse", &RawValue::Number(80.0)).is_err());
        assert!(s.parse_value("temperature", &RawValue::Number(45.0)).is_err());
        assert!(s
            .parse_value("headache", &RawValue::List(vec!["none".into(), "moderate".into()]))
            .is_err());
        assert!(s.parse_value("cough", &RawValue::Text("maybe".into())).is_err());
    }
}
