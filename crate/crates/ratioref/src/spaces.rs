//! Costed spaces: positive scales, dictionaries of feasible object scales,
//! and the ratio-induced reference cost.
//!
//! A dictionary is the image of an object set under its scale map, which is
//! all the solvers ever need. Four carriers are supported: finite lists
//! (with ids, so meaning sets can name objects), closed intervals in
//! `(0, inf)`, and closed boxes or halfspace intersections in log-coordinates
//! for the multi-dimensional solvers.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::penalty::Penalty;
use crate::scalar::Scalar;

/// A strictly positive scale value.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Scale<S>(S);

impl<S: Scalar> Scale<S> {
    pub fn new(value: S) -> Result<Self> {
        if value.is_positive() && value.is_finite_value() {
            Ok(Scale(value))
        } else {
            Err(Error::NonPositive("scale"))
        }
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    pub fn into_value(self) -> S {
        self.0
    }

    /// The ratio `self / other`.
    pub fn ratio_to(&self, other: &Scale<S>) -> S {
        self.0.clone() / other.0.clone()
    }

    pub fn parse(s: &str) -> Result<Self> {
        Scale::new(S::parse_str(s)?)
    }
}

impl<S: Scalar> std::fmt::Display for Scale<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(&self.0, f)
    }
}

/// A vector of positive scales, one per coordinate (`d >= 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleVec<S>(Vec<Scale<S>>);

impl<S: Scalar> ScaleVec<S> {
    pub fn new(coords: Vec<Scale<S>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { left: 0, right: 1 });
        }
        Ok(ScaleVec(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scale<S>] {
        &self.0
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.0.iter().map(|s| s.value().to_f64()).collect()
    }
}

/// One named object in a finite dictionary.
#[derive(Clone, Debug, PartialEq)]
pub struct DictItem<S> {
    id: String,
    scales: ScaleVec<S>,
}

impl<S: Scalar> DictItem<S> {
    pub fn new(id: impl Into<String>, scales: ScaleVec<S>) -> Self {
        DictItem {
            id: id.into(),
            scales,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scales(&self) -> &ScaleVec<S> {
        &self.scales
    }

    /// The scale of a 1-D item.
    pub fn scale(&self) -> &Scale<S> {
        &self.scales.coords()[0]
    }
}

/// A nonempty finite dictionary with a uniform coordinate dimension.
///
/// Duplicate scales are allowed; each group of ids with equal scales forms
/// one fiber and ties are reported as the whole fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDict<S> {
    items: Vec<DictItem<S>>,
    dim: usize,
}

impl<S: Scalar> FiniteDict<S> {
    pub fn new(items: Vec<DictItem<S>>) -> Result<Self> {
        let dim = items.first().ok_or(Error::EmptyDictionary)?.scales.dim();
        for item in &items {
            if item.scales.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: item.scales.dim(),
                });
            }
        }
        Ok(FiniteDict { items, dim })
    }

    /// Build a 1-D dictionary from `(id, scale)` pairs.
    pub fn new_1d(pairs: Vec<(String, Scale<S>)>) -> Result<Self> {
        let items = pairs
            .into_iter()
            .map(|(id, s)| Ok(DictItem::new(id, ScaleVec::new(vec![s])?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub fn items(&self) -> &[DictItem<S>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, id: &str) -> Option<&DictItem<S>> {
        self.items.iter().find(|i| i.id == id)
    }
}

/// A closed axis-aligned box in log-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LogBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl LogBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                left: lo.len(),
                right: hi.len(),
            });
        }
        let ordered = lo
            .iter()
            .zip(&hi)
            .all(|(a, b)| a.is_finite() && b.is_finite() && a <= b);
        if !ordered {
            return Err(Error::BadBox);
        }
        Ok(LogBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Componentwise clamp of a log-point into the box.
    pub fn clamp(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
            .collect()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

/// A closed halfspace `{u : normal . u <= offset}` in log-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let finite = normal.iter().all(|x| x.is_finite()) && offset.is_finite();
        let nonzero = normal.iter().any(|x| *x != 0.0);
        if normal.is_empty() || !finite || !nonzero {
            return Err(Error::BadHalfspace);
        }
        Ok(Halfspace { normal, offset })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed slack `normal . u - offset` (positive means violated).
    pub fn violation(&self, u: &[f64]) -> f64 {
        dot(&self.normal, u) - self.offset
    }

    /// Euclidean projection onto the halfspace.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        let v = self.violation(u);
        if v <= 0.0 {
            return u.to_vec();
        }
        let nn = dot(&self.normal, &self.normal);
        u.iter()
            .zip(&self.normal)
            .map(|(x, n)| x - v * n / nn)
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const FEASIBILITY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 50_000;

/// A closed convex set `{u : n_j . u <= c_j}` in log-coordinates.
///
/// Construction runs a feasibility sweep; an intersection on which the sweep
/// stalls without reaching feasibility is rejected as empty.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPolytope {
    halfspaces: Vec<Halfspace>,
    dim: usize,
    anchor: Vec<f64>,
}

impl LogPolytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = halfspaces
            .first()
            .ok_or(Error::EmptyDictionary)?
            .normal
            .len();
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: h.normal.len(),
                });
            }
        }
        let anchor = feasible_point(&halfspaces, dim).ok_or(Error::InfeasiblePolytope)?;
        Ok(LogPolytope {
            halfspaces,
            dim,
            anchor,
        })
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A feasible point found at construction time.
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn max_violation(&self, u: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.violation(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        self.max_violation(u) <= tol
    }

    /// Euclidean projection onto the polytope via Dykstra-corrected
    /// alternating halfspace projections.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut u = x.to_vec();
        let mut corr = vec![vec![0.0; d]; self.halfspaces.len()];
        for _ in 0..MAX_SWEEPS {
            let before = u.clone();
            for (h, c) in self.halfspaces.iter().zip(corr.iter_mut()) {
                let shifted: Vec<f64> = u.iter().zip(c.iter()).map(|(a, b)| a + b).collect();
                let projected = h.project(&shifted);
                for k in 0..d {
                    c[k] = shifted[k] - projected[k];
                }
                u = projected;
            }
            let moved = u
                .iter()
                .zip(&before)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if moved <= FEASIBILITY_TOL * scale && self.contains(&u, FEASIBILITY_TOL * scale) {
                break;
            }
        }
        u
    }
}

/// Plain alternating projections from the origin; converges to some feasible
/// point when the intersection is nonempty.
fn feasible_point(halfspaces: &[Halfspace], dim: usize) -> Option<Vec<f64>> {
    let mut u = vec![0.0; dim];
    for _ in 0..MAX_SWEEPS {
        let mut worst = f64::NEG_INFINITY;
        for h in halfspaces {
            let v = h.violation(&u);
            worst = worst.max(v);
            if v > 0.0 {
                u = h.project(&u);
            }
        }
        let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if worst <= FEASIBILITY_TOL * scale {
            return Some(u);
        }
    }
    None
}

/// A feasible object-scale set.
#[derive(Clone, Debug, PartialEq)]
pub enum Dictionary<S> {
    Finite(FiniteDict<S>),
    Interval { lo: Scale<S>, hi: Scale<S> },
    LogBox(LogBox),
    LogPolytope(LogPolytope),
}

impl<S: Scalar> Dictionary<S> {
    pub fn finite(items: Vec<DictItem<S>>) -> Result<Self> {
        Ok(Dictionary::Finite(FiniteDict::new(items)?))
    }

    pub fn interval(lo: Scale<S>, hi: Scale<S>) -> Result<Self> {
        if lo > hi {
            return Err(Error::BadInterval);
        }
        Ok(Dictionary::Interval { lo, hi })
    }

    pub fn log_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Ok(Dictionary::LogBox(LogBox::new(lo, hi)?))
    }

    pub fn log_polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Ok(Dictionary::LogPolytope(LogPolytope::new(halfspaces)?))
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Dictionary::Finite(_) => "finite",
            Dictionary::Interval { .. } => "interval",
            Dictionary::LogBox(_) => "logbox",
            Dictionary::LogPolytope(_) => "logpolytope",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Dictionary::Finite(d) => d.dim(),
            Dictionary::Interval { .. } => 1,
            Dictionary::LogBox(b) => b.dim(),
            Dictionary::LogPolytope(p) => p.dim(),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let variant = v
            .get("variant")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("dictionary JSON needs a \"variant\" field".into()))?;
        match variant {
            "finite" => {
                let raw = v
                    .get("items")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("finite dictionary needs \"items\"".into()))?;
                let mut items = Vec::with_capacity(raw.len());
                for entry in raw {
                    let id = entry
                        .get("id")
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse("item needs a string \"id\"".into()))?;
                    let scale = entry
                        .get("scale")
                        .ok_or_else(|| Error::Parse(format!("item {id:?} needs \"scale\"")))?;
                    let coords = match scale {
                        Value::Array(parts) => parts
                            .iter()
                            .map(|p| Scale::new(S::from_json(p)?))
                            .collect::<Result<Vec<_>>>()?,
                        single => vec![Scale::new(S::from_json(single)?)?],
                    };
                    items.push(DictItem::new(id, ScaleVec::new(coords)?));
                }
                Self::finite(items)
            }
            "interval" => {
                let lo = Scale::new(S::from_json(field(v, "lo")?)?)?;
                let hi = Scale::new(S::from_json(field(v, "hi")?)?)?;
                Self::interval(lo, hi)
            }
            "logbox" => {
                let lo = f64_array(field(v, "lo")?)?;
                let hi = f64_array(field(v, "hi")?)?;
                Self::log_box(lo, hi)
            }
            "logpolytope" => {
                let raw = v.get("halfspaces").and_then(Value::as_array).ok_or_else(|| {
                    Error::Parse("logpolytope dictionary needs \"halfspaces\"".into())
                })?;
                let halfspaces = raw
                    .iter()
                    .map(|h| {
                        let normal = f64_array(field(h, "normal")?)?;
                        let offset = field(h, "offset")?
                            .as_f64()
                            .ok_or_else(|| Error::Parse("offset must be a number".into()))?;
                        Halfspace::new(normal, offset)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::log_polytope(halfspaces)
            }
            other => Err(Error::Parse(format!("unknown dictionary variant {other:?}"))),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Dictionary::Finite(d) => {
                let items: Vec<Value> = d
                    .items()
                    .iter()
                    .map(|item| {
                        let scale = if item.scales().dim() == 1 {
                            item.scale().value().to_json()
                        } else {
                            Value::Array(
                                item.scales()
                                    .coords()
                                    .iter()
                                    .map(|s| s.value().to_json())
                                    .collect(),
                            )
                        };
                        json!({ "id": item.id(), "scale": scale })
                    })
                    .collect();
                json!({ "variant": "finite", "items": items })
            }
            Dictionary::Interval { lo, hi } => json!({
                "variant": "interval",
                "lo": lo.value().to_json(),
                "hi": hi.value().to_json(),
            }),
            Dictionary::LogBox(b) => json!({
                "variant": "logbox",
                "lo": b.lo(),
                "hi": b.hi(),
            }),
            Dictionary::LogPolytope(p) => {
                let halfspaces: Vec<Value> = p
                    .halfspaces()
                    .iter()
                    .map(|h| json!({ "normal": h.normal(), "offset": h.offset() }))
                    .collect();
                json!({ "variant": "logpolytope", "halfspaces": halfspaces })
            }
        }
    }
}

fn field<'v>(v: &'v Value, name: &str) -> Result<&'v Value> {
    v.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

fn f64_array(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of numbers".into()))?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("expected a number, got {x}")))
        })
        .collect()
}

/// A named space with its scale image and penalty: the triple every
/// reference structure is built from.
#[derive(Clone, Debug)]
pub struct CostedSpace<S> {
    pub name: String,
    pub dict: Dictionary<S>,
    pub penalty: Penalty,
}

impl<S: Scalar> CostedSpace<S> {
    pub fn new(name: impl Into<String>, dict: Dictionary<S>, penalty: Penalty) -> Self {
        CostedSpace {
            name: name.into(),
            dict,
            penalty,
        }
    }
}

/// Ratio-induced reference cost `J(s / o)`; symmetric in its arguments.
pub fn ref_cost<S: Scalar>(s: &Scale<S>, o: &Scale<S>, p: &Penalty) -> Result<S> {
    p.eval(&s.ratio_to(o))
}

/// Separable reference cost: the sum of coordinatewise ratio penalties.
pub fn ref_cost_vec<S: Scalar>(s: &ScaleVec<S>, o: &ScaleVec<S>, p: &Penalty) -> Result<S> {
    if s.dim() != o.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: o.dim(),
        });
    }
    let mut total = S::zero();
    for (a, b) in s.coords().iter().zip(o.coords()) {
        total = total + ref_cost(a, b, p)?;
    }
    Ok(total)
}

/// Intrinsic cost of a configuration: the penalty of its own scale.
pub fn intrinsic_cost<S: Scalar>(c: &Scale<S>, p: &Penalty) -> Result<S> {
    p.eval(c.value())
}

/// Intrinsic cost of a multi-coordinate configuration.
pub fn intrinsic_cost_vec<S: Scalar>(c: &ScaleVec<S>, p: &Penalty) -> Result<S> {
    let mut total = S::zero();
    for s in c.coords() {
        total = total + intrinsic_cost(s, p)?;
    }
    Ok(total)
}
