//! Meaning sets: argmin of the reference cost over a dictionary, decision
//! margins, the symbol predicate, and scale-window/capacity bounds.
//!
//! A meaning set is never empty for the supported dictionary carriers
//! (closed + coercive gives attainment), and it is set-valued: ties are
//! reported in full, exactly on the rational backend and within a relative
//! tolerance on floats.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::penalty::Penalty;
use crate::scalar::{Scalar, Tol};
use crate::spaces::{intrinsic_cost, ref_cost, Dictionary, FiniteDict, Scale, ScaleVec};

/// Decision margin: gap between the optimal cost and the best non-optimal
/// cost, or `Infinite` when every candidate ties.
#[derive(Clone, Debug, PartialEq)]
pub enum Margin<S> {
    Gap(S),
    Infinite,
}

impl<S: Scalar> Margin<S> {
    /// True when the margin strictly exceeds `2 * eta`, the threshold under
    /// which `eta`-bounded perturbations cannot create new minimizers.
    pub fn exceeds_double(&self, eta: &S) -> bool {
        match self {
            Margin::Infinite => true,
            Margin::Gap(g) => *g > eta.clone() + eta.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Margin::Gap(g) => g.to_json(),
            Margin::Infinite => Value::String("inf".into()),
        }
    }
}

/// The argmin set of a meaning computation.
#[derive(Clone, Debug, PartialEq)]
pub enum Minimizers<S> {
    /// Object ids from a finite dictionary (the full tie fiber).
    Ids(Vec<String>),
    /// The unique minimizer of a 1-D continuous dictionary.
    Scale(Scale<S>),
    /// The unique minimizer of a d-D continuous dictionary.
    ScaleVec(ScaleVec<S>),
}

impl<S: Scalar> Minimizers<S> {
    pub fn ids(&self) -> Option<&[String]> {
        match self {
            Minimizers::Ids(ids) => Some(ids),
            _ => None,
        }
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids().is_some_and(|ids| ids.iter().any(|i| i == id))
    }
}

/// Result of a meaning computation: minimizer set, optimal cost, and (for
/// finite dictionaries) the decision margin.
#[derive(Clone, Debug, PartialEq)]
pub struct MeaningResult<S> {
    pub minimizers: Minimizers<S>,
    pub optimal_cost: S,
    pub margin: Option<Margin<S>>,
}

impl<S: Scalar> MeaningResult<S> {
    pub fn to_json(&self) -> Value {
        let margin = match &self.margin {
            Some(m) => m.to_json(),
            None => Value::Null,
        };
        match &self.minimizers {
            Minimizers::Ids(ids) => json!({
                "minimizers": ids,
                "cost": self.optimal_cost.to_json(),
                "margin": margin,
            }),
            Minimizers::Scale(s) => json!({
                "minimizer_scale": s.value().to_json(),
                "cost": self.optimal_cost.to_json(),
                "margin": margin,
            }),
            Minimizers::ScaleVec(v) => json!({
                "minimizer_scales": v.coords().iter().map(|s| s.value().to_json()).collect::<Vec<_>>(),
                "cost": self.optimal_cost.to_json(),
                "margin": margin,
            }),
        }
    }
}

/// Full scan over explicit costs: argmin indices, optimal cost, and margin.
pub(crate) fn scan_costs<S: Scalar>(costs: &[S], tol: Tol) -> (Vec<usize>, S, Margin<S>) {
    debug_assert!(!costs.is_empty());
    let mut best = costs[0].clone();
    for c in &costs[1..] {
        if c.cmp_total(&best).is_lt() {
            best = c.clone();
        }
    }
    let mut tied = Vec::new();
    let mut margin: Option<S> = None;
    for (i, c) in costs.iter().enumerate() {
        if c.tie_eq(&best, tol) {
            tied.push(i);
        } else {
            let gap = c.clone() - best.clone();
            margin = Some(match margin {
                Some(m) if m.cmp_total(&gap).is_le() => m,
                _ => gap,
            });
        }
    }
    let margin = match margin {
        Some(g) => Margin::Gap(g),
        None => Margin::Infinite,
    };
    (tied, best, margin)
}

fn finite_1d<S: Scalar>(dict: &Dictionary<S>) -> Result<&FiniteDict<S>> {
    match dict {
        Dictionary::Finite(d) if d.dim() == 1 => Ok(d),
        Dictionary::Finite(d) => Err(Error::DimensionMismatch {
            left: 1,
            right: d.dim(),
        }),
        other => Err(Error::VariantMismatch {
            expected: "finite (1-D)",
            found: other.variant_name(),
        }),
    }
}

fn clamp_scale<S: Scalar>(s: &Scale<S>, lo: &Scale<S>, hi: &Scale<S>) -> Scale<S> {
    if s < lo {
        lo.clone()
    } else if s > hi {
        hi.clone()
    } else {
        s.clone()
    }
}

/// The meaning set of configuration scale `s` over a 1-D dictionary.
///
/// Finite dictionaries are scanned exactly (full tie fiber plus margin);
/// interval dictionaries have the unique minimizer `clamp(s, lo, hi)` by
/// unimodality of `y -> J(s/y)`.
pub fn mean<S: Scalar>(
    s: &Scale<S>,
    dict: &Dictionary<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<MeaningResult<S>> {
    match dict {
        Dictionary::Finite(_) => {
            let d = finite_1d(dict)?;
            let costs = d
                .items()
                .iter()
                .map(|item| ref_cost(s, item.scale(), p))
                .collect::<Result<Vec<_>>>()?;
            let (tied, best, margin) = scan_costs(&costs, tol);
            let ids = tied
                .into_iter()
                .map(|i| d.items()[i].id().to_string())
                .collect();
            Ok(MeaningResult {
                minimizers: Minimizers::Ids(ids),
                optimal_cost: best,
                margin: Some(margin),
            })
        }
        Dictionary::Interval { lo, hi } => {
            let best = clamp_scale(s, lo, hi);
            let cost = ref_cost(s, &best, p)?;
            Ok(MeaningResult {
                minimizers: Minimizers::Scale(best),
                optimal_cost: cost,
                margin: None,
            })
        }
        other => Err(Error::VariantMismatch {
            expected: "finite or interval (1-D)",
            found: other.variant_name(),
        }),
    }
}

/// Minimize the total cost `J(s) + J(o) + J(s/o)` over the dictionary.
///
/// The total vanishes exactly when `s = 1` and `1` is a feasible scale. Over
/// an interval the objective in `o` is the two-hop cost from `s` to `1`, so
/// the unconstrained optimum is `sqrt(s)`, clamped into `[lo, hi]` (compared
/// in squares, so the exact backend never materializes the square root until
/// it is known to be needed).
pub fn mean_total<S: Scalar>(
    s: &Scale<S>,
    dict: &Dictionary<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<MeaningResult<S>> {
    let base = intrinsic_cost(s, p)?;
    match dict {
        Dictionary::Finite(_) => {
            let d = finite_1d(dict)?;
            let costs = d
                .items()
                .iter()
                .map(|item| {
                    Ok(base.clone() + intrinsic_cost(item.scale(), p)? + ref_cost(s, item.scale(), p)?)
                })
                .collect::<Result<Vec<_>>>()?;
            let (tied, best, margin) = scan_costs(&costs, tol);
            let ids = tied
                .into_iter()
                .map(|i| d.items()[i].id().to_string())
                .collect();
            Ok(MeaningResult {
                minimizers: Minimizers::Ids(ids),
                optimal_cost: best,
                margin: Some(margin),
            })
        }
        Dictionary::Interval { lo, hi } => {
            let sv = s.value();
            let best = if sv < &(lo.value().clone() * lo.value().clone()) {
                lo.clone()
            } else if sv > &(hi.value().clone() * hi.value().clone()) {
                hi.clone()
            } else {
                let root = sv.sqrt_exact().ok_or_else(|| {
                    Error::ExactnessLost(format!("interior optimum sqrt({sv}) is irrational"))
                })?;
                Scale::new(root)?
            };
            let cost = base + intrinsic_cost(&best, p)? + ref_cost(s, &best, p)?;
            Ok(MeaningResult {
                minimizers: Minimizers::Scale(best),
                optimal_cost: cost,
                margin: None,
            })
        }
        other => Err(Error::VariantMismatch {
            expected: "finite or interval (1-D)",
            found: other.variant_name(),
        }),
    }
}

/// The symbol predicate: `s` is a symbol for the object `o_id` when the
/// object is one of its meanings and the configuration compresses it,
/// `J(s) < J(scale(o_id))` strictly.
pub fn is_symbol<S: Scalar>(
    s: &Scale<S>,
    o_id: &str,
    dict: &Dictionary<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<bool> {
    let d = finite_1d(dict)?;
    let item = d
        .get(o_id)
        .ok_or_else(|| Error::UnknownId(o_id.to_string()))?;
    let result = mean(s, dict, p, tol)?;
    if !result.minimizers.contains_id(o_id) {
        return Ok(false);
    }
    let js = intrinsic_cost(s, p)?;
    let jo = intrinsic_cost(item.scale(), p)?;
    Ok(js.cmp_total(&jo).is_lt())
}

/// A closed window of object scales.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleWindow<S> {
    lo: Scale<S>,
    hi: Scale<S>,
}

impl<S: Scalar> ScaleWindow<S> {
    fn new(lo: S, hi: S) -> Result<Self> {
        Ok(ScaleWindow {
            lo: Scale::new(lo)?,
            hi: Scale::new(hi)?,
        })
    }

    pub fn lo(&self) -> &Scale<S> {
        &self.lo
    }

    pub fn hi(&self) -> &Scale<S> {
        &self.hi
    }

    pub fn contains(&self, s: &Scale<S>) -> bool {
        &self.lo <= s && s <= &self.hi
    }

    pub fn to_json(&self) -> Value {
        json!({ "lo": self.lo.value().to_json(), "hi": self.hi.value().to_json() })
    }
}

/// Object-scale window for meanings of a low-cost configuration.
///
/// If `J(s) <= eps` and the dictionary contains scale 1, every meaning of
/// `s` has its scale in `[s / b_eps, s * b_eps]`. The hypothesis
/// `J(s) <= eps` is enforced as a precondition.
pub fn low_cost_window<S: Scalar>(s: &Scale<S>, eps: &S, p: &Penalty) -> Result<ScaleWindow<S>> {
    let js = intrinsic_cost(s, p)?;
    if js.cmp_total(eps).is_gt() {
        return Err(Error::LevelBelowIntrinsicCost {
            cost: js.to_string(),
            level: eps.to_string(),
        });
    }
    let w = p.sublevel(eps)?;
    ScaleWindow::new(
        s.value().clone() / w.hi().clone(),
        s.value().clone() / w.lo().clone(),
    )
}

/// Scale window `[1/b_eps^2, b_eps^2]` containing every meaning of every
/// configuration with intrinsic cost at most `eps` (dictionary containing 1).
pub fn near_balance_window<S: Scalar>(eps: &S, p: &Penalty) -> Result<ScaleWindow<S>> {
    let w = p.sublevel(eps)?;
    let hi = w.hi().clone() * w.hi().clone();
    ScaleWindow::new(hi.recip(), hi)
}

/// Backbone window for the near-balanced configuration class
/// `(1 - delta, 1 + delta)`: every meaning of every configuration in the
/// class (over any dictionary containing 1) has scale in
/// `[(1 - delta)^2, (1 + delta)/(1 - delta)]`.
///
/// The window is the same for every penalty exponent: the threshold is the
/// penalty's own value at `1 - delta`, and the sublevel set of `J_a` at level
/// `J_a(y)` is `[y, 1/y]` regardless of `a`.
pub fn backbone_window<S: Scalar>(delta: &S) -> Result<ScaleWindow<S>> {
    if !delta.is_positive() || delta >= &S::one() {
        return Err(Error::DeltaOutOfRange(delta.to_string()));
    }
    let below = S::one() - delta.clone();
    let above = S::one() + delta.clone();
    ScaleWindow::new(below.clone() * below.clone(), above / below)
}

/// Upper bound on the referential capacity of the near-balanced class: the
/// number of dictionary objects whose scale falls in the backbone window.
/// Counts objects, not distinct scales.
pub fn capacity_bound<S: Scalar>(dict: &Dictionary<S>, delta: &S) -> Result<usize> {
    let d = finite_1d(dict)?;
    let w = backbone_window(delta)?;
    Ok(d.items().iter().filter(|i| w.contains(i.scale())).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn scale(n: i64, d: i64) -> Scale<Rat> {
        Scale::new(rat(n, d)).unwrap()
    }

    fn three_dict() -> Dictionary<Rat> {
        Dictionary::finite(vec![
            crate::spaces::DictItem::new("o1", ScaleVec::new(vec![scale(1, 4)]).unwrap()),
            crate::spaces::DictItem::new("o2", ScaleVec::new(vec![scale(1, 1)]).unwrap()),
            crate::spaces::DictItem::new("o3", ScaleVec::new(vec![scale(4, 1)]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn mean_table_row() {
        let p = Penalty::canonical();
        let r = mean(&scale(3, 10), &three_dict(), &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Ids(vec!["o1".into()]));
        assert_eq!(r.optimal_cost, rat(1, 60));
        assert_eq!(r.margin, Some(Margin::Gap(rat(4, 5))));
    }

    #[test]
    fn mean_interval_clamps() {
        let p = Penalty::canonical();
        let dict = Dictionary::interval(scale(2, 1), scale(5, 1)).unwrap();
        let r = mean(&scale(3, 1), &dict, &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Scale(scale(3, 1)));
        assert!(r.optimal_cost.is_zero());
        assert_eq!(r.margin, None);

        let r = mean(&scale(10, 1), &dict, &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Scale(scale(5, 1)));
        assert_eq!(r.optimal_cost, rat(1, 4));
    }

    #[test]
    fn mean_boundary_tie() {
        // x = 1/2 sits on the o1/o2 boundary: exactly two meanings.
        let p = Penalty::canonical();
        let r = mean(&scale(1, 2), &three_dict(), &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Ids(vec!["o1".into(), "o2".into()]));
        assert_eq!(r.optimal_cost, rat(1, 4));
        assert_eq!(r.margin, Some(Margin::Gap(rat(45, 16))));
    }

    #[test]
    fn mean_fiber_of_duplicate_scales() {
        let p = Penalty::canonical();
        let dict = Dictionary::finite(vec![
            crate::spaces::DictItem::new("a", ScaleVec::new(vec![scale(3, 1)]).unwrap()),
            crate::spaces::DictItem::new("b", ScaleVec::new(vec![scale(3, 1)]).unwrap()),
            crate::spaces::DictItem::new("c", ScaleVec::new(vec![scale(7, 1)]).unwrap()),
        ])
        .unwrap();
        let r = mean(&scale(3, 1), &dict, &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Ids(vec!["a".into(), "b".into()]));
        assert!(r.optimal_cost.is_zero());
    }

    #[test]
    fn mean_total_examples() {
        let p = Penalty::canonical();
        let r = mean_total(&scale(1, 1), &three_dict(), &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Ids(vec!["o2".into()]));
        assert!(r.optimal_cost.is_zero());

        let single = Dictionary::finite(vec![crate::spaces::DictItem::new(
            "o",
            ScaleVec::new(vec![scale(2, 1)]).unwrap(),
        )])
        .unwrap();
        let r = mean_total(&scale(2, 1), &single, &p, Tol::default()).unwrap();
        assert_eq!(r.optimal_cost, rat(1, 2));

        let pair = Dictionary::finite(vec![
            crate::spaces::DictItem::new("o1", ScaleVec::new(vec![scale(1, 1)]).unwrap()),
            crate::spaces::DictItem::new("o2", ScaleVec::new(vec![scale(2, 1)]).unwrap()),
        ])
        .unwrap();
        let r = mean_total(&scale(2, 1), &pair, &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Ids(vec!["o1".into(), "o2".into()]));
        assert_eq!(r.optimal_cost, rat(1, 2));
    }

    #[test]
    fn mean_total_interval_clamps_at_square_root() {
        let p = Penalty::canonical();
        let dict = Dictionary::interval(scale(3, 1), scale(5, 1)).unwrap();
        // sqrt(4) = 2 < 3, so the optimum clamps to the lower endpoint.
        let r = mean_total(&scale(4, 1), &dict, &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Scale(scale(3, 1)));

        let wide = Dictionary::interval(scale(1, 2), scale(5, 1)).unwrap();
        let r = mean_total(&scale(4, 1), &wide, &p, Tol::default()).unwrap();
        assert_eq!(r.minimizers, Minimizers::Scale(scale(2, 1)));
        // J(4) + J(2) + J(2) = 9/8 + 1/4 + 1/4.
        assert_eq!(r.optimal_cost, rat(13, 8));

        // Interior optimum sqrt(3) is irrational on the exact backend.
        let r = mean_total(&scale(3, 1), &wide, &p, Tol::default());
        assert!(matches!(r, Err(Error::ExactnessLost(_))));
        // The float backend handles it.
        let fdict: Dictionary<f64> =
            Dictionary::interval(Scale::new(0.5).unwrap(), Scale::new(5.0).unwrap()).unwrap();
        let r = mean_total(&Scale::new(3.0).unwrap(), &fdict, &p, Tol::default()).unwrap();
        match r.minimizers {
            Minimizers::Scale(s) => assert!((s.value() - 3.0f64.sqrt()).abs() < 1e-12),
            other => panic!("expected a scale minimizer, got {other:?}"),
        }
    }

    #[test]
    fn symbol_predicate() {
        let p = Penalty::canonical();
        let single = Dictionary::finite(vec![crate::spaces::DictItem::new(
            "o",
            ScaleVec::new(vec![scale(4, 1)]).unwrap(),
        )])
        .unwrap();
        // Meaning holds trivially and J(2) = 1/4 < J(4) = 9/8.
        assert!(is_symbol(&scale(2, 1), "o", &single, &p, Tol::default()).unwrap());

        let unit = Dictionary::finite(vec![crate::spaces::DictItem::new(
            "o",
            ScaleVec::new(vec![scale(1, 1)]).unwrap(),
        )])
        .unwrap();
        // Strict compression fails: J(1) = J(1).
        assert!(!is_symbol(&scale(1, 1), "o", &unit, &p, Tol::default()).unwrap());

        // o2 is not a meaning of 3/10.
        assert!(!is_symbol(&scale(3, 10), "o2", &three_dict(), &p, Tol::default()).unwrap());
        assert!(matches!(
            is_symbol(&scale(1, 1), "zzz", &three_dict(), &p, Tol::default()),
            Err(Error::UnknownId(_))
        ));
    }

    #[test]
    fn low_cost_window_frozen_values() {
        let p = Penalty::canonical();
        let w = low_cost_window(&scale(1, 1), &rat(1, 4), &p).unwrap();
        assert_eq!((w.lo(), w.hi()), (&scale(1, 2), &scale(2, 1)));

        let w = low_cost_window(&scale(1, 1), &rat(0, 1), &p).unwrap();
        assert_eq!((w.lo(), w.hi()), (&scale(1, 1), &scale(1, 1)));

        let w = low_cost_window(&scale(2, 1), &rat(1, 4), &p).unwrap();
        assert_eq!((w.lo(), w.hi()), (&scale(1, 1), &scale(4, 1)));

        // J(3) = 2/3 > 1/4: hypothesis violated.
        assert!(matches!(
            low_cost_window(&scale(3, 1), &rat(1, 4), &p),
            Err(Error::LevelBelowIntrinsicCost { .. })
        ));
    }

    #[test]
    fn near_balance_window_frozen_values() {
        let p = Penalty::canonical();
        let w = near_balance_window(&rat(0, 1), &p).unwrap();
        assert_eq!((w.lo(), w.hi()), (&scale(1, 1), &scale(1, 1)));

        let w = near_balance_window(&rat(1, 4), &p).unwrap();
        assert_eq!((w.lo(), w.hi()), (&scale(1, 4), &scale(4, 1)));

        // eps = 1: b = 2 + sqrt(3) on the float backend.
        let w = near_balance_window(&1.0f64, &p).unwrap();
        let b2 = (2.0 + 3.0f64.sqrt()).powi(2);
        assert!((w.hi().value() - b2).abs() < 1e-12);
        assert!((w.lo().value() - 1.0 / b2).abs() < 1e-14);
    }

    #[test]
    fn backbone_window_frozen_values() {
        let w = backbone_window(&rat(1, 2)).unwrap();
        assert_eq!((w.lo(), w.hi()), (&scale(1, 4), &scale(3, 1)));

        // Monotone containment as delta shrinks.
        let smaller = backbone_window(&rat(1, 4)).unwrap();
        assert!(w.lo() <= smaller.lo() && smaller.hi() <= w.hi());

        assert!(backbone_window(&rat(0, 1)).is_err());
        assert!(backbone_window(&rat(1, 1)).is_err());
        assert!(backbone_window(&rat(3, 2)).is_err());
    }

    #[test]
    fn capacity_bound_frozen_values() {
        assert_eq!(capacity_bound(&three_dict(), &rat(1, 2)).unwrap(), 2);

        let unit = Dictionary::finite(vec![crate::spaces::DictItem::new(
            "o",
            ScaleVec::new(vec![scale(1, 1)]).unwrap(),
        )])
        .unwrap();
        assert_eq!(capacity_bound(&unit, &rat(1, 10)).unwrap(), 1);

        let far = Dictionary::finite(vec![crate::spaces::DictItem::new(
            "o",
            ScaleVec::new(vec![scale(100, 1)]).unwrap(),
        )])
        .unwrap();
        assert_eq!(capacity_bound(&far, &rat(1, 2)).unwrap(), 0);

        let interval = Dictionary::interval(scale(1, 1), scale(2, 1)).unwrap();
        assert!(matches!(
            capacity_bound(&interval, &rat(1, 2)),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn meaning_result_json_shape() {
        let p = Penalty::canonical();
        let r = mean(&scale(3, 10), &three_dict(), &p, Tol::default()).unwrap();
        assert_eq!(
            r.to_json(),
            serde_json::json!({"minimizers": ["o1"], "cost": "1/60", "margin": "4/5"})
        );
        let dict = Dictionary::interval(scale(2, 1), scale(5, 1)).unwrap();
        let r = mean(&scale(10, 1), &dict, &p, Tol::default()).unwrap();
        assert_eq!(
            r.to_json(),
            serde_json::json!({"minimizer_scale": "5", "cost": "1/4", "margin": null})
        );
    }

    fn pos_scale() -> impl Strategy<Value = Scale<Rat>> {
        (1i64..=64, 1i64..=64).prop_map(|(n, d)| Scale::new(Rat::from_ratio(n, d)).unwrap())
    }

    proptest! {
        #[test]
        fn interval_minimizer_is_projection(
            s in pos_scale(), a in pos_scale(), b in pos_scale()
        ) {
            let p = Penalty::canonical();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let dict = Dictionary::interval(lo.clone(), hi.clone()).unwrap();
            let r = mean(&s, &dict, &p, Tol::default()).unwrap();
            let expect = clamp_scale(&s, &lo, &hi);
            prop_assert_eq!(&r.minimizers, &Minimizers::Scale(expect));
            prop_assert_eq!(r.optimal_cost.is_zero(), lo <= s && s <= hi);
        }

        #[test]
        fn scale_match_returns_the_fiber(
            scales in proptest::collection::vec((1i64..=16, 1i64..=16), 1..8),
            pick in 0usize..8,
        ) {
            let p = Penalty::canonical();
            let items: Vec<_> = scales
                .iter()
                .enumerate()
                .map(|(i, (n, d))| crate::spaces::DictItem::new(
                    format!("o{i}"),
                    ScaleVec::new(vec![Scale::new(Rat::from_ratio(*n, *d)).unwrap()]).unwrap(),
                ))
                .collect();
            let dict = Dictionary::finite(items.clone()).unwrap();
            let target = &items[pick % items.len()];
            let r = mean(target.scale(), &dict, &p, Tol::default()).unwrap();
            prop_assert!(r.optimal_cost.is_zero());
            let fiber: Vec<String> = items
                .iter()
                .filter(|i| i.scale() == target.scale())
                .map(|i| i.id().to_string())
                .collect();
            prop_assert_eq!(r.minimizers.ids().unwrap(), &fiber[..]);
        }

        #[test]
        fn mean_total_zero_iff_balanced(
            s in pos_scale(),
            scales in proptest::collection::vec((1i64..=16, 1i64..=16), 1..8),
        ) {
            let p = Penalty::canonical();
            let items: Vec<_> = scales
                .iter()
                .enumerate()
                .map(|(i, (n, d))| crate::spaces::DictItem::new(
                    format!("o{i}"),
                    ScaleVec::new(vec![Scale::new(Rat::from_ratio(*n, *d)).unwrap()]).unwrap(),
                ))
                .collect();
            let dict = Dictionary::finite(items.clone()).unwrap();
            let r = mean_total(&s, &dict, &p, Tol::default()).unwrap();
            let one = Scale::new(Rat::one()).unwrap();
            let expect_zero = s == one && items.iter().any(|i| i.scale() == &one);
            prop_assert_eq!(r.optimal_cost.is_zero(), expect_zero);
        }
    }
}
