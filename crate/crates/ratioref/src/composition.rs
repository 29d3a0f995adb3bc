//! Composition of reference structures: product models, sequential
//! mediation through an intermediate dictionary, and k-step chains.
//!
//! Mediation minimizes the two-hop cost `J(a/b) + J(b/c)` over feasible
//! mediator ratios `b`. In log-coordinates the objective is
//! `2 cosh(log(a/c)/2) cosh(log b - log b_geo) - 2` with `b_geo = sqrt(ac)`,
//! so optimal mediators are exactly the feasible ratios nearest `b_geo` in
//! log distance. The exact backend orders that distance by comparing
//! `max(r, 1/r)` with `r = b^2 / (ac)`, never taking a square root.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::meaning::{mean, MeaningResult};
use crate::penalty::Penalty;
use crate::scalar::{Scalar, Tol};
use crate::spaces::{Dictionary, Scale};

/// Meaning of a product configuration: componentwise meanings, whose
/// Cartesian product is the argmin of the summed cost over `d1 x d2`.
pub fn product_mean<S: Scalar>(
    s1: &Scale<S>,
    s2: &Scale<S>,
    d1: &Dictionary<S>,
    d2: &Dictionary<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<(MeaningResult<S>, MeaningResult<S>)> {
    Ok((mean(s1, d1, p, tol)?, mean(s2, d2, p, tol)?))
}

/// A resolved two-hop mediation from `source` through a mediator dictionary
/// to `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct MediationPlan<S> {
    pub source: Scale<S>,
    pub target: Scale<S>,
    /// The unconstrained balance point `sqrt(source * target)`, when it is
    /// representable in the backend; its square is always `source * target`.
    pub balance_point: Option<Scale<S>>,
    /// All optimal mediator ratios, ascending (ties are two-sided at most).
    pub chosen: Vec<Scale<S>>,
    /// `[J(a/b), J(b/c)]` for the smallest chosen mediator.
    pub hop_costs: [S; 2],
    pub total_cost: S,
    pub direct_cost: S,
    /// `direct_cost - total_cost`; negative when every feasible mediator is
    /// worse than direct reference.
    pub gain: S,
}

impl<S: Scalar> MediationPlan<S> {
    /// `source * target`, exact in every backend.
    pub fn balance_point_squared(&self) -> S {
        self.source.value().clone() * self.target.value().clone()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.value().to_json(),
            "target": self.target.value().to_json(),
            "balance_point": self.balance_point.as_ref().map_or(Value::Null, |b| b.value().to_json()),
            "balance_point_squared": self.balance_point_squared().to_json(),
            "chosen": self.chosen.iter().map(|b| b.value().to_json()).collect::<Vec<_>>(),
            "hop_costs": [self.hop_costs[0].to_json(), self.hop_costs[1].to_json()],
            "total": self.total_cost.to_json(),
            "direct": self.direct_cost.to_json(),
            "gain": self.gain.to_json(),
        })
    }
}

/// Log-distance key from `b` to the balance point: `max(r, 1/r)` with
/// `r = b^2 / (a c)`. Monotone in `|log(b / b_geo)|` and exactly rational.
fn balance_distance_key<S: Scalar>(b: &Scale<S>, prod: &S) -> S {
    let r = b.value().clone() * b.value().clone() / prod.clone();
    if r >= S::one() {
        r
    } else {
        r.recip()
    }
}

/// Optimal sequential mediation of `a -> b -> c` over a mediator dictionary.
///
/// Finite dictionaries return the full tie set of optimal ratios; intervals
/// clamp the balance point (unique optimum). When the balance point is
/// feasible the total collapses to `2 J(sqrt(a/c))`.
pub fn mediate<S: Scalar>(
    a: &Scale<S>,
    c: &Scale<S>,
    mediators: &Dictionary<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<MediationPlan<S>> {
    let prod = a.value().clone() * c.value().clone();
    let chosen: Vec<Scale<S>> = match mediators {
        Dictionary::Finite(d) => {
            if d.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    left: 1,
                    right: d.dim(),
                });
            }
            let keys: Vec<S> = d
                .items()
                .iter()
                .map(|item| balance_distance_key(item.scale(), &prod))
                .collect();
            let mut best = keys[0].clone();
            for k in &keys[1..] {
                if k.cmp_total(&best).is_lt() {
                    best = k.clone();
                }
            }
            let mut scales: Vec<Scale<S>> = d
                .items()
                .iter()
                .zip(&keys)
                .filter(|(_, k)| k.tie_eq(&best, tol))
                .map(|(item, _)| item.scale().clone())
                .collect();
            scales.sort_by(|x, y| x.value().cmp_total(y.value()));
            scales.dedup();
            scales
        }
        Dictionary::Interval { lo, hi } => {
            let b = if prod < lo.value().clone() * lo.value().clone() {
                lo.clone()
            } else if prod > hi.value().clone() * hi.value().clone() {
                hi.clone()
            } else {
                let root = prod.sqrt_exact().ok_or_else(|| {
                    Error::ExactnessLost(format!("interior balance point sqrt({prod}) is irrational"))
                })?;
                Scale::new(root)?
            };
            vec![b]
        }
        other => {
            return Err(Error::VariantMismatch {
                expected: "finite or interval (1-D)",
                found: other.variant_name(),
            })
        }
    };

    let pick = &chosen[0];
    let hop1 = p.eval(&a.ratio_to(pick))?;
    let hop2 = p.eval(&pick.ratio_to(c))?;
    let total_cost = hop1.clone() + hop2.clone();
    let direct_cost = p.eval(&a.ratio_to(c))?;
    let gain = direct_cost.clone() - total_cost.clone();
    Ok(MediationPlan {
        source: a.clone(),
        target: c.clone(),
        balance_point: prod.sqrt_exact().and_then(|r| Scale::new(r).ok()),
        chosen,
        hop_costs: [hop1, hop2],
        total_cost,
        direct_cost,
        gain,
    })
}

/// How much a feasible balance point saves over direct reference:
/// `J(x) - 2 J(sqrt(x))`, which equals
/// `((sqrt(x) - 1)^2 + (1/sqrt(x) - 1)^2) / 2`. Nonnegative, zero only at
/// `x = 1`.
pub fn mediation_gain<S: Scalar>(x: &S, p: &Penalty) -> Result<S> {
    if !x.is_positive() {
        return Err(Error::NonPositive("ratio"));
    }
    let root = x
        .sqrt_exact()
        .ok_or_else(|| Error::ExactnessLost(format!("sqrt({x}) is irrational")))?;
    let direct = p.eval(x)?;
    let halved = p.eval(&root)?;
    Ok(direct - (halved.clone() + halved))
}

/// An equal-log-increment chain from `source` to `target` in `k` hops.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPlan<S> {
    pub steps: u32,
    /// Shared hop ratio `(a/c)^(1/k)`.
    pub hop_ratio: Scale<S>,
    /// Intermediate scales `b_1 .. b_{k-1}` (empty for a direct hop).
    pub ratios: Vec<Scale<S>>,
    pub per_step_cost: S,
    pub total_cost: S,
}

impl<S: Scalar> ChainPlan<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "steps": self.steps,
            "hop_ratio": self.hop_ratio.value().to_json(),
            "ratios": self.ratios.iter().map(|b| b.value().to_json()).collect::<Vec<_>>(),
            "per_step_cost": self.per_step_cost.to_json(),
            "total_cost": self.total_cost.to_json(),
        })
    }
}

/// Split the ratio `a/c` into `k` equal log-increments. The total cost
/// `k (cosh(t/k) - 1)` with `t = log(a/c)` is nonincreasing in `k` and
/// vanishes as `k` grows; by convexity no other split of the same total
/// log-ratio beats it. The exact backend requires the `k`-th root of `a/c`
/// to be rational.
pub fn chain<S: Scalar>(a: &Scale<S>, c: &Scale<S>, k: u32, p: &Penalty) -> Result<ChainPlan<S>> {
    if k == 0 {
        return Err(Error::ZeroSteps);
    }
    let ratio = a.ratio_to(c);
    let hop = ratio.nth_root_exact(k).ok_or_else(|| {
        Error::ExactnessLost(format!("hop ratio ({ratio})^(1/{k}) is irrational"))
    })?;
    let per_step_cost = p.eval(&hop)?;
    let total_cost = S::from_int(k as i64) * per_step_cost.clone();
    let mut ratios = Vec::with_capacity(k.saturating_sub(1) as usize);
    let mut b = a.value().clone();
    for _ in 1..k {
        b = b / hop.clone();
        ratios.push(Scale::new(b.clone())?);
    }
    Ok(ChainPlan {
        steps: k,
        hop_ratio: Scale::new(hop)?,
        ratios,
        per_step_cost,
        total_cost,
    })
}

/// Randomized dominance check for the equal-increment chain: samples chains
/// with the same total log-ratio and reports `true` when none beats the
/// equal split (beyond a 1e-12 relative slack). Floating-point check;
/// deterministic for a fixed seed.
pub fn chain_optimality_check<S: Scalar>(
    a: &Scale<S>,
    c: &Scale<S>,
    k: u32,
    trials: u32,
    seed: u64,
    p: &Penalty,
) -> Result<bool> {
    if k == 0 {
        return Err(Error::ZeroSteps);
    }
    let t = (a.value().to_f64() / c.value().to_f64()).ln();
    let equal_total = k as f64 * p.log_form(t / k as f64);
    if k == 1 {
        return Ok(true); // no free intermediates to vary
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = t.abs() + 1.0;
    for _ in 0..trials {
        let mut increments: Vec<f64> = (0..k)
            .map(|_| rng.random_range(-spread..spread))
            .collect();
        let shift = (t - increments.iter().sum::<f64>()) / k as f64;
        for d in &mut increments {
            *d += shift;
        }
        let total: f64 = increments.iter().map(|d| p.log_form(*d)).sum();
        let slack = 1e-12 * total.max(equal_total).max(1.0);
        if total < equal_total - slack {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use crate::spaces::{DictItem, ScaleVec};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn scale(n: i64, d: i64) -> Scale<Rat> {
        Scale::new(rat(n, d)).unwrap()
    }

    fn finite(scales: &[(i64, i64)]) -> Dictionary<Rat> {
        let items = scales
            .iter()
            .enumerate()
            .map(|(i, (n, d))| {
                DictItem::new(
                    format!("m{}", i + 1),
                    ScaleVec::new(vec![scale(*n, *d)]).unwrap(),
                )
            })
            .collect();
        Dictionary::finite(items).unwrap()
    }

    #[test]
    fn mediate_through_feasible_balance_point() {
        let p = Penalty::canonical();
        let mediators = Dictionary::interval(scale(1, 2), scale(2, 1)).unwrap();
        let plan = mediate(&scale(4, 1), &scale(1, 4), &mediators, &p, Tol::default()).unwrap();
        assert_eq!(plan.chosen, vec![scale(1, 1)]);
        assert_eq!(plan.balance_point, Some(scale(1, 1)));
        assert_eq!(plan.hop_costs, [rat(9, 8), rat(9, 8)]);
        assert_eq!(plan.total_cost, rat(9, 4));
        assert_eq!(plan.direct_cost, rat(225, 32));
        assert_eq!(plan.gain, rat(153, 32));
    }

    #[test]
    fn mediate_picks_nearest_in_log_distance() {
        let p = Penalty::canonical();
        let plan = mediate(
            &scale(4, 1),
            &scale(1, 4),
            &finite(&[(2, 1), (8, 1)]),
            &p,
            Tol::default(),
        )
        .unwrap();
        assert_eq!(plan.chosen, vec![scale(2, 1)]);
        // J(2) + J(8) = 1/4 + 49/16.
        assert_eq!(plan.total_cost, rat(53, 16));

        let same = mediate(&scale(5, 1), &scale(5, 1), &finite(&[(5, 1)]), &p, Tol::default())
            .unwrap();
        assert_eq!(same.chosen, vec![scale(5, 1)]);
        assert!(same.total_cost.is_zero());
        assert!(same.gain.is_zero());
    }

    #[test]
    fn mediate_reports_two_sided_ties() {
        let p = Penalty::canonical();
        let plan = mediate(
            &scale(4, 1),
            &scale(1, 4),
            &finite(&[(1, 2), (2, 1)]),
            &p,
            Tol::default(),
        )
        .unwrap();
        assert_eq!(plan.chosen, vec![scale(1, 2), scale(2, 1)]);
        // Both sides cost J(8) + J(2).
        assert_eq!(plan.total_cost, rat(53, 16));
        let other = p.eval(&rat(4, 2)).unwrap() + p.eval(&rat(2 * 4, 1)).unwrap();
        assert_eq!(plan.total_cost, other);
    }

    #[test]
    fn mediate_interval_clamps_and_reports_irrational_interior() {
        let p = Penalty::canonical();
        // b_geo = sqrt(8) > 2: clamp to the upper endpoint.
        let mediators = Dictionary::interval(scale(1, 2), scale(2, 1)).unwrap();
        let plan = mediate(&scale(8, 1), &scale(1, 1), &mediators, &p, Tol::default()).unwrap();
        assert_eq!(plan.chosen, vec![scale(2, 1)]);
        assert_eq!(plan.balance_point, None);
        assert_eq!(plan.balance_point_squared(), rat(8, 1));

        // b_geo = sqrt(2) interior: irrational on the exact backend...
        let wide = Dictionary::interval(scale(1, 1), scale(2, 1)).unwrap();
        assert!(matches!(
            mediate(&scale(2, 1), &scale(1, 1), &wide, &p, Tol::default()),
            Err(Error::ExactnessLost(_))
        ));
        // ...but fine on floats.
        let fw: Dictionary<f64> =
            Dictionary::interval(Scale::new(1.0).unwrap(), Scale::new(2.0).unwrap()).unwrap();
        let plan = mediate(
            &Scale::new(2.0).unwrap(),
            &Scale::new(1.0).unwrap(),
            &fw,
            &p,
            Tol::default(),
        )
        .unwrap();
        assert!((plan.chosen[0].value() - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mediation_gain_frozen_values() {
        let p = Penalty::canonical();
        assert_eq!(mediation_gain(&rat(1, 1), &p).unwrap(), rat(0, 1));
        assert_eq!(mediation_gain(&rat(16, 1), &p).unwrap(), rat(153, 32));
        // J(4) - 2 J(2) = 9/8 - 1/2.
        assert_eq!(mediation_gain(&rat(4, 1), &p).unwrap(), rat(5, 8));
        assert!(matches!(
            mediation_gain(&rat(2, 1), &p),
            Err(Error::ExactnessLost(_))
        ));
        assert!(mediation_gain(&rat(0, 1), &p).is_err());
    }

    #[test]
    fn chain_frozen_values() {
        let p = Penalty::canonical();
        let a = scale(4, 1);
        let c = scale(1, 4);

        let k1 = chain(&a, &c, 1, &p).unwrap();
        assert_eq!(k1.total_cost, rat(225, 32));
        assert!(k1.ratios.is_empty());

        let k2 = chain(&a, &c, 2, &p).unwrap();
        assert_eq!(k2.hop_ratio, scale(4, 1));
        assert_eq!(k2.ratios, vec![scale(1, 1)]);
        assert_eq!(k2.total_cost, rat(9, 4));

        let k4 = chain(&a, &c, 4, &p).unwrap();
        assert_eq!(k4.hop_ratio, scale(2, 1));
        assert_eq!(k4.per_step_cost, rat(1, 4));
        assert_eq!(k4.total_cost, rat(1, 1));
        assert_eq!(
            k4.ratios,
            vec![scale(2, 1), scale(1, 1), scale(1, 2)]
        );

        assert!(matches!(chain(&a, &c, 0, &p), Err(Error::ZeroSteps)));
        // 16^(1/3) is irrational: exact backend refuses, float path works.
        assert!(matches!(chain(&a, &c, 3, &p), Err(Error::ExactnessLost(_))));
        let k3 = chain(
            &Scale::new(4.0f64).unwrap(),
            &Scale::new(0.25).unwrap(),
            3,
            &p,
        )
        .unwrap();
        let t = 16.0f64.ln();
        assert!((k3.total_cost - 3.0 * ((t / 3.0).cosh() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn chain_optimality_spot_checks() {
        let p = Penalty::canonical();
        let a = scale(4, 1);
        let c = scale(1, 4);
        assert!(chain_optimality_check(&a, &c, 2, 1000, 0x5EED, &p).unwrap());
        assert!(chain_optimality_check(&a, &a, 5, 200, 0x5EED, &p).unwrap());
        let e3 = Scale::new(std::f64::consts::E.powi(3)).unwrap();
        let one = Scale::new(1.0f64).unwrap();
        assert!(chain_optimality_check(&e3, &one, 3, 1000, 0x5EED, &p).unwrap());
    }

    #[test]
    fn product_mean_factorizes_table_rows() {
        let p = Penalty::canonical();
        let dict = finite(&[(1, 4), (1, 1), (4, 1)]);
        let (r1, r2) = product_mean(
            &scale(3, 10),
            &scale(3, 1),
            &dict,
            &dict,
            &p,
            Tol::default(),
        )
        .unwrap();
        assert_eq!(r1.minimizers.ids().unwrap(), ["m1"]);
        assert_eq!(r2.minimizers.ids().unwrap(), ["m3"]);

        let unit = finite(&[(1, 1)]);
        let (r1, r2) =
            product_mean(&scale(1, 1), &scale(1, 1), &unit, &unit, &p, Tol::default()).unwrap();
        assert!((r1.optimal_cost.clone() + r2.optimal_cost.clone()).is_zero());

        // Boundary tie times singleton: the product meaning set has 2 items.
        let (r1, r2) = product_mean(
            &scale(1, 2),
            &scale(3, 2),
            &dict,
            &dict,
            &p,
            Tol::default(),
        )
        .unwrap();
        assert_eq!(r1.minimizers.ids().unwrap().len(), 2);
        assert_eq!(r2.minimizers.ids().unwrap(), ["m2"]);
    }

    fn pos_rat() -> impl Strategy<Value = Rat> {
        (1i64..=64, 1i64..=64).prop_map(|(n, d)| Rat::from_ratio(n, d))
    }

    proptest! {
        #[test]
        fn product_form_identity(af in 0.01f64..100.0, cf in 0.01f64..100.0, bf in 0.01f64..100.0) {
            // J(a/b) + J(b/c) = 2 cosh(log(a/c)/2) cosh(log(b/b_geo)) - 2.
            let p = Penalty::canonical();
            let lhs = p.eval(&(af / bf)).unwrap() + p.eval(&(bf / cf)).unwrap();
            let rhs = 2.0 * ((af / cf).ln() / 2.0).cosh()
                * ((bf / (af * cf).sqrt()).ln()).cosh()
                - 2.0;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1.0));
        }

        #[test]
        fn gain_is_nonnegative(g in pos_rat()) {
            // x = g^2 keeps the square root rational.
            let p = Penalty::canonical();
            let x = g.clone() * g.clone();
            let gain = mediation_gain(&x, &p).unwrap();
            prop_assert!(!gain.is_positive() == (g == Rat::one()) || gain.is_positive());
            if g != Rat::one() {
                prop_assert!(gain.is_positive());
            } else {
                prop_assert!(gain.is_zero());
            }
        }

        #[test]
        fn chain_totals_nonincreasing(x in 1.01f64..500.0, k in 1u32..32) {
            let p = Penalty::canonical();
            let a = Scale::new(x).unwrap();
            let c = Scale::new(1.0f64).unwrap();
            let t1 = chain(&a, &c, k, &p).unwrap().total_cost;
            let t2 = chain(&a, &c, k + 1, &p).unwrap().total_cost;
            prop_assert!(t2 <= t1 + 1e-12 * t1.abs());
            prop_assert!(t2 >= 0.0);
        }

        #[test]
        fn feasible_balance_point_never_hurts(g in pos_rat(), h in pos_rat(), extra in pos_rat()) {
            // a = g^2, c = h^2 makes b_geo = g h rational and feasible.
            let p = Penalty::canonical();
            let a = Scale::new(g.clone() * g.clone()).unwrap();
            let c = Scale::new(h.clone() * h.clone()).unwrap();
            let b_geo = Scale::new(g.clone() * h.clone()).unwrap();
            let items = vec![
                DictItem::new("geo", ScaleVec::new(vec![b_geo]).unwrap()),
                DictItem::new("x", ScaleVec::new(vec![Scale::new(extra).unwrap()]).unwrap()),
            ];
            let mediators = Dictionary::finite(items).unwrap();
            let plan = mediate(&a, &c, &mediators, &p, Tol::default()).unwrap();
            prop_assert!(plan.total_cost <= plan.direct_cost);
            prop_assert_eq!(plan.total_cost == plan.direct_cost, a == c);
            // With b_geo feasible the total collapses to 2 J(sqrt(a/c)).
            let two_hop = Rat::from_int(2) * p.eval(&(g.clone() / h.clone())).unwrap();
            prop_assert_eq!(plan.total_cost, two_hop);
        }
    }
}
