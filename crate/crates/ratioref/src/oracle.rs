//! Independent brute-force oracles and the randomized instance generator.
//!
//! Everything here is deliberately naive: full scans with no shortcuts and
//! no code shared with the solvers beyond penalty evaluation itself. The
//! result types are separate from the solver types so that agreement between
//! the two routes is meaningful.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::meaning::Margin;
use crate::penalty::Penalty;
use crate::scalar::{Rat, Scalar, Tol};
use crate::spaces::{DictItem, FiniteDict, LogPolytope, Scale, ScaleVec};

/// Default seed for every randomized check in this crate.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Full-scan meaning computation over a finite dictionary.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteMeaning<S> {
    /// Cost of every dictionary item, in dictionary order.
    pub costs: Vec<S>,
    /// Ids achieving the minimum, in dictionary order.
    pub minimizer_ids: Vec<String>,
    pub optimal_cost: S,
    pub margin: Margin<S>,
}

/// Exhaustive argmin of the reference cost over a finite dictionary,
/// including the exact tie set and margin.
pub fn brute_mean_finite<S: Scalar>(
    s: &ScaleVec<S>,
    dict: &FiniteDict<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<BruteMeaning<S>> {
    if s.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: dict.dim(),
        });
    }
    let mut costs = Vec::with_capacity(dict.len());
    for item in dict.items() {
        let mut total = S::zero();
        for (a, b) in s.coords().iter().zip(item.scales().coords()) {
            total = total + p.eval(&(a.value().clone() / b.value().clone()))?;
        }
        costs.push(total);
    }
    let mut best = costs[0].clone();
    for c in &costs[1..] {
        if c.cmp_total(&best).is_lt() {
            best = c.clone();
        }
    }
    let mut minimizer_ids = Vec::new();
    let mut gap: Option<S> = None;
    for (item, c) in dict.items().iter().zip(&costs) {
        if c.tie_eq(&best, tol) {
            minimizer_ids.push(item.id().to_string());
        } else {
            let g = c.clone() - best.clone();
            gap = Some(match gap {
                Some(old) if old.cmp_total(&g).is_le() => old,
                _ => g,
            });
        }
    }
    Ok(BruteMeaning {
        costs,
        minimizer_ids,
        optimal_cost: best,
        margin: gap.map_or(Margin::Infinite, Margin::Gap),
    })
}

/// Scalar convenience wrapper for 1-D dictionaries.
pub fn brute_mean_finite_1d<S: Scalar>(
    s: &Scale<S>,
    dict: &FiniteDict<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<BruteMeaning<S>> {
    brute_mean_finite(&ScaleVec::new(vec![s.clone()])?, dict, p, tol)
}

/// Full-scan mediation over a finite mediator set.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteMediation<S> {
    /// Optimal mediator ratios, ascending, duplicates collapsed.
    pub chosen: Vec<Scale<S>>,
    pub total_cost: S,
}

/// Exhaustive scan of the two-hop total `J(a/b) + J(b/c)` over the mediator
/// dictionary; compares totals directly rather than log distances.
pub fn brute_mediate<S: Scalar>(
    a: &Scale<S>,
    c: &Scale<S>,
    mediators: &FiniteDict<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<BruteMediation<S>> {
    if mediators.dim() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: mediators.dim(),
        });
    }
    let mut totals = Vec::with_capacity(mediators.len());
    for item in mediators.items() {
        let b = item.scale().value();
        let t = p.eval(&(a.value().clone() / b.clone()))?
            + p.eval(&(b.clone() / c.value().clone()))?;
        totals.push(t);
    }
    let mut best = totals[0].clone();
    for t in &totals[1..] {
        if t.cmp_total(&best).is_lt() {
            best = t.clone();
        }
    }
    let mut chosen: Vec<Scale<S>> = mediators
        .items()
        .iter()
        .zip(&totals)
        .filter(|(_, t)| t.tie_eq(&best, tol))
        .map(|(item, _)| item.scale().clone())
        .collect();
    chosen.sort_by(|x, y| x.value().cmp_total(y.value()));
    chosen.dedup();
    Ok(BruteMediation {
        chosen,
        total_cost: best,
    })
}

/// Log-spaced grid argmin of `y -> J(s/y)` over `[lo, hi]`.
///
/// Returns `(best_y, best_cost)`; the true minimizer sits within one grid
/// cell of the returned point.
pub fn grid_mean_continuous(
    s: f64,
    lo: f64,
    hi: f64,
    steps: usize,
    p: &Penalty,
) -> Result<(f64, f64)> {
    if !(s > 0.0 && lo > 0.0 && hi > 0.0) {
        return Err(Error::NonPositive("grid bounds"));
    }
    if lo > hi || steps < 2 {
        return Err(Error::BadInterval);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut best_y = lo;
    let mut best_cost = f64::INFINITY;
    for j in 0..steps {
        let y = (llo + (lhi - llo) * j as f64 / (steps - 1) as f64).exp();
        let cost = p.eval(&(s / y))?;
        if cost < best_cost {
            best_cost = cost;
            best_y = y;
        }
    }
    Ok((best_y, best_cost))
}

/// Dense grid argmin of the separable log-space cost over the feasible part
/// of `[bbox_lo, bbox_hi]^d`. Returns `None` when no grid point is feasible.
pub fn grid_scan_polytope(
    t: &[f64],
    poly: &LogPolytope,
    bbox_lo: f64,
    bbox_hi: f64,
    step: f64,
    p: &Penalty,
) -> Option<(Vec<f64>, f64)> {
    let d = poly.dim();
    let n = ((bbox_hi - bbox_lo) / step).round() as usize + 1;
    let mut idx = vec![0usize; d];
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        let u: Vec<f64> = idx
            .iter()
            .map(|&i| bbox_lo + i as f64 * step)
            .collect();
        if poly.contains(&u, 1e-9) {
            let cost: f64 = t.iter().zip(&u).map(|(ti, ui)| p.log_form(ti - ui)).sum();
            if best.as_ref().is_none_or(|(_, c)| cost < *c) {
                best = Some((u, cost));
            }
        }
        // Odometer increment over the d-dimensional grid.
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return best;
            }
        }
    }
}

/// Reproducible random instances: rational scales `p/q` with
/// `p, q in [1, 64]`, dictionary sizes up to 20.
pub struct InstanceGen {
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A positive rational `p/q`, `p, q` uniform in `[1, 64]`.
    pub fn rat(&mut self) -> Rat {
        let n = self.rng.random_range(1..=64);
        let d = self.rng.random_range(1..=64);
        Rat::from_ratio(n, d)
    }

    pub fn rat_scale(&mut self) -> Scale<Rat> {
        Scale::new(self.rat()).expect("positive by construction")
    }

    /// A rational strictly inside `(0, 1)`.
    pub fn rat_open_unit(&mut self) -> Rat {
        let q = self.rng.random_range(2..=64);
        let p = self.rng.random_range(1..q);
        Rat::from_ratio(p, q)
    }

    /// A rational in `[-1, 1]` with denominator 64.
    pub fn rat_signed_unit(&mut self) -> Rat {
        Rat::from_ratio(self.rng.random_range(-64..=64), 64)
    }

    /// A nonnegative rational with numerator up to 64.
    pub fn rat_nonneg(&mut self) -> Rat {
        let n = self.rng.random_range(0..=64);
        let d = self.rng.random_range(1..=64);
        Rat::from_ratio(n, d)
    }

    /// A 1-D dictionary of `1..=max_items` random scales; optionally with
    /// one item of scale exactly 1 spliced in at a random position.
    pub fn finite_dict_1d(&mut self, max_items: usize, ensure_one: bool) -> FiniteDict<Rat> {
        let n = self.rng.random_range(1..=max_items);
        let mut scales: Vec<Rat> = (0..n).map(|_| self.rat()).collect();
        if ensure_one {
            let at = self.rng.random_range(0..=scales.len());
            scales.insert(at, Rat::one());
        }
        let pairs = scales
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("o{}", i + 1), Scale::new(s).unwrap()))
            .collect();
        FiniteDict::new_1d(pairs).expect("nonempty by construction")
    }

    /// A `dim`-dimensional dictionary of `1..=max_items` random scale rows.
    pub fn finite_dict_md(&mut self, max_items: usize, dim: usize) -> FiniteDict<Rat> {
        let n = self.rng.random_range(1..=max_items);
        let items = (0..n)
            .map(|i| {
                let coords = (0..dim)
                    .map(|_| Scale::new(self.rat()).unwrap())
                    .collect();
                DictItem::new(format!("o{}", i + 1), ScaleVec::new(coords).unwrap())
            })
            .collect();
        FiniteDict::new(items).expect("nonempty by construction")
    }

    /// A float scale log-uniform in `[10^lo_exp, 10^hi_exp]`.
    pub fn float_log_uniform(&mut self, lo_exp: f64, hi_exp: f64) -> f64 {
        10f64.powf(self.rng.random_range(lo_exp..hi_exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn scale(n: i64, d: i64) -> Scale<Rat> {
        Scale::new(rat(n, d)).unwrap()
    }

    fn three() -> FiniteDict<Rat> {
        FiniteDict::new_1d(vec![
            ("o1".into(), scale(1, 4)),
            ("o2".into(), scale(1, 1)),
            ("o3".into(), scale(4, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn brute_mean_table_row() {
        let p = Penalty::canonical();
        let r = brute_mean_finite_1d(&scale(3, 2), &three(), &p, Tol::default()).unwrap();
        assert_eq!(r.costs, vec![rat(25, 12), rat(1, 12), rat(25, 48)]);
        assert_eq!(r.minimizer_ids, vec!["o2".to_string()]);
        assert_eq!(r.optimal_cost, rat(1, 12));
    }

    #[test]
    fn brute_mean_fiber_and_tie() {
        let p = Penalty::canonical();
        let r = brute_mean_finite_1d(&scale(1, 4), &three(), &p, Tol::default()).unwrap();
        assert_eq!(r.minimizer_ids, vec!["o1".to_string()]);
        assert!(r.optimal_cost.is_zero());

        let r = brute_mean_finite_1d(&scale(1, 2), &three(), &p, Tol::default()).unwrap();
        assert_eq!(r.minimizer_ids, vec!["o1".to_string(), "o2".to_string()]);
    }

    #[test]
    fn brute_mediate_frozen_values() {
        let p = Penalty::canonical();
        let m = FiniteDict::new_1d(vec![("a".into(), scale(2, 1)), ("b".into(), scale(8, 1))])
            .unwrap();
        let r = brute_mediate(&scale(4, 1), &scale(1, 4), &m, &p, Tol::default()).unwrap();
        assert_eq!(r.chosen, vec![scale(2, 1)]);
        assert_eq!(r.total_cost, rat(53, 16));

        let unit = FiniteDict::new_1d(vec![("m".into(), scale(1, 1))]).unwrap();
        let r = brute_mediate(&scale(4, 1), &scale(1, 4), &unit, &p, Tol::default()).unwrap();
        assert_eq!(r.total_cost, rat(9, 4));

        // Symmetric two-hop through 3 between equal endpoints: 2 J(5/3).
        let m3 = FiniteDict::new_1d(vec![("m".into(), scale(3, 1))]).unwrap();
        let r = brute_mediate(&scale(5, 1), &scale(5, 1), &m3, &p, Tol::default()).unwrap();
        assert_eq!(r.chosen, vec![scale(3, 1)]);
        assert_eq!(r.total_cost, rat(4, 15));
    }

    #[test]
    fn grid_mean_continuous_tracks_clamp() {
        let p = Penalty::canonical();
        let cell = (5.0f64 / 2.0).ln() / 9_999.0;

        let (y, _) = grid_mean_continuous(10.0, 2.0, 5.0, 10_000, &p).unwrap();
        assert!((y.ln() - 5.0f64.ln()).abs() <= cell + 1e-12);

        let (y, cost) = grid_mean_continuous(3.0, 2.0, 5.0, 10_000, &p).unwrap();
        assert!((y.ln() - 3.0f64.ln()).abs() <= cell + 1e-12);
        assert!(cost < 1e-7);

        let (y, _) = grid_mean_continuous(1.0, 2.0, 5.0, 10_000, &p).unwrap();
        assert!((y.ln() - 2.0f64.ln()).abs() <= cell + 1e-12);

        assert!(grid_mean_continuous(1.0, 5.0, 2.0, 100, &p).is_err());
        assert!(grid_mean_continuous(1.0, 2.0, 5.0, 1, &p).is_err());
    }

    #[test]
    fn generator_is_reproducible() {
        let mut a = InstanceGen::new(DEFAULT_SEED);
        let mut b = InstanceGen::new(DEFAULT_SEED);
        for _ in 0..32 {
            assert_eq!(a.rat(), b.rat());
        }
        let d1 = a.finite_dict_1d(20, true);
        let d2 = b.finite_dict_1d(20, true);
        assert_eq!(d1.len(), d2.len());
        assert!(d1.items().iter().any(|i| i.scale().value() == &Rat::one()));
    }
}
