//! Multi-dimensional meaning problems with the separable coordinatewise
//! penalty.
//!
//! Finite product dictionaries are scanned exactly on either backend. The
//! log-convex carriers (boxes and halfspace intersections in log-space) are
//! solved in float log-coordinates, where the objective
//! `G_t(u) = sum_i (cosh(a (t_i - u_i)) - 1)` is smooth and strictly convex,
//! so the minimizer is unique and varies continuously with `t`. Boxes clamp
//! in closed form; polytopes run projected gradient descent with
//! backtracking over the Dykstra projection from `spaces`.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::meaning::{scan_costs, MeaningResult, Minimizers};
use crate::penalty::Penalty;
use crate::scalar::{Scalar, Tol};
use crate::spaces::{ref_cost_vec, Dictionary, DictItem, FiniteDict, LogBox, LogPolytope, Scale, ScaleVec};

const GRAD_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 10_000;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;

/// Separable log-space cost `sum_i (cosh(a (t_i - u_i)) - 1)`.
pub fn log_cost(t: &[f64], u: &[f64], p: &Penalty) -> f64 {
    t.iter().zip(u).map(|(ti, ui)| p.log_form(ti - ui)).sum()
}

/// Analytic gradient of [`log_cost`] in `u`: coordinate `i` is
/// `-a sinh(a (t_i - u_i))`.
pub fn log_cost_gradient(t: &[f64], u: &[f64], p: &Penalty) -> Vec<f64> {
    let a = p.exponent();
    t.iter()
        .zip(u)
        .map(|(ti, ui)| -a * (a * (ti - ui)).sinh())
        .collect()
}

fn solve_box(t: &[f64], b: &LogBox, p: &Penalty) -> (Vec<f64>, f64) {
    let u = b.clamp(t);
    let cost = log_cost(t, &u, p);
    (u, cost)
}

/// Projected gradient descent with halving backtracking, started from the
/// projection of `t` (or a caller-supplied feasible point). Converges when
/// the unit-step projected-gradient residual drops to `1e-10` or the line
/// search underflows.
fn solve_polytope_from(t: &[f64], poly: &LogPolytope, start: Vec<f64>, p: &Penalty) -> (Vec<f64>, f64) {
    let mut u = start;
    let mut cost = log_cost(t, &u, p);
    for _ in 0..MAX_ITERS {
        let grad = log_cost_gradient(t, &u, p);
        let trial: Vec<f64> = u.iter().zip(&grad).map(|(x, g)| x - g).collect();
        let proj = poly.project(&trial);
        let residual = u
            .iter()
            .zip(&proj)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if residual <= GRAD_TOL {
            break;
        }
        let mut alpha = 1.0;
        loop {
            let cand = if alpha == 1.0 {
                proj.clone()
            } else {
                let stepped: Vec<f64> = u.iter().zip(&grad).map(|(x, g)| x - alpha * g).collect();
                poly.project(&stepped)
            };
            let cand_cost = log_cost(t, &cand, p);
            let linear: f64 = grad
                .iter()
                .zip(u.iter().zip(&cand))
                .map(|(g, (x, y))| g * (x - y))
                .sum();
            if cost - cand_cost >= ARMIJO * linear {
                u = cand;
                cost = cand_cost;
                break;
            }
            alpha /= 2.0;
            if alpha < MIN_STEP {
                return (u, cost);
            }
        }
    }
    (u, cost)
}

fn solve_polytope(t: &[f64], poly: &LogPolytope, p: &Penalty) -> (Vec<f64>, f64) {
    let start = poly.project(t);
    solve_polytope_from(t, poly, start, p)
}

fn log_coords<S: Scalar>(s: &ScaleVec<S>) -> Vec<f64> {
    s.to_f64_vec().iter().map(|x| x.ln()).collect()
}

fn scales_from_log<S: Scalar>(u: &[f64]) -> Result<ScaleVec<S>> {
    let coords = u
        .iter()
        .map(|ui| {
            let v = S::from_f64(ui.exp())
                .ok_or(Error::FloatOnly("log-space dictionaries"))?;
            Scale::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    ScaleVec::new(coords)
}

/// The meaning set of a multi-coordinate configuration.
///
/// Finite dictionaries get an exact full scan with the tie fiber and margin;
/// log-boxes clamp coordinatewise; log-polytopes run the descent solver.
/// The log-convex carriers require the float backend.
pub fn mean_md<S: Scalar>(
    s: &ScaleVec<S>,
    dict: &Dictionary<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<MeaningResult<S>> {
    if s.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: dict.dim(),
        });
    }
    match dict {
        Dictionary::Finite(d) => {
            let costs = d
                .items()
                .iter()
                .map(|item| ref_cost_vec(s, item.scales(), p))
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
        Dictionary::LogBox(b) => {
            let (u, cost) = solve_box(&log_coords(s), b, p);
            Ok(MeaningResult {
                minimizers: Minimizers::ScaleVec(scales_from_log(&u)?),
                optimal_cost: S::from_f64(cost).ok_or(Error::FloatOnly("log-space dictionaries"))?,
                margin: None,
            })
        }
        Dictionary::LogPolytope(poly) => {
            let (u, cost) = solve_polytope(&log_coords(s), poly, p);
            Ok(MeaningResult {
                minimizers: Minimizers::ScaleVec(scales_from_log(&u)?),
                optimal_cost: S::from_f64(cost).ok_or(Error::FloatOnly("log-space dictionaries"))?,
                margin: None,
            })
        }
        other => Err(Error::VariantMismatch {
            expected: "finite, logbox, or logpolytope",
            found: other.variant_name(),
        }),
    }
}

/// Log-coordinates of the minimizer of a log-convex dictionary; used by the
/// CLI to report both coordinate systems.
pub fn mean_md_log(s: &[f64], dict: &Dictionary<f64>, p: &Penalty) -> Result<(Vec<f64>, f64)> {
    match dict {
        Dictionary::LogBox(b) => {
            if s.len() != b.dim() {
                return Err(Error::DimensionMismatch {
                    left: s.len(),
                    right: b.dim(),
                });
            }
            Ok(solve_box(s, b, p))
        }
        Dictionary::LogPolytope(poly) => {
            if s.len() != poly.dim() {
                return Err(Error::DimensionMismatch {
                    left: s.len(),
                    right: poly.dim(),
                });
            }
            Ok(solve_polytope(s, poly, p))
        }
        other => Err(Error::VariantMismatch {
            expected: "logbox or logpolytope",
            found: other.variant_name(),
        }),
    }
}

/// Verify that the d-dimensional meaning over the product of 1-D finite
/// dictionaries equals the product of the coordinatewise meanings (ids and
/// total cost, including tie propagation). Returns `true` on agreement.
pub fn coordinatewise_equiv_check<S: Scalar>(
    s: &ScaleVec<S>,
    dicts: &[Dictionary<S>],
    p: &Penalty,
    tol: Tol,
) -> Result<bool> {
    if dicts.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: dicts.len(),
        });
    }
    let mut coordinate_ids: Vec<Vec<String>> = Vec::with_capacity(dicts.len());
    let mut total = S::zero();
    for (i, dict) in dicts.iter().enumerate() {
        let coord = ScaleVec::new(vec![s.coords()[i].clone()])?;
        let r = mean_md(&coord, dict, p, tol)?;
        match r.minimizers {
            Minimizers::Ids(ids) => coordinate_ids.push(ids),
            _ => unreachable!("finite dictionaries produce id sets"),
        }
        total = total + r.optimal_cost;
    }

    let product = product_dictionary(dicts)?;
    let joint = mean_md(s, &product, p, tol)?;
    let joint_ids = match joint.minimizers {
        Minimizers::Ids(ids) => ids,
        _ => unreachable!(),
    };

    let mut expected: Vec<String> = vec![String::new()];
    for ids in &coordinate_ids {
        let mut next = Vec::with_capacity(expected.len() * ids.len());
        for prefix in &expected {
            for id in ids {
                next.push(if prefix.is_empty() {
                    id.clone()
                } else {
                    format!("{prefix}|{id}")
                });
            }
        }
        expected = next;
    }
    let mut joint_sorted = joint_ids;
    joint_sorted.sort();
    expected.sort();
    Ok(joint_sorted == expected && joint.optimal_cost.tie_eq(&total, tol))
}

/// Cartesian product of 1-D finite dictionaries; ids join with `|`.
fn product_dictionary<S: Scalar>(dicts: &[Dictionary<S>]) -> Result<Dictionary<S>> {
    let mut combos: Vec<(String, Vec<Scale<S>>)> = vec![(String::new(), Vec::new())];
    for dict in dicts {
        let d: &FiniteDict<S> = match dict {
            Dictionary::Finite(d) if d.dim() == 1 => d,
            other => {
                return Err(Error::VariantMismatch {
                    expected: "finite (1-D)",
                    found: other.variant_name(),
                })
            }
        };
        let mut next = Vec::with_capacity(combos.len() * d.len());
        for (prefix, scales) in &combos {
            for item in d.items() {
                let id = if prefix.is_empty() {
                    item.id().to_string()
                } else {
                    format!("{prefix}|{}", item.id())
                };
                let mut row = scales.clone();
                row.push(item.scale().clone());
                next.push((id, row));
            }
        }
        combos = next;
    }
    let items = combos
        .into_iter()
        .map(|(id, scales)| Ok(DictItem::new(id, ScaleVec::new(scales)?)))
        .collect::<Result<Vec<_>>>()?;
    Dictionary::finite(items)
}

/// Numerical continuity monitor for the minimizer map `t -> u*(t)`: the
/// largest `inf`-norm displacement of the solution under `+-step`
/// perturbations of each coordinate of `t`. For boxes the clamp is
/// 1-Lipschitz, so the probe never exceeds `step`.
pub fn continuity_probe(
    t: &[f64],
    dict: &Dictionary<f64>,
    step: f64,
    p: &Penalty,
) -> Result<f64> {
    if step <= 0.0 {
        return Err(Error::NonPositive("probe step"));
    }
    let (base, _) = mean_md_log(t, dict, p)?;
    let mut worst = 0.0f64;
    for i in 0..t.len() {
        for sign in [-1.0, 1.0] {
            let mut shifted = t.to_vec();
            shifted[i] += sign * step;
            let (u, _) = mean_md_log(&shifted, dict, p)?;
            let dist = u
                .iter()
                .zip(&base)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(dist);
        }
    }
    Ok(worst)
}

/// JSON for a log-space solve: scale- and log-coordinates plus the cost.
pub fn log_solution_json(u: &[f64], cost: f64) -> Value {
    serde_json::json!({
        "minimizer_scales": u.iter().map(|x| x.exp().to_json()).collect::<Vec<_>>(),
        "minimizer_log": u.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
        "cost": cost.to_json(),
        "margin": Value::Null,
    })
}
