//! Decision geometry for finite 1-D dictionaries.
//!
//! Adjacent objects with scales `y_i < y_{i+1}` tie in cost exactly at the
//! geometric mean `m_i = sqrt(y_i y_{i+1})`, so the positive line splits into
//! meaning cells separated by the `m_i` (with sentinels `m_0 = 0`,
//! `m_N = inf`). Boundaries are stored as the adjacent pair `(y_i, y_{i+1})`
//! and all comparisons go through squares, so the exact backend never
//! materializes an irrational square root.

use serde_json::{json, Value};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::meaning::{scan_costs, Margin};
use crate::penalty::Penalty;
use crate::scalar::{Scalar, Tol};
use crate::spaces::{ref_cost, Dictionary, Scale};

/// Sorted distinct object scales together with their induced cell structure.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySet<S> {
    items: Vec<(String, Scale<S>)>,
}

impl<S: Scalar> BoundarySet<S> {
    /// Number of cells (= number of objects).
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Object id of the `k`-th cell (ascending scale order).
    pub fn id(&self, k: usize) -> &str {
        &self.items[k].0
    }

    pub fn scale(&self, k: usize) -> &Scale<S> {
        &self.items[k].1
    }

    /// Interior boundary count, `N - 1`.
    pub fn boundary_count(&self) -> usize {
        self.items.len() - 1
    }

    /// The adjacent scale pair defining boundary `i`: `m_i^2 = y_i * y_{i+1}`.
    pub fn boundary_pair(&self, i: usize) -> (&Scale<S>, &Scale<S>) {
        (&self.items[i].1, &self.items[i + 1].1)
    }

    /// Boundary `m_i` when it is exactly representable in the backend.
    pub fn boundary_exact(&self, i: usize) -> Option<Scale<S>> {
        let (a, b) = self.boundary_pair(i);
        let m = (a.value().clone() * b.value().clone()).sqrt_exact()?;
        Scale::new(m).ok()
    }

    /// Boundary `m_i` in float precision.
    pub fn boundary_f64(&self, i: usize) -> f64 {
        let (a, b) = self.boundary_pair(i);
        (a.value().to_f64() * b.value().to_f64()).sqrt()
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .items
            .iter()
            .map(|(id, s)| json!({ "id": id, "scale": s.value().to_json() }))
            .collect();
        let boundaries: Vec<Value> = (0..self.boundary_count())
            .map(|i| {
                let (a, b) = self.boundary_pair(i);
                json!({
                    "between": [self.id(i), self.id(i + 1)],
                    "m": self.boundary_exact(i).map_or(Value::Null, |m| m.value().to_json()),
                    "m_squared": (a.value().clone() * b.value().clone()).to_json(),
                })
            })
            .collect();
        json!({ "cells": cells, "boundaries": boundaries })
    }
}

/// Build the boundary set of a finite 1-D dictionary with pairwise distinct
/// scales (duplicates are rejected; deduplicate to fibers first).
pub fn boundaries<S: Scalar>(dict: &Dictionary<S>) -> Result<BoundarySet<S>> {
    let d = match dict {
        Dictionary::Finite(d) if d.dim() == 1 => d,
        other => {
            return Err(Error::VariantMismatch {
                expected: "finite (1-D)",
                found: other.variant_name(),
            })
        }
    };
    let mut items: Vec<(String, Scale<S>)> = d
        .items()
        .iter()
        .map(|i| (i.id().to_string(), i.scale().clone()))
        .collect();
    items.sort_by(|a, b| a.1.value().cmp_total(b.1.value()));
    for w in items.windows(2) {
        if w[0].1 == w[1].1 {
            return Err(Error::DuplicateScale(w[0].1.to_string()));
        }
    }
    Ok(BoundarySet { items })
}

/// Where a configuration scale falls in the cell decomposition.
/// Indices are 0-based positions in the sorted scale order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    /// Strictly inside cell `k`: the unique meaning is object `k`.
    Interior(usize),
    /// Exactly on boundary `m_{k+1}`: the meanings are objects `k` and `k+1`.
    Boundary(usize, usize),
}

impl Cell {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Cell::Interior(k) => vec![k],
            Cell::Boundary(a, b) => vec![a, b],
        }
    }
}

/// Locate `x` among the geometric-mean boundaries.
///
/// Comparisons are `x^2` against `y_k y_{k+1}`: exact on the rational
/// backend, square-root materialization with tie tolerance on floats.
pub fn classify<S: Scalar>(x: &Scale<S>, b: &BoundarySet<S>, tol: Tol) -> Cell {
    for k in 0..b.boundary_count() {
        let (lo, hi) = b.boundary_pair(k);
        match S::geo_cmp(x.value(), lo.value(), hi.value(), tol) {
            Ordering::Less => return Cell::Interior(k),
            Ordering::Equal => return Cell::Boundary(k, k + 1),
            Ordering::Greater => {}
        }
    }
    Cell::Interior(b.len() - 1)
}

/// Stability certificate for a configuration scale.
///
/// `radius` is the distance to the nearest boundary (float diagnostic;
/// sentinels `m_0 = 0` and `m_N = inf` make the extreme cells one-sided).
/// `max_perturbation` is the open bound `margin / 2`: every perturbation of
/// the cost vector strictly below it leaves the argmin set intact.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCertificate<S> {
    pub stable: bool,
    pub radius: f64,
    pub margin: Margin<S>,
    pub max_perturbation: Margin<S>,
}

impl<S: Scalar> StabilityCertificate<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "stable": self.stable,
            "radius": self.radius.to_json(),
            "margin": self.margin.to_json(),
            "max_perturbation": self.max_perturbation.to_json(),
        })
    }
}

/// Certify how far `x` sits from the nearest decision boundary and how large
/// a cost perturbation its margin absorbs.
pub fn stability_radius<S: Scalar>(
    x: &Scale<S>,
    b: &BoundarySet<S>,
    p: &Penalty,
    tol: Tol,
) -> Result<StabilityCertificate<S>> {
    let cell = classify(x, b, tol);
    let radius = match cell {
        Cell::Boundary(..) => 0.0,
        Cell::Interior(k) => {
            let xf = x.value().to_f64();
            let left = if k == 0 { xf } else { xf - b.boundary_f64(k - 1) };
            let right = if k + 1 == b.len() {
                f64::INFINITY
            } else {
                b.boundary_f64(k) - xf
            };
            left.min(right)
        }
    };
    let costs = b
        .items
        .iter()
        .map(|(_, y)| ref_cost(x, y, p))
        .collect::<Result<Vec<_>>>()?;
    let (_, _, margin) = scan_costs(&costs, tol);
    let max_perturbation = match &margin {
        Margin::Infinite => Margin::Infinite,
        Margin::Gap(g) => Margin::Gap(g.clone() / S::from_int(2)),
    };
    Ok(StabilityCertificate {
        stable: matches!(cell, Cell::Interior(_)),
        radius,
        margin,
        max_perturbation,
    })
}

/// True when the decision margin of `costs` strictly exceeds `2 * eta`, so
/// no `eta`-bounded perturbation can introduce new minimizers. An all-equal
/// cost vector has infinite margin and is robust for every finite `eta`.
pub fn robust_under<S: Scalar>(costs: &[S], eta: &S, tol: Tol) -> Result<bool> {
    if costs.is_empty() {
        return Err(Error::EmptyInput("cost list"));
    }
    if eta < &S::zero() {
        return Err(Error::Negative("perturbation bound"));
    }
    let (_, _, margin) = scan_costs(costs, tol);
    Ok(margin.exceeds_double(eta))
}
