//! The mismatch penalty family `J_a(x) = (x^a + x^{-a})/2 - 1`.
//!
//! Each member is normalized (`J(1) = 0`), symmetric under inversion
//! (`J(x) = J(1/x)`), strictly convex, and satisfies the multiplicative
//! identity `J(xy) + J(x/y) = 2J(x) + 2J(y) + 2J(x)J(y)`. The canonical
//! member `a = 1` is the rational function `(x - 1)^2 / (2x)`; it is the
//! penalty every downstream solver defaults to.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent selecting one member of the penalty family. `a = 1` is canonical.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Penalty {
    exponent: f64,
}

impl Default for Penalty {
    fn default() -> Self {
        Self::canonical()
    }
}

impl Penalty {
    /// The canonical penalty `J(x) = (x + 1/x)/2 - 1`.
    pub const fn canonical() -> Self {
        Penalty { exponent: 1.0 }
    }

    /// A general family member; requires a finite `exponent > 0`.
    pub fn new(exponent: f64) -> Result<Self> {
        if exponent.is_finite() && exponent > 0.0 {
            Ok(Penalty { exponent })
        } else {
            Err(Error::InvalidExponent(exponent))
        }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_canonical(&self) -> bool {
        self.exponent == 1.0
    }

    /// Evaluate `J_a(x)` for `x > 0`.
    ///
    /// Nonnegative, and zero exactly at `x = 1`. The rational backend is
    /// exact for integer exponents; the float backend evaluates
    /// `2 sinh^2(a ln x / 2)` for any exponent.
    pub fn eval<S: Scalar>(&self, x: &S) -> Result<S> {
        if !x.is_positive() || !x.is_finite_value() {
            return Err(Error::NonPositive("penalty argument"));
        }
        x.penalty_value(self.exponent)
    }

    /// Residual of the multiplicative identity at `(x, y)`:
    /// `J(xy) + J(x/y) - 2J(x) - 2J(y) - 2J(x)J(y)`.
    ///
    /// Identically zero in exact arithmetic; on floats it stays within
    /// `1e-10` of zero relative to the magnitude of the terms.
    pub fn dalembert_residual<S: Scalar>(&self, x: &S, y: &S) -> Result<S> {
        if !x.is_positive() || !y.is_positive() {
            return Err(Error::NonPositive("identity argument"));
        }
        let two = S::from_int(2);
        let jxy = self.eval(&(x.clone() * y.clone()))?;
        let jxoy = self.eval(&(x.clone() / y.clone()))?;
        let jx = self.eval(x)?;
        let jy = self.eval(y)?;
        Ok(jxy + jxoy
            - two.clone() * jx.clone()
            - two.clone() * jy.clone()
            - two * jx * jy)
    }

    /// The sublevel set `{x > 0 : J_a(x) <= level}` as a closed interval
    /// `[lo, hi]` with `lo * hi = 1`.
    pub fn sublevel<S: Scalar>(&self, level: &S) -> Result<SublevelInterval<S>> {
        if level < &S::zero() {
            return Err(Error::NegativeLevel(level.to_string()));
        }
        if level.is_zero() {
            return Ok(SublevelInterval {
                lo: S::one(),
                hi: S::one(),
                level: level.clone(),
            });
        }
        let hi = S::sublevel_hi(level, self.exponent)?;
        Ok(SublevelInterval {
            lo: hi.recip(),
            hi,
            level: level.clone(),
        })
    }

    /// Penalty as a function of the log-ratio: `J_a(e^t) = cosh(a t) - 1`.
    pub fn log_form(&self, t: f64) -> f64 {
        let h = (self.exponent * t / 2.0).sinh();
        2.0 * h * h
    }

    /// Quadratic sandwich for the canonical penalty:
    /// `t^2/2 <= cosh(t) - 1 <= t^2/2 + (t^4/24) cosh(|t|)`.
    ///
    /// Returns `(lower, upper)`; defined for the canonical exponent only.
    pub fn quadratic_bounds(&self, t: f64) -> Result<(f64, f64)> {
        if !self.is_canonical() {
            return Err(Error::NonCanonical);
        }
        let lower = t * t / 2.0;
        let upper = lower + t.powi(4) / 24.0 * t.abs().cosh();
        Ok((lower, upper))
    }
}

/// Closed interval `[lo, hi]` on which the penalty stays at or below `level`.
///
/// The endpoints are reciprocal (`lo * hi = 1`) and bracket 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SublevelInterval<S> {
    lo: S,
    hi: S,
    level: S,
}

impl<S: Scalar> SublevelInterval<S> {
    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn level(&self) -> &S {
        &self.level
    }

    pub fn contains(&self, x: &S) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn eval_frozen_values() {
        let p = Penalty::canonical();
        assert_eq!(p.eval(&rat(1, 1)).unwrap(), rat(0, 1));
        assert_eq!(p.eval(&rat(16, 1)).unwrap(), rat(225, 32));
        assert_eq!(p.eval(&rat(2, 1)).unwrap(), rat(1, 4));
        assert_eq!(p.eval(&rat(1, 2)).unwrap(), rat(1, 4));
        // Exponent absorption: J_2(4) = J_1(16).
        let p2 = Penalty::new(2.0).unwrap();
        assert_eq!(p2.eval(&rat(4, 1)).unwrap(), rat(225, 32));
        assert!((p2.eval(&4.0f64).unwrap() - 225.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn eval_domain_errors() {
        let p = Penalty::canonical();
        assert_eq!(
            p.eval(&rat(0, 1)).unwrap_err(),
            Error::NonPositive("penalty argument")
        );
        assert!(p.eval(&-3.0f64).is_err());
        assert!(Penalty::new(0.0).is_err());
        assert!(Penalty::new(-2.0).is_err());
        assert!(Penalty::new(f64::NAN).is_err());
    }

    #[test]
    fn dalembert_residual_hand_checked() {
        let p = Penalty::canonical();
        // J(6) + J(2/3) = 25/12 + 1/12 = 13/6 = 2J(2) + 2J(3) + 2J(2)J(3).
        assert_eq!(
            p.dalembert_residual(&rat(2, 1), &rat(3, 1)).unwrap(),
            rat(0, 1)
        );
        assert_eq!(
            p.dalembert_residual(&rat(1, 1), &rat(7, 1)).unwrap(),
            rat(0, 1)
        );
        let p3 = Penalty::new(3.0).unwrap();
        let e = std::f64::consts::E;
        let res = p3.dalembert_residual(&e, &(e * e)).unwrap();
        let scale = p3.eval(&(e * e * e)).unwrap().max(1.0);
        assert!(res.abs() <= 1e-10 * scale);
    }

    #[test]
    fn sublevel_frozen_values() {
        let p = Penalty::canonical();
        let w = p.sublevel(&rat(0, 1)).unwrap();
        assert_eq!((w.lo(), w.hi()), (&rat(1, 1), &rat(1, 1)));

        let w = p.sublevel(&rat(1, 4)).unwrap();
        assert_eq!((w.lo(), w.hi()), (&rat(1, 2), &rat(2, 1)));
        assert_eq!(p.eval(w.hi()).unwrap(), rat(1, 4));

        // eps = 1: endpoints 2 +- sqrt(3), irrational on the exact backend.
        assert!(matches!(
            p.sublevel(&rat(1, 1)),
            Err(Error::ExactnessLost(_))
        ));
        let w = p.sublevel(&1.0f64).unwrap();
        let b = 2.0 + 3.0f64.sqrt();
        assert!((w.hi() - b).abs() < 1e-12);
        assert!((w.lo() * w.hi() - 1.0).abs() < 1e-12);

        assert!(p.sublevel(&rat(-1, 4)).is_err());
    }

    #[test]
    fn log_form_matches_eval() {
        let p = Penalty::canonical();
        assert_eq!(p.log_form(0.0), 0.0);
        let t16 = 16.0f64.ln();
        assert!((p.log_form(t16) - 225.0 / 32.0).abs() <= 1e-12 * (225.0 / 32.0));
        let c1 = 1.0f64.cosh() - 1.0;
        assert!((p.log_form(-1.0) - c1).abs() < 1e-15);
        assert_eq!(p.log_form(-1.0), p.log_form(1.0));
    }

    #[test]
    fn quadratic_bounds_frozen_values() {
        let p = Penalty::canonical();
        assert_eq!(p.quadratic_bounds(0.0).unwrap(), (0.0, 0.0));
        let (lo, hi) = p.quadratic_bounds(1.0).unwrap();
        assert_eq!(lo, 0.5);
        assert!((hi - (0.5 + 1.0f64.cosh() / 24.0)).abs() < 1e-15);
        let j1 = p.log_form(1.0);
        assert!(lo <= j1 && j1 <= hi);
        assert_eq!(p.quadratic_bounds(-1.0).unwrap(), (lo, hi));
        assert!(Penalty::new(2.0).unwrap().quadratic_bounds(1.0).is_err());
    }

    #[test]
    fn coercivity_outside_sublevel_windows() {
        let p = Penalty::canonical();
        for m in [1.0f64, 10.0, 100.0] {
            let w = p.sublevel(&m).unwrap();
            assert!(p.eval(&(w.hi() * 1.5)).unwrap() > m);
            assert!(p.eval(&(w.lo() / 1.5)).unwrap() > m);
        }
    }

    fn pos_rat() -> impl Strategy<Value = Rat> {
        (1i64..=64, 1i64..=64).prop_map(|(n, d)| Rat::from_ratio(n, d))
    }

    proptest! {
        #[test]
        fn inversion_symmetry_exact(x in pos_rat()) {
            let p = Penalty::canonical();
            prop_assert_eq!(p.eval(&x).unwrap(), p.eval(&x.recip()).unwrap());
        }

        #[test]
        fn unique_zero(x in pos_rat()) {
            let p = Penalty::canonical();
            let j = p.eval(&x).unwrap();
            if x == Rat::one() {
                prop_assert!(j.is_zero());
            } else {
                prop_assert!(j.is_positive());
            }
        }

        #[test]
        fn dalembert_identity_exact(x in pos_rat(), y in pos_rat()) {
            let p = Penalty::canonical();
            prop_assert!(p.dalembert_residual(&x, &y).unwrap().is_zero());
        }

        #[test]
        fn strict_convexity(x in pos_rat(), gap in 1i64..=32, lam_num in 1i64..=7) {
            // y = x + gap/4 keeps |x - y| bounded away from zero.
            let p = Penalty::canonical();
            let y = x.clone() + Rat::from_ratio(gap, 4);
            let lam = Rat::from_ratio(lam_num, 8);
            let one_m = Rat::one() - lam.clone();
            let mid = lam.clone() * x.clone() + one_m.clone() * y.clone();
            let lhs = p.eval(&mid).unwrap();
            let rhs = lam * p.eval(&x).unwrap() + one_m * p.eval(&y).unwrap();
            prop_assert!(lhs < rhs);
        }

        #[test]
        fn sublevel_correctness_at_penalty_images(b in pos_rat()) {
            // Levels are sampled as J-images so the endpoints stay rational.
            let p = Penalty::canonical();
            prop_assume!(b != Rat::one());
            let eps = p.eval(&b).unwrap();
            let w = p.sublevel(&eps).unwrap();
            prop_assert_eq!(w.lo().clone() * w.hi().clone(), Rat::one());
            prop_assert_eq!(p.eval(w.hi()).unwrap(), eps.clone());
            prop_assert_eq!(p.eval(w.lo()).unwrap(), eps.clone());
            let b_hi = if b < Rat::one() { b.recip() } else { b };
            prop_assert_eq!(w.hi(), &b_hi);
        }

        #[test]
        fn sublevel_grid_containment(b in pos_rat(), x in pos_rat()) {
            let p = Penalty::canonical();
            prop_assume!(b != Rat::one());
            let eps = p.eval(&b).unwrap();
            let w = p.sublevel(&eps).unwrap();
            let inside = w.contains(&x);
            prop_assert_eq!(p.eval(&x).unwrap() <= eps, inside);
        }

        #[test]
        fn quadratic_sandwich(t in -3.0f64..3.0) {
            let p = Penalty::canonical();
            let (lo, hi) = p.quadratic_bounds(t).unwrap();
            let j = p.log_form(t);
            prop_assert!(lo <= j && j <= hi, "t={t} lo={lo} j={j} hi={hi}");
        }
    }
}
