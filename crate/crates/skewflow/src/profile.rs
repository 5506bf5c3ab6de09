//! The profile state space: shifted copies of a nonincreasing base function.
//!
//! A state is a translate `x(tau) = f(shift + tau)` of a base profile `f`
//! that decreases towards a limit `l`. Shifting realizes the translation
//! semiflow exactly; integrals over trajectory windows use the family's
//! antiderivative when one exists and composite Simpson quadrature otherwise.

use std::sync::Arc;

use crate::error::{Result, SkewflowError};
use crate::quad;

/// Named analytic families of nonincreasing base functions.
///
/// Restricting to analytic families keeps a closed-form integral oracle
/// available; `Tabulated` is the quadrature-only escape hatch.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum BaseProfile {
    /// f(u) = l + a * e^{-b u}
    ExpPlusConst {
        #[cfg_attr(feature = "serde", serde(rename = "l"))]
        limit: f64,
        #[cfg_attr(feature = "serde", serde(rename = "a"))]
        amplitude: f64,
        #[cfg_attr(feature = "serde", serde(rename = "b"))]
        decay: f64,
    },
    /// f(u) = l + a / (1 + u)
    RationalPlusConst {
        #[cfg_attr(feature = "serde", serde(rename = "l"))]
        limit: f64,
        #[cfg_attr(feature = "serde", serde(rename = "a"))]
        amplitude: f64,
    },
    /// f(u) = l
    Constant {
        #[cfg_attr(feature = "serde", serde(rename = "l"))]
        limit: f64,
    },
    /// Piecewise-linear interpolation of (u, value) knots; constant beyond the
    /// last knot. Quadrature-only.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl BaseProfile {
    /// The workhorse fixture f(u) = 1 + e^{-u}, so l = 1 and f(0) = 2.
    pub fn unit_exp() -> Self {
        BaseProfile::ExpPlusConst {
            limit: 1.0,
            amplitude: 1.0,
            decay: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SkewflowError::InvalidProfile(msg));
        match self {
            BaseProfile::ExpPlusConst {
                limit,
                amplitude,
                decay,
            } => {
                if !(limit.is_finite() && *limit >= 0.0) {
                    return bad(format!("limit l must be finite and >= 0, got {limit}"));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return bad(format!(
                        "amplitude a must be finite and >= 0, got {amplitude}"
                    ));
                }
                if !(decay.is_finite() && *decay > 0.0) {
                    return bad(format!("decay b must be finite and > 0, got {decay}"));
                }
            }
            BaseProfile::RationalPlusConst { limit, amplitude } => {
                if !(limit.is_finite() && *limit >= 0.0) {
                    return bad(format!("limit l must be finite and >= 0, got {limit}"));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return bad(format!(
                        "amplitude a must be finite and >= 0, got {amplitude}"
                    ));
                }
            }
            BaseProfile::Constant { limit } => {
                if !(limit.is_finite() && *limit >= 0.0) {
                    return bad(format!("limit l must be finite and >= 0, got {limit}"));
                }
            }
            BaseProfile::Tabulated { knots } => {
                if knots.is_empty() {
                    return bad("tabulated profile needs at least one knot".into());
                }
                if knots[0].0 != 0.0 {
                    return bad("tabulated profile must start at u = 0".into());
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return bad("tabulated knot abscissae must be strictly increasing".into());
                    }
                    if w[1].1 > w[0].1 {
                        return bad("tabulated profile must be nonincreasing".into());
                    }
                }
                for &(u, v) in knots {
                    if !u.is_finite() || !v.is_finite() || v < 0.0 {
                        return bad(format!("tabulated knot ({u}, {v}) is invalid"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            BaseProfile::ExpPlusConst {
                limit,
                amplitude,
                decay,
            } => limit + amplitude * (-decay * u).exp(),
            BaseProfile::RationalPlusConst { limit, amplitude } => limit + amplitude / (1.0 + u),
            BaseProfile::Constant { limit } => *limit,
            BaseProfile::Tabulated { knots } => {
                if u <= knots[0].0 {
                    return knots[0].1;
                }
                match knots.binary_search_by(|&(ku, _)| ku.partial_cmp(&u).unwrap()) {
                    Ok(i) => knots[i].1,
                    Err(i) => {
                        if i >= knots.len() {
                            knots[knots.len() - 1].1
                        } else {
                            let (u0, v0) = knots[i - 1];
                            let (u1, v1) = knots[i];
                            v0 + (v1 - v0) * (u - u0) / (u1 - u0)
                        }
                    }
                }
            }
        }
    }

    /// The limit l = lim_{u -> inf} f(u).
    pub fn limit(&self) -> f64 {
        match self {
            BaseProfile::ExpPlusConst { limit, .. } => *limit,
            BaseProfile::RationalPlusConst { limit, .. } => *limit,
            BaseProfile::Constant { limit } => *limit,
            BaseProfile::Tabulated { knots } => knots[knots.len() - 1].1,
        }
    }

    /// Antiderivative F with F' = f, when the family has one in closed form.
    pub fn antiderivative(&self, u: f64) -> Option<f64> {
        match self {
            BaseProfile::ExpPlusConst {
                limit,
                amplitude,
                decay,
            } => Some(limit * u - amplitude / decay * (-decay * u).exp()),
            BaseProfile::RationalPlusConst { limit, amplitude } => {
                Some(limit * u + amplitude * (1.0 + u).ln())
            }
            BaseProfile::Constant { limit } => Some(limit * u),
            BaseProfile::Tabulated { .. } => None,
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, BaseProfile::Tabulated { .. })
    }
}

/// How trajectory-window integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "snake_case"))]
pub enum IntegrationMode {
    /// Use the family antiderivative; tabulated profiles fall back to
    /// quadrature at the default panel density.
    ClosedForm,
    /// Composite Simpson with a fixed panel density per unit length.
    Quadrature { panels_per_unit: usize },
}

impl IntegrationMode {
    pub fn quadrature_default() -> Self {
        IntegrationMode::Quadrature {
            panels_per_unit: quad::DEFAULT_PANELS_PER_UNIT,
        }
    }
}

/// A point of the state space: the translate x(tau) = f(shift + tau).
#[derive(Debug, Clone)]
pub struct StateProfile {
    base: Arc<BaseProfile>,
    shift: f64,
}

impl StateProfile {
    pub fn new(base: Arc<BaseProfile>, shift: f64) -> Result<Self> {
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(SkewflowError::InvalidProfile(format!(
                "profile shift must be finite and >= 0, got {shift}"
            )));
        }
        Ok(Self { base, shift })
    }

    pub fn base(&self) -> &Arc<BaseProfile> {
        &self.base
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.base.value(self.shift + tau)
    }

    /// The translate shifted further by `delta` >= 0.
    pub fn shifted(&self, delta: f64) -> Result<StateProfile> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(SkewflowError::InvalidProfile(format!(
                "shift increment must be finite and >= 0, got {delta}"
            )));
        }
        Ok(StateProfile {
            base: Arc::clone(&self.base),
            shift: self.shift + delta,
        })
    }

    /// Integral of the profile over [0, span].
    pub fn integral(&self, span: f64, mode: IntegrationMode) -> Result<f64> {
        if !(span.is_finite() && span >= 0.0) {
            return Err(SkewflowError::TimeDomain {
                t: span,
                s: 0.0,
                context: "integration span must be finite and >= 0",
            });
        }
        if span == 0.0 {
            return Ok(0.0);
        }
        let closed = |profile: &Self| -> Option<f64> {
            let a = profile.base.antiderivative(profile.shift)?;
            let b = profile.base.antiderivative(profile.shift + span)?;
            Some(b - a)
        };
        let value = match mode {
            IntegrationMode::ClosedForm => match closed(self) {
                Some(v) => v,
                None => quad::simpson(
                    |u| self.value(u),
                    0.0,
                    span,
                    quad::panels_for(span, quad::DEFAULT_PANELS_PER_UNIT),
                )?,
            },
            IntegrationMode::Quadrature { panels_per_unit } => quad::simpson(
                |u| self.value(u),
                0.0,
                span,
                quad::panels_for(span, panels_per_unit),
            )?,
        };
        if !value.is_finite() {
            return Err(SkewflowError::InvalidProfile(format!(
                "non-finite integral {value} over span {span} (shift {})",
                self.shift
            )));
        }
        Ok(value)
    }
}

/// Integral of x(tau - s) over [s, t], i.e. of x over [0, t - s].
pub fn integrate_profile(x: &StateProfile, s: f64, t: f64, mode: IntegrationMode) -> Result<f64> {
    if !(t >= s && s >= 0.0) {
        return Err(SkewflowError::TimeDomain {
            t,
            s,
            context: "profile integration requires t >= s >= 0",
        });
    }
    x.integral(t - s, mode)
}

/// Number of sample points used by the truncated sup-distance.
const DISTANCE_SAMPLES: usize = 512;

/// Default truncation horizon for the state-space distance.
pub const DEFAULT_PROFILE_TRUNCATION: f64 = 50.0;

/// Sup-distance of two profiles over a sampling of [0, T_trunc].
///
/// The state space has no canonical metric; translates of a monotone,
/// convergent base are separated by their values near tau = 0, so a truncated
/// sup works as a diagnostic distance.
pub fn profile_distance(x: &StateProfile, y: &StateProfile, t_trunc: f64) -> f64 {
    let t = if t_trunc > 0.0 {
        t_trunc
    } else {
        DEFAULT_PROFILE_TRUNCATION
    };
    let step = t / DISTANCE_SAMPLES as f64;
    let mut sup: f64 = 0.0;
    for i in 0..=DISTANCE_SAMPLES {
        let tau = i as f64 * step;
        sup = sup.max((x.value(tau) - y.value(tau)).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Arc<BaseProfile> {
        Arc::new(BaseProfile::unit_exp())
    }

    #[test]
    fn zero_shift_is_identity() {
        let x = StateProfile::new(fixture(), 2.0).unwrap();
        let y = x.shifted(0.0).unwrap();
        assert_eq!(profile_distance(&x, &y, 50.0), 0.0);
    }

    #[test]
    fn shift_by_two_lands_on_f4() {
        let x = StateProfile::new(fixture(), 2.0).unwrap();
        let y = x.shifted(2.0).unwrap();
        let direct = StateProfile::new(fixture(), 4.0).unwrap();
        assert_eq!(profile_distance(&y, &direct, 50.0), 0.0);
    }

    #[test]
    fn negative_shift_rejected() {
        let x = StateProfile::new(fixture(), 0.0).unwrap();
        assert!(x.shifted(-1.0).is_err());
        assert!(StateProfile::new(fixture(), -0.5).is_err());
    }

    #[test]
    fn closed_form_integral_matches_antiderivative() {
        // integral of 1 + e^{-u} over [0, 1] = 2 - e^{-1}
        let x = StateProfile::new(fixture(), 0.0).unwrap();
        let v = integrate_profile(&x, 0.0, 1.0, IntegrationMode::ClosedForm).unwrap();
        let exact = 2.0 - (-1.0f64).exp();
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn empty_interval_integral_is_zero() {
        let x = StateProfile::new(fixture(), 3.0).unwrap();
        assert_eq!(
            integrate_profile(&x, 5.0, 5.0, IntegrationMode::ClosedForm).unwrap(),
            0.0
        );
    }

    #[test]
    fn integral_respects_monotone_bounds() {
        let x = StateProfile::new(fixture(), 1.5).unwrap();
        let span = 7.0;
        let v = x.integral(span, IntegrationMode::ClosedForm).unwrap();
        let lo = x.base().limit() * span;
        let hi = x.value(0.0) * span;
        assert!(lo <= v && v <= hi, "{lo} <= {v} <= {hi}");
    }

    #[test]
    fn quadrature_tracks_closed_form() {
        let x = StateProfile::new(fixture(), 0.5).unwrap();
        let closed = x.integral(3.0, IntegrationMode::ClosedForm).unwrap();
        let quad = x
            .integral(
                3.0,
                IntegrationMode::Quadrature {
                    panels_per_unit: 64,
                },
            )
            .unwrap();
        assert!(((quad - closed) / closed).abs() < 1e-8);
    }

    #[test]
    fn distance_of_distinct_translates_is_positive() {
        let x = StateProfile::new(fixture(), 0.0).unwrap();
        let y = StateProfile::new(fixture(), 1.0).unwrap();
        let d = profile_distance(&x, &y, 50.0);
        assert!(d > 0.0);
        // Uniform bound from monotone convergence.
        assert!(d <= x.value(0.0) - x.base().limit() + 1e-15);
    }

    #[test]
    fn tabulated_profile_interpolates_and_integrates() {
        let base = Arc::new(BaseProfile::Tabulated {
            knots: vec![(0.0, 2.0), (1.0, 1.5), (4.0, 1.0)],
        });
        base.validate().unwrap();
        let x = StateProfile::new(Arc::clone(&base), 0.0).unwrap();
        assert_eq!(x.value(0.5), 1.75);
        assert_eq!(x.value(10.0), 1.0);
        // Piecewise-linear closed area: 1.75 + 3 * 1.25 + 1 = 6.5 over [0, 5]
        let v = x
            .integral(
                5.0,
                IntegrationMode::Quadrature {
                    panels_per_unit: 64,
                },
            )
            .unwrap();
        assert!((v - 6.5).abs() < 1e-3, "got {v}");
    }

    #[test]
    fn tabulated_rejects_increase() {
        let base = BaseProfile::Tabulated {
            knots: vec![(0.0, 1.0), (1.0, 2.0)],
        };
        assert!(base.validate().is_err());
    }

    #[test]
    fn unit_exp_shape() {
        let f = BaseProfile::unit_exp();
        assert_eq!(f.value(0.0), 2.0);
        assert_eq!(f.limit(), 1.0);
        assert!(f.value(1.0) < f.value(0.5));
    }
}
