//! Well-mixed (mean-field) limit of the dynamics.
//!
//! With neighbourhoods replaced by population averages, the strategy-1
//! density `u` follows `du/dt = (1-u)·[a1·u > a2·(1-u)] - u·[a1·u < a2·(1-u)]`:
//! dissatisfied strategy-2 players convert at rate 1 while the comparison
//! favours 1, and vice versa, with exact ties freezing both sides. The
//! comparison changes sign only at `u* = a2/(a1+a2)`, which exists inside
//! (0,1) exactly when `a1` and `a2` share a sign: repelling when both are
//! positive (either consensus can win), attracting when both are negative
//! (the mixture is reached in finite time and then frozen, because the
//! drift does not vanish as `u` approaches `u*`).

use crate::error::Error;
use crate::lattice::GameParams;
use crate::Result;

/// Long-run behaviour class of the well-mixed dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// `a1 > 0 > a2`: every revision favours 1; consensus at density 1.
    Strategy1Wins,
    /// `a2 > 0 > a1`: mirror image; density 0.
    Strategy2Wins,
    /// Both negative: the mixture at `threshold` attracts from both sides.
    Coexistence { threshold: f64 },
    /// Both positive: `threshold` separates the basins of the consensuses.
    Bistable { threshold: f64 },
}

/// Classify the parameter pair. A zero `a1` or `a2` makes the payoff
/// comparison tie on a whole interval of densities and is not supported.
pub fn classify_regime(params: &GameParams) -> Result<Regime> {
    let (a1, a2) = (params.a1(), params.a2());
    if a1 == 0.0 || a2 == 0.0 {
        return Err(Error::UnsupportedParams(format!(
            "well-mixed regimes need nonzero reduced payoffs, got a1={a1}, a2={a2}"
        )));
    }
    Ok(match (a1 > 0.0, a2 > 0.0) {
        (true, false) => Regime::Strategy1Wins,
        (false, true) => Regime::Strategy2Wins,
        (false, false) => Regime::Coexistence {
            threshold: a2 / (a1 + a2),
        },
        (true, true) => Regime::Bistable {
            threshold: a2 / (a1 + a2),
        },
    })
}

/// The tie density `a2/(a1+a2)`, present exactly when both reduced
/// payoffs share a (nonzero) sign.
pub fn threshold(params: &GameParams) -> Option<f64> {
    let (a1, a2) = (params.a1(), params.a2());
    (a1 * a2 > 0.0).then(|| a2 / (a1 + a2))
}

fn check_density(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidProbability(u));
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "time horizon must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// Instantaneous density velocity at `u`, using the exact payoff
/// comparison (ties contribute nothing). Taken literally at the
/// endpoints too: at `u = 0` a negative `a2` still converts strategy-2
/// players, because the comparison `0 > a2` favours 1 outright.
pub fn drift(params: &GameParams, u: f64) -> Result<f64> {
    check_density(u)?;
    let gain = params.a1() * u;
    let loss = params.a2() * (1.0 - u);
    Ok(if gain > loss {
        1.0 - u
    } else if gain < loss {
        -u
    } else {
        0.0
    })
}

/// Closed-form density at time `t` started from `u0`.
///
/// The drift sign at `u0` freezes the branch: growth follows
/// `1-(1-u0)e^{-t}`, decay follows `u0·e^{-t}`. In the coexistence
/// regime the branch is additionally capped at the attracting threshold,
/// where the trajectory arrives in finite time and stays.
pub fn exact_trajectory(params: &GameParams, u0: f64, t: f64) -> Result<f64> {
    check_horizon(t)?;
    let regime = classify_regime(params)?;
    let f0 = drift(params, u0)?;
    if f0 == 0.0 {
        return Ok(u0);
    }
    let raw = if f0 > 0.0 {
        1.0 - (1.0 - u0) * (-t).exp()
    } else {
        u0 * (-t).exp()
    };
    Ok(match regime {
        Regime::Coexistence { threshold } => {
            if f0 > 0.0 {
                raw.min(threshold)
            } else {
                raw.max(threshold)
            }
        }
        _ => raw,
    })
}

/// Fixed-step fourth-order Runge-Kutta integration of the density ODE.
///
/// The vector field is discontinuous exactly where trajectories can only
/// stop, so the integrator commits to the branch selected by the drift
/// sign at `u0` — a smooth linear field — and, in the coexistence regime,
/// detects the first step that reaches the attracting threshold and
/// freezes there, mirroring the true dynamics. Without that handling any
/// fixed-step scheme chatters around the threshold with `O(dt)` error.
pub fn integrate_numeric(params: &GameParams, u0: f64, t: f64, dt: f64) -> Result<f64> {
    check_horizon(t)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "step size must be finite and positive, got {dt}"
        )));
    }
    let regime = classify_regime(params)?;
    let f0 = drift(params, u0)?;
    if f0 == 0.0 || t == 0.0 {
        return Ok(u0);
    }
    let grow = f0 > 0.0;
    let field = |u: f64| if grow { 1.0 - u } else { -u };
    let cap = match regime {
        Regime::Coexistence { threshold } => Some(threshold),
        _ => None,
    };

    let steps = (t / dt).ceil() as u64;
    let mut u = u0;
    for i in 0..steps {
        let remaining = t - i as f64 * dt;
        let h = remaining.min(dt);
        let k1 = field(u);
        let k2 = field(u + 0.5 * h * k1);
        let k3 = field(u + 0.5 * h * k2);
        let k4 = field(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if let Some(threshold) = cap {
            // First touch of the attracting threshold ends the motion.
            if (grow && u >= threshold) || (!grow && u <= threshold) {
                return Ok(threshold);
            }
        }
    }
    Ok(u)
}

/// Where the density ends up as `t -> infinity`, following the same
/// branch selection as [`exact_trajectory`].
pub fn long_time_limit(params: &GameParams, u0: f64) -> Result<f64> {
    let regime = classify_regime(params)?;
    let f0 = drift(params, u0)?;
    if f0 == 0.0 {
        return Ok(u0);
    }
    Ok(match regime {
        Regime::Coexistence { threshold } => threshold,
        _ => {
            if f0 > 0.0 {
                1.0
            } else {
                0.0
            }
        }
    })
}
