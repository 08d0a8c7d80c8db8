use std::f64::consts::FRAC_PI_6;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Action;

/// Nominal forward step length in meters.
pub const FORWARD_STEP: f64 = 0.25;
/// Nominal turn angle in radians.
pub const TURN_ANGLE: f64 = FRAC_PI_6;

/// Body-frame motion: along the heading, to the left of it, and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Motion {
    pub along: f64,
    pub lateral: f64,
    pub heading: f64,
}

impl Motion {
    pub const fn new(along: f64, lateral: f64, heading: f64) -> Self {
        Self {
            along,
            lateral,
            heading,
        }
    }
}

/// Gaussian perturbation of one action: mean offset plus per-axis sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionNoise {
    pub mean: Motion,
    pub sigma: Motion,
}

/// Per-action 2D Gaussian over relative displacements (plus heading).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuationNoiseModel {
    pub forward: ActionNoise,
    pub turn_left: ActionNoise,
    pub turn_right: ActionNoise,
}

impl Default for ActuationNoiseModel {
    /// Calibration placeholder, not measured robot data.
    fn default() -> Self {
        let turn = ActionNoise {
            mean: Motion::default(),
            sigma: Motion::new(0.004, 0.004, 0.035),
        };
        Self {
            forward: ActionNoise {
                mean: Motion::default(),
                sigma: Motion::new(0.016, 0.012, 0.014),
            },
            turn_left: turn,
            turn_right: turn,
        }
    }
}

impl ActuationNoiseModel {
    pub fn for_action(&self, action: Action) -> Option<&ActionNoise> {
        match action {
            Action::Forward => Some(&self.forward),
            Action::TurnLeft => Some(&self.turn_left),
            Action::TurnRight => Some(&self.turn_right),
            Action::Stop => None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, n) in [
            ("forward", &self.forward),
            ("turn_left", &self.turn_left),
            ("turn_right", &self.turn_right),
        ] {
            let s = n.sigma;
            let m = n.mean;
            if [s.along, s.lateral, s.heading]
                .iter()
                .any(|v| !(*v >= 0.0) || !v.is_finite())
            {
                return Err(format!("{name}: sigmas must be finite and non-negative"));
            }
            if [m.along, m.lateral, m.heading].iter().any(|v| !v.is_finite()) {
                return Err(format!("{name}: mean offsets must be finite"));
            }
        }
        Ok(())
    }
}

/// Noise-free motion of an action.
pub fn nominal_motion(action: Action) -> Motion {
    match action {
        Action::Forward => Motion::new(FORWARD_STEP, 0.0, 0.0),
        Action::TurnLeft => Motion::new(0.0, 0.0, TURN_ANGLE),
        Action::TurnRight => Motion::new(0.0, 0.0, -TURN_ANGLE),
        Action::Stop => Motion::default(),
    }
}

/// Samples the executed motion: nominal + mean offset + multiplier·σ·z.
///
/// Three standard normals are always drawn, so streams stay aligned across
/// multipliers. Returns `None` for [`Action::Stop`].
pub fn sample_displacement<R: Rng + ?Sized>(
    model: &ActuationNoiseModel,
    action: Action,
    multiplier: f64,
    rng: &mut R,
) -> Option<Motion> {
    let noise = model.for_action(action)?;
    let nominal = nominal_motion(action);
    let z: [f64; 3] = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    Some(Motion::new(
        nominal.along + noise.mean.along + multiplier * noise.sigma.along * z[0],
        nominal.lateral + noise.mean.lateral + multiplier * noise.sigma.lateral * z[1],
        nominal.heading + noise.mean.heading + multiplier * noise.sigma.heading * z[2],
    ))
}
