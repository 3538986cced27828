//! Knife-edge robot dynamics.
//!
//! The robot is a planar rigid body whose velocity is constrained to its
//! heading. It is driven by a thrust `R` along the heading and a yaw moment
//! `M`, with linear drag on both. The state is `(x, y, psi, v, omega)`.
//!
//! For identification the Euler-discretized velocity rows are rewritten in
//! terms of [`ProxyParams`], which makes the discrete dynamics linear in the
//! unknown parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sampling interval in seconds.
pub const DEFAULT_DT: f64 = 0.1;

/// Time derivative of a [`State`], ordered `(x, y, psi, v, omega)`.
pub type StateDerivative = [f64; 5];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    /// Heading, unwrapped.
    pub psi: f64,
    /// Longitudinal speed.
    pub v: f64,
    /// Yaw rate.
    pub omega: f64,
}

impl State {
    pub const REST: State = State::new(0.0, 0.0, 0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, psi: f64, v: f64, omega: f64) -> Self {
        Self {
            x,
            y,
            psi,
            v,
            omega,
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.x, self.y, self.psi, self.v, self.omega]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Inertial-frame velocity `(x_dot, y_dot)`.
    pub fn world_velocity(&self) -> (f64, f64) {
        let (s, c) = self.psi.sin_cos();
        (self.v * c, self.v * s)
    }

    /// Tracking error `self - reference` with the heading component wrapped
    /// to `(-pi, pi]`.
    pub fn error_from(&self, reference: &State) -> [f64; 5] {
        [
            self.x - reference.x,
            self.y - reference.y,
            wrap_angle(self.psi - reference.psi),
            self.v - reference.v,
            self.omega - reference.omega,
        ]
    }
}

/// Maps an angle to `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Input {
    /// Thrust along the heading, N.
    pub thrust: f64,
    /// Yaw moment, N·m.
    pub moment: f64,
}

impl Input {
    pub const ZERO: Input = Input::new(0.0, 0.0);

    pub const fn new(thrust: f64, moment: f64) -> Self {
        Self { thrust, moment }
    }

    pub fn is_finite(&self) -> bool {
        self.thrust.is_finite() && self.moment.is_finite()
    }
}

/// Physical parameters of the robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mass, kg.
    pub mass: f64,
    /// Linear drag coefficient, kg/s.
    pub drag_linear: f64,
    /// Yaw moment of inertia, kg·m².
    pub inertia: f64,
    /// Angular drag coefficient, kg·m²/s.
    pub drag_angular: f64,
}

impl PhysicalParams {
    pub const fn new(mass: f64, drag_linear: f64, inertia: f64, drag_angular: f64) -> Self {
        Self {
            mass,
            drag_linear,
            inertia,
            drag_angular,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 4] = [
            ("mass", self.mass, self.mass > 0.0),
            ("drag_linear", self.drag_linear, self.drag_linear >= 0.0),
            ("inertia", self.inertia, self.inertia > 0.0),
            ("drag_angular", self.drag_angular, self.drag_angular >= 0.0),
        ];
        for (field, value, ok) in checks {
            if !value.is_finite() || !ok {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("got {value}"),
                });
            }
        }
        Ok(())
    }
}

impl Default for PhysicalParams {
    /// The reference robot: 5 kg, b = 0.1, J = 0.2, c = 0.1.
    fn default() -> Self {
        Self::new(5.0, 0.1, 0.2, 0.1)
    }
}

/// Parameters of the discrete velocity dynamics
/// `v' = alpha_v v + beta_v R`, `omega' = alpha_w omega + beta_w M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyParams {
    pub alpha_v: f64,
    pub beta_v: f64,
    pub alpha_w: f64,
    pub beta_w: f64,
}

impl ProxyParams {
    pub const fn new(alpha_v: f64, beta_v: f64, alpha_w: f64, beta_w: f64) -> Self {
        Self {
            alpha_v,
            beta_v,
            alpha_w,
            beta_w,
        }
    }

    pub fn from_channels(v: [f64; 2], w: [f64; 2]) -> Self {
        Self::new(v[0], v[1], w[0], w[1])
    }

    pub fn v_channel(&self) -> [f64; 2] {
        [self.alpha_v, self.beta_v]
    }

    pub fn w_channel(&self) -> [f64; 2] {
        [self.alpha_w, self.beta_w]
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.alpha_v, self.beta_v, self.alpha_w, self.beta_w]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

/// Sampling configuration for the discrete model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub dt: f64,
}

impl Discretization {
    pub fn new(dt: f64) -> Result<Self> {
        check_dt(dt)?;
        Ok(Self { dt })
    }
}

impl Default for Discretization {
    fn default() -> Self {
        Self { dt: DEFAULT_DT }
    }
}

pub(crate) fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("sampling interval must be positive, got {dt}"),
        })
    }
}

/// Right-hand side of the continuous dynamics.
pub fn continuous_derivative(s: &State, u: &Input, p: &PhysicalParams) -> Result<StateDerivative> {
    if !s.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite("input"));
    }
    p.validate()?;
    let (x_dot, y_dot) = s.world_velocity();
    Ok([
        x_dot,
        y_dot,
        s.omega,
        (u.thrust - p.drag_linear * s.v) / p.mass,
        (u.moment - p.drag_angular * s.omega) / p.inertia,
    ])
}

/// One Euler step with the input held over the interval.
///
/// The result may be non-finite if the inputs are; callers that propagate
/// long horizons check [`State::is_finite`].
pub fn step_discrete(s: &State, u: &Input, th: &ProxyParams, dt: f64) -> State {
    let (sin, cos) = s.psi.sin_cos();
    State {
        x: s.x + s.v * cos * dt,
        y: s.y + s.v * sin * dt,
        psi: s.psi + s.omega * dt,
        v: th.alpha_v * s.v + th.beta_v * u.thrust,
        omega: th.alpha_w * s.omega + th.beta_w * u.moment,
    }
}

pub fn to_proxy(p: &PhysicalParams, dt: f64) -> ProxyParams {
    ProxyParams {
        alpha_v: 1.0 - p.drag_linear * dt / p.mass,
        beta_v: dt / p.mass,
        alpha_w: 1.0 - p.drag_angular * dt / p.inertia,
        beta_w: dt / p.inertia,
    }
}

/// Inverse of [`to_proxy`]. Fails while an estimate still has a
/// non-positive input gain.
pub fn from_proxy(th: &ProxyParams, dt: f64) -> Result<PhysicalParams> {
    check_dt(dt)?;
    if th.beta_v.is_nan() || th.beta_v <= 0.0 {
        return Err(Error::Inversion {
            channel: "beta_v",
            beta: th.beta_v,
        });
    }
    if th.beta_w.is_nan() || th.beta_w <= 0.0 {
        return Err(Error::Inversion {
            channel: "beta_w",
            beta: th.beta_w,
        });
    }
    Ok(PhysicalParams {
        mass: dt / th.beta_v,
        drag_linear: (1.0 - th.alpha_v) / th.beta_v,
        inertia: dt / th.beta_w,
        drag_angular: (1.0 - th.alpha_w) / th.beta_w,
    })
}

/// Lateral velocity `-x_dot sin(psi) + y_dot cos(psi)`; zero for any state
/// of this model.
pub fn constraint_residual(s: &State) -> f64 {
    let (x_dot, y_dot) = s.world_velocity();
    let (sin, cos) = s.psi.sin_cos();
    -x_dot * sin + y_dot * cos
}

/// Lateral friction force `m * omega * v` needed to hold the constraint.
pub fn lateral_force(s: &State, p: &PhysicalParams) -> f64 {
    p.mass * s.omega * s.v
}
