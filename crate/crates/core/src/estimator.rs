//! Series-parallel recursive least squares for the two velocity channels.
//!
//! Each channel predicts its next velocity as `theta_hat . phi`, where the
//! regressor `phi` holds the measured velocity and input at the previous
//! step. The gain is contracted first and the parameter correction uses the
//! contracted gain, which is algebraically the standard RLS gain
//! `F phi / (1 + phi' F phi)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Input, ProxyParams, State};

pub type Matrix2 = [[f64; 2]; 2];

/// Measured `(velocity, input)` pair for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regressor(pub [f64; 2]);

impl Regressor {
    pub fn is_zero(&self) -> bool {
        self.0 == [0.0, 0.0]
    }
}

pub fn regressor_v(prev_state: &State, prev_input: &Input) -> Regressor {
    Regressor([prev_state.v, prev_input.thrust])
}

pub fn regressor_w(prev_state: &State, prev_input: &Input) -> Regressor {
    Regressor([prev_state.omega, prev_input.moment])
}

/// Parameter estimate `(alpha_hat, beta_hat)` and adaptation gain of one
/// channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEstimate {
    pub theta: [f64; 2],
    pub gain: Matrix2,
}

impl ChannelEstimate {
    /// Estimate with gain `gamma * I`.
    pub fn new(theta: [f64; 2], gamma: f64) -> Self {
        Self {
            theta,
            gain: [[gamma, 0.0], [0.0, gamma]],
        }
    }

    pub fn predict(&self, phi: &Regressor) -> f64 {
        dot(self.theta, phi.0)
    }

    /// One adaptation step against the measured next channel velocity.
    pub fn update(&self, phi: &Regressor, measured_next: f64) -> Result<Self> {
        if !measured_next.is_finite() {
            return Err(Error::NonFinite("measurement"));
        }
        if !phi.0.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("regressor"));
        }
        let eps = measured_next - self.predict(phi);

        // F phi; the update subtracts (F phi)(F phi)' / (1 + phi' F phi).
        let f_phi = mat_vec(&self.gain, phi.0);
        let denom = 1.0 + dot(phi.0, f_phi);
        let mut gain = self.gain;
        for (i, row) in gain.iter_mut().enumerate() {
            for (j, g) in row.iter_mut().enumerate() {
                *g -= f_phi[i] * f_phi[j] / denom;
            }
        }

        let correction = mat_vec(&gain, phi.0);
        let theta = [
            self.theta[0] + correction[0] * eps,
            self.theta[1] + correction[1] * eps,
        ];
        Ok(Self { theta, gain })
    }
}

/// Initial guess and gain scale for both channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorInit {
    pub theta_v0: [f64; 2],
    pub theta_w0: [f64; 2],
    pub gamma: f64,
}

impl Default for EstimatorInit {
    fn default() -> Self {
        Self {
            theta_v0: [1.0, 0.1],
            theta_w0: [1.0, 0.1],
            gamma: 100.0,
        }
    }
}

impl EstimatorInit {
    pub fn from_proxy(theta: &ProxyParams, gamma: f64) -> Self {
        Self {
            theta_v0: theta.v_channel(),
            theta_w0: theta.w_channel(),
            gamma,
        }
    }

    pub fn initial_proxy(&self) -> ProxyParams {
        ProxyParams::from_channels(self.theta_v0, self.theta_w0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorState {
    pub v_channel: ChannelEstimate,
    pub w_channel: ChannelEstimate,
}

impl EstimatorState {
    pub fn new(init: &EstimatorInit) -> Self {
        Self {
            v_channel: ChannelEstimate::new(init.theta_v0, init.gamma),
            w_channel: ChannelEstimate::new(init.theta_w0, init.gamma),
        }
    }

    pub fn proxy(&self) -> ProxyParams {
        ProxyParams::from_channels(self.v_channel.theta, self.w_channel.theta)
    }

    /// Prediction errors `(eps_v, eps_w)` of a measured transition under
    /// the current estimate.
    pub fn prediction_errors(&self, state: &State, input: &Input, next: &State) -> [f64; 2] {
        [
            next.v - self.v_channel.predict(&regressor_v(state, input)),
            next.omega - self.w_channel.predict(&regressor_w(state, input)),
        ]
    }

    /// Updates both channels from one measured transition.
    pub fn update(&self, state: &State, input: &Input, next: &State) -> Result<Self> {
        Ok(Self {
            v_channel: self.v_channel.update(&regressor_v(state, input), next.v)?,
            w_channel: self
                .w_channel
                .update(&regressor_w(state, input), next.omega)?,
        })
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn mat_vec(m: &Matrix2, v: [f64; 2]) -> [f64; 2] {
    [dot(m[0], v), dot(m[1], v)]
}
