use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Leaky integrate-and-fire neuron parameters. Potentials share the unit of
/// synaptic weights (a full-strength synapse contributes 1.0 per spike).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LifParams {
    pub v_th: f32,
    pub v_reset: f32,
    pub v_rest: f32,
    /// Per-step decay of `v_mem - v_rest`; 1.0 disables the leak.
    pub leak_factor: f32,
    pub refractory_steps: u32,
    /// Timestep in milliseconds. Informational; dynamics are per step.
    pub dt: f32,
}

impl Default for LifParams {
    fn default() -> Self {
        LifParams {
            v_th: 30.0,
            v_reset: 0.0,
            v_rest: 0.0,
            leak_factor: 0.99,
            refractory_steps: 0,
            dt: 1.0,
        }
    }
}

impl LifParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.v_th, self.v_reset, self.v_rest, self.leak_factor, self.dt]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("LIF parameters must be finite"));
        }
        if !(self.v_reset <= self.v_rest && self.v_rest < self.v_th) {
            return Err(Error::invalid(format!(
                "LIF potentials must satisfy v_reset <= v_rest < v_th (got {}, {}, {})",
                self.v_reset, self.v_rest, self.v_th
            )));
        }
        if !(self.leak_factor > 0.0 && self.leak_factor <= 1.0) {
            return Err(Error::invalid(format!(
                "leak_factor must be in (0, 1], got {}",
                self.leak_factor
            )));
        }
        if self.dt <= 0.0 {
            return Err(Error::invalid("dt must be positive"));
        }
        Ok(())
    }
}

/// Pair-based weight-dependent STDP parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StdpParams {
    pub eta_pre: f32,
    pub eta_post: f32,
    pub mu: f32,
    pub trace_decay_pre: f32,
    pub trace_decay_post: f32,
    pub wgh_max: f32,
}

impl Default for StdpParams {
    fn default() -> Self {
        StdpParams {
            eta_pre: 0.00001,
            eta_post: 0.001,
            mu: 0.0,
            trace_decay_pre: 0.95,
            trace_decay_post: 0.95,
            wgh_max: 1.0,
        }
    }
}

impl StdpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_pre > 0.0 && self.eta_post > 0.0) {
            return Err(Error::invalid("STDP learning rates must be positive"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid("STDP weight dependence mu must be >= 0"));
        }
        for decay in [self.trace_decay_pre, self.trace_decay_post] {
            if !(decay > 0.0 && decay < 1.0) {
                return Err(Error::invalid(format!(
                    "trace decay must be in (0, 1), got {decay}"
                )));
            }
        }
        if self.wgh_max != 1.0 {
            return Err(Error::invalid("wgh_max is fixed at 1.0 by the 8-bit weight code"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        LifParams::default().validate().unwrap();
        StdpParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_inverted_potentials() {
        let p = LifParams {
            v_reset: 1.0,
            v_rest: 0.0,
            ..LifParams::default()
        };
        assert!(p.validate().is_err());
        let p = LifParams {
            v_th: 0.0,
            ..LifParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn rejects_bad_leak_and_decay() {
        let p = LifParams {
            leak_factor: 0.0,
            ..LifParams::default()
        };
        assert!(p.validate().is_err());
        let s = StdpParams {
            trace_decay_post: 1.0,
            ..StdpParams::default()
        };
        assert!(s.validate().is_err());
    }
}
