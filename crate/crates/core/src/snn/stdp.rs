use super::params::StdpParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpikeEvent {
    Presynaptic,
    Postsynaptic,
}

#[inline]
pub(crate) fn weight_power(base: f32, mu: f32) -> f32 {
    if mu == 1.0 {
        base
    } else if mu == 0.0 {
        1.0
    } else {
        base.powf(mu)
    }
}

/// Weight change for one STDP event.
///
/// A presynaptic spike depresses by `eta_pre * x_post * wgh^mu`; a
/// postsynaptic spike potentiates by `eta_post * x_pre * (wgh_max - wgh)^mu`.
/// The caller clamps the updated weight into `[0, wgh_max]`.
pub fn stdp_update(wgh: f32, event: SpikeEvent, x_pre: f32, x_post: f32, params: &StdpParams) -> f32 {
    match event {
        SpikeEvent::Presynaptic => -params.eta_pre * x_post * weight_power(wgh, params.mu),
        SpikeEvent::Postsynaptic => {
            params.eta_post * x_pre * weight_power(params.wgh_max - wgh, params.mu)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(mu: f32) -> StdpParams {
        StdpParams {
            eta_pre: 0.01,
            eta_post: 0.01,
            mu,
            ..StdpParams::default()
        }
    }

    #[test]
    fn bounds_give_zero_update() {
        let p = params(1.0);
        assert_eq!(stdp_update(0.0, SpikeEvent::Presynaptic, 1.0, 1.0, &p), 0.0);
        assert_eq!(stdp_update(1.0, SpikeEvent::Postsynaptic, 1.0, 1.0, &p), 0.0);
    }

    #[test]
    fn direct_substitution() {
        let p = params(1.0);
        let dw = stdp_update(0.5, SpikeEvent::Postsynaptic, 1.0, 0.0, &p);
        assert!((dw - 0.005).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn sign_property(w in 0.0f32..=1.0, x_pre in 0.0f32..10.0, x_post in 0.0f32..10.0, mu in 0.0f32..3.0) {
            let p = params(mu);
            prop_assert!(stdp_update(w, SpikeEvent::Presynaptic, x_pre, x_post, &p) <= 0.0);
            prop_assert!(stdp_update(w, SpikeEvent::Postsynaptic, x_pre, x_post, &p) >= 0.0);
        }
    }
}
