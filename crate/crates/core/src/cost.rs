//! Latency, throughput, energy and area estimates for a mapping plan.
//!
//! Latency is proportional to the number of crossbar passes a plan needs per
//! timestep. Power and area come from synthesis figures supplied as
//! constants; strategies that use the barrel shifters draw the enhanced
//! engine power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fam::{build_plan, MappingPlan, Strategy};
use crate::fault::FaultMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HwConstants {
    /// Clock period in seconds.
    pub clock_cycle: f64,
    /// Cycles to stream one row tile through the crossbar.
    pub cycles_per_pass: u64,
    /// Engine power without enhancements, in watts.
    pub power_engine_baseline: f64,
    /// Power multiplier when the barrel shifters and shift registers are in use.
    pub power_enhancement_factor: f64,
    pub area_baseline_mm2: f64,
    pub area_enhanced_mm2: f64,
}

impl Default for HwConstants {
    fn default() -> Self {
        HwConstants {
            clock_cycle: 10e-9,
            cycles_per_pass: 256,
            power_engine_baseline: 0.05,
            power_enhancement_factor: 1.30,
            area_baseline_mm2: 6.27,
            area_enhanced_mm2: 8.56,
        }
    }
}

impl HwConstants {
    pub fn validate(&self) -> Result<()> {
        let positive = self.clock_cycle > 0.0
            && self.cycles_per_pass > 0
            && self.power_engine_baseline > 0.0
            && self.power_enhancement_factor > 0.0
            && self.area_baseline_mm2 > 0.0
            && self.area_enhanced_mm2 > 0.0;
        if !positive {
            return Err(Error::invalid("hardware constants must be positive"));
        }
        if self.area_enhanced_mm2 < self.area_baseline_mm2 {
            return Err(Error::invalid("enhanced area cannot be below baseline area"));
        }
        Ok(())
    }

    /// Relative area added by the enhancement hardware.
    pub fn area_overhead(&self) -> f64 {
        (self.area_enhanced_mm2 - self.area_baseline_mm2) / self.area_baseline_mm2
    }

    pub fn power(&self, strategy: Strategy) -> f64 {
        if strategy.uses_shuffling() {
            self.power_engine_baseline * self.power_enhancement_factor
        } else {
            self.power_engine_baseline
        }
    }

    pub fn area(&self, strategy: Strategy) -> f64 {
        match strategy {
            Strategy::Baseline => self.area_baseline_mm2,
            _ => self.area_enhanced_mm2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub strategy: Strategy,
    pub passes: usize,
    /// Seconds per input sample.
    pub latency_per_sample: f64,
    /// Samples per second.
    pub throughput: f64,
    /// Watts.
    pub power: f64,
    /// Joules per input sample.
    pub energy_per_sample: f64,
    pub area_mm2: f64,
    pub utilization: f64,
}

pub fn estimate_cost(plan: &MappingPlan, steps_per_sample: usize, constants: &HwConstants) -> Result<CostReport> {
    constants.validate()?;
    if steps_per_sample == 0 {
        return Err(Error::invalid("steps_per_sample must be positive"));
    }
    if plan.usable_cols() == 0 {
        return Err(Error::Unmappable {
            cols: plan.geometry().cols,
        });
    }
    let passes = plan.passes();
    let cycles = passes as f64 * steps_per_sample as f64 * constants.cycles_per_pass as f64;
    let latency = cycles * constants.clock_cycle;
    let power = constants.power(plan.strategy());
    Ok(CostReport {
        strategy: plan.strategy(),
        passes,
        latency_per_sample: latency,
        throughput: 1.0 / latency,
        power,
        energy_per_sample: power * latency,
        area_mm2: constants.area(plan.strategy()),
        utilization: plan.utilization(),
    })
}

/// Cost of every strategy on the same chip, in [`Strategy::ALL`] order.
pub fn compare_strategies(
    fault_map: &FaultMap,
    n_inputs: usize,
    n_neurons: usize,
    constants: &HwConstants,
    steps_per_sample: usize,
) -> Result<Vec<CostReport>> {
    Strategy::ALL
        .iter()
        .map(|&s| {
            let plan = build_plan(s, fault_map, n_inputs, n_neurons)?;
            estimate_cost(&plan, steps_per_sample, constants)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::{generate_fault_map, CrossbarGeometry, NeuronFaultTag, NeuronGranularity};

    fn geom() -> CrossbarGeometry {
        CrossbarGeometry::new(256, 256).unwrap()
    }

    #[test]
    fn fault_free_costs_agree() {
        let map = FaultMap::fault_free(geom());
        let c = HwConstants::default();
        let reports = compare_strategies(&map, 784, 400, &c, 100).unwrap();
        let base = &reports[0];
        for r in &reports {
            assert_eq!(r.passes, base.passes);
            assert_eq!(r.throughput, base.throughput);
        }
        let ratio = reports[3].energy_per_sample / base.energy_per_sample;
        assert!((ratio - c.power_enhancement_factor).abs() < 1e-12);
    }

    fn map_with_excluded(n: usize) -> FaultMap {
        let mut map = FaultMap::fault_free(geom());
        for c in 0..n {
            map.set_neuron_tag(c, NeuronFaultTag::FaultyLeak);
        }
        map
    }

    #[test]
    fn ceiling_arithmetic() {
        // 1600 neurons: 230 usable -> 7 passes, 204 usable -> 8 passes
        let c = HwConstants::default();
        let base = estimate_cost(
            &build_plan(Strategy::Baseline, &map_with_excluded(0), 256, 1600).unwrap(),
            100,
            &c,
        )
        .unwrap();
        assert_eq!(base.passes, 7);
        let r26 = estimate_cost(
            &build_plan(Strategy::Fam1, &map_with_excluded(26), 256, 1600).unwrap(),
            100,
            &c,
        )
        .unwrap();
        assert_eq!(r26.passes, 7);
        let r52 = estimate_cost(
            &build_plan(Strategy::Fam1, &map_with_excluded(52), 256, 1600).unwrap(),
            100,
            &c,
        )
        .unwrap();
        assert_eq!(r52.passes, 8);
        assert!((r52.throughput / base.throughput - 0.875).abs() < 1e-12);
        assert!((r52.utilization - 204.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn latency_formula_and_energy_consistency() {
        let c = HwConstants::default();
        let plan = build_plan(Strategy::Fam2, &map_with_excluded(3), 784, 300).unwrap();
        let r = estimate_cost(&plan, 150, &c).unwrap();
        let expect = (4 * 2) as f64 * 150.0 * 256.0 * 10e-9;
        assert!((r.latency_per_sample - expect).abs() < 1e-15);
        assert_eq!(r.throughput, 1.0 / r.latency_per_sample);
        assert_eq!(r.energy_per_sample, r.power * r.latency_per_sample);
        assert_eq!(r.area_mm2, 8.56);
    }

    #[test]
    fn area_overhead_figure() {
        let c = HwConstants::default();
        assert!((c.area_overhead() - 0.365).abs() < 1e-3);
        assert_eq!(c.area(Strategy::Baseline), 6.27);
        assert_eq!(c.area(Strategy::Fam1), 8.56);
    }

    #[test]
    fn all_reset_faults_make_fam3_equal_fam1() {
        let mut map = FaultMap::fault_free(geom());
        for c in (0..256).step_by(3) {
            map.set_neuron_tag(c, NeuronFaultTag::FaultyReset);
        }
        let r = compare_strategies(&map, 784, 1600, &HwConstants::default(), 100).unwrap();
        assert_eq!(r[3].throughput, r[1].throughput);
    }

    #[test]
    fn ordering_on_random_maps() {
        for seed in 0..5 {
            let map = generate_fault_map(geom(), 0.25, seed, NeuronGranularity::PerNeuron).unwrap();
            let r = compare_strategies(&map, 784, 1600, &HwConstants::default(), 100).unwrap();
            assert!(r[0].throughput >= r[3].throughput);
            assert!(r[3].throughput >= r[1].throughput);
            assert_eq!(r[1].throughput, r[2].throughput);
        }
    }

    #[test]
    fn rejects_bad_constants() {
        let c = HwConstants {
            area_enhanced_mm2: 1.0,
            ..HwConstants::default()
        };
        assert!(c.validate().is_err());
        let plan = build_plan(Strategy::Baseline, &map_with_excluded(0), 10, 10).unwrap();
        assert!(estimate_cost(&plan, 0, &HwConstants::default()).is_err());
    }
}
