use proptest::prelude::*;
use proptest::strategy::Strategy as _;

use snn_fam::cost::{compare_strategies, HwConstants};
use snn_fam::fam::{build_plan, compute_rotation, corruption_cost, shuffle_word, unshuffle_word, Rotation, Strategy};
use snn_fam::fault::{apply_stuck_at, generate_fault_map, CellFaultMask, CrossbarGeometry, NeuronFaultTag, NeuronGranularity};
use snn_fam::io::{decode_fault_map, decode_plan, encode_fault_map, encode_plan};
use snn_fam::snn::WeightCode;

fn mask() -> impl proptest::strategy::Strategy<Value = CellFaultMask> {
    (any::<u8>(), any::<u8>()).prop_map(|(a, b)| CellFaultMask::new(a & !b, b).unwrap())
}

fn granularity() -> impl proptest::strategy::Strategy<Value = NeuronGranularity> {
    prop_oneof![Just(NeuronGranularity::PerNeuron), Just(NeuronGranularity::PerOperation)]
}

proptest! {
    #[test]
    fn shuffle_is_a_bijection(w: u8, r in 0u8..8) {
        let rot = Rotation::new(r).unwrap();
        prop_assert_eq!(unshuffle_word(shuffle_word(w, rot), rot), w);
        prop_assert_eq!(shuffle_word(w, rot), w.rotate_left(r as u32));
    }

    #[test]
    fn chosen_rotation_is_never_worse(m in mask()) {
        let best = compute_rotation(m);
        for r in 0..8 {
            prop_assert!(corruption_cost(m, best) <= corruption_cost(m, Rotation::new(r).unwrap()));
        }
    }

    #[test]
    fn stuck_bits_force_their_values(code: u8, m in mask(), r in 0u8..8) {
        let rot = Rotation::new(r).unwrap();
        let out = apply_stuck_at(WeightCode(code), m, rot).0;
        let stored = shuffle_word(out, rot);
        prop_assert_eq!(stored & m.stuck1(), m.stuck1());
        prop_assert_eq!(stored & m.stuck0(), 0);
        let clean = !(m.stuck0() | m.stuck1());
        prop_assert_eq!(stored & clean, shuffle_word(code, rot) & clean);
    }

    #[test]
    fn plan_invariants(
        rows in 1usize..40, cols in 1usize..40, rate in 0.0f64..=1.0, seed: u64,
        n_inputs in 1usize..100, n_neurons in 1usize..120, g in granularity(),
    ) {
        let map = generate_fault_map(CrossbarGeometry::new(rows, cols).unwrap(), rate, seed, g).unwrap();
        let faulty: Vec<usize> = (0..cols).filter(|&c| map.neuron_tag(c).is_faulty()).collect();
        let resets: Vec<usize> = (0..cols).filter(|&c| map.neuron_tag(c) == NeuronFaultTag::FaultyReset).collect();
        for s in Strategy::ALL {
            let expected: &[usize] = match s {
                Strategy::Baseline => &[],
                Strategy::Fam1 | Strategy::Fam2 => &faulty,
                Strategy::Fam3 => &resets,
            };
            match build_plan(s, &map, n_inputs, n_neurons) {
                Ok(plan) => {
                    prop_assert_eq!(plan.excluded(), expected);
                    let usable = cols - expected.len();
                    prop_assert_eq!(plan.passes(), n_neurons.div_ceil(usable) * n_inputs.div_ceil(rows));
                    prop_assert!(plan.assignment().iter().all(|p| !expected.contains(&p.col)));
                    if !s.uses_shuffling() {
                        prop_assert!(plan.rotations().iter().all(|r| r.is_identity()));
                    }
                    prop_assert_eq!(decode_plan(&encode_plan(&plan)).unwrap(), plan);
                }
                Err(_) => prop_assert_eq!(expected.len(), cols),
            }
        }
    }

    #[test]
    fn throughput_ordering(rate in 0.0f64..0.99, seed: u64, n_neurons in 1usize..200) {
        let map = generate_fault_map(CrossbarGeometry::new(32, 32).unwrap(), rate, seed, NeuronGranularity::PerNeuron).unwrap();
        if let Ok(r) = compare_strategies(&map, 784, n_neurons, &HwConstants::default(), 50) {
            let t: Vec<f64> = r.iter().map(|c| c.throughput).collect();
            prop_assert!(t[0] >= t[3] && t[3] >= t[1]);
            prop_assert_eq!(t[1], t[2]);
            prop_assert!(r[2].energy_per_sample >= r[1].energy_per_sample);
        }
    }

    #[test]
    fn fault_map_roundtrip(rows in 1usize..20, cols in 1usize..20, rate in 0.0f64..=1.0, seed: u64, g in granularity()) {
        let map = generate_fault_map(CrossbarGeometry::new(rows, cols).unwrap(), rate, seed, g).unwrap();
        let again = generate_fault_map(map.geometry(), rate, seed, g).unwrap();
        prop_assert_eq!(&again, &map);
        prop_assert_eq!(decode_fault_map(&encode_fault_map(&map)).unwrap(), map);
    }
}
