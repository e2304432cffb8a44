mod common;

use common::*;
use phasedamp::extremal::EnvironmentModel;
use phasedamp::io::{
    environment_model_to_value, lindblad_to_value, parse_channel, parse_environment_model, parse_lindblad,
    parse_symmetry_spec, symmetry_spec_to_value, write_channel, write_channel_csv, Format,
};
use phasedamp::random_channel;
use phasedamp::symmetry::SymmetrySpec;
use proptest::prelude::*;
use std::io::Write;

proptest! {
    #![proptest_config(proptest_config(64))]

    #[test]
    fn channels_round_trip_exactly(seed in any::<u64>(), n in 1usize..=6) {
        let d = random_channel(n, n.min(3), seed).unwrap();
        let json = parse_channel(&write_channel(d.matrix()), Format::Json).unwrap();
        prop_assert_eq!(&json, d.matrix());
        let csv = parse_channel(&write_channel_csv(d.matrix()), Format::Csv).unwrap();
        prop_assert_eq!(&csv, d.matrix());
    }

    #[test]
    fn lindblad_data_round_trips(seed in any::<u64>(), n in 1usize..=5) {
        let data = random_lindblad(&mut rng(seed), n, 2, 0.7, 2.0);
        let back = parse_lindblad(&lindblad_to_value(&data).to_string()).unwrap();
        prop_assert_eq!(back.frequencies(), data.frequencies());
        for k in 0..n {
            prop_assert_eq!(back.vector(k), data.vector(k));
        }
    }

    #[test]
    fn symmetry_specs_round_trip(seed in any::<u64>(), qubits in 1usize..=4) {
        let mut g = rng(seed);
        let spec = SymmetrySpec::new(qubits, (0..=qubits).map(|_| unit(&mut g, 3)).collect()).unwrap();
        let back = parse_symmetry_spec(&symmetry_spec_to_value(&spec).to_string()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn environment_models_round_trip() {
    let m = EnvironmentModel::qubit_example();
    let back = parse_environment_model(&environment_model_to_value(&m).to_string()).unwrap();
    assert_eq!(back.kappa_a, m.kappa_a);
    assert_eq!(back.kappa_b, m.kappa_b);
    assert_eq!(back.system_a, m.system_a);
    assert_eq!(back.reservoir, m.reservoir);
    assert_eq!(back.h_reservoir, m.h_reservoir);
    assert_eq!(back.h_system, m.h_system);
    assert_eq!(back.psi0, m.psi0);
    assert_eq!(back.time, m.time);
}

#[test]
fn files_are_read_by_extension() {
    let d = random_channel(3, 2, 8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("a.json", write_channel(d.matrix())), ("b.CSV", write_channel_csv(d.matrix()))] {
        let path = dir.path().join(name);
        std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
        let path = path.to_str().unwrap();
        let read = std::fs::read_to_string(path).unwrap();
        assert_eq!(Format::from_path(path), Format::sniff(&read));
        assert_eq!(&parse_channel(&read, Format::from_path(path)).unwrap(), d.matrix());
    }
}

#[test]
fn malformed_inputs_report_locations() {
    let e = parse_channel(r#"{"dimension": 3, "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]}"#, Format::Json).unwrap_err();
    assert_eq!(e.location, "field `dimension`");
    let e = parse_channel("1,0.5+0.1i\n0.5-0.1i,zz\n", Format::Csv).unwrap_err();
    assert!(e.location.starts_with("line 2"), "{e}");
    let e = parse_channel("{\"dimension\": 2,", Format::Json).unwrap_err();
    assert!(e.location.starts_with("line 1"), "{e}");
    assert!(parse_channel("1,2\n3\n", Format::Csv).is_err());
}
