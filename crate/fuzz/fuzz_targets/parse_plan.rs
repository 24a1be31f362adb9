#![no_main]

use libfuzzer_sys::fuzz_target;
use repair_cli::{ConfigSpec, ExperimentPlan};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.trim().parse::<ConfigSpec>() {
        assert_eq!(spec.to_string().parse::<ConfigSpec>().unwrap(), spec);
        let _ = spec.label();
    }
    if let Ok(plan) = text.parse::<ExperimentPlan>() {
        let again: ExperimentPlan = plan.to_string().parse().expect("printed plan reparses");
        assert_eq!(again, plan);
    }
});
