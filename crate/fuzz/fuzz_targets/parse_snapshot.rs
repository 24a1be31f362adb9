#![no_main]

use aos_core::Snapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(snap) = text.parse::<Snapshot>() {
        let again: Snapshot = snap.to_string().parse().expect("printed snapshot reparses");
        assert_eq!(again.to_string(), snap.to_string());
    }
});
