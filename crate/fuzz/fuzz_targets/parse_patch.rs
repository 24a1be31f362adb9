#![no_main]

use libfuzzer_sys::fuzz_target;
use toylang::{Edit, Patch};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(edit) = text.trim().parse::<Edit>() {
        assert_eq!(edit.to_string().parse::<Edit>().unwrap(), edit);
    }
    if let Ok(patch) = text.parse::<Patch>() {
        let again: Patch = patch.to_string().parse().expect("printed patch reparses");
        assert_eq!(again, patch);
    }
});
