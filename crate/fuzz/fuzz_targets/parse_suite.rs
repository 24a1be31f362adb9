#![no_main]

use libfuzzer_sys::fuzz_target;
use toylang::TestSuite;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(suite) = text.parse::<TestSuite>() {
        let again: TestSuite = suite.to_string().parse().expect("printed suite reparses");
        assert_eq!(again, suite);
    }
});
