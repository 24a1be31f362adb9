//! Input is a program and a patch separated by a `---` line. Applying any
//! well-formed patch must yield a printable, reparseable program.
#![no_main]

use libfuzzer_sys::fuzz_target;
use toylang::{parse, run_tests, Patch, TestSuite};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((src, patch)) = text.split_once("\n---\n") else { return };
    let (Ok(program), Ok(patch)) = (parse(src), patch.parse::<Patch>()) else { return };
    let applied = patch.apply(&program);
    let printed = applied.program.to_string();
    let reparsed = parse(&printed).expect("patched program reparses");
    assert_eq!(reparsed.to_string(), printed);

    if let Some(f) = reparsed.functions.first() {
        let args = vec!["0"; f.params.len()].join(", ");
        let suite: TestSuite = format!("t | {} | {args} | 0\n", f.name).parse().unwrap();
        let a = run_tests(&applied.program, &suite, 10_000);
        let b = run_tests(&reparsed, &suite, 10_000);
        assert_eq!(a.pass_flags, b.pass_flags);
    }
});
