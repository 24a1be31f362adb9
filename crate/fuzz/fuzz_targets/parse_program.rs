//! Parses arbitrary source; accepted programs must print to a fixed point
//! and interpret without panicking.
#![no_main]

use libfuzzer_sys::fuzz_target;
use toylang::{execute, parse, parse_expr, Value};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let _ = parse_expr(src);
    let Ok(program) = parse(src) else { return };
    let printed = program.to_string();
    let again = parse(&printed).expect("printed program reparses");
    assert_eq!(again, program);

    for f in &program.functions {
        let args = f.params.iter().enumerate().map(|(i, _)| Value::Int(i as i64 - 1)).collect();
        let _ = execute(&program, &f.name, args, 10_000);
    }
});
