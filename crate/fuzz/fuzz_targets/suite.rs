#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(suite) = fanav::eval::TaskSuite::parse(text) {
        let back = fanav::eval::TaskSuite::parse(&suite.to_text()).expect("re-parse");
        assert_eq!(back.to_text(), suite.to_text());
    }
});
