#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(world) = fanav::sim::World::parse(text) {
        // anything accepted must survive a round trip
        let back = fanav::sim::World::parse(&world.to_text()).expect("re-parse");
        assert_eq!(back, world);
    }
});
