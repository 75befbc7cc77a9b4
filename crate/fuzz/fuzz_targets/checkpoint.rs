#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ck) = fanav::nn::Checkpoint::<f32>::from_bytes(data) {
        let _ = fanav::offrl::CheckpointMeta::parse(&ck.meta);
    }
    let _ = fanav::nn::Checkpoint::<f64>::from_bytes(data);
});
