use fanav::nn::{Activation, Arch};
use rand::SeedableRng;
use std::time::Instant;

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for hidden in [64usize, 128, 256] {
        let arch = Arch::uniform(112, &[hidden, hidden], 1, Activation::Relu).unwrap();
        let p: Vec<f32> = arch.init(&mut rng, 1.0);
        let x = vec![0.3f32; 256 * 112];
        let mut g = vec![0.0f32; p.len()];
        let t = Instant::now();
        let n = 200;
        for _ in 0..n {
            let tape = arch.forward_tape(&p, &x, 256).unwrap();
            let go = vec![1.0f32; 256];
            arch.backward(&p, &tape, &go, &mut g).unwrap();
        }
        println!("hidden {hidden}: {:.3} ms per fwd+bwd", t.elapsed().as_secs_f64() * 1e3 / n as f64);
    }
}
