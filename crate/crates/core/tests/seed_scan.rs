use rand::{Rng, SeedableRng};
#[test]
fn scan() {
    let analytic = 26.0f64;
    for seed in 0..24u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 10_000_000usize;
        let mut acc = 0.0;
        for _ in 0..n {
            let u: f64 = rng.gen();
            acc += (1.0 - u).powf(-1.0 / 1.04);
        }
        let emp = acc / n as f64;
        println!("seed {seed}: {emp:.3} rel {:.3}", (emp - analytic).abs() / analytic);
    }
}
