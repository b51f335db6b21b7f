use std::time::Instant;
use symsum::modform::{delta_qexpansion_with, ExpansionOptions};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let threads: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let opts = ExpansionOptions { threads, ..Default::default() };
    let t = Instant::now();
    let series = delta_qexpansion_with(n, &opts).unwrap();
    println!("N={n} threads={threads}: {:?}; tau(2)={}", t.elapsed(), series.coeff(2));
}
