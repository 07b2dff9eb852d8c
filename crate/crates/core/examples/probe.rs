use std::time::Instant;

use nilmult::{CyclicFactors, Echelon, NilContext};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let k: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(4);
    let ctx = NilContext::new(3, k).unwrap();
    let f = CyclicFactors::new(vec![2, 3, 5]).unwrap();
    let t0 = Instant::now();
    let e = Echelon::normal_closure(&ctx, &f.relators(&ctx));
    println!("closure (2,3,5) k={k}: {} rows (m={}) in {:?}", e.len(), ctx.total_rank(), t0.elapsed());
}
