//! The greatest fixed point of the bitstream program at a few truncation depths,
//! and membership of guarded atoms.

use cuproof::corpus;
use cuproof::semantics::{print_interpretation, ModelConfig, Semantics};
use cuproof::syntax::parse_term;

fn main() {
    let p = corpus::load("bitstream").unwrap();
    for depth in 1..=4 {
        let sem = Semantics::new(&p, ModelConfig::new(depth)).unwrap();
        let gfp = sem.gfp().unwrap();
        println!("depth {depth}: {} of {} atoms", gfp.len(), sem.top_size());
        if depth == 2 {
            print!("{}", print_interpretation(&gfp));
        }
    }
    let sem = Semantics::new(&p, ModelConfig::new(4)).unwrap();
    for src in ["bitstream z_str", "bitstream [0|n_str 0]", "bitstream [1|n_str 1]", "bit (s 0)", "bitstream (n_str (s 0))"] {
        let a = parse_term(src, &p, &[], None).unwrap();
        println!("{src}: {:?}", sem.member(&p.signature, &a).unwrap());
    }
}
