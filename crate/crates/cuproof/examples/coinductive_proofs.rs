//! Coinductive proofs of the four running examples, printed as trees.

use std::time::Instant;

use cuproof::corpus::{Expect, ENTRIES};
use cuproof::engine::{check, coprove, SearchConfig};
use cuproof::syntax::parse_goal;

fn main() {
    for e in ENTRIES.iter().filter(|e| e.expect == Expect::Proved) {
        let p = e.program();
        let goal = parse_goal(e.goal, &p).unwrap();
        let start = Instant::now();
        let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).unwrap();
        let pf = r.proof().expect("regression goals are provable");
        println!("== {} in {} ({:?}, {} nodes)", e.goal, e.calculus, start.elapsed(), r.stats.nodes);
        print!("{}", pf.render(&p));
        println!("checks: {}", check(pf, &p, e.calculus, 8).valid());
    }
}
