//! Goals outside the reach of coinductive uniform proofs: an atomic hypothesis
//! over an irregular stream, and the Fibonacci stream invariant.

use cuproof::corpus;
use cuproof::engine::{coprove, Outcome, SearchConfig};
use cuproof::syntax::parse_goal;

fn main() {
    let e = corpus::entry("from-zero-atomic").unwrap();
    let p = e.program();
    let goal = parse_goal(e.goal, &p).unwrap();
    for d in [4, 16, 64] {
        let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus).with_depth(d)).unwrap();
        let inconclusive = matches!(r.outcome, Outcome::DepthExceeded);
        println!("{} at depth {d}: inconclusive = {inconclusive}, {} nodes", e.goal, r.stats.nodes);
    }

    let e = corpus::entry("fibs").unwrap();
    let p = e.program();
    let goal = parse_goal(e.goal, &p).unwrap();
    let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).unwrap();
    println!("{}: inconclusive = {}", e.goal, matches!(r.outcome, Outcome::DepthExceeded));
    if let Some(note) = p.limitation_note() {
        println!("note: {note}");
    }
}
