//! Builds the post-fixed point witnessing a coinductive proof, and compares the
//! models before and after adding a proven lemma or an unrelated fact.

use cuproof::corpus;
use cuproof::engine::{coprove, SearchConfig};
use cuproof::formula::HClause;
use cuproof::harness::{conservative_extension_check, run_harness, HarnessConfig};
use cuproof::syntax::{parse_goal, parse_term};

fn main() {
    let e = corpus::entry("from-successors").unwrap();
    let p = e.program();
    let goal = parse_goal(e.goal, &p).unwrap();
    let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).unwrap();
    let pf = r.proof().unwrap();
    for depth in [2, 4] {
        let cfg = HarnessConfig { depth, ..HarnessConfig::default() };
        println!("{}", run_harness(pf, &p, e.calculus, &cfg).unwrap());
    }

    let bits = corpus::load("bitstream").unwrap();
    for fact in ["bitstream [0|n_str 0]", "bit (s 0)"] {
        let h = HClause::fact(parse_term(fact, &bits, &[], None).unwrap());
        let rep = conservative_extension_check(&bits, &[h], 4).unwrap();
        println!(
            "adding {fact}: models equal = {}, {} new atoms",
            rep.equal,
            rep.only_in_extended.len()
        );
    }
}
