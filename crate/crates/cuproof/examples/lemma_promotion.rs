//! Goals that need a coinductive lemma first: an existential over streams and
//! a bit comembership instance.

use cuproof::corpus;
use cuproof::engine::{coprove, lemma_formulas, promote_lemma, prove, Outcome, SearchConfig};
use cuproof::formula::Calculus;
use cuproof::syntax::parse_goal;

fn show(label: &str, o: &Outcome) {
    let s = match o {
        Outcome::Proved(_) => "proved",
        Outcome::DepthExceeded => "inconclusive",
        Outcome::Failed => "failed",
    };
    println!("{label}: {s}");
}

fn main() {
    let cases = [
        ("bitstream", Calculus::Hohc, "bitstream [0|n_str 0]", "exists y. bitstream [0|y]"),
        ("comember", Calculus::Hohh, "forall y s. bit y => comember_bit y s", "comember_bit 0 (n_str 0)"),
    ];
    for (file, calc, lemma_src, goal_src) in cases {
        let p = corpus::load(file).unwrap();
        let cfg = SearchConfig::new(calc);
        let goal = parse_goal(goal_src, &p).unwrap();

        match coprove(&p, &[], &goal, &cfg) {
            Ok(r) => show(&format!("{goal_src} coinductively, no lemma"), &r.outcome),
            Err(e) => println!("{goal_src} coinductively: {e}"),
        }
        show(&format!("{goal_src} inductively, no lemma"), &prove(&p, &[], &goal, &cfg).unwrap().outcome);

        let lf = parse_goal(lemma_src, &p).unwrap();
        let r = coprove(&p, &[], &lf, &cfg).unwrap();
        let lemma = promote_lemma(&p, r.proof().unwrap(), calc, &[], 8).unwrap();
        println!("promoted {lemma_src}");
        let r = prove(&p, &lemma_formulas(&[lemma]), &goal, &cfg).unwrap();
        show(&format!("{goal_src} with the lemma"), &r.outcome);
        if let Some(pf) = r.proof() {
            print!("{}", pf.render(&p));
        }
    }
}
