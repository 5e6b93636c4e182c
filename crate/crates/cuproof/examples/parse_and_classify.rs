//! Parse the shipped programs and list the calculi each clause and a few goals
//! belong to.

use cuproof::corpus::{self, FILES};
use cuproof::formula::{classify, Role};
use cuproof::syntax::{parse_goal, pretty_program};

fn main() {
    for f in &FILES {
        let p = corpus::load(f.name).expect("corpus parses");
        println!("== {} ({} clauses, {} definitions)", f.name, p.clauses.len(), p.defs.len());
        print!("{}", pretty_program(&p));
    }

    let member = corpus::load("member").unwrap();
    for src in [
        "exists x. member 0 [0|1|x] /\\ member 1 [0|1|x]",
        "forall x. member 0 [0|1|x]",
        "forall x. member 0 [0|1|x] => member 1 [0|1|x]",
    ] {
        let g = parse_goal(src, &member).unwrap();
        let cs = classify(&member.signature, &g, Role::Goal).unwrap();
        println!("goal {src}: {cs:?}");
    }
    let from = corpus::load("from").unwrap();
    let g = parse_goal("forall x. from x (fr_str x)", &from).unwrap();
    println!("core forall x. from x (fr_str x): {:?}", classify(&from.signature, &g, Role::Core).unwrap());
}
