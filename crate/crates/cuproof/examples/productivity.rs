//! Guardedness of the stream definitions and convergence of snapshots under
//! fair unfolding.

use cuproof::corpus;
use cuproof::guard::{check_guarded_fixed_point, snapshot};
use cuproof::semantics::{distance, term_to_tree};
use cuproof::syntax::{parse_program, parse_term};
use cuproof::term::{fixbeta_unfold, Context};

fn main() {
    for file in ["bitstream", "from", "fibs"] {
        let p = corpus::load(file).unwrap();
        for d in &p.defs {
            let rep = check_guarded_fixed_point(&p.signature, &d.term);
            println!("{}: {}", d.name, if rep.ok() { "guarded" } else { "not guarded" });
        }
    }
    match parse_program("const 0 : i.\ndef loop = fix \\x. x.\n") {
        Ok(_) => println!("fix \\x. x accepted"),
        Err(e) => println!("fix \\x. x rejected: {e}"),
    }

    let p = corpus::load("from").unwrap();
    let mut t = parse_term("from 0 (fr_str 0)", &p, &[], None).unwrap();
    let snap = |t: &_| term_to_tree(&snapshot(&p.signature, &Context::new(), t).unwrap()).unwrap();
    let mut prev = snap(&t);
    println!("k = 0: {prev}");
    for k in 1..=8 {
        t = fixbeta_unfold(&t).unwrap();
        let next = snap(&t);
        println!("k = {k}: {next}   distance to previous {}", distance(&prev, &next));
        prev = next;
    }
}
