//! Writes a proof as a JSON document, reads it back and checks it.

use cuproof::corpus;
use cuproof::engine::{check, coprove, SearchConfig};
use cuproof::syntax::{parse_goal, proofdoc};

fn main() {
    let e = corpus::entry("comember-bit").unwrap();
    let p = e.program();
    let goal = parse_goal(e.goal, &p).unwrap();
    let r = coprove(&p, &[], &goal, &SearchConfig::new(e.calculus)).unwrap();
    let json = proofdoc::to_json(r.proof().unwrap(), &p);
    println!("{json}");
    let back = proofdoc::from_json(&json, &p).unwrap();
    println!("re-imported proof checks: {}", check(&back, &p, e.calculus, 8).valid());

    let broken = json.replacen("\"bit _Y1\"", "\"bit 0\"", 1);
    match proofdoc::from_json(&broken, &p) {
        Ok(t) => println!("edited proof: {:?}", check(&t, &p, e.calculus, 8).failure.map(|f| f.reason)),
        Err(err) => println!("edited proof rejected on import: {err}"),
    }
}
