//! Syntactic unification used to pick quantifier witnesses.
//!
//! First-order terms unify in the usual Robinson style. In the higher-order
//! calculi a fix-headed side may be unfolded at its head (a bounded number of
//! times) to expose a constructor, so `bitstream [x|y]` matches
//! `bitstream (n_str 0)` with `y := n_str 0`.

use std::collections::{HashMap, HashSet};

use crate::term::{alpha_eq, free_vars, unfold_head, Name, Substitution, Term};

pub struct Unifier<'a> {
    flex: &'a HashSet<Name>,
    bindings: HashMap<Name, Term>,
    budget: usize,
}

impl<'a> Unifier<'a> {
    pub fn new(flex: &'a HashSet<Name>, unfold_budget: usize) -> Unifier<'a> {
        Unifier {
            flex,
            bindings: HashMap::new(),
            budget: unfold_budget,
        }
    }

    fn walk<'t>(&'t self, t: &'t Term) -> &'t Term {
        let mut t = t;
        while let Term::Var(x) = t {
            match self.bindings.get(x) {
                Some(b) => t = b,
                None => break,
            }
        }
        t
    }

    /// Applies the bindings exhaustively.
    pub fn resolve(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        for _ in 0..=self.bindings.len() {
            let fv = free_vars(&cur);
            let pending: Vec<&Name> = fv.iter().filter(|v| self.bindings.contains_key(*v)).collect();
            if pending.is_empty() {
                break;
            }
            for v in pending {
                cur = crate::term::subst(&cur, v, &self.bindings[v]);
            }
        }
        crate::term::beta_normalize(&cur)
    }

    fn is_flex(&self, t: &Term) -> Option<Name> {
        match t {
            Term::Var(x) if self.flex.contains(x) && !self.bindings.contains_key(x) => Some(x.clone()),
            _ => None,
        }
    }

    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        if let Some(x) = self.is_flex(&a) {
            return self.bind(x, &b);
        }
        if let Some(y) = self.is_flex(&b) {
            return self.bind(y, &a);
        }
        if alpha_eq(&a, &b) && free_vars(&a).iter().all(|v| !self.flex.contains(v)) {
            return true;
        }
        let (ha, xs) = a.spine();
        let (hb, ys) = b.spine();
        let fa = matches!(ha, Term::Fix(_));
        let fb = matches!(hb, Term::Fix(_));
        if !fa && !fb {
            let same = match (ha, hb) {
                (Term::Const(c), Term::Const(d)) => c == d,
                (Term::Var(x), Term::Var(y)) => x == y,
                _ => false,
            };
            if !same || xs.len() != ys.len() {
                return false;
            }
            let xs: Vec<Term> = xs.into_iter().cloned().collect();
            let ys: Vec<Term> = ys.into_iter().cloned().collect();
            return xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y));
        }
        if fa && fb && alpha_eq(ha, hb) && xs.len() == ys.len() {
            let saved = self.bindings.clone();
            let xs: Vec<Term> = xs.into_iter().cloned().collect();
            let ys: Vec<Term> = ys.into_iter().cloned().collect();
            if xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y)) {
                return true;
            }
            self.bindings = saved;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let a2 = if fa { unfold_head(&a) } else { Some(a.clone()) };
        let b2 = if fb { unfold_head(&b) } else { Some(b.clone()) };
        match (a2, b2) {
            (Some(a2), Some(b2)) => self.unify(&a2, &b2),
            _ => false,
        }
    }

    fn bind(&mut self, x: Name, t: &Term) -> bool {
        if let Term::Var(y) = t {
            if *y == x {
                return true;
            }
        }
        let resolved = self.resolve(t);
        if free_vars(&resolved).contains(&x) {
            return false;
        }
        self.bindings.insert(x, resolved);
        true
    }

    pub fn binding(&self, x: &str) -> Option<Term> {
        self.bindings.get(x).map(|t| self.resolve(t))
    }

    pub fn substitution(&self) -> Substitution {
        let mut names: Vec<&Name> = self.bindings.keys().collect();
        names.sort();
        Substitution(names.into_iter().map(|x| (x.clone(), self.resolve(&self.bindings[x]))).collect())
    }
}

/// Most general unifier of two first-order terms over the variables in `flex`,
/// with occurs check. `None` when they do not unify.
pub fn unify_first_order(a: &Term, b: &Term, flex: &HashSet<Name>) -> Option<Substitution> {
    let mut u = Unifier::new(flex, 0);
    u.unify(a, b).then(|| u.substitution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{name, Type};

    fn flex(xs: &[&str]) -> HashSet<Name> {
        xs.iter().map(|x| name(x)).collect()
    }

    #[test]
    fn robinson_with_occurs_check() {
        let f = |a, b| Term::apps(Term::cnst("f"), [a, b]);
        let x = Term::var("x");
        let y = Term::var("y");
        let s = unify_first_order(&f(x.clone(), Term::cnst("a")), &f(Term::cnst("b"), y.clone()), &flex(&["x", "y"])).unwrap();
        assert_eq!(s.apply(&x), Term::cnst("b"));
        assert_eq!(s.apply(&y), Term::cnst("a"));
        let cyc = Term::app(Term::cnst("g"), x.clone());
        assert!(unify_first_order(&x, &cyc, &flex(&["x"])).is_none());
        assert!(unify_first_order(&Term::cnst("a"), &Term::cnst("b"), &flex(&[])).is_none());
    }

    #[test]
    fn unfolds_fix_heads_on_demand() {
        let z = Term::fix(Term::abs(
            "s",
            Type::iota(),
            Term::apps(Term::cnst("scons"), [Term::cnst("0"), Term::var("s")]),
        ));
        let pat = Term::apps(Term::cnst("scons"), [Term::var("x"), Term::var("y")]);
        let fl = flex(&["x", "y"]);
        let mut u = Unifier::new(&fl, 4);
        assert!(u.unify(&pat, &z));
        assert_eq!(u.binding("x"), Some(Term::cnst("0")));
        assert!(alpha_eq(&u.binding("y").unwrap(), &z));
        let mut u = Unifier::new(&fl, 0);
        assert!(!u.unify(&pat, &z));
    }
}
