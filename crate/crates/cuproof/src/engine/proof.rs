use std::fmt::Write;

use crate::formula::{Calculus, Formula};
use crate::program::Program;
use crate::syntax::Printer;
use crate::term::{Name, Term, Type};

/// Inference rules. `G` marks the guarded (`⟨⟩`) variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    CoFix,
    Decide,
    DecideG,
    ForallL,
    ForallLG,
    ImpL,
    ImpLG,
    AndL1,
    AndL1G,
    AndL2,
    AndL2G,
    ForallR,
    ForallRG,
    ImpR,
    ImpRG,
    AndR,
    AndRG,
    OrR1,
    OrR2,
    ExistsR,
    Initial,
    InitialG,
    TopR,
}

const RULE_NAMES: [(Rule, &str); 23] = [
    (Rule::CoFix, "co-fix"),
    (Rule::Decide, "decide"),
    (Rule::DecideG, "decide<>"),
    (Rule::ForallL, "forall-l"),
    (Rule::ForallLG, "forall-l<>"),
    (Rule::ImpL, "imp-l"),
    (Rule::ImpLG, "imp-l<>"),
    (Rule::AndL1, "and-l1"),
    (Rule::AndL1G, "and-l1<>"),
    (Rule::AndL2, "and-l2"),
    (Rule::AndL2G, "and-l2<>"),
    (Rule::ForallR, "forall-r"),
    (Rule::ForallRG, "forall-r<>"),
    (Rule::ImpR, "imp-r"),
    (Rule::ImpRG, "imp-r<>"),
    (Rule::AndR, "and-r"),
    (Rule::AndRG, "and-r<>"),
    (Rule::OrR1, "or-r1"),
    (Rule::OrR2, "or-r2"),
    (Rule::ExistsR, "exists-r"),
    (Rule::Initial, "initial"),
    (Rule::InitialG, "initial<>"),
    (Rule::TopR, "top-r"),
];

impl Rule {
    pub fn name(self) -> &'static str {
        RULE_NAMES.iter().find(|(r, _)| *r == self).map(|(_, n)| *n).expect("every rule is named")
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        RULE_NAMES.iter().find(|(_, n)| *n == s).map(|(r, _)| *r)
    }

    /// Rules of the guarded phase, applicable only under `⟨⟩`.
    pub fn is_guarded(self) -> bool {
        matches!(
            self,
            Rule::DecideG
                | Rule::ForallLG
                | Rule::ImpLG
                | Rule::AndL1G
                | Rule::AndL2G
                | Rule::ForallRG
                | Rule::ImpRG
                | Rule::AndRG
                | Rule::InitialG
        )
    }

    /// Rules that act on a focused clause.
    pub fn is_left(self) -> bool {
        matches!(
            self,
            Rule::ForallL
                | Rule::ForallLG
                | Rule::ImpL
                | Rule::ImpLG
                | Rule::AndL1
                | Rule::AndL1G
                | Rule::AndL2
                | Rule::AndL2G
                | Rule::Initial
                | Rule::InitialG
        )
    }
}

/// A node of a sequent proof. `sig_add` and `prog_add` are what the node's rule
/// adds to the signature and program of its premises.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofNode {
    pub rule: Rule,
    pub sig_add: Vec<(Name, Type)>,
    pub prog_add: Vec<Formula>,
    pub focus: Option<Formula>,
    pub goal: Formula,
    pub guarded: bool,
    pub witness: Option<Term>,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn leaf(rule: Rule, goal: Formula, focus: Option<Formula>, guarded: bool) -> ProofNode {
        ProofNode {
            rule,
            sig_add: Vec::new(),
            prog_add: Vec::new(),
            focus,
            goal,
            guarded,
            witness: None,
            children: Vec::new(),
        }
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out = vec![self.rule];
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }

    /// Indented rendering, one node per line.
    pub fn render(&self, program: &Program) -> String {
        let pr = Printer::new(program);
        let mut out = String::new();
        self.render_into(&pr, 0, &mut out);
        out
    }

    fn render_into(&self, pr: &Printer<'_>, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        let goal = pr.formula(&self.goal);
        let goal = if self.guarded { format!("<{goal}>") } else { goal };
        let _ = write!(out, "{pad}{}", self.rule.name());
        if let Some(w) = &self.witness {
            let _ = write!(out, " [{}]", pr.term(w));
        }
        for (c, t) in &self.sig_add {
            let _ = write!(out, " new {c} : {t}");
        }
        match &self.focus {
            Some(f) => {
                let _ = writeln!(out, "  {} |- {goal}", pr.formula(f));
            }
            None => {
                let _ = writeln!(out, "  |- {goal}");
            }
        }
        for c in &self.children {
            c.render_into(pr, indent + 1, out);
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub calculus: Calculus,
    /// Maximum proof height explored by iterative deepening.
    pub depth_limit: usize,
    /// Unfolding budget of the `=fixβ` check used by INITIAL in the higher-order calculi.
    pub fixbeta_bound: usize,
    /// Unfolding budget when matching clause heads against goals with fix terms.
    pub unify_unfold_budget: usize,
    /// Maximum number of pool witnesses tried per quantifier.
    pub witness_pool_limit: usize,
    /// Node budget per deepening round; exceeding it counts as hitting the bound.
    pub node_budget: u64,
}

impl SearchConfig {
    pub fn new(calculus: Calculus) -> SearchConfig {
        SearchConfig {
            calculus,
            depth_limit: 32,
            fixbeta_bound: 8,
            unify_unfold_budget: 8,
            witness_pool_limit: 24,
            node_budget: 2_000_000,
        }
    }

    pub fn with_depth(mut self, d: usize) -> SearchConfig {
        self.depth_limit = d;
        self
    }

    pub fn with_fixbeta_bound(mut self, b: usize) -> SearchConfig {
        self.fixbeta_bound = b;
        self
    }
}
