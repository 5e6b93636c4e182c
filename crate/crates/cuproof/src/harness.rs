//! Executable soundness construction for coinductive proofs of H-formulas.
//!
//! From a checked CO-FIX proof of `∀x̄ (A1 ∧ .. ∧ An ⊃ A)` the harness reads the
//! substitutions `δj` at every use of the coinductive hypothesis, builds the
//! family of eigenvariable instantiations `Θ(w)` indexed by words over the uses,
//! collects the atoms of the proof under every `Θ(w)` and checks that, together
//! with a post-fixed point covering the hypothesis instances, they form a
//! post-fixed point of `T` at the chosen tree depth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::engine::{check, ProofNode, Rule};
use crate::formula::{alpha_eq_formula, to_h_clauses, Calculus, Formula, HClause};
use crate::program::Program;
use crate::semantics::tree::{default_unfold_limit, term_to_tree, unfold_to_depth};
use crate::semantics::{Interpretation, Membership, ModelConfig, ModelError, Semantics, Symbol, Tree, TreeError};
use crate::syntax::pretty_term;
use crate::term::{Name, Term, Type};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("the proof must end with CO-FIX on an H-formula over individuals")]
    NotHShapedRoot,
    #[error("proof does not check: {0}")]
    ProofInvalid(String),
    #[error("no base term for eigenvariable `{0}`")]
    MissingEigenvariableBinding(Name),
    #[error("unsupported proof shape: {0}")]
    UnsupportedShape(String),
    #[error("body atom `{0}` is not in the model")]
    BodyNotInModel(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Bindings for the universals of the coinductive hypothesis at its `index`-th use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRecord {
    /// 1-based.
    pub index: usize,
    pub bindings: Vec<(Name, Term)>,
}

/// What the construction needs from a proof.
#[derive(Clone, Debug)]
pub struct ProofShape {
    pub coinductive_goal: Formula,
    /// Eigenvariables introduced for the universals, in order.
    pub eigen: Vec<(Name, Type)>,
    /// `A[x̄:=c̄]`, the guarded conclusion.
    pub conclusion: Term,
    /// `A1..An` with `x̄:=c̄`.
    pub hypotheses: Vec<Term>,
    /// Atoms on the right of the sequents above the guarded DECIDE, plus the
    /// conclusion.
    pub atoms: Vec<Term>,
    pub deltas: Vec<DeltaRecord>,
}

/// Reads the construction data off a proof after checking it.
pub fn analyse(proof: &ProofNode, program: &Program, calculus: Calculus, fixbeta_bound: usize) -> Result<ProofShape, HarnessError> {
    if proof.rule != Rule::CoFix {
        return Err(HarnessError::NotHShapedRoot);
    }
    let ch = proof.goal.clone();
    let h = HClause::from_formula(&ch).ok_or(HarnessError::NotHShapedRoot)?;
    if h.universals.iter().any(|(_, t)| !t.is_iota()) {
        return Err(HarnessError::NotHShapedRoot);
    }
    if let Some(f) = check(proof, program, calculus, fixbeta_bound).failure {
        return Err(HarnessError::ProofInvalid(format!("at {:?} ({}): {}", f.path, f.rule.name(), f.reason)));
    }
    let mut eigen = Vec::new();
    let mut hypotheses = Vec::new();
    let mut cur = proof.children.first().ok_or(HarnessError::NotHShapedRoot)?;
    loop {
        match cur.rule {
            Rule::ForallRG => eigen.extend(cur.sig_add.iter().cloned()),
            Rule::ImpRG => {
                for f in &cur.prog_add {
                    for a in f.atoms() {
                        hypotheses.push(a.clone());
                    }
                }
            }
            Rule::DecideG => break,
            _ => return Err(HarnessError::UnsupportedShape(format!("`{}` below CO-FIX", cur.rule.name()))),
        }
        cur = cur.children.first().ok_or(HarnessError::NotHShapedRoot)?;
    }
    let conclusion = cur.goal.as_atom().ok_or(HarnessError::NotHShapedRoot)?.clone();
    let mut atoms = vec![conclusion.clone()];
    let mut deltas = Vec::new();
    let universals: Vec<Name> = h.universals.iter().map(|(x, _)| x.clone()).collect();
    walk(cur, &ch, &universals, &mut atoms, &mut deltas)?;
    let mut seen = BTreeSet::new();
    atoms.retain(|a| seen.insert(crate::term::canonical(a)));
    Ok(ProofShape {
        coinductive_goal: ch,
        eigen,
        conclusion,
        hypotheses,
        atoms,
        deltas,
    })
}

fn walk(
    n: &ProofNode,
    ch: &Formula,
    universals: &[Name],
    atoms: &mut Vec<Term>,
    deltas: &mut Vec<DeltaRecord>,
) -> Result<(), HarnessError> {
    if !n.sig_add.is_empty() && n.rule != Rule::CoFix {
        return Err(HarnessError::UnsupportedShape("eigenvariables above the guarded DECIDE".into()));
    }
    if let Some(a) = n.goal.as_atom() {
        atoms.push(a.clone());
    }
    // the clause DECIDE selects is the focus of its premise
    let selected = n.children.first().and_then(|c| c.focus.as_ref());
    if n.rule == Rule::Decide && selected.is_some_and(|f| alpha_eq_formula(f, ch)) {
        let mut ws = Vec::new();
        let mut m = n.children.first();
        while let Some(c) = m.filter(|c| c.rule == Rule::ForallL) {
            ws.push(c.witness.clone().ok_or_else(|| HarnessError::ProofInvalid("forall-l without witness".into()))?);
            m = c.children.first();
        }
        if ws.len() != universals.len() {
            return Err(HarnessError::UnsupportedShape("coinductive hypothesis only partly instantiated".into()));
        }
        deltas.push(DeltaRecord {
            index: deltas.len() + 1,
            bindings: universals.iter().cloned().zip(ws).collect(),
        });
    }
    for c in &n.children {
        walk(c, ch, universals, atoms, deltas)?;
    }
    Ok(())
}

pub fn collect_deltas(proof: &ProofNode, program: &Program, calculus: Calculus, fixbeta_bound: usize) -> Result<Vec<DeltaRecord>, HarnessError> {
    Ok(analyse(proof, program, calculus, fixbeta_bound)?.deltas)
}

/// Eigenvariable instantiation by trees.
pub type TreeSubst = BTreeMap<Name, Tree>;

/// Simultaneous replacement of leaves named in `s`.
pub fn substitute_all(t: &Tree, s: &TreeSubst) -> Tree {
    if t.kids.is_empty() {
        if let Symbol::Fun(c) | Symbol::Var(c) = &t.sym {
            if let Some(r) = s.get(c) {
                return r.clone();
            }
        }
    }
    Tree {
        sym: t.sym.clone(),
        kids: t.kids.iter().map(|k| substitute_all(k, s)).collect(),
    }
}

/// Tree of a term or atom (eigenvariables as leaves) truncated at `depth`.
pub fn tree_of(t: &Term, depth: usize) -> Result<Tree, TreeError> {
    if t.contains_fix() {
        unfold_to_depth(t, depth, default_unfold_limit(depth))
    } else {
        Ok(term_to_tree(t)?.truncate(depth))
    }
}

/// `Θ(w)` truncated at `depth`: the base for the empty word, and
/// `Θ([w,j])(ci) = (L(j,i))^T Θ(w)` otherwise. Words hold 1-based use indices.
pub fn theta(
    word: &[usize],
    eigen: &[(Name, Type)],
    deltas: &[DeltaRecord],
    base: &TreeSubst,
    depth: usize,
) -> Result<TreeSubst, HarnessError> {
    match word.split_last() {
        None => {
            let mut out = TreeSubst::new();
            for (c, _) in eigen {
                let t = base.get(c).ok_or_else(|| HarnessError::MissingEigenvariableBinding(c.clone()))?;
                out.insert(c.clone(), t.truncate(depth));
            }
            Ok(out)
        }
        Some((&j, w)) => {
            let prev = theta(w, eigen, deltas, base, depth)?;
            step(&prev, j, eigen, deltas, depth)
        }
    }
}

fn step(prev: &TreeSubst, j: usize, eigen: &[(Name, Type)], deltas: &[DeltaRecord], depth: usize) -> Result<TreeSubst, HarnessError> {
    let d = deltas
        .get(j.wrapping_sub(1))
        .ok_or_else(|| HarnessError::UnsupportedShape(format!("no use {j} of the coinductive hypothesis")))?;
    let mut out = TreeSubst::new();
    for ((c, _), (_, l)) in eigen.iter().zip(&d.bindings) {
        out.insert(c.clone(), substitute_all(&tree_of(l, depth)?, prev).truncate(depth));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Candidate {
    /// `⋃w I^c Θ(w)` truncated at the depth.
    pub i1: Interpretation,
    /// Part of `i1` coming from words no longer than the budget.
    pub within_budget: Interpretation,
    /// The hypothesis instances `A'k` that a post-fixed point of the program must cover.
    pub side: Vec<Tree>,
    /// `A'`, the instance of the conclusion.
    pub head: Tree,
    /// Distinct truncated instantiations reached.
    pub states: usize,
    /// Word length at which no new truncated instantiation appears.
    pub saturated_at: usize,
}

/// Longest word explored before giving up on saturation.
const MAX_WORD: usize = 256;

/// Builds `I1`. All words up to `word_budget` are explored; exploration then
/// continues until no new truncated `Θ(w)` appears, which yields the whole union
/// at this depth because `Θ([w,j])` truncated depends only on `Θ(w)` truncated.
pub fn build_candidate(shape: &ProofShape, base: &TreeSubst, depth: usize, word_budget: usize) -> Result<Candidate, HarnessError> {
    let atom_trees: Vec<Tree> = shape.atoms.iter().map(|a| tree_of(a, depth)).collect::<Result<_, _>>()?;
    let apply = |s: &TreeSubst| -> BTreeSet<Tree> { atom_trees.iter().map(|t| substitute_all(t, s).truncate(depth)).collect() };
    let th0 = theta(&[], &shape.eigen, &shape.deltas, base, depth)?;
    let grow = |layer: &BTreeSet<TreeSubst>| -> Result<BTreeSet<TreeSubst>, HarnessError> {
        let mut out = BTreeSet::new();
        for s in layer {
            for j in 1..=shape.deltas.len() {
                out.insert(step(s, j, &shape.eigen, &shape.deltas, depth)?);
            }
        }
        Ok(out)
    };
    // words of each exact length up to the budget
    let mut layer = BTreeSet::from([th0.clone()]);
    let mut seen = layer.clone();
    let mut within_budget = apply(&th0);
    let mut len = 0;
    while len < word_budget && !layer.is_empty() {
        len += 1;
        layer = grow(&layer)?;
        for t in &layer {
            within_budget.extend(apply(t));
        }
        seen.extend(layer.iter().cloned());
    }
    // then everything reachable, until no new truncation appears
    let mut i1 = within_budget.clone();
    let mut frontier: BTreeSet<TreeSubst> = layer;
    loop {
        let fresh: BTreeSet<TreeSubst> = grow(&frontier)?.into_iter().filter(|t| !seen.contains(t)).collect();
        if fresh.is_empty() {
            break;
        }
        len += 1;
        if len > MAX_WORD {
            return Err(HarnessError::UnsupportedShape("instantiations do not saturate".into()));
        }
        for t in &fresh {
            i1.extend(apply(t));
        }
        seen.extend(fresh.iter().cloned());
        frontier = fresh;
    }
    let side = shape
        .hypotheses
        .iter()
        .map(|a| Ok(substitute_all(&tree_of(a, depth)?, &th0).truncate(depth)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let head = substitute_all(&tree_of(&shape.conclusion, depth)?, &th0).truncate(depth);
    Ok(Candidate {
        i1,
        within_budget,
        side,
        head,
        states: seen.len(),
        saturated_at: len,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct HarnessConfig {
    pub depth: usize,
    pub word_budget: usize,
    /// Closed terms tried per eigenvariable.
    pub bases_per_var: usize,
    pub fixbeta_bound: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            depth: 4,
            word_budget: 3,
            bases_per_var: 3,
            fixbeta_bound: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BaseReport {
    pub base: TreeSubst,
    /// Set when a hypothesis instance is outside the model, so the base does
    /// not meet the premise of the construction.
    pub skipped: Option<Tree>,
    pub candidate_size: usize,
    pub states: usize,
    pub saturated_at: usize,
    pub postfixed: bool,
    pub counterexamples: Vec<Tree>,
    pub head: Tree,
    pub head_membership: Option<Membership>,
}

#[derive(Clone, Debug)]
pub struct HarnessReport {
    pub uses: usize,
    pub deltas: Vec<String>,
    pub depth: usize,
    pub word_budget: usize,
    pub bases: Vec<BaseReport>,
}

impl HarnessReport {
    pub fn ok(&self) -> bool {
        let tested: Vec<&BaseReport> = self.bases.iter().filter(|b| b.skipped.is_none()).collect();
        !tested.is_empty()
            && tested
                .iter()
                .all(|b| b.postfixed && b.head_membership == Some(Membership::InApprox))
    }
}

impl fmt::Display for HarnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coinductive hypothesis used {} time(s)", self.uses)?;
        for d in &self.deltas {
            writeln!(f, "  {d}")?;
        }
        writeln!(f, "depth {}, word budget {}", self.depth, self.word_budget)?;
        for b in &self.bases {
            let base: Vec<String> = b.base.iter().map(|(c, t)| format!("{c} := {t}")).collect();
            write!(f, "  base [{}]: ", base.join(", "))?;
            if let Some(t) = &b.skipped {
                writeln!(f, "skipped, hypothesis instance {t} is not in the model")?;
                continue;
            }
            writeln!(
                f,
                "{} atoms, {} instantiations, closed at word length {}, post-fixed {}, head {} {}",
                b.candidate_size,
                b.states,
                b.saturated_at,
                if b.postfixed { "yes" } else { "NO" },
                b.head,
                match b.head_membership {
                    Some(Membership::InApprox) => "in model",
                    Some(Membership::CertainlyOut) => "NOT in model",
                    None => "unknown",
                }
            )?;
            for c in &b.counterexamples {
                writeln!(f, "    unsupported: {c}")?;
            }
        }
        Ok(())
    }
}

/// Closed trees to use for eigenvariables: the smallest closed terms first.
pub fn sample_bases(sem: &Semantics, eigen: &[(Name, Type)], per_var: usize) -> Vec<TreeSubst> {
    let mut pool: Vec<Tree> = Vec::new();
    for k in 1..=3 {
        for t in sem.universe(k) {
            if !t.contains_star() && !pool.contains(&t) {
                pool.push(t);
            }
        }
        if pool.len() >= per_var {
            break;
        }
    }
    pool.truncate(per_var.max(1));
    let mut out = vec![TreeSubst::new()];
    for (c, _) in eigen {
        let mut next = Vec::new();
        for s in &out {
            for t in &pool {
                let mut s2 = s.clone();
                s2.insert(c.clone(), t.clone());
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

/// Runs the construction for each sampled base and verifies `I1 ∪ I2 ⊆ T(I1 ∪ I2)`.
/// `I2` is the union of post-fixed points found by coinductive resolution for the
/// hypothesis instances.
pub fn run_harness(proof: &ProofNode, program: &Program, calculus: Calculus, cfg: &HarnessConfig) -> Result<HarnessReport, HarnessError> {
    let shape = analyse(proof, program, calculus, cfg.fixbeta_bound)?;
    let sem = Semantics::new(program, ModelConfig::new(cfg.depth))?;
    let gfp = if sem.top_size() <= ModelConfig::new(cfg.depth).atom_limit as u128 {
        Some(sem.gfp()?)
    } else {
        None
    };
    let extended = program.with_constants(&shape.eigen);
    let deltas = shape
        .deltas
        .iter()
        .map(|d| {
            let bs: Vec<String> = d
                .bindings
                .iter()
                .map(|(x, t)| format!("{x} := {}", pretty_term(t, &extended)))
                .collect();
            format!("δ{} = [{}]", d.index, bs.join(", "))
        })
        .collect();
    let mut bases = Vec::new();
    for base in sample_bases(&sem, &shape.eigen, cfg.bases_per_var) {
        let cand = build_candidate(&shape, &base, cfg.depth, cfg.word_budget)?;
        let mut i = cand.i1.clone();
        let mut skipped = None;
        for a in &cand.side {
            match sem.query(a)? {
                Some(support) => i.extend(support),
                None => {
                    skipped = Some(a.clone());
                    break;
                }
            }
        }
        if skipped.is_some() {
            bases.push(BaseReport {
                base,
                skipped,
                candidate_size: 0,
                states: cand.states,
                saturated_at: cand.saturated_at,
                postfixed: false,
                counterexamples: Vec::new(),
                head: cand.head,
                head_membership: None,
            });
            continue;
        }
        let counterexamples = sem.unsupported(&i);
        let head_membership = Some(match &gfp {
            Some(g) => {
                if g.contains(&cand.head) {
                    Membership::InApprox
                } else {
                    Membership::CertainlyOut
                }
            }
            None => sem.member_tree(&cand.head)?,
        });
        bases.push(BaseReport {
            base,
            skipped: None,
            candidate_size: i.len(),
            states: cand.states,
            saturated_at: cand.saturated_at,
            postfixed: counterexamples.is_empty(),
            counterexamples,
            head: cand.head,
            head_membership,
        });
    }
    Ok(HarnessReport {
        uses: shape.deltas.len(),
        deltas,
        depth: cfg.depth,
        word_budget: cfg.word_budget,
        bases,
    })
}

#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub depth: usize,
    pub equal: bool,
    pub only_in_extended: Vec<Tree>,
    pub only_in_original: Vec<Tree>,
}

/// Compares the truncated models of `program` and `program ∪ instances`. Every
/// body atom of every instance must already be in the model of `program`.
pub fn conservative_extension_check(program: &Program, instances: &[HClause], depth: usize) -> Result<ExtensionReport, HarnessError> {
    let cfg = ModelConfig::new(depth);
    let base = Semantics::new(program, cfg)?;
    let m = base.gfp()?;
    for h in instances {
        if !h.universals.is_empty() {
            return Err(HarnessError::UnsupportedShape("lemma instances must be ground".into()));
        }
        for b in &h.body {
            if !m.contains(&tree_of(b, depth)?) {
                return Err(HarnessError::BodyNotInModel(pretty_term(b, program)));
            }
        }
    }
    let mut clauses = Vec::new();
    for f in program.formulas() {
        clauses.extend(to_h_clauses(f).map_err(|e| HarnessError::Model(ModelError::NotFirstOrder(e.to_string())))?);
    }
    clauses.extend(instances.iter().cloned());
    let ext = Semantics::from_clauses(&program.signature, &clauses, cfg)?;
    let m2 = ext.gfp()?;
    Ok(ExtensionReport {
        depth,
        equal: m == m2,
        only_in_extended: m2.difference(&m).cloned().collect(),
        only_in_original: m.difference(&m2).cloned().collect(),
    })
}

/// Instances of a lemma `∀x̄ H` at the given closed terms, one per tuple.
pub fn lemma_instances(lemma: &Formula, tuples: &[Vec<Term>]) -> Result<Vec<HClause>, HarnessError> {
    let h = HClause::from_formula(lemma).ok_or(HarnessError::NotHShapedRoot)?;
    tuples
        .iter()
        .map(|ts| {
            if ts.len() != h.universals.len() {
                return Err(HarnessError::UnsupportedShape("wrong number of instance terms".into()));
            }
            let s = crate::term::Substitution(h.universals.iter().map(|(x, _)| x.clone()).zip(ts.iter().cloned()).collect());
            Ok(h.apply(&s))
        })
        .collect()
}
