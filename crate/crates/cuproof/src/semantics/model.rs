//! Truncated coinductive Herbrand semantics of first-order programs.
//!
//! Everything is computed at a fixed resolution `d`: atoms are compared up to
//! depth `d` and atom trees are truncated there. `Top` is the set of all closed
//! truncated atoms, `T` the immediate-consequence operator, and the greatest
//! fixed point is reached by iterating `T` downward from `Top`. Universes that are
//! too large for the global iteration are handled by a demand-driven coinductive
//! resolution that succeeds when a goal unifies with one of its ancestors.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use super::tree::{default_unfold_limit, guarded_atom_to_tree, term_to_tree, unfold_to_depth, Symbol, Tree, TreeError};
use crate::formula::{to_h_clauses, HClause};
use crate::program::Program;
use crate::syntax::parser::{parse_raw_tree, raw_tree_view, RawNode};
use crate::syntax::ParseError;
use crate::term::{name, Context, Name, Signature, Term};

pub type Interpretation = BTreeSet<Tree>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("the truncated universe has {atoms} atoms, more than the limit of {limit}")]
    UniverseTooLarge { atoms: u128, limit: usize },
    #[error("coinductive resolution ran out of budget")]
    BudgetExhausted,
    #[error("clause is outside the first-order fragment: {0}")]
    NotFirstOrder(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("bad interpretation line {line}: {message}")]
    BadListing { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The truncated atom belongs to the truncated greatest fixed point.
    InApprox,
    /// No atom of the model agrees with it up to the resolution, so the full atom
    /// is not in the model either.
    CertainlyOut,
}

#[derive(Clone, Copy, Debug)]
pub struct ModelConfig {
    pub depth: usize,
    /// Largest `Top` the global iteration will enumerate.
    pub atom_limit: usize,
    /// Resolution steps per coinductive query.
    pub step_budget: u64,
}

impl ModelConfig {
    pub fn new(depth: usize) -> ModelConfig {
        ModelConfig {
            depth,
            atom_limit: 200_000,
            step_budget: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Pat {
    Var(usize),
    Star,
    Node(Name, Vec<Pat>),
}

fn pat_of_tree(t: &Tree, vars: &mut Vec<Name>) -> Pat {
    match &t.sym {
        Symbol::Star => Pat::Star,
        Symbol::Var(x) => {
            let k = vars.iter().position(|v| v == x).unwrap_or_else(|| {
                vars.push(x.clone());
                vars.len() - 1
            });
            Pat::Var(k)
        }
        Symbol::Fun(f) => Pat::Node(f.clone(), t.kids.iter().map(|k| pat_of_tree(k, vars)).collect()),
    }
}

/// A clause compiled at one resolution: atoms with fix terms are unfolded until
/// every fix occurrence lies at depth `d` or deeper and then cut there.
#[derive(Clone, Debug)]
struct Template {
    nvars: usize,
    pred: Name,
    head: Pat,
    body: Vec<Pat>,
}

#[derive(Clone, Debug)]
enum Cell {
    Ref(Option<u32>),
    Node(Name, Vec<u32>),
}

/// Rational-tree store: no occurs check, so bindings may be cyclic. Every
/// traversal is depth-bounded, which keeps cycles harmless.
#[derive(Default)]
struct Heap {
    cells: Vec<Cell>,
    trail: Vec<u32>,
}

impl Heap {
    fn var(&mut self) -> u32 {
        self.cells.push(Cell::Ref(None));
        (self.cells.len() - 1) as u32
    }

    fn node(&mut self, f: Name, kids: Vec<u32>) -> u32 {
        self.cells.push(Cell::Node(f, kids));
        (self.cells.len() - 1) as u32
    }

    fn deref(&self, mut i: u32) -> u32 {
        while let Cell::Ref(Some(j)) = self.cells[i as usize] {
            i = j;
        }
        i
    }

    fn mark(&self) -> (usize, usize) {
        (self.cells.len(), self.trail.len())
    }

    fn undo(&mut self, (cells, trail): (usize, usize)) {
        while self.trail.len() > trail {
            let v = self.trail.pop().unwrap();
            self.cells[v as usize] = Cell::Ref(None);
        }
        self.cells.truncate(cells);
    }

    fn bind(&mut self, v: u32, t: u32) {
        self.cells[v as usize] = Cell::Ref(Some(t));
        self.trail.push(v);
    }

    fn inst(&mut self, p: &Pat, vars: &mut [Option<u32>]) -> u32 {
        match p {
            Pat::Star => self.var(),
            Pat::Var(k) => match vars[*k] {
                Some(v) => v,
                None => {
                    let v = self.var();
                    vars[*k] = Some(v);
                    v
                }
            },
            Pat::Node(f, kids) => {
                let ks = kids.iter().map(|k| self.inst(k, vars)).collect();
                self.node(f.clone(), ks)
            }
        }
    }

    fn from_tree(&mut self, t: &Tree, vars: &mut HashMap<Name, u32>) -> u32 {
        match &t.sym {
            Symbol::Star => self.var(),
            Symbol::Var(x) => {
                if let Some(&v) = vars.get(x) {
                    return v;
                }
                let v = self.var();
                vars.insert(x.clone(), v);
                v
            }
            Symbol::Fun(f) => {
                let ks = t.kids.iter().map(|k| self.from_tree(k, vars)).collect();
                self.node(f.clone(), ks)
            }
        }
    }

    /// Copy of `t` down to depth `k`; below that, fresh variables. Unbound
    /// variables are shared rather than copied.
    fn copy_cut(&mut self, t: u32, k: usize) -> u32 {
        if k == 0 {
            return self.var();
        }
        let t = self.deref(t);
        match self.cells[t as usize].clone() {
            Cell::Ref(_) => t,
            Cell::Node(f, kids) => {
                let ks = kids.into_iter().map(|c| self.copy_cut(c, k - 1)).collect();
                self.node(f, ks)
            }
        }
    }

    /// Unification up to depth `k`: positions at depth `k` and below are ignored.
    fn unify(&mut self, a: u32, b: u32, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        let a = self.deref(a);
        let b = self.deref(b);
        if a == b {
            return true;
        }
        match (self.cells[a as usize].clone(), self.cells[b as usize].clone()) {
            (Cell::Ref(_), _) => {
                let c = self.copy_cut(b, k);
                if self.deref(c) != a {
                    self.bind(a, c);
                }
                true
            }
            (_, Cell::Ref(_)) => {
                let c = self.copy_cut(a, k);
                if self.deref(c) != b {
                    self.bind(b, c);
                }
                true
            }
            (Cell::Node(f, xs), Cell::Node(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(&x, &y)| self.unify(x, y, k - 1))
            }
        }
    }

    /// Tree view down to depth `k`; unbound variables become `⋆`, or are filled
    /// from `ground` when given.
    fn to_tree(&self, t: u32, k: usize, ground: Option<&Tree>) -> Tree {
        if k == 0 {
            return Tree::star();
        }
        let t = self.deref(t);
        match &self.cells[t as usize] {
            Cell::Ref(_) => match ground {
                Some(g) => g.truncate(k),
                None => Tree::star(),
            },
            Cell::Node(f, kids) => Tree {
                sym: Symbol::Fun(f.clone()),
                kids: kids.iter().map(|&c| self.to_tree(c, k - 1, ground)).collect(),
            },
        }
    }

    /// Depth of the shallowest unbound variable, if above `k`.
    fn open_depth(&self, t: u32, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        let t = self.deref(t);
        match &self.cells[t as usize] {
            Cell::Ref(_) => 0,
            Cell::Node(_, kids) => 1 + kids.iter().map(|&c| self.open_depth(c, k - 1)).min().unwrap_or(k - 1),
        }
    }
}

/// Atoms of an interpretation grouped, on demand, by their arguments cut at
/// per-argument depths.
pub struct Index<'a> {
    atoms: Vec<&'a Tree>,
    buckets: RefCell<HashMap<Vec<usize>, HashMap<Tree, Vec<usize>>>>,
}

impl<'a> Index<'a> {
    pub fn new(i: impl IntoIterator<Item = &'a Tree>) -> Index<'a> {
        Index {
            atoms: i.into_iter().collect(),
            buckets: RefCell::new(HashMap::new()),
        }
    }

    /// The atom with argument `j` cut at depth `cuts[j]`.
    fn key(atom: &Tree, cuts: &[usize]) -> Option<Tree> {
        if atom.kids.len() != cuts.len() {
            return None;
        }
        Some(Tree {
            sym: atom.sym.clone(),
            kids: atom.kids.iter().zip(cuts).map(|(t, &k)| t.truncate(k)).collect(),
        })
    }

    fn lookup(&self, cuts: &[usize], key: &Tree) -> Vec<&'a Tree> {
        let mut b = self.buckets.borrow_mut();
        let level = b.entry(cuts.to_vec()).or_insert_with(|| {
            let mut m: HashMap<Tree, Vec<usize>> = HashMap::new();
            for (n, a) in self.atoms.iter().enumerate() {
                if let Some(key) = Index::key(a, cuts) {
                    m.entry(key).or_default().push(n);
                }
            }
            m
        });
        level
            .get(key)
            .map(|ns| ns.iter().map(|&n| self.atoms[n]).collect())
            .unwrap_or_default()
    }
}

/// A first-order program compiled at one resolution.
pub struct Semantics {
    depth: usize,
    templates: Vec<Template>,
    functions: Vec<(Name, usize)>,
    predicates: Vec<(Name, usize)>,
    default_ground: Tree,
    cfg: ModelConfig,
}

impl Semantics {
    pub fn new(program: &Program, cfg: ModelConfig) -> Result<Semantics, ModelError> {
        let mut hs = Vec::new();
        for f in program.formulas() {
            hs.extend(to_h_clauses(f).map_err(|e| ModelError::NotFirstOrder(e.to_string()))?);
        }
        Semantics::from_clauses(&program.signature, &hs, cfg)
    }

    pub fn from_clauses(sig: &Signature, clauses: &[HClause], cfg: ModelConfig) -> Result<Semantics, ModelError> {
        let d = cfg.depth.max(1);
        let mut templates = Vec::new();
        for h in clauses {
            if h.universals.iter().any(|(_, t)| !t.is_iota()) {
                return Err(ModelError::NotFirstOrder("quantified variable of non-individual type".into()));
            }
            let ctx = h.context();
            let mut vars = Vec::new();
            let head = pat_of_tree(&atom_tree(sig, &ctx, &h.head, d)?, &mut vars);
            let body = h
                .body
                .iter()
                .map(|b| Ok(pat_of_tree(&atom_tree(sig, &ctx, b, d)?, &mut vars)))
                .collect::<Result<Vec<_>, ModelError>>()?;
            let Pat::Node(pred, _) = &head else {
                return Err(ModelError::NotFirstOrder("clause head is not an atom".into()));
            };
            templates.push(Template {
                nvars: vars.len(),
                pred: pred.clone(),
                head,
                body,
            });
        }
        let functions = sig.function_symbols();
        let predicates: Vec<(Name, usize)> = sig
            .predicates()
            .into_iter()
            .filter(|(p, _)| sig.is_first_order_predicate(p))
            .collect();
        Ok(Semantics {
            depth: d,
            templates,
            default_ground: default_ground(&functions, d),
            functions,
            predicates,
            cfg: ModelConfig { depth: d, ..cfg },
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Closed truncated trees of the universe with positions shorter than `k`.
    pub fn universe(&self, k: usize) -> Vec<Tree> {
        let mut level = vec![Tree::star()];
        for _ in 0..k {
            let mut next = Vec::new();
            for (f, n) in &self.functions {
                for args in product(&level, *n) {
                    next.push(Tree {
                        sym: Symbol::Fun(f.clone()),
                        kids: args,
                    });
                }
            }
            level = next;
        }
        level
    }

    /// `|Top|` at this resolution, saturating.
    pub fn top_size(&self) -> u128 {
        let mut level: u128 = 1;
        for _ in 0..self.depth - 1 {
            level = self
                .functions
                .iter()
                .map(|(_, n)| level.saturating_pow(*n as u32))
                .fold(0u128, |a, b| a.saturating_add(b));
        }
        self.predicates
            .iter()
            .map(|(_, n)| level.saturating_pow(*n as u32))
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    /// All closed atoms truncated at the resolution.
    pub fn top(&self) -> Result<Interpretation, ModelError> {
        let size = self.top_size();
        if size > self.cfg.atom_limit as u128 {
            return Err(ModelError::UniverseTooLarge {
                atoms: size,
                limit: self.cfg.atom_limit,
            });
        }
        let args = self.universe(self.depth - 1);
        let mut out = Interpretation::new();
        for (p, n) in &self.predicates {
            for a in product(&args, *n) {
                out.insert(Tree {
                    sym: Symbol::Fun(p.clone()),
                    kids: a,
                });
            }
        }
        Ok(out)
    }

    /// Whether the truncated atom `y` is produced by some clause instance whose
    /// body atoms all lie in the interpretation.
    pub fn supported(&self, y: &Tree, i: &Index) -> bool {
        self.support_of(y, i).is_some()
    }

    /// The body atoms of some clause instance producing `y`, when there is one.
    fn support_of<'i>(&self, y: &Tree, i: &Index<'i>) -> Option<Vec<&'i Tree>> {
        let p = y.fun_name()?;
        for t in self.templates.iter().filter(|t| &t.pred == p) {
            let mut heap = Heap::default();
            let mut vars = vec![None; t.nvars];
            let head = heap.inst(&t.head, &mut vars);
            let yid = heap.from_tree(y, &mut HashMap::new());
            if !heap.unify(head, yid, self.depth) {
                continue;
            }
            let body: Vec<u32> = t.body.iter().map(|b| heap.inst(b, &mut vars)).collect();
            let mut used = Vec::with_capacity(body.len());
            if self.solve_bodies(&mut heap, &body, i, &mut used) {
                return Some(used);
            }
        }
        None
    }

    fn solve_bodies<'i>(&self, heap: &mut Heap, body: &[u32], i: &Index<'i>, used: &mut Vec<&'i Tree>) -> bool {
        let Some((&b, rest)) = body.split_first() else {
            return true;
        };
        // Each argument is cut just above its shallowest unbound variable.
        let cuts: Vec<usize> = match &heap.cells[heap.deref(b) as usize] {
            Cell::Node(_, kids) => kids.iter().map(|&c| heap.open_depth(c, self.depth - 1)).collect(),
            Cell::Ref(_) => return false,
        };
        let Some(key) = Index::key(&heap.to_tree(b, self.depth, None), &cuts) else {
            return false;
        };
        for m in i.lookup(&cuts, &key) {
            let mark = heap.mark();
            let mid = heap.from_tree(m, &mut HashMap::new());
            used.push(m);
            if heap.unify(b, mid, self.depth) && self.solve_bodies(heap, rest, i, used) {
                return true;
            }
            used.pop();
            heap.undo(mark);
        }
        false
    }

    /// One application of the immediate-consequence operator, restricted to `Top`.
    pub fn t_operator(&self, i: &Interpretation) -> Result<Interpretation, ModelError> {
        let idx = Index::new(i.iter());
        Ok(self.top()?.into_iter().filter(|y| self.supported(y, &idx)).collect())
    }

    /// Greatest fixed point by downward iteration from `Top`. Each atom keeps
    /// the body atoms that last supported it; only atoms whose witnesses were
    /// removed are checked again.
    pub fn gfp(&self) -> Result<Interpretation, ModelError> {
        let top: Vec<Tree> = self.top()?.into_iter().collect();
        let id: HashMap<&Tree, usize> = top.iter().enumerate().map(|(n, t)| (t, n)).collect();
        let mut alive = vec![true; top.len()];
        let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); top.len()];
        let mut dirty: Vec<usize> = (0..top.len()).collect();
        while !dirty.is_empty() {
            let idx = Index::new(top.iter().zip(&alive).filter(|(_, &a)| a).map(|(t, _)| t));
            let mut removed = Vec::new();
            for &n in &dirty {
                if !alive[n] {
                    continue;
                }
                match self.support_of(&top[n], &idx) {
                    Some(w) => w.into_iter().for_each(|b| dependents[id[b]].push(n)),
                    None => removed.push(n),
                }
            }
            for &n in &removed {
                alive[n] = false;
            }
            let mut next: Vec<usize> = removed.iter().flat_map(|&n| std::mem::take(&mut dependents[n])).filter(|&m| alive[m]).collect();
            next.sort_unstable();
            next.dedup();
            dirty = next;
        }
        Ok(top.into_iter().zip(alive).filter(|(_, a)| *a).map(|(t, _)| t).collect())
    }

    /// Atoms of `i` that are not supported by `i`; empty when `i ⊆ T(i)`.
    pub fn unsupported(&self, i: &Interpretation) -> Vec<Tree> {
        let idx = Index::new(i.iter());
        i.iter().filter(|y| !self.supported(y, &idx)).cloned().collect()
    }

    pub fn verify_postfixed(&self, i: &Interpretation) -> Result<(), Vec<Tree>> {
        let bad = self.unsupported(i);
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    /// Coinductive resolution of a (possibly open) truncated atom: `⋆` and
    /// variables are unknowns. On success returns a post-fixed set of closed
    /// truncated atoms containing an instance of the query.
    pub fn query(&self, pattern: &Tree) -> Result<Option<Interpretation>, ModelError> {
        let mut heap = Heap::default();
        let g = heap.from_tree(pattern, &mut HashMap::new());
        let mut run = Colp {
            sem: self,
            heap,
            steps: 0,
            proved: Vec::new(),
        };
        let ok = run.solve(&[(g, None)], 0)?;
        if !ok {
            return Ok(None);
        }
        let support = run
            .proved
            .iter()
            .map(|&a| run.heap.to_tree(a, self.depth, Some(&self.default_ground)))
            .collect();
        Ok(Some(support))
    }

    /// Membership of a closed guarded atom in the model at this resolution.
    pub fn member(&self, sig: &Signature, a: &Term) -> Result<Membership, ModelError> {
        let t = guarded_atom_to_tree(sig, &Context::new(), a, self.depth, default_unfold_limit(self.depth))?;
        self.member_tree(&t)
    }

    pub fn member_tree(&self, t: &Tree) -> Result<Membership, ModelError> {
        Ok(match self.query(&t.truncate(self.depth))? {
            Some(_) => Membership::InApprox,
            None => Membership::CertainlyOut,
        })
    }
}

struct Anc {
    id: u32,
    up: Option<Rc<Anc>>,
}

type Goal = (u32, Option<Rc<Anc>>);

/// Longest chain of nested resolution steps before a query gives up.
const MAX_CHAIN: usize = 2_000;

struct Colp<'a> {
    sem: &'a Semantics,
    heap: Heap,
    steps: u64,
    proved: Vec<u32>,
}

impl Colp<'_> {
    /// Whether some ancestor or clause head unifies with the goal at all.
    fn viable(&mut self, g: u32, anc: &Option<Rc<Anc>>) -> bool {
        let d = self.sem.depth;
        let mut a = anc.clone();
        while let Some(n) = a {
            let mark = self.heap.mark();
            let ok = self.heap.unify(g, n.id, d);
            self.heap.undo(mark);
            if ok {
                return true;
            }
            a = n.up.clone();
        }
        let pred = match &self.heap.cells[self.heap.deref(g) as usize] {
            Cell::Node(p, _) => p.clone(),
            Cell::Ref(_) => return true,
        };
        for t in self.sem.templates.iter().filter(|t| t.pred == pred) {
            let mark = self.heap.mark();
            let mut vars = vec![None; t.nvars];
            let head = self.heap.inst(&t.head, &mut vars);
            let ok = self.heap.unify(head, g, d);
            self.heap.undo(mark);
            if ok {
                return true;
            }
        }
        false
    }

    fn solve(&mut self, goals: &[Goal], chain: usize) -> Result<bool, ModelError> {
        self.steps += 1;
        if self.steps > self.sem.cfg.step_budget || chain > MAX_CHAIN {
            return Err(ModelError::BudgetExhausted);
        }
        let d = self.sem.depth;
        // Closed goals bind nothing, so they can go first; failing ones then
        // prune before any open goal is expanded.
        let reordered: Vec<Goal>;
        let goals = match goals.iter().position(|(g, _)| self.heap.open_depth(*g, d) >= d) {
            Some(k) if k > 0 => {
                let mut v = goals.to_vec();
                let closed = v.remove(k);
                v.insert(0, closed);
                reordered = v;
                &reordered[..]
            }
            _ => goals,
        };
        if !goals.iter().all(|(g, anc)| self.viable(*g, anc)) {
            return Ok(false);
        }
        let Some(((g, anc), rest)) = goals.split_first() else {
            return Ok(true);
        };
        // A goal closed above the cut binds nothing however it is proven, so an
        // identical ancestor settles it and the clauses need not be tried again.
        if self.heap.open_depth(*g, d) >= d {
            let key = self.heap.to_tree(*g, d, None);
            let mut a = anc.clone();
            while let Some(n) = a {
                if self.heap.open_depth(n.id, d) >= d && self.heap.to_tree(n.id, d, None) == key {
                    self.proved.push(*g);
                    if self.solve(rest, chain + 1)? {
                        return Ok(true);
                    }
                    self.proved.pop();
                    return Ok(false);
                }
                a = n.up.clone();
            }
        }
        let mut a = anc.clone();
        while let Some(n) = a {
            let mark = self.heap.mark();
            if self.heap.unify(*g, n.id, d) {
                self.proved.push(*g);
                if self.solve(rest, chain + 1)? {
                    return Ok(true);
                }
                self.proved.pop();
            }
            self.heap.undo(mark);
            a = n.up.clone();
        }
        let pred = match &self.heap.cells[self.heap.deref(*g) as usize] {
            Cell::Node(p, _) => p.clone(),
            Cell::Ref(_) => return Ok(false),
        };
        for t in self.sem.templates.iter().filter(|t| t.pred == pred) {
            let mark = self.heap.mark();
            let mut vars = vec![None; t.nvars];
            let head = self.heap.inst(&t.head, &mut vars);
            if self.heap.unify(head, *g, d) {
                let up = Some(Rc::new(Anc {
                    id: *g,
                    up: anc.clone(),
                }));
                let mut next: Vec<Goal> = t.body.iter().map(|b| (self.heap.inst(b, &mut vars), up.clone())).collect();
                next.extend(rest.iter().cloned());
                self.proved.push(*g);
                if self.solve(&next, chain + 1)? {
                    return Ok(true);
                }
                self.proved.pop();
            }
            self.heap.undo(mark);
        }
        Ok(false)
    }
}

fn atom_tree(sig: &Signature, ctx: &Context, a: &Term, d: usize) -> Result<Tree, ModelError> {
    if a.contains_fix() {
        Ok(unfold_to_depth(a, d, default_unfold_limit(d))?)
    } else {
        let _ = (sig, ctx);
        Ok(term_to_tree(a)?)
    }
}

/// One infinite closed tree used to fill unconstrained positions: a constant if
/// there is one, otherwise the unary symbol repeated forever.
fn default_ground(functions: &[(Name, usize)], d: usize) -> Tree {
    if let Some((c, _)) = functions.iter().find(|(_, n)| *n == 0) {
        return Tree::leaf(c);
    }
    let Some((f, n)) = functions.iter().min_by_key(|(_, n)| *n) else {
        return Tree::star();
    };
    let mut t = Tree::star();
    for _ in 0..d {
        t = Tree {
            sym: Symbol::Fun(f.clone()),
            kids: vec![t; *n],
        };
    }
    t
}

fn product(items: &[Tree], n: usize) -> Vec<Vec<Tree>> {
    let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(acc.len() * items.len());
        for p in &acc {
            for it in items {
                let mut q = p.clone();
                q.push(it.clone());
                next.push(q);
            }
        }
        acc = next;
    }
    acc
}

/// Parses one truncated atom written in term syntax, `*` for a cut position.
pub fn parse_tree(src: &str) -> Result<Tree, ParseError> {
    fn conv(n: RawNode) -> Tree {
        match n {
            RawNode::Star => Tree::star(),
            RawNode::Node(f, kids) => Tree {
                sym: Symbol::Fun(name(&f)),
                kids: kids.into_iter().map(conv).collect(),
            },
        }
    }
    let rt = parse_raw_tree(src)?;
    Ok(conv(raw_tree_view(&rt)?))
}

/// Reads an interpretation listing: one truncated atom per line, `%` comments.
/// Symbols must be declared with matching arity.
pub fn parse_interpretation(text: &str, sig: &Signature) -> Result<Interpretation, ModelError> {
    let arity: HashMap<Name, usize> = sig
        .function_symbols()
        .into_iter()
        .chain(sig.predicates())
        .collect();
    fn check(t: &Tree, arity: &HashMap<Name, usize>, root: bool) -> Result<(), String> {
        match &t.sym {
            Symbol::Star if root => Err("an atom cannot be `*`".into()),
            Symbol::Star | Symbol::Var(_) => Ok(()),
            Symbol::Fun(f) => match arity.get(f) {
                Some(&n) if n == t.kids.len() => t.kids.iter().try_for_each(|k| check(k, arity, false)),
                Some(&n) => Err(format!("`{f}` expects {n} arguments, got {}", t.kids.len())),
                None => Err(format!("undeclared symbol `{f}`")),
            },
        }
    }
    let mut out = Interpretation::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| ModelError::BadListing { line: n + 1, message };
        let t = parse_tree(line).map_err(|e| bad(e.to_string()))?;
        check(&t, &arity, true).map_err(bad)?;
        out.insert(t);
    }
    Ok(out)
}

pub fn print_interpretation(i: &Interpretation) -> String {
    let mut s = String::new();
    for t in i {
        s.push_str(&t.to_string());
        s.push('\n');
    }
    s
}

/// Truncated atoms of `i` sorted by predicate name, for summaries.
pub fn by_predicate(i: &Interpretation) -> HashMap<Name, usize> {
    let mut m = HashMap::new();
    for t in i {
        if let Some(p) = t.fun_name() {
            *m.entry(p.clone()).or_insert(0) += 1;
        }
    }
    m
}

/// Atoms present in `a` but not in `b`, for diagnostics.
pub fn difference(a: &Interpretation, b: &Interpretation) -> Vec<Tree> {
    let bs: HashSet<&Tree> = b.iter().collect();
    a.iter().filter(|t| !bs.contains(t)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn sem(src: &str, d: usize) -> (Program, Semantics) {
        let p = parse_program(src).unwrap();
        let s = Semantics::new(&p, ModelConfig::new(d)).unwrap();
        (p, s)
    }

    const STREAM: &str = "
        const 0 1 : i. const scons : i -> i -> i.
        const bit stream : i -> o.
        bit 0. bit 1.
        forall x y. bit x /\\ stream y => stream (scons x y).
    ";

    #[test]
    fn gfp_of_streams_contains_every_truncated_stream() {
        let (_, s) = sem(STREAM, 4);
        let g = s.gfp().unwrap();
        let t = |x: &str| parse_tree(x).unwrap();
        assert!(g.contains(&t("stream [0|1|*|*]")));
        assert!(g.contains(&t("bit 0")));
        assert!(!g.contains(&t("stream 0")));
        assert!(!g.contains(&t("stream [scons 0 0|*|*]")));
        assert!(!g.contains(&t("stream [0|0|1]")));
        assert!(s.verify_postfixed(&g).is_ok());
        // the fixed point is reproduced by one more application
        assert_eq!(s.t_operator(&g).unwrap(), g);
    }

    #[test]
    fn coinductive_query_agrees_with_the_global_fixed_point() {
        let (_, s) = sem(STREAM, 4);
        let g = s.gfp().unwrap();
        for y in s.top().unwrap() {
            let lazy = s.query(&y).unwrap();
            assert_eq!(lazy.is_some(), g.contains(&y), "{y}");
            if let Some(sup) = lazy {
                assert!(s.verify_postfixed(&sup).is_ok(), "{y}");
                assert!(sup.contains(&y));
            }
        }
    }

    #[test]
    fn listing_round_trips() {
        let (p, s) = sem(STREAM, 3);
        let g = s.gfp().unwrap();
        let text = print_interpretation(&g);
        assert_eq!(parse_interpretation(&text, &p.signature).unwrap(), g);
        assert!(parse_interpretation("stream 0 0", &p.signature).is_err());
        assert!(parse_interpretation("*", &p.signature).is_err());
    }

    #[test]
    fn oversized_universe_is_reported() {
        let p = parse_program(STREAM).unwrap();
        let s = Semantics::new(
            &p,
            ModelConfig {
                atom_limit: 10,
                ..ModelConfig::new(4)
            },
        )
        .unwrap();
        assert!(matches!(s.top(), Err(ModelError::UniverseTooLarge { .. })));
    }
}
