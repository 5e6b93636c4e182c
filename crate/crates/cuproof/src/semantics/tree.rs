//! Finite and truncated trees over a ranked alphabet.
//!
//! A tree is stored as nested nodes; [`Tree::positions`] gives the equivalent
//! position-map view. Positions are 0-based child indices. `⋆` (`Symbol::Star`)
//! marks where a truncation cut the tree.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::guard::is_guarded_atom;
use crate::term::{fixbeta_unfold, Context, Name, Signature, Term, DIAMOND as DIAMOND_NAME};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    Fun(Name),
    Var(Name),
    Star,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Tree {
    pub sym: Symbol,
    pub kids: Vec<Tree>,
}

pub type Position = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("not a first-order term or atom")]
    NotFirstOrder,
    #[error("positions do not form a tree: {0}")]
    NotATreeLanguage(String),
    #[error("atom is not guarded: {0}")]
    NotGuarded(String),
    #[error("requested depth not reached within {0} unfoldings")]
    DepthUnreachable(usize),
}

impl Tree {
    pub fn star() -> Tree {
        Tree {
            sym: Symbol::Star,
            kids: Vec::new(),
        }
    }

    pub fn leaf(f: &str) -> Tree {
        Tree::node(f, Vec::new())
    }

    pub fn node(f: &str, kids: Vec<Tree>) -> Tree {
        Tree {
            sym: Symbol::Fun(crate::term::name(f)),
            kids,
        }
    }

    pub fn var(x: &str) -> Tree {
        Tree {
            sym: Symbol::Var(crate::term::name(x)),
            kids: Vec::new(),
        }
    }

    pub fn fun_name(&self) -> Option<&Name> {
        match &self.sym {
            Symbol::Fun(f) => Some(f),
            _ => None,
        }
    }

    pub fn get(&self, pos: &[usize]) -> Option<&Tree> {
        let mut t = self;
        for &k in pos {
            t = t.kids.get(k)?;
        }
        Some(t)
    }

    /// Length of the longest position.
    pub fn depth(&self) -> usize {
        self.kids.iter().map(|k| 1 + k.depth()).max().unwrap_or(0)
    }

    pub fn positions(&self) -> BTreeMap<Position, Symbol> {
        let mut out = BTreeMap::new();
        fn go(t: &Tree, pos: &mut Position, out: &mut BTreeMap<Position, Symbol>) {
            out.insert(pos.clone(), t.sym.clone());
            for (k, c) in t.kids.iter().enumerate() {
                pos.push(k);
                go(c, pos, out);
                pos.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Rebuilds a tree from its position map. The domain must be prefix-closed and
    /// sibling-closed.
    pub fn from_positions(map: &BTreeMap<Position, Symbol>) -> Result<Tree, TreeError> {
        fn build(pos: &mut Position, map: &BTreeMap<Position, Symbol>, used: &mut usize) -> Result<Tree, TreeError> {
            let sym = map
                .get(pos)
                .ok_or_else(|| TreeError::NotATreeLanguage(format!("missing position {pos:?}")))?
                .clone();
            *used += 1;
            let mut kids = Vec::new();
            let mut k = 0;
            loop {
                pos.push(k);
                let present = map.contains_key(pos);
                if present {
                    kids.push(build(pos, map, used)?);
                }
                pos.pop();
                if !present {
                    break;
                }
                k += 1;
            }
            Ok(Tree { sym, kids })
        }
        let mut used = 0;
        let t = build(&mut Vec::new(), map, &mut used)?;
        if used != map.len() {
            return Err(TreeError::NotATreeLanguage("domain is not prefix- and sibling-closed".into()));
        }
        Ok(t)
    }

    pub fn contains_star(&self) -> bool {
        self.sym == Symbol::Star || self.kids.iter().any(|k| k.contains_star())
    }

    pub fn contains_var(&self) -> bool {
        matches!(self.sym, Symbol::Var(_)) || self.kids.iter().any(|k| k.contains_var())
    }

    pub fn mentions(&self, f: &str) -> bool {
        matches!(&self.sym, Symbol::Fun(g) if &**g == f) || self.kids.iter().any(|k| k.mentions(f))
    }

    /// Keeps positions shorter than `n`; positions of length exactly `n` become `⋆`.
    pub fn truncate(&self, n: usize) -> Tree {
        if n == 0 {
            return Tree::star();
        }
        Tree {
            sym: self.sym.clone(),
            kids: self.kids.iter().map(|k| k.truncate(n - 1)).collect(),
        }
    }

    /// Depth of the shallowest node carrying symbol `f`.
    pub fn min_depth_of(&self, f: &str) -> Option<usize> {
        if matches!(&self.sym, Symbol::Fun(g) if &**g == f) {
            return Some(0);
        }
        self.kids.iter().filter_map(|k| k.min_depth_of(f).map(|d| d + 1)).min()
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<'a>(t: &'a Tree) -> Option<(Vec<&'a Tree>, &'a Tree)> {
            let mut items = Vec::new();
            let mut cur = t;
            while matches!(&cur.sym, Symbol::Fun(s) if &**s == "scons") && cur.kids.len() == 2 {
                items.push(&cur.kids[0]);
                cur = &cur.kids[1];
            }
            (!items.is_empty()).then_some((items, cur))
        }
        fn atomic(t: &Tree) -> bool {
            t.kids.is_empty() || list(t).is_some()
        }
        fn go(t: &Tree, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if let Some((items, tail)) = list(t) {
                f.write_str("[")?;
                for (k, it) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str("|")?;
                    }
                    go(it, f)?;
                }
                f.write_str("|")?;
                go(tail, f)?;
                return f.write_str("]");
            }
            match &t.sym {
                Symbol::Star => f.write_str("*")?,
                Symbol::Fun(s) | Symbol::Var(s) => f.write_str(s)?,
            }
            for k in &t.kids {
                f.write_str(" ")?;
                if atomic(k) {
                    go(k, f)?;
                } else {
                    f.write_str("(")?;
                    go(k, f)?;
                    f.write_str(")")?;
                }
            }
            Ok(())
        }
        go(self, f)
    }
}

/// `d(s, t) = 2^-γ` where `γ` is the least `n` with differing truncations at `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Distance {
    /// `None` for distance zero.
    pub gamma: Option<u32>,
}

impl Distance {
    pub fn zero() -> Distance {
        Distance { gamma: None }
    }

    pub fn value(self) -> f64 {
        match self.gamma {
            None => 0.0,
            Some(g) => 0.5f64.powi(g as i32),
        }
    }

    /// `self ≤ 2^-k`.
    pub fn at_most_pow2(self, k: u32) -> bool {
        match self.gamma {
            None => true,
            Some(g) => g >= k,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gamma {
            None => f.write_str("0"),
            Some(g) => write!(f, "2^-{g}"),
        }
    }
}

pub fn distance(a: &Tree, b: &Tree) -> Distance {
    // The first truncation to differ is one past the shallowest disagreement.
    fn first_diff(a: &Tree, b: &Tree) -> Option<u32> {
        if a.sym != b.sym || a.kids.len() != b.kids.len() {
            return Some(0);
        }
        a.kids
            .iter()
            .zip(&b.kids)
            .filter_map(|(x, y)| first_diff(x, y).map(|d| d + 1))
            .min()
    }
    Distance {
        gamma: first_diff(a, b).map(|d| d + 1),
    }
}

/// Replaces every leaf named `x` (a variable, or a constant standing for an
/// eigenvariable) by `s`.
pub fn substitute(t: &Tree, x: &str, s: &Tree) -> Tree {
    let hit = match &t.sym {
        Symbol::Var(v) | Symbol::Fun(v) => &**v == x && t.kids.is_empty(),
        Symbol::Star => false,
    };
    if hit {
        return s.clone();
    }
    Tree {
        sym: t.sym.clone(),
        kids: t.kids.iter().map(|k| substitute(k, x, s)).collect(),
    }
}

/// The tree of a first-order term or atom; variables become variable leaves.
pub fn term_to_tree(t: &Term) -> Result<Tree, TreeError> {
    let (h, args) = t.spine();
    match h {
        Term::Const(c) => Ok(Tree {
            sym: Symbol::Fun(c.clone()),
            kids: args.into_iter().map(term_to_tree).collect::<Result<_, _>>()?,
        }),
        Term::Var(x) if args.is_empty() => Ok(Tree {
            sym: Symbol::Var(x.clone()),
            kids: Vec::new(),
        }),
        _ => Err(TreeError::NotFirstOrder),
    }
}

/// The constructor skeleton: fix-headed subterms become `⋄` leaves.
fn skeleton(t: &Term) -> Result<Tree, TreeError> {
    let (h, args) = t.spine();
    match h {
        Term::Fix(_) => Ok(Tree::leaf(DIAMOND_NAME)),
        Term::Const(c) => Ok(Tree {
            sym: Symbol::Fun(c.clone()),
            kids: args.into_iter().map(skeleton).collect::<Result<_, _>>()?,
        }),
        Term::Var(x) if args.is_empty() => Ok(Tree {
            sym: Symbol::Var(x.clone()),
            kids: Vec::new(),
        }),
        _ => Err(TreeError::NotGuarded("subterm is neither a constructor application nor a fix term".into())),
    }
}

/// Default unfolding allowance for [`guarded_atom_to_tree`].
pub fn default_unfold_limit(depth: usize) -> usize {
    64 * (depth + 1)
}

/// The tree of a guarded atom truncated at `depth`: fair fix-β unfolding is
/// repeated until every remaining fix occurrence sits at depth `depth` or deeper.
pub fn guarded_atom_to_tree(
    sig: &Signature,
    ctx: &Context,
    a: &Term,
    depth: usize,
    max_unfold: usize,
) -> Result<Tree, TreeError> {
    if !a.contains_fix() {
        return Ok(term_to_tree(a)?.truncate(depth));
    }
    match is_guarded_atom(sig, ctx, a, 8) {
        Ok(true) => {}
        Ok(false) => return Err(TreeError::NotGuarded(a.to_string())),
        Err(e) => return Err(TreeError::NotGuarded(e.to_string())),
    }
    unfold_to_depth(a, depth, max_unfold)
}

/// As [`guarded_atom_to_tree`] without the up-front guardedness test.
pub fn unfold_to_depth(a: &Term, depth: usize, max_unfold: usize) -> Result<Tree, TreeError> {
    let mut cur = a.clone();
    for _ in 0..=max_unfold {
        let sk = skeleton(&cur)?;
        match sk.min_depth_of(DIAMOND_NAME) {
            Some(d) if d < depth => {}
            _ => return Ok(sk.truncate(depth)),
        }
        cur = fixbeta_unfold(&cur).map_err(|e| TreeError::NotGuarded(e.to_string()))?;
    }
    Err(TreeError::DepthUnreachable(max_unfold))
}
