//! Stallings folding for finitely generated subgroups of free groups.
//!
//! A folded graph is a deterministic and co-deterministic labeled digraph with
//! a base state; it answers membership queries by path tracing, gives the
//! subgroup rank as its first Betti number, and (through a spanning tree plus
//! a Nielsen change of basis) expresses members in the original generators
//! whenever those form a basis of their span.

use crate::words::{Endomorphism, Letter, Word};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FoldError {
    #[error("preimage requested for non-member word {0:?}")]
    NotAMember(String),
    #[error("generators are not a basis of their span (rank {rank} < {count} generators)")]
    NotABasis { rank: usize, count: usize },
}

/// Folded core graph of the subgroup generated by a list of words.
#[derive(Debug, Clone)]
pub struct FoldedGraph {
    rank_alphabet: usize,
    base: usize,
    /// `out[state][letter-1]` is the target of the edge labeled `letter`.
    out: Vec<Vec<Option<usize>>>,
    /// `inc[state][letter-1]` is the source of the edge labeled `letter`.
    inc: Vec<Vec<Option<usize>>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> usize {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[rb] = ra;
        }
        ra
    }
}

impl FoldedGraph {
    /// Builds the folded graph for the subgroup generated by `gens` inside the
    /// free group on `rank_alphabet` letters.
    pub fn fold(gens: &[Word], rank_alphabet: usize) -> FoldedGraph {
        // Wedge of subdivided loops at the base vertex.
        let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
        let mut n_vertices = 1usize;
        for g in gens {
            let mut prev = 0usize;
            let len = g.len();
            for (i, &l) in g.letters().iter().enumerate() {
                let next = if i + 1 == len { 0 } else { n_vertices };
                if i + 1 != len {
                    n_vertices += 1;
                }
                if l > 0 {
                    edges.push((prev, l, next));
                } else {
                    edges.push((next, -l, prev));
                }
                prev = next;
            }
        }

        let mut uf = UnionFind::new(n_vertices);
        // Repeatedly merge same-label edges at a common endpoint.
        loop {
            let mut changed = false;
            let mut out_seen: HashMap<(usize, Letter), usize> = HashMap::new();
            let mut in_seen: HashMap<(usize, Letter), usize> = HashMap::new();
            for &(s, l, t) in &edges {
                let (rs, rt) = (uf.find(s), uf.find(t));
                if let Some(&other) = out_seen.get(&(rs, l)) {
                    if uf.find(other) != rt {
                        uf.union(other, rt);
                        changed = true;
                    }
                } else {
                    out_seen.insert((rs, l), rt);
                }
                let (rs, rt) = (uf.find(s), uf.find(t));
                if let Some(&other) = in_seen.get(&(rt, l)) {
                    if uf.find(other) != rs {
                        uf.union(other, rs);
                        changed = true;
                    }
                } else {
                    in_seen.insert((rt, l), rs);
                }
            }
            if !changed {
                break;
            }
        }

        // Renumber classes and install the (now deterministic) edges.
        let mut repr: HashMap<usize, usize> = HashMap::new();
        let id = |uf: &mut UnionFind, repr: &mut HashMap<usize, usize>, v: usize| {
            let r = uf.find(v);
            let next = repr.len();
            *repr.entry(r).or_insert(next)
        };
        let base = id(&mut uf, &mut repr, 0);
        let mut out: Vec<Vec<Option<usize>>> = Vec::new();
        let mut inc: Vec<Vec<Option<usize>>> = Vec::new();
        let ensure = |out: &mut Vec<Vec<Option<usize>>>, inc: &mut Vec<Vec<Option<usize>>>, v: usize| {
            while out.len() <= v {
                out.push(vec![None; rank_alphabet]);
                inc.push(vec![None; rank_alphabet]);
            }
        };
        ensure(&mut out, &mut inc, base);
        for &(s, l, t) in &edges {
            let vs = id(&mut uf, &mut repr, s);
            let vt = id(&mut uf, &mut repr, t);
            ensure(&mut out, &mut inc, vs.max(vt));
            let li = l as usize - 1;
            out[vs][li] = Some(vt);
            inc[vt][li] = Some(vs);
        }
        FoldedGraph { rank_alphabet, base, out, inc }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn num_states(&self) -> usize {
        self.out.len()
    }

    fn num_edges(&self) -> usize {
        self.out.iter().flatten().filter(|e| e.is_some()).count()
    }

    /// First Betti number: rank of the subgroup.
    pub fn rank(&self) -> usize {
        self.num_edges() + 1 - self.num_states()
    }

    fn step(&self, state: usize, l: Letter) -> Option<usize> {
        let li = l.unsigned_abs() as usize - 1;
        if l > 0 {
            self.out[state][li]
        } else {
            self.inc[state][li]
        }
    }

    /// Membership in the subgroup: the reduced word must trace a loop at base.
    pub fn contains(&self, w: &Word) -> bool {
        let mut state = self.base;
        for &l in w.letters() {
            match self.step(state, l) {
                Some(next) => state = next,
                None => return false,
            }
        }
        state == self.base
    }

    /// BFS spanning tree: for each state, the path word from base.
    fn tree_paths(&self) -> Vec<Word> {
        let mut paths: Vec<Option<Word>> = vec![None; self.num_states()];
        paths[self.base] = Some(Word::identity());
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            let here = paths[v].clone().unwrap();
            for li in 0..self.rank_alphabet {
                if let Some(t) = self.out[v][li] {
                    if paths[t].is_none() {
                        paths[t] = Some(here.mul(&Word::generator(li + 1)));
                        queue.push_back(t);
                    }
                }
                if let Some(s) = self.inc[v][li] {
                    if paths[s].is_none() {
                        paths[s] =
                            Some(here.mul(&Word::generator(li + 1).inverse()));
                        queue.push_back(s);
                    }
                }
            }
        }
        paths.into_iter().map(|p| p.expect("folded graph is connected")).collect()
    }

    /// Basis of the subgroup from non-tree edges, plus an index for emission.
    fn tree_basis(&self) -> (Vec<Word>, HashMap<(usize, usize, usize), usize>) {
        let paths = self.tree_paths();
        // Mark tree edges: (state, letter index, target).
        let mut is_tree: HashMap<(usize, usize, usize), bool> = HashMap::new();
        for (v, path) in paths.iter().enumerate() {
            for li in 0..self.rank_alphabet {
                if let Some(t) = self.out[v][li] {
                    let extends_fwd = paths[t].len() == path.len() + 1
                        && paths[t] == path.mul(&Word::generator(li + 1));
                    let extends_bwd = path.len() == paths[t].len() + 1
                        && *path == paths[t].mul(&Word::generator(li + 1).inverse());
                    is_tree.insert((v, li, t), extends_fwd || extends_bwd);
                }
            }
        }
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for v in 0..self.num_states() {
            for li in 0..self.rank_alphabet {
                if let Some(t) = self.out[v][li] {
                    if !is_tree[&(v, li, t)] {
                        index.insert((v, li, t), basis.len());
                        let w = paths[v]
                            .mul(&Word::generator(li + 1))
                            .mul(&paths[t].inverse());
                        basis.push(w);
                    }
                }
            }
        }
        (basis, index)
    }

    /// Expresses a member in the non-tree-edge basis, as a word in basis
    /// symbols (letters index the basis, 1-based).
    fn emit(&self, w: &Word, index: &HashMap<(usize, usize, usize), usize>) -> Option<Word> {
        let mut state = self.base;
        let mut symbols: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let li = l.unsigned_abs() as usize - 1;
            let next = self.step(state, l)?;
            let key = if l > 0 { (state, li, next) } else { (next, li, state) };
            if let Some(&b) = index.get(&key) {
                symbols.push(if l > 0 { (b + 1) as Letter } else { -((b + 1) as Letter) });
            }
            state = next;
        }
        if state == self.base {
            Some(Word::from_letters(symbols))
        } else {
            None
        }
    }
}

/// Nielsen reduction of a tuple of words, with the moves recorded as formal
/// expressions: `expressions[i]` is a word in tuple symbols which evaluates to
/// `reduced[i]` when the symbols are replaced by the original tuple entries.
pub struct NielsenReduction {
    pub reduced: Vec<Word>,
    pub expressions: Vec<Word>,
}

pub fn nielsen_reduce(tuple: &[Word]) -> NielsenReduction {
    let m = tuple.len();
    let mut cur: Vec<Word> = tuple.to_vec();
    let mut expr: Vec<Word> = (1..=m).map(Word::generator).collect();

    // Greedy length reduction with a lexicographic tie-break; both the total
    // length and the sorted word list strictly decrease, so this terminates.
    let word_key = |w: &Word| (w.len(), w.letters().to_vec());
    loop {
        let mut best: Option<(usize, Word, Word)> = None;
        for i in 0..m {
            if cur[i].is_identity() {
                continue;
            }
            for j in 0..m {
                if i == j || cur[j].is_identity() {
                    continue;
                }
                for &(ei, ej) in &[(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
                    let a = if ei > 0 { cur[i].clone() } else { cur[i].inverse() };
                    let b = if ej > 0 { cur[j].clone() } else { cur[j].inverse() };
                    let prod = a.mul(&b);
                    // Replacement candidate for slot j: a * b (then re-invert if ej < 0).
                    let candidate = if ej > 0 { prod.clone() } else { prod.inverse() };
                    if word_key(&candidate) < word_key(&cur[j]) {
                        let ea = if ei > 0 { expr[i].clone() } else { expr[i].inverse() };
                        let eb = if ej > 0 { expr[j].clone() } else { expr[j].inverse() };
                        let eprod = ea.mul(&eb);
                        let ecand = if ej > 0 { eprod } else { eprod.inverse() };
                        match &best {
                            Some((_, b0, _)) if word_key(&candidate) >= word_key(b0) => {}
                            _ => best = Some((j, candidate.clone(), ecand)),
                        }
                    }
                }
            }
        }
        match best {
            Some((j, wnew, enew)) => {
                cur[j] = wnew;
                expr[j] = enew;
            }
            None => break,
        }
    }
    NielsenReduction { reduced: cur, expressions: expr }
}

/// One elementary Nielsen move applied to slot `j`: replace by
/// `tuple[i]^ei * tuple[j]` (left) or `tuple[j] * tuple[i]^ei` (right).
#[derive(Clone, Copy, Debug)]
struct Move {
    i: usize,
    j: usize,
    ei: i8,
    left: bool,
}

fn apply_move(tuple: &mut [Word], m: Move) {
    let a = if m.ei > 0 { tuple[m.i].clone() } else { tuple[m.i].inverse() };
    tuple[m.j] = if m.left { a.mul(&tuple[m.j]) } else { tuple[m.j].mul(&a) };
}

/// Breadth-first search through length-preserving elementary moves for a
/// strictly shorter tuple. Nielsen reduction of a basis tuple never needs a
/// length increase, so alternating this with the greedy pass is complete.
fn bfs_shorter(tuple: &[Word], max_states: usize) -> Option<Vec<Move>> {
    let total = |t: &[Word]| t.iter().map(Word::len).sum::<usize>();
    let start_len = total(tuple);
    let key = |t: &[Word]| t.iter().map(|w| w.letters().to_vec()).collect::<Vec<_>>();
    let mut seen = std::collections::HashSet::new();
    seen.insert(key(tuple));
    let mut queue: VecDeque<(Vec<Word>, Vec<Move>)> = VecDeque::from([(tuple.to_vec(), vec![])]);
    while let Some((cur, path)) = queue.pop_front() {
        for i in 0..cur.len() {
            for j in 0..cur.len() {
                if i == j {
                    continue;
                }
                for &(ei, left) in &[(1i8, true), (-1, true), (1, false), (-1, false)] {
                    let m = Move { i, j, ei, left };
                    let mut next = cur.clone();
                    apply_move(&mut next, m);
                    let len = total(&next);
                    if len < start_len {
                        let mut p = path.clone();
                        p.push(m);
                        return Some(p);
                    }
                    if len == start_len && seen.len() < max_states && seen.insert(key(&next)) {
                        let mut p = path.clone();
                        p.push(m);
                        queue.push_back((next, p));
                    }
                }
            }
        }
    }
    None
}

/// Inverse of an automorphism of the free group, computed by Nielsen-reducing
/// the image tuple to single letters while recording the moves.
///
/// Returns `None` when the images are not a basis (the map is not onto).
pub fn invert_automorphism(g: &Endomorphism) -> Option<Endomorphism> {
    let n = g.rank();
    let mut red = nielsen_reduce(g.images());
    while red.reduced.iter().any(|w| w.len() > 1)
        && red.reduced.iter().map(Word::len).sum::<usize>() > n
    {
        // The greedy pass stalled above the minimum; search level sets.
        let path = bfs_shorter(&red.reduced, 200_000)?;
        let mut tuple = red.reduced.clone();
        let mut expr = red.expressions.clone();
        for m in path {
            apply_move(&mut tuple, m);
            apply_move(&mut expr, m);
        }
        let renext = nielsen_reduce(&tuple);
        red = NielsenReduction {
            reduced: renext.reduced,
            expressions: renext
                .expressions
                .iter()
                .map(|e| evaluate_symbols(e, &expr))
                .collect(),
        };
    }
    let mut inverse_images: Vec<Option<Word>> = vec![None; n];
    for (i, w) in red.reduced.iter().enumerate() {
        if w.len() != 1 {
            return None;
        }
        let l = w.letters()[0];
        let target = l.unsigned_abs() as usize;
        let e = if l > 0 { red.expressions[i].clone() } else { red.expressions[i].inverse() };
        if inverse_images[target - 1].is_some() {
            return None;
        }
        inverse_images[target - 1] = Some(e);
    }
    let images: Option<Vec<Word>> = inverse_images.into_iter().collect();
    let inv = Endomorphism::new(n, images?).ok()?;
    debug_assert!((1..=n).all(|k| g.apply(inv.image(k)) == Word::generator(k)));
    Some(inv)
}

/// Expression of a member of a subgroup, per the oracle contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    /// Word in the original generator symbols (letter k = k-th generator).
    InGenerators(Word),
    /// Word in the folded (non-tree-edge) basis symbols.
    InFoldedBasis(Word),
}

/// Membership, rank, and preimage oracles for a finitely generated subgroup.
pub struct SubgroupOracle {
    gens: Vec<Word>,
    graph: FoldedGraph,
    basis: Vec<Word>,
    edge_index: HashMap<(usize, usize, usize), usize>,
    /// Basis-symbol words -> generator-symbol words, when gens are a basis.
    basis_to_gens: Option<Endomorphism>,
}

impl SubgroupOracle {
    pub fn new(gens: &[Word], rank_alphabet: usize) -> SubgroupOracle {
        let graph = FoldedGraph::fold(gens, rank_alphabet);
        let (basis, edge_index) = graph.tree_basis();
        let basis_to_gens = if basis.len() == gens.len() && !gens.is_empty() {
            // kappa maps generator symbols to basis-symbol words; when the
            // generators are a basis of their span, kappa is an automorphism
            // of the abstract free group of that rank and can be inverted.
            let kappa_images: Option<Vec<Word>> =
                gens.iter().map(|g| graph.emit(g, &edge_index)).collect();
            kappa_images
                .and_then(|imgs| Endomorphism::new(gens.len(), imgs).ok())
                .and_then(|kappa| invert_automorphism(&kappa))
        } else {
            None
        };
        SubgroupOracle { gens: gens.to_vec(), graph, basis, edge_index, basis_to_gens }
    }

    pub fn graph(&self) -> &FoldedGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.graph.contains(w)
    }

    /// Free basis of the subgroup read off the non-tree edges.
    pub fn folded_basis(&self) -> &[Word] {
        &self.basis
    }

    /// Whether the generators form a basis of their span.
    pub fn gens_are_basis(&self) -> bool {
        self.basis_to_gens.is_some()
    }

    /// Expression of `w` in the generators (when they are a basis of their
    /// span) or in the folded basis otherwise.
    pub fn preimage(&self, w: &Word) -> Result<Expression, FoldError> {
        let in_basis = self
            .graph
            .emit(w, &self.edge_index)
            .ok_or_else(|| FoldError::NotAMember(w.to_string()))?;
        match &self.basis_to_gens {
            Some(b2g) => {
                let in_gens = b2g_substitute(b2g, &in_basis);
                debug_assert_eq!(&evaluate_symbols(&in_gens, &self.gens), w);
                Ok(Expression::InGenerators(in_gens))
            }
            None => Ok(Expression::InFoldedBasis(in_basis)),
        }
    }
}

fn b2g_substitute(b2g: &Endomorphism, w: &Word) -> Word {
    b2g.apply(w)
}

/// Evaluates a word in tuple symbols against the tuple.
pub fn evaluate_symbols(symbol_word: &Word, tuple: &[Word]) -> Word {
    let mut out = Word::identity();
    for &l in symbol_word.letters() {
        let t = &tuple[l.unsigned_abs() as usize - 1];
        out = out.mul(&if l > 0 { t.clone() } else { t.inverse() });
    }
    out
}

/// Injectivity of an endomorphism: the folded graph of the images has full rank.
pub fn is_injective(g: &Endomorphism) -> bool {
    SubgroupOracle::new(g.images(), g.rank()).rank() == g.rank()
}

/// Surjectivity: every generator lies in the span of the images.
pub fn is_surjective(g: &Endomorphism) -> bool {
    let oracle = SubgroupOracle::new(g.images(), g.rank());
    (1..=g.rank()).all(|k| oracle.contains(&Word::generator(k)))
}
