//! Subshifts of finite type generated by full splits.
//!
//! Letters are canonical codes of tracks, optionally with branch numberings.
//! Each letter stores a canonical representative. An edge `i -> j` records
//! the carrying matrix of the first full split (in choice-map order) of
//! representative `i` whose result has code `j`, composed with the
//! relabeling onto representative `j`; so `mu_i = T mu_j` for measures on the
//! representatives.
//!
//! In numbered mode the representative's branch `b` carries number `b + 1`,
//! and since splits keep branch indices the relabeling is branch-trivial.

use crate::canonical::{canonical, canonical_track, CanonicalCode};
use crate::error::{Result, TrakError};
use crate::graph::Digraph;
use crate::measures::{is_recurrent, vertex_cycle_vectors};
use crate::moves::{choice_maps, full_split, split, CarryingMatrix, SplitChoice, SplitDirection};
use crate::par::Execution;
use crate::perron::{self, PerronRoot, SparseMatrix};
use crate::track::{parse_track, serialize_track, TopologicalType, TrainTrack};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;

/// A track with a bijective numbering of its branches by `1..=p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberedTrack {
    pub track: TrainTrack,
    pub numbering: Vec<u32>,
}

impl NumberedTrack {
    pub fn new(track: TrainTrack, numbering: Vec<u32>) -> Result<Self> {
        let p = track.branch_count();
        let mut seen = vec![false; p];
        if numbering.len() != p {
            return Err(TrakError::Precondition(format!(
                "{} numbers for {p} branches",
                numbering.len()
            )));
        }
        for &k in &numbering {
            if k == 0 || k as usize > p || std::mem::replace(&mut seen[k as usize - 1], true) {
                return Err(TrakError::Precondition(format!(
                    "numbering is not a bijection onto 1..={p}"
                )));
            }
        }
        Ok(Self { track, numbering })
    }

    /// Branch `b` gets number `b + 1`.
    pub fn identity(track: TrainTrack) -> Self {
        let numbering = (1..=track.branch_count() as u32).collect();
        Self { track, numbering }
    }

    pub fn canonical_form(&self) -> CanonicalCode {
        crate::canonical::canonical_code(&self.track, Some(&self.numbering))
    }
}

/// Whether letters remember branch numberings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LetterMode {
    Numbered,
    Unnumbered,
}

/// A letter of the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub code: CanonicalCode,
    /// Canonical representative; absent for subshifts given by matrices.
    pub track: Option<TrainTrack>,
    /// Extreme rays of the measure cone of the representative.
    pub vertex_cycles: Vec<Vec<u64>>,
    pub topological_type: Option<TopologicalType>,
}

/// An edge of the transition graph with its carrying matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    /// Choice-map index (bit `i` selects Right at the `i`-th large branch).
    pub choice: usize,
    pub matrix: CarryingMatrix,
}

/// Options for [`build_subshift`].
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub mode: LetterMode,
    pub budget: usize,
    pub exec: Execution,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            mode: LetterMode::Unnumbered,
            budget: 10_000,
            exec: Execution::default(),
        }
    }
}

/// Finite alphabet with a 0/1 transition matrix and carrying matrices.
#[derive(Clone, Debug)]
pub struct Subshift {
    pub mode: LetterMode,
    pub branch_count: usize,
    pub letters: Vec<Letter>,
    /// Sorted by `(from, to)`.
    pub transitions: Vec<Transition>,
    /// Every full split of every letter was classified.
    pub closed: bool,
    /// Children rejected by the pruning filter.
    pub pruned: usize,
    graph: Digraph,
    index: HashMap<(usize, usize), usize>,
}

/// Central split at every large branch leaves no orientable component.
pub fn diagonal_check(t: &TrainTrack) -> bool {
    t.large_branches().into_iter().all(|e| {
        match split(
            t,
            SplitChoice {
                large_branch: e,
                direction: SplitDirection::Central,
            },
        ) {
            Ok((s, _)) => s.component_orientability().iter().all(|&o| !o),
            Err(_) => false,
        }
    })
}

/// The pruning filter: valid, same type, recurrent, and no orientable
/// component after removing any split diagonal.
pub fn admissible_child(child: &TrainTrack, ty: &TopologicalType) -> bool {
    child.validate().is_ok()
        && child.topological_type().ok().as_ref() == Some(ty)
        && is_recurrent(child).is_some()
        && diagonal_check(child)
}

fn identity_numbering(p: usize) -> Vec<u32> {
    (1..=p as u32).collect()
}

/// Canonical representative and code of `t`, with the matrix `P` such that
/// `mu_t = P mu_rep`.
fn normalize(t: &TrainTrack, mode: LetterMode) -> (CanonicalCode, TrainTrack, CarryingMatrix) {
    let numbering = identity_numbering(t.branch_count());
    let num = match mode {
        LetterMode::Numbered => Some(numbering.as_slice()),
        LetterMode::Unnumbered => None,
    };
    let (rep, c) = canonical_track(t, num);
    let p = t.branch_count();
    let mut m = CarryingMatrix::zeros(p, p);
    for b in 0..p {
        m.set(b, c.branch_perm[b], 1);
    }
    (c.code, rep, m)
}

type Child = (usize, Option<(CanonicalCode, TrainTrack, CarryingMatrix)>);

fn children(t: &TrainTrack, mode: LetterMode) -> Result<Vec<Child>> {
    let ty = t.topological_type()?;
    choice_maps(t)
        .iter()
        .enumerate()
        .map(|(mask, ch)| {
            let (child, m) = full_split(t, ch)?;
            if !admissible_child(&child, &ty) {
                return Ok((mask, None));
            }
            let (code, rep, p) = normalize(&child, mode);
            Ok((mask, Some((code, rep, m.mul(&p)?))))
        })
        .collect()
}

/// Breadth-first closure of `seeds` under full splits passing the pruning
/// filter. Frontier levels are expanded in parallel and merged in frontier
/// order, so the numbering of letters is deterministic.
pub fn build_subshift(seeds: &[NumberedTrack], opts: BuildOptions) -> Result<Subshift> {
    let first = seeds
        .first()
        .ok_or_else(|| TrakError::Precondition("at least one seed is required".into()))?;
    let p = first.track.branch_count();
    let mut reps: Vec<TrainTrack> = Vec::new();
    let mut codes: Vec<CanonicalCode> = Vec::new();
    let mut lookup: HashMap<CanonicalCode, usize> = HashMap::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if s.track.branch_count() != p {
            return Err(TrakError::Precondition("seeds have different branch counts".into()));
        }
        s.track.validate()?;
        if is_recurrent(&s.track).is_none() {
            return Err(TrakError::Precondition("seed is not recurrent".into()));
        }
        let num = match opts.mode {
            LetterMode::Numbered => Some(s.numbering.as_slice()),
            LetterMode::Unnumbered => None,
        };
        let (rep, c) = canonical_track(&s.track, num);
        if !lookup.contains_key(&c.code) {
            lookup.insert(c.code.clone(), reps.len());
            frontier.push(reps.len());
            codes.push(c.code);
            reps.push(rep);
        }
    }
    let mut edges: Vec<Transition> = Vec::new();
    let mut closed = true;
    let mut pruned = 0;
    while !frontier.is_empty() {
        let expanded: Vec<Result<Vec<Child>>> = opts.exec.map(&frontier, |&i| children(&reps[i], opts.mode));
        let mut next = Vec::new();
        for (&i, kids) in frontier.iter().zip(expanded) {
            let mut seen_targets = Vec::new();
            for (mask, kid) in kids? {
                let Some((code, rep, matrix)) = kid else {
                    pruned += 1;
                    continue;
                };
                let j = match lookup.get(&code) {
                    Some(&j) => j,
                    None => {
                        if reps.len() >= opts.budget {
                            closed = false;
                            continue;
                        }
                        let j = reps.len();
                        lookup.insert(code.clone(), j);
                        codes.push(code);
                        reps.push(rep);
                        next.push(j);
                        j
                    }
                };
                if !seen_targets.contains(&j) {
                    seen_targets.push(j);
                    edges.push(Transition {
                        from: i,
                        to: j,
                        choice: mask,
                        matrix,
                    });
                }
            }
        }
        frontier = next;
    }
    let letters: Vec<Letter> = opts.exec.map_range(reps.len(), |i| Letter {
        code: codes[i].clone(),
        vertex_cycles: vertex_cycle_vectors(&reps[i], Execution::Sequential),
        topological_type: reps[i].topological_type().ok(),
        track: Some(reps[i].clone()),
    });
    Ok(Subshift::assemble(opts.mode, p, letters, edges, closed, pruned))
}

#[derive(Serialize, Deserialize)]
struct JsonLetter {
    index: usize,
    code: String,
    digest: String,
    topological_type: Option<String>,
    track: Option<String>,
    vertex_cycles: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    from: usize,
    to: usize,
    choice: usize,
    matrix: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct JsonSubshift {
    mode: LetterMode,
    closed: bool,
    branch_count: usize,
    pruned: usize,
    alphabet: Vec<JsonLetter>,
    matrix: Vec<Vec<u8>>,
    transitions: Vec<JsonEdge>,
}

impl Subshift {
    fn assemble(
        mode: LetterMode,
        branch_count: usize,
        letters: Vec<Letter>,
        mut transitions: Vec<Transition>,
        closed: bool,
        pruned: usize,
    ) -> Self {
        transitions.sort_by_key(|t| (t.from, t.to));
        let graph = Digraph::new(letters.len(), transitions.iter().map(|t| (t.from, t.to)));
        let index = transitions
            .iter()
            .enumerate()
            .map(|(k, t)| ((t.from, t.to), k))
            .collect();
        Self {
            mode,
            branch_count,
            letters,
            transitions,
            closed,
            pruned,
            graph,
            index,
        }
    }

    /// A closed subshift given directly by carrying matrices, one per edge.
    /// Letters have unit vectors as vertex cycles.
    pub fn from_matrices(letters: usize, edges: Vec<(usize, usize, CarryingMatrix)>) -> Result<Self> {
        let p = edges.first().map_or(1, |e| e.2.rows);
        for (a, b, m) in &edges {
            if *a >= letters || *b >= letters || m.rows != p || m.cols != p {
                return Err(TrakError::Precondition(
                    "edge out of range or matrix of wrong size".into(),
                ));
            }
        }
        let units: Vec<Vec<u64>> = (0..p).map(|i| (0..p).map(|j| (i == j) as u64).collect()).collect();
        let ls = (0..letters)
            .map(|i| Letter {
                code: CanonicalCode(vec![i as u32]),
                track: None,
                vertex_cycles: units.clone(),
                topological_type: None,
            })
            .collect();
        let ts = edges
            .into_iter()
            .map(|(from, to, matrix)| Transition {
                from,
                to,
                choice: 0,
                matrix,
            })
            .collect();
        Ok(Self::assemble(LetterMode::Unnumbered, p, ls, ts, true, 0))
    }

    /// A closed subshift with a 0/1 transition matrix and `1 x 1` identity
    /// carrying matrices.
    pub fn from_adjacency(a: &[Vec<u8>]) -> Result<Self> {
        let edges = (0..a.len())
            .flat_map(|i| (0..a[i].len()).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .map(|(i, j)| (i, j, CarryingMatrix::identity(1)))
            .collect();
        Self::from_matrices(a.len(), edges)
    }

    /// Induced full shift on return loops at one base letter. Each block is
    /// a cycle starting at the base; letter `i` of the result is block `i`,
    /// every transition is allowed and the edge `i -> j` carries the cycle
    /// matrix of block `i`. Vertex cycles are those of the base letter, so
    /// roof values on the result are sums of roof values over a block.
    pub fn induced(&self, blocks: &[Vec<usize>]) -> Result<Self> {
        let base = *blocks
            .first()
            .and_then(|b| b.first())
            .ok_or_else(|| TrakError::Precondition("no blocks".into()))?;
        let mut mats = Vec::new();
        for b in blocks {
            if b.first() != Some(&base) {
                return Err(TrakError::Precondition(
                    "blocks must start at the same base letter".into(),
                ));
            }
            mats.push(self.cycle_matrix(b)?);
        }
        let k = blocks.len();
        let edges = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| Transition {
                from: i,
                to: j,
                choice: 0,
                matrix: mats[i].clone(),
            })
            .collect();
        let letters = blocks
            .iter()
            .map(|b| Letter {
                code: CanonicalCode(b.iter().map(|&x| x as u32).collect()),
                track: self.letters[base].track.clone(),
                vertex_cycles: self.letters[base].vertex_cycles.clone(),
                topological_type: self.letters[base].topological_type.clone(),
            })
            .collect();
        Ok(Self::assemble(self.mode, self.branch_count, letters, edges, true, 0))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        self.graph.successors(i)
    }

    pub fn transition(&self, i: usize, j: usize) -> Option<&Transition> {
        self.index.get(&(i, j)).map(|&k| &self.transitions[k])
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.index.contains_key(&(i, j))
    }

    /// Dense 0/1 transition matrix.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.len()]; self.len()];
        for t in &self.transitions {
            a[t.from][t.to] = 1;
        }
        a
    }

    /// Subshift on the letters `keep` (sorted), renumbered in that order.
    /// It is closed when `self` is and no edge leaves `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let leaves = keep
            .iter()
            .any(|&i| self.successors(i).iter().any(|&j| pos[j] == usize::MAX));
        let letters = keep.iter().map(|&i| self.letters[i].clone()).collect();
        let ts = self
            .transitions
            .iter()
            .filter(|t| pos[t.from] != usize::MAX && pos[t.to] != usize::MAX)
            .map(|t| Transition {
                from: pos[t.from],
                to: pos[t.to],
                choice: t.choice,
                matrix: t.matrix.clone(),
            })
            .collect();
        Self::assemble(self.mode, self.branch_count, letters, ts, self.closed && !leaves, 0)
    }

    /// Union of the terminal strong components: the letters every infinite
    /// splitting sequence eventually stays in.
    pub fn recurrent_core(&self) -> Self {
        let mut keep: Vec<usize> = self.graph.terminal_sccs().into_iter().flatten().collect();
        keep.sort_unstable();
        self.restrict(&keep)
    }

    fn require_closed(&self) -> Result<()> {
        if self.closed {
            Ok(())
        } else {
            Err(TrakError::NotClosed)
        }
    }

    /// Strong connectivity of the transition graph.
    pub fn is_transitive(&self) -> Result<bool> {
        self.require_closed()?;
        Ok(self.graph.is_strongly_connected())
    }

    /// Period and cyclic classes `C_1, ..., C_n`, or `None` when the
    /// subshift is not transitive.
    pub fn cyclic_structure(&self) -> Result<Option<(usize, Vec<Vec<usize>>)>> {
        self.require_closed()?;
        Ok(self.graph.cyclic_classes())
    }

    pub fn is_mixing(&self) -> Result<bool> {
        Ok(matches!(self.cyclic_structure()?, Some((1, _))))
    }

    /// `A^n` over big integers.
    pub fn power(&self, n: usize) -> Vec<Vec<BigUint>> {
        let k = self.len();
        let mut result: Vec<Vec<BigUint>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { BigUint::one() } else { BigUint::zero() })
                    .collect()
            })
            .collect();
        // Right-multiplication by the sparse A, n times; A is sparse, so this
        // beats repeated squaring at the sizes met here.
        for _ in 0..n {
            let mut next = vec![vec![BigUint::zero(); k]; k];
            for (i, row) in result.iter().enumerate() {
                for (m, x) in row.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for &j in self.successors(m) {
                        next[i][j] += x;
                    }
                }
            }
            result = next;
        }
        result
    }

    /// Number of admissible words of length `n + 1` from `i` to `j`, that is
    /// `(A^n)_{ij}`.
    pub fn count_words(&self, i: usize, j: usize, n: usize) -> Result<BigUint> {
        self.require_closed()?;
        if n == 0 {
            return Err(TrakError::OutOfRange("word counts need n >= 1".into()));
        }
        if i >= self.len() || j >= self.len() {
            return Err(TrakError::OutOfRange(format!("letter outside 0..{}", self.len())));
        }
        let mut v = vec![BigUint::zero(); self.len()];
        v[i] = BigUint::one();
        for _ in 0..n {
            let mut w = vec![BigUint::zero(); self.len()];
            for (m, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    for &s in self.successors(m) {
                        w[s] += x;
                    }
                }
            }
            v = w;
        }
        Ok(v.swap_remove(j))
    }

    /// `sum_{ij} (A^n)_{ij}`.
    pub fn total_words(&self, n: usize) -> BigUint {
        let mut v = vec![BigUint::one(); self.len()];
        for _ in 0..n {
            let mut w = vec![BigUint::zero(); self.len()];
            for (m, x) in v.iter().enumerate() {
                for &s in self.successors(m) {
                    w[s] += x;
                }
            }
            v = w;
        }
        v.iter().sum()
    }

    /// Index of the first inadmissible step, if any.
    pub fn check_word(&self, w: &[usize]) -> Result<()> {
        if let Some(k) = w.iter().position(|&x| x >= self.len()) {
            return Err(TrakError::NotAdmissible(k));
        }
        match w.windows(2).position(|p| !self.has_edge(p[0], p[1])) {
            Some(k) => Err(TrakError::NotAdmissible(k)),
            None => Ok(()),
        }
    }

    pub fn is_admissible(&self, w: &[usize]) -> bool {
        !w.is_empty() && self.check_word(w).is_ok()
    }

    /// Carrying matrix `T_{01} T_{12} ... ` of an admissible word; the
    /// identity for a single letter.
    pub fn composite(&self, w: &[usize]) -> Result<CarryingMatrix> {
        if w.is_empty() {
            return Err(TrakError::Precondition("empty word".into()));
        }
        self.check_word(w)?;
        let mut m = CarryingMatrix::identity(self.branch_count);
        for p in w.windows(2) {
            m = m.mul(&self.transition(p[0], p[1]).expect("checked").matrix)?;
        }
        Ok(m)
    }

    /// Whether the composite carrying matrix is positive.
    pub fn is_tight(&self, w: &[usize]) -> Result<bool> {
        Ok(self.composite(w)?.is_positive())
    }

    /// Admissible words with `len` letters, in lexicographic order. Errors
    /// once more than `budget` words are produced.
    pub fn words(&self, len: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        if len == 0 {
            return Ok(out);
        }
        let mut stack: Vec<Vec<usize>> = (0..self.len()).rev().map(|i| vec![i]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == len {
                if out.len() == budget {
                    return Err(TrakError::BudgetExceeded(format!("more than {budget} words")));
                }
                out.push(w);
                continue;
            }
            for &j in self.successors(*w.last().expect("nonempty")).iter().rev() {
                let mut x = w.clone();
                x.push(j);
                stack.push(x);
            }
        }
        Ok(out)
    }

    /// Closed paths of length `n`, one per rotation class, each given by its
    /// lexicographically least rotation; sorted.
    pub fn periodic_words(&self, n: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
        self.require_closed()?;
        let mut out = Vec::new();
        if n == 0 {
            return Ok(out);
        }
        for s in 0..self.len() {
            let mut stack = vec![vec![s]];
            while let Some(w) = stack.pop() {
                let last = *w.last().expect("nonempty");
                if w.len() == n {
                    if self.has_edge(last, s) && is_least_rotation(&w) {
                        if out.len() == budget {
                            return Err(TrakError::BudgetExceeded(format!("more than {budget} cycles")));
                        }
                        out.push(w);
                    }
                    continue;
                }
                for &j in self.successors(last).iter().rev().filter(|&&j| j >= s) {
                    let mut x = w.clone();
                    x.push(j);
                    stack.push(x);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Composite matrix around a cycle, including the closing edge.
    pub fn cycle_matrix(&self, cycle: &[usize]) -> Result<CarryingMatrix> {
        let mut w = cycle.to_vec();
        w.push(
            *cycle
                .first()
                .ok_or_else(|| TrakError::Precondition("empty cycle".into()))?,
        );
        self.composite(&w)
    }

    /// Tight cycles through `base` found by random walks: a walk of a length
    /// drawn from `lengths` leaves `base`, then returns along a shortest
    /// path. Returned without the closing letter, deduplicated, shortest
    /// first.
    pub fn sample_tight_cycles<R: Rng + ?Sized>(
        &self,
        base: usize,
        lengths: std::ops::Range<usize>,
        attempts: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<usize>>> {
        if base >= self.len() || lengths.is_empty() || lengths.start == 0 {
            return Err(TrakError::Precondition("bad base letter or length range".into()));
        }
        let mut dist = vec![usize::MAX; self.len()];
        let mut pred = vec![Vec::new(); self.len()];
        for (a, b) in self.graph.edges() {
            pred[b].push(a);
        }
        dist[base] = 0;
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(x) = queue.pop_front() {
            for &y in &pred[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let mut found = std::collections::BTreeSet::new();
        for _ in 0..attempts {
            let target = rng.gen_range(lengths.clone());
            let mut w = vec![base];
            while w.len() < target {
                let succ: Vec<usize> = self
                    .successors(*w.last().expect("nonempty"))
                    .iter()
                    .copied()
                    .filter(|&y| dist[y] != usize::MAX)
                    .collect();
                if succ.is_empty() {
                    break;
                }
                w.push(succ[rng.gen_range(0..succ.len())]);
            }
            loop {
                let x = *w.last().expect("nonempty");
                if w.len() > 1 && x == base {
                    break;
                }
                let next = self
                    .successors(x)
                    .iter()
                    .copied()
                    .filter(|&y| dist[y] != usize::MAX)
                    .min_by_key(|&y| (dist[y], y));
                match next {
                    Some(y) => w.push(y),
                    None => break,
                }
            }
            if w.len() < 2 || *w.last().expect("nonempty") != base {
                continue;
            }
            w.pop();
            if self.cycle_matrix(&w)?.is_positive() {
                found.insert((w.len(), w));
            }
        }
        Ok(found.into_iter().map(|(_, w)| w).collect())
    }

    /// Perron root of the cycle's composite matrix.
    pub fn dilatation(&self, cycle: &[usize]) -> Result<PerronRoot> {
        perron::dilatation(&self.cycle_matrix(cycle)?)
    }

    /// Spectral radius of the transition matrix.
    pub fn spectral_radius(&self) -> Result<f64> {
        perron::spectral_radius(&SparseMatrix::from_graph(&self.graph))
    }

    /// Graphviz rendering; nodes are labeled by code digest and type.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph subshift {\n");
        for (i, l) in self.letters.iter().enumerate() {
            let ty = l.topological_type.as_ref().map(|t| t.to_string()).unwrap_or_default();
            let _ = writeln!(out, "  n{i} [label=\"{} {}\"];", l.code, ty);
        }
        for t in &self.transitions {
            let _ = writeln!(out, "  n{} -> n{};", t.from, t.to);
        }
        out.push_str("}\n");
        out
    }

    /// JSON export: alphabet, transition rows, carrying matrices and inline
    /// representative track files.
    pub fn to_json(&self) -> serde_json::Value {
        let alphabet = self
            .letters
            .iter()
            .enumerate()
            .map(|(index, l)| JsonLetter {
                index,
                code: l.code.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                digest: l.code.to_string(),
                topological_type: l.topological_type.as_ref().map(|t| t.to_string()),
                track: l.track.as_ref().map(serialize_track),
                vertex_cycles: l.vertex_cycles.clone(),
            })
            .collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| JsonEdge {
                from: t.from,
                to: t.to,
                choice: t.choice,
                matrix: t.matrix.to_rows(),
            })
            .collect();
        serde_json::to_value(JsonSubshift {
            mode: self.mode,
            closed: self.closed,
            branch_count: self.branch_count,
            pruned: self.pruned,
            alphabet,
            matrix: self.adjacency(),
            transitions,
        })
        .expect("plain data serializes")
    }

    /// Inverse of [`Subshift::to_json`]. Topological types are recomputed
    /// from the inline tracks.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: JsonSubshift =
            serde_json::from_value(v.clone()).map_err(|e| TrakError::Format(format!("subshift JSON: {e}")))?;
        let mut letters = Vec::with_capacity(j.alphabet.len());
        for (k, l) in j.alphabet.into_iter().enumerate() {
            if l.index != k {
                return Err(TrakError::Format(format!("alphabet entry {k} has index {}", l.index)));
            }
            let code = l
                .code
                .split_whitespace()
                .map(|x| x.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| TrakError::Format(format!("letter {k} code: {e}")))?;
            let track = l.track.as_deref().map(parse_track).transpose()?;
            let topological_type = track.as_ref().and_then(|t| t.topological_type().ok());
            letters.push(Letter {
                code: CanonicalCode(code),
                track,
                vertex_cycles: l.vertex_cycles,
                topological_type,
            });
        }
        let n = letters.len();
        let mut transitions = Vec::with_capacity(j.transitions.len());
        for e in j.transitions {
            let matrix = CarryingMatrix::from_rows(&e.matrix);
            if e.from >= n || e.to >= n || matrix.rows != j.branch_count || matrix.cols != j.branch_count {
                return Err(TrakError::Format(format!(
                    "transition {} -> {} out of range",
                    e.from, e.to
                )));
            }
            transitions.push(Transition {
                from: e.from,
                to: e.to,
                choice: e.choice,
                matrix,
            });
        }
        let s = Self::assemble(j.mode, j.branch_count, letters, transitions, j.closed, j.pruned);
        if s.adjacency() != j.matrix {
            return Err(TrakError::Format(
                "transition matrix disagrees with the edge list".into(),
            ));
        }
        Ok(s)
    }
}

/// Whether no proper rotation of `w` is lexicographically smaller.
pub fn is_least_rotation(w: &[usize]) -> bool {
    (1..w.len()).all(|r| {
        let rot = w[r..].iter().chain(&w[..r]);
        w.iter().cmp(rot) != std::cmp::Ordering::Greater
    })
}

/// Whether `w` is not a proper power of a shorter word.
pub fn is_primitive_word(w: &[usize]) -> bool {
    let n = w.len();
    (1..n)
        .filter(|&d| n.is_multiple_of(d))
        .all(|d| w.chunks(d).any(|c| c != &w[..d]))
}

/// Code of a track under the given mode; numbered mode uses the identity
/// numbering.
pub fn letter_code(t: &TrainTrack, mode: LetterMode) -> CanonicalCode {
    let numbering = identity_numbering(t.branch_count());
    match mode {
        LetterMode::Numbered => canonical(t, Some(&numbering)).code,
        LetterMode::Unnumbered => canonical(t, None).code,
    }
}
