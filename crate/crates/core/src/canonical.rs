//! Canonical codes of (numbered) tracks up to orientation-preserving
//! ribbon-graph isomorphism.
//!
//! From each root switch a breadth-first traversal visits slots in the order
//! large, left, right and labels switches and branches on first sight. The
//! code lists, per switch in label order, where each slot leads plus the
//! puncture flag. The minimum over roots is the code; components are coded
//! separately and sorted.

use crate::track::{EndSide, Slot, TrainTrack};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Canonical code; equal codes mean isomorphic tracks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode(pub Vec<u32>);

impl CanonicalCode {
    /// Little-endian byte string.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_le_bytes()).collect()
    }

    /// 64-bit FNV-1a digest, used for short labels.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.digest())
    }
}

/// A canonical code together with the relabeling that realizes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub code: CanonicalCode,
    /// Old switch index to canonical switch index.
    pub switch_perm: Vec<usize>,
    /// Old branch index to canonical branch index.
    pub branch_perm: Vec<usize>,
    /// Whether a branch's ends are swapped in the canonical track.
    pub flip: Vec<bool>,
}

struct Traversal {
    code: Vec<u32>,
    switch_order: Vec<usize>,
    branch_order: Vec<usize>,
    flip: Vec<bool>,
}

fn traverse(t: &TrainTrack, root: usize, numbering: Option<&[u32]>) -> Traversal {
    let v = t.switch_count();
    let e = t.branch_count();
    let mut label = vec![u32::MAX; v];
    let mut order = vec![root];
    label[root] = 0;
    let mut branch_seen = vec![false; e];
    let mut branch_order = Vec::new();
    let mut flip = vec![false; e];
    let mut code = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        code.push(t.punctured_cusps().contains(&s) as u32);
        for slot in Slot::ALL {
            let h = t.switch(s).slot(slot);
            if !branch_seen[h.branch] {
                branch_seen[h.branch] = true;
                branch_order.push(h.branch);
                flip[h.branch] = h.end == EndSide::Second;
            }
            let (s2, slot2) = t.attachment(h.opposite());
            if label[s2] == u32::MAX {
                label[s2] = order.len() as u32;
                order.push(s2);
            }
            code.push(label[s2]);
            code.push(slot2.index() as u32);
            if let Some(n) = numbering {
                // Orientation relative to the traversal matters only through
                // the slot data, so the number alone identifies the branch.
                code.push(n[h.branch]);
            }
        }
        i += 1;
    }
    Traversal {
        code,
        switch_order: order,
        branch_order,
        flip,
    }
}

/// Canonical code and relabeling of a track, optionally with a numbering of
/// its branches (`numbering[b]` in `1..=E`).
pub fn canonical(t: &TrainTrack, numbering: Option<&[u32]>) -> Canonical {
    let mut parts: Vec<Traversal> = Vec::new();
    for comp in t.components() {
        let best = comp
            .iter()
            .map(|&r| traverse(t, r, numbering))
            .min_by(|a, b| a.code.cmp(&b.code))
            .expect("component is nonempty");
        parts.push(best);
    }
    parts.sort_by(|a, b| (a.switch_order.len(), &a.code).cmp(&(b.switch_order.len(), &b.code)));
    let mut code = vec![t.switch_count() as u32, t.branch_count() as u32];
    let mut switch_perm = vec![0; t.switch_count()];
    let mut branch_perm = vec![0; t.branch_count()];
    let mut flip = vec![false; t.branch_count()];
    let (mut s_off, mut b_off) = (0, 0);
    for p in &parts {
        code.push(u32::MAX);
        code.push(p.switch_order.len() as u32);
        code.extend(p.code.iter().copied());
        for (k, &s) in p.switch_order.iter().enumerate() {
            switch_perm[s] = s_off + k;
        }
        for (k, &b) in p.branch_order.iter().enumerate() {
            branch_perm[b] = b_off + k;
            flip[b] = p.flip[b];
        }
        s_off += p.switch_order.len();
        b_off += p.branch_order.len();
    }
    if let Some(n) = numbering {
        for b in 0..t.branch_count() {
            branch_perm[b] = n[b] as usize - 1;
        }
    }
    Canonical {
        code: CanonicalCode(code),
        switch_perm,
        branch_perm,
        flip,
    }
}

pub fn canonical_code(t: &TrainTrack, numbering: Option<&[u32]>) -> CanonicalCode {
    canonical(t, numbering).code
}

/// The canonically relabeled track with default labels. Tracks with equal
/// codes give identical canonical tracks.
pub fn canonical_track(t: &TrainTrack, numbering: Option<&[u32]>) -> (TrainTrack, Canonical) {
    let c = canonical(t, numbering);
    let ct = t
        .permuted(&c.switch_perm, &c.branch_perm, &c.flip)
        .with_default_labels();
    (ct, c)
}

/// Brute-force search for an orientation-preserving isomorphism, returned as
/// a switch bijection. Exponential; meant as a test oracle for tiny tracks.
pub fn find_isomorphism(a: &TrainTrack, b: &TrainTrack, numbering: Option<(&[u32], &[u32])>) -> Option<Vec<usize>> {
    let v = a.switch_count();
    if v != b.switch_count() || a.branch_count() != b.branch_count() {
        return None;
    }
    let mut perm: Vec<usize> = (0..v).collect();
    loop {
        if is_isomorphism(a, b, &perm, numbering) {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn is_isomorphism(a: &TrainTrack, b: &TrainTrack, perm: &[usize], numbering: Option<(&[u32], &[u32])>) -> bool {
    let mut bmap = vec![usize::MAX; a.branch_count()];
    for s in 0..a.switch_count() {
        if a.punctured_cusps().contains(&s) != b.punctured_cusps().contains(&perm[s]) {
            return false;
        }
        for slot in Slot::ALL {
            let ha = a.switch(s).slot(slot);
            let hb = b.switch(perm[s]).slot(slot);
            let (ta, sla) = a.attachment(ha.opposite());
            let (tb, slb) = b.attachment(hb.opposite());
            if perm[ta] != tb || sla != slb {
                return false;
            }
            if bmap[ha.branch] == usize::MAX {
                bmap[ha.branch] = hb.branch;
            } else if bmap[ha.branch] != hb.branch {
                return false;
            }
            if let Some((na, nb)) = numbering {
                if na[ha.branch] != nb[hb.branch] {
                    return false;
                }
            }
        }
    }
    true
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
