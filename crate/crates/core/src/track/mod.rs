//! Generic train tracks as oriented ribbon graphs.
//!
//! Every switch is trivalent with one large slot and two small slots. The
//! counterclockwise cyclic order at a switch is `large, left, right`, so the
//! only cusp of a switch sits in the corner between `left` and `right`.

mod io;
mod ops;
mod regions;

pub mod generate;

pub use io::{parse_track, serialize_track};
pub use ops::{insert_small_branch, remove_small_branch, Flow, Removal};
pub use regions::{Dart, Region};

use crate::error::{Result, TrakError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Which end of a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EndSide {
    First,
    Second,
}

impl EndSide {
    pub fn other(self) -> Self {
        match self {
            EndSide::First => EndSide::Second,
            EndSide::Second => EndSide::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            EndSide::First => 0,
            EndSide::Second => 1,
        }
    }
}

/// One end of a branch, addressed by dense branch index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfBranchEnd {
    pub branch: usize,
    pub end: EndSide,
}

impl HalfBranchEnd {
    pub fn new(branch: usize, end: EndSide) -> Self {
        Self { branch, end }
    }

    pub fn first(branch: usize) -> Self {
        Self::new(branch, EndSide::First)
    }

    pub fn second(branch: usize) -> Self {
        Self::new(branch, EndSide::Second)
    }

    /// The opposite end of the same branch.
    pub fn opposite(self) -> Self {
        Self::new(self.branch, self.end.other())
    }

    /// Dense index `2 * branch + end`.
    pub fn code(self) -> usize {
        2 * self.branch + self.end.index()
    }

    pub fn from_code(code: usize) -> Self {
        let end = if code % 2 == 0 { EndSide::First } else { EndSide::Second };
        Self::new(code / 2, end)
    }
}

/// Slot of a switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Large,
    Left,
    Right,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Large, Slot::Left, Slot::Right];

    pub fn index(self) -> usize {
        match self {
            Slot::Large => 0,
            Slot::Left => 1,
            Slot::Right => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    /// Next slot in counterclockwise order `large -> left -> right -> large`.
    pub fn ccw_next(self) -> Self {
        match self {
            Slot::Large => Slot::Left,
            Slot::Left => Slot::Right,
            Slot::Right => Slot::Large,
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Slot::Large => Slot::Large,
            Slot::Left => Slot::Right,
            Slot::Right => Slot::Left,
        }
    }
}

/// A trivalent switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Switch {
    pub large: HalfBranchEnd,
    pub left: HalfBranchEnd,
    pub right: HalfBranchEnd,
}

impl Switch {
    pub fn new(large: HalfBranchEnd, left: HalfBranchEnd, right: HalfBranchEnd) -> Self {
        Self { large, left, right }
    }

    pub fn slot(&self, slot: Slot) -> HalfBranchEnd {
        match slot {
            Slot::Large => self.large,
            Slot::Left => self.left,
            Slot::Right => self.right,
        }
    }

    pub fn slot_mut(&mut self, slot: Slot) -> &mut HalfBranchEnd {
        match slot {
            Slot::Large => &mut self.large,
            Slot::Left => &mut self.left,
            Slot::Right => &mut self.right,
        }
    }
}

/// Classification of a branch by the slots its two ends occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchKind {
    Large,
    Small,
    Mixed,
}

impl BranchKind {
    pub fn name(self) -> &'static str {
        match self {
            BranchKind::Large => "large",
            BranchKind::Small => "small",
            BranchKind::Mixed => "mixed",
        }
    }
}

/// Topological type `(m_1, ..., m_l; -m)` together with the genus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TopologicalType {
    pub polygon_orders: Vec<usize>,
    pub punctures: usize,
    pub genus: usize,
}

impl TopologicalType {
    /// `6g - 6 + 2m`, the dimension of the cone of a maximal track.
    pub fn maximal_dimension(&self) -> i64 {
        6 * self.genus as i64 - 6 + 2 * self.punctures as i64
    }

    pub fn is_maximal(&self) -> bool {
        self.polygon_orders.iter().all(|&m| m == 1)
    }

    /// Expected cone dimension of a recurrent track of this type.
    pub fn expected_dimension(&self, orientable: bool) -> i64 {
        let l = self.polygon_orders.len() as i64;
        let g = self.genus as i64;
        if orientable {
            2 * g - 1 + l
        } else {
            2 * g - 2 + self.punctures as i64 + l
        }
    }
}

impl fmt::Display for TopologicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders: Vec<String> = self.polygon_orders.iter().map(|m| m.to_string()).collect();
        if self.punctures == 0 {
            write!(f, "({};0)", orders.join(","))
        } else {
            write!(f, "({};-{})", orders.join(","), self.punctures)
        }
    }
}

/// A generic train track.
///
/// Branches and switches are addressed by dense indices; external ids are
/// kept as labels for serialization. Punctures are stored as the set of
/// switches whose cusp lies in a once-punctured monogon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrainTrack {
    switches: Vec<Switch>,
    branch_labels: Vec<u32>,
    switch_labels: Vec<u32>,
    punctured: BTreeSet<usize>,
    attach: Vec<[(usize, Slot); 2]>,
}

impl TrainTrack {
    /// Builds a track and runs the full validation.
    pub fn new(switches: Vec<Switch>, branch_count: usize, punctured: BTreeSet<usize>) -> Result<Self> {
        let t = Self::new_unchecked_regions(switches, branch_count, punctured)?;
        t.validate()?;
        Ok(t)
    }

    /// Builds a track checking only the slot matching, not region shapes.
    pub fn new_unchecked_regions(
        switches: Vec<Switch>,
        branch_count: usize,
        punctured: BTreeSet<usize>,
    ) -> Result<Self> {
        let branch_labels = (1..=branch_count as u32).collect();
        let switch_labels = (1..=switches.len() as u32).collect();
        Self::with_labels(switches, branch_labels, switch_labels, punctured)
    }

    pub(crate) fn with_labels(
        switches: Vec<Switch>,
        branch_labels: Vec<u32>,
        switch_labels: Vec<u32>,
        punctured: BTreeSet<usize>,
    ) -> Result<Self> {
        let e = branch_labels.len();
        let mut attach: Vec<[Option<(usize, Slot)>; 2]> = vec![[None, None]; e];
        for (si, sw) in switches.iter().enumerate() {
            for slot in Slot::ALL {
                let h = sw.slot(slot);
                if h.branch >= e {
                    return Err(TrakError::SlotConflict(format!(
                        "switch {} references unknown branch index {}",
                        switch_labels.get(si).copied().unwrap_or(0),
                        h.branch
                    )));
                }
                let cell = &mut attach[h.branch][h.end.index()];
                if cell.is_some() {
                    return Err(TrakError::SlotConflict(format!(
                        "branch {} end {} attached twice",
                        branch_labels[h.branch],
                        h.end.index() + 1
                    )));
                }
                *cell = Some((si, slot));
            }
        }
        let mut full = Vec::with_capacity(e);
        for (b, ends) in attach.iter().enumerate() {
            let mut pair = [(0, Slot::Large); 2];
            for k in 0..2 {
                match ends[k] {
                    Some(x) => pair[k] = x,
                    None => {
                        return Err(TrakError::DanglingEnd {
                            branch: branch_labels[b],
                            end: k as u8 + 1,
                        })
                    }
                }
            }
            full.push(pair);
        }
        if let Some(&s) = punctured.iter().find(|&&s| s >= switches.len()) {
            return Err(TrakError::SlotConflict(format!("puncture at unknown switch {s}")));
        }
        Ok(Self {
            switches,
            branch_labels,
            switch_labels,
            punctured,
            attach: full,
        })
    }

    pub fn branch_count(&self) -> usize {
        self.branch_labels.len()
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn switch(&self, s: usize) -> &Switch {
        &self.switches[s]
    }

    pub fn branch_labels(&self) -> &[u32] {
        &self.branch_labels
    }

    pub fn switch_labels(&self) -> &[u32] {
        &self.switch_labels
    }

    /// Switches whose cusp lies in a once-punctured monogon.
    pub fn punctured_cusps(&self) -> &BTreeSet<usize> {
        &self.punctured
    }

    /// Dense index of the branch with external id `label`.
    pub fn branch_index(&self, label: u32) -> Option<usize> {
        self.branch_labels.iter().position(|&l| l == label)
    }

    /// Switch and slot occupied by a half-branch end.
    pub fn attachment(&self, h: HalfBranchEnd) -> (usize, Slot) {
        self.attach[h.branch][h.end.index()]
    }

    /// Relabels branches and switches with `1..=n` in dense order.
    pub fn with_default_labels(&self) -> Self {
        let mut t = self.clone();
        t.branch_labels = (1..=t.branch_count() as u32).collect();
        t.switch_labels = (1..=t.switch_count() as u32).collect();
        t
    }

    pub fn classify_branch(&self, b: usize) -> Result<BranchKind> {
        if b >= self.branch_count() {
            return Err(TrakError::UnknownBranch(b));
        }
        let l0 = self.attach[b][0].1 == Slot::Large;
        let l1 = self.attach[b][1].1 == Slot::Large;
        Ok(match (l0, l1) {
            (true, true) => BranchKind::Large,
            (false, false) => BranchKind::Small,
            _ => BranchKind::Mixed,
        })
    }

    /// Large branches in ascending dense order.
    pub fn large_branches(&self) -> Vec<usize> {
        (0..self.branch_count())
            .filter(|&b| self.classify_branch(b) == Ok(BranchKind::Large))
            .collect()
    }

    pub fn branches_of_kind(&self, kind: BranchKind) -> Vec<usize> {
        (0..self.branch_count())
            .filter(|&b| self.classify_branch(b) == Ok(kind))
            .collect()
    }

    /// Checks the region rules: no disc with fewer than three cusps unless it
    /// is a marked once-punctured monogon, and every mark is on a monogon.
    pub fn validate(&self) -> Result<()> {
        let regions = self.complementary_regions();
        for (i, r) in regions.iter().enumerate() {
            if r.punctured {
                if r.cusps != 1 {
                    return Err(TrakError::RegionConstraint(format!(
                        "punctured region {i} has {} cusps",
                        r.cusps
                    )));
                }
            } else if r.cusps < 3 {
                return Err(TrakError::RegionConstraint(format!(
                    "region {i} is a disc with {} cusps",
                    r.cusps
                )));
            }
        }
        for &s in &self.punctured {
            if !regions.iter().any(|r| r.punctured && r.cusp_switches.contains(&s)) {
                return Err(TrakError::RegionConstraint(format!(
                    "puncture mark at switch {s} is not a monogon cusp"
                )));
            }
        }
        Ok(())
    }

    /// Topological type of the surface filled by the track.
    pub fn topological_type(&self) -> Result<TopologicalType> {
        let regions = self.complementary_regions();
        let mut orders = Vec::new();
        let mut punctures = 0usize;
        let mut discs = 0i64;
        for r in &regions {
            if r.punctured {
                punctures += 1;
            } else {
                discs += 1;
                if r.cusps < 2 {
                    return Err(TrakError::RegionConstraint(format!(
                        "disc region with {} cusps has no polygon order",
                        r.cusps
                    )));
                }
                orders.push(r.cusps - 2);
            }
        }
        orders.sort_unstable();
        let components = self.components().len() as i64;
        let chi = self.switch_count() as i64 - self.branch_count() as i64 + discs;
        // chi(S) = 2c - 2g - m summed over components.
        let twice_g = 2 * components - chi - punctures as i64;
        if twice_g < 0 || twice_g % 2 != 0 {
            return Err(TrakError::EulerCharacteristic(format!(
                "chi={chi}, punctures={punctures} gives non-integral genus"
            )));
        }
        let genus = (twice_g / 2) as usize;
        let sum: i64 = orders.iter().map(|&m| m as i64).sum();
        if components == 1 && sum != 4 * genus as i64 - 4 + punctures as i64 {
            return Err(TrakError::EulerCharacteristic(format!(
                "polygon orders sum to {sum}, expected 4g-4+m with g={genus}, m={punctures}"
            )));
        }
        Ok(TopologicalType {
            polygon_orders: orders,
            punctures,
            genus,
        })
    }

    /// Connected components as sorted lists of switch indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.switch_count();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut members = Vec::new();
            while let Some(s) = stack.pop() {
                members.push(s);
                for slot in Slot::ALL {
                    let h = self.switches[s].slot(slot);
                    let (t, _) = self.attachment(h.opposite());
                    if comp[t] == usize::MAX {
                        comp[t] = id;
                        stack.push(t);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether every component admits a consistent branch orientation.
    pub fn is_orientable(&self) -> bool {
        self.component_orientability().iter().all(|&o| o)
    }

    /// Orientability flag per component, in the order of [`Self::components`].
    pub fn component_orientability(&self) -> Vec<bool> {
        // sign[end code] = +1 if the branch leaves its switch at that end.
        let e = self.branch_count();
        let mut sign = vec![0i8; 2 * e];
        let mut comp_ok = Vec::new();
        for comp in self.components() {
            let mut ok = true;
            let seed = self.switches[comp[0]].large;
            let mut stack = vec![(seed, 1i8)];
            while let Some((h, s)) = stack.pop() {
                let c = h.code();
                if sign[c] != 0 {
                    if sign[c] != s {
                        ok = false;
                    }
                    continue;
                }
                sign[c] = s;
                // The two ends of one branch have opposite signs.
                stack.push((h.opposite(), -s));
                let (sw, slot) = self.attachment(h);
                let sw = &self.switches[sw];
                match slot {
                    Slot::Large => {
                        stack.push((sw.left, -s));
                        stack.push((sw.right, -s));
                    }
                    Slot::Left => {
                        stack.push((sw.large, -s));
                        stack.push((sw.right, s));
                    }
                    Slot::Right => {
                        stack.push((sw.large, -s));
                        stack.push((sw.left, s));
                    }
                }
            }
            comp_ok.push(ok);
        }
        comp_ok
    }

    /// Pairs `(large e, small s)` whose union is an embedded smooth loop.
    pub fn twist_connectors(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for e in self.large_branches() {
            let (v, _) = self.attach[e][0];
            let (w, _) = self.attach[e][1];
            let sv = &self.switches[v];
            for h in [sv.left, sv.right] {
                if h.branch == e {
                    continue;
                }
                let (t, slot) = self.attachment(h.opposite());
                if t == w && slot != Slot::Large && !out.contains(&(e, h.branch)) {
                    out.push((e, h.branch));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Mirror image: swaps left and right at every switch.
    pub fn mirror(&self) -> Self {
        let switches = self
            .switches
            .iter()
            .map(|s| Switch::new(s.large, s.right, s.left))
            .collect();
        Self::with_labels(
            switches,
            self.branch_labels.clone(),
            self.switch_labels.clone(),
            self.punctured.clone(),
        )
        .expect("mirroring preserves the slot matching")
    }

    /// Relabels dense indices: branch `b` becomes `branch_perm[b]`, switch
    /// `s` becomes `switch_perm[s]`; `flip[b]` swaps the ends of branch `b`.
    pub fn permuted(&self, switch_perm: &[usize], branch_perm: &[usize], flip: &[bool]) -> Self {
        let map_end = |h: HalfBranchEnd| {
            let end = if flip[h.branch] { h.end.other() } else { h.end };
            HalfBranchEnd::new(branch_perm[h.branch], end)
        };
        let mut switches = vec![self.switches[0]; self.switch_count()];
        let mut switch_labels = vec![0; self.switch_count()];
        for (s, sw) in self.switches.iter().enumerate() {
            switches[switch_perm[s]] = Switch::new(map_end(sw.large), map_end(sw.left), map_end(sw.right));
            switch_labels[switch_perm[s]] = self.switch_labels[s];
        }
        let mut branch_labels = vec![0; self.branch_count()];
        for b in 0..self.branch_count() {
            branch_labels[branch_perm[b]] = self.branch_labels[b];
        }
        let punctured = self.punctured.iter().map(|&s| switch_perm[s]).collect();
        Self::with_labels(switches, branch_labels, switch_labels, punctured)
            .expect("relabeling preserves the slot matching")
    }

    pub(crate) fn from_raw(
        switches: Vec<Switch>,
        branch_labels: Vec<u32>,
        switch_labels: Vec<u32>,
        punctured: BTreeSet<usize>,
    ) -> Result<Self> {
        Self::with_labels(switches, branch_labels, switch_labels, punctured)
    }

    pub(crate) fn into_parts(self) -> (Vec<Switch>, Vec<u32>, Vec<u32>, BTreeSet<usize>) {
        (self.switches, self.branch_labels, self.switch_labels, self.punctured)
    }
}
