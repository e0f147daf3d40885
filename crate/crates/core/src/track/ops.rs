//! Adding and removing small branches.

use super::{Dart, HalfBranchEnd, Slot, Switch, TrainTrack};
use crate::error::{Result, TrakError};
use std::collections::BTreeSet;

/// Direction in which a newly attached branch merges into the branch it
/// lands on, relative to the dart's direction of travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flow {
    Forward,
    Backward,
}

/// Result of removing a small branch.
#[derive(Clone, Debug)]
pub struct Removal {
    /// Unvalidated subtrack; regions may violate the cusp rules, and marks of
    /// dissolved puncture cusps are dropped.
    pub track: TrainTrack,
    /// Old branch index to new branch index; `None` for the removed branch.
    pub branch_map: Vec<Option<usize>>,
}

struct Scratch {
    switches: Vec<Option<Switch>>,
    alive: Vec<bool>,
    labels: Vec<u32>,
    switch_labels: Vec<u32>,
    punctured: BTreeSet<usize>,
    merged_into: Vec<usize>,
}

impl Scratch {
    fn from_track(t: &TrainTrack) -> Self {
        Self {
            switches: t.switches().iter().copied().map(Some).collect(),
            alive: vec![true; t.branch_count()],
            labels: t.branch_labels().to_vec(),
            switch_labels: t.switch_labels().to_vec(),
            punctured: t.punctured_cusps().clone(),
            merged_into: (0..t.branch_count()).collect(),
        }
    }

    fn locate(&self, h: HalfBranchEnd) -> Option<(usize, Slot)> {
        self.switches.iter().enumerate().find_map(|(i, s)| {
            let s = s.as_ref()?;
            Slot::ALL.into_iter().find(|&sl| s.slot(sl) == h).map(|sl| (i, sl))
        })
    }

    /// Removes switch `s` once one of its slots has been vacated, joining the
    /// two remaining branches through it.
    fn dissolve(&mut self, s: usize, vacated: Slot) -> Result<()> {
        let sw = self.switches[s].take().expect("switch present");
        let rest: Vec<HalfBranchEnd> = Slot::ALL
            .into_iter()
            .filter(|&sl| sl != vacated)
            .map(|sl| sw.slot(sl))
            .collect();
        let (keep, drop) = (rest[0], rest[1]);
        if keep.branch == drop.branch {
            return Err(TrakError::InvalidMove(
                "removal leaves a closed curve without switches".into(),
            ));
        }
        // The puncture now lies in a larger region; the mark has no cusp left.
        self.punctured.remove(&s);
        let far = drop.opposite();
        let (t, slot) = self.locate(far).expect("far end attached");
        *self.switches[t].as_mut().unwrap().slot_mut(slot) = HalfBranchEnd::new(keep.branch, keep.end);
        self.alive[drop.branch] = false;
        self.merged_into[drop.branch] = keep.branch;
        Ok(())
    }

    fn finish(self) -> Result<(TrainTrack, Vec<Option<usize>>)> {
        let e = self.alive.len();
        let mut new_index = vec![usize::MAX; e];
        let mut labels = Vec::new();
        for b in 0..e {
            if self.alive[b] {
                new_index[b] = labels.len();
                labels.push(self.labels[b]);
            }
        }
        let mut switch_index = vec![usize::MAX; self.switches.len()];
        let mut switches = Vec::new();
        let mut switch_labels = Vec::new();
        for (i, s) in self.switches.iter().enumerate() {
            if let Some(sw) = s {
                switch_index[i] = switches.len();
                let m = |h: HalfBranchEnd| HalfBranchEnd::new(new_index[h.branch], h.end);
                switches.push(Switch::new(m(sw.large), m(sw.left), m(sw.right)));
                switch_labels.push(self.switch_labels[i]);
            }
        }
        let punctured = self.punctured.iter().map(|&s| switch_index[s]).collect();
        let mut map = vec![None; e];
        for (b, slot) in map.iter_mut().enumerate() {
            let mut r = b;
            let mut guard = 0;
            while self.merged_into[r] != r {
                r = self.merged_into[r];
                guard += 1;
                if guard > e {
                    break;
                }
            }
            if self.alive[r] {
                *slot = Some(new_index[r]);
            }
        }
        let t = TrainTrack::from_raw(switches, labels, switch_labels, punctured)?;
        Ok((t, map))
    }
}

/// Removes a small branch joining two distinct switches and dissolves the two
/// resulting bivalent switches.
pub fn remove_small_branch(t: &TrainTrack, b: usize) -> Result<Removal> {
    let kind = t.classify_branch(b)?;
    if kind != super::BranchKind::Small {
        return Err(TrakError::WrongBranchKind {
            branch: b,
            expected: "small",
            actual: kind.name(),
        });
    }
    let (s1, slot1) = t.attachment(HalfBranchEnd::first(b));
    let (s2, slot2) = t.attachment(HalfBranchEnd::second(b));
    if s1 == s2 {
        return Err(TrakError::Precondition(
            "small branch must join two distinct switches".into(),
        ));
    }
    let mut sc = Scratch::from_track(t);
    sc.alive[b] = false;
    sc.dissolve(s1, slot1)?;
    sc.dissolve(s2, slot2)?;
    let (track, mut map) = sc.finish()?;
    map[b] = None;
    Ok(Removal { track, branch_map: map })
}

/// Splits the branch of `d` at a new switch and returns the new switch, with
/// the free slot left pointing at `placeholder`.
fn subdivide(
    switches: &mut Vec<Switch>,
    labels: &mut Vec<u32>,
    switch_labels: &mut Vec<u32>,
    locate: &dyn Fn(&[Switch], HalfBranchEnd) -> (usize, Slot),
    d: Dart,
    flow: Flow,
    placeholder: HalfBranchEnd,
) -> usize {
    let x = d.branch;
    let y = labels.len();
    labels.push(labels.iter().copied().max().unwrap_or(0) + 1);
    let (t, slot) = locate(switches, HalfBranchEnd::second(x));
    *switches[t].slot_mut(slot) = HalfBranchEnd::second(y);
    let x_end = HalfBranchEnd::second(x);
    let y_end = HalfBranchEnd::first(y);
    let (backward, forward) = match d.end {
        super::EndSide::First => (x_end, y_end),
        super::EndSide::Second => (y_end, x_end),
    };
    // The region lies to the right of the dart. Facing away from the large
    // end, `left` is the counterclockwise-first small slot.
    let sw = match flow {
        Flow::Forward => Switch::new(forward, backward, placeholder),
        Flow::Backward => Switch::new(backward, placeholder, forward),
    };
    switches.push(sw);
    switch_labels.push(switch_labels.iter().copied().max().unwrap_or(0) + 1);
    switches.len() - 1
}

/// Inserts a small branch inside the region bounded by the darts `a.0` and
/// `b.0`. The darts must lie on distinct branches of one region.
pub fn insert_small_branch(t: &TrainTrack, a: (Dart, Flow), b: (Dart, Flow)) -> Result<TrainTrack> {
    if a.0.branch == b.0.branch {
        return Err(TrakError::Precondition(
            "attachment darts must lie on distinct branches".into(),
        ));
    }
    let regions = t.complementary_regions();
    let ra = t.region_of_dart(&regions, a.0);
    let rb = t.region_of_dart(&regions, b.0);
    if ra.is_none() || ra != rb {
        return Err(TrakError::Precondition(
            "attachment darts must bound the same region".into(),
        ));
    }
    let (sw, mut labels, mut slabels, punctured) = t.clone().into_parts();
    if regions[ra.unwrap()].punctured {
        return Err(TrakError::Precondition(
            "cannot insert a branch into a punctured monogon".into(),
        ));
    }
    let mut switches = sw;
    let n = labels.len();
    labels.push(labels.iter().copied().max().unwrap_or(0) + 1);
    let locate = |sws: &[Switch], h: HalfBranchEnd| -> (usize, Slot) {
        for (i, s) in sws.iter().enumerate() {
            for sl in Slot::ALL {
                if s.slot(sl) == h {
                    return (i, sl);
                }
            }
        }
        panic!("end not attached")
    };
    subdivide(
        &mut switches,
        &mut labels,
        &mut slabels,
        &locate,
        a.0,
        a.1,
        HalfBranchEnd::first(n),
    );
    subdivide(
        &mut switches,
        &mut labels,
        &mut slabels,
        &locate,
        b.0,
        b.1,
        HalfBranchEnd::second(n),
    );
    TrainTrack::from_raw(switches, labels, slabels, punctured)
}
