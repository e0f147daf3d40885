//! Random generic train tracks.
//!
//! Tracks come from uniform perfect matchings of switch slots; every monogon
//! of the resulting ribbon graph is marked as punctured and the result is
//! kept only when it passes validation.

use super::{HalfBranchEnd, Slot, Switch, TrainTrack};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

fn finish(switches: Vec<Switch>, e: usize) -> Option<TrainTrack> {
    let t = TrainTrack::new_unchecked_regions(switches, e, BTreeSet::new()).ok()?;
    let marks: BTreeSet<usize> = t
        .complementary_regions()
        .iter()
        .filter(|r| r.cusps == 1)
        .map(|r| r.cusp_switches[0])
        .collect();
    let (sw, _, _, _) = t.into_parts();
    let t = TrainTrack::new_unchecked_regions(sw, e, marks).ok()?;
    t.validate().ok()?;
    Some(t)
}

/// A random valid track with `v` switches, or `None` if the sample fails
/// validation. `v` must be even and positive.
pub fn random_track<R: Rng + ?Sized>(rng: &mut R, v: usize) -> Option<TrainTrack> {
    if v == 0 || !v.is_multiple_of(2) {
        return None;
    }
    let e = 3 * v / 2;
    let mut slots: Vec<(usize, Slot)> = (0..v).flat_map(|s| Slot::ALL.map(|sl| (s, sl))).collect();
    slots.shuffle(rng);
    let mut switches = vec![
        Switch::new(
            HalfBranchEnd::first(0),
            HalfBranchEnd::first(0),
            HalfBranchEnd::first(0)
        );
        v
    ];
    for b in 0..e {
        let (s1, sl1) = slots[2 * b];
        let (s2, sl2) = slots[2 * b + 1];
        *switches[s1].slot_mut(sl1) = HalfBranchEnd::first(b);
        *switches[s2].slot_mut(sl2) = HalfBranchEnd::second(b);
    }
    finish(switches, e)
}

/// A random valid orientable track with `v` switches. Half of the switches
/// merge two incoming branches, the other half split one.
pub fn random_oriented_track<R: Rng + ?Sized>(rng: &mut R, v: usize) -> Option<TrainTrack> {
    if v == 0 || !v.is_multiple_of(2) {
        return None;
    }
    let e = 3 * v / 2;
    let mut outgoing = Vec::with_capacity(e);
    let mut incoming = Vec::with_capacity(e);
    for s in 0..v {
        if s < v / 2 {
            outgoing.push((s, Slot::Large));
            incoming.push((s, Slot::Left));
            incoming.push((s, Slot::Right));
        } else {
            incoming.push((s, Slot::Large));
            outgoing.push((s, Slot::Left));
            outgoing.push((s, Slot::Right));
        }
    }
    incoming.shuffle(rng);
    let mut switches = vec![
        Switch::new(
            HalfBranchEnd::first(0),
            HalfBranchEnd::first(0),
            HalfBranchEnd::first(0)
        );
        v
    ];
    for b in 0..e {
        let (s1, sl1) = outgoing[b];
        let (s2, sl2) = incoming[b];
        *switches[s1].slot_mut(sl1) = HalfBranchEnd::first(b);
        *switches[s2].slot_mut(sl2) = HalfBranchEnd::second(b);
    }
    finish(switches, e)
}

/// Samples until `accept` holds or `tries` samples have been drawn.
pub fn search<R, F>(rng: &mut R, v: usize, oriented: bool, tries: usize, mut accept: F) -> Option<TrainTrack>
where
    R: Rng + ?Sized,
    F: FnMut(&TrainTrack) -> bool,
{
    for _ in 0..tries {
        let t = if oriented {
            random_oriented_track(rng, v)
        } else {
            random_track(rng, v)
        };
        if let Some(t) = t {
            if accept(&t) {
                return Some(t);
            }
        }
    }
    None
}
