//! Boundary tracing of complementary regions.

use super::{HalfBranchEnd, Slot, TrainTrack};
use serde::{Deserialize, Serialize};

/// Traversal of a branch starting at the given end, with the region on the
/// right-hand side.
pub type Dart = HalfBranchEnd;

/// A complementary region of a train track.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// Cyclic boundary. When the region has cusps the list starts right after
    /// a cusp.
    pub boundary: Vec<Dart>,
    /// `cusp_after[i]` is set when a cusp follows `boundary[i]`.
    pub cusp_after: Vec<bool>,
    pub cusps: usize,
    /// Switch of every cusp, in boundary order.
    pub cusp_switches: Vec<usize>,
    pub punctured: bool,
}

impl Region {
    /// Branches of each side, with multiplicity. A side is the smooth arc
    /// between two consecutive cusps.
    pub fn sides(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        for (d, &c) in self.boundary.iter().zip(&self.cusp_after) {
            cur.push(d.branch);
            if c {
                out.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }

    pub fn contains_dart(&self, d: Dart) -> bool {
        self.boundary.contains(&d)
    }
}

impl TrainTrack {
    /// Next dart on the boundary of the region to the right of `d`.
    pub(crate) fn next_dart(&self, d: Dart) -> (Dart, bool) {
        let arrive = d.opposite();
        let (s, slot) = self.attachment(arrive);
        let next = self.switch(s).slot(slot.ccw_next());
        (next, slot == Slot::Left)
    }

    /// All complementary regions, ordered by their smallest dart.
    pub fn complementary_regions(&self) -> Vec<Region> {
        let n = 2 * self.branch_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut darts = Vec::new();
            let mut cusp = Vec::new();
            let mut d = HalfBranchEnd::from_code(start);
            loop {
                seen[d.code()] = true;
                let (next, c) = self.next_dart(d);
                darts.push(d);
                cusp.push(c);
                d = next;
                if d.code() == start {
                    break;
                }
            }
            // Rotate to start after the last cusp.
            if let Some(last) = cusp.iter().rposition(|&c| c) {
                let k = (last + 1) % darts.len();
                darts.rotate_left(k);
                cusp.rotate_left(k);
            }
            let cusp_switches: Vec<usize> = darts
                .iter()
                .zip(&cusp)
                .filter(|(_, &c)| c)
                .map(|(d, _)| self.attachment(d.opposite()).0)
                .collect();
            let cusps = cusp_switches.len();
            let punctured = cusps == 1 && self.punctured_cusps().contains(&cusp_switches[0]);
            out.push(Region {
                boundary: darts,
                cusp_after: cusp,
                cusps,
                cusp_switches,
                punctured,
            });
        }
        out
    }

    /// Index of the region whose boundary contains `d`.
    pub fn region_of_dart(&self, regions: &[Region], d: Dart) -> Option<usize> {
        regions.iter().position(|r| r.contains_dart(d))
    }
}
