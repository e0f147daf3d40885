//! Line-oriented track file format.
//!
//! ```text
//! track v1
//! branch 1
//! switch 1 large=1.1 left=2.1 right=3.2
//! puncture region=0
//! ```

use super::{EndSide, HalfBranchEnd, Switch, TrainTrack};
use crate::error::{Result, TrakError};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

fn syntax(line: usize, column: usize, message: impl Into<String>) -> TrakError {
    TrakError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_id(tok: &str, line: usize, col: usize) -> Result<u32> {
    tok.parse::<u32>()
        .map_err(|_| syntax(line, col, format!("expected a non-negative integer id, found `{tok}`")))
}

fn parse_end(tok: &str, line: usize, col: usize) -> Result<(u32, EndSide)> {
    let (b, e) = tok
        .split_once('.')
        .ok_or_else(|| syntax(line, col, format!("expected <branch>.<1|2>, found `{tok}`")))?;
    let b = parse_id(b, line, col)?;
    let e = match e {
        "1" => EndSide::First,
        "2" => EndSide::Second,
        _ => return Err(syntax(line, col, format!("end must be 1 or 2, found `{e}`"))),
    };
    Ok((b, e))
}

struct RawSwitch {
    line: usize,
    large: (u32, EndSide),
    left: (u32, EndSide),
    right: (u32, EndSide),
}

/// Parses and validates a track file.
pub fn parse_track(text: &str) -> Result<TrainTrack> {
    let mut header_seen = false;
    let mut branches: BTreeSet<u32> = BTreeSet::new();
    let mut switches: BTreeMap<u32, RawSwitch> = BTreeMap::new();
    let mut punctures: Vec<(usize, usize)> = Vec::new();
    let mut last_line = 0;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        if !header_seen {
            if toks.len() == 2 && toks[0].1 == "track" && toks[1].1 == "v1" {
                header_seen = true;
                continue;
            }
            return Err(syntax(line_no, toks[0].0, "expected header `track v1`"));
        }
        let (col0, kw) = toks[0];
        match kw {
            "branch" => {
                if toks.len() != 2 {
                    return Err(syntax(line_no, col0, "expected `branch <id>`"));
                }
                let id = parse_id(toks[1].1, line_no, toks[1].0)?;
                if !branches.insert(id) {
                    return Err(syntax(line_no, toks[1].0, format!("duplicate branch {id}")));
                }
            }
            "switch" => {
                if toks.len() != 5 {
                    return Err(syntax(
                        line_no,
                        col0,
                        "expected `switch <id> large=<b>.<e> left=<b>.<e> right=<b>.<e>`",
                    ));
                }
                let id = parse_id(toks[1].1, line_no, toks[1].0)?;
                let mut slots: [Option<(u32, EndSide)>; 3] = [None, None, None];
                for &(col, tok) in &toks[2..] {
                    let (key, val) = tok
                        .split_once('=')
                        .ok_or_else(|| syntax(line_no, col, format!("expected key=value, found `{tok}`")))?;
                    let k = match key {
                        "large" => 0,
                        "left" => 1,
                        "right" => 2,
                        _ => return Err(syntax(line_no, col, format!("unknown slot `{key}`"))),
                    };
                    if slots[k].is_some() {
                        return Err(syntax(line_no, col, format!("slot `{key}` given twice")));
                    }
                    slots[k] = Some(parse_end(val, line_no, col + key.len() + 1)?);
                }
                let raw = RawSwitch {
                    line: line_no,
                    large: slots[0].unwrap(),
                    left: slots[1].unwrap(),
                    right: slots[2].unwrap(),
                };
                if switches.insert(id, raw).is_some() {
                    return Err(syntax(line_no, toks[1].0, format!("duplicate switch {id}")));
                }
            }
            "puncture" => {
                if toks.len() != 2 {
                    return Err(syntax(line_no, col0, "expected `puncture region=<index>`"));
                }
                let (col, tok) = toks[1];
                let idx = tok
                    .strip_prefix("region=")
                    .ok_or_else(|| syntax(line_no, col, "expected `region=<index>`"))?;
                let idx = idx
                    .parse::<usize>()
                    .map_err(|_| syntax(line_no, col + 7, format!("bad region index `{idx}`")))?;
                punctures.push((idx, line_no));
            }
            other => return Err(syntax(line_no, col0, format!("unknown keyword `{other}`"))),
        }
    }
    if !header_seen {
        return Err(syntax(last_line.max(1), 1, "missing header `track v1`"));
    }
    if switches.is_empty() {
        return Err(syntax(last_line.max(1), 1, "track has no switches"));
    }

    let branch_labels: Vec<u32> = branches.iter().copied().collect();
    let index_of: BTreeMap<u32, usize> = branch_labels.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut dense = Vec::with_capacity(switches.len());
    let mut switch_labels = Vec::with_capacity(switches.len());
    for (&id, raw) in &switches {
        let conv = |(b, e): (u32, EndSide)| -> Result<HalfBranchEnd> {
            index_of.get(&b).map(|&i| HalfBranchEnd::new(i, e)).ok_or_else(|| {
                TrakError::SlotConflict(format!(
                    "switch {id} (line {}) references undeclared branch {b}",
                    raw.line
                ))
            })
        };
        dense.push(Switch::new(conv(raw.large)?, conv(raw.left)?, conv(raw.right)?));
        switch_labels.push(id);
    }
    let t = TrainTrack::from_raw(dense, branch_labels, switch_labels, BTreeSet::new())?;
    let regions = t.complementary_regions();
    let mut marks = BTreeSet::new();
    for (idx, line) in punctures {
        let r = regions
            .get(idx)
            .ok_or_else(|| TrakError::RegionConstraint(format!("line {line}: no region {idx}")))?;
        if r.cusps != 1 {
            return Err(TrakError::RegionConstraint(format!(
                "line {line}: region {idx} has {} cusps, a puncture needs a monogon",
                r.cusps
            )));
        }
        marks.insert(r.cusp_switches[0]);
    }
    let (sw, bl, sl, _) = t.into_parts();
    let t = TrainTrack::from_raw(sw, bl, sl, marks)?;
    t.validate()?;
    Ok(t)
}

/// Permutes dense indices so that they follow ascending labels.
pub(crate) fn label_sorted(t: &TrainTrack) -> TrainTrack {
    let rank = |labels: &[u32]| {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        let mut perm = vec![0; labels.len()];
        for (pos, &i) in order.iter().enumerate() {
            perm[i] = pos;
        }
        perm
    };
    let bp = rank(t.branch_labels());
    let sp = rank(t.switch_labels());
    t.permuted(&sp, &bp, &vec![false; t.branch_count()])
}

/// Serializes a track in normalized form.
pub fn serialize_track(t: &TrainTrack) -> String {
    let t = label_sorted(t);
    let mut out = String::from("track v1\n");
    for &b in t.branch_labels() {
        let _ = writeln!(out, "branch {b}");
    }
    let end = |h: HalfBranchEnd| format!("{}.{}", t.branch_labels()[h.branch], h.end.index() + 1);
    for (s, sw) in t.switches().iter().enumerate() {
        let _ = writeln!(
            out,
            "switch {} large={} left={} right={}",
            t.switch_labels()[s],
            end(sw.large),
            end(sw.left),
            end(sw.right)
        );
    }
    for (i, r) in t.complementary_regions().iter().enumerate() {
        if r.punctured {
            let _ = writeln!(out, "puncture region={i}");
        }
    }
    out
}
