#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;
use trak_core::symbolic::{build_subshift, BuildOptions, NumberedTrack, Subshift};
use trak_core::{parse_track, TrainTrack};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> TrainTrack {
    let path = fixtures_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_track(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// The recurrent corpus: named fixtures plus `fixtures/corpus/*.trk`.
pub fn corpus() -> Vec<(String, TrainTrack)> {
    let mut out: Vec<(String, TrainTrack)> = [
        "sphere5.trk",
        "genus2one.trk",
        "genus2step1.trk",
        "genus2step2.trk",
        "genus2max.trk",
        "twistconn.trk",
        "twoconn.trk",
    ]
    .iter()
    .map(|n| (n.to_string(), fixture(n)))
    .collect();
    let mut names: Vec<_> = std::fs::read_dir(fixtures_dir().join("corpus"))
        .expect("corpus directory")
        .map(|e| e.expect("dir entry").file_name().into_string().expect("UTF-8 name"))
        .filter(|n| n.ends_with(".trk"))
        .collect();
    names.sort();
    for n in names {
        let t = fixture(&format!("corpus/{n}"));
        out.push((n, t));
    }
    out
}

/// The closed subshift generated by `sphere5.trk`.
pub fn sphere5() -> &'static Subshift {
    static S: OnceLock<Subshift> = OnceLock::new();
    S.get_or_init(|| {
        build_subshift(
            &[NumberedTrack::identity(fixture("sphere5.trk"))],
            BuildOptions::default(),
        )
        .expect("sphere5 subshift builds")
    })
}

/// `w` followed by its first letter.
pub fn closed(w: &[usize]) -> Vec<usize> {
    let mut c = w.to_vec();
    c.push(w[0]);
    c
}
