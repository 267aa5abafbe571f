//! Agreement between two annotations of the same volumes: micro-averaged
//! precision, recall and F-measure for scene boundary detection and for
//! character identification.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Corpus, CorpusError, Scene};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PrfCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl PrfCounts {
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f_measure(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AgreementReport {
    pub scene_boundary: PrfCounts,
    pub character_id: PrfCounts,
}

fn overlap(a: &Scene, b: &Scene) -> u64 {
    let lo = a.span.start_panel.max(b.span.start_panel);
    let hi = a.span.end_panel.min(b.span.end_panel);
    if lo > hi {
        0
    } else {
        (hi - lo + 1) as u64
    }
}

/// Compares `candidate` against `reference` over their shared volumes.
///
/// Scene boundaries match only at exact start positions (page and panel).
/// For character identification every candidate scene is aligned to the
/// reference scene with the largest panel intersection in the same volume
/// (ties to the earlier scene), and participant sets are compared.
pub fn compare_annotations(
    reference: &Corpus,
    candidate: &Corpus,
) -> Result<AgreementReport, CorpusError> {
    let ref_volumes: BTreeSet<&str> = reference.volumes().iter().map(|v| v.id.as_str()).collect();
    let shared: BTreeSet<&str> = candidate
        .volumes()
        .iter()
        .map(|v| v.id.as_str())
        .filter(|id| ref_volumes.contains(id))
        .collect();
    if shared.is_empty() {
        return Err(CorpusError::NoSharedVolumes);
    }

    let mut boundary = PrfCounts::default();
    let mut character = PrfCounts::default();

    for &vol in &shared {
        let ref_scenes: Vec<&Scene> = reference
            .scenes()
            .iter()
            .filter(|s| s.volume_id == vol)
            .collect();
        let cand_scenes: Vec<&Scene> = candidate
            .scenes()
            .iter()
            .filter(|s| s.volume_id == vol)
            .collect();

        let ref_starts: BTreeSet<(u32, u32)> = ref_scenes
            .iter()
            .map(|s| (s.span.start_page, s.span.start_panel))
            .collect();
        let cand_starts: BTreeSet<(u32, u32)> = cand_scenes
            .iter()
            .map(|s| (s.span.start_page, s.span.start_panel))
            .collect();
        boundary.tp += ref_starts.intersection(&cand_starts).count() as u64;
        boundary.fp += cand_starts.difference(&ref_starts).count() as u64;
        boundary.fn_ += ref_starts.difference(&cand_starts).count() as u64;

        for cs in &cand_scenes {
            let mut best: Option<(&Scene, u64)> = None;
            for rs in &ref_scenes {
                let ov = overlap(cs, rs);
                if ov > 0 && best.is_none_or(|(_, b)| ov > b) {
                    best = Some((rs, ov));
                }
            }
            let cand_parts: BTreeSet<&str> = cs.distinct_participants().into_iter().collect();
            match best {
                Some((rs, _)) => {
                    let ref_parts: BTreeSet<&str> = rs.distinct_participants().into_iter().collect();
                    character.tp += cand_parts.intersection(&ref_parts).count() as u64;
                    character.fp += cand_parts.difference(&ref_parts).count() as u64;
                    character.fn_ += ref_parts.difference(&cand_parts).count() as u64;
                }
                None => {
                    character.fp += cand_parts.len() as u64;
                }
            }
        }
    }

    Ok(AgreementReport {
        scene_boundary: boundary,
        character_id: character,
    })
}
