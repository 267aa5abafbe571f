//! Corpus builders shared by unit tests.

use crate::corpus::{Character, Corpus, PanelSpan, Scene, Series, Sex, Volume};

pub(crate) fn characters_for(scene_participants: &[&[&str]]) -> Vec<Character> {
    let mut ids: Vec<&str> = scene_participants
        .iter()
        .flat_map(|s| s.iter().copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids.iter()
        .map(|id| Character {
            id: id.to_string(),
            name: Some(id.to_string()),
            named: true,
            sex: Sex::Unknown,
            collective: false,
        })
        .collect()
}

pub(crate) fn volume(id: &str, order: u32) -> Volume {
    Volume {
        id: id.to_string(),
        series: Series::Main,
        title: format!("Volume {id}"),
        publication_order: order,
        page_count: 0,
        panel_count: 0,
        arc_id: None,
    }
}

fn scenes_for(volume_id: &str, start_order: u64, participants: &[&[&str]]) -> Vec<Scene> {
    participants
        .iter()
        .enumerate()
        .map(|(i, parts)| Scene {
            id: format!("{volume_id}-s{i}"),
            volume_id: volume_id.to_string(),
            order_index: start_order + i as u64,
            span: PanelSpan {
                start_page: 1,
                start_panel: (i + 1) as u32,
                end_page: 1,
                end_panel: (i + 1) as u32,
            },
            participants: parts.iter().map(|p| p.to_string()).collect(),
        })
        .collect()
}

/// One volume, one scene per participant list.
pub(crate) fn toy_corpus(scene_participants: &[&[&str]]) -> Corpus {
    Corpus::new(
        "toy",
        characters_for(scene_participants),
        vec![volume("v1", 1)],
        scenes_for("v1", 1, scene_participants),
        vec![],
    )
    .unwrap()
}

pub(crate) fn single_volume_corpus(scene_participants: &[&[&str]]) -> Corpus {
    toy_corpus(scene_participants)
}

pub(crate) fn two_volume_corpus(first: &[&[&str]], second: &[&[&str]]) -> Corpus {
    let all: Vec<&[&str]> = first.iter().chain(second.iter()).copied().collect();
    let mut scenes = scenes_for("v1", 1, first);
    scenes.extend(scenes_for("v2", 1 + first.len() as u64, second));
    Corpus::new(
        "toy2",
        characters_for(&all),
        vec![volume("v1", 1), volume("v2", 2)],
        scenes,
        vec![],
    )
    .unwrap()
}
