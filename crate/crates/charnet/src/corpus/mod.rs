//! Scene-level annotation corpus: characters, volumes, scenes, narrative arcs.
//!
//! A corpus is immutable after construction; every query is a pure function
//! and safe to call from multiple threads.
//!
//! Panel positions are continuous indices within a volume (the page of the
//! first and last panel of a scene is recorded alongside), so the number of
//! panels spanned by a scene is `end_panel - start_panel + 1` and the pages
//! it touches are `start_page..=end_page`.

mod compare;
mod import;
mod io;

pub use compare::{compare_annotations, AgreementReport, PrfCounts};
pub use import::{
    builtin_thorgal_arcs, import_corpus, CharacterColumns, ColumnRef, ImportSpec, PageColumns,
    PanelNumbering, SceneColumns, VolumeColumns,
};
pub use io::{parse_corpus, write_corpus};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::stats;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}: malformed row: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("unknown {kind} id `{id}` referenced by {context}")]
    DanglingRef {
        kind: &'static str,
        id: String,
        context: String,
    },
    #[error("character `{0}` is flagged as named but has no name")]
    NamedWithoutName(String),
    #[error("character `{0}` has sex Mixed but is not collective")]
    MixedNotCollective(String),
    #[error("volumes `{0}` and `{1}` share publication order {2}")]
    DuplicatePublicationOrder(String, String, u32),
    #[error("scene `{0}` has no participants")]
    EmptyParticipants(String),
    #[error("scenes `{0}` and `{1}` share order index {2}")]
    DuplicateOrderIndex(String, String, u64),
    #[error("scenes of volume `{0}` are interleaved with another volume or out of publication order")]
    VolumeOrderMismatch(String),
    #[error("scene `{0}` has an inverted panel span")]
    InvertedSpan(String),
    #[error("scene `{scene}` span leaves volume `{volume}` bounds ({what})")]
    SpanOutOfBounds {
        scene: String,
        volume: String,
        what: String,
    },
    #[error("scene `{scene}` starts before its predecessor `{previous}` within the volume")]
    NonMonotoneStart { scene: String, previous: String },
    #[error("volume `{volume}` is assigned to arc `{in_volume}` but listed under arc `{in_arc}`")]
    ArcAssignmentConflict {
        volume: String,
        in_volume: String,
        in_arc: String,
    },
    #[error("annotations share no volume")]
    NoSharedVolumes,
    #[error("need at least {need} scenes, found {got}")]
    NotEnoughScenes { need: usize, got: usize },
    #[error("missing input file `{0}`")]
    MissingFile(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{kind} id `{id}` is empty or contains a separator character")]
    BadToken { kind: &'static str, id: String },
    #[error("{kind} `{id}` has a text field containing a tab or newline")]
    BadText { kind: &'static str, id: String },
}

fn check_token(kind: &'static str, id: &str) -> Result<(), CorpusError> {
    if id.is_empty() || id.contains(['\t', ',', '\n', '\r']) {
        return Err(CorpusError::BadToken {
            kind,
            id: id.to_string(),
        });
    }
    Ok(())
}

fn check_text(kind: &'static str, id: &str, text: &str) -> Result<(), CorpusError> {
    if text.contains(['\t', '\n', '\r']) {
        return Err(CorpusError::BadText {
            kind,
            id: id.to_string(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sex {
    Female,
    Male,
    Mixed,
    Unknown,
}

impl Sex {
    pub fn code(self) -> char {
        match self {
            Sex::Female => 'F',
            Sex::Male => 'M',
            Sex::Mixed => 'X',
            Sex::Unknown => 'U',
        }
    }

    pub fn from_code(c: &str) -> Option<Sex> {
        match c {
            "F" => Some(Sex::Female),
            "M" => Some(Sex::Male),
            "X" => Some(Sex::Mixed),
            "U" => Some(Sex::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Series {
    Main,
    Kriss,
    Louve,
    YoungThorgal,
    Other,
}

impl Series {
    pub fn token(self) -> &'static str {
        match self {
            Series::Main => "Main",
            Series::Kriss => "Kriss",
            Series::Louve => "Louve",
            Series::YoungThorgal => "YoungThorgal",
            Series::Other => "Other",
        }
    }

    pub fn from_token(tok: &str) -> Option<Series> {
        match tok {
            "Main" => Some(Series::Main),
            "Kriss" => Some(Series::Kriss),
            "Louve" => Some(Series::Louve),
            "YoungThorgal" => Some(Series::YoungThorgal),
            "Other" => Some(Series::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Character {
    pub id: String,
    pub name: Option<String>,
    /// Whether a proper name is explicitly mentioned in the narrative.
    pub named: bool,
    pub sex: Sex,
    /// A single vertex standing for a group of undifferentiated people.
    pub collective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Volume {
    pub id: String,
    pub series: Series,
    pub title: String,
    pub publication_order: u32,
    pub page_count: u32,
    pub panel_count: u32,
    pub arc_id: Option<String>,
}

/// First/last panel of a scene. Panel indices run through the whole volume;
/// page numbers locate the boundary panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PanelSpan {
    pub start_page: u32,
    pub start_panel: u32,
    pub end_page: u32,
    pub end_panel: u32,
}

impl PanelSpan {
    pub fn panel_len(&self) -> u64 {
        (self.end_panel - self.start_panel + 1) as u64
    }

    pub fn page_len(&self) -> u64 {
        (self.end_page - self.start_page + 1) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scene {
    pub id: String,
    pub volume_id: String,
    /// Global chronological position: publication order, then in-volume
    /// order. Overlapping scenes are serialized by start panel.
    pub order_index: u64,
    pub span: PanelSpan,
    /// Duplicates are allowed here (a character can meet a past self);
    /// consumers deduplicate.
    pub participants: Vec<String>,
}

impl Scene {
    /// Participants with duplicates removed, in first-appearance order.
    pub fn distinct_participants(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.participants
            .iter()
            .filter(|p| seen.insert(p.as_str()))
            .map(|p| p.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcTypeLabel {
    Kernel,
    Unicentric,
    Polycentric,
    Acentric,
}

impl ArcTypeLabel {
    pub fn token(self) -> &'static str {
        match self {
            ArcTypeLabel::Kernel => "kernel",
            ArcTypeLabel::Unicentric => "unicentric",
            ArcTypeLabel::Polycentric => "polycentric",
            ArcTypeLabel::Acentric => "acentric",
        }
    }

    pub fn from_token(tok: &str) -> Option<Option<ArcTypeLabel>> {
        match tok {
            "kernel" => Some(Some(ArcTypeLabel::Kernel)),
            "unicentric" => Some(Some(ArcTypeLabel::Unicentric)),
            "polycentric" => Some(Some(ArcTypeLabel::Polycentric)),
            "acentric" => Some(Some(ArcTypeLabel::Acentric)),
            "unlabeled" => Some(None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcRecord {
    pub id: String,
    pub title: String,
    pub volumes: Vec<String>,
    /// Reference structural type, when one is known for the arc.
    pub reference_type: Option<ArcTypeLabel>,
}

/// Counting unit for occurrence statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccurrenceUnit {
    Scene,
    Panel,
    Page,
    Volume,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    name: String,
    characters: Vec<Character>,
    volumes: Vec<Volume>,
    scenes: Vec<Scene>,
    arcs: BTreeMap<String, ArcRecord>,
    character_index: HashMap<String, usize>,
    volume_index: HashMap<String, usize>,
}

impl Corpus {
    /// Validates all cross-references and ordering invariants and builds
    /// the lookup indices. Characters are sorted by id, volumes by
    /// publication order, scenes by order index.
    pub fn new(
        name: impl Into<String>,
        mut characters: Vec<Character>,
        mut volumes: Vec<Volume>,
        mut scenes: Vec<Scene>,
        arcs: Vec<ArcRecord>,
    ) -> Result<Corpus, CorpusError> {
        characters.sort_by(|a, b| a.id.cmp(&b.id));
        for w in characters.windows(2) {
            if w[0].id == w[1].id {
                return Err(CorpusError::DuplicateId {
                    kind: "character",
                    id: w[0].id.clone(),
                });
            }
        }
        for c in &characters {
            check_token("character", &c.id)?;
            if let Some(name) = &c.name {
                check_text("character", &c.id, name)?;
            }
            if c.named && c.name.as_deref().is_none_or(|n| n.is_empty()) {
                return Err(CorpusError::NamedWithoutName(c.id.clone()));
            }
            if c.sex == Sex::Mixed && !c.collective {
                return Err(CorpusError::MixedNotCollective(c.id.clone()));
            }
        }

        volumes.sort_by(|a, b| {
            a.publication_order
                .cmp(&b.publication_order)
                .then_with(|| a.id.cmp(&b.id))
        });
        {
            let mut seen = HashSet::new();
            for v in &volumes {
                check_token("volume", &v.id)?;
                check_text("volume", &v.id, &v.title)?;
                if !seen.insert(v.id.clone()) {
                    return Err(CorpusError::DuplicateId {
                        kind: "volume",
                        id: v.id.clone(),
                    });
                }
            }
        }
        for w in volumes.windows(2) {
            if w[0].publication_order == w[1].publication_order {
                return Err(CorpusError::DuplicatePublicationOrder(
                    w[0].id.clone(),
                    w[1].id.clone(),
                    w[0].publication_order,
                ));
            }
        }

        let character_index: HashMap<String, usize> = characters
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();
        let volume_index: HashMap<String, usize> = volumes
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), i))
            .collect();

        scenes.sort_by_key(|s| s.order_index);
        {
            let mut seen = HashSet::new();
            for s in &scenes {
                check_token("scene", &s.id)?;
                if !seen.insert(s.id.clone()) {
                    return Err(CorpusError::DuplicateId {
                        kind: "scene",
                        id: s.id.clone(),
                    });
                }
            }
        }
        for w in scenes.windows(2) {
            if w[0].order_index == w[1].order_index {
                return Err(CorpusError::DuplicateOrderIndex(
                    w[0].id.clone(),
                    w[1].id.clone(),
                    w[0].order_index,
                ));
            }
        }
        for s in &scenes {
            if s.participants.is_empty() {
                return Err(CorpusError::EmptyParticipants(s.id.clone()));
            }
            let vol = match volume_index.get(&s.volume_id) {
                Some(&vi) => &volumes[vi],
                None => {
                    return Err(CorpusError::DanglingRef {
                        kind: "volume",
                        id: s.volume_id.clone(),
                        context: format!("scene `{}`", s.id),
                    })
                }
            };
            for p in &s.participants {
                if !character_index.contains_key(p) {
                    return Err(CorpusError::DanglingRef {
                        kind: "character",
                        id: p.clone(),
                        context: format!("scene `{}`", s.id),
                    });
                }
            }
            let sp = &s.span;
            if sp.start_page > sp.end_page
                || sp.start_panel > sp.end_panel
                || sp.start_page == 0
                || sp.start_panel == 0
            {
                return Err(CorpusError::InvertedSpan(s.id.clone()));
            }
            if vol.page_count > 0 && sp.end_page > vol.page_count {
                return Err(CorpusError::SpanOutOfBounds {
                    scene: s.id.clone(),
                    volume: vol.id.clone(),
                    what: format!("page {} > {}", sp.end_page, vol.page_count),
                });
            }
            if vol.panel_count > 0 && sp.end_panel > vol.panel_count {
                return Err(CorpusError::SpanOutOfBounds {
                    scene: s.id.clone(),
                    volume: vol.id.clone(),
                    what: format!("panel {} > {}", sp.end_panel, vol.panel_count),
                });
            }
        }

        // Scenes of one volume must form a contiguous block, blocks must
        // follow publication order, and starts must not go backwards
        // within a volume (parallel scenes are serialized by start panel).
        for w in scenes.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let va = volume_index[&a.volume_id];
            let vb = volume_index[&b.volume_id];
            if va == vb {
                if (b.span.start_page, b.span.start_panel) < (a.span.start_page, a.span.start_panel)
                {
                    return Err(CorpusError::NonMonotoneStart {
                        scene: b.id.clone(),
                        previous: a.id.clone(),
                    });
                }
            } else if vb < va {
                return Err(CorpusError::VolumeOrderMismatch(b.volume_id.clone()));
            }
        }

        let mut arc_map = BTreeMap::new();
        for arc in arcs {
            check_token("arc", &arc.id)?;
            check_text("arc", &arc.id, &arc.title)?;
            if arc_map.contains_key(&arc.id) {
                return Err(CorpusError::DuplicateId {
                    kind: "arc",
                    id: arc.id,
                });
            }
            for v in &arc.volumes {
                if !volume_index.contains_key(v) {
                    return Err(CorpusError::DanglingRef {
                        kind: "volume",
                        id: v.clone(),
                        context: format!("arc `{}`", arc.id),
                    });
                }
            }
            arc_map.insert(arc.id.clone(), arc);
        }
        for v in &volumes {
            if let Some(arc_id) = &v.arc_id {
                match arc_map.get(arc_id) {
                    None => {
                        return Err(CorpusError::DanglingRef {
                            kind: "arc",
                            id: arc_id.clone(),
                            context: format!("volume `{}`", v.id),
                        })
                    }
                    Some(arc) if !arc.volumes.contains(&v.id) => {
                        let listed = arc_map
                            .values()
                            .find(|a| a.volumes.contains(&v.id))
                            .map(|a| a.id.clone())
                            .unwrap_or_else(|| "<none>".to_string());
                        return Err(CorpusError::ArcAssignmentConflict {
                            volume: v.id.clone(),
                            in_volume: arc_id.clone(),
                            in_arc: listed,
                        });
                    }
                    _ => {}
                }
            }
        }

        Ok(Corpus {
            name: name.into(),
            characters,
            volumes,
            scenes,
            arcs: arc_map,
            character_index,
            volume_index,
        })
    }

    /// Replaces the arc table, reassigning volume arc memberships and
    /// re-running validation.
    pub fn with_arcs(self, arcs: Vec<ArcRecord>) -> Result<Corpus, CorpusError> {
        let mut volumes = self.volumes;
        for v in &mut volumes {
            v.arc_id = arcs
                .iter()
                .find(|a| a.volumes.contains(&v.id))
                .map(|a| a.id.clone());
        }
        Corpus::new(self.name, self.characters, volumes, self.scenes, arcs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn volumes(&self) -> &[Volume] {
        &self.volumes
    }

    /// Scenes sorted by global order index.
    pub fn scenes(&self) -> &[Scene] {
        &self.scenes
    }

    pub fn arcs(&self) -> &BTreeMap<String, ArcRecord> {
        &self.arcs
    }

    pub fn character(&self, id: &str) -> Option<&Character> {
        self.character_index.get(id).map(|&i| &self.characters[i])
    }

    pub fn character_position(&self, id: &str) -> Option<usize> {
        self.character_index.get(id).copied()
    }

    pub fn volume(&self, id: &str) -> Option<&Volume> {
        self.volume_index.get(id).map(|&i| &self.volumes[i])
    }

    pub fn total_panels(&self) -> u64 {
        self.volumes.iter().map(|v| v.panel_count as u64).sum()
    }

    pub fn total_pages(&self) -> u64 {
        self.volumes.iter().map(|v| v.page_count as u64).sum()
    }

    /// Number of distinct units (scenes, panels, pages, or volumes) in
    /// which each character participates. Every character of the corpus is
    /// present in the result, absent ones with count zero. A duplicated
    /// participant counts once per scene; every panel and page inside a
    /// scene's span is attributed to every participant.
    pub fn occurrence_counts(&self, unit: OccurrenceUnit) -> BTreeMap<String, u64> {
        let mut counts: BTreeMap<String, u64> =
            self.characters.iter().map(|c| (c.id.clone(), 0)).collect();
        match unit {
            OccurrenceUnit::Scene => {
                for s in &self.scenes {
                    for p in s.distinct_participants() {
                        *counts.get_mut(p).unwrap() += 1;
                    }
                }
            }
            OccurrenceUnit::Volume => {
                let mut per_char: HashMap<&str, BTreeSet<&str>> = HashMap::new();
                for s in &self.scenes {
                    for p in s.distinct_participants() {
                        per_char.entry(p).or_default().insert(s.volume_id.as_str());
                    }
                }
                for (c, vols) in per_char {
                    *counts.get_mut(c).unwrap() = vols.len() as u64;
                }
            }
            OccurrenceUnit::Page | OccurrenceUnit::Panel => {
                // Collect per character and volume the covered intervals,
                // then merge them to count distinct units.
                let mut per: HashMap<(usize, usize), Vec<(u32, u32)>> = HashMap::new();
                for s in &self.scenes {
                    let vi = self.volume_index[&s.volume_id];
                    let iv = match unit {
                        OccurrenceUnit::Page => (s.span.start_page, s.span.end_page),
                        _ => (s.span.start_panel, s.span.end_panel),
                    };
                    for p in s.distinct_participants() {
                        let ci = self.character_index[p];
                        per.entry((ci, vi)).or_default().push(iv);
                    }
                }
                for ((ci, _vi), mut ivs) in per {
                    ivs.sort_unstable();
                    let mut covered = 0u64;
                    let mut cur: Option<(u32, u32)> = None;
                    for (lo, hi) in ivs {
                        match cur {
                            Some((clo, chi)) if lo <= chi + 1 => cur = Some((clo, chi.max(hi))),
                            Some((clo, chi)) => {
                                covered += (chi - clo + 1) as u64;
                                cur = Some((lo, hi));
                                let _ = clo;
                            }
                            None => cur = Some((lo, hi)),
                        }
                    }
                    if let Some((clo, chi)) = cur {
                        covered += (chi - clo + 1) as u64;
                    }
                    *counts.get_mut(&self.characters[ci].id).unwrap() += covered;
                }
            }
        }
        counts
    }

    /// Kendall rank correlation (tau-b) between scene length in panels and
    /// the number of distinct participants.
    pub fn scene_size_length_correlation(&self) -> Result<f64, CorpusError> {
        if self.scenes.len() < 2 {
            return Err(CorpusError::NotEnoughScenes {
                need: 2,
                got: self.scenes.len(),
            });
        }
        let lengths: Vec<f64> = self.scenes.iter().map(|s| s.span.panel_len() as f64).collect();
        let sizes: Vec<f64> = self
            .scenes
            .iter()
            .map(|s| s.distinct_participants().len() as f64)
            .collect();
        Ok(stats::kendall_tau_b(&lengths, &sizes).unwrap_or(0.0))
    }
}
