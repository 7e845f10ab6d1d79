//! Frame manifests, subject-level split rules, T_A/T_B training halves and
//! training-set composition.
//!
//! A subject is identified by `(doc_type, subject_id)` across source
//! datasets: the two corpora share document mock-ups, so the same subject
//! number of the same document type is the same identity in both.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::imaging::Quad;
use crate::rng::SplitMix64;

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s {
                    $($text => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

string_enum!(DocType {
    AlbId => "alb_id",
    EspId => "esp_id",
    EstId => "est_id",
    FinId => "fin_id",
    SvkId => "svk_id",
});

string_enum!(SourceDataset { Midv2020 => "midv2020", Dlc2021 => "dlc2021" });

string_enum!(ClassLabel { BonaFide => "bonafide", Print => "print", Screen => "screen" });

string_enum!(Task { Print => "print", Screen => "screen" });

string_enum!(Split { Train => "train", Validation => "validation", Test => "test" });

string_enum!(Half { TA => "T_A", TB => "T_B" });

string_enum!(
    /// Origin column of a training listing.
    Origin { Real => "real", Synthetic => "synthetic" }
);

impl ClassLabel {
    /// Integer label used in score files: 0 bona fide, 1 print, 2 screen.
    pub fn pai_code(self) -> u32 {
        match self {
            ClassLabel::BonaFide => 0,
            ClassLabel::Print => 1,
            ClassLabel::Screen => 2,
        }
    }
}

impl Task {
    pub fn attack_class(self) -> ClassLabel {
        match self {
            Task::Print => ClassLabel::Print,
            Task::Screen => ClassLabel::Screen,
        }
    }

    pub fn classes(self) -> [ClassLabel; 2] {
        [ClassLabel::BonaFide, self.attack_class()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub subject_id: String,
    pub doc_type: DocType,
    pub source_dataset: SourceDataset,
    pub class_label: ClassLabel,
    pub frame_path: String,
    pub quad: Quad,
    /// False when the document lies partly outside the frame.
    pub in_frame: bool,
}

impl FrameRecord {
    pub fn subject(&self) -> SubjectKey {
        SubjectKey { doc_type: self.doc_type, subject_id: self.subject_id.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubjectKey {
    pub doc_type: DocType,
    pub subject_id: String,
}

impl fmt::Display for SubjectKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.doc_type, self.subject_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleTarget {
    Assign(Split),
    Exclude,
}

impl RuleTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleTarget::Assign(s) => s.as_str(),
            RuleTarget::Exclude => "exclude",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "exclude" {
            return Some(RuleTarget::Exclude);
        }
        Split::parse(s).map(RuleTarget::Assign)
    }
}

/// `None` in a key position is the `"*"` wildcard.
type SubjectRules = BTreeMap<Option<String>, RuleTarget>;
type DocRules = BTreeMap<Option<DocType>, SubjectRules>;

/// Subject-to-split rules per task, source dataset and document type.
///
/// Lookups prefer the most specific rule: exact document type and subject,
/// then exact document type with any subject, then any document type with
/// the exact subject, then the full wildcard.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SplitRules {
    rules: BTreeMap<Task, BTreeMap<SourceDataset, DocRules>>,
}

impl SplitRules {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        task: Task,
        source: SourceDataset,
        doc_type: Option<DocType>,
        subject_id: Option<&str>,
        target: RuleTarget,
    ) {
        self.rules
            .entry(task)
            .or_default()
            .entry(source)
            .or_default()
            .entry(doc_type)
            .or_default()
            .insert(subject_id.map(str::to_string), target);
    }

    pub fn has_task(&self, task: Task) -> bool {
        self.rules.contains_key(&task)
    }

    pub fn resolve(&self, task: Task, source: SourceDataset, doc_type: DocType, subject_id: &str) -> Option<RuleTarget> {
        let docs = self.rules.get(&task)?.get(&source)?;
        let subject = Some(subject_id.to_string());
        let lookup = |doc: Option<DocType>, subj: &Option<String>| docs.get(&doc).and_then(|s| s.get(subj)).copied();
        lookup(Some(doc_type), &subject)
            .or_else(|| lookup(Some(doc_type), &None))
            .or_else(|| lookup(None, &subject))
            .or_else(|| lookup(None, &None))
    }

    /// All rules of `task` as `(source, doc_type, subject_id, target)`.
    pub fn entries(&self, task: Task) -> Vec<(SourceDataset, Option<DocType>, Option<&str>, RuleTarget)> {
        let mut out = Vec::new();
        if let Some(sources) = self.rules.get(&task) {
            for (&source, docs) in sources {
                for (&doc, subjects) in docs {
                    for (subject, &target) in subjects {
                        out.push((source, doc, subject.as_deref(), target));
                    }
                }
            }
        }
        out
    }

    pub fn tasks(&self) -> impl Iterator<Item = Task> + '_ {
        self.rules.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("rules have no entries for task {0}")]
    NoRulesForTask(Task),
    #[error("rule for {dataset}/{doc_type}/{subject_id} names a subject absent from the manifest")]
    UnknownSubjectInRules { dataset: SourceDataset, doc_type: String, subject_id: String },
    #[error("no rule covers {dataset}/{doc_type}/{subject_id}")]
    RuleCoverageGap { dataset: SourceDataset, doc_type: DocType, subject_id: String },
    #[error("train split has no {0} frames")]
    EmptyTrainSplit(ClassLabel),
    #[error("synthetic image {0:?} is missing")]
    MissingSyntheticFile(String),
    #[error("synthetic directory holds {found} images, expected {expected}")]
    SyntheticCountMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignedFrame {
    pub frame_path: String,
    pub subject_id: String,
    pub doc_type: DocType,
    pub source_dataset: SourceDataset,
    pub class_label: ClassLabel,
    pub split: Split,
    /// Set on train frames by [`partition_halves`].
    pub half: Option<Half>,
}

impl AssignedFrame {
    pub fn subject(&self) -> SubjectKey {
        SubjectKey { doc_type: self.doc_type, subject_id: self.subject_id.clone() }
    }
}

/// Frames of one task with their split, sorted by frame path.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitAssignment {
    pub task: Task,
    pub frames: Vec<AssignedFrame>,
}

impl SplitAssignment {
    pub fn count(&self, split: Split, class: ClassLabel) -> usize {
        self.frames.iter().filter(|f| f.split == split && f.class_label == class).count()
    }

    pub fn half_count(&self, half: Half, class: ClassLabel) -> usize {
        self.frames.iter().filter(|f| f.half == Some(half) && f.class_label == class).count()
    }

    /// Subjects per split (all classes), as sorted sets.
    pub fn subjects(&self, split: Split, source: Option<SourceDataset>) -> BTreeSet<SubjectKey> {
        self.frames
            .iter()
            .filter(|f| f.split == split && source.map_or(true, |s| s == f.source_dataset))
            .map(AssignedFrame::subject)
            .collect()
    }
}

fn check_rule_subjects(manifest: &[FrameRecord], task: Task, rules: &SplitRules) -> Result<(), DatasetError> {
    let mut known: BTreeSet<(SourceDataset, Option<DocType>, &str)> = BTreeSet::new();
    for r in manifest {
        known.insert((r.source_dataset, Some(r.doc_type), r.subject_id.as_str()));
        known.insert((r.source_dataset, None, r.subject_id.as_str()));
    }
    for (source, doc, subject, _) in rules.entries(task) {
        let Some(subject) = subject else { continue };
        if !known.contains(&(source, doc, subject)) {
            return Err(DatasetError::UnknownSubjectInRules {
                dataset: source,
                doc_type: doc.map_or_else(|| "*".to_string(), |d| d.as_str().to_string()),
                subject_id: subject.to_string(),
            });
        }
    }
    Ok(())
}

/// Assigns every in-frame bona fide and task-attack frame to a split.
///
/// Attack frames are taken from DLC-2021 only; out-of-frame records, other
/// classes and frames ruled `exclude` are left out.
pub fn build_splits(manifest: &[FrameRecord], task: Task, rules: &SplitRules) -> Result<SplitAssignment, DatasetError> {
    if !rules.has_task(task) {
        return Err(DatasetError::NoRulesForTask(task));
    }
    check_rule_subjects(manifest, task, rules)?;
    let mut frames = Vec::new();
    for r in manifest {
        if !r.in_frame || !task.classes().contains(&r.class_label) {
            continue;
        }
        if r.class_label != ClassLabel::BonaFide && r.source_dataset != SourceDataset::Dlc2021 {
            continue;
        }
        let target = rules.resolve(task, r.source_dataset, r.doc_type, &r.subject_id).ok_or_else(|| {
            DatasetError::RuleCoverageGap {
                dataset: r.source_dataset,
                doc_type: r.doc_type,
                subject_id: r.subject_id.clone(),
            }
        })?;
        let RuleTarget::Assign(split) = target else { continue };
        frames.push(AssignedFrame {
            frame_path: r.frame_path.clone(),
            subject_id: r.subject_id.clone(),
            doc_type: r.doc_type,
            source_dataset: r.source_dataset,
            class_label: r.class_label,
            split,
            half: None,
        });
    }
    frames.sort_by(|a, b| a.frame_path.cmp(&b.frame_path));
    Ok(SplitAssignment { task, frames })
}

/// Splits each class of the train set into halves T_A and T_B.
///
/// Train frames of each class, in frame-path order, are shuffled with one
/// SplitMix64 stream seeded by `seed` (bona fide first, then the attack
/// class); the first `⌊n/2⌋` become T_A and the rest T_B.
pub fn partition_halves(assignment: &SplitAssignment, seed: u64) -> Result<SplitAssignment, DatasetError> {
    let mut out = assignment.clone();
    for f in &mut out.frames {
        f.half = None;
    }
    let mut order: Vec<usize> = (0..out.frames.len()).collect();
    order.sort_by(|&a, &b| out.frames[a].frame_path.cmp(&out.frames[b].frame_path));
    let mut rng = SplitMix64::new(seed);
    for class in assignment.task.classes() {
        let mut members: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| out.frames[i].split == Split::Train && out.frames[i].class_label == class)
            .collect();
        if members.is_empty() {
            return Err(DatasetError::EmptyTrainSplit(class));
        }
        rng.shuffle(&mut members);
        let half = members.len() / 2;
        for (k, &i) in members.iter().enumerate() {
            out.frames[i].half = Some(if k < half { Half::TA } else { Half::TB });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionMode {
    /// T_A only.
    RealHalf,
    /// T_A ∪ T_B.
    RealFull,
    /// T_A ∪ T_B bona fide ∪ one synthetic attack per T_B bona fide frame.
    Synthetic,
}

impl CompositionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CompositionMode::RealHalf => "real-half",
            CompositionMode::RealFull => "real-full",
            CompositionMode::Synthetic => "synthetic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "real-half" | "real_half" => Some(CompositionMode::RealHalf),
            "real-full" | "real_full" => Some(CompositionMode::RealFull),
            "synthetic" => Some(CompositionMode::Synthetic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListingEntry {
    pub path: String,
    pub class_label: ClassLabel,
    pub origin: Origin,
}

/// File name a generator is expected to write for a bona fide frame: the
/// frame path components joined by `__`, with a `.png` extension.
pub fn synthetic_file_name(frame_path: &str) -> String {
    let mut parts: Vec<&str> = frame_path.split(['/', '\\']).filter(|c| !c.is_empty() && *c != ".").collect();
    if let Some(last) = parts.last_mut() {
        if let Some(dot) = last.rfind('.').filter(|&d| d > 0) {
            *last = &last[..dot];
        }
    }
    format!("{}.png", parts.join("__"))
}

/// Training listing for `mode`.
///
/// For [`CompositionMode::Synthetic`], `synthetic_files` holds the file
/// names present in the generator output directory and `synth_dir` is
/// prefixed to them in the listing. Every T_B bona fide frame must have its
/// [`synthetic_file_name`] present, and the directory must hold nothing else.
pub fn compose_training_manifest(
    assignment: &SplitAssignment,
    mode: CompositionMode,
    synth_dir: &str,
    synthetic_files: &BTreeSet<String>,
) -> Result<Vec<ListingEntry>, DatasetError> {
    let train = assignment.frames.iter().filter(|f| f.split == Split::Train);
    for class in assignment.task.classes() {
        if !assignment.frames.iter().any(|f| f.split == Split::Train && f.class_label == class && f.half.is_some()) {
            return Err(DatasetError::EmptyTrainSplit(class));
        }
    }
    let real = |f: &AssignedFrame| ListingEntry { path: f.frame_path.clone(), class_label: f.class_label, origin: Origin::Real };
    let mut out: Vec<ListingEntry> = match mode {
        CompositionMode::RealHalf => train.filter(|f| f.half == Some(Half::TA)).map(real).collect(),
        CompositionMode::RealFull => train.filter(|f| f.half.is_some()).map(real).collect(),
        CompositionMode::Synthetic => train
            .filter(|f| f.half == Some(Half::TA) || (f.half == Some(Half::TB) && f.class_label == ClassLabel::BonaFide))
            .map(real)
            .collect(),
    };
    if mode == CompositionMode::Synthetic {
        let expected: Vec<String> = assignment
            .frames
            .iter()
            .filter(|f| f.half == Some(Half::TB) && f.class_label == ClassLabel::BonaFide)
            .map(|f| synthetic_file_name(&f.frame_path))
            .collect();
        if let Some(missing) = expected.iter().find(|name| !synthetic_files.contains(*name)) {
            return Err(DatasetError::MissingSyntheticFile(missing.clone()));
        }
        let distinct: BTreeSet<&String> = expected.iter().collect();
        if synthetic_files.len() != distinct.len() {
            return Err(DatasetError::SyntheticCountMismatch { expected: distinct.len(), found: synthetic_files.len() });
        }
        let dir = synth_dir.trim_end_matches('/');
        let attack = assignment.task.attack_class();
        out.extend(expected.iter().map(|name| ListingEntry {
            path: if dir.is_empty() { name.clone() } else { format!("{dir}/{name}") },
            class_label: attack,
            origin: Origin::Synthetic,
        }));
    }
    Ok(out)
}

/// Largest tolerated ratio between class counts within a split.
pub const MAX_CLASS_RATIO: f64 = 1.1;
/// Fewest subjects per document type, class and split.
pub const MIN_SUBJECTS_PER_CELL: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    SubjectInMultipleSplits { subject: SubjectKey, splits: Vec<Split> },
    TooFewSubjects { split: Split, doc_type: DocType, class_label: ClassLabel, subjects: usize },
    ClassImbalance { split: Split, ratio: f64, counts: Vec<(ClassLabel, usize)> },
    HalfImbalance { class_label: ClassLabel, t_a: usize, t_b: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks subject disjointness, subject coverage per cell, class balance per
/// split and, when halves are assigned, their balance.
pub fn validate_assignment(assignment: &SplitAssignment) -> ValidationReport {
    let mut violations = Vec::new();

    let mut splits_of: BTreeMap<SubjectKey, BTreeSet<Split>> = BTreeMap::new();
    for f in &assignment.frames {
        splits_of.entry(f.subject()).or_default().insert(f.split);
    }
    for (subject, splits) in splits_of {
        if splits.len() > 1 {
            violations.push(Violation::SubjectInMultipleSplits { subject, splits: splits.into_iter().collect() });
        }
    }

    let doc_types: BTreeSet<DocType> = assignment.frames.iter().map(|f| f.doc_type).collect();
    let classes = assignment.task.classes();
    for split in Split::ALL.iter().copied() {
        if !assignment.frames.iter().any(|f| f.split == split) {
            continue;
        }
        for &doc_type in &doc_types {
            for class_label in classes {
                let subjects: BTreeSet<&str> = assignment
                    .frames
                    .iter()
                    .filter(|f| f.split == split && f.doc_type == doc_type && f.class_label == class_label)
                    .map(|f| f.subject_id.as_str())
                    .collect();
                if subjects.len() < MIN_SUBJECTS_PER_CELL {
                    violations.push(Violation::TooFewSubjects { split, doc_type, class_label, subjects: subjects.len() });
                }
            }
        }
        let counts: Vec<(ClassLabel, usize)> = classes.iter().map(|&c| (c, assignment.count(split, c))).collect();
        let max = counts.iter().map(|c| c.1).max().unwrap_or(0);
        let min = counts.iter().map(|c| c.1).min().unwrap_or(0);
        let ratio = if min == 0 { f64::INFINITY } else { max as f64 / min as f64 };
        if ratio > MAX_CLASS_RATIO {
            violations.push(Violation::ClassImbalance { split, ratio, counts });
        }
    }

    if assignment.frames.iter().any(|f| f.half.is_some()) {
        for class_label in classes {
            let t_a = assignment.half_count(Half::TA, class_label);
            let t_b = assignment.half_count(Half::TB, class_label);
            if t_a.abs_diff(t_b) > 1 {
                violations.push(Violation::HalfImbalance { class_label, t_a, t_b });
            }
        }
    }
    ValidationReport { violations }
}
