//! Rule-based English lemmatizer.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LemmatizerMode {
    #[default]
    RuleBased,
    Passthrough,
}

impl std::str::FromStr for LemmatizerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule_based" | "rule-based" => Ok(LemmatizerMode::RuleBased),
            "passthrough" => Ok(LemmatizerMode::Passthrough),
            other => Err(format!("unknown lemmatizer mode '{other}'")),
        }
    }
}

impl std::fmt::Display for LemmatizerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LemmatizerMode::RuleBased => "rule_based",
            LemmatizerMode::Passthrough => "passthrough",
        })
    }
}

// Irregular plurals only; irregular verb forms are left alone.
const IRREGULAR: &[(&str, &str)] = &[
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("people", "person"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("geese", "goose"),
    ("mice", "mouse"),
    ("lice", "louse"),
    ("oxen", "ox"),
    ("indices", "index"),
    ("matrices", "matrix"),
    ("vertices", "vertex"),
    ("criteria", "criterion"),
    ("phenomena", "phenomenon"),
    ("analyses", "analysis"),
    ("theses", "thesis"),
    ("hypotheses", "hypothesis"),
    ("diagnoses", "diagnosis"),
    ("crises", "crisis"),
    ("axes", "axis"),
    ("bases", "basis"),
    ("leaves", "leaf"),
    ("lives", "life"),
    ("knives", "knife"),
    ("wives", "wife"),
    ("halves", "half"),
    ("wolves", "wolf"),
    ("shelves", "shelf"),
];

// Words ending in -s/-ing/-ed that are already lemmas.
const KEEP: &[&str] = &[
    "bus", "gas", "news", "series", "species", "always", "perhaps", "thus", "this", "his", "its",
    "was", "has", "does", "is", "yes", "physics", "mathematics", "economics", "politics",
    "thing", "nothing", "something", "anything", "everything", "king", "ring", "spring", "string",
    "wing", "sing", "bring", "swing", "sting", "ceiling", "morning", "evening", "during", "bed",
    "red", "need", "seed", "feed", "speed", "bleed", "breed", "shed", "hundred", "indeed",
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|b| is_vowel(b) || b == b'y')
}

/// Undo consonant doubling (`running` -> `run`) or restore a silent `e`
/// (`making` -> `make`) on a stem left by stripping `-ing` or `-ed`.
fn repair_stem(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z') {
        return stem[..n - 1].to_string();
    }
    if n == 3
        && !is_vowel(b[0])
        && is_vowel(b[1])
        && !is_vowel(b[2])
        && !matches!(b[2], b'w' | b'x' | b'y')
    {
        return format!("{stem}e");
    }
    // Stems that are almost never complete words without their final `e`:
    // `mov`, `clos`, `produc`, `relat`.
    let last = b[n - 1];
    let prev = b[n - 2];
    let needs_e = match last {
        b'v' | b'z' => true,
        b's' => is_vowel(prev) && prev != b'u',
        b'c' => is_vowel(prev) || prev == b'n' || prev == b'r',
        b't' => n >= 5 && prev == b'a' && !is_vowel(b[n - 3]),
        _ => false,
    };
    if n >= 3 && needs_e {
        return format!("{stem}e");
    }
    stem.to_string()
}

fn strip_plural(word: &str) -> Option<String> {
    let n = word.len();
    if n <= 3 || !word.ends_with('s') {
        return None;
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return None;
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 {
            return Some(format!("{stem}y"));
        }
    }
    for suffix in ["sses", "xes", "ches", "shes", "zes"] {
        if word.ends_with(suffix) {
            return Some(word[..n - 2].to_string());
        }
    }
    Some(word[..n - 1].to_string())
}

fn strip_verbal(word: &str) -> Option<String> {
    if let Some(stem) = word.strip_suffix("ing") {
        if stem.len() >= 2 && has_vowel(stem) {
            return Some(repair_stem(stem));
        }
    }
    if let Some(stem) = word.strip_suffix("ied") {
        if stem.len() >= 2 {
            return Some(format!("{stem}y"));
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if stem.len() >= 2 && has_vowel(stem) {
            return Some(repair_stem(stem));
        }
    }
    None
}

/// Lemmatize one lowercase token. Non-ASCII tokens are returned unchanged.
pub fn lemmatize(word: &str) -> String {
    if !word.is_ascii() {
        return word.to_string();
    }
    if let Some((_, lemma)) = IRREGULAR.iter().find(|(form, _)| *form == word) {
        return (*lemma).to_string();
    }
    if KEEP.contains(&word) {
        return word.to_string();
    }
    strip_plural(word)
        .or_else(|| strip_verbal(word))
        .unwrap_or_else(|| word.to_string())
}

impl LemmatizerMode {
    pub fn apply(self, word: String) -> String {
        match self {
            LemmatizerMode::RuleBased => lemmatize(&word),
            LemmatizerMode::Passthrough => word,
        }
    }
}
