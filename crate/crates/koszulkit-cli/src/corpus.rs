//! Presentations bundled with the binary.

pub struct CorpusEntry {
    pub name: &'static str,
    pub text: &'static str,
    /// weight window for the main-theorem and spectral-sequence runs
    pub window: usize,
}

macro_rules! entry {
    ($name:literal, $window:expr) => {
        CorpusEntry { name: $name, text: include_str!(concat!("../corpus/", $name, ".kpres")), window: $window }
    };
}

pub const CORPUS: &[CorpusEntry] = &[
    entry!("commutator", 5),
    entry!("free2", 4),
    entry!("galois_l2_q5", 5),
    entry!("galois_l3_q7", 5),
    entry!("lie_q3", 3),
    entry!("nonkoszul", 4),
    entry!("t3_dual", 6),
    entry!("two_var_lie", 5),
    entry!("x2_y3", 5),
    entry!("x2_y3_commutator", 5),
];

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}
