//! Deterministic rule-based grapheme-to-phoneme conversion.
//!
//! The mapping is a fixed table over a 44-symbol phoneme vocabulary:
//! a greedy left-to-right scan applies two-character rules first, then
//! single characters. Digits expand to their spelled-out pronunciations,
//! spaces become a single silence symbol, apostrophes elide. The same
//! transcript always yields the same sequence.

use crate::CoreError;

/// Number of phoneme symbols, including silence.
pub const PHONEME_VOCAB_SIZE: usize = 44;

/// Index of the silence symbol.
pub const SIL: usize = 0;

/// Names of the 44 phoneme symbols; index into this array is the phoneme id.
pub const PHONEME_NAMES: [&str; PHONEME_VOCAB_SIZE] = [
    "SIL", // 0
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW",
    "AX", // 16
    "B", "CH", "D", "DH", "DX", "EL", "EN", "F", "G", "HH", "JH", "K", "L", "M", "N", "NG", "P",
    "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH",
];

/// A transcript rendered as indices into the fixed phoneme vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeSequence {
    pub phonemes: Vec<usize>,
    pub vocabulary_size: usize,
}

impl PhonemeSequence {
    pub fn len(&self) -> usize {
        self.phonemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phonemes.is_empty()
    }
}

fn id(name: &str) -> usize {
    PHONEME_NAMES
        .iter()
        .position(|&n| n == name)
        .unwrap_or_else(|| panic!("unknown phoneme name {name}"))
}

/// Two-character rules, tried in order before the single-character map.
fn digraph(a: char, b: char) -> Option<&'static [&'static str]> {
    let rule: &[&str] = match (a, b) {
        ('c', 'h') => &["CH"],
        ('s', 'h') => &["SH"],
        ('t', 'h') => &["TH"],
        ('p', 'h') => &["F"],
        ('w', 'h') => &["W"],
        ('c', 'k') => &["K"],
        ('n', 'g') => &["NG"],
        ('q', 'u') => &["K", "W"],
        ('e', 'e') => &["IY"],
        ('e', 'a') => &["IY"],
        ('o', 'o') => &["UW"],
        ('o', 'u') => &["AW"],
        ('o', 'w') => &["OW"],
        ('a', 'i') => &["EY"],
        ('a', 'y') => &["EY"],
        ('o', 'a') => &["OW"],
        ('o', 'i') => &["OY"],
        ('o', 'y') => &["OY"],
        ('a', 'u') => &["AO"],
        ('a', 'w') => &["AO"],
        ('e', 'y') => &["EY"],
        ('i', 'e') => &["IY"],
        ('e', 'r') => &["ER"],
        ('i', 'r') => &["ER"],
        ('u', 'r') => &["ER"],
        ('a', 'r') => &["AA", "R"],
        ('o', 'r') => &["AO", "R"],
        ('t', 't') => &["DX"],
        ('l', 'l') => &["EL"],
        ('n', 'n') => &["EN"],
        _ => return None,
    };
    Some(rule)
}

fn single(c: char) -> Option<&'static [&'static str]> {
    let rule: &[&str] = match c {
        'a' => &["AE"],
        'b' => &["B"],
        'c' => &["K"],
        'd' => &["D"],
        'e' => &["EH"],
        'f' => &["F"],
        'g' => &["G"],
        'h' => &["HH"],
        'i' => &["IH"],
        'j' => &["JH"],
        'k' => &["K"],
        'l' => &["L"],
        'm' => &["M"],
        'n' => &["N"],
        'o' => &["AA"],
        'p' => &["P"],
        'q' => &["K"],
        'r' => &["R"],
        's' => &["S"],
        't' => &["T"],
        'u' => &["AH"],
        'v' => &["V"],
        'w' => &["W"],
        'x' => &["K", "S"],
        'y' => &["Y"],
        'z' => &["Z"],
        '0' => &["Z", "IH", "R", "OW"],
        '1' => &["W", "AH", "N"],
        '2' => &["T", "UW"],
        '3' => &["TH", "R", "IY"],
        '4' => &["F", "AO", "R"],
        '5' => &["F", "AY", "V"],
        '6' => &["S", "IH", "K", "S"],
        '7' => &["S", "EH", "V", "AX", "N"],
        '8' => &["EY", "T"],
        '9' => &["N", "AY", "N"],
        _ => return None,
    };
    Some(rule)
}

/// Maps a transcript over the toy alphabet (lowercase letters, digits,
/// space, apostrophe) to its phoneme sequence.
///
/// Runs of spaces produce one silence symbol; leading and trailing spaces
/// are dropped, except that a transcript of only spaces or apostrophes
/// maps to a single silence. An empty transcript maps to an empty
/// sequence. Any other character is an error naming it and its position.
pub fn phonemize(transcript: &str) -> Result<PhonemeSequence, CoreError> {
    let chars: Vec<char> = transcript.chars().collect();
    let mut phonemes: Vec<usize> = Vec::new();
    let mut pending_sil = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == ' ' {
            pending_sil = true;
            i += 1;
            continue;
        }
        if c == '\'' {
            i += 1;
            continue;
        }
        let (rule, advance) = if i + 1 < chars.len() {
            match digraph(c, chars[i + 1]) {
                Some(r) => (Some(r), 2),
                None => (single(c), 1),
            }
        } else {
            (single(c), 1)
        };
        let rule = rule.ok_or(CoreError::UnmappableCharacter { ch: c, position: i })?;
        if pending_sil && !phonemes.is_empty() {
            phonemes.push(SIL);
        }
        pending_sil = false;
        phonemes.extend(rule.iter().map(|n| id(n)));
        i += advance;
    }
    if phonemes.is_empty() && !chars.is_empty() {
        phonemes.push(SIL);
    }
    Ok(PhonemeSequence {
        phonemes,
        vocabulary_size: PHONEME_VOCAB_SIZE,
    })
}
