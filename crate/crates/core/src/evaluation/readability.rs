//! Flesch Reading Ease.
//!
//! Segmentation rules:
//!
//! * Blank lines, list items (`-`, `*`, `•`, `1.`) and headings (`#`) start a
//!   new block. A block boundary always ends a sentence.
//! * Within a block a sentence ends at a token ending in `.`, `!` or `?`
//!   (closing quotes and brackets allowed) when the next token starts with an
//!   uppercase letter or digit, unless the token is in [`ABBREVIATIONS`].
//! * A word is a whitespace-separated token containing a letter or digit.
//!
//! Syllables per word (letters only, hyphenated parts counted separately,
//! each part at least 1; tokens without letters count 1):
//!
//! * count runs of vowels, `y` counting as a vowel except word-initially;
//! * a final `e` after a consonant is silent unless the word ends in
//!   consonant + `le`;
//! * a final `ed` after a consonant other than `t`/`d` is silent;
//! * a final `es` after a consonant other than `s`, `x`, `z`, `c`, `g`, `ch`, `sh` is silent;
//! * `ia` is two syllables except in `cia`/`tia`.

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const DEFAULT_WORDS_PER_MINUTE: f64 = 275.0;

pub const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "vs.", "cf.", "approx.", "mr.", "mrs.", "ms.", "dr.", "prof.", "inc.", "ltd.", "co.",
    "corp.", "no.", "st.", "jr.", "sr.", "u.s.", "u.k.", "e.u.",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub sentences: Vec<String>,
    pub words: Vec<String>,
}

fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

fn strip_block_marker(line: &str) -> Option<&str> {
    let t = line.trim_start();
    for marker in ["- ", "* ", "• "] {
        if let Some(rest) = t.strip_prefix(marker) {
            return Some(rest);
        }
    }
    if t.starts_with('#') {
        return Some(t.trim_start_matches('#'));
    }
    let digits = t.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        if let Some(rest) = t[digits..].strip_prefix(". ") {
            return Some(rest);
        }
    }
    None
}

fn blocks(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, out: &mut Vec<String>| {
        if !current.trim().is_empty() {
            out.push(std::mem::take(current));
        }
        current.clear();
    };
    for line in text.lines() {
        if line.trim().is_empty() {
            flush(&mut current, &mut out);
            continue;
        }
        let body = match strip_block_marker(line) {
            Some(rest) => {
                flush(&mut current, &mut out);
                rest
            }
            None => line,
        };
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(body.trim());
        if line.trim_start().starts_with('#') {
            flush(&mut current, &mut out);
        }
    }
    flush(&mut current, &mut out);
    out
}

fn ends_sentence(token: &str) -> bool {
    let core = token.trim_end_matches(['"', '\'', ')', ']', '’', '”']);
    if !core.ends_with(['.', '!', '?']) {
        return false;
    }
    let lower = core.trim_start_matches(['"', '\'', '(', '[', '‘', '“']).to_lowercase();
    !ABBREVIATIONS.contains(&lower.as_str())
}

fn starts_sentence(token: &str) -> bool {
    token
        .trim_start_matches(['"', '\'', '(', '[', '‘', '“'])
        .chars()
        .next()
        .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

/// Splits `text` into sentences and words.
pub fn segment(text: &str) -> Result<Segmentation, EvalError> {
    if text.trim().is_empty() {
        return Err(EvalError::EmptyText);
    }
    let mut sentences = Vec::new();
    let mut words = Vec::new();
    for block in blocks(text) {
        let tokens: Vec<&str> = block.split_whitespace().collect();
        let mut start = 0;
        for i in 0..tokens.len() {
            let last = i + 1 == tokens.len();
            if last || (ends_sentence(tokens[i]) && starts_sentence(tokens[i + 1])) {
                let sentence = &tokens[start..=i];
                if sentence.iter().any(|t| is_word(t)) {
                    sentences.push(sentence.join(" "));
                }
                start = i + 1;
            }
        }
        words.extend(tokens.into_iter().filter(|t| is_word(t)).map(str::to_string));
    }
    if words.is_empty() {
        return Err(EvalError::EmptyText);
    }
    Ok(Segmentation { sentences, words })
}

fn is_vowel(c: char, index: usize) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u') || (c == 'y' && index > 0)
}

fn part_syllables(part: &[char]) -> usize {
    let n = part.len();
    let vowel = |i: usize| is_vowel(part[i], i);
    let mut count = 0;
    let mut prev = false;
    for i in 0..n {
        let v = vowel(i);
        if v && !prev {
            count += 1;
        }
        prev = v;
    }
    let consonant = |i: usize| !vowel(i);
    if n >= 3 && count > 1 {
        let last = part[n - 1];
        let before = part[n - 2];
        let silent_e = last == 'e' && consonant(n - 2) && !(before == 'l' && consonant(n - 3));
        let silent_ed = last == 'd' && before == 'e' && n >= 4 && consonant(n - 3) && !matches!(part[n - 3], 't' | 'd');
        if silent_e || silent_ed {
            count -= 1;
        } else if last == 's' && before == 'e' && n >= 4 && consonant(n - 3) {
            let c = part[n - 3];
            let sibilant = matches!(c, 's' | 'x' | 'z' | 'c' | 'g') || (c == 'h' && matches!(part[n - 4], 'c' | 's'));
            if !sibilant {
                count -= 1;
            }
        }
    }
    for i in 0..n.saturating_sub(1) {
        if part[i] == 'i' && part[i + 1] == 'a' && !(i > 0 && matches!(part[i - 1], 'c' | 't')) {
            count += 1;
        }
    }
    count.max(1)
}

/// Heuristic syllable count; see the module docs for the rules.
pub fn count_syllables(word: &str) -> Result<usize, EvalError> {
    let lower: Vec<char> = word.to_lowercase().chars().collect();
    let total: usize = lower
        .split(|c| !c.is_ascii_alphabetic() && *c != '\'' && *c != '’')
        .map(|p| p.iter().copied().filter(char::is_ascii_alphabetic).collect::<Vec<_>>())
        .filter(|p| !p.is_empty())
        .map(|p| part_syllables(&p))
        .sum();
    if total == 0 {
        return Err(EvalError::NoLetters(word.to_string()));
    }
    Ok(total)
}

fn token_syllables(token: &str) -> usize {
    count_syllables(token).unwrap_or(1)
}

/// 206.835 − 1.015·(words/sentences) − 84.6·(syllables/words), unclamped.
pub fn fre_from_counts(words: usize, sentences: usize, syllables: usize) -> f64 {
    let asl = words as f64 / sentences as f64;
    let asw = syllables as f64 / words as f64;
    206.835 - 1.015 * asl - 84.6 * asw
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityReport {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub asl: f64,
    pub asw: f64,
    pub fre: f64,
    pub words_per_minute: f64,
    pub reading_time_seconds: f64,
}

impl ReadabilityReport {
    pub fn from_counts(words: usize, sentences: usize, syllables: usize, words_per_minute: f64) -> Self {
        Self {
            words,
            sentences,
            syllables,
            asl: words as f64 / sentences as f64,
            asw: syllables as f64 / words as f64,
            fre: fre_from_counts(words, sentences, syllables),
            words_per_minute,
            reading_time_seconds: words as f64 / words_per_minute * 60.0,
        }
    }

    /// Reading time as "9m 19s".
    pub fn reading_time(&self) -> String {
        let secs = self.reading_time_seconds.round() as u64;
        format!("{}m {}s", secs / 60, secs % 60)
    }
}

pub fn fre_score(text: &str) -> Result<ReadabilityReport, EvalError> {
    fre_score_with(text, DEFAULT_WORDS_PER_MINUTE)
}

pub fn fre_score_with(text: &str, words_per_minute: f64) -> Result<ReadabilityReport, EvalError> {
    let seg = segment(text)?;
    let syllables = seg.words.iter().map(|w| token_syllables(w)).sum();
    Ok(ReadabilityReport::from_counts(
        seg.words.len(),
        seg.sentences.len().max(1),
        syllables,
        words_per_minute,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sentences() {
        let s = segment("The cat sat. The dog ran.").unwrap();
        assert_eq!((s.sentences.len(), s.words.len()), (2, 6));
    }

    #[test]
    fn abbreviation_does_not_split() {
        let s = segment("We collect e.g. names and emails.").unwrap();
        assert_eq!((s.sentences.len(), s.words.len()), (1, 6));
        let s = segment("Acme Inc. Is based in the U.S. Since 2001.").unwrap();
        assert_eq!(s.sentences.len(), 1);
    }

    #[test]
    fn lowercase_after_period_does_not_split() {
        assert_eq!(segment("Version 2. was released.").unwrap().sentences.len(), 1);
    }

    #[test]
    fn blocks_are_boundaries() {
        let s = segment("# Heading\nSome text here\n\n- first item\n- second item\n1. About us").unwrap();
        assert_eq!(s.sentences.len(), 5);
    }

    #[test]
    fn empty_is_error() {
        assert!(segment("").is_err());
        assert!(segment("   \n ").is_err());
        assert!(segment("-- ..").is_err());
    }

    #[test]
    fn syllables() {
        for (w, n) in [
            ("the", 1),
            ("privacy", 3),
            ("data", 2),
            ("used", 1),
            ("collected", 3),
            ("purposes", 3),
            ("names", 1),
            ("table", 2),
            ("media", 3),
            ("social", 2),
            ("e-mail", 2),
            ("you", 1),
        ] {
            assert_eq!(count_syllables(w).unwrap(), n, "{w}");
        }
        assert!(count_syllables("2024").is_err());
    }

    #[test]
    fn hand_evaluated_score() {
        let r = ReadabilityReport::from_counts(3, 1, 3, DEFAULT_WORDS_PER_MINUTE);
        assert_eq!((r.asl, r.asw), (3.0, 1.0));
        assert!((r.fre - 119.19).abs() < 1e-9);
        let r = fre_score("The cat sat.").unwrap();
        assert!((r.fre - 119.19).abs() < 1e-9);
    }
}
