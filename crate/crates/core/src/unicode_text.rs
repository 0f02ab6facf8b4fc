//! Code-point classification and whitespace tokenization.
//!
//! Everything downstream (cleaning, tagging, counting) works on Unicode
//! scalar values, not grapheme clusters: the hazards this module guards
//! against — the virama U+0DCA being mistaken for punctuation, zero-width
//! joiners inside ligatures — are all code-point-level. Words are maximal
//! runs of non-whitespace scalars, where "whitespace" is the Unicode
//! White_Space property (covers tab, newline, NBSP).

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

/// Zero-width joiner. Contextually meaningful inside Sinhala ligatures,
/// noise everywhere else.
pub const ZWJ: char = '\u{200D}';

/// Sinhala vowel-killer diacritic (hal kirīma / virama). A letter component,
/// never punctuation.
pub const VIRAMA: char = '\u{0DCA}';

/// Coarse class of a Unicode scalar value. Every scalar maps to exactly one
/// class; block membership wins over general category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScriptClass {
    Sinhala,
    Latin,
    Tamil,
    Han,
    Digit,
    Whitespace,
    Punctuation,
    Symbol,
    #[serde(rename = "ZWJ")]
    Zwj,
    OtherMark,
    Other,
}

const SINHALA_BLOCK: (u32, u32) = (0x0D80, 0x0DFF);
const TAMIL_BLOCK: (u32, u32) = (0x0B80, 0x0BFF);

// CJK Unified Ideographs: the main block plus extensions A through H.
const HAN_BLOCKS: &[(u32, u32)] = &[
    (0x4E00, 0x9FFF),
    (0x3400, 0x4DBF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2B73F),
    (0x2B740, 0x2B81F),
    (0x2B820, 0x2CEAF),
    (0x2CEB0, 0x2EBEF),
    (0x30000, 0x3134F),
    (0x31350, 0x323AF),
];

// Blocks whose letters count as Latin (Basic Latin through the extended
// blocks, ligatures, and fullwidth forms). Non-letters in these blocks —
// ASCII digits, punctuation, × ÷ — fall through to the category rules.
const LATIN_BLOCKS: &[(u32, u32)] = &[
    (0x0000, 0x007F),
    (0x0080, 0x00FF),
    (0x0100, 0x017F),
    (0x0180, 0x024F),
    (0x0250, 0x02AF),
    (0x1E00, 0x1EFF),
    (0x2C60, 0x2C7F),
    (0xA720, 0xA7FF),
    (0xAB30, 0xAB6F),
    (0xFB00, 0xFB06),
    (0xFF21, 0xFF3A),
    (0xFF41, 0xFF5A),
];

fn in_blocks(cp: u32, blocks: &[(u32, u32)]) -> bool {
    blocks.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp))
}

fn is_letter(cat: GeneralCategory) -> bool {
    matches!(
        cat,
        GeneralCategory::UppercaseLetter
            | GeneralCategory::LowercaseLetter
            | GeneralCategory::TitlecaseLetter
            | GeneralCategory::ModifierLetter
            | GeneralCategory::OtherLetter
    )
}

/// Classify one Unicode scalar. Total and deterministic.
///
/// The whole Sinhala block classifies as [`ScriptClass::Sinhala`] — including
/// combining vowel signs and the virama U+0DCA, which careless `[:punct:]`
/// style rules have been known to strip out of words.
pub fn classify_codepoint(cp: char) -> ScriptClass {
    if cp == ZWJ {
        return ScriptClass::Zwj;
    }
    let v = cp as u32;
    if (SINHALA_BLOCK.0..=SINHALA_BLOCK.1).contains(&v) {
        return ScriptClass::Sinhala;
    }
    if (TAMIL_BLOCK.0..=TAMIL_BLOCK.1).contains(&v) {
        return ScriptClass::Tamil;
    }
    if in_blocks(v, HAN_BLOCKS) {
        return ScriptClass::Han;
    }
    let cat = get_general_category(cp);
    if in_blocks(v, LATIN_BLOCKS) && is_letter(cat) {
        return ScriptClass::Latin;
    }
    if cat == GeneralCategory::DecimalNumber {
        return ScriptClass::Digit;
    }
    if cp.is_whitespace() {
        return ScriptClass::Whitespace;
    }
    match cat {
        GeneralCategory::ConnectorPunctuation
        | GeneralCategory::DashPunctuation
        | GeneralCategory::OpenPunctuation
        | GeneralCategory::ClosePunctuation
        | GeneralCategory::InitialPunctuation
        | GeneralCategory::FinalPunctuation
        | GeneralCategory::OtherPunctuation => ScriptClass::Punctuation,
        GeneralCategory::MathSymbol
        | GeneralCategory::CurrencySymbol
        | GeneralCategory::ModifierSymbol
        | GeneralCategory::OtherSymbol => ScriptClass::Symbol,
        GeneralCategory::NonspacingMark
        | GeneralCategory::SpacingMark
        | GeneralCategory::EnclosingMark => ScriptClass::OtherMark,
        _ => ScriptClass::Other,
    }
}

/// A word: a maximal run of non-whitespace scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    /// Byte offset of the token start in the source string.
    pub byte_offset: usize,
}

/// Iterator over the tokens of a string, in order.
pub struct Tokens<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Iterator for Tokens<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        let rest = &self.src[self.pos..];
        let start_rel = rest.char_indices().find(|(_, c)| !c.is_whitespace())?.0;
        let start = self.pos + start_rel;
        let after = &self.src[start..];
        let len = after
            .char_indices()
            .find(|(_, c)| c.is_whitespace())
            .map(|(i, _)| i)
            .unwrap_or(after.len());
        self.pos = start + len;
        Some(Token {
            text: &self.src[start..start + len],
            byte_offset: start,
        })
    }
}

/// Split into maximal runs of non-whitespace scalars, with byte offsets.
pub fn tokenize(text: &str) -> Tokens<'_> {
    Tokens { src: text, pos: 0 }
}

/// Number of whitespace-separated words in `text`.
pub fn word_count(text: &str) -> usize {
    tokenize(text).count()
}
