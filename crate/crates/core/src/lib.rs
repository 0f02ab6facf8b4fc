//! Corpus construction toolkit for multilingual social-media text.
//!
//! The pipeline goes: parse exported post dumps ([`ingest`]), clean message
//! text without damaging Sinhala orthography ([`cleaning`]), attach language
//! tags ([`langtag`]), compute word and word-pair statistics ([`stats`]), and
//! derive a stopword list by z-score thresholding ([`stopwords`]).
//! [`unicode_text`] holds the code-point classification and whitespace
//! tokenization shared by everything else.
//!
//! All stage functions are pure transformations over immutable inputs, so
//! records can be processed in parallel partitions and the per-stage reports
//! merged; merged results are identical to a single-threaded run.

pub mod cleaning;
pub mod ingest;
pub mod langtag;
pub mod stats;
pub mod stopwords;
pub mod unicode_text;
