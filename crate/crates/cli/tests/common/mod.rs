//! Shared helpers for the CLI test suites: running the binary, generating
//! deterministic synthetic fixtures, and snapshotting output directories.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpora_bin() -> &'static str {
    env!("CARGO_BIN_EXE_corpora")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(corpora_bin())
        .args(args)
        .output()
        .expect("spawning corpora binary")
}

pub fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "corpora {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).expect("reading output dir") {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            files.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    files
}

pub const SINHALA_WORDS: &[&str] = &[
    "අද",
    "දින",
    "ශ\u{0DCA}\u{200D}රී",
    "ලංකා",
    "ජාතික",
    "මහතා",
    "එක්සත්",
    "අමාත\u{0DCA}\u{200D}ය",
    "ගැන",
    "සඳහා",
    "කටයුතු",
    "රාජපක්ෂ",
    "ජනාධිපති",
    "පාර්ලිමේන්තු",
    "විස්තර",
    "බලන්න",
    "ඇති",
    "කරන",
    "ලෙස",
    "ගරු",
    "අතර",
    "සිට",
    "විසින්",
    "මෙම",
];

const ENGLISH_WORDS: &[&str] = &[
    "news", "update", "live", "video", "breaking", "watch", "today", "gossip",
];

const TAMIL_WORDS: &[&str] = &["தமிழ்", "செய்தி", "இலங்கை"];

const URLS: &[&str] = &[
    "http://news.lk/a.html",
    "www.adaderana.lk",
    "colombo.news.lk/story/123",
];

const ARTIFACTS: &[&str] = &["indexph", "featureyoutube", "sundayrividaharahtml"];

const EMOJI: &[&str] = &["😀", "🔥", "❤"];

const DIGITS: &[&str] = &["12", "2020", "50000"];

const PUNCT_SUFFIX: &[&str] = &[".", ",", "!", "?", ":("];

const PAGES: &[&str] = &[
    "Ada Derana Sinhala",
    "Neth FM",
    "Hiru News",
    "Newsfirstlk",
    "HIRU FM",
    "BBC News සිංහල",
    "Rivira",
    "Sirasa Lakshapathi",
    "Daily Mirror",
    "Tamil Win",
];

const TYPES: &[&str] = &[
    "YouTube",
    "Status",
    "Link",
    "Photo",
    "Native Video",
    "Video",
    "Vine",
    "Live Video Complete",
    "Live Video",
    "Reel",
];

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

/// One synthetic message. Page index biases the language mix so the corpus
/// has Sinhala-heavy, English-heavy, and Tamil-heavy contributors.
pub fn synth_message(rng: &mut ChaCha8Rng, page_index: usize, force_url: bool) -> String {
    let roll: f64 = rng.gen();
    if roll < 0.04 {
        return String::new();
    }
    if roll < 0.06 {
        return "   ".to_string();
    }
    let words = rng.gen_range(1..=30);
    let mut message = String::new();
    for w in 0..words {
        if w > 0 {
            message.push(' ');
        }
        let style: f64 = rng.gen();
        let word = match page_index {
            8 => {
                // English-heavy page.
                if style < 0.8 { pick(rng, ENGLISH_WORDS) } else { pick(rng, DIGITS) }
            }
            9 => {
                if style < 0.8 { pick(rng, TAMIL_WORDS) } else { pick(rng, ENGLISH_WORDS) }
            }
            _ => {
                if style < 0.72 {
                    pick(rng, SINHALA_WORDS)
                } else if style < 0.82 {
                    pick(rng, ENGLISH_WORDS)
                } else if style < 0.86 {
                    pick(rng, URLS)
                } else if style < 0.90 {
                    pick(rng, ARTIFACTS)
                } else if style < 0.94 {
                    pick(rng, DIGITS)
                } else if style < 0.97 {
                    pick(rng, EMOJI)
                } else {
                    pick(rng, TAMIL_WORDS)
                }
            }
        };
        message.push_str(word);
        if rng.gen_bool(0.15) {
            message.push_str(pick(rng, PUNCT_SUFFIX));
        }
    }
    if force_url {
        message.push(' ');
        message.push_str(pick(rng, URLS));
    }
    message
}

/// Deterministic JSONL fixture of `posts` synthetic records.
pub fn write_fixture_jsonl(path: &Path, posts: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..posts {
        let page_index = rng.gen_range(0..PAGES.len());
        let message = synth_message(&mut rng, page_index, i % 10 == 3);
        let date = format!(
            "{:04}-{:02}-{:02}",
            rng.gen_range(2010..=2020),
            rng.gen_range(1..=12),
            rng.gen_range(1..=28)
        );
        let record = serde_json::json!({
            "page_name": PAGES[page_index],
            "created": date,
            "type": TYPES[rng.gen_range(0..TYPES.len())],
            "message": message,
        });
        out.push_str(&record.to_string());
        out.push('\n');
    }
    fs::write(path, out).expect("writing fixture");
}
