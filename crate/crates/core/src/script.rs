//! Scripts as ordered scene sequences and summaries as ordered sentences.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::text::{count_tokens, split_sentences, Abbreviations};

/// Heading given to text that precedes the first slugline.
pub const FRONTMATTER: &str = "FRONTMATTER";

/// Separator between scenes in a rendered script. Two blank lines keep the
/// blank-line fallback splitter aligned with rendered output.
pub const SCENE_SEPARATOR: &str = "\n\n\n";

pub const DEFAULT_SLUGLINE_PREFIXES: &[&str] =
    &["INT.", "EXT.", "INT/EXT", "INT./EXT.", "I/E.", "EST."];

/// Case-insensitive slugline prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SluglineRules {
    prefixes: Vec<String>,
}

impl Default for SluglineRules {
    fn default() -> Self {
        Self {
            prefixes: DEFAULT_SLUGLINE_PREFIXES.iter().map(|p| (*p).to_owned()).collect(),
        }
    }
}

impl SluglineRules {
    /// Default prefixes plus `extra`.
    pub fn with_extra<'a>(extra: impl IntoIterator<Item = &'a str>) -> Self {
        let mut rules = Self::default();
        for prefix in extra {
            let prefix = prefix.trim();
            if !prefix.is_empty() && !rules.prefixes.iter().any(|p| p.eq_ignore_ascii_case(prefix)) {
                rules.prefixes.push(prefix.to_owned());
            }
        }
        rules
    }

    pub fn is_slugline(&self, line: &str) -> bool {
        let line = line.trim().as_bytes();
        self.prefixes.iter().any(|p| {
            let p = p.as_bytes();
            line.len() >= p.len() && line[..p.len()].eq_ignore_ascii_case(p)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    pub index: usize,
    pub heading: String,
    pub body: String,
    pub token_count: usize,
}

impl Scene {
    pub fn new(index: usize, heading: impl Into<String>, body: impl Into<String>) -> Self {
        let heading = heading.into();
        let body = body.into();
        let token_count = count_tokens(&heading) + count_tokens(&body);
        Self { index, heading, body, token_count }
    }

    /// Heading and body separated by a newline; just the heading when the
    /// body is empty.
    pub fn text(&self) -> String {
        if self.body.is_empty() {
            self.heading.clone()
        } else {
            format!("{}\n{}", self.heading, self.body)
        }
    }

    pub fn is_frontmatter(&self) -> bool {
        self.index == 0 && self.heading == FRONTMATTER
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovieScript {
    movie_id: String,
    scenes: Vec<Scene>,
}

impl MovieScript {
    /// Builds a script from `(heading, body)` pairs, assigning indices and
    /// token counts.
    pub fn new(movie_id: impl Into<String>, scenes: Vec<(String, String)>) -> Result<Self> {
        let scenes = scenes
            .into_iter()
            .enumerate()
            .map(|(i, (h, b))| Scene::new(i, h, b))
            .collect();
        Self::from_scenes(movie_id, scenes)
    }

    /// Validates scenes loaded from elsewhere.
    pub fn from_scenes(movie_id: impl Into<String>, scenes: Vec<Scene>) -> Result<Self> {
        let movie_id = movie_id.into();
        if movie_id.trim().is_empty() {
            return Err(Error::InvalidConfig("movie id is empty".into()));
        }
        if scenes.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (pos, scene) in scenes.iter().enumerate() {
            if scene.index != pos {
                return Err(Error::InconsistentCorpus(format!(
                    "{movie_id}: scene at position {pos} has index {}",
                    scene.index
                )));
            }
            if scene.heading.trim().is_empty() && scene.body.trim().is_empty() {
                return Err(Error::InconsistentCorpus(format!("{movie_id}: scene {pos} is empty")));
            }
            let expected = count_tokens(&scene.heading) + count_tokens(&scene.body);
            if scene.token_count != expected {
                return Err(Error::InconsistentCorpus(format!(
                    "{movie_id}: scene {pos} token_count {} != {expected}",
                    scene.token_count
                )));
            }
        }
        Ok(Self { movie_id, scenes })
    }

    pub fn movie_id(&self) -> &str {
        &self.movie_id
    }

    pub fn scenes(&self) -> &[Scene] {
        &self.scenes
    }

    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.scenes.iter().map(|s| s.token_count).sum()
    }

    /// Serializes the script back to plain text. Parsing the result yields
    /// the same scenes.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.scenes.iter().map(Scene::text).collect();
        parts.join(SCENE_SEPARATOR)
    }
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

fn join_body(lines: &[&str]) -> String {
    let start = lines.iter().position(|l| !is_blank(l)).unwrap_or(lines.len());
    let end = lines.iter().rposition(|l| !is_blank(l)).map_or(start, |p| p + 1);
    let kept: Vec<&str> = lines[start..end].iter().map(|l| l.trim_end()).collect();
    kept.join("\n")
}

/// Segments raw script text into scenes at slugline boundaries.
///
/// Text before the first slugline becomes a `FRONTMATTER` scene. Without any
/// slugline the text is split on runs of two or more blank lines, and each
/// block's first line serves as its heading.
pub fn parse_script(text: &str, movie_id: &str, rules: &SluglineRules) -> Result<MovieScript> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let lines: Vec<&str> = text.lines().collect();
    let scenes = if lines.iter().any(|l| rules.is_slugline(l)) {
        split_on_sluglines(&lines, rules)
    } else {
        split_on_blank_runs(&lines)
    };
    MovieScript::new(movie_id, scenes)
}

fn split_on_sluglines(lines: &[&str], rules: &SluglineRules) -> Vec<(String, String)> {
    let first = lines.iter().position(|l| rules.is_slugline(l)).unwrap_or(lines.len());
    let mut scenes = Vec::new();

    let mut preamble = &lines[..first];
    let mut marked = false;
    if let Some(p) = preamble.iter().position(|l| !is_blank(l)) {
        if preamble[p].trim() == FRONTMATTER {
            marked = true;
            preamble = &preamble[p + 1..];
        }
    }
    if marked || preamble.iter().any(|l| !is_blank(l)) {
        scenes.push((FRONTMATTER.to_owned(), join_body(preamble)));
    }

    let mut i = first;
    while i < lines.len() {
        let heading = lines[i].trim().to_owned();
        let mut j = i + 1;
        while j < lines.len() && !rules.is_slugline(lines[j]) {
            j += 1;
        }
        scenes.push((heading, join_body(&lines[i + 1..j])));
        i = j;
    }
    scenes
}

fn split_on_blank_runs(lines: &[&str]) -> Vec<(String, String)> {
    let mut blocks: Vec<&[&str]> = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < lines.len() {
        if is_blank(lines[i]) {
            let mut j = i;
            while j < lines.len() && is_blank(lines[j]) {
                j += 1;
            }
            if j - i >= 2 {
                blocks.push(&lines[start..i]);
                start = j;
            }
            i = j;
        } else {
            i += 1;
        }
    }
    blocks.push(&lines[start..]);

    blocks
        .into_iter()
        .filter_map(|block| {
            let h = block.iter().position(|l| !is_blank(l))?;
            Some((block[h].trim().to_owned(), join_body(&block[h + 1..])))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    movie_id: String,
    sentences: Vec<String>,
}

impl Summary {
    pub fn new(movie_id: impl Into<String>, sentences: Vec<String>) -> Result<Self> {
        let movie_id = movie_id.into();
        if movie_id.trim().is_empty() {
            return Err(Error::InvalidConfig("movie id is empty".into()));
        }
        if sentences.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = sentences.iter().position(|s| s.trim().is_empty()) {
            return Err(Error::InconsistentCorpus(format!("{movie_id}: sentence {pos} is empty")));
        }
        Ok(Self { movie_id, sentences })
    }

    /// Splits raw summary prose with [`split_sentences`].
    pub fn parse(movie_id: &str, text: &str, abbreviations: &Abbreviations) -> Result<Self> {
        Self::new(movie_id, split_sentences(text, abbreviations)?)
    }

    pub fn movie_id(&self) -> &str {
        &self.movie_id
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| count_tokens(s)).sum()
    }
}
