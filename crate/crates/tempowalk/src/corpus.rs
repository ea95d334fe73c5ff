//! Walk corpus: tagged vertex-token sentences, stored flat.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::walk::Walk;

/// Borrowed view of one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sentence<'a> {
    /// Paragraph tag: the snapshot index the walk started from.
    pub tag: u32,
    pub tokens: &'a [u32],
}

/// All walk sentences of a run. Tokens live in one flat buffer so that
/// million-sentence corpora stay allocation-light.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    tags: Vec<u32>,
    /// Sentence i spans `tokens[bounds[i]..bounds[i+1]]`.
    bounds: Vec<usize>,
    tokens: Vec<u32>,
    pub num_paragraph_tags: usize,
    pub num_vertices: usize,
}

impl WalkCorpus {
    pub fn from_walks<I: IntoIterator<Item = Walk>>(
        walks: I,
        num_paragraph_tags: usize,
        num_vertices: usize,
    ) -> Result<Self> {
        let mut corpus = WalkCorpus {
            tags: Vec::new(),
            bounds: vec![0],
            tokens: Vec::new(),
            num_paragraph_tags,
            num_vertices,
        };
        for walk in walks {
            corpus.push(walk.start_layer, &walk.tokens)?;
        }
        Ok(corpus)
    }

    pub fn push(&mut self, tag: u32, tokens: &[u32]) -> Result<()> {
        if tag as usize >= self.num_paragraph_tags {
            return Err(Error::Invalid(format!(
                "paragraph tag {tag} out of range (< {})",
                self.num_paragraph_tags
            )));
        }
        if let Some(bad) = tokens.iter().find(|&&v| v as usize >= self.num_vertices) {
            return Err(Error::Invalid(format!(
                "token {bad} out of range (< {})",
                self.num_vertices
            )));
        }
        self.tags.push(tag);
        self.tokens.extend_from_slice(tokens);
        self.bounds.push(self.tokens.len());
        Ok(())
    }

    pub fn num_sentences(&self) -> usize {
        self.tags.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    #[inline]
    pub fn sentence(&self, i: usize) -> Sentence<'_> {
        Sentence { tag: self.tags[i], tokens: &self.tokens[self.bounds[i]..self.bounds[i + 1]] }
    }

    pub fn sentences(&self) -> impl Iterator<Item = Sentence<'_>> + '_ {
        (0..self.num_sentences()).map(|i| self.sentence(i))
    }

    /// Per-vertex occurrence counts across all sentences.
    pub fn token_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.num_vertices];
        for &t in &self.tokens {
            counts[t as usize] += 1;
        }
        counts
    }

    /// Text form: one sentence per line, `tag<TAB>v1 v2 v3 ...`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::new();
        for s in self.sentences() {
            line.clear();
            line.push_str(&s.tag.to_string());
            line.push('\t');
            for (i, tok) in s.tokens.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&tok.to_string());
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("corpus text is ascii")
    }

    /// Parse the text form; tag and vertex universes are inferred as
    /// max+1 unless larger values are supplied.
    pub fn read_text<R: BufRead>(r: R, num_paragraph_tags: usize, num_vertices: usize) -> Result<Self> {
        let mut tags = Vec::new();
        let mut bounds = vec![0usize];
        let mut tokens: Vec<u32> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (tag_part, rest) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected `tag<TAB>tokens`".into(),
            })?;
            let tag: u32 = tag_part.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad tag {tag_part:?}"),
            })?;
            tags.push(tag);
            for tok in rest.split_whitespace() {
                let v: u32 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad token {tok:?}"),
                })?;
                tokens.push(v);
            }
            bounds.push(tokens.len());
        }
        let max_tag = tags.iter().max().map_or(0, |&t| t as usize + 1);
        let max_tok = tokens.iter().max().map_or(0, |&t| t as usize + 1);
        Ok(WalkCorpus {
            tags,
            bounds,
            tokens,
            num_paragraph_tags: num_paragraph_tags.max(max_tag),
            num_vertices: num_vertices.max(max_tok),
        })
    }
}
