use super::suffix::SuffixData;
use super::LzError;

/// One LZ77 phrase: a copy of `copy_len` symbols from `copy_src`, followed by
/// an optional literal. Positions are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phrase {
    pub start: usize,
    pub copy_len: usize,
    pub copy_src: Option<usize>,
    pub literal: Option<u8>,
}

impl Phrase {
    pub fn len(&self) -> usize {
        self.copy_len + usize::from(self.literal.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of the last symbol.
    pub fn end(&self) -> usize {
        self.start + self.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz77Parse {
    phrases: Vec<Phrase>,
    text_len: usize,
}

impl Lz77Parse {
    /// Checks the tiling and copy constraints, not the greedy choice.
    pub fn new(phrases: Vec<Phrase>, text_len: usize) -> Result<Self, LzError> {
        let bad = |k: usize, why: &str| Err(LzError::BadParse(format!("phrase {k}: {why}")));
        let mut at = 0;
        for (k, p) in phrases.iter().enumerate() {
            if p.start != at {
                return bad(k, "does not start where the previous one ended");
            }
            if p.is_empty() {
                return bad(k, "is empty");
            }
            match p.copy_src {
                Some(src) if src >= p.start => return bad(k, "copies from itself or later"),
                None if p.copy_len > 0 => return bad(k, "copy without a source"),
                _ => {}
            }
            if p.literal.is_none() && k + 1 != phrases.len() {
                return bad(k, "only the last phrase may omit its literal");
            }
            at += p.len();
        }
        if at != text_len || text_len == 0 {
            return Err(LzError::BadParse(format!("phrases cover {at} of {text_len} symbols")));
        }
        Ok(Lz77Parse { phrases, text_len })
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    /// Number of phrases.
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn text_len(&self) -> usize {
        self.text_len
    }

    /// Last position of every phrase.
    pub fn boundaries(&self) -> Vec<usize> {
        self.phrases.iter().map(Phrase::end).collect()
    }
}

/// Greedy LZ77: each phrase is the longest previous factor, possibly
/// overlapping its own start, plus one literal. The last phrase has no
/// literal when the factor reaches the end of the text.
pub fn parse(s: &[u8]) -> Result<Lz77Parse, LzError> {
    if s.is_empty() {
        return Err(LzError::Empty);
    }
    Ok(parse_with(s, &SuffixData::new(s)))
}

pub(crate) fn parse_with(s: &[u8], sd: &SuffixData) -> Lz77Parse {
    let lpf = sd.longest_previous_factors();
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let (len, src) = lpf[i];
        let literal = s.get(i + len).copied();
        phrases.push(Phrase { start: i, copy_len: len, copy_src: src, literal });
        i += len + 1;
    }
    Lz77Parse { phrases, text_len: s.len() }
}

/// Exhaustive longest previous factor at `i`: the longest `l` such that
/// `s[i..i+l] == s[j..j+l]` for some `j < i`, with the smallest such `j`.
pub fn naive_lpf(s: &[u8], i: usize) -> (usize, Option<usize>) {
    let mut best = (0, None);
    for j in 0..i {
        let l = (0..s.len() - i).take_while(|&k| s[j + k] == s[i + k]).count();
        if l > best.0 {
            best = (l, Some(j));
        }
    }
    best
}

pub fn decompress(parse: &Lz77Parse) -> Vec<u8> {
    let mut out = Vec::with_capacity(parse.text_len());
    for p in parse.phrases() {
        if let Some(src) = p.copy_src {
            // byte by byte so overlapping copies see their own output
            for k in 0..p.copy_len {
                out.push(out[src + k]);
            }
        }
        out.extend(p.literal);
    }
    out
}
