//! graph6, sparse6 and plain edge-list encodings.
//!
//! graph6 and sparse6 follow the nauty format description bit for bit,
//! including the three-byte size header used for `63 <= n <= 258047`
//! and the sparse6 padding rule for `n = 2^k`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

const BIAS: u8 = 63;
const SMALL_N: usize = 62;
const MEDIUM_N: usize = 258_047;
const LARGE_N: usize = (1 << 36) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("empty input")]
    Empty,
    #[error("byte {byte:#04x} at offset {offset} is outside the printable range 63..=126")]
    BadByte { offset: usize, byte: u8 },
    #[error("truncated size header")]
    TruncatedHeader,
    #[error("graph6 body has {found} bytes, expected {expected}")]
    BodyLength { expected: usize, found: usize },
    #[error("vertex count {0} is too large to encode")]
    TooLarge(usize),
    #[error("edge-list line {line}: {message}")]
    EdgeList { line: usize, message: String },
    #[error("sparse6 input does not start with ':'")]
    NotSparse6,
    #[error("unknown format {0:?} (expected graph6, sparse6 or edgelist)")]
    UnknownFormat(String),
}

/// An undecoded vertex count plus edge list. Unlike [`Graph`] it may be
/// disconnected; call [`RawGraph::into_graph`] to validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl RawGraph {
    pub fn from_graph(g: &Graph) -> Self {
        RawGraph {
            n: g.n(),
            edges: g.edges().collect(),
        }
    }

    /// Edges normalized to `(min, max)` and sorted.
    pub fn normalized_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn into_graph(self) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, self.edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Graph6,
    Sparse6,
    EdgeList,
}

impl FromStr for Format {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph6" | "g6" => Ok(Format::Graph6),
            "sparse6" | "s6" => Ok(Format::Sparse6),
            "edgelist" | "edges" => Ok(Format::EdgeList),
            other => Err(FormatError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Graph6 => "graph6",
            Format::Sparse6 => "sparse6",
            Format::EdgeList => "edgelist",
        })
    }
}

impl Format {
    /// Guesses the format of a file's contents: sparse6 starts with `:`,
    /// an edge list starts with a decimal vertex count (after `#` comments),
    /// anything else is treated as graph6.
    pub fn detect(text: &str) -> Format {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or("");
        let first = first.strip_prefix(">>sparse6<<").unwrap_or(first);
        if first.starts_with(':') {
            Format::Sparse6
        } else if first.split_whitespace().count() == 2
            && first.split_whitespace().all(|t| t.parse::<usize>().is_ok())
        {
            Format::EdgeList
        } else {
            Format::Graph6
        }
    }

    pub fn encode(self, g: &RawGraph) -> Result<String, FormatError> {
        match self {
            Format::Graph6 => encode_graph6(g),
            Format::Sparse6 => encode_sparse6(g),
            Format::EdgeList => Ok(encode_edgelist(g)),
        }
    }

    pub fn decode(self, text: &str) -> Result<RawGraph, FormatError> {
        match self {
            Format::Graph6 => decode_graph6(text),
            Format::Sparse6 => decode_sparse6(text),
            Format::EdgeList => decode_edgelist(text),
        }
    }
}

/// Decodes with [`Format::detect`].
pub fn decode_any(text: &str) -> Result<RawGraph, FormatError> {
    Format::detect(text).decode(text)
}

fn encode_size(n: usize, out: &mut Vec<u8>) -> Result<(), FormatError> {
    if n <= SMALL_N {
        out.push(n as u8 + BIAS);
    } else if n <= MEDIUM_N {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + BIAS);
        }
    } else if n <= LARGE_N {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + BIAS);
        }
    } else {
        return Err(FormatError::TooLarge(n));
    }
    Ok(())
}

/// Returns `(n, bytes consumed)`.
fn decode_size(data: &[u8]) -> Result<(usize, usize), FormatError> {
    let six = |i: usize| -> Result<usize, FormatError> {
        data.get(i)
            .map(|&b| (b - BIAS) as usize)
            .ok_or(FormatError::TruncatedHeader)
    };
    match data.first() {
        None => Err(FormatError::Empty),
        Some(&126) if data.get(1) == Some(&126) => {
            let mut n = 0;
            for i in 2..8 {
                n = (n << 6) | six(i)?;
            }
            Ok((n, 8))
        }
        Some(&126) => {
            let mut n = 0;
            for i in 1..4 {
                n = (n << 6) | six(i)?;
            }
            Ok((n, 4))
        }
        Some(&b) => Ok(((b - BIAS) as usize, 1)),
    }
}

fn check_printable(data: &[u8]) -> Result<(), FormatError> {
    match data.iter().position(|b| !(BIAS..=126).contains(b)) {
        Some(offset) => Err(FormatError::BadByte {
            offset,
            byte: data[offset],
        }),
        None => Ok(()),
    }
}

fn pack_bits(bits: &[bool], out: &mut Vec<u8>) {
    for chunk in bits.chunks(6) {
        let mut x = 0u8;
        for i in 0..6 {
            x = (x << 1) | chunk.get(i).copied().unwrap_or(false) as u8;
        }
        out.push(x + BIAS);
    }
}

fn unpack_bits(body: &[u8]) -> impl Iterator<Item = bool> + '_ {
    body.iter()
        .flat_map(|&b| (0..6).rev().map(move |i| ((b - BIAS) >> i) & 1 == 1))
}

fn first_record(text: &str, header: &str) -> Result<Vec<u8>, FormatError> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or(FormatError::Empty)?;
    Ok(line
        .strip_prefix(header)
        .unwrap_or(line)
        .as_bytes()
        .to_vec())
}

/// graph6 string (with trailing newline). The upper triangle is written
/// column by column: bit `(i, j)` for `i < j`, `j` ascending, then `i`.
pub fn encode_graph6(g: &RawGraph) -> Result<String, FormatError> {
    let n = g.n;
    let mut out = Vec::new();
    encode_size(n, &mut out)?;
    let total = n * n.saturating_sub(1) / 2;
    let mut bits = vec![false; total];
    for (u, v) in g.normalized_edges() {
        bits[v * (v - 1) / 2 + u] = true;
    }
    pack_bits(&bits, &mut out);
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("printable ascii"))
}

pub fn decode_graph6(text: &str) -> Result<RawGraph, FormatError> {
    let data = first_record(text, ">>graph6<<")?;
    check_printable(&data)?;
    let (n, used) = decode_size(&data)?;
    let body = &data[used..];
    let total = n * n.saturating_sub(1) / 2;
    let expected = total.div_ceil(6);
    if body.len() != expected {
        return Err(FormatError::BodyLength {
            expected,
            found: body.len(),
        });
    }
    let mut edges = Vec::new();
    let mut bits = unpack_bits(body);
    for v in 1..n {
        for u in 0..v {
            if bits.next().expect("length checked") {
                edges.push((u, v));
            }
        }
    }
    Ok(RawGraph { n, edges })
}

/// sparse6 string (with trailing newline), matching nauty's writer.
pub fn encode_sparse6(g: &RawGraph) -> Result<String, FormatError> {
    let n = g.n;
    let mut out = vec![b':'];
    encode_size(n, &mut out)?;
    let k = bits_for(n);
    let mut bits: Vec<bool> = Vec::new();
    let push = |bits: &mut Vec<bool>, x: usize| {
        for i in (0..k).rev() {
            bits.push((x >> i) & 1 == 1);
        }
    };
    let mut edges: Vec<(usize, usize)> = g
        .normalized_edges()
        .into_iter()
        .map(|(u, v)| (v, u))
        .collect();
    edges.sort_unstable();
    let mut current = 0;
    for (v, u) in edges {
        if v == current {
            bits.push(false);
        } else if v == current + 1 {
            bits.push(true);
            current = v;
        } else {
            bits.push(true);
            push(&mut bits, v);
            bits.push(false);
            current = v;
        }
        push(&mut bits, u);
    }
    let pad = (6 - bits.len() % 6) % 6;
    if pad > 0 {
        // A run of 1-bits could read back as an edge to n-1 when vertex n-2
        // is current and n is a power of two; a leading 0 prevents that.
        if k < 6 && n == 1 << k && pad > k && current + 2 == n {
            bits.push(false);
            bits.extend(std::iter::repeat_n(true, pad - 1));
        } else {
            bits.extend(std::iter::repeat_n(true, pad));
        }
    }
    pack_bits(&bits, &mut out);
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("printable ascii"))
}

pub fn decode_sparse6(text: &str) -> Result<RawGraph, FormatError> {
    let data = first_record(text, ">>sparse6<<")?;
    let rest = data.strip_prefix(b":").ok_or(FormatError::NotSparse6)?;
    check_printable(rest)?;
    let (n, used) = decode_size(rest)?;
    let k = bits_for(n);
    let bits: Vec<bool> = unpack_bits(&rest[used..]).collect();
    let mut edges = Vec::new();
    let mut v = 0usize;
    let mut pos = 0;
    while pos + 1 + k <= bits.len() {
        if bits[pos] {
            v += 1;
        }
        let x = bits[pos + 1..pos + 1 + k]
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize);
        pos += 1 + k;
        if x >= n || v >= n {
            break;
        }
        if x > v {
            v = x;
        } else {
            edges.push((x, v));
        }
    }
    Ok(RawGraph { n, edges })
}

// Number of bits needed to write n-1 in binary.
fn bits_for(n: usize) -> usize {
    let mut k = 0;
    while n > 1 && (1usize << k) < n {
        k += 1;
    }
    k
}

/// Plain text: a `n m` header line followed by `m` lines `u v`.
/// Lines starting with `#` are comments.
pub fn encode_edgelist(g: &RawGraph) -> String {
    let edges = g.normalized_edges();
    let mut s = format!("{} {}\n", g.n, edges.len());
    for (u, v) in edges {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn decode_edgelist(text: &str) -> Result<RawGraph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_pair = |line: usize, l: &str| -> Result<(usize, usize), FormatError> {
        let err = |message: &str| FormatError::EdgeList {
            line,
            message: message.to_string(),
        };
        let mut it = l.split_whitespace();
        let a = it.next().ok_or_else(|| err("missing field"))?;
        let b = it.next().ok_or_else(|| err("missing field"))?;
        if it.next().is_some() {
            return Err(err("expected two integers"));
        }
        Ok((
            a.parse().map_err(|_| err("not an integer"))?,
            b.parse().map_err(|_| err("not an integer"))?,
        ))
    };
    let (line, header) = lines.next().ok_or(FormatError::Empty)?;
    let (n, m) = parse_pair(line, header)?;
    let edges = lines
        .map(|(i, l)| parse_pair(i, l))
        .collect::<Result<Vec<_>, _>>()?;
    if edges.len() != m {
        return Err(FormatError::EdgeList {
            line,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(RawGraph { n, edges })
}
