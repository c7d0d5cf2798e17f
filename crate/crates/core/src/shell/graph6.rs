//! graph6 encoding for graphs on at most 62 vertices.

use thiserror::Error;

use crate::graph::{Graph, MAX_VERTICES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed graph6 at byte {offset}: {reason}")]
pub struct MalformedGraph6 {
    pub offset: usize,
    pub reason: String,
}

const HEADER: &str = ">>graph6<<";

fn fail(offset: usize, reason: impl Into<String>) -> MalformedGraph6 {
    MalformedGraph6 { offset, reason: reason.into() }
}

/// Parses one graph6 line; a leading `>>graph6<<` and trailing whitespace are allowed.
pub fn parse_graph6(text: &str) -> Result<Graph, MalformedGraph6> {
    let body = text.trim_end();
    let (skip, body) = match body.strip_prefix(HEADER) {
        Some(rest) => (HEADER.len(), rest),
        None => (0, body),
    };
    let bytes = body.as_bytes();
    let Some(&first) = bytes.first() else {
        return Err(fail(skip, "empty input"));
    };
    if !(63..=126).contains(&first) {
        return Err(fail(skip, format!("byte {first} outside the printable range 63..=126")));
    }
    if first == 126 {
        return Err(fail(skip, format!("multi-byte vertex counts exceed the {MAX_VERTICES}-vertex limit")));
    }
    let n = (first - 63) as usize;
    let pairs = n * n.saturating_sub(1) / 2;
    let need = pairs.div_ceil(6);
    let data = &bytes[1..];
    if data.len() != need {
        return Err(fail(skip + 1 + data.len().min(need), format!("expected {need} data bytes, found {}", data.len())));
    }
    let mut g = Graph::empty(n);
    for (k, (i, j)) in Graph::pairs(n).enumerate() {
        let byte = data[k / 6];
        if !(63..=126).contains(&byte) {
            return Err(fail(skip + 1 + k / 6, format!("byte {byte} outside the printable range 63..=126")));
        }
        if (byte - 63) >> (5 - k % 6) & 1 == 1 {
            g.add_edge(i, j);
        }
    }
    if !pairs.is_multiple_of(6) {
        let last = data[need - 1] - 63;
        if last & ((1u8 << (6 - pairs % 6)) - 1) != 0 {
            return Err(fail(skip + need, "nonzero padding bits"));
        }
    }
    Ok(g)
}

pub fn emit_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = vec![(n + 63) as u8];
    let mut acc = 0u8;
    let mut used = 0;
    for (i, j) in Graph::pairs(n) {
        acc = acc << 1 | g.has_edge(i, j) as u8;
        used += 1;
        if used == 6 {
            out.push(acc + 63);
            acc = 0;
            used = 0;
        }
    }
    if used > 0 {
        out.push((acc << (6 - used)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertex_cases() {
        assert_eq!(parse_graph6("A_").unwrap(), Graph::complete(2));
        assert_eq!(parse_graph6("A?").unwrap(), Graph::empty(2));
        assert_eq!(emit_graph6(&Graph::complete(2)), "A_");
        assert_eq!(parse_graph6(">>graph6<<A_\n").unwrap(), Graph::complete(2));
    }

    #[test]
    fn known_encodings() {
        // Reference strings from the standard encoding.
        assert_eq!(emit_graph6(&Graph::cycle(5)), "Dhc");
        assert_eq!(emit_graph6(&Graph::complete(4)), "C~");
        assert_eq!(emit_graph6(&Graph::empty(0)), "?");
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_graph6("").unwrap_err().offset, 0);
        assert_eq!(parse_graph6("D").unwrap_err().offset, 1);
        assert_eq!(parse_graph6("A`").unwrap_err().reason, "nonzero padding bits");
        assert!(parse_graph6("~").is_err());
        assert_eq!(parse_graph6("D h").unwrap_err().offset, 1);
    }
}
