//! Line-oriented text formats.
//!
//! Every format starts with a `<NAME> v1` header. Blank lines and lines
//! starting with `#` are ignored by the parsers (except in the DIMACS
//! formula format, which uses `c` comments). Writers emit canonical order,
//! so `write(parse(write(x))) == write(x)`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::constructions::{Clause, Formula3Sat5, Literal};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::label_cover::{LabelCoverInstance, Labeling, Relation, RepCover, Side, Symbol};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    comment: &'static str,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, comment: &'static str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            comment,
            last: 0,
        }
    }

    /// Next significant line as (1-based line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with(self.comment) {
                continue;
            }
            return Some((i + 1, trimmed.split_whitespace().collect()));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens()
            .ok_or_else(|| Error::parse(self.last + 1, format!("unexpected end of input, expected {what}")))
    }

    fn header(&mut self, name: &str) -> Result<()> {
        let (line, toks) = self.expect("header")?;
        if toks != [name, "v1"] {
            return Err(Error::parse(line, format!("expected header `{name} v1`")));
        }
        Ok(())
    }
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

/// Parses `KEY value KEY value ...` with the keys in the given order.
fn keyed<const K: usize>(line: usize, toks: &[&str], keys: [&str; K]) -> Result<[usize; K]> {
    let expected = keys.iter().map(|k| format!("{k} <n>")).collect::<Vec<_>>().join(" ");
    if toks.len() != 2 * K {
        return Err(Error::parse(line, format!("expected `{expected}`")));
    }
    let mut out = [0usize; K];
    for (i, key) in keys.iter().enumerate() {
        if toks[2 * i] != *key {
            return Err(Error::parse(line, format!("expected `{expected}`")));
        }
        out[i] = num(line, toks[2 * i + 1], key)?;
    }
    Ok(out)
}

fn arity(line: usize, toks: &[&str], n: usize, what: &str) -> Result<()> {
    if toks.len() != n {
        return Err(Error::parse(line, format!("expected {what}")));
    }
    Ok(())
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("GRAPH v1\nN {} M {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parses a GRAPH v1 document. Edges must be listed once each, with `u < v`,
/// in sorted order.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = Lines::new(text, "#");
    lines.header("GRAPH")?;
    let (line, toks) = lines.expect("`N <n> M <m>`")?;
    let [n, m] = keyed(line, &toks, ["N", "M"])?;
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m.min(1 << 20));
    while let Some((line, toks)) = lines.next_tokens() {
        arity(line, &toks, 2, "`u v`")?;
        let u: usize = num(line, toks[0], "vertex")?;
        let v: usize = num(line, toks[1], "vertex")?;
        if u == v {
            return Err(Error::parse(line, format!("self-loop at {u}")));
        }
        if u.max(v) >= n {
            return Err(Error::parse(line, format!("vertex {} out of range 0..{n}", u.max(v))));
        }
        if u > v {
            return Err(Error::parse(line, format!("edge `{u} {v}` must be written with u < v")));
        }
        if let Some(&prev) = edges.last() {
            if prev == (u, v) {
                return Err(Error::parse(line, format!("duplicate edge {u} {v}")));
            }
            if prev > (u, v) {
                return Err(Error::parse(line, "edges are not sorted"));
            }
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            lines.last,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Ok(Graph::from_canonical(n, edges))
}

pub fn write_lc(lc: &LabelCoverInstance) -> String {
    let mut out = format!(
        "LC v1\nA {} B {} SA {} SB {} M {}\n",
        lc.a_count(),
        lc.b_count(),
        lc.sigma_a(),
        lc.sigma_b(),
        lc.superedge_count()
    );
    for e in lc.edges() {
        let rel = lc.relation(e);
        writeln!(out, "E {} {} {}", e.a, e.b, rel.len()).unwrap();
        for &(x, y) in rel.pairs() {
            writeln!(out, "{x} {y}").unwrap();
        }
    }
    out
}

/// Parses an LC v1 document. Superedges may appear in any order; relation
/// pairs must be sorted and distinct.
pub fn parse_lc(text: &str) -> Result<LabelCoverInstance> {
    let mut lines = Lines::new(text, "#");
    lines.header("LC")?;
    let (line, toks) = lines.expect("instance header")?;
    let [a_count, b_count, sa, sb, m] = keyed(line, &toks, ["A", "B", "SA", "SB", "M"])?;
    let sigma_a = u32::try_from(sa).map_err(|_| Error::parse(line, "SA too large"))?;
    let sigma_b = u32::try_from(sb).map_err(|_| Error::parse(line, "SB too large"))?;
    if sigma_a == 0 || sigma_b == 0 {
        return Err(Error::parse(line, "alphabet sizes must be at least 1"));
    }
    let mut triples = Vec::with_capacity(m.min(1 << 20));
    let mut seen = std::collections::HashSet::new();
    while let Some((line, toks)) = lines.next_tokens() {
        if toks.len() != 4 || toks[0] != "E" {
            return Err(Error::parse(line, "expected `E <a> <b> <t>`"));
        }
        let a: usize = num(line, toks[1], "A vertex")?;
        let b: usize = num(line, toks[2], "B vertex")?;
        let t: usize = num(line, toks[3], "relation size")?;
        if a >= a_count || b >= b_count {
            return Err(Error::parse(line, format!("superedge ({a}, {b}) out of range")));
        }
        if !seen.insert((a, b)) {
            return Err(Error::parse(line, format!("duplicate superedge ({a}, {b})")));
        }
        if t == 0 {
            return Err(Error::parse(line, "relation must be nonempty"));
        }
        let mut pairs: Vec<(Symbol, Symbol)> = Vec::with_capacity(t.min(1 << 16));
        for _ in 0..t {
            let (pline, ptoks) = lines.expect("relation pair")?;
            arity(pline, &ptoks, 2, "`<alpha> <beta>`")?;
            let x: Symbol = num(pline, ptoks[0], "symbol")?;
            let y: Symbol = num(pline, ptoks[1], "symbol")?;
            if x >= sigma_a || y >= sigma_b {
                return Err(Error::parse(pline, format!("pair ({x}, {y}) outside the alphabets")));
            }
            if let Some(&prev) = pairs.last() {
                if prev >= (x, y) {
                    return Err(Error::parse(pline, "relation pairs must be sorted and distinct"));
                }
            }
            pairs.push((x, y));
        }
        triples.push((a, b, Relation::new(pairs)?));
    }
    if triples.len() != m {
        return Err(Error::parse(
            lines.last,
            format!("header declares {m} superedges, found {}", triples.len()),
        ));
    }
    LabelCoverInstance::new(a_count, b_count, sigma_a, sigma_b, triples)
}

fn side_token(line: usize, tok: &str) -> Result<Side> {
    match tok {
        "A" => Ok(Side::A),
        "B" => Ok(Side::B),
        _ => Err(Error::parse(line, format!("expected side `A` or `B`, got `{tok}`"))),
    }
}

fn side_member(line: usize, toks: &[&str]) -> Result<(Side, usize, Symbol)> {
    arity(line, toks, 3, "`<A|B> <vertex> <symbol>`")?;
    Ok((
        side_token(line, toks[0])?,
        num(line, toks[1], "vertex")?,
        num(line, toks[2], "symbol")?,
    ))
}

pub fn write_cover(cover: &RepCover) -> String {
    let mut out = String::from("COVER v1\n");
    for m in cover.iter() {
        writeln!(out, "{} {} {}", m.side.as_str(), m.vertex, m.symbol).unwrap();
    }
    out
}

/// Parses a COVER v1 document; repeated members collapse. Range checks
/// against an instance happen when the cover is used.
pub fn parse_cover(text: &str) -> Result<RepCover> {
    let mut lines = Lines::new(text, "#");
    lines.header("COVER")?;
    let mut cover = RepCover::new();
    while let Some((line, toks)) = lines.next_tokens() {
        let (side, v, s) = side_member(line, &toks)?;
        cover.insert(side, v, s);
    }
    Ok(cover)
}

pub fn write_labeling(lab: &Labeling) -> String {
    let mut out = String::from("LABEL v1\n");
    for (side, gamma) in [(Side::A, &lab.gamma_a), (Side::B, &lab.gamma_b)] {
        for (v, s) in gamma.iter().enumerate() {
            writeln!(out, "{} {v} {s}", side.as_str()).unwrap();
        }
    }
    out
}

/// Parses a LABEL v1 document for `lc`: every supervertex must be labelled
/// exactly once with a symbol of its alphabet.
pub fn parse_labeling(text: &str, lc: &LabelCoverInstance) -> Result<Labeling> {
    let mut lines = Lines::new(text, "#");
    lines.header("LABEL")?;
    let mut gamma: [Vec<Option<Symbol>>; 2] = [vec![None; lc.a_count()], vec![None; lc.b_count()]];
    while let Some((line, toks)) = lines.next_tokens() {
        let (side, v, s) = side_member(line, &toks)?;
        let slot = gamma[side as usize]
            .get_mut(v)
            .ok_or_else(|| Error::parse(line, format!("{} vertex {v} out of range", side.as_str())))?;
        if s >= lc.sigma(side) {
            return Err(Error::parse(line, format!("symbol {s} outside the {} alphabet", side.as_str())));
        }
        if slot.replace(s).is_some() {
            return Err(Error::parse(line, format!("{} vertex {v} labelled twice", side.as_str())));
        }
    }
    let mut out = [Vec::new(), Vec::new()];
    for (i, side) in [Side::A, Side::B].into_iter().enumerate() {
        for (v, s) in gamma[i].iter().enumerate() {
            match s {
                Some(s) => out[i].push(*s),
                None => {
                    return Err(Error::parse(
                        lines.last,
                        format!("{} vertex {v} has no label", side.as_str()),
                    ))
                }
            }
        }
    }
    let [gamma_a, gamma_b] = out;
    Ok(Labeling::new(gamma_a, gamma_b))
}

pub fn write_subset(host_fingerprint: &str, members: &[EdgeId]) -> String {
    let mut out = format!("SUBSET v1\nHOST {host_fingerprint}\n");
    for e in members {
        writeln!(out, "{e}").unwrap();
    }
    out
}

/// Parses a SUBSET v1 document into the host fingerprint and the sorted,
/// distinct edge ids.
pub fn parse_subset(text: &str) -> Result<(String, Vec<EdgeId>)> {
    let mut lines = Lines::new(text, "#");
    lines.header("SUBSET")?;
    let (line, toks) = lines.expect("`HOST <fingerprint>`")?;
    if toks.len() != 2 || toks[0] != "HOST" {
        return Err(Error::parse(line, "expected `HOST <fingerprint>`"));
    }
    let host = toks[1].to_string();
    let mut members: Vec<EdgeId> = Vec::new();
    while let Some((line, toks)) = lines.next_tokens() {
        arity(line, &toks, 1, "an edge id")?;
        let e: EdgeId = num(line, toks[0], "edge id")?;
        if let Some(&prev) = members.last() {
            if prev >= e {
                return Err(Error::parse(line, "edge ids must be sorted and distinct"));
            }
        }
        members.push(e);
    }
    Ok((host, members))
}

pub fn write_formula(f: &Formula3Sat5) -> String {
    let seed = f.seed().map_or("none".to_string(), |s| s.to_string());
    let planted = f.planted().map_or("none".to_string(), |p| {
        p.iter().map(|&b| if b { '1' } else { '0' }).collect()
    });
    let mut out = format!(
        "c lcspanner seed={seed} planted={planted}\np cnf {} {}\n",
        f.var_count(),
        f.clauses().len()
    );
    for clause in f.clauses() {
        for l in clause {
            let v = l.var as i64 + 1;
            write!(out, "{} ", if l.positive { v } else { -v }).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

fn parse_meta(line: usize, toks: &[&str]) -> Result<(Option<u64>, Option<Vec<bool>>)> {
    let mut seed = None;
    let mut planted = None;
    for tok in &toks[2..] {
        if let Some(s) = tok.strip_prefix("seed=") {
            if s != "none" {
                seed = Some(num(line, s, "seed")?);
            }
        } else if let Some(p) = tok.strip_prefix("planted=") {
            if p != "none" {
                let bits = p
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::parse(line, "planted assignment must be a 0/1 string")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                planted = Some(bits);
            }
        }
    }
    Ok((seed, planted))
}

/// Parses a DIMACS CNF formula with exactly three literals per clause
/// (one clause per line). The `c lcspanner ...` comment, if present,
/// restores the seed and planted assignment.
pub fn parse_formula(text: &str) -> Result<Formula3Sat5> {
    let mut seed = None;
    let mut planted = None;
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None => continue,
            Some(&"c") => {
                if toks.get(1) == Some(&"lcspanner") {
                    (seed, planted) = parse_meta(line, &toks)?;
                }
            }
            Some(&"p") => {
                if header.is_some() {
                    return Err(Error::parse(line, "repeated problem line"));
                }
                if toks.len() != 4 || toks[1] != "cnf" {
                    return Err(Error::parse(line, "expected `p cnf <vars> <clauses>`"));
                }
                header = Some((num(line, toks[2], "variable count")?, num(line, toks[3], "clause count")?));
            }
            Some(_) => {
                let Some((n, _)) = header else {
                    return Err(Error::parse(line, "clause before the problem line"));
                };
                if toks.len() != 4 || toks[3] != "0" {
                    return Err(Error::parse(line, "expected three literals followed by 0"));
                }
                let mut clause = [Literal { var: 0, positive: true }; 3];
                for (slot, tok) in clause.iter_mut().zip(&toks[..3]) {
                    let lit: i64 = num(line, tok, "literal")?;
                    if lit == 0 || lit.unsigned_abs() as usize > n {
                        return Err(Error::parse(line, format!("literal {lit} out of range")));
                    }
                    *slot = Literal {
                        var: lit.unsigned_abs() as usize - 1,
                        positive: lit > 0,
                    };
                }
                clauses.push(clause);
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::parse(last, "missing problem line"));
    };
    if clauses.len() != m {
        return Err(Error::parse(last, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    Formula3Sat5::new(n, clauses, seed, planted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_3sat5, lc_from_3sat5};
    use crate::graph::named;
    use crate::label_cover::fixtures;
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip_and_rejections() {
        let g = named::petersen();
        let text = write_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert_eq!(write_graph(&parse_graph(&text).unwrap()), text);

        let c4 = "GRAPH v1\nN 4 M 4\n0 1\n0 3\n1 2\n2 3\n";
        assert_eq!(parse_graph(c4).unwrap().edge_count(), 4);
        for bad in [
            "GRAPH v2\nN 2 M 1\n0 1\n",
            "GRAPH v1\nN 2 M 1\n1 1\n",
            "GRAPH v1\nN 2 M 1\n0 2\n",
            "GRAPH v1\nN 3 M 2\n0 1\n0 1\n",
            "GRAPH v1\nN 3 M 2\n0 2\n0 1\n",
            "GRAPH v1\nN 3 M 1\n1 0\n",
            "GRAPH v1\nN 3 M 2\n0 1\n",
            "GRAPH v1\nN 3\n",
            "GRAPH v1\nN x M 0\n",
        ] {
            assert!(parse_graph(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_graph("GRAPH v1\nN 3 M 2\n0 1\n\n1 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lc_round_trip() {
        let lc = fixtures::xor_odd_cycle();
        let text = write_lc(&lc);
        assert_eq!(parse_lc(&text).unwrap(), lc);
        let f = gen_3sat5(6, 3, None).unwrap();
        let lc = lc_from_3sat5(&f);
        assert_eq!(write_lc(&parse_lc(&write_lc(&lc)).unwrap()), write_lc(&lc));
    }

    #[test]
    fn lc_accepts_any_edge_order_but_rejects_duplicates() {
        let shuffled = "LC v1\nA 2 B 1 SA 1 SB 1 M 2\nE 1 0 1\n0 0\nE 0 0 1\n0 0\n";
        let lc = parse_lc(shuffled).unwrap();
        assert_eq!((lc.edges()[0].a, lc.edges()[1].a), (0, 1));
        for bad in [
            "LC v1\nA 2 B 1 SA 1 SB 1 M 2\nE 0 0 1\n0 0\nE 0 0 1\n0 0\n",
            "LC v1\nA 1 B 1 SA 2 SB 2 M 1\nE 0 0 2\n1 0\n0 0\n",
            "LC v1\nA 1 B 1 SA 2 SB 2 M 1\nE 0 0 0\n",
            "LC v1\nA 1 B 1 SA 2 SB 2 M 1\nE 0 0 1\n2 0\n",
            "LC v1\nA 1 B 1 SA 2 SB 2 M 1\nE 0 0 2\n0 0\n",
            "LC v1\nA 1 B 1 SA 2 SB 2 M 2\nE 0 0 1\n0 0\n",
        ] {
            assert!(parse_lc(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn cover_and_labeling_round_trip() {
        let lc = fixtures::xor_odd_cycle();
        let cover: RepCover = [(Side::B, 1, 0), (Side::A, 0, 1), (Side::A, 0, 0)]
            .into_iter()
            .map(|(side, vertex, symbol)| crate::label_cover::RepMember { side, vertex, symbol })
            .collect();
        assert_eq!(parse_cover(&write_cover(&cover)).unwrap(), cover);
        assert_eq!(parse_cover("COVER v1\nA 0 1\nA 0 1\n").unwrap().len(), 1);
        assert!(parse_cover("COVER v1\nC 0 1\n").is_err());

        let lab = Labeling::new(vec![0, 1], vec![1, 0]);
        assert_eq!(parse_labeling(&write_labeling(&lab), &lc).unwrap(), lab);
        assert!(parse_labeling("LABEL v1\nA 0 0\nA 1 0\nB 0 0\n", &lc).is_err());
        assert!(parse_labeling("LABEL v1\nA 0 0\nA 0 1\nA 1 0\nB 0 0\nB 1 0\n", &lc).is_err());
        assert!(parse_labeling("LABEL v1\nA 0 2\nA 1 0\nB 0 0\nB 1 0\n", &lc).is_err());
    }

    #[test]
    fn subset_round_trip() {
        let text = write_subset("abc123", &[0, 4, 9]);
        assert_eq!(parse_subset(&text).unwrap(), ("abc123".to_string(), vec![0, 4, 9]));
        assert!(parse_subset("SUBSET v1\nHOST x\n3\n1\n").is_err());
        assert!(parse_subset("SUBSET v1\n3\n").is_err());
    }

    #[test]
    fn formula_round_trip() {
        let planted = [true, false, true, true, false, false];
        let f = gen_3sat5(6, 11, Some(&planted)).unwrap();
        let text = write_formula(&f);
        assert!(text.starts_with("c lcspanner seed=11 planted=101100\np cnf 6 10\n"));
        assert_eq!(parse_formula(&text).unwrap(), f);
        let g = gen_3sat5(3, 2, None).unwrap();
        assert_eq!(parse_formula(&write_formula(&g)).unwrap(), g);
        assert!(parse_formula("p cnf 3 5\n1 2 0\n").is_err());
        assert!(parse_formula("1 2 3 0\n").is_err());
    }

    proptest! {
        #[test]
        fn random_graph_round_trip(n in 1usize..12, bits in proptest::collection::vec(any::<bool>(), 66)) {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i % bits.len()] { edges.push((u, v)); }
                    i += 1;
                }
            }
            let g = Graph::new(n, edges).unwrap();
            prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }

        #[test]
        fn random_lc_round_trip(
            a in 1usize..4, b in 1usize..4, sa in 1u32..4, sb in 1u32..4,
            mask in proptest::collection::vec(any::<u16>(), 16),
        ) {
            let mut triples = Vec::new();
            for i in 0..a {
                for j in 0..b {
                    let bits = mask[i * 4 + j];
                    if bits & 1 == 0 { continue; }
                    let pairs: Vec<_> = (0..sa).flat_map(|x| (0..sb).map(move |y| (x, y)))
                        .enumerate()
                        .filter(|(k, _)| bits >> (1 + k) & 1 == 1)
                        .map(|(_, p)| p)
                        .collect();
                    if pairs.is_empty() { continue; }
                    triples.push((i, j, Relation::new(pairs).unwrap()));
                }
            }
            let lc = LabelCoverInstance::new(a, b, sa, sb, triples).unwrap();
            prop_assert_eq!(parse_lc(&write_lc(&lc)).unwrap(), lc);
        }
    }
}
