use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::LpInstance;
use crate::matrix::Matrix;
use crate::rational::{format_vec, parse_rational, Bound, Rational};
use crate::solver::{general_form_reduce, GeneralForm};

/// `{x : Ax = b, Bx ≤ d}` as read from a file with the `general` flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSystem {
    pub a: Option<Matrix>,
    pub b: Vec<Rational>,
    pub b_ineq: Matrix,
    pub d: Vec<Rational>,
}

impl GeneralSystem {
    pub fn reduce(&self) -> Result<GeneralForm> {
        general_form_reduce(self.a.as_ref(), &self.b_ineq, &self.b, &self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedInstance {
    Standard(LpInstance),
    General(GeneralSystem),
}

impl ParsedInstance {
    pub fn standard(self) -> Result<LpInstance> {
        match self {
            ParsedInstance::Standard(i) => Ok(i),
            ParsedInstance::General(_) => Err(Error::InvalidInput("expected a standard-form instance".into())),
        }
    }

    pub fn general(self) -> Result<GeneralSystem> {
        match self {
            ParsedInstance::General(g) => Ok(g),
            ParsedInstance::Standard(_) => Err(Error::InvalidInput("expected a general-form instance (flag `general`)".into())),
        }
    }
}

#[derive(Debug, Clone)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn parse_err(tok: &Token<'_>, message: impl Into<String>) -> Error {
    Error::Parse {
        line: tok.line,
        column: tok.column,
        message: message.into(),
    }
}

/// Splits into logical lines of tokens. `#` starts a comment and a lone `/`
/// acts as a line break, so one-line instances are possible.
fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut current = Vec::new();
        let mut start = None;
        let bytes: Vec<(usize, char)> = content.char_indices().collect();
        for (pos, &(i, ch)) in bytes.iter().enumerate() {
            if !ch.is_whitespace() && start.is_none() {
                start = Some(i);
            }
            let at_end = pos + 1 == bytes.len();
            if let Some(s) = start {
                if ch.is_whitespace() || at_end {
                    let end = if ch.is_whitespace() { i } else { i + ch.len_utf8() };
                    let text = &content[s..end];
                    let column = content[..s].chars().count() + 1;
                    if text == "/" {
                        if !current.is_empty() {
                            lines.push(std::mem::take(&mut current));
                        }
                    } else {
                        current.push(Token { text, line: ln + 1, column });
                    }
                    start = None;
                }
            }
        }
        if !current.is_empty() {
            lines.push(current);
        }
    }
    lines
}

const SECTIONS: [&str; 6] = ["A", "b", "c", "u", "B", "d"];

struct Section<'a> {
    head: Token<'a>,
    rows: Vec<Vec<Token<'a>>>,
}

fn rational(tok: &Token<'_>) -> Result<Rational> {
    parse_rational(tok.text).ok_or_else(|| parse_err(tok, format!("not a rational: `{}`", tok.text)))
}

fn bound(tok: &Token<'_>) -> Result<Bound> {
    if tok.text.eq_ignore_ascii_case("inf") {
        Ok(Bound::Infinite)
    } else {
        rational(tok).map(Bound::Finite)
    }
}

fn matrix(sec: &Section<'_>, rows: usize, cols: usize) -> Result<Matrix> {
    let name = sec.head.text.trim_end_matches(':');
    if sec.rows.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "section {name} has {} rows, expected {rows}",
            sec.rows.len()
        )));
    }
    let mut out = Vec::with_capacity(rows);
    for (r, row) in sec.rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "row {} of {name} has {} entries, expected {cols}",
                r + 1,
                row.len()
            )));
        }
        out.push(row.iter().map(rational).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(out)
}

fn vector<'a, T>(sec: &Section<'a>, len: usize, f: impl Fn(&Token<'a>) -> Result<T>) -> Result<Vec<T>> {
    let toks: Vec<&Token<'_>> = sec.rows.iter().flatten().collect();
    if toks.len() != len {
        return Err(Error::DimensionMismatch(format!(
            "section {} has {} entries, expected {len}",
            sec.head.text.trim_end_matches(':'),
            toks.len()
        )));
    }
    toks.into_iter().map(f).collect()
}

/// Parses an instance file.
///
/// ```text
/// # header: sizes and optional flags `capacitated`, `general`
/// n=3 m=1
/// A:
/// 1 1 1
/// b: 1
/// c: 1/2 0 -1
/// ```
///
/// Capacitated files add `u:` (entries may be `inf`). General files carry
/// `k=` inequalities with sections `B:` and `d:`, plus `A:`/`b:` when `m > 0`.
pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let lines = tokenize(text);
    let Some((header, body)) = lines.split_first() else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty instance".into(),
        });
    };

    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    let (mut capacitated, mut general) = (false, false);
    for tok in header {
        match tok.text.split_once('=') {
            Some((key @ ("n" | "m" | "k"), v)) => {
                let v = v.parse().map_err(|_| parse_err(tok, format!("bad size `{}`", tok.text)))?;
                if sizes.insert(key, v).is_some() {
                    return Err(parse_err(tok, format!("size `{key}` given twice")));
                }
            }
            None if tok.text == "capacitated" => capacitated = true,
            None if tok.text == "general" => general = true,
            _ => return Err(parse_err(tok, format!("unexpected header token `{}`", tok.text))),
        }
    }
    let need = |key: &str| {
        sizes.get(key).copied().ok_or_else(|| Error::Parse {
            line: header[0].line,
            column: 1,
            message: format!("header is missing `{key}=`"),
        })
    };
    let n = need("n")?;
    let m = need("m")?;
    if n == 0 {
        return Err(parse_err(&header[0], "n must be positive"));
    }

    let mut sections: BTreeMap<&str, Section<'_>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for line in body {
        let first = &line[0];
        let (rest, key) = match first.text.strip_suffix(':') {
            Some(name) => {
                let Some(name) = SECTIONS.iter().copied().find(|s| *s == name) else {
                    return Err(parse_err(first, format!("unknown section `{}`", first.text)));
                };
                if sections.contains_key(name) {
                    return Err(parse_err(first, format!("section `{name}` given twice")));
                }
                sections.insert(
                    name,
                    Section {
                        head: first.clone(),
                        rows: Vec::new(),
                    },
                );
                current = Some(name);
                (&line[1..], name)
            }
            None => match current {
                Some(name) => (&line[..], name),
                None => return Err(parse_err(first, "data before any section")),
            },
        };
        if !rest.is_empty() {
            sections.get_mut(key).expect("inserted").rows.push(rest.to_vec());
        }
    }
    let missing = |name: &str| Error::InvalidInput(format!("missing section `{name}:`"));

    let parsed = if general {
        if capacitated {
            return Err(parse_err(&header[0], "`general` and `capacitated` cannot be combined"));
        }
        let k = need("k")?;
        if k == 0 {
            return Err(parse_err(&header[0], "k must be positive"));
        }
        let (a, b) = if m > 0 {
            let a = matrix(&sections.remove("A").ok_or_else(|| missing("A"))?, m, n)?;
            let b = vector(&sections.remove("b").ok_or_else(|| missing("b"))?, m, rational)?;
            (Some(a), b)
        } else {
            (None, Vec::new())
        };
        let b_ineq = matrix(&sections.remove("B").ok_or_else(|| missing("B"))?, k, n)?;
        let d = vector(&sections.remove("d").ok_or_else(|| missing("d"))?, k, rational)?;
        ParsedInstance::General(GeneralSystem { a, b, b_ineq, d })
    } else {
        if sizes.contains_key("k") {
            return Err(parse_err(&header[0], "`k=` needs the `general` flag"));
        }
        if m == 0 {
            return Err(parse_err(&header[0], "m must be positive"));
        }
        let a = matrix(&sections.remove("A").ok_or_else(|| missing("A"))?, m, n)?;
        let b = vector(&sections.remove("b").ok_or_else(|| missing("b"))?, m, rational)?;
        let c = vector(&sections.remove("c").ok_or_else(|| missing("c"))?, n, rational)?;
        let u = match (capacitated, sections.remove("u")) {
            (true, Some(sec)) => Some(vector(&sec, n, bound)?),
            (true, None) => return Err(missing("u")),
            (false, Some(sec)) => return Err(parse_err(&sec.head, "`u:` needs the `capacitated` flag")),
            (false, None) => None,
        };
        ParsedInstance::Standard(LpInstance::new(a, b, c, u)?)
    };
    if let Some(sec) = sections.values().next() {
        return Err(parse_err(&sec.head, format!("section `{}` not used by this kind of instance", sec.head.text)));
    }
    Ok(parsed)
}

fn write_matrix(out: &mut String, name: &str, a: &Matrix) {
    let _ = writeln!(out, "{name}:");
    for i in 0..a.rows() {
        let _ = writeln!(out, "{}", format_vec(a.row(i)));
    }
}

pub fn render_instance(inst: &LpInstance) -> String {
    let mut out = format!("n={} m={}", inst.n(), inst.m());
    if inst.u.is_some() {
        out.push_str(" capacitated");
    }
    out.push('\n');
    write_matrix(&mut out, "A", &inst.a);
    let _ = writeln!(out, "b: {}", format_vec(&inst.b));
    let _ = writeln!(out, "c: {}", format_vec(&inst.c));
    if let Some(u) = &inst.u {
        let toks: Vec<String> = u
            .iter()
            .map(|b| match b {
                Bound::Finite(v) => v.to_string(),
                Bound::Infinite => "inf".into(),
            })
            .collect();
        let _ = writeln!(out, "u: {}", toks.join(" "));
    }
    out
}

pub fn render_general(sys: &GeneralSystem) -> String {
    let m = sys.a.as_ref().map_or(0, Matrix::rows);
    let mut out = format!("n={} m={m} k={} general\n", sys.b_ineq.cols(), sys.b_ineq.rows());
    if let Some(a) = &sys.a {
        write_matrix(&mut out, "A", a);
        let _ = writeln!(out, "b: {}", format_vec(&sys.b));
    }
    write_matrix(&mut out, "B", &sys.b_ineq);
    let _ = writeln!(out, "d: {}", format_vec(&sys.d));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, ints};

    #[test]
    fn minimal_one_line_file() {
        let p = parse_instance("n=2 m=1 / A: 1 1 / b: 1 / c: 0 1").unwrap().standard().unwrap();
        assert_eq!(p.a, Matrix::from_i64(&[&[1, 1]]));
        assert_eq!(p.b, ints(&[1]));
        assert_eq!(p.c, ints(&[0, 1]));
    }

    #[test]
    fn fractions_are_reduced() {
        let p = parse_instance("n=2 m=1\nA: 2/6 1\nb: 4/2\nc: 0 1\n").unwrap().standard().unwrap();
        assert_eq!(p.a[(0, 0)], frac(1, 3));
        assert_eq!(p.b[0], Rational::from_integer(2.into()));
    }

    #[test]
    fn row_count_mismatch() {
        let e = parse_instance("n=2 m=2\nA:\n1 1\nb: 1 1\nc: 0 1").unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch(_)), "{e:?}");
    }

    #[test]
    fn bad_token_reports_position() {
        let e = parse_instance("n=2 m=1\nA: 1 x\nb: 1\nc: 0 1").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 2,
                column: 6,
                message: "not a rational: `x`".into()
            }
        );
    }

    #[test]
    fn rank_is_validated() {
        let e = parse_instance("n=2 m=2\nA:\n1 1\n2 2\nb: 1 2\nc: 0 1").unwrap_err();
        assert!(matches!(e, Error::RankDeficient { .. }));
    }

    #[test]
    fn capacitated_round_trip() {
        let text = "n=3 m=1 capacitated\nA:\n1 -1/2 1\nb: 1\nc: 0 1 -3\nu: 2 inf 5/3\n";
        let p = parse_instance(text).unwrap();
        let ParsedInstance::Standard(inst) = &p else { panic!() };
        assert_eq!(render_instance(inst), text);
        assert_eq!(parse_instance(&render_instance(inst)).unwrap(), p);
    }

    #[test]
    fn general_round_trip() {
        let text = "n=2 m=0 k=3 general\nB:\n-1 0\n0 -1\n1 1\nd: 0 0 1\n";
        let p = parse_instance(text).unwrap().general().unwrap();
        assert_eq!(render_general(&p), text);
        assert!(p.reduce().is_ok());
    }
}
