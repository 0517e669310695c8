//! Text instance files. See `docs/format.md` for the grammar.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::codes::BlockCode;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::model::{NormalizedInstance, RawFamily};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub enum Instance {
    Family(RawFamily),
    LinearCode(BlockCode),
    AdditiveCode(BlockCode),
}

impl Instance {
    pub fn family(&self) -> RawFamily {
        match self {
            Instance::Family(f) => f.clone(),
            Instance::LinearCode(c) | Instance::AdditiveCode(c) => c.to_family(),
        }
    }

    pub fn code(&self) -> Option<&BlockCode> {
        match self {
            Instance::Family(_) => None,
            Instance::LinearCode(c) | Instance::AdditiveCode(c) => Some(c),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        match self {
            Instance::Family(f) => &f.field,
            Instance::LinearCode(c) | Instance::AdditiveCode(c) => &c.field,
        }
    }
}

struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Tokens<'a> {
        let mut toks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            toks.extend(body.split_whitespace().map(|t| (i + 1, t)));
        }
        let last_line = text.lines().count().max(1);
        Tokens { toks, pos: 0, last_line }
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.last_line)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn word(&mut self, what: &str) -> Result<&'a str> {
        match self.peek() {
            Some(w) => {
                self.pos += 1;
                Ok(w)
            }
            None => self.err(format!("unexpected end of file, expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let line = self.line();
        let w = self.word(kw)?;
        if w != kw {
            return Err(Error::Parse { line, msg: format!("expected `{kw}`, found `{w}`") });
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let line = self.line();
        let w = self.word(what)?;
        w.parse().map_err(|_| Error::Parse { line, msg: format!("expected {what}, found `{w}`") })
    }

    /// Numbers up to the end of the current line.
    fn rest_of_line(&mut self) -> Result<Vec<u32>> {
        let line = self.line();
        let mut out = Vec::new();
        while self.toks.get(self.pos).is_some_and(|t| t.0 == line) {
            out.push(self.number("a number")?);
        }
        Ok(out)
    }

    fn matrix(&mut self, f: &Field, rows: usize, cols: usize) -> Result<Matrix> {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let line = self.line();
                let x = self.number("a field element index")?;
                let e = f.from_index(x).map_err(|_| Error::Parse { line, msg: format!("{x} is not an element of GF({})", f.q()) })?;
                m.set(i, j, e);
            }
        }
        Ok(m)
    }
}

pub fn parse(text: &str) -> Result<Instance> {
    let mut t = Tokens::new(text);
    t.keyword("projcanon")?;
    let v = t.number("format version")?;
    if v != FORMAT_VERSION {
        return t.err(format!("unsupported format version {v}"));
    }
    let line = t.line();
    t.keyword("field")?;
    let args = t.rest_of_line()?;
    let field = match args.as_slice() {
        [p, r] => Field::new(*p, *r),
        [p, r, modulus @ ..] => Field::with_modulus(*p, *r, modulus),
        _ => return Err(Error::Parse { line, msg: "expected `field p r [c_0 .. c_r]`".into() }),
    }
    .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
    let field = Arc::new(field);
    let line = t.line();
    let inst = match t.word("`dim`, `lincode` or `addcode`")? {
        "dim" => {
            let k = t.number("dimension k")? as usize;
            if k == 0 {
                return Err(Error::Parse { line, msg: "dimension must be positive".into() });
            }
            t.keyword("subspaces")?;
            let m = t.number("number of sets")? as usize;
            let mut sets = Vec::with_capacity(m);
            for _ in 0..m {
                t.keyword("set")?;
                let n = t.number("set size")? as usize;
                let line = t.line();
                let s = t.number("subspace dimension")? as usize;
                if s > k {
                    return Err(Error::Parse { line, msg: format!("subspace dimension {s} exceeds k = {k}") });
                }
                let mut set = Vec::with_capacity(n);
                for _ in 0..n {
                    set.push(t.matrix(&field, k, s)?);
                }
                sets.push(set);
            }
            Instance::Family(RawFamily { field: field.clone(), k, sets })
        }
        kw @ ("lincode" | "addcode") => {
            let k = t.number("dimension k")? as usize;
            let n = t.number("length n")? as usize;
            let s = if kw == "addcode" { t.number("block size s")? as usize } else { 1 };
            if k == 0 || n == 0 || s == 0 {
                return Err(Error::Parse { line, msg: "code parameters must be positive".into() });
            }
            let gen = t.matrix(&field, k, n * s)?;
            let code = BlockCode::new(field.clone(), s, gen).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            if kw == "lincode" {
                Instance::LinearCode(code)
            } else {
                Instance::AdditiveCode(code)
            }
        }
        w => return Err(Error::Parse { line, msg: format!("expected `dim`, `lincode` or `addcode`, found `{w}`") }),
    };
    if t.peek().is_some() {
        return t.err("trailing data after the instance");
    }
    Ok(inst)
}

pub fn read_file(path: &std::path::Path) -> Result<Instance> {
    parse(&std::fs::read_to_string(path)?)
}

fn header(out: &mut String, f: &Field) {
    let _ = writeln!(out, "projcanon {FORMAT_VERSION}");
    let m: Vec<String> = f.modulus().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "field {} {} {}", f.p(), f.r(), m.join(" "));
}

pub fn write_matrix(out: &mut String, f: &Field, m: &Matrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| f.to_index(m.get(i, j)).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn write_sets(out: &mut String, f: &Field, k: usize, sets: &[(usize, Vec<Matrix>)]) {
    let _ = writeln!(out, "dim {k}");
    let _ = writeln!(out, "subspaces {}", sets.len());
    for (s, members) in sets {
        let _ = writeln!(out, "set {} {s}", members.len());
        for m in members {
            write_matrix(out, f, m);
        }
    }
}

pub fn write_family(fam: &RawFamily) -> String {
    let mut out = String::new();
    header(&mut out, &fam.field);
    // members of one set share a column count; narrower ones get zero columns
    let sets: Vec<(usize, Vec<Matrix>)> = fam
        .sets
        .iter()
        .map(|set| {
            let s = set.iter().map(|m| m.cols()).max().unwrap_or(0);
            let padded = set.iter().map(|m| m.hstack(&Matrix::zeros(fam.k, s - m.cols())).expect("same rows")).collect();
            (s, padded)
        })
        .collect();
    write_sets(&mut out, &fam.field, fam.k, &sets);
    out
}

/// One `set` per normalized set, members with multiplicity one.
pub fn write_normalized(inst: &NormalizedInstance) -> String {
    let mut out = String::new();
    header(&mut out, &inst.field);
    let sets: Vec<(usize, Vec<Matrix>)> =
        inst.sets.iter().map(|s| (s.dim, s.members.iter().map(|u| u.basis().clone()).collect())).collect();
    write_sets(&mut out, &inst.field, inst.k, &sets);
    out
}

pub fn write_code(code: &BlockCode) -> String {
    let mut out = String::new();
    header(&mut out, &code.field);
    if code.s == 1 {
        let _ = writeln!(out, "lincode {} {}", code.k, code.n());
    } else {
        let _ = writeln!(out, "addcode {} {} {}", code.k, code.n(), code.s);
    }
    write_matrix(&mut out, &code.field, &code.gen);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "projcanon 1\n# three planes in F_3^4\nfield 3 1\ndim 4\nsubspaces 1\nset 3 2\n1 0\n0 1\n0 0\n0 0\n\n0 0\n0 0\n1 0\n0 1\n\n1 0\n0 0\n0 1\n0 0\n";

    #[test]
    fn round_trip() {
        let inst = parse(EXAMPLE).unwrap();
        let Instance::Family(fam) = &inst else { panic!() };
        assert_eq!((fam.k, fam.sets.len(), fam.sets[0].len()), (4, 1, 3));
        let again = parse(&write_family(fam)).unwrap();
        let Instance::Family(fam2) = again else { panic!() };
        assert_eq!(fam.sets, fam2.sets);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = EXAMPLE.replace("0 1\n0 0\n0 0\n\n0 0", "0 1\n0 7\n0 0\n\n0 0");
        match parse(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("{other:?}"),
        }
        match parse("projcanon 1\nfield 4 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse("projcanon 1\nfield 2 1\ndim 2\nsubspaces 1\nset 1 1\n1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn codes_parse() {
        let inst = parse("projcanon 1\nfield 2 2 1 1 1\naddcode 2 2 2\n1 0 0 1\n0 1 1 3\n").unwrap();
        let c = inst.code().unwrap();
        assert_eq!((c.k, c.n(), c.s), (2, 2, 2));
        assert_eq!(parse(&write_code(c)).unwrap().code().unwrap().gen, c.gen);
    }
}
