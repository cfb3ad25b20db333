use crate::linalg::Vec3;
use crate::scalar::Real;

use super::{check_finite, Facet, SourceFormat, StlError, TriangleSoup};

/// True when the bytes are plausibly ASCII STL text: no NULs or other
/// control bytes besides whitespace.
pub(super) fn looks_like_text(bytes: &[u8]) -> bool {
    std::str::from_utf8(bytes).is_ok()
        && bytes.iter().all(|&b| b >= 0x80 || b.is_ascii_graphic() || b.is_ascii_whitespace())
}

struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self { lines: text.lines().enumerate(), current: "".split_whitespace(), line: 0 }
    }

    fn next(&mut self) -> Option<&'a str> {
        loop {
            if let Some(tok) = self.current.next() {
                return Some(tok);
            }
            let (i, l) = self.lines.next()?;
            self.line = i + 1;
            self.current = l.split_whitespace();
        }
    }

    /// Remainder of the current line, consumed.
    fn rest_of_line(&mut self) -> String {
        let rest: Vec<&str> = self.current.by_ref().collect();
        rest.join(" ")
    }

    fn err(&self, message: impl Into<String>) -> StlError {
        StlError::SyntaxError { line: self.line.max(1), message: message.into() }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), StlError> {
        match self.next() {
            Some(t) if t.eq_ignore_ascii_case(kw) => Ok(()),
            Some(t) => Err(self.err(format!("expected `{kw}`, found `{t}`"))),
            None => Err(self.err(format!("expected `{kw}`, found end of file"))),
        }
    }

    fn number(&mut self) -> Result<f32, StlError> {
        let tok = self.next().ok_or_else(|| self.err("expected a number, found end of file"))?;
        tok.parse::<f32>().map_err(|_| self.err(format!("invalid number `{tok}`")))
    }

    fn vec3<T: Real>(&mut self) -> Result<Vec3<T>, StlError> {
        // Read as f32 so that ASCII and binary encodings of one model agree.
        let x = self.number()?;
        let y = self.number()?;
        let z = self.number()?;
        Ok(Vec3::new(T::lit(f64::from(x)), T::lit(f64::from(y)), T::lit(f64::from(z))))
    }
}

pub(super) fn parse<T: Real>(bytes: &[u8]) -> Result<TriangleSoup<T>, StlError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        StlError::SyntaxError { line, message: "file is neither binary STL nor valid text".into() }
    })?;
    let mut toks = Tokens::new(text);
    toks.keyword("solid")?;
    let name = toks.rest_of_line();

    let mut facets = Vec::new();
    loop {
        let Some(tok) = toks.next() else {
            return Err(toks.err("expected `facet` or `endsolid`, found end of file"));
        };
        if tok.eq_ignore_ascii_case("endsolid") {
            toks.rest_of_line();
            // Some exporters concatenate several solids into one file.
            match toks.next() {
                None => break,
                Some(t) if t.eq_ignore_ascii_case("solid") => {
                    toks.rest_of_line();
                    continue;
                }
                Some(t) => return Err(toks.err(format!("unexpected `{t}` after `endsolid`"))),
            }
        }
        if !tok.eq_ignore_ascii_case("facet") {
            return Err(toks.err(format!("expected `facet` or `endsolid`, found `{tok}`")));
        }
        toks.keyword("normal")?;
        let normal = toks.vec3::<T>()?;
        toks.keyword("outer")?;
        toks.keyword("loop")?;
        let mut vertices = [Vec3::zero(); 3];
        for v in &mut vertices {
            toks.keyword("vertex")?;
            *v = toks.vec3()?;
        }
        toks.keyword("endloop")?;
        toks.keyword("endfacet")?;
        facets.push(Facet { normal: if normal.is_finite() { normal } else { Vec3::zero() }, vertices });
    }

    if facets.is_empty() {
        return Err(StlError::EmptyModel);
    }
    check_finite(&facets)?;
    Ok(TriangleSoup { facets, name, source_format: SourceFormat::Ascii })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords_are_case_insensitive_and_whitespace_tolerant() {
        let text = "  SOLID Part 7\r\n\tFacet Normal 0 0 -1 OUTER LOOP\n vertex 0 0 0 vertex 1 0 0\n\n VERTEX 0 1 0 EndLoop endFACET\nENDSOLID Part 7";
        let soup = super::parse::<f64>(text.as_bytes()).unwrap();
        assert_eq!(soup.name, "Part 7");
        assert_eq!(soup.facets.len(), 1);
        assert_eq!(soup.facets[0].normal, Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0\nvertex 0 1 0\nendloop\nendfacet\nendsolid x\n";
        match super::parse::<f64>(text.as_bytes()) {
            Err(StlError::SyntaxError { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        match super::parse::<f64>(b"solid x\nfacet normal 0 0 1\n") {
            Err(StlError::SyntaxError { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(super::parse::<f64>(b"hello world"), Err(StlError::SyntaxError { line: 1, .. })));
    }

    #[test]
    fn concatenated_solids() {
        let one = "solid a\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nendloop\nendfacet\nendsolid a\n";
        let text = format!("{one}{}", one.replace(" a", " b"));
        assert_eq!(super::parse::<f64>(text.as_bytes()).unwrap().facets.len(), 2);
    }
}
