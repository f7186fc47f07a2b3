use super::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// `0.25`; kept as written so callers decide the precision.
    Decimal(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Decimal(d) => format!("`{d}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of file".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: [&str; 25] = [
    "->", ":=", "+=", "-=", "!=", "<=", ">=", "=", "<", ">", "+", "-", "*", "|", ".", "~", "@", ":",
    ",", ";", "(", ")", "{", "}", "[",
];

fn symbol(rest: &str) -> Option<&'static str> {
    SYMBOLS.iter().copied().chain(["]"]).find(|s| rest.starts_with(s))
}

/// Splits source text into tokens. `//` starts a line comment.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    // position of the last non-whitespace character, used for the end-of-file token
    let mut last = (1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i].1 == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        let rest = &src[off..];
        if rest.starts_with("//") {
            while i < chars.len() && chars[i].1 != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let end = chars.get(i).map_or(src.len(), |x| x.0);
            Tok::Ident(src[off..end].to_string())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let is_decimal = i + 1 < chars.len() && chars[i].1 == '.' && chars[i + 1].1.is_ascii_digit();
            if is_decimal {
                advance(&mut i, &mut line, &mut col, 1);
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
            let end = chars.get(i).map_or(src.len(), |x| x.0);
            let text = &src[off..end];
            if is_decimal {
                Tok::Decimal(text.to_string())
            } else {
                Tok::Int(text.parse().map_err(|_| {
                    ParseError::new(tline, tcol, format!("integer literal {text} is out of range"), vec![])
                })?)
            }
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, 1);
            let mut s = String::new();
            loop {
                match chars.get(i).map(|x| x.1) {
                    None | Some('\n') => {
                        return Err(ParseError::new(tline, tcol, "unterminated string literal", vec!["`\"`".into()]))
                    }
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col, 1);
                        break;
                    }
                    Some('\\') => {
                        let esc = chars.get(i + 1).map(|x| x.1);
                        match esc {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            _ => return Err(ParseError::new(line, col, "unknown escape in string literal", vec![])),
                        }
                        advance(&mut i, &mut line, &mut col, 2);
                    }
                    Some(ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col, 1);
                    }
                }
            }
            Tok::Str(s)
        } else if let Some(sym) = symbol(rest) {
            advance(&mut i, &mut line, &mut col, sym.chars().count());
            Tok::Sym(sym)
        } else {
            return Err(ParseError::new(tline, tcol, format!("unexpected character {c:?}"), vec![]));
        };
        // tokens never span lines, so the last character sits just before `col`
        last = (line, col - 1);
        out.push(Token { tok, line: tline, column: tcol });
    }
    let (eline, ecol) = if out.is_empty() { (1, 1) } else { last };
    out.push(Token { tok: Tok::Eof, line: eline, column: ecol });
    Ok(out)
}
