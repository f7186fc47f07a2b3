//! Text formats: lexer, recursive-descent parsers, and a canonical printer.
//!
//! Five file kinds share one lexer: `.concept`, `.app`, `.ui`, `.catalog`, and `.scenario`.
//! Printing any parsed file and parsing the result yields the same tree.

mod error;
mod lexer;
mod parser;
mod printer;

use std::path::Path;

pub use error::ParseError;
pub use lexer::{tokenize, Tok, Token};
pub use parser::RESERVED;
pub use printer::{print_app, print_concept, print_entry, print_expr, print_scenario, print_ui};

use crate::catalog::{EntryFile, Scenario};
use crate::model::{AppModel, ConceptDef, Expr};
use crate::ui::UiModel;
use parser::Parser;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FileKind {
    Concept,
    App,
    Ui,
    Entry,
    Scenario,
}

impl FileKind {
    pub fn extension(self) -> &'static str {
        match self {
            FileKind::Concept => "concept",
            FileKind::App => "app",
            FileKind::Ui => "ui",
            FileKind::Entry => "catalog",
            FileKind::Scenario => "scenario",
        }
    }

    pub fn from_path(path: &Path) -> Option<FileKind> {
        match path.extension()?.to_str()? {
            "concept" => Some(FileKind::Concept),
            "app" => Some(FileKind::App),
            "ui" => Some(FileKind::Ui),
            "catalog" => Some(FileKind::Entry),
            "scenario" => Some(FileKind::Scenario),
            _ => None,
        }
    }
}

/// Any parsed source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceFile {
    Concept(ConceptDef),
    App(AppModel),
    Ui(UiModel),
    Entry(EntryFile),
    Scenario(Scenario),
}

impl SourceFile {
    pub fn kind(&self) -> FileKind {
        match self {
            SourceFile::Concept(_) => FileKind::Concept,
            SourceFile::App(_) => FileKind::App,
            SourceFile::Ui(_) => FileKind::Ui,
            SourceFile::Entry(_) => FileKind::Entry,
            SourceFile::Scenario(_) => FileKind::Scenario,
        }
    }

    pub fn print(&self) -> String {
        match self {
            SourceFile::Concept(c) => print_concept(c),
            SourceFile::App(a) => print_app(a),
            SourceFile::Ui(u) => print_ui(u),
            SourceFile::Entry(e) => print_entry(e),
            SourceFile::Scenario(s) => print_scenario(s),
        }
    }
}

pub fn parse_concept(src: &str) -> Result<ConceptDef, ParseError> {
    Parser::new(src)?.concept()
}

pub fn parse_app(src: &str) -> Result<AppModel, ParseError> {
    Parser::new(src)?.app()
}

pub fn parse_ui(src: &str) -> Result<UiModel, ParseError> {
    Parser::new(src)?.ui()
}

pub fn parse_entry(src: &str) -> Result<EntryFile, ParseError> {
    Parser::new(src)?.entry()
}

pub fn parse_scenario(src: &str) -> Result<Scenario, ParseError> {
    Parser::new(src)?.scenario()
}

/// Parses a standalone expression written in concept terms (bare names are local state).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_kind(kind: FileKind, src: &str) -> Result<SourceFile, ParseError> {
    Ok(match kind {
        FileKind::Concept => SourceFile::Concept(parse_concept(src)?),
        FileKind::App => SourceFile::App(parse_app(src)?),
        FileKind::Ui => SourceFile::Ui(parse_ui(src)?),
        FileKind::Entry => SourceFile::Entry(parse_entry(src)?),
        FileKind::Scenario => SourceFile::Scenario(parse_scenario(src)?),
    })
}

/// Picks the file kind from the first keyword of the text.
pub fn detect_kind(src: &str) -> Option<FileKind> {
    let toks = tokenize(src).ok()?;
    match &toks.first()?.tok {
        Tok::Ident(w) => match w.as_str() {
            "concept" => Some(FileKind::Concept),
            "app" => Some(FileKind::App),
            "ui" | "screen" => Some(FileKind::Ui),
            "entry" => Some(FileKind::Entry),
            "scenario" => Some(FileKind::Scenario),
            _ => None,
        },
        _ => None,
    }
}

/// Parses by extension, falling back to the leading keyword.
pub fn parse_source(path: &Path, src: &str) -> Result<SourceFile, ParseError> {
    match FileKind::from_path(path).or_else(|| detect_kind(src)) {
        Some(k) => parse_kind(k, src),
        None => {
            let t = tokenize(src)?;
            let first = &t[0];
            Err(ParseError::new(
                first.line,
                first.column,
                "cannot tell which kind of file this is",
                vec!["`concept`".into(), "`app`".into(), "`screen`".into(), "`entry`".into(), "`scenario`".into()],
            ))
        }
    }
}

#[cfg(test)]
mod tests;
