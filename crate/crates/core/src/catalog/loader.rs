use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::embedded::FILES;
use super::entry::{CatalogEntry, Variant};
use super::files::{EntryFile, Scenario};
use crate::engine::Engine;
use crate::lang::{self, ParseError};
use crate::model::{validate_concept, App, ConceptDef, ConceptLibrary, LinkError, StaticError};
use crate::ui::{MappingStandard, UiModel};

/// Where a source file lives: on disk or in the shipped corpus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Disk(PathBuf),
    Builtin(String),
}

impl Location {
    pub fn builtin(path: &str) -> Self {
        Location::Builtin(path.to_string())
    }

    /// Resolves `rel` against the directory holding this file.
    pub fn join(&self, rel: &str) -> Location {
        match self {
            Location::Disk(p) => {
                let rel = Path::new(rel);
                if rel.is_absolute() {
                    Location::Disk(rel.to_path_buf())
                } else {
                    Location::Disk(normalize_path(&p.parent().unwrap_or(Path::new("")).join(rel)))
                }
            }
            Location::Builtin(p) => {
                let dir = p.rsplit_once('/').map_or("", |(d, _)| d);
                let joined = if dir.is_empty() { rel.to_string() } else { format!("{dir}/{rel}") };
                Location::Builtin(normalize_path(Path::new(&joined)).to_string_lossy().replace('\\', "/"))
            }
        }
    }

    fn file_name(&self) -> &str {
        match self {
            Location::Disk(p) => p.file_name().and_then(|s| s.to_str()).unwrap_or(""),
            Location::Builtin(p) => p.rsplit('/').next().unwrap_or(p),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Disk(p) => write!(f, "{}", p.display()),
            Location::Builtin(p) => write!(f, "<builtin>/{p}"),
        }
    }
}

fn normalize_path(p: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in p.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other),
        }
    }
    out
}

/// Shipped file by exact path, or else by file name.
pub fn builtin_file(path: &str) -> Option<(&'static str, &'static str)> {
    FILES.iter().find(|(p, _)| *p == path).copied().or_else(|| {
        let name = path.rsplit('/').next()?;
        FILES.iter().find(|(p, _)| p.rsplit('/').next() == Some(name)).copied()
    })
}

/// Paths of all shipped files under `dir` with extension `ext`.
pub fn builtin_files(dir: &str, ext: &str) -> Vec<&'static str> {
    let prefix = format!("{}/", dir.trim_end_matches('/'));
    FILES
        .iter()
        .map(|(p, _)| *p)
        .filter(|p| (dir.is_empty() || p.starts_with(&prefix)) && p.ends_with(&format!(".{ext}")))
        .collect()
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: no such file")]
    NotFound { path: String },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {} static error(s), first: {}", errors.len(), errors[0])]
    Invalid { path: String, errors: Vec<StaticError> },
    #[error("{path}: {source}")]
    Link { path: String, source: LinkError },
    #[error("{path}: {message}")]
    Entry { path: String, message: String },
    #[error("no catalog entry named {0}")]
    UnknownEntry(String),
}

/// Reads, parses, and links source files, caching concepts by location.
#[derive(Debug, Default)]
pub struct Loader {
    concepts: RefCell<HashMap<Location, Arc<ConceptDef>>>,
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    /// Text of a file. Missing disk files fall back to a shipped file with the same name.
    pub fn read(&self, loc: &Location) -> Result<String, LoadError> {
        match loc {
            Location::Disk(p) => match fs::read_to_string(p) {
                Ok(s) => Ok(s),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => builtin_file(loc.file_name())
                    .map(|(_, s)| s.to_string())
                    .ok_or_else(|| LoadError::NotFound { path: loc.to_string() }),
                Err(source) => Err(LoadError::Io { path: loc.to_string(), source }),
            },
            Location::Builtin(p) => {
                builtin_file(p).map(|(_, s)| s.to_string()).ok_or_else(|| LoadError::NotFound { path: loc.to_string() })
            }
        }
    }

    fn parse<T>(&self, loc: &Location, f: impl FnOnce(&str) -> Result<T, ParseError>) -> Result<T, LoadError> {
        let src = self.read(loc)?;
        f(&src).map_err(|source| LoadError::Parse { path: loc.to_string(), source })
    }

    /// Parses and statically checks a concept.
    pub fn load_concept(&self, loc: &Location) -> Result<Arc<ConceptDef>, LoadError> {
        if let Some(c) = self.concepts.borrow().get(loc) {
            return Ok(c.clone());
        }
        let def = self.parse(loc, lang::parse_concept)?;
        let errors = validate_concept(&def);
        if !errors.is_empty() {
            return Err(LoadError::Invalid { path: loc.to_string(), errors });
        }
        let def = Arc::new(def);
        self.concepts.borrow_mut().insert(loc.clone(), def.clone());
        Ok(def)
    }

    /// Parses an app and links it against the concepts it uses.
    pub fn load_app(&self, loc: &Location) -> Result<App, LoadError> {
        let model = self.parse(loc, lang::parse_app)?;
        let mut lib = ConceptLibrary::new();
        for u in &model.uses {
            lib.insert_shared(self.load_concept(&loc.join(u))?);
        }
        App::link(model, &lib).map_err(|source| LoadError::Link { path: loc.to_string(), source })
    }

    pub fn load_ui(&self, loc: &Location) -> Result<UiModel, LoadError> {
        self.parse(loc, lang::parse_ui)
    }

    pub fn load_entry_file(&self, loc: &Location) -> Result<EntryFile, LoadError> {
        self.parse(loc, lang::parse_entry)
    }

    pub fn load_scenario(&self, loc: &Location) -> Result<Scenario, LoadError> {
        self.parse(loc, lang::parse_scenario)
    }

    /// Loads an entry with its standard design and variants, checking every name it mentions.
    pub fn load_entry(&self, loc: &Location) -> Result<CatalogEntry, LoadError> {
        let file = self.load_entry_file(loc)?;
        let bad = |message: String| LoadError::Entry { path: loc.to_string(), message };
        let concept = self.load_concept(&loc.join(&file.concept))?;
        let standard_app = self.load_app(&loc.join(&file.standard_app))?;
        let standard_ui = file.standard_ui.as_ref().map(|u| self.load_ui(&loc.join(u))).transpose()?;
        if !standard_app.model.instances.iter().any(|i| i.implements.as_deref().unwrap_or(&i.concept) == concept.name) {
            return Err(bad(format!("standard app has no instance of {}", concept.name)));
        }
        Engine::new(&standard_app, &file.domain).map_err(|e| bad(e.to_string()))?;

        let concept_of = |name: &str| -> Option<&ConceptDef> {
            if name == concept.name {
                return Some(&concept);
            }
            standard_app.model.instances.iter().find(|i| i.concept == name).and_then(|i| standard_app.concept(&i.name))
        };
        for s in &file.syncs {
            let calls = std::iter::once((&s.trigger.instance, &s.trigger.action, s.trigger.pattern.len()))
                .chain(s.reactions.iter().map(|r| (&r.instance, &r.action, r.args.len())));
            for (c, a, n) in calls {
                let def = concept_of(c).ok_or_else(|| bad(format!("sync {}: unknown concept {c}", s.name)))?;
                let act = def.action(a).ok_or_else(|| bad(format!("sync {}: {c} has no action {a}", s.name)))?;
                if act.params.len() != n {
                    return Err(bad(format!("sync {}: {c}.{a} takes {} arguments", s.name, act.params.len())));
                }
            }
        }
        for a in &file.independent {
            if concept.action(a).is_none() {
                return Err(bad(format!("independent: {} has no action {a}", concept.name)));
            }
        }
        let has_action = |a: &str| concept.action(a).is_some();
        let has_state = |s: &str| concept.component(s).is_some();
        for m in &file.mapping {
            let ok = match m {
                MappingStandard::RequireDisplay { state } | MappingStandard::LabelReservation { state, .. } => {
                    has_state(state)
                }
                MappingStandard::RequireControl { action, .. } | MappingStandard::GuardedControl { action, .. } => {
                    has_action(action)
                }
                MappingStandard::EqualProminence { first, second }
                | MappingStandard::ReachParity { first, second, .. } => has_action(first) && has_action(second),
                MappingStandard::ConsistencyGroup { subject } => has_state(subject) || has_action(subject),
            };
            if !ok {
                return Err(bad(format!("mapping {m:?} names an unknown member of {}", concept.name)));
            }
        }
        let mut seen = BTreeSet::new();
        let mut variants = Vec::new();
        for v in &file.variants {
            if !seen.insert(v.name.clone()) {
                return Err(bad(format!("duplicate variant {}", v.name)));
            }
            let app = self.load_app(&loc.join(&v.app))?;
            let ui = v.ui.as_ref().map(|u| self.load_ui(&loc.join(u))).transpose()?;
            variants.push(Variant { decl: v.clone(), app, ui });
        }
        Ok(CatalogEntry {
            name: file.name,
            concept,
            standard_app,
            standard_ui,
            domain: file.domain,
            required_syncs: file.syncs,
            independent: file.independent,
            mapping: file.mapping,
            variants,
        })
    }
}

/// A set of loaded entries.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// Entry by entry or concept name, ignoring case.
    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name) || e.concept_name().eq_ignore_ascii_case(name))
    }

    pub fn require(&self, name: &str) -> Result<&CatalogEntry, LoadError> {
        self.get(name).ok_or_else(|| LoadError::UnknownEntry(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn variants(&self) -> impl Iterator<Item = (&CatalogEntry, &Variant)> {
        self.entries.iter().flat_map(|e| e.variants.iter().map(move |v| (e, v)))
    }
}

/// Every `.catalog` file shipped with the library.
pub fn load_builtin_catalog(loader: &Loader) -> Result<Catalog, LoadError> {
    let entries = builtin_files("catalog", "catalog")
        .into_iter()
        .map(|p| loader.load_entry(&Location::builtin(p)))
        .collect::<Result<_, _>>()?;
    Ok(Catalog { entries })
}

/// Every `.catalog` file in a directory tree.
pub fn load_catalog_dir(loader: &Loader, dir: &Path) -> Result<Catalog, LoadError> {
    let entries = disk_files(dir, "catalog")?
        .into_iter()
        .map(|p| loader.load_entry(&Location::Disk(p)))
        .collect::<Result<_, _>>()?;
    Ok(Catalog { entries })
}

/// Files under `dir` with extension `ext`, sorted.
pub fn disk_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, LoadError> {
    fn walk(dir: &Path, ext: &str, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        for e in fs::read_dir(dir)? {
            let p = e?.path();
            if p.is_dir() {
                walk(&p, ext, out)?;
            } else if p.extension().and_then(|s| s.to_str()) == Some(ext) {
                out.push(p);
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, ext, &mut out).map_err(|source| LoadError::Io { path: dir.display().to_string(), source })?;
    out.sort();
    Ok(out)
}
