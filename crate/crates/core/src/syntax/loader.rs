//! Reading source files, following imports, and rendering diagnostics.

use std::path::{Path, PathBuf};

use super::ast::{Decl, SourceUnit};
use super::elaborate::{elaborate, Universe, Workspace};
use super::{has_errors, line_col, parse_unit, Diagnostic, Span};

/// Paths and texts of loaded files, indexed by the file id in spans.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    files: Vec<(PathBuf, String)>,
}

impl SourceMap {
    pub fn add(&mut self, path: PathBuf, text: String) -> usize {
        self.files.push((path, text));
        self.files.len() - 1
    }

    pub fn path(&self, file: usize) -> &Path {
        &self.files[file].0
    }

    pub fn text(&self, file: usize) -> &str {
        &self.files[file].1
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// `path:line:col: severity: message`, plus an indented note line.
    pub fn render(&self, d: &Diagnostic) -> String {
        let (path, (line, col)) = match self.files.get(d.span.file) {
            Some((p, t)) => (p.display().to_string(), line_col(t, d.span.start)),
            None => ("<input>".to_string(), (1, 1)),
        };
        let mut s = format!("{path}:{line}:{col}: {}: {}", d.severity, d.message);
        if let Some(n) = &d.note {
            s.push_str("\n  note: ");
            s.push_str(n);
        }
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub sources: SourceMap,
    pub workspace: Workspace,
    pub diagnostics: Vec<Diagnostic>,
    /// File ids of the files named by the caller, in order.
    pub roots: Vec<usize>,
}

impl Loaded {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }

    pub fn render_diagnostics(&self) -> String {
        self.diagnostics
            .iter()
            .map(|d| self.sources.render(d) + "\n")
            .collect()
    }
}

struct Walk {
    sources: SourceMap,
    units: Vec<SourceUnit>,
    diags: Vec<Diagnostic>,
    /// Canonical paths of finished files and of files on the import stack.
    done: Vec<PathBuf>,
    stack: Vec<PathBuf>,
    roots: Vec<usize>,
}

impl Walk {
    fn visit(&mut self, path: &Path, text: Option<String>, from: Option<Span>) {
        let key = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        if self.stack.contains(&key) {
            let span = from.unwrap_or_default();
            self.diags
                .push(Diagnostic::error(span, format!("import cycle through `{}`", path.display())));
            return;
        }
        if self.done.contains(&key) {
            return;
        }
        let text = match text.map(Ok).unwrap_or_else(|| std::fs::read_to_string(path)) {
            Ok(t) => t,
            Err(e) => {
                let span = match from {
                    Some(s) => s,
                    None => Span::new(self.sources.add(path.to_path_buf(), String::new()), 0, 0),
                };
                self.diags
                    .push(Diagnostic::error(span, format!("cannot read `{}`: {e}", path.display())));
                return;
            }
        };
        let file = self.sources.add(path.to_path_buf(), text);
        if from.is_none() {
            self.roots.push(file);
        }
        let (unit, diags) = parse_unit(file, self.sources.text(file));
        self.diags.extend(diags);
        self.stack.push(key.clone());
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for d in &unit.decls {
            if let Decl::Import { path: p, span } = d {
                self.visit(&dir.join(p), None, Some(*span));
            }
        }
        self.stack.pop();
        self.done.push(key);
        self.units.push(unit);
    }

    fn finish(mut self, universe: &Universe) -> Loaded {
        let (workspace, diags) = if has_errors(&self.diags) {
            (Workspace::default(), Vec::new())
        } else {
            elaborate(&self.units, universe)
        };
        self.diags.extend(diags);
        self.diags.sort_by_key(|d| (d.span, d.severity));
        Loaded {
            sources: self.sources,
            workspace,
            diagnostics: self.diags,
            roots: self.roots,
        }
    }
}

fn walk() -> Walk {
    Walk {
        sources: SourceMap::default(),
        units: Vec::new(),
        diags: Vec::new(),
        done: Vec::new(),
        stack: Vec::new(),
        roots: Vec::new(),
    }
}

/// Load files (and their imports) into one workspace. Elaboration is
/// skipped when any file has syntax errors.
pub fn load<P: AsRef<Path>>(paths: &[P], universe: &Universe) -> Loaded {
    let mut w = walk();
    for p in paths {
        w.visit(p.as_ref(), None, None);
    }
    w.finish(universe)
}

/// Load source text given under `name`; imports resolve relative to it.
pub fn load_str(name: &str, text: &str, universe: &Universe) -> Loaded {
    let mut w = walk();
    w.visit(Path::new(name), Some(text.to_string()), None);
    w.finish(universe)
}
