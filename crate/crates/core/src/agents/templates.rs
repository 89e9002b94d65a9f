use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

/// Which instruction a template renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateKey {
    Add,
    Remove,
    Move,
    CocoAdd,
    CocoRemove,
    CocoMove,
}

impl TemplateKey {
    pub const ALL: [TemplateKey; 6] = [
        TemplateKey::Add,
        TemplateKey::Remove,
        TemplateKey::Move,
        TemplateKey::CocoAdd,
        TemplateKey::CocoRemove,
        TemplateKey::CocoMove,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateKey::Add => "add",
            TemplateKey::Remove => "remove",
            TemplateKey::Move => "move",
            TemplateKey::CocoAdd => "coco_add",
            TemplateKey::CocoRemove => "coco_remove",
            TemplateKey::CocoMove => "coco_move",
        }
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("line {line}: expected `key<TAB>template`")]
    BadLine { line: usize },
    #[error("line {line}: unknown template key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("no template for `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Instruction templates with `{color}`, `{shape}`, `{row}`, `{col}`,
/// `{to_row}`, `{to_col}`, `{class}`, `{region}` and `{to_region}` placeholders.
/// Rows and columns are rendered 1-indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateCatalog {
    templates: BTreeMap<TemplateKey, Vec<String>>,
}

impl Default for TemplateCatalog {
    fn default() -> Self {
        let defaults = [
            (TemplateKey::Add, "add a {color} {shape} at row {row} column {col}"),
            (TemplateKey::Remove, "remove the {color} {shape} at row {row} column {col}"),
            (TemplateKey::Move, "move the {color} {shape} from row {row} column {col} to row {to_row} column {to_col}"),
            (TemplateKey::CocoAdd, "add a {class} at the {region}"),
            (TemplateKey::CocoRemove, "remove the {class} at the {region}"),
            (TemplateKey::CocoMove, "move the {class} from the {region} to the {to_region}"),
        ];
        let mut templates = BTreeMap::new();
        for (key, t) in defaults {
            templates.insert(key, vec![t.to_string()]);
        }
        TemplateCatalog { templates }
    }
}

impl TemplateCatalog {
    /// Parses `key<TAB>template` lines; keys missing from the file keep their defaults.
    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        let mut parsed: BTreeMap<TemplateKey, Vec<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (key, template) = line.split_once('\t').ok_or(TemplateError::BadLine { line: i + 1 })?;
            let key = TemplateKey::ALL
                .into_iter()
                .find(|k| k.as_str() == key.trim())
                .ok_or_else(|| TemplateError::UnknownKey { line: i + 1, key: key.trim().to_string() })?;
            parsed.entry(key).or_default().push(template.trim().to_string());
        }
        let mut catalog = TemplateCatalog::default();
        catalog.templates.extend(parsed);
        Ok(catalog)
    }

    pub fn load_or_default(path: &Path) -> Result<Self, TemplateError> {
        match std::fs::read_to_string(path) {
            Ok(text) => TemplateCatalog::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(TemplateCatalog::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn variants(&self, key: TemplateKey) -> &[String] {
        self.templates.get(&key).map(Vec::as_slice).unwrap_or_default()
    }

    /// Renders the template picked by `choice` (modulo the variant count).
    pub fn render(&self, key: TemplateKey, choice: u64, values: &[(&str, String)]) -> Result<String, TemplateError> {
        let variants = self.variants(key);
        if variants.is_empty() {
            return Err(TemplateError::Missing(key.as_str()));
        }
        let mut out = variants[(choice % variants.len() as u64) as usize].clone();
        for (name, value) in values {
            out = out.replace(&format!("{{{name}}}"), value);
        }
        Ok(out)
    }
}
