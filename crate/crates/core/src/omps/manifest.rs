//! Bundle manifests: `key = value` lines naming the domain, problem,
//! ontology and interface files, relative to the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dl::parse_ontology;
use crate::pddl::parse_pddl;

use super::{parse_interface, Omps, OmpsError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub path: PathBuf,
    pub domain: PathBuf,
    pub problem: PathBuf,
    pub ontology: PathBuf,
    pub interface: PathBuf,
}

fn read(path: &Path) -> Result<String, OmpsError> {
    fs::read_to_string(path).map_err(|source| OmpsError::Io { path: path.to_path_buf(), source })
}

impl Manifest {
    /// Parses manifest text; `path` locates the manifest for relative paths.
    pub fn parse(text: &str, path: &Path) -> Result<Manifest, OmpsError> {
        let err = |message: String| OmpsError::Manifest { path: path.to_path_buf(), message };
        let base = path.parent().unwrap_or(Path::new(""));
        let (mut domain, mut problem, mut ontology, mut interface) = (None, None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("line {}: expected `key = value`", i + 1)))?;
            let value = base.join(value.trim());
            let slot = match key.trim() {
                "domain" => &mut domain,
                "problem" => &mut problem,
                "ontology" => &mut ontology,
                "interface" => &mut interface,
                other => return Err(err(format!("line {}: unknown key `{other}`", i + 1))),
            };
            if slot.replace(value).is_some() {
                return Err(err(format!("line {}: duplicate key `{}`", i + 1, key.trim())));
            }
        }
        let need = |v: Option<PathBuf>, key: &str| v.ok_or_else(|| err(format!("missing key `{key}`")));
        Ok(Manifest {
            path: path.to_path_buf(),
            domain: need(domain, "domain")?,
            problem: need(problem, "problem")?,
            ontology: need(ontology, "ontology")?,
            interface: need(interface, "interface")?,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Manifest, OmpsError> {
        let path = path.as_ref();
        Manifest::parse(&read(path)?, path)
    }

    /// Reads and validates the bundle.
    pub fn load(&self) -> Result<Omps, OmpsError> {
        let spec = parse_pddl(&read(&self.domain)?, &read(&self.problem)?)?;
        let ontology = parse_ontology(&read(&self.ontology)?)?;
        let (interface, queries) = parse_interface(&read(&self.interface)?, &spec, &ontology.signature())?;
        Omps::new(spec, ontology, interface, queries)
    }
}
