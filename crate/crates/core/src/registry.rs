//! Name-keyed registries of interchangeable strategies.
//!
//! Each strategy family (rating rewards, answer matchers, judgers, table
//! renderers) registers constructors under a stable name; the CLI selects
//! one at runtime.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("unknown {kind} '{name}' (available: {})", available.join(", "))]
    Unknown {
        kind: &'static str,
        name: String,
        available: Vec<&'static str>,
    },
    #[error("cannot build {kind} '{name}': {message}")]
    Build {
        kind: &'static str,
        name: &'static str,
        message: String,
    },
}

type Factory<P, T> = Box<dyn Fn(&P) -> Result<Box<T>, String> + Send + Sync>;

struct Entry<P, T: ?Sized> {
    description: &'static str,
    factory: Factory<P, T>,
}

/// Constructors for one strategy family, parameterised by `P`.
pub struct Registry<P, T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<P, T>>,
}

impl<P, T: ?Sized> Registry<P, T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register<F>(&mut self, name: &'static str, description: &'static str, factory: F)
    where
        F: Fn(&P) -> Result<Box<T>, String> + Send + Sync + 'static,
    {
        self.entries.insert(
            name,
            Entry {
                description,
                factory: Box::new(factory),
            },
        );
    }

    pub fn with<F>(mut self, name: &'static str, description: &'static str, factory: F) -> Self
    where
        F: Fn(&P) -> Result<Box<T>, String> + Send + Sync + 'static,
    {
        self.register(name, description, factory);
        self
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .iter()
            .map(|(name, e)| (*name, e.description))
            .collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn build(&self, name: &str, params: &P) -> Result<Box<T>, RegistryError> {
        let (key, entry) = self
            .entries
            .get_key_value(name.trim())
            .ok_or_else(|| RegistryError::Unknown {
                kind: self.kind,
                name: name.to_string(),
                available: self.names(),
            })?;
        (entry.factory)(params).map_err(|message| RegistryError::Build {
            kind: self.kind,
            name: key,
            message,
        })
    }
}

impl<P, T: ?Sized> fmt::Debug for Registry<P, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("names", &self.names())
            .finish()
    }
}
