use std::collections::HashMap;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    /// Global subcategory ids, in declaration order.
    pub subcategories: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subcategory {
    pub name: String,
    pub category: usize,
}

/// Closed intent inventory plus the configured entity types.
///
/// Category ids follow declaration order; subcategory ids are global and
/// assigned in declaration order across all categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TaxonomyFile", into = "TaxonomyFile")]
pub struct Taxonomy {
    categories: Vec<Category>,
    subcategories: Vec<Subcategory>,
    entity_types: Vec<String>,
    #[serde(skip)]
    sub_index: HashMap<String, usize>,
}

/// On-disk shape: `{"categories": {name: [subcategory names]}, "entity_types": [names]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaxonomyFile {
    pub categories: IndexMap<String, Vec<String>>,
    pub entity_types: Vec<String>,
}

impl TryFrom<TaxonomyFile> for Taxonomy {
    type Error = Error;

    fn try_from(file: TaxonomyFile) -> Result<Self> {
        let mut categories = Vec::with_capacity(file.categories.len());
        let mut subcategories = Vec::new();
        let mut sub_index = HashMap::new();
        for (cat_id, (name, subs)) in file.categories.into_iter().enumerate() {
            if subs.is_empty() {
                return Err(Error::Taxonomy(format!("category {name:?} has no subcategories")));
            }
            let mut ids = Vec::with_capacity(subs.len());
            for sub in subs {
                if let Some(&prev) = sub_index.get(&sub) {
                    let owner: &Subcategory = &subcategories[prev];
                    return Err(Error::Taxonomy(format!(
                        "subcategory {sub:?} appears under both {:?} and {name:?}",
                        categories
                            .get(owner.category)
                            .map(|c: &Category| c.name.as_str())
                            .unwrap_or(name.as_str()),
                    )));
                }
                sub_index.insert(sub.clone(), subcategories.len());
                ids.push(subcategories.len());
                subcategories.push(Subcategory {
                    name: sub,
                    category: cat_id,
                });
            }
            categories.push(Category {
                name,
                subcategories: ids,
            });
        }
        if categories.is_empty() {
            return Err(Error::Taxonomy("no categories".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for t in &file.entity_types {
            if t.is_empty() || !seen.insert(t) {
                return Err(Error::Taxonomy(format!("bad or duplicate entity type {t:?}")));
            }
        }
        Ok(Taxonomy {
            categories,
            subcategories,
            entity_types: file.entity_types,
            sub_index,
        })
    }
}

impl From<Taxonomy> for TaxonomyFile {
    fn from(t: Taxonomy) -> Self {
        let categories = t
            .categories
            .iter()
            .map(|c| {
                let subs = c
                    .subcategories
                    .iter()
                    .map(|&s| t.subcategories[s].name.clone())
                    .collect();
                (c.name.clone(), subs)
            })
            .collect();
        TaxonomyFile {
            categories,
            entity_types: t.entity_types,
        }
    }
}

impl Taxonomy {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn num_subcategories(&self) -> usize {
        self.subcategories.len()
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn subcategories(&self) -> &[Subcategory] {
        &self.subcategories
    }

    pub fn entity_types(&self) -> &[String] {
        &self.entity_types
    }

    pub fn category_id(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.name == name)
    }

    pub fn subcategory_id(&self, name: &str) -> Option<usize> {
        self.sub_index.get(name).copied()
    }

    pub fn entity_type_id(&self, name: &str) -> Option<usize> {
        self.entity_types.iter().position(|t| t == name)
    }

    pub fn parent_of(&self, subcategory: usize) -> usize {
        self.subcategories[subcategory].category
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TaxonomyFile::from(self.clone()))?)
    }
}
