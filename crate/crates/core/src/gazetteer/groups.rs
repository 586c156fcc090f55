use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{LabeledExample, Taxonomy};

/// Config form of one club: category names and the entity types they share.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub categories: Vec<String>,
    pub entity_types: Vec<String>,
}

/// Categories clubbed by shared slot types. Each category belongs to exactly
/// one group; the group's entity types are enabled for the category-scoped
/// tagging stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryGroups {
    groups: Vec<(Vec<usize>, Vec<usize>)>,
    of_category: Vec<usize>,
}

impl CategoryGroups {
    pub fn new(groups: Vec<(Vec<usize>, Vec<usize>)>, num_categories: usize) -> Result<Self> {
        let mut of_category = vec![usize::MAX; num_categories];
        for (gi, (cats, _)) in groups.iter().enumerate() {
            for &c in cats {
                if c >= num_categories {
                    return Err(Error::Config(format!("category id {c} out of range")));
                }
                if of_category[c] != usize::MAX {
                    return Err(Error::Config(format!("category {c} appears in two groups")));
                }
                of_category[c] = gi;
            }
        }
        if let Some(c) = of_category.iter().position(|&g| g == usize::MAX) {
            return Err(Error::Config(format!("category {c} belongs to no group")));
        }
        Ok(CategoryGroups { groups, of_category })
    }

    pub fn from_specs(specs: &[GroupSpec], taxonomy: &Taxonomy) -> Result<Self> {
        let mut groups = Vec::with_capacity(specs.len());
        for spec in specs {
            let cats = spec
                .categories
                .iter()
                .map(|n| {
                    taxonomy
                        .category_id(n)
                        .ok_or_else(|| Error::Config(format!("unknown category {n:?} in groups")))
                })
                .collect::<Result<Vec<_>>>()?;
            let types = spec
                .entity_types
                .iter()
                .map(|n| {
                    taxonomy
                        .entity_type_id(n)
                        .ok_or_else(|| Error::Config(format!("unknown entity type {n:?} in groups")))
                })
                .collect::<Result<Vec<_>>>()?;
            groups.push((cats, types));
        }
        Self::new(groups, taxonomy.num_categories())
    }

    pub fn to_specs(&self, taxonomy: &Taxonomy) -> Vec<GroupSpec> {
        self.groups
            .iter()
            .map(|(cats, types)| GroupSpec {
                categories: cats.iter().map(|&c| taxonomy.categories()[c].name.clone()).collect(),
                entity_types: types.iter().map(|&t| taxonomy.entity_types()[t].clone()).collect(),
            })
            .collect()
    }

    /// One group holding every category and every type.
    pub fn single(num_categories: usize, num_types: usize) -> Self {
        CategoryGroups {
            groups: vec![((0..num_categories).collect(), (0..num_types).collect())],
            of_category: vec![0; num_categories],
        }
    }

    /// Clubs categories whose observed entity-type sets overlap with Jaccard
    /// similarity of at least 0.5, transitively.
    pub fn from_examples(examples: &[LabeledExample], taxonomy: &Taxonomy) -> Self {
        let n = taxonomy.num_categories();
        let mut seen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for ex in examples {
            seen[ex.category].extend(ex.entities.iter().map(|e| e.entity_type));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for a in 0..n {
            for b in a + 1..n {
                let inter = seen[a].intersection(&seen[b]).count();
                let union = seen[a].union(&seen[b]).count();
                if union > 0 && inter * 2 >= union {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut root_to_group = vec![usize::MAX; n];
        for c in 0..n {
            let r = find(&mut parent, c);
            if root_to_group[r] == usize::MAX {
                root_to_group[r] = groups.len();
                groups.push((Vec::new(), Vec::new()));
            }
            let g = &mut groups[root_to_group[r]];
            g.0.push(c);
            let merged: BTreeSet<usize> = g.1.iter().copied().chain(seen[c].iter().copied()).collect();
            g.1 = merged.into_iter().collect();
        }
        Self::new(groups, n).expect("union-find covers every category once")
    }

    /// Entity types enabled for a category's scoped tagging stages.
    pub fn types_for(&self, category: usize) -> &[usize] {
        &self.groups[self.of_category[category]].1
    }

    pub fn group_of(&self, category: usize) -> usize {
        self.of_category[category]
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{EntitySpan, RawQuery};

    fn taxonomy() -> Taxonomy {
        serde_json::from_value(serde_json::json!({
            "categories": {"a": ["a1"], "b": ["b1"], "c": ["c1"]},
            "entity_types": ["city", "degree", "exam"],
        }))
        .unwrap()
    }

    #[test]
    fn rejects_double_or_missing_membership() {
        assert!(CategoryGroups::new(vec![(vec![0, 1], vec![]), (vec![1, 2], vec![])], 3).is_err());
        assert!(CategoryGroups::new(vec![(vec![0, 1], vec![])], 3).is_err());
        assert!(CategoryGroups::new(vec![(vec![0, 1], vec![0]), (vec![2], vec![1])], 3).is_ok());
    }

    #[test]
    fn default_grouping_clubs_shared_types() {
        let t = taxonomy();
        let ex = |cat: usize, types: &[usize]| {
            let text = "x ".repeat(types.len() + 1);
            let entities = types
                .iter()
                .enumerate()
                .map(|(i, &ty)| EntitySpan { start: 2 * i, end: 2 * i + 1, entity_type: ty })
                .collect();
            LabeledExample::new(RawQuery::new(text).unwrap(), cat, cat, entities, &t).unwrap()
        };
        let examples = vec![ex(0, &[0, 1]), ex(1, &[0]), ex(2, &[2])];
        let g = CategoryGroups::from_examples(&examples, &t);
        assert_eq!(g.len(), 2);
        assert_eq!(g.group_of(0), g.group_of(1));
        assert_eq!(g.types_for(1), [0, 1]);
        assert_eq!(g.types_for(2), [2]);
    }

    #[test]
    fn spec_round_trip() {
        let t = taxonomy();
        let g = CategoryGroups::new(vec![(vec![0, 2], vec![0, 2]), (vec![1], vec![1])], 3).unwrap();
        let back = CategoryGroups::from_specs(&g.to_specs(&t), &t).unwrap();
        assert_eq!(g, back);
    }
}
