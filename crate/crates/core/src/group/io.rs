//! JSON group files: `{ "order": n, "mult": [[...]], "labels": [...] }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::error::{CllError, Result};

#[derive(Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<usize>>,
}

impl GroupFile {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupFile {
            order: g.order(),
            mult: g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect()).collect(),
            labels: g.labels().map(|l| l.to_vec()),
            identity: Some(g.identity()),
            gens: Some(g.gens().to_vec()),
        }
    }

    pub fn into_group(self) -> Result<FiniteGroup> {
        if self.order != self.mult.len() {
            return Err(CllError::MalformedTable(format!("order {} but {} rows", self.order, self.mult.len())));
        }
        let identity = match self.identity {
            Some(e) => e,
            None => (0..self.order)
                .find(|&e| (0..self.order).all(|a| self.mult[e][a] == a && self.mult[a][e] == a))
                .ok_or(CllError::NoIdentity(0))?,
        };
        let mut g = FiniteGroup::from_mult_table(&self.mult, identity)?;
        if let Some(gens) = self.gens {
            g = g.with_gens(gens)?;
        }
        if let Some(labels) = self.labels {
            g = g.with_labels(labels)?;
        }
        Ok(g)
    }
}

pub fn read_group_file(path: &Path) -> Result<FiniteGroup> {
    let text = std::fs::read_to_string(path)?;
    let file: GroupFile = serde_json::from_str(&text)?;
    file.into_group()
}

pub fn group_to_json(g: &FiniteGroup) -> String {
    serde_json::to_string(&GroupFile::from_group(g)).expect("serializable")
}
