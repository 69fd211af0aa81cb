use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary sensitive attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Privileged,
    Unprivileged,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Privileged => "privileged",
            Group::Unprivileged => "unprivileged",
        }
    }

    pub fn other(self) -> Group {
        match self {
            Group::Privileged => Group::Unprivileged,
            Group::Unprivileged => Group::Privileged,
        }
    }
}

impl std::str::FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "privileged" | "priv" | "p" => Ok(Group::Privileged),
            "unprivileged" | "unpriv" | "u" => Ok(Group::Unprivileged),
            other => Err(Error::invalid(format!(
                "unknown group `{other}` (expected privileged or unprivileged)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: usize,
    pub group: Group,
    /// Latent ground-truth merit.
    pub skill: f64,
    /// Score that drives simulated comparisons (skill plus bias).
    pub perceived: f64,
}

/// A population split into a privileged and an unprivileged group.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    individuals: Vec<Individual>,
    privileged: Vec<usize>,
    unprivileged: Vec<usize>,
}

impl Population {
    /// Validates ids (contiguous `0..n` in order), group non-emptiness, and
    /// that privileged individuals carry no bias.
    pub fn new(individuals: Vec<Individual>) -> Result<Self> {
        let mut privileged = Vec::new();
        let mut unprivileged = Vec::new();
        for (pos, ind) in individuals.iter().enumerate() {
            if ind.id != pos {
                return Err(Error::invalid(format!(
                    "individual at position {pos} has id {}; ids must be 0..n in order",
                    ind.id
                )));
            }
            if !ind.skill.is_finite() || !ind.perceived.is_finite() {
                return Err(Error::invalid(format!("individual {pos} has a non-finite score")));
            }
            match ind.group {
                Group::Privileged => {
                    if ind.perceived.to_bits() != ind.skill.to_bits() {
                        return Err(Error::invalid(format!(
                            "privileged individual {pos} has perceived != skill"
                        )));
                    }
                    privileged.push(pos);
                }
                Group::Unprivileged => unprivileged.push(pos),
            }
        }
        if privileged.is_empty() || unprivileged.is_empty() {
            return Err(Error::invalid("both groups must be non-empty"));
        }
        Ok(Self {
            individuals,
            privileged,
            unprivileged,
        })
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn get(&self, id: usize) -> Option<&Individual> {
        self.individuals.get(id)
    }

    pub fn members(&self, group: Group) -> &[usize] {
        match group {
            Group::Privileged => &self.privileged,
            Group::Unprivileged => &self.unprivileged,
        }
    }

    pub fn group_of(&self, id: usize) -> Group {
        self.individuals[id].group
    }

    /// Group label per id.
    pub fn labels(&self) -> Vec<Group> {
        self.individuals.iter().map(|i| i.group).collect()
    }

    pub fn skills(&self) -> Vec<f64> {
        self.individuals.iter().map(|i| i.skill).collect()
    }

    pub fn perceived(&self) -> Vec<f64> {
        self.individuals.iter().map(|i| i.perceived).collect()
    }
}
