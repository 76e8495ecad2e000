//! JSON encoding of instances.
//!
//! ```json
//! {"name": "...",
//!  "variables": [{"id": 0, "name": "x1", "domain": [0, 1]}],
//!  "constraints": [{"scope": [0, 1], "allowed": [[0, 1], [1, 0]]}]}
//! ```
//!
//! Writing emits the current domains, so a reduced instance is written as
//! a fresh instance whose original domains are the reduced ones.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceBuilder, Value, Var};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    variables: Vec<VariableEntry>,
    constraints: Vec<ConstraintEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    id: Var,
    name: String,
    domain: Vec<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintEntry {
    scope: [Var; 2],
    allowed: Vec<[Value; 2]>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let mut b = InstanceBuilder::new(file.name);
    for (k, v) in file.variables.into_iter().enumerate() {
        if v.id != k {
            return Err(Error::Invalid(format!(
                "variable ids must be 0..n in order, found {} at position {k}",
                v.id
            )));
        }
        b.variable(v.name, v.domain);
    }
    for c in file.constraints {
        let [i, j] = c.scope;
        if i >= j {
            return Err(Error::Invalid(format!(
                "constraint scope [{i}, {j}] must be increasing"
            )));
        }
        b.allowed(i, j, c.allowed.into_iter().map(|[a, b]| (a, b)).collect());
    }
    b.build()
}

pub fn instance_to_json(inst: &Instance) -> String {
    let variables = (0..inst.num_vars())
        .map(|i| VariableEntry {
            id: i,
            name: inst.var_name(i).to_string(),
            domain: inst.domain(i),
        })
        .collect();
    let constraints = inst
        .stored_pairs()
        .iter()
        .map(|&(i, j)| {
            let mut allowed = Vec::new();
            for a in inst.live_positions(i) {
                for c in inst.live_positions(j) {
                    if inst.allows_pos(i, a, j, c) {
                        allowed.push([inst.value_at(i, a), inst.value_at(j, c)]);
                    }
                }
            }
            ConstraintEntry {
                scope: [i, j],
                allowed,
            }
        })
        .collect();
    let file = InstanceFile {
        name: inst.name().to_string(),
        variables,
        constraints,
    };
    serde_json::to_string_pretty(&file).expect("instance serialises")
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, instance_to_json(inst) + "\n")?;
    Ok(())
}
