//! JSON file formats for instances, allocations, and interval specs.
//!
//! Rationals are serialized as strings, "p" or "p/q", and round-trip
//! exactly. The valuation object carries two optional fields beyond the
//! required ones: "default" (table fallback value) and "negated"
//! (pointwise negation flag for uniform/rule kinds); both are omitted
//! when not needed, so files never require them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::IntervalSpec;
use crate::model::{
    Allocation, ConflictGraph, Instance, Monotonicity, NamedRule, ValuationKind, ValuationProfile,
};
use crate::value::{format_rat, parse_rat};

#[derive(Debug, Serialize, Deserialize)]
struct InstanceJson {
    agents: usize,
    items: Vec<String>,
    edges: Vec<[usize; 2]>,
    valuations: ValuationsJson,
    monotone: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ValuationsJson {
    #[serde(rename = "type")]
    kind: String,
    identical: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<TableEntryJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    negated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableEntryJson {
    set: Vec<usize>,
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct AllocationJson {
    bundles: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct IntervalJson {
    intervals: Vec<[String; 2]>,
    values: Vec<String>,
}

fn monotone_str(m: Monotonicity) -> &'static str {
    match m {
        Monotonicity::NonDecreasing => "nondecreasing",
        Monotonicity::NonIncreasing => "nonincreasing",
        Monotonicity::None => "none",
    }
}

fn parse_monotone(s: &str) -> Result<Monotonicity> {
    match s {
        "nondecreasing" => Ok(Monotonicity::NonDecreasing),
        "nonincreasing" => Ok(Monotonicity::NonIncreasing),
        "none" => Ok(Monotonicity::None),
        other => Err(Error::Parse(format!("bad monotone field {other:?}"))),
    }
}

pub fn instance_to_json(instance: &Instance) -> String {
    let prof = instance.valuations();
    let (kind, values, entries, default, rule) = match prof.kind() {
        ValuationKind::Additive(rows) => {
            let rows: Vec<Vec<String>> =
                rows.iter().map(|row| row.iter().map(format_rat).collect()).collect();
            ("additive", Some(rows), None, None, None)
        }
        ValuationKind::Uniform => ("uniform", None, None, None, None),
        ValuationKind::Table { entries, default } => {
            let es: Vec<TableEntryJson> = entries
                .iter()
                .map(|(set, v)| TableEntryJson {
                    set: set.iter().copied().collect(),
                    value: format_rat(v),
                })
                .collect();
            ("table", None, Some(es), default.as_ref().map(format_rat), None)
        }
        ValuationKind::Rule(rule) => ("rule", None, None, None, Some(rule.encode())),
    };
    let json = InstanceJson {
        agents: instance.num_agents(),
        items: (0..instance.num_items()).map(|o| instance.label(o)).collect(),
        edges: instance.graph().edges().map(|(a, b)| [a, b]).collect(),
        valuations: ValuationsJson {
            kind: kind.into(),
            identical: prof.is_identical(),
            values,
            entries,
            default,
            rule,
            negated: prof.is_negated(),
        },
        monotone: monotone_str(prof.monotonicity()).into(),
    };
    serde_json::to_string_pretty(&json).expect("instance serialization cannot fail")
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let json: InstanceJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance json: {e}")))?;
    let num_items = json.items.len();
    let graph = ConflictGraph::new(num_items, json.edges.iter().map(|e| (e[0], e[1])))?;
    let monotonicity = parse_monotone(&json.monotone)?;
    let v = &json.valuations;
    let kind = match v.kind.as_str() {
        "additive" => {
            let rows = v
                .values
                .as_ref()
                .ok_or_else(|| Error::Parse("additive valuations need \"values\"".into()))?;
            let parsed: Result<Vec<Vec<_>>> = rows
                .iter()
                .map(|row| row.iter().map(|s| parse_rat(s)).collect())
                .collect();
            ValuationKind::Additive(parsed?)
        }
        "uniform" => ValuationKind::Uniform,
        "table" => {
            let entries = v
                .entries
                .as_ref()
                .ok_or_else(|| Error::Parse("table valuations need \"entries\"".into()))?;
            let mut map = BTreeMap::new();
            for e in entries {
                let set: BTreeSet<usize> = e.set.iter().copied().collect();
                if set.len() != e.set.len() {
                    return Err(Error::Parse(format!("table entry repeats an item: {:?}", e.set)));
                }
                if map.insert(set, parse_rat(&e.value)?).is_some() {
                    return Err(Error::Parse(format!("duplicate table entry {:?}", e.set)));
                }
            }
            let default = v.default.as_ref().map(|s| parse_rat(s)).transpose()?;
            ValuationKind::Table { entries: map, default }
        }
        "rule" => {
            let name =
                v.rule.as_ref().ok_or_else(|| Error::Parse("rule valuations need \"rule\"".into()))?;
            ValuationKind::Rule(NamedRule::decode(name)?)
        }
        other => return Err(Error::Parse(format!("unknown valuation type {other:?}"))),
    };
    let profile =
        ValuationProfile::from_parts(json.agents, kind, v.identical, monotonicity, v.negated);
    Instance::new(graph, profile, Some(json.items))
}

pub fn allocation_to_json(allocation: &Allocation) -> String {
    let json = AllocationJson {
        bundles: allocation.bundles().iter().map(|b| b.iter().copied().collect()).collect(),
    };
    serde_json::to_string_pretty(&json).expect("allocation serialization cannot fail")
}

pub fn allocation_from_json(text: &str) -> Result<Allocation> {
    let json: AllocationJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("allocation json: {e}")))?;
    let mut bundles = Vec::with_capacity(json.bundles.len());
    for b in &json.bundles {
        let set: BTreeSet<usize> = b.iter().copied().collect();
        if set.len() != b.len() {
            return Err(Error::Parse(format!("bundle repeats an item: {b:?}")));
        }
        bundles.push(set);
    }
    Ok(Allocation::new(bundles))
}

pub fn interval_spec_to_json(spec: &IntervalSpec) -> String {
    let json = IntervalJson {
        intervals: spec
            .intervals
            .iter()
            .map(|(l, r)| [format_rat(l), format_rat(r)])
            .collect(),
        values: spec.values.iter().map(format_rat).collect(),
    };
    serde_json::to_string_pretty(&json).expect("interval serialization cannot fail")
}

pub fn interval_spec_from_json(text: &str) -> Result<IntervalSpec> {
    let json: IntervalJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("interval json: {e}")))?;
    let intervals = json
        .intervals
        .iter()
        .map(|[l, r]| Ok((parse_rat(l)?, parse_rat(r)?)))
        .collect::<Result<Vec<_>>>()?;
    let values = json.values.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
    IntervalSpec { intervals, values }.validated(false)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, instance_to_json(instance))?)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p)
        .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
    instance_from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

pub fn write_allocation(allocation: &Allocation, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, allocation_to_json(allocation))?)
}

pub fn read_allocation(path: impl AsRef<Path>) -> Result<Allocation> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p)
        .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
    allocation_from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

pub fn write_interval_spec(spec: &IntervalSpec, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, interval_spec_to_json(spec))?)
}

pub fn read_interval_spec(path: impl AsRef<Path>) -> Result<IntervalSpec> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p)
        .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
    interval_spec_from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}
