//! Rule × (I, R) sweeps and their CSV tables.

use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ca::Rule;
use crate::error::{Error, Result};
use crate::pipeline::{run_batch, RunConfig};
use crate::reservoir::ReservoirParams;
use crate::task::INPUT_WIDTH;

pub const DEFAULT_RULES: [u8; 11] = [90, 150, 182, 22, 60, 102, 105, 153, 165, 180, 195];
pub const DEFAULT_COMBOS: [(usize, usize); 5] = [(2, 4), (2, 8), (4, 4), (4, 8), (8, 8)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub rules: Vec<u8>,
    /// `(iterations, mappings)` pairs.
    pub combos: Vec<(usize, usize)>,
    pub diffuse_length: usize,
    pub distractor: usize,
    pub n_runs: usize,
    #[serde(default)]
    pub layered: bool,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            rules: DEFAULT_RULES.to_vec(),
            combos: DEFAULT_COMBOS.to_vec(),
            diffuse_length: 40,
            distractor: 200,
            n_runs: 100,
            layered: false,
            base_seed: 0,
            output: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() || self.combos.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one rule and one (I,R) pair".into()));
        }
        if self.n_runs == 0 {
            return Err(Error::InvalidParameter("sweep needs at least one run per cell".into()));
        }
        for &rule in &self.rules {
            self.cell_config(rule, self.combos[0]).validate()?;
        }
        for &combo in &self.combos {
            self.cell_config(self.rules[0], combo).validate()?;
        }
        Ok(())
    }

    /// Run configuration for one table cell; every cell starts at `base_seed`.
    pub fn cell_config(&self, rule: u8, (iterations, mapping_count): (usize, usize)) -> RunConfig {
        let params = ReservoirParams {
            rule: Rule::from(rule),
            iterations,
            mapping_count,
            diffuse_length: self.diffuse_length,
            input_width: INPUT_WIDTH,
            seed: 0,
        };
        if self.layered {
            RunConfig::layered(params, self.distractor, self.base_seed)
        } else {
            RunConfig::single(params, self.distractor, self.base_seed)
        }
    }
}

/// Success percentages indexed `[rule][combo]`, one table per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTables {
    pub layer1: Vec<Vec<f64>>,
    pub layer2: Option<Vec<Vec<f64>>>,
}

/// Runs every cell, reporting progress through `progress(rule, combo, done, total)`.
pub fn run_sweep(spec: &SweepSpec, mut progress: impl FnMut(u8, (usize, usize), usize, usize)) -> Result<SweepTables> {
    spec.validate()?;
    let total = spec.rules.len() * spec.combos.len();
    let mut layer1 = Vec::with_capacity(spec.rules.len());
    let mut layer2 = spec.layered.then(Vec::new);
    let mut done = 0;
    for &rule in &spec.rules {
        let mut row1 = Vec::with_capacity(spec.combos.len());
        let mut row2 = Vec::with_capacity(spec.combos.len());
        for &combo in &spec.combos {
            let batch = run_batch(&spec.cell_config(rule, combo), spec.n_runs)?;
            row1.push(batch.layer1_percent());
            if let Some(p) = batch.layer2_percent() {
                row2.push(p);
            }
            done += 1;
            progress(rule, combo, done, total);
        }
        layer1.push(row1);
        if let Some(l2) = layer2.as_mut() {
            l2.push(row2);
        }
    }
    Ok(SweepTables { layer1, layer2 })
}

/// Writes one CSV table per layer, each preceded by `#` metadata lines.
/// Tables are separated by a blank line. `timestamp`, when given, is the
/// only run-dependent content.
pub fn write_csv<W: Write>(
    spec: &SweepSpec,
    tables: &SweepTables,
    timestamp: Option<&str>,
    mut out: W,
) -> std::io::Result<()> {
    let layers = std::iter::once(&tables.layer1).chain(tables.layer2.as_ref());
    for (index, table) in layers.enumerate() {
        if index > 0 {
            writeln!(out)?;
        }
        writeln!(
            out,
            "# layer={} diffuse_length={} distractor={} runs={} seed={}",
            index + 1,
            spec.diffuse_length,
            spec.distractor,
            spec.n_runs,
            spec.base_seed
        )?;
        if let Some(ts) = timestamp {
            writeln!(out, "# timestamp={ts}")?;
        }
        let mut csv = csv::Writer::from_writer(&mut out);
        let header = std::iter::once("rule".to_string())
            .chain(spec.combos.iter().map(|(i, r)| format!("({i},{r})")));
        csv.write_record(header).map_err(std::io::Error::other)?;
        for (rule, row) in spec.rules.iter().zip(table) {
            let record = std::iter::once(rule.to_string()).chain(row.iter().map(|p| format!("{p:.1}")));
            csv.write_record(record).map_err(std::io::Error::other)?;
        }
        csv.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(layered: bool) -> SweepSpec {
        SweepSpec {
            rules: vec![90],
            combos: vec![(2, 2)],
            diffuse_length: 40,
            distractor: 10,
            n_runs: 1,
            layered,
            base_seed: 4,
            output: None,
        }
    }

    #[test]
    fn single_cell_table() {
        let mut calls = 0;
        let t = run_sweep(&tiny(false), |_, _, done, total| {
            calls += 1;
            assert_eq!((done, total), (1, 1));
        })
        .unwrap();
        assert_eq!(calls, 1);
        assert_eq!(t.layer1.len(), 1);
        assert!(t.layer1[0][0] == 0.0 || t.layer1[0][0] == 100.0);
        assert!(t.layer2.is_none());
    }

    #[test]
    fn layered_sweep_writes_two_tables() {
        let spec = tiny(true);
        let t = run_sweep(&spec, |_, _, _, _| {}).unwrap();
        let mut buf = Vec::new();
        write_csv(&spec, &t, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("# layer=").count(), 2);
        assert_eq!(text.matches("rule,\"(2,2)\"").count(), 2);
        assert!(!text.contains("timestamp"));
    }

    #[test]
    fn csv_layout() {
        let spec = SweepSpec {
            rules: vec![90, 150],
            combos: vec![(4, 8), (8, 8)],
            n_runs: 30,
            ..SweepSpec::default()
        };
        let tables = SweepTables {
            layer1: vec![vec![66.1, 100.0], vec![33.7, 89.0]],
            layer2: None,
        };
        let mut buf = Vec::new();
        write_csv(&spec, &tables, Some("1700000000"), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# layer=1 diffuse_length=40 distractor=200 runs=30 seed=0\n\
             # timestamp=1700000000\n\
             rule,\"(4,8)\",\"(8,8)\"\n\
             90,66.1,100.0\n\
             150,33.7,89.0\n"
        );
    }

    #[test]
    fn empty_spec_rejected() {
        let spec = SweepSpec { rules: vec![], ..tiny(false) };
        assert!(run_sweep(&spec, |_, _, _, _| {}).is_err());
        let spec = SweepSpec { n_runs: 0, ..tiny(false) };
        assert!(spec.validate().is_err());
    }
}
