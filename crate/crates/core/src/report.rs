//! The versioned JSON report and the end-to-end run.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::Vector;
use crate::bisets::{CharacteristicReport, ShapeEntry};
use crate::blocks::{analyze_block, check_block, BlockData, GroupContext, MAX_FIELD_DEGREE};
use crate::conjecture::{self, EquivalenceReport, Finding};
use crate::error::{Error, Result};
use crate::fusion::HomSummary;
use crate::groups::{PermGroup, Subgroup};

pub const SCHEMA: &str = "bflab-report/1";
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    /// Run the unital-basis, twisted-unit and balance checks.
    pub check: bool,
    /// Check every source idempotent, not only the canonical one.
    pub thorough: bool,
    pub exhaustive: bool,
    pub samples: usize,
    /// Include wall-clock timings (makes the report nondeterministic).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: DEFAULT_SEED, check: false, thorough: false, exhaustive: false, samples: 64, timings: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupInfo {
    pub label: String,
    pub order: usize,
    pub degree: usize,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u64,
    pub m: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupInfo {
    pub order: usize,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChecksRecord {
    pub fusion_matches: bool,
    pub divisible: bool,
    pub characteristic: CharacteristicReport,
    pub rank_formula: bool,
    pub top_orbits: bool,
    pub block_shape_stable: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlternativeSource {
    pub choice: usize,
    pub source_dim: usize,
    pub unital_basis: bool,
    pub twisted_units: bool,
    pub intrinsic_balance: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockRecord {
    pub index: usize,
    pub principal: bool,
    pub dim: usize,
    pub defect_group: SubgroupInfo,
    /// e_D lifted to kC_G(D), coefficients on the group basis.
    pub maximal_pair_block: Vector,
    pub maximal_pair_candidates: usize,
    pub source_idempotent: Vector,
    pub source_candidates: usize,
    pub source_dim: usize,
    pub source_shape: Vec<ShapeEntry>,
    pub block_shape: Vec<ShapeEntry>,
    pub block_fusion: Vec<HomSummary>,
    pub source_presystem: Vec<HomSummary>,
    pub checks: ChecksRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternative_sources: Vec<AlternativeSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub group: GroupInfo,
    pub prime: u64,
    pub seed: u64,
    pub field: FieldInfo,
    pub checked: bool,
    pub blocks: Vec<BlockRecord>,
    pub findings: Vec<BlockFinding>,
}

/// A finding with the choices that pin down where it happened.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockFinding {
    pub group: String,
    pub prime: u64,
    pub block: usize,
    pub defect_group: Vec<String>,
    pub maximal_pair_block: Vector,
    pub source_idempotent: Vector,
    pub finding: Finding,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Parse a report written by [`Report::to_json`], checking the schema tag.
    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Input(format!("report document: {e}")))?;
        if r.schema != SCHEMA {
            return Err(Error::Input(format!("unsupported report schema {:?}", r.schema)));
        }
        for (k, b) in r.blocks.iter().enumerate() {
            if b.index != k {
                return Err(Error::Input(format!("block record {k} carries index {}", b.index)));
            }
        }
        if let Some(f) = r.findings.iter().find(|f| f.block >= r.blocks.len()) {
            return Err(Error::Input(format!("finding refers to missing block {}", f.block)));
        }
        Ok(r)
    }

    pub fn has_findings(&self) -> bool {
        !self.findings.is_empty()
    }
}

fn subgroup_info(g: &PermGroup, s: &Subgroup) -> SubgroupInfo {
    SubgroupInfo { order: s.order(), elements: s.elems.iter().map(|&x| g.cycle_string(x)).collect() }
}

fn structural_findings(checks: &ChecksRecord) -> Vec<Finding> {
    let mut out = vec![];
    let c = &checks.characteristic;
    for (ok, name) in [
        (checks.fusion_matches, "fixed-point fusion differs from block fusion"),
        (checks.divisible, "fixed-point presystem is not divisible"),
        (c.bifree, "source shape is not bifree"),
        (c.symmetric, "source shape is not symmetric"),
        (c.generated, "source shape is not generated by block fusion"),
        (c.stable, "source shape is not stable under block fusion"),
        (c.sylow, "source shape size over |D| is divisible by p"),
        (checks.rank_formula, "rank formula fails for the block algebra"),
        (checks.top_orbits, "top orbits of the source shape do not match Aut(D) in block fusion"),
        (checks.block_shape_stable, "block algebra shape is not stable under block fusion"),
    ] {
        if !ok {
            out.push(Finding { condition: name.into(), morphism: None, detail: c.witnesses.join("; "), witnesses: vec![] });
        }
    }
    out
}

fn block_record(ctx: &GroupContext, bd: &BlockData, cfg: &RunConfig, started: Instant) -> Result<(BlockRecord, Vec<Finding>)> {
    let g = &ctx.group;
    let bc = check_block(ctx, bd)?;
    let checks = ChecksRecord {
        fusion_matches: bc.fusion_matches,
        divisible: bc.divisibility.holds(),
        characteristic: bc.characteristic.clone(),
        rank_formula: bc.rank_formula,
        top_orbits: bc.top_orbits,
        block_shape_stable: bc.block_stable,
    };
    let mut findings = structural_findings(&checks);
    let opts = conjecture::Options { samples: cfg.samples, exhaustive: cfg.exhaustive };
    let equivalence = if cfg.check {
        let eq = conjecture::equivalence_report(bd, ctx.prime, &opts, true)?;
        findings.extend(eq.findings.iter().cloned());
        Some(eq)
    } else {
        None
    };
    let mut alternative_sources = vec![];
    if cfg.check && cfg.thorough {
        for choice in 0..bd.source_candidates.len() {
            if choice == bd.source_choice {
                continue;
            }
            let alt = analyze_block(ctx, bd.index, choice)?;
            let eq = conjecture::equivalence_report(&alt, ctx.prime, &opts, false)?;
            findings.extend(eq.findings.iter().cloned());
            alternative_sources.push(AlternativeSource {
                choice,
                source_dim: alt.source.dim(),
                unital_basis: eq.unital_basis,
                twisted_units: eq.twisted_units,
                intrinsic_balance: eq.intrinsic_balance,
                agree: eq.agree,
            });
        }
    }
    let rec = BlockRecord {
        index: bd.index,
        principal: bd.principal,
        dim: bd.block_dim,
        defect_group: subgroup_info(g, &bd.defect),
        maximal_pair_block: bd.pairs.pairs[&bd.defect].clone(),
        maximal_pair_candidates: bd.pairs.maximal_candidates,
        source_idempotent: bd.source_idempotent().clone(),
        source_candidates: bd.source_candidates.len(),
        source_dim: bd.source.dim(),
        source_shape: bc.source_shape.entries(g),
        block_shape: bc.block_shape.entries(g),
        block_fusion: bd.block_fusion.summary(),
        source_presystem: bc.presystem.summary(),
        checks,
        equivalence,
        alternative_sources,
        millis: cfg.timings.then(|| started.elapsed().as_millis()),
    };
    Ok((rec, findings))
}

fn run_with(ctx: &GroupContext, cfg: &RunConfig) -> Result<Report> {
    let g = &ctx.group;
    let mut blocks = vec![];
    let mut findings = vec![];
    for index in 0..ctx.blocks.len() {
        let started = Instant::now();
        let bd = analyze_block(ctx, index, 0)?;
        let (rec, fs) = block_record(ctx, &bd, cfg, started)?;
        for finding in fs {
            findings.push(BlockFinding {
                group: g.label.clone(),
                prime: ctx.prime,
                block: index,
                defect_group: rec.defect_group.elements.clone(),
                maximal_pair_block: rec.maximal_pair_block.clone(),
                source_idempotent: rec.source_idempotent.clone(),
                finding,
            });
        }
        blocks.push(rec);
    }
    Ok(Report {
        schema: SCHEMA.to_string(),
        group: GroupInfo {
            label: g.label.clone(),
            order: g.order(),
            degree: g.degree,
            generators: g.generators.iter().map(|&x| g.cycle_string(x)).collect(),
        },
        prime: ctx.prime,
        seed: cfg.seed,
        field: FieldInfo { p: ctx.field.p(), m: ctx.field.m() },
        checked: cfg.check,
        blocks,
        findings,
    })
}

/// Analyze (and optionally check) every block of kG, enlarging the field
/// when a splitting step needs it.
pub fn run(group: Arc<PermGroup>, prime: u64, cfg: &RunConfig) -> Result<Report> {
    let mut ctx = GroupContext::new(group, prime, cfg.seed)?;
    loop {
        match run_with(&ctx, cfg) {
            Err(Error::FieldTooSmall { .. }) if ctx.field.m() * 2 <= MAX_FIELD_DEGREE => ctx = ctx.doubled()?,
            other => return other,
        }
    }
}
