//! One entry point from a textual request to a report, shared by the
//! command line and the HTTP service so both emit the same bytes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::depgraph::{DepGraph, Depth};
use crate::report::{Params, ReportDocument};
use crate::tools::{
    block_precedents, classify, in_block_links, level_overlay, lint_broken_links, lint_irregular, lint_recompute,
    multi_dependents, multi_precedents, separated_blocks, sort_diagnostics, LintConfig, Overlay,
};
use crate::workbook::{parse_region, Region, Workbook};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tool {
    Classify,
    MultiPrecedents,
    MultiDependents,
    BlockPrecedents,
    InBlockLinks,
    SeparatedBlocks,
    LevelLabels,
    Lint,
}

impl Tool {
    pub const ALL: [Tool; 8] = [
        Tool::Classify,
        Tool::MultiPrecedents,
        Tool::MultiDependents,
        Tool::BlockPrecedents,
        Tool::InBlockLinks,
        Tool::SeparatedBlocks,
        Tool::LevelLabels,
        Tool::Lint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tool::Classify => "classify",
            Tool::MultiPrecedents => "multi_precedents",
            Tool::MultiDependents => "multi_dependents",
            Tool::BlockPrecedents => "block_precedents",
            Tool::InBlockLinks => "in_block_links",
            Tool::SeparatedBlocks => "separated_blocks",
            Tool::LevelLabels => "level_labels",
            Tool::Lint => "lint",
        }
    }
}

impl fmt::Display for Tool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tool {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tool::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| AnalysisError::Usage(format!("unknown tool `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Broken,
    Irregular,
    Recompute,
}

impl Check {
    pub const ALL: [Check; 3] = [Check::Broken, Check::Irregular, Check::Recompute];

    pub fn name(self) -> &'static str {
        match self {
            Check::Broken => "broken",
            Check::Irregular => "irregular",
            Check::Recompute => "recompute",
        }
    }
}

impl FromStr for Check {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| AnalysisError::Usage(format!("unknown check `{s}` (expected broken, irregular or recompute)")))
    }
}

/// An analysis request with its arguments still in text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisRequest {
    pub tool: Tool,
    pub region: Option<String>,
    pub block: Option<String>,
    pub depth: Option<String>,
    /// Comma-separated check names.
    pub checks: Option<String>,
}

impl AnalysisRequest {
    pub fn new(tool: Tool) -> Self {
        AnalysisRequest { tool, region: None, block: None, depth: None, checks: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    /// A missing, malformed or conflicting argument.
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub report: ReportDocument,
    /// The levels tool met a reference cycle.
    pub cycle: bool,
}

impl Analysis {
    pub fn has_findings(&self) -> bool {
        !self.report.diagnostics.is_empty()
    }
}

/// Runs `request` against a workbook and its graph.
pub fn analyze(wb: &Workbook, g: &DepGraph, request: &AnalysisRequest) -> Result<Analysis, AnalysisError> {
    let sheet = wb.default_sheet();
    let region = request.region.as_deref().map(|r| region_arg("region", r, sheet)).transpose()?;
    let block = request.block.as_deref().map(|r| region_arg("block", r, sheet)).transpose()?;
    let depth = match &request.depth {
        Some(text) => text.parse::<Depth>().map_err(AnalysisError::Usage)?,
        None => Depth::All,
    };
    let mut params = Params { sheet: sheet.to_string(), ..Params::default() };
    let show = |r: &Region| r.display_in(sheet);
    let need = |r: Option<Region>, what: &str| {
        r.ok_or_else(|| AnalysisError::Usage(format!("{} needs --{what}", request.tool)))
    };

    let mut diagnostics = Vec::new();
    let mut cycle = false;
    let overlay = match request.tool {
        Tool::Classify => {
            params.region = region.as_ref().map(show);
            classify(g, region.as_ref()).1
        }
        Tool::MultiPrecedents | Tool::MultiDependents | Tool::BlockPrecedents => {
            let block = need(block, "block")?;
            params.block = Some(show(&block));
            params.depth = Some(depth.to_string());
            match request.tool {
                Tool::MultiPrecedents => multi_precedents(g, &block, depth),
                Tool::MultiDependents => multi_dependents(g, &block, depth),
                _ => block_precedents(g, &block, depth),
            }
        }
        Tool::InBlockLinks => {
            let region = need(region, "region")?;
            params.region = Some(show(&region));
            in_block_links(g, &region)
        }
        Tool::SeparatedBlocks => {
            params.region = region.as_ref().map(show);
            separated_blocks(g, region.as_ref())
        }
        Tool::LevelLabels => {
            params.region = region.as_ref().map(show);
            let (overlay, diags) = level_overlay(g, region.as_ref());
            cycle = !diags.is_empty();
            diagnostics = diags;
            overlay
        }
        Tool::Lint => {
            let checks = match &request.checks {
                Some(text) => {
                    let mut checks = text.split(',').map(str::parse).collect::<Result<Vec<Check>, _>>()?;
                    checks.sort();
                    checks.dedup();
                    if checks.contains(&Check::Irregular) && block.is_none() {
                        return Err(AnalysisError::Usage("the irregular check needs --block".into()));
                    }
                    checks
                }
                // Without a block there is nothing to compare patterns in.
                None => Check::ALL.into_iter().filter(|c| *c != Check::Irregular || block.is_some()).collect(),
            };
            let config = LintConfig::default();
            for check in &checks {
                match check {
                    Check::Broken => diagnostics.extend(lint_broken_links(wb, g, &config)),
                    Check::Irregular => {
                        diagnostics.extend(lint_irregular(wb, block.as_ref().expect("checked above"), &config))
                    }
                    Check::Recompute => diagnostics.extend(lint_recompute(wb, &config)),
                }
            }
            sort_diagnostics(&mut diagnostics);
            params.block = block.as_ref().map(show);
            params.checks = Some(checks.iter().map(|c| c.name().to_string()).collect());
            Overlay::default()
        }
    };

    let report = ReportDocument { tool: request.tool.name().to_string(), params, digest: wb.digest(), overlay, diagnostics };
    Ok(Analysis { report, cycle })
}

fn region_arg(name: &str, text: &str, sheet: &str) -> Result<Region, AnalysisError> {
    parse_region(text, sheet).map_err(|e| AnalysisError::Usage(format!("bad --{name} `{text}`: {}", e.reason)))
}
