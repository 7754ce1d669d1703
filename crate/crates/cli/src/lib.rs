//! The `sheetlens` command line. [`run`] is the whole program; `main` only
//! binds it to the process streams.
//!
//! Exit codes: 0 success, 1 lint findings, 2 usage or input error,
//! 3 reference cycle met by `levels`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sheetlens::analysis::{analyze, AnalysisRequest, Tool};
use sheetlens::depgraph::build_graph;
use sheetlens::report::{to_json, to_svg, ReportDocument, SvgOptions};
use sheetlens::tools::{Endpoint, Overlay};
use sheetlens::workbook::{load_grid, load_json, Workbook};
use sheetlens_service::{serve, ServiceConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CYCLE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "sheetlens", version, about = "Audit spreadsheet formulas through their dependency graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Color cells as input, output, processing or standalone.
    Classify(Common),
    /// Arrows from every precedent of a block.
    Precedents(Common),
    /// Arrows to every dependent of a block.
    Dependents(Common),
    /// Precedents grouped into adjacent blocks.
    Blockprec(Common),
    /// Links that start and end inside a region.
    Inblock(Common),
    /// Independent groups of connected cells.
    Components(Common),
    /// Longest-path level of each connected cell.
    Levels(Common),
    /// Run the broken-link, irregular-pattern and recompute checks.
    Lint(Common),
    /// Render a tool's overlay as SVG.
    Svg(SvgArgs),
    /// Serve the HTTP API, and optionally a static UI bundle.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Workbook file (`.grid` or `.json`).
    file: PathBuf,
    /// Region to scope the tool to, e.g. A1:Z9.
    #[arg(long)]
    region: Option<String>,
    /// Selected block, e.g. B20:G20.
    #[arg(long)]
    block: Option<String>,
    /// Number of steps, or `all`.
    #[arg(long)]
    depth: Option<String>,
    /// Comma-separated lint checks: broken, irregular, recompute.
    #[arg(long)]
    checks: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the document here instead of stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SvgArgs {
    #[command(flatten)]
    common: Common,
    /// Tool whose overlay is drawn.
    #[arg(long, default_value = "classify")]
    tool: String,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Directory served at `/`.
    static_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Seconds a session may sit idle before it is dropped.
    #[arg(long, default_value_t = 3600)]
    idle_timeout: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
    Text,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. The document goes to `stdout`, messages to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                return EXIT_USAGE;
            }
            let _ = stdout.write_all(text.as_bytes());
            return EXIT_OK;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(stderr, "sheetlens: {message}");
            EXIT_USAGE
        }
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, Failure> {
    let (tool, format, common) = match cli.command {
        Command::Classify(c) => (Tool::Classify, c.format, c),
        Command::Precedents(c) => (Tool::MultiPrecedents, c.format, c),
        Command::Dependents(c) => (Tool::MultiDependents, c.format, c),
        Command::Blockprec(c) => (Tool::BlockPrecedents, c.format, c),
        Command::Inblock(c) => (Tool::InBlockLinks, c.format, c),
        Command::Components(c) => (Tool::SeparatedBlocks, c.format, c),
        Command::Levels(c) => (Tool::LevelLabels, c.format, c),
        Command::Lint(c) => (Tool::Lint, c.format, c),
        Command::Svg(s) => (s.tool.parse::<Tool>()?, Format::Svg, s.common),
        Command::Serve(s) => return serve_blocking(s, stderr),
    };

    let wb = load_file(&common.file)?;
    let g = build_graph(&wb);
    let request = AnalysisRequest {
        tool,
        region: common.region,
        block: common.block,
        depth: common.depth,
        checks: common.checks,
    };
    let analysis = analyze(&wb, &g, &request)?;
    let document = match format {
        Format::Json => to_json(&analysis.report),
        Format::Svg => to_svg(&wb, &analysis.report.overlay, &SvgOptions::default())
            .map_err(|e| format!("{}: {e}", e.code()))?,
        Format::Text => to_text(&analysis.report),
    };
    match &common.output {
        Some(path) => std::fs::write(path, &document).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => stdout.write_all(document.as_bytes())?,
    }

    if analysis.cycle {
        for d in &analysis.report.diagnostics {
            let _ = writeln!(stderr, "sheetlens: {}: {}", d.code.as_str(), d.message);
        }
        return Ok(EXIT_CYCLE);
    }
    if tool == Tool::Lint && analysis.has_findings() {
        let n = analysis.report.diagnostics.len();
        let _ = writeln!(stderr, "sheetlens: {n} finding{}", if n == 1 { "" } else { "s" });
        return Ok(EXIT_FINDINGS);
    }
    Ok(EXIT_OK)
}

/// Loads a workbook, choosing the format by extension.
pub fn load_file(path: &Path) -> Result<Workbook, String> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let loader: fn(&str) -> _ = match ext {
        "grid" => load_grid,
        "json" => load_json,
        _ => return Err(format!("{}: unknown file type (expected .grid or .json)", path.display())),
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    loader(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn serve_blocking(args: ServeArgs, stderr: &mut dyn Write) -> Result<u8, Failure> {
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            return Err(Failure(format!("{}: not a directory", dir.display())));
        }
    }
    let addr = SocketAddr::from(([127, 0, 0, 1], args.port));
    let config = ServiceConfig {
        idle_timeout: std::time::Duration::from_secs(args.idle_timeout),
        static_dir: args.static_dir,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    let _ = writeln!(stderr, "sheetlens: listening on http://{addr}");
    let _ = stderr.flush();
    runtime.block_on(serve(addr, config)).map_err(|e| format!("cannot serve on {addr}: {e}"))?;
    Ok(EXIT_OK)
}

/// One line per overlay entry and finding.
fn to_text(doc: &ReportDocument) -> String {
    let sheet = doc.params.sheet.as_str();
    let endpoint = |e: &Endpoint| match e {
        Endpoint::Cell(c) => c.display_in(sheet),
        Endpoint::Block(id) => format!("#{id}"),
    };
    let Overlay { fills, arrows, blocks, levels, components } = &doc.overlay;
    let mut out = String::new();
    let _ = writeln!(out, "{} ({} on {})", doc.tool, doc.digest.get(..12).unwrap_or(&doc.digest), sheet);
    for f in fills {
        let _ = writeln!(out, "fill {} {}", f.cell.display_in(sheet), f.kind);
    }
    for b in blocks {
        let _ = writeln!(out, "block #{} {}", b.id, b.region.display_in(sheet));
    }
    for a in arrows {
        let _ = writeln!(out, "arrow {} -> {}", endpoint(&a.from), endpoint(&a.to));
    }
    for l in levels {
        let _ = writeln!(out, "level {} {}", l.cell.display_in(sheet), l.level);
    }
    for c in components {
        let cells: Vec<String> = c.cells.iter().map(|a| a.display_in(sheet)).collect();
        let _ = writeln!(out, "component {}: {}", c.id, cells.join(", "));
    }
    for d in &doc.diagnostics {
        let _ = writeln!(out, "{} {}: {}", d.severity.as_str(), d.code.as_str(), d.message);
    }
    out
}
