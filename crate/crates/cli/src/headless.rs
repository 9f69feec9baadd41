//! Designer-in-the-loop episodes driven by a simulated designer.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use elegance_core::problem::{load_problem, DesignProblem};
use elegance_core::{DesignerSpec, Episode, EpisodeConfig, EpisodeLog};

pub fn read_problem(path: &Path) -> Result<DesignProblem> {
    let file = File::open(path).with_context(|| format!("opening problem {}", path.display()))?;
    load_problem(BufReader::new(file)).with_context(|| format!("loading problem {}", path.display()))
}

/// Runs one episode to the generation cap with the given designer.
pub fn run_headless(problem: Arc<DesignProblem>, config: EpisodeConfig, designer: DesignerSpec) -> Result<EpisodeLog> {
    let mut episode = Episode::new(problem, config)?;
    let mut designer = designer.build();
    episode.run_with(designer.as_mut())?;
    Ok(episode.into_log())
}

pub fn write_log(path: &Path, log: &EpisodeLog) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    log.write_jsonl(BufWriter::new(file))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_log(path: &Path) -> Result<EpisodeLog> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    EpisodeLog::read_jsonl(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

/// Designer used for the `index`-th episode of a batch. Random designers get
/// a distinct stream per episode.
pub fn batch_designer(spec: DesignerSpec, index: u64) -> DesignerSpec {
    match spec {
        DesignerSpec::Random(seed) => DesignerSpec::Random(seed.wrapping_add(index)),
        other => other,
    }
}

pub fn batch_log_name(problem: &DesignProblem, seed: u64) -> String {
    let stem: String = problem
        .name()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{stem}-seed{seed:03}.jsonl")
}

/// Runs `count` episodes with seeds `config.seed, config.seed + 1, ...` and
/// writes one log per episode into `out_dir`.
pub fn run_batch(
    problem: Arc<DesignProblem>,
    config: &EpisodeConfig,
    designer: DesignerSpec,
    count: u64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    (0..count)
        .map(|i| {
            let seed = config.seed.wrapping_add(i);
            let cfg = EpisodeConfig { seed, ..config.clone() };
            let log = run_headless(problem.clone(), cfg, batch_designer(designer, i))?;
            let path = out_dir.join(batch_log_name(&problem, seed));
            write_log(&path, &log)?;
            Ok(path)
        })
        .collect()
}
