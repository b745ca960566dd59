//! Staged pipeline with on-disk artifacts: ingest → train → align → rank,
//! plus baseline rankings and ranking comparison.
//!
//! Layout under the output directory:
//!
//! ```text
//! corpus/<domain>.tokens, corpus/<domain>.meta, corpus/stats.csv
//! embeddings/<domain>.vec, embeddings/<domain>.objective.csv
//! unified/target.vec, unified/transform_<domain>.mat, unified/residuals.csv, ...
//! targets.txt, ranking.csv | ranking.json
//! baseline_context_similarity.csv, baseline_nn_overlap.csv
//! disagreement_<method>.csv
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::alignment::{align_spaces, AlignmentConfig, UnifiedSpace};
use crate::baselines::{self, ContextOptions};
use crate::corpus::{self, cache, Corpus, LemmatizerMode, PreprocessConfig, Utf8Policy};
use crate::embedding::{normalize_space, train_sgns, EmbeddingSpace, TrainingConfig};
use crate::error::{Error, Result};
use crate::kv;
use crate::scoring::{self, compare_rankings, disagreements_to_csv, AmbiguityRanking, Disagreement};
use crate::selection::{select_targets, PosLexicon, SelectionConfig, TargetWordSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub domains: Vec<(String, PathBuf)>,
    pub out: PathBuf,
    pub training: TrainingConfig,
    pub alignment: AlignmentConfig,
    pub selection: SelectionConfig,
    pub stopwords_file: Option<PathBuf>,
    pub lemmatizer: LemmatizerMode,
    pub min_token_length: usize,
    pub lexicon_file: Option<PathBuf>,
    pub format: ReportFormat,
    pub neighbors: usize,
    pub exclude_target: bool,
    pub skip_non_utf8: bool,
    pub force: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            domains: Vec::new(),
            out: PathBuf::from("out"),
            training: TrainingConfig::default(),
            alignment: AlignmentConfig::default(),
            selection: SelectionConfig::default(),
            stopwords_file: None,
            lemmatizer: LemmatizerMode::RuleBased,
            min_token_length: 2,
            lexicon_file: None,
            format: ReportFormat::Csv,
            neighbors: baselines::DEFAULT_NEIGHBORS,
            exclude_target: false,
            skip_non_utf8: false,
            force: false,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("bad boolean '{value}' for '{key}'"))),
    }
}

impl PipelineConfig {
    /// Applies one `key=value` setting. Keys match the command-line flag
    /// names; domains use `domain.<id> = <path>`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('_', "-");
        if let Some(id) = key.strip_prefix("domain.") {
            return self.add_domain(id, PathBuf::from(value));
        }
        match key.as_str() {
            "dim" => self.training.dim = parse_value(&key, value)?,
            "window" => self.training.window = parse_value(&key, value)?,
            "negatives" => self.training.negatives = parse_value(&key, value)?,
            "min-freq" => self.training.min_freq = parse_value(&key, value)?,
            "epochs" => self.training.epochs = parse_value(&key, value)?,
            "lr" => self.training.initial_learning_rate = parse_value(&key, value)?,
            "noise-exponent" => self.training.noise_exponent = parse_value(&key, value)?,
            "seed" => self.training.seed = parse_value(&key, value)?,
            "workers" => self.training.workers = parse_value(&key, value)?,
            "tau" => self.alignment.tau = parse_value(&key, value)?,
            "max-iterations" => self.alignment.max_iterations = parse_value(&key, value)?,
            "k" => self.selection.k = parse_value(&key, value)?,
            "rho" => self.selection.rho = parse_value(&key, value)?,
            "out" => self.out = PathBuf::from(value),
            "format" => self.format = value.parse().map_err(Error::InvalidConfig)?,
            "stopwords" => self.stopwords_file = Some(PathBuf::from(value)),
            "lemmatizer" => self.lemmatizer = value.parse().map_err(Error::InvalidConfig)?,
            "min-token-length" => self.min_token_length = parse_value(&key, value)?,
            "lexicon" => self.lexicon_file = Some(PathBuf::from(value)),
            "neighbors" => self.neighbors = parse_value(&key, value)?,
            "exclude-target" => self.exclude_target = parse_bool(&key, value)?,
            "skip-non-utf8" => self.skip_non_utf8 = parse_bool(&key, value)?,
            "force" => self.force = parse_bool(&key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn add_domain(&mut self, id: &str, path: PathBuf) -> Result<()> {
        if id.is_empty() || !id.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::InvalidConfig(format!("bad domain id '{id}'")));
        }
        if self.domains.iter().any(|(d, _)| d == id) {
            return Err(Error::InvalidConfig(format!("duplicate domain '{id}'")));
        }
        self.domains.push((id.to_string(), path));
        Ok(())
    }

    pub fn from_kv(entries: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in entries {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_kv(&kv::read(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domains.len() < 2 {
            return Err(Error::TooFewDomains(self.domains.len()));
        }
        self.training.validate()?;
        self.alignment.validate()?;
        self.selection.validate()?;
        self.selection.check_min_freq(self.training.min_freq);
        Ok(())
    }

    pub fn domain_ids(&self) -> Vec<&str> {
        self.domains.iter().map(|(d, _)| d.as_str()).collect()
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.out.join("corpus")
    }

    pub fn embeddings_dir(&self) -> PathBuf {
        self.out.join("embeddings")
    }

    pub fn unified_dir(&self) -> PathBuf {
        self.out.join("unified")
    }

    pub fn embedding_path(&self, domain: &str) -> PathBuf {
        self.embeddings_dir().join(format!("{domain}.vec"))
    }

    pub fn ranking_path(&self) -> PathBuf {
        self.out.join(match self.format {
            ReportFormat::Csv => "ranking.csv",
            ReportFormat::Json => "ranking.json",
        })
    }

    pub fn baseline_path(&self, method: &str) -> PathBuf {
        self.out.join(format!("baseline_{method}.csv"))
    }

    pub fn preprocess_config(&self) -> Result<PreprocessConfig> {
        let stopwords = match &self.stopwords_file {
            Some(p) => corpus::read_stopwords(p)?,
            None => corpus::default_stopwords(),
        };
        let cfg = PreprocessConfig {
            stopwords,
            lemmatizer: self.lemmatizer,
            min_token_length: self.min_token_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn lexicon(&self) -> Result<PosLexicon> {
        match &self.lexicon_file {
            Some(p) => PosLexicon::read(p),
            None => Ok(PosLexicon::bundled()),
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Hash of every input document plus the preprocessing settings.
fn input_hash(raw: &corpus::RawCorpus, config: &PreprocessConfig) -> String {
    let mut h = Sha256::new();
    for d in &raw.documents {
        h.update(d.doc_id.as_bytes());
        h.update([0]);
        h.update(d.text.as_bytes());
        h.update([0]);
    }
    for w in &config.stopwords {
        h.update(w.as_bytes());
        h.update([1]);
    }
    h.update(config.lemmatizer.to_string().as_bytes());
    h.update(config.min_token_length.to_le_bytes());
    hex(&h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainStats {
    pub domain_id: String,
    pub documents: usize,
    pub tokens: usize,
    pub vocabulary: usize,
    pub reused_cache: bool,
}

pub fn stats_to_csv(stats: &[DomainStats]) -> String {
    let mut s = String::from("domain,documents,tokens,vocabulary\n");
    for d in stats {
        let _ = writeln!(s, "{},{},{},{}", d.domain_id, d.documents, d.tokens, d.vocabulary);
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Preprocesses every domain corpus into the cache directory. A domain
/// whose inputs and settings hash to the cached value is skipped unless
/// `force` is set.
pub fn cmd_ingest(config: &PipelineConfig) -> Result<Vec<DomainStats>> {
    config.validate()?;
    let pre = config.preprocess_config()?;
    let dir = config.corpus_dir();
    let policy = if config.skip_non_utf8 {
        Utf8Policy::SkipWithWarning
    } else {
        Utf8Policy::Error
    };
    let stats = config
        .domains
        .par_iter()
        .map(|(id, path)| -> Result<DomainStats> {
            let raw = corpus::ingest_corpus_with(path, id, policy).map_err(|e| e.in_domain(id))?;
            let hash = input_hash(&raw, &pre);
            if !config.force {
                if let Ok(meta) = cache::read_meta(&dir, id) {
                    if meta.get("input_hash") == Some(&hash) && cache::tokens_path(&dir, id).exists() {
                        log::info!("{id}: inputs unchanged, reusing cache");
                        let parse = |k: &str| meta.get(k).and_then(|v| v.parse().ok()).unwrap_or(0);
                        return Ok(DomainStats {
                            domain_id: id.clone(),
                            documents: parse("documents"),
                            tokens: parse("total_tokens"),
                            vocabulary: parse("vocabulary"),
                            reused_cache: true,
                        });
                    }
                }
            }
            let corpus = corpus::preprocess(&raw, &pre)?;
            let extra = BTreeMap::from([
                ("input_hash".to_string(), hash),
                ("vocabulary".to_string(), corpus.vocab_size().to_string()),
            ]);
            cache::write_cache(&corpus, &dir, &extra)?;
            Ok(DomainStats {
                domain_id: id.clone(),
                documents: corpus.num_documents(),
                tokens: corpus.total_tokens(),
                vocabulary: corpus.vocab_size(),
                reused_cache: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_file(&dir.join("stats.csv"), &stats_to_csv(&stats))?;
    Ok(stats)
}

pub fn load_corpora(config: &PipelineConfig) -> Result<Vec<Corpus>> {
    let dir = config.corpus_dir();
    config
        .domains
        .iter()
        .map(|(id, _)| {
            if !cache::tokens_path(&dir, id).exists() {
                return Err(Error::InvalidConfig(format!(
                    "missing corpus cache for domain '{id}' in {}; run ingest first",
                    dir.display()
                )));
            }
            cache::read_cache(&dir, id)
        })
        .collect()
}

/// Trains and normalizes one embedding space per domain. Domains train in
/// parallel; each run is deterministic when `workers == 1`.
pub fn cmd_train(config: &PipelineConfig) -> Result<Vec<EmbeddingSpace>> {
    config.validate()?;
    let corpora = load_corpora(config)?;
    let spaces = corpora
        .par_iter()
        .map(|c| -> Result<EmbeddingSpace> {
            let id = c.domain_id();
            let trained = train_sgns(c, &config.training).map_err(|e| e.in_domain(id))?;
            let space = normalize_space(&trained.space).map_err(|e| e.in_domain(id))?;
            space.write(&config.embedding_path(id))?;
            let mut log_csv = String::from("epoch,objective\n");
            for (i, o) in trained.epoch_objective.iter().enumerate() {
                let _ = writeln!(log_csv, "{},{o}", i + 1);
            }
            write_file(&config.embeddings_dir().join(format!("{id}.objective.csv")), &log_csv)?;
            Ok(space)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(spaces)
}

pub fn load_spaces(config: &PipelineConfig) -> Result<Vec<EmbeddingSpace>> {
    config
        .domain_ids()
        .into_iter()
        .map(|id| {
            let p = config.embedding_path(id);
            if !p.exists() {
                return Err(Error::InvalidConfig(format!(
                    "missing embeddings for domain '{id}' at {}; run train first",
                    p.display()
                )));
            }
            EmbeddingSpace::read(&p, id)
        })
        .collect()
}

pub fn cmd_align(config: &PipelineConfig) -> Result<UnifiedSpace> {
    config.validate()?;
    let spaces = load_spaces(config)?;
    let unified = align_spaces(&spaces, &config.alignment)?;
    unified.write(&config.unified_dir())?;
    Ok(unified)
}

fn select(config: &PipelineConfig, corpora: &[Corpus]) -> Result<TargetWordSet> {
    let counts: Vec<&BTreeMap<String, usize>> = corpora.iter().map(Corpus::counts).collect();
    let targets = select_targets(&counts, &config.selection, &config.lexicon()?)?;
    write_file(&config.out.join("targets.txt"), &targets.to_text())?;
    if targets.is_empty() {
        return Err(Error::NoTargetWords);
    }
    Ok(targets)
}

fn write_ranking(ranking: &AmbiguityRanking, path: &Path, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Csv => write_file(path, &ranking.to_csv()),
        ReportFormat::Json => write_file(path, &ranking.to_json()?),
    }
}

/// Selects target words, scores them and writes the ranking report.
pub fn cmd_rank(config: &PipelineConfig) -> Result<AmbiguityRanking> {
    config.validate()?;
    let corpora = load_corpora(config)?;
    let spaces = load_spaces(config)?;
    let unified = UnifiedSpace::read(&config.unified_dir())?;
    if !unified.converged {
        log::warn!("unified space is flagged as not converged");
    }
    let targets = select(config, &corpora)?;
    let counts: Vec<&BTreeMap<String, usize>> = corpora.iter().map(Corpus::counts).collect();
    let ranking = scoring::rank_targets(&targets, &unified, &spaces, &counts)?;
    write_ranking(&ranking, &config.ranking_path(), config.format)?;
    Ok(ranking)
}

#[derive(Debug, Clone)]
pub struct BaselineRankings {
    pub context_similarity: AmbiguityRanking,
    pub nn_overlap: AmbiguityRanking,
}

/// Ranks the same target words with both local-context baselines.
pub fn cmd_baseline(config: &PipelineConfig) -> Result<BaselineRankings> {
    config.validate()?;
    let corpora = load_corpora(config)?;
    let spaces = load_spaces(config)?;
    let unified = UnifiedSpace::read(&config.unified_dir())?;
    let targets = select(config, &corpora)?;
    let counts: Vec<&BTreeMap<String, usize>> = corpora.iter().map(Corpus::counts).collect();
    let options = ContextOptions {
        exclude_target: config.exclude_target,
    };
    let context_similarity = baselines::rank_context_similarity(&targets, &corpora, &unified.target, options)?;
    let nn_overlap = baselines::rank_nn_overlap(&targets, &spaces, &counts, config.neighbors)?;
    for r in [&context_similarity, &nn_overlap] {
        write_file(&config.baseline_path(&r.method), &r.to_csv())?;
        if config.format == ReportFormat::Json {
            write_file(&config.out.join(format!("baseline_{}.json", r.method)), &r.to_json()?)?;
        }
    }
    Ok(BaselineRankings {
        context_similarity,
        nn_overlap,
    })
}

pub fn read_ranking(path: &Path) -> Result<AmbiguityRanking> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let method = path
        .file_stem()
        .map(|s| s.to_string_lossy().trim_start_matches("baseline_").to_string())
        .unwrap_or_default();
    if path.extension().is_some_and(|e| e == "json") {
        AmbiguityRanking::from_json(&text)
    } else {
        AmbiguityRanking::from_csv(&method, &text)
    }
}

/// Compares two ranking files and writes the disagreement table to `out`.
pub fn cmd_compare(a: &Path, b: &Path, top_m: usize, out: &Path) -> Result<Vec<Disagreement>> {
    let ra = read_ranking(a)?;
    let rb = read_ranking(b)?;
    let rows = compare_rankings(&ra, &rb, top_m)?;
    write_file(out, &disagreements_to_csv(&rows))?;
    Ok(rows)
}

/// Runs ingest, train, align and rank in sequence.
pub fn run_all(config: &PipelineConfig) -> Result<AmbiguityRanking> {
    cmd_ingest(config)?;
    cmd_train(config)?;
    cmd_align(config)?;
    cmd_rank(config)
}
