//! Random instance generation with a feasibility witness by construction.
//!
//! Coefficients follow the benchmark family: `c ~ randint[-10, 1]`,
//! `A ~ randint[1, 10]` at density `rho`, and `b = A xi + eps` with
//! `xi, eps ~ randint[1, 10]`, so the integral point `xi` always satisfies
//! `A xi <= b` strictly. All variables are integer with bounds `[0, inf)`.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::milp::{MilpInstance, SparseTriplets};

/// Seed offset separating the on-the-fly training stream from pre-generated
/// dataset seeds (`seed + index`). Datasets stay well below this offset.
pub const STREAM_SEED_OFFSET: u64 = 1 << 32;

fn default_c_range() -> (i64, i64) {
    (-10, 1)
}
fn default_coef_range() -> (i64, i64) {
    (1, 10)
}

/// Generation parameters. Ranges are inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    /// Fraction of nonzeros in `A`.
    pub density: f64,
    pub seed: u64,
    #[serde(default = "default_c_range")]
    pub c_range: (i64, i64),
    #[serde(default = "default_coef_range")]
    pub a_range: (i64, i64),
    #[serde(default = "default_coef_range")]
    pub xi_range: (i64, i64),
    #[serde(default = "default_coef_range")]
    pub eps_range: (i64, i64),
}

impl GenConfig {
    pub fn new(n: usize, m: usize, density: f64, seed: u64) -> Self {
        GenConfig {
            n,
            m,
            density,
            seed,
            c_range: default_c_range(),
            a_range: default_coef_range(),
            xi_range: default_coef_range(),
            eps_range: default_coef_range(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::validation("n and m must be >= 1"));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::validation("density must be in (0, 1]"));
        }
        for (lo, hi) in [self.c_range, self.a_range, self.xi_range, self.eps_range] {
            if lo > hi {
                return Err(Error::validation("range endpoints crossed"));
            }
        }
        Ok(())
    }

    /// Family label, e.g. `d9x18`.
    pub fn family(&self) -> String {
        format!("d{}x{}", self.n, self.m)
    }
}

/// Generate one instance; a pure function of `(cfg, cfg.seed)`.
pub fn generate(cfg: &GenConfig) -> Result<MilpInstance> {
    cfg.validate()?;
    let (inst, _witness) = generate_with_witness(cfg)?;
    Ok(inst)
}

/// Like [`generate`], also returning the feasible witness `xi`.
pub fn generate_with_witness(cfg: &GenConfig) -> Result<(MilpInstance, Vec<i64>)> {
    cfg.validate()?;
    let n = cfg.n;
    let m = cfg.m;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Draw order is part of the determinism contract:
    // cells, row repair, column repair, A values, c, xi, eps.
    let target_nnz = ((cfg.density * (n * m) as f64).round() as usize).max(1);
    let target_nnz = target_nnz.min(n * m);
    let mut cells: Vec<(usize, usize)> = rand::seq::index::sample(&mut rng, n * m, target_nnz)
        .into_iter()
        .map(|flat| (flat / n, flat % n))
        .collect();

    // Structural repair: every row and every column must carry a nonzero,
    // otherwise small instances get empty columns and unbounded objectives.
    let mut row_used = vec![false; m];
    let mut col_used = vec![false; n];
    for &(r, c) in &cells {
        row_used[r] = true;
        col_used[c] = true;
    }
    for r in 0..m {
        if !row_used[r] {
            let c = rng.gen_range(0..n);
            cells.push((r, c));
            col_used[c] = true;
        }
    }
    for c in 0..n {
        if !col_used[c] {
            let r = rng.gen_range(0..m);
            cells.push((r, c));
        }
    }

    cells.sort_unstable();
    let vals: Vec<f64> = (0..cells.len())
        .map(|_| rng.gen_range(cfg.a_range.0..=cfg.a_range.1) as f64)
        .collect();
    let c: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(cfg.c_range.0..=cfg.c_range.1) as f64)
        .collect();
    let xi: Vec<i64> = (0..n)
        .map(|_| rng.gen_range(cfg.xi_range.0..=cfg.xi_range.1))
        .collect();
    let eps: Vec<i64> = (0..m)
        .map(|_| rng.gen_range(cfg.eps_range.0..=cfg.eps_range.1))
        .collect();

    let mut b = vec![0.0; m];
    for (&(r, col), &v) in cells.iter().zip(&vals) {
        b[r] += v * xi[col] as f64;
    }
    for (bj, &e) in b.iter_mut().zip(&eps) {
        *bj += e as f64;
    }

    let a = SparseTriplets {
        rows: cells.iter().map(|&(r, _)| r).collect(),
        cols: cells.iter().map(|&(_, c)| c).collect(),
        vals,
    };
    let name = format!("{}_s{}", cfg.family(), cfg.seed);
    let inst = MilpInstance::new(
        name,
        Some(cfg.seed),
        n,
        m,
        c,
        a,
        b,
        vec![0.0; n],
        vec![f64::INFINITY; n],
        vec![true; n],
    )?;
    Ok((inst, xi))
}

/// One manifest row per written instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub witness: Vec<i64>,
}

/// Dataset manifest: the generating config plus the file listing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: GenConfig,
    pub instances: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&s)?)
    }

    /// Load every instance listed in the manifest, relative to `dir`.
    pub fn load_instances(&self, dir: impl AsRef<Path>) -> Result<Vec<MilpInstance>> {
        self.instances
            .iter()
            .map(|e| MilpInstance::read_json(dir.as_ref().join(&e.file)))
            .collect()
    }
}

/// Write `count` instances (seeds `cfg.seed + 0 .. cfg.seed + count - 1`)
/// plus `manifest.json` into `out_dir`. Re-running with the same config
/// produces identical bytes.
pub fn generate_dataset(cfg: &GenConfig, count: usize, out_dir: impl AsRef<Path>) -> Result<Manifest> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;

    let mut entries = Vec::with_capacity(count);
    for i in 0..count {
        let mut sub = cfg.clone();
        sub.seed = cfg.seed + i as u64;
        let (inst, witness) = generate_with_witness(&sub)?;
        let file = format!("{i:03}.json");
        inst.write_json(out_dir.join(&file))?;
        entries.push(ManifestEntry {
            file,
            seed: sub.seed,
            witness,
        });
    }
    let manifest = Manifest {
        config: cfg.clone(),
        instances: entries,
    };
    std::fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

/// Unbounded source of fresh training instances, disjoint by construction
/// from dataset seeds (see [`STREAM_SEED_OFFSET`]).
pub struct TrainingStream {
    cfg: GenConfig,
    counter: u64,
}

impl TrainingStream {
    pub fn new(cfg: GenConfig) -> Self {
        TrainingStream { cfg, counter: 0 }
    }

    pub fn base_seed(&self) -> u64 {
        self.cfg.seed.wrapping_add(STREAM_SEED_OFFSET)
    }
}

impl Iterator for TrainingStream {
    type Item = MilpInstance;

    fn next(&mut self) -> Option<MilpInstance> {
        let mut sub = self.cfg.clone();
        sub.seed = self.base_seed().wrapping_add(self.counter);
        self.counter += 1;
        Some(generate(&sub).expect("validated config"))
    }
}

/// Convenience constructor used by the training loop.
pub fn training_stream(cfg: &GenConfig) -> TrainingStream {
    TrainingStream::new(cfg.clone())
}
