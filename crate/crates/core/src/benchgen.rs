//! Seeded random DBPM instances with a planted domain structure.
//!
//! A random summary `H` on `m_star` vertices is blown up to `n` entities
//! by a balanced assignment, then a fixed fraction of all cells is turned
//! into Stars. Every random draw comes from a ChaCha stream keyed by the
//! seed, so instances are identical across runs and platforms.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::matrix::{Cell, PartialMatrix};
use crate::policy::DomainPolicy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub m_star: usize,
    pub n: usize,
    pub k: usize,
    pub edge_prob: f64,
    pub star_frac: f64,
}

impl GenParams {
    /// One right, edge probability 0.5, 10% Stars.
    pub fn new(m_star: usize, n: usize) -> Self {
        GenParams { m_star, n, k: 1, edge_prob: 0.5, star_frac: 0.10 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_star == 0 || self.m_star > self.n {
            return Err(Error::Config(format!("need 1 <= m_star <= n, got m_star={} n={}", self.m_star, self.n)));
        }
        if self.k == 0 {
            return Err(Error::Config("need at least one access right".into()));
        }
        for (name, p) in [("edge_prob", self.edge_prob), ("star_frac", self.star_frac)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    /// Number of cells turned into Stars.
    pub fn star_cells(&self) -> usize {
        let total = self.n * self.k * self.n;
        ((self.star_frac * total as f64 + 1e-9).floor() as usize).min(total)
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub psm: PartialMatrix,
    /// The planted summary.
    pub h: Digraph,
    /// Upper bound on the optimum: the planted domain count.
    pub class_count_upper: usize,
}

pub fn generate(params: &GenParams, seed: u64) -> Result<Generated> {
    params.validate()?;
    let GenParams { m_star, n, k, edge_prob, .. } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut h = Digraph::empty(m_star, k)?;
    for p in 0..m_star {
        for a in 0..k {
            for q in 0..m_star {
                h.set(p, a, q, rng.gen_bool(edge_prob));
            }
        }
    }

    let mut assignment: Vec<usize> = (0..n).map(|i| i % m_star).collect();
    assignment.shuffle(&mut rng);
    let mut g = Digraph::empty(n, k)?;
    for u in 0..n {
        for a in 0..k {
            for v in 0..n {
                if h.has_edge(assignment[u], a, assignment[v]) {
                    g.set(u, a, v, true);
                }
            }
        }
    }
    let planted = DomainPolicy::new(h.clone(), assignment)?;
    if !planted.enforces(&g)? {
        return Err(Error::Integrity("generated digraph does not follow the planted policy".into()));
    }

    let mut psm = PartialMatrix::from_digraph(&g);
    let total = n * k * n;
    for cell in rand::seq::index::sample(&mut rng, total, params.star_cells()) {
        let (u, a, v) = psm.triple(cell);
        psm.set(u, a, v, Cell::Star);
    }
    Ok(Generated { psm, h, class_count_upper: m_star })
}

/// Seed of one suite instance, mixed from the suite seed and its grid
/// coordinates.
pub fn derive_seed(seed: u64, m_star: usize, n: usize, replicate: usize) -> u64 {
    let mut x = seed;
    for part in [m_star as u64, n as u64, replicate as u64] {
        x = splitmix64(x ^ splitmix64(part));
    }
    x
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub name: String,
    pub m_star: usize,
    pub n: usize,
    pub seed: u64,
    /// Class budget handed to the solver: twice the planted count.
    pub m: usize,
    pub generated: Generated,
}

/// The grid `m_stars × ns × per_cell`, in that nesting order.
pub fn suite(m_stars: &[usize], ns: &[usize], per_cell: usize, seed: u64) -> Result<Vec<SuiteInstance>> {
    let mut out = Vec::with_capacity(m_stars.len() * ns.len() * per_cell);
    for &m_star in m_stars {
        for &n in ns {
            for rep in 0..per_cell {
                let s = derive_seed(seed, m_star, n, rep);
                let generated = generate(&GenParams::new(m_star, n), s)?;
                out.push(SuiteInstance {
                    name: format!("m{m_star}_n{n}_r{rep}"),
                    m_star,
                    n,
                    seed: s,
                    m: 2 * m_star,
                    generated,
                });
            }
        }
    }
    Ok(out)
}

/// One manifest row. `path` is relative to the manifest's directory
/// unless absolute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub instance: String,
    pub path: String,
    pub m_star: usize,
    pub n: usize,
    pub seed: u64,
    pub m: usize,
}

impl ManifestEntry {
    pub fn resolve(&self, manifest: &Path) -> PathBuf {
        let p = Path::new(&self.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            manifest.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}

/// Writes every instance as `<dir>/<name>.psm` plus `<dir>/manifest.csv`,
/// returning the manifest path.
pub fn write_suite(instances: &[SuiteInstance], dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let entries: Vec<ManifestEntry> = instances
        .iter()
        .map(|inst| {
            let file = format!("{}.psm", inst.name);
            inst.generated.psm.write(dir.join(&file))?;
            Ok(ManifestEntry {
                instance: inst.name.clone(),
                path: file,
                m_star: inst.m_star,
                n: inst.n,
                seed: inst.seed,
                m: inst.m,
            })
        })
        .collect::<Result<_>>()?;
    let path = dir.join("manifest.csv");
    write_manifest(&entries, &path)?;
    Ok(path)
}

pub fn write_manifest(entries: &[ManifestEntry], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for e in entries {
        w.serialize(e).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::parse(&origin, i + 2, e.to_string())))
        .collect()
}
