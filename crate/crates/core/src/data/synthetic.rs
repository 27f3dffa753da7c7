use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::population::GroupedPopulation;
use crate::problems::{BenefitMatrix, Digraph};
use crate::rng;

/// Stochastic block model with contiguous group blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmConfig {
    pub n: usize,
    pub proportions: Vec<f64>,
    pub p_intra: f64,
    pub p_inter: f64,
    pub directed: bool,
    pub seed: u64,
}

impl SbmConfig {
    pub fn new(n: usize, proportions: Vec<f64>, p_intra: f64, p_inter: f64) -> Self {
        Self {
            n,
            proportions,
            p_intra,
            p_inter,
            directed: false,
            seed: 0,
        }
    }

    pub fn directed(mut self, directed: bool) -> Self {
        self.directed = directed;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Group sizes: `floor(prop * n)` each, remainder added to the last group.
    pub fn group_sizes(&self) -> Result<Vec<usize>> {
        if self.n == 0 {
            return Err(Error::param("SBM needs n >= 1"));
        }
        if self.proportions.is_empty()
            || self.proportions.iter().any(|&p| !(p.is_finite() && p > 0.0))
        {
            return Err(Error::param("SBM proportions must be positive"));
        }
        let total: f64 = self.proportions.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::param(format!(
                "SBM proportions sum to {total}, expected 1"
            )));
        }
        for (name, p) in [("p_intra", self.p_intra), ("p_inter", self.p_inter)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("{name} = {p} outside [0, 1]")));
            }
        }
        let mut sizes: Vec<usize> = self
            .proportions
            .iter()
            .map(|&p| (p * self.n as f64).floor() as usize)
            .collect();
        let assigned: usize = sizes.iter().sum();
        *sizes.last_mut().unwrap() += self.n - assigned.min(self.n);
        if sizes.contains(&0) {
            return Err(Error::param(format!(
                "SBM with n = {} leaves a group empty (sizes {sizes:?})",
                self.n
            )));
        }
        Ok(sizes)
    }
}

/// Samples an SBM graph. Undirected pairs are stored as two arcs.
pub fn gen_sbm(cfg: &SbmConfig) -> Result<(Digraph, GroupedPopulation)> {
    let sizes = cfg.group_sizes()?;
    let population = GroupedPopulation::from_sizes(&sizes)?;
    let group = population.groups();
    let mut rng = rng::stream(cfg.seed, 0);
    let n = cfg.n;
    let mut pairs = Vec::new();
    let p = |a: usize, b: usize| {
        if group[a] == group[b] {
            cfg.p_intra
        } else {
            cfg.p_inter
        }
    };
    for a in 0..n {
        let start = if cfg.directed { 0 } else { a + 1 };
        for b in start..n {
            if a != b && rng.random_bool(p(a, b)) {
                pairs.push((a, b));
            }
        }
    }
    let graph = if cfg.directed {
        Digraph::new(n, pairs)?
    } else {
        Digraph::undirected(n, &pairs)?
    };
    Ok((graph, population))
}

/// One isotropic Gaussian blob.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobGroup {
    pub count: usize,
    pub center: Vec<f64>,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobConfig {
    pub groups: Vec<BlobGroup>,
    /// Separate item blobs; when absent the users double as items.
    pub item_groups: Option<Vec<BlobGroup>>,
    pub seed: u64,
}

impl BlobConfig {
    pub fn new(groups: Vec<BlobGroup>, seed: u64) -> Self {
        Self {
            groups,
            item_groups: None,
            seed,
        }
    }

    /// Blobs with the given counts and centers drawn uniformly from
    /// `[-half_width, half_width]^dim`.
    pub fn random_centers(
        counts: &[usize],
        dim: usize,
        sigma: f64,
        half_width: f64,
        seed: u64,
    ) -> Self {
        let mut rng = rng::stream(seed, 1);
        let groups = counts
            .iter()
            .map(|&count| BlobGroup {
                count,
                center: (0..dim)
                    .map(|_| rng.random_range(-half_width..=half_width))
                    .collect(),
                sigma,
            })
            .collect();
        Self::new(groups, seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blobs {
    pub users: Vec<Vec<f64>>,
    pub items: Vec<Vec<f64>>,
    pub population: GroupedPopulation,
}

fn check_blobs(groups: &[BlobGroup]) -> Result<usize> {
    let dim = groups
        .first()
        .ok_or_else(|| Error::param("blob config has no groups"))?
        .center
        .len();
    for (i, g) in groups.iter().enumerate() {
        if g.count == 0 {
            return Err(Error::param(format!("blob {i} has count 0")));
        }
        if !(g.sigma.is_finite() && g.sigma > 0.0) {
            return Err(Error::param(format!("blob {i} has sigma = {}", g.sigma)));
        }
        if g.center.len() != dim {
            return Err(Error::param(format!(
                "blob {i} center has dimension {}, expected {dim}",
                g.center.len()
            )));
        }
    }
    Ok(dim)
}

fn sample_blobs(groups: &[BlobGroup], rng: &mut rng::StreamRng) -> Vec<Vec<f64>> {
    let mut points = Vec::new();
    for g in groups {
        let normal = Normal::new(0.0, g.sigma).expect("sigma checked");
        for _ in 0..g.count {
            points.push(g.center.iter().map(|c| c + normal.sample(rng)).collect());
        }
    }
    points
}

/// Samples user points (and item points) from the configured blobs.
pub fn gen_blobs(cfg: &BlobConfig) -> Result<Blobs> {
    let dim = check_blobs(&cfg.groups)?;
    if let Some(items) = &cfg.item_groups {
        if check_blobs(items)? != dim {
            return Err(Error::param("item blobs differ in dimension from user blobs"));
        }
    }
    let sizes: Vec<usize> = cfg.groups.iter().map(|g| g.count).collect();
    let population = GroupedPopulation::from_sizes(&sizes)?;
    let mut rng = rng::stream(cfg.seed, 0);
    let users = sample_blobs(&cfg.groups, &mut rng);
    let items = match &cfg.item_groups {
        Some(groups) => sample_blobs(groups, &mut rng),
        None => users.clone(),
    };
    Ok(Blobs {
        users,
        items,
        population,
    })
}

/// Adversarial instance with `k` blocks of `m_per_block` users and two items
/// each. In block `b`, user 0 forms its own group and gets `alpha (m-1)/m`
/// from item `2b` only; the other users (pooled into group `k` across blocks)
/// get `alpha (m-1)/m` from item `2b` and 1 from item `2b+1`.
pub fn gen_hard_instance(k: usize, alpha: f64, m_per_block: usize) -> Result<BenefitMatrix> {
    if k == 0 {
        return Err(Error::param("hard instance needs k >= 1"));
    }
    if m_per_block < 2 {
        return Err(Error::param("hard instance needs m_per_block >= 2"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha = {alpha} outside (0, 1)")));
    }
    let m = m_per_block;
    let group_of = (0..k * m)
        .map(|u| if u % m == 0 { u / m } else { k })
        .collect();
    let population = GroupedPopulation::new(group_of)?;
    let low = alpha * (m - 1) as f64 / m as f64;
    BenefitMatrix::from_fn(population, 2 * k, |u, v| {
        let (block, first) = (u / m, u % m == 0);
        match (v / 2 == block, v % 2, first) {
            (false, _, _) => 0.0,
            (true, 0, _) => low,
            (true, _, true) => 0.0,
            (true, _, false) => 1.0,
        }
    })
}
