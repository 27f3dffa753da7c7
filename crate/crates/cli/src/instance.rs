use bsm_core::data::{
    gen_blobs, gen_hard_instance, gen_sbm, load_graph, load_groups, load_points, load_sets,
    BlobConfig, IdMap,
};
use bsm_core::problems::{
    build_rr_oracle, coverage_from_digraph, facility_location, BenefitMatrix, CoverageInstance,
    Digraph, RrSetOracle,
};
use bsm_core::rng::derive_seed;
use bsm_core::GroupedPopulation;

use crate::error::CliResult;
use crate::spec::{ExperimentSpec, Generator, Problem, Source};

/// Seed-derivation indices for the random pieces of an experiment.
pub(crate) const RR_STREAM: u64 = 1;
pub(crate) const MC_STREAM: u64 = 2;

/// A loaded or generated oracle, ready to be solved.
pub enum Instance {
    Coverage(CoverageInstance),
    Facility(BenefitMatrix),
    Influence {
        graph: Digraph,
        population: GroupedPopulation,
        oracle: RrSetOracle,
    },
}

/// Oracle plus naming information for output.
pub struct LoadedInstance {
    pub instance: Instance,
    /// External item names, by item index.
    pub item_names: Vec<String>,
    /// Group labels, by group index.
    pub group_labels: Vec<String>,
}

impl LoadedInstance {
    pub fn population(&self) -> &GroupedPopulation {
        use bsm_core::GroupUtilityOracle;
        match &self.instance {
            Instance::Coverage(x) => x.population(),
            Instance::Facility(x) => x.population(),
            Instance::Influence { population, .. } => population,
        }
    }

    pub fn num_items(&self) -> usize {
        self.item_names.len()
    }
}

fn index_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn names(ids: &IdMap) -> Vec<String> {
    ids.names().to_vec()
}

fn graph_instance(
    spec: &ExperimentSpec,
    graph: Digraph,
    population: GroupedPopulation,
    item_names: Vec<String>,
    group_labels: Vec<String>,
) -> CliResult<LoadedInstance> {
    let instance = match spec.problem {
        Problem::Mc => Instance::Coverage(coverage_from_digraph(&graph, population)?),
        _ => {
            let oracle = build_rr_oracle(
                &graph,
                spec.p,
                spec.rr_samples,
                population.clone(),
                derive_seed(spec.seed, RR_STREAM),
            )?;
            Instance::Influence {
                graph,
                population,
                oracle,
            }
        }
    };
    Ok(LoadedInstance {
        instance,
        item_names,
        group_labels,
    })
}

/// Builds the instance described by `spec`.
pub fn load_instance(spec: &ExperimentSpec) -> CliResult<LoadedInstance> {
    spec.validate()?;
    match &spec.source {
        Source::Graph {
            graph,
            groups,
            directed,
        } => {
            let table = load_groups(groups)?;
            let (graph, population, ids) = load_graph(graph, *directed)?.with_groups(&table)?;
            graph_instance(spec, graph, population, names(&ids), table.labels().to_vec())
        }
        Source::Sets { sets, groups } => {
            let table = load_groups(groups)?;
            let sets = load_sets(sets)?;
            let (coverage, _) = sets.coverage(&table)?;
            Ok(LoadedInstance {
                instance: Instance::Coverage(coverage),
                item_names: names(&sets.items),
                group_labels: table.labels().to_vec(),
            })
        }
        Source::Points { points } => {
            let pts = load_points(points)?;
            let matrix = facility_location(&pts.points, &pts.points, spec.kernel, pts.population.clone())?;
            Ok(LoadedInstance {
                instance: Instance::Facility(matrix),
                item_names: names(&pts.ids),
                group_labels: pts.labels.clone(),
            })
        }
        Source::Generated(gen) => match gen {
            Generator::Sbm { .. } => {
                let cfg = gen.sbm_config(spec.seed).expect("sbm generator");
                let (graph, population) = gen_sbm(&cfg)?;
                let n = graph.num_nodes();
                let labels = index_names(population.num_groups());
                graph_instance(spec, graph, population, index_names(n), labels)
            }
            Generator::Blobs {
                counts,
                dim,
                sigma,
                half_width,
            } => {
                let cfg = BlobConfig::random_centers(counts, *dim, *sigma, *half_width, spec.seed);
                let blobs = gen_blobs(&cfg)?;
                let matrix = facility_location(&blobs.users, &blobs.items, spec.kernel, blobs.population)?;
                Ok(LoadedInstance {
                    item_names: index_names(blobs.items.len()),
                    group_labels: index_names(counts.len()),
                    instance: Instance::Facility(matrix),
                })
            }
            Generator::Hard { k, alpha, m } => {
                use bsm_core::GroupUtilityOracle;
                let matrix = gen_hard_instance(*k, *alpha, *m)?;
                Ok(LoadedInstance {
                    item_names: index_names(matrix.num_items()),
                    group_labels: index_names(matrix.num_groups()),
                    instance: Instance::Facility(matrix),
                })
            }
        },
    }
}
