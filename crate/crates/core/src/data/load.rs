use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::population::GroupedPopulation;
use crate::problems::{CoverageInstance, Digraph};

/// Dense remapping of string IDs, in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_insert(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Yields `(line number, fields)` for each non-blank, non-comment line.
/// Fields are tab separated when the line has a tab, whitespace otherwise.
fn for_each_record(
    path: &Path,
    mut f: impl FnMut(usize, Vec<&str>) -> Result<()>,
) -> Result<()> {
    let reader = BufReader::new(open(path)?);
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(path, lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if trimmed.contains('\t') {
            trimmed.split('\t').map(str::trim).collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        f(lineno, fields)?;
    }
    Ok(())
}

fn two_fields<'a>(path: &Path, lineno: usize, fields: &[&'a str], what: &str) -> Result<(&'a str, &'a str)> {
    match fields {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a, b)),
        _ => Err(parse_err(
            path,
            lineno,
            format!("expected `{what}`, found {} field(s)", fields.len()),
        )),
    }
}

/// Edge list with its ID table.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Digraph,
    pub ids: IdMap,
    pub directed: bool,
}

impl LoadedGraph {
    /// Attaches groups. Every graph node must have a group; nodes that only
    /// appear in the groups file are appended as isolated nodes.
    pub fn with_groups(self, groups: &GroupTable) -> Result<(Digraph, GroupedPopulation, IdMap)> {
        let mut ids = self.ids;
        if let Some(missing) = ids.names().iter().find(|id| groups.group_of(id).is_none()) {
            return Err(Error::InvalidPopulation(format!(
                "node `{missing}` is missing from {}",
                groups.path.display()
            )));
        }
        for (id, _) in &groups.entries {
            ids.get_or_insert(id);
        }
        let graph = if ids.len() == self.graph.num_nodes() {
            self.graph
        } else {
            let g = Digraph::new(ids.len(), self.graph.edges().to_vec())?;
            match self.graph.probability() {
                Some(p) => g.with_probability(p)?,
                None => g,
            }
        };
        let population = groups.population_for(&ids)?;
        Ok((graph, population, ids))
    }
}

/// Reads `src dst` lines. Undirected edges are stored as two arcs.
pub fn load_graph(path: impl AsRef<Path>, directed: bool) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let mut ids = IdMap::new();
    let mut pairs = Vec::new();
    for_each_record(path, |lineno, fields| {
        let (a, b) = two_fields(path, lineno, &fields, "src<TAB>dst")?;
        pairs.push((ids.get_or_insert(a), ids.get_or_insert(b)));
        Ok(())
    })?;
    let graph = if directed {
        Digraph::new(ids.len(), pairs)?
    } else {
        Digraph::undirected(ids.len(), &pairs)?
    };
    Ok(LoadedGraph {
        graph,
        ids,
        directed,
    })
}

/// `id -> group label` assignments; labels are numbered by first appearance.
#[derive(Debug, Clone)]
pub struct GroupTable {
    path: PathBuf,
    entries: Vec<(String, usize)>,
    lookup: HashMap<String, usize>,
    labels: Vec<String>,
}

impl GroupTable {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_groups(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn group_of(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    /// Population over `ids` in index order. Every id needs a group and every
    /// group needs a member among `ids`.
    pub fn population_for(&self, ids: &IdMap) -> Result<GroupedPopulation> {
        let group_of = ids
            .names()
            .iter()
            .map(|id| {
                self.group_of(id).ok_or_else(|| {
                    Error::InvalidPopulation(format!(
                        "`{id}` is missing from {}",
                        self.path.display()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GroupedPopulation::new(group_of)
    }
}

/// Reads `id group_label` lines.
pub fn load_groups(path: impl AsRef<Path>) -> Result<GroupTable> {
    let path = path.as_ref();
    let mut labels = IdMap::new();
    let mut entries = Vec::new();
    let mut lookup = HashMap::new();
    for_each_record(path, |lineno, fields| {
        let (id, label) = two_fields(path, lineno, &fields, "id<TAB>group")?;
        let g = labels.get_or_insert(label);
        if lookup.insert(id.to_string(), g).is_some() {
            return Err(parse_err(path, lineno, format!("duplicate id `{id}`")));
        }
        entries.push((id.to_string(), g));
        Ok(())
    })?;
    if entries.is_empty() {
        return Err(parse_err(path, 0, "no group assignments"));
    }
    Ok(GroupTable {
        path: path.to_path_buf(),
        entries,
        lookup,
        labels: labels.names().to_vec(),
    })
}

/// Labelled points read from `id,group,x1,...,xd` CSV.
#[derive(Debug, Clone)]
pub struct PointSet {
    pub ids: IdMap,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub population: GroupedPopulation,
}

impl PointSet {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

/// Reads a points CSV. A first row whose coordinates do not parse as
/// numbers is treated as a header.
pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut ids = IdMap::new();
    let mut labels = IdMap::new();
    let mut points = Vec::new();
    let mut group_of = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let lineno = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() < 3 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected `id,group,x1..xd`, found {} field(s)", record.len()),
            ));
        }
        let coords: std::result::Result<Vec<f64>, _> =
            record.iter().skip(2).map(str::parse::<f64>).collect();
        let coords = match coords {
            Ok(c) => c,
            Err(_) if idx == 0 => continue,
            Err(e) => return Err(parse_err(path, lineno, format!("bad coordinate: {e}"))),
        };
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(path, lineno, "non-finite coordinate"));
        }
        if let Some(first) = points.first() {
            let first: &Vec<f64> = first;
            if first.len() != coords.len() {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("dimension {} differs from {}", coords.len(), first.len()),
                ));
            }
        }
        let id = &record[0];
        if ids.get(id).is_some() {
            return Err(parse_err(path, lineno, format!("duplicate id `{id}`")));
        }
        ids.get_or_insert(id);
        group_of.push(labels.get_or_insert(&record[1]));
        points.push(coords);
    }
    if points.is_empty() {
        return Err(parse_err(path, 0, "no points"));
    }
    Ok(PointSet {
        ids,
        points,
        labels: labels.names().to_vec(),
        population: GroupedPopulation::new(group_of)?,
    })
}

/// Set system read from `item user` lines (one covered user per line).
#[derive(Debug, Clone)]
pub struct SetTable {
    pub items: IdMap,
    pub users: IdMap,
    pub pairs: Vec<(usize, usize)>,
}

impl SetTable {
    /// Coverage instance over the users of `groups`; users listed only in
    /// the groups file are covered by nothing.
    pub fn coverage(&self, groups: &GroupTable) -> Result<(CoverageInstance, IdMap)> {
        let mut users = self.users.clone();
        for (id, _) in &groups.entries {
            users.get_or_insert(id);
        }
        let population = groups.population_for(&users)?;
        let mut sets = vec![Vec::new(); self.items.len()];
        for &(item, user) in &self.pairs {
            sets[item].push(user);
        }
        Ok((CoverageInstance::new(sets, population)?, users))
    }
}

pub fn load_sets(path: impl AsRef<Path>) -> Result<SetTable> {
    let path = path.as_ref();
    let mut items = IdMap::new();
    let mut users = IdMap::new();
    let mut pairs = Vec::new();
    for_each_record(path, |lineno, fields| {
        let (item, user) = two_fields(path, lineno, &fields, "item<TAB>user")?;
        pairs.push((items.get_or_insert(item), users.get_or_insert(user)));
        Ok(())
    })?;
    if items.is_empty() {
        return Err(parse_err(path, 0, "no item-user pairs"));
    }
    Ok(SetTable { items, users, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp(name: &str, body: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("bsm-load-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn graph_with_string_ids() {
        let p = temp("g.txt", "# comment\na b\nb\tc\n");
        let g = load_graph(&p, true).unwrap();
        assert_eq!(g.graph.num_nodes(), 3);
        assert_eq!(g.graph.num_edges(), 2);
        assert_eq!(g.ids.name(2), "c");
        assert_eq!(load_graph(&p, false).unwrap().graph.num_edges(), 4);
    }

    #[test]
    fn malformed_line_reports_number() {
        let p = temp("bad.txt", "a b\n\nb c d\n");
        match load_graph(&p, true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn groups_align_with_graph() {
        let g = temp("g2.txt", "a b\nb c\n");
        let grp = temp("grp.txt", "a\tF\nb\tM\nc\tF\nd\tM\n");
        let table = load_groups(&grp).unwrap();
        assert_eq!(table.labels(), &["F", "M"]);
        let (graph, pop, ids) = load_graph(&g, true).unwrap().with_groups(&table).unwrap();
        assert_eq!(graph.num_nodes(), 4);
        assert_eq!(pop.group_sizes(), &[2, 2]);
        assert_eq!(ids.get("d"), Some(3));

        let partial = load_groups(temp("grp2.txt", "a F\nb M\n")).unwrap();
        assert!(load_graph(&g, true).unwrap().with_groups(&partial).is_err());
        let dup = load_groups(temp("grp3.txt", "a F\na M\n"));
        assert!(matches!(dup, Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn points_with_header() {
        let p = temp("pts.csv", "id,group,x1,x2\np1,A,0.5,1\np2,B,1,2\np3,A,-1,0\n");
        let pts = load_points(&p).unwrap();
        assert_eq!(pts.dim(), 2);
        assert_eq!(pts.population.group_sizes(), &[2, 1]);
        assert_eq!(pts.points[2], vec![-1.0, 0.0]);
        let bad = temp("pts2.csv", "p1,A,0.5,1\np2,B,x,2\n");
        assert!(matches!(load_points(&bad), Err(Error::Parse { line: 2, .. })));
    }
}
