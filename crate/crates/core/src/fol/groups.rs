use std::collections::BTreeMap;

use serde::Serialize;

use super::ast::{Atom, ConjunctiveQuery, Variable};

/// A connected component of the variable co-occurrence graph. Groups can be
/// scored independently and their scores multiplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseGroup {
    pub group_id: usize,
    /// Sorted by name.
    pub variables: Vec<Variable>,
    /// In query order.
    pub atoms: Vec<Atom>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partitions the atoms of `q` into independent clause groups, ordered by
/// their smallest variable name.
pub fn clause_groups(q: &ConjunctiveQuery) -> Vec<ClauseGroup> {
    let vars = q.variables();
    let index: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut uf = UnionFind::new(vars.len());
    for atom in q.atoms() {
        let vs = atom.variables();
        for pair in vs.windows(2) {
            uf.union(index[pair[0]], index[pair[1]]);
        }
    }

    let mut by_root: BTreeMap<usize, (Vec<Variable>, Vec<Atom>)> = BTreeMap::new();
    for (i, v) in vars.iter().enumerate() {
        by_root.entry(uf.find(i)).or_default().0.push(v.clone());
    }
    for atom in q.atoms() {
        let root = uf.find(index[atom.variables()[0]]);
        by_root.get_mut(&root).expect("root of a known variable").1.push(atom.clone());
    }

    let mut groups: Vec<(Vec<Variable>, Vec<Atom>)> = by_root
        .into_values()
        .map(|(mut vs, atoms)| {
            vs.sort();
            (vs, atoms)
        })
        .collect();
    groups.sort_by(|a, b| a.0[0].cmp(&b.0[0]));
    groups
        .into_iter()
        .enumerate()
        .map(|(group_id, (variables, atoms))| ClauseGroup { group_id, variables, atoms })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_query;

    #[test]
    fn bridge_tank_and_harbor_pair_split() {
        let q = parse_query(
            "bridge(a) AND storage_tank(b) AND left_of(a, b) AND harbor(c) AND harbor(d) AND is_close(c, d)",
        )
        .unwrap();
        let groups = clause_groups(&q);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].variables, vec![Variable::new("a"), Variable::new("b")]);
        assert_eq!(groups[1].variables, vec![Variable::new("c"), Variable::new("d")]);
        assert_eq!(groups[0].atoms.len(), 3);
        assert_eq!(groups[1].atoms.len(), 3);
    }

    #[test]
    fn connected_query_is_one_group() {
        let q = parse_query("ship(a) AND ship(b) AND ship(c) AND left_of(a, b) AND left_of(b, c)").unwrap();
        assert_eq!(clause_groups(&q).len(), 1);
    }

    #[test]
    fn unary_only_variables_are_singletons() {
        let q = parse_query("car(x) AND plane(y) AND ship(z) AND harbor(w)").unwrap();
        let groups = clause_groups(&q);
        assert_eq!(groups.len(), 4);
        let names: Vec<_> = groups.iter().map(|g| g.variables[0].as_str().to_string()).collect();
        assert_eq!(names, ["w", "x", "y", "z"]);
    }

    #[test]
    fn metric_atoms_link_their_variables() {
        let q = parse_query("car(a) AND car(b) AND is_close_meters(a, b, 10) AND car(c)").unwrap();
        let groups = clause_groups(&q);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].variables.len(), 2);
    }
}
