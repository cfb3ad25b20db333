use serde::Serialize;

use crate::mesh::IndexedMesh;

/// Undirected edge as an ordered `(min, max)` vertex pair.
pub type Edge = [u32; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NonManifoldEdge {
    pub edge: Edge,
    /// Number of face sides incident to the edge (at least 3).
    pub faces: usize,
}

/// Classification of every undirected edge by how many face sides use it.
///
/// A face contributes one use per side, so a collapsed face `[a, a, b]`
/// uses edge `(a, b)` twice; sides joining a vertex to itself are skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeReport {
    pub interior_edges: usize,
    /// Edges used by exactly one face, sorted.
    pub boundary_edges: Vec<Edge>,
    /// Edges used by three or more faces, sorted by edge.
    pub nonmanifold_edges: Vec<NonManifoldEdge>,
    /// Interior edges whose two faces traverse them in the same direction.
    pub misoriented_edges: Vec<Edge>,
}

impl EdgeReport {
    pub fn distinct_edges(&self) -> usize {
        self.interior_edges + self.boundary_edges.len() + self.nonmanifold_edges.len()
    }

    pub fn orientation_consistent(&self) -> bool {
        self.misoriented_edges.is_empty()
    }
}

pub fn edge_classification<T>(mesh: &IndexedMesh<T>) -> EdgeReport {
    // (min, max, traversed min->max)
    let mut sides: Vec<(u32, u32, bool)> = Vec::with_capacity(mesh.faces.len() * 3);
    for f in &mesh.faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if a != b {
                sides.push((a.min(b), a.max(b), a < b));
            }
        }
    }
    sides.sort_unstable();

    let mut report = EdgeReport {
        interior_edges: 0,
        boundary_edges: Vec::new(),
        nonmanifold_edges: Vec::new(),
        misoriented_edges: Vec::new(),
    };
    for group in sides.chunk_by(|x, y| (x.0, x.1) == (y.0, y.1)) {
        let edge = [group[0].0, group[0].1];
        match group.len() {
            1 => report.boundary_edges.push(edge),
            2 => {
                report.interior_edges += 1;
                if group[0].2 == group[1].2 {
                    report.misoriented_edges.push(edge);
                }
            }
            n => report.nonmanifold_edges.push(NonManifoldEdge { edge, faces: n }),
        }
    }
    report
}

/// A chain of boundary edges. Closed loops list each vertex once; open
/// chains list both end vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryLoop {
    pub vertices: Vec<u32>,
    pub closed: bool,
}

impl BoundaryLoop {
    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }
}

/// Chains boundary edges into maximal loops.
///
/// Vertices touching more than two boundary edges (and dangling ends) break
/// chains: every chain starting or ending at one is reported separately,
/// and is marked closed only if it returns to its starting vertex.
pub fn boundary_loops(report: &EdgeReport) -> Vec<BoundaryLoop> {
    let edges = &report.boundary_edges;
    if edges.is_empty() {
        return Vec::new();
    }
    // Adjacency as sorted (vertex, edge index) pairs.
    let mut incidence: Vec<(u32, usize)> = Vec::with_capacity(edges.len() * 2);
    for (i, e) in edges.iter().enumerate() {
        incidence.push((e[0], i));
        incidence.push((e[1], i));
    }
    incidence.sort_unstable();
    let neighbors = |v: u32| {
        let start = incidence.partition_point(|&(w, _)| w < v);
        let end = incidence.partition_point(|&(w, _)| w <= v);
        &incidence[start..end]
    };
    let other = |e: usize, v: u32| if edges[e][0] == v { edges[e][1] } else { edges[e][0] };

    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    let walk = |start: u32, first: usize, used: &mut Vec<bool>| {
        let mut vertices = vec![start];
        let mut e = first;
        let mut v = start;
        loop {
            used[e] = true;
            v = other(e, v);
            if v == start {
                return BoundaryLoop { vertices, closed: true };
            }
            vertices.push(v);
            let inc = neighbors(v);
            if inc.len() != 2 {
                return BoundaryLoop { vertices, closed: false };
            }
            match inc.iter().find(|&&(_, ne)| !used[ne]) {
                Some(&(_, ne)) => e = ne,
                None => return BoundaryLoop { vertices, closed: false },
            }
        }
    };

    // Chains anchored at branch points and dangling ends first.
    let mut anchors: Vec<u32> = incidence.iter().map(|&(v, _)| v).collect();
    anchors.dedup();
    for &v in &anchors {
        if neighbors(v).len() == 2 {
            continue;
        }
        for &(_, e) in neighbors(v) {
            if !used[e] {
                loops.push(walk(v, e, &mut used));
            }
        }
    }
    // What remains are simple cycles through degree-2 vertices.
    for i in 0..edges.len() {
        if !used[i] {
            loops.push(walk(edges[i][0], i, &mut used));
        }
    }
    loops
}
