use crate::mesh::IndexedMesh;

struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    /// Per-face component label in `0..count`, numbered by first face.
    pub face_labels: Vec<u32>,
}

/// Groups faces into shells. Two faces are connected when they share at
/// least one welded vertex, so shapes touching at a single corner count as
/// one piece.
pub fn connected_components<T>(mesh: &IndexedMesh<T>) -> Components {
    let mut sets = DisjointSet::new(mesh.vertices.len());
    for &[a, b, c] in &mesh.faces {
        sets.union(a, b);
        sets.union(a, c);
    }
    let mut label_of_root = vec![u32::MAX; mesh.vertices.len()];
    let mut count = 0u32;
    let face_labels = mesh
        .faces
        .iter()
        .map(|f| {
            let root = sets.find(f[0]) as usize;
            if label_of_root[root] == u32::MAX {
                label_of_root[root] = count;
                count += 1;
            }
            label_of_root[root]
        })
        .collect();
    Components { count: count as usize, face_labels }
}
