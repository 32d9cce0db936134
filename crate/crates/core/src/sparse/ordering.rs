//! Fill-reducing orderings.

const LEAF_SIZE: usize = 48;

/// Symmetric permutation used by the sparse Cholesky factorization.
#[derive(Clone, Debug)]
pub enum Ordering {
    Natural,
    /// Geometric nested dissection driven by one coordinate triple per unknown.
    NestedDissection(Vec<[f64; 3]>),
}

impl Ordering {
    /// Returns `perm` with `perm[new] = old`.
    pub fn permutation(&self, adjacency: &[Vec<usize>]) -> Vec<usize> {
        match self {
            Ordering::Natural => (0..adjacency.len()).collect(),
            Ordering::NestedDissection(coords) => nested_dissection(adjacency, coords),
        }
    }
}

/// Recursive coordinate bisection; at each level the nodes on the low side that touch the
/// high side form the separator, which is numbered after both halves.
pub fn nested_dissection(adjacency: &[Vec<usize>], coords: &[[f64; 3]]) -> Vec<usize> {
    let n = adjacency.len();
    assert_eq!(coords.len(), n, "one coordinate per unknown required");
    let mut state = State {
        adjacency,
        coords,
        stamp: vec![usize::MAX; n],
        side: vec![0; n],
        next_stamp: 0,
        out: Vec::with_capacity(n),
    };
    state.dissect((0..n).collect());
    debug_assert_eq!(state.out.len(), n);
    state.out
}

struct State<'a> {
    adjacency: &'a [Vec<usize>],
    coords: &'a [[f64; 3]],
    stamp: Vec<usize>,
    side: Vec<u8>,
    next_stamp: usize,
    out: Vec<usize>,
}

impl State<'_> {
    fn dissect(&mut self, mut nodes: Vec<usize>) {
        if nodes.len() <= LEAF_SIZE {
            self.out.extend(nodes);
            return;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &v in &nodes {
            for a in 0..3 {
                lo[a] = lo[a].min(self.coords[v][a]);
                hi[a] = hi[a].max(self.coords[v][a]);
            }
        }
        let axis = (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap();
        let key = |v: usize| self.coords[v][axis];
        let mid = nodes.len() / 2;
        nodes.select_nth_unstable_by(mid, |&a, &b| key(a).total_cmp(&key(b)));
        let pivot = key(nodes[mid]);
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        let mut low_count = 0;
        for &v in &nodes {
            self.stamp[v] = stamp;
            self.side[v] = u8::from(key(v) >= pivot);
            low_count += usize::from(key(v) < pivot);
        }
        if low_count == 0 {
            // Every node shares the pivot coordinate: split by position instead.
            for (k, &v) in nodes.iter().enumerate() {
                self.side[v] = u8::from(k >= mid);
            }
        }
        let mut low = Vec::new();
        let mut high = Vec::new();
        let mut sep = Vec::new();
        for &v in &nodes {
            if self.side[v] == 1 {
                high.push(v);
            } else if self.adjacency[v]
                .iter()
                .any(|&w| self.stamp[w] == stamp && self.side[w] == 1)
            {
                sep.push(v);
            } else {
                low.push(v);
            }
        }
        drop(nodes);
        self.dissect(low);
        self.dissect(high);
        self.out.extend(sep);
    }
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}
