//! Compacted trie over query suffixes `P[j_w..m]`. Edge labels are
//! `(offset, len)` slices of the query.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CptNode {
    /// 0-based offset of the incoming edge label in the query.
    pub offset: usize,
    pub len: usize,
    /// FGOE column of the fork whose suffix created this edge (0 for the root).
    pub column: usize,
    /// Child node ids, ordered by first label symbol.
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Cpt<'a> {
    p: &'a [u8],
    nodes: Vec<CptNode>,
    inserted: usize,
}

impl<'a> Cpt<'a> {
    pub fn new(p: &'a [u8]) -> Self {
        Cpt {
            p,
            nodes: vec![CptNode {
                offset: 0,
                len: 0,
                column: 0,
                children: Vec::new(),
            }],
            inserted: 0,
        }
    }

    pub fn root(&self) -> &CptNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &CptNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Symbols inserted so far (sum of suffix lengths).
    pub fn inserted_symbols(&self) -> usize {
        self.inserted
    }

    fn first(&self, id: usize) -> u8 {
        self.p[self.nodes[id].offset]
    }

    fn child(&self, id: usize, c: u8) -> Result<usize, usize> {
        self.nodes[id]
            .children
            .binary_search_by(|&ch| self.first(ch).cmp(&c))
            .map(|k| self.nodes[id].children[k])
    }

    fn attach(&mut self, parent: usize, offset: usize, len: usize, column: usize) {
        let id = self.nodes.len();
        self.nodes.push(CptNode {
            offset,
            len,
            column,
            children: Vec::new(),
        });
        let c = self.p[offset];
        let at = match self.child(parent, c) {
            Ok(_) => unreachable!("duplicate first symbol"),
            Err(k) => k,
        };
        self.nodes[parent].children.insert(at, id);
    }

    /// Inserts `P[j..m]` (1-based `j`). Returns the length of the longest
    /// prefix it shares with an earlier suffix and the column mark of the
    /// deepest edge on that shared path (0 when nothing is shared).
    pub fn insert(&mut self, j: usize) -> (usize, usize) {
        let m = self.p.len();
        self.inserted += m + 1 - j;
        let mut pos = j - 1;
        let mut node = 0;
        let mut depth = 0;
        let mut owner = 0;
        loop {
            if pos == m {
                return (depth, owner);
            }
            let ch = match self.child(node, self.p[pos]) {
                Ok(ch) => ch,
                Err(_) => {
                    self.attach(node, pos, m - pos, j);
                    return (depth, owner);
                }
            };
            let (off, len) = (self.nodes[ch].offset, self.nodes[ch].len);
            let mut k = 0;
            while k < len && pos + k < m && self.p[off + k] == self.p[pos + k] {
                k += 1;
            }
            owner = self.nodes[ch].column;
            depth += k;
            if k == len {
                node = ch;
                pos += k;
                continue;
            }
            if pos + k == m {
                return (depth, owner);
            }
            let mid = self.nodes.len();
            self.nodes.push(CptNode {
                offset: off,
                len: k,
                column: self.nodes[ch].column,
                children: vec![ch],
            });
            self.nodes[ch].offset += k;
            self.nodes[ch].len -= k;
            let slot = self.nodes[node]
                .children
                .iter()
                .position(|&c| c == ch)
                .expect("child present");
            self.nodes[node].children[slot] = mid;
            self.attach(mid, pos + k, m - pos - k, j);
            return (depth, owner);
        }
    }

    /// True when `s` is spelled by a path starting at the root.
    pub fn contains(&self, s: &[u8]) -> bool {
        let mut node = 0;
        let mut k = 0;
        while k < s.len() {
            let Ok(ch) = self.child(node, s[k]) else {
                return false;
            };
            let n = &self.nodes[ch];
            let label = &self.p[n.offset..n.offset + n.len];
            let take = label.len().min(s.len() - k);
            if label[..take] != s[k..k + take] {
                return false;
            }
            k += take;
            node = ch;
        }
        true
    }

    /// First symbols of a node's children, in order.
    pub fn child_symbols(&self, id: usize) -> Vec<u8> {
        self.nodes[id].children.iter().map(|&c| self.first(c)).collect()
    }

    /// Child of `id` whose label starts with `c`.
    pub fn child_by_symbol(&self, id: usize, c: u8) -> Option<usize> {
        self.child(id, c).ok()
    }
}

/// Builds the tree for the suffixes starting at the ascending columns `f_v`.
pub fn construct_cptree<'a>(p: &'a [u8], f_v: &[usize]) -> Cpt<'a> {
    let mut t = Cpt::new(p);
    for &j in f_v {
        t.insert(j);
    }
    t
}
