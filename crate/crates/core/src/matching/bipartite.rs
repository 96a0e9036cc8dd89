use std::collections::VecDeque;

/// Bipartite graph between player-node copies (left) and objects (right)
/// together with a matching.
///
/// Left nodes are appended over time; each carries the player it copies and
/// the objects that player owns, in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BipartiteState {
    objects: usize,
    left_player: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    match_left: Vec<Option<usize>>,
    match_right: Vec<Option<usize>>,
}

impl BipartiteState {
    pub fn new(objects: usize) -> Self {
        BipartiteState {
            objects,
            match_right: vec![None; objects],
            ..Default::default()
        }
    }

    /// Adds an unmatched left node for `player` adjacent to `neighbors`.
    /// Returns its index.
    pub fn add_left(&mut self, player: usize, mut neighbors: Vec<usize>) -> usize {
        assert!(neighbors.iter().all(|&o| o < self.objects), "edge to unknown object");
        neighbors.sort_unstable();
        neighbors.dedup();
        self.left_player.push(player);
        self.adjacency.push(neighbors);
        self.match_left.push(None);
        self.left_player.len() - 1
    }

    pub fn left_len(&self) -> usize {
        self.left_player.len()
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn left_player(&self, left: usize) -> usize {
        self.left_player[left]
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    pub fn matched_object(&self, left: usize) -> Option<usize> {
        self.match_left[left]
    }

    pub fn matched_left(&self, object: usize) -> Option<usize> {
        self.match_right[object]
    }

    pub fn matching_size(&self) -> usize {
        self.match_left.iter().flatten().count()
    }

    /// Whether every left node is matched.
    pub fn saturates_left(&self) -> bool {
        self.match_left.iter().all(Option::is_some)
    }

    /// Checks that the matching is a consistent partial injection along
    /// existing edges.
    pub fn is_consistent(&self) -> bool {
        self.match_left.iter().enumerate().all(|(l, m)| match *m {
            Some(o) => self.adjacency[l].contains(&o) && self.match_right[o] == Some(l),
            None => true,
        }) && self.match_right.iter().enumerate().all(|(o, m)| match *m {
            Some(l) => self.match_left[l] == Some(o),
            None => true,
        })
    }

    fn layer(&self) -> (Vec<usize>, bool) {
        let mut dist = vec![usize::MAX; self.left_len()];
        let mut queue = VecDeque::new();
        for (l, m) in self.match_left.iter().enumerate() {
            if m.is_none() {
                dist[l] = 0;
                queue.push_back(l);
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &o in &self.adjacency[l] {
                match self.match_right[o] {
                    None => found = true,
                    Some(next) if dist[next] == usize::MAX => {
                        dist[next] = dist[l] + 1;
                        queue.push_back(next);
                    }
                    Some(_) => {}
                }
            }
        }
        (dist, found)
    }

    fn layered_augment(&mut self, l: usize, dist: &mut [usize]) -> bool {
        for k in 0..self.adjacency[l].len() {
            let o = self.adjacency[l][k];
            let advance = match self.match_right[o] {
                None => true,
                Some(next) => dist[next] == dist[l] + 1 && self.layered_augment(next, dist),
            };
            if advance {
                self.match_left[l] = Some(o);
                self.match_right[o] = Some(l);
                return true;
            }
        }
        dist[l] = usize::MAX;
        false
    }

    /// Extends the current matching to maximum cardinality by shortest
    /// augmenting paths in phases. Returns the matching size.
    pub fn hopcroft_karp(&mut self) -> usize {
        loop {
            let (mut dist, found) = self.layer();
            if !found {
                break;
            }
            let mut grew = false;
            for l in 0..self.left_len() {
                if self.match_left[l].is_none() && self.layered_augment(l, &mut dist) {
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        self.matching_size()
    }

    /// Searches for an alternating path from the unmatched left node `left`
    /// to a free object and flips it. The state is untouched on failure.
    pub fn augment_from(&mut self, left: usize) -> bool {
        if self.match_left[left].is_some() {
            return false;
        }
        let mut visited = vec![false; self.objects];
        self.alternate(left, &mut visited)
    }

    fn alternate(&mut self, l: usize, visited: &mut [bool]) -> bool {
        for k in 0..self.adjacency[l].len() {
            let o = self.adjacency[l][k];
            if visited[o] {
                continue;
            }
            visited[o] = true;
            let free = match self.match_right[o] {
                None => true,
                Some(next) => self.alternate(next, visited),
            };
            if free {
                self.match_left[l] = Some(o);
                self.match_right[o] = Some(l);
                return true;
            }
        }
        false
    }
}

/// Free-function form of [`BipartiteState::hopcroft_karp`].
pub fn hopcroft_karp(mut state: BipartiteState) -> BipartiteState {
    state.hopcroft_karp();
    state
}

/// Free-function form of [`BipartiteState::augment_from`].
pub fn augment_from(state: &mut BipartiteState, left: usize) -> bool {
    state.augment_from(left)
}
