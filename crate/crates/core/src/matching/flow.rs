use std::collections::VecDeque;

use crate::coalition::Coalition;

/// Objects grouped by owner coalition, with `supply[k]` identical objects
/// owned by coalition `k`. Equivalent to the expanded owner list, but the
/// assignment is kept as amounts per (group, member) so large multiplicities
/// cost nothing extra.
///
/// Players have a capacity; the state is a feasible flow
/// player → group → sink with `load[i] ≤ capacity[i]`.
#[derive(Clone, Debug)]
pub(crate) struct GroupFlow {
    members: Vec<Vec<usize>>,
    supply: Vec<u64>,
    used: Vec<u64>,
    /// `flow[k][m]`: objects of group `k` held by `members[k][m]`.
    flow: Vec<Vec<u64>>,
    /// Groups containing each player.
    incidence: Vec<Vec<usize>>,
    capacity: Vec<u64>,
    load: Vec<u64>,
}

#[derive(Clone, Copy)]
enum Node {
    Player(usize),
    Group(usize),
}

impl GroupFlow {
    pub(crate) fn new(players: usize, groups: Vec<(Coalition, u64)>) -> Self {
        let mut incidence = vec![Vec::new(); players];
        let mut members = Vec::with_capacity(groups.len());
        for (k, (s, _)) in groups.iter().enumerate() {
            let list: Vec<usize> = s.iter().collect();
            for &i in &list {
                incidence[i].push(k);
            }
            members.push(list);
        }
        GroupFlow {
            flow: members.iter().map(|m| vec![0; m.len()]).collect(),
            used: vec![0; groups.len()],
            supply: groups.iter().map(|g| g.1).collect(),
            members,
            incidence,
            capacity: vec![0; players],
            load: vec![0; players],
        }
    }

    pub(crate) fn capacity_mut(&mut self) -> &mut [u64] {
        &mut self.capacity
    }

    pub(crate) fn load(&self) -> &[u64] {
        &self.load
    }

    /// Pushes as much as possible along one shortest augmenting path that
    /// starts at a player with spare capacity. Returns the amount pushed.
    pub(crate) fn augment(&mut self) -> u64 {
        let mut player_prev: Vec<Option<Option<usize>>> = vec![None; self.capacity.len()];
        let mut group_prev: Vec<Option<usize>> = vec![None; self.supply.len()];
        let mut queue = VecDeque::new();
        for (i, prev) in player_prev.iter_mut().enumerate() {
            if self.load[i] < self.capacity[i] {
                *prev = Some(None);
                queue.push_back(Node::Player(i));
            }
        }
        let mut end = None;
        'search: while let Some(node) = queue.pop_front() {
            match node {
                Node::Player(i) => {
                    for &k in &self.incidence[i] {
                        if group_prev[k].is_none() {
                            group_prev[k] = Some(i);
                            if self.used[k] < self.supply[k] {
                                end = Some(k);
                                break 'search;
                            }
                            queue.push_back(Node::Group(k));
                        }
                    }
                }
                Node::Group(k) => {
                    for (m, &j) in self.members[k].iter().enumerate() {
                        if self.flow[k][m] > 0 && player_prev[j].is_none() {
                            player_prev[j] = Some(Some(k));
                            queue.push_back(Node::Player(j));
                        }
                    }
                }
            }
        }
        let Some(last) = end else { return 0 };

        // Path: start → … → (player i, group k) … → last → sink. Moving
        // along a group → player edge takes objects of that group back.
        let mut amount = self.supply[last] - self.used[last];
        let mut k = last;
        let start = loop {
            let i = group_prev[k].expect("visited group has a predecessor");
            match player_prev[i].expect("visited player has a predecessor") {
                None => break i,
                Some(prev) => {
                    amount = amount.min(self.flow[prev][self.slot(prev, i)]);
                    k = prev;
                }
            }
        };
        amount = amount.min(self.capacity[start] - self.load[start]);

        self.load[start] += amount;
        self.used[last] += amount;
        let mut k = last;
        loop {
            let i = group_prev[k].unwrap();
            let m = self.slot(k, i);
            self.flow[k][m] += amount;
            match player_prev[i].unwrap() {
                None => break,
                Some(prev) => {
                    let m = self.slot(prev, i);
                    self.flow[prev][m] -= amount;
                    k = prev;
                }
            }
        }
        amount
    }

    /// Augments until no player with spare capacity can take more.
    pub(crate) fn saturate(&mut self) {
        while self.augment() > 0 {}
    }

    fn slot(&self, k: usize, player: usize) -> usize {
        self.members[k].binary_search(&player).expect("player is a member of the group")
    }
}
