use super::{crowding_distance, dominates, exclusive_contributions_2d, Objectives};

/// Bounded external archive of mutually non-dominated solutions.
///
/// When an insertion pushes the archive over capacity the member with the
/// lowest crowding distance is dropped (the newcomer included). With a
/// two-objective hypervolume guard set, only members whose exclusive
/// hypervolume contribution does not exceed the newcomer's are eligible, so
/// the guarded hypervolume never decreases.
#[derive(Debug, Clone)]
pub struct ParetoArchive<T> {
    members: Vec<T>,
    crowding: Vec<f64>,
    capacity: usize,
    guard: Option<[f64; 2]>,
}

pub const DEFAULT_CAPACITY: usize = 100;

impl<T: Objectives> ParetoArchive<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "archive capacity must be positive");
        ParetoArchive {
            members: Vec::new(),
            crowding: Vec::new(),
            capacity,
            guard: None,
        }
    }

    /// Archive without a size limit.
    pub fn unbounded() -> Self {
        Self::new(usize::MAX)
    }

    pub fn with_hypervolume_guard(mut self, reference: Option<[f64; 2]>) -> Self {
        self.guard = reference;
        self
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[T] {
        &self.members
    }

    pub fn into_members(self) -> Vec<T> {
        self.members
    }

    /// Crowding distance of each member, aligned with `members()`.
    pub fn crowding(&self) -> &[f64] {
        &self.crowding
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.members.iter()
    }

    /// Offers `item`; returns whether it is a member afterwards.
    ///
    /// Rejected when a member dominates it or has the same objective vector.
    pub fn insert(&mut self, item: T) -> bool {
        let obj = item.objectives();
        if self
            .members
            .iter()
            .any(|m| m.objectives() == obj || dominates(m.objectives(), obj))
        {
            return false;
        }
        self.members.retain(|m| !dominates(obj, m.objectives()));
        self.members.push(item);
        let mut accepted = true;
        if self.members.len() > self.capacity {
            let evict = self.eviction_index();
            accepted = evict != self.members.len() - 1;
            self.members.remove(evict);
        }
        self.crowding = crowding_distance(&self.members);
        accepted
    }

    pub fn extend<I: IntoIterator<Item = T>>(&mut self, items: I) {
        for item in items {
            self.insert(item);
        }
    }

    fn eviction_index(&self) -> usize {
        let crowd = crowding_distance(&self.members);
        let newest = self.members.len() - 1;
        let eligible: Vec<bool> = match self.guard {
            Some(reference) if self.members[0].objectives().len() == 2 => {
                let contrib = exclusive_contributions_2d(&self.members, reference);
                contrib.iter().map(|c| *c <= contrib[newest]).collect()
            }
            _ => vec![true; self.members.len()],
        };
        // ties go to the most recent member so earlier entries survive
        let mut best = newest;
        for i in (0..self.members.len()).rev() {
            if eligible[i] && crowd[i] < crowd[best] {
                best = i;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_reject() {
        let mut a = ParetoArchive::new(10);
        assert!(a.insert(vec![1.0, 1.0]));
        assert!(!a.insert(vec![2.0, 2.0]));
        assert!(!a.insert(vec![1.0, 1.0]));
        assert_eq!(a.len(), 1);
        assert!(a.insert(vec![0.5, 0.5]));
        assert_eq!(a.members(), &[vec![0.5, 0.5]]);
    }

    #[test]
    fn capacity_evicts_least_crowded() {
        let mut a = ParetoArchive::new(3);
        for p in [[0.0, 10.0], [1.0, 9.0], [5.0, 5.0], [10.0, 0.0]] {
            a.insert(p.to_vec());
        }
        assert_eq!(a.len(), 3);
        // [1, 9] sits closest to its neighbours
        assert!(!a.members().contains(&vec![1.0, 9.0]));
    }

    #[test]
    fn newcomer_can_be_the_one_dropped() {
        let mut a = ParetoArchive::new(3);
        for p in [[0.0, 10.0], [5.0, 5.0], [10.0, 0.0]] {
            assert!(a.insert(p.to_vec()));
        }
        assert!(!a.insert(vec![5.01, 4.99]));
        assert_eq!(a.len(), 3);
    }
}
