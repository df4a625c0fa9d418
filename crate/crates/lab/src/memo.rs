use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, RwLock};

use fejer_core::kernels::fejer;
use fejer_core::{Convention, FejerKernel, Resolution, SystemId};

type Key = (SystemId, u64, u32, Convention);

/// Bounded cache of Fejér kernels keyed by `(system, n, M, convention)`.
///
/// Readers share the lock; a miss builds the kernel without holding it and
/// then inserts, evicting the oldest entry once `capacity` is reached.
/// Two threads missing on the same key both build it; the first insert wins.
#[derive(Debug)]
pub struct KernelMemo {
    capacity: usize,
    state: RwLock<State>,
}

#[derive(Debug, Default)]
struct State {
    map: HashMap<Key, Arc<FejerKernel>>,
    order: VecDeque<Key>,
}

impl KernelMemo {
    pub fn new(capacity: usize) -> Self {
        KernelMemo {
            capacity: capacity.max(1),
            state: RwLock::new(State::default()),
        }
    }

    pub fn get(
        &self,
        system: SystemId,
        n: u64,
        resolution: Resolution,
        convention: Convention,
    ) -> fejer_core::Result<Arc<FejerKernel>> {
        let key = (system, n, resolution.bits(), convention);
        if let Some(k) = self.state.read().expect("memo lock").map.get(&key) {
            return Ok(Arc::clone(k));
        }
        let built = Arc::new(fejer(system, n, resolution, convention)?);
        let mut state = self.state.write().expect("memo lock");
        if let Some(k) = state.map.get(&key) {
            return Ok(Arc::clone(k));
        }
        while state.map.len() >= self.capacity {
            match state.order.pop_front() {
                Some(old) => {
                    state.map.remove(&old);
                }
                None => break,
            }
        }
        state.map.insert(key, Arc::clone(&built));
        state.order.push_back(key);
        Ok(built)
    }

    pub fn len(&self) -> usize {
        self.state.read().expect("memo lock").map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for KernelMemo {
    fn default() -> Self {
        KernelMemo::new(4096)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hits_and_evicts() {
        let memo = KernelMemo::new(2);
        let res = Resolution::new(4).unwrap();
        let a = memo.get(SystemId::Paley, 3, res, Convention::ZeroBased).unwrap();
        let b = memo.get(SystemId::Paley, 3, res, Convention::ZeroBased).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        memo.get(SystemId::Kaczmarz, 3, res, Convention::ZeroBased).unwrap();
        memo.get(SystemId::Kaczmarz, 5, res, Convention::OneBased).unwrap();
        assert_eq!(memo.len(), 2);
        let c = memo.get(SystemId::Paley, 3, res, Convention::ZeroBased).unwrap();
        assert!(!Arc::ptr_eq(&a, &c));
        assert_eq!(*a, *c);
    }

    #[test]
    fn errors_are_not_cached() {
        let memo = KernelMemo::new(8);
        let res = Resolution::new(3).unwrap();
        assert!(memo.get(SystemId::Paley, 9, res, Convention::ZeroBased).is_err());
        assert!(memo.is_empty());
    }
}
