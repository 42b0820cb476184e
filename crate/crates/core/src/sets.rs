//! Small bitset newtypes for edge sets and source sets.
//!
//! Networks are capped at 64 edges and 64 sources, which is far beyond what
//! exhaustive cut enumeration can handle anyway.

use std::fmt;

macro_rules! bitset {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(u64);

        impl $name {
            pub const EMPTY: Self = Self(0);

            pub fn from_bits(bits: u64) -> Self {
                Self(bits)
            }

            /// The set `{0, 1, .., count-1}`.
            pub fn full(count: usize) -> Self {
                debug_assert!(count <= 64);
                if count == 64 {
                    Self(u64::MAX)
                } else {
                    Self((1u64 << count) - 1)
                }
            }

            pub fn singleton(index: usize) -> Self {
                Self(1u64 << index)
            }

            pub fn bits(self) -> u64 {
                self.0
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn contains(self, index: usize) -> bool {
                index < 64 && self.0 & (1u64 << index) != 0
            }

            pub fn insert(&mut self, index: usize) {
                self.0 |= 1u64 << index;
            }

            pub fn union(self, other: Self) -> Self {
                Self(self.0 | other.0)
            }

            pub fn intersection(self, other: Self) -> Self {
                Self(self.0 & other.0)
            }

            pub fn difference(self, other: Self) -> Self {
                Self(self.0 & !other.0)
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            pub fn is_disjoint(self, other: Self) -> bool {
                self.0 & other.0 == 0
            }

            /// Members in ascending index order.
            pub fn iter(self) -> impl Iterator<Item = usize> {
                let mut rest = self.0;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        None
                    } else {
                        let i = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        Some(i)
                    }
                })
            }

            pub fn to_vec(self) -> Vec<usize> {
                self.iter().collect()
            }
        }

        impl FromIterator<usize> for $name {
            fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
                let mut set = Self::EMPTY;
                for i in iter {
                    set.insert(i);
                }
                set
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter()).finish()
            }
        }
    };
}

bitset!(
    /// A set of edges, by edge index.
    EdgeSet
);
bitset!(
    /// A set of sources, by 0-based source position.
    SourceSet
);
