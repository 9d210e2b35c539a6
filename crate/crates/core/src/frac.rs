//! Small exact fractions for the sweep kernels.
//!
//! Sweep points have denominators bounded by products of a few list entries,
//! so `i128` components are ample; a sweep large enough to overflow them
//! would need more sample points than could ever be visited.

use std::cmp::Ordering;

use num_integer::Integer;

use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Frac {
    pub n: i128,
    pub d: i128,
}

impl Frac {
    pub const ZERO: Frac = Frac { n: 0, d: 1 };
    pub const ONE: Frac = Frac { n: 1, d: 1 };

    pub fn new(n: i128, d: i128) -> Frac {
        debug_assert!(d != 0);
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Frac { n, d }
    }

    pub fn int(n: i128) -> Frac {
        Frac { n, d: 1 }
    }

    pub fn is_integer(self) -> bool {
        self.n.rem_euclid(self.d) == 0
    }

    /// Representative in `[0, 1)`.
    pub fn wrap(self) -> Frac {
        Frac {
            n: self.n.rem_euclid(self.d),
            d: self.d,
        }
    }

    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.n * o.d + o.n * self.d, self.d * o.d)
    }

    pub fn sub(self, o: Frac) -> Frac {
        Frac::new(self.n * o.d - o.n * self.d, self.d * o.d)
    }

    pub fn scale(self, k: i128) -> Frac {
        Frac::new(self.n * k, self.d)
    }

    pub fn div_int(self, k: i128) -> Frac {
        Frac::new(self.n, self.d * k)
    }

    pub fn midpoint(self, o: Frac) -> Frac {
        Frac::new(self.n * o.d + o.n * self.d, 2 * self.d * o.d)
    }

    pub fn to_rat(self) -> Rat {
        Rat::new(self.n, self.d)
    }

    pub fn from_rat(r: &Rat) -> Option<Frac> {
        let (n, d) = r.to_i64_pair()?;
        Some(Frac::new(n as i128, d as i128))
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.n * o.d).cmp(&(o.n * self.d))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Midpoints of consecutive points of a sorted point set in `[0, 1)`, the
/// last gap wrapping to 1.
pub(crate) fn gap_midpoints(points: &[Frac]) -> Vec<Frac> {
    let mut out = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let next = points.get(i + 1).copied().unwrap_or(Frac::ONE);
        out.push(p.midpoint(next));
    }
    out
}

pub(crate) fn sort_dedup(points: &mut Vec<Frac>) {
    points.sort_unstable();
    points.dedup();
}
