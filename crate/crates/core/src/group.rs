//! The hierarchical group Ω_N: finitely supported sequences over Z_N with
//! componentwise addition and the ultrametric "highest differing coordinate".

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Default cap on the number of elements any enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_CAP`].
pub const ENUMERATION_CAP_ENV: &str = "HRW_ENUM_CAP";

/// Enumeration cap from the environment, falling back to the default.
pub fn enumeration_cap() -> u64 {
    std::env::var(ENUMERATION_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_CAP)
}

fn check_order(order: u32) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidOrder(order as u64));
    }
    Ok(())
}

/// A point of Ω_N stored little-endian (coordinate 1 first) with trailing
/// zeros trimmed, so equality is structural and the norm is the length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    order: u32,
    digits: Vec<u32>,
}

impl GroupElement {
    pub fn origin(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(Self { order, digits: Vec::new() })
    }

    pub fn new(order: u32, digits: Vec<u32>) -> Result<Self> {
        check_order(order)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= order) {
            return Err(Error::InvalidDigit { digit, order });
        }
        let mut x = Self { order, digits };
        x.trim();
        Ok(x)
    }

    /// Element whose digits are the base-N expansion of `index`.
    pub fn from_index(order: u32, mut index: u64) -> Result<Self> {
        check_order(order)?;
        let mut digits = Vec::new();
        while index > 0 {
            digits.push((index % order as u64) as u32);
            index /= order as u64;
        }
        Ok(Self { order, digits })
    }

    /// Position of this element in [`enumerate_ball`] order.
    pub fn index(&self) -> u64 {
        self.digits.iter().rev().fold(0u64, |acc, &d| acc * self.order as u64 + d as u64)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Coordinate `i` (1-based); zero beyond the support.
    pub fn coordinate(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.digits.get(i - 1).copied().unwrap_or(0)
    }

    /// Hierarchical norm |x|.
    pub fn norm(&self) -> usize {
        self.digits.len()
    }

    pub fn is_origin(&self) -> bool {
        self.digits.is_empty()
    }

    fn trim(&mut self) {
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, op: impl Fn(u32, u32) -> u32) -> Result<Self> {
        self.same_order(other)?;
        let len = self.digits.len().max(other.digits.len());
        let digits = (1..=len).map(|i| op(self.coordinate(i), other.coordinate(i))).collect();
        let mut x = Self { order: self.order, digits };
        x.trim();
        Ok(x)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.order;
        self.combine(other, |a, b| (a + b) % n)
    }

    pub fn subtract(&self, other: &Self) -> Result<Self> {
        let n = self.order;
        self.combine(other, |a, b| (a + n - b) % n)
    }

    pub fn negate(&self) -> Self {
        let n = self.order;
        Self { order: n, digits: self.digits.iter().map(|&d| (n - d) % n).collect() }
    }

    /// Adds an independent uniform point of the sphere of radius `j` in place.
    ///
    /// Coordinates below `j` of the sum are uniform whatever their previous
    /// value, so they are redrawn directly; coordinate `j` moves by a uniform
    /// nonzero shift.
    pub fn jump_uniform_sphere<R: Rng + ?Sized>(&mut self, j: usize, rng: &mut R) {
        assert!(j >= 1, "jump radius must be positive");
        if self.digits.len() < j {
            self.digits.resize(j, 0);
        }
        let n = self.order;
        for d in &mut self.digits[..j - 1] {
            *d = rng.gen_range(0..n);
        }
        let top = &mut self.digits[j - 1];
        *top = (*top + rng.gen_range(1..n)) % n;
        self.trim();
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses the comma-separated digit form for a given order.
pub fn parse_element(order: u32, s: &str) -> Result<GroupElement> {
    let s = s.trim();
    if s.is_empty() {
        return GroupElement::origin(order);
    }
    let digits = s
        .split(',')
        .map(|p| u32::from_str(p.trim()).map_err(|e| Error::InvalidArgument(format!("digit {p:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    GroupElement::new(order, digits)
}

/// Ultrametric distance: largest coordinate index where `x` and `y` differ.
pub fn distance(x: &GroupElement, y: &GroupElement) -> Result<usize> {
    x.same_order(y)?;
    let len = x.digits.len().max(y.digits.len());
    Ok((1..=len).rev().find(|&i| x.coordinate(i) != y.coordinate(i)).unwrap_or(0))
}

/// Number of points at distance exactly `j`: N^(j-1) (N-1).
pub fn sphere_size(order: u32, j: usize) -> Result<u128> {
    check_order(order)?;
    if j == 0 {
        return Err(Error::ZeroRadius);
    }
    let n = order as u128;
    let mut size = n - 1;
    for _ in 1..j {
        size = size
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidArgument(format!("sphere of radius {j} overflows")))?;
    }
    Ok(size)
}

/// Uniform point on the sphere of radius `j` around the origin.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(order: u32, j: usize, rng: &mut R) -> Result<GroupElement> {
    check_order(order)?;
    if j == 0 {
        return Err(Error::ZeroRadius);
    }
    let mut x = GroupElement::origin(order)?;
    x.jump_uniform_sphere(j, rng);
    Ok(x)
}

/// Closed ball of radius `radius` centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ball {
    pub order: u32,
    pub radius: usize,
}

impl Ball {
    pub fn new(order: u32, radius: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self { order, radius })
    }

    pub fn size(&self) -> Option<u128> {
        (self.order as u128).checked_pow(self.radius as u32)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.order() == self.order && x.norm() <= self.radius
    }

    pub fn enumerate(&self, cap: u64) -> Result<Vec<GroupElement>> {
        enumerate_ball(self.order, self.radius, cap)
    }
}

/// All N^R elements of B_R in index order (origin first).
pub fn enumerate_ball(order: u32, radius: usize, cap: u64) -> Result<Vec<GroupElement>> {
    check_order(order)?;
    let requested = (order as u128).checked_pow(radius as u32).unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::EnumerationCap { requested, cap });
    }
    (0..requested as u64).map(|i| GroupElement::from_index(order, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(order: u32, digits: &[u32]) -> GroupElement {
        GroupElement::new(order, digits.to_vec()).unwrap()
    }

    #[test]
    fn distance_is_highest_differing_coordinate() {
        assert_eq!(distance(&el(3, &[1, 0, 2]), &el(3, &[1])).unwrap(), 3);
        let x = el(3, &[2, 1]);
        assert_eq!(distance(&x, &x).unwrap(), 0);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let e = distance(&el(2, &[1]), &el(3, &[1])).unwrap_err();
        assert_eq!(e, Error::OrderMismatch { left: 2, right: 3 });
        assert!(el(2, &[1]).subtract(&el(3, &[1])).is_err());
    }

    #[test]
    fn canonical_form_trims_zeros() {
        assert_eq!(el(3, &[1, 0, 0]), el(3, &[1]));
        assert_eq!(el(3, &[0, 0]).norm(), 0);
        assert!(GroupElement::new(3, vec![3]).is_err());
        assert!(GroupElement::origin(1).is_err());
    }

    #[test]
    fn subtraction_examples() {
        let x = el(3, &[2, 1]);
        assert!(x.subtract(&x).unwrap().is_origin());
        assert_eq!(el(3, &[1, 2]).subtract(&el(3, &[0, 2])).unwrap(), el(3, &[1]));
        assert!(x.add(&x.negate()).unwrap().is_origin());
    }

    #[test]
    fn sphere_sizes() {
        assert_eq!(sphere_size(2, 3).unwrap(), 4);
        assert_eq!(sphere_size(3, 1).unwrap(), 2);
        assert_eq!(sphere_size(2, 0), Err(Error::ZeroRadius));
        let total: u128 = 1 + (1..=4).map(|j| sphere_size(2, j).unwrap()).sum::<u128>();
        assert_eq!(total, 16);
    }

    #[test]
    fn ball_enumeration() {
        assert_eq!(enumerate_ball(2, 0, 10).unwrap(), vec![GroupElement::origin(2).unwrap()]);
        assert_eq!(enumerate_ball(2, 3, 10).unwrap().len(), 8);
        let b = enumerate_ball(3, 2, 100).unwrap();
        let counts: Vec<usize> = (0..=2).map(|r| b.iter().filter(|x| x.norm() == r).count()).collect();
        assert_eq!(counts, vec![1, 2, 6]);
        assert!(b[0].is_origin());
        assert!(matches!(enumerate_ball(2, 21, 1_000_000), Err(Error::EnumerationCap { .. })));
        for (i, x) in b.iter().enumerate() {
            assert_eq!(x.index(), i as u64);
        }
    }

    #[test]
    fn serialization_round_trip() {
        let x = el(3, &[1, 0, 2]);
        assert_eq!(x.to_string(), "1,0,2");
        assert_eq!(GroupElement::origin(3).unwrap().to_string(), "");
        assert_eq!(parse_element(3, "1,0,2").unwrap(), x);
        assert!(parse_element(3, "").unwrap().is_origin());
    }

    #[test]
    fn unique_point_at_distance_one_for_binary_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_uniform_sphere(2, 1, &mut rng).unwrap(), el(2, &[1]));
        }
    }

    #[test]
    fn ball_membership() {
        let b = Ball::new(2, 2).unwrap();
        assert!(b.contains(&el(2, &[1, 1])));
        assert!(!b.contains(&el(2, &[0, 0, 1])));
        assert_eq!(b.size(), Some(4));
    }
}
