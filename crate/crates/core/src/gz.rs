//! Parity colouring of rational unit vectors in three dimensions.
//!
//! A rational unit vector has a unique primitive integer form `(x, y, z)/n`
//! with `x² + y² + z² = n²` and `gcd(x, y, z) = 1`. Working mod 4, exactly one
//! of `x, y, z` is odd. Two orthogonal primitive vectors cannot be odd in the
//! same position (their dot product would be odd), so the members of an
//! orthogonal triad are odd in distinct positions. Colouring a vector 1 exactly
//! when its odd component sits in a fixed position gives every triad one 1.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Position of the odd component that receives colour 1.
pub const DESIGNATED_POSITION: usize = 0;

/// Primitive form `(x, y, z)/norm` of a rational unit vector, sign-normalized
/// so the first nonzero component is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RationalUnitVector {
    components: [i64; 3],
    norm: i64,
}

impl RationalUnitVector {
    pub fn new(components: [i64; 3], norm: i64) -> Result<Self> {
        if norm <= 0 {
            return Err(Error::InvalidRationalVector(format!("norm {norm} is not positive")));
        }
        let overflow = || Error::InvalidRationalVector("components overflow 64-bit arithmetic".into());
        let mut sum = 0i64;
        for c in components {
            sum = c.checked_mul(c).and_then(|s| sum.checked_add(s)).ok_or_else(overflow)?;
        }
        if Some(sum) != norm.checked_mul(norm) {
            return Err(Error::InvalidRationalVector(format!("{components:?} has squared length {sum}, not {norm}²")));
        }
        let odd = components.iter().filter(|c| c.is_odd()).count();
        if odd != 1 {
            return Err(Error::InvalidRationalVector(format!(
                "{components:?} has {odd} odd components, expected exactly one"
            )));
        }
        let g = components.iter().fold(0i64, |g, c| g.gcd(c));
        if g != 1 {
            return Err(Error::InvalidRationalVector(format!("{components:?} is not primitive")));
        }
        Ok(Self { components: sign_normalized(components), norm })
    }

    pub fn components(&self) -> [i64; 3] {
        self.components
    }

    pub fn norm(&self) -> i64 {
        self.norm
    }

    /// Index of the unique odd component.
    pub fn odd_position(&self) -> usize {
        self.components.iter().position(|c| c.is_odd()).expect("constructed with exactly one odd component")
    }

    /// Integer dot product of the primitive forms.
    pub fn dot(&self, other: &Self) -> i128 {
        self.components.iter().zip(other.components).map(|(&a, b)| a as i128 * b as i128).sum()
    }

    pub fn to_f64(&self) -> [f64; 3] {
        let n = self.norm as f64;
        self.components.map(|c| c as f64 / n)
    }
}

impl fmt::Display for RationalUnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.components;
        write!(f, "({x}, {y}, {z})/{}", self.norm)
    }
}

fn sign_normalized(mut c: [i64; 3]) -> [i64; 3] {
    if c.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        c = c.map(|x| -x);
    }
    c
}

/// Canonical primitive form of a rational direction.
///
/// Any nonzero rational multiple of a rational unit vector is accepted; a
/// direction of irrational length is rejected.
pub fn reduce(raw: &[BigRational; 3]) -> Result<RationalUnitVector> {
    if raw.iter().all(Zero::is_zero) {
        return Err(Error::NotUnitNormalizable("zero vector".into()));
    }
    let lcm = raw.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let ints: Vec<BigInt> = raw.iter().map(|r| (r * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let ints: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    let sum: BigInt = ints.iter().map(|x| x * x).sum();
    let n = sum.sqrt();
    if &n * &n != sum {
        return Err(Error::NotUnitNormalizable(format!(
            "squared length {sum} of the primitive direction is not a perfect square"
        )));
    }
    let to_i64 =
        |x: &BigInt| x.to_i64().ok_or_else(|| Error::NotUnitNormalizable("components exceed 64-bit range".into()));
    let comps = [to_i64(&ints[0])?, to_i64(&ints[1])?, to_i64(&ints[2])?];
    RationalUnitVector::new(comps, to_i64(&n)?)
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// 1 iff the odd component is in [`DESIGNATED_POSITION`].
pub fn gz_colour(v: &RationalUnitVector) -> u8 {
    u8::from(v.odd_position() == DESIGNATED_POSITION)
}

/// Every rational unit vector whose primitive components satisfy
/// `|c| <= max_component`, one per ray, ordered by norm then components.
pub fn enumerate_rational_vectors(max_component: i64) -> Vec<RationalUnitVector> {
    let m = max_component;
    let mut out = Vec::new();
    for x in 0..=m {
        for y in -m..=m {
            for z in -m..=m {
                if sign_normalized([x, y, z]) != [x, y, z] || (x, y, z) == (0, 0, 0) {
                    continue;
                }
                if x.gcd(&y).gcd(&z) != 1 {
                    continue;
                }
                let s = x * x + y * y + z * z;
                let n = s.sqrt();
                if n * n == s {
                    out.push(RationalUnitVector::new([x, y, z], n).expect("primitive quadruple"));
                }
            }
        }
    }
    out.sort_by_key(|v| (v.norm, v.components));
    out
}

/// All unordered orthogonal triads drawn from [`enumerate_rational_vectors`],
/// each listed in enumeration order and the list sorted lexicographically.
pub fn enumerate_rational_triads(max_component: i64) -> Vec<[RationalUnitVector; 3]> {
    let vectors = enumerate_rational_vectors(max_component);
    let index: HashMap<[i64; 3], usize> = vectors.iter().enumerate().map(|(i, v)| (v.components, i)).collect();
    let mut triads = Vec::new();
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate().skip(i + 1) {
            if u.dot(v) != 0 {
                continue;
            }
            if let Some(&k) = index.get(&cross_direction(u, v)) {
                if k > j {
                    triads.push([*u, *v, vectors[k]]);
                }
            }
        }
    }
    triads
}

fn cross_direction(u: &RationalUnitVector, v: &RationalUnitVector) -> [i64; 3] {
    let [a1, a2, a3] = u.components;
    let [b1, b2, b3] = v.components;
    let c = [a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1];
    let g = c.iter().fold(0i64, |g, x| g.gcd(x));
    sign_normalized(c.map(|x| x / g))
}

/// Result of checking the parity colouring over a bounded family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GzVerification {
    pub max_component: i64,
    pub vectors: usize,
    pub triads: usize,
    pub violations: usize,
    pub first_violation: Option<[RationalUnitVector; 3]>,
}

impl GzVerification {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn verify(max_component: i64) -> GzVerification {
    let triads = enumerate_rational_triads(max_component);
    let bad: Vec<_> = triads.iter().filter(|t| t.iter().map(gz_colour).sum::<u8>() != 1).collect();
    GzVerification {
        max_component,
        vectors: enumerate_rational_vectors(max_component).len(),
        triads: triads.len(),
        violations: bad.len(),
        first_violation: bad.first().map(|t| **t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn red(a: &str, b: &str, c: &str) -> RationalUnitVector {
        reduce(&[r(a), r(b), r(c)]).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let v = red("3/5", "4/5", "0");
        assert_eq!((v.components(), v.norm()), ([3, 4, 0], 5));
        let v = red("0", "0", "-1");
        assert_eq!((v.components(), v.norm()), ([0, 0, 1], 1));
        let v = red("2/3", "2/3", "1/3");
        assert_eq!((v.components(), v.norm()), ([2, 2, 1], 3));
        let v = red("-6", "-8", "0");
        assert_eq!((v.components(), v.norm()), ([3, 4, 0], 5));
    }

    #[test]
    fn reduce_rejects_irrational_length_and_zero() {
        assert!(matches!(reduce(&[r("1"), r("1"), r("0")]), Err(Error::NotUnitNormalizable(_))));
        assert!(reduce(&[r("0"), r("0"), r("0")]).is_err());
    }

    #[test]
    fn colour_examples() {
        assert_eq!(gz_colour(&red("1", "0", "0")), 1);
        assert_eq!(gz_colour(&red("0", "1", "0")), 0);
        assert_eq!(gz_colour(&red("0", "0", "1")), 0);
        assert_eq!(gz_colour(&red("3/5", "4/5", "0")), 1);
        assert_eq!(gz_colour(&red("0", "3/5", "4/5")), 0);
    }

    #[test]
    fn construction_rejects_bad_forms() {
        assert!(RationalUnitVector::new([2, 0, 0], 2).is_err());
        assert!(RationalUnitVector::new([6, 8, 0], 10).is_err());
        assert!(RationalUnitVector::new([1, 1, 0], 1).is_err());
        assert!(RationalUnitVector::new([1, 0, 0], -1).is_err());
        assert!(RationalUnitVector::new([i64::MAX, 0, 0], 1).is_err());
    }

    #[test]
    fn max_component_one_is_standard_basis() {
        let t = enumerate_rational_triads(1);
        assert_eq!(t.len(), 1);
        let comps: Vec<[i64; 3]> = t[0].iter().map(|v| v.components()).collect();
        assert_eq!(comps, vec![[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
    }

    #[test]
    fn max_component_five_contains_pythagorean_triad() {
        let mut want = vec![[3, 4, 0], [4, -3, 0], [0, 0, 1]];
        want.sort();
        assert!(enumerate_rational_triads(5).iter().any(|tri| {
            let mut c: Vec<[i64; 3]> = tri.iter().map(|v| v.components()).collect();
            c.sort();
            c == want
        }));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(r("-3/6"), BigRational::new((-1).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
