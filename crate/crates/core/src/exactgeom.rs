//! Exact rational planar predicates.
//!
//! Every predicate here works on arbitrary-precision rationals; nothing is
//! rounded and there is no tolerance anywhere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Builds `num/den` as a reduced rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rat(s: &str) -> Result<Rational, GeomError> {
    let bad = || GeomError::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Largest integer not above `r`.
pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// `r mod period`, landing in `[0, period)`.
pub fn rem_euclid(r: &Rational, period: &Rational) -> Rational {
    let k = (r / period).floor();
    r - k * period
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("degenerate segment: both endpoints are {0}")]
    DegenerateSegment(Box<RatPoint>),
    #[error("degenerate local star: a direction vector is zero")]
    DegenerateStar,
    #[error("local star has strands sharing a direction; shared portions are overlaps, not points")]
    SharedDirection,
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RatPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RatPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RatPoint::new(int(x), int(y))
    }

    /// Convenience for `(xn/xd, yn/yd)`.
    pub fn frac(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        RatPoint::new(rat(xn, xd), rat(yn, yd))
    }

    pub fn zero() -> Self {
        RatPoint::new(Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, k: &Rational) -> RatPoint {
        RatPoint::new(&self.x * k, &self.y * k)
    }

    /// Left-hand perpendicular `(-y, x)`.
    pub fn perp(&self) -> RatPoint {
        RatPoint::new(-self.y.clone(), self.x.clone())
    }

    /// `|x| + |y|`, the rational stand-in for a length.
    pub fn l1(&self) -> Rational {
        self.x.abs() + self.y.abs()
    }

    pub fn lerp(&self, other: &RatPoint, t: &Rational) -> RatPoint {
        self + &(other - self).scale(t)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl<'a> Add<&'a RatPoint> for &'a RatPoint {
    type Output = RatPoint;
    fn add(self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a RatPoint> for &'a RatPoint {
    type Output = RatPoint;
    fn sub(self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Add for RatPoint {
    type Output = RatPoint;
    fn add(self, o: RatPoint) -> RatPoint {
        &self + &o
    }
}

impl Sub for RatPoint {
    type Output = RatPoint;
    fn sub(self, o: RatPoint) -> RatPoint {
        &self - &o
    }
}

impl Neg for RatPoint {
    type Output = RatPoint;
    fn neg(self) -> RatPoint {
        RatPoint::new(-self.x, -self.y)
    }
}

impl<'a> Mul<&'a Rational> for &'a RatPoint {
    type Output = RatPoint;
    fn mul(self, k: &Rational) -> RatPoint {
        self.scale(k)
    }
}

impl Serialize for RatPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [rat_to_string(&self.x), rat_to_string(&self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        Ok(RatPoint::new(
            parse_rat(&x).map_err(D::Error::custom)?,
            parse_rat(&y).map_err(D::Error::custom)?,
        ))
    }
}

/// Serde adapter for a bare rational stored as a `"p/q"` string.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        rat_to_string(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rat(&text).map_err(D::Error::custom)
    }
}

pub fn cross(u: &RatPoint, v: &RatPoint) -> Rational {
    &u.x * &v.y - &u.y * &v.x
}

pub fn dot(u: &RatPoint, v: &RatPoint) -> Rational {
    &u.x * &v.x + &u.y * &v.y
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn of(v: &Rational) -> Self {
        if v.is_positive() {
            Orientation::CounterClockwise
        } else if v.is_negative() {
            Orientation::Clockwise
        } else {
            Orientation::Collinear
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }
}

/// Sign of `det(q - p, r - p)`.
pub fn orient(p: &RatPoint, q: &RatPoint, r: &RatPoint) -> Orientation {
    Orientation::of(&cross(&(q - p), &(r - p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub a: RatPoint,
    pub b: RatPoint,
}

impl Segment {
    pub fn new(a: RatPoint, b: RatPoint) -> Result<Self, GeomError> {
        if a == b {
            return Err(GeomError::DegenerateSegment(Box::new(a)));
        }
        Ok(Segment { a, b })
    }

    pub fn dir(&self) -> RatPoint {
        &self.b - &self.a
    }

    pub fn translate(&self, v: &RatPoint) -> Segment {
        Segment { a: &self.a + v, b: &self.b + v }
    }

    pub fn reversed(&self) -> Segment {
        Segment { a: self.b.clone(), b: self.a.clone() }
    }

    pub fn min_x(&self) -> &Rational {
        std::cmp::min(&self.a.x, &self.b.x)
    }
    pub fn max_x(&self) -> &Rational {
        std::cmp::max(&self.a.x, &self.b.x)
    }
    pub fn min_y(&self) -> &Rational {
        std::cmp::min(&self.a.y, &self.b.y)
    }
    pub fn max_y(&self) -> &Rational {
        std::cmp::max(&self.a.y, &self.b.y)
    }

    /// Parameter `t` with `a + t (b - a) = p`, assuming `p` lies on the line.
    pub fn param_of(&self, p: &RatPoint) -> Rational {
        let d = self.dir();
        dot(&(p - &self.a), &d) / dot(&d, &d)
    }

    pub fn at(&self, t: &Rational) -> RatPoint {
        self.a.lerp(&self.b, t)
    }

    pub fn contains(&self, p: &RatPoint) -> bool {
        if orient(&self.a, &self.b, p) != Orientation::Collinear {
            return false;
        }
        let t = self.param_of(p);
        !t.is_negative() && t <= Rational::one()
    }

    /// Endpoints ordered lexicographically, so equal point sets compare equal.
    pub fn normalized(&self) -> Segment {
        if self.a <= self.b {
            self.clone()
        } else {
            self.reversed()
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentIntersection {
    Empty,
    Point(RatPoint),
    Overlap(Segment),
}

/// Exact intersection of two closed segments.
pub fn segment_intersect(s: &Segment, t: &Segment) -> SegmentIntersection {
    let r = s.dir();
    let d = t.dir();
    let denom = cross(&r, &d);
    let qp = &t.a - &s.a;
    if denom.is_zero() {
        if !cross(&qp, &r).is_zero() {
            return SegmentIntersection::Empty;
        }
        // collinear: clip t's parameter range against [0, 1] along s
        let rr = dot(&r, &r);
        let t0 = dot(&qp, &r) / &rr;
        let t1 = dot(&(&t.b - &s.a), &r) / &rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let lo = std::cmp::max(lo, Rational::zero());
        let hi = std::cmp::min(hi, Rational::one());
        return match lo.cmp(&hi) {
            std::cmp::Ordering::Greater => SegmentIntersection::Empty,
            std::cmp::Ordering::Equal => SegmentIntersection::Point(s.at(&lo)),
            std::cmp::Ordering::Less => {
                SegmentIntersection::Overlap(Segment { a: s.at(&lo), b: s.at(&hi) })
            }
        };
    }
    let lambda = cross(&qp, &d) / &denom;
    let mu = cross(&qp, &r) / &denom;
    let unit = |v: &Rational| !v.is_negative() && *v <= Rational::one();
    if unit(&lambda) && unit(&mu) {
        SegmentIntersection::Point(s.at(&lambda))
    } else {
        SegmentIntersection::Empty
    }
}

/// The four outgoing strand directions at a shared point of two curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalStar {
    pub center: RatPoint,
    pub dirs_a: [RatPoint; 2],
    pub dirs_b: [RatPoint; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalKind {
    Crossing,
    Touching,
}

fn same_ray(u: &RatPoint, v: &RatPoint) -> bool {
    cross(u, v).is_zero() && dot(u, v).is_positive()
}

/// Whether `v` lies strictly inside the counterclockwise sweep from `from` to `to`.
fn in_ccw_sector(from: &RatPoint, to: &RatPoint, v: &RatPoint) -> bool {
    let c = cross(from, to);
    if c.is_positive() {
        cross(from, v).is_positive() && cross(v, to).is_positive()
    } else if c.is_negative() {
        // reflex sweep: inside unless in the closed complementary convex sweep
        !(!cross(to, v).is_negative() && !cross(v, from).is_negative())
    } else {
        // `from` and `to` are opposite rays
        cross(from, v).is_positive()
    }
}

/// Crossing iff the strands of B lie on different sides of A's two strands.
pub fn classify_local(star: &LocalStar) -> Result<LocalKind, GeomError> {
    let all = star.dirs_a.iter().chain(star.dirs_b.iter());
    if all.clone().any(RatPoint::is_zero) {
        return Err(GeomError::DegenerateStar);
    }
    let [a0, a1] = &star.dirs_a;
    if same_ray(a0, a1) {
        return Err(GeomError::SharedDirection);
    }
    for b in &star.dirs_b {
        if same_ray(b, a0) || same_ray(b, a1) {
            return Err(GeomError::SharedDirection);
        }
    }
    let s0 = in_ccw_sector(a0, a1, &star.dirs_b[0]);
    let s1 = in_ccw_sector(a0, a1, &star.dirs_b[1]);
    Ok(if s0 != s1 { LocalKind::Crossing } else { LocalKind::Touching })
}

/// Axis-aligned rational rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub min: RatPoint,
    pub max: RatPoint,
}

impl Rect {
    pub fn new(min: RatPoint, max: RatPoint) -> Self {
        Rect { min, max }
    }

    pub fn width(&self) -> Rational {
        &self.max.x - &self.min.x
    }

    pub fn height(&self) -> Rational {
        &self.max.y - &self.min.y
    }

    pub fn translate(&self, v: &RatPoint) -> Rect {
        Rect::new(&self.min + v, &self.max + v)
    }

    pub fn contains_closed(&self, p: &RatPoint) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }

    pub fn contains_open(&self, p: &RatPoint) -> bool {
        self.min.x < p.x && p.x < self.max.x && self.min.y < p.y && p.y < self.max.y
    }

    pub fn on_boundary(&self, p: &RatPoint) -> bool {
        self.contains_closed(p) && !self.contains_open(p)
    }

    pub fn intersects_closed(&self, o: &Rect) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    /// Whether the closed segment meets the open interior of the rectangle.
    pub fn segment_enters_interior(&self, s: &Segment) -> bool {
        // Liang-Barsky on open slabs; track the t-interval as (lo, hi) with openness flags.
        let mut lo = (Rational::zero(), false);
        let mut hi = (Rational::one(), false);
        let d = s.dir();
        for (p0, dp, mn, mx) in [
            (&s.a.x, &d.x, &self.min.x, &self.max.x),
            (&s.a.y, &d.y, &self.min.y, &self.max.y),
        ] {
            if dp.is_zero() {
                if !(mn < p0 && p0 < mx) {
                    return false;
                }
                continue;
            }
            let ta = (mn - p0) / dp;
            let tb = (mx - p0) / dp;
            let (t_enter, t_exit) = if ta < tb { (ta, tb) } else { (tb, ta) };
            if t_enter > lo.0 || (t_enter == lo.0 && !lo.1) {
                lo = (t_enter, true);
            }
            if t_exit < hi.0 || (t_exit == hi.0 && !hi.1) {
                hi = (t_exit, true);
            }
        }
        lo.0 < hi.0 || (lo.0 == hi.0 && !lo.1 && !hi.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> RatPoint {
        RatPoint::from_ints(x, y)
    }

    fn seg(a: RatPoint, b: RatPoint) -> Segment {
        Segment::new(a, b).unwrap()
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)).sign(), 1);
        assert_eq!(orient(&p(0, 0), &p(1, 1), &p(2, 2)).sign(), 0);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)).sign(), -1);
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(
            segment_intersect(&seg(p(0, 0), p(1, 1)), &seg(p(0, 1), p(1, 0))),
            SegmentIntersection::Point(RatPoint::frac(1, 2, 1, 2))
        );
        assert_eq!(
            segment_intersect(&seg(p(0, 0), p(2, 0)), &seg(p(1, 0), p(3, 0))),
            SegmentIntersection::Overlap(seg(p(1, 0), p(2, 0)))
        );
        assert_eq!(
            segment_intersect(&seg(p(0, 0), p(1, 0)), &seg(p(0, 1), p(1, 1))),
            SegmentIntersection::Empty
        );
    }

    #[test]
    fn intersect_touching_endpoints_and_collinear_point() {
        assert_eq!(
            segment_intersect(&seg(p(0, 0), p(1, 0)), &seg(p(1, 0), p(2, 5))),
            SegmentIntersection::Point(p(1, 0))
        );
        assert_eq!(
            segment_intersect(&seg(p(0, 0), p(1, 0)), &seg(p(1, 0), p(2, 0))),
            SegmentIntersection::Point(p(1, 0))
        );
        assert_eq!(
            segment_intersect(&seg(p(0, 0), p(1, 0)), &seg(p(2, 0), p(3, 0))),
            SegmentIntersection::Empty
        );
    }

    fn star(a: [(i64, i64); 2], b: [(i64, i64); 2]) -> LocalStar {
        LocalStar {
            center: p(0, 0),
            dirs_a: [p(a[0].0, a[0].1), p(a[1].0, a[1].1)],
            dirs_b: [p(b[0].0, b[0].1), p(b[1].0, b[1].1)],
        }
    }

    /// Independent oracle: sort the four rays by angle (atan2 is fine in a test
    /// oracle for small integer vectors) and check whether the labels alternate.
    fn alternation_oracle(s: &LocalStar) -> LocalKind {
        let mut rays: Vec<(f64, char)> = Vec::new();
        for d in &s.dirs_a {
            let (x, y) = d.to_f64();
            rays.push((y.atan2(x), 'a'));
        }
        for d in &s.dirs_b {
            let (x, y) = d.to_f64();
            rays.push((y.atan2(x), 'b'));
        }
        rays.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap());
        let labels: Vec<char> = rays.iter().map(|r| r.1).collect();
        let alternating = labels.windows(2).all(|w| w[0] != w[1]);
        if alternating {
            LocalKind::Crossing
        } else {
            LocalKind::Touching
        }
    }

    #[test]
    fn classify_examples() {
        let x = star([(1, 0), (-1, 0)], [(0, 1), (0, -1)]);
        assert_eq!(classify_local(&x).unwrap(), LocalKind::Crossing);
        let t = star([(1, 0), (-1, 0)], [(1, 1), (-1, 1)]);
        assert_eq!(classify_local(&t).unwrap(), LocalKind::Touching);
        // Both B strands satisfy y < x, i.e. lie on the same side of A's line y = x.
        let third = star([(1, 1), (-1, -1)], [(1, -1), (2, 1)]);
        assert_eq!(alternation_oracle(&third), LocalKind::Touching);
        assert_eq!(classify_local(&third).unwrap(), LocalKind::Touching);
    }

    #[test]
    fn classify_bent_strands() {
        // A bends at the center (reflex and convex sweeps both exercised)
        let cases = [
            star([(1, 0), (0, 1)], [(1, 1), (-1, -1)]),
            star([(1, 0), (0, 1)], [(-1, 2), (2, -1)]),
            star([(0, 1), (1, 0)], [(1, 1), (-1, -1)]),
            star([(1, 0), (-1, 1)], [(0, -1), (1, 3)]),
        ];
        for s in cases {
            assert_eq!(classify_local(&s).unwrap(), alternation_oracle(&s), "{s:?}");
        }
    }

    #[test]
    fn classify_errors() {
        let z = star([(0, 0), (-1, 0)], [(0, 1), (0, -1)]);
        assert_eq!(classify_local(&z), Err(GeomError::DegenerateStar));
        let shared = star([(1, 0), (-1, 0)], [(2, 0), (0, -1)]);
        assert_eq!(classify_local(&shared), Err(GeomError::SharedDirection));
    }

    #[test]
    fn degenerate_segment_rejected() {
        assert!(Segment::new(p(1, 1), p(1, 1)).is_err());
    }

    #[test]
    fn rect_interior_entry() {
        let r = Rect::new(p(0, 0), p(2, 2));
        assert!(r.segment_enters_interior(&seg(p(-1, 1), p(3, 1))));
        assert!(!r.segment_enters_interior(&seg(p(-1, 0), p(3, 0))));
        assert!(!r.segment_enters_interior(&seg(p(2, -1), p(2, 3))));
        assert!(!r.segment_enters_interior(&seg(p(-1, 3), p(3, -1)).translate(&p(-2, -2))));
        assert!(r.segment_enters_interior(&seg(p(1, 1), p(5, 5))));
        assert!(!r.segment_enters_interior(&seg(p(2, 2), p(5, 5))));
    }

    #[test]
    fn rational_text_round_trip() {
        let r = rat(-6, 4);
        assert_eq!(rat_to_string(&r), "-3/2");
        assert_eq!(parse_rat("-3/2").unwrap(), r);
        assert_eq!(rat_to_string(&int(2)), "2/1");
        assert!(parse_rat("1/0").is_err());
    }
}
