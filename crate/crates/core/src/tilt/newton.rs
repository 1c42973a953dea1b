//! Newton polygons of polynomials with valued coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Val, Q};

/// One edge of the lower convex hull.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    /// Hull slope; the roots on this edge have valuation `-slope`.
    #[serde(serialize_with = "ser_q")]
    pub slope: Q,
    #[serde(serialize_with = "ser_q")]
    pub root_valuation: Q,
    pub multiplicity: u32,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

/// Lower convex hull of `(degree, valuation)` points, edges left to right so
/// hull slopes strictly increase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Root valuations with multiplicity, smallest first.
    pub fn root_valuations(&self) -> Vec<(Q, u32)> {
        let mut v: Vec<(Q, u32)> =
            self.segments.iter().map(|s| (s.root_valuation, s.multiplicity)).collect();
        v.sort();
        v
    }

    pub fn num_roots(&self) -> u32 {
        self.segments.iter().map(|s| s.multiplicity).sum()
    }
}

/// Newton polygon of `Σ c_d x^d` from the coefficient valuations.
///
/// Points at `+inf` (zero coefficients) are skipped; the top-degree point must
/// be finite.
pub fn newton_polygon(vals: &[(u32, Val)]) -> Result<NewtonPolygon> {
    let mut pts: Vec<(u32, Q)> = Vec::new();
    for &(d, v) in vals {
        match v {
            Val::Finite(x) => pts.push((d, x)),
            Val::PosInf => {}
            Val::NegInf => {
                return Err(Error::Precondition("coefficient valuation -inf".into()));
            }
        }
    }
    pts.sort_by_key(|&(d, _)| d);
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Precondition("repeated degree in Newton polygon input".into()));
    }
    if pts.len() < 2 {
        return Err(Error::DegeneratePolygon);
    }
    let top = vals.iter().map(|&(d, _)| d).max().unwrap_or(0);
    if pts.last().map(|&(d, _)| d) != Some(top) {
        return Err(Error::Precondition("leading coefficient has infinite valuation".into()));
    }
    // monotone chain, lower hull
    let mut hull: Vec<(u32, Q)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if !turns_left(a, b, pt) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (d0, v0) = w[0];
            let (d1, v1) = w[1];
            let slope = (v1 - v0) / Q::from_integer(i64::from(d1 - d0));
            Segment { slope, root_valuation: -slope, multiplicity: d1 - d0 }
        })
        .collect();
    Ok(NewtonPolygon { segments })
}

/// Strict convexity test: `c` lies strictly above the line through `a`, `b`
/// extended, i.e. the chain `a → b → c` bends upward.
fn turns_left(a: (u32, Q), b: (u32, Q), c: (u32, Q)) -> bool {
    let (ax, bx, cx) = (Q::from(i64::from(a.0)), Q::from(i64::from(b.0)), Q::from(i64::from(c.0)));
    (bx - ax) * (c.1 - a.1) - (b.1 - a.1) * (cx - ax) > Q::from(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn square_root_of_p() {
        let np = newton_polygon(&[(0, Val::Finite(q(1, 1))), (2, Val::Finite(q(0, 1)))]).unwrap();
        assert_eq!(np.root_valuations(), vec![(q(1, 2), 2)]);
    }

    #[test]
    fn additive_polynomial_at_p3() {
        // x^9 − t^9 x − c with ord t = 1/3, ord c = 9/8
        let np = newton_polygon(&[
            (0, Val::Finite(q(9, 8))),
            (1, Val::Finite(q(3, 1))),
            (9, Val::Finite(q(0, 1))),
        ])
        .unwrap();
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.root_valuations(), vec![(q(1, 8), 9)]);
    }

    #[test]
    fn two_slopes_and_zero_root() {
        // x^3 + p x^2 + p^3 x: the zero root at +inf is not counted
        let np = newton_polygon(&[
            (1, Val::Finite(q(3, 1))),
            (2, Val::Finite(q(1, 1))),
            (3, Val::Finite(q(0, 1))),
            (0, Val::PosInf),
        ])
        .unwrap();
        assert_eq!(np.num_roots(), 2);
        assert_eq!(np.root_valuations(), vec![(q(1, 1), 1), (q(2, 1), 1)]);
        assert!(np.segments[0].slope < np.segments[1].slope);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            newton_polygon(&[(0, Val::Finite(q(1, 1))), (1, Val::PosInf)]).unwrap_err(),
            Error::DegeneratePolygon
        );
        assert!(matches!(
            newton_polygon(&[(0, Val::Finite(q(1, 1))), (1, Val::Finite(q(0, 1))), (2, Val::PosInf)]),
            Err(Error::Precondition(_))
        ));
        assert_eq!(newton_polygon(&[(3, Val::Finite(q(0, 1)))]).unwrap_err(), Error::DegeneratePolygon);
    }
}
