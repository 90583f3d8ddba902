use num_bigint::BigInt;
use num_rational::BigRational;

use super::{cycle_arms, path_arms, Arm, Corridor, CorridorKind, PairFault};
use crate::eps::Eps;
use crate::polygon::{inside2, Polygon};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorridorInput {
    Path(Polygon),
    Cycle { outer: Polygon, inner: Polygon },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    NotRectilinear,
    OutsideKnapsack,
    EdgeCountMismatch,
    CycleParity,
    InnerNotInside,
    NotParallel,
    NoOverlap,
    NoWitness,
    TooThick,
    TooShort,
    BadCells,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseViolation {
    pub clause: Clause,
    /// Edge index `j` of the offending pair, when the clause concerns one.
    pub edge: Option<usize>,
}

impl ClauseViolation {
    fn global(clause: Clause) -> ClauseViolation {
        ClauseViolation { clause, edge: None }
    }

    fn at(clause: Clause, edge: usize) -> ClauseViolation {
        ClauseViolation {
            clause,
            edge: Some(edge),
        }
    }
}

/// Validates a corridor against the thinness bound `eps * eps_large * n` and
/// the edge length bound `eps_large * n / 2`. The given vertex order is tried
/// first; if it fails, every cyclic relabelling is tried. On failure the
/// violations of the given labelling are returned.
pub fn check_corridor(
    input: &CorridorInput,
    eps: Eps,
    eps_large: &BigRational,
    n: i64,
) -> Result<Corridor, Vec<ClauseViolation>> {
    let mut basic = Vec::new();
    let polys: Vec<&Polygon> = match input {
        CorridorInput::Path(p) => vec![p],
        CorridorInput::Cycle { outer, inner } => vec![outer, inner],
    };
    if polys.iter().any(|p| !p.is_rectilinear()) {
        basic.push(ClauseViolation::global(Clause::NotRectilinear));
    }
    if polys
        .iter()
        .flat_map(|p| &p.vertices)
        .any(|v| v.x < 0 || v.y < 0 || v.x > n || v.y > n)
    {
        basic.push(ClauseViolation::global(Clause::OutsideKnapsack));
    }
    if let CorridorInput::Cycle { outer, inner } = input {
        if outer.len() != inner.len() {
            basic.push(ClauseViolation::global(Clause::EdgeCountMismatch));
        } else if outer.len() % 2 == 1 || outer.len() < 4 {
            basic.push(ClauseViolation::global(Clause::CycleParity));
        }
        if !inner_strictly_inside(outer, inner) {
            basic.push(ClauseViolation::global(Clause::InnerNotInside));
        }
    }
    if !basic.is_empty() {
        return Err(basic);
    }

    let labellings: Vec<(Polygon, Option<Polygon>)> = match input {
        CorridorInput::Path(p) => (0..p.len()).map(|s| (p.rotated(s), None)).collect(),
        CorridorInput::Cycle { outer, inner } => [inner.clone(), inner.reversed()]
            .iter()
            .flat_map(|inn| {
                (0..inn.len())
                    .map(|s| (outer.clone(), Some(inn.rotated(s))))
                    .collect::<Vec<_>>()
            })
            .collect(),
    };
    let mut first_failure = None;
    for (out, inn) in labellings {
        let violations = labelling_violations(&out, inn.as_ref(), eps, eps_large, n);
        if violations.is_empty() {
            let (kind, arms) = match &inn {
                None => (CorridorKind::Path, path_arms(&out).expect("checked")),
                Some(i) => (CorridorKind::Cycle, cycle_arms(&out, i).expect("checked")),
            };
            match Corridor::assemble(kind, out, inn, n, arms) {
                Ok(c) => return Ok(c),
                Err(_) => {
                    first_failure.get_or_insert(vec![ClauseViolation::global(Clause::BadCells)]);
                }
            }
        } else {
            first_failure.get_or_insert(violations);
        }
    }
    Err(first_failure.unwrap_or_default())
}

fn labelling_violations(
    outer: &Polygon,
    inner: Option<&Polygon>,
    eps: Eps,
    eps_large: &BigRational,
    n: i64,
) -> Vec<ClauseViolation> {
    let arms: Result<Vec<Arm>, (usize, PairFault)> = match inner {
        None => path_arms(outer),
        Some(i) => cycle_arms(outer, i),
    };
    let arms = match arms {
        Ok(a) => a,
        Err((j, fault)) => {
            let clause = match fault {
                PairFault::NotParallel => Clause::NotParallel,
                PairFault::NoOverlap => Clause::NoOverlap,
                PairFault::NoWitness => Clause::NoWitness,
            };
            return vec![ClauseViolation::at(clause, j)];
        }
    };
    let offset = if inner.is_some() { 0 } else { 1 };
    let mut out = Vec::new();
    for (idx, arm) in arms.iter().enumerate() {
        let j = idx + offset;
        if !thin_enough(arm.thickness(), eps, eps_large, n) {
            out.push(ClauseViolation::at(Clause::TooThick, j));
        }
        if !long_enough(arm.first.len(), eps_large, n)
            || !long_enough(arm.second.len(), eps_large, n)
        {
            out.push(ClauseViolation::at(Clause::TooShort, j));
        }
    }
    out
}

/// `t < eps * eps_large * n`
pub fn thin_enough(t: i64, eps: Eps, eps_large: &BigRational, n: i64) -> bool {
    BigInt::from(t) * BigInt::from(eps.inv()) * eps_large.denom()
        < eps_large.numer() * BigInt::from(n)
}

/// `len >= eps_large * n / 2`
pub fn long_enough(len: i64, eps_large: &BigRational, n: i64) -> bool {
    BigInt::from(2 * len) * eps_large.denom() >= eps_large.numer() * BigInt::from(n)
}

fn inner_strictly_inside(outer: &Polygon, inner: &Polygon) -> bool {
    let vertices_inside = inner.vertices.iter().all(|v| {
        let (x2, y2) = (2 * v.x, 2 * v.y);
        !outer.on_boundary2(x2, y2) && inside2(&[outer], x2, y2)
    });
    let crossing = outer.edges().any(|e| {
        inner.edges().any(|f| {
            let (ex0, ex1) = (e.a.x.min(e.b.x), e.a.x.max(e.b.x));
            let (ey0, ey1) = (e.a.y.min(e.b.y), e.a.y.max(e.b.y));
            let (fx0, fx1) = (f.a.x.min(f.b.x), f.a.x.max(f.b.x));
            let (fy0, fy1) = (f.a.y.min(f.b.y), f.a.y.max(f.b.y));
            ex0 <= fx1 && fx0 <= ex1 && ey0 <= fy1 && fy0 <= ey1
        })
    });
    vertices_inside && !crossing
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ratio;
    use crate::geom::Rect;
    use crate::polygon::Point;

    fn eps2() -> Eps {
        Eps::from_inverse(2).unwrap()
    }

    #[test]
    fn thin_rectangle_is_a_box() {
        // N=100, eps=1/2, eps_large=1/5: thickness bound 10, length bound 10
        let r = Polygon::from_rect(&Rect::new(10, 10, 20, 5));
        let c = check_corridor(&CorridorInput::Path(r), eps2(), &ratio(1, 5), 100).unwrap();
        assert_eq!(c.subcorridor_count(), 1);
        assert_eq!(c.arms[0].thickness(), 5);
    }

    #[test]
    fn l_hexagon_is_valid() {
        // arms of length 30 and 25, thickness 4 < 10
        let p = Polygon::new(vec![
            Point::new(0, 0),
            Point::new(30, 0),
            Point::new(30, 4),
            Point::new(4, 4),
            Point::new(4, 25),
            Point::new(0, 25),
        ]);
        let c = check_corridor(&CorridorInput::Path(p), eps2(), &ratio(1, 5), 100).unwrap();
        assert_eq!(c.subcorridor_count(), 2);
        // witnesses are integral and strictly inside each overlap
        for arm in &c.arms {
            assert_eq!(arm.witness.at2 % 2, 0);
        }
    }

    #[test]
    fn thick_rectangle_rejected() {
        let r = Polygon::from_rect(&Rect::new(0, 0, 40, 10));
        let err = check_corridor(&CorridorInput::Path(r), eps2(), &ratio(1, 5), 100).unwrap_err();
        assert!(err.iter().any(|v| v.clause == Clause::TooThick));
    }

    #[test]
    fn short_arm_rejected() {
        let r = Polygon::from_rect(&Rect::new(0, 0, 8, 3));
        let err = check_corridor(&CorridorInput::Path(r), eps2(), &ratio(1, 5), 100).unwrap_err();
        assert!(err
            .iter()
            .any(|v| v.clause == Clause::TooShort && v.edge.is_some()));
    }

    #[test]
    fn ring_cycle_checks() {
        let outer = Polygon::from_rect(&Rect::new(0, 0, 40, 40));
        let inner = Polygon::from_rect(&Rect::new(3, 3, 34, 34));
        let c = check_corridor(
            &CorridorInput::Cycle { outer, inner },
            eps2(),
            &ratio(1, 5),
            100,
        )
        .unwrap();
        assert_eq!(c.subcorridor_count(), 4);
        let outer = Polygon::from_rect(&Rect::new(0, 0, 40, 40));
        let inner = Polygon::from_rect(&Rect::new(0, 3, 34, 34));
        let err = check_corridor(
            &CorridorInput::Cycle { outer, inner },
            eps2(),
            &ratio(1, 5),
            100,
        )
        .unwrap_err();
        assert!(err.iter().any(|v| v.clause == Clause::InnerNotInside));
    }
}
