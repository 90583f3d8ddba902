use super::{Arm, Corridor, Subcorridor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    Box,
    L,
    U,
    Z,
    Spiral,
    TwoSpiral,
    Other,
}

impl ShapeClass {
    pub fn is_box_l_or_u(self) -> bool {
        matches!(self, ShapeClass::Box | ShapeClass::L | ShapeClass::U)
    }
}

/// An arm is acute when the projection of one of its edges contains the
/// other's; otherwise it is obtuse.
pub fn is_acute(arm: &Arm) -> bool {
    let ((a0, a1), (b0, b1)) = arm.edge_projections();
    (a0 <= b0 && b1 <= a1) || (b0 <= a0 && a1 <= b1)
}

/// Box, L, U/Z for paths with up to three pieces; longer paths are spirals
/// when every piece is acute and 2-spirals when exactly one is obtuse.
/// Cycles are always `Other`.
pub fn classify_shape(corridor: &Corridor, partition: &[Subcorridor]) -> ShapeClass {
    debug_assert_eq!(partition.len(), corridor.subcorridor_count());
    if corridor.is_cycle() {
        return ShapeClass::Other;
    }
    let arms = &corridor.arms;
    match arms.len() {
        1 => ShapeClass::Box,
        2 => ShapeClass::L,
        3 => {
            if is_acute(&arms[1]) {
                ShapeClass::U
            } else {
                ShapeClass::Z
            }
        }
        _ => match arms.iter().filter(|a| !is_acute(a)).count() {
            0 => ShapeClass::Spiral,
            1 => ShapeClass::TwoSpiral,
            _ => ShapeClass::Other,
        },
    }
}

/// Shape of a corridor on its own, using an empty nice partition.
pub(crate) fn shape_of(corridor: &Corridor) -> ShapeClass {
    let pieces = super::nice_partition(corridor, &[]).expect("empty partition always exists");
    classify_shape(corridor, &pieces)
}
