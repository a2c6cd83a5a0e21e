//! Fixed inputs shared by the kernel benchmarks.

use skewlab_core::dynamics::{map_from_name, PlanarMap, RotationVector};
use skewlab_core::probes::{frequency_panel, Frequency};
use skewlab_core::{parse_real, Result, Turn, DEFAULT_BITS};

/// Rotation, map and start point for the ergodic-sum kernel.
pub fn ergodic_input() -> Result<(RotationVector, PlanarMap, [Turn; 2])> {
    let alpha = RotationVector::parse("sqrt2-1", DEFAULT_BITS)?;
    let map = map_from_name("psi", Some(1))?;
    let x = [alpha.turns()[0] / 3, 0];
    Ok((alpha, map, x))
}

pub fn arrangement_alpha() -> Result<RotationVector> {
    RotationVector::parse("sqrt2, e", DEFAULT_BITS)
}

/// Rotation, map, fiber vector and frequency panel for the Weyl kernel.
pub fn weyl_input() -> Result<(RotationVector, PlanarMap, Vec<Turn>, Vec<Frequency>)> {
    let alpha = RotationVector::parse("sqrt2-1, sqrt3-1", DEFAULT_BITS)?;
    let map = map_from_name("delta0", None)?;
    let fiber = parse_real("sqrt5-2", DEFAULT_BITS)?.to_turn();
    Ok((alpha, map, vec![fiber], frequency_panel(2, 3, 1)))
}

#[cfg(test)]
mod tests {
    #[test]
    fn inputs_build() {
        assert_eq!(super::ergodic_input().unwrap().0.rho(), 1);
        assert_eq!(super::arrangement_alpha().unwrap().rho(), 2);
        assert_eq!(super::weyl_input().unwrap().3.len(), 174);
    }
}
