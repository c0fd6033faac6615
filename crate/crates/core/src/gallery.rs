//! Bundled example systems.

use crate::ifs::{BallSpec, IfsSpec, IfsSystem, MapSpec, Similarity};

fn line_spec(name: &str, maps: &[(f64, f64)], center: f64, radius: f64) -> IfsSpec {
    IfsSpec {
        name: Some(name.to_string()),
        dim: 1,
        maps: maps
            .iter()
            .map(|&(r, t)| MapSpec::Similarity {
                ratio: r,
                isometry: None,
                translation: vec![t],
            })
            .collect(),
        bounding_ball: BallSpec {
            center: vec![center],
            radius,
        },
    }
}

/// Middle-third Cantor set `{x/3, x/3 + 2/3}`.
pub fn cantor_spec() -> IfsSpec {
    line_spec("cantor", &[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)], 0.5, 0.5)
}

/// `{x/2, x/2 + 1/2}`, attractor `[0, 1]`.
pub fn dyadic_twin_spec() -> IfsSpec {
    line_spec("dyadic-twin", &[(0.5, 0.0), (0.5, 0.5)], 0.5, 0.5)
}

/// Ratios `(1/2, 1/4, 1/4)` tiling `[0, 1]`.
pub fn half_quarter_quarter_spec() -> IfsSpec {
    line_spec(
        "half-quarter-quarter",
        &[(0.5, 0.0), (0.25, 0.5), (0.25, 0.75)],
        0.5,
        0.5,
    )
}

/// `{x/2, x/4 + 3/4}`: two ratios, attractor hull `[0, 1]`.
pub fn half_quarter_spec() -> IfsSpec {
    line_spec("half-quarter", &[(0.5, 0.0), (0.25, 0.75)], 0.5, 0.5)
}

/// Overlapping `{x/3, x/3 + t, x/3 + 2/3}` with `t = 1/√2` (stored rounded to f64).
pub fn overlapping_triple_spec() -> IfsSpec {
    let t = std::f64::consts::FRAC_1_SQRT_2;
    line_spec(
        "overlapping-triple",
        &[(1.0 / 3.0, 0.0), (1.0 / 3.0, t), (1.0 / 3.0, 2.0 / 3.0)],
        0.55,
        0.6,
    )
}

/// Sierpinski triangle on the unit-side triangle.
pub fn sierpinski_spec() -> IfsSpec {
    let h = 3f64.sqrt() / 2.0;
    IfsSpec {
        name: Some("sierpinski".into()),
        dim: 2,
        maps: [[0.0, 0.0], [0.5, 0.0], [0.25, h / 2.0]]
            .iter()
            .map(|t| MapSpec::Similarity {
                ratio: 0.5,
                isometry: None,
                translation: t.to_vec(),
            })
            .collect(),
        bounding_ball: BallSpec {
            center: vec![0.5, h / 3.0],
            radius: 0.6,
        },
    }
}

/// Planar rotation-scalings sharing the rotation angle π/6 (commuting linear parts).
pub fn conformal_rotations_spec() -> IfsSpec {
    let angle = std::f64::consts::PI / 6.0;
    let maps = [(0.5, [0.0, 0.0]), (0.4, [0.6, 0.1]), (0.3, [0.2, 0.6])]
        .iter()
        .map(|&(r, t)| MapSpec::similarity(&Similarity::rotation_scaling(r, angle, t).unwrap()))
        .collect();
    IfsSpec {
        name: Some("conformal-rotations".into()),
        dim: 2,
        maps,
        bounding_ball: BallSpec {
            center: vec![0.4, 0.4],
            radius: 1.5,
        },
    }
}

/// Cantor maps with small smooth perturbations; a genuinely non-affine C¹ system.
pub fn nonlinear_cantor_spec() -> IfsSpec {
    IfsSpec {
        name: Some("nonlinear-cantor".into()),
        dim: 1,
        maps: vec![
            MapSpec::Expr {
                map: "x1/3 + 0.02*sin(x1)".into(),
                jacobian: "1/3 + 0.02*cos(x1)".into(),
            },
            MapSpec::Expr {
                map: "x1/3 + 2/3 - 0.02*x1^2".into(),
                jacobian: "1/3 - 0.04*x1".into(),
            },
        ],
        bounding_ball: BallSpec {
            center: vec![0.5],
            radius: 0.5,
        },
    }
}

/// All bundled similarity systems, in a fixed order.
pub fn all_specs() -> Vec<IfsSpec> {
    vec![
        cantor_spec(),
        dyadic_twin_spec(),
        half_quarter_quarter_spec(),
        sierpinski_spec(),
        overlapping_triple_spec(),
        conformal_rotations_spec(),
    ]
}

/// Every bundled system, including the non-similarity example.
pub fn every_spec() -> Vec<IfsSpec> {
    let mut specs = all_specs();
    specs.push(half_quarter_spec());
    specs.push(nonlinear_cantor_spec());
    specs
}

/// Bundled system by its `name` field.
pub fn spec_named(name: &str) -> Option<IfsSpec> {
    every_spec().into_iter().find(|s| s.name.as_deref() == Some(name))
}

fn build(spec: IfsSpec) -> IfsSystem {
    spec.build().expect("gallery systems are valid")
}

pub fn cantor() -> IfsSystem {
    build(cantor_spec())
}

pub fn dyadic_twin() -> IfsSystem {
    build(dyadic_twin_spec())
}

pub fn half_quarter_quarter() -> IfsSystem {
    build(half_quarter_quarter_spec())
}

pub fn half_quarter() -> IfsSystem {
    build(half_quarter_spec())
}

pub fn overlapping_triple() -> IfsSystem {
    build(overlapping_triple_spec())
}

pub fn sierpinski() -> IfsSystem {
    build(sierpinski_spec())
}

pub fn nonlinear_cantor() -> IfsSystem {
    build(nonlinear_cantor_spec())
}

pub fn conformal_rotations() -> IfsSystem {
    build(conformal_rotations_spec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_resolvable() {
        let specs = every_spec();
        for s in &specs {
            let name = s.name.as_deref().unwrap();
            assert_eq!(spec_named(name).as_ref(), Some(s));
        }
        assert!(spec_named("nope").is_none());
    }

    #[test]
    fn every_gallery_system_builds_and_round_trips() {
        for spec in all_specs() {
            let back = IfsSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(back, spec);
            let s = spec.build().unwrap();
            assert!(s.is_similarity());
            assert!(s.attractor_diameter() <= 2.0 * s.ball().radius);
        }
    }

    #[test]
    fn overlapping_triple_hull() {
        let s = overlapping_triple();
        let t = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.attractor_diameter() - 1.5 * t).abs() < 1e-12);
    }
}
