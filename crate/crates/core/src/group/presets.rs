//! Named group presets and the small text format for group specs.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupActionModel, MobiusIsometry, ModelKind};

/// The modular group: S = (0,-1;1,0), T = (1,1;0,1) on the upper half-plane.
pub fn psl2z() -> Result<GroupActionModel> {
    let s = MobiusIsometry::from_real(0.0, -1.0, 1.0, 0.0)?;
    let t = MobiusIsometry::from_real(1.0, 1.0, 0.0, 1.0)?;
    GroupActionModel::new(ModelKind::H2, vec![s, t], "psl2z")
}

/// Cyclic group generated by one hyperbolic translation of the given
/// length along the imaginary axis.
pub fn cyclic(length: f64) -> Result<GroupActionModel> {
    if !(length > 0.0) {
        return Err(Error::parameter(format!(
            "translation length must be > 0, got {length}"
        )));
    }
    let h = (length / 2.0).exp();
    let g = MobiusIsometry::from_real(h, 0.0, 0.0, 1.0 / h)?;
    GroupActionModel::new(ModelKind::H2, vec![g], format!("cyclic({length})"))
}

/// Cyclic Kleinian group: a loxodromic screw motion of H^3 with the given
/// translation length and rotation angle.
pub fn cyclic_h3(length: f64, twist: f64) -> Result<GroupActionModel> {
    if !(length > 0.0) {
        return Err(Error::parameter(format!(
            "translation length must be > 0, got {length}"
        )));
    }
    let lambda = Complex64::new(length / 2.0, twist / 2.0).exp();
    let g = MobiusIsometry::new([
        [lambda, Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), 1.0 / lambda],
    ])?;
    GroupActionModel::new(ModelKind::H3, vec![g], format!("cyclic_h3({length},{twist})"))
}

/// Geometry of a Fuchsian Schottky generator pair: two disjoint circles
/// orthogonal to the real line; the generator maps the exterior of the
/// first onto the interior of the second.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SchottkyParams {
    /// (center, radius) of the paired circles, centers on the real axis.
    pub circles: [(f64, f64); 4],
}

impl SchottkyParams {
    /// Symmetric two-generator family: circles of the given radius at
    /// -3, -1, 1, 3, pairing adjacent circles (-3 -> -1 and 1 -> 3) so
    /// both generators share one translation length. Radii below 1 keep
    /// the four circles disjoint; larger radii bring them closer and
    /// raise the growth rate.
    pub fn symmetric(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Config(format!(
                "symmetric Schottky radius must lie in (0, 1), got {radius}"
            )));
        }
        Ok(SchottkyParams {
            circles: [(-3.0, radius), (-1.0, radius), (1.0, radius), (3.0, radius)],
        })
    }

    /// Disjointness validator: every pair of circles strictly disjoint.
    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            let (ci, ri) = self.circles[i];
            if !(ri > 0.0) {
                return Err(Error::Config(format!("circle {i} has radius {ri}")));
            }
            for j in (i + 1)..4 {
                let (cj, rj) = self.circles[j];
                if (ci - cj).abs() <= ri + rj {
                    return Err(Error::Config(format!(
                        "circles {i} and {j} are not disjoint: |{ci} - {cj}| <= {ri} + {rj}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Composition of inversions in two disjoint circles on the real axis:
/// a hyperbolic element mapping the exterior of circle A into circle B.
fn pair_circles(a: (f64, f64), b: (f64, f64)) -> Result<MobiusIsometry> {
    let inv = |(c, r): (f64, f64)| -> [[f64; 2]; 2] {
        // inversion in the circle acts on conj(z) as this matrix
        [[c, r * r - c * c], [1.0, -c]]
    };
    let ma = inv(a);
    let mb = inv(b);
    // both inversions are anti-holomorphic with real matrices, so the
    // composition is the plain matrix product
    let m = [
        [
            mb[0][0] * ma[0][0] + mb[0][1] * ma[1][0],
            mb[0][0] * ma[0][1] + mb[0][1] * ma[1][1],
        ],
        [
            mb[1][0] * ma[0][0] + mb[1][1] * ma[1][0],
            mb[1][0] * ma[0][1] + mb[1][1] * ma[1][1],
        ],
    ];
    MobiusIsometry::from_real(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Two-generator Fuchsian Schottky group from four disjoint circles.
pub fn schottky(params: SchottkyParams) -> Result<GroupActionModel> {
    params.validate()?;
    let g1 = pair_circles(params.circles[0], params.circles[1])?;
    let g2 = pair_circles(params.circles[2], params.circles[3])?;
    GroupActionModel::new(
        ModelKind::H2,
        vec![g1, g2],
        format!("schottky({:?})", params.circles),
    )
}

/// Cocompact Fuchsian group of a genus-2 surface: side pairings of the
/// regular hyperbolic octagon, built in the disk model with translation
/// length 2 arccosh(1 + sqrt 2) along axes at angles k pi/4, then moved to
/// the half-plane. Its limit set is the whole circle.
pub fn octagon_surface_group() -> Result<GroupActionModel> {
    let c = 1.0 + 2f64.sqrt();
    let s = (c * c - 1.0f64).sqrt();
    let mut gens = Vec::with_capacity(4);
    for k in 0..4 {
        let theta = k as f64 * std::f64::consts::FRAC_PI_4;
        let phase = Complex64::new(0.0, theta).exp();
        // disk-model translation along direction theta
        let disk = [
            [Complex64::new(c, 0.0), phase * s],
            [phase.conj() * s, Complex64::new(c, 0.0)],
        ];
        // move to the half-plane: g = K^{-1} disk K
        // K = [[1, -i], [1, i]], K^{-1} = [[1/2, 1/2], [i/2, -i/2]]
        let i = Complex64::i();
        let half = Complex64::new(0.5, 0.0);
        let kinv = [[half, half], [i * half, -i * half]];
        let kk = [
            [Complex64::new(1.0, 0.0), -i],
            [Complex64::new(1.0, 0.0), i],
        ];
        let t0 = [
            [
                kinv[0][0] * disk[0][0] + kinv[0][1] * disk[1][0],
                kinv[0][0] * disk[0][1] + kinv[0][1] * disk[1][1],
            ],
            [
                kinv[1][0] * disk[0][0] + kinv[1][1] * disk[1][0],
                kinv[1][0] * disk[0][1] + kinv[1][1] * disk[1][1],
            ],
        ];
        let mut m = [
            [
                t0[0][0] * kk[0][0] + t0[0][1] * kk[1][0],
                t0[0][0] * kk[0][1] + t0[0][1] * kk[1][1],
            ],
            [
                t0[1][0] * kk[0][0] + t0[1][1] * kk[1][0],
                t0[1][0] * kk[0][1] + t0[1][1] * kk[1][1],
            ],
        ];
        // the conjugate of a disk isometry by the inverse Cayley map is a
        // real matrix; strip float residue in the imaginary parts
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                debug_assert!(e.im.abs() < 1e-9 * (1.0 + e.re.abs()));
                *e = Complex64::new(e.re, 0.0);
            }
        }
        gens.push(MobiusIsometry::new(m)?);
    }
    GroupActionModel::new(ModelKind::H2, gens, "octagon")
}

/// The (2,3,7) triangle group: rotations of orders 2 and 3 about two
/// vertices of the hyperbolic triangle with angles pi/2, pi/3, pi/7,
/// whose product has order 7. Cocompact with the smallest co-area among
/// Fuchsian groups and a short systole, which makes word balls dense in
/// scale; the limit set is the whole circle.
pub fn triangle_237() -> Result<GroupActionModel> {
    let (p, q, rr) = (2.0f64, 3.0f64, 7.0f64);
    let (alpha, beta, gamma) = (
        std::f64::consts::PI / p,
        std::f64::consts::PI / q,
        std::f64::consts::PI / rr,
    );
    // side A-B (opposite the gamma vertex) from the angle cosine rule
    let cosh_c = (alpha.cos() * beta.cos() + gamma.cos()) / (alpha.sin() * beta.sin());
    let c_len = cosh_c.acosh();

    let disk_rotation = |center: Complex64, theta: f64| -> [[Complex64; 2]; 2] {
        // T R(theta) T^{-1} with T the disk translation taking 0 to center
        let s = 1.0 / (1.0 - center.norm_sqr()).sqrt();
        let t = [
            [Complex64::new(s, 0.0), center * s],
            [center.conj() * s, Complex64::new(s, 0.0)],
        ];
        let e = Complex64::new(0.0, theta / 2.0).exp();
        let rot = [[e, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), e.conj()]];
        let tr = [
            [t[0][0] * rot[0][0], t[0][1] * rot[1][1]],
            [t[1][0] * rot[0][0], t[1][1] * rot[1][1]],
        ];
        // T^{-1} = [[s, -center s], [-conj(center) s, s]]
        let ti = [
            [Complex64::new(s, 0.0), -center * s],
            [-center.conj() * s, Complex64::new(s, 0.0)],
        ];
        [
            [
                tr[0][0] * ti[0][0] + tr[0][1] * ti[1][0],
                tr[0][0] * ti[0][1] + tr[0][1] * ti[1][1],
            ],
            [
                tr[1][0] * ti[0][0] + tr[1][1] * ti[1][0],
                tr[1][0] * ti[0][1] + tr[1][1] * ti[1][1],
            ],
        ]
    };

    let a_vertex = Complex64::new(0.0, 0.0);
    let b_vertex = Complex64::new((c_len / 2.0).tanh(), 0.0);
    let x_disk = disk_rotation(a_vertex, std::f64::consts::PI * 2.0 / p);
    let y_disk = disk_rotation(b_vertex, std::f64::consts::PI * 2.0 / q);
    // verify the product has order r: |tr| = 2 cos(pi/r)
    let prod = [
        [
            x_disk[0][0] * y_disk[0][0] + x_disk[0][1] * y_disk[1][0],
            x_disk[0][0] * y_disk[0][1] + x_disk[0][1] * y_disk[1][1],
        ],
        [
            x_disk[1][0] * y_disk[0][0] + x_disk[1][1] * y_disk[1][0],
            x_disk[1][0] * y_disk[0][1] + x_disk[1][1] * y_disk[1][1],
        ],
    ];
    let tr = (prod[0][0] + prod[1][1]).norm();
    let expect = 2.0 * gamma.cos();
    if (tr - expect).abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "triangle group closure failed: |tr(xy)| = {tr}, expected {expect}"
        )));
    }

    // move both generators to the half-plane: g = K^{-1} disk K
    let to_half_plane = |mm: [[Complex64; 2]; 2]| -> Result<MobiusIsometry> {
        let i = Complex64::i();
        let half = Complex64::new(0.5, 0.0);
        let kinv = [[half, half], [i * half, -i * half]];
        let kk = [
            [Complex64::new(1.0, 0.0), -i],
            [Complex64::new(1.0, 0.0), i],
        ];
        let t0 = [
            [
                kinv[0][0] * mm[0][0] + kinv[0][1] * mm[1][0],
                kinv[0][0] * mm[0][1] + kinv[0][1] * mm[1][1],
            ],
            [
                kinv[1][0] * mm[0][0] + kinv[1][1] * mm[1][0],
                kinv[1][0] * mm[0][1] + kinv[1][1] * mm[1][1],
            ],
        ];
        let mut out = [
            [
                t0[0][0] * kk[0][0] + t0[0][1] * kk[1][0],
                t0[0][0] * kk[0][1] + t0[0][1] * kk[1][1],
            ],
            [
                t0[1][0] * kk[0][0] + t0[1][1] * kk[1][0],
                t0[1][0] * kk[0][1] + t0[1][1] * kk[1][1],
            ],
        ];
        for row in out.iter_mut() {
            for e in row.iter_mut() {
                debug_assert!(e.im.abs() < 1e-9 * (1.0 + e.re.abs()));
                *e = Complex64::new(e.re, 0.0);
            }
        }
        MobiusIsometry::new(out)
    };
    let x = to_half_plane(x_disk)?;
    let y = to_half_plane(y_disk)?;
    GroupActionModel::new(ModelKind::H2, vec![x, y], "triangle237")
}

/// Limit-set sample of the symmetric Schottky family refined to a chordal
/// resolution, by nested-disk subdivision: the cylinder of a reduced word
/// `g_{i1} ... g_{ik}` lies in the prefix image of the last letter's
/// target disk, so a branch is emitted once that disk's chordal diameter
/// drops below the resolution.
pub fn schottky_limit_set_refined(
    params: &SchottkyParams,
    resolution: f64,
    max_points: usize,
) -> Result<Vec<crate::group::BoundaryPoint>> {
    use crate::group::model::cayley_to_circle;
    params.validate()?;
    if !(resolution > 0.0) {
        return Err(Error::parameter("resolution must be positive"));
    }
    let model = schottky(*params)?;
    let gens = model.generators();
    // target disks: generator k maps everything outside its source circle
    // into its target circle
    let target: Vec<(f64, f64)> = vec![
        params.circles[1],
        params.circles[3],
        params.circles[0],
        params.circles[2],
    ];
    let chordal_pt = |x: f64| cayley_to_circle(Complex64::new(x, 0.0), Complex64::new(1.0, 0.0));
    let apply_real = |m: &MobiusIsometry, x: f64| -> f64 {
        let [[a, b], [c, d]] = m.m;
        ((a.re * x + b.re) / (c.re * x + d.re)) as f64
    };

    let mut out = Vec::new();
    // stack: (prefix matrix, last generator, depth)
    let mut stack: Vec<(MobiusIsometry, usize, u32)> = (0..gens.len())
        .map(|i| (MobiusIsometry::identity(), i, 1))
        .collect();
    while let Some((prefix, last, depth)) = stack.pop() {
        if out.len() >= max_points {
            return Err(Error::Resolution(format!(
                "refinement exceeded {max_points} points before reaching \
                 resolution {resolution}; coarsen the resolution"
            )));
        }
        let (c, r) = target[last];
        let e1 = apply_real(&prefix, c - r);
        let e2 = apply_real(&prefix, c + r);
        let u1 = chordal_pt(e1);
        let u2 = chordal_pt(e2);
        let diam = (u1 - u2).norm();
        if diam < resolution || depth > 60 {
            out.push(crate::group::BoundaryPoint::Circle(u1));
            continue;
        }
        let next_prefix = prefix.compose(&gens[last]);
        for i in 0..gens.len() {
            if i == model.inverse_of(last) {
                continue;
            }
            stack.push((next_prefix, i, depth + 1));
        }
    }
    Ok(out)
}

/// Parse a group spec: a named preset (`psl2z`, `cyclic:<length>`,
/// `schottky:<radius>`, `octagon`, `triangle237`, `cyclic_h3:<length>:<twist>`) or
/// `file:<path>` pointing at a matrix list (first line `h2` or `h3`, then
/// one row per generator: 4 reals for h2, 8 reals `re im ...` for h3).
pub fn parse_group_spec(spec: &str) -> Result<GroupActionModel> {
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let farg = |idx: usize, name: &str| -> Result<f64> {
        args.get(idx)
            .ok_or_else(|| Error::Parse(format!("group spec '{spec}' is missing {name}")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("group spec '{spec}': {e}")))
    };
    match head {
        "psl2z" => psl2z(),
        "cyclic" => cyclic(farg(0, "translation length")?),
        "cyclic_h3" => cyclic_h3(farg(0, "translation length")?, farg(1, "twist")?),
        "schottky" => schottky(SchottkyParams::symmetric(farg(0, "radius")?)?),
        "octagon" => octagon_surface_group(),
        "triangle237" => triangle_237(),
        "file" => {
            let path = args
                .first()
                .ok_or_else(|| Error::Parse("file: spec needs a path".into()))?;
            parse_matrix_file(&std::fs::read_to_string(path)?)
        }
        other => Err(Error::Parse(format!(
            "unknown group spec '{other}'; expected psl2z, cyclic:<l>, cyclic_h3:<l>:<t>, \
             schottky:<r>, octagon, or file:<path>"
        ))),
    }
}

/// Matrix-list format: first non-empty line `h2` or `h3`, then one
/// generator per line.
pub fn parse_matrix_file(text: &str) -> Result<GroupActionModel> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let kind = match lines.next() {
        Some("h2") => ModelKind::H2,
        Some("h3") => ModelKind::H3,
        other => {
            return Err(Error::Parse(format!(
                "matrix file must start with 'h2' or 'h3', got {other:?}"
            )))
        }
    };
    let mut gens = Vec::new();
    for line in lines {
        let vals: Vec<f64> = line
            .split([',', ' ', '\t'])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        let g = match kind {
            ModelKind::H2 => {
                if vals.len() != 4 {
                    return Err(Error::Parse(format!(
                        "h2 generator rows need 4 reals, got {}",
                        vals.len()
                    )));
                }
                MobiusIsometry::from_real(vals[0], vals[1], vals[2], vals[3])?
            }
            ModelKind::H3 => {
                if vals.len() != 8 {
                    return Err(Error::Parse(format!(
                        "h3 generator rows need 8 reals (re/im pairs), got {}",
                        vals.len()
                    )));
                }
                MobiusIsometry::new([
                    [
                        Complex64::new(vals[0], vals[1]),
                        Complex64::new(vals[2], vals[3]),
                    ],
                    [
                        Complex64::new(vals[4], vals[5]),
                        Complex64::new(vals[6], vals[7]),
                    ],
                ])?
            }
        };
        gens.push(g);
    }
    GroupActionModel::new(kind, gens, "file")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Point;

    #[test]
    fn schottky_generators_pass_disjointness() {
        let params = SchottkyParams::symmetric(0.3).unwrap();
        params.validate().unwrap();
        let model = schottky(params).unwrap();
        // two generators plus their inverses
        assert_eq!(model.generators().len(), 4);
        let p = crate::group::Point::H2(Complex64::i());
        let _ = p;
        for g in model.generators() {
            assert!(g.is_real(1e-9));
            assert!(g.translation_length().is_some(), "Schottky gens are hyperbolic");
        }
    }

    #[test]
    fn schottky_overlapping_circles_rejected() {
        assert!(SchottkyParams::symmetric(1.0).is_err());
        let bad = SchottkyParams {
            circles: [(-3.0, 2.2), (3.0, 0.5), (-1.0, 0.5), (1.0, 0.5)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn schottky_generator_maps_circle_a_to_b() {
        // g maps the exterior of A (center -3) into the interior of B
        // (center -1); in particular far-away points land inside B.
        let params = SchottkyParams::symmetric(0.7).unwrap();
        let model = schottky(params).unwrap();
        let g = &model.generators()[0];
        let image = |x: f64| {
            let [[a, b], [c, d]] = g.m;
            let z = Complex64::new(x, 0.0);
            ((a * z + b) / (c * z + d)).re
        };
        for x in [100.0, -100.0, 2.0] {
            let y = image(x);
            assert!((y - (-1.0)).abs() < 0.7, "g({x}) = {y} not inside B");
        }
        // the two generators have equal translation lengths by symmetry
        let l0 = model.generators()[0].translation_length().unwrap();
        let l1 = model.generators()[1].translation_length().unwrap();
        assert!((l0 - l1).abs() < 1e-9);
    }

    #[test]
    fn octagon_is_cocompact_material() {
        let model = octagon_surface_group().unwrap();
        assert_eq!(model.generators().len(), 8);
        let expect = 2.0 * (1.0 + 2f64.sqrt()).acosh();
        for g in model.generators() {
            let l = g.translation_length().expect("hyperbolic");
            assert!((l - expect).abs() < 1e-9);
        }
        // base displacement equals the translation length for an axis through i:
        // the k = 0 generator translates along the imaginary-axis image
        let p = model.base();
        let g0 = &model.generators()[0];
        let d = model.dist(&p, &model.apply(g0, &p));
        assert!(d >= expect - 1e-9);
    }

    #[test]
    fn parse_specs() {
        assert!(parse_group_spec("psl2z").is_ok());
        assert!(parse_group_spec("cyclic:2.0").is_ok());
        assert!(parse_group_spec("schottky:0.9").is_ok());
        assert!(parse_group_spec("octagon").is_ok());
        assert!(parse_group_spec("nonsense").is_err());
        assert!(parse_group_spec("cyclic").is_err());
    }

    #[test]
    fn matrix_file_round_trip() {
        let text = "h2\n0 -1 1 0\n1 1 0 1\n";
        let m = parse_matrix_file(text).unwrap();
        // S is an involution (S^{-1} = S mod sign), so closing under
        // inverses adds only T^{-1}
        assert_eq!(m.generators().len(), 3);
        let p = Point::H2(Complex64::i());
        assert!(m.dist(&p, &m.apply(&m.generators()[1], &p)) > 0.0);
    }

    #[test]
    fn cyclic_h3_displacement() {
        let m = cyclic_h3(2.0, 0.7).unwrap();
        let p = m.base();
        let g = &m.generators()[0];
        let d = m.dist(&p, &m.apply(g, &p));
        assert!((d - 2.0).abs() < 1e-12, "axis displacement {d}");
    }
}
