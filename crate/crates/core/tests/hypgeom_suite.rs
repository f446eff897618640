mod common;

use proptest::prelude::*;

use sumhess::hypgeom::io::{decode_binary, encode_binary, encode_pgm, heatmap_pixel, write_curvature_csv};
use sumhess::hypgeom::{
    algebraic_residuals, analytic_surface, Domain, GeometryField, GraphGrid, GridSpec, NodeKind, SurfaceKind,
};

fn grid_strategy() -> impl Strategy<Value = GraphGrid> {
    (2usize..=3)
        .prop_flat_map(|dim| {
            (
                Just(dim),
                prop::collection::vec(1usize..6, dim),
                prop::collection::vec(-2.0f64..2.0, dim),
                0.01f64..1.0,
                any::<u64>(),
            )
        })
        .prop_map(|(dim, shape, origin, h, bits)| {
            let len: usize = shape.iter().product();
            let mut kinds = Vec::with_capacity(len);
            let mut u = Vec::with_capacity(len);
            for i in 0..len {
                let edge = i == len - 1 && len > 1 && bits & 1 == 1;
                kinds.push(if edge {
                    NodeKind::Outside
                } else if (bits >> (i % 63)) & 2 == 2 {
                    NodeKind::Boundary
                } else {
                    NodeKind::Interior
                });
                u.push(if edge { 0.0 } else { 0.1 + (i as f64 * 0.37 + h).sin().abs() * 3.0 });
            }
            GraphGrid::new(dim, shape, origin, h, kinds, u).unwrap()
        })
}

proptest! {
    #[test]
    fn binary_roundtrip(g in grid_strategy()) {
        let bytes = encode_binary(&g);
        prop_assert_eq!(&decode_binary(&bytes).unwrap(), &g);
        let masked = g.kinds().iter().filter(|k| k.is_masked()).count();
        let payload_start = bytes.len() - 8 * masked;
        prop_assert!(decode_binary(&bytes[..payload_start]).is_err());
        let mut longer = bytes.clone();
        longer.push(0);
        prop_assert!(decode_binary(&longer).is_err());
    }

    #[test]
    fn pgm_layout(g in grid_strategy()) {
        let field: Vec<Option<f64>> = (0..g.len()).map(|i| Some(i as f64)).collect();
        let pgm = encode_pgm(&g, &field);
        let (w, h) = (g.shape()[0], g.shape().get(1).copied().unwrap_or(1));
        let header_end = pgm.len() - w * h;
        let header = String::from_utf8_lossy(&pgm[..header_end]).to_string();
        prop_assert!(header.starts_with("P5\n# min="));
        let dims = format!("\n{} {}\n255\n", w, h);
        prop_assert!(header.ends_with(&dims));
        for i in 0..g.len() {
            if let Some((r, c)) = heatmap_pixel(&g, i) {
                prop_assert!(r < h && c < w);
                if !g.is_masked(i) {
                    prop_assert_eq!(pgm[header_end + r * w + c], 0);
                }
            }
        }
    }
}

fn surface(kind: SurfaceKind, dim: usize, radius: f64, h: f64) -> (GraphGrid, GeometryField) {
    let spec = GridSpec {
        domain: Domain::Ball { radius },
        dim,
        h,
    };
    let s = analytic_surface(&kind, &spec, 1e-3).unwrap();
    let f = GeometryField::from_grid(&s.grid).unwrap();
    (s.grid, f)
}

#[test]
fn hemisphere_is_totally_geodesic_in_relation() {
    let (g, f) = surface(SurfaceKind::Hemisphere { radius: 1.0 }, 2, 0.6, 1.0 / 32.0);
    let alg = algebraic_residuals(&g, &f);
    assert!(alg.curvature_relation < 1e-12);
    assert!(alg.height_ratio_identity < 1e-12);
    assert!(alg.frame_orthonormality < 1e-12);
    assert!(alg.kappa_sorted);
}

#[test]
fn three_dimensional_exact_surfaces() {
    let (g, f) = surface(SurfaceKind::Horosphere { height: 0.4 }, 3, 0.5, 0.125);
    let nodes: Vec<_> = f.interior(&g).collect();
    assert!(!nodes.is_empty());
    for (_, p) in nodes {
        assert!(p.kappa.iter().all(|k| (k - 1.0).abs() < 1e-12));
    }
    let (g, f) = surface(
        SurfaceKind::TiltedPlane {
            offset: 3.0,
            slope: vec![0.2, 0.5, -0.4],
        },
        3,
        0.5,
        0.125,
    );
    for p in f.nodes.iter().flatten() {
        assert!(p.kappa.iter().all(|k| (k - p.nu).abs() < 1e-10));
    }
    assert!(algebraic_residuals(&g, &f).height_ratio_identity < 1e-12);
}

#[test]
fn cap_curvature_csv_columns() {
    let (g, f) = surface(SurfaceKind::Cap { depth: 0.5, radius: 1.0 }, 2, 0.5, 0.0625);
    let mut buf = Vec::new();
    write_curvature_csv(&g, &f, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,kind,u,nu,kappa1,kappa2");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        let k1: f64 = cols[5].parse().unwrap();
        let k2: f64 = cols[6].parse().unwrap();
        assert!(k1 >= k2);
        if cols[2] == "interior" {
            assert!((k1 - 0.5).abs() < 1e-2);
        }
    }
}
