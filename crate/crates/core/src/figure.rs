//! Partition of the plane minus a polygon into translated normal cones,
//! rendered as SVG with a CSV table of sampled exterior points.

use std::fmt::Write as _;

use serde::Serialize;

use crate::body::{ConvexBody, Tolerances};
use crate::error::{Error, Result};
use crate::geometry;
use crate::point::Point;
use crate::sampling;

/// Which piece of the boundary a point projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cell {
    Vertex(usize),
    /// Open edge `i` from vertex `i` to vertex `i + 1` (cyclically).
    Edge(usize),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Vertex(i) => write!(f, "v{i}"),
            Cell::Edge(i) => write!(f, "e{i}"),
        }
    }
}

/// Normal cone at a vertex, spanned by the outward normals of its edges.
/// The cone is the angular sector from `from` counter-clockwise to `to`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexCone {
    pub base: Point,
    pub from: Point,
    pub to: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeRay {
    pub edge: usize,
    pub base: Point,
    pub direction: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub point: Point,
    pub base: Point,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionFigure {
    /// Extreme points in counter-clockwise order.
    pub vertices: Vec<Point>,
    /// Edges as vertex index pairs. A segment has a single edge with two
    /// sides.
    pub edges: Vec<(usize, usize)>,
    pub vertex_cones: Vec<VertexCone>,
    pub edge_rays: Vec<EdgeRay>,
    pub samples: Vec<Sample>,
    pub bound: f64,
    pub seed: u64,
}

fn perp_out(a: &Point, b: &Point) -> Point {
    // outward normal of a counter-clockwise edge a → b
    let d = b - a;
    Point::from_vec_unchecked(vec![d[1], -d[0]])
        .normalized()
        .expect("distinct vertices")
}

fn ccw_order(mut pts: Vec<Point>) -> Vec<Point> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    pts
}

fn on_segment(p: &Point, a: &Point, b: &Point, tol: f64) -> bool {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    a.add_scaled(t, &ab).distance(p) <= tol
}

impl PartitionFigure {
    /// Builds the figure data for a 2-D polytope: cones at vertices, normal
    /// rays at three points of every open edge and `samples` exterior points
    /// of `[-bound, bound]²` labelled with their cell.
    pub fn build(
        body: &ConvexBody,
        samples: usize,
        bound: f64,
        seed: u64,
        tols: &Tolerances,
    ) -> Result<Self> {
        if body.dim() != 2 || body.is_ball() {
            return Err(Error::InvalidInput(
                "partition figures need a 2-D polytope".into(),
            ));
        }
        let ext = geometry::extreme_points(body, tols)?;
        let vertices = match ext.len() {
            1 | 2 => ext,
            _ => ccw_order(ext),
        };
        let m = vertices.len();
        let edges: Vec<(usize, usize)> = match m {
            1 => vec![],
            2 => vec![(0, 1)],
            _ => (0..m).map(|i| (i, (i + 1) % m)).collect(),
        };

        let mut vertex_cones = Vec::new();
        let mut edge_rays = Vec::new();
        match m {
            1 => {}
            2 => {
                let n = perp_out(&vertices[0], &vertices[1]);
                // half-planes facing away from the segment
                vertex_cones.push(VertexCone {
                    base: vertices[0].clone(),
                    from: n.scale(-1.0),
                    to: n.clone(),
                });
                vertex_cones.push(VertexCone {
                    base: vertices[1].clone(),
                    from: n.clone(),
                    to: n.scale(-1.0),
                });
                for t in [0.25, 0.5, 0.75] {
                    let base = vertices[0].scale(1.0 - t).add_scaled(t, &vertices[1]);
                    edge_rays.push(EdgeRay {
                        edge: 0,
                        base: base.clone(),
                        direction: n.clone(),
                    });
                    edge_rays.push(EdgeRay {
                        edge: 0,
                        base,
                        direction: n.scale(-1.0),
                    });
                }
            }
            _ => {
                for i in 0..m {
                    let prev = (i + m - 1) % m;
                    vertex_cones.push(VertexCone {
                        base: vertices[i].clone(),
                        from: perp_out(&vertices[prev], &vertices[i]),
                        to: perp_out(&vertices[i], &vertices[(i + 1) % m]),
                    });
                }
                for (e, &(a, b)) in edges.iter().enumerate() {
                    let n = perp_out(&vertices[a], &vertices[b]);
                    for t in [0.25, 0.5, 0.75] {
                        edge_rays.push(EdgeRay {
                            edge: e,
                            base: vertices[a].scale(1.0 - t).add_scaled(t, &vertices[b]),
                            direction: n.clone(),
                        });
                    }
                }
            }
        }

        let mut rng = sampling::rng(seed);
        let mut points = Vec::with_capacity(samples);
        let mut attempts = 0usize;
        while points.len() < samples && attempts < 1000 * samples.max(1) {
            attempts += 1;
            let p = sampling::point_in_box(&mut rng, 2, bound);
            if geometry::distance(body, &p, tols)? > tols.feas {
                points.push(p);
            }
        }
        let cell_tol = 1e-7;
        let samples = points
            .into_iter()
            .map(|p| {
                let base = geometry::locate_partition_cell(body, &p, tols)?;
                let cell = vertices
                    .iter()
                    .position(|v| v.distance(&base) <= cell_tol)
                    .map(Cell::Vertex)
                    .or_else(|| {
                        edges
                            .iter()
                            .position(|&(a, b)| {
                                on_segment(&base, &vertices[a], &vertices[b], cell_tol)
                            })
                            .map(Cell::Edge)
                    })
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("cell base {base} is not on the boundary"))
                    })?;
                Ok(Sample {
                    point: p,
                    base,
                    cell,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(PartitionFigure {
            vertices,
            edges,
            vertex_cones,
            edge_rays,
            samples,
            bound,
            seed,
        })
    }

    /// `x,y,base_x,base_y,cell` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,base_x,base_y,cell\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                sig17(s.point[0]),
                sig17(s.point[1]),
                sig17(s.base[0]),
                sig17(s.base[1]),
                s.cell
            );
        }
        out
    }

    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 600.0;
        let b = self.bound;
        let scale = SIZE / (2.0 * b);
        let sx = |x: f64| (x + b) * scale;
        let sy = |y: f64| (b - y) * scale;
        let xy = |p: &Point| format!("{:.3},{:.3}", sx(p[0]), sy(p[1]));
        let reach = 4.0 * b;
        let palette = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
            "#bcbd22", "#17becf",
        ];
        let color = |cell: Cell| match cell {
            Cell::Vertex(i) => palette[i % palette.len()],
            Cell::Edge(_) => "#999999",
        };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<clipPath id="frame"><rect width="{SIZE}" height="{SIZE}"/></clipPath>"#
        );
        let _ = writeln!(svg, r#"<g clip-path="url(#frame)">"#);

        // translated vertex cones
        for (i, c) in self.vertex_cones.iter().enumerate() {
            let far_from = c.base.add_scaled(reach, &c.from);
            let far_to = c.base.add_scaled(reach, &c.to);
            // opposite edges (a segment) give a half-plane: rotate `from` by +90°
            let mid = match (&c.from + &c.to).normalized() {
                Some(m) => m,
                None => Point::from_vec_unchecked(vec![-c.from[1], c.from[0]]),
            };
            let far_mid = c.base.add_scaled(reach, &mid);
            let _ = writeln!(
                svg,
                r#"<polygon points="{} {} {} {}" fill="{}" fill-opacity="0.12" stroke="none"/>"#,
                xy(&c.base),
                xy(&far_from),
                xy(&far_mid),
                xy(&far_to),
                palette[i % palette.len()]
            );
        }
        // normal rays on open edges
        for r in &self.edge_rays {
            let _ = writeln!(
                svg,
                r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#555555" stroke-dasharray="4 3"/>"##,
                sx(r.base[0]),
                sy(r.base[1]),
                sx(r.base[0] + reach * r.direction[0]),
                sy(r.base[1] + reach * r.direction[1])
            );
        }
        // exterior samples by cell
        for s in &self.samples {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.3}" cy="{:.3}" r="1.6" fill="{}"/>"#,
                sx(s.point[0]),
                sy(s.point[1]),
                color(s.cell)
            );
        }
        // the body
        let outline: Vec<String> = self.vertices.iter().map(&xy).collect();
        let _ = writeln!(
            svg,
            r##"<polygon points="{}" fill="#dddddd" stroke="black" stroke-width="2"/>"##,
            outline.join(" ")
        );
        for v in &self.vertices {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#,
                sx(v[0]),
                sy(v[1])
            );
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(svg, "</svg>");
        svg
    }
}

/// Decimal rendering with 17 significant digits, which round-trips every
/// finite double.
pub fn sig17(v: f64) -> String {
    if v == 0.0 {
        return "0.0000000000000000".into();
    }
    let exp = format!("{v:e}")
        .split('e')
        .nth(1)
        .and_then(|e| e.parse::<i32>().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    fn build(body: &ConvexBody) -> PartitionFigure {
        PartitionFigure::build(body, 400, 3.0, 42, &Tolerances::default()).unwrap()
    }

    #[test]
    fn square_cones_are_quadrants() {
        let fig = build(&ConvexBody::unit_square());
        assert_eq!(
            fig.vertices,
            vec![pt![-1, -1], pt![1, -1], pt![1, 1], pt![-1, 1]]
        );
        let at = |v: Point| {
            fig.vertex_cones
                .iter()
                .find(|c| c.base == v)
                .unwrap()
                .clone()
        };
        let c = at(pt![1, 1]);
        // from the right edge normal (1,0) to the top edge normal (0,1)
        assert!(c.from.distance(&pt![1, 0]) < 1e-15 && c.to.distance(&pt![0, 1]) < 1e-15);
        let c = at(pt![-1, -1]);
        assert!(c.from.distance(&pt![-1, 0]) < 1e-15 && c.to.distance(&pt![0, -1]) < 1e-15);
        for r in &fig.edge_rays {
            assert!(r.direction[0] == 0.0 || r.direction[1] == 0.0);
            assert_eq!(r.direction.norm(), 1.0);
        }
        assert_eq!(fig.edge_rays.len(), 12);
    }

    #[test]
    fn triangle_has_three_cones_and_rays() {
        let tri = ConvexBody::polytope(vec![pt![0, 0], pt![1, 0], pt![0, 1]]).unwrap();
        let fig = build(&tri);
        assert_eq!(fig.vertex_cones.len(), 3);
        assert_eq!(fig.edges.len(), 3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(fig
            .edge_rays
            .iter()
            .any(|r| r.direction.distance(&pt![h, h]) < 1e-15));
        for s in &fig.samples {
            let d = &s.point - &s.base;
            assert!(geometry::normal_cone_contains(&tri, &s.base, &d, 1e-8).unwrap());
        }
    }

    #[test]
    fn segment_cells_cover_plane() {
        let seg = ConvexBody::polytope(vec![pt![0, 0], pt![1, 0]]).unwrap();
        let fig = build(&seg);
        assert_eq!(fig.samples.len(), 400);
        for s in &fig.samples {
            // brute-force nearest point on the segment
            let best = (0..=100_000)
                .map(|k| pt![k as f64 / 100_000.0, 0])
                .min_by(|a, b| a.distance(&s.point).total_cmp(&b.distance(&s.point)))
                .unwrap();
            assert!(best.distance(&s.base) < 2e-5);
        }
        assert!(fig.samples.iter().any(|s| s.cell == Cell::Edge(0)));
        assert!(fig.samples.iter().any(|s| s.cell == Cell::Vertex(0)));
        assert!(fig.samples.iter().any(|s| s.cell == Cell::Vertex(1)));
    }

    #[test]
    fn csv_and_svg_are_deterministic() {
        let a = build(&ConvexBody::unit_square());
        let b = build(&ConvexBody::unit_square());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_svg(), b.to_svg());
        assert!(a.to_csv().starts_with("x,y,base_x,base_y,cell\n"));
        assert!(a.to_svg().starts_with("<svg"));
    }

    #[test]
    fn sig17_round_trips() {
        for v in [0.1, -2.5, 1e-7, 12345.678, std::f64::consts::PI, -1e10] {
            let s = sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(sig17(1.0), "1.0000000000000000");
    }

    #[test]
    fn rejects_non_planar_bodies() {
        let disk = ConvexBody::ball(pt![0, 0], 1.0).unwrap();
        assert!(PartitionFigure::build(&disk, 10, 2.0, 1, &Tolerances::default()).is_err());
        let cube = ConvexBody::polytope(vec![pt![0, 0, 0], pt![1, 0, 0]]).unwrap();
        assert!(PartitionFigure::build(&cube, 10, 2.0, 1, &Tolerances::default()).is_err());
    }
}
