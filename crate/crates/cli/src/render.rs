//! SVG output. Knapsack coordinates are kept (the view box is `[0, N]^2`)
//! and the y axis is flipped so the origin sits bottom left.

use std::fmt::Write;

use geoknap::classify::Label;
use geoknap::corridor::Corridor;
use geoknap::geom::index_items;
use geoknap::polygon::Polygon;
use geoknap::{Item, ItemId, Packing};

const PIXELS: i64 = 512;

fn fill(label: Option<Label>) -> &'static str {
    match label {
        Some(Label::Horizontal) => "#4e79a7",
        Some(Label::Vertical) => "#f28e2b",
        Some(Label::Large) => "#59a14f",
        Some(Label::Small) => "#b07aa1",
        Some(Label::Intermediate) => "#e15759",
        None => "#9c9c9c",
    }
}

fn open(side: i64) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PIXELS}" height="{PIXELS}" viewBox="0 0 {side} {side}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect class="frame" x="0" y="0" width="{side}" height="{side}" fill="white" stroke="black" stroke-width="{}"/>"#, stroke(side)).unwrap();
    s
}

fn stroke(side: i64) -> String {
    format!("{}", side as f64 / PIXELS as f64)
}

/// One rectangle per placement, colored by the item's label.
pub fn render_packing(items: &[Item], packing: &Packing, labels: &[(ItemId, Label)]) -> String {
    let side = packing.side;
    let by_id = index_items(items);
    let mut s = open(side);
    for p in &packing.placements {
        let Some(it) = by_id.get(&p.item) else {
            continue;
        };
        let r = p.rect(it);
        let label = labels.iter().find(|(id, _)| *id == p.item).map(|(_, l)| *l);
        writeln!(
            s,
            r#"<rect class="item" data-id="{}" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="black" stroke-width="{}"/>"#,
            p.item,
            r.x,
            side - r.y2(),
            r.w,
            r.h,
            fill(label),
            stroke(side)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn subpath(side: i64, poly: &Polygon) -> String {
    let mut d = String::new();
    for (i, v) in poly.vertices.iter().enumerate() {
        write!(
            d,
            "{}{} {} ",
            if i == 0 { "M" } else { "L" },
            v.x,
            side - v.y
        )
        .unwrap();
    }
    d.push('Z');
    d
}

/// One closed path per corridor; a cycle's hole is a second subpath of the
/// same element.
pub fn render_corridors(side: i64, corridors: &[Corridor]) -> String {
    let mut s = open(side);
    for c in corridors {
        let mut d = subpath(side, &c.outer);
        if let Some(inner) = &c.inner {
            d.push(' ');
            d.push_str(&subpath(side, inner));
        }
        writeln!(
            s,
            r##"<path class="corridor" d="{d}" fill="#d0e4f5" fill-rule="evenodd" stroke="#1f4e79" stroke-width="{}"/>"##,
            stroke(side)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
