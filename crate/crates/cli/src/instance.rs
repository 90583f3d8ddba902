//! Text formats.
//!
//! Instance:
//! ```text
//! N 10
//! rotate
//! items 2
//! 1 3 4 5
//! 2 1 1 1
//! ```
//! The flag lines `rotate` and `weighted` are optional and come before the
//! `items` line; each item line is `<id> <w> <h> <p>`. Blank lines and lines
//! starting with `#` are skipped.
//!
//! Packing: `N <side>`, `placements <count>`, then `<id> <x> <y>` lines, with
//! a trailing `r` on rotated placements.
//!
//! Corridors: one `poly x,y x,y ...` line per corridor, optionally followed
//! by a `hole ...` line for the inner boundary of a cycle.

use std::collections::HashSet;
use std::fmt;

use geoknap::corridor::{Corridor, CorridorError};
use geoknap::polygon::{Point, Polygon};
use geoknap::{Item, Packing, Placement};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub side: i64,
    pub items: Vec<Item>,
    pub rotate: bool,
    pub weighted: bool,
}

impl Instance {
    pub fn new(side: i64, items: Vec<Item>) -> Instance {
        Instance {
            side,
            items,
            rotate: false,
            weighted: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn err<T>(line: usize, reason: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        reason: reason.into(),
    })
}

/// Numbered content lines, skipping blanks and comments.
fn content(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number<T: std::str::FromStr>(
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T, ParseError> {
    match tok {
        Some(t) => t
            .parse()
            .or_else(|_| err(line, format!("bad {what} `{t}`"))),
        None => err(line, format!("missing {what}")),
    }
}

fn header(line: usize, l: &str, key: &str) -> Result<i64, ParseError> {
    let mut toks = l.split_whitespace();
    if toks.next() != Some(key) {
        return err(line, format!("expected `{key} <int>`"));
    }
    let v = number(line, toks.next(), key)?;
    if toks.next().is_some() {
        return err(line, "trailing tokens");
    }
    Ok(v)
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content(text);
    let Some((ln, first)) = lines.next() else {
        return err(1, "empty input");
    };
    let side = header(ln, first, "N")?;
    if side < 1 {
        return err(ln, "N must be positive");
    }
    let (mut rotate, mut weighted) = (false, false);
    let count = loop {
        let Some((ln, l)) = lines.next() else {
            return err(ln + 1, "missing `items` line");
        };
        match l {
            "rotate" => rotate = true,
            "weighted" => weighted = true,
            _ => break (ln, header(ln, l, "items")?),
        }
    };
    let (count_line, count) = count;
    if count < 0 {
        return err(count_line, "negative item count");
    }
    let mut items = Vec::with_capacity(count as usize);
    let mut ids = HashSet::new();
    let mut last = count_line;
    for (ln, l) in lines {
        last = ln;
        let mut toks = l.split_whitespace();
        let id = number(ln, toks.next(), "id")?;
        let w: i64 = number(ln, toks.next(), "width")?;
        let h: i64 = number(ln, toks.next(), "height")?;
        let p = number(ln, toks.next(), "profit")?;
        if toks.next().is_some() {
            return err(ln, "trailing tokens");
        }
        if w < 1 {
            return err(ln, "non-positive width");
        }
        if h < 1 {
            return err(ln, "non-positive height");
        }
        if !ids.insert(id) {
            return err(ln, format!("duplicate id {id}"));
        }
        items.push(Item::new(id, w, h, p));
    }
    if items.len() != count as usize {
        return err(
            last,
            format!("expected {count} items, found {}", items.len()),
        );
    }
    Ok(Instance {
        side,
        items,
        rotate,
        weighted,
    })
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N {}", self.side)?;
        if self.rotate {
            writeln!(f, "rotate")?;
        }
        if self.weighted {
            writeln!(f, "weighted")?;
        }
        writeln!(f, "items {}", self.items.len())?;
        for it in &self.items {
            writeln!(f, "{} {} {} {}", it.id, it.width, it.height, it.profit)?;
        }
        Ok(())
    }
}

pub fn write_packing(p: &Packing) -> String {
    let mut s = format!("N {}\nplacements {}\n", p.side, p.placements.len());
    for pl in &p.placements {
        s.push_str(&format!(
            "{} {} {}{}\n",
            pl.item,
            pl.x,
            pl.y,
            if pl.rotated { " r" } else { "" }
        ));
    }
    s
}

pub fn parse_packing(text: &str) -> Result<Packing, ParseError> {
    let mut lines = content(text);
    let Some((ln, first)) = lines.next() else {
        return err(1, "empty input");
    };
    let side = header(ln, first, "N")?;
    let Some((ln, second)) = lines.next() else {
        return err(ln + 1, "missing `placements` line");
    };
    let count = header(ln, second, "placements")?;
    let mut placements = Vec::new();
    let mut last = ln;
    for (ln, l) in lines {
        last = ln;
        let mut toks = l.split_whitespace();
        let id = number(ln, toks.next(), "id")?;
        let x = number(ln, toks.next(), "x")?;
        let y = number(ln, toks.next(), "y")?;
        let rotated = match toks.next() {
            None => false,
            Some("r") => true,
            Some(t) => return err(ln, format!("unexpected `{t}`")),
        };
        if toks.next().is_some() {
            return err(ln, "trailing tokens");
        }
        placements.push(Placement {
            item: id,
            x,
            y,
            rotated,
        });
    }
    if placements.len() as i64 != count {
        return err(
            last,
            format!("expected {count} placements, found {}", placements.len()),
        );
    }
    Ok(Packing { side, placements })
}

#[derive(Debug, Error)]
pub enum CorridorFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {source}")]
    Corridor { line: usize, source: CorridorError },
}

fn polygon(line: usize, toks: std::str::SplitWhitespace) -> Result<Polygon, ParseError> {
    let mut pts = Vec::new();
    for t in toks {
        let Some((x, y)) = t.split_once(',') else {
            return err(line, format!("bad vertex `{t}`"));
        };
        pts.push(Point::new(
            number(line, Some(x), "x")?,
            number(line, Some(y), "y")?,
        ));
    }
    if pts.len() < 4 {
        return err(line, "a polygon needs at least four vertices");
    }
    Ok(Polygon::new(pts))
}

/// Reads corridors in the dump format, in knapsack `[0, side]^2`.
pub fn parse_corridors(text: &str, side: i64) -> Result<Vec<Corridor>, CorridorFileError> {
    let lines: Vec<(usize, &str)> = content(text).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (ln, l) = lines[i];
        let mut toks = l.split_whitespace();
        if toks.next() != Some("poly") {
            return Err(ParseError {
                line: ln,
                reason: "expected `poly`".into(),
            }
            .into());
        }
        let outer = polygon(ln, toks)?;
        let hole = lines.get(i + 1).filter(|(_, l)| l.starts_with("hole"));
        let c = match hole {
            Some(&(hl, h)) => {
                let inner = polygon(
                    hl,
                    h.split_whitespace()
                        .skip(1)
                        .collect::<Vec<_>>()
                        .join(" ")
                        .split_whitespace(),
                )?;
                i += 1;
                Corridor::from_cycle(&outer, &inner, side)
            }
            None => Corridor::from_path_polygon(&outer, side),
        };
        out.push(c.map_err(|source| CorridorFileError::Corridor { line: ln, source })?);
        i += 1;
    }
    Ok(out)
}
