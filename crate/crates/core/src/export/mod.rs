//! Network file writers: Pajek, VOSviewer map/network pair, CSV edge list
//! and a static SVG rendering. All output is UTF-8 with LF line endings and
//! reals printed with six decimals.

mod csv_edges;
mod pajek;
mod svg;
mod vos;

use std::io::{self, Write};

pub use csv_edges::write_edgelist_csv;
pub use pajek::{parse_pajek, write_clu, write_pajek, PajekDocument, PajekVertex};
pub use svg::{render_svg, SvgStyle};
pub use vos::write_vos;

use crate::graph::Point;

/// Maps the bounding box of `coords` into `[0,1]²`, keeping the aspect ratio
/// and centring the shorter side. A single-point layout maps to `(0.5, 0.5)`.
pub fn normalize_coords(coords: &[Point]) -> Vec<Point> {
    if coords.is_empty() {
        return Vec::new();
    }
    let (mut min_x, mut max_x, mut min_y, mut max_y) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in coords {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let (w, h) = (max_x - min_x, max_y - min_y);
    let span = w.max(h);
    if span <= 0.0 {
        return vec![(0.5, 0.5); coords.len()];
    }
    let off_x = (1.0 - w / span) / 2.0;
    let off_y = (1.0 - h / span) / 2.0;
    coords
        .iter()
        .map(|&(x, y)| ((x - min_x) / span + off_x, (y - min_y) / span + off_y))
        .collect()
}

/// Fixed six-decimal formatting without a negative zero.
pub(crate) fn fmt_real(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Writer adapter that counts bytes.
pub(crate) struct Counting<W> {
    inner: W,
    pub(crate) count: usize,
}

impl<W: Write> Counting<W> {
    pub(crate) fn new(inner: W) -> Self {
        Counting { inner, count: 0 }
    }
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.count += n;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
