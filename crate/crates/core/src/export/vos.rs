use std::io::Write;

use super::{fmt_real, Counting};
use crate::error::{Error, Result};
use crate::graph::ActantGraph;

/// Writes the TAB-separated VOSviewer map file (`id label x y cluster
/// weight<Occurrences>`, ids in node order starting at 1) and the network
/// file of `id id weight` triples. Returns the byte counts of both.
pub fn write_vos<M: Write, N: Write>(g: &ActantGraph, map: M, network: N) -> Result<(usize, usize)> {
    let coords = g
        .coords()
        .ok_or_else(|| Error::domain("VOSviewer export needs coordinates"))?;
    let partition = g
        .partition()
        .ok_or_else(|| Error::domain("VOSviewer export needs a partition"))?;

    let mut map = Counting::new(map);
    writeln!(map, "id\tlabel\tx\ty\tcluster\tweight<Occurrences>")?;
    for (i, n) in g.nodes().iter().enumerate() {
        writeln!(
            map,
            "{}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            n.display.replace(['\t', '\n'], " "),
            fmt_real(coords[i].0),
            fmt_real(coords[i].1),
            partition[i],
            n.doc_frequency
        )?;
    }
    map.flush()?;

    let mut net = Counting::new(network);
    for e in g.edges() {
        writeln!(net, "{}\t{}\t{}", e.a + 1, e.b + 1, e.weight)?;
    }
    net.flush()?;
    Ok((map.count, net.count))
}
