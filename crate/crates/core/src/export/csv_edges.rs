use std::io::Write;

use super::Counting;
use crate::error::Result;
use crate::graph::ActantGraph;

/// `source,target,weight,source_class,target_class` rows in Pajek edge order.
pub fn write_edgelist_csv<W: Write>(g: &ActantGraph, sink: W) -> Result<usize> {
    let mut counting = Counting::new(sink);
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut counting);
        w.write_record(["source", "target", "weight", "source_class", "target_class"])?;
        for e in g.edges() {
            let (a, b) = (&g.nodes()[e.a], &g.nodes()[e.b]);
            w.write_record([
                a.display.as_str(),
                b.display.as_str(),
                &e.weight.to_string(),
                a.key.class.name(),
                b.key.class.name(),
            ])?;
        }
        w.flush()?;
    }
    Ok(counting.count)
}
