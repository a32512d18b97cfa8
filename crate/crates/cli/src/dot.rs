use std::fmt::Write;

use anyhow::{bail, Result};

use pastctl::events::EventStructure;
use pastctl::logic6::TruthValue6;
use pastctl::monitor::{Verdict, Verdicts};

/// The event DAG as Graphviz text. Nodes are labeled `id:verdict`; the
/// false side is red and the true side green, and the border shows
/// finality: dashed for current-only verdicts, solid for locally final,
/// bold for final. Edges point from sender to receiver.
pub fn export_dot(e: &EventStructure, verdicts: &Verdicts) -> Result<String> {
    let order = e.topological_order()?;
    let mut out = String::from("digraph events {\n");
    if !order.is_empty() {
        out.push_str("  rankdir=LR;\n  node [shape=box];\n");
    }
    for id in &order {
        let Some(v) = verdicts.get(id) else {
            bail!("verdict map has no entry for event `{id}`");
        };
        let (label, color, style) = match v {
            Verdict::Two(b) => (b.to_string(), side(b), "solid"),
            Verdict::Six(v) => (v.token().to_string(), side(v.to_bool()), border(v)),
        };
        writeln!(
            out,
            "  \"{id}\" [label=\"{id}:{label}\", color={color}, fontcolor={color}, style={style}];"
        )?;
    }
    for id in &order {
        let event = e.event(id).expect("ordered ids exist");
        for pred in event.preds.values() {
            writeln!(out, "  \"{pred}\" -> \"{id}\";")?;
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn side(b: bool) -> &'static str {
    if b {
        "darkgreen"
    } else {
        "red"
    }
}

fn border(v: TruthValue6) -> &'static str {
    if v.is_final() {
        "bold"
    } else if v.is_locally_final() {
        "solid"
    } else {
        "dashed"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pastctl::formula::{expand, parse};
    use pastctl::monitor::{compile, run, Mode};

    fn bk() -> EventStructure {
        serde_json::from_str(include_str!("../../core/fixtures/bk.json")).unwrap()
    }

    #[test]
    fn counts_on_bk() {
        let e = bk();
        let v = run(&compile(&expand(&parse("EP b").unwrap()), Mode::Six), &e).unwrap();
        let dot = export_dot(&e, &v).unwrap();
        assert_eq!(dot.matches("label=").count(), 8);
        assert_eq!(dot.matches(" -> ").count(), 12);
        assert!(dot.contains("\"B2\" [label=\"B2:T.\", color=darkgreen"));
        assert!(dot.contains("\"A1\" [label=\"A1:F.\", color=red, fontcolor=red, style=dashed]"));
        assert!(dot
            .contains("\"A4\" [label=\"A4:T\", color=darkgreen, fontcolor=darkgreen, style=bold]"));
    }

    #[test]
    fn empty_structure() {
        let e = EventStructure::empty(vec![]);
        let v = run(&compile(&expand(&parse("true").unwrap()), Mode::Two), &e).unwrap();
        assert_eq!(export_dot(&e, &v).unwrap(), "digraph events {\n}\n");
    }

    #[test]
    fn partial_verdicts_are_rejected() {
        let e = bk();
        let f = expand(&parse("b").unwrap());
        let short: EventStructure =
            serde_json::from_str(include_str!("../../core/fixtures/bk.json")).unwrap();
        let mut events = short.events().to_vec();
        events.retain(|ev| ev.seq == 1);
        let short = EventStructure::new(short.devices().to_vec(), short.atoms().to_vec(), events);
        let v = run(&compile(&f, Mode::Six), &short).unwrap();
        assert!(export_dot(&e, &v).is_err());
    }
}
