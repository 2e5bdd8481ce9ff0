//! PNML reading and writing.
//!
//! Transitions carry a `toolspecific` element with their kind, hierarchical
//! path and enclosing call, which is what [`from_pnml`] needs to recover the
//! fused language. Nets from other tools read fine without it: the kind then
//! follows the `+start`/`+end` suffix of the label.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use super::petri::{PetriNet, Transition, TransitionKind};
use crate::error::ExportError;
use crate::log::Activity;

const TOOL: &str = "hptree";

fn escape(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

pub fn to_pnml(net: &PetriNet) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n");
    out.push_str("  <net id=\"net\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n");
    out.push_str("    <page id=\"page\">\n");
    for p in &net.places {
        let _ = write!(
            out,
            "      <place id=\"{0}\">\n        <name><text>{0}</text></name>\n",
            escape(p)
        );
        if let Some(k) = net.initial_marking.get(p) {
            let _ = writeln!(out, "        <initialMarking><text>{k}</text></initialMarking>");
        }
        out.push_str("      </place>\n");
    }
    for t in &net.transitions {
        let _ = writeln!(out, "      <transition id=\"{}\">", escape(&t.id));
        if let Some(l) = &t.label {
            let _ = writeln!(out, "        <name><text>{}</text></name>", escape(l));
        }
        let call = t
            .call
            .as_ref()
            .map(|c| format!(" call=\"{}\"", escape(c)))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "        <toolspecific tool=\"{TOOL}\" version=\"1\" kind=\"{}\"{call}>",
            t.kind.keyword()
        );
        for a in &t.path {
            let _ = writeln!(out, "          <path>{}</path>", escape(a.as_str()));
        }
        out.push_str("        </toolspecific>\n      </transition>\n");
    }
    for (i, (a, b)) in net.arcs.iter().enumerate() {
        let _ = writeln!(
            out,
            "      <arc id=\"a{i}\" source=\"{}\" target=\"{}\"/>",
            escape(a),
            escape(b)
        );
    }
    out.push_str("    </page>\n    <finalmarkings>\n      <marking>\n");
    for (p, k) in &net.final_marking {
        let _ = writeln!(out, "        <place idref=\"{}\"><text>{k}</text></place>", escape(p));
    }
    out.push_str("      </marking>\n    </finalmarkings>\n  </net>\n</pnml>\n");
    out
}

fn malformed(e: impl std::fmt::Display) -> ExportError {
    ExportError::MalformedPnml(e.to_string())
}

fn attr(e: &BytesStart<'_>, key: &[u8]) -> Result<Option<String>, ExportError> {
    for a in e.attributes() {
        let a = a.map_err(malformed)?;
        if a.key.as_ref() == key {
            return Ok(Some(a.unescape_value().map_err(malformed)?.into_owned()));
        }
    }
    Ok(None)
}

#[derive(Default)]
struct PendingTransition {
    id: String,
    label: Option<String>,
    kind: Option<TransitionKind>,
    path: Vec<Activity>,
    call: Option<String>,
}

impl PendingTransition {
    fn finish(self) -> Transition {
        let kind = self.kind.unwrap_or_else(|| match &self.label {
            None => TransitionKind::Silent,
            Some(l) if l.ends_with("+end") => TransitionKind::End,
            Some(_) => TransitionKind::Start,
        });
        let path = if self.path.is_empty() && kind != TransitionKind::Silent {
            let l = self.label.as_deref().unwrap_or_default();
            let base = l.strip_suffix("+start").or_else(|| l.strip_suffix("+end")).unwrap_or(l);
            Activity::new(base).into_iter().collect()
        } else {
            self.path
        };
        Transition {
            id: self.id,
            label: self.label,
            kind,
            path,
            call: self.call,
        }
    }
}

pub fn from_pnml(input: &str) -> Result<PetriNet, ExportError> {
    let mut reader = Reader::from_str(input);
    reader.config_mut().trim_text(true);
    let mut net = PetriNet::default();
    // element names from the root down to the current one
    let mut stack: Vec<String> = Vec::new();
    let mut place: Option<String> = None;
    let mut trans: Option<PendingTransition> = None;
    let mut final_place: Option<String> = None;
    let mut final_marking = BTreeMap::new();
    loop {
        let ev = reader.read_event().map_err(malformed)?;
        match ev {
            XmlEvent::Start(ref e) | XmlEvent::Empty(ref e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                let in_final = stack.iter().any(|s| s == "finalmarkings");
                match name.as_str() {
                    "place" if in_final => final_place = attr(e, b"idref")?,
                    "place" => {
                        let id = attr(e, b"id")?.ok_or_else(|| malformed("place without id"))?;
                        net.places.push(id.clone());
                        place = Some(id);
                    }
                    "transition" => {
                        let id = attr(e, b"id")?.ok_or_else(|| malformed("transition without id"))?;
                        trans = Some(PendingTransition {
                            id,
                            ..Default::default()
                        });
                    }
                    "toolspecific" => {
                        if let (Some(t), Some(TOOL)) = (trans.as_mut(), attr(e, b"tool")?.as_deref()) {
                            let kind = attr(e, b"kind")?.unwrap_or_default();
                            t.kind = Some(
                                TransitionKind::from_keyword(&kind)
                                    .ok_or_else(|| malformed(format!("unknown transition kind {kind:?}")))?,
                            );
                            t.call = attr(e, b"call")?;
                        }
                    }
                    "arc" => {
                        let s = attr(e, b"source")?.ok_or_else(|| malformed("arc without source"))?;
                        let t = attr(e, b"target")?.ok_or_else(|| malformed("arc without target"))?;
                        net.arcs.push((s, t));
                    }
                    _ => {}
                }
                if matches!(ev, XmlEvent::Start(_)) {
                    stack.push(name);
                } else if name == "place" && !in_final {
                    place = None;
                }
            }
            XmlEvent::Text(ref t) => {
                let text = t.unescape().map_err(malformed)?.into_owned();
                let parent = stack.iter().rev().nth(1).map(String::as_str);
                match (stack.last().map(String::as_str), parent) {
                    (Some("text"), Some("initialMarking")) => {
                        if let Some(p) = &place {
                            net.initial_marking.insert(p.clone(), text.parse().map_err(malformed)?);
                        }
                    }
                    (Some("text"), Some("name"))
                        if stack.iter().rev().nth(2).map(String::as_str) == Some("transition") =>
                    {
                        if let Some(tr) = trans.as_mut() {
                            tr.label = Some(text);
                        }
                    }
                    (Some("text"), Some("place")) => {
                        if let Some(p) = &final_place {
                            final_marking.insert(p.clone(), text.parse().map_err(malformed)?);
                        }
                    }
                    (Some("path"), Some("toolspecific")) => {
                        if let Some(tr) = trans.as_mut() {
                            tr.path.push(Activity::new(&text).map_err(malformed)?);
                        }
                    }
                    _ => {}
                }
            }
            XmlEvent::End(_) => match stack.pop().as_deref() {
                Some("transition") => {
                    if let Some(t) = trans.take() {
                        net.transitions.push(t.finish());
                    }
                }
                Some("place") => {
                    place = None;
                    final_place = None;
                }
                _ => {}
            },
            XmlEvent::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(malformed("unexpected end of document"));
    }
    if net.places.is_empty() && net.transitions.is_empty() {
        return Err(malformed("no net"));
    }
    net.final_marking = final_marking;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::export::to_petri_net;
    use crate::tree::testutil::t;

    #[test]
    fn round_trip() {
        let net = to_petri_net(&t(
            r#"sub:"Main.main()"(seq("Main.input()", xor("A.f()", tau), par(a, b)))"#,
        ))
        .unwrap();
        let xml = to_pnml(&net);
        assert!(xml.contains("<text>Main.main()+start</text>"));
        assert_eq!(from_pnml(&xml).unwrap(), net);
    }

    #[test]
    fn foreign_nets_fall_back_to_labels() {
        let xml = r#"<pnml><net id="n"><page id="p">
            <place id="i"><initialMarking><text>1</text></initialMarking></place>
            <place id="o"/>
            <transition id="x"><name><text>a+start</text></name></transition>
            <arc id="1" source="i" target="x"/><arc id="2" source="x" target="o"/>
            </page></net></pnml>"#;
        let net = from_pnml(xml).unwrap();
        assert_eq!(net.transitions[0].kind, TransitionKind::Start);
        assert_eq!(net.transitions[0].path[0].as_str(), "a");
        assert_eq!(net.initial_marking["i"], 1);
        assert!(net.final_marking.is_empty());
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(from_pnml("<pnml><net>"), Err(ExportError::MalformedPnml(_))));
        assert!(matches!(
            from_pnml("not xml at all"),
            Err(ExportError::MalformedPnml(_))
        ));
    }
}
