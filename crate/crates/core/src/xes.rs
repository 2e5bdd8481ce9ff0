//! Reader and writer for the XES subset: `log`, `trace`, `event` and their
//! typed attribute elements. Every event becomes a depth-1 event whose path is
//! its `concept:name`; all other event attributes are kept as text.

use std::collections::BTreeMap;
use std::io::Write;

use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use crate::error::LogError;
use crate::log::{keys, Activity, Event, HierLog, HierTrace};

const ATTRIBUTE_TAGS: &[&[u8]] = &[b"string", b"date", b"int", b"float", b"boolean", b"id"];

fn malformed(e: impl std::fmt::Display) -> LogError {
    LogError::MalformedXml(e.to_string())
}

fn key_value(e: &BytesStart<'_>) -> Result<Option<(String, String)>, LogError> {
    if !ATTRIBUTE_TAGS.contains(&e.local_name().as_ref()) {
        return Ok(None);
    }
    let mut key = None;
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(malformed)?;
        let text = attr.unescape_value().map_err(malformed)?.into_owned();
        match attr.key.as_ref() {
            b"key" => key = Some(text),
            b"value" => value = Some(text),
            _ => {}
        }
    }
    Ok(key.zip(value))
}

/// Parses an XES document into a depth-1 hierarchical log. Fails on the whole
/// document; no partial log is returned.
pub fn parse_xes(input: &[u8]) -> Result<HierLog, LogError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);

    let mut buf = Vec::new();
    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut traces: Vec<HierTrace> = Vec::new();
    let mut current: Option<HierTrace> = None;
    let mut event: Option<BTreeMap<String, String>> = None;
    let mut seen_log = false;

    loop {
        let ev = reader.read_event_into(&mut buf).map_err(malformed)?;
        match ev {
            XmlEvent::Start(ref e) | XmlEvent::Empty(ref e) => {
                let is_empty = matches!(ev, XmlEvent::Empty(_));
                let name = e.local_name().as_ref().to_vec();
                match (stack.len(), name.as_slice()) {
                    (0, b"log") => seen_log = true,
                    (0, other) => {
                        return Err(malformed(format!(
                            "root element must be <log>, found <{}>",
                            String::from_utf8_lossy(other)
                        )))
                    }
                    (1, b"trace") => current = Some(HierTrace::default()),
                    (2, b"event") if current.is_some() => event = Some(BTreeMap::new()),
                    (3, _) if event.is_some() && stack[2] == b"event" => {
                        if let Some((k, v)) = key_value(e)? {
                            event.as_mut().expect("checked").insert(k, v);
                        }
                    }
                    _ => {}
                }
                if is_empty {
                    // self-closing element: close immediately
                    close(&name, stack.len(), &mut current, &mut event, &mut traces)?;
                } else {
                    stack.push(name);
                }
            }
            XmlEvent::End(_) => {
                let name = stack.pop().ok_or_else(|| malformed("unbalanced end tag"))?;
                close(&name, stack.len(), &mut current, &mut event, &mut traces)?;
            }
            XmlEvent::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(malformed("unexpected end of document"));
    }
    if !seen_log {
        return Err(malformed("no <log> element"));
    }
    Ok(HierLog::new(traces))
}

fn close(
    name: &[u8],
    depth: usize,
    current: &mut Option<HierTrace>,
    event: &mut Option<BTreeMap<String, String>>,
    traces: &mut Vec<HierTrace>,
) -> Result<(), LogError> {
    match (depth, name) {
        (1, b"trace") => {
            if let Some(t) = current.take() {
                traces.push(t);
            }
        }
        (2, b"event") => {
            if let (Some(mut attrs), Some(trace)) = (event.take(), current.as_mut()) {
                let name = attrs.remove(keys::CONCEPT_NAME).ok_or(LogError::MissingConceptName {
                    trace: traces.len(),
                    event: trace.events.len(),
                })?;
                let activity = Activity::new(&name)?;
                trace.events.push(Event::with_attrs(vec![activity], attrs));
            }
        }
        _ => {}
    }
    Ok(())
}

fn escape(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// Writes a log back in the same XES subset. Hierarchical paths are joined
/// with `.` into `concept:name`, so only depth-1 logs round-trip exactly.
pub fn write_xes<W: Write>(log: &HierLog, mut out: W) -> std::io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<log xes.version="1.0">"#)?;
    for trace in &log.traces {
        writeln!(out, "  <trace>")?;
        for event in &trace.events {
            writeln!(out, "    <event>")?;
            writeln!(
                out,
                r#"      <string key="concept:name" value="{}"/>"#,
                escape(&event.to_string())
            )?;
            for (k, v) in &event.attrs {
                let tag = if k == keys::TIMESTAMP { "date" } else { "string" };
                writeln!(out, r#"      <{tag} key="{}" value="{}"/>"#, escape(k), escape(v))?;
            }
            writeln!(out, "    </event>")?;
        }
        writeln!(out, "  </trace>")?;
    }
    writeln!(out, "</log>")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_EVENTS: &str = r#"<?xml version="1.0"?>
<log xes.version="1.0">
  <trace>
    <string key="concept:name" value="case-1"/>
    <event>
      <string key="concept:name" value="A.process()"/>
      <string key="lifecycle:transition" value="start"/>
      <date key="time:timestamp" value="2020-01-01T00:00:00Z"/>
    </event>
    <event>
      <string key="concept:name" value="A.process()"/>
      <string key="lifecycle:transition" value="complete"/>
      <string key="org:resource" value="x &amp; y"/>
    </event>
  </trace>
</log>"#;

    #[test]
    fn parses_one_trace() {
        let log = parse_xes(TWO_EVENTS.as_bytes()).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log.depth(), 1);
        let events = &log.traces[0].events;
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].path[0].as_str(), "A.process()");
        assert_eq!(events[0].attr(keys::LIFECYCLE), Some("start"));
        assert_eq!(events[0].attr(keys::TIMESTAMP), Some("2020-01-01T00:00:00Z"));
        assert_eq!(events[1].attr("org:resource"), Some("x & y"));
    }

    #[test]
    fn empty_log() {
        let log = parse_xes(b"<log></log>").unwrap();
        assert!(log.is_empty());
        assert_eq!(log.depth(), 0);
        assert!(parse_xes(b"<log/>").unwrap().is_empty());
    }

    #[test]
    fn errors_fail_whole_log() {
        assert!(matches!(
            parse_xes(b"<log><trace><event>"),
            Err(LogError::MalformedXml(_))
        ));
        assert!(matches!(
            parse_xes(b"<log><trace></event></log>"),
            Err(LogError::MalformedXml(_))
        ));
        assert!(matches!(parse_xes(b""), Err(LogError::MalformedXml(_))));
        let missing = r#"<log><trace><event><string key="concept:name" value="a"/></event>
            <event><string key="lifecycle:transition" value="start"/></event></trace></log>"#;
        assert_eq!(
            parse_xes(missing.as_bytes()),
            Err(LogError::MissingConceptName { trace: 0, event: 1 })
        );
    }

    #[test]
    fn write_then_parse_depth_one() {
        let log = parse_xes(TWO_EVENTS.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_xes(&log, &mut out).unwrap();
        assert_eq!(parse_xes(&out).unwrap(), log);
    }
}
