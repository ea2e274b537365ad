//! Docstring classification and signature parsing.
//!
//! Python-binding docstrings look like
//!
//! ```text
//! calcBackProject(images, channels, hist, ranges, scale[, dst]) -> dst
//! .   @brief ...
//! .   @param images Source arrays.
//! ```
//!
//! The first line that parses as a signature names the API. Bracketed names
//! inside the parentheses and names after the arrow are outputs; everything
//! else inside the parentheses is an input.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Body text emitted by the bindings when an API has no documentation.
pub const NO_DOCUMENTATION: &str = "No documentation available";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawApiDoc {
    pub api_path: String,
    pub body: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DocClass {
    WellDocumented,
    PoorlyDocumented,
    Undocumented,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureInfo {
    pub api_name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub optional_buffer_params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDescription {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed signature `{line}`: {reason}")]
    MalformedSignature { line: String, reason: String },
}

fn malformed(line: &str, reason: impl Into<String>) -> ParseError {
    ParseError::MalformedSignature {
        line: line.to_string(),
        reason: reason.into(),
    }
}

/// Everything the parse stage learns about one docstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParsedDoc {
    pub api_path: String,
    pub class: DocClass,
    pub signature: Option<SignatureInfo>,
    #[serde(default)]
    pub params: Vec<ParamDescription>,
    #[serde(default)]
    pub brief: Option<String>,
    /// Further signature lines after the first; only the first is used.
    #[serde(default)]
    pub extra_overloads: usize,
    #[serde(default)]
    pub error: Option<String>,
}

fn is_undocumented(body: &str) -> bool {
    let t = body.trim();
    t.is_empty() || t.trim_end_matches('.') == NO_DOCUMENTATION
}

fn has_doc_tags(body: &str) -> bool {
    body.lines()
        .map(strip_doc_prefix)
        .any(|l| l.starts_with("@param") || l.starts_with("@brief"))
}

/// Candidate signature lines: unprefixed lines with parentheses and an arrow.
fn signature_candidates(body: &str) -> impl Iterator<Item = &str> {
    body.lines()
        .map(str::trim)
        .filter(|l| !l.starts_with('.') && l.contains('(') && l.contains("->"))
}

pub fn classify_doc(doc: &RawApiDoc) -> DocClass {
    if is_undocumented(&doc.body) {
        return DocClass::Undocumented;
    }
    let has_sig = signature_candidates(&doc.body).any(|l| parse_signature(l).is_ok());
    if has_sig && !has_doc_tags(&doc.body) {
        DocClass::PoorlyDocumented
    } else {
        DocClass::WellDocumented
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_api_name(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_identifier)
}

pub fn parse_signature(sig_line: &str) -> Result<SignatureInfo, ParseError> {
    let line = sig_line.trim();
    let open = line.find('(').ok_or_else(|| malformed(line, "missing `(`"))?;
    let api_name = line[..open].trim();
    if api_name.is_empty() {
        return Err(malformed(line, "empty API name"));
    }
    if !is_api_name(api_name) {
        return Err(malformed(line, format!("`{api_name}` is not an identifier")));
    }

    let mut params: Vec<(String, bool)> = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    // true right after `(` or `,` at the same nesting level, where a name must follow
    let mut expect_name = true;
    let mut close = None;
    for (i, c) in line[open + 1..].char_indices() {
        match c {
            ',' | '[' | ']' | ')' => {
                let name = current.trim();
                if !name.is_empty() {
                    if !is_identifier(name) {
                        return Err(malformed(line, format!("`{name}` is not an identifier")));
                    }
                    params.push((name.to_string(), depth > 0));
                    expect_name = false;
                } else if c == ',' && expect_name {
                    return Err(malformed(line, "empty parameter name"));
                } else if c == ')' && expect_name && !params.is_empty() && depth == 0 {
                    return Err(malformed(line, "trailing comma"));
                }
                current.clear();
                match c {
                    ',' => expect_name = true,
                    '[' => depth += 1,
                    ']' => {
                        depth = depth.checked_sub(1).ok_or_else(|| malformed(line, "unbalanced `]`"))?;
                    }
                    _ => {
                        if depth != 0 {
                            return Err(malformed(line, "unclosed `[`"));
                        }
                        close = Some(open + 1 + i);
                        break;
                    }
                }
            }
            '(' => return Err(malformed(line, "nested `(`")),
            _ => current.push(c),
        }
    }
    let close = close.ok_or_else(|| malformed(line, "unbalanced `(`"))?;

    let rest = line[close + 1..].trim_start();
    let rest = rest.strip_prefix("->").ok_or_else(|| malformed(line, "missing `->`"))?;
    let mut out_text = rest.trim();
    if let Some(inner) = out_text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        out_text = inner.trim();
    }
    let mut outputs = Vec::new();
    for name in out_text.split(',').map(str::trim) {
        if name.is_empty() {
            return Err(malformed(line, "empty output name"));
        }
        if !is_identifier(name) {
            return Err(malformed(line, format!("output `{name}` is not an identifier")));
        }
        outputs.push(name.to_string());
    }

    let mut inputs = Vec::new();
    let mut optional = Vec::new();
    for (name, bracketed) in params {
        let bucket = if bracketed { &mut optional } else { &mut inputs };
        if bucket.contains(&name) {
            return Err(malformed(line, format!("duplicate parameter `{name}`")));
        }
        bucket.push(name);
    }
    if let Some(dup) = optional.iter().find(|n| inputs.contains(n)) {
        return Err(malformed(line, format!("`{dup}` is both required and optional")));
    }
    for name in &optional {
        if !outputs.contains(name) {
            outputs.push(name.clone());
        }
    }

    Ok(SignatureInfo {
        api_name: api_name.to_string(),
        inputs,
        outputs,
        optional_buffer_params: optional,
    })
}

impl fmt::Display for SignatureInfo {
    /// Renders the signature back into docstring syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.api_name, self.inputs.join(", "))?;
        for (i, name) in self.optional_buffer_params.iter().enumerate() {
            if i == 0 && self.inputs.is_empty() {
                write!(f, "[{name}")?;
            } else {
                write!(f, "[, {name}")?;
            }
        }
        for _ in &self.optional_buffer_params {
            f.write_str("]")?;
        }
        write!(f, ") -> {}", self.outputs.join(", "))
    }
}

/// Strips the `. ` continuation marker the bindings put in front of doc lines.
fn strip_doc_prefix(line: &str) -> &str {
    let t = line.trim_start();
    t.strip_prefix('.').unwrap_or(t).trim()
}

pub fn parse_param_descriptions(body: &str) -> Vec<ParamDescription> {
    let mut out: Vec<ParamDescription> = Vec::new();
    let mut open = false;
    for raw in body.lines() {
        let line = strip_doc_prefix(raw);
        if let Some(rest) = line.strip_prefix("@param") {
            let rest = rest.trim_start();
            let (name, text) = match rest.split_once(char::is_whitespace) {
                Some((n, t)) => (n, t.trim()),
                None => (rest, ""),
            };
            if name.is_empty() {
                open = false;
                continue;
            }
            out.push(ParamDescription {
                name: name.to_string(),
                text: text.to_string(),
            });
            open = true;
        } else if line.is_empty() || line.starts_with('@') || line.chars().all(|c| c == '.') {
            open = false;
        } else if open {
            let last = out.last_mut().expect("open implies an entry");
            if !last.text.is_empty() {
                last.text.push(' ');
            }
            last.text.push_str(line);
        }
    }
    out
}

fn parse_brief(body: &str) -> Option<String> {
    body.lines()
        .map(strip_doc_prefix)
        .find_map(|l| l.strip_prefix("@brief").map(|b| b.trim().to_string()))
}

/// Classifies and parses one docstring.
pub fn parse_doc(doc: &RawApiDoc) -> ParsedDoc {
    let class = classify_doc(doc);
    let mut parsed = ParsedDoc {
        api_path: doc.api_path.clone(),
        class,
        signature: None,
        params: Vec::new(),
        brief: None,
        extra_overloads: 0,
        error: None,
    };
    if class == DocClass::Undocumented {
        return parsed;
    }
    let mut first_error = None;
    for line in signature_candidates(&doc.body) {
        match parse_signature(line) {
            Ok(sig) if parsed.signature.is_none() => parsed.signature = Some(sig),
            Ok(_) => parsed.extra_overloads += 1,
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if parsed.signature.is_none() {
        parsed.error = Some(
            first_error
                .map(|e| e.to_string())
                .unwrap_or_else(|| "no signature line found".to_string()),
        );
    }
    if class == DocClass::WellDocumented {
        parsed.params = parse_param_descriptions(&doc.body);
        parsed.brief = parse_brief(&doc.body);
    }
    parsed
}
