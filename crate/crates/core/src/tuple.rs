//! Tuple grammar: atomic semantic units, their line format, and plan
//! containers.
//!
//! A tuple line looks like `3 | relation - spatial (cat, mat, on)`; the
//! numeric id is ignored on parse and regenerated on render. Plans are kept
//! in a canonical category order (entity-whole, entity-part, count, spatial
//! relation, action, attribute, global), renumbered from 1 with no gaps and
//! deduplicated.
//!
//! Two parse layers exist on purpose. [`RawTuple`] recognizes the category
//! of a line but leaves tokens and labels as free strings, so the rewrite
//! engine can repair off-schema model output. [`Tuple`] is fully validated
//! against the token whitelists; [`parse_tuple_line`] produces only valid
//! tuples and reports [`TupleError::SchemaViolation`] otherwise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:expr),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            /// Case-insensitive lookup of the canonical token.
            pub fn parse_token(s: &str) -> Option<$name> {
                let t = crate::text::collapse_ws(s);
                $(if t.eq_ignore_ascii_case($text) { return Some($name::$variant); })+
                None
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $name {
            type Err = ();
            fn from_str(s: &str) -> Result<Self, ()> {
                $name::parse_token(s).ok_or(())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
                ser.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
                let s = String::deserialize(de)?;
                $name::parse_token(&s)
                    .ok_or_else(|| serde::de::Error::custom(format!("unknown token: {s}")))
            }
        }
    };
}

token_enum! {
    /// The 15 allowed spatial relation tokens.
    RelToken {
        On => "on",
        Above => "above",
        Below => "below",
        Behind => "behind",
        InFrontOf => "in front of",
        Inside => "inside",
        In => "in",
        Near => "near",
        NextTo => "next to",
        By => "by",
        LeftOf => "left of",
        RightOf => "right of",
        SurroundedBy => "surrounded by",
        TopOf => "top of",
        BottomOf => "bottom of",
    }
}

token_enum! {
    /// Allowed action tokens: seven core interactions plus five extended ones.
    ActionToken {
        Wearing => "wearing",
        Holding => "holding",
        Carrying => "carrying",
        SittingOn => "sitting on",
        StandingOn => "standing on",
        AttachedTo => "attached to",
        TiedTo => "tied to",
        Reading => "reading",
        LookingAt => "looking at",
        GazingAt => "gazing at",
        Riding => "riding",
        Chasing => "chasing",
    }
}

impl ActionToken {
    pub fn is_core(&self) -> bool {
        matches!(
            self,
            ActionToken::Wearing
                | ActionToken::Holding
                | ActionToken::Carrying
                | ActionToken::SittingOn
                | ActionToken::StandingOn
                | ActionToken::AttachedTo
                | ActionToken::TiedTo
        )
    }
}

token_enum! {
    /// Attribute type labels.
    AttrType {
        State => "state",
        Type => "type",
        Material => "material",
        Texture => "texture",
        Shape => "shape",
        Size => "size",
        Color => "color",
        Text => "text",
    }
}

impl AttrType {
    /// Selection priority used by soft pruning; lower is more important.
    pub fn priority(&self) -> u8 {
        match self {
            AttrType::Text => 0,
            AttrType::Color => 1,
            AttrType::Shape => 2,
            AttrType::Texture => 3,
            AttrType::Material => 4,
            AttrType::Type => 5,
            AttrType::State => 6,
            // absent from the documented priority order; ranked last
            AttrType::Size => 7,
        }
    }
}

token_enum! {
    /// Recognized global style tokens.
    Style {
        Disney => "Disney",
        Pixar => "Pixar",
        StudioGhibli => "Studio Ghibli",
        Anime => "anime",
        Watercolor => "watercolor",
        OilPainting => "oil painting",
        PixelArt => "pixel art",
        ThreeDRender => "3D render",
        Cartoon => "cartoon",
        Comic => "comic",
        Sketch => "sketch",
        Glitchy => "glitchy",
        MonochromaticIllustration => "monochromatic illustration",
        YoshitakaAmano => "Yoshitaka Amano",
        ArtStation => "ArtStation",
    }
}

/// Tuple categories in canonical plan order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    EntityWhole,
    EntityPart,
    Count,
    RelationSpatial,
    Action,
    Attribute,
    Global,
}

impl Category {
    pub fn rank(&self) -> u8 {
        *self as u8
    }
}

/// One atomic, schema-valid semantic unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tuple {
    EntityWhole { name: String },
    EntityPart { owner: String, part: String },
    RelationSpatial { a: String, b: String, rel: RelToken },
    Action { a: String, action: ActionToken, b: String },
    Attribute { subject: String, attr: AttrType, value: String },
    Count { subject: String, n: i64 },
    Global { style: Style },
}

impl Tuple {
    pub fn category(&self) -> Category {
        match self {
            Tuple::EntityWhole { .. } => Category::EntityWhole,
            Tuple::EntityPart { .. } => Category::EntityPart,
            Tuple::Count { .. } => Category::Count,
            Tuple::RelationSpatial { .. } => Category::RelationSpatial,
            Tuple::Action { .. } => Category::Action,
            Tuple::Attribute { .. } => Category::Attribute,
            Tuple::Global { .. } => Category::Global,
        }
    }

    /// Full entity name introduced by this tuple, if it is an entity line.
    /// Parts are named by their complete `owner part` phrase.
    pub fn entity_name(&self) -> Option<String> {
        match self {
            Tuple::EntityWhole { name } => Some(name.clone()),
            Tuple::EntityPart { owner, part } => Some(format!("{owner} {part}")),
            _ => None,
        }
    }

    /// Entity names this tuple refers to (and which closure must resolve).
    pub fn referenced_names(&self) -> Vec<&str> {
        match self {
            Tuple::RelationSpatial { a, b, .. } | Tuple::Action { a, b, .. } => vec![a, b],
            Tuple::Attribute { subject, .. } | Tuple::Count { subject, .. } => vec![subject],
            _ => Vec::new(),
        }
    }

    /// Count tuples must carry an integer in `[2, 99]` to be schema-valid;
    /// out-of-range values are representable so the pruner can reject them.
    pub fn is_schema_valid(&self) -> bool {
        match self {
            Tuple::Count { n, .. } => (2..=99).contains(n),
            _ => true,
        }
    }

    /// Line body without the numeric id prefix.
    pub fn render_body(&self) -> String {
        match self {
            Tuple::EntityWhole { name } => format!("entity - whole ({name})"),
            Tuple::EntityPart { owner, part } => format!("entity - part ({owner} {part})"),
            Tuple::RelationSpatial { a, b, rel } => {
                format!("relation - spatial ({a}, {b}, {rel})")
            }
            Tuple::Action { a, action, b } => format!("action - ({a}, {action}, {b})"),
            Tuple::Attribute { subject, attr: AttrType::Text, value } => {
                format!("attribute - text ({subject}, \"{value}\")")
            }
            Tuple::Attribute { subject, attr, value } => {
                format!("attribute - {attr} ({subject}, {value})")
            }
            Tuple::Count { subject, n } => format!("other - count ({subject}, =={n})"),
            Tuple::Global { style } => format!("global - ({style})"),
        }
    }
}

impl std::fmt::Display for Tuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render_body())
    }
}

/// Category-recognized but not yet schema-validated tuple. Tokens, labels,
/// and count values stay as strings so the rewrite engine can repair them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawTuple {
    EntityWhole { name: String },
    EntityPart { phrase: String },
    Relation { a: String, b: String, token: String },
    Action { a: String, token: String, b: String },
    Attribute { subject: String, label: String, value: String },
    Count { subject: String, value: String },
    Global { token: String },
}

impl RawTuple {
    pub fn category(&self) -> Category {
        match self {
            RawTuple::EntityWhole { .. } => Category::EntityWhole,
            RawTuple::EntityPart { .. } => Category::EntityPart,
            RawTuple::Count { .. } => Category::Count,
            RawTuple::Relation { .. } => Category::RelationSpatial,
            RawTuple::Action { .. } => Category::Action,
            RawTuple::Attribute { .. } => Category::Attribute,
            RawTuple::Global { .. } => Category::Global,
        }
    }

    pub fn render_body(&self) -> String {
        match self {
            RawTuple::EntityWhole { name } => format!("entity - whole ({name})"),
            RawTuple::EntityPart { phrase } => format!("entity - part ({phrase})"),
            RawTuple::Relation { a, b, token } => format!("relation - spatial ({a}, {b}, {token})"),
            RawTuple::Action { a, token, b } => format!("action - ({a}, {token}, {b})"),
            RawTuple::Attribute { subject, label, value } if label == "text" => {
                format!("attribute - text ({subject}, \"{value}\")")
            }
            RawTuple::Attribute { subject, label, value } => {
                format!("attribute - {label} ({subject}, {value})")
            }
            RawTuple::Count { subject, value } => format!("other - count ({subject}, =={value})"),
            RawTuple::Global { token } => format!("global - ({token})"),
        }
    }
}

impl std::fmt::Display for RawTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render_body())
    }
}

impl From<&Tuple> for RawTuple {
    fn from(t: &Tuple) -> Self {
        match t {
            Tuple::EntityWhole { name } => RawTuple::EntityWhole { name: name.clone() },
            Tuple::EntityPart { owner, part } => {
                RawTuple::EntityPart { phrase: format!("{owner} {part}") }
            }
            Tuple::RelationSpatial { a, b, rel } => RawTuple::Relation {
                a: a.clone(),
                b: b.clone(),
                token: rel.as_str().to_string(),
            },
            Tuple::Action { a, action, b } => RawTuple::Action {
                a: a.clone(),
                token: action.as_str().to_string(),
                b: b.clone(),
            },
            Tuple::Attribute { subject, attr, value } => RawTuple::Attribute {
                subject: subject.clone(),
                label: attr.as_str().to_string(),
                value: value.clone(),
            },
            Tuple::Count { subject, n } => {
                RawTuple::Count { subject: subject.clone(), value: n.to_string() }
            }
            Tuple::Global { style } => RawTuple::Global { token: style.as_str().to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    /// No recognizable category keyword, or the line shape is wrong.
    #[error("malformed line: {0}")]
    MalformedLine(String),
    /// Category recognized but a token, label, count, or owner violates
    /// the schema.
    #[error("schema violation: {0}")]
    SchemaViolation(String),
}

/// Strip a leading `N |` id. The id value is discarded.
fn strip_line_id(line: &str) -> &str {
    if let Some((head, rest)) = line.split_once('|') {
        let head = head.trim();
        if !head.is_empty() && head.chars().all(|c| c.is_ascii_digit()) {
            return rest.trim();
        }
    }
    line.trim()
}

/// Split `args` on top-level commas, respecting double-quoted segments.
fn split_args(args: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    for ch in args.chars() {
        match ch {
            '"' => {
                in_quotes = !in_quotes;
                cur.push(ch);
            }
            ',' if !in_quotes => parts.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    parts.into_iter().map(|p| p.trim().to_string()).collect()
}

fn normalize_name(s: &str) -> String {
    crate::text::collapse_ws(s).to_lowercase()
}

/// Strip one layer of surrounding double quotes, preserving inner content.
fn unquote(s: &str) -> String {
    let t = s.trim();
    if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') {
        t[1..t.len() - 1].to_string()
    } else {
        t.to_string()
    }
}

/// Parse a line into its raw category form. Names and values are
/// case-normalized to lowercase except `attribute - text` values, which keep
/// their exact content.
pub fn parse_raw_line(text: &str) -> Result<RawTuple, TupleError> {
    let body = strip_line_id(text);
    let malformed = || TupleError::MalformedLine(body.to_string());

    let open = body.find('(').ok_or_else(malformed)?;
    let close = body.rfind(')').ok_or_else(malformed)?;
    if close < open || !body[close + 1..].trim().is_empty() {
        return Err(malformed());
    }
    let head = body[..open].trim();
    let args = split_args(&body[open + 1..close]);
    if args.iter().any(|a| a.is_empty()) {
        return Err(malformed());
    }

    let segments: Vec<String> = head
        .split('-')
        .map(|s| crate::text::collapse_ws(s).to_lowercase())
        .collect();
    let keyword = segments.first().map(String::as_str).unwrap_or("");

    match (keyword, segments.get(1).map(String::as_str)) {
        ("entity", Some("whole")) => match args.as_slice() {
            [name] => Ok(RawTuple::EntityWhole { name: normalize_name(name) }),
            _ => Err(malformed()),
        },
        ("entity", Some("part")) => match args.as_slice() {
            [phrase] => Ok(RawTuple::EntityPart { phrase: normalize_name(phrase) }),
            _ => Err(malformed()),
        },
        ("relation", Some("spatial")) => match args.as_slice() {
            [a, b, token] => Ok(RawTuple::Relation {
                a: normalize_name(a),
                b: normalize_name(b),
                token: normalize_name(token),
            }),
            _ => Err(malformed()),
        },
        ("action", _) if segments.len() <= 2 && segments.get(1).map_or(true, |s| s.is_empty()) => {
            match args.as_slice() {
                [a, token, b] => Ok(RawTuple::Action {
                    a: normalize_name(a),
                    token: normalize_name(token),
                    b: normalize_name(b),
                }),
                _ => Err(malformed()),
            }
        }
        ("attribute", Some(first)) if !first.is_empty() => {
            let label = segments[1..].join(" ");
            match args.as_slice() {
                [subject, value] => {
                    let value = if label == "text" {
                        unquote(value)
                    } else {
                        normalize_name(&unquote(value))
                    };
                    Ok(RawTuple::Attribute {
                        subject: normalize_name(subject),
                        label,
                        value,
                    })
                }
                _ => Err(malformed()),
            }
        }
        ("other", Some("count")) => match args.as_slice() {
            [subject, value] => Ok(RawTuple::Count {
                subject: normalize_name(subject),
                value: value.trim_start_matches('=').trim().to_string(),
            }),
            _ => Err(malformed()),
        },
        ("global", _) => match args.as_slice() {
            [token] => Ok(RawTuple::Global { token: crate::text::collapse_ws(token) }),
            _ => Err(malformed()),
        },
        _ => Err(malformed()),
    }
}

impl TryFrom<RawTuple> for Tuple {
    type Error = TupleError;

    fn try_from(raw: RawTuple) -> Result<Tuple, TupleError> {
        match raw {
            RawTuple::EntityWhole { name } => Ok(Tuple::EntityWhole { name }),
            RawTuple::EntityPart { phrase } => {
                let mut ws: Vec<&str> = phrase.split_whitespace().collect();
                if ws.len() < 2 {
                    return Err(TupleError::SchemaViolation(format!(
                        "part missing owner: {phrase}"
                    )));
                }
                let part = ws.pop().unwrap().to_string();
                Ok(Tuple::EntityPart { owner: ws.join(" "), part })
            }
            RawTuple::Relation { a, b, token } => {
                let rel = RelToken::parse_token(&token).ok_or_else(|| {
                    TupleError::SchemaViolation(format!("relation token not allowed: {token}"))
                })?;
                Ok(Tuple::RelationSpatial { a, b, rel })
            }
            RawTuple::Action { a, token, b } => {
                let action = ActionToken::parse_token(&token).ok_or_else(|| {
                    TupleError::SchemaViolation(format!("action token not allowed: {token}"))
                })?;
                Ok(Tuple::Action { a, action, b })
            }
            RawTuple::Attribute { subject, label, value } => {
                let attr = AttrType::parse_token(&label).ok_or_else(|| {
                    TupleError::SchemaViolation(format!("attribute label not allowed: {label}"))
                })?;
                Ok(Tuple::Attribute { subject, attr, value })
            }
            RawTuple::Count { subject, value } => {
                let n: i64 = value.parse().map_err(|_| {
                    TupleError::SchemaViolation(format!("count is not an integer: {value}"))
                })?;
                if !(2..=99).contains(&n) {
                    return Err(TupleError::SchemaViolation(format!("count out of range: {n}")));
                }
                Ok(Tuple::Count { subject, n })
            }
            RawTuple::Global { token } => {
                let style = Style::parse_token(&token).ok_or_else(|| {
                    TupleError::SchemaViolation(format!("style not recognized: {token}"))
                })?;
                Ok(Tuple::Global { style })
            }
        }
    }
}

/// Parse one line into a schema-valid tuple.
pub fn parse_tuple_line(text: &str) -> Result<Tuple, TupleError> {
    Tuple::try_from(parse_raw_line(text)?)
}

/// Ordered, renumbered tuple list under a budget, plus the summary it was
/// derived from. Construction canonicalizes: tuples are stably sorted by
/// category, deduplicated, and re-indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuplePlan {
    pub summary: String,
    tuples: Vec<Tuple>,
    pub k: u32,
}

pub const DEFAULT_BUDGET: u32 = 20;

impl TuplePlan {
    pub fn new(summary: impl Into<String>, tuples: Vec<Tuple>) -> Self {
        let mut plan =
            TuplePlan { summary: summary.into(), tuples, k: DEFAULT_BUDGET };
        plan.canonicalize();
        plan
    }

    pub fn empty(summary: impl Into<String>) -> Self {
        TuplePlan::new(summary, Vec::new())
    }

    fn canonicalize(&mut self) {
        self.tuples.sort_by_key(|t| t.category().rank());
        let mut seen = std::collections::HashSet::new();
        self.tuples.retain(|t| seen.insert(t.clone()));
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// `(index, tuple)` pairs with contiguous 1-based indices.
    pub fn lines(&self) -> impl Iterator<Item = (usize, &Tuple)> {
        self.tuples.iter().enumerate().map(|(i, t)| (i + 1, t))
    }

    /// Names of all entities (wholes and full part phrases) in the plan.
    pub fn entity_names(&self) -> Vec<String> {
        self.tuples.iter().filter_map(Tuple::entity_name).collect()
    }

    pub fn entity_wholes(&self) -> impl Iterator<Item = &str> {
        self.tuples.iter().filter_map(|t| match t {
            Tuple::EntityWhole { name } => Some(name.as_str()),
            _ => None,
        })
    }
}

/// Render a plan as numbered lines in canonical order. Empty plans render
/// as the empty string.
pub fn render_plan(plan: &TuplePlan) -> String {
    plan.lines()
        .map(|(i, t)| format!("{i} | {}", t.render_body()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Errors from parsing a multi-line plan: each failing line with its
/// 1-based index.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} line(s) failed to parse", .0.len())]
pub struct PlanParseError(pub Vec<(usize, TupleError)>);

/// Parse numbered (or bare) tuple lines into a plan. Blank lines are
/// skipped; any failing line is collected with its index.
pub fn parse_plan(summary: &str, body: &str) -> Result<TuplePlan, PlanParseError> {
    let mut tuples = Vec::new();
    let mut errors = Vec::new();
    let mut index = 0usize;
    for line in body.lines() {
        if line.trim().is_empty() {
            continue;
        }
        index += 1;
        match parse_tuple_line(line) {
            Ok(t) => tuples.push(t),
            Err(e) => errors.push((index, e)),
        }
    }
    if errors.is_empty() {
        Ok(TuplePlan::new(summary, tuples))
    } else {
        Err(PlanParseError(errors))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    /// No balanced, well-formed JSON object could be extracted.
    #[error("no JSON object envelope found")]
    EnvelopeMissing,
    #[error("envelope field missing or not a string: {0}")]
    FieldMissing(String),
    #[error(transparent)]
    Lines(#[from] PlanParseError),
}

/// Scan `text` for the first balanced `{...}` region that parses as a JSON
/// object. Tolerates leading/trailing prose and code fences around the
/// object.
pub fn extract_json_object(text: &str) -> Option<serde_json::Map<String, serde_json::Value>> {
    let bytes = text.as_bytes();
    let mut start = 0usize;
    while let Some(open) = text[start..].find('{').map(|i| i + start) {
        let mut depth = 0usize;
        let mut in_string = false;
        let mut escaped = false;
        for (i, &b) in bytes.iter().enumerate().skip(open) {
            if in_string {
                if escaped {
                    escaped = false;
                } else if b == b'\\' {
                    escaped = true;
                } else if b == b'"' {
                    in_string = false;
                }
                continue;
            }
            match b {
                b'"' => in_string = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        let candidate = &text[open..=i];
                        if let Ok(serde_json::Value::Object(map)) =
                            serde_json::from_str(candidate)
                        {
                            return Some(map);
                        }
                        break;
                    }
                }
                _ => {}
            }
        }
        start = open + 1;
    }
    None
}

/// Parse a JSON envelope like `{"step_by_step_thinking": [...],
/// "rewrite_tuple": "1 | ...\n2 | ..."}`. Only `field_name` is read; line
/// breaks inside it may be real newlines or the two-character sequence
/// backslash-n.
pub fn parse_json_envelope(text: &str, field_name: &str) -> Result<TuplePlan, EnvelopeError> {
    let map = extract_json_object(text).ok_or(EnvelopeError::EnvelopeMissing)?;
    let field = map
        .get(field_name)
        .and_then(|v| v.as_str())
        .ok_or_else(|| EnvelopeError::FieldMissing(field_name.to_string()))?;
    let body = field.replace("\\n", "\n");
    Ok(parse_plan("", &body)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numbered_entity_line() {
        let t = parse_tuple_line("1 | entity - whole (oven)").unwrap();
        assert_eq!(t, Tuple::EntityWhole { name: "oven".into() });
    }

    #[test]
    fn parses_attribute_and_discards_id() {
        let t = parse_tuple_line("2 | attribute - color (oven, pink)").unwrap();
        assert_eq!(
            t,
            Tuple::Attribute { subject: "oven".into(), attr: AttrType::Color, value: "pink".into() }
        );
    }

    #[test]
    fn rejects_off_whitelist_relation_token() {
        let err = parse_tuple_line("3 | relation - spatial (cat, mat, floating)").unwrap_err();
        assert!(matches!(err, TupleError::SchemaViolation(_)));
    }

    #[test]
    fn text_attribute_keeps_exact_quoted_content() {
        let t = parse_tuple_line("4 | attribute - text (sign, \"OPEN\")").unwrap();
        assert_eq!(
            t,
            Tuple::Attribute { subject: "sign".into(), attr: AttrType::Text, value: "OPEN".into() }
        );
        assert_eq!(t.render_body(), "attribute - text (sign, \"OPEN\")");
    }

    #[test]
    fn text_value_commas_stay_inside_quotes() {
        let t = parse_tuple_line("attribute - text (board, \"OPEN, 24H\")").unwrap();
        assert_eq!(
            t,
            Tuple::Attribute {
                subject: "board".into(),
                attr: AttrType::Text,
                value: "OPEN, 24H".into()
            }
        );
    }

    #[test]
    fn part_requires_owner_token() {
        let err = parse_tuple_line("entity - part (roof)").unwrap_err();
        assert!(matches!(err, TupleError::SchemaViolation(_)));
        let ok = parse_tuple_line("entity - part (traffic light housing)").unwrap();
        assert_eq!(ok, Tuple::EntityPart { owner: "traffic light".into(), part: "housing".into() });
    }

    #[test]
    fn count_range_enforced() {
        assert!(parse_tuple_line("other - count (dogs, ==3)").is_ok());
        assert!(matches!(
            parse_tuple_line("other - count (dogs, ==1)"),
            Err(TupleError::SchemaViolation(_))
        ));
        assert!(matches!(
            parse_tuple_line("other - count (dogs, ==100)"),
            Err(TupleError::SchemaViolation(_))
        ));
        assert!(matches!(
            parse_tuple_line("other - count (dogs, ==group)"),
            Err(TupleError::SchemaViolation(_))
        ));
    }

    #[test]
    fn unknown_category_is_malformed() {
        assert!(matches!(
            parse_tuple_line("banana - yellow (x)"),
            Err(TupleError::MalformedLine(_))
        ));
        assert!(matches!(parse_tuple_line("entity - whole oven"), Err(TupleError::MalformedLine(_))));
    }

    #[test]
    fn names_are_lowercased_at_parse() {
        let t = parse_tuple_line("entity - whole (Red Car)").unwrap();
        assert_eq!(t, Tuple::EntityWhole { name: "red car".into() });
    }

    #[test]
    fn plan_renders_in_canonical_order() {
        let plan = TuplePlan::new(
            "a pink oven",
            vec![
                Tuple::Attribute { subject: "oven".into(), attr: AttrType::Color, value: "pink".into() },
                Tuple::EntityWhole { name: "oven".into() },
            ],
        );
        assert_eq!(
            render_plan(&plan),
            "1 | entity - whole (oven)\n2 | attribute - color (oven, pink)"
        );
    }

    #[test]
    fn count_sorts_before_relation() {
        let plan = TuplePlan::new(
            "",
            vec![
                Tuple::RelationSpatial { a: "cat".into(), b: "mat".into(), rel: RelToken::On },
                Tuple::Count { subject: "cats".into(), n: 2 },
            ],
        );
        let rendered = render_plan(&plan);
        let count_pos = rendered.find("other - count").unwrap();
        let rel_pos = rendered.find("relation - spatial").unwrap();
        assert!(count_pos < rel_pos);
    }

    #[test]
    fn empty_plan_renders_empty() {
        assert_eq!(render_plan(&TuplePlan::empty("x")), "");
    }

    #[test]
    fn duplicate_tuples_are_dropped() {
        let plan = TuplePlan::new(
            "",
            vec![
                Tuple::EntityWhole { name: "dog".into() },
                Tuple::EntityWhole { name: "dog".into() },
            ],
        );
        assert_eq!(plan.len(), 1);
    }

    #[test]
    fn envelope_roundtrip_with_thinking_field() {
        let text = r#"{"step_by_step_thinking":["a","b"],"rewrite_tuple":"1 | entity - whole (dog)"}"#;
        let plan = parse_json_envelope(text, "rewrite_tuple").unwrap();
        assert_eq!(plan.tuples(), &[Tuple::EntityWhole { name: "dog".into() }]);
    }

    #[test]
    fn envelope_empty_field_is_empty_plan() {
        let plan = parse_json_envelope(r#"{"refine_tuple":""}"#, "refine_tuple").unwrap();
        assert!(plan.is_empty());
    }

    #[test]
    fn envelope_tolerates_surrounding_prose() {
        let text = "Sure! Here is the result:\n```json\n{\"refine_tuple\":\"1 | entity - whole (cat)\"}\n```\nLet me know.";
        let plan = parse_json_envelope(text, "refine_tuple").unwrap();
        assert_eq!(plan.len(), 1);
    }

    #[test]
    fn envelope_missing_when_no_object() {
        assert_eq!(
            parse_json_envelope("no json here", "refine_tuple").unwrap_err(),
            EnvelopeError::EnvelopeMissing
        );
    }

    #[test]
    fn envelope_collects_line_errors_with_index() {
        let text = r#"{"rewrite_tuple":"1 | entity - whole (cat)\n2 | banana - x (y)"}"#;
        match parse_json_envelope(text, "rewrite_tuple").unwrap_err() {
            EnvelopeError::Lines(PlanParseError(errs)) => {
                assert_eq!(errs.len(), 1);
                assert_eq!(errs[0].0, 2);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }
}
