//! Deterministic rewrite stage: schema normalization of raw decomposer
//! output.
//!
//! Rewrite is schema repair only. It normalizes spatial relation tokens,
//! converts verb-like relations into actions, repairs attribute labels,
//! performs clothing/accessory part extraction, de-bakes modifiers out of
//! entity names, and fixes parts that lack an owner token. It never prunes
//! by summary grounding and never validates counts; both belong to the
//! prune stage.
//!
//! Phrase matching is exact on the whole token (case-insensitive, collapsed
//! whitespace). Summary lookups are word-boundary matches.

use crate::text;
use crate::tuple::{ActionToken, AttrType, RawTuple, RelToken, Style, Tuple, TuplePlan};

/// Outcome of normalizing the third argument of a relation line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationOutcome {
    Token(RelToken),
    ConvertToAction(ActionToken),
    Delete,
}

/// Relation phrases that map onto a whitelist token. The around/surrounding
/// entries additionally require a summary gate, applied by [`rewrite`].
const RELATION_MAP: &[(&str, RelToken)] = &[
    ("under", RelToken::Below),
    ("beneath", RelToken::Below),
    ("underneath", RelToken::Below),
    ("atop", RelToken::On),
    ("on top of", RelToken::On),
    ("resting on", RelToken::On),
    ("placed on", RelToken::On),
    ("positioned on", RelToken::On),
    ("mounted on", RelToken::On),
    ("arranged on", RelToken::On),
    ("over", RelToken::Above),
    ("beside", RelToken::NextTo),
    ("alongside", RelToken::NextTo),
    ("adjacent to", RelToken::NextTo),
    ("against", RelToken::By),
    ("leaning against", RelToken::By),
    ("around", RelToken::SurroundedBy),
    ("surrounding", RelToken::SurroundedBy),
    ("to the left of", RelToken::LeftOf),
    ("to the right of", RelToken::RightOf),
];

/// Verb phrases that convert a relation line into an action tuple.
const ACTION_CONVERSIONS: &[(&str, ActionToken)] = &[
    ("holding", ActionToken::Holding),
    ("held", ActionToken::Holding),
    ("wearing", ActionToken::Wearing),
    ("wear", ActionToken::Wearing),
    ("dressed in", ActionToken::Wearing),
    ("reading", ActionToken::Reading),
    ("read", ActionToken::Reading),
    ("gazing at", ActionToken::GazingAt),
    ("gaze at", ActionToken::GazingAt),
    ("looking at", ActionToken::LookingAt),
    ("look at", ActionToken::LookingAt),
    ("riding", ActionToken::Riding),
    ("ride", ActionToken::Riding),
    ("carrying", ActionToken::Carrying),
    ("carry", ActionToken::Carrying),
    ("chasing", ActionToken::Chasing),
    ("chase", ActionToken::Chasing),
    ("tied to", ActionToken::TiedTo),
    ("tie to", ActionToken::TiedTo),
    ("attached to", ActionToken::AttachedTo),
    ("attach to", ActionToken::AttachedTo),
    ("sitting on", ActionToken::SittingOn),
    ("sits on", ActionToken::SittingOn),
    ("seated on", ActionToken::SittingOn),
    ("standing on", ActionToken::StandingOn),
    ("stands on", ActionToken::StandingOn),
];

/// Clothing/accessory trigger words for the part-extraction repair.
pub const CLOTHING_TRIGGERS: &[&str] = &[
    "costume", "outfit", "dress", "shirt", "pants", "jeans", "jacket", "scarf", "hat",
    "shoes", "glove", "mitt", "backpack", "belt", "jersey", "goggles",
];

const COLOR_WORDS: &[&str] = &[
    "red", "orange", "yellow", "green", "blue", "purple", "pink", "brown", "black",
    "white", "gray", "grey", "gold", "silver", "beige", "teal", "cyan", "magenta",
    "maroon", "navy", "olive", "turquoise", "violet", "tan", "crimson", "scarlet",
    "ivory", "lavender",
];

const SIZE_WORDS: &[&str] = &[
    "tiny", "small", "little", "big", "large", "huge", "giant", "oversized",
    "miniature", "massive",
];

const MATERIAL_WORDS: &[&str] = &[
    "wooden", "wood", "metal", "metallic", "steel", "iron", "ceramic", "glass",
    "plastic", "leather", "stone", "brick", "marble", "copper", "brass", "denim",
    "wool", "cotton", "silk", "rubber", "paper", "cardboard", "velvet", "straw",
    "bamboo", "porcelain",
];

const TEXTURE_WORDS: &[&str] = &[
    "striped", "plaid", "checkered", "spotted", "dotted", "fluffy", "furry",
    "knitted", "woven", "patterned",
];

const SHAPE_WORDS: &[&str] =
    &["round", "square", "circular", "triangular", "rectangular", "oval", "curved", "spiral"];

const STATE_WORDS: &[&str] = &[
    "open", "closed", "glowing", "lit", "unlit", "broken", "cracked", "shattered",
    "filled", "empty", "floating", "hovering", "suspended", "steaming",
];

/// Attribute type a bare modifier word expresses, if any.
fn word_attr_kind(word: &str) -> Option<AttrType> {
    if TEXTURE_WORDS.contains(&word) {
        Some(AttrType::Texture)
    } else if SIZE_WORDS.contains(&word) {
        Some(AttrType::Size)
    } else if COLOR_WORDS.contains(&word) {
        Some(AttrType::Color)
    } else if MATERIAL_WORDS.contains(&word) {
        Some(AttrType::Material)
    } else if SHAPE_WORDS.contains(&word) {
        Some(AttrType::Shape)
    } else if STATE_WORDS.contains(&word) {
        Some(AttrType::State)
    } else {
        None
    }
}

/// Attribute type for a (possibly hyphenated) property phrase.
fn property_attr_kind(property: &str) -> Option<AttrType> {
    let ws = text::words(property);
    if ws.join(" ") == "polka dot" {
        return Some(AttrType::Texture);
    }
    match ws.as_slice() {
        [w] => word_attr_kind(w),
        _ => None,
    }
}

/// Normalize a raw relation phrase against the documented maps. The
/// around/surrounding → surrounded-by summary gate is not applied here; the
/// caller owns the summary.
pub fn normalize_relation(phrase: &str) -> RelationOutcome {
    let p = text::collapse_ws(phrase).to_lowercase();
    if let Some(tok) = RelToken::parse_token(&p) {
        return RelationOutcome::Token(tok);
    }
    if let Some((_, tok)) = RELATION_MAP.iter().find(|(k, _)| *k == p) {
        return RelationOutcome::Token(*tok);
    }
    if let Some((_, act)) = ACTION_CONVERSIONS.iter().find(|(k, _)| *k == p) {
        return RelationOutcome::ConvertToAction(*act);
    }
    RelationOutcome::Delete
}

fn normalize_action_token(phrase: &str) -> Option<ActionToken> {
    let p = text::collapse_ws(phrase).to_lowercase();
    ActionToken::parse_token(&p)
        .or_else(|| ACTION_CONVERSIONS.iter().find(|(k, _)| *k == p).map(|(_, a)| *a))
}

/// True when the summary licenses the around/surrounding → surrounded by map.
fn surround_gate(summary: &str) -> bool {
    text::words(summary)
        .iter()
        .any(|w| w == "around" || w.starts_with("surround"))
}

/// Resolve the owner for a repair, preferring the subject itself when it
/// names an existing whole (with plural tolerance), else the first whole in
/// plan order.
fn resolve_owner<'a>(subject: &str, wholes: &'a [String]) -> Option<&'a str> {
    wholes
        .iter()
        .find(|w| w.as_str() == subject)
        .or_else(|| wholes.iter().find(|w| text::word_matches(w, subject)))
        .or_else(|| wholes.first())
        .map(String::as_str)
}

fn clothing_trigger_in(s: &str) -> Option<&'static str> {
    let ws = text::words(s);
    CLOTHING_TRIGGERS
        .iter()
        .find(|t| ws.iter().any(|w| text::word_matches(w, t)))
        .copied()
}

/// Repair a single attribute line into zero or more schema-valid tuples.
/// An empty result means the line is deleted as not safely mappable.
pub fn normalize_attribute(
    label: &str,
    subject: &str,
    value: &str,
    plan: &TuplePlan,
) -> Vec<Tuple> {
    let wholes: Vec<String> = plan.entity_wholes().map(str::to_string).collect();
    attribute_edits(label, subject, value, &wholes)
}

fn attribute_edits(label: &str, subject: &str, value: &str, wholes: &[String]) -> Vec<Tuple> {
    let label = text::collapse_ws(label).to_lowercase();

    // Clothing/accessory repair takes precedence: extract a part and map the
    // remaining property onto it.
    let label_trigger = clothing_trigger_in(&label);
    let value_trigger = if label == "text" { None } else { clothing_trigger_in(value) };
    if let Some(item) = label_trigger.or(value_trigger) {
        let Some(owner) = resolve_owner(subject, wholes) else {
            return Vec::new();
        };
        let part_name = format!("{owner} {item}");
        let part = Tuple::EntityPart { owner: owner.to_string(), part: item.to_string() };
        let property = if label_trigger.is_some() {
            text::collapse_ws(value)
        } else {
            let item_words = text::words(item);
            text::words(value)
                .into_iter()
                .filter(|w| !item_words.iter().any(|iw| text::word_matches(w, iw)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if property.is_empty() {
            return vec![part];
        }
        return match property_attr_kind(&property) {
            Some(attr) => {
                vec![part, Tuple::Attribute { subject: part_name, attr, value: property }]
            }
            None => Vec::new(),
        };
    }

    if let Some(attr) = AttrType::parse_token(&label) {
        return vec![Tuple::Attribute {
            subject: subject.to_string(),
            attr,
            value: value.to_string(),
        }];
    }

    match label.as_str() {
        "finish" | "pattern" => vec![Tuple::Attribute {
            subject: subject.to_string(),
            attr: AttrType::Texture,
            value: value.to_string(),
        }],
        "colorway" => vec![Tuple::Attribute {
            subject: subject.to_string(),
            attr: AttrType::Color,
            value: value.to_string(),
        }],
        "style" => match Style::parse_token(value) {
            Some(style) => vec![Tuple::Global { style }],
            None => vec![Tuple::Attribute {
                subject: subject.to_string(),
                attr: AttrType::Type,
                value: value.to_string(),
            }],
        },
        _ => {
            // "<part> color" labels split into a part plus a color on it.
            if let Some(part_word) = label.strip_suffix(" color") {
                if !part_word.is_empty() && !part_word.contains(' ') {
                    if let Some(owner) = wholes
                        .iter()
                        .find(|w| w.as_str() == subject || text::word_matches(w, subject))
                    {
                        return vec![
                            Tuple::EntityPart { owner: owner.clone(), part: part_word.to_string() },
                            Tuple::Attribute {
                                subject: format!("{owner} {part_word}"),
                                attr: AttrType::Color,
                                value: value.to_string(),
                            },
                        ];
                    }
                    return vec![Tuple::Attribute {
                        subject: subject.to_string(),
                        attr: AttrType::Color,
                        value: value.to_string(),
                    }];
                }
            }
            Vec::new()
        }
    }
}

/// One logged change: the line as it entered rewrite and what became of it.
/// `before` is `None` for lines the engine added; `after` is `None` for
/// deletions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteEntry {
    pub rule: &'static str,
    pub before: Option<String>,
    pub after: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewriteLog {
    pub entries: Vec<RewriteEntry>,
}

impl RewriteLog {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone)]
enum Work {
    Raw(RawTuple),
    Done(Tuple),
    Deleted,
}

struct Item {
    original: Option<String>,
    rule: Option<&'static str>,
    work: Work,
}

impl Item {
    fn from_raw(raw: RawTuple) -> Self {
        Item { original: Some(raw.render_body()), rule: None, work: Work::Raw(raw) }
    }

    fn added(rule: &'static str, t: Tuple) -> Self {
        Item { original: None, rule: Some(rule), work: Work::Done(t) }
    }

    fn touch(&mut self, rule: &'static str) {
        self.rule.get_or_insert(rule);
    }

    fn delete(&mut self, rule: &'static str) {
        self.touch(rule);
        self.work = Work::Deleted;
    }
}

fn current_wholes(items: &[Item]) -> Vec<String> {
    items
        .iter()
        .filter_map(|it| match &it.work {
            Work::Raw(RawTuple::EntityWhole { name }) => Some(name.clone()),
            Work::Done(Tuple::EntityWhole { name }) => Some(name.clone()),
            _ => None,
        })
        .collect()
}

fn has_wearing_action(items: &[Item], owner: &str) -> bool {
    items.iter().any(|it| match &it.work {
        Work::Done(Tuple::Action { a, action: ActionToken::Wearing, .. }) => a == owner,
        Work::Raw(RawTuple::Action { a, token, .. }) => {
            a == owner && normalize_action_token(token) == Some(ActionToken::Wearing)
        }
        _ => false,
    })
}

/// Rename every reference to an entity across all surviving items. Part
/// phrases are renamed on their owner prefix.
fn rename_entity(items: &mut [Item], rule: &'static str, old: &str, new: &str) {
    fn fix(s: &mut String, old: &str, new: &str, touched: &mut bool) {
        if s == old {
            *s = new.to_string();
            *touched = true;
        }
    }
    let prefix = format!("{old} ");
    for it in items.iter_mut() {
        let mut touched = false;
        match &mut it.work {
            Work::Raw(raw) => match raw {
                RawTuple::Relation { a, b, .. } => {
                    fix(a, old, new, &mut touched);
                    fix(b, old, new, &mut touched);
                }
                RawTuple::Action { a, b, .. } => {
                    fix(a, old, new, &mut touched);
                    fix(b, old, new, &mut touched);
                }
                RawTuple::Attribute { subject, .. } | RawTuple::Count { subject, .. } => {
                    fix(subject, old, new, &mut touched);
                }
                RawTuple::EntityPart { phrase } => {
                    if let Some(rest) = phrase.strip_prefix(&prefix) {
                        *phrase = format!("{new} {rest}");
                        touched = true;
                    }
                }
                _ => {}
            },
            Work::Done(done) => match done {
                Tuple::RelationSpatial { a, b, .. } | Tuple::Action { a, b, .. } => {
                    fix(a, old, new, &mut touched);
                    fix(b, old, new, &mut touched);
                }
                Tuple::Attribute { subject, .. } | Tuple::Count { subject, .. } => {
                    fix(subject, old, new, &mut touched);
                }
                Tuple::EntityPart { owner, .. } => {
                    fix(owner, old, new, &mut touched);
                }
                _ => {}
            },
            Work::Deleted => {}
        }
        if touched {
            it.touch(rule);
        }
    }
}

/// Apply the full rewrite pipeline to raw decomposer output.
///
/// Every change or removal lands in exactly one log entry, keyed by the
/// first rule that touched the line. The output plan is canonical-ordered,
/// renumbered, and deduplicated.
pub fn rewrite(raw: &[RawTuple], summary: &str) -> (TuplePlan, RewriteLog) {
    let mut items: Vec<Item> = raw.iter().cloned().map(Item::from_raw).collect();

    // Step 1 + 1B: relation token normalization and action conversion.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::Relation { a, b, token }) = items[i].work.clone() else {
            continue;
        };
        if (token == "around" || token == "surrounding") && !surround_gate(summary) {
            items[i].delete("relation-normalize");
            continue;
        }
        match normalize_relation(&token) {
            RelationOutcome::Token(rel) => {
                if rel.as_str() != token {
                    items[i].touch("relation-normalize");
                }
                items[i].work = Work::Done(Tuple::RelationSpatial { a, b, rel });
            }
            RelationOutcome::ConvertToAction(action) => {
                items[i].touch("action-convert");
                items[i].work = Work::Done(Tuple::Action { a, action, b });
            }
            RelationOutcome::Delete => items[i].delete("relation-normalize"),
        }
    }

    // Action lines: normalize verb variants, delete unconvertible tokens.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::Action { a, token, b }) = items[i].work.clone() else {
            continue;
        };
        match normalize_action_token(&token) {
            Some(action) => {
                if action.as_str() != token {
                    items[i].touch("action-normalize");
                }
                items[i].work = Work::Done(Tuple::Action { a, action, b });
            }
            None => items[i].delete("action-normalize"),
        }
    }

    // Steps 2 + 3: attribute label repair and clothing/accessory extraction.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::Attribute { subject, label, value }) = items[i].work.clone()
        else {
            continue;
        };
        let wholes = current_wholes(&items);
        let had_trigger = clothing_trigger_in(&label).is_some()
            || (label != "text" && clothing_trigger_in(&value).is_some());
        let edits = attribute_edits(&label, &subject, &value, &wholes);
        let rule: &'static str = if had_trigger {
            "clothing-repair"
        } else if label.ends_with(" color") {
            "part-color-split"
        } else {
            "attr-label"
        };
        match edits.split_first() {
            None => items[i].delete(rule),
            Some((first, rest)) => {
                let unchanged = matches!(
                    first,
                    Tuple::Attribute { subject: s, attr, value: v }
                        if rest.is_empty() && *s == subject && attr.as_str() == label && *v == value
                );
                if !unchanged {
                    items[i].touch(rule);
                }
                let first = first.clone();
                items[i].work = Work::Done(first.clone());
                for t in rest {
                    items.push(Item::added(rule, t.clone()));
                }
                // Optionally pair the new part with a wearing action, but
                // only when an equivalent wearing action already exists.
                if had_trigger {
                    if let Tuple::EntityPart { owner, part } = &first {
                        if has_wearing_action(&items, owner) {
                            let act = Tuple::Action {
                                a: owner.clone(),
                                action: ActionToken::Wearing,
                                b: format!("{owner} {part}"),
                            };
                            items.push(Item::added("clothing-repair", act));
                        }
                    }
                }
            }
        }
    }

    // Counts pass through untouched when the value is an integer.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::Count { subject, value }) = items[i].work.clone() else {
            continue;
        };
        match value.parse::<i64>() {
            Ok(n) => items[i].work = Work::Done(Tuple::Count { subject, n }),
            Err(_) => items[i].delete("drop-unrepresentable"),
        }
    }

    // Globals: keep only recognized style tokens.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::Global { token }) = items[i].work.clone() else {
            continue;
        };
        match Style::parse_token(&token) {
            Some(style) => items[i].work = Work::Done(Tuple::Global { style }),
            None => items[i].delete("global-style"),
        }
    }

    // Step 4: de-bake leading modifiers out of entity-whole names when the
    // modifier appears in the summary and expresses an allowed attribute.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::EntityWhole { name }) = items[i].work.clone() else {
            continue;
        };
        let mut name_words: Vec<String> = name.split_whitespace().map(str::to_string).collect();
        let mut stripped: Vec<(String, AttrType)> = Vec::new();
        while name_words.len() >= 2 {
            let first = name_words[0].as_str();
            match word_attr_kind(first) {
                Some(kind) if text::contains_word_exact(summary, first) => {
                    stripped.push((name_words.remove(0), kind));
                }
                _ => break,
            }
        }
        if stripped.is_empty() {
            items[i].work = Work::Done(Tuple::EntityWhole { name });
            continue;
        }
        let new_name = name_words.join(" ");
        items[i].touch("de-bake");
        items[i].work = Work::Done(Tuple::EntityWhole { name: new_name.clone() });
        for (modifier, kind) in stripped {
            items.push(Item::added(
                "de-bake",
                Tuple::Attribute { subject: new_name.clone(), attr: kind, value: modifier },
            ));
        }
        rename_entity(&mut items, "de-bake", &name, &new_name);
    }

    // Step 5: parts must carry an owner. Single-word parts gain one only
    // when the summary supports "owner part" or the owner is unambiguous.
    for i in 0..items.len() {
        let Work::Raw(RawTuple::EntityPart { phrase }) = items[i].work.clone() else {
            continue;
        };
        if phrase.split_whitespace().count() >= 2 {
            match Tuple::try_from(RawTuple::EntityPart { phrase }) {
                Ok(t) => items[i].work = Work::Done(t),
                Err(_) => items[i].delete("owner-fix"),
            }
            continue;
        }
        let wholes = current_wholes(&items);
        let by_summary = wholes
            .iter()
            .find(|w| text::contains_phrase(summary, &format!("{w} {phrase}")))
            .cloned();
        let owner = by_summary
            .or_else(|| if wholes.len() == 1 { Some(wholes[0].clone()) } else { None });
        match owner {
            Some(owner) => {
                items[i].touch("owner-fix");
                items[i].work =
                    Work::Done(Tuple::EntityPart { owner: owner.clone(), part: phrase.clone() });
                rename_entity(&mut items, "owner-fix", &phrase, &format!("{owner} {phrase}"));
            }
            None => items[i].delete("owner-fix"),
        }
    }

    // Step 6: dedup and assemble. Anything still raw is unrepresentable.
    let mut seen = std::collections::HashSet::new();
    let mut tuples = Vec::new();
    let mut log = RewriteLog::default();
    for it in &mut items {
        if let Work::Raw(_) = it.work {
            it.delete("drop-unrepresentable");
        }
        if let Work::Done(t) = &it.work {
            if !seen.insert(t.clone()) {
                it.delete("dedup");
            }
        }
        match &it.work {
            Work::Done(t) => {
                tuples.push(t.clone());
                let after = t.render_body();
                match &it.original {
                    None => log.entries.push(RewriteEntry {
                        rule: it.rule.unwrap_or("added"),
                        before: None,
                        after: Some(after),
                    }),
                    Some(orig) if it.rule.is_some() && *orig != after => {
                        log.entries.push(RewriteEntry {
                            rule: it.rule.unwrap(),
                            before: Some(orig.clone()),
                            after: Some(after),
                        })
                    }
                    _ => {}
                }
            }
            Work::Deleted => log.entries.push(RewriteEntry {
                rule: it.rule.unwrap_or("drop-unrepresentable"),
                before: it.original.clone(),
                after: None,
            }),
            Work::Raw(_) => unreachable!(),
        }
    }

    (TuplePlan::new(summary, tuples), log)
}

/// Re-run rewrite on an already-valid plan (used for idempotence checks and
/// for plans parsed from envelopes).
pub fn rewrite_plan(plan: &TuplePlan, summary: &str) -> (TuplePlan, RewriteLog) {
    let raw: Vec<RawTuple> = plan.tuples().iter().map(RawTuple::from).collect();
    rewrite(&raw, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw_rel(a: &str, b: &str, tok: &str) -> RawTuple {
        RawTuple::Relation { a: a.into(), b: b.into(), token: tok.into() }
    }

    #[test]
    fn relation_map_rows() {
        assert_eq!(normalize_relation("beneath"), RelationOutcome::Token(RelToken::Below));
        assert_eq!(normalize_relation("on"), RelationOutcome::Token(RelToken::On));
        assert_eq!(
            normalize_relation("dressed in"),
            RelationOutcome::ConvertToAction(ActionToken::Wearing)
        );
        assert_eq!(normalize_relation("entwined with"), RelationOutcome::Delete);
    }

    #[test]
    fn surround_map_is_summary_gated() {
        let raw = vec![
            RawTuple::EntityWhole { name: "tree".into() },
            RawTuple::EntityWhole { name: "rocks".into() },
            raw_rel("tree", "rocks", "surrounding"),
        ];
        let (with_gate, _) = rewrite(&raw, "a tree with rocks around it");
        assert!(with_gate
            .tuples()
            .iter()
            .any(|t| matches!(t, Tuple::RelationSpatial { rel: RelToken::SurroundedBy, .. })));
        let (without_gate, log) = rewrite(&raw, "a tree with rocks near it");
        assert!(!without_gate.tuples().iter().any(|t| matches!(t, Tuple::RelationSpatial { .. })));
        assert!(log.entries.iter().any(|e| e.rule == "relation-normalize" && e.after.is_none()));
    }

    #[test]
    fn attribute_label_rows() {
        let plan = TuplePlan::empty("");
        assert_eq!(
            normalize_attribute("pattern", "vase", "striped", &plan),
            vec![Tuple::Attribute {
                subject: "vase".into(),
                attr: AttrType::Texture,
                value: "striped".into()
            }]
        );
        assert_eq!(
            normalize_attribute("style", "scene", "watercolor", &plan),
            vec![Tuple::Global { style: Style::Watercolor }]
        );
        assert_eq!(normalize_attribute("aura", "wizard", "mystic", &plan), Vec::new());
    }

    #[test]
    fn part_color_label_splits_when_owner_known() {
        let plan = TuplePlan::new("", vec![Tuple::EntityWhole { name: "book".into() }]);
        let edits = normalize_attribute("spine color", "book", "red", &plan);
        assert_eq!(
            edits,
            vec![
                Tuple::EntityPart { owner: "book".into(), part: "spine".into() },
                Tuple::Attribute {
                    subject: "book spine".into(),
                    attr: AttrType::Color,
                    value: "red".into()
                },
            ]
        );
    }

    #[test]
    fn clothing_repair_builds_part_and_texture() {
        let raw = vec![
            RawTuple::EntityWhole { name: "clowns".into() },
            RawTuple::Attribute {
                subject: "clowns".into(),
                label: "costume".into(),
                value: "polka-dot".into(),
            },
        ];
        let (plan, log) = rewrite(&raw, "clowns in polka-dot costumes");
        assert!(plan
            .tuples()
            .contains(&Tuple::EntityPart { owner: "clowns".into(), part: "costume".into() }));
        assert!(plan.tuples().contains(&Tuple::Attribute {
            subject: "clowns costume".into(),
            attr: AttrType::Texture,
            value: "polka-dot".into()
        }));
        assert!(log.entries.iter().any(|e| e.rule == "clothing-repair"));
    }

    #[test]
    fn debake_strips_summary_backed_modifier() {
        let raw = vec![RawTuple::EntityWhole { name: "red car".into() }];
        let (plan, _) = rewrite(&raw, "a red car on the road");
        assert_eq!(
            plan.tuples(),
            &[
                Tuple::EntityWhole { name: "car".into() },
                Tuple::Attribute { subject: "car".into(), attr: AttrType::Color, value: "red".into() },
            ]
        );
    }

    #[test]
    fn debake_requires_summary_evidence() {
        let raw = vec![RawTuple::EntityWhole { name: "red car".into() }];
        let (plan, _) = rewrite(&raw, "a car on the road");
        assert_eq!(plan.tuples(), &[Tuple::EntityWhole { name: "red car".into() }]);
    }

    #[test]
    fn debake_renames_references() {
        let raw = vec![
            RawTuple::EntityWhole { name: "red car".into() },
            RawTuple::EntityWhole { name: "road".into() },
            raw_rel("red car", "road", "on"),
        ];
        let (plan, _) = rewrite(&raw, "a red car on the road");
        assert!(plan.tuples().contains(&Tuple::RelationSpatial {
            a: "car".into(),
            b: "road".into(),
            rel: RelToken::On
        }));
    }

    #[test]
    fn ownerless_part_adopts_sole_whole() {
        let raw = vec![
            RawTuple::EntityWhole { name: "car".into() },
            RawTuple::EntityPart { phrase: "roof".into() },
        ];
        let (plan, _) = rewrite(&raw, "a car");
        assert!(plan
            .tuples()
            .contains(&Tuple::EntityPart { owner: "car".into(), part: "roof".into() }));
    }

    #[test]
    fn ownerless_part_deleted_when_ambiguous() {
        let raw = vec![
            RawTuple::EntityWhole { name: "car".into() },
            RawTuple::EntityWhole { name: "house".into() },
            RawTuple::EntityPart { phrase: "roof".into() },
        ];
        let (plan, log) = rewrite(&raw, "a car next to a house");
        assert!(!plan.tuples().iter().any(|t| matches!(t, Tuple::EntityPart { .. })));
        assert!(log.entries.iter().any(|e| e.rule == "owner-fix" && e.after.is_none()));
    }

    #[test]
    fn ownerless_part_resolved_by_summary_phrase() {
        let raw = vec![
            RawTuple::EntityWhole { name: "car".into() },
            RawTuple::EntityWhole { name: "house".into() },
            RawTuple::EntityPart { phrase: "roof".into() },
        ];
        let (plan, _) = rewrite(&raw, "a car next to a house with a house roof of tile");
        assert!(plan
            .tuples()
            .contains(&Tuple::EntityPart { owner: "house".into(), part: "roof".into() }));
    }

    #[test]
    fn counts_pass_through_even_when_out_of_schema() {
        let raw = vec![
            RawTuple::EntityWhole { name: "dogs".into() },
            RawTuple::Count { subject: "dogs".into(), value: "1".into() },
        ];
        let (plan, _) = rewrite(&raw, "dogs");
        assert!(plan.tuples().contains(&Tuple::Count { subject: "dogs".into(), n: 1 }));
    }

    #[test]
    fn non_integer_count_dropped() {
        let raw = vec![RawTuple::Count { subject: "cats".into(), value: "group".into() }];
        let (plan, log) = rewrite(&raw, "a group of cats");
        assert!(plan.is_empty());
        assert_eq!(log.entries.len(), 1);
    }

    #[test]
    fn rewrite_is_idempotent_on_its_own_output() {
        let raw = vec![
            RawTuple::EntityWhole { name: "red car".into() },
            RawTuple::EntityWhole { name: "road".into() },
            raw_rel("red car", "road", "resting on"),
            RawTuple::Attribute {
                subject: "red car".into(),
                label: "finish".into(),
                value: "glossy".into(),
            },
        ];
        let summary = "a red car resting on the road";
        let (once, _) = rewrite(&raw, summary);
        let (twice, log) = rewrite_plan(&once, summary);
        assert_eq!(once, twice);
        assert!(log.is_empty(), "second pass should be silent: {log:?}");
    }
}
