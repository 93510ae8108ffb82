//! The nine text-to-text input/output formats and their rendering.
//!
//! Every template embeds both texts and asks a question whose answer is one
//! of two short target strings. Targets are stored as the answer when text 1
//! is the harder text and the answer when text 2 is; for the "easier"
//! variants those are swapped relative to the "harder" ones.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Gold, PairInstance, Prediction};
use crate::error::Error;

/// Per-text whitespace-token budget used unless overridden. Leaves room for
/// template words inside a 512-subword model input.
pub const DEFAULT_TOKEN_BUDGET: usize = 230;

const TEXT1: &str = "{text1}";
const TEXT2: &str = "{text2}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormatKind {
    #[serde(rename = "question")]
    Question,
    #[serde(rename = "statement")]
    Statement,
    #[serde(rename = "followup")]
    Followup,
    #[serde(rename = "reverse-q")]
    ReverseQ,
    #[serde(rename = "reverse-s")]
    ReverseS,
    #[serde(rename = "reverse-f")]
    ReverseF,
    #[serde(rename = "alternate-q")]
    AlternateQ,
    #[serde(rename = "alternate-s")]
    AlternateS,
    #[serde(rename = "alternate-f")]
    AlternateF,
}

impl FormatKind {
    pub const ALL: [FormatKind; 9] = [
        FormatKind::Question,
        FormatKind::Statement,
        FormatKind::Followup,
        FormatKind::ReverseQ,
        FormatKind::ReverseS,
        FormatKind::ReverseF,
        FormatKind::AlternateQ,
        FormatKind::AlternateS,
        FormatKind::AlternateF,
    ];

    /// Short machine name, used in file names and prediction records.
    pub fn as_str(self) -> &'static str {
        match self {
            FormatKind::Question => "question",
            FormatKind::Statement => "statement",
            FormatKind::Followup => "followup",
            FormatKind::ReverseQ => "reverse-q",
            FormatKind::ReverseS => "reverse-s",
            FormatKind::ReverseF => "reverse-f",
            FormatKind::AlternateQ => "alternate-q",
            FormatKind::AlternateS => "alternate-s",
            FormatKind::AlternateF => "alternate-f",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            FormatKind::Question => "Question",
            FormatKind::Statement => "Statement",
            FormatKind::Followup => "Follow-up",
            FormatKind::ReverseQ => "Reverse-Question",
            FormatKind::ReverseS => "Reverse-Statement",
            FormatKind::ReverseF => "Reverse-Follow-up",
            FormatKind::AlternateQ => "Alternate-Question",
            FormatKind::AlternateS => "Alternate-Statement",
            FormatKind::AlternateF => "Alternate-Follow-up",
        }
    }

    pub fn spec(self) -> FormatSpec {
        let (template, t1, t2) = match self {
            FormatKind::Question => (
                "Which Text is more difficult? Text 1: {text1} Text 2: {text2}",
                "Text 1",
                "Text 2",
            ),
            FormatKind::Statement => (
                "Text 1 is more difficult than Text 2. Text 1: {text1} Text 2: {text2}",
                "True",
                "False",
            ),
            FormatKind::Followup => (
                "Text 1: {text1} Text2: {text2} More difficult:",
                "Text 1",
                "Text 2",
            ),
            FormatKind::ReverseQ => (
                "Which Text is easier? Text 1: {text1} Text 2: {text2}",
                "Text 2",
                "Text 1",
            ),
            FormatKind::ReverseS => (
                "Text 1 is easier than Text 2. Text 1: {text1} Text 2: {text2}",
                "False",
                "True",
            ),
            FormatKind::ReverseF => ("Text 1: {text1} Text2: {text2} Easier:", "Text 2", "Text 1"),
            FormatKind::AlternateQ => (
                "Which Text is harder? Text 1: {text1} Text 2: {text2}",
                "Text 1",
                "Text 2",
            ),
            FormatKind::AlternateS => (
                "Text 1 is harder than Text 2. Text 1: {text1} Text 2: {text2}",
                "True",
                "False",
            ),
            FormatKind::AlternateF => {
                ("Text 1: {text1} Text2: {text2} Harder:", "Text 1", "Text 2")
            }
        };
        FormatSpec {
            kind: self,
            input_template: template.to_string(),
            target_when_text1_harder: t1.to_string(),
            target_when_text2_harder: t2.to_string(),
        }
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormatKind {
    type Err = Error;
    /// Accepts the machine name or the display name, case-insensitively;
    /// `reverse-question` and `reverse-q` both work.
    fn from_str(s: &str) -> Result<Self, Error> {
        let wanted = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        FormatKind::ALL
            .into_iter()
            .find(|k| {
                wanted == k.as_str()
                    || wanted == k.display_name().to_ascii_lowercase()
                    || wanted.replace("follow-up", "followup") == k.as_str()
            })
            .ok_or_else(|| Error::UnknownFormat(s.to_string()))
    }
}

/// One input template plus its target-string semantics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormatSpec {
    pub kind: FormatKind,
    pub input_template: String,
    pub target_when_text1_harder: String,
    pub target_when_text2_harder: String,
}

impl FormatSpec {
    pub fn target(&self, gold: Gold) -> &str {
        match gold {
            Gold::Text1Harder => &self.target_when_text1_harder,
            Gold::Text2Harder => &self.target_when_text2_harder,
        }
    }

    /// The template with both holes shown as `...`.
    pub fn display_template(&self) -> String {
        self.input_template
            .replace(TEXT1, "...")
            .replace(TEXT2, "...")
    }

    /// The two targets as listed for the text-1-harder case first.
    pub fn display_targets(&self) -> String {
        format!(
            "\"{}\" or \"{}\"",
            self.target_when_text1_harder, self.target_when_text2_harder
        )
    }

    fn fill(&self, text1: &str, text2: &str) -> String {
        let t = &self.input_template;
        let i1 = t.find(TEXT1).expect("template has {text1}");
        let i2 = t.find(TEXT2).expect("template has {text2}");
        let mut out = String::with_capacity(t.len() + text1.len() + text2.len());
        let ((first_at, first_hole, first), (second_at, second_hole, second)) = if i1 < i2 {
            ((i1, TEXT1, text1), (i2, TEXT2, text2))
        } else {
            ((i2, TEXT2, text2), (i1, TEXT1, text1))
        };
        out.push_str(&t[..first_at]);
        out.push_str(first);
        out.push_str(&t[first_at + first_hole.len()..second_at]);
        out.push_str(second);
        out.push_str(&t[second_at + second_hole.len()..]);
        out
    }
}

/// The nine builtin formats, in table order.
pub fn builtin_formats() -> Vec<FormatSpec> {
    FormatKind::ALL.iter().map(|k| k.spec()).collect()
}

/// One line of the rendered-instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedInstance {
    pub instance_id: String,
    pub input: String,
    pub target: String,
    #[serde(rename = "format")]
    pub format_kind: FormatKind,
    pub truncated: bool,
}

/// Keeps the first `budget` whitespace-delimited tokens. Returns the text
/// unchanged (borrowed) when it already fits.
pub fn truncate_tokens(text: &str, budget: usize) -> (std::borrow::Cow<'_, str>, bool) {
    match text.split_whitespace().nth(budget) {
        None => (text.into(), false),
        Some(_) => {
            let kept: Vec<&str> = text.split_whitespace().take(budget).collect();
            (kept.join(" ").into(), true)
        }
    }
}

/// Renders one pair under `spec`, truncating each text independently.
pub fn render(
    instance: &PairInstance,
    spec: &FormatSpec,
    token_budget_per_text: usize,
) -> RenderedInstance {
    assert!(token_budget_per_text >= 1, "token budget must be positive");
    let (text1, cut1) = truncate_tokens(&instance.text1.body, token_budget_per_text);
    let (text2, cut2) = truncate_tokens(&instance.text2.body, token_budget_per_text);
    RenderedInstance {
        instance_id: instance.instance_id.clone(),
        input: spec.fill(&text1, &text2),
        target: spec.target(instance.gold).to_string(),
        format_kind: spec.kind,
        truncated: cut1 || cut2,
    }
}

/// Maps generated text back to a harder-text prediction. Matching is exact
/// after trimming and case folding; anything else is `Invalid`.
pub fn parse_output(generated: &str, spec: &FormatSpec) -> Prediction {
    let got = generated.trim().to_lowercase();
    if got == spec.target_when_text1_harder.to_lowercase() {
        Prediction::Text1Harder
    } else if got == spec.target_when_text2_harder.to_lowercase() {
        Prediction::Text2Harder
    } else {
        Prediction::Invalid
    }
}
