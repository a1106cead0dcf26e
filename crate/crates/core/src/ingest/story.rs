//! Connextra user-story splitting: "As a <role>, I want <feature>, so that <reason>".

use crate::Span;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StoryPart {
    Role,
    Feature,
    Reason,
}

/// Result of splitting one item's text into story parts.
///
/// `role`, `feature` and `reason` are the content spans (without the
/// "As a", "I want" and "so that" markers). [`UserStoryParts::regions`]
/// returns the marker-inclusive partition of the whole story used for word
/// and finding tallies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserStoryParts {
    pub role: Option<Span>,
    pub feature: Option<Span>,
    pub reason: Option<Span>,
    pub conformant: bool,
    /// Offsets where the "I want" and "so that" markers begin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<Frame>,
    text_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Frame {
    want_at: usize,
    so_that_at: Option<usize>,
}

fn story_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?is)^\s*as\s+(?:an?\s+)?(?P<role>\S.*?)\s*,?\s+(?P<want>i\s+(?:(?:do\s+not|don't|don’t|would\s+like\s+to|would\s+like)\s+)?want)\b\s*(?P<feature>.*?)(?:\s*,?\s*(?P<sothat>\bso\s+that)\b\s*(?P<reason>.*?))?\s*$",
        )
        .expect("story pattern compiles")
    })
}

/// Splits `text` into Connextra parts. Never fails: text that does not start
/// with "As a ..., I want" is reported as non-conformant with the whole text
/// as its feature.
pub fn split_user_story(text: &str) -> UserStoryParts {
    let non_conformant = || UserStoryParts {
        role: None,
        feature: Some(Span::new(0, text.len())),
        reason: None,
        conformant: false,
        frame: None,
        text_len: text.len(),
    };
    let Some(caps) = story_regex().captures(text) else {
        return non_conformant();
    };
    let span_of = |name: &str| caps.name(name).map(|m| Span::new(m.start(), m.end()));
    let role = span_of("role");
    let feature = span_of("feature").filter(|s| !s.is_empty());
    let reason = span_of("reason").filter(|s| !s.is_empty());
    let (Some(role), Some(feature)) = (role, feature) else {
        return non_conformant();
    };
    let want_at = caps
        .name("want")
        .map(|m| m.start())
        .unwrap_or(feature.start);
    let so_that_at = caps.name("sothat").map(|m| {
        // the comma before "so that" belongs to the reason region
        let before = text[..m.start()].trim_end();
        if before.ends_with(',') {
            before.len() - 1
        } else {
            m.start()
        }
    });
    UserStoryParts {
        role: Some(role),
        feature: Some(feature),
        reason,
        conformant: true,
        frame: Some(Frame {
            want_at,
            so_that_at,
        }),
        text_len: text.len(),
    }
}

impl UserStoryParts {
    pub fn part(&self, part: StoryPart) -> Option<Span> {
        match part {
            StoryPart::Role => self.role,
            StoryPart::Feature => self.feature,
            StoryPart::Reason => self.reason,
        }
    }

    /// Marker-inclusive partition of a conformant story: role region runs from
    /// the start to "I want", feature region up to "so that" (or the end), and
    /// the reason region to the end. Every byte belongs to exactly one region.
    pub fn regions(&self) -> Option<Vec<(StoryPart, Span)>> {
        let frame = self.frame?;
        let mut out = vec![(StoryPart::Role, Span::new(0, frame.want_at))];
        match frame.so_that_at {
            Some(at) => {
                out.push((StoryPart::Feature, Span::new(frame.want_at, at)));
                out.push((StoryPart::Reason, Span::new(at, self.text_len)));
            }
            None => out.push((StoryPart::Feature, Span::new(frame.want_at, self.text_len))),
        }
        Some(out)
    }

    /// The region that contains byte `offset`, if the story is conformant.
    pub fn region_of(&self, offset: usize) -> Option<StoryPart> {
        self.regions()?
            .into_iter()
            .find(|(_, span)| span.contains(offset))
            .map(|(part, _)| part)
    }
}
