//! English tokenization heuristics for the readability formulas.
//!
//! Words are runs of alphanumeric characters, optionally joined by internal
//! apostrophes (`don't`, `teacher’s`). Hyphens, slashes and every other
//! symbol separate words.
//!
//! Sentences end at a run of `.`, `!` or `?` (optionally followed by closing
//! quotes or brackets) that is followed by whitespace or the end of text.
//! A period does not end a sentence after a known abbreviation or a single
//! letter initial (`J. K. Rowling`, `U.S.`).
//!
//! Syllables are vowel groups with these adjustments:
//! * `y` is a consonant at the start of a word and between two vowels
//!   (`yes`, `player`, `beyond`), a vowel elsewhere;
//! * a final lone `e` is silent (`make`) unless it closes a consonant + `le`
//!   ending (`table`);
//! * `-es` is silent after a consonant other than s/x/z and not in `ces`,
//!   `ges`, `ches`, `shes`, `les` (`makes` vs `boxes`, `pages`);
//! * `-ed` is silent after a consonant other than t/d, or after a vowel + `y`
//!   (`jumped`, `played` vs `wanted`);
//! * vowel + `ing` splits (`being`, `trying`);
//! * `ia`, `io`, `iu`, `ua` split except in common single-syllable endings
//!   (`-cial`, `-tion`, `-sion`, `-gion`, `qua`, `gua`);
//! * `-ly` and `-ment` count as one syllable on top of their stem;
//! * digit-only tokens count as one syllable; every word has at least one.

/// Abbreviations whose trailing period never ends a sentence (lowercase,
/// without the period).
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "vs", "etc", "e.g", "i.e", "a.m",
    "p.m", "u.s", "u.k", "inc", "ltd", "co", "corp", "no", "gen", "gov", "sen", "rep", "rev",
    "capt", "col", "lt", "sgt", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec", "approx", "dept", "fig", "est",
];

/// Splits `text` into words.
pub fn words(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_alphanumeric() {
            start.get_or_insert(i);
            continue;
        }
        let apostrophe = c == '\'' || c == '’';
        let next_alnum = chars.peek().is_some_and(|&(_, n)| n.is_alphanumeric());
        if apostrophe && start.is_some() && next_alnum {
            continue;
        }
        if let Some(s) = start.take() {
            out.push(&text[s..i]);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '”' | '’' | '»')
}

/// Byte ranges of sentences.
pub fn sentences(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut k = 0;
    while k < chars.len() {
        let (i, c) = chars[k];
        if !matches!(c, '.' | '!' | '?') {
            k += 1;
            continue;
        }
        // Consume the terminal run and any closers.
        let mut end = k;
        while end + 1 < chars.len() && matches!(chars[end + 1].1, '.' | '!' | '?') {
            end += 1;
        }
        while end + 1 < chars.len() && is_closer(chars[end + 1].1) {
            end += 1;
        }
        let at_boundary = end + 1 == chars.len() || chars[end + 1].1.is_whitespace();
        let only_period = chars[k..=end]
            .iter()
            .all(|&(_, ch)| ch == '.' || is_closer(ch));
        if at_boundary && !(only_period && abbreviation_before(text, i)) {
            let stop = chars.get(end + 1).map_or(text.len(), |&(j, _)| j);
            out.push(&text[start..stop]);
            start = stop;
        }
        k = end + 1;
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out.retain(|s| !words(s).is_empty());
    out
}

/// Whether the token ending at byte `period` is an abbreviation or an initial.
fn abbreviation_before(text: &str, period: usize) -> bool {
    let head = &text[..period];
    let token_start = head
        .rfind(|c: char| c.is_whitespace() || matches!(c, '(' | '"' | '“' | '['))
        .map_or(0, |p| p + head[p..].chars().next().unwrap().len_utf8());
    let token = &head[token_start..];
    let mut letters = token.chars();
    if let (Some(c), None) = (letters.next(), letters.next()) {
        return c.is_uppercase();
    }
    let lower = token.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Vowel flags per byte of a lowercase ASCII word, with the `y` rule applied.
fn vowel_mask(w: &[u8]) -> Vec<bool> {
    (0..w.len())
        .map(|i| match w[i] {
            b'y' => {
                let prev_vowel = i > 0 && is_vowel(w[i - 1]);
                let next_vowel = w.get(i + 1).is_some_and(|&c| is_vowel(c));
                !(i == 0 || (prev_vowel && next_vowel))
            }
            c => is_vowel(c),
        })
        .collect()
}

fn vowel_groups(w: &[u8]) -> usize {
    let mask = vowel_mask(w);
    let mut groups = 0;
    let mut prev = false;
    for v in mask {
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    groups
}

/// Syllables in one word. Non-letters are ignored; digit-only words count 1.
pub fn syllables(word: &str) -> usize {
    let lower: String = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .map(fold_accent)
        .collect();
    if lower.is_empty() {
        return 1;
    }
    if !lower.is_ascii() {
        // Outside our English rules: count vowel-like groups loosely.
        return vowel_groups(
            &lower
                .chars()
                .map(|c| if c.is_ascii() { c as u8 } else { b'x' })
                .collect::<Vec<_>>(),
        )
        .max(1);
    }
    count_ascii(lower.as_bytes()).max(1)
}

fn fold_accent(c: char) -> char {
    match c {
        'à' | 'á' | 'â' | 'ä' | 'ã' | 'å' => 'a',
        'è' | 'é' | 'ê' | 'ë' => 'e',
        'ì' | 'í' | 'î' | 'ï' => 'i',
        'ò' | 'ó' | 'ô' | 'ö' | 'õ' => 'o',
        'ù' | 'ú' | 'û' | 'ü' => 'u',
        'ç' => 'c',
        'ñ' => 'n',
        _ => c,
    }
}

fn count_ascii(w: &[u8]) -> usize {
    // Suffixes that always add exactly one syllable to their stem.
    for suffix in [&b"ly"[..], b"ment"] {
        if w.len() > suffix.len() + 1 && w.ends_with(suffix) {
            let stem = &w[..w.len() - suffix.len()];
            if vowel_groups(stem) > 0 {
                return count_ascii(stem).max(1) + 1;
            }
        }
    }

    let mut n = vowel_groups(w) as isize;
    let len = w.len();
    let consonant = |i: usize| !is_vowel(w[i]) && w[i] != b'y';

    // Silent endings.
    if n > 1 {
        if w.ends_with(b"e") && len >= 2 && consonant(len - 2) {
            let le = w.ends_with(b"le") && len >= 3 && consonant(len - 3);
            if !le {
                n -= 1;
            }
        } else if w.ends_with(b"es") && len >= 3 && consonant(len - 3) {
            let keeps = matches!(w[len - 3], b's' | b'x' | b'z' | b'c' | b'g')
                || w.ends_with(b"ches")
                || w.ends_with(b"shes")
                || (w[len - 3] == b'l' && len >= 4 && consonant(len - 4));
            if !keeps {
                n -= 1;
            }
        } else if w.ends_with(b"ed") && len >= 3 {
            let after_consonant = consonant(len - 3) && !matches!(w[len - 3], b't' | b'd');
            // "played": the y rule already split off the e.
            let after_glide = w[len - 3] == b'y' && len >= 4 && is_vowel(w[len - 4]);
            if after_consonant || after_glide {
                n -= 1;
            }
        }
    }

    // Vowel + "ing" is two syllables ("being", "trying").
    if len >= 4 && w.ends_with(b"ing") {
        let mask = vowel_mask(w);
        if mask[len - 4] {
            n += 1;
        }
    }

    // Hiatus pairs read as one vowel group but sound as two.
    for i in 0..len.saturating_sub(1) {
        let pair = (w[i], w[i + 1]);
        let before = if i > 0 { Some(w[i - 1]) } else { None };
        let split = match pair {
            (b'i', b'a') => !matches!(before, Some(b'c' | b't' | b's' | b'g')),
            (b'i', b'o') => !matches!(before, Some(b't' | b's' | b'c' | b'x' | b'g')),
            (b'i', b'u') => true,
            (b'u', b'a') => !matches!(before, Some(b'q' | b'g')),
            _ => false,
        };
        // Only counts when the pair is not already split by the y rule.
        if split && (i == 0 || !is_vowel(w[i - 1])) {
            n += 1;
        }
    }

    n.max(1) as usize
}
