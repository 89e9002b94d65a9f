/// Number words mapped to digits, up to the largest grid count.
const NUMBER_WORDS: [&str; 26] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty", "twenty-one",
    "twenty-two", "twenty-three", "twenty-four", "twenty-five",
];

/// Punctuation kept as standalone tokens.
const KEPT_PUNCT: [char; 3] = ['?', '(', ')'];

fn number_word(word: &str) -> Option<usize> {
    NUMBER_WORDS.iter().position(|w| *w == word)
}

fn push_word(tokens: &mut Vec<String>, word: &str) {
    let word = word.trim_matches(|c| c == '\'' || c == '-');
    if word.is_empty() {
        return;
    }
    if let Some(n) = number_word(word) {
        tokens.push(n.to_string());
        return;
    }
    for part in word.split('-').filter(|p| !p.is_empty()) {
        let part = part.trim_matches('\'');
        if part.is_empty() {
            continue;
        }
        match number_word(part) {
            Some(n) => tokens.push(n.to_string()),
            None => tokens.push(part.to_string()),
        }
    }
}

/// Lowercases and splits an utterance into word tokens.
///
/// `?`, `(` and `)` survive as their own tokens; other punctuation only
/// separates words. Number words from zero to twenty-five become digits,
/// including the two-word form `twenty five`.
pub fn normalize(utterance: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let lowered = utterance.to_lowercase().replace(['\u{2019}', '\u{2018}'], "'");
    let chars: Vec<char> = lowered.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        let in_number = ch == '.'
            && word.chars().last().is_some_and(|c| c.is_ascii_digit())
            && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit());
        if ch.is_alphanumeric() || ch == '\'' || ch == '-' || in_number {
            word.push(ch);
            continue;
        }
        push_word(&mut tokens, &word);
        word.clear();
        if KEPT_PUNCT.contains(&ch) {
            tokens.push(ch.to_string());
        }
    }
    push_word(&mut tokens, &word);

    // "twenty five" -> "25"
    let mut merged: Vec<String> = Vec::with_capacity(tokens.len());
    for tok in tokens {
        if let (Some(prev), Ok(unit)) = (merged.last(), tok.parse::<usize>()) {
            if prev == "20" && (1..=5).contains(&unit) && !tok.starts_with('0') {
                *merged.last_mut().unwrap() = (20 + unit).to_string();
                continue;
            }
        }
        merged.push(tok);
    }
    merged
}
