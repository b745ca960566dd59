//! Sentence splitting and word tokenization.

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits text into sentences at runs of `.`, `!` or `?` that are followed
/// by whitespace or the end of the text. The terminator run itself is not
/// part of either sentence.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !is_terminator(c) {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, n)) = chars.peek() {
            if !is_terminator(n) {
                break;
            }
            end = j + n.len_utf8();
            chars.next();
        }
        let at_boundary = match chars.peek() {
            None => true,
            Some(&(_, n)) => n.is_whitespace(),
        };
        if at_boundary {
            out.push(&text[start..i]);
            start = end;
        }
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out
}

/// Whitespace tokenization followed by lowercasing. Tokens that contain any
/// non-alphanumeric character are dropped whole.
pub fn word_tokens(sentence: &str) -> impl Iterator<Item = String> + '_ {
    sentence
        .split_whitespace()
        .map(str::to_lowercase)
        .filter(|t| is_word(t))
}

pub fn is_word(token: &str) -> bool {
    !token.is_empty() && token.chars().all(char::is_alphanumeric)
}
