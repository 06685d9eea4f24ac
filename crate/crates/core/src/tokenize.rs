//! Whitespace tokenization with leading and trailing punctuation split off.

/// Splits on whitespace, then detaches each leading and trailing
/// non-alphanumeric character as its own token. Inner punctuation stays
/// (`don't`, `3.5`).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| !c.is_alphanumeric()).count();
        if lead == chars.len() {
            out.extend(chars.iter().map(|c| c.to_string()));
            continue;
        }
        let trail = chars
            .iter()
            .rev()
            .take_while(|c| !c.is_alphanumeric())
            .count();
        out.extend(chars[..lead].iter().map(|c| c.to_string()));
        out.push(chars[lead..chars.len() - trail].iter().collect());
        out.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_punctuation() {
        assert_eq!(
            tokenize("The process is quite simple, as this sentence illustrates."),
            [
                "The",
                "process",
                "is",
                "quite",
                "simple",
                ",",
                "as",
                "this",
                "sentence",
                "illustrates",
                "."
            ]
        );
        assert_eq!(
            tokenize("\"Hi!\" she said"),
            ["\"", "Hi", "!", "\"", "she", "said"]
        );
        assert_eq!(
            tokenize("don't stop 3.5 ..."),
            ["don't", "stop", "3.5", ".", ".", "."]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("   \n\t").is_empty());
        assert!(tokenize("").is_empty());
    }
}
