//! Identifier spelling shared by the printer and the lexer.

/// Words with a fixed meaning inside predicates, formulas and actions.
pub const RESERVED: &[&str] = &["true", "false", "not", "and", "or", "id", "down", "at", "E"];

/// Separator used in product control-state names.
pub const PRODUCT_SEPARATOR: char = ',';

pub fn is_plain(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&name)
}

/// Name as written in concrete syntax: bare when possible, otherwise in
/// backquotes.
pub fn display(name: &str) -> String {
    if is_plain(name) {
        name.to_string()
    } else {
        format!("`{name}`")
    }
}

pub fn product_name(a: &str, b: &str) -> String {
    format!("{a}{PRODUCT_SEPARATOR}{b}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        assert_eq!(display("Card"), "Card");
        assert_eq!(display("Card,Idle"), "`Card,Idle`");
        assert_eq!(display("and"), "`and`");
        assert_eq!(display("E"), "`E`");
    }
}
