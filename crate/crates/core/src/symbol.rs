//! Interned identifiers.
//!
//! Every predicate, constant, variable and schema name is interned once.
//! Equality and hashing are pointer-cheap; ordering is lexicographic on the
//! underlying string, which is the canonical order used for tie-breaking.

pub use ustr::Ustr as Symbol;

/// Interns `s`.
pub fn sym(s: &str) -> Symbol {
    Symbol::from(s)
}

/// Returns true when `s` is usable as a bare identifier in the text formats.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_lexicographic() {
        let mut v = vec![sym("d2"), sym("i1"), sym("d1"), sym("b")];
        v.sort();
        let names: Vec<&str> = v.iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["b", "d1", "d2", "i1"]);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("OnTable"));
        assert!(is_identifier("b12"));
        assert!(!is_identifier("?X"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("(a"));
    }
}
