use crate::dialog::{DialogAct, Role};

const QUESTION_HEADS: [&str; 8] = ["where", "what", "which", "do", "does", "is", "are", "can"];
const ACTION_VERBS: [&str; 10] = ["add", "put", "place", "draw", "move", "remove", "delete", "resize", "make", "name"];
/// Discourse fillers skipped before looking for an imperative head.
const FILLERS: [&str; 9] = ["please", "now", "then", "next", "ok", "okay", "and", "also", "so"];
const CORRECTION_MARKERS: [&str; 5] = ["no", "not", "instead", "actually", "wrong"];
const NEGATIONS: [&str; 5] = ["no", "not", "isn't", "isnt", "wrong"];

fn is_question(tokens: &[String]) -> bool {
    tokens.last().is_some_and(|t| t == "?") || tokens.first().is_some_and(|t| QUESTION_HEADS.contains(&t.as_str()))
}

fn is_imperative(tokens: &[String]) -> bool {
    tokens
        .iter()
        .find(|t| !FILLERS.contains(&t.as_str()))
        .is_some_and(|t| ACTION_VERBS.contains(&t.as_str()))
}

fn has_any(tokens: &[String], words: &[&str]) -> bool {
    tokens.iter().any(|t| words.contains(&t.as_str()))
}

fn is_done(tokens: &[String]) -> bool {
    let marker = has_any(tokens, &["done", "finished", "correct"])
        || tokens.windows(2).any(|w| (w[0] == "that's" || w[0] == "thats") && w[1] == "it");
    marker && !has_any(tokens, &NEGATIONS)
}

/// Rule cascade over normalized tokens. Always returns an act legal for `role`:
/// directors get INSTRUCT, SUGGEST_FIX or CONFIRM_DONE; designers get
/// QUESTION, EDIT or OTHER.
pub fn classify_dialog_act(tokens: &[String], role: Role) -> DialogAct {
    match role {
        Role::Designer => {
            if is_question(tokens) {
                DialogAct::Question
            } else if is_imperative(tokens) {
                DialogAct::Edit
            } else {
                DialogAct::Other
            }
        }
        Role::Director => {
            if is_question(tokens) || is_imperative(tokens) {
                // questions from the director elicit an answer from the designer
                DialogAct::Instruct
            } else if is_done(tokens) {
                DialogAct::ConfirmDone
            } else if has_any(tokens, &CORRECTION_MARKERS) {
                DialogAct::SuggestFix
            } else {
                DialogAct::Instruct
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlu::normalize;

    fn classify(text: &str, role: Role) -> DialogAct {
        classify_dialog_act(&normalize(text), role)
    }

    #[test]
    fn designer_question() {
        assert_eq!(classify("where to put circle?", Role::Designer), DialogAct::Question);
        assert_eq!(classify("do the boxes mean squares", Role::Designer), DialogAct::Question);
    }

    #[test]
    fn director_imperative() {
        assert_eq!(classify("place a blue square at row 3 column 4", Role::Director), DialogAct::Instruct);
        assert_eq!(classify("please move it", Role::Director), DialogAct::Instruct);
    }

    #[test]
    fn director_done_and_fix() {
        assert_eq!(classify("that's it!", Role::Director), DialogAct::ConfirmDone);
        assert_eq!(classify("that is not correct", Role::Director), DialogAct::SuggestFix);
        assert_eq!(classify("no, the circle is red", Role::Director), DialogAct::SuggestFix);
    }

    #[test]
    fn designer_fallback() {
        assert_eq!(classify("ok", Role::Designer), DialogAct::Other);
        assert_eq!(classify("add a red circle", Role::Designer), DialogAct::Edit);
        assert_eq!(classify("", Role::Designer), DialogAct::Other);
        assert_eq!(classify("", Role::Director), DialogAct::Instruct);
    }
}
