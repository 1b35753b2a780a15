//! The small graphs used by the tests and the
//! `demo` command.

use crate::admg::Admg;

/// Front-door style graph: `X→Z1, X→Y, Z1→Z2, Z1→Y, Z2→Y` with `X↔Z2` and
/// `Z1↔Y`.
pub fn front_door() -> Admg {
    Admg::from_names(
        &["X", "Z1", "Z2", "Y"],
        2,
        &[("X", "Z1"), ("X", "Y"), ("Z1", "Z2"), ("Z1", "Y"), ("Z2", "Y")],
        &[("X", "Z2"), ("Z1", "Y")],
    )
    .expect("fixture graph is valid")
}

/// `W→R→X→Y` with `W↔X` and `W↔Y`.
pub fn confounded_chain() -> Admg {
    Admg::from_names(
        &["W", "R", "X", "Y"],
        2,
        &[("W", "R"), ("R", "X"), ("X", "Y")],
        &[("W", "X"), ("W", "Y")],
    )
    .expect("fixture graph is valid")
}

/// The bow graph `X→Y`, `X↔Y`: the smallest non-identifiable effect.
pub fn bow() -> Admg {
    Admg::from_names(&["X", "Y"], 2, &[("X", "Y")], &[("X", "Y")]).expect("fixture graph is valid")
}
