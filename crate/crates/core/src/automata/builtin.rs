use super::Dfa;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Digit};

pub const BUILTIN_NAMES: &[&str] = &["base(p)", "fibonacci", "fina", "K1", "K2", "K3", "K4"];

const A: Digit = 0;
const B: Digit = 1;
const C: Digit = 2;
const D: Digit = 3;

/// Named automata. `base(p)` or `base<p>` gives the integer base `p`.
pub fn builtin(name: &str) -> Result<Dfa> {
    let lower = name.trim().to_ascii_lowercase();
    if let Some(p) = lower
        .strip_prefix("base")
        .map(|r| r.trim_matches(|c| c == '(' || c == ')' || c == '-' || c == '_'))
    {
        let p: u32 = p
            .parse()
            .map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
        return base(p);
    }
    let abcd = Alphabet::new(4).expect("size 4");
    Ok(match lower.as_str() {
        "fibonacci" | "fib" => Dfa::from_edges(
            Alphabet::new(2).expect("size 2"),
            &["A", "B", "C"],
            &[("A", 1, "B"), ("B", 0, "C"), ("C", 0, "C"), ("C", 1, "B")],
        ),
        // Words over {0,1,2} avoiding the factors 2 1* 2.
        "fina" => Dfa::from_edges(
            Alphabet::new(3).expect("size 3"),
            &["A", "B", "C"],
            &[
                ("A", 2, "B"),
                ("A", 1, "C"),
                ("B", 0, "C"),
                ("B", 1, "B"),
                ("C", 2, "B"),
                ("C", 0, "C"),
                ("C", 1, "C"),
            ],
        ),
        "k1" => Dfa::from_edges(
            abcd,
            &["A", "B"],
            &[
                ("A", A, "B"),
                ("B", A, "A"),
                ("B", B, "A"),
                ("B", C, "A"),
                ("B", D, "A"),
            ],
        ),
        "k2" => Dfa::from_edges(
            abcd,
            &["A", "B"],
            &[("A", A, "B"), ("A", B, "B"), ("B", C, "A"), ("B", D, "A")],
        ),
        "k3" => Dfa::from_edges(
            abcd,
            &["A", "B", "C"],
            &[
                ("A", A, "B"),
                ("A", B, "B"),
                ("B", C, "A"),
                ("B", D, "A"),
                ("A", C, "C"),
                ("C", A, "C"),
                ("C", B, "C"),
            ],
        ),
        "k4" => Dfa::from_edges(
            abcd,
            &["i", "p", "q", "r", "s"],
            &[
                ("i", A, "p"),
                ("i", B, "p"),
                ("i", C, "r"),
                ("p", A, "q"),
                ("q", A, "p"),
                ("q", B, "p"),
                ("q", C, "p"),
                ("q", D, "p"),
                ("r", A, "s"),
                ("r", B, "s"),
                ("r", C, "s"),
                ("r", D, "s"),
                ("s", A, "r"),
            ],
        ),
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    })
}

/// Integer base `p`: no leading zero, then any digits.
pub fn base(p: u32) -> Result<Dfa> {
    if p < 2 {
        return Err(Error::InvalidAlphabet(p as u64));
    }
    let alphabet = Alphabet::new(p)?;
    let mut d = Dfa::new(alphabet, 2, 0)?;
    d.set_names(vec!["A".into(), "B".into()]);
    for a in 0..p as Digit {
        if a > 0 {
            d.set_transition(0, a, 1)?;
        }
        d.set_transition(1, a, 1)?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in [
            "base(3)",
            "base10",
            "fibonacci",
            "fina",
            "K1",
            "k2",
            "K3",
            "K4",
        ] {
            assert!(builtin(n).is_ok(), "{n}");
        }
        assert_eq!(
            builtin("nope").unwrap_err(),
            Error::UnknownBuiltin("nope".into())
        );
        assert!(builtin("base(1)").is_err());
    }

    #[test]
    fn fina_avoids_two_ones_two() {
        let f = builtin("fina").unwrap();
        assert_eq!(f.num_states(), 3);
        assert!(!f.accepts(&[2, 1, 1, 2]));
        assert!(!f.accepts(&[2, 2]));
        assert!(f.accepts(&[2, 1, 0, 2]));
        assert!(f.accepts(&[1, 2, 1]));
    }
}
