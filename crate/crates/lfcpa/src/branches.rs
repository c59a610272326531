//! Branch scripts: the outcomes fed to condition nodes by the interpreter.
//!
//! A script is a list of `1`/`0`, `t`/`f` or `true`/`false` tokens separated
//! by whitespace or commas. `#` starts a comment.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: `{token}` is not a branch outcome")]
pub struct BranchError {
    pub line: usize,
    pub token: String,
}

pub fn parse(src: &str) -> Result<Vec<bool>, BranchError> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("");
        for token in body.split(|c: char| c.is_whitespace() || c == ',') {
            if token.is_empty() {
                continue;
            }
            out.push(match token.to_ascii_lowercase().as_str() {
                "1" | "t" | "true" => true,
                "0" | "f" | "false" => false,
                _ => {
                    return Err(BranchError {
                        line: line_no,
                        token: token.to_string(),
                    })
                }
            });
        }
    }
    Ok(out)
}

/// Renders a script in the compact `1 0 1` form accepted by [`parse`].
pub struct Script<'a>(pub &'a [bool]);

impl fmt::Display for Script<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_comments() {
        let s = "1 0, true\n# skipped 1\nF t # trailing\n";
        assert_eq!(parse(s), Ok(vec![true, false, true, false, true]));
        assert_eq!(parse(""), Ok(vec![]));
    }

    #[test]
    fn bad_token() {
        let err = parse("1\n0 maybe").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.to_string(), "line 2: `maybe` is not a branch outcome");
    }

    #[test]
    fn round_trip() {
        let v = vec![true, true, false];
        assert_eq!(parse(&Script(&v).to_string()), Ok(v));
    }
}
