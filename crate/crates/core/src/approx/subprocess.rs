//! Line protocol for characteristic functions evaluated by another program.
//!
//! For each query the parent writes one line of `n` characters over `{0,1}`
//! (position `p` is player `p`, `1` means present) and reads back one line
//! holding a decimal number. Closing the child's standard input ends the
//! session.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use num_traits::Float;

use super::oracle::{OracleError, ValueOracle};
use crate::coalition::Coalition;

/// Encodes a coalition as a protocol query line (without the newline).
pub fn encode_query(coalition: Coalition, players: usize) -> String {
    (0..players)
        .map(|p| if coalition.contains(p) { '1' } else { '0' })
        .collect()
}

/// Decodes a query line; `None` when the length or alphabet is wrong.
pub fn decode_query(line: &str, players: usize) -> Option<Coalition> {
    if line.len() != players {
        return None;
    }
    line.bytes().enumerate().try_fold(Coalition::EMPTY, |acc, (p, b)| match b {
        b'0' => Some(acc),
        b'1' => Some(acc.with(p)),
        _ => None,
    })
}

/// Whether `text` is a plain decimal number: optional sign, digits with an
/// optional fractional part, optional exponent. Rejects `inf`, `nan` and
/// hexadecimal forms that `f64::from_str` would otherwise accept.
pub fn is_decimal(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
        i += 1;
        if matches!(bytes.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let exp_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == bytes.len()
}

/// Parses one reply line into a value.
pub fn parse_reply(query: &str, reply: &str) -> Result<f64, OracleError> {
    let trimmed = reply.trim();
    let violation = || OracleError::ProtocolViolation {
        query: query.to_string(),
        reply: trimmed.to_string(),
    };
    if !is_decimal(trimmed) {
        return Err(violation());
    }
    let value: f64 = trimmed.parse().map_err(|_| violation())?;
    if !value.is_finite() {
        return Err(violation());
    }
    Ok(value)
}

struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

/// Oracle backed by a child process speaking the line protocol.
///
/// Queries are serialized through a mutex, so concurrent samplers share one
/// child safely.
pub struct SubprocessOracle {
    players: usize,
    session: Mutex<Session>,
}

impl SubprocessOracle {
    /// Runs `command_line` through `sh -c`.
    pub fn shell(command_line: &str, players: usize) -> Result<Self, OracleError> {
        let mut command = Command::new("sh");
        command.arg("-c").arg(command_line);
        Self::spawn(command, players)
    }

    pub fn spawn(mut command: Command, players: usize) -> Result<Self, OracleError> {
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| OracleError::SpawnFailure(e.to_string()))?;
        let stdin = child.stdin.take();
        let stdout = child
            .stdout
            .take()
            .ok_or_else(|| OracleError::SpawnFailure("no stdout pipe".into()))?;
        Ok(SubprocessOracle {
            players,
            session: Mutex::new(Session {
                child,
                stdin,
                stdout: BufReader::new(stdout),
            }),
        })
    }

    /// Sends one raw query line and returns the parsed reply.
    pub fn query(&self, coalition: Coalition) -> Result<f64, OracleError> {
        if !coalition.is_subset_of(Coalition::grand(self.players)) {
            return Err(OracleError::OutOfRange {
                coalition,
                players: self.players,
            });
        }
        let line = encode_query(coalition, self.players);
        let mut session = self.session.lock().expect("oracle session lock");
        let stdin = session
            .stdin
            .as_mut()
            .ok_or_else(|| OracleError::ChildExited(line.clone()))?;
        let sent = writeln!(stdin, "{line}").and_then(|_| stdin.flush());
        if let Err(e) = sent {
            return Err(if e.kind() == std::io::ErrorKind::BrokenPipe {
                OracleError::ChildExited(line)
            } else {
                OracleError::Io(e.to_string())
            });
        }
        let mut reply = String::new();
        let read = session
            .stdout
            .read_line(&mut reply)
            .map_err(|e| OracleError::Io(e.to_string()))?;
        if read == 0 {
            return Err(OracleError::ChildExited(line));
        }
        let value = parse_reply(&line, &reply)?;
        if coalition.is_empty() && value != 0.0 {
            return Err(OracleError::ProtocolViolation {
                query: line,
                reply: reply.trim().to_string(),
            });
        }
        Ok(value)
    }
}

impl<F: Float> ValueOracle<F> for SubprocessOracle {
    fn players(&self) -> usize {
        self.players
    }

    fn value(&self, coalition: Coalition) -> Result<F, OracleError> {
        let v = self.query(coalition)?;
        F::from(v).ok_or_else(|| OracleError::Other(format!("value {v} is not representable")))
    }
}

impl Drop for SubprocessOracle {
    fn drop(&mut self) {
        if let Ok(session) = self.session.get_mut() {
            drop(session.stdin.take());
            let _ = session.child.wait();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_encoding() {
        let c = Coalition::from_players([0, 1]);
        assert_eq!(encode_query(c, 4), "1100");
        assert_eq!(decode_query("1100", 4), Some(c));
        assert_eq!(decode_query("0011", 4), Some(Coalition::from_players([2, 3])));
        assert_eq!(decode_query("01a0", 4), None);
        assert_eq!(decode_query("010", 4), None);
    }

    #[test]
    fn decimal_grammar() {
        for ok in ["0", "0.5", "-3", "+2.", ".25", "1e3", "-1.5E-2", "7e+1"] {
            assert!(is_decimal(ok), "{ok}");
        }
        for bad in ["", "abc", "inf", "NaN", ".", "1e", "1.2.3", "0x10", "- 1", "1 2"] {
            assert!(!is_decimal(bad), "{bad}");
        }
    }

    #[test]
    fn reply_parsing() {
        assert_eq!(parse_reply("0011", "0.5\n"), Ok(0.5));
        assert!(matches!(
            parse_reply("0011", "abc"),
            Err(OracleError::ProtocolViolation { .. })
        ));
    }

    fn script(body: &str) -> String {
        format!("while read q; do {body}; done")
    }

    #[test]
    fn echoes_child_replies() {
        let oracle = SubprocessOracle::shell(&script(r#"case $q in 0000) echo 0;; *) echo 0.5;; esac"#), 4).unwrap();
        let v: f64 = oracle.value(Coalition::from_players([2, 3])).unwrap();
        assert_eq!(v, 0.5);
        let v: f64 = oracle.value(Coalition::EMPTY).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn nonzero_empty_coalition_is_a_violation() {
        let oracle = SubprocessOracle::shell(&script("echo 1"), 4).unwrap();
        let v: Result<f64, _> = oracle.value(Coalition::EMPTY);
        assert!(matches!(v, Err(OracleError::ProtocolViolation { .. })));
    }

    #[test]
    fn malformed_reply_is_a_violation() {
        let oracle = SubprocessOracle::shell(&script("echo abc"), 2).unwrap();
        let v: Result<f64, _> = oracle.value(Coalition::from_players([0]));
        assert_eq!(
            v,
            Err(OracleError::ProtocolViolation {
                query: "10".into(),
                reply: "abc".into()
            })
        );
    }

    #[test]
    fn exited_child_is_reported() {
        let oracle = SubprocessOracle::shell("exit 0", 2).unwrap();
        let v: Result<f64, _> = oracle.value(Coalition::from_players([1]));
        assert!(matches!(v, Err(OracleError::ChildExited(_))));
    }
}
