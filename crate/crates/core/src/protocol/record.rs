//! Line-delimited transcript records.
//!
//! ```text
//! session index=0 protocol=lattice channel=two-point-mixture(d=3) seed=42
//! rotation values=<9 reals, row-major>
//! msg view=alice dir=a2b kind=vec3 values=<x>,<y>,<z>
//! msg view=bob dir=a2b kind=classical values=1,0,2,3
//! outcome verdict=accepted bit=1
//! end
//! ```
//!
//! Reals are written with 17 significant digits so parsing restores the
//! exact bit patterns; replaying Bob on a parsed record reproduces the
//! recorded verdict.

use std::fmt::Write as _;

use rand::RngCore;

use super::{Direction, Message, Outcome, Party, Payload, Role, Step, Transcript};
use crate::error::{Error, Result};
use crate::scalar::{fmt_exact, Real};
use crate::so3::{Rotation, Vec3};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionMeta {
    pub index: u64,
    pub protocol: String,
    pub channel: String,
    pub seed: u64,
}

fn fmt_reals<T: Real>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| fmt_exact(x.as_f64()))
        .collect::<Vec<_>>()
        .join(",")
}

fn write_view<T: Real>(out: &mut String, name: &str, view: &[Message<T>]) {
    for m in view {
        let dir = match m.direction {
            Direction::AliceToBob => "a2b",
            Direction::BobToAlice => "b2a",
        };
        let (kind, values) = match &m.payload {
            Payload::Vector(v) => ("vec3", fmt_reals(&v.as_array())),
            Payload::Classical(c) => (
                "classical",
                c.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
            ),
        };
        let _ = writeln!(out, "msg view={name} dir={dir} kind={kind} values={values}");
    }
}

/// Renders one session record.
pub fn render_transcript<T: Real>(meta: &SessionMeta, t: &Transcript<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "session index={} protocol={} channel={} seed={}",
        meta.index, meta.protocol, meta.channel, meta.seed
    );
    let _ = writeln!(out, "rotation values={}", fmt_reals(&t.rotation.to_array()));
    write_view(&mut out, "alice", &t.alice_view);
    write_view(&mut out, "bob", &t.bob_view);
    match &t.outcome {
        Outcome::Accepted(b) => {
            let _ = writeln!(out, "outcome verdict=accepted bit={b}");
        }
        Outcome::Aborted(reason) => {
            let _ = writeln!(out, "outcome verdict=aborted reason={reason}");
        }
    }
    out.push_str("end\n");
    out
}

struct Fields<'a> {
    line: usize,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    /// Splits `k=v` pairs; the `reason` key swallows the rest of the line.
    fn parse(line_no: usize, rest: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let (key, after) = rest.split_once('=').ok_or_else(|| Error::Transcript {
                line: line_no,
                msg: format!("expected key=value in '{rest}'"),
            })?;
            if key == "reason" {
                pairs.push((key, after));
                break;
            }
            let (value, tail) = after.split_once(' ').unwrap_or((after, ""));
            pairs.push((key, value));
            rest = tail.trim_start();
        }
        Ok(Self { line: line_no, pairs })
    }

    fn get(&self, key: &str) -> Result<&'a str> {
        self.pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| self.err(format!("missing field '{key}'")))
    }

    fn err(&self, msg: String) -> Error {
        Error::Transcript { line: self.line, msg }
    }

    fn number<N: std::str::FromStr>(&self, key: &str) -> Result<N> {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|_| self.err(format!("bad number '{raw}' for '{key}'")))
    }

    fn reals<T: Real>(&self, key: &str) -> Result<Vec<T>> {
        self.get(key)?
            .split(',')
            .map(|s| {
                s.parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| self.err(format!("bad real '{s}'")))
            })
            .collect()
    }
}

struct Partial<T> {
    meta: Option<SessionMeta>,
    rotation: Option<Rotation<T>>,
    alice: Vec<Message<T>>,
    bob: Vec<Message<T>>,
    outcome: Option<Outcome>,
}

/// Parses every session record in `text`. Blank lines and `#` comments are skipped.
pub fn parse_transcripts<T: Real>(text: &str) -> Result<Vec<(SessionMeta, Transcript<T>)>> {
    let mut sessions = Vec::new();
    let mut cur: Option<Partial<T>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        let err = |msg: &str| Error::Transcript {
            line: line_no,
            msg: msg.to_string(),
        };
        match tag {
            "session" => {
                if cur.is_some() {
                    return Err(err("session started before previous 'end'"));
                }
                let f = Fields::parse(line_no, rest)?;
                cur = Some(Partial {
                    meta: Some(SessionMeta {
                        index: f.number("index")?,
                        protocol: f.get("protocol")?.to_string(),
                        channel: f.get("channel")?.to_string(),
                        seed: f.number("seed")?,
                    }),
                    rotation: None,
                    alice: Vec::new(),
                    bob: Vec::new(),
                    outcome: None,
                });
            }
            "rotation" | "msg" | "outcome" => {
                let p = cur.as_mut().ok_or_else(|| err("record outside a session"))?;
                let f = Fields::parse(line_no, rest)?;
                match tag {
                    "rotation" => {
                        let v: Vec<T> = f.reals("values")?;
                        if v.len() != 9 {
                            return Err(err("rotation needs 9 values"));
                        }
                        let m = [[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]];
                        p.rotation = Some(Rotation::from_matrix(m).map_err(|_| err("improper rotation"))?);
                    }
                    "msg" => {
                        let direction = match f.get("dir")? {
                            "a2b" => Direction::AliceToBob,
                            "b2a" => Direction::BobToAlice,
                            other => return Err(err(&format!("unknown direction '{other}'"))),
                        };
                        let payload = match f.get("kind")? {
                            "vec3" => {
                                let v: Vec<T> = f.reals("values")?;
                                if v.len() != 3 {
                                    return Err(err("vec3 needs 3 values"));
                                }
                                Payload::Vector(Vec3::new(v[0], v[1], v[2]))
                            }
                            "classical" => {
                                let raw = f.get("values")?;
                                let vals: std::result::Result<Vec<i64>, _> = if raw.is_empty() {
                                    Ok(Vec::new())
                                } else {
                                    raw.split(',').map(str::parse).collect()
                                };
                                Payload::Classical(vals.map_err(|_| err("bad classical value"))?)
                            }
                            other => return Err(err(&format!("unknown payload kind '{other}'"))),
                        };
                        let msg = Message { direction, payload };
                        match f.get("view")? {
                            "alice" => p.alice.push(msg),
                            "bob" => p.bob.push(msg),
                            other => return Err(err(&format!("unknown view '{other}'"))),
                        }
                    }
                    _ => {
                        p.outcome = Some(match f.get("verdict")? {
                            "accepted" => Outcome::Accepted(f.number("bit")?),
                            "aborted" => Outcome::Aborted(f.get("reason")?.to_string()),
                            other => return Err(err(&format!("unknown verdict '{other}'"))),
                        });
                    }
                }
            }
            "end" => {
                let p = cur.take().ok_or_else(|| err("'end' outside a session"))?;
                let meta = p.meta.ok_or_else(|| err("missing session header"))?;
                let transcript = Transcript {
                    rotation: p.rotation.ok_or_else(|| err("missing rotation"))?,
                    alice_view: p.alice,
                    bob_view: p.bob,
                    outcome: p.outcome.ok_or_else(|| err("missing outcome"))?,
                };
                sessions.push((meta, transcript));
            }
            other => return Err(err(&format!("unknown record '{other}'"))),
        }
    }
    if cur.is_some() {
        return Err(Error::Transcript {
            line: text.lines().count(),
            msg: "unterminated session".into(),
        });
    }
    Ok(sessions)
}

/// Re-runs `bob` on the recorded incoming messages and returns his verdict.
///
/// Bob's own recorded messages must be reproduced exactly; any divergence
/// is reported as an error.
pub fn replay_bob<T: Real>(
    recorded: &Transcript<T>,
    bob: &mut dyn Party<T>,
    rng: &mut dyn RngCore,
) -> std::result::Result<Outcome, String> {
    let view = &recorded.bob_view;
    let mut prefix: Vec<Message<T>> = Vec::new();
    let mut i = 0;
    loop {
        while i < view.len() && view[i].is_from(Role::Alice) {
            prefix.push(view[i].clone());
            i += 1;
        }
        loop {
            match bob.step(&prefix, rng)? {
                Step::Send(p) => {
                    let expected = view.get(i).filter(|m| m.is_from(Role::Bob));
                    match expected {
                        Some(m) if m.payload == p => {
                            prefix.push(m.clone());
                            i += 1;
                        }
                        _ => return Err(format!("replay diverged at message {i}")),
                    }
                }
                Step::Yield => break,
                Step::Finish(o) => return Ok(o),
            }
        }
        if i >= view.len() {
            return Err("Bob did not reach a verdict on the recorded messages".into());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lattice_mu, LatticeParams, Predicate};
    use crate::protocol::{run_session, LatticeAlice, LatticeAliceStrategy, LatticeBob, Scheme};
    use crate::so3::Vec3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn meta(i: u64) -> SessionMeta {
        SessionMeta {
            index: i,
            protocol: "lattice".into(),
            channel: "two-point-mixture(d=2)".into(),
            seed: 42,
        }
    }

    #[test]
    fn render_parse_round_trip_and_replay() {
        let params = LatticeParams::<f64>::with_default_eps(2, 8, Predicate::Lenient).unwrap();
        let mu = lattice_mu(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut text = String::from("# two sessions\n");
        let mut originals = Vec::new();
        for i in 0..40u64 {
            let strategy = if i % 2 == 0 {
                LatticeAliceStrategy::Honest { bit: 1 }
            } else {
                LatticeAliceStrategy::FlipCheat { bit: 0, coord: 1 }
            };
            let t = run_session(
                &mut LatticeAlice::new(&params, strategy),
                &mut LatticeBob::new(&params),
                &mu,
                &mut rng,
            );
            text.push_str(&render_transcript(&meta(i), &t));
            originals.push(t);
        }
        let parsed = parse_transcripts::<f64>(&text).unwrap();
        assert_eq!(parsed.len(), originals.len());
        for ((m, t), orig) in parsed.iter().zip(&originals) {
            assert_eq!(t, orig);
            assert_eq!(m.seed, 42);
            let replayed = replay_bob(t, &mut LatticeBob::new(&params), &mut rng).unwrap();
            assert_eq!(replayed, orig.outcome);
        }
    }

    #[test]
    fn aborted_reason_with_spaces_survives() {
        let t = Transcript::<f64> {
            rotation: crate::so3::Rotation::about_z(0.25),
            alice_view: vec![Message {
                direction: Direction::AliceToBob,
                payload: Payload::Vector(Vec3::new(0.1, 0.2, 0.3)),
            }],
            bob_view: vec![],
            outcome: Outcome::aborted("no codeword within eps"),
        };
        let text = render_transcript(&meta(3), &t);
        let parsed = parse_transcripts::<f64>(&text).unwrap();
        assert_eq!(parsed[0].1, t);
    }

    #[test]
    fn replay_flags_tampered_reveal() {
        let params = LatticeParams::<f64>::with_default_eps(2, 8, Predicate::Strict).unwrap();
        let scheme = Scheme::Lattice(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = run_session(
            scheme.honest_alice(0).as_mut(),
            scheme.bob().as_mut(),
            &scheme.channel(),
            &mut rng,
        );
        assert_eq!(t.outcome, Outcome::Accepted(0));
        let text = render_transcript(&meta(0), &t);
        // flip the revealed bit in Bob's copy
        let tampered: String = text
            .lines()
            .map(|l| {
                if l.starts_with("msg view=bob") && l.contains("classical") {
                    l.replacen("values=0", "values=1", 1)
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        let parsed = parse_transcripts::<f64>(&tampered).unwrap();
        let replayed = replay_bob(&parsed[0].1, &mut LatticeBob::new(&params), &mut rng).unwrap();
        assert!(matches!(replayed, Outcome::Aborted(_)));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_transcripts::<f64>("msg view=bob dir=a2b kind=vec3 values=1,0,0\n").is_err());
        assert!(parse_transcripts::<f64>("session index=0 protocol=x channel=y seed=1\n").is_err());
        let bad = "session index=0 protocol=x channel=y seed=1\nrotation values=1,0,0\nend\n";
        assert!(parse_transcripts::<f64>(bad).is_err());
        assert!(parse_transcripts::<f64>("bogus\n").is_err());
    }
}
