//! Line-oriented text format for saving a session between processes.
//!
//! ```text
//! overground-state v1
//! digest <sha256 of the canonical program>
//! mode incremental
//! shots <n>
//! reseed <0|1>
//! atoms <count>
//! atom <id> <atom>
//! rules <count>
//! rule <head|0> | <pos ids> | <neg ids> | <shot_added> <trigger_count>
//! domain <count>
//! <id> <id> ...
//! once <count>
//! <rule index> ...
//! end
//! ```

use std::io::{BufRead, Write};

use crate::grounder::{OvergroundedState, RuleMeta};
use crate::model::{GroundAtomId, GroundRule, Interner, NonGroundProgram};
use crate::syntax::parse_ground_atom;

use super::{program_digest, EngineError, Mode, Session, SessionConfig};

pub const STATE_HEADER: &str = "overground-state";
const VERSION: &str = "v1";

fn ids(list: &[GroundAtomId]) -> String {
    list.iter().map(|i| i.0.to_string()).collect::<Vec<_>>().join(" ")
}

impl Session {
    pub fn save_state<W: Write>(&self, mut out: W) -> Result<(), EngineError> {
        let s = &self.state;
        writeln!(out, "{STATE_HEADER} {VERSION}")?;
        writeln!(out, "digest {}", program_digest(self.program()))?;
        let mode = match self.config.mode {
            Mode::Incremental => "incremental",
            Mode::Scratch => "scratch",
        };
        writeln!(out, "mode {mode}")?;
        writeln!(out, "shots {}", s.shot_counter)?;
        writeln!(out, "reseed {}", u8::from(s.reseed_full))?;
        writeln!(out, "atoms {}", self.interner.len())?;
        for (id, atom) in self.interner.iter() {
            writeln!(out, "atom {} {atom}", id.0)?;
        }
        writeln!(out, "rules {}", s.rules.len())?;
        for c in s.rules.values() {
            writeln!(
                out,
                "rule {} | {} | {} | {} {}",
                c.rule.head.map_or(0, |h| h.0),
                ids(&c.rule.positive),
                ids(&c.rule.negative),
                c.meta.shot_added,
                c.meta.trigger_count
            )?;
        }
        writeln!(out, "domain {}", s.domain.len())?;
        writeln!(out, "{}", ids(&s.domain.sorted()))?;
        writeln!(out, "once {}", s.once.len())?;
        writeln!(out, "{}", s.once.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))?;
        writeln!(out, "end")?;
        out.flush()?;
        Ok(())
    }

    /// Restores a session saved by [`Session::save_state`] for the same
    /// program. The mode recorded in the file is informational; `config`
    /// decides how later shots run.
    pub fn load_state<R: BufRead>(
        program: NonGroundProgram,
        config: SessionConfig,
        input: R,
    ) -> Result<Session, EngineError> {
        let mut session = Session::new(program, config)?;
        let mut r = Reader { lines: input.lines(), line: 0 };

        let header = r.next()?;
        match header.split_once(' ') {
            Some((STATE_HEADER, VERSION)) => {}
            Some((STATE_HEADER, other)) => return Err(EngineError::UnsupportedVersion(other.to_string())),
            _ => return Err(r.malformed("missing state header")),
        }
        let digest = r.keyed("digest")?;
        if digest != program_digest(session.program()) {
            return Err(EngineError::ProgramChanged);
        }
        let _mode = r.keyed("mode")?;
        let shots = r.number::<u64>("shots")?;
        let reseed = r.number::<u8>("reseed")? != 0;

        let mut interner = Interner::new();
        for expected in 1..=r.number::<u32>("atoms")? {
            let line = r.keyed("atom")?;
            let (id, text) = line.split_once(' ').ok_or_else(|| r.malformed("expected `atom <id> <atom>`"))?;
            let atom = parse_ground_atom(text).map_err(|e| r.malformed(&e.to_string()))?;
            if id != expected.to_string() || interner.intern(atom).0 != expected {
                return Err(r.malformed("atom ids must be dense and unique"));
            }
        }

        let mut state = OvergroundedState::new();
        state.shot_counter = shots;
        state.reseed_full = reseed;
        let count = r.number::<usize>("rules")?;
        for _ in 0..count {
            let line = r.keyed("rule")?;
            let (rule, meta) = r.parse_rule(&line, &interner)?;
            if !state.insert(rule, meta.shot_added) {
                return Err(r.malformed("duplicate rule"));
            }
            let id = state.next_rule_id - 1;
            state.rules.get_mut(&id).expect("just inserted").meta = meta;
        }

        let count = r.number::<usize>("domain")?;
        let domain = r.id_list(&interner)?;
        if domain.len() != count {
            return Err(r.malformed("domain count mismatch"));
        }
        for id in domain {
            state.domain.insert(id, interner.resolve(id));
        }

        let count = r.number::<usize>("once")?;
        let once = r.next()?;
        let once: Vec<usize> = once
            .split_whitespace()
            .map(|t| t.parse::<usize>().ok().filter(|&i| i < session.program().rules.len()))
            .collect::<Option<_>>()
            .ok_or_else(|| r.malformed("bad rule index"))?;
        if once.len() != count {
            return Err(r.malformed("once count mismatch"));
        }
        state.once.extend(once);
        if r.next()? != "end" {
            return Err(r.malformed("expected `end`"));
        }

        session.state = state;
        session.interner = interner;
        Ok(session)
    }
}

struct Reader<L> {
    lines: L,
    line: usize,
}

impl<L: Iterator<Item = std::io::Result<String>>> Reader<L> {
    fn malformed(&self, message: &str) -> EngineError {
        EngineError::MalformedState { line: self.line, message: message.to_string() }
    }

    fn next(&mut self) -> Result<String, EngineError> {
        self.line += 1;
        match self.lines.next() {
            Some(l) => Ok(l?.trim_end().to_string()),
            None => Err(self.malformed("unexpected end of file")),
        }
    }

    /// Value of a `key value` line.
    fn keyed(&mut self, key: &str) -> Result<String, EngineError> {
        let line = self.next()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => Err(self.malformed(&format!("expected `{key}`"))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, EngineError> {
        let v = self.keyed(key)?;
        v.parse().map_err(|_| self.malformed(&format!("bad number for `{key}`")))
    }

    fn ids_in(&self, text: &str, interner: &Interner) -> Result<Vec<GroundAtomId>, EngineError> {
        text.split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .ok()
                    .map(GroundAtomId)
                    .filter(|&id| interner.contains_id(id))
                    .ok_or_else(|| self.malformed(&format!("unknown atom id `{t}`")))
            })
            .collect()
    }

    fn id_list(&mut self, interner: &Interner) -> Result<Vec<GroundAtomId>, EngineError> {
        let line = self.next()?;
        self.ids_in(&line, interner)
    }

    fn parse_rule(&self, line: &str, interner: &Interner) -> Result<(GroundRule, RuleMeta), EngineError> {
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let [head, pos, neg, meta] = parts[..] else {
            return Err(self.malformed("expected four `|`-separated fields"));
        };
        let head = match head {
            "0" => None,
            h => Some(self.ids_in(h, interner)?.into_iter().next().ok_or_else(|| self.malformed("missing head"))?),
        };
        let pos = self.ids_in(pos, interner)?;
        let neg = self.ids_in(neg, interner)?;
        let nums: Vec<u64> = meta.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        let [shot_added, trigger_count] = nums[..] else {
            return Err(self.malformed("expected `<shot_added> <trigger_count>`"));
        };
        Ok((GroundRule::new(head, pos, neg), RuleMeta { shot_added, trigger_count }))
    }
}
