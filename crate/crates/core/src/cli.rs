//! Command-line surface.
//!
//! Exit codes: 0 when every checked property held, 1 when a counterexample or
//! family discrepancy was found, 2 for usage and I/O errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::error::Error;
use crate::residue::{units, Modulus, ResidueSequence};
use crate::sampling::{random_lemma31_instance, random_sequence};
use crate::spectrum::{compute_spectrum, naive_spectrum, zero_sum_lengths};
use crate::structure::{
    find_short_zero_sum, lemma31_check_i, lemma31_construct_ii, lemma31_construct_iii,
    theorem_d_certificate, Lemma31Instance,
};
use crate::verify::{
    check_families, is_graham, lemma_c_sweep, sequence_record, verify_theorem, VerifyOptions,
};

#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(format!("I/O error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// Every checked property held.
    Clean = 0,
    /// A counterexample, discrepancy, or disproof event was found.
    Finding = 1,
    Usage = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Parses the shared sequence format: comma-separated terms, each `v` or
/// `v^m` (`m` copies of `v`). Whitespace is ignored; an empty string is the
/// empty sequence.
pub fn parse_sequence(text: &str, n: Modulus) -> Result<ResidueSequence, UsageError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut mult = vec![0usize; n.get()];
    if compact.is_empty() {
        return Ok(ResidueSequence::from_mult(n, mult)?);
    }
    for term in compact.split(',') {
        let (value, count) = match term.split_once('^') {
            Some((v, m)) => (v, m),
            None => (term, "1"),
        };
        let value: i64 = value
            .parse()
            .map_err(|_| UsageError(format!("malformed term {term:?}")))?;
        let count: i64 = count
            .parse()
            .map_err(|_| UsageError(format!("malformed multiplicity in {term:?}")))?;
        if count < 0 {
            return Err(UsageError(format!("negative multiplicity in {term:?}")));
        }
        if value < 0 || value as u64 >= n.get() as u64 {
            return Err(UsageError(format!(
                "value {value} is outside [0, {}]",
                n.get() - 1
            )));
        }
        mult[value as usize] += count as usize;
    }
    Ok(ResidueSequence::from_mult(n, mult)?)
}

#[derive(Debug, Parser)]
#[command(
    name = "zslab",
    version,
    about = "Zero-sum subsequence lengths over Z/nZ"
)]
pub struct Cli {
    /// Emit JSON Lines instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// Modulus n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Sequence, e.g. `1^4,3`.
    #[arg(long, allow_hyphen_values = true)]
    pub seq: String,
}

impl SeqArgs {
    fn sequence(&self) -> Result<ResidueSequence, UsageError> {
        parse_sequence(&self.seq, Modulus::new(self.n as usize)?)
    }
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Achievable lengths for every sum residue.
    Spectrum(SeqArgs),
    /// Unique-length verdict for one sequence.
    Check(SeqArgs),
    /// Exhaustive sweep of all size-n multisets.
    Verify {
        #[command(flatten)]
        range: RangeArgs,
        /// Worker threads (default: hardware parallelism).
        #[arg(long, env = "ZSLAB_WORKERS")]
        workers: Option<usize>,
        /// Examine every unit-orbit member, not just representatives.
        #[arg(long)]
        no_canonical: bool,
        /// Also examine multisets with at most two distinct values.
        #[arg(long)]
        no_prune: bool,
        #[arg(long, default_value_t = 1 << 14)]
        chunk_size: u64,
        /// Write the JSON Lines report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the three printed example families.
    Families(RangeArgs),
    /// Unit-rescaling certificate for a long zero-sum-free sequence.
    #[command(name = "zsf-cert")]
    ZsfCert(SeqArgs),
    /// Check and constructions for a sequence 1^v a_1 ... a_t.
    Lemma31 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        v: usize,
        /// Comma-separated a_1,...,a_t.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        /// A single target sum (default: every k in range).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Shortest zero-sum subsequence of a sequence of n terms.
    Lemmab(SeqArgs),
    /// Two-valued sequences of length n-1 must have a zero sum.
    #[command(name = "lemma-c")]
    LemmaC(RangeArgs),
    /// Seeded randomized self-checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
    },
}

/// Output sinks for one invocation.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

pub fn run(cli: &Cli, io: &mut Io<'_>) -> ExitStatus {
    match dispatch(cli, io) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            ExitStatus::Usage
        }
    }
}

fn finding_if(found: bool) -> ExitStatus {
    if found {
        ExitStatus::Finding
    } else {
        ExitStatus::Clean
    }
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), UsageError> {
    writeln!(out, "{value}")?;
    Ok(())
}

fn check_range(r: &RangeArgs, lowest: usize) -> Result<(), UsageError> {
    if r.n_min < lowest || r.n_min > r.n_max {
        return Err(UsageError(format!(
            "need {lowest} <= --n-min <= --n-max, got {} and {}",
            r.n_min, r.n_max
        )));
    }
    Ok(())
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Result<ExitStatus, UsageError> {
    let json = cli.json;
    let out = &mut *io.out;
    match &cli.command {
        Command::Spectrum(args) => {
            let seq = args.sequence()?;
            let spec = compute_spectrum(&seq);
            if json {
                emit(
                    out,
                    &serde_json::to_value(spec.to_record()).expect("plain data"),
                )?;
            } else {
                writeln!(out, "n={} L={} seq={}", seq.n(), seq.len(), seq)?;
                for s in 0..seq.n() {
                    let ls: Vec<String> = spec.lengths(s).iter().map(|l| l.to_string()).collect();
                    writeln!(out, "  {s}: {{{}}}", ls.join(","))?;
                }
            }
            Ok(ExitStatus::Clean)
        }
        Command::Check(args) => {
            let seq = args.sequence()?;
            let verdict = is_graham(&seq);
            let counterexample =
                verdict.is_unique() && seq.len() == seq.n() && seq.distinct_count() >= 3;
            if json {
                let mut rec = sequence_record(&seq, &verdict);
                rec["counterexample"] = json!(counterexample);
                emit(out, &rec)?;
            } else {
                writeln!(out, "{verdict}")?;
                if counterexample {
                    writeln!(
                        out,
                        "COUNTEREXAMPLE: {} distinct values with a unique zero-sum length",
                        seq.distinct_count()
                    )?;
                }
            }
            Ok(finding_if(counterexample))
        }
        Command::Verify {
            range,
            workers,
            no_canonical,
            no_prune,
            chunk_size,
            out: path,
        } => {
            check_range(range, 1)?;
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
                .max(1);
            let options = VerifyOptions {
                canonical: !no_canonical,
                prune_two_valued: !no_prune,
                chunk_size: *chunk_size,
            };
            let mut file = match path {
                Some(p) => Some(BufWriter::new(File::create(p).map_err(|e| {
                    UsageError(format!("cannot create {}: {e}", p.display()))
                })?)),
                None => None,
            };
            let mut examined = 0u128;
            let mut counterexamples = 0usize;
            for n in range.n_min..=range.n_max {
                let report = verify_theorem(Modulus::new(n)?, workers, options)?;
                examined += report.examined;
                counterexamples += report.counterexamples.len();
                let lines = report.to_jsonl(true);
                if let Some(f) = file.as_mut() {
                    f.write_all(lines.as_bytes())?;
                }
                if json {
                    out.write_all(lines.as_bytes())?;
                } else {
                    writeln!(
                        out,
                        "n={n}: total {} pruned {} non-canonical {} examined {} graham {} counterexamples {} ({:.1} ms)",
                        report.total,
                        report.skipped_two_valued,
                        report.skipped_noncanonical,
                        report.examined,
                        report.graham.len(),
                        report.counterexamples.len(),
                        report.wall_time.as_secs_f64() * 1e3
                    )?;
                    for c in &report.counterexamples {
                        writeln!(out, "  COUNTEREXAMPLE n={n}: {c}")?;
                    }
                }
            }
            let summary = json!({
                "kind": "summary",
                "n_min": range.n_min,
                "n_max": range.n_max,
                "workers": workers,
                "examined": examined.to_string(),
                "counterexamples": counterexamples,
            });
            if let Some(f) = file.as_mut() {
                emit(f, &summary)?;
                f.flush()?;
            }
            if json {
                emit(out, &summary)?;
            } else {
                writeln!(out, "{counterexamples} counterexamples")?;
            }
            Ok(finding_if(counterexamples > 0))
        }
        Command::Families(range) => {
            check_range(range, 2)?;
            let verdicts = check_families(range.n_min, range.n_max)?;
            let discrepancies = verdicts.iter().filter(|v| !v.matches_claim).count();
            for v in &verdicts {
                if json {
                    emit(out, &v.record())?;
                } else {
                    let params = serde_json::to_string(&v.instance.params).expect("plain data");
                    writeln!(
                        out,
                        "n={} family {} {} [{}]: {}{}",
                        v.instance.n,
                        v.instance.family,
                        params,
                        v.instance.seq,
                        v.verdict,
                        if v.matches_claim { "" } else { "  DISCREPANCY" }
                    )?;
                }
            }
            if json {
                emit(
                    out,
                    &json!({"kind": "summary", "instances": verdicts.len(), "discrepancies": discrepancies}),
                )?;
            } else {
                writeln!(
                    out,
                    "{} instances, {discrepancies} discrepancies",
                    verdicts.len()
                )?;
            }
            Ok(finding_if(discrepancies > 0))
        }
        Command::ZsfCert(args) => {
            let seq = args.sequence()?;
            match theorem_d_certificate(&seq) {
                Ok(cert) => {
                    cert.validate(&seq)?;
                    if json {
                        emit(out, &serde_json::to_value(&cert).expect("plain data"))?;
                    } else {
                        writeln!(out, "{cert}")?;
                    }
                    Ok(ExitStatus::Clean)
                }
                Err(e @ Error::TheoremDFailure { .. }) => {
                    if json {
                        emit(
                            out,
                            &json!({"n": seq.n(), "seq": seq, "failure": e.to_string()}),
                        )?;
                    }
                    writeln!(io.err, "FINDING: {e}")?;
                    Ok(ExitStatus::Finding)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Lemma31 { n, j, v, a, k } => {
            let inst = Lemma31Instance::new(*n, *j, *v, a.clone())?;
            lemma31_report(&inst, *k, json, out)
        }
        Command::Lemmab(args) => {
            let seq = args.sequence()?;
            let w = find_short_zero_sum(&seq)?;
            if json {
                emit(
                    out,
                    &json!({"n": seq.n(), "seq": seq, "h": seq.h_max(), "witness": w, "length": w.len()}),
                )?;
            } else {
                writeln!(out, "{w} (length {} <= h = {})", w.len(), seq.h_max())?;
            }
            Ok(ExitStatus::Clean)
        }
        Command::LemmaC(range) => {
            check_range(range, 2)?;
            let mut failures = 0;
            for n in range.n_min..=range.n_max {
                let r = lemma_c_sweep(Modulus::new(n)?)?;
                failures += r.failures.len();
                if json {
                    emit(
                        out,
                        &json!({"n": n, "checked": r.checked, "failures": r.failures}),
                    )?;
                } else {
                    writeln!(
                        out,
                        "n={n}: {} checked, {} without a zero sum",
                        r.checked,
                        r.failures.len()
                    )?;
                }
            }
            Ok(finding_if(failures > 0))
        }
        Command::Selftest {
            rng_seed,
            instances,
        } => {
            let failures = selftest(*rng_seed, *instances, out)?;
            Ok(finding_if(failures > 0))
        }
    }
}

fn lemma31_report(
    inst: &Lemma31Instance,
    k: Option<usize>,
    json: bool,
    out: &mut dyn Write,
) -> Result<ExitStatus, UsageError> {
    let mut failures = 0;
    let check_i = lemma31_check_i(inst);
    if !check_i {
        failures += 1;
    }
    let ks: Vec<usize> = match k {
        Some(k) if !(2..=inst.total()).contains(&k) => {
            return Err(UsageError(format!("--k {k} outside [2, {}]", inst.total())));
        }
        Some(k) => vec![k],
        None => (2..=inst.total()).collect(),
    };
    let part_iii = inst.total() + 2 <= inst.n();
    let iii_range = inst.a()[0]..=inst.total() - inst.a()[0];
    if json {
        emit(out, &json!({"instance": inst, "check_i": check_i}))?;
    } else {
        writeln!(
            out,
            "instance n={} j={} v={} a={:?}",
            inst.n(),
            inst.j(),
            inst.v(),
            inst.a()
        )?;
        writeln!(out, "  (i) {}", if check_i { "holds" } else { "FAILS" })?;
    }
    for &k in &ks {
        let ii = lemma31_construct_ii(inst, k);
        let iii = (part_iii && iii_range.contains(&k)).then(|| lemma31_construct_iii(inst, k));
        let ii_ok = matches!(&ii, Ok(w) if w.sigma() == k as u64 && w.len() >= 2);
        let iii_ok = match &iii {
            None => true,
            Some(Ok((l, s))) => l.sigma() == k as u64 && s.sigma() == k as u64 && l.len() > s.len(),
            Some(Err(_)) => false,
        };
        if !ii_ok || !iii_ok {
            failures += 1;
        }
        if json {
            emit(
                out,
                &json!({
                    "k": k,
                    "ii": ii.as_ref().ok(),
                    "iii": iii.as_ref().and_then(|r| r.as_ref().ok()),
                    "ok": ii_ok && iii_ok,
                }),
            )?;
        } else {
            let ii_text = ii
                .as_ref()
                .map_or_else(|e| format!("error: {e}"), |w| w.to_string());
            write!(out, "  k={k}: (ii) [{ii_text}]")?;
            match &iii {
                Some(Ok((l, s))) => write!(out, " (iii) [{l}] / [{s}]")?,
                Some(Err(e)) => write!(out, " (iii) error: {e}")?,
                None => {}
            }
            writeln!(out, "{}", if ii_ok && iii_ok { "" } else { "  FAIL" })?;
        }
    }
    Ok(finding_if(failures > 0))
}

/// Randomized cross-checks; returns the number of failures.
pub fn selftest(seed: u64, instances: usize, out: &mut dyn Write) -> Result<usize, UsageError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;

    let mut oracle_fail = 0;
    for _ in 0..instances {
        let n = Modulus::new(rng.gen_range(1..=10))?;
        let len = rng.gen_range(0..=12);
        let s = random_sequence(&mut rng, n, len);
        if compute_spectrum(&s) != naive_spectrum(&s)? {
            oracle_fail += 1;
            writeln!(out, "oracle mismatch: {s:?}")?;
        }
    }
    writeln!(
        out,
        "spectrum vs brute force: {instances} instances, {oracle_fail} failures"
    )?;
    failures += oracle_fail;

    let mut unit_fail = 0;
    for _ in 0..instances {
        let n = Modulus::new(rng.gen_range(2..=20))?;
        let len = rng.gen_range(0..=n.get());
        let s = random_sequence(&mut rng, n, len);
        let base = zero_sum_lengths(&s);
        for m in units(n)? {
            if zero_sum_lengths(&s.rescale(m as i64)?) != base {
                unit_fail += 1;
                writeln!(out, "unit invariance fails for {s:?} with m={m}")?;
            }
        }
    }
    writeln!(
        out,
        "unit invariance: {instances} instances, {unit_fail} failures"
    )?;
    failures += unit_fail;

    let mut lemma_fail = 0;
    for _ in 0..instances {
        let inst = random_lemma31_instance(&mut rng, 64);
        let mut sink = Vec::new();
        if lemma31_report(&inst, None, true, &mut sink)? != ExitStatus::Clean {
            lemma_fail += 1;
            writeln!(out, "1^v a constructions fail for {inst:?}")?;
        }
    }
    writeln!(
        out,
        "1^v a constructions: {instances} instances, {lemma_fail} failures"
    )?;
    failures += lemma_fail;

    writeln!(out, "seed {seed}: {failures} failures")?;
    Ok(failures)
}
