use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};

use super::{check_prop1, parities};
use crate::error::{Error, Result};
use crate::protocols::{process_pd, TriangleInput};
use crate::quantum::{Bitstring, DEFAULT_SUPPORT_TOL};

/// Largest `d` whose ring fits the statevector cap.
pub const MAX_SUPPORT_D: usize = 8;

pub type Support = Arc<BTreeSet<Bitstring>>;

type Key = (usize, TriangleInput, u64);

fn memory() -> &'static Mutex<HashMap<Key, Support>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Support>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compute(d: usize, b: TriangleInput, tol: f64) -> Result<Support> {
    if d > MAX_SUPPORT_D {
        return Err(Error::Resource { what: "ring size for support enumeration", limit: 3 * MAX_SUPPORT_D, requested: 3 * d });
    }
    Ok(Arc::new(process_pd(d, b)?.support(tol)))
}

/// Support of the triangle process at the default tolerance, cached in
/// memory for the life of the process.
pub fn enumerate_support(d: usize, b: TriangleInput) -> Result<Support> {
    support_with_tol(d, b, DEFAULT_SUPPORT_TOL)
}

pub fn support_with_tol(d: usize, b: TriangleInput, tol: f64) -> Result<Support> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::arg(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let key = (d, b, tol.to_bits());
    if let Some(s) = memory().lock().expect("support cache").get(&key) {
        return Ok(Arc::clone(s));
    }
    let s = compute(d, b, tol)?;
    memory().lock().expect("support cache").insert(key, Arc::clone(&s));
    Ok(s)
}

/// Outcome of checking one ring string against input `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub input: TriangleInput,
    pub outcome: Bitstring,
    pub in_support: bool,
    pub prop1_ok: bool,
}

pub fn is_valid(d: usize, b: TriangleInput, outcome: &Bitstring) -> Result<ValidityReport> {
    let prop1_ok = check_prop1(b, parities(d, outcome)?);
    let in_support = enumerate_support(d, b)?.contains(outcome);
    Ok(ValidityReport { input: b, outcome: *outcome, in_support, prop1_ok })
}

/// On-disk support sets, one text file per `(d, b, tolerance)`:
///
/// ```text
/// # qlocal support v1
/// d 4
/// b 011
/// tolerance 1e-9
/// count 1024
/// sha256 <hex digest of the body>
/// <one outcome per line, x_0 first>
/// ```
#[derive(Clone, Debug)]
pub struct SupportCache {
    dir: PathBuf,
}

const HEADER: &str = "# qlocal support v1";

fn body(set: &BTreeSet<Bitstring>) -> String {
    let mut out = String::with_capacity(set.len() * (set.first().map_or(0, Bitstring::len) + 1));
    for s in set {
        writeln!(out, "{s}").expect("string write");
    }
    out
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl SupportCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SupportCache { dir: dir.into() }
    }

    pub fn path(&self, d: usize, b: TriangleInput, tol: f64) -> PathBuf {
        self.dir.join(format!("support-d{d}-b{b}-tol{tol:e}.txt"))
    }

    /// Loads the cached set, or computes and stores it. A file whose
    /// header or digest does not match is recomputed and overwritten.
    pub fn get(&self, d: usize, b: TriangleInput, tol: f64) -> Result<Support> {
        let path = self.path(d, b, tol);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(set) = parse(&text, d, b, tol) {
                return Ok(Arc::new(set));
            }
        }
        let set = support_with_tol(d, b, tol)?;
        std::fs::create_dir_all(&self.dir)?;
        write_atomic(&path, &render(&set, d, b, tol))?;
        Ok(set)
    }
}

fn render(set: &BTreeSet<Bitstring>, d: usize, b: TriangleInput, tol: f64) -> String {
    let body = body(set);
    format!(
        "{HEADER}\nd {d}\nb {b}\ntolerance {tol:e}\ncount {}\nsha256 {}\n{body}",
        set.len(),
        digest(&body)
    )
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// Parses a cache file and checks that it matches `(d, b, tol)`.
pub fn parse(text: &str, d: usize, b: TriangleInput, tol: f64) -> Result<BTreeSet<Bitstring>> {
    let bad = |what: &str| Error::Parse(format!("support cache: {what}"));
    let mut lines = text.splitn(7, '\n');
    if lines.next() != Some(HEADER) {
        return Err(bad("missing header"));
    }
    let mut field = |name: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad("truncated header"))?;
        line.strip_prefix(name)
            .and_then(|v| v.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("expected field {name}")))
    };
    let fd: usize = field("d")?.parse().map_err(|_| bad("bad d"))?;
    let fb: TriangleInput = field("b")?.parse()?;
    let ftol: f64 = field("tolerance")?.parse().map_err(|_| bad("bad tolerance"))?;
    let count: usize = field("count")?.parse().map_err(|_| bad("bad count"))?;
    let hash = field("sha256")?;
    if (fd, fb, ftol.to_bits()) != (d, b, tol.to_bits()) {
        return Err(bad("parameters do not match"));
    }
    let body = lines.next().unwrap_or("");
    if digest(body) != hash {
        return Err(bad("digest mismatch"));
    }
    let set = body.lines().map(str::parse).collect::<Result<BTreeSet<Bitstring>>>()?;
    if set.len() != count || set.iter().any(|s| s.len() != 3 * d) {
        return Err(bad("count or width mismatch"));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_outcome_against_011_fails_both_checks() {
        let b = TriangleInput::from_index(0b011);
        let r = is_valid(2, b, &Bitstring::zeros(6)).unwrap();
        assert!(!r.prop1_ok && !r.in_support);
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SupportCache::new(dir.path());
        let b = TriangleInput::from_index(0b101);
        let fresh = cache.get(2, b, DEFAULT_SUPPORT_TOL).unwrap();
        let path = cache.path(2, b, DEFAULT_SUPPORT_TOL);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(parse(&text, 2, b, DEFAULT_SUPPORT_TOL).unwrap(), *fresh);
        assert!(parse(&text, 2, TriangleInput::default(), DEFAULT_SUPPORT_TOL).is_err());
        let corrupted = text.replacen("\n0", "\n1", 1);
        assert!(parse(&corrupted, 2, b, DEFAULT_SUPPORT_TOL).is_err());
        std::fs::write(&path, corrupted).unwrap();
        assert_eq!(cache.get(2, b, DEFAULT_SUPPORT_TOL).unwrap(), fresh);
    }

    #[test]
    fn oversized_ring_is_a_resource_error() {
        assert!(matches!(enumerate_support(10, TriangleInput::default()), Err(Error::Resource { .. })));
        assert!(support_with_tol(2, TriangleInput::default(), 0.0).is_err());
    }
}
