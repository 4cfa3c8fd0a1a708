use std::fs;
use std::path::PathBuf;

use crate::error::Result;

/// Directory used to persist prime sieves between runs.
pub const CACHE_DIR_ENV: &str = "MANIN_D4_CACHE_DIR";

/// All primes `<= limit`, read from (or written to) the cache directory when
/// `MANIN_D4_CACHE_DIR` is set.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    let cache = std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .map(|dir| dir.join(format!("primes_le_{limit}.bin")));
    if let Some(path) = &cache {
        if let Ok(bytes) = fs::read(path) {
            if bytes.len() % 8 == 0 {
                return Ok(bytes
                    .chunks_exact(8)
                    .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                    .collect());
            }
        }
    }
    let primes = sieve(limit);
    if let Some(path) = &cache {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let bytes: Vec<u8> = primes.iter().flat_map(|p| p.to_le_bytes()).collect();
        fs::write(path, bytes)?;
    }
    Ok(primes)
}

fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_counts() {
        assert_eq!(sieve(1), Vec::<u64>::new());
        assert_eq!(sieve(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(sieve(1_000_000).len(), 78_498);
    }
}
