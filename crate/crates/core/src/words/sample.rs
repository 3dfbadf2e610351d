use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nielsen::FrequencyWindow;
use super::{Alphabet, GroupWord, Letter};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rational::Rational;

/// Independent stream `stream` of the generator seeded by `seed`; the
/// batch samplers use one stream per sample so results do not depend on
/// thread scheduling.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniformly random reduced word of length `n`.
pub fn sample_reduced<R: Rng + ?Sized>(n: usize, r: u32, rng: &mut R) -> GroupWord {
    let size = 2 * r as usize;
    let mut out: Vec<Letter> = Vec::with_capacity(n);
    for _ in 0..n {
        let l = match out.last() {
            None => Letter::from_index(rng.gen_range(0..size)),
            Some(prev) => {
                let banned = prev.inverse().index();
                let mut i = rng.gen_range(0..size - 1);
                if i >= banned {
                    i += 1;
                }
                Letter::from_index(i)
            }
        };
        out.push(l);
    }
    GroupWord::reduce(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub samples: usize,
    pub length: usize,
    /// Samples whose every letter frequency is within the tolerance.
    pub within: usize,
    pub fraction: f64,
    pub max_deviation: f64,
}

/// Letter frequencies of `samples` random reduced words of length `n`.
pub fn letter_frequency_report(
    r: u32,
    n: usize,
    samples: usize,
    tol: &Rational,
    seed: u64,
    exec: Exec,
) -> Result<FrequencyReport> {
    let size = Alphabet::new(r)?.size();
    if n == 0 || samples == 0 {
        return Err(Error::Precondition("need positive length and sample count".into()));
    }
    let s = BigInt::from(size);
    let nn = BigInt::from(n);
    let per: Vec<(bool, f64)> = par::map_range(exec, 0..samples, |i| {
        let w = sample_reduced(n, r, &mut sample_rng(seed, i as u64));
        let mut counts = vec![0usize; size];
        for l in w.letters() {
            counts[l.index()] += 1;
        }
        let mut ok = true;
        let mut dev = 0.0f64;
        for &c in &counts {
            // |c/n - 1/s| < tol  <=>  |s c - n| < s n tol
            let lhs = Rational::from_integer((&s * BigInt::from(c) - &nn).magnitude().clone().into());
            ok &= lhs < Rational::from_integer(&s * &nn) * tol;
            dev = dev.max((c as f64 / n as f64 - 1.0 / size as f64).abs());
        }
        (ok, dev)
    });
    let within = per.iter().filter(|p| p.0).count();
    Ok(FrequencyReport {
        samples,
        length: n,
        within,
        fraction: within as f64 / samples as f64,
        max_deviation: per.iter().map(|p| p.1).fold(0.0, f64::max),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub l: usize,
    /// Pass fraction of the window test at lengths `l` and `2l`.
    pub pass_at_l: f64,
    pub pass_at_2l: f64,
    pub history: Vec<(usize, f64, f64)>,
}

/// Doubles `l` from `start` until the pass fraction at lengths `l` and
/// `2l` differs by less than one percent and is positive.
pub fn calibrate_l(
    r: u32,
    epsilon: &Rational,
    samples: usize,
    seed: u64,
    start: usize,
    max_l: usize,
    exec: Exec,
) -> Result<Calibration> {
    FrequencyWindow::new(r, epsilon)?;
    if samples == 0 || start == 0 {
        return Err(Error::Precondition("need positive sample count and start length".into()));
    }
    let mut l = start;
    let mut history = Vec::new();
    while l <= max_l {
        let res: Vec<(bool, bool)> = par::map_range(exec, 0..samples, |i| {
            let w = sample_reduced(2 * l, r, &mut sample_rng(seed ^ l as u64, i as u64));
            let mut win = FrequencyWindow::new(r, epsilon).expect("validated above");
            let mut at_l = false;
            for (k, &x) in w.letters().iter().enumerate() {
                win.push(x);
                if k + 1 >= l {
                    let ok = win.in_window();
                    if k + 1 == l {
                        at_l = ok;
                    }
                    if !ok {
                        return (at_l, false);
                    }
                }
            }
            (at_l, true)
        });
        let f_l = res.iter().filter(|x| x.0).count() as f64 / samples as f64;
        let f_2l = res.iter().filter(|x| x.1).count() as f64 / samples as f64;
        history.push((l, f_l, f_2l));
        if f_2l > 0.0 && f_l - f_2l < 0.01 {
            return Ok(Calibration { l, pass_at_l: f_l, pass_at_2l: f_2l, history });
        }
        l *= 2;
    }
    Err(Error::Budget(format!("no stable window start up to l = {max_l}")))
}
