use num_bigint::BigUint;

/// Cantor pairing: `(i + j)(i + j + 1)/2 + j`.
pub fn code_pair(i: u64, j: u64) -> u64 {
    let s = i + j;
    s * (s + 1) / 2 + j
}

pub fn decode_pair(m: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= m.
    let mut s = (((8.0 * m as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while s * (s + 1) / 2 > m {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= m {
        s += 1;
    }
    let j = m - s * (s + 1) / 2;
    (s - j, j)
}

/// Primes `p_0 = 2, p_1 = 3, ...` and the arity function `a`, memoised.
///
/// `a(0) = 3` and `a(x + 1) = max(a(x) + 1, floor(p_i a(x) / p_i') + 1)` where `x`
/// codes `<i, _>` and `x + 1` codes `<i', _>`: the least increasing function with
/// `p_i a(x)` increasing along the enumeration of pairs.
#[derive(Debug, Clone, Default)]
pub struct ArityFunction {
    primes: Vec<u64>,
    values: Vec<BigUint>,
}

impl ArityFunction {
    pub fn new() -> Self {
        ArityFunction::default()
    }

    pub fn prime(&mut self, n: usize) -> u64 {
        while self.primes.len() <= n {
            let mut c = self.primes.last().map_or(2, |p| p + 1);
            while self
                .primes
                .iter()
                .take_while(|p| *p * *p <= c)
                .any(|p| c.is_multiple_of(*p))
            {
                c += 1;
            }
            self.primes.push(c);
        }
        self.primes[n]
    }

    /// The prime indexed by the first coordinate of the pair coded by `x`.
    pub fn prime_of(&mut self, x: u64) -> u64 {
        let (i, _) = decode_pair(x);
        self.prime(i as usize)
    }

    pub fn a(&mut self, x: u64) -> BigUint {
        if self.values.is_empty() {
            self.values.push(BigUint::from(3u32));
        }
        while (self.values.len() as u64) <= x {
            let y = self.values.len() as u64 - 1;
            let prev = self.values[y as usize].clone();
            let (pa, pb) = (self.prime_of(y), self.prime_of(y + 1));
            let step = &prev * pa / pb + 1u32;
            let next = std::cmp::max(prev + 1u32, step);
            self.values.push(next);
        }
        self.values[x as usize].clone()
    }

    /// `l_m = p_n a(m)` for `m` coding `<n, _>`: the largest arity of layer `m`.
    pub fn layer_bound(&mut self, m: u64) -> BigUint {
        let p = self.prime_of(m);
        self.a(m) * p
    }
}

/// The `n`-th prime, `p_0 = 2`.
pub fn prime(n: usize) -> u64 {
    ArityFunction::new().prime(n)
}

pub fn arity_a(x: u64) -> BigUint {
    ArityFunction::new().a(x)
}

pub fn layer_bound(m: u64) -> BigUint {
    ArityFunction::new().layer_bound(m)
}

pub(crate) fn small(b: &BigUint) -> Option<u64> {
    match b.to_u64_digits().as_slice() {
        [] => Some(0),
        [d] => Some(*d),
        _ => None,
    }
}
