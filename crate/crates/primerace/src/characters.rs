//! Reduced residues mod q and the full Dirichlet character group, with
//! exact root-of-unity values and Conrey labels.
//!
//! Character values are stored as exact rational exponents: χ(n) = e(x)
//! with x = exponent(n) ∈ [0, 1) a reduced rational. Products over
//! thousands of zeros then never drift; conversion to `Complex64` happens
//! only at evaluation sites.
//!
//! Conrey's labeling is used throughout: characters mod q are indexed by
//! integers n coprime to q, via discrete logarithms at each prime power
//! factor (generator = least primitive root for odd p^e; the pair (−1, 5)
//! for 2^e with e ≥ 3). This matches the convention of the standard zero
//! databases, so imported zero files interoperate.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use std::f64::consts::TAU;

use crate::{RaceError, Result};

/// Rational exponent x of a root of unity e(x) = exp(2πi x), kept in [0, 1).
pub type Angle = Ratio<i64>;

fn angle_mod_one(a: Angle) -> Angle {
    let f = a.floor();
    a - f
}

/// e(x) = exp(2πi x) as a complex double. Quarter-turn angles come out
/// exact so real characters evaluate to literal ±1.
pub fn unit(a: Angle) -> Complex64 {
    let (n, d) = (*a.numer(), *a.denom());
    match (n.rem_euclid(d), d) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        (n, d) => Complex64::from_polar(1.0, TAU * n as f64 / d as f64),
    }
}

// ---------------------------------------------------------------------------
// Modulus and residue classes
// ---------------------------------------------------------------------------

/// A modulus q ≥ 3 with its factorization and Euler totient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
    factorization: Vec<(u64, u32)>,
    phi: u64,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return Err(RaceError::InvalidModulus(q));
        }
        let factorization = factor(q);
        let phi = factorization
            .iter()
            .map(|&(p, e)| p.pow(e - 1) * (p - 1))
            .product();
        Ok(Modulus { q, factorization, phi })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    /// Reduced residues in [1, q], ascending.
    pub fn reduced_residues(&self) -> Vec<u64> {
        (1..=self.q).filter(|&n| n.gcd(&self.q) == 1).collect()
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut d = vec![1u64];
        for &(p, e) in &self.factorization {
            let mut next = Vec::new();
            let mut pk = 1;
            for _ in 0..=e {
                next.extend(d.iter().map(|&x| x * pk));
                pk *= p;
            }
            d = next;
        }
        d.sort_unstable();
        d
    }
}

pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A reduced residue a mod q, canonical representative in [1, q].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    a: u64,
    q: u64,
}

impl ResidueClass {
    pub fn new(modulus: &Modulus, a: u64) -> Result<Self> {
        let q = modulus.q;
        let mut a = a % q;
        if a == 0 {
            a = q;
        }
        if a.gcd(&q) != 1 {
            return Err(RaceError::InvalidClass { a, q });
        }
        Ok(ResidueClass { a, q })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

/// An ordered tuple of r ≥ 2 distinct reduced residues: the contestants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaceSpec {
    modulus: Modulus,
    classes: Vec<ResidueClass>,
}

impl RaceSpec {
    pub fn new(modulus: Modulus, classes: Vec<u64>) -> Result<Self> {
        if classes.len() < 2 || classes.len() as u64 > modulus.phi() {
            return Err(RaceError::InvalidSpec(format!(
                "need 2 <= r <= phi(q); got r = {}, phi({}) = {}",
                classes.len(),
                modulus.q(),
                modulus.phi()
            )));
        }
        let classes: Vec<ResidueClass> = classes
            .into_iter()
            .map(|a| ResidueClass::new(&modulus, a))
            .collect::<Result<_>>()?;
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                if classes[i] == classes[j] {
                    return Err(RaceError::InvalidSpec(format!(
                        "classes must be pairwise distinct; {} repeats",
                        classes[i].a()
                    )));
                }
            }
        }
        Ok(RaceSpec { modulus, classes })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    pub fn r(&self) -> usize {
        self.classes.len()
    }
}

// ---------------------------------------------------------------------------
// Conrey decomposition of (Z/q)*
// ---------------------------------------------------------------------------

fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb: u128 = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// Modular inverse of a mod m for gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid on (a mod m, m)
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    (t0.rem_euclid(m as i128)) as u64
}

/// Least primitive root of an odd prime power p^e (valid for every power).
fn primitive_root_odd(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = p.pow(e - 1) * (p - 1);
    let factors: Vec<u64> = factor(phi).into_iter().map(|(f, _)| f).collect();
    'outer: for g in 2..pe {
        if g % p == 0 {
            continue;
        }
        for &f in &factors {
            if mod_pow(g, phi / f, pe) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("odd prime power has a primitive root");
}

/// One prime-power factor of the unit group, with tables for Conrey
/// exponent pairing.
#[derive(Debug, Clone)]
enum Component {
    /// Odd p^e: cyclic with generator g; `dlog[n mod p^e]` is the index.
    OddCyclic { pe: u64, order: u64, dlog: Vec<u64> },
    /// 2^2 = 4: order-2 factor generated by −1.
    Four,
    /// 2^e, e ≥ 3: n ≡ (−1)^a 5^b; `sign_dlog[n mod 2^e] = (a, b)`.
    TwoPower { pe: u64, order5: u64, sign_dlog: Vec<(u64, u64)> },
}

impl Component {
    fn build(p: u64, e: u32) -> Option<Component> {
        if p == 2 {
            match e {
                1 => None,
                2 => Some(Component::Four),
                _ => {
                    let pe = 2u64.pow(e);
                    let order5 = pe / 4;
                    let mut sign_dlog = vec![(u64::MAX, u64::MAX); pe as usize];
                    let mut pow5 = 1u64;
                    for b in 0..order5 {
                        sign_dlog[pow5 as usize] = (0, b);
                        sign_dlog[(pe - pow5) as usize] = (1, b);
                        pow5 = pow5 * 5 % pe;
                    }
                    Some(Component::TwoPower { pe, order5, sign_dlog })
                }
            }
        } else {
            let pe = p.pow(e);
            let order = p.pow(e - 1) * (p - 1);
            let g = primitive_root_odd(p, e);
            let mut dlog = vec![u64::MAX; pe as usize];
            let mut x = 1u64;
            for k in 0..order {
                dlog[x as usize] = k;
                x = (x as u128 * g as u128 % pe as u128) as u64;
            }
            Some(Component::OddCyclic { pe, order, dlog })
        }
    }

    /// Conrey exponent pairing: the angle of the component character with
    /// index n evaluated at m.
    fn pair(&self, n: u64, m: u64) -> Angle {
        match self {
            Component::OddCyclic { pe, order, dlog } => {
                let i = dlog[(n % pe) as usize];
                let j = dlog[(m % pe) as usize];
                let num = (i as u128 * j as u128 % *order as u128) as i64;
                Ratio::new(num, *order as i64)
            }
            Component::Four => {
                let a = u64::from(n % 4 == 3);
                let b = u64::from(m % 4 == 3);
                Ratio::new((a * b % 2) as i64, 2)
            }
            Component::TwoPower { pe, order5, sign_dlog } => {
                let (an, bn) = sign_dlog[(n % pe) as usize];
                let (am, bm) = sign_dlog[(m % pe) as usize];
                let sign = Ratio::new((an * am % 2) as i64, 2);
                let num = (bn as u128 * bm as u128 % *order5 as u128) as i64;
                sign + Ratio::new(num, *order5 as i64)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// A Dirichlet character mod q with exact root-of-unity values.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    q: u64,
    conrey_index: u64,
    /// exponents[n-1] = Some(x) with χ(n) = e(x), None if gcd(n, q) > 1.
    exponents: Vec<Option<Angle>>,
    parity: u8,
    conductor: u64,
    primitive: bool,
}

impl DirichletCharacter {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn conrey_index(&self) -> u64 {
        self.conrey_index
    }

    /// 0 if χ(−1) = 1 (even), 1 if χ(−1) = −1 (odd).
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_principal(&self) -> bool {
        self.conrey_index == 1 || self.q == 1
    }

    /// True iff all values are ±1.
    pub fn is_real(&self) -> bool {
        self.exponents
            .iter()
            .flatten()
            .all(|x| *x.denom() == 1 || *x.denom() == 2)
    }

    /// Exact exponent x with χ(n) = e(x), or None off the units.
    pub fn exponent(&self, n: u64) -> Option<Angle> {
        if self.q == 1 {
            return Some(Ratio::new(0, 1));
        }
        let mut m = n % self.q;
        if m == 0 {
            m = self.q;
        }
        self.exponents[(m - 1) as usize]
    }

    /// χ(n): exact root of unity on units, 0 otherwise.
    pub fn eval(&self, n: u64) -> Complex64 {
        match self.exponent(n) {
            Some(x) => unit(x),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Conrey index of the conjugate character χ̄.
    pub fn conjugate_index(&self) -> u64 {
        if self.q == 1 {
            1
        } else {
            mod_inverse(self.conrey_index, self.q)
        }
    }

    /// The distinguished trivial character mod 1 (inducer of principals).
    pub fn trivial() -> DirichletCharacter {
        DirichletCharacter {
            q: 1,
            conrey_index: 1,
            exponents: vec![Some(Ratio::new(0, 1))],
            parity: 0,
            conductor: 1,
            primitive: true,
        }
    }
}

/// All φ(q) Dirichlet characters mod q, indexed by Conrey label.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    modulus: Modulus,
    chars: Vec<DirichletCharacter>,
}

/// build_character_table: the full group via unit-group generators
/// and CRT, exact values, Conrey labels.
pub fn build_character_table(q: u64) -> Result<CharacterTable> {
    let modulus = Modulus::new(q)?;
    Ok(CharacterTable::build(modulus))
}

impl CharacterTable {
    fn build(modulus: Modulus) -> CharacterTable {
        let q = modulus.q();
        let components: Vec<Component> = modulus
            .factorization()
            .iter()
            .filter_map(|&(p, e)| Component::build(p, e))
            .collect();
        let residues = modulus.reduced_residues();
        let divisors = modulus.divisors();

        let chars = residues
            .iter()
            .map(|&n| {
                let mut exponents: Vec<Option<Angle>> = vec![None; q as usize];
                for &m in &residues {
                    let mut x = Ratio::new(0, 1);
                    for c in &components {
                        x += c.pair(n, m);
                    }
                    exponents[(m - 1) as usize] = Some(angle_mod_one(x));
                }
                let parity = u8::from(exponents[(q - 2) as usize].unwrap() != Ratio::new(0, 1));
                let conductor = conductor_of(q, &residues, &exponents, &divisors);
                DirichletCharacter {
                    q,
                    conrey_index: n,
                    exponents,
                    parity,
                    conductor,
                    primitive: conductor == q,
                }
            })
            .collect();

        CharacterTable { modulus, chars }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// All characters, ascending Conrey index. The principal one is first.
    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.chars
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &DirichletCharacter> {
        self.chars.iter().filter(|c| !c.is_principal())
    }

    pub fn principal(&self) -> &DirichletCharacter {
        &self.chars[0]
    }

    pub fn by_conrey_index(&self, n: u64) -> Option<&DirichletCharacter> {
        let mut m = n % self.modulus.q();
        if m == 0 {
            m = self.modulus.q();
        }
        self.chars.iter().find(|c| c.conrey_index == m)
    }
}

/// Smallest divisor d of q such that χ is trivial on {n ≡ 1 mod d}.
fn conductor_of(q: u64, residues: &[u64], exponents: &[Option<Angle>], divisors: &[u64]) -> u64 {
    let zero = Ratio::new(0, 1);
    'div: for &d in divisors {
        for &n in residues {
            if n % d == 1 % d && exponents[(n - 1) as usize] != Some(zero) {
                continue 'div;
            }
        }
        return d;
    }
    q
}

/// conductor_and_inducer: the conductor q* and the primitive
/// character mod q* inducing χ. Principal characters get conductor 1 and
/// the trivial inducer.
pub fn conductor_and_inducer(chi: &DirichletCharacter) -> Result<(u64, DirichletCharacter)> {
    let qs = chi.conductor;
    if qs == 1 {
        return Ok((1, DirichletCharacter::trivial()));
    }
    if chi.primitive {
        return Ok((qs, chi.clone()));
    }
    let sub = build_character_table(qs)?;
    // Match by values: lift each residue m mod q* to one coprime to q.
    let q = chi.q;
    for cand in sub.characters() {
        let agrees = (1..=qs)
            .filter(|&m| m.gcd(&qs) == 1)
            .all(|m| {
                let n = (0..).map(|k| m + k * qs).find(|&n| n.gcd(&q) == 1).unwrap();
                cand.exponent(m) == chi.exponent(n)
            });
        if agrees {
            return Ok((qs, cand.clone()));
        }
    }
    unreachable!("every character is induced by a primitive one mod its conductor");
}

/// c_q(a) = −1 + #{b ∈ [1,q] : b² ≡ a mod q}, by brute-force
/// enumeration (the trivially correct oracle at desk scale).
pub fn c_q(modulus: &Modulus, a: &ResidueClass) -> i64 {
    let q = modulus.q();
    let target = a.a() % q;
    let count = (1..=q)
        .filter(|&b| (b as u128 * b as u128 % q as u128) as u64 == target)
        .count();
    count as i64 - 1
}
