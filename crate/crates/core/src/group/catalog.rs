//! Named groups: `cyclic:m`, `elem_abelian:l^r`, `heisenberg:l`, `dihedral:m`,
//! `semidirect_inversion:l^r`, plus the matching Γ-groups.

use std::path::Path;
use std::sync::Arc;

use super::abelian::mixed_radix_digits;
use super::{FiniteGroup, GammaGroup};
use crate::arith;
use crate::error::{CllError, Result};

pub fn cyclic(m: usize) -> FiniteGroup {
    assert!(m >= 1);
    let g = FiniteGroup::from_fn(m, 0, |a, b| (a + b) % m);
    let gens = if m == 1 { vec![] } else { vec![1] };
    g.with_gens(gens).expect("1 generates")
}

/// `(ℤ/l)^r`, elements as little-endian base-`l` digit vectors.
pub fn elem_abelian(l: usize, r: u32) -> FiniteGroup {
    let n = l.pow(r);
    let radices = vec![l as u64; r as usize];
    let g = FiniteGroup::from_fn(n, 0, |a, b| {
        let (da, db) = (mixed_radix_digits(a as u64, &radices), mixed_radix_digits(b as u64, &radices));
        da.iter().zip(&db).rev().fold(0, |acc, (x, y)| acc * l + ((x + y) as usize % l))
    });
    let gens = (0..r).map(|i| l.pow(i)).collect();
    g.with_gens(gens).expect("unit vectors generate")
}

/// Upper unitriangular 3×3 matrices over ℤ/l; index `a + l·b + l²·c` for
/// `(a, b, c)` with product `(a+a', b+b', c+c'+a·b')`.
pub fn heisenberg(l: usize) -> FiniteGroup {
    let split = |x: usize| (x % l, (x / l) % l, x / (l * l));
    let g = FiniteGroup::from_fn(l * l * l, 0, |x, y| {
        let (a, b, c) = split(x);
        let (a2, b2, c2) = split(y);
        ((a + a2) % l) + l * ((b + b2) % l) + l * l * ((c + c2 + a * b2) % l)
    });
    g.with_gens(vec![1, l]).expect("x and y generate")
}

/// Dihedral group of order `2m`: `r^k ↦ k`, `s·r^k ↦ m + k`.
pub fn dihedral(m: usize) -> FiniteGroup {
    let g = FiniteGroup::from_fn(2 * m, 0, |x, y| {
        let (f, k) = (x / m, x % m);
        let (g2, j) = (y / m, y % m);
        let k2 = if g2 == 1 { (m - k) % m } else { k };
        ((f + g2) % 2) * m + (k2 + j) % m
    });
    let gens = if m == 1 { vec![1] } else { vec![1, m] };
    g.with_gens(gens).expect("r and s generate")
}

/// `(ℤ/l)^r` with `ℤ/2` acting by inversion.
pub fn inversion_gamma(l: usize, r: u32) -> GammaGroup {
    let h = elem_abelian(l, r);
    let perm: Vec<u32> = h.elements().map(|x| h.inv(x) as u32).collect();
    GammaGroup::from_generator_action(Arc::new(h), Arc::new(cyclic(2)), &[perm]).expect("inversion is an automorphism")
}

/// Heisenberg group with `ℤ/2` inverting both generators.
pub fn heisenberg_inversion(l: usize) -> GammaGroup {
    let h = heisenberg(l);
    // (a, b, c) = x^a y^b z^(c - ab), so inverting x and y and fixing z = [x, y]
    // sends it to (-a, -b, c).
    let perm: Vec<u32> = h
        .elements()
        .map(|x| {
            let (a, b, c) = (x % l, (x / l) % l, x / (l * l));
            let (na, nb) = ((l - a) % l, (l - b) % l);
            (na + l * nb + l * l * c) as u32
        })
        .collect();
    GammaGroup::from_generator_action(Arc::new(h), Arc::new(cyclic(2)), &[perm]).expect("inversion on generators is an automorphism")
}

pub fn semidirect_inversion(l: usize, r: u32) -> FiniteGroup {
    let sd = inversion_gamma(l, r).semidirect();
    Arc::try_unwrap(sd.group).unwrap_or_else(|a| (*a).clone())
}

fn parse_power(s: &str) -> Result<(usize, u32)> {
    let bad = || CllError::UnknownSpec(s.to_string());
    let (l, r) = s.split_once('^').ok_or_else(bad)?;
    Ok((l.parse().map_err(|_| bad())?, r.parse().map_err(|_| bad())?))
}

fn parse_num(s: &str) -> Result<usize> {
    s.parse().map_err(|_| CllError::UnknownSpec(s.to_string()))
}

/// Resolves a catalog name, or reads a JSON group file if `spec` names a file.
pub fn parse_group(spec: &str) -> Result<FiniteGroup> {
    if let Some((family, arg)) = spec.split_once(':') {
        let g = match family {
            "cyclic" => {
                let m = parse_num(arg)?;
                check_order(m)?;
                cyclic(m)
            }
            "elem_abelian" => {
                let (l, r) = parse_power(arg)?;
                check_prime(l, spec)?;
                check_order(l.pow(r))?;
                elem_abelian(l, r)
            }
            "heisenberg" => {
                let l = parse_num(arg)?;
                check_prime(l, spec)?;
                check_order(l * l * l)?;
                heisenberg(l)
            }
            "dihedral" => {
                let m = parse_num(arg)?;
                if m < 1 {
                    return Err(CllError::UnknownSpec(spec.into()));
                }
                check_order(2 * m)?;
                dihedral(m)
            }
            "semidirect_inversion" => {
                let (l, r) = parse_power(arg)?;
                check_prime(l, spec)?;
                if l == 2 {
                    return Err(CllError::UnknownSpec(spec.into()));
                }
                check_order(2 * l.pow(r))?;
                semidirect_inversion(l, r)
            }
            _ => return Err(CllError::UnknownSpec(spec.into())),
        };
        return Ok(g);
    }
    if Path::new(spec).exists() {
        return super::io::read_group_file(Path::new(spec));
    }
    Err(CllError::UnknownSpec(spec.into()))
}

/// Γ-group specs (Γ = ℤ/2): `inversion:l^r`, `semidirect_inversion:l^r`
/// (its normal part) and `heisenberg_inversion:l`.
pub fn parse_gamma_group(spec: &str) -> Result<GammaGroup> {
    let (family, arg) = spec.split_once(':').ok_or_else(|| CllError::UnknownSpec(spec.into()))?;
    match family {
        "inversion" | "semidirect_inversion" => {
            let (l, r) = parse_power(arg)?;
            check_prime(l, spec)?;
            check_order(2 * l.pow(r))?;
            Ok(inversion_gamma(l, r))
        }
        "heisenberg_inversion" => {
            let l = parse_num(arg)?;
            check_prime(l, spec)?;
            check_order(2 * l * l * l)?;
            Ok(heisenberg_inversion(l))
        }
        _ => Err(CllError::UnknownSpec(spec.into())),
    }
}

fn check_prime(l: usize, spec: &str) -> Result<()> {
    if arith::is_prime(l as u64) {
        Ok(())
    } else {
        Err(CllError::UnknownSpec(format!("{spec}: {l} is not prime")))
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > super::TABLE_CAP {
        Err(CllError::CapExceeded { what: "catalog group", size: n, cap: super::TABLE_CAP })
    } else {
        Ok(())
    }
}

/// Every catalog name whose group has order at most `max_order`.
pub fn names_up_to(max_order: usize) -> Vec<String> {
    let mut out = Vec::new();
    for m in 1..=max_order {
        out.push(format!("cyclic:{m}"));
    }
    for l in (2..=max_order).filter(|&l| arith::is_prime(l as u64)) {
        let mut r = 2;
        while l.pow(r) <= max_order {
            out.push(format!("elem_abelian:{l}^{r}"));
            r += 1;
        }
        if l >= 3 && l * l * l <= max_order {
            out.push(format!("heisenberg:{l}"));
        }
        let mut r = 1;
        while l >= 3 && 2 * l.pow(r) <= max_order {
            out.push(format!("semidirect_inversion:{l}^{r}"));
            r += 1;
        }
    }
    for m in 2..=max_order / 2 {
        out.push(format!("dihedral:{m}"));
    }
    out
}
