use crate::criteria::permutive_bruteforce;
use crate::error::{Error, Result};
use crate::rule::{interior_map, RuleTable, SeparationClass};
use crate::zmod::{monomial_invert, MonomialMap, Residue};

/// Builds two distinct words of length `2W+1` with the same constant image
/// for a bipermutive LR-separated rule with `l < r`.
///
/// Writing `f = g(x_l) + pi(interior) + h(x_r)` with `a = pi(0..0)`: a seed
/// block `b 0..0 c` (with `g(b) = 1`, `h(c) = -1`) is placed against the
/// all-zero block, then both words are extended rightwards by solving for
/// the `x_r` cell and leftwards by solving for the `x_l` cell so that every
/// window maps to `a`.
pub fn bipermutive_collision(
    rule: &RuleTable,
    class: &SeparationClass,
    window: usize,
) -> Result<(Vec<Residue>, Vec<Residue>)> {
    let (left, right) = class
        .ends()
        .ok_or_else(|| Error::Precondition("rule is not LR-separated".into()))?;
    let (l, r) = (left.position, right.position);
    if l >= r {
        return Err(Error::Precondition("collision needs leftmost < rightmost".into()));
    }
    if !permutive_bruteforce(rule, l) || !permutive_bruteforce(rule, r) {
        return Err(Error::Precondition(
            "rule is not permutive at both extreme positions".into(),
        ));
    }
    let d = rule.diameter();
    let span = r - l;
    if window < span + d {
        return Err(Error::Precondition(format!(
            "window {window} below r - l + d = {}",
            span + d
        )));
    }

    let m = rule.modulus();
    let g = MonomialMap::new(m, left.coefficient, left.exponent as u64)?;
    let h = MonomialMap::new(m, right.coefficient, right.exponent as u64)?;
    let pi = interior_map(rule, class).expect("LR-separated");
    let target = pi.eval(&vec![0; pi.positions.len()]);
    let solve = |map: &MonomialMap, value: Residue| -> Residue {
        let sols = monomial_invert(map, value);
        debug_assert_eq!(sols.len(), 1);
        sols[0]
    };
    let b = solve(&g, 1);
    let c = solve(&h, m.neg(1));

    let len = 2 * window + 1;
    // Window s reads its x_l letter at cell s + l - 1 and its x_r letter at
    // cell s + r - 1; cells outside [lo, hi] are never read.
    let lo = l - 1;
    let hi = len - 1 - d + r - 1;
    let seed = lo + (hi - lo + 1 - (span + 1)) / 2;

    let build = |first: Residue, last: Residue| -> Vec<Residue> {
        let mut y = vec![0 as Residue; len];
        y[seed] = first;
        y[seed + span] = last;
        for i in seed + span + 1..=hi {
            let rest = m.add(pi.eval(&y[i - span + 1..i]), g.apply(y[i - span]));
            y[i] = solve(&h, m.sub(target, rest));
        }
        for i in (lo..seed).rev() {
            let rest = m.add(pi.eval(&y[i + 1..i + span]), h.apply(y[i + span]));
            y[i] = solve(&g, m.sub(target, rest));
        }
        y
    };
    let u = build(b, c);
    let v = build(0, 0);

    let expected = vec![target; len - d];
    if u == v || rule.f_star(&u) != expected || rule.f_star(&v) != expected {
        return Err(Error::Precondition("collision construction failed to verify".into()));
    }
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::decide::decide_injective;
    use crate::rule::{classify, RuleExpression};

    fn rule(src: &str) -> RuleTable {
        RuleExpression::parse(src).unwrap().to_table(&Caps::default()).unwrap()
    }

    fn check(src: &str, w: usize) {
        let r = rule(src);
        let c = classify(&r);
        let (u, v) = bipermutive_collision(&r, &c, w).unwrap();
        assert_eq!(u.len(), 2 * w + 1);
        assert_ne!(u, v);
        let img = r.f_star(&u);
        assert_eq!(img, r.f_star(&v));
        assert!(img.iter().all(|&x| x == img[0]));
        assert!(!decide_injective(&r, &Caps::default()).unwrap().verdict);
    }

    #[test]
    fn linear_examples() {
        check("m=3; d=1; f=x1+x2", 4);
        check("m=5; d=2; f=x1+x2+x3", 5);
    }

    #[test]
    fn nonlinear_with_interior() {
        check("m=5; d=2; f=2*x1^3+x2^2+1+x3", 6);
        check("m=7; d=4; f=x2^5+x3*x4+3*x5", 9);
        check("m=4; d=2; f=3*x1+x2^2+x3", 4);
    }

    #[test]
    fn preconditions() {
        let r = rule("m=4; d=2; f=x1^2+x2+x3^2");
        assert!(matches!(
            bipermutive_collision(&r, &classify(&r), 5),
            Err(Error::Precondition(_))
        ));
        let r = rule("m=3; d=1; f=x1+x2");
        assert!(matches!(
            bipermutive_collision(&r, &classify(&r), 1),
            Err(Error::Precondition(_))
        ));
        let r = rule("m=3; d=1; f=x1");
        assert!(matches!(
            bipermutive_collision(&r, &classify(&r), 4),
            Err(Error::Precondition(_))
        ));
    }
}
