//! Seeded generators for instance families and LPs used by tests, benches
//! and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exactlp::{LinearProgram, Relation};
use crate::model::{int, rat, CostFn, ExtRat, Instance, Label, Language, Rational};
use crate::tuple;

/// Nonempty ring families (sets closed under coordinatewise min and max) of
/// `{0,1}^2`, as tuple ranks `00=0, 01=1, 10=2, 11=3`.
const RING_FAMILIES_2: &[&[usize]] = &[
    &[0],
    &[1],
    &[2],
    &[3],
    &[0, 1],
    &[0, 2],
    &[1, 3],
    &[2, 3],
    &[0, 3],
    &[0, 1, 3],
    &[0, 2, 3],
    &[0, 1, 2, 3],
];

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-6..=12), rng.gen_range(1..=4))
}

/// Random binary submodular function on `{0,1}` whose dom is a ring family.
pub fn submodular_binary<R: Rng>(rng: &mut R, name: &str, p_full: f64) -> CostFn {
    let family: &[usize] = if rng.gen_bool(p_full) {
        &[0, 1, 2, 3]
    } else {
        RING_FAMILIES_2.choose(rng).expect("nonempty")
    };
    let mut vals: Vec<Option<Rational>> = vec![None; 4];
    for &r in family {
        vals[r] = Some(small_rational(rng));
    }
    if let [Some(f00), Some(f01), Some(f10), Some(f11)] = &vals[..] {
        let deficit = (f00 + f11) - (f01 + f10);
        if deficit > Rational::from_integer(0.into()) {
            vals[1] = Some(f01 + deficit);
        }
    }
    CostFn::new(
        name,
        2,
        2,
        vals.into_iter().enumerate().map(|(r, v)| {
            (
                tuple::unrank(r, 2, 2),
                v.map(ExtRat::Finite).unwrap_or(ExtRat::Infinity),
            )
        }),
    )
    .expect("valid table")
}

/// Random unary function on `{0,1}`; every unary function is submodular.
pub fn unary_boolean<R: Rng>(rng: &mut R, name: &str, p_inf: f64) -> CostFn {
    let entries: Vec<(Vec<Label>, ExtRat)> = (0..2)
        .map(|d| {
            let v = if rng.gen_bool(p_inf) {
                ExtRat::Infinity
            } else {
                ExtRat::Finite(small_rational(rng))
            };
            (vec![d], v)
        })
        .collect();
    CostFn::new(name, 1, 2, entries).expect("valid table")
}

/// Boolean instance built from submodular binary and arbitrary unary
/// functions, one fresh function per constraint.
pub fn submodular_instance<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_constraints: usize,
) -> (Language, Instance) {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_constraints);
    let mut lang = Language::new(2).expect("k = 2");
    let mut inst = Instance::new(n);
    for t in 0..m {
        let name = format!("f{t}");
        if n >= 2 && rng.gen_bool(0.6) {
            let f = submodular_binary(rng, &name, 0.6);
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            lang.insert(f).expect("fresh name");
            inst.add(name, vec![a, b]).expect("in range");
        } else {
            let f = unary_boolean(rng, &name, 0.15);
            let a = rng.gen_range(0..n);
            lang.insert(f).expect("fresh name");
            inst.add(name, vec![a]).expect("in range");
        }
    }
    (lang, inst)
}

/// Random function of the given arity with each entry infinite with
/// probability `p_inf`.
pub fn random_function<R: Rng>(
    rng: &mut R,
    name: &str,
    arity: usize,
    k: usize,
    p_inf: f64,
) -> CostFn {
    let entries: Vec<(Vec<Label>, ExtRat)> = tuple::all(k, arity)
        .into_iter()
        .map(|t| {
            let v = if rng.gen_bool(p_inf) {
                ExtRat::Infinity
            } else {
                ExtRat::Finite(small_rational(rng))
            };
            (t, v)
        })
        .collect();
    CostFn::new(name, arity, k, entries).expect("valid table")
}

/// Random instance with unary and binary constraints over domain size `k`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    k: usize,
    max_vars: usize,
    max_constraints: usize,
    p_inf: f64,
) -> (Language, Instance) {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_constraints);
    let mut lang = Language::new(k).expect("k >= 1");
    let mut inst = Instance::new(n);
    for t in 0..m {
        let name = format!("f{t}");
        let arity = if n >= 2 && rng.gen_bool(0.6) { 2 } else { 1 };
        let f = random_function(rng, &name, arity, k, p_inf);
        let scope: Vec<usize> = if arity == 2 {
            let mut vars: Vec<usize> = (0..n).collect();
            vars.shuffle(rng);
            vars.truncate(2);
            vars
        } else {
            vec![rng.gen_range(0..n)]
        };
        lang.insert(f).expect("fresh name");
        inst.add(name, scope).expect("in range");
    }
    (lang, inst)
}

/// Random LP with small integer data; about a third of the rows of each
/// relation, and with probability `p_free` per variable a free variable.
pub fn random_lp<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_rows: usize,
    p_free: f64,
) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let mut lp = LinearProgram::new(n);
    for j in 0..n {
        lp.set_objective(j, int(rng.gen_range(-5..=5)));
        if rng.gen_bool(p_free) {
            lp.set_free(j);
        }
    }
    for _ in 0..m {
        let coeffs: Vec<Rational> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    int(0)
                } else {
                    rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))
                }
            })
            .collect();
        let relation = match rng.gen_range(0..3) {
            0 => Relation::Le,
            1 => Relation::Eq,
            _ => Relation::Ge,
        };
        lp.add_dense_row(&coeffs, relation, int(rng.gen_range(-8..=8)))
            .expect("row length matches");
    }
    lp
}

/// Like [`random_lp`], but every row is satisfied by a random integer point,
/// so the program is feasible.
pub fn random_feasible_lp<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_rows: usize,
    p_free: f64,
) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let mut lp = LinearProgram::new(n);
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        lp.set_objective(j, int(rng.gen_range(-5..=5)));
        if rng.gen_bool(p_free) {
            lp.set_free(j);
            point.push(int(rng.gen_range(-3..=3)));
        } else {
            point.push(int(rng.gen_range(0..=3)));
        }
    }
    for _ in 0..m {
        let coeffs: Vec<Rational> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    int(0)
                } else {
                    rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))
                }
            })
            .collect();
        let at: Rational = coeffs.iter().zip(&point).map(|(a, x)| a * x).sum();
        let slack = int(rng.gen_range(0..=4));
        let (relation, rhs) = match rng.gen_range(0..3) {
            0 => (Relation::Le, at + slack),
            1 => (Relation::Eq, at),
            _ => (Relation::Ge, at - slack),
        };
        lp.add_dense_row(&coeffs, relation, rhs)
            .expect("row length matches");
    }
    lp
}
