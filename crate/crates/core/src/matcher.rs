//! Matching an offered type against a receiving pattern.
//!
//! Only variables on the pattern side bind; variables in the offered type are
//! rigid. A successful match yields [`Bindings`], a failed one the absorbing
//! [`Bindings::Bottom`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::types::{EvalError, Length, Type};

/// Mints fresh length symbols (`α0`, `β0`, ...). One supply per composition
/// keeps symbol names deterministic.
#[derive(Debug, Clone, Default)]
pub struct FreshSupply {
    next: u32,
}

impl FreshSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mint(&mut self) -> Length {
        let id = self.next;
        self.next += 1;
        Length::Fresh(id)
    }

    pub fn issued(&self) -> u32 {
        self.next
    }
}

/// Variable bindings produced by a match, or `Bottom` when matching failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bindings {
    Bottom,
    Bound {
        types: BTreeMap<String, Type>,
        lengths: BTreeMap<String, Length>,
    },
}

impl Default for Bindings {
    fn default() -> Self {
        Bindings::empty()
    }
}

impl Bindings {
    pub fn empty() -> Self {
        Bindings::Bound {
            types: BTreeMap::new(),
            lengths: BTreeMap::new(),
        }
    }

    pub fn bind_type(name: impl Into<String>, t: Type) -> Self {
        let mut types = BTreeMap::new();
        types.insert(name.into(), t);
        Bindings::Bound {
            types,
            lengths: BTreeMap::new(),
        }
    }

    pub fn bind_length(name: impl Into<String>, l: Length) -> Self {
        let mut lengths = BTreeMap::new();
        lengths.insert(name.into(), l);
        Bindings::Bound {
            types: BTreeMap::new(),
            lengths,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Bindings::Bottom)
    }

    /// No variable was bound (and matching succeeded).
    pub fn is_empty(&self) -> bool {
        match self {
            Bindings::Bottom => false,
            Bindings::Bound { types, lengths } => types.is_empty() && lengths.is_empty(),
        }
    }

    pub fn type_of(&self, name: &str) -> Option<&Type> {
        match self {
            Bindings::Bound { types, .. } => types.get(name),
            Bindings::Bottom => None,
        }
    }

    pub fn length_of(&self, name: &str) -> Option<&Length> {
        match self {
            Bindings::Bound { lengths, .. } => lengths.get(name),
            Bindings::Bottom => None,
        }
    }

    /// Conflict-detecting union. Bottom absorbs; binding a name to two
    /// different values is Bottom. Chains are resolved eagerly.
    pub fn union(self, other: Bindings) -> Bindings {
        let (
            Bindings::Bound {
                mut types,
                mut lengths,
            },
            Bindings::Bound {
                types: more_types,
                lengths: more_lengths,
            },
        ) = (self, other)
        else {
            return Bindings::Bottom;
        };
        for (name, t) in more_types {
            match types.get(&name) {
                Some(existing) if *existing != t => return Bindings::Bottom,
                Some(_) => {}
                None => {
                    types.insert(name, t);
                }
            }
        }
        for (name, l) in more_lengths {
            match lengths.get(&name) {
                Some(existing) if *existing != l => return Bindings::Bottom,
                Some(_) => {}
                None => {
                    lengths.insert(name, l);
                }
            }
        }
        resolve(types, lengths)
    }
}

// Substitutes bound values into each other until no bound name occurs in a
// bound value. A name reachable from its own value is Bottom.
fn resolve(mut types: BTreeMap<String, Type>, mut lengths: BTreeMap<String, Length>) -> Bindings {
    let rounds = types.len() + lengths.len() + 1;
    for _ in 0..rounds {
        let mut changed = false;
        let snapshot_types = types.clone();
        let snapshot_lengths = lengths.clone();
        for value in types.values_mut() {
            let (tv, lv) = value.variables();
            if tv.iter().any(|v| snapshot_types.contains_key(*v))
                || lv.iter().any(|v| snapshot_lengths.contains_key(*v))
            {
                *value = apply(value, &snapshot_types, &snapshot_lengths);
                changed = true;
            }
        }
        for value in lengths.values_mut() {
            let mut lv = Vec::new();
            value.collect_vars(&mut lv);
            if lv.iter().any(|v| snapshot_lengths.contains_key(*v)) {
                *value = value.map_vars(&mut |name| {
                    snapshot_lengths
                        .get(name)
                        .cloned()
                        .unwrap_or_else(|| Length::var(name))
                });
                changed = true;
            }
        }
        if !changed {
            return Bindings::Bound { types, lengths };
        }
    }
    Bindings::Bottom
}

fn apply(t: &Type, types: &BTreeMap<String, Type>, lengths: &BTreeMap<String, Length>) -> Type {
    t.map(
        &mut |name| types.get(name).cloned().unwrap_or_else(|| Type::var(name)),
        &mut |name| lengths.get(name).cloned().unwrap_or_else(|| Length::var(name)),
    )
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bindings::Bottom => write!(f, "⊥"),
            Bindings::Bound { types, lengths } => {
                write!(f, "{{")?;
                let mut first = true;
                for (name, t) in types {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "{name}={t}")?;
                }
                for (name, l) in lengths {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "{name}={l}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl Serialize for Bindings {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Bindings::Bottom => serializer.serialize_str("bottom"),
            Bindings::Bound { types, lengths } => {
                let mut map = serializer.serialize_map(Some(types.len() + lengths.len()))?;
                for (name, t) in types {
                    map.serialize_entry(name, &t.to_string())?;
                }
                for (name, l) in lengths {
                    map.serialize_entry(name, &l.to_string())?;
                }
                map.end()
            }
        }
    }
}

/// Matches `offered` against the receiving `pattern`.
///
/// A coroutine pattern requires a coroutine offer and matches both parts.
/// Any other pattern is matched through its head: the result `D` satisfies
/// `head(pattern)[D] == offered`.
pub fn match_types(offered: &Type, pattern: &Type, fresh: &mut FreshSupply) -> Bindings {
    match pattern {
        Type::Coroutine(_) => match offered {
            Type::Coroutine(_) => structural(offered, pattern, fresh),
            _ => Bindings::Bottom,
        },
        _ => match pattern.head() {
            Some(head) => structural(offered, head, fresh),
            None => Bindings::Bottom,
        },
    }
}

fn structural(offered: &Type, pattern: &Type, fresh: &mut FreshSupply) -> Bindings {
    match (offered, pattern) {
        (Type::Var(a), Type::Var(b)) if a == b => Bindings::empty(),
        (_, Type::Var(name)) => Bindings::bind_type(name.clone(), offered.clone()),
        (Type::Void, Type::Void) => Bindings::empty(),
        (Type::Concrete(a), Type::Concrete(b)) if a == b => Bindings::empty(),
        (Type::Ref(a), Type::Ref(b)) if a == b => Bindings::empty(),
        (Type::Seq(xs), Type::Seq(ps)) | (Type::Tuple(xs), Type::Tuple(ps))
            if xs.len() == ps.len() =>
        {
            xs.iter()
                .zip(ps)
                .fold(Bindings::empty(), |acc, (x, p)| {
                    if acc.is_bottom() {
                        acc
                    } else {
                        acc.union(structural(x, p, fresh))
                    }
                })
        }
        (Type::List(xe, xl), Type::List(pe, pl)) => {
            let elem = structural(xe, pe, fresh);
            if elem.is_bottom() {
                return elem;
            }
            elem.union(unify_length(xl, pl, fresh))
        }
        (Type::Coroutine(x), Type::Coroutine(p)) => {
            let recv = structural(&x.recv, &p.recv, fresh);
            if recv.is_bottom() {
                return recv;
            }
            recv.union(structural(&x.yld, &p.yld, fresh))
        }
        _ => Bindings::Bottom,
    }
}

/// Unifies an offered length with a pattern length. Only a bare length
/// variable in the pattern binds; an offered `*` binds it to a fresh symbol.
pub fn unify_length(offered: &Length, pattern: &Length, fresh: &mut FreshSupply) -> Bindings {
    let offered = offered.eval_lenient();
    match pattern {
        _ if pattern.eval_lenient() == offered => Bindings::empty(),
        Length::Var(name) => {
            let value = if offered == Length::Star {
                fresh.mint()
            } else {
                offered
            };
            Bindings::bind_length(name.clone(), value)
        }
        _ => Bindings::Bottom,
    }
}

/// Applies bindings to every variable in `t`, evaluates the resulting length
/// arithmetic and renormalizes.
pub fn substitute(t: &Type, d: &Bindings) -> Result<Type, EvalError> {
    let Bindings::Bound { types, lengths } = d else {
        // Bottom carries no substitution; callers never pass it.
        return Ok(t.clone());
    };
    let applied = apply(t, types, lengths);
    let mut failure = None;
    let evaluated = applied.map_lengths(&mut |l| match l.eval() {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            l.clone()
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(evaluated.normalize()),
    }
}

/// Evaluates ground `dec`/`min` in a length expression.
pub fn eval_length(l: &Length) -> Result<Length, EvalError> {
    l.eval()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Coroutine;

    fn k(name: &str) -> Type {
        Type::concrete(name)
    }
    fn v(name: &str) -> Type {
        Type::var(name)
    }
    fn tuple(items: Vec<Type>) -> Type {
        Type::Tuple(items)
    }

    #[test]
    fn ground_identity() {
        let mut f = FreshSupply::new();
        assert_eq!(match_types(&k("Int"), &k("Int"), &mut f), Bindings::empty());
        assert!(match_types(&k("Int"), &k("Str"), &mut f).is_bottom());
    }

    #[test]
    fn mem_tuple_binds_elements_and_length() {
        let mut f = FreshSupply::new();
        let offered = tuple(vec![k("String"), Type::list(k("String"), Length::Lit(3))]);
        let pattern = tuple(vec![v("x"), Type::list(v("y"), Length::var("i"))]);
        let d = match_types(&offered, &pattern, &mut f);
        assert_eq!(d.type_of("x"), Some(&k("String")));
        assert_eq!(d.type_of("y"), Some(&k("String")));
        assert_eq!(d.length_of("i"), Some(&Length::Lit(3)));
    }

    #[test]
    fn star_binds_fresh_symbol() {
        let mut f = FreshSupply::new();
        let d = match_types(
            &Type::list(k("String"), Length::Star),
            &Type::list(v("x"), Length::var("i")),
            &mut f,
        );
        assert_eq!(d.type_of("x"), Some(&k("String")));
        assert_eq!(d.length_of("i"), Some(&Length::Fresh(0)));
        // Each star mints a new symbol.
        let d2 = match_types(
            &Type::list(k("String"), Length::Star),
            &Type::list(v("y"), Length::var("j")),
            &mut f,
        );
        assert_eq!(d2.length_of("j"), Some(&Length::Fresh(1)));
    }

    #[test]
    fn nonlinear_pattern_conflict() {
        let mut f = FreshSupply::new();
        let d = match_types(
            &tuple(vec![k("Path"), k("String")]),
            &tuple(vec![v("x"), v("x")]),
            &mut f,
        );
        assert!(d.is_bottom());
        let ok = match_types(
            &tuple(vec![k("Path"), k("Path")]),
            &tuple(vec![v("x"), v("x")]),
            &mut f,
        );
        assert_eq!(ok, Bindings::bind_type("x", k("Path")));
    }

    #[test]
    fn non_coroutine_against_coroutine_pattern() {
        let mut f = FreshSupply::new();
        let pattern = Type::coroutine(v("u"), v("w"));
        assert!(match_types(&k("S"), &pattern, &mut f).is_bottom());
        let d = match_types(&Type::coroutine(k("S"), k("T")), &pattern, &mut f);
        assert_eq!(d.type_of("u"), Some(&k("S")));
        assert_eq!(d.type_of("w"), Some(&k("T")));
    }

    #[test]
    fn coroutine_match_ignores_labels() {
        let mut f = FreshSupply::new();
        let offered = Coroutine::labeled("a", k("S"), k("T")).into_type();
        let pattern = Type::coroutine(k("S"), k("T"));
        assert!(match_types(&offered, &pattern, &mut f).is_empty());
    }

    #[test]
    fn sequence_pattern_matches_its_head() {
        let mut f = FreshSupply::new();
        let pattern = Type::Seq(vec![
            Type::list(v("x"), Length::var("i")),
            Type::list(v("y"), Length::var("j")),
        ]);
        let d = match_types(&Type::list(k("String"), Length::Star), &pattern, &mut f);
        assert_eq!(d.type_of("x"), Some(&k("String")));
        assert!(d.type_of("y").is_none());
    }

    #[test]
    fn void_pattern_never_receives() {
        let mut f = FreshSupply::new();
        assert!(match_types(&k("S"), &Type::Void, &mut f).is_bottom());
    }

    #[test]
    fn one_element_list_is_not_its_element() {
        let mut f = FreshSupply::new();
        let d = match_types(&k("String"), &Type::list(v("y"), Length::var("i")), &mut f);
        assert!(d.is_bottom());
    }

    #[test]
    fn offered_variables_are_rigid() {
        let mut f = FreshSupply::new();
        assert!(match_types(&v("a"), &k("S"), &mut f).is_bottom());
        assert_eq!(
            match_types(&v("a"), &v("b"), &mut f),
            Bindings::bind_type("b", v("a"))
        );
    }

    #[test]
    fn union_rules() {
        let xs = Bindings::bind_type("x", k("S"));
        let yt = Bindings::bind_type("y", k("T"));
        let both = xs.clone().union(yt);
        assert_eq!(both.type_of("x"), Some(&k("S")));
        assert_eq!(both.type_of("y"), Some(&k("T")));
        assert!(xs.clone().union(Bindings::bind_type("x", k("T"))).is_bottom());
        assert_eq!(xs.clone().union(xs.clone()), xs);
        assert!(xs.clone().union(Bindings::Bottom).is_bottom());
        assert!(Bindings::Bottom.union(xs).is_bottom());
    }

    #[test]
    fn union_resolves_chains() {
        let d = Bindings::bind_type("x", v("y")).union(Bindings::bind_type("y", k("S")));
        assert_eq!(d.type_of("x"), Some(&k("S")));
        let cyclic = Bindings::bind_type("x", tuple(vec![v("x"), k("S")]));
        assert!(cyclic.union(Bindings::empty()).is_bottom());
    }

    #[test]
    fn unify_length_cases() {
        let mut f = FreshSupply::new();
        assert_eq!(
            unify_length(&Length::Lit(5), &Length::var("n"), &mut f),
            Bindings::bind_length("n", Length::Lit(5))
        );
        assert_eq!(
            unify_length(&Length::Lit(3), &Length::Lit(3), &mut f),
            Bindings::empty()
        );
        assert!(unify_length(&Length::Lit(3), &Length::Lit(4), &mut f).is_bottom());
        assert!(unify_length(&Length::Star, &Length::Lit(4), &mut f).is_bottom());
        assert!(unify_length(&Length::Lit(4), &Length::Star, &mut f).is_bottom());
        assert!(unify_length(&Length::Fresh(7), &Length::Lit(4), &mut f).is_bottom());
        assert_eq!(
            unify_length(&Length::Star, &Length::Star, &mut f),
            Bindings::empty()
        );
        assert_eq!(
            unify_length(&Length::Star, &Length::var("i"), &mut f),
            Bindings::bind_length("i", Length::Fresh(0))
        );
    }

    #[test]
    fn substitute_evaluates_lengths() {
        let t = tuple(vec![v("x"), Type::list(v("y"), Length::dec(Length::var("i")))]);
        let d = Bindings::bind_type("x", k("String"))
            .union(Bindings::bind_type("y", k("String")))
            .union(Bindings::bind_length("i", Length::Lit(3)));
        assert_eq!(
            substitute(&t, &d),
            Ok(tuple(vec![k("String"), Type::list(k("String"), Length::Lit(2))]))
        );
        assert_eq!(
            substitute(&k("Int"), &Bindings::bind_type("x", k("S"))),
            Ok(k("Int"))
        );
    }

    #[test]
    fn substitute_reaches_nested_coroutines() {
        let t = Type::coroutine(tuple(vec![v("x"), v("x")]), Type::list(k("T"), Length::Star));
        let d = Bindings::bind_type("x", k("Path"));
        assert_eq!(
            substitute(&t, &d),
            Ok(Type::coroutine(
                tuple(vec![k("Path"), k("Path")]),
                Type::list(k("T"), Length::Star)
            ))
        );
    }

    #[test]
    fn substitute_dec_of_zero_fails() {
        let t = Type::list(k("T"), Length::dec(Length::var("i")));
        let d = Bindings::bind_length("i", Length::Lit(0));
        assert!(substitute(&t, &d).is_err());
    }

    #[test]
    fn substitute_to_zero_length_is_void() {
        let t = tuple(vec![v("x"), Type::list(v("y"), Length::dec(Length::var("i")))]);
        let d = Bindings::bind_type("x", k("S"))
            .union(Bindings::bind_type("y", k("S")))
            .union(Bindings::bind_length("i", Length::Lit(1)));
        assert_eq!(substitute(&t, &d), Ok(tuple(vec![k("S"), Type::Void])));
    }
}
