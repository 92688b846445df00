//! Finite uncertain variables: joint ranges, channels, attributes.
//!
//! An uncertain variable is known only through the set of values it can
//! realize. A [`Relation`] stores the jointly realizable symbol tuples of a
//! family of named variables; every range notion (marginal, conditional)
//! is a projection or a filtered projection of that tuple set. A
//! [`Channel`] maps each source symbol to the set of target symbols
//! co-realizable with it, and an [`AttributeMap`] derives a new variable as
//! a total function of an existing one.
//!
//! All types are immutable after construction; operations are pure and
//! return fresh values, so everything here is safe to share across
//! threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// One symbol of a variable's alphabet.
///
/// Symbols are non-empty strings ordered by lexicographic byte order,
/// which is the tie-break order used everywhere a deterministic choice is
/// needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::input("symbol text must be non-empty"));
        }
        Ok(Symbol(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand used pervasively in tests and internal construction.
pub fn sym(text: &str) -> Symbol {
    Symbol::new(text).expect("non-empty symbol literal")
}

/// An assignment of symbols to a subset of a relation's variables,
/// used as conditioning evidence.
pub type Evidence<'a> = [(&'a str, &'a Symbol)];

/// A finite joint range: an ordered list of variable names, a declared
/// alphabet per variable, and the set of jointly realizable tuples.
///
/// Declared alphabets may strictly contain the realized marginal ranges;
/// every measure works on marginal ranges computed from the tuples, never
/// on declared alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    variables: Vec<String>,
    alphabets: BTreeMap<String, BTreeSet<Symbol>>,
    tuples: BTreeSet<Vec<Symbol>>,
    duplicates_dropped: usize,
}

impl Relation {
    /// Builds a relation, validating every invariant: distinct variable
    /// names, tuples of the right arity lying inside the declared
    /// alphabets, and a non-empty tuple set. Duplicate tuples are dropped
    /// silently and counted in [`Relation::duplicates_dropped`].
    pub fn new(
        variables: Vec<String>,
        alphabets: BTreeMap<String, BTreeSet<Symbol>>,
        tuples: Vec<Vec<Symbol>>,
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::input("a relation needs at least one variable"));
        }
        let mut seen = BTreeSet::new();
        for v in &variables {
            if v.is_empty() {
                return Err(Error::input("variable names must be non-empty"));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::input(format!("duplicate variable name {v:?}")));
            }
        }
        for v in &variables {
            match alphabets.get(v) {
                None => return Err(Error::input(format!("missing alphabet for variable {v:?}"))),
                Some(a) if a.is_empty() => {
                    return Err(Error::input(format!("alphabet of {v:?} is empty")))
                }
                _ => {}
            }
        }
        if let Some(extra) = alphabets.keys().find(|k| !variables.contains(k)) {
            return Err(Error::input(format!(
                "alphabet declared for unknown variable {extra:?}"
            )));
        }
        if tuples.is_empty() {
            return Err(Error::input("a relation needs at least one tuple"));
        }
        let mut set = BTreeSet::new();
        let mut duplicates_dropped = 0usize;
        for t in tuples {
            if t.len() != variables.len() {
                return Err(Error::input(format!(
                    "tuple {t:?} has arity {}, expected {}",
                    t.len(),
                    variables.len()
                )));
            }
            for (v, s) in variables.iter().zip(&t) {
                if !alphabets[v].contains(s) {
                    return Err(Error::input(format!(
                        "tuple symbol {s} is not in the alphabet of {v:?}"
                    )));
                }
            }
            if !set.insert(t) {
                duplicates_dropped += 1;
            }
        }
        Ok(Relation {
            variables,
            alphabets,
            tuples: set,
            duplicates_dropped,
        })
    }

    /// Builds a relation whose declared alphabets are exactly the realized
    /// marginal ranges of the given tuples.
    pub fn from_tuples(variables: &[&str], tuples: Vec<Vec<Symbol>>) -> Result<Self> {
        if tuples.iter().any(|t| t.len() != variables.len()) {
            return Err(Error::input("tuple arity does not match variable count"));
        }
        let mut alphabets: BTreeMap<String, BTreeSet<Symbol>> = variables
            .iter()
            .map(|v| (v.to_string(), BTreeSet::new()))
            .collect();
        for t in &tuples {
            for (v, s) in variables.iter().zip(t) {
                alphabets.get_mut(*v).unwrap().insert(s.clone());
            }
        }
        Relation::new(
            variables.iter().map(|v| v.to_string()).collect(),
            alphabets,
            tuples,
        )
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn alphabet(&self, var: &str) -> Result<&BTreeSet<Symbol>> {
        self.alphabets
            .get(var)
            .ok_or_else(|| Error::input(format!("unknown variable {var:?}")))
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<Symbol>> {
        &self.tuples
    }

    /// How many duplicate tuples were dropped at construction time.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    fn var_index(&self, var: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::input(format!("unknown variable {var:?}")))
    }

    fn indices(&self, vars: &[&str]) -> Result<Vec<usize>> {
        if vars.is_empty() {
            return Err(Error::input("variable selection must be non-empty"));
        }
        let mut seen = BTreeSet::new();
        for v in vars {
            if !seen.insert(*v) {
                return Err(Error::input(format!("variable {v:?} selected twice")));
            }
        }
        vars.iter().map(|v| self.var_index(v)).collect()
    }

    /// Marginal range: the projection of the tuple set onto `vars`,
    /// with coordinates in the order given.
    pub fn marginal(&self, vars: &[&str]) -> Result<BTreeSet<Vec<Symbol>>> {
        let idx = self.indices(vars)?;
        Ok(self
            .tuples
            .iter()
            .map(|t| idx.iter().map(|&i| t[i].clone()).collect())
            .collect())
    }

    /// Marginal range of a single variable, as a plain symbol set.
    pub fn marginal_set(&self, var: &str) -> Result<BTreeSet<Symbol>> {
        let i = self.var_index(var)?;
        Ok(self.tuples.iter().map(|t| t[i].clone()).collect())
    }

    /// Conditional range of `target` given the evidence assignment.
    ///
    /// Evidence that no tuple realizes is an error, not an empty set:
    /// conditional ranges are only defined on realizable evidence.
    pub fn conditional(&self, target: &[&str], given: &Evidence) -> Result<BTreeSet<Vec<Symbol>>> {
        let idx = self.indices(target)?;
        let given_idx: Vec<(usize, &Symbol)> = given
            .iter()
            .map(|(v, s)| Ok((self.var_index(v)?, *s)))
            .collect::<Result<_>>()?;
        let mut out = BTreeSet::new();
        for t in &self.tuples {
            if given_idx.iter().all(|&(i, s)| &t[i] == s) {
                out.insert(idx.iter().map(|&i| t[i].clone()).collect());
            }
        }
        if out.is_empty() {
            let desc: Vec<String> = given.iter().map(|(v, s)| format!("{v}={s}")).collect();
            return Err(Error::evidence(format!(
                "no tuple realizes the assignment {}",
                desc.join(", ")
            )));
        }
        Ok(out)
    }

    /// Single-variable conditional range given a single-variable assignment.
    pub fn conditional_set(
        &self,
        target: &str,
        given_var: &str,
        given: &Symbol,
    ) -> Result<BTreeSet<Symbol>> {
        let set = self.conditional(&[target], &[(given_var, given)])?;
        Ok(set.into_iter().map(|mut t| t.pop().unwrap()).collect())
    }

    /// The non-stochastic channel from `source` to `target`: each realized
    /// source symbol maps to its conditional range.
    pub fn channel(&self, source: &str, target: &str) -> Result<Channel> {
        if source == target {
            return Err(Error::input("channel endpoints must be distinct variables"));
        }
        let mut map = BTreeMap::new();
        for x in self.marginal_set(source)? {
            let image = self.conditional_set(target, source, &x)?;
            map.insert(x, image);
        }
        Channel::new(source, target, map)
    }

    /// True iff the groups `a` and `b` are unrelated: their joint marginal
    /// factors as the product of the two marginals.
    pub fn is_unrelated(&self, a: &[&str], b: &[&str]) -> Result<bool> {
        if a.iter().any(|v| b.contains(v)) {
            return Err(Error::input(
                "unrelatedness requires disjoint variable groups",
            ));
        }
        let joint_vars: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
        let joint = self.marginal(&joint_vars)?;
        let ma = self.marginal(a)?;
        let mb = self.marginal(b)?;
        if joint.len() != ma.len() * mb.len() {
            return Ok(false);
        }
        for ta in &ma {
            for tb in &mb {
                let mut t = ta.clone();
                t.extend(tb.iter().cloned());
                if !joint.contains(&t) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// True iff `a - b - c` forms a Markov uncertainty chain: conditioning
    /// on any realizable (b, c) pair tells no more about `a` than
    /// conditioning on b alone.
    pub fn is_markov(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<bool> {
        for (lhs, rhs) in [(a, b), (a, c), (b, c)] {
            if lhs.iter().any(|v| rhs.contains(v)) {
                return Err(Error::input(
                    "Markov check requires disjoint variable groups",
                ));
            }
        }
        let bc_vars: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
        for bc in self.marginal(&bc_vars)? {
            let full: Vec<(&str, &Symbol)> = bc_vars.iter().copied().zip(bc.iter()).collect();
            let b_only: Vec<(&str, &Symbol)> = full[..b.len()].to_vec();
            if self.conditional(a, &full)? != self.conditional(a, &b_only)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Derives `u_var = g(x_var)` and returns the extended relation over
    /// `(u_var, original variables)`. The result always satisfies
    /// `is_markov(U, X, W)` for every other variable W of the relation.
    pub fn apply_attribute(&self, g: &AttributeMap, x_var: &str, u_var: &str) -> Result<Relation> {
        let xi = self.var_index(x_var)?;
        if self.variables.iter().any(|v| v == u_var) {
            return Err(Error::input(format!(
                "attribute variable {u_var:?} collides with an existing variable"
            )));
        }
        for x in self.marginal_set(x_var)? {
            if g.apply(&x).is_none() {
                return Err(Error::input(format!(
                    "attribute map is undefined on realized symbol {x}"
                )));
            }
        }
        let mut variables = Vec::with_capacity(self.variables.len() + 1);
        variables.push(u_var.to_string());
        variables.extend(self.variables.iter().cloned());
        let mut alphabets = self.alphabets.clone();
        alphabets.insert(u_var.to_string(), g.image());
        let tuples = self
            .tuples
            .iter()
            .map(|t| {
                let mut nt = Vec::with_capacity(t.len() + 1);
                nt.push(g.apply(&t[xi]).unwrap().clone());
                nt.extend(t.iter().cloned());
                nt
            })
            .collect();
        Relation::new(variables, alphabets, tuples)
    }
}

/// A non-stochastic channel: each source symbol maps to the non-empty set
/// of target symbols that can co-occur with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    source_var: String,
    target_var: String,
    map: BTreeMap<Symbol, BTreeSet<Symbol>>,
}

impl Channel {
    pub fn new(
        source_var: impl Into<String>,
        target_var: impl Into<String>,
        map: BTreeMap<Symbol, BTreeSet<Symbol>>,
    ) -> Result<Self> {
        let source_var = source_var.into();
        let target_var = target_var.into();
        if source_var == target_var {
            return Err(Error::input("channel endpoints must be distinct variables"));
        }
        if map.is_empty() {
            return Err(Error::input(
                "channel map must cover at least one source symbol",
            ));
        }
        if let Some((x, _)) = map.iter().find(|(_, ys)| ys.is_empty()) {
            return Err(Error::input(format!(
                "channel image of source symbol {x} is empty"
            )));
        }
        Ok(Channel {
            source_var,
            target_var,
            map,
        })
    }

    pub fn source_var(&self) -> &str {
        &self.source_var
    }

    pub fn target_var(&self) -> &str {
        &self.target_var
    }

    pub fn map(&self) -> &BTreeMap<Symbol, BTreeSet<Symbol>> {
        &self.map
    }

    pub fn image(&self, x: &Symbol) -> Result<&BTreeSet<Symbol>> {
        self.map.get(x).ok_or_else(|| {
            Error::input(format!(
                "channel {}->{} has no image for source symbol {x}",
                self.source_var, self.target_var
            ))
        })
    }

    /// The two-variable relation induced by the channel, restricted to the
    /// given source symbols.
    pub fn relation_over(&self, sources: &BTreeSet<Symbol>) -> Result<Relation> {
        if sources.is_empty() {
            return Err(Error::input("source subset must be non-empty"));
        }
        let mut tuples = Vec::new();
        for x in sources {
            for y in self.image(x)? {
                tuples.push(vec![x.clone(), y.clone()]);
            }
        }
        Relation::from_tuples(&[&self.source_var, &self.target_var], tuples)
    }

    /// The full relation over every source symbol the channel declares.
    pub fn relation(&self) -> Result<Relation> {
        let sources: BTreeSet<Symbol> = self.map.keys().cloned().collect();
        self.relation_over(&sources)
    }
}

/// Chains a single-variable base range through one or more channels,
/// realizing a Markov uncertainty chain: every path
/// `(x, y1, ..., yk)` with each step in the corresponding channel image
/// becomes one tuple. Adjacent-triple Markov checks hold on the result by
/// construction.
pub fn compose_markov(base: &Relation, channels: &[&Channel]) -> Result<Relation> {
    if base.variables().len() != 1 {
        return Err(Error::input(
            "compose_markov expects a single-variable base relation",
        ));
    }
    if channels.is_empty() {
        return Err(Error::input("compose_markov needs at least one channel"));
    }
    let mut names: Vec<String> = vec![base.variables()[0].clone()];
    for ch in channels {
        if ch.source_var() != names.last().unwrap() {
            return Err(Error::input(format!(
                "channel {}->{} does not chain from {}",
                ch.source_var(),
                ch.target_var(),
                names.last().unwrap()
            )));
        }
        if names.iter().any(|n| n == ch.target_var()) {
            return Err(Error::input(format!(
                "variable {} repeats along the chain",
                ch.target_var()
            )));
        }
        names.push(ch.target_var().to_string());
    }

    let mut rows: Vec<Vec<Symbol>> = base.tuples().iter().cloned().collect();
    for ch in channels {
        let mut next = Vec::new();
        for row in &rows {
            let image = ch.image(row.last().unwrap())?;
            for y in image {
                let mut nr = row.clone();
                nr.push(y.clone());
                next.push(nr);
            }
        }
        rows = next;
    }

    let mut alphabets: BTreeMap<String, BTreeSet<Symbol>> = BTreeMap::new();
    alphabets.insert(names[0].clone(), base.alphabet(&names[0])?.clone());
    for ch in channels {
        let targets: BTreeSet<Symbol> = ch.map().values().flatten().cloned().collect();
        alphabets.insert(ch.target_var().to_string(), targets);
    }
    Relation::new(names, alphabets, rows)
}

/// A total function on a marginal range, inducing the derived variable
/// `U = g(X)`. Canonically a labeling of the domain; the fibers of the
/// labeling are what every leakage quantity actually depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeMap {
    map: BTreeMap<Symbol, Symbol>,
}

impl AttributeMap {
    pub fn new(map: BTreeMap<Symbol, Symbol>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::input("attribute map must have a non-empty domain"));
        }
        Ok(AttributeMap { map })
    }

    /// Identity attribute on the given domain.
    pub fn identity(domain: &BTreeSet<Symbol>) -> Result<Self> {
        AttributeMap::new(domain.iter().map(|s| (s.clone(), s.clone())).collect())
    }

    /// Constant attribute sending the whole domain to `value`.
    pub fn constant(domain: &BTreeSet<Symbol>, value: Symbol) -> Result<Self> {
        AttributeMap::new(domain.iter().map(|s| (s.clone(), value.clone())).collect())
    }

    pub fn domain(&self) -> BTreeSet<Symbol> {
        self.map.keys().cloned().collect()
    }

    pub fn image(&self) -> BTreeSet<Symbol> {
        self.map.values().cloned().collect()
    }

    pub fn apply(&self, x: &Symbol) -> Option<&Symbol> {
        self.map.get(x)
    }

    pub fn entries(&self) -> &BTreeMap<Symbol, Symbol> {
        &self.map
    }

    /// The fiber partition of the domain: one block per image symbol.
    pub fn fibers(&self) -> Vec<BTreeSet<Symbol>> {
        let mut by_image: BTreeMap<&Symbol, BTreeSet<Symbol>> = BTreeMap::new();
        for (x, u) in &self.map {
            by_image.entry(u).or_default().insert(x.clone());
        }
        by_image.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rel(pairs: &[(&str, &str)]) -> Relation {
        let tuples = pairs.iter().map(|(x, y)| vec![sym(x), sym(y)]).collect();
        Relation::from_tuples(&["X", "Y"], tuples).unwrap()
    }

    fn reference_instance() -> Relation {
        rel(&[("x1", "y1"), ("x2", "y1"), ("x3", "y2")])
    }

    fn rel2() -> Relation {
        rel(&[("x1", "y1"), ("x2", "y1"), ("x2", "y2"), ("x3", "y2")])
    }

    fn syms(names: &[&str]) -> BTreeSet<Symbol> {
        names.iter().map(|s| sym(s)).collect()
    }

    #[test]
    fn marginals_project_tuples() {
        let r = reference_instance();
        assert_eq!(r.marginal_set("X").unwrap(), syms(&["x1", "x2", "x3"]));
        assert_eq!(r.marginal_set("Y").unwrap(), syms(&["y1", "y2"]));
    }

    #[test]
    fn marginal_of_single_tuple_is_singleton() {
        let r = rel(&[("a", "b")]);
        assert_eq!(r.marginal(&["X", "Y"]).unwrap().len(), 1);
        assert_eq!(r.marginal_set("X").unwrap(), syms(&["a"]));
    }

    #[test]
    fn marginal_unknown_variable_is_input_error() {
        let r = reference_instance();
        assert!(matches!(r.marginal(&["Z"]), Err(Error::Input(_))));
    }

    #[test]
    fn conditional_ranges_follow_definition() {
        let r = reference_instance();
        assert_eq!(
            r.conditional_set("X", "Y", &sym("y1")).unwrap(),
            syms(&["x1", "x2"])
        );
        assert_eq!(
            r.conditional_set("X", "Y", &sym("y2")).unwrap(),
            syms(&["x3"])
        );
    }

    #[test]
    fn conditioning_on_self_gives_singleton() {
        let r = reference_instance();
        assert_eq!(
            r.conditional_set("X", "X", &sym("x2")).unwrap(),
            syms(&["x2"])
        );
    }

    #[test]
    fn unrealizable_evidence_is_an_error() {
        let r = reference_instance();
        let err = r.conditional_set("X", "Y", &sym("y9")).unwrap_err();
        assert!(matches!(err, Error::IncompatibleEvidence(_)));
    }

    #[test]
    fn channel_from_relation_matches_conditionals() {
        let ch = reference_instance().channel("X", "Y").unwrap();
        assert_eq!(ch.image(&sym("x1")).unwrap(), &syms(&["y1"]));
        assert_eq!(ch.image(&sym("x2")).unwrap(), &syms(&["y1"]));
        assert_eq!(ch.image(&sym("x3")).unwrap(), &syms(&["y2"]));

        let ch2 = rel2().channel("X", "Y").unwrap();
        assert_eq!(ch2.image(&sym("x2")).unwrap(), &syms(&["y1", "y2"]));
    }

    #[test]
    fn full_product_channel_maps_everything_everywhere() {
        let r = rel(&[("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")]);
        let ch = r.channel("X", "Y").unwrap();
        for x in ["x1", "x2"] {
            assert_eq!(ch.image(&sym(x)).unwrap(), &syms(&["y1", "y2"]));
        }
    }

    #[test]
    fn unrelatedness_detects_products_and_rejects_others() {
        let product = rel(&[("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")]);
        assert!(product.is_unrelated(&["X"], &["Y"]).unwrap());
        assert!(product.is_unrelated(&["Y"], &["X"]).unwrap());
        assert!(!reference_instance().is_unrelated(&["X"], &["Y"]).unwrap());
        assert!(!rel2().is_unrelated(&["X"], &["Y"]).unwrap());
    }

    #[test]
    fn markov_definition_check() {
        let t = Relation::from_tuples(
            &["X", "Y", "Z"],
            vec![
                vec![sym("x1"), sym("y1"), sym("z1")],
                vec![sym("x2"), sym("y1"), sym("z2")],
            ],
        )
        .unwrap();
        assert!(!t.is_markov(&["X"], &["Y"], &["Z"]).unwrap());
        assert!(!t.is_markov(&["Z"], &["Y"], &["X"]).unwrap());
    }

    #[test]
    fn compose_single_path() {
        let base = Relation::from_tuples(&["X"], vec![vec![sym("x1")]]).unwrap();
        let k1 = Channel::new("X", "Y", [(sym("x1"), syms(&["y1"]))].into()).unwrap();
        let k2 = Channel::new("Y", "Z", [(sym("y1"), syms(&["z1"]))].into()).unwrap();
        let r = compose_markov(&base, &[&k1, &k2]).unwrap();
        assert_eq!(r.tuples().len(), 1);
        assert!(r.tuples().contains(&vec![sym("x1"), sym("y1"), sym("z1")]));
    }

    #[test]
    fn compose_enumerates_all_paths_and_is_markov() {
        let base = Relation::from_tuples(&["X"], vec![vec![sym("x1")], vec![sym("x2")]]).unwrap();
        let k1 = Channel::new(
            "X",
            "Y",
            [(sym("x1"), syms(&["y1"])), (sym("x2"), syms(&["y1", "y2"]))].into(),
        )
        .unwrap();
        let k2 = Channel::new(
            "Y",
            "Z",
            [(sym("y1"), syms(&["z1"])), (sym("y2"), syms(&["z1", "z2"]))].into(),
        )
        .unwrap();
        let r = compose_markov(&base, &[&k1, &k2]).unwrap();
        let expect: BTreeSet<Vec<Symbol>> = [
            vec![sym("x1"), sym("y1"), sym("z1")],
            vec![sym("x2"), sym("y1"), sym("z1")],
            vec![sym("x2"), sym("y2"), sym("z1")],
            vec![sym("x2"), sym("y2"), sym("z2")],
        ]
        .into_iter()
        .collect();
        assert_eq!(r.tuples(), &expect);
        assert!(r.is_markov(&["X"], &["Y"], &["Z"]).unwrap());

        // restriction to (X, Y) reproduces exactly the first channel
        let xy = r.marginal(&["X", "Y"]).unwrap();
        let from_channel: BTreeSet<Vec<Symbol>> = k1
            .map()
            .iter()
            .flat_map(|(x, ys)| ys.iter().map(move |y| vec![x.clone(), y.clone()]))
            .collect();
        assert_eq!(xy, from_channel);
    }

    #[test]
    fn compose_missing_source_symbol_is_input_error() {
        let base = Relation::from_tuples(&["X"], vec![vec![sym("x1")], vec![sym("x2")]]).unwrap();
        let k1 = Channel::new("X", "Y", [(sym("x1"), syms(&["y1"]))].into()).unwrap();
        assert!(matches!(
            compose_markov(&base, &[&k1]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn attribute_identity_and_constant() {
        let r = reference_instance();
        let dom = r.marginal_set("X").unwrap();

        let id = AttributeMap::identity(&dom).unwrap();
        let ru = r.apply_attribute(&id, "X", "U").unwrap();
        assert_eq!(ru.marginal_set("U").unwrap(), dom);
        for t in ru.tuples() {
            assert_eq!(t[0], t[1]);
        }

        let c = AttributeMap::constant(&dom, sym("u0")).unwrap();
        let rc = r.apply_attribute(&c, "X", "U").unwrap();
        assert_eq!(rc.marginal_set("U").unwrap(), syms(&["u0"]));
        for y in rc.marginal_set("Y").unwrap() {
            assert_eq!(rc.conditional_set("U", "Y", &y).unwrap(), syms(&["u0"]));
        }
    }

    #[test]
    fn attribute_is_markov_and_preserves_other_marginals() {
        let r = rel2();
        let dom = r.marginal_set("X").unwrap();
        let g = AttributeMap::new(
            [
                (sym("x1"), sym("u0")),
                (sym("x2"), sym("u0")),
                (sym("x3"), sym("u1")),
            ]
            .into(),
        )
        .unwrap();
        let ru = r.apply_attribute(&g, "X", "U").unwrap();
        assert!(ru.is_markov(&["U"], &["X"], &["Y"]).unwrap());
        assert_eq!(ru.marginal_set("X").unwrap(), dom);
        assert_eq!(ru.marginal_set("Y").unwrap(), r.marginal_set("Y").unwrap());
    }

    #[test]
    fn attribute_undefined_symbol_is_input_error() {
        let r = reference_instance();
        let g = AttributeMap::new([(sym("x1"), sym("u0"))].into()).unwrap();
        assert!(matches!(
            r.apply_attribute(&g, "X", "U"),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn duplicate_tuples_are_dropped_with_a_count() {
        let r = Relation::from_tuples(
            &["X", "Y"],
            vec![
                vec![sym("a"), sym("b")],
                vec![sym("a"), sym("b")],
                vec![sym("c"), sym("b")],
            ],
        )
        .unwrap();
        assert_eq!(r.tuples().len(), 2);
        assert_eq!(r.duplicates_dropped(), 1);
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(Relation::from_tuples(&["X", "X"], vec![vec![sym("a"), sym("b")]]).is_err());
        assert!(Relation::from_tuples(&["X"], vec![]).is_err());
        assert!(Symbol::new("").is_err());
        let mut alph = BTreeMap::new();
        alph.insert("X".to_string(), syms(&["a"]));
        // tuple symbol outside declared alphabet
        assert!(Relation::new(vec!["X".to_string()], alph, vec![vec![sym("zz")]]).is_err());
    }
}
