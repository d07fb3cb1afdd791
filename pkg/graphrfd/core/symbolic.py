"""
Exact symbolic arithmetic for the dense *-subalgebra of a graph algebra.

Elements are finite linear combinations of monomials s_mu s_nu* with Gaussian
rational coefficients. Products reduce with s_e* s_f = delta_{e,f} p_{s(e)};
normal forms apply relation (4) as a rewrite rule on the special edge of each
regular vertex (the least edge it receives), on the pair of first edges of a
monomial. Nothing here ever rounds.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from graphrfd.core.error_handler import ErrorCode, enhance_error
from graphrfd.core.graph import Cycle, Graph, Path, cycle_entries

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction, "GaussRational"]


@dataclass(frozen=True)
class GaussRational:
    """Exact complex number re + i*im with rational parts."""
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value: Scalar) -> "GaussRational":
        if isinstance(value, GaussRational):
            return value
        return cls(Fraction(value), Fraction(0))

    def __add__(self, other: Scalar) -> "GaussRational":
        other = GaussRational.of(other)
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other: Scalar) -> "GaussRational":
        return self + (-GaussRational.of(other))

    def __mul__(self, other: Scalar) -> "GaussRational":
        other = GaussRational.of(other)
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_json(self) -> List[str]:
        return [str(self.re.numerator), str(self.re.denominator),
                str(self.im.numerator), str(self.im.denominator)]

    @classmethod
    def from_json(cls, data: List[str]) -> "GaussRational":
        re_num, re_den, im_num, im_den = (int(x) for x in data)
        return cls(Fraction(re_num, re_den), Fraction(im_num, im_den))


ONE = GaussRational(Fraction(1))
I_UNIT = GaussRational(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class Monomial:
    """s_mu s_nu*; both paths start at the same vertex."""
    mu: Path
    nu: Path

    def __post_init__(self):
        if self.mu.base != self.nu.base:
            raise ValueError(f"Monomial paths start at different vertices: {self.mu} vs {self.nu}")

    def sort_key(self) -> Tuple:
        return (self.mu.sort_key(), self.nu.sort_key())

    def adjoint(self) -> "Monomial":
        return Monomial(self.nu, self.mu)

    def __str__(self) -> str:
        if self.mu.is_trivial and self.nu.is_trivial:
            return f"p[{self.mu.base}]"
        left = f"s{self.mu}" if not self.mu.is_trivial else ""
        right = f"s{self.nu}*" if not self.nu.is_trivial else ""
        return left + right


class SymElement:
    """Immutable exact linear combination of monomials over one graph."""

    __slots__ = ("graph", "_terms")

    def __init__(self, graph: Graph, terms: Optional[Mapping[Monomial, GaussRational]] = None):
        self.graph = graph
        self._terms: Dict[Monomial, GaussRational] = {
            m: c for m, c in (terms or {}).items() if c
        }

    @property
    def terms(self) -> Dict[Monomial, GaussRational]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, GaussRational]]:
        for m in sorted(self._terms, key=Monomial.sort_key):
            yield m, self._terms[m]

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymElement):
            return NotImplemented
        return self.graph == other.graph and self._terms == other._terms

    __hash__ = None

    def _combine(self, other: "SymElement", sign: int) -> "SymElement":
        if other.graph != self.graph:
            raise enhance_error(ErrorCode.GRAPH_MISMATCH, "Elements live over different graphs")
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, GaussRational()) + c * sign
        return SymElement(self.graph, terms)

    def __add__(self, other: "SymElement") -> "SymElement":
        return self._combine(other, 1)

    def __sub__(self, other: "SymElement") -> "SymElement":
        return self._combine(other, -1)

    def __neg__(self) -> "SymElement":
        return SymElement(self.graph, {m: -c for m, c in self._terms.items()})

    def scale(self, scalar: Scalar) -> "SymElement":
        scalar = GaussRational.of(scalar)
        return SymElement(self.graph, {m: c * scalar for m, c in self._terms.items()})

    def __matmul__(self, other: "SymElement") -> "SymElement":
        return multiply(self, other)

    def __repr__(self) -> str:
        if not self._terms:
            return "SymElement(0)"
        parts = []
        for m, c in self.items():
            coeff = f"{c.re}" if not c.im else f"({c.re}+{c.im}i)"
            parts.append(f"{coeff}*{m}")
        return "SymElement(" + " + ".join(parts) + ")"


def zero(g: Graph) -> SymElement:
    return SymElement(g)


def monomial_element(g: Graph, monomial: Monomial, coeff: Scalar = 1) -> SymElement:
    return SymElement(g, {monomial: GaussRational.of(coeff)})


# ====================================================================
# GENERATORS
# ====================================================================

def gen_vertex(g: Graph, v: str) -> SymElement:
    """The projection p_v."""
    if v not in g.vertex_set:
        raise enhance_error(ErrorCode.UNKNOWN_GENERATOR, f"Unknown vertex '{v}'")
    trivial = Path.trivial(v)
    return monomial_element(g, Monomial(trivial, trivial))


def gen_edge(g: Graph, e: str) -> SymElement:
    """The partial isometry s_e = s_e p_{s(e)}."""
    path = Path.of_edges(g, (e,))
    return monomial_element(g, Monomial(path, Path.trivial(path.base)))


def path_element(g: Graph, path: Path) -> SymElement:
    """s_mu for a path mu; the trivial path gives the vertex projection."""
    return monomial_element(g, Monomial(path, Path.trivial(path.base)))


def adjoint(x: SymElement) -> SymElement:
    """s_mu s_nu* -> s_nu s_mu* with conjugated coefficients."""
    return SymElement(x.graph, {m.adjoint(): c.conjugate() for m, c in x._terms.items()})


# ====================================================================
# PRODUCTS
# ====================================================================

def _monomial_product(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """
    (s_mu s_nu*)(s_sigma s_tau*) as a single monomial, or None when it is zero.

    s_nu* s_sigma cancels the trailing edges of nu against those of sigma; it
    survives only when one path is a suffix of the other.
    """
    nu, sigma = a.nu, b.mu
    if nu.end != sigma.end:
        return None
    if nu.length <= sigma.length:
        k = nu.length
        if k and sigma.edges[-k:] != nu.edges:
            return None
        prefix = Path(sigma.base, sigma.edges[:sigma.length - k], nu.base)
        return Monomial(prefix.then(a.mu), b.nu)
    k = sigma.length
    if k and nu.edges[-k:] != sigma.edges:
        return None
    prefix = Path(nu.base, nu.edges[:nu.length - k], sigma.base)
    return Monomial(a.mu, prefix.then(b.nu))


def multiply(x: SymElement, y: SymElement) -> SymElement:
    """Bilinear product of two elements over the same graph."""
    if x.graph != y.graph:
        raise enhance_error(ErrorCode.GRAPH_MISMATCH, "Elements live over different graphs")
    terms: Dict[Monomial, GaussRational] = {}
    for ma, ca in x._terms.items():
        for mb, cb in y._terms.items():
            product = _monomial_product(ma, mb)
            if product is not None:
                terms[product] = terms.get(product, GaussRational()) + ca * cb
    return SymElement(x.graph, terms)


# ====================================================================
# NORMAL FORM
# ====================================================================

def _rewrite(g: Graph, m: Monomial) -> Optional[List[Tuple[Monomial, int]]]:
    """
    One application of relation (4) to m, if m starts with the special pair.

    s_{f mu'} s_{f nu'}* = s_mu' s_nu'* - sum_{e in r^-1(v), e != f} s_{e mu'} s_{e nu'}*
    where v = r(f) and f is the special edge of v.
    """
    if m.mu.is_trivial or m.nu.is_trivial:
        return None
    f = m.mu.edges[0]
    if m.nu.edges[0] != f:
        return None
    v = g.rng(f)
    if g.special_edge(v) != f:
        return None
    mu_tail = Path(v, m.mu.edges[1:], m.mu.end)
    nu_tail = Path(v, m.nu.edges[1:], m.nu.end)
    replacement = [(Monomial(mu_tail, nu_tail), 1)]
    for e in g.in_edges(v):
        if e != f:
            step = Path(g.src(e), (e,), v)
            replacement.append((Monomial(step.then(mu_tail), step.then(nu_tail)), -1))
    return replacement


def is_normal_monomial(g: Graph, m: Monomial) -> bool:
    return _rewrite(g, m) is None


def normal_form(x: SymElement, rng: Optional[random.Random] = None) -> SymElement:
    """
    Canonical form under the special-edge rewriting system.

    Each rewrite replaces one monomial by a strictly shorter one plus
    irreducible monomials of the same length, so the loop terminates. With
    rng given, the next reducible monomial is picked at random instead of
    in sorted order; the result does not depend on the choice.
    """
    g = x.graph
    terms = dict(x._terms)
    while True:
        reducible = sorted((m for m in terms if not is_normal_monomial(g, m)), key=Monomial.sort_key)
        if not reducible:
            break
        m = rng.choice(reducible) if rng is not None else reducible[0]
        coeff = terms.pop(m)
        for new, sign in _rewrite(g, m):
            updated = terms.get(new, GaussRational()) + coeff * sign
            if updated:
                terms[new] = updated
            else:
                terms.pop(new, None)
    return SymElement(g, terms)


def is_zero(x: SymElement) -> bool:
    return len(normal_form(x)) == 0


# ====================================================================
# BASIS AND OBSTRUCTIONS
# ====================================================================

def paths_up_to(g: Graph, bound: int) -> Dict[str, List[Path]]:
    """Paths of length at most bound, grouped by source vertex, sorted."""
    grouped: Dict[str, List[Path]] = {v: [Path.trivial(v)] for v in g.vertices}
    frontier = [Path.trivial(v) for v in g.vertices]
    for _ in range(bound):
        next_frontier = []
        for path in frontier:
            for eid in g.out_edges(path.end):
                extended = Path(path.base, path.edges + (eid,), g.rng(eid))
                grouped[path.base].append(extended)
                next_frontier.append(extended)
        frontier = next_frontier
    return {v: sorted(paths, key=Path.sort_key) for v, paths in grouped.items()}


def basis_monomials(g: Graph, bound: int) -> List[Monomial]:
    """
    Normal-form monomials s_mu s_nu* with |mu|, |nu| <= bound.

    Monomials whose first edges are both the special edge of their range are
    left out, since the rewriting system eliminates them.
    """
    if bound < 0:
        raise enhance_error(ErrorCode.INVALID_PARAMETER, f"Length bound must be >= 0, got {bound}")
    basis: List[Monomial] = []
    for v, paths in paths_up_to(g, bound).items():
        for mu in paths:
            for nu in paths:
                m = Monomial(mu, nu)
                if is_normal_monomial(g, m):
                    basis.append(m)
    basis.sort(key=Monomial.sort_key)
    return basis


@dataclass(frozen=True)
class Obstruction:
    """Trace identity of a cycle with entries, and the entry term it isolates."""
    cycle: Cycle
    entries: Tuple[str, ...]
    identity: SymElement
    entry_term: SymElement


def trace_obstruction(g: Graph, cycle: Cycle) -> Obstruction:
    """
    sum_i e_i* e_i - sum_i e_i e_i* - sum_f f f* over the edges e_i of a
    cycle and the edges f entering it.

    Adding relations (3) and (4) along the cycle shows the identity is zero;
    any trace therefore vanishes on the entry term sum_f f f*.
    """
    entries = tuple(cycle_entries(g, cycle))
    identity = zero(g)
    for e in cycle.edges:
        s = gen_edge(g, e)
        identity = identity + multiply(adjoint(s), s) - multiply(s, adjoint(s))
    entry_term = zero(g)
    for f in entries:
        s = gen_edge(g, f)
        entry_term = entry_term + multiply(s, adjoint(s))
    return Obstruction(cycle=cycle, entries=entries, identity=identity - entry_term, entry_term=entry_term)


# ====================================================================
# SERIALIZATION
# ====================================================================

def monomial_to_json(m: Monomial) -> Dict[str, Any]:
    return {
        "mu": list(m.mu.edges), "nu": list(m.nu.edges),
        "mu_base": m.mu.base, "nu_base": m.nu.base,
    }


def monomial_from_json(g: Graph, data: Dict[str, Any]) -> Monomial:
    def to_path(edges: List[str], base: str) -> Path:
        return Path.of_edges(g, edges) if edges else Path.trivial(base)
    return Monomial(to_path(data["mu"], data["mu_base"]), to_path(data["nu"], data["nu_base"]))


def element_to_json(x: SymElement) -> List[Dict[str, Any]]:
    return [dict(monomial_to_json(m), coeff=c.to_json()) for m, c in x.items()]


def element_from_json(g: Graph, data: Iterable[Dict[str, Any]]) -> SymElement:
    terms: Dict[Monomial, GaussRational] = {}
    for record in data:
        m = monomial_from_json(g, record)
        terms[m] = terms.get(m, GaussRational()) + GaussRational.from_json(record["coeff"])
    return SymElement(g, terms)
