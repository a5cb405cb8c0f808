"""Prolongation, sampling and specialization of a model into a polynomial system over F_p."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

import numpy as np

from .calculus import JetPolynomial, JetUniverse, JetVar, total_derivative
from .groebner.field import DEFAULT_PRIME, check_prime, inv_mod
from .model import Model, ModelError, jet_name
from .polysys import PolySystem

SAMPLE_LOW, SAMPLE_HIGH = 1, 2**20
RETRY_BUDGET = 32
ZAUX = "z_aux"


class SamplingError(RuntimeError):
    """The retry budget was exhausted; some denominator vanishes structurally."""


# ---------------------------------------------------------------------------
# prolongation


@dataclass
class ProlongedSystem:
    """Denominator-cleared jet equations of a model.

    ``equations`` interleave output equations ``delta^k(H_j y_j - G_j)`` with
    the state equations ``delta^(k-1)(D_i x_i' - N_i)`` they require.
    """

    model: Model
    universe: JetUniverse
    equations: list[JetPolynomial]
    orders: dict[int, int]
    state_orders: dict[str, int]
    zaux: JetPolynomial | None = None
    labels: list[str] = field(default_factory=list)


def _model_to_jet(m: Model, universe: JetUniverse):
    """Map generators of the model's fraction field to order-0 jets / parameters."""
    ring = universe.ring
    images = []
    for sym in m.field.symbols:
        name = sym.name
        if name in m.states:
            images.append(universe.jet(name, 0))
        elif name in m.params:
            images.append(universe.gen(name))
        else:
            base = name.rstrip("'")
            order = len(name) - len(base)
            images.append(universe.jet(base, order) if universe.has_jet(base, order) else ring.zero)
    return images


def _poly_to_jet(poly, images, ring):
    out = ring.zero
    for monom, coeff in poly.terms():
        term = ring(coeff)
        for g, e in zip(images, monom):
            if e:
                term *= g**e
        out += term
    return out


def prolong(m: Model, bound: Mapping[int, int] | Sequence[int] | int) -> ProlongedSystem:
    """Differentiate output equation ``j`` ``bound[j]`` times and close over the state equations."""
    if isinstance(bound, int):
        bound = {j: bound for j in range(len(m.outputs))}
    elif not isinstance(bound, Mapping):
        bound = dict(enumerate(bound))
    orders = {j: int(bound.get(j, 0)) for j in range(len(m.outputs))}
    if any(b < 0 for b in orders.values()):
        raise ValueError("prolongation bounds must be non-negative")
    top = max(orders.values(), default=0)
    K = top + 1
    jets = [JetVar(x, k, "state") for k in range(K + 1) for x in m.states]
    jets += [JetVar(y, k, "output") for k in range(K + 1) for y in m.output_names]
    jets += [JetVar(u, k, "input") for k in range(K + m.input_order_cap + 2) for u in m.inputs]
    denoms = m.denominators()
    aux = (ZAUX,) if denoms else ()
    universe = JetUniverse(jets, m.params, aux)
    ring = universe.ring
    images = _model_to_jet(m, universe)

    base_x = {}
    for x in m.states:
        f = m.odes[x]
        num = _poly_to_jet(f.numerator, images, ring)
        den = _poly_to_jet(f.denominator, images, ring)
        base_x[x] = JetPolynomial(universe, den * universe.jet(x, 1) - num)
    base_y = []
    for j, (y, g) in enumerate(m.outputs):
        num = _poly_to_jet(g.numerator, images, ring)
        den = _poly_to_jet(g.denominator, images, ring)
        base_y.append(JetPolynomial(universe, den * universe.jet(y, 0) - num))

    # derivative towers, computed lazily
    x_tower: dict[str, list[JetPolynomial]] = {x: [base_x[x]] for x in m.states}

    def x_eq(x, k):  # equation defining x^(k), k >= 1
        tower = x_tower[x]
        while len(tower) < k:
            tower.append(total_derivative(tower[-1]))
        return tower[k - 1]

    y_eqs: dict[tuple[int, int], JetPolynomial] = {}
    for j in range(len(m.outputs)):
        cur = base_y[j]
        y_eqs[(j, 0)] = cur
        for k in range(1, orders[j] + 1):
            cur = total_derivative(cur)
            y_eqs[(j, k)] = cur

    needed: set[tuple[str, int]] = set()
    state_set = set(m.states)

    def collect(eq: JetPolynomial):
        for jv in eq.jets():
            if jv.base in state_set and jv.order >= 1:
                needed.add((jv.base, jv.order))

    for eq in y_eqs.values():
        collect(eq)
    added: set[tuple[str, int]] = set()
    while needed - added:
        for x, k in sorted(needed - added, key=lambda t: (t[1], m.states.index(t[0]))):
            added.add((x, k))
            collect(x_eq(x, k))

    equations, labels = [], []
    max_order = max([k for _, k in added] + [top])
    for k in range(max_order + 1):
        for j in range(len(m.outputs)):
            if (j, k) in y_eqs:
                equations.append(y_eqs[(j, k)])
                labels.append(f"{m.output_names[j]}^({k})")
        for x in m.states:
            if (x, k + 1) in added:
                equations.append(x_eq(x, k + 1))
                labels.append(f"{x}^({k + 1})")
    zaux_eq = None
    if denoms:
        prod = ring.one
        for d in denoms:
            prod *= _poly_to_jet(d, images, ring)
        zaux_eq = JetPolynomial(universe, universe.gen(ZAUX) * prod - 1)
        equations.append(zaux_eq)
        labels.append(ZAUX)
    state_orders = {x: max([k for (b, k) in added if b == x], default=0) for x in m.states}
    return ProlongedSystem(m, universe, equations, orders, state_orders, zaux_eq, labels)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class Sample:
    """Integer values for initial states, parameters and input jets."""

    values: Mapping[str, int]
    prime: int
    seed: int | None
    inputs: Mapping[tuple[str, int], int] = field(default_factory=dict)

    def __getitem__(self, name: str) -> int:
        return self.values[name]


def _denominators_ok(m: Model, values: Mapping[str, int], inputs, p: int) -> bool:
    point = dict(values)
    for (u, k), v in inputs.items():
        point[jet_name(u, k)] = v
    exprs = list(m.odes.values()) + [g for _, g in m.outputs]
    for e in exprs:
        if e.denominator.is_ground:
            continue
        names = e.names
        den = Fraction(0)
        for monom, coeff in e.denominator.terms():
            t = Fraction(int(coeff.numerator), int(coeff.denominator))
            for i, ex in enumerate(monom):
                if ex:
                    t *= Fraction(point.get(names[i], 0)) ** ex
            den += t
        if den == 0 or den.numerator % p == 0:
            return False
    return True


def sample_point(
    m: Model,
    seed: int | None = 0,
    prime: int = DEFAULT_PRIME,
    overrides: Mapping[str, int] | None = None,
    retries: int = RETRY_BUDGET,
    rng: random.Random | None = None,
) -> Sample:
    """Draw values in [1, 2^20] until every denominator is nonzero mod ``prime``."""
    check_prime(prime)
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(m.states) - set(m.params)
    if unknown:
        raise ModelError(f"override for unknown symbol {sorted(unknown)[0]}")
    rng = rng or random.Random(seed)
    cap = m.input_order_cap + 2
    for _ in range(retries):
        values = {}
        for s in list(m.states) + list(m.params):
            values[s] = int(overrides[s]) if s in overrides else rng.randint(SAMPLE_LOW, SAMPLE_HIGH)
        inputs = {(u, k): rng.randint(SAMPLE_LOW, SAMPLE_HIGH) for u in m.inputs for k in range(cap + 32)}
        if _denominators_ok(m, values, inputs, prime):
            return Sample(values, prime, seed, inputs)
        if set(overrides) >= set(m.states) | set(m.params) and not m.inputs:
            break
    raise SamplingError("retry budget exhausted: a denominator vanishes at every sample")


# ---------------------------------------------------------------------------
# Taylor series of the trajectory


class _Exact:
    """Exact rational arithmetic."""

    def const(self, c: Fraction):
        return Fraction(c)

    zero = Fraction(0)
    one = Fraction(1)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("vanishing denominator at the sample")
        return 1 / a

    def scale(self, a, c: Fraction):
        return a * c


def _mulmod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """A @ B mod p for residues below 2^31, splitting B into 16-bit halves to stay inside int64."""
    lo = B & 0xFFFF
    hi = B >> 16
    return ((A @ lo) % p + (A @ hi) % p * (65536 % p)) % p


def _toeplitz(v: np.ndarray) -> np.ndarray:
    n = v.shape[0]
    d = np.subtract.outer(np.arange(n), np.arange(n))
    return np.where(d >= 0, v[np.clip(d, 0, None)], 0)


class _GradSeries:
    """Truncated power series mod p whose coefficients carry a gradient.

    A series is an int64 array of shape (K+1, n+1): column 0 holds the values,
    the remaining columns the derivatives with respect to the n unknowns.
    """

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n

    def const(self, c, L: int) -> np.ndarray:
        c = Fraction(c)
        a = np.zeros((L, self.n + 1), np.int64)
        a[0, 0] = c.numerator % self.p * inv_mod(c.denominator, self.p) % self.p
        return a

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p = self.p
        out = _mulmod(_toeplitz(a[:, 0]), b, p)
        out[:, 1:] = (out[:, 1:] + _mulmod(_toeplitz(b[:, 0]), a[:, 1:], p)) % p
        return out

    def inv(self, a: np.ndarray) -> np.ndarray:
        p = self.p
        L = a.shape[0]
        av = [int(x) for x in a[:, 0]]
        i0 = inv_mod(av[0], p)
        bv = [i0]
        for k in range(1, L):
            bv.append(-sum(av[i] * bv[k - i] for i in range(1, k + 1)) * i0 % p)
        out = np.zeros_like(a)
        out[:, 0] = bv
        sq = _mulmod(_toeplitz(out[:, 0]), out[:, :1], p)[:, 0]
        out[:, 1:] = (-_mulmod(_toeplitz(sq), a[:, 1:], p)) % p
        return out

    def poly(self, poly, names, series, L: int) -> np.ndarray:
        p = self.p
        total = np.zeros((L, self.n + 1), np.int64)
        powers: dict[tuple[str, int], np.ndarray] = {}
        for monom, coeff in poly.terms():
            term = None
            for i, e in enumerate(monom):
                if not e:
                    continue
                key = (names[i], e)
                if key not in powers:
                    base = series[names[i]][:L]
                    pw = base
                    for _ in range(e - 1):
                        pw = self.mul(pw, base)
                    powers[key] = pw
                term = powers[key] if term is None else self.mul(term, powers[key])
            c = int(coeff.numerator) % p * inv_mod(int(coeff.denominator), p) % p
            total = (total + (self.const(1, L) if term is None else term) * c) % p
        return total

    def rational(self, expr, series, L: int) -> np.ndarray:
        num = self.poly(expr.numerator, expr.names, series, L)
        if expr.denominator.is_ground:
            c = expr.denominator.LC
            return num * (int(c.denominator) % self.p * inv_mod(int(c.numerator), self.p) % self.p) % self.p
        return self.mul(num, self.inv(self.poly(expr.denominator, expr.names, series, L)))


def _grad_trajectory(m: Model, K: int, s: "Sample", p: int, cols: tuple[str, ...]) -> list[np.ndarray]:
    """Output series mod p with gradients with respect to ``cols`` (initial states and parameters)."""
    ops = _GradSeries(p, len(cols))
    series: dict[str, np.ndarray] = {}
    for j, name in enumerate(cols):
        a = ops.const(s.values[name], K + 1)
        a[0, j + 1] = 1
        series[name] = a
    cap = m.input_order_cap
    for u in m.inputs:
        for r in range(cap + 1):
            a = np.zeros((K + 1, ops.n + 1), np.int64)
            for k in range(K + 1):
                val = s.inputs.get((u, r + k))
                if val is None:
                    raise ModelError(f"input jet {u}^({r + k}) was not sampled")
                a[k, 0] = ops.const(Fraction(val) / factorial(k), 1)[0, 0]
            series[jet_name(u, r)] = a
    for k in range(K):
        rhs = {x: ops.rational(m.odes[x], series, k + 1) for x in m.states}
        for x in m.states:
            series[x][k + 1] = rhs[x][k] * inv_mod(k + 1, p) % p
    return [ops.rational(g, series, K + 1) for _, g in m.outputs]


def _ser_mul(a, b, K, ops):
    out = []
    for k in range(K + 1):
        s = ops.zero
        for i in range(k + 1):
            s = s + a[i] * b[k - i]
        out.append(s)
    return out


def _ser_inv(a, K, ops):
    inv0 = ops.inv(a[0])
    out = [inv0]
    for k in range(1, K + 1):
        s = ops.zero
        for i in range(1, k + 1):
            s = s + a[i] * out[k - i]
        out.append(-(s * inv0))
    return out


def _ser_poly(poly, names, series, K, ops):
    total = [ops.zero] * (K + 1)
    powers: dict[tuple[str, int], list] = {}
    for monom, coeff in poly.terms():
        c = ops.const(Fraction(int(coeff.numerator), int(coeff.denominator)))
        term = [c] + [ops.zero] * K
        for i, e in enumerate(monom):
            if not e:
                continue
            key = (names[i], e)
            if key not in powers:
                base = series[names[i]]
                pw = base
                for _ in range(e - 1):
                    pw = _ser_mul(pw, base, K, ops)
                powers[key] = pw
            term = _ser_mul(term, powers[key], K, ops)
        total = [x + y for x, y in zip(total, term)]
    return total


def _ser_rational(expr, series, K, ops):
    names = expr.names
    num = _ser_poly(expr.numerator, names, series, K, ops)
    if expr.denominator.is_ground:
        c = expr.denominator.LC
        inv = ops.const(Fraction(int(c.denominator), int(c.numerator)))
        return [x * inv for x in num]
    den = _ser_poly(expr.denominator, names, series, K, ops)
    return _ser_mul(num, _ser_inv(den, K, ops), K, ops)


def _trajectory(m: Model, K: int, init: Mapping[str, object], params: Mapping[str, object], inputs, ops):
    """Taylor coefficients (up to t^K) of states and outputs of the solution."""
    series: dict[str, list] = {}
    for p_, v in params.items():
        series[p_] = [v] + [ops.zero] * K
    cap = m.input_order_cap
    for u in m.inputs:
        for r in range(cap + 1):
            coeffs = []
            for k in range(K + 1):
                val = inputs.get((u, r + k))
                if val is None:
                    raise ModelError(f"input jet {u}^({r + k}) was not sampled")
                coeffs.append(ops.scale(ops.const(Fraction(val)), Fraction(1, factorial(k))))
            series[jet_name(u, r)] = coeffs
    states = {x: [init[x]] + [ops.zero] * K for x in m.states}
    series.update(states)
    for k in range(K):
        rhs = {x: _ser_rational(m.odes[x], series, k, ops) for x in m.states}
        for x in m.states:
            states[x][k + 1] = ops.scale(rhs[x][k], Fraction(1, k + 1))
    outs = [_ser_rational(g, series, K, ops) for _, g in m.outputs]
    return states, outs


def compute_output_values(
    m: Model,
    s: Sample,
    k: Mapping[int, int] | Sequence[int] | int,
    exact: bool = False,
) -> dict[tuple[str, int], int | Fraction]:
    """Values of ``y_j^(i)`` for ``i <= k_j`` at the sample.

    With ``exact`` the rational values are returned, otherwise their images mod p.
    """
    counts = _as_counts(m, k)
    K = max(counts.values(), default=0)
    ops = _Exact()
    init = {x: Fraction(s.values[x]) for x in m.states}
    params = {q: Fraction(s.values[q]) for q in m.params}
    _, outs = _trajectory(m, K, init, params, s.inputs, ops)
    res: dict[tuple[str, int], int | Fraction] = {}
    for j, (y, _) in enumerate(m.outputs):
        for i in range(counts[j] + 1):
            v = outs[j][i] * factorial(i)
            res[(y, i)] = v if exact else v.numerator % s.prime * inv_mod(v.denominator, s.prime) % s.prime
    return res


def state_jet_values(m: Model, s: Sample, K: int) -> dict[tuple[str, int], int]:
    """Images mod p of ``x_i^(k)`` for ``k <= K`` along the sampled trajectory."""
    ops = _Exact()
    init = {x: Fraction(s.values[x]) for x in m.states}
    params = {q: Fraction(s.values[q]) for q in m.params}
    states, _ = _trajectory(m, K, init, params, s.inputs, ops)
    p = s.prime
    out = {}
    for x in m.states:
        for k in range(K + 1):
            v = states[x][k] * factorial(k)
            out[(x, k)] = v.numerator % p * inv_mod(v.denominator, p) % p
    return out


def _as_counts(m: Model, k) -> dict[int, int]:
    if isinstance(k, int):
        return {j: k for j in range(len(m.outputs))}
    if isinstance(k, Mapping):
        return {j: int(k.get(j, 0)) for j in range(len(m.outputs))}
    return {j: int(v) for j, v in enumerate(k)}


# ---------------------------------------------------------------------------
# Jacobian rank test


def _rank_mod_p(rows: np.ndarray, p: int) -> int:
    a = rows.copy() % p
    nr, nc = a.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * inv_mod(int(a[r, c]), p) % p
        col = a[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(col[mask], a[r])) % p
        r += 1
    return r


@dataclass
class JacobianInfo:
    columns: tuple[str, ...]
    rows: dict[tuple[int, int], np.ndarray]
    layers: int
    rank: int
    local: frozenset[str]
    bounds: dict[int, int]


def _jacobian_rows(m: Model, s: Sample, p: int, K: int) -> tuple[tuple[str, ...], dict]:
    cols = tuple(m.states) + tuple(m.params)
    outs = _grad_trajectory(m, K, s, p, cols)
    rows = {}
    for j in range(len(m.outputs)):
        for i in range(K + 1):
            rows[(j, i)] = outs[j][i, 1:] * (factorial(i) % p) % p
    return cols, rows


def jacobian_analysis(m: Model, s: Sample, p: int | None = None, bound: int | None = None) -> JacobianInfo:
    """Rank of the Jacobian of output derivatives with respect to initial states and parameters.

    Without ``bound`` layers of derivative orders are added until a layer adds no
    rank; the per-output prolongation bound is then the smallest order reaching
    the full rank, plus one.
    """
    p = p or s.prime
    n = len(m.states) + len(m.params)
    cap = bound if bound is not None else n + 1
    cols, rows = _jacobian_rows(m, s, p, cap)
    nout = len(m.outputs)

    def rank_of(keys):
        if not keys:
            return 0
        return _rank_mod_p(np.array([rows[k] for k in keys], dtype=np.int64), p)

    if bound is None:
        prev = -1
        layers = 0
        for K in range(cap + 1):
            r = rank_of([(j, i) for j in range(nout) for i in range(K + 1)])
            if r == prev:
                break
            prev = r
            layers = K
        rank = max(prev, 0)
    else:
        layers = bound
        rank = rank_of([(j, i) for j in range(nout) for i in range(bound + 1)])
    full = [(j, i) for j in range(nout) for i in range(layers + 1)]
    local = set()
    for c, name in enumerate(cols):
        keep = [i for i in range(len(cols)) if i != c]
        sub = np.array([rows[k][keep] for k in full], dtype=np.int64) if full else np.zeros((0, len(keep)), np.int64)
        if _rank_mod_p(sub, p) < rank:
            local.add(name)
    bounds = {}
    for j in range(nout):
        others = [(jj, i) for jj in range(nout) if jj != j for i in range(layers + 1)]
        b = layers
        for cand in range(layers + 1):
            if rank_of(others + [(j, i) for i in range(cand + 1)]) == rank:
                b = cand
                break
        bounds[j] = b + 1
    return JacobianInfo(cols, rows, layers, rank, frozenset(local), bounds)


def jacobian_local_identifiability(
    m: Model, s: Sample, p: int | None = None, bound: int | None = None
) -> set[str]:
    """Symbols (state names for initial values, parameters) whose Jacobian column is essential."""
    return set(jacobian_analysis(m, s, p, bound).local)


def default_bounds(m: Model, s: Sample, p: int | None = None) -> dict[int, int]:
    return dict(jacobian_analysis(m, s, p).bounds)


def transcendence_fix(m: Model, info: JacobianInfo, p: int) -> list[str]:
    """Greedy set of non-identifiable symbols whose values can be fixed without losing rank.

    After fixing them every remaining column is essential, so the specialized
    system becomes zero-dimensional in the unknowns.
    """
    order = [q for q in m.params if q not in info.local] + [x for x in m.states if x not in info.local]
    cols = list(info.columns)
    keys = [(j, i) for j in range(len(m.outputs)) for i in range(info.layers + 1)]
    fixed: list[str] = []
    remaining = list(range(len(cols)))
    for name in order:
        c = cols.index(name)
        trial = [i for i in remaining if i != c]
        mat = np.array([info.rows[k][trial] for k in keys], dtype=np.int64) if keys else np.zeros((0, len(trial)), np.int64)
        if _rank_mod_p(mat, p) == info.rank:
            fixed.append(name)
            remaining = trial
    return fixed


# ---------------------------------------------------------------------------
# specialization


@dataclass
class SpecializedSystem:
    """The system over F_p after substituting output (and input) derivative values."""

    system: PolySystem
    yhat: dict[tuple[str, int], int]
    sample: Sample
    bounds: dict[int, int]
    fixed: dict[str, int] = field(default_factory=dict)
    local: frozenset[str] = frozenset()
    prolonged: ProlongedSystem | None = None

    @property
    def polynomials(self) -> list[dict]:
        return self.system.polys

    def symbol_variable(self, symbol: str) -> str | None:
        """Variable of the system standing for a model state (initial value) or parameter."""
        m = self.prolonged.model if self.prolonged else None
        if m is not None and symbol in m.states:
            name = f"{symbol}_0"
        else:
            name = symbol
        return name if name in self.system.variables else None


def specialize(
    ps: ProlongedSystem,
    yhat: Mapping[tuple[str, int], int],
    s: Sample,
    p: int | None = None,
) -> SpecializedSystem:
    """Replace every output jet by its value and reduce coefficients mod p."""
    p = p or s.prime
    u = ps.universe
    m = ps.model
    values: dict[int, int] = {}
    for i, jv in enumerate(u.jets):
        if jv.kind == "output":
            values[i] = None  # type: ignore[assignment]
        elif jv.kind == "input":
            values[i] = s.inputs.get((jv.base, jv.order))
    # collect used variables
    used = set()
    for eq in ps.equations:
        for monom in eq.poly.monoms():
            used.update(i for i, e in enumerate(monom) if e)
    for i in used:
        jv = u.variable(i)
        if isinstance(jv, JetVar) and jv.kind == "output" and (jv.base, jv.order) not in yhat:
            raise ModelError(f"missing value for output derivative {jv.base}^({jv.order})")
    subst = {}
    for i in used:
        jv = u.variable(i)
        if isinstance(jv, JetVar) and jv.kind == "output":
            subst[i] = yhat[(jv.base, jv.order)] % p
        elif isinstance(jv, JetVar) and jv.kind == "input":
            v = s.inputs.get((jv.base, jv.order))
            if v is None:
                raise ModelError(f"input jet {jv.base}^({jv.order}) was not sampled")
            subst[i] = v % p
    var_idx = sorted(i for i in used if i not in subst)
    names = [u.names[i] for i in var_idx]
    polys = []
    for eq in ps.equations:
        d: dict[tuple[int, ...], int] = {}
        for monom, coeff in eq.poly.terms():
            c = int(coeff.numerator) % p * inv_mod(int(coeff.denominator), p) % p
            for i, val in subst.items():
                if monom[i]:
                    c = c * pow(val, monom[i], p) % p
            if not c:
                continue
            key = tuple(monom[i] for i in var_idx)
            d[key] = (d.get(key, 0) + c) % p
        d = {k: v for k, v in d.items() if v}
        if d:
            polys.append(d)
    params = tuple(q for q in m.params if q in names)
    system = PolySystem(tuple(names), polys, p, params, None, m.name, tuple(m.states))
    # present variables in differential order for readability
    ranked = system.ordering().ranked
    perm = [names.index(v) for v in ranked]
    system = PolySystem(
        ranked,
        [{tuple(k[i] for i in perm): c for k, c in poly.items()} for poly in system.polys],
        p,
        params,
        None,
        m.name,
        tuple(m.states),
    )
    return SpecializedSystem(system, dict(yhat), s, dict(ps.orders), {}, frozenset(), ps)


def solution_point(ss: SpecializedSystem) -> dict[str, int]:
    """The sampled point as an assignment to the system's variables (mod p)."""
    ps = ss.prolonged
    m = ps.model
    s = ss.sample
    p = s.prime
    K = max([k for (_, k) in [(jv.base, jv.order) for jv in ps.universe.jets if jv.kind == "state"]] + [0])
    jets = state_jet_values(m, s, K)
    point = {}
    for v in ss.system.variables:
        if v in m.params:
            point[v] = s.values[v] % p
        elif v == ZAUX:
            prod = 1
            for d in m.denominators():
                val = Fraction(0)
                names = [sym.name for sym in m.field.symbols]
                for monom, coeff in d.terms():
                    t = Fraction(int(coeff.numerator), int(coeff.denominator))
                    for i, e in enumerate(monom):
                        if e:
                            nm = names[i]
                            base = s.values.get(nm)
                            if base is None:
                                b = nm.rstrip("'")
                                base = s.inputs[(b, len(nm) - len(b))]
                            t *= Fraction(base) ** e
                    val += t
                prod = prod * (val.numerator % p) * inv_mod(val.denominator, p) % p
            point[v] = inv_mod(prod, p)
        else:
            base, _, order = v.rpartition("_")
            point[v] = jets[(base, int(order))]
    return point


def generate(
    m: Model,
    prime: int = DEFAULT_PRIME,
    seed: int | None = 0,
    bounds: Mapping[int, int] | Sequence[int] | int | None = None,
    overrides: Mapping[str, int] | None = None,
    fix_nonidentifiable: bool = True,
    retries: int = RETRY_BUDGET,
) -> SpecializedSystem:
    """Sample, prolong and specialize ``m``; the sampled point always solves the result."""
    check_prime(prime)
    rng = random.Random(seed)
    info = None
    s = None
    for _ in range(retries):
        s = sample_point(m, seed, prime, overrides, retries, rng=rng)
        info = jacobian_analysis(m, s, prime)
        if overrides and set(overrides) >= set(m.states) | set(m.params):
            break
        # guard against a degenerate sample: compare with an independent point
        probe = sample_point(m, None, prime, None, retries, rng=random.Random(rng.random()))
        if jacobian_analysis(m, probe, prime, info.layers).rank <= info.rank:
            break
    else:
        raise SamplingError("Jacobian rank is degenerate at every sample")
    if bounds is None or bounds == "auto":
        counts = dict(info.bounds)
    else:
        counts = _as_counts(m, bounds)
    ps = prolong(m, counts)
    yhat = compute_output_values(m, s, counts)
    ss = specialize(ps, yhat, s, prime)
    ss.local = info.local
    if fix_nonidentifiable:
        fixed = transcendence_fix(m, info, prime)
        values = {}
        for name in fixed:
            var = ss.symbol_variable(name)
            if var is not None:
                values[var] = s.values[name] % prime
        if values:
            ss.system = ss.system.substitute_values(values)
        ss.fixed = {name: s.values[name] % prime for name in fixed}
    return ss
