"""Standard and degree-corrected stochastic block models.

Edges are drawn as ``A_ij ~ Bernoulli(theta_i theta_j rho P[c_i, c_j])`` for
``i <= j`` (self-loops included) and symmetrised. The standard block model
is the ``constant-one`` degree distribution; there is no separate code path.

Random numbers come from numpy's Philox4x32-10 counter-based generator,
seeded with ``np.random.Philox(seed)``. Draw order for :func:`sample_network`:
community labels, then degree parameters, then one ``random(n - i)`` block
of uniforms per row ``i`` covering columns ``j >= i``.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .graph import Graph

__all__ = [
    "ParameterError",
    "ThetaSpec",
    "DcbmParams",
    "PopulationQuantities",
    "SampledNetwork",
    "make_rng",
    "validate",
    "rho_for_expected_degree",
    "sample_network",
    "sample_graph_given",
    "population_quantities",
    "parse_params",
    "format_params",
]

log = logging.getLogger(__name__)

_TOL = 1e-9


class ParameterError(ValueError):
    """Model parameters violate a constraint."""


def make_rng(seed) -> np.random.Generator:
    """Philox-backed generator; ``seed`` may be an int or a SeedSequence."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class ThetaSpec:
    """Distribution of the degree parameters, always with mean one.

    kind
        ``"constant-one"``; ``"two-point"`` with values ``2/(m+1)`` and
        ``2m/(m+1)`` each w.p. 1/2; ``"mixture"``: uniform on [0, 2] w.p.
        ``alpha``, otherwise the two-point values w.p. ``(1-alpha)/2`` each;
        ``"discrete"`` with explicit ``values``/``probs``.
    """

    kind: str = "constant-one"
    m: float = 1.0
    alpha: float = 0.0
    values: tuple = ()
    probs: tuple = ()

    KINDS = ("constant-one", "two-point", "mixture", "discrete")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ParameterError(f"unknown theta kind {self.kind!r}")
        if self.kind in ("two-point", "mixture") and not self.m >= 1:
            raise ParameterError("theta ratio m must be >= 1")
        if self.kind == "mixture" and not 0 <= self.alpha <= 1:
            raise ParameterError("mixture weight alpha must lie in [0, 1]")
        if self.kind == "discrete":
            v, p = np.asarray(self.values, float), np.asarray(self.probs, float)
            if v.size == 0 or v.shape != p.shape:
                raise ParameterError("discrete theta needs matching values and probs")
            if np.any(v <= 0) or np.any(p < 0) or abs(p.sum() - 1) > _TOL:
                raise ParameterError("discrete theta needs positive values and probabilities summing to 1")
            if abs(v @ p - 1) > 1e-8:
                raise ParameterError(f"E[theta] must be 1, got {v @ p:.6g}")

    @classmethod
    def constant(cls) -> "ThetaSpec":
        return cls("constant-one")

    @classmethod
    def two_point(cls, m: float) -> "ThetaSpec":
        return cls("two-point", m=float(m))

    @classmethod
    def mixture(cls, m: float, alpha: float) -> "ThetaSpec":
        return cls("mixture", m=float(m), alpha=float(alpha))

    @property
    def is_discrete(self) -> bool:
        return self.kind != "mixture" or self.alpha == 0

    def _two_point(self) -> tuple[np.ndarray, np.ndarray]:
        x = 2.0 / (self.m + 1.0)
        if self.m == 1:
            return np.array([1.0]), np.array([1.0])
        return np.array([x, self.m * x]), np.array([0.5, 0.5])

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted distinct support values and their probabilities."""
        if self.kind == "constant-one":
            return np.array([1.0]), np.array([1.0])
        if self.kind == "discrete":
            v, p = np.asarray(self.values, float), np.asarray(self.probs, float)
            order = np.argsort(v)
            return v[order], p[order]
        if not self.is_discrete:
            raise ParameterError("mixture theta with alpha > 0 is continuous; no discrete support")
        return self._two_point()

    @property
    def sup(self) -> float:
        """Largest value theta can take (essential supremum)."""
        if self.kind == "mixture" and self.alpha > 0:
            return max(2.0, self._two_point()[0].max())
        return float(self.support()[0].max())

    @property
    def variance(self) -> float:
        if self.kind == "mixture":
            two = ((self.m - 1) / (self.m + 1)) ** 2
            return self.alpha / 3.0 + (1 - self.alpha) * two
        v, p = self.support()
        return float(p @ (v - 1.0) ** 2)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "constant-one":
            return np.ones(size)
        if self.kind == "mixture":
            v, _ = self._two_point()
            pick = rng.random(size)
            eta = rng.uniform(0.0, 2.0, size)
            two = np.where(rng.random(size) < 0.5, v[0], v[-1])
            return np.where(pick < self.alpha, eta, two)
        v, p = self.support()
        return v[rng.choice(v.size, size=size, p=p)]


@dataclass(frozen=True)
class DcbmParams:
    """Parameters of a degree-corrected block model.

    ``joint`` optionally gives the K x M joint law of (label, theta) over the
    theta support; by default the two are independent.
    """

    pi: np.ndarray
    P: np.ndarray
    rho: float = 1.0
    theta: ThetaSpec = field(default_factory=ThetaSpec)
    joint: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "pi", np.atleast_1d(np.asarray(self.pi, dtype=float)))
        object.__setattr__(self, "P", np.atleast_2d(np.asarray(self.P, dtype=float)))
        object.__setattr__(self, "rho", float(self.rho))
        if self.joint is not None:
            object.__setattr__(self, "joint", np.atleast_2d(np.asarray(self.joint, dtype=float)))

    @property
    def K(self) -> int:
        return self.pi.size

    def with_rho(self, rho: float) -> "DcbmParams":
        return replace(self, rho=rho)

    def joint_table(self) -> np.ndarray:
        """The K x M matrix Pi of P(c = a, theta = x_u)."""
        if self.joint is not None:
            return self.joint
        _, p = self.theta.support()
        return np.outer(self.pi, p)

    def pi_tilde(self) -> np.ndarray:
        if self.joint is None:
            # E[theta] = 1 and independence give pi_tilde = pi for every kind
            return self.pi.copy()
        x, _ = self.theta.support()
        return self.joint @ x

    def __eq__(self, other):
        if not isinstance(other, DcbmParams):
            return NotImplemented
        same_joint = (self.joint is None and other.joint is None) or (
            self.joint is not None and other.joint is not None and np.array_equal(self.joint, other.joint))
        return (np.array_equal(self.pi, other.pi) and np.array_equal(self.P, other.P)
                and self.rho == other.rho and self.theta == other.theta and same_joint)


@dataclass(frozen=True)
class PopulationQuantities:
    pi_tilde: np.ndarray
    P0: float
    P0_tilde: float
    W_tilde: np.ndarray
    E_tilde: np.ndarray


def validate(params: DcbmParams) -> DcbmParams:
    """Return ``params`` unchanged if every model constraint holds."""
    pi, P, K = params.pi, params.P, params.K
    if pi.ndim != 1 or np.any(pi <= 0) or abs(pi.sum() - 1) > _TOL:
        raise ParameterError(f"pi must be a positive probability vector, got {pi.tolist()}")
    if P.shape != (K, K):
        raise ParameterError(f"P must be {K}x{K}, got shape {P.shape}")
    if np.any(P < 0) or not np.allclose(P, P.T, rtol=0, atol=1e-12):
        raise ParameterError("P must be symmetric and nonnegative")
    if not 0 <= params.rho <= 1:
        raise ParameterError(f"rho must lie in [0, 1], got {params.rho}")
    if params.joint is not None:
        x, _ = params.theta.support()
        J = params.joint
        if J.shape != (K, x.size):
            raise ParameterError(f"joint must be {K}x{x.size}, got shape {J.shape}")
        if np.any(J < 0) or not np.allclose(J.sum(axis=1), pi, rtol=0, atol=_TOL):
            raise ParameterError("joint row sums must equal pi")
        if abs(float(x @ J.sum(axis=0)) - 1) > 1e-8:
            raise ParameterError("joint law must give E[theta] = 1")
    bound = params.theta.sup ** 2 * params.rho * P.max()
    if bound > 1 + 1e-12:
        raise ParameterError(
            f"edge probability bound violated: x_M^2 * max(rho P) = {bound:.6g} > 1")
    return params


def rho_for_expected_degree(lam: float, n: int, pi, P, theta: ThetaSpec | None = None,
                            joint=None) -> float:
    """Scale ``rho`` so that the expected degree (loops included) equals ``lam``.

    ``rho = lam / (n * sum_ab pi~_a pi~_b P_ab)``.
    """
    theta = theta or ThetaSpec()
    params = DcbmParams(pi=pi, P=P, rho=0.0, theta=theta, joint=joint)
    if lam < 0:
        raise ParameterError("expected degree must be nonnegative")
    pt = params.pi_tilde()
    base = float(pt @ params.P @ pt)
    if lam == 0:
        return 0.0
    if base <= 0:
        raise ParameterError("P gives zero edge probability; no rho reaches the target degree")
    rho = lam / (n * base)
    if rho > 1:
        raise ParameterError(f"expected degree {lam} infeasible for n={n} (rho={rho:.4g} > 1)")
    try:
        validate(params.with_rho(rho))
    except ParameterError as exc:
        raise ParameterError(f"expected degree {lam} infeasible for n={n}: {exc}") from None
    return rho


class SampledNetwork(NamedTuple):
    graph: Graph
    labels: np.ndarray
    theta: np.ndarray
    clamped: int


def sample_graph_given(labels, theta, params: DcbmParams, rng: np.random.Generator) -> tuple[Graph, int]:
    """Draw edges given community labels and degree parameters.

    Returns the graph and the number of pair probabilities clamped to 1.
    """
    labels = np.asarray(labels, dtype=np.int64)
    theta = np.asarray(theta, dtype=float)
    n = labels.size
    rhoP = params.rho * params.P
    src, dst = [], []
    clamped = 0
    for i in range(n):
        p = theta[i] * theta[i:] * rhoP[labels[i], labels[i:]]
        over = p > 1
        if over.any():
            clamped += int(over.sum())
            p = np.minimum(p, 1.0)
        hits = np.flatnonzero(rng.random(n - i) < p) + i
        src.append(np.full(hits.size, i, dtype=np.int64))
        dst.append(hits)
    if clamped:
        log.warning("clamped %d edge probabilities to 1", clamped)
    src = np.concatenate(src) if src else np.zeros(0, np.int64)
    dst = np.concatenate(dst) if dst else np.zeros(0, np.int64)
    return Graph.from_edges(n, src, dst), clamped


def sample_network(params: DcbmParams, n: int, seed) -> SampledNetwork:
    """Sample labels, degree parameters and a graph; deterministic in ``seed``."""
    validate(params)
    rng = make_rng(seed)
    if params.joint is None:
        labels = rng.choice(params.K, size=n, p=params.pi)
        theta = params.theta.sample(rng, n)
    else:
        x, _ = params.theta.support()
        J = params.joint
        flat = rng.choice(J.size, size=n, p=J.ravel() / J.sum())
        labels, u = np.divmod(flat, J.shape[1])
        theta = x[u]
    graph, clamped = sample_graph_given(labels, theta, params, rng)
    return SampledNetwork(graph, labels.astype(np.int64), theta, clamped)


def population_quantities(params: DcbmParams) -> PopulationQuantities:
    """pi~, P0, P~0, W~ and E~ = W~ - (W~ 1)(W~ 1)^T for discrete theta."""
    if not params.theta.is_discrete and params.joint is None:
        raise ParameterError("population quantities need a discrete theta distribution")
    pi, P = params.pi, params.P
    pt = params.pi_tilde()
    P0 = float(pi @ P @ pi)
    P0t = float(pt @ P @ pt)
    if P0t <= 0:
        raise ParameterError("P~0 is zero")
    W = np.outer(pt, pt) * P / P0t
    r = W.sum(axis=1)
    return PopulationQuantities(pt, P0, P0t, W, W - np.outer(r, r))


# -- parameter files -----------------------------------------------------------
#
# Flat "key = value" lines, '#' comments. Keys:
#   K        community count (optional, checked against pi)
#   pi       K probabilities
#   P        K*K entries, row-major
#   theta    constant-one | two-point | mixture | discrete
#   m        two-point / mixture ratio
#   alpha    mixture weight
#   values   discrete theta support, probs: its probabilities
#   joint    K*M entries, row-major (optional joint law of label and theta)
#   rho      edge scale, or
#   lambda   target expected degree (needs n)
#   n        node count (used with lambda and by `generate`)


def _read_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, val = line.split("=", 1)
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParameterError(f"line {lineno}: expected 'key = value'")
            key, val = parts
        out[key.strip().lower()] = val.strip()
    return out


def _floats(s: str) -> list[float]:
    return [float(t) for t in s.replace(",", " ").split()]


def parse_params(text: str, n: int | None = None) -> tuple[DcbmParams, dict]:
    """Parse a parameter file; returns the validated params and leftover keys."""
    kv = _read_kv(text)
    try:
        pi = np.array(_floats(kv.pop("pi")))
        K = int(kv.pop("k", pi.size))
        if K != pi.size:
            raise ParameterError(f"K={K} but pi has {pi.size} entries")
        P = np.array(_floats(kv.pop("p"))).reshape(K, K)
    except KeyError as exc:
        raise ParameterError(f"missing key {exc}") from None
    except ValueError as exc:
        raise ParameterError(str(exc)) from None
    kind = kv.pop("theta", "constant-one")
    m = float(kv.pop("m", 1))
    alpha = float(kv.pop("alpha", 0))
    values = tuple(_floats(kv.pop("values", "")))
    probs = tuple(_floats(kv.pop("probs", "")))
    theta = ThetaSpec(kind, m=m, alpha=alpha, values=values, probs=probs)
    joint = np.array(_floats(kv.pop("joint"))).reshape(K, -1) if "joint" in kv else None
    if "n" in kv:
        file_n = int(kv.pop("n"))
        n = file_n if n is None else n
    if "rho" in kv and "lambda" in kv:
        raise ParameterError("give either rho or lambda, not both")
    if "lambda" in kv:
        lam = float(kv.pop("lambda"))
        if n is None:
            raise ParameterError("lambda needs the node count n")
        rho = rho_for_expected_degree(lam, n, pi, P, theta, joint)
    else:
        rho = float(kv.pop("rho", 1.0))
    params = validate(DcbmParams(pi=pi, P=P, rho=rho, theta=theta, joint=joint))
    extras = dict(kv)
    if n is not None:
        extras["n"] = n
    return params, extras


def format_params(params: DcbmParams, n: int | None = None) -> str:
    def fmt(a):
        return " ".join(repr(float(v)) for v in np.ravel(a))

    lines = [f"K = {params.K}", f"pi = {fmt(params.pi)}", f"P = {fmt(params.P)}",
             f"theta = {params.theta.kind}"]
    if params.theta.kind in ("two-point", "mixture"):
        lines.append(f"m = {params.theta.m!r}")
    if params.theta.kind == "mixture":
        lines.append(f"alpha = {params.theta.alpha!r}")
    if params.theta.kind == "discrete":
        lines += [f"values = {fmt(params.theta.values)}", f"probs = {fmt(params.theta.probs)}"]
    if params.joint is not None:
        lines.append(f"joint = {fmt(params.joint)}")
    lines.append(f"rho = {params.rho!r}")
    if n is not None:
        lines.append(f"n = {n}")
    return "\n".join(lines) + "\n"
