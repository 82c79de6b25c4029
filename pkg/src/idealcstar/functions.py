"""Scalar functions on a group: positive definiteness, ideals, norms.

A GroupFunction couples a pointwise evaluation rule with an optional tail
certificate describing its behaviour outside any finite window.  Window
checks (positive definite / conditionally negative type) are numerical;
ideal membership is certificate-driven and three-valued, returning
"undecided" rather than guessing whenever the certificate cannot settle the
question.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from . import _linalg
from .errors import (
    CertificateInconsistencyError,
    ModelMismatchError,
    PreconditionError,
    UnsupportedModelError,
)
from .groups import Ball, GroupElement, GroupModel, ball, compose

# ---------------------------------------------------------------------------
# tail certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSupport:
    """eval(s) = 0 whenever |s| > radius."""

    radius: int


@dataclass(frozen=True)
class ExpDecay:
    """|eval(s)| <= amplitude * ratio**|s| with 0 < ratio < 1."""

    amplitude: float
    ratio: float

    def __post_init__(self):
        if not (self.amplitude > 0 and 0 < self.ratio < 1):
            raise ValueError("ExpDecay needs amplitude > 0 and ratio in (0, 1)")


@dataclass(frozen=True)
class SphereSupSequence:
    """Per-radius sup bounds sup_{|s|=k} |eval(s)| for k = 0 .. len-1.

    limit_zero records whether the *constructor* guarantees that the bounds
    continue monotonically to zero beyond the recorded window; a bare
    finite list proves nothing about the tail and leaves memberships that
    need a limit undecided.
    """

    sups: tuple[float, ...]
    limit_zero: bool = False


@dataclass(frozen=True)
class BoundedBelow:
    """|eval(s)| >= bound > 0 whenever |s| > outside_radius."""

    bound: float
    outside_radius: int = -1


TailCertificate = FiniteSupport | ExpDecay | SphereSupSequence | BoundedBelow


# ---------------------------------------------------------------------------
# group functions
# ---------------------------------------------------------------------------


class GroupFunction:
    """Complex-valued function on a group model, with provenance label.

    Subclasses implement _eval; vectorized paths (values / gram) fall back
    to element loops but are overridden where structure allows (radial
    profiles, matrix coefficients, pointwise products).
    """

    def __init__(self, model: GroupModel, tail: TailCertificate | None = None,
                 label: str = "", sup_bound: float | None = None):
        self.model = model
        self.tail = tail
        self.label = label or type(self).__name__
        self.sup_bound = sup_bound

    # -- evaluation --------------------------------------------------------

    def _eval(self, el: GroupElement) -> complex:
        raise NotImplementedError

    def __call__(self, el: GroupElement) -> complex:
        if el.model != self.model:
            raise ModelMismatchError(f"{self.label} is a function on {self.model}")
        value = complex(self._eval(el))
        self._check_certificate(el, value)
        return value

    def values(self, elements: Sequence[GroupElement] | Ball) -> np.ndarray:
        els = elements.elements if isinstance(elements, Ball) else elements
        return np.array([self(el) for el in els], dtype=complex)

    # -- certificate consistency (lazy) -------------------------------------

    def _check_certificate(self, el: GroupElement, value: complex) -> None:
        tail = self.tail
        if tail is None:
            return
        k, a = el.length, abs(value)
        slack = 1e-12 * (1.0 + a)
        if isinstance(tail, FiniteSupport) and k > tail.radius and a > slack:
            raise CertificateInconsistencyError(
                f"{self.label}: nonzero value {value} at |s|={k} beyond "
                f"declared support radius {tail.radius}")
        if isinstance(tail, ExpDecay) and a > tail.amplitude * tail.ratio**k + slack:
            raise CertificateInconsistencyError(
                f"{self.label}: |h(s)|={a:.6g} at |s|={k} violates envelope "
                f"{tail.amplitude:.6g}*{tail.ratio:.6g}^k")
        if isinstance(tail, SphereSupSequence) and k < len(tail.sups) \
                and a > tail.sups[k] + slack:
            raise CertificateInconsistencyError(
                f"{self.label}: |h(s)|={a:.6g} exceeds recorded sphere sup "
                f"{tail.sups[k]:.6g} at radius {k}")
        if isinstance(tail, BoundedBelow) and k > tail.outside_radius \
                and a < tail.bound - slack:
            raise CertificateInconsistencyError(
                f"{self.label}: |h(s)|={a:.6g} at |s|={k} below declared "
                f"lower bound {tail.bound:.6g}")

    # -- window matrices -----------------------------------------------------

    def gram(self, window: Sequence[GroupElement] | Ball,
             convention: str = "pd") -> np.ndarray:
        """Window matrix of the function.

        convention="pd":  M[i, j] = h(s_i s_j^-1)   (positive-definiteness)
        convention="gns": G[t, s] = h(t^-1 s)       (GNS inner products)
        """
        els = window.elements if isinstance(window, Ball) else list(window)
        n = len(els)
        out = np.empty((n, n), dtype=complex)
        if convention == "pd":
            inv = [s.inverse() for s in els]
            for j in range(n):
                for i in range(n):
                    out[i, j] = self(compose(els[i], inv[j]))
        elif convention == "gns":
            inv = [t.inverse() for t in els]
            for i in range(n):
                for j in range(n):
                    out[i, j] = self(compose(inv[i], els[j]))
        else:
            raise ValueError(f"unknown gram convention {convention!r}")
        return out

    # -- transforms ----------------------------------------------------------

    def __mul__(self, other: "GroupFunction") -> "GroupFunction":
        return product(self, other)

    def __repr__(self):
        return f"<GroupFunction {self.label} on {self.model}>"


class CallableFunction(GroupFunction):
    def __init__(self, model, fn: Callable[[GroupElement], complex], **kw):
        super().__init__(model, **kw)
        self._fn = fn

    def _eval(self, el):
        return self._fn(el)


class RadialFunction(GroupFunction):
    """Function of the word length only: h(s) = profile(|s|).

    Radial structure gives exact vectorized windows: both gram conventions
    reduce to pairwise word-length matrices.  geometric_ratio marks profiles
    of the exact form amplitude * ratio**k, which unlocks closed-form tails
    and the O(N) tree kernel used for large free-group windows.
    """

    def __init__(self, model, profile: Callable[[int], complex], *,
                 geometric: tuple[float, float] | None = None, **kw):
        super().__init__(model, **kw)
        self.profile = profile
        self.geometric = geometric  # (amplitude, ratio) when exact

    def _eval(self, el):
        return self.profile(el.length)

    def profile_values(self, max_k: int) -> np.ndarray:
        return np.array([self.profile(k) for k in range(max_k + 1)], dtype=complex)

    def values(self, elements):
        if isinstance(elements, Ball):
            return self.profile_values(elements.radius)[elements.lengths]
        return super().values(elements)

    def gram(self, window, convention="pd"):
        if isinstance(window, Ball):
            dists = _pd_pairwise_lengths(window) if convention == "pd" \
                else window.pairwise_lengths()
            table = self.profile_values(int(dists.max()))
            out = table[dists]
            return out
        return super().gram(window, convention)


def _pd_pairwise_lengths(window: Ball) -> np.ndarray:
    """Matrix |s_i s_j^-1| over a ball (cached on the ball).

    For free models |s t^-1| = |s| + |t| - 2 * (common suffix length), which
    is a common-prefix computation on reversed words.
    """
    from .groups import FreeModel
    from . import _speed

    cached = window._pair_cache.get("pd")
    if cached is not None:
        return cached
    if isinstance(window.model, FreeModel):
        letters = window.letters_matrix()
        lengths = window.lengths
        rev = np.full_like(letters, -1)
        for k in range(window.radius + 1):
            lo, hi = window.offsets[k], window.offsets[k + 1]
            rev[lo:hi, :k] = letters[lo:hi, :k][:, ::-1]
        out = _speed.pair_dist(rev, lengths, rev, lengths)
    else:
        els = window.elements
        inv = [s.inverse() for s in els]
        n = len(els)
        out = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            for j in range(n):
                out[i, j] = compose(els[i], inv[j]).length
    window._pair_cache["pd"] = out
    return out


class TableFunction(GroupFunction):
    """Finite table of values (JSON ingestion); zero off the table."""

    def __init__(self, model, table: dict[GroupElement, complex], **kw):
        kw.setdefault("sup_bound",
                      max((abs(v) for v in table.values()), default=0.0))
        super().__init__(model, **kw)
        self.table = dict(table)

    def _eval(self, el):
        return self.table.get(el, 0.0)


class FolnerFunction(GroupFunction):
    """Standard amenability witness h_F(s) = |F intersect sF| / |F|."""

    def __init__(self, model, subset: Iterable[GroupElement], label=""):
        members = list(subset)
        if not members:
            raise PreconditionError("Folner subset must be nonempty")
        diam = max(compose(f, g.inverse()).length for f in members for g in members)
        super().__init__(model, tail=FiniteSupport(diam),
                         label=label or f"folner:|F|={len(members)}", sup_bound=1.0)
        self.subset = frozenset(members)

    def _eval(self, el):
        hits = sum(1 for f in self.subset if compose(el, f) in self.subset)
        return hits / len(self.subset)


class ProductFunction(GroupFunction):
    def __init__(self, f: GroupFunction, g: GroupFunction, label=""):
        if f.model != g.model:
            raise ModelMismatchError("pointwise product needs a common model")
        sup = None if f.sup_bound is None or g.sup_bound is None \
            else f.sup_bound * g.sup_bound
        super().__init__(f.model, tail=_product_tail(f, g),
                         label=label or f"({f.label})*({g.label})", sup_bound=sup)
        self.factors = (f, g)

    def _eval(self, el):
        f, g = self.factors
        return f(el) * g(el)

    def values(self, elements):
        f, g = self.factors
        return f.values(elements) * g.values(elements)

    def gram(self, window, convention="pd"):
        f, g = self.factors
        return f.gram(window, convention) * g.gram(window, convention)


class PowerFunction(GroupFunction):
    def __init__(self, f: GroupFunction, k: int):
        if k < 1:
            raise PreconditionError("pointwise power needs k >= 1")
        sup = None if f.sup_bound is None else f.sup_bound**k
        super().__init__(f.model, tail=_power_tail(f.tail, k),
                         label=f"({f.label})^{k}", sup_bound=sup)
        self.base, self.k = f, k

    def _eval(self, el):
        return self.base(el) ** self.k

    def values(self, elements):
        return self.base.values(elements) ** self.k

    def gram(self, window, convention="pd"):
        return self.base.gram(window, convention) ** self.k


class TranslateFunction(GroupFunction):
    """Left translate (g.h)(s) = h(g^-1 s) or right translate (h.g)(s) = h(sg)."""

    def __init__(self, f: GroupFunction, g: GroupElement, side: str):
        if f.model != g.model:
            raise ModelMismatchError("translation element must share the model")
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        super().__init__(f.model, tail=_translate_tail(f.tail, g.length),
                         label=f"{side}-translate[{g!r}]({f.label})",
                         sup_bound=f.sup_bound)
        self.base, self.g, self.side = f, g, side

    def _eval(self, el):
        if self.side == "left":
            return self.base(compose(self.g.inverse(), el))
        return self.base(compose(el, self.g))


class AdjointConvolveFunction(GroupFunction):
    """f^* * f for finitely supported f; positive definite by construction."""

    def __init__(self, support: dict[GroupElement, complex], model, label=""):
        if not support:
            raise PreconditionError("adjoint_convolve needs a nonzero function")
        radius = max(el.length for el in support)
        sup = sum(abs(v) ** 2 for v in support.values())
        super().__init__(model, tail=FiniteSupport(2 * radius),
                         label=label or "f^* * f", sup_bound=float(sup))
        self.support = dict(support)

    def _eval(self, el):
        # (f^* * f)(s) = sum_u conj(f(u)) f(u s)
        acc = 0j
        for u, cu in self.support.items():
            v = self.support.get(compose(u, el))
            if v is not None:
                acc += np.conj(cu) * v
        return acc


# -- certificate propagation -------------------------------------------------


def _product_tail(f: GroupFunction, g: GroupFunction) -> TailCertificate | None:
    tf, tg = f.tail, g.tail
    for a, b in ((tf, tg), (tg, tf)):
        if isinstance(a, FiniteSupport):
            return FiniteSupport(a.radius)
    for a, b, bf in ((tf, tg, g), (tg, tf, f)):
        if isinstance(a, ExpDecay):
            if isinstance(b, ExpDecay):
                return ExpDecay(a.amplitude * b.amplitude, a.ratio * b.ratio)
            if bf.sup_bound is not None:
                return ExpDecay(a.amplitude * bf.sup_bound, a.ratio)
    if isinstance(tf, SphereSupSequence) and g.sup_bound is not None:
        return SphereSupSequence(tuple(s * g.sup_bound for s in tf.sups),
                                 tf.limit_zero)
    if isinstance(tg, SphereSupSequence) and f.sup_bound is not None:
        return SphereSupSequence(tuple(s * f.sup_bound for s in tg.sups),
                                 tg.limit_zero)
    return None


def _power_tail(tail: TailCertificate | None, k: int) -> TailCertificate | None:
    if isinstance(tail, FiniteSupport):
        return tail
    if isinstance(tail, ExpDecay):
        return ExpDecay(tail.amplitude**k, tail.ratio**k)
    if isinstance(tail, SphereSupSequence):
        return SphereSupSequence(tuple(s**k for s in tail.sups), tail.limit_zero)
    if isinstance(tail, BoundedBelow):
        return BoundedBelow(tail.bound**k, tail.outside_radius)
    return None


def _translate_tail(tail: TailCertificate | None, shift: int) -> TailCertificate | None:
    if isinstance(tail, FiniteSupport):
        return FiniteSupport(tail.radius + shift)
    if isinstance(tail, ExpDecay):
        return ExpDecay(tail.amplitude * tail.ratio ** (-shift), tail.ratio)
    if isinstance(tail, SphereSupSequence):
        sups = tail.sups
        if len(sups) <= shift:
            return None
        shifted = tuple(
            max(sups[max(k - shift, 0): k + shift + 1])
            for k in range(len(sups) - shift)
        )
        return SphereSupSequence(shifted, tail.limit_zero)
    if isinstance(tail, BoundedBelow):
        return BoundedBelow(tail.bound, tail.outside_radius + shift)
    return None


# -- public transform API ------------------------------------------------------


def product(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    return ProductFunction(f, g)


def power(f: GroupFunction, k: int) -> GroupFunction:
    return PowerFunction(f, k)


def translate_left(g: GroupElement, f: GroupFunction) -> GroupFunction:
    return TranslateFunction(f, g, "left")


def translate_right(f: GroupFunction, g: GroupElement) -> GroupFunction:
    return TranslateFunction(f, g, "right")


def adjoint_convolve(f: GroupFunction | dict[GroupElement, complex]) -> GroupFunction:
    """f^* * f.  The input must be finitely supported with known support."""
    if isinstance(f, dict):
        some = next(iter(f))
        return AdjointConvolveFunction(f, some.model)
    if isinstance(f, TableFunction):
        return AdjointConvolveFunction(
            {el: v for el, v in f.table.items() if v != 0}, f.model,
            label=f"({f.label})^* * ({f.label})")
    if isinstance(f, GroupFunction) and isinstance(f.tail, FiniteSupport):
        window = ball(f.model, f.tail.radius)
        table = {el: f(el) for el in window.elements if f(el) != 0}
        return AdjointConvolveFunction(table, f.model,
                                       label=f"({f.label})^* * ({f.label})")
    raise UnsupportedModelError(
        "adjoint_convolve needs a finitely supported function")


# ---------------------------------------------------------------------------
# named families
# ---------------------------------------------------------------------------


def word_length_function(model: GroupModel) -> RadialFunction:
    return RadialFunction(model, lambda k: float(k), label="wordlength")


def delta_e(model: GroupModel) -> RadialFunction:
    return RadialFunction(model, lambda k: 1.0 if k == 0 else 0.0,
                          tail=FiniteSupport(0), label="delta_e", sup_bound=1.0)


def constant_one(model: GroupModel) -> RadialFunction:
    return RadialFunction(model, lambda k: 1.0, tail=BoundedBelow(1.0),
                          label="one", sup_bound=1.0)


def haagerup(model: GroupModel, n: float) -> RadialFunction:
    """h_n(s) = exp(-|s|/n), the word-length decay family."""
    if n <= 0:
        raise PreconditionError("haagerup parameter n must be positive")
    c = math.exp(-1.0 / n)
    return RadialFunction(model, lambda k: c**k, tail=ExpDecay(1.0, c),
                          label=f"haagerup:n={n:g}", sup_bound=1.0,
                          geometric=(1.0, c))


def schoenberg(psi: GroupFunction, t: float) -> GroupFunction:
    """exp(-t psi); positive definite whenever psi is of negative type."""
    if t <= 0:
        raise PreconditionError("schoenberg parameter t must be positive")
    label = f"schoenberg:{psi.label},t={t:g}"
    if isinstance(psi, RadialFunction):
        prof = psi.profile
        is_word_length = psi.label == "wordlength"
        tail = ExpDecay(1.0, math.exp(-t)) if is_word_length else None
        geom = (1.0, math.exp(-t)) if is_word_length else None
        return RadialFunction(psi.model, lambda k: complex(np.exp(-t * prof(k))),
                              tail=tail, label=label, sup_bound=1.0 if tail else None,
                              geometric=geom)
    return CallableFunction(psi.model, lambda el: complex(np.exp(-t * psi(el))),
                            label=label)


def folner(model: GroupModel, subset: Iterable[GroupElement]) -> FolnerFunction:
    return FolnerFunction(model, subset)


def folner_box(model: GroupModel, side: int) -> FolnerFunction:
    """Box Folner set [0, side)^rank for free abelian models."""
    from .groups import FreeAbelianModel

    if not isinstance(model, FreeAbelianModel):
        raise UnsupportedModelError("folner boxes are defined for Z^n models")
    import itertools

    members = [
        model.element(model.word_of_exponents(exps))
        for exps in itertools.product(range(side), repeat=model.rank)
    ]
    fn = FolnerFunction(model, members, label=f"folner:box={side}")
    return fn


def folner_ball(model: GroupModel, radius: int) -> FolnerFunction:
    members = ball(model, radius).elements
    return FolnerFunction(model, members, label=f"folner:ball={radius}")


def make_family(kind: str, model: GroupModel, **params) -> GroupFunction:
    """Named constructor used by config/CLI: haagerup, schoenberg, folner."""
    if kind == "haagerup":
        return haagerup(model, params["n"])
    if kind == "schoenberg":
        psi = params.get("psi") or word_length_function(model)
        return schoenberg(psi, params["t"])
    if kind == "folner":
        if "box" in params:
            return folner_box(model, int(params["box"]))
        if "ball" in params:
            return folner_ball(model, int(params["ball"]))
        return folner(model, params["subset"])
    raise ValueError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# window checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowCheck:
    passed: bool
    min_eigenvalue: float | None
    scale: float
    hermitian_defect: float
    tol: float
    window_size: int

    @property
    def threshold(self) -> float:
        return self.tol * (1.0 + self.scale)


def pd_window_check(h: GroupFunction, window: Sequence[GroupElement] | Ball,
                    tol: float = 1e-8) -> WindowCheck:
    """PSD check of the matrix [h(s_i s_j^-1)] over the window.

    Raises HermitianStructureError when the matrix is not Hermitian within
    tolerance (a structural failure, distinct from indefiniteness).
    """
    _require_distinct(window)
    mat = h.gram(window, convention="pd")
    verdict = _linalg.psd_verdict(mat, tol)
    return WindowCheck(verdict.passed, verdict.min_eigenvalue, verdict.scale,
                       verdict.hermitian_defect, tol, mat.shape[0])


def cnd_window_check(psi: GroupFunction, window: Sequence[GroupElement] | Ball,
                     tol: float = 1e-8) -> WindowCheck:
    """Conditionally-negative-type check of psi over the window.

    Builds N[i, j] = psi(s_i s_j^-1) and verifies c* N c <= tol for all
    centered vectors (sum c_i = 0), i.e. PSD-ness of -P N P with P the
    centering projector.  Precondition failures (complex values,
    psi(e) != 0, asymmetry) raise PreconditionError.
    """
    els = window.elements if isinstance(window, Ball) else list(window)
    _require_distinct(els)
    if not els:
        raise PreconditionError("cnd check needs a nonempty window")
    vals = psi.values(els)
    scale0 = 1.0 + float(np.max(np.abs(vals)))
    if np.max(np.abs(vals.imag)) > tol * scale0:
        raise PreconditionError("cnd check requires a real-valued function")
    dev = abs(psi(psi.model.identity))
    if dev > tol * scale0:
        raise PreconditionError(f"cnd check requires psi(e) = 0, got {dev:.3g}")
    for el in els:
        if abs(psi(el) - psi(el.inverse())) > tol * scale0:
            raise PreconditionError(f"cnd check requires psi(s) = psi(s^-1); "
                                    f"violated at s = {el!r}")
    mat = psi.gram(els, convention="pd").real
    n = mat.shape[0]
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    centered = centering @ mat @ centering
    centered = (centered + centered.T) / 2.0
    scale = float(np.max(np.sum(np.abs(mat), axis=1)))
    eigs = scipy.linalg.eigvalsh(centered)
    violation = float(eigs[-1])
    passed = violation <= tol * (1.0 + scale)
    return WindowCheck(passed, violation, scale, 0.0, tol, n)


def _require_distinct(window) -> None:
    els = window.elements if isinstance(window, Ball) else list(window)
    if len(set(els)) != len(els):
        raise PreconditionError("window elements must be pairwise distinct")


# ---------------------------------------------------------------------------
# ideals and membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdealSpec:
    """One of the translation-invariant ideals used by the completions.

    kind: cc | c0 | lp | linf | l2plus | tideal  (lp carries the exponent).
    """

    kind: str
    p: float | None = None

    _KINDS = ("cc", "c0", "lp", "linf", "l2plus", "tideal")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown ideal kind {self.kind!r}")
        if self.kind == "lp" and (self.p is None or self.p < 1):
            raise ValueError("lp ideal needs exponent p >= 1")

    @staticmethod
    def parse(text: str) -> "IdealSpec":
        text = text.strip().lower()
        if text.startswith("lp"):
            p = float(text.split(":", 1)[1].replace("p=", "")) if ":" in text else 2.0
            return IdealSpec("lp", p)
        return IdealSpec(text)

    def __str__(self):
        return f"lp:p={self.p:g}" if self.kind == "lp" else self.kind


@dataclass(frozen=True)
class Membership:
    verdict: str  # member | non_member | undecided
    witness: str

    def __bool__(self):
        return self.verdict == "member"


@dataclass(frozen=True)
class LpNormResult:
    partial: float
    tail_bound: float | None  # None = finite but not quantified
    status: str               # finite | divergent | undecided
    p: float
    radius: int

    @property
    def total(self) -> float | None:
        if self.status == "finite" and self.tail_bound is not None \
                and math.isfinite(self.tail_bound):
            return self.partial + self.tail_bound
        return None


def _sphere_series_tail(model: GroupModel, amplitude: float, x: float,
                        radius: int, p: float) -> float:
    """Rigorous upper bound on sum_{k>radius} sphere(k) * (amplitude * x^k)^p.

    Requires growth * x^p < 1.  Terms use exact sphere counts; after the
    explicit summation the remainder is capped by the geometric growth
    envelope, keeping the bound valid.
    """
    q = x**p
    growth = model.growth_constant()
    if growth * q >= 1.0:
        return math.inf
    ap = amplitude**p
    k = radius + 1
    # terms are tracked multiplicatively so the exact integer sphere counts
    # never get converted to float outright (they overflow around k ~ 600)
    head_log = math.log(ap) + k * (math.log(growth) + p * math.log(x))
    if head_log < -650.0:
        return ap * (growth * q) ** k / (1.0 - growth * q)
    sphere_prev = model.sphere_count(k)
    term = float(sphere_prev) * ap * q**k
    acc = 0.0
    while True:
        acc += term
        cap = ap * (growth * q) ** (k + 1) / (1.0 - growth * q)
        if cap <= 1e-17 * (acc + 1e-300) or k > radius + 100_000:
            return acc + cap
        k += 1
        sphere = model.sphere_count(k)
        term *= (sphere / sphere_prev) * q if sphere_prev else 0.0
        sphere_prev = sphere


def lp_norm(h: GroupFunction, p: float, radius: int,
            budget: int | None = None) -> LpNormResult:
    """Partial l^p sum over the ball plus a certificate-driven tail bound.

    The tail status follows the geometric growth envelope: an ExpDecay
    certificate yields a finite closed-form tail exactly when
    growth * ratio**p < 1, and is classified divergent otherwise (the
    envelope criterion used throughout the completions).
    """
    if p < 1:
        raise PreconditionError("lp_norm needs p >= 1")
    if radius < 0:
        raise PreconditionError("lp_norm needs radius >= 0")
    model = h.model
    if isinstance(h, RadialFunction):
        prof = np.abs(h.profile_values(radius)) ** p
        partial = float(sum(model.sphere_count(k) * prof[k] for k in range(radius + 1)))
    else:
        window = ball(model, radius) if budget is None \
            else ball(model, radius, budget=budget)
        partial = float(np.sum(np.abs(h.values(window)) ** p))
    tail = h.tail

    if model.is_finite:
        diam = model.order  # crude but correct: all spheres beyond are empty
        if isinstance(h, RadialFunction):
            prof = np.abs(h.profile_values(diam)) ** p
            rest = float(sum(model.sphere_count(k) * prof[k]
                             for k in range(radius + 1, diam + 1)))
        else:
            whole = ball(model, diam).elements
            rest = float(sum(abs(h(el)) ** p for el in whole if el.length > radius))
        return LpNormResult(partial, rest, "finite", p, radius)

    if isinstance(tail, FiniteSupport):
        if radius >= tail.radius:
            return LpNormResult(partial, 0.0, "finite", p, radius)
        if h.sup_bound is not None:
            count = model.ball_size(tail.radius) - model.ball_size(radius)
            return LpNormResult(partial, h.sup_bound**p * count, "finite", p, radius)
        return LpNormResult(partial, None, "finite", p, radius)
    if isinstance(tail, ExpDecay):
        bound = _sphere_series_tail(model, tail.amplitude, tail.ratio, radius, p)
        status = "finite" if math.isfinite(bound) else "divergent"
        return LpNormResult(partial, bound, status, p, radius)
    if isinstance(tail, BoundedBelow):
        return LpNormResult(partial, math.inf, "divergent", p, radius)
    return LpNormResult(partial, math.inf, "undecided", p, radius)


def ideal_membership(h: GroupFunction, ideal: IdealSpec) -> Membership:
    """Three-valued, certificate-driven membership with witness.

    Undecided is returned whenever the certificate cannot settle the
    question; the checker never extrapolates from finitely many values.
    """
    tail = h.tail
    if h.model.is_finite:
        return Membership("member", "finite group: every ideal is everything")

    if ideal.kind == "linf":
        return Membership("member", "desk-scale functions are bounded")

    if ideal.kind == "cc":
        if isinstance(tail, FiniteSupport):
            return Membership("member", f"finite support of radius {tail.radius}")
        if isinstance(tail, BoundedBelow):
            return Membership("non_member",
                              f"|h| >= {tail.bound:g} off ball({tail.outside_radius})")
        return Membership("undecided", "certificate does not settle finite support")

    if ideal.kind == "c0":
        return _c0_membership(tail)

    if ideal.kind == "lp":
        res = lp_norm(h, ideal.p, 0)
        if res.status == "finite":
            witness = "finite support" if res.tail_bound is None \
                else f"tail bound {res.tail_bound:.6g}"
            return Membership("member", witness)
        if res.status == "divergent":
            witness = "envelope series diverges (growth * ratio^p >= 1)" \
                if isinstance(tail, ExpDecay) else "bounded below off a finite set"
            return Membership("non_member", witness)
        return Membership("undecided", "certificate does not bound the tail")

    if ideal.kind == "l2plus":
        if isinstance(tail, FiniteSupport):
            return Membership("member", "finite support")
        if isinstance(tail, ExpDecay):
            growth = h.model.growth_constant()
            if growth * tail.ratio**2 <= 1.0:
                return Membership(
                    "member", f"growth*ratio^(2+eps) < 1 for every eps > 0 "
                              f"(growth*ratio^2 = {growth * tail.ratio**2:.6g})")
            return Membership("non_member",
                              "envelope series diverges for small eps")
        if isinstance(tail, BoundedBelow):
            return Membership("non_member", "bounded below off a finite set")
        return Membership("undecided", "certificate does not bound the tail")

    if ideal.kind == "tideal":
        c0 = _c0_membership(tail)
        if c0.verdict == "member":
            return Membership("member", f"c0 member: {c0.witness}")
        if isinstance(tail, SphereSupSequence) and tail.limit_zero:
            return Membership("member", "sphere sups have a null subsequence")
        if isinstance(tail, BoundedBelow):
            return Membership(
                "non_member",
                f"inf_(s outside F) |h| >= {tail.bound:g} for F = "
                f"ball({tail.outside_radius})")
        return Membership("undecided", "certificate does not settle the liminf")

    raise ValueError(f"unhandled ideal {ideal}")


def _c0_membership(tail: TailCertificate | None) -> Membership:
    if isinstance(tail, FiniteSupport):
        return Membership("member", f"finite support of radius {tail.radius}")
    if isinstance(tail, ExpDecay):
        return Membership("member",
                          f"|h| <= {tail.amplitude:g} * {tail.ratio:g}^|s| -> 0")
    if isinstance(tail, SphereSupSequence) and tail.limit_zero:
        return Membership("member", "sphere sups decrease to zero")
    if isinstance(tail, BoundedBelow):
        return Membership("non_member",
                          f"|h| >= {tail.bound:g} outside a finite set")
    return Membership("undecided", "certificate does not settle vanishing at infinity")
