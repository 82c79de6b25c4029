"""Group-ring elements and norm estimation in the competing completions.

The reduced norm is approached from below by compressing left convolution to
balls (power iteration on sparse operators) and from above by the Haagerup
inequality on free groups, its powered refinement, and the l1 bound.  GNS
windows of ideal-member PD functions give lower bounds for the ideal-
completion norms.  All estimates are labeled with their bound direction;
the supremum defining the D-norm is never claimed, only bracketed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse

from . import _linalg
from .errors import (
    GramIndefiniteError,
    InvalidHomomorphismError,
    ModelMismatchError,
    PreconditionError,
    UnsupportedModelError,
)
from .functions import (
    GroupFunction,
    IdealSpec,
    ProductFunction,
    RadialFunction,
    folner_ball,
    haagerup,
    ideal_membership,
    pd_window_check,
)
from .groups import (
    DEFAULT_BUDGET,
    Ball,
    FreeModel,
    GroupElement,
    GroupModel,
    ball,
    compose,
)

# ---------------------------------------------------------------------------
# group ring
# ---------------------------------------------------------------------------


class GroupRingElement:
    """Finitely supported formal sum sum_s alpha_s s with exact support."""

    def __init__(self, model: GroupModel, terms: dict[GroupElement, complex]):
        self.model = model
        self.terms = {el: complex(c) for el, c in terms.items() if c != 0}
        for el in self.terms:
            if el.model != model:
                raise ModelMismatchError("term outside the element's model")

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def delta(el: GroupElement) -> "GroupRingElement":
        return GroupRingElement(el.model, {el: 1.0})

    @staticmethod
    def gensum(model: GroupModel) -> "GroupRingElement":
        """Sum of the symmetric generating set (the Kesten element)."""
        return GroupRingElement(model, {g: 1.0 for g in model.generators()})

    # -- structure --------------------------------------------------------------

    @property
    def support_radius(self) -> int:
        return max((el.length for el in self.terms), default=0)

    def coefficient_sum(self) -> complex:
        return sum(self.terms.values(), 0j)

    def adjoint(self) -> "GroupRingElement":
        return GroupRingElement(
            self.model, {el.inverse(): np.conj(c) for el, c in self.terms.items()})

    def is_selfadjoint(self, tol: float = 0.0) -> bool:
        adj = self.adjoint()
        keys = set(self.terms) | set(adj.terms)
        return all(
            abs(self.terms.get(k, 0) - adj.terms.get(k, 0)) <= tol for k in keys)

    # -- algebra -----------------------------------------------------------------

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        if self.model != other.model:
            raise ModelMismatchError("sum needs a common model")
        out = dict(self.terms)
        for el, c in other.terms.items():
            out[el] = out.get(el, 0) + c
        return GroupRingElement(self.model, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "GroupRingElement":
        return GroupRingElement(
            self.model, {el: scalar * c for el, c in self.terms.items()})

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        """Convolution product (finite supports)."""
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        if self.model != other.model:
            raise ModelMismatchError("product needs a common model")
        out: dict[GroupElement, complex] = {}
        for s, a in self.terms.items():
            for t, b in other.terms.items():
                st = compose(s, t)
                out[st] = out.get(st, 0) + a * b
        return GroupRingElement(self.model, out)

    def __eq__(self, other):
        return (isinstance(other, GroupRingElement)
                and self.model == other.model and self.terms == other.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = [f"({c:g})*{el!r}" for el, c in sorted(
            self.terms.items(), key=lambda kv: (kv[0].length, kv[0].word))]
        return " + ".join(bits)


def hom_pushforward(assignment: dict[str, GroupElement],
                    x: GroupRingElement,
                    target: GroupModel | None = None) -> GroupRingElement:
    """Push a group-ring element through the homomorphism sending each
    source generator symbol to the assigned target element.

    For non-free sources the assignment must kill the defining relators,
    checked exactly; violations raise InvalidHomomorphismError naming the
    relator.  Coefficients of colliding images are combined, so the
    coefficient sum is preserved.
    """
    from .groups import FiniteCyclicModel, FreeAbelianModel, InfiniteDihedralModel

    source = x.model
    if set(assignment) != set(source.symbols):
        raise PreconditionError(
            f"assignment must cover the generators {source.symbols}")
    target = target or next(iter(assignment.values())).model
    for el in assignment.values():
        if el.model != target:
            raise ModelMismatchError("assignment images must share one target model")

    def image_of_letter(letter: int) -> GroupElement:
        if isinstance(source, InfiniteDihedralModel):
            return assignment[source.symbols[letter]]
        base = assignment[source.symbols[letter // 2]]
        return base if letter % 2 == 0 else base.inverse()

    def image(el: GroupElement) -> GroupElement:
        out = target.identity
        for letter in el.word:
            out = compose(out, image_of_letter(letter))
        return out

    # relator check
    if isinstance(source, FreeAbelianModel):
        syms = source.symbols
        for i in range(len(syms)):
            for j in range(i + 1, len(syms)):
                a, b = assignment[syms[i]], assignment[syms[j]]
                if compose(a, b) != compose(b, a):
                    raise InvalidHomomorphismError(
                        f"{syms[i]}{syms[j]}{syms[i]}^-1{syms[j]}^-1")
    elif isinstance(source, FiniteCyclicModel):
        g = assignment[source.symbols[0]]
        acc = target.identity
        for _ in range(source.order):
            acc = compose(acc, g)
        if acc != target.identity:
            raise InvalidHomomorphismError(f"{source.symbols[0]}^{source.order}")
    elif isinstance(source, InfiniteDihedralModel):
        for s in source.symbols:
            g = assignment[s]
            if compose(g, g) != target.identity:
                raise InvalidHomomorphismError(f"{s}^2")

    out: dict[GroupElement, complex] = {}
    for el, c in x.terms.items():
        im = image(el)
        out[im] = out.get(im, 0) + c
    return GroupRingElement(target, out)


# ---------------------------------------------------------------------------
# convolution operators and norm estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormEstimate:
    value: float
    kind: str       # lower_bound | upper_bound | exact
    method: str
    radius: int | None = None
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"value": self.value, "kind": self.kind, "method": self.method}
        if self.radius is not None:
            out["radius"] = self.radius
        out.update({k: v for k, v in sorted(self.meta.items())})
        return out


class ConvolutionOperator:
    """Sparse left convolution L_x : l2(B_R) -> l2(B_{R+r}).

    The domain ball is subject to the element budget; the codomain is the
    padded ball B_{R+r} (r = support radius of x), which is exempt so that
    documented radii remain reachable at the default budget.
    Entry (t, s) = alpha_{t s^-1}.
    """

    def __init__(self, x: GroupRingElement, radius: int,
                 budget: int | None = DEFAULT_BUDGET):
        self.x = x
        self.radius = radius
        self.domain = ball(x.model, radius, budget=budget)
        self.pad = x.support_radius
        self.codomain = ball(x.model, radius + self.pad, budget=None)
        n = len(self.domain)
        real = all(abs(c.imag) == 0 for c in x.terms.values())
        dtype = np.float64 if real else np.complex128
        rows: list[np.ndarray] = []
        cols = np.arange(n, dtype=np.int64)
        data: list[np.ndarray] = []
        col_list: list[np.ndarray] = []
        for u, coeff in x.terms.items():
            idx = self.domain.left_mult_indices(u, self.codomain)
            rows.append(idx)
            col_list.append(cols)
            val = coeff.real if real else coeff
            data.append(np.full(n, val, dtype=dtype))
        if rows:
            rows_all = np.concatenate(rows)
            cols_all = np.concatenate(col_list)
            data_all = np.concatenate(data)
        else:
            rows_all = cols_all = np.zeros(0, dtype=np.int64)
            data_all = np.zeros(0, dtype=dtype)
        self.matrix = scipy.sparse.csr_matrix(
            (data_all, (rows_all, cols_all)), shape=(len(self.codomain), n))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def _power_iteration_top_sv(op: scipy.sparse.csr_matrix, eig_tol: float,
                            max_iter: int, seed: int) -> tuple[float, int, bool]:
    """Largest singular value of op from below via power iteration on op*op.

    The returned value is a Rayleigh quotient, hence a certified lower
    bound regardless of convergence.
    """
    n = op.shape[1]
    rng = np.random.default_rng(seed)
    v = np.zeros(n)
    v[0] = 1.0
    v = v + 1e-3 * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    oph = op.conj().T.tocsr()
    lam_prev = 0.0
    stable = 0
    for it in range(1, max_iter + 1):
        w = op @ v
        lam = float(np.real(np.vdot(w, w)))  # = v* (op* op) v, since ||v|| = 1
        u = oph @ w
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0, it, True
        v = u / nu
        if abs(lam - lam_prev) <= eig_tol * max(lam, 1e-300):
            stable += 1
            if stable >= 3:
                return math.sqrt(lam), it, True
        else:
            stable = 0
        lam_prev = lam
    return math.sqrt(lam_prev), max_iter, False


def reduced_norm_lower(x: GroupRingElement, radius: int, *,
                       eig_tol: float = 1e-8, max_iter: int = 10_000,
                       seed: int = 0,
                       budget: int | None = DEFAULT_BUDGET) -> NormEstimate:
    """||lambda(x)|| from below: norm of L_x restricted to l2(B_radius).

    No output truncation occurs (the codomain ball is padded), so this is a
    certified lower bound of the reduced norm, nondecreasing in the radius.
    """
    op = ConvolutionOperator(x, radius, budget=budget)
    value, iters, converged = _power_iteration_top_sv(
        op.matrix, eig_tol, max_iter, seed)
    meta = {"iterations": iters, "converged": converged, "eig_tol": eig_tol}
    if not converged:
        meta["note"] = "iteration cap reached; value is the best Rayleigh quotient"
    return NormEstimate(value, "lower_bound", "power-iteration", radius, meta)


def reduced_norm_sweep(x: GroupRingElement, radii: Sequence[int], *,
                       eig_tol: float = 1e-8, seed: int = 0,
                       budget: int | None = DEFAULT_BUDGET) -> list[dict]:
    """Reduced-norm lower bounds over a radius sweep (norm-vs-R table)."""
    rows = []
    for r in radii:
        est = reduced_norm_lower(x, r, eig_tol=eig_tol, seed=seed, budget=budget)
        rows.append({"radius": r, "value": est.value,
                     "converged": est.meta["converged"]})
    return rows


def haagerup_upper_bound(x: GroupRingElement) -> NormEstimate:
    """Free-group Haagerup inequality: ||lambda(x)|| <= sum_k (k+1) ||x_k||_2."""
    if not isinstance(x.model, FreeModel):
        raise UnsupportedModelError("the Haagerup inequality bound needs a free model")
    by_sphere: dict[int, float] = {}
    for el, c in x.terms.items():
        by_sphere[el.length] = by_sphere.get(el.length, 0.0) + abs(c) ** 2
    value = sum((k + 1) * math.sqrt(v) for k, v in by_sphere.items())
    return NormEstimate(value, "upper_bound", "haagerup-inequality",
                        meta={"sphere_l2": {k: math.sqrt(v)
                                            for k, v in sorted(by_sphere.items())}})


def trivial_norm(x: GroupRingElement) -> NormEstimate:
    """|sum alpha_s|: the trivial representation's exact value.

    Always a lower bound for the full norm; equal to it exactly when all
    coefficients are nonnegative reals (and flagged exact only then).
    """
    value = abs(x.coefficient_sum())
    nonneg = all(c.imag == 0 and c.real >= 0 for c in x.terms.values())
    kind = "exact" if nonneg else "lower_bound"
    return NormEstimate(value, kind, "trivial-representation",
                        meta={"nonnegative_coefficients": nonneg})


def l1_upper_bound(x: GroupRingElement) -> NormEstimate:
    value = sum(abs(c) for c in x.terms.values())
    return NormEstimate(value, "upper_bound", "l1-bound")


def _is_gensum(x: GroupRingElement) -> bool:
    gens = x.model.generators()
    return (len(x.terms) == len(gens)
            and all(x.terms.get(g) == 1.0 for g in gens))


def kesten_exact(x: GroupRingElement) -> NormEstimate | None:
    """Exact reduced norm 2 sqrt(2m-1) of the generator sum on free groups."""
    if isinstance(x.model, FreeModel) and _is_gensum(x):
        value = 2.0 * math.sqrt(2 * x.model.rank - 1)
        return NormEstimate(value, "exact", "kesten-closed-form")
    return None


def powered_haagerup_upper(x: GroupRingElement, *, max_support: int = 150_000,
                           max_squarings: int = 3) -> NormEstimate:
    """Sharper reduced-norm upper bound on free groups.

    Uses ||lambda(x)||^(2j) = ||lambda((x* x)^j)|| and the Haagerup
    inequality on the repeatedly squared element; the (k+1) polynomial
    factor washes out in the 2j-th root.
    """
    if not isinstance(x.model, FreeModel):
        raise UnsupportedModelError("powered Haagerup bound needs a free model")
    z = x.adjoint() * x  # selfadjoint, ||lambda(x)||^2 = ||lambda(z)||
    power = 1
    best = math.sqrt(haagerup_upper_bound(z).value)
    for _ in range(max_squarings):
        if len(z.terms) ** 2 > 4 * max_support:
            break
        z = z * z
        power *= 2
        if len(z.terms) > max_support:
            break
        bound = haagerup_upper_bound(z).value ** (1.0 / (2 * power))
        best = min(best, bound)
    return NormEstimate(best, "upper_bound", "powered-haagerup",
                        meta={"power": 2 * power})


def reduced_norm_upper(x: GroupRingElement) -> NormEstimate:
    """Best available certified upper bound for the reduced norm."""
    candidates = [l1_upper_bound(x)]
    exact = kesten_exact(x)
    if exact is not None:
        candidates.append(exact)
    if isinstance(x.model, FreeModel):
        candidates.append(haagerup_upper_bound(x))
        candidates.append(powered_haagerup_upper(x))
    best = min(candidates, key=lambda e: e.value)
    return best


# ---------------------------------------------------------------------------
# GNS window norms
# ---------------------------------------------------------------------------

_DENSE_GRAM_LIMIT = 6_000


def gns_norm_lower(h: GroupFunction, x: GroupRingElement, radius: int, *,
                   tol: float = 1e-8, cutoff_ratio: float = 1e-10,
                   budget: int | None = DEFAULT_BUDGET) -> NormEstimate:
    """Norm of pi_h(x) compressed to the window: a lower bound for ||x||_D
    whenever h is a D-member PD function.

    Computed as the square root of the largest generalized eigenvalue of
    (L_x* G_pad L_x, G_R) on the numerical range of the Gram matrix.  Large
    radial windows on free groups use the exact sphere-averaged subspace
    (still a certified lower bound) instead of the dense padded Gram.
    """
    if h.model != x.model:
        raise ModelMismatchError("function and element must share the model")
    op = ConvolutionOperator(x, radius, budget=budget)
    npad = len(op.codomain)
    radial_fast = (
        isinstance(h, RadialFunction) and h.geometric is not None
        and isinstance(h.model, FreeModel)
    )
    if npad > _DENSE_GRAM_LIMIT:
        if not radial_fast:
            raise PreconditionError(
                f"padded window of {npad} elements needs the radial fast path; "
                "reduce the radius")
        value, rank = _radial_gns_value(h, op, cutoff_ratio)
        meta = {"subspace": "radial", "gram_rank": rank}
        return NormEstimate(value, "lower_bound", "gns-window", radius, meta)
    gram_pad = h.gram(op.codomain, convention="gns")
    verdict = _linalg.psd_verdict(gram_pad, tol)
    if not verdict.passed:
        raise GramIndefiniteError(verdict.min_eigenvalue, verdict.threshold)
    n = len(op.domain)
    gram = gram_pad[:n, :n]
    lop = op.matrix.tocsc()
    a = lop.conj().T @ gram_pad          # sparse @ dense -> dense (n x npad)
    m = (lop.T @ a.T).T                  # a @ L via transposes, stays dense
    top = _linalg.top_generalized_eigenvalue(m, gram, cutoff_ratio)
    value = math.sqrt(max(top, 0.0))
    return NormEstimate(value, "lower_bound", "gns-window", radius,
                        {"gram_size": n, "padded_size": npad})


def tree_kernel_matvec(window: Ball, ratio: float, vec: np.ndarray) -> np.ndarray:
    """w[t] = sum_s ratio**d(t,s) v[s] on a free-group ball, in O(N).

    d is the tree distance |t^-1 s|; the geometric kernel factorizes along
    tree paths, giving the classic up-sweep / down-sweep evaluation.
    """
    parents = window.parent_indices()
    offsets = window.offsets
    up = vec.astype(complex).copy()
    for k in range(window.radius, 0, -1):
        lo, hi = int(offsets[k]), int(offsets[k + 1])
        np.add.at(up, parents[lo:hi], ratio * up[lo:hi])
    w = np.empty_like(up)
    w[0] = up[0]
    for k in range(1, window.radius + 1):
        lo, hi = int(offsets[k]), int(offsets[k + 1])
        w[lo:hi] = up[lo:hi] + ratio * (w[parents[lo:hi]] - ratio * up[lo:hi])
    return w


def _radial_gns_value(h: RadialFunction, op: ConvolutionOperator,
                      cutoff_ratio: float) -> tuple[float, int]:
    """Generalized top eigenvalue restricted to sphere-radial vectors.

    Exact Gram pairings of sphere indicators via the O(N) tree kernel; the
    restriction can only lower the value, so the bound stays certified.
    """
    amp, ratio = h.geometric
    dom, cod = op.domain, op.codomain
    lop = op.matrix.tocsc()
    nr = dom.radius
    small_g = np.empty((nr + 1, nr + 1), dtype=complex)
    small_m = np.empty((nr + 1, nr + 1), dtype=complex)
    dom_indicators = []
    images = []
    for k in range(nr + 1):
        u = np.zeros(len(dom))
        u[dom.offsets[k]: dom.offsets[k + 1]] = 1.0
        dom_indicators.append(u)
        images.append(lop @ u)
    for k, u in enumerate(dom_indicators):
        gu = amp * tree_kernel_matvec(cod, ratio, np.pad(u, (0, len(cod) - len(u))))
        for j in range(nr + 1):
            small_g[j, k] = np.vdot(np.pad(dom_indicators[j],
                                           (0, len(cod) - len(dom))), gu)
    for k, lu in enumerate(images):
        glu = amp * tree_kernel_matvec(cod, ratio, lu.astype(complex))
        for j in range(nr + 1):
            small_m[j, k] = np.vdot(images[j], glu)
    top = _linalg.top_generalized_eigenvalue(small_m, small_g, cutoff_ratio)
    return math.sqrt(max(top, 0.0)), nr + 1


# ---------------------------------------------------------------------------
# Schur multipliers and state composition
# ---------------------------------------------------------------------------


def schur_multiply(h: GroupFunction, x: GroupRingElement) -> GroupRingElement:
    """Coefficient-wise multiplication m_h(x) = sum alpha_s h(s) s."""
    if h.model != x.model:
        raise ModelMismatchError("multiplier and element must share the model")
    return GroupRingElement(x.model, {el: c * h(el) for el, c in x.terms.items()})


def state_compose(phi: GroupFunction, h: GroupFunction) -> GroupFunction:
    """Pointwise product phi * h: the state obtained by composing the state
    phi with the Schur multiplier of h (normalized PD functions are states).
    """
    if abs(phi(phi.model.identity) - 1.0) > 1e-12:
        raise PreconditionError("state_compose needs phi(e) = 1")
    return ProductFunction(phi, h, label=f"({phi.label}) o m[{h.label}]")


# ---------------------------------------------------------------------------
# equality certificates
# ---------------------------------------------------------------------------

_CERT_LABELS = {
    "cc": "amenability witness",
    "c0": "Haagerup witness",
    "tideal": "Property-(T)-ideal witness",
}


@dataclass(frozen=True)
class EqualityCertificate:
    ideal: IdealSpec
    accepted: bool
    label: str
    conv_radius: int
    rows: tuple[dict, ...]
    failures: tuple[str, ...]


def equality_certificate(ideal: IdealSpec, family: Sequence[GroupFunction],
                         conv_radius: int,
                         thresholds: Sequence[float] | None = None, *,
                         psd_tol: float = 1e-8,
                         final_deviation: float = 0.5) -> EqualityCertificate:
    """Certificate that the family witnesses C*(G) = C*_D(G).

    Accepts iff every member passes the PD window check on ball(conv_radius),
    is a certified member of the ideal, and the deviations
    sup_{|s| <= conv_radius} |h_n(s) - 1| stay below the given decreasing
    threshold schedule.  With thresholds=None the deviations themselves must
    be nonincreasing and end below final_deviation.
    """
    if not family:
        raise PreconditionError("certificate needs a nonempty family")
    model = family[0].model
    window = ball(model, conv_radius)
    one = np.ones(len(window))
    rows = []
    failures = []
    deviations = []
    for i, h in enumerate(family):
        row: dict = {"label": h.label}
        check = pd_window_check(h, window, tol=psd_tol)
        row["pd_passed"] = check.passed
        row["min_eigenvalue"] = check.min_eigenvalue
        if not check.passed:
            failures.append(f"{h.label}: window PD check failed "
                            f"(min eig {check.min_eigenvalue:.3e})")
        member = ideal_membership(h, ideal)
        row["membership"] = member.verdict
        row["membership_witness"] = member.witness
        if member.verdict != "member":
            failures.append(f"{h.label}: not a certified member of {ideal} "
                            f"({member.verdict}: {member.witness})")
        deviation = float(np.max(np.abs(h.values(window) - one)))
        row["deviation"] = deviation
        deviations.append(deviation)
        if thresholds is not None:
            row["threshold"] = float(thresholds[i])
            if deviation >= thresholds[i]:
                failures.append(f"{h.label}: deviation {deviation:.6g} not below "
                                f"threshold {thresholds[i]:.6g}")
        rows.append(row)
    if thresholds is not None:
        if any(thresholds[i + 1] > thresholds[i] for i in range(len(thresholds) - 1)):
            failures.append("threshold schedule is not decreasing")
    else:
        if any(deviations[i + 1] > deviations[i] + 1e-12
               for i in range(len(deviations) - 1)):
            failures.append("deviations are not decreasing along the family")
        if deviations and deviations[-1] > final_deviation:
            failures.append(
                f"final deviation {deviations[-1]:.6g} above {final_deviation}")
    accepted = not failures
    label = _CERT_LABELS.get(ideal.kind, f"{ideal} equality witness") \
        if accepted else "rejected"
    return EqualityCertificate(ideal, accepted, label, conv_radius,
                               tuple(rows), tuple(failures))


# ---------------------------------------------------------------------------
# gap reports
# ---------------------------------------------------------------------------


def default_gns_family(model: GroupModel, ideal: IdealSpec) -> list[GroupFunction]:
    """Ideal-member PD functions used to probe ||.||_D from below."""
    if ideal.kind == "cc":
        return [folner_ball(model, r) for r in (0, 1, 2)]
    return [haagerup(model, n) for n in (1, 2, 4)]


def norm_gap_report(x: GroupRingElement, ideal: IdealSpec, *,
                    radius: int = 8, gns_radius: int = 4,
                    family: Sequence[GroupFunction] | None = None,
                    exact_tol: float = 1e-6, gap_tol: float = 0.05,
                    eig_tol: float = 1e-8, seed: int = 0,
                    budget: int | None = DEFAULT_BUDGET) -> dict:
    """Assemble trivial / reduced / GNS estimates and declare gaps.

    "full neq reduced" is declared when the exact trivial value exceeds the
    certified reduced upper bound by more than exact_tol; "D exceeds
    reduced" when some D-member GNS lower bound does.  Both thresholds are
    configuration and are recorded in the report.
    """
    model = x.model
    triv = trivial_norm(x)
    red_low = reduced_norm_lower(x, radius, eig_tol=eig_tol, seed=seed,
                                 budget=budget)
    red_up = reduced_norm_upper(x)
    fam = list(family) if family is not None else default_gns_family(model, ideal)
    gns_rows = []
    best_gns: NormEstimate | None = None
    for h in fam:
        member = ideal_membership(h, ideal)
        row = {"label": h.label, "membership": member.verdict}
        if member.verdict == "member":
            try:
                est = gns_norm_lower(h, x, gns_radius, budget=budget)
            except GramIndefiniteError as exc:
                row["error"] = str(exc)
            else:
                row["value"] = est.value
                row["radius"] = gns_radius
                if best_gns is None or est.value > best_gns.value:
                    best_gns = est
        gns_rows.append(row)
    gap_full = triv.kind == "exact" and triv.value - red_up.value > exact_tol
    d_exceeds = best_gns is not None and best_gns.value - red_up.value > exact_tol
    consistent = triv.value - red_low.value <= gap_tol
    return {
        "element_support": len(x.terms),
        "model": model.name,
        "ideal": str(ideal),
        "trivial": triv.as_dict(),
        "reduced_lower": red_low.as_dict(),
        "reduced_upper": red_up.as_dict(),
        "gns_lower_bounds": gns_rows,
        "gap_full_vs_reduced": bool(gap_full),
        "d_exceeds_reduced": bool(d_exceeds),
        "consistent_with_equality_at_gap_tol": bool(consistent),
        "tolerances": {"exact_tol": exact_tol, "gap_tol": gap_tol,
                       "eig_tol": eig_tol},
    }


# ---------------------------------------------------------------------------
# quantum-group coproduct
# ---------------------------------------------------------------------------


class TensorSquareElement:
    """Element of the algebraic tensor square, as a sparse pair map."""

    def __init__(self, model: GroupModel,
                 terms: dict[tuple[GroupElement, GroupElement], complex]):
        self.model = model
        self.terms = {k: complex(v) for k, v in terms.items() if v != 0}

    def __eq__(self, other):
        return (isinstance(other, TensorSquareElement)
                and self.model == other.model and self.terms == other.terms)

    def mult_right_first_leg(self, y: GroupRingElement) -> "TensorSquareElement":
        """Multiply by y tensor e on the right: (u, v)(t, e) = (ut, v)."""
        out: dict[tuple[GroupElement, GroupElement], complex] = {}
        for (u, v), c in self.terms.items():
            for t, b in y.terms.items():
                key = (compose(u, t), v)
                out[key] = out.get(key, 0) + c * b
        return TensorSquareElement(self.model, out)


def coproduct(x: GroupRingElement) -> TensorSquareElement:
    """Delta(sum alpha_s s) = sum alpha_s (s tensor s)."""
    return TensorSquareElement(x.model, {(el, el): c for el, c in x.terms.items()})


def coassociativity_defect(x: GroupRingElement) -> float:
    """Max coefficient difference between (Delta ox id)Delta and (id ox Delta)Delta."""
    left: dict = {}
    right: dict = {}
    for (u, v), c in coproduct(x).terms.items():
        left[(u, u, v)] = left.get((u, u, v), 0) + c
        right[(u, v, v)] = right.get((u, v, v), 0) + c
    keys = set(left) | set(right)
    return max((abs(left.get(k, 0) - right.get(k, 0)) for k in keys), default=0.0)


def coproduct_density_rank(model: GroupModel, radius: int, *,
                           budget: int | None = DEFAULT_BUDGET) -> dict:
    """Rank of span{Delta(x)(y ox e)} restricted to B_R ox B_R coordinates.

    Using Delta(s)(t ox e) = st ox s with t drawn from the padded ball
    B_{2R}, every coordinate pair (u, s) in B_R x B_R is reachable via
    t = s^-1 u, so full rank |B_R|^2 is the expected outcome.
    """
    window = ball(model, radius, budget=budget)
    padded = ball(model, 2 * radius, budget=budget)
    found: set[tuple[int, int]] = set()
    for si, s in enumerate(window.elements):
        for t in padded.elements:
            st = compose(s, t)
            if st.length <= radius:
                found.add((window.index_of(st), si))
    expected = len(window) ** 2
    return {"rank": len(found), "expected": expected,
            "full_rank": len(found) == expected, "radius": radius}


def coproduct_checks(model: GroupModel, radius: int, *, samples: int = 100,
                     seed: int = 0,
                     budget: int | None = DEFAULT_BUDGET) -> dict:
    """Co-associativity on random group-ring elements plus the density rank."""
    rng = np.random.default_rng(seed)
    window = ball(model, min(radius, 3), budget=budget)
    worst = 0.0
    for _ in range(samples):
        support_size = int(rng.integers(1, 5))
        idx = rng.integers(0, len(window), support_size)
        coeffs = rng.standard_normal(support_size) + 1j * rng.standard_normal(support_size)
        x = GroupRingElement(model, {
            window.element(int(i)): complex(c) for i, c in zip(idx, coeffs)})
        worst = max(worst, coassociativity_defect(x))
    density = coproduct_density_rank(model, radius, budget=budget)
    return {
        "coassociativity_samples": samples,
        "coassociativity_max_defect": worst,
        "coassociative": worst == 0.0,
        "density": density,
    }
