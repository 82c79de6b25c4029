"""Finite transformation groupoids: quasi-invariant measures, cocycles,
covariant representations, groupoid PD functions and action certificates.

Conventions (validated as postconditions, so a convention bug is fatal):
the action on points is s.x through the generator permutations, functions
pull back by (s.f)(x) = f(s^-1.x), and the Radon-Nikodym cocycle is
rho_s(x) = mu(s^-1.x) / mu(x), which satisfies the defining identity
integral(f dmu) = integral((s.f) rho_s dmu) exactly on finite spaces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from . import _linalg
from .errors import IdealCstarError, ModelMismatchError, PreconditionError
from .functions import (
    CallableFunction,
    GroupFunction,
    IdealSpec,
    ideal_membership,
)
from .groups import (
    Ball,
    FiniteCyclicModel,
    FreeAbelianModel,
    GroupElement,
    GroupModel,
    InfiniteDihedralModel,
    ball,
    compose,
    model_from_name,
)

_EXACT_TOL = 1e-12


class InternalConsistencyError(IdealCstarError):
    """A verified postcondition failed; indicates a convention bug."""


class FiniteSystem:
    """Finite G-space with a fully supported quasi-invariant measure.

    action maps each positive generator symbol to a permutation of
    {0..points-1} given as the image array (x -> perm[x]).  The permutations
    must satisfy the model's defining relations; the measure must be
    strictly positive and sum to 1 within 1e-12 (full support makes every
    probability measure quasi-invariant).
    """

    def __init__(self, model: GroupModel, action: dict[str, Sequence[int]],
                 measure: Sequence[float]):
        self.model = model
        self.measure = np.asarray(measure, dtype=float)
        self.points = len(self.measure)
        if self.points < 1:
            raise PreconditionError("system needs at least one point")
        if np.any(self.measure <= 0):
            bad = int(np.argmin(self.measure))
            raise PreconditionError(
                f"measure must be strictly positive; mu[{bad}] = {self.measure[bad]}")
        if abs(float(self.measure.sum()) - 1.0) > _EXACT_TOL:
            raise PreconditionError(
                f"measure must sum to 1 (got {self.measure.sum()!r})")
        if set(action) != set(model.symbols):
            raise PreconditionError(
                f"action must be given exactly for the generators {model.symbols}")
        self.action = {}
        for sym, perm in action.items():
            arr = np.asarray(perm, dtype=np.int64)
            if sorted(arr.tolist()) != list(range(self.points)):
                raise PreconditionError(
                    f"action[{sym!r}] is not a permutation of 0..{self.points - 1}")
            self.action[sym] = arr
        self._inverse = {sym: np.argsort(arr) for sym, arr in self.action.items()}
        self._check_relations()

    # -- validation ------------------------------------------------------------

    def _check_relations(self):
        model = self.model
        idp = np.arange(self.points)
        if isinstance(model, FreeAbelianModel):
            syms = model.symbols
            for i in range(len(syms)):
                for j in range(i + 1, len(syms)):
                    a, b = self.action[syms[i]], self.action[syms[j]]
                    if not np.array_equal(a[b], b[a]):
                        raise PreconditionError(
                            f"permutations for {syms[i]!r}, {syms[j]!r} must commute")
        elif isinstance(model, FiniteCyclicModel):
            acc = idp
            for _ in range(model.order):
                acc = self.action[model.symbols[0]][acc]
            if not np.array_equal(acc, idp):
                raise PreconditionError(
                    f"permutation order must divide {model.order}")
        elif isinstance(model, InfiniteDihedralModel):
            for sym in model.symbols:
                a = self.action[sym]
                if not np.array_equal(a[a], idp):
                    raise PreconditionError(f"action[{sym!r}] must be an involution")

    # -- the action --------------------------------------------------------------

    def letter_perm(self, letter: int) -> np.ndarray:
        if isinstance(self.model, InfiniteDihedralModel):
            return self.action[self.model.symbols[letter]]
        sym = self.model.symbols[letter // 2]
        return self.action[sym] if letter % 2 == 0 else self._inverse[sym]

    def perm_of(self, el: GroupElement) -> np.ndarray:
        """The permutation x -> el.x (letters act leftmost-last)."""
        if el.model != self.model:
            raise ModelMismatchError("element belongs to a different model")
        out = np.arange(self.points)
        for letter in reversed(el.word):
            out = self.letter_perm(letter)[out]
        return out

    def act(self, el: GroupElement, x: int) -> int:
        return int(self.perm_of(el)[x])

    def orbits(self) -> list[list[int]]:
        seen = np.full(self.points, -1)
        orbits = []
        perms = [self.letter_perm(l) for l in range(self.model.num_letters)]
        for x0 in range(self.points):
            if seen[x0] >= 0:
                continue
            stack, orbit = [x0], []
            seen[x0] = len(orbits)
            while stack:
                x = stack.pop()
                orbit.append(x)
                for p in perms:
                    y = int(p[x])
                    if seen[y] < 0:
                        seen[y] = len(orbits)
                        stack.append(y)
            orbits.append(sorted(orbit))
        return orbits

    # -- serialization -------------------------------------------------------------

    @staticmethod
    def from_json(payload: str | dict) -> "FiniteSystem":
        """Ingest {"group": ..., "points": N, "action": {...}, "measure": [...]}.

        Validation errors name the offending field.
        """
        data = json.loads(payload) if isinstance(payload, str) else payload
        for key in ("group", "points", "action", "measure"):
            if key not in data:
                raise PreconditionError(f"system JSON is missing the {key!r} field")
        model = model_from_name(data["group"])
        points = int(data["points"])
        measure = data["measure"]
        if len(measure) != points:
            raise PreconditionError(
                f"measure has {len(measure)} entries, expected {points}")
        action = {}
        for sym in model.symbols:
            if sym not in data["action"]:
                raise PreconditionError(f"action is missing generator {sym!r}")
            perm = data["action"][sym]
            if len(perm) != points:
                raise PreconditionError(
                    f"action[{sym!r}] has {len(perm)} entries, expected {points}")
            action[sym] = perm
        return FiniteSystem(model, action, measure)

    def to_json(self) -> dict:
        return {
            "group": self.model.name,
            "points": self.points,
            "action": {s: a.tolist() for s, a in self.action.items()},
            "measure": self.measure.tolist(),
        }


# ---------------------------------------------------------------------------
# cocycle
# ---------------------------------------------------------------------------


class Cocycle:
    """Radon-Nikodym cocycle rho_s(x) = mu(s^-1.x)/mu(x) of a finite system."""

    def __init__(self, system: FiniteSystem):
        self.system = system

    def of(self, el: GroupElement) -> np.ndarray:
        sysm = self.system
        inv_perm = sysm.perm_of(el.inverse())
        return sysm.measure[inv_perm] / sysm.measure


def radon_nikodym(system: FiniteSystem, el: GroupElement,
                  verify: bool = True) -> np.ndarray:
    """The cocycle slice rho_s, with the defining identity and the chain
    rule verified as postconditions (failure is a fatal convention bug).
    """
    rho = Cocycle(system).of(el)
    if verify:
        mu = system.measure
        perm = system.perm_of(el)
        # defining identity with f = delta_y:  mu(y) = rho(s.y) mu(s.y)
        lhs = mu
        rhs = rho[perm] * mu[perm]
        if np.max(np.abs(lhs - rhs)) > _EXACT_TOL:
            raise InternalConsistencyError(
                "Radon-Nikodym defining identity failed; action/measure "
                "conventions are inconsistent")
        for other in (el, el.inverse()):
            chain = _chain_defect(system, el, other)
            if chain > _EXACT_TOL:
                raise InternalConsistencyError(
                    f"cocycle chain rule failed (defect {chain:.3e})")
    return rho


def _chain_defect(system: FiniteSystem, s: GroupElement, t: GroupElement) -> float:
    coc = Cocycle(system)
    lhs = coc.of(compose(s, t))
    sinv = system.perm_of(s.inverse())
    rhs = coc.of(s) * coc.of(t)[sinv]
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# covariant representation
# ---------------------------------------------------------------------------


class CovariantRep:
    """Covariant representation on L2(X, mu): U_s f = (s.f) rho_s^(1/2),
    with C(X) acting by multiplication.

    Matrices act on point-coordinates; adjoints are taken in the mu-weighted
    inner product.  Unitarity, the homomorphism property and covariance are
    verified at construction to 1e-12.
    """

    def __init__(self, system: FiniteSystem, verify: bool = True):
        self.system = system
        self.mu = system.measure
        if verify:
            self._verify()

    def unitary(self, el: GroupElement) -> np.ndarray:
        sysm = self.system
        inv_perm = sysm.perm_of(el.inverse())
        rho = Cocycle(sysm).of(el)
        n = sysm.points
        out = np.zeros((n, n))
        out[np.arange(n), inv_perm] = np.sqrt(rho)
        return out

    def multiplication(self, f: Sequence[complex]) -> np.ndarray:
        return np.diag(np.asarray(f, dtype=complex))

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.sum(np.conj(g) * f * self.mu))

    def adjoint(self, a: np.ndarray) -> np.ndarray:
        d = self.mu  # mu-weighted adjoint: D^-1 A^H D
        return a.conj().T * d[None, :] / d[:, None]

    def half_density_conjugate(self, a: np.ndarray) -> np.ndarray:
        """D^(1/2) A D^(-1/2): the same operator on plain l2 coordinates."""
        r = np.sqrt(self.mu)
        return a * r[:, None] / r[None, :]

    def _verify(self):
        sysm = self.system
        rng = np.random.default_rng(7)
        eye = np.eye(sysm.points)
        gens = sysm.model.generators()
        words = list(gens)
        for _ in range(4):
            w = sysm.model.identity
            for _ in range(int(rng.integers(2, 7))):
                w = compose(w, gens[int(rng.integers(0, len(gens)))])
            words.append(w)
        for el in words:
            u = self.unitary(el)
            defect = np.max(np.abs(self.adjoint(u) @ u - eye))
            if defect > _EXACT_TOL:
                raise InternalConsistencyError(
                    f"U_s not unitary on L2(mu) at s={el!r} (defect {defect:.3e})")
            if np.max(np.abs(self.adjoint(u) - self.unitary(el.inverse()))) > _EXACT_TOL:
                raise InternalConsistencyError("U_s^* != U_(s^-1)")
        for a in gens:
            for b in gens:
                lhs = self.unitary(a) @ self.unitary(b)
                rhs = self.unitary(compose(a, b))
                if np.max(np.abs(lhs - rhs)) > _EXACT_TOL:
                    raise InternalConsistencyError("U_s U_t != U_(st)")
        f = rng.standard_normal(sysm.points) + 1j * rng.standard_normal(sysm.points)
        for el in gens:
            u = self.unitary(el)
            lhs = u @ self.multiplication(f) @ self.adjoint(u)
            sf = f[sysm.perm_of(el.inverse())]
            rhs = self.multiplication(sf)
            if np.max(np.abs(lhs - rhs)) > 1e-11:
                raise InternalConsistencyError(
                    "covariance U_s M_f U_s^* != M_(s.f) failed")


def covariant_rep(system: FiniteSystem) -> CovariantRep:
    return CovariantRep(system)


# ---------------------------------------------------------------------------
# envelopes and spectral gap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeReport:
    upper: np.ndarray                 # pointwise sup of rho_s
    lower: np.ndarray                 # pointwise inf
    upper_attained_by: tuple[GroupElement, ...]
    lower_attained_by: tuple[GroupElement, ...]
    upper_integral: float
    lower_integral: float
    stabilization_radius: int | None  # radius at which the orbit closed ("all")


def envelopes(system: FiniteSystem, radius: int | str = "all") -> EnvelopeReport:
    """Pointwise sup/inf of the cocycle over ball(radius) or the full orbit.

    rho_s(x) = mu(s^-1.x)/mu(x), so the envelopes over the whole (possibly
    infinite) group depend only on the orbit of x: the sup closes once the
    breadth-first search over generator moves stabilizes.
    """
    sysm = system
    n = sysm.points
    mu = sysm.measure
    # BFS from each x over y = w.x recording a shortest word w; then
    # s := w^-1 satisfies s^-1.x = y.
    gens = sysm.model.generators()
    gen_perms = [sysm.perm_of(g) for g in gens]
    best_words: list[dict[int, GroupElement]] = []
    max_depth = None if radius == "all" else int(radius)
    stabilized_at = 0
    for x in range(n):
        frontier = {x: sysm.model.identity}
        known = dict(frontier)
        depth = 0
        while frontier and (max_depth is None or depth < max_depth):
            depth += 1
            nxt: dict[int, GroupElement] = {}
            for y, w in frontier.items():
                for g, p in zip(gens, gen_perms):
                    z = int(p[y])
                    if z not in known:
                        cand = compose(g, w)
                        nxt[z] = cand
            frontier = nxt
            known.update(nxt)
            if nxt:
                stabilized_at = max(stabilized_at, depth)
        best_words.append(known)
    upper = np.empty(n)
    lower = np.empty(n)
    up_by: list[GroupElement] = []
    low_by: list[GroupElement] = []
    for x in range(n):
        known = best_words[x]
        ratios = {y: mu[y] / mu[x] for y in known}
        ymax = max(sorted(ratios), key=lambda y: ratios[y])
        ymin = min(sorted(ratios), key=lambda y: ratios[y])
        upper[x] = ratios[ymax]
        lower[x] = ratios[ymin]
        up_by.append(best_words[x][ymax].inverse())
        low_by.append(best_words[x][ymin].inverse())
    return EnvelopeReport(
        upper, lower, tuple(up_by), tuple(low_by),
        float(np.sum(upper * mu)), float(np.sum(lower * mu)),
        stabilized_at if radius == "all" else None,
    )


@dataclass(frozen=True)
class SpectralGapResult:
    lambda_min: float
    vector: np.ndarray
    has_fixed_vector: bool
    spectrum_head: tuple[float, ...]


def spectral_gap(rep, generators: Iterable[GroupElement], *,
                 fixed_tol: float = 1e-10) -> SpectralGapResult:
    """Smallest eigenvalue of sum_s (I - U_s)*(I - U_s) with minimizer.

    Zero exactly when the generators share a fixed vector, in which case the
    returned eigenvector is one.  Accepts a CovariantRep (mu-weighted
    adjoints, computed in half-density coordinates) or a FiniteUnitaryRep.
    """
    gens = list(generators)
    if not gens:
        raise PreconditionError("spectral gap needs a generating set")
    gen_set = {g for g in gens}
    for g in gens:
        if g.inverse() not in gen_set:
            raise PreconditionError("generator set must be symmetric")
    if isinstance(rep, CovariantRep):
        mats = [rep.half_density_conjugate(rep.unitary(g)) for g in gens]
        n = rep.system.points
        back = 1.0 / np.sqrt(rep.mu)
    else:
        mats = [rep.evaluate_word(g) for g in gens]
        n = rep.dim
        back = None
    q = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for u in mats:
        d = eye - u
        q += d.conj().T @ d
    q = (q + q.conj().T) / 2.0
    w, v = scipy.linalg.eigh(q)
    lam = float(w[0])
    vec = v[:, 0]
    if back is not None:
        vec = vec * back
    return SpectralGapResult(lam, vec, lam <= fixed_tol,
                             tuple(float(x) for x in w[: min(4, n)]))


# ---------------------------------------------------------------------------
# groupoid positive definiteness
# ---------------------------------------------------------------------------


class GroupoidFunction:
    """h : X x G -> C with a tail certificate in the group variable."""

    def __init__(self, system: FiniteSystem,
                 fn: Callable[[int, GroupElement], complex],
                 tail=None, label: str = ""):
        self.system = system
        self.model = system.model
        self._fn = fn
        self.tail = tail
        self.label = label or "groupoid-function"

    def __call__(self, x: int, el: GroupElement) -> complex:
        return complex(self._fn(x, el))

    def profile_function(self) -> GroupFunction:
        """H(s) = max_x |h(x, s)| with the inherited tail certificate."""
        sysm = self.system

        def sup_profile(el: GroupElement) -> complex:
            return max(abs(self(x, el)) for x in range(sysm.points))

        return CallableFunction(self.model, sup_profile, tail=self.tail,
                                label=f"supnorm[{self.label}]")


def lift(system: FiniteSystem, h: GroupFunction) -> GroupoidFunction:
    """The base-independent lift h~(x, s) = h(s)."""
    if h.model != system.model:
        raise ModelMismatchError("lift needs matching models")
    return GroupoidFunction(system, lambda x, el: h(el), tail=h.tail,
                            label=f"lift[{h.label}]")


def sup_norm_profile(h: GroupoidFunction) -> GroupFunction:
    return h.profile_function()


@dataclass(frozen=True)
class GroupoidPdReport:
    passed: bool
    per_point: tuple[bool, ...]
    min_eigenvalues: tuple[float, ...]
    failing_points: tuple[int, ...]


def groupoid_pd_check(h: GroupoidFunction, window: Sequence[GroupElement] | Ball,
                      tol: float = 1e-8) -> GroupoidPdReport:
    """PSD check of [h(s_i.x, s_i s_j^-1)] for every base point x."""
    els = window.elements if isinstance(window, Ball) else list(window)
    if len(set(els)) != len(els):
        raise PreconditionError("window elements must be pairwise distinct")
    sysm = h.system
    n = len(els)
    prods = [[compose(si, sj.inverse()) for sj in els] for si in els]
    acted = [sysm.perm_of(si) for si in els]
    per, mins, failing = [], [], []
    for x in range(sysm.points):
        mat = np.empty((n, n), dtype=complex)
        for i in range(n):
            xi = int(acted[i][x])
            for j in range(n):
                mat[i, j] = h(xi, prods[i][j])
        verdict = _linalg.psd_verdict(mat, tol)
        per.append(verdict.passed)
        mins.append(verdict.min_eigenvalue
                    if verdict.min_eigenvalue is not None else np.nan)
        if not verdict.passed:
            failing.append(x)
    return GroupoidPdReport(not failing, tuple(per), tuple(mins), tuple(failing))


# ---------------------------------------------------------------------------
# convolution-algebra elements and Schur multipliers
# ---------------------------------------------------------------------------


class ConvAlgebraElement:
    """Finite sum sum_s f_s s with f_s vectors over the base space."""

    def __init__(self, system: FiniteSystem,
                 terms: dict[GroupElement, np.ndarray]):
        self.system = system
        self.terms = {}
        for el, f in terms.items():
            arr = np.asarray(f, dtype=complex)
            if arr.shape != (system.points,):
                raise PreconditionError("coefficient functions must live on X")
            if np.any(arr != 0):
                self.terms[el] = arr

    def __eq__(self, other):
        if not isinstance(other, ConvAlgebraElement):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(
            np.array_equal(self.terms.get(k, 0), other.terms.get(k, 0))
            for k in keys)


def groupoid_schur_multiply(h: GroupoidFunction,
                            a: ConvAlgebraElement) -> ConvAlgebraElement:
    """m_h(sum f_s s) = sum f_s h(s) s, with h(s) the function x -> h(x, s)."""
    sysm = a.system
    out = {}
    for el, f in a.terms.items():
        weights = np.array([h(x, el) for x in range(sysm.points)])
        out[el] = f * weights
    return ConvAlgebraElement(sysm, out)


def state_kernel(system: FiniteSystem, v: np.ndarray) -> GroupoidFunction:
    """Kernel of the vector state of the covariant representation.

    kappa_v(x, s) = conj(v(x)) (U_s v)(x) mu(x), so that
    phi_v(sum f_s s) = sum_s sum_x f_s(x) kappa_v(x, s); composing the state
    with m_h multiplies the kernel pointwise by h.
    """
    v = np.asarray(v, dtype=complex)
    rep = CovariantRep(system, verify=False)
    mu = system.measure

    def kernel(x: int, el: GroupElement) -> complex:
        u = rep.unitary(el)
        return complex(np.conj(v[x]) * (u @ v)[x] * mu[x])

    return GroupoidFunction(system, kernel, label="state-kernel")


def groupoid_product(h: GroupoidFunction, k: GroupoidFunction) -> GroupoidFunction:
    if h.system is not k.system:
        raise ModelMismatchError("groupoid functions must share the system")
    return GroupoidFunction(h.system, lambda x, el: h(x, el) * k(x, el),
                            label=f"({h.label})*({k.label})")


def state_schur_kernel(h: GroupoidFunction, v: np.ndarray) -> GroupoidFunction:
    """Kernel of the state phi_v composed with the Schur multiplier m_h.

    phi_v is the vector state of the covariant representation; composing it
    with m_h multiplies the state kernel pointwise by h, so the result stays
    groupoid-PD whenever h is.
    """
    return groupoid_product(h, state_kernel(h.system, v))


# ---------------------------------------------------------------------------
# action certificates and the Douglas-Nowak report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActionCertificate:
    kind: str
    accepted: bool
    conv_radius: int
    rows: tuple[dict, ...]
    failures: tuple[str, ...]


def action_certificate(kind: str, family: Sequence[GroupoidFunction],
                       conv_radius: int,
                       thresholds: Sequence[float] | None = None, *,
                       psd_tol: float = 1e-8,
                       final_deviation: float = 0.5) -> ActionCertificate:
    """Amenable / a-T-menable action certificate.

    Every member must pass the groupoid PD check on ball(conv_radius), its
    sup-norm profile must be a certified member of c_c (amenable) or c_0
    (a-T-menable), and the uniform deviations max_{x, |s|<=R} |h_n(x,s) - 1|
    must decrease along the family (below the given schedule when one is
    supplied).
    """
    if kind not in ("amenable", "aTmenable"):
        raise PreconditionError("certificate kind must be amenable or aTmenable")
    if not family:
        raise PreconditionError("certificate needs a nonempty family")
    ideal = IdealSpec("cc") if kind == "amenable" else IdealSpec("c0")
    sysm = family[0].system
    window = ball(sysm.model, conv_radius)
    rows, failures, deviations = [], [], []
    for i, h in enumerate(family):
        row: dict = {"label": h.label}
        report = groupoid_pd_check(h, window, tol=psd_tol)
        row["pd_passed"] = report.passed
        if not report.passed:
            failures.append(
                f"{h.label}: groupoid PD check failed at x in "
                f"{list(report.failing_points)}")
        profile = sup_norm_profile(h)
        member = ideal_membership(profile, ideal)
        row["profile_membership"] = member.verdict
        if member.verdict != "member":
            failures.append(f"{h.label}: sup-norm profile not a member of "
                            f"{ideal} ({member.verdict}: {member.witness})")
        dev = max(
            abs(h(x, el) - 1.0)
            for el in window.elements for x in range(sysm.points)
        )
        row["deviation"] = float(dev)
        deviations.append(float(dev))
        if thresholds is not None:
            row["threshold"] = float(thresholds[i])
            if dev >= thresholds[i]:
                failures.append(f"{h.label}: uniform deviation {dev:.6g} not "
                                f"below threshold {thresholds[i]:.6g}")
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
    return ActionCertificate(kind, not failures, conv_radius,
                             tuple(rows), tuple(failures))


def dn_report(system: FiniteSystem, *, fixed_tol: float = 1e-10) -> dict:
    """Envelope integrability, candidate fixed vectors and the spectral gap.

    On finite X the envelope integrability and positivity hypotheses hold
    automatically (reported with that caveat) and the covariant
    representation always has the fixed vector mu^(-1/2).
    """
    env = envelopes(system, "all")
    rep = CovariantRep(system)
    gens = system.model.generators()
    gap = spectral_gap(rep, gens, fixed_tol=fixed_tol)
    mu = system.measure
    candidates = {
        "rho_upper_sqrt": np.sqrt(env.upper),
        "rho_lower_sqrt": np.sqrt(env.lower),
        "mu_inverse_sqrt": 1.0 / np.sqrt(mu),
    }
    cand_rows = {}
    for name, vec in candidates.items():
        residual = 0.0
        for g in gens:
            u = rep.unitary(g)
            diff = u @ vec - vec
            residual = max(residual, float(np.linalg.norm(diff)))
        cand_rows[name] = {
            "vector": [float(x) for x in vec],
            "fixed": residual <= 1e-10 * (1.0 + float(np.linalg.norm(vec))),
            "residual": residual,
        }
    return {
        "points": system.points,
        "rho_upper": [float(x) for x in env.upper],
        "rho_lower": [float(x) for x in env.lower],
        "rho_upper_integral": env.upper_integral,
        "rho_lower_integral": env.lower_integral,
        "rho_upper_integrable": True,
        "rho_lower_positive": True,
        "finite_space_caveat": (
            "integrability of the upper envelope and positivity of the lower "
            "envelope are automatic on a finite space"),
        "candidates": cand_rows,
        "spectral_gap": gap.lambda_min,
        "fixed_vector_exists": gap.has_fixed_vector,
        "fixed_vector": [float(abs(x)) for x in gap.vector],
    }
