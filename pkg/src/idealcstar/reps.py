"""Finite-dimensional unitary representations and truncated GNS windows.

Representations are given by one unitary per generator and validated against
the model's defining relations at construction.  The GNS construction is
windowed: the Gram matrix of a window-PD function h on a padded ball realizes
the inner products <delta_s, delta_t> = h(t^-1 s), and group elements act by
exact index shifts into the padding, so matrix-coefficient recovery is exact
where no truncation occurs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from . import _linalg
from .errors import (
    GramIndefiniteError,
    ModelMismatchError,
    PreconditionError,
)
from .functions import GroupFunction, SphereSupSequence
from .groups import (
    Ball,
    FiniteCyclicModel,
    FreeAbelianModel,
    FreeModel,
    GroupElement,
    GroupModel,
    InfiniteDihedralModel,
    ball,
)

_UNITARY_TOL = 1e-10


class FiniteUnitaryRep:
    """Unitary representation given by generator images.

    images maps each positive generator symbol to a d x d unitary; inverse
    letters act by the conjugate transpose (for the infinite dihedral group
    both generators are involutions and act by their own image).
    """

    def __init__(self, model: GroupModel, images: dict[str, np.ndarray]):
        if set(images) != set(model.symbols):
            raise PreconditionError(
                f"images must be given exactly for the generators {model.symbols}")
        dims = {mat.shape for mat in images.values()}
        if len(dims) != 1 or any(a != b for a, b in dims):
            raise PreconditionError("generator images must be square, equal-size")
        self.model = model
        self.dim = next(iter(dims))[0]
        self.images = {s: np.asarray(m, dtype=complex) for s, m in images.items()}
        self._ball_cache: dict[int, np.ndarray] = {}
        self._validate()

    # -- validation ----------------------------------------------------------

    def _validate(self):
        eye = np.eye(self.dim)
        for s, u in self.images.items():
            defect = np.max(np.abs(u.conj().T @ u - eye))
            if defect > _UNITARY_TOL:
                raise PreconditionError(
                    f"image of {s!r} is not unitary (defect {defect:.2e})")
        model = self.model
        if isinstance(model, FreeAbelianModel):
            mats = list(self.images.values())
            for i in range(len(mats)):
                for j in range(i + 1, len(mats)):
                    defect = np.max(np.abs(mats[i] @ mats[j] - mats[j] @ mats[i]))
                    if defect > _UNITARY_TOL:
                        raise PreconditionError(
                            f"generator images must commute (defect {defect:.2e})")
        elif isinstance(model, FiniteCyclicModel):
            u = self.images[model.symbols[0]]
            defect = np.max(np.abs(np.linalg.matrix_power(u, model.order) - eye))
            if defect > _UNITARY_TOL:
                raise PreconditionError(
                    f"image must have order dividing {model.order} "
                    f"(defect {defect:.2e})")
        elif isinstance(model, InfiniteDihedralModel):
            for s in model.symbols:
                u = self.images[s]
                defect = np.max(np.abs(u @ u - eye))
                if defect > _UNITARY_TOL:
                    raise PreconditionError(
                        f"image of {s!r} must be an involution (defect {defect:.2e})")

    # -- evaluation ------------------------------------------------------------

    def letter_matrix(self, letter: int) -> np.ndarray:
        model = self.model
        if isinstance(model, InfiniteDihedralModel):
            return self.images[model.symbols[letter]]
        mat = self.images[model.symbols[letter // 2]]
        return mat if letter % 2 == 0 else mat.conj().T

    def evaluate_word(self, el: GroupElement) -> np.ndarray:
        """Product of generator images along the normal form."""
        if el.model != self.model:
            raise ModelMismatchError("element belongs to a different model")
        out = np.eye(self.dim, dtype=complex)
        for letter in el.word:
            out = out @ self.letter_matrix(letter)
        return out

    def to_json(self) -> dict:
        """Serialize as {model, dim, images}: matrices as row-major [re, im] pairs."""
        return {
            "model": self.model.name,
            "dim": self.dim,
            "images": {
                s: [[[float(z.real), float(z.imag)] for z in row] for row in m]
                for s, m in self.images.items()
            },
        }

    @staticmethod
    def from_json(data: dict) -> "FiniteUnitaryRep":
        from .groups import model_from_name

        model = model_from_name(data["model"])
        images = {
            s: np.array([[complex(re, im) for re, im in row] for row in mat])
            for s, mat in data["images"].items()
        }
        return FiniteUnitaryRep(model, images)

    def matrices_on_ball(self, window: Ball) -> np.ndarray:
        """Stack of evaluate_word over a ball, computed along the prefix tree."""
        key = window.radius
        cached = self._ball_cache.get(key)
        if cached is not None:
            return cached
        n = len(window)
        out = np.empty((n, self.dim, self.dim), dtype=complex)
        out[0] = np.eye(self.dim)
        parents = window.parent_indices()
        letters = window.letters_matrix()
        lengths = window.lengths
        for i in range(1, n):
            last = int(letters[i, lengths[i] - 1])
            out[i] = out[parents[i]] @ self.letter_matrix(last)
        self._ball_cache[key] = out
        return out


def tensor(pi: FiniteUnitaryRep, sigma: FiniteUnitaryRep) -> FiniteUnitaryRep:
    if pi.model != sigma.model:
        raise ModelMismatchError("tensor factors must share the model")
    images = {s: np.kron(pi.images[s], sigma.images[s]) for s in pi.model.symbols}
    return FiniteUnitaryRep(pi.model, images)


def direct_sum(reps: Sequence[FiniteUnitaryRep]) -> FiniteUnitaryRep:
    if not reps:
        raise PreconditionError("direct_sum needs at least one representation")
    model = reps[0].model
    if any(r.model != model for r in reps):
        raise ModelMismatchError("direct summands must share the model")
    images = {
        s: scipy.linalg.block_diag(*[r.images[s] for r in reps])
        for s in model.symbols
    }
    return FiniteUnitaryRep(model, images)


class MatrixCoefficientFunction(GroupFunction):
    """s -> <pi_s xi, eta>; |values| <= ||xi|| ||eta|| by Cauchy-Schwarz."""

    def __init__(self, rep: FiniteUnitaryRep, xi: np.ndarray, eta: np.ndarray,
                 label: str = ""):
        xi = np.asarray(xi, dtype=complex)
        eta = np.asarray(eta, dtype=complex)
        if xi.shape != (rep.dim,) or eta.shape != (rep.dim,):
            raise PreconditionError("vector dimensions must match the representation")
        sup = float(np.linalg.norm(xi) * np.linalg.norm(eta))
        super().__init__(rep.model, tail=None,
                         label=label or f"coefficient(dim={rep.dim})", sup_bound=sup)
        self.rep = rep
        self.xi = xi
        self.eta = eta

    def _eval(self, el):
        return complex(self.eta.conj() @ (self.rep.evaluate_word(el) @ self.xi))

    def values(self, elements):
        if isinstance(elements, Ball):
            mats = self.rep.matrices_on_ball(elements)
            return np.einsum("j,njk,k->n", self.eta.conj(), mats, self.xi)
        return super().values(elements)

    def gram(self, window, convention="pd"):
        if isinstance(window, Ball):
            mats = self.rep.matrices_on_ball(window)
            if convention == "gns":
                # G[t,s] = <pi_s xi, pi_t eta>
                phi_xi = np.einsum("nij,j->ni", mats, self.xi)
                phi_eta = np.einsum("nij,j->ni", mats, self.eta)
                return phi_eta.conj() @ phi_xi.T
            # M[i,j] = <pi_{s_j^-1} xi, pi_{s_i^-1} eta>
            psi_xi = np.einsum("nji,j->ni", mats.conj(), self.xi)
            psi_eta = np.einsum("nji,j->ni", mats.conj(), self.eta)
            return psi_eta.conj() @ psi_xi.T
        return super().gram(window, convention)

    def sphere_certificate(self, radius: int) -> SphereSupSequence:
        """Per-sphere sup bounds up to the given radius, attached on demand.

        The finite list proves nothing about the tail, so limit_zero stays
        False and memberships that need a limit remain undecided.
        """
        window = ball(self.model, radius)
        vals = np.abs(self.values(window))
        sups = tuple(
            float(vals[window.offsets[k]: window.offsets[k + 1]].max())
            for k in range(radius + 1)
        )
        cert = SphereSupSequence(sups, limit_zero=False)
        self.tail = cert
        return cert


def matrix_coefficient(rep: FiniteUnitaryRep, xi: np.ndarray,
                       eta: np.ndarray) -> MatrixCoefficientFunction:
    return MatrixCoefficientFunction(rep, xi, eta)


# ---------------------------------------------------------------------------
# random representations / PD functions
# ---------------------------------------------------------------------------


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian, phases fixed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_rep(model: GroupModel, dim: int, seed: int) -> FiniteUnitaryRep:
    """Seeded random unitary representation respecting the model's relations."""
    rng = np.random.default_rng(seed)
    images: dict[str, np.ndarray] = {}
    if isinstance(model, FreeModel):
        for s in model.symbols:
            images[s] = haar_unitary(dim, rng)
    elif isinstance(model, FreeAbelianModel):
        basis = haar_unitary(dim, rng)  # simultaneous eigenbasis forces commutation
        for s in model.symbols:
            phases = np.exp(2j * np.pi * rng.random(dim))
            images[s] = basis @ np.diag(phases) @ basis.conj().T
    elif isinstance(model, FiniteCyclicModel):
        basis = haar_unitary(dim, rng)
        eigs = np.exp(2j * np.pi * rng.integers(0, model.order, dim) / model.order)
        images[model.symbols[0]] = basis @ np.diag(eigs) @ basis.conj().T
    elif isinstance(model, InfiniteDihedralModel):
        for s in model.symbols:
            basis = haar_unitary(dim, rng)
            signs = np.where(rng.random(dim) < 0.5, 1.0, -1.0)
            images[s] = basis @ np.diag(signs) @ basis.conj().T
    else:
        raise PreconditionError(f"no random representation scheme for {model}")
    return FiniteUnitaryRep(model, images)


def random_pd(model: GroupModel, dim: int, seed: int) -> MatrixCoefficientFunction:
    """Seeded random positive definite function h(s) = <pi_s v, v>, h(e) = 1."""
    rep = random_rep(model, dim, seed)
    rng = np.random.default_rng((seed, 0xC0FFEE))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return MatrixCoefficientFunction(rep, v, v,
                                     label=f"random_pd:seed={seed},dim={dim}")


# ---------------------------------------------------------------------------
# truncated GNS
# ---------------------------------------------------------------------------


@dataclass
class GnsOperator:
    """Action of one group element on a GNS window.

    action is the exact coefficient shift delta_s -> delta_{g s} from the
    window into the padded window; form is the matrix of inner products
    <pi_g delta_s, delta_t> = h(t^-1 g s) over the window itself.
    """

    element: GroupElement
    action: scipy.sparse.csr_matrix
    form: np.ndarray

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        return self.action @ coeffs


class GnsWindow:
    """Truncated GNS data for a window-PD function.

    The Gram matrix G[t, s] = h(t^-1 s) over ball(radius) is the restriction
    of the padded Gram over ball(radius + pad); operators for |g| <= pad are
    compressions with exact coefficient recovery <pi_g delta_e, delta_e> =
    h(g).
    """

    def __init__(self, h: GroupFunction, radius: int, pad: int,
                 tol: float = 1e-8, cutoff_ratio: float = 1e-10):
        if radius < 0 or pad < 0:
            raise PreconditionError("gns window needs radius >= 0 and pad >= 0")
        self.h = h
        self.radius = radius
        self.pad = pad
        self.tol = tol
        self.cutoff_ratio = cutoff_ratio
        self.ball = ball(h.model, radius)
        self.padded_ball = ball(h.model, radius + pad)
        self.padded_gram = h.gram(self.padded_ball, convention="gns")
        verdict = _linalg.psd_verdict(self.padded_gram, tol)
        if not verdict.passed:
            raise GramIndefiniteError(verdict.min_eigenvalue, verdict.threshold)
        self._psd = verdict
        n = len(self.ball)
        self.gram = np.ascontiguousarray(self.padded_gram[:n, :n])
        self._range = None

    # -- inner products -------------------------------------------------------

    def inner(self, xi: np.ndarray, eta: np.ndarray, padded: bool = False) -> complex:
        g = self.padded_gram if padded else self.gram
        return complex(eta.conj() @ (g @ xi))

    def norm(self, xi: np.ndarray, padded: bool = False) -> float:
        val = self.inner(xi, xi, padded).real
        return float(np.sqrt(max(val, 0.0)))

    @property
    def rank(self) -> int:
        if self._range is None:
            self._range = _linalg.gram_range_basis(self.gram, self.cutoff_ratio)
        return self._range[1]

    # -- operators --------------------------------------------------------------

    def operator(self, g: GroupElement) -> GnsOperator:
        if g.length > self.pad:
            raise PreconditionError(
                f"|g| = {g.length} exceeds the padding {self.pad}")
        n = len(self.ball)
        rows = self.ball.left_mult_indices(g, self.padded_ball)
        if np.any(rows < 0):
            raise AssertionError("padded window too small; this is a bug")
        action = scipy.sparse.csr_matrix(
            (np.ones(n), (rows, np.arange(n))),
            shape=(len(self.padded_ball), n),
        )
        form = self.padded_gram[:n][:, rows]
        return GnsOperator(g, action, form)

    def coefficient(self, g: GroupElement) -> complex:
        """<pi_g delta_e, delta_e> = h(g), exactly, for |g| <= radius + pad."""
        idx = self.padded_ball.index_of(g)
        return complex(self.padded_gram[0, idx])


def gns_window(h: GroupFunction, radius: int, pad: int,
               tol: float = 1e-8) -> GnsWindow:
    """Truncated GNS representation of a window-PD function.

    Raises GramIndefiniteError (with the violating eigenvalue) when h fails
    the PD check on the padded ball.
    """
    return GnsWindow(h, radius, pad, tol=tol)
