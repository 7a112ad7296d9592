"""Edge-space Hamiltonian of a reversible chain: H = i [V†SV, Pi0].

V is the isometry |x,0> -> sum_y sqrt(p_xy) |x,y> on the doubled node space,
S the edge-conditional swap, Pi0 = I (x) |0><0|. The nonzero spectrum of H is
{+-sqrt(1 - lambda_k^2)} over the non-principal discriminant eigenvalues, and
all dynamics of the search algorithms stays inside the (2n-1)-dimensional
subspace spanned by {|v_n,0>} u {|v_k,0>, |v_k,0>perp}. Two representations
are provided:

* :func:`build_reduced` - the analytic (2n-1)-dimensional representation used
  by every algorithm; explicit edge-basis images of the reduced basis vectors
  are available without ever completing V to a unitary.
* :func:`build_dense` - the full n^2 x n^2 operator for cross-validation at
  small n, with a deterministic Householder completion of V (and an
  alternative Gram-Schmidt completion to demonstrate that first-register
  statistics do not depend on the completion).

The rotated form Hbar = V H V† acts as a walk on directed edges; its matrix
elements follow the closed two-case pattern checked by
:func:`verify_edge_locality`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import StochasticChain, interpolated_matrix
from .config import TOL
from .errors import (
    CompletionFailure,
    DegenerateTopEigenvalue,
    LocalityViolation,
    TooLargeForDense,
    ValidationError,
)
from .spectral import DiscriminantSpectrum, discriminant

__all__ = [
    "DenseEdgeOperator",
    "ReducedHamiltonian",
    "LocalityReport",
    "build_dense",
    "build_reduced",
    "verify_edge_locality",
    "szegedy_identity_check",
    "measurement_matrix",
]

_DENSE_LIMIT = 64
_IMAGE_LIMIT = 128  # full (2n-1) x n^2 image matrix guard

_KINDS = ("hamiltonian", "szegedy_walk", "rotated_hamiltonian")
_COMPLETIONS = ("householder", "gram_schmidt")


# -- dense construction -------------------------------------------------------

@dataclass(frozen=True)
class DenseEdgeOperator:
    """An n^2 x n^2 operator on the doubled node space."""

    matrix: np.ndarray
    kind: str
    s_value: float
    completion: str

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))


def _transition_matrix(chain: StochasticChain, s: float) -> np.ndarray:
    return chain.p if s == 0.0 else interpolated_matrix(chain, s)


def _householder_rotation(target: np.ndarray) -> np.ndarray:
    """Real orthogonal R with R e_0 = target (reflection through e_0 - target)."""
    m = target.size
    v = -target.copy()
    v[0] += 1.0
    nrm2 = float(v @ v)
    if nrm2 < 1e-24:
        return np.eye(m)
    return np.eye(m) - 2.0 * np.outer(v, v) / nrm2


def _gram_schmidt_rotation(target: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Real orthogonal R with R e_0 = target and a randomized complement."""
    m = target.size
    basis = np.empty((m, m))
    basis[:, 0] = target
    basis[:, 1:] = rng.standard_normal((m, m - 1))
    q, r = np.linalg.qr(basis)
    q *= np.sign(np.diag(r))[None, :]
    if np.abs(q[:, 0] - target).max() > 1e-12:
        raise CompletionFailure("QR completion did not preserve the target column")
    return q


def _completed_v(p_s: np.ndarray, completion: str, seed: int) -> np.ndarray:
    """V = sum_x |x><x| (x) R_x, a real orthogonal completion of the isometry."""
    n = p_s.shape[0]
    sqrt_p = np.sqrt(p_s)
    v = np.zeros((n * n, n * n))
    for x in range(n):
        target = sqrt_p[x]
        if completion == "householder":
            r_x = _householder_rotation(target)
        elif completion == "gram_schmidt":
            r_x = _gram_schmidt_rotation(target, np.random.default_rng((seed, x)))
        else:
            raise ValidationError(f"unknown completion {completion!r}")
        v[x * n : (x + 1) * n, x * n : (x + 1) * n] = r_x
    return v


def _swap_matrix(p_s: np.ndarray) -> np.ndarray:
    """S|x,y> = |y,x> on edges of P(s), identity elsewhere."""
    n = p_s.shape[0]
    edge = p_s > 0
    if (edge != edge.T).any():
        raise ValidationError("edge set is not symmetric; chain is not reversible")
    s = np.zeros((n * n, n * n))
    xs, ys = np.nonzero(edge)
    s[ys * n + xs, xs * n + ys] = 1.0
    nx, ny = np.nonzero(~edge)
    s[nx * n + ny, nx * n + ny] = 1.0
    return s


def _pi0(n: int) -> np.ndarray:
    pi0 = np.zeros((n * n, n * n))
    idx = np.arange(n) * n
    pi0[idx, idx] = 1.0
    return pi0


def _guard_dense(n: int) -> None:
    if n > _DENSE_LIMIT:
        raise TooLargeForDense(f"dense n^2 build limited to n <= {_DENSE_LIMIT}, got {n}")


def build_dense(
    chain: StochasticChain,
    s: float = 0.0,
    kind: str = "hamiltonian",
    completion: str = "householder",
    completion_seed: int = 0,
) -> DenseEdgeOperator:
    """Assemble H, the walk unitary W, or Hbar = V H V† as dense matrices."""
    if kind not in _KINDS:
        raise ValidationError(f"kind must be one of {_KINDS}, got {kind!r}")
    _guard_dense(chain.n)
    p_s = _transition_matrix(chain, s)
    v = _completed_v(p_s, completion, completion_seed)
    swap = _swap_matrix(p_s)
    pi0 = _pi0(chain.n)
    a = v.T @ swap @ v
    if kind == "szegedy_walk":
        mat = a @ (2.0 * pi0 - np.eye(pi0.shape[0]))
    else:
        h = 1j * (a @ pi0 - pi0 @ a)
        mat = v @ h @ v.T if kind == "rotated_hamiltonian" else h
    mat.setflags(write=False)
    return DenseEdgeOperator(mat, kind, s, completion)


def szegedy_identity_check(
    chain: StochasticChain,
    s: float = 0.0,
    ordering: str = "main",
    completion: str = "householder",
    completion_seed: int = 0,
) -> float:
    """max |H - (i/2)(W - W†)| for the walk unitary built from the same V, S, Pi0.

    ``ordering="main"`` uses W = (V†SV)(2 Pi0 - I), matching H = i[V†SV, Pi0];
    the identity then holds to machine precision for any orthogonal completion.
    ``ordering="rotated"`` uses W = (V S V†)(2 Pi0 - I) instead, which is not
    consistent with this H and deviates at O(1) for a generic (non-symmetric)
    completion; the Householder completion is symmetric, V = V†, for which the
    two orderings happen to coincide.
    """
    _guard_dense(chain.n)
    p_s = _transition_matrix(chain, s)
    v = _completed_v(p_s, completion, completion_seed)
    swap = _swap_matrix(p_s)
    pi0 = _pi0(chain.n)
    a = v.T @ swap @ v
    h = 1j * (a @ pi0 - pi0 @ a)
    reflect = 2.0 * pi0 - np.eye(pi0.shape[0])
    if ordering == "main":
        w = a @ reflect
    elif ordering == "rotated":
        w = (v @ swap @ v.T) @ reflect
    else:
        raise ValidationError(f"ordering must be 'main' or 'rotated', got {ordering!r}")
    return float(np.abs(h - 0.5j * (w - w.conj().T)).max())


# -- edge locality ------------------------------------------------------------

@dataclass(frozen=True)
class LocalityReport:
    """Comparison of Hbar against its closed-form edge-to-edge matrix elements."""

    max_deviation: float
    max_off_pattern: float
    n: int
    s_value: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= TOL.locality and self.max_off_pattern <= TOL.locality

    def to_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "max_off_pattern": self.max_off_pattern,
            "n": self.n,
            "s_value": self.s_value,
            "ok": self.ok,
        }


def _rotated_hamiltonian(p_s: np.ndarray) -> np.ndarray:
    """Hbar = i [S, V Pi0 V†], which only needs the isometry columns of V."""
    n = p_s.shape[0]
    sqrt_p = np.sqrt(p_s)
    psi = np.zeros((n * n, n))  # column x is V|x,0>
    for x in range(n):
        psi[x * n : (x + 1) * n, x] = sqrt_p[x]
    k = psi @ psi.T
    swap = _swap_matrix(p_s)
    return 1j * (swap @ k - k @ swap)


def _locality_formula(p_s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form Hbar entries and the allowed connectivity pattern.

    <x',y'| Hbar |x,y> = i ( d_{x,y'} sqrt(p_{y'x'} p_{xy})
                           - d_{x',y} sqrt(p_{x'y'} p_{yx}) ).
    """
    n = p_s.shape[0]
    sqrt_p = np.sqrt(p_s)
    dim = n * n
    formula = np.zeros((dim, dim), dtype=complex)
    pattern = np.zeros((dim, dim), dtype=bool)
    for x in range(n):
        # term 1: rows (x', y'=x), cols (x, y)
        rows = np.arange(n) * n + x
        cols = x * n + np.arange(n)
        formula[np.ix_(rows, cols)] += 1j * np.outer(sqrt_p[x], sqrt_p[x])
        pattern[np.ix_(rows, cols)] = True
    for y in range(n):
        # term 2: rows (x'=y, y'), cols (x, y)
        rows = y * n + np.arange(n)
        cols = np.arange(n) * n + y
        formula[np.ix_(rows, cols)] -= 1j * np.outer(sqrt_p[y], sqrt_p[y])
        pattern[np.ix_(rows, cols)] = True
    return formula, pattern


def verify_edge_locality(chain: StochasticChain, s: float = 0.0) -> LocalityReport:
    """Check every entry of Hbar against the two-case edge formulas.

    Raises :class:`LocalityViolation` when any entry outside the allowed
    pattern (both edge pairs sharing an endpoint) exceeds tolerance; that
    would signal a construction bug, not a chain property.
    """
    _guard_dense(chain.n)
    p_s = _transition_matrix(chain, s)
    hbar = _rotated_hamiltonian(p_s)
    formula, pattern = _locality_formula(p_s)
    deviation = np.abs(hbar - formula)
    max_dev = float(deviation[pattern].max()) if pattern.any() else 0.0
    off = np.abs(hbar)[~pattern]
    max_off = float(off.max()) if off.size else 0.0
    if max_off > TOL.locality:
        raise LocalityViolation(f"entry of magnitude {max_off:.3e} outside the edge pattern")
    return LocalityReport(max_dev, max_off, chain.n, s)


# -- reduced representation ---------------------------------------------------

@dataclass(frozen=True)
class ReducedHamiltonian:
    """H restricted to its (2n-1)-dimensional invariant subspace.

    Basis order is [|v_n,0>, |v_1,0>, |v_1,0>perp, ..., |v_{n-1},0>,
    |v_{n-1},0>perp] with discriminant eigenvalues ascending. On each pair H
    acts as i*phi_k off-diagonally (phi_k = sqrt(1 - lambda_k^2)) and the
    |v_n,0> row and column vanish, so the energies are {0} u {+-phi_k}.
    """

    s_value: float
    dim: int
    basis_labels: tuple[str, ...]
    lambdas: np.ndarray  # non-principal discriminant eigenvalues, ascending
    phis: np.ndarray
    energies: np.ndarray  # sorted, all 2n-1 of them
    edge_images: np.ndarray | None
    chain: StochasticChain = field(repr=False)
    spectrum: DiscriminantSpectrum = field(repr=False)
    _p_s: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.chain.n

    def index_vn(self) -> int:
        return 0

    def index_vk(self, k: int) -> int:
        """Basis index of |v_k,0> for k in [0, n-1) (ascending eigenvalues)."""
        return 1 + 2 * k

    def index_perp(self, k: int) -> int:
        return 2 + 2 * k

    def state_coefficients(self, node_vec: np.ndarray) -> np.ndarray:
        """Coefficients of |psi,0> in the reduced basis (zero on perp vectors)."""
        overlaps = self.spectrum.eigenvectors.T @ node_vec
        coeff = np.zeros(self.dim)
        coeff[0] = overlaps[-1]
        coeff[1::2] = overlaps[:-1]
        return coeff

    def hamiltonian_matrix(self) -> np.ndarray:
        """The (2n-1) x (2n-1) complex Hermitian H in the reduced basis."""
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for k, phi in enumerate(self.phis):
            h[self.index_perp(k), self.index_vk(k)] = 1j * phi
            h[self.index_vk(k), self.index_perp(k)] = -1j * phi
        return h

    def h_real(self) -> np.ndarray:
        """Real symmetric form of H in the phase-twisted basis.

        Rescaling the perp vectors by i turns each i*phi sigma_y block into
        phi sigma_x while leaving the coefficients of any |psi,0> state (which
        are zero on perp vectors) unchanged; eigh on the real form is what the
        search evolutions use.
        """
        h = np.zeros((self.dim, self.dim))
        for k, phi in enumerate(self.phis):
            h[self.index_perp(k), self.index_vk(k)] = phi
            h[self.index_vk(k), self.index_perp(k)] = phi
        return h

    def edge_image_matrix(self) -> np.ndarray:
        """Rows are the n^2 edge-basis coordinates of each reduced basis vector."""
        if self.edge_images is not None:
            return self.edge_images
        if self.n > _IMAGE_LIMIT:
            raise TooLargeForDense(
                f"edge images materialize (2n-1) x n^2; limited to n <= {_IMAGE_LIMIT}"
            )
        return _edge_images(self.spectrum, self._p_s, self.lambdas, self.phis)


def _apply_swap(mat: np.ndarray, edge: np.ndarray) -> np.ndarray:
    """(S psi) on an n x n edge-coordinate array."""
    return np.where(edge, mat.T, mat)


def _edge_images(
    spectrum: DiscriminantSpectrum, p_s: np.ndarray, lambdas: np.ndarray, phis: np.ndarray
) -> np.ndarray:
    n = p_s.shape[0]
    sqrt_p = np.sqrt(p_s)
    edge = p_s > 0
    images = np.empty((2 * n - 1, n * n))
    v_img = spectrum.eigenvectors[:, -1][:, None] * sqrt_p
    images[0] = v_img.ravel()
    for k in range(n - 1):
        v_img = spectrum.eigenvectors[:, k][:, None] * sqrt_p
        xi = (_apply_swap(v_img, edge) - lambdas[k] * v_img) / phis[k]
        images[1 + 2 * k] = v_img.ravel()
        images[2 + 2 * k] = xi.ravel()
    return images


def build_reduced(chain: StochasticChain, s: float = 0.0) -> ReducedHamiltonian:
    """Analytic reduced representation from the discriminant eigensystem.

    No unitary completion is involved: the edge images of |v_k,0> and its
    perp partner follow from the isometry columns and the swap alone,
    xi_k = (S V|v_k,0> - lambda_k V|v_k,0>) / sqrt(1 - lambda_k^2).
    """
    spectrum = discriminant(chain, s)
    lambdas = spectrum.eigenvalues[:-1].copy()
    if lambdas.size and lambdas.max() >= 1.0 - TOL.degenerate_top:
        raise DegenerateTopEigenvalue(
            f"non-principal eigenvalue {lambdas.max()!r} too close to 1"
        )
    phis = np.sqrt(1.0 - lambdas**2)
    energies = np.sort(np.concatenate([[0.0], phis, -phis]))
    p_s = _transition_matrix(chain, s)
    n = chain.n
    labels = [f"v{n},0"]
    for k in range(1, n):
        labels += [f"v{k},0", f"v{k},0perp"]
    images = _edge_images(spectrum, p_s, lambdas, phis) if n <= _DENSE_LIMIT else None
    return ReducedHamiltonian(
        s_value=s,
        dim=2 * n - 1,
        basis_labels=tuple(labels),
        lambdas=lambdas,
        phis=phis,
        energies=energies,
        edge_images=images,
        chain=chain,
        spectrum=spectrum,
        _p_s=p_s,
    )


def measurement_matrix(red: ReducedHamiltonian, marked) -> np.ndarray:
    """G_ab = <image_a| (Pi_M (x) I) |image_b> in the reduced basis.

    Exact independently of any completion of V: Pi_M (x) I is block diagonal
    over the first register, so only the marked rows of the edge images enter.
    They are assembled directly (O(n |M|) per basis vector) without forming
    the full n^2 coordinates.
    """
    marked = sorted(int(x) for x in marked)
    n = red.n
    for x in marked:
        if not 0 <= x < n:
            raise ValidationError(f"marked node {x} outside [0, {n})")
    if not marked:
        return np.zeros((red.dim, red.dim))

    sqrt_p = np.sqrt(red._p_s)
    edge = red._p_s > 0
    vecs = red.spectrum.eigenvectors
    rows_v = sqrt_p[marked, :]             # sqrt(p_xy) for x in M
    rows_sv = sqrt_p[:, marked].T          # sqrt(p_yx) for x in M
    edge_m = edge[marked, :]

    restricted = np.empty((red.dim, len(marked), n))
    restricted[0] = vecs[marked, -1][:, None] * rows_v
    for k in range(n - 1):
        v_rows = vecs[marked, k][:, None] * rows_v
        sv_rows = np.where(edge_m, vecs[:, k][None, :] * rows_sv, 0.0)
        restricted[1 + 2 * k] = v_rows
        restricted[2 + 2 * k] = (sv_rows - red.lambdas[k] * v_rows) / red.phis[k]
    return np.einsum("aiy,biy->ab", restricted, restricted)
