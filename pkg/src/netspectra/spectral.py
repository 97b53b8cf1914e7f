"""Complex spectrum of the Google operator.

Two routes are provided.  :func:`arnoldi_spectrum` is the production
solver: Arnoldi with modified Gram-Schmidt (two passes), a complex
Hessenberg QR for the Ritz values, Krylov-Schur thick restarts, locking of
converged Schur vectors, and random restarts orthogonal to the locked
subspace to pick up repeated eigenvalues.  :func:`dense_spectrum`
runs LAPACK on the materialized matrix and is only meant as an oracle for
small graphs.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import NumericalError, ParameterError, SizeError
from .gmatrix import GoogleOperator, apply, build_operator
from .graph import DirectedGraph

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000
MERGE_TOL = 1e-8
_EPS = np.finfo(float).eps


@dataclass
class SpectrumResult:
    """Eigenpairs sorted by descending modulus.

    ``vectors`` holds one unit-norm eigenvector per column, or is None when
    the vectors were not kept.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    vectors: np.ndarray | None
    lambda_min: float
    n: int
    alpha: float
    tol: float | None = None
    source: str = ""
    complete: bool = True
    multiplicity_lower_bound: bool = False
    warnings: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def __len__(self):
        return self.eigenvalues.size

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def pairs(self):
        """Yield (eigenvalue, eigenvector or None, residual)."""
        vecs = self.vectors
        for k, (lam, res) in enumerate(zip(self.eigenvalues, self.residuals)):
            yield complex(lam), (None if vecs is None else vecs[:, k]), float(res)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [
                {"re": float(lam.real), "im": float(lam.imag), "residual": float(res)}
                for lam, res in zip(self.eigenvalues, self.residuals)
            ],
            "meta": {
                "n": self.n,
                "alpha": self.alpha,
                "lambda_min": self.lambda_min,
                "tol": self.tol,
                "source": self.source,
                "complete": self.complete,
                "multiplicity_lower_bound": self.multiplicity_lower_bound,
                "warnings": list(self.warnings),
                "config": dict(self.config),
            },
        }

    @classmethod
    def from_dict(cls, data: dict, vectors: np.ndarray | None = None) -> "SpectrumResult":
        meta = data["meta"]
        lam = np.array([complex(e["re"], e["im"]) for e in data["eigenvalues"]], dtype=complex)
        res = np.array([e["residual"] for e in data["eigenvalues"]], dtype=float)
        if vectors is not None and vectors.shape != (meta["n"], lam.size):
            raise ParameterError(
                f"eigenvector matrix has shape {vectors.shape}, expected {(meta['n'], lam.size)}"
            )
        return cls(
            eigenvalues=lam,
            residuals=res,
            vectors=vectors,
            lambda_min=meta["lambda_min"],
            n=meta["n"],
            alpha=meta["alpha"],
            tol=meta.get("tol"),
            source=meta.get("source", ""),
            complete=meta.get("complete", True),
            multiplicity_lower_bound=meta.get("multiplicity_lower_bound", False),
            warnings=list(meta.get("warnings", [])),
            config=dict(meta.get("config", {})),
        )


def save_spectrum(spec: SpectrumResult, path, vectors_path=None) -> None:
    """Write the spectrum JSON and, optionally, the eigenvectors as ``.npy``."""
    Path(path).write_text(json.dumps(spec.to_dict(), indent=1) + "\n", encoding="utf-8")
    if vectors_path is not None:
        if spec.vectors is None:
            raise ParameterError("spectrum carries no eigenvectors to write")
        with open(vectors_path, "wb") as fh:
            np.save(fh, spec.vectors)


def load_spectrum(path, vectors_path=None) -> SpectrumResult:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    vectors = None if vectors_path is None else np.load(vectors_path)
    return SpectrumResult.from_dict(data, vectors)


# ------------------------------------------------------ small dense kernels


@njit(cache=True)
def _givens(x, y):
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0j
    if ax == 0.0:
        return 0.0, np.conj(y) / ay
    nrm = np.hypot(ax, ay)
    return ax / nrm, (x / ax) * np.conj(y) / nrm


@njit(cache=True)
def hessenberg_schur(H):
    """Complex Schur form of an upper Hessenberg matrix: H = Z T Z^H.

    Single-shift QR with Wilkinson shifts and Givens rotations.  Returns
    (T, Z, ok); ok is False when some eigenvalue failed to deflate.
    """
    m = H.shape[0]
    T = H.astype(np.complex128).copy()
    Z = np.eye(m, dtype=np.complex128)
    if m <= 1:
        return T, Z, True
    scale = 0.0
    for i in range(m):
        for j in range(m):
            scale = max(scale, abs(T[i, j]))
    if scale == 0.0:
        return T, Z, True
    eps = 2.220446049250313e-16
    hi = m - 1
    its = 0
    total = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(T[lo - 1, lo - 1]) + abs(T[lo, lo])
            if s == 0.0:
                s = scale
            if abs(T[lo, lo - 1]) <= eps * s:
                T[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > 60 * m:
            return T, Z, False
        a = T[hi - 1, hi - 1]
        b = T[hi - 1, hi]
        c = T[hi, hi - 1]
        d = T[hi, hi]
        if its % 11 == 0:
            # exceptional shift to break cycles
            mu = d + abs(T[hi, hi - 1]) * (1.0 + 0.5j)
        else:
            half = (a - d) / 2.0
            disc = np.sqrt(half * half + b * c)
            mu1 = d + half + disc
            mu2 = d + half - disc
            mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        x = T[lo, lo] - mu
        y = T[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = T[k, k - 1]
                y = T[k + 1, k - 1]
            cs, sn = _givens(x, y)
            start = k - 1 if k > lo else lo
            for j in range(start, m):
                t1 = T[k, j]
                t2 = T[k + 1, j]
                T[k, j] = cs * t1 + sn * t2
                T[k + 1, j] = -np.conj(sn) * t1 + cs * t2
            if k > lo:
                T[k + 1, k - 1] = 0.0
            stop = min(k + 2, hi)
            for i in range(0, stop + 1):
                t1 = T[i, k]
                t2 = T[i, k + 1]
                T[i, k] = t1 * cs + t2 * np.conj(sn)
                T[i, k + 1] = -t1 * sn + t2 * cs
            for i in range(m):
                t1 = Z[i, k]
                t2 = Z[i, k + 1]
                Z[i, k] = t1 * cs + t2 * np.conj(sn)
                Z[i, k + 1] = -t1 * sn + t2 * cs
    for i in range(1, m):
        T[i, i - 1] = 0.0
    return T, Z, True


@njit(cache=True)
def triangular_eigenvectors(T, cluster_tol):
    """Eigenvectors of an upper triangular matrix by back substitution.

    Components belonging to diagonal entries within ``cluster_tol`` of the
    current eigenvalue are set to zero, which picks the eigenvector
    orthogonal to the earlier members of a semisimple cluster.
    """
    m = T.shape[0]
    X = np.zeros((m, m), dtype=np.complex128)
    for k in range(m):
        lam = T[k, k]
        X[k, k] = 1.0
        for i in range(k - 1, -1, -1):
            acc = 0.0j
            for j in range(i + 1, k + 1):
                acc += T[i, j] * X[j, k]
            diff = T[i, i] - lam
            if abs(diff) <= cluster_tol:
                X[i, k] = 0.0
            else:
                X[i, k] = -acc / diff
        nrm = 0.0
        for i in range(k + 1):
            nrm += abs(X[i, k]) ** 2
        nrm = np.sqrt(nrm)
        for i in range(k + 1):
            X[i, k] /= nrm
    return X


@njit(cache=True)
def hessenberg_reduce(A):
    """Householder reduction A = U H U^H with H upper Hessenberg."""
    m = A.shape[0]
    H = A.astype(np.complex128).copy()
    U = np.eye(m, dtype=np.complex128)
    for k in range(m - 2):
        x = H[k + 1 :, k].copy()
        alpha = np.sqrt(np.sum(np.abs(x) ** 2))
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0 + 0.0j
        v = x
        v[0] += phase * alpha
        v /= np.sqrt(np.sum(np.abs(v) ** 2))
        vh = np.conj(v)
        rows = np.ascontiguousarray(H[k + 1 :, :])
        H[k + 1 :, :] -= 2.0 * np.outer(v, vh @ rows)
        cols = np.ascontiguousarray(H[:, k + 1 :])
        H[:, k + 1 :] -= 2.0 * np.outer(cols @ v, vh)
        cols = np.ascontiguousarray(U[:, k + 1 :])
        U[:, k + 1 :] -= 2.0 * np.outer(cols @ v, vh)
        H[k + 2 :, k] = 0.0
    return H, U


@njit(cache=True)
def _swap_adjacent(T, Z, k):
    # rotate so that T[k+1, k+1] moves to position k
    a = T[k, k]
    b = T[k + 1, k + 1]
    cs, sn = _givens(T[k, k + 1], b - a)
    m = T.shape[0]
    for j in range(k, m):
        t1 = T[k, j]
        t2 = T[k + 1, j]
        T[k, j] = cs * t1 + sn * t2
        T[k + 1, j] = -np.conj(sn) * t1 + cs * t2
    for i in range(k + 2):
        t1 = T[i, k]
        t2 = T[i, k + 1]
        T[i, k] = t1 * cs + t2 * np.conj(sn)
        T[i, k + 1] = -t1 * sn + t2 * cs
    for i in range(Z.shape[0]):
        t1 = Z[i, k]
        t2 = Z[i, k + 1]
        Z[i, k] = t1 * cs + t2 * np.conj(sn)
        Z[i, k + 1] = -t1 * sn + t2 * cs
    T[k + 1, k] = 0.0


@njit(cache=True)
def reorder_schur(T, Z, front):
    """Move the diagonal entries listed in ``front`` to the leading positions, in order.

    T and Z are updated in place so that Z T Z^H is unchanged.
    """
    m = T.shape[0]
    ids = np.arange(m)
    for slot in range(front.size):
        cur = 0
        while ids[cur] != front[slot]:
            cur += 1
        while cur > slot:
            _swap_adjacent(T, Z, cur - 1)
            tmp = ids[cur - 1]
            ids[cur - 1] = ids[cur]
            ids[cur] = tmp
            cur -= 1


# ------------------------------------------------------------- residuals


def residual(op: GoogleOperator, lam: complex, psi) -> float:
    """||G psi - lam psi|| / ||psi||."""
    psi = np.asarray(psi)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ParameterError("psi must be nonzero")
    return float(np.linalg.norm(apply(op, psi) - lam * psi) / nrm)


# ------------------------------------------------------------ dense oracle


def dense_spectrum(g: DirectedGraph, alpha: float = 0.85, source: str = "") -> SpectrumResult:
    """Full eigendecomposition of the dense Google matrix (n <= 2000)."""
    if g.n_nodes > DENSE_LIMIT:
        raise SizeError(f"dense spectrum limited to n <= {DENSE_LIMIT}, got {g.n_nodes}")
    op = build_operator(g, alpha)
    G = op.dense()
    lam, vecs = np.linalg.eig(G)
    res = np.linalg.norm(G @ vecs - vecs * lam, axis=0)
    order = _descending(lam)
    return SpectrumResult(
        eigenvalues=lam[order].astype(complex),
        residuals=res[order],
        vectors=vecs[:, order].astype(complex),
        lambda_min=0.0,
        n=g.n_nodes,
        alpha=op.alpha,
        tol=None,
        source=source,
        config={"method": "dense", "alpha": op.alpha},
    )


def _descending(lam: np.ndarray) -> np.ndarray:
    # modulus first, then angle in [0, 2pi) for a stable order among equal moduli
    angle = np.mod(np.angle(lam), 2 * np.pi)
    return np.lexsort((np.round(angle, 12), -np.round(np.abs(lam), 12)))


# ---------------------------------------------------------------- Arnoldi


def _project_out(w, basis):
    """Modified Gram-Schmidt against the rows of ``basis``, two passes."""
    for _ in range(2):
        for q in basis:
            w -= np.vdot(q, w) * q
    return w


class _Solver:
    """Locked partial Schur form plus the Krylov-Schur sweeps that extend it."""

    def __init__(self, op, krylov_dim, wanted_floor, lock_tol, stall_limit, rng):
        self.op = op
        self.n = op.n
        self.krylov_dim = krylov_dim
        self.floor = wanted_floor
        self.lock_tol = lock_tol
        self.stall_limit = stall_limit
        self.rng = rng
        self.Q = np.zeros((0, op.n), dtype=complex)  # locked Schur vectors as rows
        self.T = np.zeros((0, 0), dtype=complex)  # Q G Q^H, upper triangular
        self.matvecs = 0
        self.cycles = 0

    @property
    def n_locked(self):
        return self.Q.shape[0]

    def matvec(self, v):
        self.matvecs += 1
        out = apply(self.op, v)
        if not np.all(np.isfinite(out)):
            raise NumericalError("non-finite value in operator application")
        return out

    def orthonormal_to(self, v, extra=()):
        v = _project_out(v, self.Q)
        v = _project_out(v, extra)
        nrm = np.linalg.norm(v)
        return None if nrm < 1e-8 else v / nrm

    def random_start(self, extra=()):
        for _ in range(5):
            v = self.orthonormal_to(self.rng.standard_normal(self.n).astype(complex), extra)
            if v is not None:
                return v
        return None

    def try_lock(self, x):
        """Append x (orthogonalized) to the locked basis if the result stays invariant."""
        q = self.orthonormal_to(x.copy())
        if q is None:
            return False
        w = self.matvec(q)
        coeffs = self.Q.conj() @ w
        diag = np.vdot(q, w)
        r = w - coeffs @ self.Q - diag * q
        if np.linalg.norm(r) > self.lock_tol:
            return False
        p = self.n_locked
        T = np.zeros((p + 1, p + 1), dtype=complex)
        T[:p, :p] = self.T
        T[:p, p] = coeffs
        T[p, p] = diag
        self.T = T
        self.Q = np.vstack([self.Q, q[None, :]])
        return True

    def _expand(self, V, B, k, m):
        """Grow the Krylov decomposition from k to m columns.

        On exit P G V[:m] = V[:m] B[:m, :m] + V[m] B[m, :m], where P removes
        the locked subspace.  Returns the reached size (< m only when the
        deflated space is exhausted).
        """
        for j in range(k, m):
            w = self.matvec(V[j])
            gnorm = np.linalg.norm(w)
            w = _project_out(w, self.Q)
            for _ in range(2):
                for i in range(j + 1):
                    c = np.vdot(V[i], w)
                    B[i, j] += c
                    w -= c * V[i]
            h = np.linalg.norm(w)
            if h > 1e-12 * max(gnorm, 1e-300):
                B[j + 1, j] = h
                V[j + 1] = w / h
                continue
            # invariant subspace: carry on from a fresh direction
            B[j + 1, j] = 0.0
            fresh = self.random_start(V[: j + 1])
            if fresh is None:
                V[j + 1] = 0.0
                return j + 1
            V[j + 1] = fresh
        return m

    def sweep(self, v0):
        """Krylov-Schur iteration until no wanted Ritz value is left unconverged.

        Returns (number locked, stagnated flag).
        """
        m = min(self.krylov_dim, self.n - self.n_locked)
        V = np.zeros((m + 1, self.n), dtype=complex)
        B = np.zeros((m + 1, m), dtype=complex)
        V[0] = v0
        k = 0
        locked = 0
        idle = 0
        while True:
            self.cycles += 1
            m = min(m, self.n - self.n_locked)
            size = self._expand(V, B, k, m)
            Bm = B[:size, :size]
            b = B[size, :size] if size == m else np.zeros(size, dtype=complex)
            Hm, U = hessenberg_reduce(Bm)
            T, Z, ok = hessenberg_schur(Hm)
            if not ok:
                raise NumericalError("Hessenberg QR failed to converge")
            W = U @ Z
            theta = np.diag(T).copy()
            Y = triangular_eigenvectors(T, 0.0)
            est = np.abs((b @ W) @ Y)
            mod = np.abs(theta)
            wanted = mod >= self.floor
            conv = wanted & (est <= self.lock_tol)
            by_mod = np.argsort(-mod, kind="stable")
            conv_ids = [i for i in by_mod if conv[i]]
            open_ids = [i for i in by_mod if wanted[i] and not conv[i]]
            front = np.array(conv_ids + open_ids, dtype=np.int64)
            reorder_schur(T, W, front)
            S = W.T @ V[:size]  # Schur vectors as rows
            bS = b @ W

            n_new = 0
            for i in range(len(conv_ids)):
                if not self.try_lock(S[i]):
                    break
                n_new += 1
            locked += n_new
            idle = 0 if n_new else idle + 1
            remaining = len(conv_ids) + len(open_ids) - n_new
            log.debug("cycle %d: size=%d locked=%d open=%d total=%d",
                      self.cycles, size, n_new, remaining, self.n_locked)
            if remaining == 0 or size < m:
                return locked, remaining > 0
            if idle >= self.stall_limit:
                return locked, True
            m = min(m, self.n - self.n_locked)
            keep = min(remaining, max(1, m // 2), m - 1)
            if keep < 1:
                return locked, remaining > 0
            lo, hi = n_new, n_new + keep
            residual_vec = V[size].copy()
            B[:] = 0.0
            V[:] = 0.0
            V[:keep] = S[lo:hi]
            B[:keep, :keep] = T[lo:hi, lo:hi]
            B[keep, :keep] = bS[lo:hi]
            V[keep] = residual_vec
            k = keep

    def add_conjugates(self):
        """Lock conj(x) for every locked non-real eigenpair that lacks its partner."""
        added = 0
        lam, X = self._eigvecs()
        for l, x in zip(lam, X):
            if abs(l.imag) <= 1e-10:
                continue
            if np.min(np.abs(np.diag(self.T) - np.conj(l))) <= MERGE_TOL:
                continue
            if self.try_lock(x.conj()):
                added += 1
        return added

    def _eigvecs(self):
        lam = np.diag(self.T).copy()
        S = triangular_eigenvectors(self.T, MERGE_TOL)
        X = S.T @ self.Q  # eigenvectors as rows
        X /= np.linalg.norm(X, axis=1)[:, None]
        return lam, X

    def eigenpairs(self):
        lam, X = self._eigvecs()
        res = np.array([residual(self.op, l, x) for l, x in zip(lam, X)])
        return lam, X, res


def arnoldi_spectrum(
    op: GoogleOperator,
    lambda_min: float = 0.1,
    krylov_dim: int = 600,
    tol: float = 1e-8,
    max_restarts: int = 64,
    seed: int = 0,
    source: str = "",
    keep_vectors: bool = True,
    stall_limit: int = 30,
) -> SpectrumResult:
    """All eigenpairs of G with modulus >= lambda_min.

    Each sweep runs Krylov-Schur cycles on G restricted to the complement of
    the locked subspace, locking converged Schur vectors as they appear.  A
    sweep ends when every wanted Ritz value in it has been locked; the next
    sweep starts from a random vector orthogonal to everything locked, which
    is how repeated eigenvalues are found.  A sweep that locks nothing ends
    the search.  When ``max_restarts`` sweeps are used up, or a sweep stalls,
    the result is flagged incomplete and multiplicities are lower bounds.
    """
    if not 0.0 < lambda_min < 1.0:
        raise ParameterError(f"lambda_min must lie in (0, 1), got {lambda_min}")
    if not 1 < krylov_dim <= op.n:
        raise ParameterError(f"krylov_dim must satisfy 1 < krylov_dim <= n={op.n}, got {krylov_dim}")
    if tol <= 0:
        raise ParameterError("tol must be positive")

    rng = np.random.default_rng(seed)
    lock_tol = max(min(tol * 1e-3, 1e-11), 1e3 * _EPS)
    solver = _Solver(op, krylov_dim, 0.9 * lambda_min, lock_tol, stall_limit, rng)

    complete = False
    stalled = False
    restarts = 0
    while True:
        if solver.n_locked >= op.n:
            complete = True
            break
        v0 = solver.random_start()
        if v0 is None:
            complete = True
            break
        locked, stuck = solver.sweep(v0)
        locked += solver.add_conjugates()
        stalled = stalled or stuck
        if locked == 0:
            complete = not stalled
            break
        if restarts >= max_restarts:
            break
        restarts += 1

    lam, X, res = solver.eigenpairs()
    notes = []
    above = np.abs(lam) >= lambda_min
    dropped = int(np.sum(above & (res > tol)))
    if dropped:
        notes.append(f"{dropped} locked pairs above lambda_min exceeded tol and were dropped")
    keep = above & (res <= tol)
    lam, X, res = _merge_duplicates(lam[keep], X[keep], res[keep])
    order = _descending(lam)
    lam, X, res = lam[order], X[order], res[order]

    if stalled:
        notes.append("some wanted Ritz values did not converge; spectrum may be partial")
    if not complete and restarts >= max_restarts:
        notes.append(f"restart budget of {max_restarts} exhausted; multiplicities are lower bounds")
    if lam.size == 0:
        notes.append("no eigenvalue above lambda_min converged; krylov_dim may be too small")
        complete = False
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)

    return SpectrumResult(
        eigenvalues=lam,
        residuals=res,
        vectors=X.T.copy() if keep_vectors else None,
        lambda_min=lambda_min,
        n=op.n,
        alpha=op.alpha,
        tol=tol,
        source=source,
        complete=complete,
        multiplicity_lower_bound=not complete,
        warnings=notes,
        config={
            "method": "arnoldi",
            "alpha": op.alpha,
            "lambda_min": lambda_min,
            "krylov_dim": krylov_dim,
            "tol": tol,
            "max_restarts": max_restarts,
            "seed": seed,
            "restarts": restarts,
            "cycles": solver.cycles,
            "matvecs": solver.matvecs,
        },
    )


def _merge_duplicates(lam, X, res):
    """Drop pairs that repeat an earlier eigenvalue with the same eigenvector."""
    keep = []
    for k in np.argsort(res, kind="stable"):
        dup = False
        for j in keep:
            if abs(lam[k] - lam[j]) <= MERGE_TOL and abs(np.vdot(X[j], X[k])) > 0.999:
                dup = True
                break
        if not dup:
            keep.append(k)
    keep = np.array(sorted(keep), dtype=int)
    return lam[keep], X[keep], res[keep]
