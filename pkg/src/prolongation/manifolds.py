"""Nonlinear constraint sets: builtin families, tangent spaces, sampled
chain analysis and truncated jet spaces for the augmented (value-coupled)
setting.

A constraint family fixes, at every domain point, a set of admissible
Jacobians cut out by a defining function.  The tangent space at an
admissible matrix is the kernel of the defining function's derivative;
running the chain on sampled tangent spaces checks the constant-dimension
hypothesis under which the solution set has a well-defined dimension.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .matspace import (
    MatrixSubspace,
    make_subspace,
    nullspace_rows,
    row_complement,
)
from .obstruct import classify_delta_full, complex_structure_plane
from .prolong import DeltaStatus, chain
from .symtensor import HomPoly, PolyMap, derivative_op, hom_dim, monomial_basis


class DegeneratePointError(ValueError):
    """The defining function's derivative dropped rank at the given point."""


@dataclass
class ConstraintFamily:
    """Admissible-Jacobian set cut out by ``defining(x, A) = 0``.

    ``jacobian_fn(x, A)`` may supply the derivative of the residual in A as
    a (residual_dim, m*n) matrix; otherwise central finite differences with
    ``manifold_fd_step`` are used.  ``manifold_dim`` is the expected tangent
    dimension, used to flag degenerate points.
    """

    name: str
    n: int
    m: int
    manifold_dim: int
    defining: callable
    sample: callable                     # rng -> matrix on the constraint set
    base_point: np.ndarray
    jacobian_fn: callable = None

    def residual(self, A, x=None) -> np.ndarray:
        if x is None:
            x = np.zeros(self.n)
        return np.asarray(self.defining(x, np.asarray(A, dtype=float)), dtype=float)


def _symmetric_basis(n: int, trace_free: bool) -> list:
    out = []
    diag = [np.zeros((n, n)) for _ in range(n)]
    for i in range(n):
        diag[i][i, i] = 1.0
    if trace_free:
        # orthonormalize the diagonal directions against the identity
        from .matspace import _gram_schmidt

        eye = np.eye(n).ravel() / np.sqrt(n)
        vecs = _gram_schmidt([eye] + [d.ravel() for d in diag], 1e-12)
        out.extend(v.reshape(n, n) for v in vecs[1:])
    else:
        out.extend(diag)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0 / np.sqrt(2.0)
            out.append(E)
    return out


def _rotation_sample(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def quaternion_right_multiplications() -> MatrixSubspace:
    """Matrices of x -> x * q over the four unit quaternions q."""
    def quat_mult(a, b):
        a0, a1, a2, a3 = a
        b0, b1, b2, b3 = b
        return np.array(
            [
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            ]
        )

    gens = []
    for unit in np.eye(4):
        cols = [quat_mult(basis_vec, unit) for basis_vec in np.eye(4)]
        gens.append(np.column_stack(cols))
    return make_subspace(4, 4, gens)


def linear_family(V: MatrixSubspace, name: str = "custom-linear") -> ConstraintFamily:
    """Family whose constraint set is the subspace V itself."""
    perp = row_complement(V.flat, width=V.m * V.n)

    def defining(x, A):
        return perp @ A.ravel()

    def jac(x, A):
        return perp

    def sample(rng):
        if V.dim == 0:
            return np.zeros((V.m, V.n))
        return V.element(rng.standard_normal(V.dim))

    base = V.basis[0].copy() if V.dim else np.zeros((V.m, V.n))
    return ConstraintFamily(
        name=name, n=V.n, m=V.m, manifold_dim=V.dim,
        defining=defining, jacobian_fn=jac, sample=sample, base_point=base,
    )


def builtin_family(name: str, n: int, subspace: MatrixSubspace | None = None) -> ConstraintFamily:
    """Named constraint families; ``custom-linear`` wraps a given subspace.

    conformal: A A^T proportional to the identity with positive determinant,
    written as A A^T - (|A|_F^2 / n) I projected on trace-free symmetric
    directions, which reproduces the tangent space {scalar + skew} at the
    identity.  isometry: A A^T = I.  quaternion and holomorphic are linear.
    """
    if name == "isometry":
        if n < 1:
            raise ValueError("isometry needs n >= 1")
        basis = _symmetric_basis(n, trace_free=False)

        def defining(x, A):
            R = A @ A.T - np.eye(n)
            return np.array([np.sum(R * S) for S in basis])

        def jac(x, A):
            rows = []
            for S in basis:
                rows.append(((S + S.T) @ A).ravel())
            return np.array(rows)

        return ConstraintFamily(
            name=name, n=n, m=n, manifold_dim=n * (n - 1) // 2,
            defining=defining, jacobian_fn=jac,
            sample=lambda rng: _rotation_sample(rng, n),
            base_point=np.eye(n),
        )
    if name == "conformal":
        if n < 2:
            raise ValueError("conformal needs n >= 2")
        basis = _symmetric_basis(n, trace_free=True)

        def defining(x, A):
            R = A @ A.T - (np.sum(A * A) / n) * np.eye(n)
            return np.array([np.sum(R * S) for S in basis])

        def jac(x, A):
            rows = []
            for S in basis:
                rows.append((((S + S.T) @ A) - (2.0 * np.trace(S) / n) * A).ravel())
            return np.array(rows)

        def sample(rng):
            scale = float(np.exp(0.3 * rng.standard_normal()))
            return scale * _rotation_sample(rng, n)

        return ConstraintFamily(
            name=name, n=n, m=n, manifold_dim=1 + n * (n - 1) // 2,
            defining=defining, jacobian_fn=jac, sample=sample,
            base_point=np.eye(n),
        )
    if name == "quaternion":
        if n != 4:
            raise ValueError("the quaternion family lives in dimension 4")
        return linear_family(quaternion_right_multiplications(), name)
    if name == "holomorphic":
        if n != 2:
            raise ValueError("the holomorphic family lives in dimension 2")
        return linear_family(complex_structure_plane(2, 2), name)
    if name == "custom-linear":
        if subspace is None:
            raise ValueError("custom-linear needs an explicit subspace")
        return linear_family(subspace, name)
    raise ValueError(f"unknown family {name!r}")


def _fd_jacobian(family: ConstraintFamily, A: np.ndarray, x, step: float) -> np.ndarray:
    m, n = family.m, family.n
    r = family.residual(A, x).shape[0]
    out = np.zeros((r, m * n))
    flatA = A.ravel()
    for idx in range(m * n):
        h = np.zeros(m * n)
        h[idx] = step
        plus = family.residual((flatA + h).reshape(m, n), x)
        minus = family.residual((flatA - h).reshape(m, n), x)
        out[:, idx] = (plus - minus) / (2 * step)
    return out


def tangent_space(family: ConstraintFamily, A, x=None,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> MatrixSubspace:
    """Kernel of the defining function's derivative at an admissible A."""
    A = np.asarray(A, dtype=float)
    if A.shape != (family.m, family.n):
        raise ValueError("point has the wrong shape")
    res = family.residual(A, x)
    if np.linalg.norm(res) > tol.on_manifold:
        raise ValueError("the point does not lie on the constraint set")
    if family.jacobian_fn is not None:
        J = np.asarray(family.jacobian_fn(x if x is not None else np.zeros(family.n), A))
    else:
        J = _fd_jacobian(family, A, x, tol.manifold_fd_step)
    rows = nullspace_rows(J, tol)
    if rows.shape[0] != family.manifold_dim:
        raise DegeneratePointError(
            f"tangent dimension {rows.shape[0]} at this point, expected {family.manifold_dim}"
        )
    return MatrixSubspace(family.n, family.m, rows.reshape(-1, family.m, family.n))


@dataclass
class ManifoldReport:
    """Sampled chain analysis of one family."""

    family: str
    n: int
    m: int
    samples: int
    alpha_per_sample: list
    delta_statuses: list
    constant: bool
    all_finite: bool
    k: int | None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "m": self.m,
            "samples": self.samples,
            "alpha_per_sample": [list(a) for a in self.alpha_per_sample],
            "constant": self.constant,
            "k": self.k,
            "delta_statuses": [d.to_json() for d in self.delta_statuses],
        }


def sample_analysis(family: ConstraintFamily, sample_count: int = 20,
                    k_max: int = 8, seed: int = 0, restarts: int = 64,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> ManifoldReport:
    """Chain invariants on sampled tangent spaces, with constancy verdict.

    Non-terminating chains are escalated to the obstruction detectors so an
    infinite family is reported with a certificate when one is found.  A
    non-constant dimension sequence is a failed-hypothesis verdict, not an
    exception.
    """
    if sample_count < 2:
        raise ValueError("need at least two samples")
    alphas, statuses = [], []
    for i in range(sample_count):
        rng = np.random.default_rng([seed, i])
        A = family.sample(rng)
        Vt = tangent_space(family, A, tol=tol)
        report = chain(Vt, k_max, tol)
        if report.delta.status == "finite":
            statuses.append(report.delta)
        else:
            outcome = classify_delta_full(
                Vt, k_max, seed=1_000_003 * seed + i, restarts=restarts,
                tol=tol, report=report,
            )
            statuses.append(outcome.delta)
        alphas.append(tuple(report.alpha))
    constant = len(set(alphas)) == 1
    all_finite = all(s.status == "finite" for s in statuses)
    k = int(sum(alphas[0])) if constant and all_finite else None
    return ManifoldReport(
        family=family.name, n=family.n, m=family.m, samples=sample_count,
        alpha_per_sample=alphas, delta_statuses=statuses,
        constant=constant, all_finite=all_finite, k=k,
    )


# --- augmented (value-coupled) jet spaces ----------------------------------

@dataclass
class AugmentedSubspace:
    """Subspace of pairs (matrix, vector) in L(R^n, R^m) + R^m.

    ``basis`` rows are orthonormal vectors of length m*n + m; the first m*n
    entries hold the matrix part row-major, the tail the vector part.
    """

    n: int
    m: int
    basis: np.ndarray

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float).reshape(-1, self.m * self.n + self.m)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def matrix_part(self, row: int) -> np.ndarray:
        return self.basis[row, : self.m * self.n].reshape(self.m, self.n)

    def vector_part(self, row: int) -> np.ndarray:
        return self.basis[row, self.m * self.n:]


def make_augmented(n: int, m: int, pairs,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> AugmentedSubspace:
    """Augmented subspace spanned by (matrix, vector) generator pairs."""
    from .matspace import _gram_schmidt

    vecs = []
    for mat, vec in pairs:
        mat = np.asarray(mat, dtype=float)
        vec = np.asarray(vec, dtype=float)
        if mat.shape != (m, n) or vec.shape != (m,):
            raise ValueError("generator pair has wrong shapes")
        vecs.append(np.concatenate([mat.ravel(), vec]))
    basis = _gram_schmidt(vecs, tol.gram_schmidt_drop)
    if not basis:
        return AugmentedSubspace(n, m, np.zeros((0, m * n + m)))
    return AugmentedSubspace(n, m, np.array(basis))


def augment_with_full_range(V: MatrixSubspace) -> AugmentedSubspace:
    """Pairs (B, v) with B in V and v arbitrary: a constraint on the matrix
    component only."""
    pairs = [(B, np.zeros(V.m)) for B in V.basis]
    pairs += [(np.zeros((V.m, V.n)), e) for e in np.eye(V.m)]
    return make_augmented(V.n, V.m, pairs)


@dataclass
class JetReport:
    """Truncated jet space through a prescribed first-order part."""

    degree: int
    dimension: int
    empty: bool
    basis: list = field(default_factory=list)
    particular: object = None

    def to_json(self) -> dict:
        from .symtensor import polymap_to_json

        out = {
            "degree": self.degree,
            "dimension": self.dimension,
            "empty": self.empty,
            "basis": [polymap_to_json(F) for F in self.basis],
        }
        if self.particular is not None:
            out["particular"] = polymap_to_json(self.particular)
        return out


def augmented_jet_space(v_aug: AugmentedSubspace, A, D: int,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> JetReport:
    """Polynomial maps u of degree <= D with u(0) = 0, Du(0) = A and
    (Du(xi), u(xi)) in the augmented subspace for every xi.

    The identity in xi is split degree by degree, coupling consecutive
    homogeneous components into one linear system; the report carries the
    dimension of the solution set's linear part and a basis, or ``empty``
    when the affine constraints are inconsistent.
    """
    n, m = v_aug.n, v_aug.m
    if D < 1:
        raise ValueError("truncation degree must be >= 1")
    A = np.asarray(A, dtype=float)
    if A.shape != (m, n):
        raise ValueError("first-order part has the wrong shape")
    perp = row_complement(v_aug.basis, width=m * n + m)
    if perp.shape[0] == 0:
        dim_free = sum(hom_dim(n, m, j) for j in range(2, D + 1))
        basis = _unit_jet_basis(n, m, D)
        return JetReport(degree=D, dimension=dim_free, empty=False, basis=basis,
                         particular=PolyMap(n, m, {1: HomPoly(n, m, 1, A.copy())}))
    perp_mat = perp[:, : m * n].reshape(-1, m, n)   # matrix-part components
    perp_vec = perp[:, m * n:]                      # vector-part components
    q = perp.shape[0]

    # unknowns: coefficients of degrees 2..D
    widths = {j: hom_dim(n, m, j) for j in range(1, D + 1)}
    offsets = {}
    total = 0
    for j in range(2, D + 1):
        offsets[j] = total
        total += widths[j]

    rows, rhs = [], []

    def hom_coeff_rows(k):
        """Rows mapping degree-k coefficients to (row r, monomial gamma):
        <Du_k(xi) coefficient of gamma, perp_mat[r]>."""
        num_hi = comb(n + k - 1, k)
        num_lo = comb(n + k - 2, k - 1)
        block = np.zeros((q * num_lo, m * num_hi))
        for i in range(n):
            op = derivative_op(n, k, i)  # (num_lo, num_hi)
            for r in range(q):
                weights = perp_mat[r, :, i]  # over outputs a
                for a in range(m):
                    if weights[a] != 0.0:
                        block[r * num_lo:(r + 1) * num_lo, a * num_hi:(a + 1) * num_hi] += (
                            weights[a] * op
                        )
        return block, num_lo

    # degree-0 component: (A, 0) must satisfy the constraints
    feas = perp_mat.reshape(q, m * n) @ A.ravel()
    rows.append(np.zeros((q, total)))
    rhs.append(-feas)

    for d in range(1, D + 1):
        num_d = comb(n + d - 1, d)
        block = np.zeros((q * num_d, total))
        b = np.zeros(q * num_d)
        # matrix part: Du_{d+1} contributes when d+1 <= D
        if d + 1 <= D:
            deriv_block, _ = hom_coeff_rows(d + 1)
            block[:, offsets[d + 1]: offsets[d + 1] + widths[d + 1]] = deriv_block
        # vector part: u_d contributes; u_1 = A is a fixed offset
        if d == 1:
            lin = HomPoly(n, m, 1, A)
            for r in range(q):
                for idx_g in range(num_d):
                    b[r * num_d + idx_g] -= perp_vec[r] @ lin.coeffs[:, idx_g]
        elif d >= 2:
            num_dd = comb(n + d - 1, d)
            for r in range(q):
                for a in range(m):
                    if perp_vec[r, a] != 0.0:
                        for idx_g in range(num_dd):
                            block[r * num_d + idx_g,
                                  offsets[d] + a * num_dd + idx_g] += perp_vec[r, a]
        rows.append(block)
        rhs.append(b)

    G = np.vstack(rows)
    b = np.concatenate(rhs)
    if total == 0:
        if np.linalg.norm(b) > tol.jet_consistency:
            return JetReport(degree=D, dimension=0, empty=True)
        return JetReport(degree=D, dimension=0, empty=False, basis=[],
                         particular=PolyMap(n, m, {1: HomPoly(n, m, 1, A.copy())}))
    particular, *_ = np.linalg.lstsq(G, b, rcond=None)
    if np.linalg.norm(G @ particular - b) > tol.jet_consistency * max(1.0, np.linalg.norm(b)):
        return JetReport(degree=D, dimension=0, empty=True)
    null_rows = nullspace_rows(G, tol)

    def to_polymap(vec, include_linear):
        comps = {}
        if include_linear:
            comps[1] = HomPoly(n, m, 1, A.copy())
        for j in range(2, D + 1):
            block = vec[offsets[j]: offsets[j] + widths[j]]
            if np.max(np.abs(block), initial=0.0) > 0.0:
                comps[j] = HomPoly.from_coeff_vector(n, m, j, block)
        if not comps:
            comps[1] = HomPoly.zero(n, m, 1)
        return PolyMap(n, m, comps)

    basis = [to_polymap(row, include_linear=False) for row in null_rows]
    return JetReport(
        degree=D,
        dimension=null_rows.shape[0],
        empty=False,
        basis=basis,
        particular=to_polymap(particular, include_linear=True),
    )


def _unit_jet_basis(n, m, D):
    out = []
    for j in range(2, D + 1):
        width = hom_dim(n, m, j)
        for idx in range(width):
            vec = np.zeros(width)
            vec[idx] = 1.0
            out.append(PolyMap(n, m, {j: HomPoly.from_coeff_vector(n, m, j, vec)}))
    return out


# --- JSON forms -------------------------------------------------------------

def augmented_to_json(v_aug: AugmentedSubspace) -> dict:
    return {
        "n": v_aug.n,
        "m": v_aug.m,
        "generators": [
            {
                "matrix": v_aug.matrix_part(r).tolist(),
                "vector": v_aug.vector_part(r).tolist(),
            }
            for r in range(v_aug.dim)
        ],
    }


def augmented_from_json(data: dict) -> AugmentedSubspace:
    n, m = int(data["n"]), int(data["m"])
    pairs = [(g["matrix"], g["vector"]) for g in data.get("generators", [])]
    return make_augmented(n, m, pairs)
