"""Gates and Kraus-family quantum operations.

A gate is a unitary on its own 2**arity space; ``lift_unitary`` embeds it
into an n-qubit register.  For multi-target gates the earlier-listed targets
are the controls and the last listed target is the negated qubit, so
``lift_unitary(toffoli, n, [c1, c2, t])`` computes AND-into-t.

Measurement is the non-unitary member of the same family: a Kraus channel of
computational-basis projectors that kills coherences between measured
sectors.  Noise channels model environment error with one tunable
probability:

    bit_flip:     rho -> (1 - p) rho + p X rho X
    depolarizing: rho -> (1 - 3p/4) rho + (p/4)(X rho X + Y rho Y + Z rho Z)
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .linalg import STRUCTURAL_TOL, as_matrix
from .states import DensityOperator

IDENTITY_1Q = as_matrix(np.eye(2))
PAULI_X = as_matrix([[0, 1], [1, 0]])
PAULI_Y = as_matrix([[0, -1j], [1j, 0]])
PAULI_Z = as_matrix([[1, 0], [0, -1]])
HADAMARD = as_matrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2.0))
SQRT_NOT = as_matrix(np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]) / 2.0)


def _controlled_not(n_controls: int) -> np.ndarray:
    # Permutation swapping the last two basis states: flips the final bit
    # when every control bit is 1.
    dim = 2 ** (n_controls + 1)
    m = np.eye(dim)
    m[[dim - 2, dim - 1]] = m[[dim - 1, dim - 2]]
    return m


CNOT = as_matrix(_controlled_not(1))
TOFFOLI = as_matrix(_controlled_not(2))


class Gate:
    """A named unitary acting on ``arity`` qubits."""

    def __init__(self, name: str, matrix, tol: float = STRUCTURAL_TOL):
        m = as_matrix(matrix)
        if not linalg.is_unitary(m, tol):
            raise ValueError(f"gate {name!r} is not unitary")
        self.name = name
        self.matrix = m
        self.arity = linalg.n_qubits_of(m.shape[0])

    def __repr__(self) -> str:
        return f"Gate({self.name!r}, arity={self.arity})"


_BUILTINS = {
    "i": ("I", IDENTITY_1Q),
    "id": ("I", IDENTITY_1Q),
    "identity": ("I", IDENTITY_1Q),
    "not": ("Not", PAULI_X),
    "x": ("Not", PAULI_X),
    "h": ("H", HADAMARD),
    "hadamard": ("H", HADAMARD),
    "sqrtnot": ("SqrtNot", SQRT_NOT),
    "cnot": ("CNot", CNOT),
    "toffoli": ("Toffoli", TOFFOLI),
    "ccnot": ("Toffoli", TOFFOLI),
}


def builtin_gate(name: str) -> Gate:
    """Look up a standard gate: I, Not, CNot, Toffoli, H, SqrtNot."""
    try:
        canonical, matrix = _BUILTINS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}") from None
    return Gate(canonical, matrix)


class QuantumOperation:
    """Trace-preserving completely positive map given by Kraus matrices.

    The family must satisfy sum(dagger(A_i) @ A_i) == I within ``tol``;
    complete positivity then holds by construction of the Kraus form.
    """

    def __init__(self, kraus, tol: float = STRUCTURAL_TOL):
        ks = tuple(as_matrix(k) for k in kraus)
        if not ks:
            raise ValueError("Kraus family must be non-empty")
        dim = ks[0].shape[0]
        if any(k.shape[0] != dim for k in ks):
            raise ValueError("Kraus matrices must share one dimension")
        self.n_qubits = linalg.n_qubits_of(dim)
        total = sum(linalg.dagger(k) @ k for k in ks)
        if linalg.max_abs(total - np.eye(dim)) > tol:
            raise ValueError("Kraus family is not trace preserving")
        self.kraus = ks

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __repr__(self) -> str:
        return f"QuantumOperation(n_qubits={self.n_qubits}, n_kraus={len(self.kraus)})"


def identity_operation(n_qubits: int) -> QuantumOperation:
    return QuantumOperation([np.eye(2**n_qubits)])


def _embed_unitary(u: np.ndarray, n_qubits: int, targets) -> np.ndarray:
    """Embed a 2**k unitary on the listed target qubits, identity elsewhere.

    Slot m of the gate's own index corresponds to targets[m]; slot 0 is the
    most significant, matching the tensor-order convention.
    """
    k = len(targets)
    dim = 2**n_qubits
    shifts = [n_qubits - 1 - t for t in targets]
    clear = 0
    for s in shifts:
        clear |= 1 << s
    full = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        t_in = 0
        for m, s in enumerate(shifts):
            t_in |= ((j >> s) & 1) << (k - 1 - m)
        base = j & ~clear
        for t_out in range(2**k):
            amp = u[t_out, t_in]
            if amp == 0:
                continue
            i = base
            for m, s in enumerate(shifts):
                i |= ((t_out >> (k - 1 - m)) & 1) << s
            full[i, j] = amp
    return full


def lift_unitary(gate: Gate, n_qubits: int, targets) -> QuantumOperation:
    """Single-Kraus operation rho -> U rho dagger(U) with U the embedded gate."""
    targets = list(targets)
    if len(targets) != gate.arity:
        raise ValueError(
            f"gate {gate.name!r} has arity {gate.arity}, got {len(targets)} targets"
        )
    if len(set(targets)) != len(targets):
        raise ValueError(f"target indices must be distinct, got {targets}")
    if any(not 0 <= t < n_qubits for t in targets):
        raise ValueError(f"target indices {targets} out of range for {n_qubits} qubits")
    return QuantumOperation([_embed_unitary(gate.matrix, n_qubits, targets)])


def apply(op: QuantumOperation, rho: DensityOperator) -> DensityOperator:
    """Evaluate the operation: sum_i A_i rho dagger(A_i).

    The result is revalidated as a density operator, so a malformed Kraus
    family surfaces here rather than corrupting downstream probabilities.
    """
    if op.n_qubits != rho.n_qubits:
        raise ValueError("operation and state act on different qubit counts")
    out = np.zeros_like(rho.matrix)
    for k in op.kraus:
        out = out + k @ rho.matrix @ linalg.dagger(k)
    return DensityOperator(out)


def measurement_channel(n_qubits: int, measured) -> QuantumOperation:
    """Projective dephasing of the listed qubits in the computational basis.

    One Kraus projector per assignment of the measured qubits; applying the
    channel zeroes coherences between distinct measured-basis sectors and
    leaves the diagonal untouched.
    """
    qs = sorted(set(measured))
    if not qs:
        raise ValueError("measured qubit set must be non-empty")
    if qs[0] < 0 or qs[-1] >= n_qubits:
        raise ValueError(f"measured indices {qs} out of range for {n_qubits} qubits")
    dim = 2**n_qubits
    idx = np.arange(dim)
    kraus = []
    for assignment in range(2 ** len(qs)):
        mask = np.ones(dim, dtype=bool)
        for pos, q in enumerate(qs):
            bit = (assignment >> (len(qs) - 1 - pos)) & 1
            mask &= ((idx >> (n_qubits - 1 - q)) & 1) == bit
        kraus.append(np.diag(mask.astype(complex)))
    return QuantumOperation(kraus)


def noise_channel(kind: str, p: float, n_qubits: int, target: int) -> QuantumOperation:
    """Single-qubit noise on ``target``: ``bit_flip`` or ``depolarizing``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise probability must be in [0, 1], got {p}")
    if not 0 <= target < n_qubits:
        raise ValueError(f"noise target {target} out of range for {n_qubits} qubits")
    x = _embed_unitary(PAULI_X, n_qubits, [target])
    eye = np.eye(2**n_qubits)
    kind_key = kind.replace("_", "")
    if kind_key == "bitflip":
        weighted = [(1.0 - p, eye), (p, x)]
    elif kind_key == "depolarizing":
        y = _embed_unitary(PAULI_Y, n_qubits, [target])
        z = _embed_unitary(PAULI_Z, n_qubits, [target])
        weighted = [(1.0 - 3.0 * p / 4.0, eye), (p / 4.0, x), (p / 4.0, y), (p / 4.0, z)]
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    kraus = [np.sqrt(w) * m for w, m in weighted if w > 0.0]
    return QuantumOperation(kraus)


def compose(ops) -> QuantumOperation:
    """Composite of operations applied in list order (first entry acts first).

    The Kraus family of the composite is the full set of ordered products; no
    compression pass is attempted at these sizes.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("compose of an empty list")
    n = ops[0].n_qubits
    if any(op.n_qubits != n for op in ops):
        raise ValueError("composed operations must share one qubit count")
    kraus = list(ops[0].kraus)
    for op in ops[1:]:
        kraus = [b @ a for b in op.kraus for a in kraus]
    return QuantumOperation(kraus)
