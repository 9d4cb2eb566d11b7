"""Probabilistic truth semantics over density operators.

Truth convention: the last qubit (least significant bit) of a register
carries the truth value, with |1> true and |0> false.  A state's truth
probability is the Born expectation of the truth projector, and the
connectives obey the product laws

    p(not rho)        = 1 - p(rho)
    p(and(rho, sigma)) = p(rho) * p(sigma)

where conjunction is the Toffoli gate on the two truth qubits with a fresh
|0> ancilla appended as the new truth qubit, and disjunction is the
De Morgan composite of the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channels import apply, builtin_gate, lift_unitary
from .states import DensityOperator, Projector, born_expectation

_KET0 = np.array([[1, 0], [0, 0]], dtype=complex)


class TruthProjectors:
    """The falsity/truth projector pair on n qubits.

    p0 projects onto registers whose last qubit is 0, p1 onto those whose
    last qubit is 1; both are exact 0/1 diagonal matrices with p0 + p1 = I.
    """

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        dim = 2**n_qubits
        last_bit = np.arange(dim) & 1
        self.n_qubits = n_qubits
        self.p0 = Projector(np.diag((1 - last_bit).astype(complex)))
        self.p1 = Projector(np.diag(last_bit.astype(complex)))


def truth_projectors(n_qubits: int) -> TruthProjectors:
    return TruthProjectors(n_qubits)


def truth_probability(rho: DensityOperator) -> float:
    """Probability that the information stored by ``rho`` is true."""
    return born_expectation(rho, truth_projectors(rho.n_qubits).p1)


def qcl_not(rho: DensityOperator) -> DensityOperator:
    """Negation: the Not gate on the truth qubit."""
    op = lift_unitary(builtin_gate("Not"), rho.n_qubits, [rho.n_qubits - 1])
    return apply(op, rho)


def qcl_and(rho: DensityOperator, sigma: DensityOperator) -> DensityOperator:
    """Conjunction via Toffoli with a |0> ancilla.

    Builds rho (x) sigma (x) |0><0| and applies Toffoli controlled on the two
    input truth qubits, targeting the ancilla.  The ancilla is the last qubit
    of the output, so ``truth_probability`` reads the conjunction directly;
    the full composite state is returned, with no partial trace.
    """
    n, m = rho.n_qubits, sigma.n_qubits
    joint = linalg.tensor(linalg.tensor(rho.matrix, sigma.matrix), _KET0)
    state = DensityOperator(joint)
    toffoli = lift_unitary(
        builtin_gate("Toffoli"), n + m + 1, [n - 1, n + m - 1, n + m]
    )
    return apply(toffoli, state)


def qcl_or(rho: DensityOperator, sigma: DensityOperator) -> DensityOperator:
    """Disjunction as the De Morgan composite not(and(not rho, not sigma))."""
    return qcl_not(qcl_and(qcl_not(rho), qcl_not(sigma)))


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class GateApp:
    """Extension point: apply a named single-qubit gate to the truth qubit.

    Genuinely quantum gates (h, sqrtnot) carry no truth-functional law, so
    they have no surface syntax; they are available to programmatic formula
    trees only.
    """

    gate: str
    child: "Formula"


Formula = Atom | Not | And | Or | GateApp


def eval_formula_state(ast: Formula, bindings) -> DensityOperator:
    """Build the composite state denoted by a formula tree.

    Every occurrence of an atom contributes a fresh copy of its bound state
    (independent preparations), which is what makes e.g. `a | !a` evaluate
    to 0.75 rather than 1 at p(a) = 0.5.
    """
    match ast:
        case Atom(name):
            try:
                return bindings[name]
            except KeyError:
                raise ValueError(f"unbound atom {name!r}") from None
        case Not(child):
            return qcl_not(eval_formula_state(child, bindings))
        case And(left, right):
            return qcl_and(
                eval_formula_state(left, bindings), eval_formula_state(right, bindings)
            )
        case Or(left, right):
            return qcl_or(
                eval_formula_state(left, bindings), eval_formula_state(right, bindings)
            )
        case GateApp(gate, child):
            state = eval_formula_state(child, bindings)
            g = builtin_gate(gate)
            if g.arity != 1:
                raise ValueError(f"formula gate {gate!r} must be single-qubit")
            return apply(lift_unitary(g, state.n_qubits, [state.n_qubits - 1]), state)
        case _:
            raise TypeError(f"malformed formula node: {ast!r}")


def eval_formula(ast: Formula, bindings) -> float:
    """Truth probability of the state denoted by the formula."""
    return truth_probability(eval_formula_state(ast, bindings))
