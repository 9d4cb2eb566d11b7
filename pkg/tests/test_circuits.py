"""DSL parsing, simulation, distributions, sampling, and formula files."""

import numpy as np
import pytest

from bornlab import linalg
from bornlab.circuits import (
    CircuitIr,
    CircuitParseError,
    FormulaParseError,
    GateStep,
    Histogram,
    MeasureStep,
    NoiseStep,
    histogram_csv,
    histogram_record,
    histogram_table,
    inject_noise,
    outcome_distribution,
    parse_circuit,
    parse_formula,
    parse_formula_file,
    pretty_print,
    sample,
    simulate,
)
from bornlab.qcl import And, Atom, Not, Or
from bornlab.states import basis_state, pure_to_density, random_density

from conftest import THREE_QUBIT_DEMO


class TestParseCircuit:
    def test_demo_circuit(self):
        ir = parse_circuit(THREE_QUBIT_DEMO)
        assert ir.n_qubits == 3
        assert len(ir.steps) == 6
        assert ir.steps[0] == GateStep("not", (0,))
        assert ir.steps[-1] == MeasureStep(None)

    def test_empty_gate_list_is_valid(self):
        ir = parse_circuit("qubits 1\nmeasure all\n")
        assert ir.steps == (MeasureStep(None),)

    def test_comments_and_blank_lines(self):
        ir = parse_circuit("# header\nqubits 2\n\ngate h 0  # trailing\n")
        assert ir.steps == (GateStep("h", (0,)),)

    def test_repeated_target_is_rejected(self):
        with pytest.raises(CircuitParseError, match="repeated target"):
            parse_circuit("qubits 2\ngate cnot 0 0\n")

    def test_unknown_gate(self):
        with pytest.raises(CircuitParseError, match="unknown gate"):
            parse_circuit("qubits 1\ngate phase 0\n")

    def test_arity_mismatch(self):
        with pytest.raises(CircuitParseError, match="expects 2 targets"):
            parse_circuit("qubits 2\ngate cnot 0\n")

    def test_index_out_of_range(self):
        with pytest.raises(CircuitParseError, match="out of range"):
            parse_circuit("qubits 1\ngate not 1\n")

    def test_measure_must_be_last(self):
        with pytest.raises(CircuitParseError, match="after 'measure'"):
            parse_circuit("qubits 1\nmeasure all\ngate h 0\n")

    def test_missing_header(self):
        with pytest.raises(CircuitParseError, match="qubits"):
            parse_circuit("gate h 0\n")

    def test_errors_carry_line_and_column(self):
        try:
            parse_circuit("qubits 2\ngate h 0\ngate zz 1\n")
        except CircuitParseError as err:
            assert err.line == 3
            assert err.column == 6
        else:
            pytest.fail("expected a parse error")

    def test_noise_line(self):
        ir = parse_circuit("qubits 2\nnoise depolarizing 0.25 1\n")
        assert ir.steps == (NoiseStep("depolarizing", 0.25, 1),)

    def test_noise_probability_range(self):
        with pytest.raises(CircuitParseError, match="out of"):
            parse_circuit("qubits 1\nnoise bitflip 1.5 0\n")

    def test_measure_subset_is_sorted_and_distinct(self):
        ir = parse_circuit("qubits 3\nmeasure 2 0\n")
        assert ir.steps == (MeasureStep((0, 2)),)
        with pytest.raises(CircuitParseError, match="repeated measured"):
            parse_circuit("qubits 3\nmeasure 1 1\n")


class TestPrettyPrintRoundTrip:
    @pytest.mark.parametrize(
        "text",
        [
            THREE_QUBIT_DEMO,
            "qubits 1\nmeasure all\n",
            "qubits 4\ngate toffoli 0 2 3\nnoise bitflip 0.05 2\nmeasure 0 3\n",
            "qubits 2\ngate sqrtnot 1\ngate cnot 1 0\n",
        ],
    )
    def test_parse_is_inverse_of_pretty_print(self, text):
        ir = parse_circuit(text)
        assert parse_circuit(pretty_print(ir)) == ir

    def test_ir_validation_on_manual_construction(self):
        with pytest.raises(ValueError, match="final step"):
            CircuitIr(2, (MeasureStep(None), GateStep("h", (0,))))
        with pytest.raises(ValueError, match="unknown gate"):
            CircuitIr(1, (GateStep("rx", (0,)),))


class TestSimulate:
    def test_demo_circuit_is_the_identity_wire(self):
        rho = simulate(parse_circuit(THREE_QUBIT_DEMO))
        expected = pure_to_density(basis_state(3, 0)).matrix
        assert linalg.max_abs(rho.matrix - expected) <= 1e-12

    def test_hadamard_then_measure_is_maximally_mixed(self):
        rho = simulate(parse_circuit("qubits 1\ngate h 0\nmeasure all\n"))
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)

    def test_noiseless_circuits_preserve_purity(self):
        ir = parse_circuit("qubits 2\ngate h 0\ngate cnot 0 1\ngate sqrtnot 1\n")
        rho = simulate(ir)
        assert rho.is_pure(1e-10)

    def test_custom_input_state(self):
        ir = parse_circuit("qubits 1\ngate not 0\n")
        out = simulate(ir, input_state=pure_to_density(basis_state(1, 1)))
        np.testing.assert_allclose(
            out.matrix, pure_to_density(basis_state(1, 0)).matrix, atol=1e-15
        )

    def test_input_dimension_mismatch(self):
        ir = parse_circuit("qubits 2\n")
        with pytest.raises(ValueError, match="qubits"):
            simulate(ir, input_state=random_density(1, rng=3))

    def test_disjoint_gate_steps_commute(self):
        a = simulate(parse_circuit("qubits 2\ngate not 0\ngate h 1\n"))
        b = simulate(parse_circuit("qubits 2\ngate h 1\ngate not 0\n"))
        assert linalg.max_abs(a.matrix - b.matrix) <= 1e-12


class TestOutcomeDistribution:
    def test_basis_state_is_a_point_mass(self):
        dist = outcome_distribution(pure_to_density(basis_state(3, 0)))
        assert dist == {"000": 1.0}

    def test_maximally_mixed_qubit(self):
        from bornlab.states import DensityOperator

        dist = outcome_distribution(DensityOperator(np.eye(2) / 2))
        assert set(dist) == {"0", "1"}
        assert abs(dist["0"] - 0.5) <= 1e-12

    def test_demo_circuit_distribution(self):
        dist = outcome_distribution(simulate(parse_circuit(THREE_QUBIT_DEMO)))
        assert abs(dist["000"] - 1.0) <= 1e-12
        assert set(dist) == {"000"}

    def test_sums_to_one(self):
        rng = np.random.default_rng(79)
        dist = outcome_distribution(random_density(3, rng=rng))
        assert abs(sum(dist.values()) - 1.0) <= 1e-10


class TestSample:
    def test_deterministic_for_fixed_seed(self):
        ir = parse_circuit("qubits 1\ngate h 0\nmeasure all\n")
        assert sample(ir, 500, 42) == sample(ir, 500, 42)

    def test_point_mass_circuit(self):
        ir = parse_circuit(THREE_QUBIT_DEMO)
        for seed in range(10):
            assert sample(ir, 1024, seed).counts == {"000": 1024}

    def test_noisy_demo_keeps_the_modal_outcome(self):
        ir = inject_noise(parse_circuit(THREE_QUBIT_DEMO), "bitflip", 0.05)
        h = sample(ir, 1024, 7)
        assert max(h.counts, key=h.counts.get) == "000"
        assert len(h.counts) >= 2

    def test_subset_measurement_marginalizes(self):
        ir = parse_circuit("qubits 2\ngate not 1\nmeasure 1\n")
        h = sample(ir, 64, 1)
        assert h.counts == {"1": 64}

    def test_histogram_invariants(self):
        with pytest.raises(ValueError, match="sum to shots"):
            Histogram(shots=2, counts={"0": 1}, seed=0)
        with pytest.raises(ValueError, match="one length"):
            Histogram(shots=2, counts={"0": 1, "01": 1}, seed=0)

    def test_shots_must_be_positive(self):
        ir = parse_circuit("qubits 1\n")
        with pytest.raises(ValueError, match="shots"):
            sample(ir, 0, 0)

    def test_empirical_frequency_tracks_the_distribution(self):
        ir = parse_circuit("qubits 1\ngate h 0\nmeasure all\n")
        h = sample(ir, 100_000, 2026)
        freq = h.counts["0"] / h.shots
        assert 0.494 <= freq <= 0.506  # ~4 sigma at 1e5 shots


class TestHistogramSerialization:
    def setup_method(self):
        self.h = Histogram(shots=4, counts={"10": 1, "00": 3}, seed=9)

    def test_table(self):
        assert histogram_table(self.h) == "shots 4\nseed 9\n00 3\n10 1\n"

    def test_csv(self):
        assert histogram_csv(self.h) == "# shots=4 seed=9\noutcome,count\n00,3\n10,1\n"

    def test_record_round_trips_through_json(self):
        import json

        payload = json.loads(histogram_record(self.h))
        assert payload == {"shots": 4, "seed": 9, "counts": {"00": 3, "10": 1}}


class TestInjectNoise:
    def test_adds_one_step_per_gate_target(self):
        ir = parse_circuit("qubits 2\ngate cnot 0 1\nmeasure all\n")
        noisy = inject_noise(ir, "depolarizing", 0.1)
        kinds = [type(s).__name__ for s in noisy.steps]
        assert kinds == ["GateStep", "NoiseStep", "NoiseStep", "MeasureStep"]
        assert noisy.steps[1] == NoiseStep("depolarizing", 0.1, 0)
        assert noisy.steps[2] == NoiseStep("depolarizing", 0.1, 1)

    def test_rejects_bad_spec(self):
        ir = parse_circuit("qubits 1\n")
        with pytest.raises(ValueError, match="noise kind"):
            inject_noise(ir, "thermal", 0.1)
        with pytest.raises(ValueError, match="probability"):
            inject_noise(ir, "bitflip", 2.0)


class TestParseFormula:
    def test_precedence_not_binds_tightest(self):
        assert parse_formula("!a & b") == And(Not(Atom("a")), Atom("b"))

    def test_and_binds_tighter_than_or(self):
        assert parse_formula("a | b & c") == Or(Atom("a"), And(Atom("b"), Atom("c")))

    def test_parentheses_group(self):
        assert parse_formula("(a | b) & c") == And(Or(Atom("a"), Atom("b")), Atom("c"))

    def test_left_associativity(self):
        assert parse_formula("a & b & c") == And(And(Atom("a"), Atom("b")), Atom("c"))

    def test_error_positions(self):
        with pytest.raises(FormulaParseError, match="column 5"):
            parse_formula("a & $b")
        with pytest.raises(FormulaParseError, match="unexpected end"):
            parse_formula("a &")
        with pytest.raises(FormulaParseError, match="expected '\\)'"):
            parse_formula("(a | b")


class TestParseFormulaFile:
    def test_literal_atoms(self):
        text = (
            "# two even superpositions\n"
            "atom a = (0.70710678, 0, 0.70710678, 0)\n"
            "atom b = (0.70710678, 0, 0.70710678, 0)\n"
            "formula = a & b\n"
        )
        ast, bindings = parse_formula_file(text)
        assert ast == And(Atom("a"), Atom("b"))
        assert set(bindings) == {"a", "b"}
        from bornlab.qcl import eval_formula

        assert abs(eval_formula(ast, bindings) - 0.25) <= 1e-9

    def test_circuit_atom(self, tmp_path):
        (tmp_path / "h.qc").write_text("qubits 1\ngate h 0\n", encoding="utf-8")
        text = "atom a = h.qc\nformula = a\n"
        ast, bindings = parse_formula_file(text, base_dir=tmp_path)
        assert abs(bindings["a"].matrix[0, 0] - 0.5) <= 1e-12

    def test_literals_are_normalized(self):
        ast, bindings = parse_formula_file("atom a = (1, 0, 1, 0)\nformula = a\n")
        assert abs(bindings["a"].matrix[0, 1] - 0.5) <= 1e-12

    def test_missing_formula_line(self):
        with pytest.raises(FormulaParseError, match="missing 'formula"):
            parse_formula_file("atom a = (1, 0, 0, 0)\n")

    def test_duplicate_atom(self):
        with pytest.raises(FormulaParseError, match="duplicate atom"):
            parse_formula_file("atom a = (1,0,0,0)\natom a = (0,0,1,0)\nformula = a\n")

    def test_bad_literal(self):
        with pytest.raises(FormulaParseError, match="4 numbers"):
            parse_formula_file("atom a = (1, 0)\nformula = a\n")

    def test_missing_circuit_file(self, tmp_path):
        with pytest.raises(ValueError, match="cannot read circuit"):
            parse_formula_file("atom a = nope.qc\nformula = a\n", base_dir=tmp_path)
