"""CLI tests: config validation, subcommand wiring, reports, exit codes."""

import json
import math

import pytest

from oscillint.cli import (
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_NON_OSCILLATORY,
    EXIT_OSCILLATORY,
    EXIT_RAN,
    ConfigError,
    Report,
    config_from_dict,
    load_config,
    main,
    run,
    to_jsonable,
    write_report,
)
from oscillint.criteria import NON_OSCILLATORY, OSCILLATORY


def forced_harmonic_doc(**overrides):
    doc = {"equation": {"a": "1", "b": "0", "c": "1", "d": "sin(t)"},
           "horizon": 8.0 * math.pi}
    doc.update(overrides)
    return doc


def decaying_doc(**overrides):
    doc = {"system": {"q": "1", "r": "1", "g": "-exp(-t)"},
           "horizon": 30.0,
           "tolerances": {"escape_magnitude": 1e15}}
    doc.update(overrides)
    return doc


def write_doc(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


class TestConfigLoading:
    def test_equation_config_valid(self, tmp_path):
        config = load_config(write_doc(tmp_path, forced_harmonic_doc()))
        assert config.equation is not None
        assert config.system is None
        assert config.grid_nodes == 2048
        sys_spec = config.working_system()
        assert sys_spec.is_forced()

    def test_both_inputs_rejected(self):
        doc = forced_harmonic_doc(system={"q": "1"})
        with pytest.raises(ConfigError, match="exactly one"):
            config_from_dict(doc)

    def test_neither_input_rejected(self):
        with pytest.raises(ConfigError, match="exactly one"):
            config_from_dict({"horizon": 1.0})

    def test_bad_expression_names_field_and_position(self):
        doc = {"system": {"q": "1 + + t"}, "horizon": 1.0}
        with pytest.raises(ConfigError, match=r"system\.q.*offset"):
            config_from_dict(doc)

    def test_negative_q_loads_fine(self):
        config = config_from_dict({"system": {"q": "-1"}, "horizon": 5.0})
        report = run("analyze", config)
        assert report.verdict.outcome == "inconclusive"

    def test_missing_horizon(self):
        with pytest.raises(ConfigError, match="horizon"):
            config_from_dict({"system": {"q": "1"}})

    def test_horizon_before_t0(self):
        with pytest.raises(ConfigError, match="exceed t0"):
            config_from_dict({"system": {"q": "1"}, "t0": 2.0, "horizon": 1.0})

    def test_small_grid_rejected(self):
        with pytest.raises(ConfigError, match="grid_nodes"):
            config_from_dict(forced_harmonic_doc(grid_nodes=32))

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown field 'qq'"):
            config_from_dict({"system": {"qq": "1"}, "horizon": 1.0})
        with pytest.raises(ConfigError, match="unknown field 'horizons'"):
            config_from_dict({"system": {"q": "1"}, "horizons": 1.0})

    def test_invalid_json_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"horizon": 1.0,,}', encoding="utf-8")
        with pytest.raises(ConfigError, match="line 1 column"):
            load_config(path)

    def test_defaults_echoed(self):
        config = config_from_dict(forced_harmonic_doc())
        echo = config.effective
        assert echo["grid_nodes"] == 2048
        assert echo["tolerances"]["rel_tol"] == 1e-8
        assert echo["oracle"]["seed"] == 1729
        assert echo["scan"]["points"] == 8
        assert echo["lambda"]["points"] == 41
        assert echo["periodic"] is None

    def test_explicit_lambda_values(self):
        config = config_from_dict(decaying_doc(**{"lambda": {"values": [0.0, 1.0]}}))
        assert config.lambda_values == (0.0, 1.0)


class TestSubcommands:
    def test_analyze_oscillatory(self):
        config = config_from_dict(forced_harmonic_doc())
        report = run("analyze", config)
        assert report.verdict.outcome == OSCILLATORY
        assert report.exit_code() == EXIT_OSCILLATORY
        witnesses = report.verdict.evidence["witnesses"]
        _, first = witnesses[0]
        expected = (math.pi, 2 * math.pi, 2 * math.pi, 3 * math.pi)
        got = (first.s1, first.t1, first.s2, first.t2)
        assert max(abs(a - b) for a, b in zip(got, expected)) < 1e-6
        assert report.details["oracle_agrees"] is True

    def test_analyze_nonoscillatory_lambda_witness(self):
        config = config_from_dict(decaying_doc())
        report = run("analyze", config)
        assert report.verdict.outcome == NON_OSCILLATORY
        assert report.exit_code() == EXIT_NON_OSCILLATORY
        assert report.verdict.evidence["lambda_witness"] == pytest.approx(
            1.0, abs=1e-6)
        assert report.empirical.outcome == "nonoscillatory_observed"

    def test_analyze_inconclusive(self):
        config = config_from_dict({"system": {"q": "cos(t)", "r": "-1"},
                                   "horizon": 20.0})
        report = run("analyze", config)
        assert report.exit_code() == EXIT_INCONCLUSIVE

    def test_oracle_only(self):
        config = config_from_dict(forced_harmonic_doc())
        report = run("oracle", config)
        assert report.verdict is None
        assert report.empirical.outcome == "oscillatory_observed"
        assert report.exit_code() == EXIT_OSCILLATORY

    def test_reduce_prints_companion(self):
        config = config_from_dict(forced_harmonic_doc())
        report = run("reduce", config)
        assert report.details["system"] == {
            "p": "0", "q": "1", "r": "-1", "s": "0", "f": "0", "g": "sin(t)"}
        assert report.exit_code() == EXIT_RAN

    def test_reduce_requires_equation(self):
        config = config_from_dict(decaying_doc())
        with pytest.raises(ConfigError, match="equation"):
            run("reduce", config)

    def test_wong_oscillatory(self):
        config = config_from_dict(forced_harmonic_doc())
        report = run("wong", config)
        assert report.verdict.outcome == OSCILLATORY
        assert report.exit_code() == EXIT_OSCILLATORY

    def test_riccati_homogeneous(self):
        config = config_from_dict({"system": {"q": "1", "r": "-1"},
                                   "horizon": 1.2})
        report = run("riccati", config)
        assert report.details["blew_up"] is False
        # y = psi/phi for cos/-sin start (1, 0): y = -tan t
        assert report.details["final_value"] == pytest.approx(
            -math.tan(1.2), abs=1e-7)

    def test_riccati_blowup_reported(self):
        config = config_from_dict({"system": {"q": "1", "r": "-1"},
                                   "horizon": 3.0})
        report = run("riccati", config)
        assert report.details["blew_up"] is True
        assert report.details["escape_time"] == pytest.approx(
            math.pi / 2, abs=1e-3)

    def test_riccati_rejects_forced(self):
        config = config_from_dict(forced_harmonic_doc())
        with pytest.raises(ConfigError, match="unforced"):
            run("riccati", config)

    def test_compare_certificate_and_validation(self):
        config = config_from_dict({
            "system": {"q": "1", "r": "-1"}, "horizon": 3.0,
            "compare": {
                "problem1": {"f": "1", "g": "0", "h": "1/2"},
                "problem2": {"f": "1", "g": "0", "h": "1"},
                "span": [0.0, 1.0], "y2_start": 0.0}})
        report = run("compare", config)
        assert report.certificate.holds is True
        assert report.validation.passed is True
        assert report.details["agreement"] is True
        assert report.exit_code() == EXIT_RAN

    def test_compare_squared_variant_flag(self):
        config = config_from_dict({
            "system": {"q": "1", "r": "-1"}, "horizon": 3.0,
            "compare": {
                "problem1": {"f": "1", "g": "0", "h": "1"},
                "problem2": {"f": "3", "g": "0", "h": "1"},
                "span": [0.0, 0.5], "y2_start": 0.0}})
        plain = run("compare", config)
        squared = run("compare", config, squared_variant=True)
        assert squared.certificate.squared_variant is True
        assert plain.certificate.squared_variant is False

    def test_compare_requires_section(self):
        config = config_from_dict(decaying_doc())
        with pytest.raises(ConfigError, match="compare"):
            run("compare", config)

    def test_sweep_landscape(self):
        config = config_from_dict(decaying_doc())
        report = run("sweep", config)
        interval = report.details["feasible_interval"]
        assert interval[0] == pytest.approx(1.0, abs=1e-6)
        rows = report.details["rows"]
        assert rows, "sweep produced no rows"
        for row in rows:
            inside = (row["lam"] >= interval[0] - 1e-9
                      and row["lam"] <= interval[1] + 1e-9)
            assert row["feasible"] == inside, row

    def test_unknown_subcommand(self):
        config = config_from_dict(decaying_doc())
        with pytest.raises(ConfigError, match="subcommand"):
            run("frobnicate", config)


class TestMainEntry:
    def test_exit_codes_match_reports(self, tmp_path, capsys):
        path = write_doc(tmp_path, forced_harmonic_doc())
        code = main(["analyze", "--config", str(path)])
        out = capsys.readouterr().out
        assert code == EXIT_OSCILLATORY
        assert "outcome: oscillatory" in out

    def test_error_exit_and_message(self, tmp_path, capsys):
        path = write_doc(tmp_path, {"system": {"q": "1 +"}, "horizon": 1.0})
        code = main(["analyze", "--config", str(path)])
        err = capsys.readouterr().err
        assert code == EXIT_ERROR
        assert "system.q" in err

    def test_missing_file(self, tmp_path, capsys):
        code = main(["analyze", "--config", str(tmp_path / "nope.json")])
        assert code == EXIT_ERROR
        assert "error" in capsys.readouterr().err

    def test_horizon_override_echoed(self, tmp_path, capsys):
        path = write_doc(tmp_path, decaying_doc())
        out_file = tmp_path / "report.txt"
        code = main(["analyze", "--config", str(path),
                     "--horizon", "20.0", "--out", str(out_file)])
        assert code == EXIT_NON_OSCILLATORY
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["provenance"]["config"]["horizon"] == 20.0
        assert doc["verdict"]["horizon"] == [0.0, 20.0]

    def test_dump_traces(self, tmp_path):
        path = write_doc(tmp_path, forced_harmonic_doc(
            oracle={"size": 4, "seed": 5}))
        traces = tmp_path / "traces"
        code = main(["oracle", "--config", str(path),
                     "--dump-traces", str(traces)])
        assert code == EXIT_OSCILLATORY
        files = sorted(p.name for p in traces.iterdir())
        assert files == [f"member_{i:02d}.csv" for i in range(4)]
        header = (traces / "member_00.csv").read_text().splitlines()[0]
        assert header == "t,phi,psi"


class TestReports:
    def test_sibling_files_written_atomically(self, tmp_path):
        config = config_from_dict(decaying_doc())
        report = run("sweep", config)
        text_path, json_path = write_report(report, tmp_path / "report.txt")
        assert text_path.exists() and json_path.exists()
        assert json_path.name == "report.json"
        assert not list(tmp_path.glob("*.tmp"))
        doc = json.loads(json_path.read_text())
        assert doc["subcommand"] == "sweep"

    def test_text_and_json_carry_same_facts(self):
        config = config_from_dict(forced_harmonic_doc())
        report = run("analyze", config)
        text = report.render_text()
        doc = report.to_dict()

        def scalars(obj):
            if isinstance(obj, dict):
                for v in obj.values():
                    yield from scalars(v)
            elif isinstance(obj, list):
                for v in obj:
                    yield from scalars(v)
            else:
                yield obj
        for value in scalars(doc):
            if isinstance(value, bool):
                token = "true" if value else "false"
            elif value is None:
                token = "null"
            elif isinstance(value, float):
                token = repr(value)
            else:
                token = str(value)
            if token:
                assert token in text, token

    def test_idempotent_rerun_from_echo(self, tmp_path):
        config = config_from_dict(decaying_doc())
        report = run("analyze", config)
        echo = report.provenance["config"]
        replay_path = write_doc(tmp_path, echo, name="replay.json")
        replay = run("analyze", load_config(replay_path))
        assert replay.render_json() == report.render_json()

    def test_infinities_serialized_as_strings(self):
        assert to_jsonable(float("inf")) == "inf"
        assert to_jsonable(float("-inf")) == "-inf"
        assert to_jsonable((1.0, None, True)) == [1.0, None, True]

    def test_exit_code_without_verdict(self):
        assert Report("sweep").exit_code() == EXIT_RAN
