"""End-to-end CLI runs on the tiny IDX dataset and synthetic streams."""

import csv
import io
import os
from collections import defaultdict

import pytest

from mcf import bench_cli, config
from mcf.bench_cli import main
from mcf.errors import McfError, StateError
from mcf.models import ExperimentConfig
from mcf.orchestrator import run_benchmark
from mcf.report_engine import RESULT_FIELDS, TRACE_FIELDS, ordering_count


def bench(capsys, *argv):
    code = main(["bench", *argv])
    return code, capsys.readouterr()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestBench:

    def test_single_task(self, capsys, tiny_mnist_args):
        code, out = bench(capsys, "--algorithm", "mcp", "--labels", "0", "--permutations", "1",
                          *tiny_mnist_args)
        assert code == config.EXIT_OK
        rows = rows_of(out.out)
        assert list(rows[0].keys()) == RESULT_FIELDS
        assert [r["permutation_index"] for r in rows] == ["0", "avg"]
        assert rows[1]["seed"] == ""
        assert 0 <= int(rows[0]["test_mistakes"]) <= 10
        assert float(rows[0]["test_error_rate"]) == int(rows[0]["test_mistakes"]) / 10
        assert "label" in out.err

    def test_deterministic(self, capsys, tiny_mnist_args):
        argv = ["--labels", "1,4", "--permutations", "2", *tiny_mnist_args]
        _, first = bench(capsys, *argv)
        _, second = bench(capsys, *argv)
        assert first.out == second.out

    def test_parallel_matches_serial(self, capsys, tiny_mnist_args):
        argv = ["--labels", "0,5", "--permutations", "2", "--seed", "9", *tiny_mnist_args]
        _, serial = bench(capsys, *argv)
        _, parallel = bench(capsys, *argv, "--jobs", "2")
        assert serial.out == parallel.out

    def test_full_grid_and_averages(self, capsys, tiny_mnist_args):
        code, out = bench(capsys, "--algorithm", "all", "--labels", "2,3", "--permutations", "2",
                          *tiny_mnist_args)
        assert code == config.EXIT_OK
        rows = rows_of(out.out)
        data = [r for r in rows if r["permutation_index"] != "avg"]
        averages = [r for r in rows if r["permutation_index"] == "avg"]
        assert len(data) == len(config.ALGORITHMS) * 2 * 2
        assert len(averages) == len(config.ALGORITHMS) * 2
        assert rows.index(averages[0]) == len(data)

        groups = defaultdict(list)
        for r in data:
            groups[(r["algorithm"], r["label"])].append(r)
        for avg in averages:
            group = groups[(avg["algorithm"], avg["label"])]
            for field in ("train_updates", "train_mistakes", "test_mistakes", "test_error_rate"):
                mean = sum(float(r[field]) for r in group) / len(group)
                assert float(avg[field]) == pytest.approx(mean, rel=1e-12)

    def test_out_file(self, capsys, tmp_path, tiny_mnist_args):
        path = tmp_path / "results.csv"
        code, out = bench(capsys, "--algorithm", "pa", "--labels", "0", "--permutations", "1",
                          "--out", str(path), *tiny_mnist_args)
        assert code == config.EXIT_OK
        assert out.out == ""
        assert path.read_text().splitlines()[0] == ",".join(RESULT_FIELDS)

    def test_missing_file(self, capsys, tiny_mnist_args, tmp_path):
        code, _ = bench(capsys, *tiny_mnist_args, "--train-images", str(tmp_path / "absent"))
        assert code == config.EXIT_USAGE

    def test_bad_magic(self, capsys, tiny_mnist, tiny_mnist_args):
        code, out = bench(capsys, *tiny_mnist_args, "--train-images", tiny_mnist["paths"]["train_labels"])
        assert code == config.EXIT_DATA_FORMAT
        assert "magic number mismatch" in out.err

    @pytest.mark.parametrize("flags", [
        ["--algorithm", "winnow"],
        ["--permutations", "0"],
        ["--labels", "11"],
    ])
    def test_bad_configuration(self, capsys, tiny_mnist_args, flags):
        code, _ = bench(capsys, *tiny_mnist_args, *flags)
        assert code == config.EXIT_USAGE

    def test_protocol_geometry_mismatch(self, capsys, tiny_mnist):
        p = tiny_mnist["paths"]
        code, _ = bench(capsys, "--train-images", p["train_images"], "--train-labels", p["train_labels"],
                        "--test-images", p["test_images"], "--test-labels", p["test_labels"])
        assert code == config.EXIT_DATA_FORMAT

    def test_unknown_subcommand(self, capsys):
        assert main(["plot"]) == config.EXIT_USAGE


class TestVerify:

    SMALL = ["--synthetic-n", "300", "--synthetic-dim", "10", "--seed", "3"]

    def test_passes(self, capsys):
        assert main(["verify", *self.SMALL]) == config.EXIT_OK
        assert "OVERALL: PASS" in capsys.readouterr().out

    def test_corrupted_ell(self, capsys):
        assert main(["verify", *self.SMALL, "--corrupt-ell-at", "5"]) == config.EXIT_VERIFY_FAILED
        out = capsys.readouterr().out
        assert "trial 5" in out
        assert "OVERALL: FAIL" in out

    def test_unsatisfiable_margin(self, capsys):
        code = main(["verify", *self.SMALL, "--synthetic-gamma", "1.5", "--synthetic-radius", "1.0"])
        assert code == config.EXIT_USAGE

    def test_with_mnist_equivalence(self, capsys, tiny_mnist):
        p = tiny_mnist["paths"]
        code = main(["verify", *self.SMALL, "--mnist-label", "3",
                     "--train-images", p["train_images"], "--train-labels", p["train_labels"],
                     "--bucket-count", str(tiny_mnist["bucket_count"]),
                     "--bucket-size", str(tiny_mnist["bucket_size"])])
        assert code == config.EXIT_OK
        assert capsys.readouterr().out.count("equivalence") == 2


class TestTrace:

    def test_single_row(self, capsys):
        assert main(["trace", "--algorithm", "mcp", "--limit", "1"]) == config.EXIT_OK
        rows = rows_of(capsys.readouterr().out)
        assert list(rows[0].keys()) == TRACE_FIELDS
        assert len(rows) == 1
        assert rows[0]["update_kind"] == "Init"
        assert rows[0]["margin"] == ""

    def test_mcp_ell_nondecreasing(self, capsys):
        assert main(["trace", "--algorithm", "mcp", "--limit", "200"]) == config.EXIT_OK
        ells = [float(r["ell"]) for r in rows_of(capsys.readouterr().out)]
        assert len(ells) == 200
        assert all(b >= a for a, b in zip(ells, ells[1:]))

    def test_naromma_kinds(self, capsys):
        assert main(["trace", "--algorithm", "naromma", "--limit", "300"]) == config.EXIT_OK
        kinds = {r["update_kind"] for r in rows_of(capsys.readouterr().out)}
        assert kinds <= {"None", "Replace", "Additive", "Init"}
        assert "Init" in kinds

    @pytest.mark.parametrize("name", ["perceptron", "pa"])
    def test_baselines_leave_ell_empty(self, capsys, name):
        assert main(["trace", "--algorithm", name, "--limit", "20"]) == config.EXIT_OK
        rows = rows_of(capsys.readouterr().out)
        assert len(rows) == 20
        assert all(r["ell"] == "" for r in rows)

    def test_aromma_reports_norm_as_ell(self, capsys):
        assert main(["trace", "--algorithm", "aromma", "--limit", "20"]) == config.EXIT_OK
        assert all(float(r["ell"]) > 0 for r in rows_of(capsys.readouterr().out))

    def test_invalid_limit(self, capsys):
        assert main(["trace", "--limit", "0"]) == config.EXIT_USAGE

    def test_unknown_algorithm(self, capsys):
        assert main(["trace", "--algorithm", "winnow"]) == config.EXIT_USAGE


class TestErrorMapping:

    @pytest.mark.parametrize("error", [
        StateError("mcp: hypothesis collapsed to the zero vector at trial 3"),
        McfError("unexpected"),
    ])
    def test_package_errors_exit_with_state_code(self, capsys, monkeypatch, error):
        def fail(_cfg):
            raise error
        monkeypatch.setattr(bench_cli, "run_trace", fail)
        assert main(["trace", "--limit", "5"]) == config.EXIT_STATE
        assert str(error) in capsys.readouterr().err

    def test_state_code_is_distinct(self):
        codes = [config.EXIT_OK, config.EXIT_VERIFY_FAILED, config.EXIT_USAGE,
                 config.EXIT_DATA_FORMAT, config.EXIT_STATE]
        assert len(set(codes)) == len(codes)


@pytest.mark.slow
@pytest.mark.mnist
@pytest.mark.skipif(
    not all(os.path.exists(p) for p in config.MNIST_FILES.values()),
    reason=f"MNIST files not found under {config.MNIST_DIR}",
)
def test_full_protocol_ordering():
    rows = run_benchmark(ExperimentConfig(n_jobs=-1))
    assert len(rows) == len(config.ALGORITHMS) * 10 * config.DEFAULT_PERMUTATIONS
    wins, compared = ordering_count(rows)
    assert compared == 10
    assert wins >= 6
