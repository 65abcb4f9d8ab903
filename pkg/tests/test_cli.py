"""End-to-end tests of the gpmap command line.

Every invocation passes ``--log-level WARNING`` so only command output
reaches the captured stream.
"""

import csv
import io
import json
from pathlib import Path

import pytest
from click.testing import Result
from typer.testing import CliRunner

from gpmap import CensusResult, Genome, __version__, read_census
from gpmap.analysis import robustness, rotation_classes
from gpmap.cli import app
from gpmap.manifest import manifest_path
from gpmap.storage import census_paths, write_census

runner = CliRunner()


def invoke(*args: str) -> Result:
    return runner.invoke(app, ["--log-level", "WARNING", *args])


def rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(scope="module")
def census_l4_on_disk(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """An L = 4 census written by the census command itself."""
    prefix = tmp_path_factory.mktemp("cli") / "l4"
    result = runner.invoke(
        app, ["--log-level", "WARNING", "census", "-L", "4", "--shards", "8", "--out", str(prefix)]
    )
    assert result.exit_code == 0, result.output
    return prefix


class TestTrace:
    """Test the trace command."""

    def test_canonical_replicator(self) -> None:
        """Test the trace of cdfeaa."""
        result = invoke("trace", "cdfeaa")

        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "step=1 ip=0 op=c copied=0 read=0 write=0 emitted=0"
        assert lines[122:126] == [f"offspring {i}: cdfeaa" for i in range(4)]
        assert lines[-1] == "OffspringCap step 122; SelfReplicator"

    def test_halting_genome(self) -> None:
        """Test that hhhhhh halts at step one."""
        result = invoke("trace", "hhhhhh")

        assert result.exit_code == 0
        assert result.stdout.splitlines()[-1] == "Halted step 1; NonViable"

    def test_step_limit(self) -> None:
        """Test that aaaaaa runs into the step limit."""
        result = invoke("trace", "aaaaaa")

        lines = result.stdout.splitlines()
        assert result.exit_code == 0
        assert len(lines) == 208 + 1
        assert lines[-1] == "StepLimit; NonViable"

    def test_custom_limits(self) -> None:
        """Test that limit flags reach the machine."""
        result = invoke("trace", "cdfeaa", "--offspring-cap", "1")

        assert result.stdout.splitlines()[-1] == "OffspringCap step 29; SelfReplicator"

    def test_bad_letter_is_usage_error(self) -> None:
        """Test that a letter outside the alphabet exits with code 2."""
        result = invoke("trace", "cdz")

        assert result.exit_code == 2

    def test_unknown_isa_is_usage_error(self) -> None:
        """Test that an unknown ISA exits with code 2."""
        assert invoke("trace", "cde", "--isa", "nope").exit_code == 2


class TestCensusCommand:
    """Test the census command, its manifest and replay."""

    def test_summary_and_files(self, census_l4_on_disk: Path) -> None:
        """Test that the census files and the manifest exist."""
        paths = census_paths(census_l4_on_disk)
        manifest = json.loads(manifest_path(census_l4_on_disk).read_text(encoding="utf-8"))

        assert paths["meta"].exists()
        assert paths["viable"].exists()
        assert paths["bitmap"].exists()
        assert manifest["subcommand"] == "census"
        assert manifest["tool_version"] == __version__
        assert manifest["config"]["length"] == 4
        assert manifest["config"]["shards"] == 8
        assert manifest["config"]["step_limit"] == 128
        assert set(manifest["checksums"]) == {p.name for p in paths.values()}

    def test_summary_line(self, tmp_path: Path) -> None:
        """Test the one-line summary."""
        result = invoke("census", "-L", "3", "--out", str(tmp_path / "l3"))

        assert result.exit_code == 0
        assert result.stdout.startswith("L=3 D=8 total=512 viable=6 self_replicators=6 I=")
        assert result.stdout.rstrip().endswith("mers")

    def test_manifest_replay(self, census_l4_on_disk: Path, tmp_path: Path) -> None:
        """Test that --config with a manifest reproduces the rank file byte for byte."""
        replay = tmp_path / "replay"

        result = invoke(
            "census", "--config", str(manifest_path(census_l4_on_disk)), "--out", str(replay)
        )

        assert result.exit_code == 0, result.output
        for key in ("viable", "bitmap"):
            assert (
                census_paths(replay)[key].read_bytes()
                == census_paths(census_l4_on_disk)[key].read_bytes()
            )

    def test_existing_output_exits_one(self, census_l4_on_disk: Path) -> None:
        """Test that an existing census is not overwritten without --force."""
        result = invoke("census", "-L", "4", "--out", str(census_l4_on_disk))

        assert result.exit_code == 1

    def test_usage_errors_exit_two(self, tmp_path: Path) -> None:
        """Test missing --out, missing length and the envelope."""
        assert invoke("census", "-L", "3").exit_code == 2
        assert invoke("census", "--out", str(tmp_path / "x")).exit_code == 2
        assert invoke("census", "-L", "22", "--out", str(tmp_path / "big")).exit_code == 2

    def test_metrics_file(self, tmp_path: Path) -> None:
        """Test the Prometheus textfile export."""
        metrics_file = tmp_path / "census.prom"

        result = invoke(
            "census", "-L", "3", "--out", str(tmp_path / "l3"), "--metrics-file", str(metrics_file)
        )

        assert result.exit_code == 0
        assert 'gpmap_census_viable{isa="default-v1",length="3"} 6.0' in metrics_file.read_text(
            encoding="utf-8"
        )


class TestInfo:
    """Test the info command."""

    def test_json_summary(self, census_l5: CensusResult, census_l5_on_disk: Path) -> None:
        """Test the JSON document of a full census."""
        result = invoke("info", str(census_l5_on_disk), "--format", "json")

        document = json.loads(result.stdout)
        assert result.exit_code == 0
        assert document["L"] == 5
        assert document["viable_count"] == census_l5.viable_count
        assert document["rotation_class_count"] == rotation_classes(census_l5).class_count
        assert set(document["cluster_count"]) == {"raw-sequences", "collapsed-rotations"}
        assert document["information_defined"] is True

    def test_meta_only(self, tmp_path: Path) -> None:
        """Test the summary of a metadata file without payloads."""
        prefix = tmp_path / "published"
        census_paths(prefix)["meta"].write_text(
            json.dumps(
                {
                    "format_version": 1,
                    "isa_id": "default-v1",
                    "L": 8,
                    "D": 26,
                    "T": 320,
                    "M": 4,
                    "G": 16,
                    "B": 64,
                    "total": str(26**8),
                    "viable_count": 914,
                    "self_replicator_count": 914,
                    "shard_count": 1,
                    "created_utc": "2024-01-01T00:00:00+00:00",
                }
            ),
            encoding="utf-8",
        )

        result = invoke("info", str(prefix), "--meta-only", "--format", "json")

        document = json.loads(result.stdout)
        assert document["information_mers"] == pytest.approx(5.9074, abs=0.005)
        assert "rotation_class_count" not in document

    def test_text_table(self, census_l5_on_disk: Path) -> None:
        """Test the default table output."""
        result = invoke("info", str(census_l5_on_disk))

        assert result.exit_code == 0
        assert "viable_count" in result.stdout

    def test_missing_census_exits_one(self, tmp_path: Path) -> None:
        """Test a missing census."""
        assert invoke("info", str(tmp_path / "nothing")).exit_code == 1


class TestBaselines:
    """Test the baselines command."""

    def test_explicit_shape(self) -> None:
        """Test both reference curves for L = 9, D = 26, I = 5.778."""
        result = invoke("baselines", "--length", "9", "--alphabet", "26", "--info", "5.778")

        table = rows(result.stdout)
        assert result.exit_code == 0
        assert len(table) == 10
        assert float(table[1]["phi_min"]) == pytest.approx(-1.664, abs=1e-3)
        assert float(table[3]["phi_ne"]) == pytest.approx(-1.926, abs=1e-3)
        assert float(table[9]["phi_ne"]) == pytest.approx(-5.778)

    def test_floor_only(self) -> None:
        """Test that phi_ne cells stay empty without an information value."""
        table = rows(invoke("baselines", "-L", "3", "-D", "8").stdout)

        assert [row["phi_ne"] for row in table] == ["", "", "", ""]

    def test_from_census(self, census_l5_on_disk: Path) -> None:
        """Test that a census supplies L, D and I."""
        table = rows(invoke("baselines", str(census_l5_on_disk)).stdout)

        assert len(table) == 6
        assert table[-1]["phi_ne"] != ""

    def test_shape_required(self) -> None:
        """Test the usage error without census or shape."""
        assert invoke("baselines", "-L", "3").exit_code == 2


class TestAnalysisCommands:
    """Test clusters, robustness and curves."""

    def test_clusters_json(self, census_l5_on_disk: Path) -> None:
        """Test the clusters document."""
        result = invoke("clusters", str(census_l5_on_disk))

        document = json.loads(result.stdout)
        assert document["mode"] == "raw-sequences"
        sizes = [c["size"] for c in document["components"]]
        assert sizes == sorted(sizes, reverse=True)

    def test_clusters_dot_defaults_to_largest(self, census_l5_on_disk: Path) -> None:
        """Test DOT export of the largest component."""
        document = json.loads(invoke("clusters", str(census_l5_on_disk), "--mode", "raw").stdout)
        largest = document["components"][0]["id"]

        result = invoke("clusters", str(census_l5_on_disk), "--format", "dot")

        assert result.stdout.startswith(f"graph component_{largest} {{")

    def test_clusters_bad_mode(self, census_l5_on_disk: Path) -> None:
        """Test that an unknown mode exits with code 2."""
        assert invoke("clusters", str(census_l5_on_disk), "--mode", "nope").exit_code == 2

    def test_unknown_component_exits_one(self, census_l5_on_disk: Path) -> None:
        """Test a missing component id."""
        result = invoke("clusters", str(census_l5_on_disk), "--component", "-1")

        assert result.exit_code == 1

    def test_robustness_of_one_genome(
        self, census_l5: CensusResult, census_l5_on_disk: Path
    ) -> None:
        """Test the robustness row of aacde."""
        rank = Genome.from_letters("aacde", 8).rank

        table = rows(invoke("robustness", str(census_l5_on_disk), "--genome", "aacde").stdout)

        assert table == [
            {
                "rank": str(rank),
                "letters": "aacde",
                "robustness": str(robustness(rank, census_l5)),
                "compressed_depth": table[0]["compressed_depth"],
            }
        ]

    def test_robustness_distribution(
        self, census_l5: CensusResult, census_l5_on_disk: Path
    ) -> None:
        """Test the histogram output."""
        table = rows(invoke("robustness", str(census_l5_on_disk), "--distribution").stdout)

        assert len(table) == 36
        assert sum(int(row["count"]) for row in table) == census_l5.viable_count

    def test_robustness_of_non_viable_rank(self, census_l5_on_disk: Path) -> None:
        """Test that a non-viable rank exits with code 1."""
        assert invoke("robustness", str(census_l5_on_disk), "--rank", "0").exit_code == 1

    def test_curves_csv(self, census_l5_on_disk: Path) -> None:
        """Test one curve plus the mean curve."""
        result = invoke("curves", str(census_l5_on_disk), "--genome", "aacde", "--mean")

        table = rows(result.stdout)
        assert result.exit_code == 0
        assert [row["n"] for row in table[:6]] == ["0", "1", "2", "3", "4", "5"]
        assert table[0]["phi"] == "0"
        assert [row["rank"] for row in table[6:]] == ["mean"] * 6
        assert table[6]["rho"] == ""

    def test_curves_json_extremes(self, census_l5_on_disk: Path) -> None:
        """Test JSON output for the most robust and most fragile genomes."""
        result = invoke(
            "curves", str(census_l5_on_disk), "--most-robust", "--most-fragile", "--format", "json"
        )

        document = json.loads(result.stdout)
        assert len(document["curves"]) == 2
        assert all(len(curve["phi"]) == 6 for curve in document["curves"])

    def test_curves_epistasis(self, census_l5_on_disk: Path) -> None:
        """Test epistasis signs vanish at both ends."""
        table = rows(invoke("curves", str(census_l5_on_disk), "--all", "--epistasis").stdout)

        assert table
        assert {row["sign"] for row in table if row["n"] in ("0", "5")} == {"0"}

    def test_curves_need_a_selection(self, census_l5_on_disk: Path) -> None:
        """Test the usage error without any genome selection."""
        assert invoke("curves", str(census_l5_on_disk)).exit_code == 2

    def test_output_file_protection(self, census_l5_on_disk: Path, tmp_path: Path) -> None:
        """Test --out, its manifest and --force."""
        out = tmp_path / "clusters.json"

        first = invoke("clusters", str(census_l5_on_disk), "--out", str(out))
        second = invoke("clusters", str(census_l5_on_disk), "--out", str(out))
        forced = invoke("clusters", str(census_l5_on_disk), "--out", str(out), "--force")

        assert first.exit_code == 0
        assert second.exit_code == 1
        assert forced.exit_code == 0
        assert json.loads(out.read_text(encoding="utf-8"))["mode"] == "raw-sequences"
        assert manifest_path(out).exists()


class TestAnalysisReplay:
    """Test --config on the analysis commands and replay from their manifests."""

    def replay(self, out: Path, subcommand: str) -> Path:
        again = out.with_name(f"replay-{out.name}")
        result = invoke(subcommand, "--config", str(manifest_path(out)), "--out", str(again))
        assert result.exit_code == 0, result.output
        return again

    def test_clusters_manifest_replays(self, census_l5_on_disk: Path, tmp_path: Path) -> None:
        """Test that a clusters manifest alone reproduces its output byte for byte."""
        out = tmp_path / "clusters.csv"
        first = invoke(
            "clusters",
            str(census_l5_on_disk),
            "--mode",
            "collapsed-rotations",
            "--format",
            "csv",
            "--out",
            str(out),
        )
        assert first.exit_code == 0, first.output
        manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))

        again = self.replay(out, "clusters")

        assert manifest["subcommand"] == "clusters"
        assert manifest["config"]["census"] == str(census_l5_on_disk)
        assert manifest["config"]["mode"] == "collapsed-rotations"
        assert manifest["config"]["format"] == "csv"
        assert again.read_bytes() == out.read_bytes()

    def test_curves_manifest_replays(self, census_l5_on_disk: Path, tmp_path: Path) -> None:
        """Test replay of a curves run selected by boolean flags."""
        out = tmp_path / "curves.json"
        first = invoke(
            "curves",
            str(census_l5_on_disk),
            "--most-robust",
            "--mean",
            "--format",
            "json",
            "--out",
            str(out),
        )
        assert first.exit_code == 0, first.output

        again = self.replay(out, "curves")

        assert again.read_bytes() == out.read_bytes()
        assert len(json.loads(again.read_text(encoding="utf-8"))["curves"]) == 1

    def test_robustness_and_baselines_replay(
        self, census_l5_on_disk: Path, tmp_path: Path
    ) -> None:
        """Test replay for a single-genome robustness row and explicit baselines."""
        row = tmp_path / "row.csv"
        lines = tmp_path / "baselines.csv"
        assert invoke(
            "robustness", str(census_l5_on_disk), "--genome", "aacde", "--out", str(row)
        ).exit_code == 0
        assert invoke(
            "baselines", "-L", "8", "-D", "26", "--info", "5.907", "--out", str(lines)
        ).exit_code == 0

        assert self.replay(row, "robustness").read_bytes() == row.read_bytes()
        assert self.replay(lines, "baselines").read_bytes() == lines.read_bytes()

    def test_flags_override_the_config_file(
        self, census_l5_on_disk: Path, tmp_path: Path
    ) -> None:
        """Test that a flag given next to --config wins over the file."""
        config = tmp_path / "clusters.yaml"
        config.write_text(
            f"census: {census_l5_on_disk}\nmode: collapsed-rotations\n", encoding="utf-8"
        )

        from_file = json.loads(invoke("clusters", "--config", str(config)).stdout)
        overridden = json.loads(
            invoke("clusters", "--config", str(config), "--mode", "raw-sequences").stdout
        )

        assert from_file["mode"] == "collapsed-rotations"
        assert overridden["mode"] == "raw-sequences"

    def test_verify_and_info_accept_config(
        self, census_l4_on_disk: Path, tmp_path: Path
    ) -> None:
        """Test --config on verify and info."""
        config = tmp_path / "checks.yaml"
        config.write_text(
            f"census: {census_l4_on_disk}\nnaive: false\nformat: json\n", encoding="utf-8"
        )

        checked = invoke("verify", "--config", str(config))
        summary = invoke("info", "--config", str(config))

        assert checked.exit_code == 0, checked.output
        assert "skipped" in checked.stdout
        assert summary.exit_code == 0, summary.output
        assert json.loads(summary.stdout)["viable_count"] == read_census(
            census_l4_on_disk
        ).viable_count

    def test_trace_accepts_config(self, tmp_path: Path) -> None:
        """Test that trace takes its limits from a config file."""
        config = tmp_path / "trace.yaml"
        config.write_text("step-limit: 3\n", encoding="utf-8")

        result = invoke("trace", "aah", "--config", str(config))

        assert result.exit_code == 0, result.output
        assert result.stdout.splitlines()[-1] == "Halted step 3; NonViable"

    def test_census_prefix_required(self) -> None:
        """Test the usage error when neither argument nor config names a census."""
        assert invoke("clusters").exit_code == 2
        assert invoke("verify").exit_code == 2


class TestVerify:
    """Test the verify and version commands."""

    def test_verify_passes(self, census_l4_on_disk: Path) -> None:
        """Test that a fresh census passes every oracle."""
        result = invoke("verify", str(census_l4_on_disk))

        assert result.exit_code == 0, result.output
        assert "MISMATCH" not in result.stdout

    def test_verify_detects_tampering(self, census_l4_on_disk: Path, tmp_path: Path) -> None:
        """Test that a census missing a viable genome fails verification."""
        census = read_census(census_l4_on_disk)
        prefix = tmp_path / "tampered"

        write_census(
            CensusResult(
                length=census.length,
                alphabet_size=census.alphabet_size,
                isa_id=census.isa_id,
                pad_nops=census.pad_nops,
                step_limit=census.step_limit,
                offspring_cap=census.offspring_cap,
                chain_depth=census.chain_depth,
                chain_width=census.chain_width,
                viable_ranks=census.viable_ranks[1:],
                self_replicator_count=census.viable_count - 1,
            ),
            prefix,
        )

        assert invoke("verify", str(prefix), "--skip-naive").exit_code == 0
        assert invoke("verify", str(prefix)).exit_code == 1

    def test_version(self) -> None:
        """Test the version command."""
        assert invoke("version").stdout.strip() == __version__
