import json

import pytest

from blogrank.cli import main, run_compare
from util import blogger, comment, dataset, post
from blogrank import write_dataset


def read_manifest(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def strip_volatile(manifest):
    manifest = json.loads(json.dumps(manifest))
    manifest.pop("created_utc", None)
    manifest.pop("wall_ms", None)
    manifest["inputs"].pop("directory", None)
    manifest.pop("outputs", None)
    for record in manifest["per_slot"]:
        record.pop("wall_ms", None)
    return manifest


@pytest.fixture()
def synth_dir(tmp_path):
    data = tmp_path / "data"
    code = main(["synth", "--output", str(data), "--seed", "5", "--months", "4",
                 "--bloggers", "8"])
    assert code == 0
    return data


class TestSynthAndValidate:
    def test_synth_writes_dataset(self, synth_dir, capsys):
        for name in ("bloggers.rec", "posts.rec", "comments.rec", "meta.rec"):
            assert (synth_dir / name).exists()

    def test_validate_ok(self, synth_dir, capsys):
        assert main(["validate", "--input", str(synth_dir)]) == 0
        out = capsys.readouterr().out
        assert "dataset ok" in out and "8 bloggers" in out

    def test_validate_reports_warnings(self, tmp_path, capsys):
        ds = dataset(
            [blogger(1)],
            [post("p1", "b1", "2008-01-02")],
            [comment("c1", "p1", "u1", "2008-01-01T10:00:00")],
        )
        write_dataset(ds, tmp_path / "skewed")
        assert main(["validate", "--input", str(tmp_path / "skewed")]) == 0
        assert "warning" in capsys.readouterr().out

    def test_missing_input_is_exit_1(self, tmp_path, capsys):
        assert main(["validate", "--input", str(tmp_path / "nope")]) == 1

    def test_bad_synth_config_is_exit_2(self, tmp_path, capsys):
        code = main(["synth", "--output", str(tmp_path / "x"),
                     "--self-comment-fraction", "1.5"])
        assert code == 2
        assert "self_comment_fraction" in capsys.readouterr().err


class TestRank:
    def test_both_methods_write_rankings_and_manifest(self, synth_dir, tmp_path):
        out = tmp_path / "out"
        assert main(["rank", "--input", str(synth_dir), "--output", str(out),
                     "--method", "ifinder"]) == 0
        assert main(["rank", "--input", str(synth_dir), "--output", str(out),
                     "--method", "pinf"]) == 0
        for method in ("ifinder", "pinf"):
            lines = (out / f"rankings_{method}.tsv").read_text().splitlines()
            assert lines[0] == "slot_index\trank\tblogger_id\tscore"
            assert len(lines) > 1
        m_if = read_manifest(out / "manifest_ifinder.json")
        m_pf = read_manifest(out / "manifest_pinf.json")
        for rec_if, rec_pf in zip(m_if["per_slot"], m_pf["per_slot"]):
            assert rec_if["matrix_dim"] == rec_if["n_posts"]
            assert rec_pf["matrix_dim"] == rec_pf["n_bloggers"]
            assert rec_if["n_posts"] == rec_pf["n_posts"]

    def test_pinf_converges_on_synth_slot(self, synth_dir, tmp_path):
        out = tmp_path / "out"
        assert main(["rank", "--input", str(synth_dir), "--output", str(out),
                     "--method", "pinf"]) == 0
        manifest = read_manifest(out / "manifest_pinf.json")
        assert all(rec["converged"] for rec in manifest["per_slot"])

    def test_iteration_budget_one_reports_not_converged(self, synth_dir, tmp_path):
        out = tmp_path / "out"
        assert main(["rank", "--input", str(synth_dir), "--output", str(out),
                     "--method", "ifinder", "--max-iter", "1"]) == 0
        manifest = read_manifest(out / "manifest_ifinder.json")
        nontrivial = [r for r in manifest["per_slot"] if r["n_posts"] > 1]
        assert nontrivial and all(not r["converged"] for r in nontrivial)

    def test_strict_nonconvergence_is_exit_3(self, synth_dir, tmp_path, capsys):
        code = main(["rank", "--input", str(synth_dir), "--output",
                     str(tmp_path / "out"), "--method", "ifinder",
                     "--max-iter", "1", "--strict"])
        assert code == 3
        assert "converge" in capsys.readouterr().err

    def test_bad_weight_is_exit_2(self, synth_dir, tmp_path, capsys):
        code = main(["rank", "--input", str(synth_dir), "--output",
                     str(tmp_path / "out"), "--method", "pinf", "--w", "1.2"])
        assert code == 2

    def test_workers_do_not_change_output(self, synth_dir, tmp_path):
        one = tmp_path / "one"
        two = tmp_path / "two"
        for out, workers in ((one, "1"), (two, "4")):
            assert main(["rank", "--input", str(synth_dir), "--output", str(out),
                         "--method", "pinf", "--workers", workers]) == 0
        assert (one / "rankings_pinf.tsv").read_bytes() == (
            two / "rankings_pinf.tsv"
        ).read_bytes()

    def test_partial_slot_flag(self, synth_dir, tmp_path):
        excl = tmp_path / "excl"
        incl = tmp_path / "incl"
        assert main(["rank", "--input", str(synth_dir), "--output", str(excl),
                     "--method", "pinf"]) == 0
        assert main(["rank", "--input", str(synth_dir), "--output", str(incl),
                     "--method", "pinf", "--no-slots-exclude-partial"]) == 0
        m_excl = read_manifest(excl / "manifest_pinf.json")
        m_incl = read_manifest(incl / "manifest_pinf.json")
        assert m_incl["analyzed_slot_count"] == m_excl["analyzed_slot_count"] + 1


def two_blogger_fixture_dir(tmp_path):
    """Engineered so the comment graph is [[0,1],[.5,.5]] and the response
    term is (0.5, 0.2): b1 has one post at the maximum response (8 comments
    by outsiders) plus five silent posts; b2 has one post whose only two
    comments come from b1 (response 2 = max/4)."""
    posts = [post("big", "b1", "2008-01-05")]
    comments = [
        comment(f"c{i}", "big", f"u{i}", f"2008-01-05T0{i + 1}:00:00")
        for i in range(8)
    ]
    for i in range(5):
        posts.append(post(f"quiet{i}", "b1", f"2008-01-1{i}"))
    posts.append(post("q", "b2", "2008-01-20"))
    comments += [
        comment("cb1", "q", "b1", "2008-01-21T01:00:00"),
        comment("cb2", "q", "b1", "2008-01-21T02:00:00"),
    ]
    ds = dataset([blogger(1), blogger(2)], posts, comments)
    target = tmp_path / "fixture"
    write_dataset(ds, target)
    return target


class TestPinfFixtureEndToEnd:
    def test_scores_match_solved_fixed_point(self, tmp_path):
        data = two_blogger_fixture_dir(tmp_path)
        out = tmp_path / "out"
        assert main(["rank", "--input", str(data), "--output", str(out),
                     "--method", "pinf", "--w", "0.5", "--tau", "1e-14",
                     "--max-iter", "500", "--no-slots-exclude-partial"]) == 0
        lines = (out / "rankings_pinf.tsv").read_text().splitlines()[1:]
        rows = [line.split("\t") for line in lines]
        assert [(r[1], r[2]) for r in rows] == [("1", "b2"), ("2", "b1")]
        assert float(rows[0][3]) == pytest.approx(0.72, abs=1e-4)
        assert float(rows[1][3]) == pytest.approx(0.68, abs=1e-4)

    def test_ifinder_on_same_fixture(self, tmp_path):
        # no links at all: the link term vanishes and average comment
        # counts decide: b2 averages 2.0, b1 (8+0*5)/6
        data = two_blogger_fixture_dir(tmp_path)
        out = tmp_path / "out"
        assert main(["rank", "--input", str(data), "--output", str(out),
                     "--method", "ifinder", "--tau", "1e-14", "--max-iter", "500",
                     "--no-slots-exclude-partial"]) == 0
        lines = (out / "rankings_ifinder.tsv").read_text().splitlines()[1:]
        rows = [line.split("\t") for line in lines]
        assert [(r[1], r[2]) for r in rows] == [("1", "b2"), ("2", "b1")]
        assert float(rows[0][3]) == pytest.approx(2.0, abs=1e-6)
        assert float(rows[1][3]) == pytest.approx(8 / 6, abs=1e-6)


class TestCompare:
    def write_rankings(self, path, per_slot):
        lines = ["slot_index\trank\tblogger_id\tscore"]
        for slot_index, ids in per_slot.items():
            for rank, blogger_id in enumerate(ids, start=1):
                lines.append(f"{slot_index}\t{rank}\t{blogger_id}\t{1.0 / rank}")
        path.write_text("\n".join(lines) + "\n")

    def test_identical_files_summary(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        per_slot = {0: ["x", "y", "z"], 1: ["y", "x", "w"]}
        self.write_rankings(a, per_slot)
        self.write_rankings(b, per_slot)
        out = tmp_path / "cmp"
        result = run_compare(str(a), str(b), str(out), k=3, p=0.85)
        summary = result["summary"]
        n = summary["depth"]
        assert summary["overlap"] == n
        assert summary["average_overlap"] == 1.0
        assert summary["rank_biased_overlap"] == pytest.approx(1 - 0.85**n)
        series = (out / "comparison_series.tsv").read_text().splitlines()[1:]
        for line in series:
            assert line.split("\t")[3] == "1.0"  # overlap_fraction

    def test_disjoint_files_zero_series(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        self.write_rankings(a, {0: ["x", "y"], 1: ["x", "z"]})
        self.write_rankings(b, {0: ["q", "r"], 1: ["s", "t"]})
        out = tmp_path / "cmp"
        result = run_compare(str(a), str(b), str(out), k=5)
        assert result["summary"]["overlap"] == 0
        series = (out / "comparison_series.tsv").read_text().splitlines()[1:]
        for line in series:
            parts = line.split("\t")
            assert parts[2] == "0" and parts[4] == "0.0" and parts[5] == "0.0"

    def test_slot_mismatch_is_exit_1(self, tmp_path, capsys):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        self.write_rankings(a, {0: ["x"]})
        self.write_rankings(b, {0: ["x"], 1: ["y"]})
        code = main(["compare", "--a", str(a), "--b", str(b),
                     "--output", str(tmp_path / "cmp")])
        assert code == 1
        assert "different slots" in capsys.readouterr().err

    def test_bad_p_is_exit_2(self, tmp_path):
        a = tmp_path / "a.tsv"
        self.write_rankings(a, {0: ["x"]})
        assert main(["compare", "--a", str(a), "--b", str(a),
                     "--output", str(tmp_path / "cmp"), "--p", "1.0"]) == 2


class TestStats:
    def test_outputs_written(self, synth_dir, tmp_path):
        out = tmp_path / "stats"
        assert main(["stats", "--input", str(synth_dir), "--output", str(out)]) == 0
        for name in (
            "link_funnel.tsv",
            "self_links.tsv",
            "self_comments.tsv",
            "series_comments.tsv",
            "series_matched_post_inlinks.tsv",
            "series_comments_per_post.tsv",
            "series_posts_per_blogger.tsv",
            "series_unmatched_internal.tsv",
            "stats.json",
        ):
            assert (out / name).exists(), name
        summary = json.loads((out / "stats.json").read_text())
        funnel = summary["link_funnel"]
        assert (
            funnel["all_outlinks"]
            >= funnel["internal_outlinks"]
            >= funnel["author_matched"]
            >= funnel["post_matched"]
            >= funnel["post_matched_same_author"]
        )

    def test_funnel_fixture_through_stats(self, tmp_path):
        from test_reports import funnel_fixture

        write_dataset(funnel_fixture(), tmp_path / "data")
        out = tmp_path / "stats"
        assert main(["stats", "--input", str(tmp_path / "data"),
                     "--output", str(out)]) == 0
        lines = (out / "link_funnel.tsv").read_text().splitlines()
        counts = [int(line.split("\t")[1]) for line in lines[1:]]
        assert counts == [10, 6, 5, 3, 2]

    def test_empty_dataset_stats(self, tmp_path):
        ds = dataset([blogger(1)], [], [])
        write_dataset(ds, tmp_path / "empty")
        out = tmp_path / "stats"
        assert main(["stats", "--input", str(tmp_path / "empty"),
                     "--output", str(out)]) == 0
        summary = json.loads((out / "stats.json").read_text())
        assert summary["link_funnel"]["all_outlinks"] == 0
        assert summary["self_comments"] == []


class TestEndToEndDeterminism:
    def run_pipeline(self, base, seed="11"):
        data = base / "data"
        assert main(["synth", "--output", str(data), "--seed", seed,
                     "--months", "4", "--bloggers", "10",
                     "--planted", "2:5"]) == 0
        out = base / "out"
        assert main(["rank", "--input", str(data), "--output", str(out),
                     "--method", "ifinder"]) == 0
        assert main(["rank", "--input", str(data), "--output", str(out),
                     "--method", "pinf"]) == 0
        cmp_dir = base / "cmp"
        assert main(["compare", "--a", str(out / "rankings_ifinder.tsv"),
                     "--b", str(out / "rankings_pinf.tsv"),
                     "--output", str(cmp_dir)]) == 0
        return data, out, cmp_dir

    def test_identical_seeds_identical_bytes(self, tmp_path):
        data1, out1, cmp1 = self.run_pipeline(tmp_path / "run1")
        data2, out2, cmp2 = self.run_pipeline(tmp_path / "run2")
        for name in ("bloggers.rec", "posts.rec", "comments.rec"):
            assert (data1 / name).read_bytes() == (data2 / name).read_bytes()
        for name in ("rankings_ifinder.tsv", "rankings_pinf.tsv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        for name in ("comparison_series.tsv", "comparison_summary.tsv",
                     "frequency_a.tsv", "frequency_b.tsv"):
            assert (cmp1 / name).read_bytes() == (cmp2 / name).read_bytes()
        for name in ("manifest_ifinder.json", "manifest_pinf.json"):
            assert strip_volatile(read_manifest(out1 / name)) == strip_volatile(
                read_manifest(out2 / name)
            )


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_help_available():
    for command in ("synth", "rank", "compare", "stats", "validate"):
        with pytest.raises(SystemExit) as err:
            main([command, "--help"])
        assert err.value.code == 0
