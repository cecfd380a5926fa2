import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from glyphforge import GridDims, KnowledgeBase, load_glyph, load_kb, save_kb
from glyphforge.cli import main
from glyphforge.store import dumps_kb, save_glyph

from conftest import S_WEIGHT_ROWS, grid_from_text, pbm_plain, s_variant_grids

S_PATTERN = grid_from_text(
    ".####.",
    "#....#",
    "#.....",
    ".####.",
    ".....#",
    ".....#",
    "#....#",
    ".####.",
)

T_PATTERN = grid_from_text(
    "######",
    "..##..",
    "..##..",
    "..##..",
    "..##..",
    "..##..",
    "..##..",
    "..##..",
)


def write_glyph(path: Path, grid) -> str:
    save_glyph(grid, path)
    return str(path)


@pytest.fixture
def kb_path(tmp_path) -> str:
    return str(tmp_path / "kb.vcrkb")


class TestTeach:
    def test_teach_three_files(self, tmp_path, kb_path, capsys):
        paths = [
            write_glyph(tmp_path / f"s{i}.glyph", grid)
            for i, grid in enumerate(s_variant_grids(), start=1)
        ]
        code = main(["teach", "--kb", kb_path, "--grid", "6x8", "--label", "S", *paths])
        assert code == 0
        out = capsys.readouterr().out
        assert "teach count 3" in out
        kb = load_kb(kb_path)
        assert kb.weights("S").rows() == S_WEIGHT_ROWS

    def test_zero_patterns_is_usage_error(self, kb_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["teach", "--kb", kb_path, "--label", "S"])
        assert excinfo.value.code == 2

    def test_dims_mismatch_leaves_kb_unchanged(self, tmp_path, kb_path, capsys):
        good = write_glyph(tmp_path / "good.glyph", S_PATTERN)
        assert main(["teach", "--kb", kb_path, "--grid", "6x8",
                     "--label", "S", good]) == 0
        before = Path(kb_path).read_bytes()
        bad = write_glyph(tmp_path / "bad.glyph", grid_from_text("##", "##"))
        code = main(["teach", "--kb", kb_path, "--label", "S", good, bad])
        assert code == 1
        assert Path(kb_path).read_bytes() == before
        assert "error" in capsys.readouterr().err

    def test_all_or_nothing_on_parse_error(self, tmp_path, kb_path):
        good = write_glyph(tmp_path / "good.glyph", S_PATTERN)
        broken = tmp_path / "broken.glyph"
        broken.write_text("glyph 6 8\nnot a row\n")
        code = main(["teach", "--kb", kb_path, "--grid", "6x8",
                     "--label", "S", good, str(broken)])
        assert code == 1
        assert not Path(kb_path).exists()

    def test_default_grid_is_32x32(self, tmp_path, kb_path):
        grid32 = grid_from_text(*(["#" * 32] * 32))
        path = write_glyph(tmp_path / "g.glyph", grid32)
        assert main(["teach", "--kb", kb_path, "--label", "X", path]) == 0
        assert load_kb(kb_path).dims == GridDims(32, 32)

    def test_grid_conflict_with_existing_kb(self, tmp_path, kb_path):
        path = write_glyph(tmp_path / "g.glyph", S_PATTERN)
        assert main(["teach", "--kb", kb_path, "--grid", "6x8",
                     "--label", "S", path]) == 0
        code = main(["teach", "--kb", kb_path, "--grid", "8x8",
                     "--label", "S", path])
        assert code == 1

    def test_invalid_label_is_usage_error(self, tmp_path, kb_path):
        path = write_glyph(tmp_path / "g.glyph", S_PATTERN)
        with pytest.raises(SystemExit) as excinfo:
            main(["teach", "--kb", kb_path, "--label", "a b", path])
        assert excinfo.value.code == 2

    def test_kb_from_environment(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("GLYPHFORGE_KB", str(tmp_path / "env.vcrkb"))
        path = write_glyph(tmp_path / "g.glyph", S_PATTERN)
        assert main(["teach", "--grid", "6x8", "--label", "S", path]) == 0
        assert (tmp_path / "env.vcrkb").exists()

    def test_missing_kb_flag_is_usage_error(self, tmp_path, monkeypatch):
        monkeypatch.delenv("GLYPHFORGE_KB", raising=False)
        path = write_glyph(tmp_path / "g.glyph", S_PATTERN)
        with pytest.raises(SystemExit) as excinfo:
            main(["teach", "--label", "S", path])
        assert excinfo.value.code == 2


class TestClassify:
    def teach_s(self, tmp_path, kb_path):
        path = write_glyph(tmp_path / "s.glyph", S_PATTERN)
        assert main(["teach", "--kb", kb_path, "--grid", "6x8",
                     "--label", "S", path]) == 0
        return path

    def test_match_self(self, tmp_path, kb_path, capsys):
        path = self.teach_s(tmp_path, kb_path)
        code = main(["classify", "--kb", kb_path, path])
        assert code == 0
        assert "MATCH S q=1.00" in capsys.readouterr().out

    def test_empty_kb_exits_4(self, tmp_path, kb_path, capsys):
        save_kb(KnowledgeBase(GridDims(6, 8)), kb_path)
        path = write_glyph(tmp_path / "s.glyph", S_PATTERN)
        code = main(["classify", "--kb", kb_path, path])
        assert code == 4
        assert "EMPTY KB" in capsys.readouterr().out

    def test_unknown_exits_3_with_best_line(self, tmp_path, kb_path, capsys):
        self.teach_s(tmp_path, kb_path)
        far = grid_from_text(*["#.....".replace("#", "#") if i == 0 else "......"
                               for i in range(8)])
        # One lone ink cell where S has paper: psi is negative.
        far_path = write_glyph(tmp_path / "far.glyph", grid_from_text(
            "......",
            ".#....",
            "......",
            "......",
            "......",
            "......",
            "......",
            "......",
        ))
        code = main(["classify", "--kb", kb_path, far_path])
        assert code == 3
        out = capsys.readouterr().out
        assert "UNKNOWN (best S q=" in out
        assert "hint:" in out

    def test_json_output(self, tmp_path, kb_path, capsys):
        path = self.teach_s(tmp_path, kb_path)
        capsys.readouterr()
        code = main(["classify", "--kb", kb_path, path, "--output", "json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["kind"] == "match"
        assert doc["best"]["label"] == "S"
        assert doc["best"]["q_num"] == doc["best"]["q_den"]

    def test_classify_raster_input(self, tmp_path, kb_path, capsys):
        self.teach_s(tmp_path, kb_path)
        pbm = tmp_path / "s.pbm"
        pbm.write_bytes(pbm_plain(S_PATTERN, scale=3))
        code = main(["classify", "--kb", kb_path, str(pbm)])
        assert code == 0
        assert "MATCH S q=1.00" in capsys.readouterr().out

    def test_threshold_flag(self, tmp_path, kb_path):
        path = self.teach_s(tmp_path, kb_path)
        assert main(["classify", "--kb", kb_path, path, "--threshold", "1"]) == 0
        half = write_glyph(tmp_path / "half.glyph", grid_from_text(
            ".####.",
            "#....#",
            "#.....",
            ".####.",
            "......",
            "......",
            "......",
            "......",
        ))
        # 8 of 14 ink cells hit: q = (8 - 0) / 14, below 1 but above 1/2.
        assert main(["classify", "--kb", kb_path, half, "--threshold", "1"]) == 3

    def test_missing_kb_file_is_error(self, tmp_path, kb_path):
        path = write_glyph(tmp_path / "s.glyph", S_PATTERN)
        assert main(["classify", "--kb", kb_path, path]) == 1


class TestInspect:
    def test_reference_rows(self, tmp_path, kb_path, capsys):
        paths = [
            write_glyph(tmp_path / f"s{i}.glyph", grid)
            for i, grid in enumerate(s_variant_grids(), start=1)
        ]
        main(["teach", "--kb", kb_path, "--grid", "6x8", "--label", "S", *paths])
        capsys.readouterr()
        assert main(["inspect", "--kb", kb_path, "S"]) == 0
        out_lines = capsys.readouterr().out.splitlines()
        assert "teach count 3" in out_lines
        assert "1 3 3 3 3 1" in out_lines

    def test_heat_view(self, tmp_path, kb_path, capsys):
        path = write_glyph(tmp_path / "t.glyph", T_PATTERN)
        main(["teach", "--kb", kb_path, "--grid", "6x8", "--label", "T", path])
        capsys.readouterr()
        assert main(["inspect", "--kb", kb_path, "T", "--heat"]) == 0
        out = capsys.readouterr().out
        heat = out.split("heat:\n", 1)[1].splitlines()
        assert heat[0] == "######"
        assert heat[1] == "--##--"

    def test_unknown_label_exits_1(self, tmp_path, kb_path):
        save_kb(KnowledgeBase(GridDims(6, 8)), kb_path)
        assert main(["inspect", "--kb", kb_path, "Z"]) == 1


class TestDigitizeCommand:
    def test_scaled_raster_recovers_pattern(self, tmp_path, capsys):
        pbm = tmp_path / "in.pbm"
        pbm.write_bytes(pbm_plain(S_PATTERN, scale=2))
        out = tmp_path / "out.glyph"
        code = main(["digitize", str(pbm), "-o", str(out), "--grid", "6x8"])
        assert code == 0
        assert load_glyph(out) == S_PATTERN

    def test_blank_raster_exits_1(self, tmp_path, capsys):
        pbm = tmp_path / "blank.pbm"
        pbm.write_bytes(b"P1\n4 4\n" + b"0 " * 16)
        code = main(["digitize", str(pbm), "-o", str(tmp_path / "o.glyph")])
        assert code == 1
        assert "no ink" in capsys.readouterr().err

    def test_default_grid_is_32x32(self, tmp_path):
        pbm = tmp_path / "in.pbm"
        pbm.write_bytes(pbm_plain(S_PATTERN))
        out = tmp_path / "out.glyph"
        assert main(["digitize", str(pbm), "-o", str(out)]) == 0
        assert load_glyph(out).dims == GridDims(32, 32)


class TestEval:
    def build_corpus(self, tmp_path, kb_path):
        labels = {"S": S_PATTERN, "T": T_PATTERN}
        corpus = tmp_path / "corpus"
        for label, grid in labels.items():
            (corpus / label).mkdir(parents=True)
            write_glyph(corpus / label / "a.glyph", grid)
            path = write_glyph(tmp_path / f"{label}.glyph", grid)
            assert main(["teach", "--kb", kb_path, "--grid", "6x8",
                         "--label", label, path]) == 0
        return corpus

    def test_taught_corpus_scores_perfectly(self, tmp_path, kb_path, capsys):
        corpus = self.build_corpus(tmp_path, kb_path)
        capsys.readouterr()
        assert main(["eval", "--kb", kb_path, str(corpus)]) == 0
        out = capsys.readouterr().out
        assert "accuracy 1.00 (2/2)" in out
        assert "winning q: min 1.00 median 1.00 max 1.00" in out

    def test_eval_json(self, tmp_path, kb_path, capsys):
        corpus = self.build_corpus(tmp_path, kb_path)
        capsys.readouterr()
        assert main(["eval", "--kb", kb_path, str(corpus), "--output", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["tested"] == 2
        assert doc["correct"] == 2
        assert doc["accuracy"]["num"] == 1 and doc["accuracy"]["den"] == 1
        assert doc["per_label"]["S"]["taught"] == 1

    def test_empty_corpus_reports_na(self, tmp_path, kb_path, capsys):
        save_kb(KnowledgeBase(GridDims(6, 8)), kb_path)
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        assert main(["eval", "--kb", kb_path, str(corpus)]) == 0
        assert "accuracy n/a" in capsys.readouterr().out

    def test_stray_file_warns_and_is_ignored(self, tmp_path, kb_path, capsys):
        corpus = self.build_corpus(tmp_path, kb_path)
        (corpus / "stray.txt").write_text("junk")
        assert main(["eval", "--kb", kb_path, str(corpus)]) == 0
        captured = capsys.readouterr()
        assert "ignoring stray corpus entry" in captured.err
        assert "accuracy 1.00" in captured.out

    def test_missing_corpus_is_error(self, tmp_path, kb_path):
        save_kb(KnowledgeBase(GridDims(6, 8)), kb_path)
        assert main(["eval", "--kb", kb_path, str(tmp_path / "nope")]) == 1

    def test_misclassification_lands_in_confusion(self, tmp_path, kb_path, capsys):
        corpus = self.build_corpus(tmp_path, kb_path)
        # A copy of the S pattern filed under T must be counted against T.
        write_glyph(corpus / "T" / "b.glyph", S_PATTERN)
        assert main(["eval", "--kb", kb_path, str(corpus)]) == 0
        out = capsys.readouterr().out
        assert "confusion: T->S x1" in out


class TestSubprocessEntry:
    def test_module_invocation(self, tmp_path):
        glyph = tmp_path / "g.glyph"
        save_glyph(S_PATTERN, glyph)
        kb = tmp_path / "kb.vcrkb"
        env = dict(os.environ)
        env["PYTHONPATH"] = str(Path(__file__).resolve().parent.parent / "src")
        proc = subprocess.run(
            [sys.executable, "-m", "glyphforge", "teach", "--kb", str(kb),
             "--grid", "6x8", "--label", "S", str(glyph)],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0, proc.stderr
        assert "teach count 1" in proc.stdout

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "glyphforge"],
            capture_output=True, text=True,
            env={**os.environ,
                 "PYTHONPATH": str(Path(__file__).resolve().parent.parent / "src")},
        )
        assert proc.returncode == 2
