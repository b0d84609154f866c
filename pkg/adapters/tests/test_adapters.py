"""Contract tests for the adapter package.

The deterministic built-in backends run everywhere and pin the file
contracts: outputs must parse through the core toolkit's readers, links
must be in range, and input files must come back byte-identical. Tests
that need a real pretrained model run only when XLNER_TRANSLATION_MODEL /
XLNER_ALIGNMENT_MODEL name a loadable one; everything else never touches
the network. The whole module skips if the adapter package is not
installed, so the core suite stands alone.
"""

import json
import os
import shutil
import subprocess

import pytest

xlner_adapters = pytest.importorskip("xlner_adapters")

from xlner.corpus import ParseError, parse_parallel, parse_pharaoh_file

from xlner_adapters import (
    AdapterJob,
    align_file,
    load_translation_backend,
    translate_file,
)
from xlner_adapters.cli import align_main, translate_main

SAMPLE = [
    "Aspirin 100 mg daily for 7 days",
    "Take two tablets of ibuprofen every 6 hours",
    "Metformin 500 mg twice a day with meals",
    "Apply the ointment to the affected area at bedtime",
    "Amoxicillin 250 mg three times a day for 10 days",
    "One capsule of vitamin D weekly",
    "Insulin 10 units before breakfast",
    "Reduce the dose to half a tablet after one week",
    "Prednisone taper over 14 days as directed",
    "Use the inhaler two puffs every 4 hours as needed",
]


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "src.txt"
    path.write_text("".join(line + "\n" for line in SAMPLE), encoding="utf-8")
    return path


class DriftingTranslator:
    """Bad citizen: returns one translation too few."""

    def translate_batch(self, batch):
        return [list(tokens) for tokens in batch[:-1]]


class BlankingTranslator:
    """Bad citizen: translates everything to nothing."""

    def translate_batch(self, batch):
        return [[] for _ in batch]


class WildAligner:
    """Bad citizen: emits links beyond the sentence lengths."""

    def align_batch(self, pairs):
        return [{(99, 0)} for _ in pairs]


# ---------------------------------------------------------------------------
# Job validation


def test_job_requires_existing_input(tmp_path):
    with pytest.raises(ValueError, match="input file not found"):
        AdapterJob(tmp_path / "missing.txt", tmp_path / "out.txt", "identity")


def test_job_requires_model_and_positive_batch(sample_file, tmp_path):
    with pytest.raises(ValueError, match="model identifier"):
        AdapterJob(sample_file, tmp_path / "out.txt", "")
    with pytest.raises(ValueError, match="batch_size"):
        AdapterJob(sample_file, tmp_path / "out.txt", "identity", batch_size=0)


# ---------------------------------------------------------------------------
# translate_file


def test_translate_empty_input_gives_empty_output(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("", encoding="utf-8")
    out = translate_file(AdapterJob(empty, tmp_path / "out.txt", "identity"))
    assert out.read_text(encoding="utf-8") == ""


def test_translate_preserves_line_count(tmp_path):
    src = tmp_path / "three.txt"
    src.write_text("a b\nc\nd e f\n", encoding="utf-8")
    out = translate_file(AdapterJob(src, tmp_path / "out.txt", "reverse"))
    assert out.read_text(encoding="utf-8").splitlines() == ["b a", "c", "f e d"]


def test_identity_output_parses_and_source_is_untouched(sample_file, tmp_path):
    before = sample_file.read_bytes()
    out = translate_file(
        AdapterJob(sample_file, tmp_path / "tgt.txt", "identity", batch_size=3)
    )
    pairs = parse_parallel(
        sample_file.read_text(encoding="utf-8"), out.read_text(encoding="utf-8")
    )
    assert len(pairs) == len(SAMPLE)
    for pair in pairs:
        assert [t.text for t in pair.target] == [t.text for t in pair.source]
    assert sample_file.read_bytes() == before


def test_reverse_output_parses(sample_file, tmp_path):
    out = translate_file(AdapterJob(sample_file, tmp_path / "tgt.txt", "reverse"))
    pairs = parse_parallel(
        sample_file.read_text(encoding="utf-8"), out.read_text(encoding="utf-8")
    )
    for pair in pairs:
        assert [t.text for t in pair.target] == [t.text for t in pair.source][::-1]


def test_translate_rejects_blank_input_line(tmp_path):
    src = tmp_path / "src.txt"
    src.write_text("a b\n\nc\n", encoding="utf-8")
    with pytest.raises(ValueError, match="line 2"):
        translate_file(AdapterJob(src, tmp_path / "out.txt", "identity"))


def test_translate_aborts_on_line_count_drift(sample_file, tmp_path):
    out = tmp_path / "out.txt"
    with pytest.raises(ValueError, match="translations for a batch"):
        translate_file(
            AdapterJob(sample_file, out, "identity"), backend=DriftingTranslator()
        )
    assert not out.exists()


def test_translate_aborts_on_empty_translation(sample_file, tmp_path):
    out = tmp_path / "out.txt"
    with pytest.raises(ValueError, match="empty translation"):
        translate_file(
            AdapterJob(sample_file, out, "identity"), backend=BlankingTranslator()
        )
    assert not out.exists()


def test_unloadable_model_is_a_value_error(tmp_path, monkeypatch):
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    with pytest.raises(ValueError, match="cannot load translation model"):
        load_translation_backend(str(tmp_path / "no" / "such" / "model"))


# ---------------------------------------------------------------------------
# align_file


def test_align_identical_single_tokens_gives_0_0(tmp_path):
    src, tgt = tmp_path / "s.txt", tmp_path / "t.txt"
    src.write_text("mg\n", encoding="utf-8")
    tgt.write_text("mg\n", encoding="utf-8")
    out = align_file(src, tgt, "position", tmp_path / "a.pharaoh")
    assert out.read_text(encoding="utf-8") == "0-0\n"


def test_align_output_parses_with_indices_in_range(sample_file, tmp_path):
    tgt = translate_file(AdapterJob(sample_file, tmp_path / "tgt.txt", "reverse"))
    src_before, tgt_before = sample_file.read_bytes(), tgt.read_bytes()
    out = align_file(sample_file, tgt, "position", tmp_path / "a.pharaoh", batch_size=4)
    alignments = parse_pharaoh_file(out.read_text(encoding="utf-8"))
    pairs = parse_parallel(
        sample_file.read_text(encoding="utf-8"), tgt.read_text(encoding="utf-8")
    )
    assert len(alignments) == len(pairs) == len(SAMPLE)
    for alignment, pair in zip(alignments, pairs):
        alignment.check_bounds(len(pair.source), len(pair.target))
        assert {j for _, j in alignment.links} == set(range(len(pair.target)))
    assert sample_file.read_bytes() == src_before
    assert tgt.read_bytes() == tgt_before


def test_align_empty_inputs_give_empty_file(tmp_path):
    src, tgt = tmp_path / "s.txt", tmp_path / "t.txt"
    src.write_text("", encoding="utf-8")
    tgt.write_text("", encoding="utf-8")
    out = align_file(src, tgt, "position", tmp_path / "a.pharaoh")
    assert out.read_text(encoding="utf-8") == ""


def test_align_rejects_misaligned_files(tmp_path):
    src, tgt = tmp_path / "s.txt", tmp_path / "t.txt"
    src.write_text("a\nb\nc\n", encoding="utf-8")
    tgt.write_text("x\ny\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line count mismatch"):
        align_file(src, tgt, "position", tmp_path / "a.pharaoh")


def test_align_rejects_out_of_range_links(tmp_path):
    src, tgt = tmp_path / "s.txt", tmp_path / "t.txt"
    src.write_text("a b\n", encoding="utf-8")
    tgt.write_text("x y\n", encoding="utf-8")
    out = tmp_path / "a.pharaoh"
    with pytest.raises(ValueError, match="sentence 0: link 99-0 out of range"):
        align_file(src, tgt, "position", out, backend=WildAligner())
    assert not out.exists()


# ---------------------------------------------------------------------------
# Command-line scripts


def test_translate_cli_reports_and_writes(sample_file, tmp_path, capsys):
    out = tmp_path / "tgt.txt"
    code = translate_main(
        ["--in", str(sample_file), "--out", str(out), "--model", "identity"]
    )
    assert code == 0
    assert capsys.readouterr().out == f"translated 10 lines -> {out}\n"
    payload_code = translate_main(
        ["--in", str(sample_file), "--out", str(out), "--model", "identity", "--json"]
    )
    assert payload_code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"lines": 10, "model": "identity", "output": str(out)}


def test_align_cli_reports_and_writes(sample_file, tmp_path, capsys):
    tgt = translate_file(AdapterJob(sample_file, tmp_path / "tgt.txt", "identity"))
    out = tmp_path / "a.pharaoh"
    code = align_main(
        ["--src", str(sample_file), "--tgt", str(tgt), "--out", str(out),
         "--model", "position", "--json"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["pairs"] == 10
    assert payload["links"] == sum(len(line.split()) for line in SAMPLE)
    parse_pharaoh_file(out.read_text(encoding="utf-8"))


def test_cli_usage_error_exits_1(sample_file, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        translate_main(["--in", str(sample_file), "--out", str(tmp_path / "o")])
    assert exc.value.code == 1
    assert "--model" in capsys.readouterr().err


def test_cli_data_error_exits_2(tmp_path, capsys):
    code = translate_main(
        ["--in", str(tmp_path / "missing.txt"), "--out", str(tmp_path / "o"),
         "--model", "identity"]
    )
    assert code == 2
    assert "input file not found" in capsys.readouterr().err


def test_console_scripts_are_deterministic(sample_file, tmp_path):
    if not (shutil.which("xlner-translate") and shutil.which("xlner-neural-align")):
        pytest.skip("console scripts not on PATH")
    outputs = []
    for run in ("one", "two"):
        work = tmp_path / run
        work.mkdir()
        shutil.copy(sample_file, work / "src.txt")
        translated = subprocess.run(
            ["xlner-translate", "--in", "src.txt", "--out", "tgt.txt",
             "--model", "reverse", "--json"],
            cwd=work, capture_output=True, text=True,
        )
        aligned = subprocess.run(
            ["xlner-neural-align", "--src", "src.txt", "--tgt", "tgt.txt",
             "--out", "a.pharaoh", "--model", "position", "--json"],
            cwd=work, capture_output=True, text=True,
        )
        assert translated.returncode == 0 and aligned.returncode == 0
        outputs.append(
            (translated.stdout, aligned.stdout,
             (work / "tgt.txt").read_bytes(), (work / "a.pharaoh").read_bytes())
        )
    assert outputs[0] == outputs[1]


# ---------------------------------------------------------------------------
# Pretrained-model paths (run only when the environment provides models)


@pytest.mark.skipif(
    not os.environ.get("XLNER_TRANSLATION_MODEL"),
    reason="set XLNER_TRANSLATION_MODEL to a loadable seq2seq model to run",
)
def test_pretrained_translation_contract(sample_file, tmp_path):
    model = os.environ["XLNER_TRANSLATION_MODEL"]
    before = sample_file.read_bytes()
    try:
        out = translate_file(AdapterJob(sample_file, tmp_path / "tgt.txt", model))
    except ValueError as err:
        pytest.skip(f"model unavailable: {err}")
    pairs = parse_parallel(
        sample_file.read_text(encoding="utf-8"), out.read_text(encoding="utf-8")
    )
    assert len(pairs) == len(SAMPLE)
    assert sample_file.read_bytes() == before


@pytest.mark.skipif(
    not os.environ.get("XLNER_ALIGNMENT_MODEL"),
    reason="set XLNER_ALIGNMENT_MODEL to a loadable encoder model to run",
)
def test_pretrained_alignment_contract(sample_file, tmp_path):
    model = os.environ["XLNER_ALIGNMENT_MODEL"]
    tgt = translate_file(AdapterJob(sample_file, tmp_path / "tgt.txt", "reverse"))
    try:
        out = align_file(sample_file, tgt, model, tmp_path / "a.pharaoh")
    except ValueError as err:
        pytest.skip(f"model unavailable: {err}")
    alignments = parse_pharaoh_file(out.read_text(encoding="utf-8"))
    pairs = parse_parallel(
        sample_file.read_text(encoding="utf-8"), tgt.read_text(encoding="utf-8")
    )
    assert len(alignments) == len(pairs)
    for alignment, pair in zip(alignments, pairs):
        alignment.check_bounds(len(pair.source), len(pair.target))
