from pathlib import Path

import pytest

from xlner.cli import main as cli_main

SAMPLE_DIR = Path(__file__).parent / "data" / "sample"


@pytest.fixture
def sample_dir() -> Path:
    return SAMPLE_DIR


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""

    def run(*argv: str):
        try:
            code = cli_main(list(argv))
        except SystemExit as exc:  # argparse usage errors exit directly
            code = exc.code if isinstance(exc.code, int) else 1
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run
