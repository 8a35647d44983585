import json
from pathlib import Path

import pytest

from minicgen import inject_labels, parse

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def manifest():
    return json.loads((CORPUS / "manifest.json").read_text())


@pytest.fixture(scope="session")
def corpus_programs(manifest):
    """name -> (source, parsed, labeled, table) for the whole corpus."""
    out = {}
    for entry in manifest["programs"]:
        name = entry["file"]
        src = (CORPUS / name).read_text()
        prog = parse(src, name)
        labeled, table = inject_labels(prog)
        out[name] = (src, prog, labeled, table)
    return out


def build(src: str, name: str = "<test>"):
    prog = parse(src, name)
    return inject_labels(prog)
