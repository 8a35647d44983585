"""Test-suite exchange format: one metadata file plus one XML file per
test, numbered densely from 1.

Writers emit byte-identical output for identical inputs: field order is
fixed, numbers are plain decimals, and the creation time comes from
SOURCE_DATE_EPOCH when set. Stale testcase files in the target
directory are removed so a rewrite is always exact.
"""

from __future__ import annotations

import hashlib
import os
import re
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

XML_HEADER = '<?xml version="1.0" encoding="UTF-8" standalone="no"?>'
METADATA_DOCTYPE = (
    '<!DOCTYPE test-metadata PUBLIC "+//IDN sosy-lab.org//DTD test-format '
    'test-metadata 1.1//EN" "https://sosy-lab.org/test-format/test-metadata-1.1.dtd">'
)
TESTCASE_DOCTYPE = (
    '<!DOCTYPE testcase PUBLIC "+//IDN sosy-lab.org//DTD test-format '
    'testcase 1.1//EN" "https://sosy-lab.org/test-format/testcase-1.1.dtd">'
)

PRODUCER = "minicgen"
SOURCE_LANG = "MiniC"

PROPERTY_BRANCHES_TEXT = "COVER( init(main()), FQL(COVER EDGES(@DECISIONEDGE)) )"
PROPERTY_ERROR_TEXT = "COVER( init(main()), FQL(COVER EDGES(@CALL(reach_error))) )"


def creation_time() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def parse_property(text: str) -> str:
    """Map a coverage property file body onto a property kind."""
    if "@DECISIONEDGE" in text:
        return "coverage-branches"
    if "@CALL(" in text:
        return "coverage-error"
    raise ValueError("unrecognized coverage property")


@dataclass
class SuiteData:
    metadata: dict[str, str]
    testcases: list[list[int]] = field(default_factory=list)


def _metadata_xml(
    program_path: str,
    program_text: str,
    property_text: str,
    architecture: str,
) -> str:
    digest = hashlib.sha256(program_text.encode()).hexdigest()
    lines = [
        XML_HEADER,
        METADATA_DOCTYPE,
        "<test-metadata>",
        f"  <sourcecodelang>{SOURCE_LANG}</sourcecodelang>",
        f"  <producer>{PRODUCER}</producer>",
        f"  <specification>{escape(property_text)}</specification>",
        f"  <programfile>{escape(program_path)}</programfile>",
        f"  <programhash>{digest}</programhash>",
        "  <entryfunction>main</entryfunction>",
        f"  <architecture>{architecture}</architecture>",
        f"  <creationtime>{creation_time()}</creationtime>",
        "</test-metadata>",
    ]
    return "\n".join(lines) + "\n"


def _testcase_xml(inputs: list[int]) -> str:
    lines = [XML_HEADER, TESTCASE_DOCTYPE, "<testcase>"]
    lines.extend(f"  <input>{v}</input>" for v in inputs)
    lines.append("</testcase>")
    return "\n".join(lines) + "\n"


def write_suite(
    out_dir: str | Path,
    *,
    program_path: str,
    program_text: str,
    property_text: str,
    architecture: str,
    testcases: list[list[int]],
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("testcase-*.xml"):
        old.unlink()
    written = []
    meta = out / "metadata.xml"
    meta.write_text(
        _metadata_xml(program_path, program_text, property_text, architecture)
    )
    written.append(meta)
    for n, inputs in enumerate(testcases, start=1):
        p = out / f"testcase-{n}.xml"
        p.write_text(_testcase_xml(inputs))
        written.append(p)
    return written


_TESTCASE_RE = re.compile(r"^testcase-(\d+)\.xml$")


def read_suite(suite_dir: str | Path) -> SuiteData:
    """Round-trip reader; rejects gaps in the test numbering."""
    d = Path(suite_dir)
    meta_path = d / "metadata.xml"
    if not meta_path.is_file():
        raise FileNotFoundError(f"no metadata.xml under {d}")
    root = ET.fromstring(meta_path.read_text())
    metadata = {child.tag: (child.text or "") for child in root}
    numbered = []
    for p in d.iterdir():
        m = _TESTCASE_RE.match(p.name)
        if m:
            numbered.append((int(m.group(1)), p))
    numbered.sort()
    expected = list(range(1, len(numbered) + 1))
    if [n for n, _ in numbered] != expected:
        raise ValueError(f"test case numbering is not dense from 1 in {d}")
    cases = []
    for _, p in numbered:
        tc_root = ET.fromstring(p.read_text())
        cases.append([int((el.text or "0").strip()) for el in tc_root.iter("input")])
    return SuiteData(metadata, cases)
