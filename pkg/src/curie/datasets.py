"""Real-dataset acquisition: documented sources, download, checksum pinning.

Checksums are recorded into <data-dir>/checksums.json the first time a file
appears and verified on every later fetch, so a silently changed upstream
file is caught.
"""
from __future__ import annotations

import hashlib
import json
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError


@dataclass(frozen=True)
class DatasetSource:
    filename: str
    url: str | None
    notes: str
    add_header: str | None = None  # prepended when the source file has none


SOURCES: dict[str, DatasetSource] = {
    "elec2": DatasetSource(
        filename="elec2.csv",
        url="https://raw.githubusercontent.com/scikit-multiflow/streaming-datasets/master/elec.csv",
        notes="Australian NSW electricity market, 45312 rows; header included.",
    ),
    "poker": DatasetSource(
        filename="poker.csv",
        url="https://archive.ics.uci.edu/ml/machine-learning-databases/poker/poker-hand-testing.data",
        notes="UCI poker hand stream, 1000000 rows; header added on download.",
        add_header="s1,c1,s2,c2,s3,c3,s4,c4,s5,c5,hand",
    ),
    "gmsc": DatasetSource(
        filename="gmsc.csv",
        url=None,
        notes=(
            "Give Me Some Credit (Kaggle competition GiveMeSomeCredit, file "
            "cs-training.csv); requires a Kaggle login, download manually and "
            "save as gmsc.csv in the data directory."
        ),
    ),
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _checksums_path(data_dir: Path) -> Path:
    return data_dir / "checksums.json"


def _load_checksums(data_dir: Path) -> dict[str, str]:
    p = _checksums_path(data_dir)
    if p.exists():
        return json.loads(p.read_text(encoding="utf-8"))
    return {}


def _store_checksums(data_dir: Path, sums: dict[str, str]) -> None:
    _checksums_path(data_dir).write_text(
        json.dumps(sums, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def fetch(name: str, data_dir: Path, quiet: bool = False) -> Path | None:
    """Ensure one dataset file exists and matches its recorded checksum.

    Returns the file path, or None when the dataset needs a manual download.
    """
    if name not in SOURCES:
        raise DataError(f"unknown dataset {name!r}; known: {sorted(SOURCES)}")
    src = SOURCES[name]
    data_dir.mkdir(parents=True, exist_ok=True)
    target = data_dir / src.filename
    sums = _load_checksums(data_dir)

    if not target.exists():
        if src.url is None:
            if not quiet:
                print(f"[{name}] manual download required: {src.notes}")
            return None
        if not quiet:
            print(f"[{name}] downloading {src.url}")
        tmp = target.with_suffix(".part")
        with urllib.request.urlopen(src.url, timeout=120) as resp, tmp.open("wb") as out:
            if src.add_header:
                out.write(src.add_header.encode() + b"\n")
            while chunk := resp.read(1 << 20):
                out.write(chunk)
        tmp.rename(target)

    digest = _sha256(target)
    recorded = sums.get(src.filename)
    if recorded is None:
        sums[src.filename] = digest
        _store_checksums(data_dir, sums)
        if not quiet:
            print(f"[{name}] recorded sha256 {digest[:16]}… in {_checksums_path(data_dir)}")
    elif recorded != digest:
        raise DataError(
            f"{target}: sha256 {digest} does not match the recorded {recorded}; "
            "delete the file (and its checksums.json entry) to re-fetch"
        )
    elif not quiet:
        print(f"[{name}] ok: {target} (sha256 verified)")
    return target
