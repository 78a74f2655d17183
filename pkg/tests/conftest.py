import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from synthpose.rig import load_skeleton_file, load_clip_file
from synthpose.annotate import load_attachment_table_file

ASSETS = Path(__file__).resolve().parent.parent / "src" / "synthpose" / "assets" / "reference"


@pytest.fixture(scope="session")
def asset_dir() -> Path:
    return ASSETS


@pytest.fixture(scope="session")
def reference_skeleton():
    return load_skeleton_file(ASSETS / "rig_human16.yaml")


@pytest.fixture(scope="session")
def reference_clips(reference_skeleton):
    clips = {}
    for name in ("walk", "idle_a", "idle_b"):
        clip = load_clip_file(ASSETS / "clips" / f"{name}.yaml", reference_skeleton)
        clips[clip.name] = clip
    return clips


@pytest.fixture(scope="session")
def reference_attachment(reference_skeleton):
    return load_attachment_table_file(ASSETS / "attach_coco17.yaml", reference_skeleton)
