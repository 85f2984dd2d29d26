import json
from pathlib import Path

import pytest

from smoothcount import PRESETS, get_preset
from smoothcount.squares import SquaresTruncation
from smoothcount.tables import preset_checksum

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "tables.json").read_text())


def fixture_checksum(rows):
    import hashlib

    h = hashlib.sha256()
    for r in rows:
        h.update(f"{r['x']}|{r['count']}|{r['printed']}\n".encode())
    return h.hexdigest()


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_checksum_matches_transcription(name):
    assert preset_checksum(PRESETS[name]) == fixture_checksum(FIXTURE[name])


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_rows_match_transcription(name):
    preset = PRESETS[name]
    assert len(preset.rows) == len(FIXTURE[name])
    for row, ref in zip(preset.rows, FIXTURE[name]):
        assert (row.label, row.count, row.printed) == (ref["x"], ref["count"], ref["printed"])
        t = row.truncation
        if isinstance(t, SquaresTruncation):
            assert t.nm_cap == (ref["budget"],) * 2 and t.k_cap == 400
        elif preset.id == "table1":
            assert t.double_sum_caps == (ref["budget"],) * 2
        else:
            assert t.R == ref["budget"]


def test_get_preset_aliases():
    assert get_preset("3") is PRESETS["table3"]
    assert get_preset("TABLE5") is PRESETS["table5"]
    with pytest.raises(ValueError):
        get_preset("table9")


def test_desk_scale_flags():
    t2 = PRESETS["table2"]
    assert [r.label for r in t2.rows if r.beyond_desk_scale] == ["1e10000", "1e100000"]
    t5 = PRESETS["table5"]
    assert [r.label for r in t5.rows if r.beyond_desk_scale] == ["1e10000", "1e100000", "1e1000000"]
    assert t5.rows[0].x.form == "rational"
