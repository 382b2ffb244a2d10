import pytest
from hypothesis import given
from hypothesis import strategies as st

from famedkit.triangulation import (
    ParseError,
    load_preset,
    parse_triangulation,
    preset_file,
    preset_names,
    resolve_triangulation,
    serialize_triangulation,
    shape_symbol,
)

FIG8 = """triangulation fig8 tets=2 kind=knot-complement
faces A=0.1 B=0.0 C=0.2 D=0.3
tet 0 sign=+1 glue 0->1.2 1->1.3 2->1.0 3->1.1
tet 1 sign=-1 glue 0->0.2 1->0.3 2->0.0 3->0.1
curve l nu=0 C=0,2 Cp=0,-2 Cpp=0,0
"""


def test_presets_listed():
    assert {"fig8", "twist4", "twist5", "twist6", "twist7"} <= set(preset_names())


def test_fig8_structure(fig8):
    assert fig8.N == 2
    assert fig8.signs == (1, -1)
    assert len(fig8.edge_classes) == 2
    assert [f[0] for f in fig8.faces] == ["A", "B", "C", "D"]
    assert sorted(len(e.slots) for e in fig8.edge_classes) == [6, 6]


def test_every_preset_is_closed(preset):
    for t in preset.tetrahedra:
        for k in range(4):
            t2, k2 = preset.glued(t.index, k)
            assert preset.glued(t2, k2) == (t.index, k)
    assert len(preset.edge_classes) == preset.N
    assert sum(len(e.slots) for e in preset.edge_classes) == 6 * preset.N


def test_roundtrip(preset):
    again = parse_triangulation(serialize_triangulation(preset))
    assert again == preset
    assert serialize_triangulation(again) == serialize_triangulation(preset)


def test_comments_and_blank_lines():
    text = "# header comment\n\n" + FIG8.replace("\n", "  # trailing\n", 1)
    assert parse_triangulation(text).N == 2


@pytest.mark.parametrize(
    "text, needle",
    [
        ("", "empty document"),
        ("tet 0 sign=+1 glue 0->0.1 1->0.0 2->0.3 3->0.2\n", "expected 'triangulation"),
        (FIG8.replace("0->1.2 1->1.3", "0->1.2 1->1.2"), "unpaired face"),
        (FIG8.replace("0->1.2 1->1.3", "0->- 1->1.3"), "unpaired face"),
        (FIG8.replace("sign=+1", "sign=2"), "malformed tet line"),
        (FIG8.replace("glue 0->1.2", "glue 0->x.2"), "bad face slot"),
        (FIG8.replace("C=0,2 ", "C=0,2,3 "), "expected 2 entries"),
        (FIG8 + "frobnicate\n", "unknown directive"),
        (FIG8.replace("tet 1 ", "tet 0 "), "duplicate tetrahedron"),
        (FIG8.replace("0->1.2 1->1.3 2->1.0", "0->0.0 1->1.3 2->1.0"), "glued to itself"),
    ],
    ids=["empty", "no-header", "slot-twice", "missing-slot", "sign", "slot", "curve-length",
         "directive", "duplicate-tet", "self-glue"],
)
def test_parse_errors(text, needle):
    with pytest.raises(ParseError, match=needle):
        parse_triangulation(text)


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_triangulation(FIG8.replace("glue 0->1.2", "glue 0->x.2"))
    assert exc.value.line == 3
    assert exc.value.column is not None


def test_shape_symbols_follow_orientation():
    assert shape_symbol(1, (0, 1)) == shape_symbol(-1, (2, 3)) == 0
    assert shape_symbol(1, (0, 2)) == 2 and shape_symbol(-1, (0, 2)) == 1
    assert shape_symbol(1, (0, 3)) == 1 and shape_symbol(-1, (0, 3)) == 2


def test_preset_dir_override(tmp_path, monkeypatch):
    (tmp_path / "mine.tri").write_text(FIG8.replace("fig8", "mine"))
    monkeypatch.setenv("FAMEDKIT_PRESET_DIR", str(tmp_path))
    assert load_preset("mine").name == "mine"
    assert preset_file("mine").parent == tmp_path
    assert "mine" in preset_names()


def test_resolve_path_or_name(tmp_path):
    p = tmp_path / "x.tri"
    p.write_text(FIG8)
    assert resolve_triangulation(str(p)).N == 2
    assert resolve_triangulation("presets/fig8.tri").name == "fig8"
    with pytest.raises(FileNotFoundError):
        resolve_triangulation("nope")


@given(st.permutations(range(4)))
def test_directive_order_is_irrelevant(order):
    head, *body = FIG8.strip().split("\n")
    text = "\n".join([head] + [body[i] for i in order]) + "\n"
    assert parse_triangulation(text) == parse_triangulation(FIG8)
