import numpy as np

from ramanoam import io as rio
from ramanoam.fields import Grid2D, LGIndex, lg_field


def test_pgm_round_trip(tmp_path):
    img = np.outer(np.linspace(0, 1, 64), np.linspace(0, 2, 80))
    path = rio.write_pgm(tmp_path / "a.pgm", img)
    back = rio.read_pgm(path)
    assert back.shape == (64, 80)
    assert back.max() == 65535
    assert np.abs(back / 65535 - img / img.max()).max() <= 0.5 / 65535 + 1e-12
    assert path.read_bytes().startswith(b"P5\n80 64\n65535\n")


def test_pgm_of_blank_image(tmp_path):
    back = rio.read_pgm(rio.write_pgm(tmp_path / "z.pgm", np.zeros((8, 8))))
    assert not back.any()


def test_field_round_trip_is_exact(tmp_path):
    f = lg_field(Grid2D(128, 64, 0.05, 0.1), LGIndex(-2, 1), 0.7)
    g = rio.read_field(rio.write_field(tmp_path / "f.raw", f))
    assert np.array_equal(g.values, f.values)
    assert g.grid == f.grid
    assert g.wavelength == f.wavelength


def test_atomic_write_leaves_no_temporaries(tmp_path):
    rio.atomic_write(tmp_path / "sub" / "x.txt", "hello")
    rio.atomic_write(tmp_path / "sub" / "x.txt", "again")
    assert (tmp_path / "sub" / "x.txt").read_text() == "again"
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["x.txt"]
