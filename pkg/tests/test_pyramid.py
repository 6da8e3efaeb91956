import numpy as np
import pytest
from conftest import blocky_image
from hypothesis import given
from hypothesis import strategies as st
from published_dims import HOLISTIC_DIMS, PYRAMID_DIMS

from phishvis.descriptors import DescriptorError, extract
from phishvis.imaging import RasterImage, crop
from phishvis.pyramid import (
    HOLISTIC,
    PyramidConfig,
    check_pyramid_size,
    grid_cells,
    pyramid_dim,
    pyramid_extract,
)


class TestConfig:
    @pytest.mark.parametrize(
        "token,levels", [("1", (1,)), ("4", (2,)), ("1+4+9", (1, 2, 3)), ("1+4+9+16", (1, 2, 3, 4)), ("16", (4,))]
    )
    def test_parse_and_format(self, token, levels):
        cfg = PyramidConfig.parse(token)
        assert cfg.levels == levels
        assert str(cfg) == token

    @pytest.mark.parametrize("token", ["", "2", "1+5", "4+1", "1+1", "25", "a", "1++4"])
    def test_bad_tokens(self, token):
        with pytest.raises(ValueError):
            PyramidConfig.parse(token)

    def test_patch_count(self):
        assert PyramidConfig((1, 2, 3, 4)).n_patches == 30


class TestGrid:
    def test_even(self):
        cells = grid_cells(100, 100, 2)
        assert [(c.x0, c.y0, c.w, c.h) for c in cells] == [
            (0, 0, 50, 50), (50, 0, 50, 50), (0, 50, 50, 50), (50, 50, 50, 50)
        ]

    def test_thirds(self):
        cells = grid_cells(100, 100, 3)
        assert [c.w for c in cells[:3]] == [33, 33, 34]
        assert [c.h for c in cells[::3]] == [33, 33, 34]

    def test_screenshot_quarters(self):
        assert [c.w for c in grid_cells(1366, 768, 4)[:4]] == [341, 342, 341, 342]

    @given(st.integers(1, 3000), st.integers(1, 3000), st.integers(1, 4))
    def test_partition_covers_exactly(self, w, h, n):
        if w < n or h < n:
            with pytest.raises(ValueError):
                grid_cells(w, h, n)
            return
        cells = grid_cells(w, h, n)
        assert len(cells) == n * n
        assert sum(c.w * c.h for c in cells) == w * h
        assert all(c.fits(w, h) for c in cells)
        widths = {c.w for c in cells}
        assert max(widths) - min(widths) <= 1


class TestExtract:
    @pytest.mark.parametrize("kind,token,dim", PYRAMID_DIMS)
    def test_published_dims(self, kind, token, dim):
        assert pyramid_dim(kind, PyramidConfig.parse(token)) == dim

    @pytest.mark.parametrize("kind,dim", sorted(HOLISTIC_DIMS.items()))
    def test_holistic_equals_descriptor(self, kind, dim, rng):
        img = blocky_image(rng, 170, 130)
        v = pyramid_extract(img, kind, HOLISTIC)
        assert v.shape == (dim,)
        assert np.array_equal(v, extract(img, kind))

    def test_scd_two_level_layout(self, rng):
        img = blocky_image(rng, 90, 70)
        v = pyramid_extract(img, "SCD", PyramidConfig.parse("1+4"))
        assert v.shape == (1280,)
        parts = v.reshape(5, 256)
        assert np.array_equal(parts[0], extract(img, "SCD"))
        for part, cell in zip(parts[1:], grid_cells(90, 70, 2)):
            assert np.array_equal(part, extract(crop(img, cell), "SCD"))

    def test_solid_gives_identical_blocks(self):
        v = pyramid_extract(RasterImage.solid(64, 64, (10, 200, 30)), "SCD", PyramidConfig((1, 2)))
        parts = v.reshape(5, 256)
        assert (parts == parts[0]).all()

    def test_too_small_cells_reported(self):
        with pytest.raises(DescriptorError, match=r"level 4x4, cell 0: 80x75"):
            check_pyramid_size("CEDD", PyramidConfig.parse("1+16"), 320, 300)
        check_pyramid_size("CEDD", PyramidConfig.parse("1+16"), 320, 320)
        with pytest.raises(DescriptorError):
            pyramid_extract(RasterImage.solid(30, 30, (0, 0, 0)), "CLD", PyramidConfig.parse("16"))
