import numpy as np
import pytest

from nbse.cover import Cover
from nbse.io import (
    DataFormatError,
    load_cover,
    load_edge_list,
    load_matrix_csv,
    save_cover,
    save_edge_list,
    save_matrix_csv,
)

from conftest import random_adjacency


def test_edge_list_path(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n2 3\n")
    A = load_edge_list(f)
    assert np.array_equal(A, np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]))


def test_edge_list_comments_weights_self_loops(tmp_path):
    f = tmp_path / "g.edges"
    f.write_text("% comment\n# another\n10 20 0.5\n20 20 1\n30 10\n")
    A = load_edge_list(f)
    # ids 10, 20, 30 compacted to 1..3
    assert np.array_equal(A, np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]]))


def test_edge_list_single_edge_after_comment(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("% comment\n1 2\n")
    assert np.array_equal(load_edge_list(f), np.array([[0, 1], [1, 0]]))


def test_matrix_market_header(tmp_path):
    f = tmp_path / "g.mtx"
    f.write_text("%%MatrixMarket matrix coordinate pattern symmetric\n4 4 2\n2 1\n3 2\n")
    A = load_edge_list(f)
    assert A.shape == (4, 4) and A.sum() == 4 and not A[3].any()


def test_edge_list_round_trip(tmp_path, rng):
    A = random_adjacency(rng, 25, 0.2)
    A[7] = A[:, 7] = 0
    f = tmp_path / "rt.txt"
    save_edge_list(f, A)
    assert np.array_equal(load_edge_list(f), A)


def test_edge_list_malformed_line_reports_number(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("1 2\n2 x\n")
    with pytest.raises(DataFormatError, match=":2:"):
        load_edge_list(f)


def test_matrix_csv_round_trip_and_symmetrising(tmp_path, rng):
    M = rng.random((5, 5))
    M = (M + M.T) / 2
    f = tmp_path / "m.csv"
    save_matrix_csv(f, M)
    assert np.array_equal(load_matrix_csv(f), M)
    M2 = M.copy()
    M2[0, 1] += 5e-10
    save_matrix_csv(f, M2)
    L = load_matrix_csv(f)
    assert np.array_equal(L, L.T) and L[0, 1] == pytest.approx(M[0, 1] + 2.5e-10)
    M2[0, 1] += 1e-3
    save_matrix_csv(f, M2)
    with pytest.raises(DataFormatError):
        load_matrix_csv(f)


def test_cover_file_round_trip(tmp_path):
    c = Cover(6, [[0, 1, 2, 3], [3, 4, 5]])
    f = tmp_path / "c.txt"
    save_cover(f, c)
    assert f.read_text().splitlines()[1:] == ["1 2 3 4", "4 5 6"]
    back = load_cover(f)
    assert back.n == 6 and [b.tolist() for b in back.blocks] == [[0, 1, 2, 3], [3, 4, 5]]
    f.write_text("# blocks\n1 2\n0 3\n")
    with pytest.raises(DataFormatError):
        load_cover(f)
