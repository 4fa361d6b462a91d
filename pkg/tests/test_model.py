import math

import numpy as np
import pytest

from gaussdual import (
    DimensionMismatch,
    GenSpec,
    LadderModel,
    NotPositiveDefinite,
    SparseSymMatrix,
    assemble_global_precision,
    generate,
    is_forest,
    local_logdets,
    sparsity_graph,
    spd_inverse,
    validate,
)
from helpers import LADDER1_BLOCK, LADDER2_S1, ladder1_model, ladder2_model


class TestLadderModel:
    def test_dimensions(self):
        m = ladder1_model()
        assert (m.k, m.L, m.N) == (2, 3, 8)

    def test_block_span(self):
        m = ladder1_model()
        assert list(m.block_span(0)) == [0, 1, 2, 3]
        assert list(m.block_span(2)) == [4, 5, 6, 7]
        with pytest.raises(IndexError):
            m.block_span(3)

    def test_wrong_block_count(self):
        with pytest.raises(DimensionMismatch):
            LadderModel(2, 3, [LADDER1_BLOCK] * 2)

    def test_wrong_block_shape(self):
        with pytest.raises(DimensionMismatch):
            LadderModel(3, 1, [LADDER1_BLOCK])

    @pytest.mark.parametrize("k,L", [(0, 1), (1, 0), (-2, 3)])
    def test_bad_counts(self, k, L):
        with pytest.raises(DimensionMismatch):
            LadderModel(k, L, np.zeros((max(L, 1), 2 * max(k, 1), 2 * max(k, 1))))

    def test_asymmetric_block_rejected(self):
        b = LADDER1_BLOCK.copy()
        b[0, 1] = 9.0
        with pytest.raises(ValueError, match="not symmetric"):
            LadderModel(2, 1, [b])

    def test_blocks_read_only(self):
        m = ladder1_model()
        with pytest.raises(ValueError):
            m.sigma_blocks[0, 0, 0] = 5.0


class TestSparseSymMatrix:
    def test_round_trip(self):
        m = SparseSymMatrix.from_dense(LADDER1_BLOCK)
        assert np.array_equal(m.to_dense(), LADDER1_BLOCK)
        assert m.nnz == 3

    def test_edges_listing(self):
        m = SparseSymMatrix.from_dense(LADDER1_BLOCK)
        assert m.edges == [(0, 1, 1.0), (0, 2, 1.0), (2, 3, 1.0)]

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            SparseSymMatrix(3, np.ones(3), [0, 0], [1, 1], [1.0, 2.0])

    def test_rejects_lower_triangle(self):
        with pytest.raises(ValueError, match="row < col"):
            SparseSymMatrix(3, np.ones(3), [1], [0], [1.0])

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="row < col"):
            SparseSymMatrix(3, np.ones(3), [1], [1], [1.0])

    def test_rejects_explicit_zero(self):
        with pytest.raises(ValueError, match="zero"):
            SparseSymMatrix(3, np.ones(3), [0], [1], [0.0])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            SparseSymMatrix(3, np.ones(3), [0], [5], [1.0])

    def test_diag_shape_checked(self):
        with pytest.raises(DimensionMismatch):
            SparseSymMatrix(3, np.ones(2))


class TestSparsityGraph:
    def test_ladder1_block_edges(self):
        g = sparsity_graph(LADDER1_BLOCK, 0.0)
        assert {(i, j) for i, j, _ in g.edges} == {(0, 1), (0, 2), (2, 3)}
        assert np.array_equal(g.diag, [2.0, 2.0, 2.0, 2.0])

    def test_identity_has_no_edges(self):
        assert sparsity_graph(np.eye(4), 0.0).nnz == 0

    def test_dense_precision_is_complete(self):
        g = sparsity_graph(spd_inverse(LADDER1_BLOCK), 0.0)
        assert g.nnz == 6

    def test_zero_tol_filters(self):
        m = np.array([[1.0, 1e-12], [1e-12, 1.0]])
        assert sparsity_graph(m, 0.0).nnz == 1
        assert sparsity_graph(m, 1e-9).nnz == 0


class TestIsForest:
    def test_path_star(self):
        g = SparseSymMatrix(4, np.ones(4), [0, 0, 2], [1, 2, 3], [1.0, 1.0, 1.0])
        assert is_forest(g)

    def test_complete_graph(self):
        g = sparsity_graph(np.ones((4, 4)) + 4 * np.eye(4), 0.0)
        assert not is_forest(g)

    def test_union_graph_of_ladder1(self):
        model = ladder1_model()
        k, n = model.k, model.N
        pairs = set()
        for ell, b in enumerate(model.sigma_blocks):
            g = sparsity_graph(b, 0.0)
            pairs |= {(i + ell * k, j + ell * k) for i, j, _ in g.edges}
        rows = sorted(pairs)
        union = SparseSymMatrix(
            n,
            np.zeros(n),
            [i for i, _ in rows],
            [j for _, j in rows],
            np.ones(len(rows)),
        )
        assert is_forest(union)

    def test_empty_graph(self):
        assert is_forest(SparseSymMatrix(5, np.ones(5)))


class TestValidate:
    def test_ladder1_all_flags(self):
        report = validate(ladder1_model())
        assert report.assumption1_ok
        assert report.assumption2_cycles_present
        assert report.assumption3_blocks_acyclic
        assert report.assumption3_union_acyclic
        assert report.ok

    def test_identity_blocks(self):
        model = LadderModel(2, 3, [np.eye(4)] * 3)
        report = validate(model)
        assert report.assumption1_ok
        assert not report.assumption2_cycles_present
        assert report.assumption3_blocks_acyclic
        assert report.assumption3_union_acyclic

    def test_non_spd_block_flagged(self):
        bad = np.eye(4)
        bad[0, 1] = bad[1, 0] = 2.0  # [[1,2],[2,1]] corner, indefinite
        model = LadderModel(2, 2, [LADDER1_BLOCK, bad])
        report = validate(model)
        assert not report.assumption1_ok
        assert not report.ok
        assert report.messages

    def test_cyclic_block_flagged(self):
        dense = np.ones((4, 4)) + 4.0 * np.eye(4)
        model = LadderModel(2, 1, [dense])
        report = validate(model)
        assert report.assumption1_ok
        assert not report.assumption3_blocks_acyclic
        assert not report.ok

    def test_union_cycle_without_block_cycles(self):
        # Each block alone is a path, but block 1 joins the shared pair
        # through variable 0 and block 2 joins it through variable 4,
        # closing a 4-cycle in the union graph.
        b1 = np.eye(4) * 3.0
        b1[0, 2] = b1[2, 0] = 1.0
        b1[0, 3] = b1[3, 0] = 1.0
        b2 = np.eye(4) * 3.0
        b2[0, 2] = b2[2, 0] = 1.0
        b2[1, 2] = b2[2, 1] = 1.0
        model = LadderModel(2, 2, [b1, b2])
        report = validate(model)
        assert report.assumption3_blocks_acyclic
        assert not report.assumption3_union_acyclic

    def test_shared_edge_does_not_count_twice(self):
        # Both blocks place an edge inside the overlap; structurally it
        # is one edge, so the union stays a forest.
        b1 = np.eye(4) * 3.0
        b1[2, 3] = b1[3, 2] = 1.0
        b2 = np.eye(4) * 3.0
        b2[0, 1] = b2[1, 0] = 1.0
        model = LadderModel(2, 2, [b1, b2])
        report = validate(model)
        assert report.assumption3_blocks_acyclic
        assert report.assumption3_union_acyclic


class TestAssembleGlobalPrecision:
    def test_single_block_is_inverse(self):
        model = LadderModel(1, 1, [np.array([[2.0, 1.0], [1.0, 2.0]])])
        j = assemble_global_precision(model)
        expected = np.array([[2.0, -1.0], [-1.0, 2.0]]) / 3.0
        assert np.allclose(j.to_dense(), expected, atol=1e-14)

    def test_identity_overlap_counting(self):
        model = LadderModel(2, 3, [np.eye(4)] * 3)
        j = assemble_global_precision(model)
        assert j.nnz == 0
        assert np.array_equal(j.diag, [1, 1, 2, 2, 2, 2, 1, 1])

    def test_ladder1_logdet(self):
        j = assemble_global_precision(ladder1_model())
        sign, logdet = np.linalg.slogdet(j.to_dense())
        assert sign == 1.0
        assert logdet == pytest.approx(-math.log(125.0 / 128.0), rel=1e-12)

    def test_block_tridiagonal_sparsity(self):
        model = generate(GenSpec(k=3, L=8, seed=5, structure="random_tree"))
        j = assemble_global_precision(model)
        blocks_apart = np.abs(j.rows // model.k - j.cols // model.k)
        assert blocks_apart.max() <= 1

    def test_spd_on_random_sweep(self):
        for seed in range(100):
            spec = GenSpec(
                k=1 + seed % 4,
                L=1 + seed % 7,
                seed=seed,
                structure=("star_pattern", "random_tree", "diagonal")[seed % 3],
            )
            j = assemble_global_precision(generate(spec))
            assert np.all(np.linalg.eigvalsh(j.to_dense()) > 0)

    def test_propagates_not_positive_definite(self):
        bad = np.eye(4)
        bad[0, 1] = bad[1, 0] = 2.0
        model = LadderModel(2, 1, [bad])
        with pytest.raises(NotPositiveDefinite):
            assemble_global_precision(model)


class TestLocalLogdets:
    def test_ladder1(self):
        assert np.allclose(local_logdets(ladder1_model()), math.log(5.0))

    def test_ladder2(self):
        out = local_logdets(ladder2_model())
        assert out[0] == pytest.approx(math.log(44.0), rel=1e-12)
        assert out[1] == pytest.approx(math.log(33.0), rel=1e-12)

    def test_identity(self):
        model = LadderModel(2, 4, [np.eye(4)] * 4)
        assert np.array_equal(local_logdets(model), np.zeros(4))

    def test_failure_names_block(self):
        bad = np.eye(6)
        bad[4, 5] = bad[5, 4] = 3.0
        model = LadderModel(3, 2, [LADDER2_S1, bad])
        with pytest.raises(NotPositiveDefinite, match="block 1"):
            local_logdets(model)
