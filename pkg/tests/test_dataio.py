"""Generators, loaders, and the instance persistence layer."""

import json
import math

import numpy as np
import pytest

from submax import CacheNetworkObjective, CacheRequest, Matroid
from submax.dataio import (
    GraphData,
    Instance,
    InstanceFormatError,
    gen_bipartite_powerlaw,
    gen_cn_objective,
    gen_ic_cascades,
    gen_sm_objective,
    instance_to_dict,
    load_instance,
    load_ratings,
    save_instance,
    single_cascade,
    zkc_factions,
    zkc_graph,
)

from conftest import small_cn, small_im


class TestZkcFixture:
    def test_shape(self):
        graph = zkc_graph()
        assert graph.num_nodes == 34
        assert len(graph.edges) == 78
        assert not graph.directed

    def test_factions_cover_nodes(self):
        factions = zkc_factions()
        assert len(factions) == 34
        assert set(factions) == {0, 1}


class TestBipartitePowerlaw:
    def test_deterministic_per_seed(self):
        g1 = gen_bipartite_powerlaw(60, exponent=2.0, seed=5)
        g2 = gen_bipartite_powerlaw(60, exponent=2.0, seed=5)
        assert g1.edges == g2.edges
        g3 = gen_bipartite_powerlaw(60, exponent=2.0, seed=6)
        assert g3.edges != g1.edges

    def test_structure(self):
        graph = gen_bipartite_powerlaw(100, exponent=1.8, seed=1)
        left, right = graph.parts
        assert len(left) == len(right) == 50
        for u, v in graph.edges:
            assert u in left and v in right
        # simple graph: no duplicate edges
        assert len(set(graph.edges)) == len(graph.edges)

    def test_large_exponent_collapses_to_min_degree(self):
        graph = gen_bipartite_powerlaw(40, exponent=60.0, seed=2)
        _, right = graph.parts
        indeg = {w: 0 for w in right}
        for _, v in graph.edges:
            indeg[v] += 1
        assert all(d == 1 for d in indeg.values())

    def test_odd_node_count_rejected(self):
        with pytest.raises(ValueError, match="even"):
            gen_bipartite_powerlaw(41, seed=0)


class TestCascades:
    def test_p_zero_is_self_only(self):
        graph = zkc_graph()
        (trace,) = gen_ic_cascades(graph, 0.0, 1, seed=0)
        assert trace == tuple((v,) for v in range(34))

    def test_p_one_full_reachability(self):
        graph = zkc_graph()
        (trace,) = gen_ic_cascades(graph, 1.0, 1, seed=0)
        # ZKC is connected, so every node reaches every node.
        full = tuple(range(34))
        assert all(reach == full for reach in trace)

    def test_directed_forward_reachability(self):
        graph = GraphData(3, ((0, 1), (1, 2)), directed=True)
        (trace,) = gen_ic_cascades(graph, 1.0, 1, seed=0)
        assert trace == ((0, 1, 2), (1, 2), (2,))

    def test_deterministic_per_seed(self):
        graph = zkc_graph()
        a = gen_ic_cascades(graph, 0.5, 5, seed=9)
        b = gen_ic_cascades(graph, 0.5, 5, seed=9)
        assert a == b

    def test_mean_reach_monotone_in_p(self):
        # Expected reachable-set size grows with the keep probability.
        graph = zkc_graph()
        means = []
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            traces = gen_ic_cascades(graph, p, 60, seed=123)
            means.append(
                np.mean([len(reach) for t in traces for reach in t])
            )
        assert means == sorted(means)
        assert 1.0 < means[2] < 34.0

    def test_probability_range_validated(self, rng):
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            single_cascade(zkc_graph(), 1.5, rng)


class TestSyntheticObjectives:
    def test_sm_normalized(self, rng):
        obj = gen_sm_objective(10, 3, 4, rng)
        np.testing.assert_allclose(obj.values.sum(axis=1), 1.0)

    def test_cn_hits_target_load(self, rng):
        obj = gen_cn_objective(5, 2, 7, 0.65, rng)
        assert obj.max_empty_load == pytest.approx(0.65)

    def test_cn_rejects_bad_load(self, rng):
        with pytest.raises(ValueError, match="\\(0, 1\\)"):
            gen_cn_objective(4, 2, 5, 1.2, rng)


class TestRatingsLoader:
    def test_single_line(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("0,0,5\n")
        obj, users, items = load_ratings(path)
        assert obj.n == 1 and obj.num_realizations == 1
        assert obj.weights[0, 0] == 1.0

    def test_tab_delimiter_and_scaling(self, tmp_path):
        path = tmp_path / "r.tsv"
        path.write_text("u1\tm1\t4\nu1\tm2\t2\nu2\tm1\t1\n")
        obj, users, items = load_ratings(path)
        assert obj.n == 2 and obj.num_realizations == 2
        np.testing.assert_allclose(obj.weights, [[1.0, 0.5], [0.25, 0.0]])

    def test_duplicate_last_wins_with_warning(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("0,0,1\n0,0,5\n")
        with pytest.warns(UserWarning, match="duplicate"):
            obj, _, _ = load_ratings(path)
        assert obj.weights[0, 0] == 1.0

    def test_malformed_line_reports_row(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("0,0,1\n0,1\n")
        with pytest.raises(ValueError, match=":2:"):
            load_ratings(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("\n")
        with pytest.raises(ValueError, match="no ratings"):
            load_ratings(path)

    def test_movielens_shaped_subsample(self, tmp_path, rng):
        # 1000 users x 200 movies shaped synthetic ratings file with
        # 10 genre-like blocks and per-block cap 2.
        users, movies = 1000, 200
        lines = []
        for u in range(users):
            rated = rng.choice(movies, size=5, replace=False)
            for m in rated:
                lines.append(f"{u},{m},{int(rng.integers(1, 6))}")
        path = tmp_path / "ml.csv"
        path.write_text("\n".join(lines) + "\n")
        obj, _, items = load_ratings(path)
        assert obj.num_realizations == users
        assert obj.n == len(items)
        blocks = [list(c) for c in np.array_split(np.arange(obj.n), 10)]
        matroid = Matroid.partition(blocks, [2] * 10, n=obj.n)
        assert matroid.rank() == 20


class TestInstanceRoundTrip:
    def test_im_round_trip(self, rng, tmp_path):
        obj = small_im(rng, n=5, realizations=2)
        inst = Instance(obj, Matroid.uniform(5, 2), meta={"name": "toy"})
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        again = load_instance(path)
        assert instance_to_dict(again) == instance_to_dict(inst)

    @pytest.mark.parametrize("family", ["SM", "FL", "CN"])
    def test_other_families_round_trip(self, family, rng, tmp_path):
        from conftest import small_cn, small_fl, small_sm

        maker = {"SM": small_sm, "FL": small_fl, "CN": small_cn}[family]
        obj = maker(rng)
        matroid = Matroid.uniform(obj.n, 2)
        inst = Instance(obj, matroid)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        again = load_instance(path)
        assert instance_to_dict(again) == instance_to_dict(inst)

    def test_version_mismatch(self, rng, tmp_path):
        obj = small_im(rng, n=4, realizations=1)
        inst = Instance(obj, Matroid.uniform(4, 1))
        blob = instance_to_dict(inst)
        blob["schema_version"] = 99
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(blob))
        with pytest.raises(InstanceFormatError, match="schema_version"):
            load_instance(path)

    def test_corrupted_family_tag(self, rng, tmp_path):
        obj = small_im(rng, n=4, realizations=1)
        inst = Instance(obj, Matroid.uniform(4, 1))
        blob = instance_to_dict(inst)
        blob["family"] = "XX"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(blob))
        with pytest.raises(InstanceFormatError, match="family"):
            load_instance(path)

    def test_unstable_cn_rejected_at_load(self, tmp_path):
        obj = CacheNetworkObjective(
            2, 1, [(0, 1, 1.0)], [CacheRequest(0, (0, 1), 0.5)]
        )
        inst = Instance(obj, Matroid.uniform(2, 1))
        blob = instance_to_dict(inst)
        blob["payload"]["requests"][0]["rate"] = 2.0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(blob))
        with pytest.raises(InstanceFormatError, match="stability"):
            load_instance(path)

    def test_n_disagreement(self, rng, tmp_path):
        obj = small_im(rng, n=4, realizations=1)
        inst = Instance(obj, Matroid.uniform(4, 1))
        blob = instance_to_dict(inst)
        blob["n"] = 7
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(blob))
        with pytest.raises(InstanceFormatError, match="disagrees"):
            load_instance(path)
