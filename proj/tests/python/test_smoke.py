import math

import numpy as np
import pytest

import corpusmap as cm


def toy_dtm():
    docs = [
        ["ant", "ant", "bee", "dune"],
        ["ant", "bee", "bee", "bee"],
        ["dune", "dune", "sand", "sand"],
        ["sand", "dune", "dune", "dune"],
        ["moss", "fern", "fern", "moss"],
        ["fern", "moss", "moss", "moss"],
    ]
    labels = ["bugs", "bugs", "desert", "desert", "forest", "forest"]
    return cm.ingest_documents(docs, labels)


def test_ingest_and_stats():
    dtm = toy_dtm()
    assert dtm.n_docs == 6
    assert dtm.n_categories() == 3
    assert list(dtm.vocabulary) == ["ant", "bee", "dune", "fern", "moss", "sand"]
    stats = cm.corpus_stats(dtm)
    assert stats["n_docs"] == 6
    assert stats["median_doc_length"] == 4
    dense = dtm.to_dense()
    assert dense.shape == (6, 6)
    assert dense[0, 0] == 2.0


def test_stopwords_drop_terms():
    dtm = cm.ingest_documents([["a", "b"], ["b", "c"]], ["x", "y"], {"b"})
    assert list(dtm.vocabulary) == ["a", "c"]


def test_tfidf_zeroes_ubiquitous_terms():
    dtm = cm.ingest_documents([["a", "b"], ["a", "c"]], ["x", "y"])
    weighted = cm.apply_tfidf(dtm)
    dense = weighted.to_dense()
    assert dense[0, 0] == 0.0 and dense[1, 0] == 0.0
    assert dense[0, 1] == pytest.approx(math.log(2.0))
    assert weighted.weighting == "tfidf"


def test_jitter_identity_and_determinism():
    dtm = toy_dtm()
    same = cm.jitter(dtm, 0.0, seed=7)
    assert np.array_equal(same.to_dense(), dtm.to_dense())
    a = cm.jitter(dtm, 0.5, seed=7)
    b = cm.jitter(dtm, 0.5, seed=7)
    c = cm.jitter(dtm, 0.5, seed=8)
    assert np.array_equal(a.to_dense(), b.to_dense())
    assert not np.array_equal(a.to_dense(), c.to_dense())


def test_jitter_rejects_bad_lambda():
    with pytest.raises(ValueError):
        cm.jitter(toy_dtm(), 1.5, seed=1)


def test_dtm_round_trip(tmp_path):
    dtm = toy_dtm()
    path = str(tmp_path / "toy.dtm")
    cm.save_dtm(dtm, path)
    back = cm.load_dtm(path)
    assert np.array_equal(back.to_dense(), dtm.to_dense())
    assert list(back.labels) == list(dtm.labels)


def test_embeddings():
    weighted = cm.as_weighted(toy_dtm())
    vsm = cm.embed_vsm(weighted)
    assert vsm.vectors.shape == (6, 6)
    assert vsm.method == "vsm"

    lsi = cm.embed_lsi(weighted, 2)
    assert lsi.corpus.vectors.shape == (6, 2)
    assert lsi.singular_values[0] >= lsi.singular_values[1] > 0
    assert lsi.topic_term.shape == (2, 6)

    nmf = cm.embed_nmf(weighted, 2, max_iter=50, seed=3)
    assert nmf.corpus.vectors.shape == (6, 2)
    assert len(nmf.objective_trace) == 51
    assert nmf.objective_trace[-1] <= nmf.objective_trace[0]
    assert np.all(nmf.corpus.vectors >= 0)


def test_embed_rejects_bad_rank():
    with pytest.raises(ValueError):
        cm.embed_lsi(cm.as_weighted(toy_dtm()), 0)


def test_cosine_dissimilarity():
    rows = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 0.0]])
    d = cm.cosine_dissimilarity(rows)
    assert d[0, 1] == pytest.approx(1.0)
    assert d[0, 2] == pytest.approx(0.0, abs=1e-12)
    assert np.array_equal(d, d.T)


def test_layouts_and_compare():
    rng = np.random.default_rng(5)
    blobs = np.vstack(
        [rng.normal(loc, 0.3, size=(8, 4)) for loc in (0.0, 4.0, 8.0)]
    ) + 10.0
    labels = ["b%d" % (i // 8) for i in range(24)]
    diss = cm.cosine_dissimilarity(blobs)

    mds = cm.layout_mds(diss, labels, seed=1, max_iter=100)
    assert mds.plot.points.shape == (24, 2)
    assert mds.stress_trace[-1] <= mds.stress_trace[0]

    tsne = cm.layout_tsne(diss, labels, seed=1, perplexity=5.0, n_iter=250)
    assert tsne.plot.points.shape == (24, 2)
    assert all(abs(p - 5.0) < 1e-3 for p in tsne.realized_perplexity)

    corpus = cm.embed_vsm(cm.as_weighted(toy_dtm()))
    som = cm.layout_som(corpus, seed=2, m=3, n=3)
    assert som.plot.points.shape == (6, 2)
    assert len(som.bmu) == 6

    record = cm.compare(mds.plot, mds.plot, k=5)
    assert record["alpha"] == 1.0
    assert record["beta"] == 1.0
    assert record["gamma"] == 1.0
    assert record["theta_PA"] == 0.0

    other = cm.compare(mds.plot, tsne.plot, k=5)
    assert 0.0 <= other["alpha"] <= 1.0
    assert other["pair_id"] == ""


def test_compare_points_capabilities():
    rng = np.random.default_rng(9)
    a = rng.uniform(size=(9, 4))
    b = rng.uniform(size=(9, 4))
    labels = ["c%d" % (i % 3) for i in range(9)]
    record = cm.compare_points(a, b, labels, k=3)
    assert record["beta_CO"] is not None
    assert record["theta_PA"] is None


def test_scatterplot_round_trip(tmp_path):
    points = np.array([[0.0, 1.0], [2.0, 3.0]])
    plot = cm.Scatterplot(points, ["u", "v"], {"dr": "none"})
    path = str(tmp_path / "plot.txt")
    cm.save_scatterplot(plot, path)
    back = cm.load_scatterplot(path)
    assert np.array_equal(back.points, points)
    assert back.provenance["dr"] == "none"


def test_convex_combination_exact():
    topics = np.array([[0.0, 0.0], [4.0, 0.0]])
    theta = np.array([[0.25, 0.75]])
    placed = cm.convex_combination_layout(theta, topics, ["doc"])
    assert placed.points[0, 0] == 3.0
    assert placed.points[0, 1] == 0.0


def test_procrustes_compute_error_maps_to_runtime_error():
    points = np.zeros((4, 2))
    plot = cm.Scatterplot(points, ["a", "a", "b", "b"], {})
    with pytest.raises(RuntimeError):
        cm.procrustes_rotation(plot, plot)


def test_binomial_and_binary_test():
    assert cm.binomial_upper_tail(10, 10) == 2.0 ** -10
    assert cm.binomial_upper_tail(4, 0) == 1.0
    result = cm.binary_test([0.1, 0.2, 0.3], [0.2, 0.1, 0.4])
    assert result["m"] == 3
    assert result["n"] == 2
    with pytest.raises(ValueError):
        cm.binary_test([0.1], [0.1, 0.2])


def test_aggregates():
    assert cm.aggregate_alpha(1, 1, 1, 1, 1, 1) == 1.0
    assert cm.aggregate_beta(1, 1, 1) == 1.0
    assert cm.aggregate_gamma(0.25) == 0.75
    assert cm.adaptability(0.9, 0.7) == pytest.approx(0.8)


def test_jensen_shannon_distance():
    p = np.array([1.0, 0.0])
    q = np.array([0.0, 1.0])
    assert cm.jensen_shannon_distance(p, q) == pytest.approx(math.sqrt(math.log(2.0)))
    assert cm.jensen_shannon_distance(p, p) == 0.0
