#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corpusmap/corpus.hpp"
#include "corpusmap/embed.hpp"
#include "corpusmap/errors.hpp"
#include "corpusmap/io.hpp"
#include "corpusmap/layout.hpp"
#include "corpusmap/simmetrics.hpp"
#include "corpusmap/study.hpp"

namespace py = pybind11;
using namespace corpusmap;

namespace {

py::object opt_to_py(const std::optional<double>& v) {
    if (v) return py::cast(*v);
    return py::none();
}

py::dict record_to_dict(const SimilarityRecord& rec) {
    py::dict d;
    d["pair_id"] = rec.pair_id;
    d["corpus"] = rec.corpus;
    d["embedding"] = rec.embedding;
    d["dr"] = rec.dr;
    d["varied_factor"] = rec.varied_factor;
    d["value_a"] = rec.value_a;
    d["value_b"] = rec.value_b;
    d["alpha_T"] = opt_to_py(rec.alpha_T);
    d["alpha_C"] = opt_to_py(rec.alpha_C);
    d["alpha_MM"] = opt_to_py(rec.alpha_MM);
    d["alpha_MF"] = opt_to_py(rec.alpha_MF);
    d["alpha_LC"] = opt_to_py(rec.alpha_LC);
    d["alpha_LP"] = opt_to_py(rec.alpha_LP);
    d["beta_PC"] = opt_to_py(rec.beta_PC);
    d["beta_SC"] = opt_to_py(rec.beta_SC);
    d["beta_CO"] = opt_to_py(rec.beta_CO);
    d["gamma_DC"] = opt_to_py(rec.gamma_DC);
    d["gamma_SC_abs_diff"] = opt_to_py(rec.gamma_SC_abs_diff);
    d["theta_PA"] = opt_to_py(rec.theta_PA);
    d["alpha"] = opt_to_py(rec.alpha);
    d["beta"] = opt_to_py(rec.beta);
    d["gamma"] = opt_to_py(rec.gamma);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "corpus layouts, scatterplot similarity metrics, stability experiments";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ComputeError>(m, "ComputeError", PyExc_RuntimeError);

    py::class_<SparseDtm>(m, "SparseDtm")
        .def_readonly("n_docs", &SparseDtm::n_docs)
        .def_readonly("n_terms", &SparseDtm::n_terms)
        .def_readonly("labels", &SparseDtm::labels)
        .def_readonly("vocabulary", &SparseDtm::vocabulary)
        .def("n_categories", &SparseDtm::n_categories)
        .def("to_dense", &SparseDtm::to_dense);

    py::class_<WeightedMatrix>(m, "WeightedMatrix")
        .def_readonly("n_docs", &WeightedMatrix::n_docs)
        .def_readonly("n_terms", &WeightedMatrix::n_terms)
        .def_readonly("labels", &WeightedMatrix::labels)
        .def_readonly("weighting", &WeightedMatrix::weighting)
        .def("to_dense", &WeightedMatrix::to_dense);

    py::class_<EmbeddedCorpus>(m, "EmbeddedCorpus")
        .def_readonly("vectors", &EmbeddedCorpus::vectors)
        .def_readonly("labels", &EmbeddedCorpus::labels)
        .def_property_readonly("method",
                               [](const EmbeddedCorpus& c) { return c.info.method; })
        .def_property_readonly("weighting",
                               [](const EmbeddedCorpus& c) { return c.info.weighting; })
        .def_property_readonly("k_topics",
                               [](const EmbeddedCorpus& c) { return c.info.k_topics; });

    py::class_<Scatterplot>(m, "Scatterplot")
        .def(py::init([](const Eigen::MatrixXd& points, const std::vector<std::string>& labels,
                         const std::map<std::string, std::string>& provenance) {
                 Scatterplot p;
                 p.points = points;
                 p.labels = labels;
                 p.provenance = provenance;
                 return p;
             }),
             py::arg("points"), py::arg("labels"),
             py::arg("provenance") = std::map<std::string, std::string>{})
        .def_readwrite("points", &Scatterplot::points)
        .def_readwrite("labels", &Scatterplot::labels)
        .def_readwrite("provenance", &Scatterplot::provenance);

    py::class_<LsiResult>(m, "LsiResult")
        .def_readonly("corpus", &LsiResult::corpus)
        .def_property_readonly("doc_topic",
                               [](const LsiResult& r) { return r.topics.doc_topic; })
        .def_property_readonly("topic_term",
                               [](const LsiResult& r) { return r.topics.topic_term; })
        .def_readonly("singular_values", &LsiResult::singular_values);

    py::class_<NmfResult>(m, "NmfResult")
        .def_readonly("corpus", &NmfResult::corpus)
        .def_property_readonly("doc_topic",
                               [](const NmfResult& r) { return r.topics.doc_topic; })
        .def_property_readonly("topic_term",
                               [](const NmfResult& r) { return r.topics.topic_term; })
        .def_readonly("objective_trace", &NmfResult::objective_trace);

    py::class_<MdsResult>(m, "MdsResult")
        .def_readonly("plot", &MdsResult::plot)
        .def_readonly("stress_trace", &MdsResult::stress_trace)
        .def_readonly("iterations", &MdsResult::iterations);

    py::class_<SomResult>(m, "SomResult")
        .def_readonly("plot", &SomResult::plot)
        .def_readonly("bmu", &SomResult::bmu)
        .def_readonly("codebook", &SomResult::codebook);

    py::class_<TsneResult>(m, "TsneResult")
        .def_readonly("plot", &TsneResult::plot)
        .def_readonly("kl_trace", &TsneResult::kl_trace)
        .def_readonly("realized_perplexity", &TsneResult::realized_perplexity);

    m.def("ingest_documents", &ingest_documents, py::arg("docs"), py::arg("labels"),
          py::arg("stopwords") = std::set<std::string>{});
    m.def("corpus_stats", [](const SparseDtm& dtm) {
        CorpusStats s = corpus_stats(dtm);
        py::dict d;
        d["n_docs"] = s.n_docs;
        d["n_terms"] = s.n_terms;
        d["n_categories"] = s.n_categories;
        d["median_doc_length"] = s.median_doc_length;
        d["sparsity"] = s.sparsity;
        return d;
    });
    m.def("apply_tfidf", &apply_tfidf);
    m.def("as_weighted", &as_weighted);
    m.def(
        "jitter",
        [](const SparseDtm& dtm, double lam, std::uint64_t seed) {
            return jitter(dtm, JitterSpec(lam, seed));
        },
        py::arg("dtm"), py::arg("lam"), py::arg("seed"));

    m.def("save_dtm",
          [](const SparseDtm& dtm, const std::string& path) { save_dtm(dtm, path); });
    m.def("load_dtm", [](const std::string& path) { return load_dtm(path); });
    m.def("save_scatterplot",
          [](const Scatterplot& plot, const std::string& path) { save_scatterplot(plot, path); });
    m.def("load_scatterplot", [](const std::string& path) { return load_scatterplot(path); });

    m.def("embed_vsm", &embed_vsm);
    m.def("embed_lsi", &embed_lsi, py::arg("matrix"), py::arg("k_topics"));
    m.def("embed_nmf", &embed_nmf, py::arg("matrix"), py::arg("k_topics"),
          py::arg("max_iter") = 300, py::arg("seed") = 12345);
    m.def("cosine_dissimilarity", &cosine_dissimilarity);
    m.def("dissimilarity_matrix", &dissimilarity_matrix);
    m.def("jensen_shannon_distance", &jensen_shannon_distance);

    m.def(
        "layout_mds",
        [](const Eigen::MatrixXd& diss, const std::vector<std::string>& labels,
           std::uint64_t seed, std::size_t max_iter) {
            DrParams p;
            p.name = "mds";
            p.mds_max_iter = max_iter;
            p.seed = seed;
            return layout_mds(diss, p, labels);
        },
        py::arg("diss"), py::arg("labels"), py::arg("seed"), py::arg("max_iter") = 300);
    m.def(
        "layout_som",
        [](const EmbeddedCorpus& corpus, std::uint64_t seed, std::size_t som_m, std::size_t som_n,
           bool dither) {
            DrParams p;
            p.name = "som";
            p.som_m = som_m;
            p.som_n = som_n;
            p.som_dither = dither;
            p.seed = seed;
            return layout_som(corpus, p);
        },
        py::arg("corpus"), py::arg("seed"), py::arg("m") = 10, py::arg("n") = 10,
        py::arg("dither") = true);
    m.def(
        "layout_tsne",
        [](const Eigen::MatrixXd& diss, const std::vector<std::string>& labels,
           std::uint64_t seed, double perplexity, std::size_t n_iter, py::object learning_rate) {
            DrParams p;
            p.name = "tsne";
            p.tsne_perplexity = perplexity;
            p.tsne_n_iter = n_iter;
            if (!learning_rate.is_none()) p.tsne_learning_rate = learning_rate.cast<double>();
            p.seed = seed;
            return layout_tsne(diss, p, labels);
        },
        py::arg("diss"), py::arg("labels"), py::arg("seed"), py::arg("perplexity") = 30.0,
        py::arg("n_iter") = 1000, py::arg("learning_rate") = py::none());

    m.def(
        "compare",
        [](const Scatterplot& a, const Scatterplot& b, std::size_t k) {
            return record_to_dict(compare(a, b, k));
        },
        py::arg("a"), py::arg("b"), py::arg("k") = 7);
    m.def(
        "compare_points",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
           const std::vector<std::string>& labels, std::size_t k) {
            return record_to_dict(compare(MetricInput::from_points(a, Dissimilarity::cosine),
                                          MetricInput::from_points(b, Dissimilarity::cosine),
                                          labels, k));
        },
        py::arg("a"), py::arg("b"), py::arg("labels"), py::arg("k") = 7);

    m.def("convex_combination_layout", &convex_combination_layout, py::arg("theta"),
          py::arg("topic_positions"), py::arg("labels"));
    m.def("procrustes_rotation", &procrustes_rotation);
    m.def("distance_consistency", &distance_consistency);
    m.def("silhouette", &silhouette);
    m.def("aggregate_alpha", &aggregate_alpha);
    m.def("aggregate_beta", &aggregate_beta);
    m.def("aggregate_gamma", &aggregate_gamma);
    m.def("adaptability", &adaptability);
    m.def("binomial_upper_tail", &binomial_upper_tail, py::arg("m"), py::arg("n"));
    m.def(
        "binary_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            BinaryTestResult r = binary_test(a, b);
            py::dict d;
            d["m"] = r.m;
            d["n"] = r.n;
            d["p"] = r.p;
            d["rejected"] = r.rejected();
            return d;
        },
        py::arg("a"), py::arg("b"));
}
