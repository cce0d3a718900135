#include "corpusmap/study.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "corpusmap/errors.hpp"
#include "corpusmap/io.hpp"
#include "corpusmap/rng.hpp"

namespace corpusmap {

namespace {

template <typename T>
bool all_distinct(const std::vector<T>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (v[i] == v[j]) return false;
    return true;
}

template <typename T>
std::optional<std::size_t> position_of(const std::vector<T>& v, const T& x) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == x) return i;
    return std::nullopt;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string dr_param_string(const DrParams& dr) {
    if (dr.name == "mds") return "max_iter=" + std::to_string(dr.mds_max_iter);
    if (dr.name == "som")
        return "m=" + std::to_string(dr.som_m) + ";n=" + std::to_string(dr.som_n) + ";dither=" +
               (dr.som_dither ? std::string("on") : std::string("off"));
    if (dr.name == "tsne")
        return "perplexity=" + format_real(dr.tsne_perplexity) +
               ";n_iter=" + std::to_string(dr.tsne_n_iter) + ";learning_rate=" +
               (dr.tsne_learning_rate ? format_real(*dr.tsne_learning_rate) : std::string("auto"));
    throw InputError("study: unknown projection '" + dr.name + "'");
}

// Sorts by canonical key; `dedup` drops jobs whose key repeats.
void sort_jobs_by_key(std::vector<LayoutJob>& jobs, bool dedup) {
    std::vector<std::pair<std::string, std::size_t>> keys;
    keys.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) keys.emplace_back(jobs[i].key(), i);
    std::sort(keys.begin(), keys.end());
    std::vector<LayoutJob> sorted;
    sorted.reserve(jobs.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (dedup && i > 0 && keys[i].first == keys[i - 1].first) continue;
        sorted.push_back(std::move(jobs[keys[i].second]));
    }
    jobs = std::move(sorted);
}

constexpr std::array<const char*, 3> kAggregateNames{"alpha", "beta", "gamma"};

}  // namespace

std::string EmbeddingSpec::base_name() const {
    if (method == "vsm") return "vsm";
    return method + std::to_string(k_topics);
}

std::string EmbeddingSpec::display_name(bool convex) const {
    std::string s = base_name() + "-" + weighting;
    if (convex) s += "-cc";
    return s;
}

StudyGrids StudyGrids::defaults() {
    StudyGrids g;
    g.mds_max_iter = {100, 150, 200, 250, 300};
    g.som_m = {5, 10, 15, 20, 25, 30};
    g.som_n = {5, 10, 15, 20, 25, 30};
    g.tsne_perplexity = {5.0, 15.0, 25.0, 35.0, 45.0, 55.0};
    g.tsne_n_iter = {1000, 2500, 5000, 10000};
    g.tsne_learning_rate = {10.0, 28.0, 129.0, 359.0, 1000.0, std::nullopt};
    return g;
}

void StudyConfig::validate() const {
    if (corpora.empty()) throw InputError("study_config: corpora must not be empty");
    std::set<std::string> ids;
    for (const CorpusRef& c : corpora) {
        if (c.id.empty()) throw InputError("study_config: corpus id must not be empty");
        for (char ch : c.id) {
            bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '_' || ch == '.' || ch == '-';
            if (!ok)
                throw InputError("study_config: corpus id '" + c.id +
                                 "' has characters outside [A-Za-z0-9_.-]");
        }
        if (!ids.insert(c.id).second)
            throw InputError("study_config: duplicate corpus id '" + c.id + "'");
        if (c.path.empty())
            throw InputError("study_config: corpus '" + c.id + "' has an empty path");
    }
    if (jitter_lambdas.empty()) throw InputError("study_config: jitter_lambdas must not be empty");
    bool has_zero = false;
    for (double l : jitter_lambdas) {
        if (!(l >= 0.0 && l <= 1.0))
            throw InputError("study_config: jitter lambda must lie in [0, 1]");
        if (l == 0.0) has_zero = true;
    }
    if (!has_zero) throw InputError("study_config: jitter_lambdas must include 0");
    if (!all_distinct(jitter_lambdas))
        throw InputError("study_config: jitter_lambdas must be distinct");
    if (embeddings.empty()) throw InputError("study_config: embeddings must not be empty");
    std::set<std::string> names;
    for (const EmbeddingSpec& e : embeddings) {
        if (e.method != "vsm" && e.method != "lsi" && e.method != "nmf")
            throw InputError("study_config: unknown embedding method '" + e.method + "'");
        if (e.weighting != "raw" && e.weighting != "tfidf")
            throw InputError("study_config: unknown weighting '" + e.weighting + "'");
        if (e.method == "vsm" && e.k_topics != 0)
            throw InputError("study_config: vsm takes no topic count");
        if (e.method != "vsm" && e.k_topics < 1)
            throw InputError("study_config: " + e.method + " needs k_topics >= 1");
        if (!names.insert(e.display_name(false)).second)
            throw InputError("study_config: duplicate embedding '" + e.display_name(false) + "'");
    }
    if (!grids.use_mds && !grids.use_som && !grids.use_tsne)
        throw InputError("study_config: at least one projection must be enabled");
    if (grids.use_mds) {
        if (grids.mds_max_iter.empty()) throw InputError("study_config: mds max_iter grid is empty");
        if (!all_distinct(grids.mds_max_iter))
            throw InputError("study_config: mds max_iter grid has duplicates");
        for (std::size_t v : grids.mds_max_iter)
            if (v < 1) throw InputError("study_config: mds max_iter must be >= 1");
    }
    if (grids.use_som) {
        if (grids.som_m.empty() || grids.som_n.empty())
            throw InputError("study_config: som grids must not be empty");
        if (!all_distinct(grids.som_m) || !all_distinct(grids.som_n))
            throw InputError("study_config: som grids have duplicates");
        for (std::size_t v : grids.som_m)
            if (v < 2) throw InputError("study_config: som m must be >= 2");
        for (std::size_t v : grids.som_n)
            if (v < 2) throw InputError("study_config: som n must be >= 2");
    }
    if (grids.use_tsne) {
        if (grids.tsne_perplexity.empty() || grids.tsne_n_iter.empty() ||
            grids.tsne_learning_rate.empty())
            throw InputError("study_config: tsne grids must not be empty");
        if (!all_distinct(grids.tsne_perplexity) || !all_distinct(grids.tsne_n_iter) ||
            !all_distinct(grids.tsne_learning_rate))
            throw InputError("study_config: tsne grids have duplicates");
        for (double v : grids.tsne_perplexity)
            if (!(v > 1.0)) throw InputError("study_config: tsne perplexity must exceed 1");
        for (std::size_t v : grids.tsne_n_iter)
            if (v < 250) throw InputError("study_config: tsne n_iter must be >= 250");
        for (const std::optional<double>& v : grids.tsne_learning_rate)
            if (v && !(*v > 0.0))
                throw InputError("study_config: tsne learning rate must be positive");
    }
    if (seeds.empty()) throw InputError("study_config: seeds must not be empty");
    if (!all_distinct(seeds)) throw InputError("study_config: seeds must be distinct");
    if (k_neighbors < 1) throw InputError("study_config: k_neighbors must be >= 1");
}

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InputError("study_config: unknown key '" + it.key() + "' in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end())
        throw InputError("study_config: missing key '" + std::string(key) + "' in " + where);
    return *it;
}

std::uint64_t as_u64(const json& v, const std::string& what) {
    if (!v.is_number_unsigned())
        throw InputError("study_config: " + what + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::size_t as_size(const json& v, const std::string& what) {
    return static_cast<std::size_t>(as_u64(v, what));
}

double as_num(const json& v, const std::string& what) {
    if (!v.is_number()) throw InputError("study_config: " + what + " must be a number");
    return v.get<double>();
}

std::string as_str(const json& v, const std::string& what) {
    if (!v.is_string()) throw InputError("study_config: " + what + " must be a string");
    return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& what) {
    if (!v.is_array()) throw InputError("study_config: " + what + " must be an array");
    return v;
}

const json& as_object(const json& v, const std::string& what) {
    if (!v.is_object()) throw InputError("study_config: " + what + " must be an object");
    return v;
}

}  // namespace

StudyConfig load_study_config(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw InputError("study_config: cannot read " + p.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw InputError(std::string("study_config: ") + e.what());
    }
    as_object(j, "top level");
    check_keys(j, {"corpora", "jitter_lambdas", "jitter_seed", "embeddings", "dr_grids", "seeds",
                   "k_neighbors"},
               "the config");

    StudyConfig cfg;
    for (const json& c : as_array(need(j, "corpora", "the config"), "corpora")) {
        as_object(c, "corpora entry");
        check_keys(c, {"id", "path"}, "a corpora entry");
        CorpusRef ref;
        ref.id = as_str(need(c, "id", "a corpora entry"), "corpus id");
        ref.path = as_str(need(c, "path", "a corpora entry"), "corpus path");
        cfg.corpora.push_back(std::move(ref));
    }
    if (j.count("jitter_lambdas")) {
        cfg.jitter_lambdas.clear();
        for (const json& v : as_array(j["jitter_lambdas"], "jitter_lambdas"))
            cfg.jitter_lambdas.push_back(as_num(v, "jitter lambda"));
    }
    if (j.count("jitter_seed")) cfg.jitter_seed = as_u64(j["jitter_seed"], "jitter_seed");
    for (const json& e : as_array(need(j, "embeddings", "the config"), "embeddings")) {
        as_object(e, "embeddings entry");
        check_keys(e, {"method", "weighting", "k_topics", "nmf_max_iter", "seed"},
                   "an embeddings entry");
        EmbeddingSpec spec;
        spec.method = as_str(need(e, "method", "an embeddings entry"), "embedding method");
        if (e.count("weighting")) spec.weighting = as_str(e["weighting"], "weighting");
        if (e.count("k_topics")) spec.k_topics = as_size(e["k_topics"], "k_topics");
        if (e.count("nmf_max_iter")) spec.nmf_max_iter = as_size(e["nmf_max_iter"], "nmf_max_iter");
        if (e.count("seed")) spec.embed_seed = as_u64(e["seed"], "embedding seed");
        cfg.embeddings.push_back(std::move(spec));
    }
    if (j.count("dr_grids")) {
        const json& g = as_object(j["dr_grids"], "dr_grids");
        check_keys(g, {"mds", "som", "tsne"}, "dr_grids");
        cfg.grids.use_mds = g.count("mds") > 0;
        cfg.grids.use_som = g.count("som") > 0;
        cfg.grids.use_tsne = g.count("tsne") > 0;
        if (cfg.grids.use_mds) {
            const json& m = as_object(g["mds"], "dr_grids.mds");
            check_keys(m, {"max_iter"}, "dr_grids.mds");
            if (m.count("max_iter")) {
                cfg.grids.mds_max_iter.clear();
                for (const json& v : as_array(m["max_iter"], "mds max_iter"))
                    cfg.grids.mds_max_iter.push_back(as_size(v, "mds max_iter"));
            }
        }
        if (cfg.grids.use_som) {
            const json& s = as_object(g["som"], "dr_grids.som");
            check_keys(s, {"m", "n"}, "dr_grids.som");
            if (s.count("m")) {
                cfg.grids.som_m.clear();
                for (const json& v : as_array(s["m"], "som m"))
                    cfg.grids.som_m.push_back(as_size(v, "som m"));
            }
            if (s.count("n")) {
                cfg.grids.som_n.clear();
                for (const json& v : as_array(s["n"], "som n"))
                    cfg.grids.som_n.push_back(as_size(v, "som n"));
            }
        }
        if (cfg.grids.use_tsne) {
            const json& t = as_object(g["tsne"], "dr_grids.tsne");
            check_keys(t, {"perplexity", "n_iter", "learning_rate"}, "dr_grids.tsne");
            if (t.count("perplexity")) {
                cfg.grids.tsne_perplexity.clear();
                for (const json& v : as_array(t["perplexity"], "tsne perplexity"))
                    cfg.grids.tsne_perplexity.push_back(as_num(v, "tsne perplexity"));
            }
            if (t.count("n_iter")) {
                cfg.grids.tsne_n_iter.clear();
                for (const json& v : as_array(t["n_iter"], "tsne n_iter"))
                    cfg.grids.tsne_n_iter.push_back(as_size(v, "tsne n_iter"));
            }
            if (t.count("learning_rate")) {
                cfg.grids.tsne_learning_rate.clear();
                for (const json& v : as_array(t["learning_rate"], "tsne learning_rate")) {
                    if (v.is_string()) {
                        if (v.get<std::string>() != "auto")
                            throw InputError(
                                "study_config: tsne learning rate must be a number or \"auto\"");
                        cfg.grids.tsne_learning_rate.push_back(std::nullopt);
                    } else {
                        cfg.grids.tsne_learning_rate.push_back(as_num(v, "tsne learning rate"));
                    }
                }
            }
        }
    }
    for (const json& v : as_array(need(j, "seeds", "the config"), "seeds"))
        cfg.seeds.push_back(as_u64(v, "seed"));
    if (j.count("k_neighbors")) cfg.k_neighbors = as_size(j["k_neighbors"], "k_neighbors");
    cfg.validate();
    return cfg;
}

std::string kind_name(StabilityKind kind) {
    switch (kind) {
        case StabilityKind::input_data: return "input_data";
        case StabilityKind::hyperparameter: return "hyperparameter";
        case StabilityKind::randomness: return "randomness";
    }
    throw InputError("study: unknown stability kind");
}

StabilityKind parse_kind(const std::string& name) {
    if (name == "input_data") return StabilityKind::input_data;
    if (name == "hyperparameter") return StabilityKind::hyperparameter;
    if (name == "randomness") return StabilityKind::randomness;
    throw InputError("study: unknown stability kind '" + name + "'");
}

std::string LayoutJob::key() const {
    return "corpus=" + corpus_id + ";lambda=" + format_real(lambda) + ";embedding=" +
           embedding_name + ";placement=" + (convex ? "convex" : "direct") + ";dr=" + dr.name +
           ";" + dr_param_string(dr) + ";seed=" + std::to_string(dr.seed);
}

std::string LayoutJob::neutral_key() const {
    return "corpus=" + corpus_id + ";lambda=" + format_real(lambda) + ";embedding=" +
           embedding_base + ";dr=" + dr.name + ";" + dr_param_string(dr) +
           ";seed=" + std::to_string(dr.seed);
}

std::vector<LayoutJob> enumerate_layout_jobs(const StudyConfig& config, bool convex) {
    config.validate();
    std::vector<LayoutJob> jobs;
    for (std::size_t ci = 0; ci < config.corpora.size(); ++ci) {
        for (std::size_t li = 0; li < config.jitter_lambdas.size(); ++li) {
            for (std::size_t ei = 0; ei < config.embeddings.size(); ++ei) {
                const EmbeddingSpec& emb = config.embeddings[ei];
                if (convex && emb.method == "vsm") continue;
                LayoutJob base;
                base.corpus_index = ci;
                base.corpus_id = config.corpora[ci].id;
                base.lambda_index = li;
                base.lambda = config.jitter_lambdas[li];
                base.embedding_index = ei;
                base.embedding_name = emb.display_name(convex);
                base.embedding_base = emb.base_name();
                base.convex = convex;
                for (std::uint64_t seed : config.seeds) {
                    if (config.grids.use_mds)
                        for (std::size_t it : config.grids.mds_max_iter) {
                            LayoutJob job = base;
                            job.dr.name = "mds";
                            job.dr.mds_max_iter = it;
                            job.dr.seed = seed;
                            jobs.push_back(std::move(job));
                        }
                    if (config.grids.use_som)
                        for (std::size_t m : config.grids.som_m)
                            for (std::size_t n : config.grids.som_n) {
                                LayoutJob job = base;
                                job.dr.name = "som";
                                job.dr.som_m = m;
                                job.dr.som_n = n;
                                job.dr.seed = seed;
                                jobs.push_back(std::move(job));
                            }
                    if (config.grids.use_tsne)
                        for (double perp : config.grids.tsne_perplexity)
                            for (std::size_t ni : config.grids.tsne_n_iter)
                                for (const std::optional<double>& lr :
                                     config.grids.tsne_learning_rate) {
                                    LayoutJob job = base;
                                    job.dr.name = "tsne";
                                    job.dr.tsne_perplexity = perp;
                                    job.dr.tsne_n_iter = ni;
                                    job.dr.tsne_learning_rate = lr;
                                    job.dr.seed = seed;
                                    jobs.push_back(std::move(job));
                                }
                }
            }
        }
    }
    sort_jobs_by_key(jobs, true);
    return jobs;
}

std::vector<PairingSpec> make_pairings(const StudyConfig& config,
                                       const std::vector<LayoutJob>& jobs, StabilityKind kind) {
    std::unordered_map<std::string, std::size_t> by_key;
    by_key.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) by_key.emplace(jobs[i].key(), i);
    auto find_job = [&](const LayoutJob& probe) -> std::optional<std::size_t> {
        auto it = by_key.find(probe.key());
        if (it == by_key.end()) return std::nullopt;
        return it->second;
    };

    std::vector<PairingSpec> out;
    if (kind == StabilityKind::input_data) {
        if (config.jitter_lambdas.size() == 1) {
            // Identity configuration: the lone lambda is 0, so each layout is
            // paired with itself.
            for (std::size_t i = 0; i < jobs.size(); ++i)
                out.push_back({kind, i, i, "jitter_lambda", format_real(0.0), format_real(0.0)});
            return out;
        }
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (jobs[i].lambda == 0.0) continue;
            LayoutJob probe = jobs[i];
            probe.lambda = 0.0;
            if (auto a = find_job(probe))
                out.push_back({kind, *a, i, "jitter_lambda", format_real(0.0),
                               format_real(jobs[i].lambda)});
        }
        return out;
    }
    if (kind == StabilityKind::hyperparameter) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const LayoutJob& job = jobs[i];
            if (job.dr.name == "mds") {
                auto p = position_of(config.grids.mds_max_iter, job.dr.mds_max_iter);
                if (p && *p + 1 < config.grids.mds_max_iter.size()) {
                    LayoutJob probe = job;
                    probe.dr.mds_max_iter = config.grids.mds_max_iter[*p + 1];
                    if (auto b = find_job(probe))
                        out.push_back({kind, i, *b, "mds.max_iter",
                                       std::to_string(job.dr.mds_max_iter),
                                       std::to_string(probe.dr.mds_max_iter)});
                }
            } else if (job.dr.name == "som") {
                auto pm = position_of(config.grids.som_m, job.dr.som_m);
                if (pm && *pm + 1 < config.grids.som_m.size()) {
                    LayoutJob probe = job;
                    probe.dr.som_m = config.grids.som_m[*pm + 1];
                    if (auto b = find_job(probe))
                        out.push_back({kind, i, *b, "som.m", std::to_string(job.dr.som_m),
                                       std::to_string(probe.dr.som_m)});
                }
                auto pn = position_of(config.grids.som_n, job.dr.som_n);
                if (pn && *pn + 1 < config.grids.som_n.size()) {
                    LayoutJob probe = job;
                    probe.dr.som_n = config.grids.som_n[*pn + 1];
                    if (auto b = find_job(probe))
                        out.push_back({kind, i, *b, "som.n", std::to_string(job.dr.som_n),
                                       std::to_string(probe.dr.som_n)});
                }
            } else if (job.dr.name == "tsne") {
                auto pp = position_of(config.grids.tsne_perplexity, job.dr.tsne_perplexity);
                if (pp && *pp + 1 < config.grids.tsne_perplexity.size()) {
                    LayoutJob probe = job;
                    probe.dr.tsne_perplexity = config.grids.tsne_perplexity[*pp + 1];
                    if (auto b = find_job(probe))
                        out.push_back({kind, i, *b, "tsne.perplexity",
                                       format_real(job.dr.tsne_perplexity),
                                       format_real(probe.dr.tsne_perplexity)});
                }
                auto pi = position_of(config.grids.tsne_n_iter, job.dr.tsne_n_iter);
                if (pi && *pi + 1 < config.grids.tsne_n_iter.size()) {
                    LayoutJob probe = job;
                    probe.dr.tsne_n_iter = config.grids.tsne_n_iter[*pi + 1];
                    if (auto b = find_job(probe))
                        out.push_back({kind, i, *b, "tsne.n_iter",
                                       std::to_string(job.dr.tsne_n_iter),
                                       std::to_string(probe.dr.tsne_n_iter)});
                }
                auto pl = position_of(config.grids.tsne_learning_rate, job.dr.tsne_learning_rate);
                if (pl && *pl + 1 < config.grids.tsne_learning_rate.size()) {
                    LayoutJob probe = job;
                    probe.dr.tsne_learning_rate = config.grids.tsne_learning_rate[*pl + 1];
                    auto lr_str = [](const std::optional<double>& lr) {
                        return lr ? format_real(*lr) : std::string("auto");
                    };
                    if (auto b = find_job(probe))
                        out.push_back({kind, i, *b, "tsne.learning_rate",
                                       lr_str(job.dr.tsne_learning_rate),
                                       lr_str(probe.dr.tsne_learning_rate)});
                }
            }
        }
        return out;
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto p = position_of(config.seeds, jobs[i].dr.seed);
        if (!p) continue;
        for (std::size_t q = *p + 1; q < config.seeds.size(); ++q) {
            LayoutJob probe = jobs[i];
            probe.dr.seed = config.seeds[q];
            if (auto b = find_job(probe))
                out.push_back({kind, i, *b, "seed", std::to_string(jobs[i].dr.seed),
                               std::to_string(config.seeds[q])});
        }
    }
    return out;
}

namespace {

void parallel_for(std::size_t workers, std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t n_threads = std::min(workers == 0 ? std::size_t{1} : workers, count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (std::thread& t : pool) t.join();
}

// Coordinates pass through the 9-digit text round trip so fresh and cached
// layouts compare bit for bit.
void canonicalize_points(Eigen::MatrixXd& pts) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = parse_real(format_real(pts(i, j)));
}

struct ConvexSource {
    Eigen::MatrixXd theta;
    Eigen::MatrixXd phi;
    std::vector<std::string> labels;
    EmbeddingInfo info;
};

struct HighTriple {
    std::optional<double> alpha, beta, gamma;
};

}  // namespace

std::vector<SimilarityRecord> run_experiment(const StudyConfig& config, StabilityKind kind,
                                             const RunOptions& opts) {
    config.validate();

    std::vector<LayoutJob> jobs = enumerate_layout_jobs(config, false);
    if (opts.convex) {
        std::vector<LayoutJob> extra = enumerate_layout_jobs(config, true);
        jobs.insert(jobs.end(), extra.begin(), extra.end());
    }
    if (kind != StabilityKind::input_data) {
        std::vector<LayoutJob> kept;
        for (LayoutJob& job : jobs)
            if (job.lambda == 0.0) kept.push_back(std::move(job));
        jobs = std::move(kept);
    }
    sort_jobs_by_key(jobs, false);
    if (jobs.empty()) throw InputError("study: no layout jobs to run");

    std::vector<PairingSpec> pairings = make_pairings(config, jobs, kind);

    std::map<std::size_t, SparseDtm> dtms;
    auto dtm_for = [&](std::size_t ci) -> const SparseDtm& {
        auto it = dtms.find(ci);
        if (it == dtms.end()) it = dtms.emplace(ci, load_dtm(config.corpora[ci].path)).first;
        return it->second;
    };
    for (const LayoutJob& job : jobs) dtm_for(job.corpus_index);

    std::map<std::pair<std::size_t, std::size_t>, SparseDtm> jittered;
    auto jitter_for = [&](std::size_t ci, std::size_t li) -> const SparseDtm& {
        auto key = std::make_pair(ci, li);
        auto it = jittered.find(key);
        if (it == jittered.end()) {
            const SparseDtm& dtm = dtm_for(ci);
            double lambda = config.jitter_lambdas[li];
            SparseDtm jit =
                lambda == 0.0 ? dtm : jitter(dtm, JitterSpec(lambda, config.jitter_seed));
            it = jittered.emplace(key, std::move(jit)).first;
        }
        return it->second;
    };

    std::map<std::tuple<std::size_t, std::size_t, std::string>, WeightedMatrix> weighted;
    auto weighted_for = [&](std::size_t ci, std::size_t li,
                            const std::string& weighting) -> const WeightedMatrix& {
        auto key = std::make_tuple(ci, li, weighting);
        auto it = weighted.find(key);
        if (it == weighted.end()) {
            const SparseDtm& jit = jitter_for(ci, li);
            WeightedMatrix wm = weighting == "tfidf" ? apply_tfidf(jit) : as_weighted(jit);
            it = weighted.emplace(key, std::move(wm)).first;
        }
        return it->second;
    };

    using EmbKey = std::tuple<std::size_t, std::size_t, std::size_t>;
    std::map<EmbKey, EmbeddedCorpus> direct_embeddings;
    std::map<EmbKey, ConvexSource> convex_sources;
    std::map<EmbKey, std::string> embed_errors;
    std::map<EmbKey, std::string> convex_errors;

    for (const LayoutJob& job : jobs) {
        EmbKey key{job.corpus_index, job.lambda_index, job.embedding_index};
        const EmbeddingSpec& spec = config.embeddings[job.embedding_index];
        if (!job.convex) {
            if (direct_embeddings.count(key) || embed_errors.count(key)) continue;
            try {
                const WeightedMatrix& wm =
                    weighted_for(job.corpus_index, job.lambda_index, spec.weighting);
                if (spec.method == "vsm")
                    direct_embeddings.emplace(key, embed_vsm(wm));
                else if (spec.method == "lsi")
                    direct_embeddings.emplace(key, embed_lsi(wm, spec.k_topics).corpus);
                else
                    direct_embeddings.emplace(
                        key, embed_nmf(wm, spec.k_topics, spec.nmf_max_iter, spec.embed_seed).corpus);
            } catch (const std::exception& e) {
                embed_errors.emplace(key, e.what());
            }
        } else {
            if (convex_sources.count(key) || convex_errors.count(key)) continue;
            try {
                const WeightedMatrix& wm =
                    weighted_for(job.corpus_index, job.lambda_index, spec.weighting);
                ConvexSource src;
                if (spec.method == "lsi") {
                    LsiResult r = embed_lsi(wm, spec.k_topics);
                    src.theta = r.topics.doc_topic.cwiseMax(0.0);
                    src.phi = r.topics.topic_term;
                    src.info = r.corpus.info;
                } else {
                    NmfResult r = embed_nmf(wm, spec.k_topics, spec.nmf_max_iter, spec.embed_seed);
                    src.theta = r.topics.doc_topic;
                    src.phi = r.topics.topic_term;
                    src.info = r.corpus.info;
                }
                src.labels = wm.labels;
                convex_sources.emplace(key, std::move(src));
            } catch (const std::exception& e) {
                convex_errors.emplace(key, e.what());
            }
        }
    }

    std::size_t lambda0 = 0;
    for (std::size_t li = 0; li < config.jitter_lambdas.size(); ++li)
        if (config.jitter_lambdas[li] == 0.0) lambda0 = li;

    std::map<std::tuple<std::size_t, std::size_t, std::string>, HighTriple> highs;
    std::map<std::tuple<std::size_t, std::size_t, std::string>, std::string> high_errors;
    if (kind == StabilityKind::input_data) {
        for (const PairingSpec& p : pairings) {
            const LayoutJob& jb = jobs[p.job_b];
            const std::string& weighting = config.embeddings[jb.embedding_index].weighting;
            auto key = std::make_tuple(jb.corpus_index, jb.lambda_index, weighting);
            if (highs.count(key) || high_errors.count(key)) continue;
            try {
                const WeightedMatrix& w0 = weighted_for(jb.corpus_index, lambda0, weighting);
                const WeightedMatrix& wl =
                    weighted_for(jb.corpus_index, jb.lambda_index, weighting);
                SimilarityRecord rec =
                    compare(MetricInput::from_points(w0.to_dense(), Dissimilarity::cosine),
                            MetricInput::from_points(wl.to_dense(), Dissimilarity::cosine),
                            dtm_for(jb.corpus_index).labels, config.k_neighbors);
                highs.emplace(key, HighTriple{rec.alpha, rec.beta, rec.gamma});
            } catch (const std::exception& e) {
                high_errors.emplace(key, e.what());
            }
        }
    }

    const bool use_cache = !opts.cache_dir.empty();
    if (use_cache) std::filesystem::create_directories(opts.cache_dir);
    auto cache_path = [&](const LayoutJob& job) {
        const EmbeddingSpec& spec = config.embeddings[job.embedding_index];
        std::string salt = job.key() + "||jitter_seed=" + std::to_string(config.jitter_seed);
        if (spec.method != "vsm")
            salt += "||embed_seed=" + std::to_string(spec.embed_seed) +
                    "||nmf_max_iter=" + std::to_string(spec.nmf_max_iter);
        return opts.cache_dir / (hash_hex(salt) + ".txt");
    };

    auto compute_layout = [&](const LayoutJob& job) -> Scatterplot {
        EmbKey key{job.corpus_index, job.lambda_index, job.embedding_index};
        Scatterplot plot;
        if (!job.convex) {
            auto err = embed_errors.find(key);
            if (err != embed_errors.end()) throw ComputeError(err->second);
            const EmbeddedCorpus& emb = direct_embeddings.at(key);
            if (job.dr.name == "mds")
                plot = layout_mds(dissimilarity_matrix(emb), job.dr, emb.labels).plot;
            else if (job.dr.name == "som")
                plot = layout_som(emb, job.dr).plot;
            else
                plot = layout_tsne(emb, job.dr).plot;
            plot.provenance["placement"] = "direct";
        } else {
            auto err = convex_errors.find(key);
            if (err != convex_errors.end()) throw ComputeError(err->second);
            const ConvexSource& src = convex_sources.at(key);
            std::vector<std::string> topic_labels;
            for (Eigen::Index t = 0; t < src.phi.rows(); ++t)
                topic_labels.push_back("t" + std::to_string(t));
            Scatterplot topic_plot;
            if (job.dr.name == "mds")
                topic_plot = layout_mds(cosine_dissimilarity(src.phi), job.dr, topic_labels).plot;
            else if (job.dr.name == "som") {
                EmbeddedCorpus topics{src.phi, Dissimilarity::cosine, src.info, topic_labels};
                topic_plot = layout_som(topics, job.dr).plot;
            } else {
                topic_plot = layout_tsne(cosine_dissimilarity(src.phi), job.dr, topic_labels).plot;
            }
            plot = convex_combination_layout(src.theta, topic_plot.points, src.labels);
            for (const auto& kv : topic_plot.provenance) plot.provenance.emplace(kv.first, kv.second);
        }
        plot.provenance["corpus"] = job.corpus_id;
        plot.provenance["jitter_lambda"] = format_real(job.lambda);
        plot.provenance["jitter_seed"] = std::to_string(config.jitter_seed);
        plot.provenance["embedding"] = job.embedding_name;
        canonicalize_points(plot.points);
        return plot;
    };

    std::vector<std::optional<Scatterplot>> plots(jobs.size());
    std::vector<std::string> job_errors(jobs.size());
    parallel_for(opts.workers, jobs.size(), [&](std::size_t i) {
        try {
            if (use_cache) {
                std::filesystem::path cp = cache_path(jobs[i]);
                if (std::filesystem::exists(cp)) {
                    plots[i] = load_scatterplot(cp);
                    return;
                }
                Scatterplot plot = compute_layout(jobs[i]);
                save_scatterplot(plot, cp);
                plots[i] = std::move(plot);
            } else {
                plots[i] = compute_layout(jobs[i]);
            }
        } catch (const std::exception& e) {
            job_errors[i] = e.what();
        }
    });

    std::size_t ok_count = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (plots[i]) {
            ++ok_count;
            continue;
        }
        if (opts.log) *opts.log << "layout skipped: " << jobs[i].key() << ": " << job_errors[i] << "\n";
    }
    if (ok_count == 0) throw ComputeError("study: all layout jobs failed");

    std::vector<std::optional<SimilarityRecord>> built(pairings.size());
    std::vector<std::string> pairing_errors(pairings.size());
    parallel_for(opts.workers, pairings.size(), [&](std::size_t i) {
        const PairingSpec& p = pairings[i];
        if (!plots[p.job_a] || !plots[p.job_b]) return;
        const LayoutJob& ja = jobs[p.job_a];
        const LayoutJob& jb = jobs[p.job_b];
        try {
            SimilarityRecord rec = compare(*plots[p.job_a], *plots[p.job_b], config.k_neighbors);
            if (kind == StabilityKind::input_data) {
                const std::string& weighting = config.embeddings[jb.embedding_index].weighting;
                auto key = std::make_tuple(jb.corpus_index, jb.lambda_index, weighting);
                auto he = high_errors.find(key);
                if (he != high_errors.end())
                    throw ComputeError("study: high-dimensional comparison failed: " + he->second);
                const HighTriple& high = highs.at(key);
                rec.alpha = (high.alpha && rec.alpha)
                                ? std::optional<double>(adaptability(*high.alpha, *rec.alpha))
                                : std::nullopt;
                rec.beta = (high.beta && rec.beta)
                               ? std::optional<double>(adaptability(*high.beta, *rec.beta))
                               : std::nullopt;
                rec.gamma = (high.gamma && rec.gamma)
                                ? std::optional<double>(adaptability(*high.gamma, *rec.gamma))
                                : std::nullopt;
            }
            rec.pair_id = hash_hex(ja.neutral_key() + "||" + jb.neutral_key());
            rec.corpus = ja.corpus_id;
            rec.embedding = ja.embedding_name;
            rec.dr = ja.dr.name;
            rec.varied_factor = p.varied_factor;
            rec.value_a = p.value_a;
            rec.value_b = p.value_b;
            built[i] = std::move(rec);
        } catch (const std::exception& e) {
            pairing_errors[i] = e.what();
        }
    });

    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < pairings.size(); ++i) {
        if (!built[i]) {
            if (opts.log && !pairing_errors[i].empty())
                *opts.log << "comparison skipped: " << jobs[pairings[i].job_a].key() << " vs "
                          << jobs[pairings[i].job_b].key() << ": " << pairing_errors[i] << "\n";
            continue;
        }
        order.emplace_back(jobs[pairings[i].job_a].key() + "||" + jobs[pairings[i].job_b].key() +
                               "||" + pairings[i].varied_factor,
                           i);
    }
    std::sort(order.begin(), order.end());
    std::vector<SimilarityRecord> records;
    records.reserve(order.size());
    for (const auto& [key, i] : order) records.push_back(std::move(*built[i]));
    return records;
}

double binomial_upper_tail(std::size_t m, std::size_t n) {
    if (m < 1) throw InputError("binary_test: needs at least one trial");
    if (n > m) throw InputError("binary_test: successes exceed trials");
    if (n == 0) return 1.0;
    if (m <= 62) {
        unsigned __int128 total = 0;
        unsigned __int128 c = 1;
        for (std::size_t j = 0; j <= m; ++j) {
            if (j >= n) total += c;
            if (j < m) c = c * (m - j) / (j + 1);
        }
        return std::ldexp(static_cast<double>(total), -static_cast<int>(m));
    }
    double log_sum = -std::numeric_limits<double>::infinity();
    for (std::size_t j = n; j <= m; ++j) {
        double t = std::lgamma(static_cast<double>(m) + 1.0) -
                   std::lgamma(static_cast<double>(j) + 1.0) -
                   std::lgamma(static_cast<double>(m - j) + 1.0);
        if (log_sum == -std::numeric_limits<double>::infinity())
            log_sum = t;
        else if (t > log_sum)
            log_sum = t + std::log1p(std::exp(log_sum - t));
        else
            log_sum = log_sum + std::log1p(std::exp(t - log_sum));
    }
    return std::min(1.0, std::exp(log_sum - static_cast<double>(m) * std::log(2.0)));
}

BinaryTestResult binary_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InputError("binary_test: value lists differ in length");
    if (a.empty()) throw InputError("binary_test: needs at least one trial");
    BinaryTestResult r;
    r.m = a.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] > a[i]) ++r.n;
    r.p = binomial_upper_tail(r.m, r.n);
    return r;
}

namespace {

struct VariantValues {
    std::array<std::optional<double>, 3> agg;
};

// Groups records into (variant label, dr, corpus) cells, matches the two
// sides of each pair_id, and runs one binary test per aggregate metric.
std::vector<BinaryTestResult> variant_binary_tests(
    const std::vector<SimilarityRecord>& records, StabilityKind kind, bool per_corpus,
    const std::string& family,
    const std::function<std::optional<std::pair<std::string, int>>(const SimilarityRecord&)>&
        classify) {
    std::map<std::tuple<std::string, std::string, std::string>,
             std::map<std::string, std::array<std::optional<VariantValues>, 2>>>
        cells;
    for (const SimilarityRecord& rec : records) {
        auto cls = classify(rec);
        if (!cls) continue;
        std::string corpus = per_corpus ? rec.corpus : std::string();
        auto& slot = cells[{cls->first, rec.dr, corpus}][rec.pair_id][cls->second];
        if (slot) continue;
        slot = VariantValues{{rec.alpha, rec.beta, rec.gamma}};
    }
    std::vector<BinaryTestResult> out;
    bool any_matched = false;
    for (const auto& [group_key, by_pair] : cells) {
        const auto& [label, dr, corpus] = group_key;
        for (std::size_t mi = 0; mi < 3; ++mi) {
            std::vector<double> a, b;
            for (const auto& [pair_id, sides] : by_pair) {
                if (!sides[0] || !sides[1]) continue;
                const std::optional<double>& va = sides[0]->agg[mi];
                const std::optional<double>& vb = sides[1]->agg[mi];
                if (!va || !vb) continue;
                a.push_back(*va);
                b.push_back(*vb);
            }
            if (a.empty()) continue;
            any_matched = true;
            BinaryTestResult r = binary_test(a, b);
            r.hypothesis =
                family + ":" + label + ":" + dr + ":" + kind_name(kind) + ":" + kAggregateNames[mi];
            if (per_corpus) r.hypothesis += ":" + corpus;
            out.push_back(std::move(r));
        }
    }
    if (!any_matched)
        throw InputError(family + "_study: records contain no matched variant pairs");
    return out;
}

}  // namespace

std::vector<BinaryTestResult> tfidf_binary_tests(const std::vector<SimilarityRecord>& records,
                                                 StabilityKind kind, bool per_corpus) {
    return variant_binary_tests(
        records, kind, per_corpus, "tfidf",
        [](const SimilarityRecord& rec) -> std::optional<std::pair<std::string, int>> {
            std::vector<std::string> parts = split_on(rec.embedding, '-');
            if (parts.size() != 2) return std::nullopt;
            if (parts[1] == "raw") return std::make_pair(parts[0], 0);
            if (parts[1] == "tfidf") return std::make_pair(parts[0], 1);
            return std::nullopt;
        });
}

std::vector<BinaryTestResult> convex_binary_tests(const std::vector<SimilarityRecord>& records,
                                                  StabilityKind kind, bool per_corpus) {
    return variant_binary_tests(
        records, kind, per_corpus, "convex",
        [](const SimilarityRecord& rec) -> std::optional<std::pair<std::string, int>> {
            std::vector<std::string> parts = split_on(rec.embedding, '-');
            if (parts.size() == 2) return std::make_pair(rec.embedding, 0);
            if (parts.size() == 3 && parts[2] == "cc")
                return std::make_pair(parts[0] + "-" + parts[1], 1);
            return std::nullopt;
        });
}

namespace {

const std::string& record_field(const SimilarityRecord& rec, const std::string& name) {
    if (name == "corpus") return rec.corpus;
    if (name == "embedding") return rec.embedding;
    if (name == "dr") return rec.dr;
    if (name == "varied_factor") return rec.varied_factor;
    if (name == "value_a") return rec.value_a;
    if (name == "value_b") return rec.value_b;
    throw InputError("summary: unknown group field '" + name + "'");
}

double quantile_sorted(const std::vector<double>& v, double p) {
    double h = p * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

const std::array<std::optional<double> SimilarityRecord::*, 3> kAggregateFields{
    &SimilarityRecord::alpha, &SimilarityRecord::beta, &SimilarityRecord::gamma};

}  // namespace

std::vector<SummaryRow> distribution_summary(const std::vector<SimilarityRecord>& records,
                                             const std::vector<std::string>& group_by) {
    {
        const SimilarityRecord probe{};
        for (const std::string& f : group_by) record_field(probe, f);
    }
    std::map<std::string, std::vector<const SimilarityRecord*>> groups;
    for (const SimilarityRecord& rec : records) {
        std::string key;
        for (const std::string& f : group_by) {
            if (!key.empty()) key += ";";
            key += f + "=" + record_field(rec, f);
        }
        if (group_by.empty()) key = "all";
        groups[key].push_back(&rec);
    }
    std::vector<SummaryRow> rows;
    for (const auto& [group, members] : groups) {
        for (std::size_t mi = 0; mi < 3; ++mi) {
            std::vector<double> vals;
            for (const SimilarityRecord* rec : members)
                if (rec->*kAggregateFields[mi]) vals.push_back(*(rec->*kAggregateFields[mi]));
            if (vals.empty()) continue;
            std::sort(vals.begin(), vals.end());
            SummaryRow row;
            row.group = group;
            row.metric = kAggregateNames[mi];
            row.min = vals.front();
            row.q1 = quantile_sorted(vals, 0.25);
            row.median = quantile_sorted(vals, 0.5);
            row.q3 = quantile_sorted(vals, 0.75);
            row.max = vals.back();
            double sum = 0;
            for (double v : vals) sum += v;
            row.mean = sum / static_cast<double>(vals.size());
            row.count = vals.size();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

const std::array<std::pair<const char*, std::optional<double> SimilarityRecord::*>, 12>
    kMetricColumns{{
        {"alpha_T", &SimilarityRecord::alpha_T},
        {"alpha_C", &SimilarityRecord::alpha_C},
        {"alpha_MM", &SimilarityRecord::alpha_MM},
        {"alpha_MF", &SimilarityRecord::alpha_MF},
        {"alpha_LC", &SimilarityRecord::alpha_LC},
        {"alpha_LP", &SimilarityRecord::alpha_LP},
        {"beta_PC", &SimilarityRecord::beta_PC},
        {"beta_SC", &SimilarityRecord::beta_SC},
        {"beta_CO", &SimilarityRecord::beta_CO},
        {"gamma_DC", &SimilarityRecord::gamma_DC},
        {"gamma_SC_abs_diff", &SimilarityRecord::gamma_SC_abs_diff},
        {"theta_PA", &SimilarityRecord::theta_PA},
    }};

}  // namespace

CorrelationMatrix metric_correlation_matrix(const std::vector<SimilarityRecord>& records,
                                            std::size_t sample_size, std::uint64_t seed) {
    if (sample_size < 2) throw InputError("metric_correlation: sample size must be at least 2");
    std::vector<std::size_t> complete;
    for (std::size_t i = 0; i < records.size(); ++i) {
        bool ok = true;
        for (const auto& [name, field] : kMetricColumns)
            if (!(records[i].*field)) {
                ok = false;
                break;
            }
        if (ok) complete.push_back(i);
    }
    if (complete.size() < 2)
        throw InputError("metric_correlation: needs at least two complete records");

    std::vector<std::size_t> chosen;
    if (complete.size() <= sample_size) {
        chosen = complete;
    } else {
        std::map<std::string, std::vector<std::size_t>> by_corpus;
        for (std::size_t idx : complete) by_corpus[records[idx].corpus].push_back(idx);
        std::vector<const std::vector<std::size_t>*> group_rows;
        for (const auto& [corpus, rows] : by_corpus) group_rows.push_back(&rows);
        std::size_t n_groups = group_rows.size();
        std::vector<std::size_t> quota(n_groups);
        std::size_t base = sample_size / n_groups;
        std::size_t rem = sample_size % n_groups;
        std::size_t assigned = 0;
        for (std::size_t g = 0; g < n_groups; ++g) {
            quota[g] = std::min(group_rows[g]->size(), base + (g < rem ? 1 : 0));
            assigned += quota[g];
        }
        std::size_t remaining = sample_size - assigned;
        while (remaining > 0) {
            bool progress = false;
            for (std::size_t g = 0; g < n_groups && remaining > 0; ++g) {
                if (quota[g] < group_rows[g]->size()) {
                    ++quota[g];
                    --remaining;
                    progress = true;
                }
            }
            if (!progress) break;
        }
        Rng rng(seed);
        for (std::size_t g = 0; g < n_groups; ++g) {
            std::vector<std::size_t> rows = *group_rows[g];
            for (std::size_t t = 0; t < quota[g]; ++t) {
                std::size_t j =
                    t + static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(rows.size() - t)));
                std::swap(rows[t], rows[j]);
            }
            rows.resize(quota[g]);
            std::sort(rows.begin(), rows.end());
            chosen.insert(chosen.end(), rows.begin(), rows.end());
        }
        std::sort(chosen.begin(), chosen.end());
    }

    CorrelationMatrix out;
    std::vector<std::vector<double>> cols(kMetricColumns.size());
    for (const auto& [name, field] : kMetricColumns) out.names.push_back(name);
    for (std::size_t c = 0; c < kMetricColumns.size(); ++c) {
        cols[c].reserve(chosen.size());
        for (std::size_t idx : chosen) cols[c].push_back(*(records[idx].*kMetricColumns[c].second));
    }
    out.values.assign(cols.size(), std::vector<std::optional<double>>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        for (std::size_t j = i; j < cols.size(); ++j) {
            std::optional<double> r = pearson_or_absent(cols[i], cols[j]);
            out.values[i][j] = r;
            out.values[j][i] = r;
        }
    return out;
}

namespace {

const char* kRecordsHeader =
    "pair_id,corpus,embedding,dr,varied_factor,value_a,value_b,alpha_T,alpha_C,alpha_MM,alpha_MF,"
    "alpha_LC,alpha_LP,beta_PC,beta_SC,beta_CO,gamma_DC,gamma_SC_abs_diff,theta_PA,alpha,beta,"
    "gamma";

void check_csv_field(const std::string& s) {
    for (char ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r')
            throw InputError("csv: field '" + s + "' contains a delimiter");
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_real(s);
}

const std::array<std::optional<double> SimilarityRecord::*, 15> kRecordNumbers{
    &SimilarityRecord::alpha_T,  &SimilarityRecord::alpha_C,
    &SimilarityRecord::alpha_MM, &SimilarityRecord::alpha_MF,
    &SimilarityRecord::alpha_LC, &SimilarityRecord::alpha_LP,
    &SimilarityRecord::beta_PC,  &SimilarityRecord::beta_SC,
    &SimilarityRecord::beta_CO,  &SimilarityRecord::gamma_DC,
    &SimilarityRecord::gamma_SC_abs_diff, &SimilarityRecord::theta_PA,
    &SimilarityRecord::alpha,    &SimilarityRecord::beta,
    &SimilarityRecord::gamma};

}  // namespace

std::string records_to_csv(const std::vector<SimilarityRecord>& records) {
    std::string out = kRecordsHeader;
    out += "\n";
    for (const SimilarityRecord& rec : records) {
        const std::array<const std::string*, 7> strings{&rec.pair_id, &rec.corpus, &rec.embedding,
                                                        &rec.dr,      &rec.varied_factor,
                                                        &rec.value_a, &rec.value_b};
        std::string line;
        for (const std::string* s : strings) {
            check_csv_field(*s);
            if (!line.empty()) line += ",";
            line += *s;
        }
        for (const auto field : kRecordNumbers) {
            line += ",";
            line += opt_field(rec.*field);
        }
        out += line;
        out += "\n";
    }
    return out;
}

void write_records_csv(const std::vector<SimilarityRecord>& records,
                       const std::filesystem::path& p) {
    write_text(p, records_to_csv(records));
}

std::vector<SimilarityRecord> parse_records_csv(const std::filesystem::path& p) {
    std::vector<std::string> lines = read_lines(p);
    if (lines.empty() || lines[0] != kRecordsHeader)
        throw InputError("records_csv: missing or unexpected header in " + p.string());
    std::vector<SimilarityRecord> records;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        std::vector<std::string> fields = split_on(lines[li], ',');
        if (fields.size() != 22)
            throw InputError("records_csv: line " + std::to_string(li + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected 22");
        SimilarityRecord rec;
        rec.pair_id = fields[0];
        rec.corpus = fields[1];
        rec.embedding = fields[2];
        rec.dr = fields[3];
        rec.varied_factor = fields[4];
        rec.value_a = fields[5];
        rec.value_b = fields[6];
        for (std::size_t fi = 0; fi < kRecordNumbers.size(); ++fi)
            rec.*kRecordNumbers[fi] = parse_opt(fields[7 + fi]);
        records.push_back(std::move(rec));
    }
    return records;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "group,metric,min,q1,median,q3,max,mean,count\n";
    for (const SummaryRow& r : rows) {
        check_csv_field(r.group);
        out += r.group + "," + r.metric + "," + format_real(r.min) + "," + format_real(r.q1) + "," +
               format_real(r.median) + "," + format_real(r.q3) + "," + format_real(r.max) + "," +
               format_real(r.mean) + "," + std::to_string(r.count) + "\n";
    }
    return out;
}

std::string binary_tests_to_csv(const std::vector<BinaryTestResult>& results) {
    std::string out = "hypothesis,m,n,p\n";
    for (const BinaryTestResult& r : results) {
        check_csv_field(r.hypothesis);
        out += r.hypothesis + "," + std::to_string(r.m) + "," + std::to_string(r.n) + "," +
               format_real(r.p) + "\n";
    }
    return out;
}

std::string correlation_to_csv(const CorrelationMatrix& matrix) {
    std::string out = "metric";
    for (const std::string& n : matrix.names) out += "," + n;
    out += "\n";
    for (std::size_t i = 0; i < matrix.names.size(); ++i) {
        out += matrix.names[i];
        for (std::size_t j = 0; j < matrix.names.size(); ++j) out += "," + opt_field(matrix.values[i][j]);
        out += "\n";
    }
    return out;
}

}  // namespace corpusmap
