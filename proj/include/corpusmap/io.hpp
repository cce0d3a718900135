#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "corpusmap/corpus.hpp"
#include "corpusmap/embed.hpp"
#include "corpusmap/layout.hpp"

namespace corpusmap {

// All real values in text formats carry 9 significant digits so golden files
// are portable.
std::string format_real(double v);
double parse_real(const std::string& s);
std::string format_count(std::uint64_t v);

// FNV-1a over a string, hex-encoded; stable across platforms. Used for cache
// filenames and pair ids.
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(const std::string& s);

// Whole file as lines (LF endings, UTF-8 passthrough). Throws InputError when
// unreadable.
std::vector<std::string> read_lines(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& content);

// DTM file: header "N n k", one "doc term freq" line per nonzero, then N
// label lines.
void save_dtm(const SparseDtm& dtm, const std::filesystem::path& p);
SparseDtm load_dtm(const std::filesystem::path& p);

// Embedding file: header "N D name weighting K", then N rows of D reals.
// Labels are not part of the format.
void save_embedding(const EmbeddedCorpus& corpus, const std::filesystem::path& p);
EmbeddedCorpus load_embedding(const std::filesystem::path& p);

// Dense matrix in the embedding row format, used for topic factor exports.
void save_dense(const Eigen::MatrixXd& m, const std::string& name, const std::string& weighting,
                std::size_t k, const std::filesystem::path& p);
Eigen::MatrixXd load_dense(const std::filesystem::path& p);

// Scatterplot file: header "N", provenance as "# key=value" lines (sorted by
// key), then N rows "x y label".
void save_scatterplot(const Scatterplot& plot, const std::filesystem::path& p);
Scatterplot load_scatterplot(const std::filesystem::path& p);
std::string scatterplot_to_string(const Scatterplot& plot);

}  // namespace corpusmap
