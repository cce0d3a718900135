#include "corpusmap/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "corpusmap/errors.hpp"

namespace corpusmap {

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

double parse_real(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InputError("io: malformed real value '" + s + "'");
    return v;
}

std::string format_count(std::uint64_t v) { return std::to_string(v); }

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string hash_hex(const std::string& s) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(s);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("io: cannot open '" + p.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_text(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("io: cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw InputError("io: short write to '" + p.string() + "'");
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) parts.push_back(tok);
    return parts;
}

std::uint64_t parse_count(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InputError(std::string("io: malformed ") + what + " '" + s + "'");
    return v;
}

}  // namespace

void save_dtm(const SparseDtm& dtm, const std::filesystem::path& p) {
    dtm.validate();
    std::ostringstream out;
    out << dtm.n_docs << ' ' << dtm.n_terms << ' ' << dtm.n_categories() << '\n';
    for (const auto& e : dtm.entries) out << e.doc << ' ' << e.term << ' ' << e.freq << '\n';
    for (const auto& l : dtm.labels) out << l << '\n';
    write_text(p, out.str());
}

SparseDtm load_dtm(const std::filesystem::path& p) {
    std::vector<std::string> lines = read_lines(p);
    if (lines.empty()) throw InputError("io: empty DTM file '" + p.string() + "'");
    auto header = split_ws(lines[0]);
    if (header.size() != 3) throw InputError("io: DTM header must be 'N n k'");

    SparseDtm dtm;
    dtm.n_docs = parse_count(header[0], "document count");
    dtm.n_terms = parse_count(header[1], "term count");
    std::uint64_t k = parse_count(header[2], "category count");

    if (lines.size() < 1 + dtm.n_docs)
        throw InputError("io: DTM file truncated before label block");
    std::size_t n_entries = lines.size() - 1 - dtm.n_docs;
    for (std::size_t i = 0; i < n_entries; ++i) {
        auto parts = split_ws(lines[1 + i]);
        if (parts.size() != 3) throw InputError("io: malformed DTM entry line");
        DtmEntry e;
        e.doc = static_cast<std::uint32_t>(parse_count(parts[0], "doc index"));
        e.term = static_cast<std::uint32_t>(parse_count(parts[1], "term index"));
        e.freq = parse_count(parts[2], "frequency");
        dtm.entries.push_back(e);
    }
    for (std::size_t i = 0; i < dtm.n_docs; ++i)
        dtm.labels.push_back(lines[1 + n_entries + i]);

    dtm.validate();
    if (dtm.n_categories() != k)
        throw InputError("io: DTM header category count " + std::to_string(k) +
                         " does not match labels (" + std::to_string(dtm.n_categories()) + ")");
    return dtm;
}

void save_embedding(const EmbeddedCorpus& corpus, const std::filesystem::path& p) {
    std::ostringstream out;
    out << corpus.vectors.rows() << ' ' << corpus.vectors.cols() << ' '
        << (corpus.info.method.empty() ? "unknown" : corpus.info.method) << ' '
        << (corpus.info.weighting.empty() ? "raw" : corpus.info.weighting) << ' '
        << corpus.info.k_topics << '\n';
    for (Eigen::Index i = 0; i < corpus.vectors.rows(); ++i) {
        for (Eigen::Index j = 0; j < corpus.vectors.cols(); ++j) {
            if (j) out << ' ';
            out << format_real(corpus.vectors(i, j));
        }
        out << '\n';
    }
    write_text(p, out.str());
}

namespace {

Eigen::MatrixXd parse_dense_rows(const std::vector<std::string>& lines, std::size_t first,
                                 std::size_t rows, std::size_t cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (first + i >= lines.size()) throw InputError("io: dense matrix file truncated");
        auto parts = split_ws(lines[first + i]);
        if (parts.size() != cols)
            throw InputError("io: dense row has " + std::to_string(parts.size()) +
                             " values, expected " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_real(parts[j]);
    }
    return m;
}

}  // namespace

EmbeddedCorpus load_embedding(const std::filesystem::path& p) {
    std::vector<std::string> lines = read_lines(p);
    if (lines.empty()) throw InputError("io: empty embedding file '" + p.string() + "'");
    auto header = split_ws(lines[0]);
    if (header.size() != 5) throw InputError("io: embedding header must be 'N D name weighting K'");
    std::size_t n = parse_count(header[0], "row count");
    std::size_t d = parse_count(header[1], "column count");

    EmbeddedCorpus c;
    c.info.method = header[2];
    c.info.weighting = header[3];
    c.info.k_topics = parse_count(header[4], "topic count");
    c.vectors = parse_dense_rows(lines, 1, n, d);
    c.dissimilarity = Dissimilarity::cosine;
    return c;
}

void save_dense(const Eigen::MatrixXd& m, const std::string& name, const std::string& weighting,
                std::size_t k, const std::filesystem::path& p) {
    EmbeddedCorpus c;
    c.vectors = m;
    c.info = {name, weighting, k};
    save_embedding(c, p);
}

Eigen::MatrixXd load_dense(const std::filesystem::path& p) { return load_embedding(p).vectors; }

std::string scatterplot_to_string(const Scatterplot& plot) {
    if (static_cast<std::size_t>(plot.points.rows()) != plot.labels.size())
        throw InputError("io: scatterplot labels do not match point count");
    std::ostringstream out;
    out << plot.points.rows() << '\n';
    for (const auto& [key, value] : plot.provenance) out << "# " << key << '=' << value << '\n';
    for (Eigen::Index i = 0; i < plot.points.rows(); ++i)
        out << format_real(plot.points(i, 0)) << ' ' << format_real(plot.points(i, 1)) << ' '
            << plot.labels[static_cast<std::size_t>(i)] << '\n';
    return out.str();
}

void save_scatterplot(const Scatterplot& plot, const std::filesystem::path& p) {
    write_text(p, scatterplot_to_string(plot));
}

Scatterplot load_scatterplot(const std::filesystem::path& p) {
    std::vector<std::string> lines = read_lines(p);
    if (lines.empty()) throw InputError("io: empty scatterplot file '" + p.string() + "'");
    std::size_t n = parse_count(split_ws(lines[0]).at(0), "point count");

    Scatterplot plot;
    std::size_t row = 1;
    while (row < lines.size() && !lines[row].empty() && lines[row][0] == '#') {
        std::string body = lines[row].substr(1);
        if (!body.empty() && body[0] == ' ') body.erase(0, 1);
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw InputError("io: malformed provenance line '" + lines[row] + "'");
        plot.provenance[body.substr(0, eq)] = body.substr(eq + 1);
        ++row;
    }

    plot.points.resize(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (row + i >= lines.size()) throw InputError("io: scatterplot file truncated");
        const std::string& line = lines[row + i];
        auto s1 = line.find(' ');
        auto s2 = line.find(' ', s1 == std::string::npos ? s1 : s1 + 1);
        if (s1 == std::string::npos || s2 == std::string::npos)
            throw InputError("io: malformed scatterplot row '" + line + "'");
        plot.points(static_cast<Eigen::Index>(i), 0) = parse_real(line.substr(0, s1));
        plot.points(static_cast<Eigen::Index>(i), 1) = parse_real(line.substr(s1 + 1, s2 - s1 - 1));
        plot.labels.push_back(line.substr(s2 + 1));
    }
    return plot;
}

}  // namespace corpusmap
