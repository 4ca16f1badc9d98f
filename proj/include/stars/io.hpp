#pragma once

// File formats (dense matrices, weighted sets, labels, partitions, edge
// lists) and the synthetic Gaussian-mixture generator. Text formats are the
// default for inspectability; dense data can also travel as little-endian
// float32 behind a flag.

#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stars/cluster.hpp"
#include "stars/core.hpp"
#include "stars/rng.hpp"

namespace stars {

struct MixtureSpec {
    std::size_t n = 1000;
    std::size_t dim = 100;
    std::size_t modes = 100;
    double sigma = 0.1;
    std::uint64_t seed = 0;
};

// One Gaussian per mode, mean at the mode's standard basis vector. Each
// point draws its mode uniformly and adds per-coordinate noise, all from a
// per-point seeded stream, so generation order is irrelevant.
inline Dataset gen_gaussian_mixture(const MixtureSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("n must be positive");
    if (spec.modes == 0 || spec.modes > spec.dim)
        throw std::invalid_argument("modes must lie in [1, dim]");
    Dataset ds;
    ds.dim = spec.dim;
    ds.dense.assign(spec.n * spec.dim, 0.0);
    ds.labels.assign(spec.n, 0);
    ds.label_names.reserve(spec.modes);
    for (std::size_t m = 0; m < spec.modes; ++m) ds.label_names.push_back(std::to_string(m));
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::uint64_t point_key =
            key_combine(key_combine(spec.seed, tag::datagen), i);
        SplitMix rng(point_key);
        const std::size_t mode = static_cast<std::size_t>(rng.below(spec.modes));
        ds.labels[i] = static_cast<std::uint32_t>(mode);
        double* row = ds.dense.data() + i * spec.dim;
        for (std::size_t j = 0; j < spec.dim; ++j) {
            const double noise =
                spec.sigma == 0.0
                    ? 0.0
                    : spec.sigma * normal_from_key(key_combine(point_key, j + 1));
            row[j] = (j == mode ? 1.0 : 0.0) + noise;
        }
    }
    return ds;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line,
                                    const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline double parse_real(const char* s, const char** end) {
    errno = 0;
    char* e = nullptr;
    const double v = std::strtod(s, &e);
    if (e == s || errno == ERANGE) throw std::invalid_argument("bad real");
    *end = e;
    return v;
}

// Bytes legal in our own text payloads; anything else marks binary data.
inline bool text_payload_byte(unsigned char c) {
    return std::isdigit(c) || c == ' ' || c == '\n' || c == '\r' || c == '\t' ||
           c == '.' || c == '+' || c == '-' || c == 'e' || c == 'E' ||
           c == 'n' || c == 'a' || c == 'i' || c == 'f';  // nan/inf spellings
}

}  // namespace detail

// Header line "n d", then either one point per line of d space-separated
// reals, or (binary flavor) n*d little-endian float32 words. The loader
// tells them apart by payload bytes.
inline Dataset load_dense(const std::string& path) {
    const std::string blob = detail::read_file(path);
    if (blob.empty()) throw std::runtime_error(path + ": empty file");
    const std::size_t header_end = blob.find('\n');
    if (header_end == std::string::npos) detail::parse_fail(path, 1, "missing header");
    std::size_t n = 0, d = 0;
    {
        std::istringstream head(blob.substr(0, header_end));
        if (!(head >> n >> d) || n == 0 || d == 0)
            detail::parse_fail(path, 1, "header must be two positive integers: n d");
        std::string rest;
        if (head >> rest) detail::parse_fail(path, 1, "header must be two positive integers: n d");
    }
    Dataset ds;
    ds.dim = d;
    ds.dense.reserve(n * d);
    const char* payload = blob.data() + header_end + 1;
    const std::size_t payload_size = blob.size() - header_end - 1;

    // The binary flavor has exactly 4*n*d payload bytes. A text payload of
    // that same size is conceivable, so confirm by content: our text writer
    // only ever emits numeric characters, while float words hit other bytes
    // within the first handful of values.
    bool binary = payload_size == 4 * n * d;
    if (binary) {
        bool all_text = true;
        for (std::size_t i = 0; i < std::min<std::size_t>(payload_size, 4096); ++i)
            if (!detail::text_payload_byte(static_cast<unsigned char>(payload[i]))) {
                all_text = false;
                break;
            }
        binary = !all_text;
    }
    if (binary) {
        for (std::size_t i = 0; i < n * d; ++i) {
            float v;
            std::memcpy(&v, payload + 4 * i, 4);
            ds.dense.push_back(static_cast<double>(v));
        }
        return ds;
    }

    const char* cur = payload;
    const char* end = blob.data() + blob.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t line_no = i + 2;
        for (std::size_t j = 0; j < d; ++j) {
            while (cur < end && (*cur == ' ' || *cur == '\t')) ++cur;
            if (cur >= end || *cur == '\n')
                detail::parse_fail(path, line_no, "expected " + std::to_string(d) + " values");
            try {
                const char* next = nullptr;
                ds.dense.push_back(detail::parse_real(cur, &next));
                cur = next;
            } catch (const std::invalid_argument&) {
                detail::parse_fail(path, line_no, "malformed real value");
            }
        }
        while (cur < end && (*cur == ' ' || *cur == '\t' || *cur == '\r')) ++cur;
        if (cur < end) {
            if (*cur != '\n') detail::parse_fail(path, line_no, "trailing garbage");
            ++cur;
        }
    }
    while (cur < end && std::isspace(static_cast<unsigned char>(*cur))) ++cur;
    if (cur < end) detail::parse_fail(path, n + 2, "more rows than the header declares");
    return ds;
}

// %.17g keeps doubles bit-exact through a text round trip.
inline void save_dense(const std::string& path, const Dataset& ds, bool binary = false) {
    if (!ds.has_dense()) throw std::invalid_argument("dataset has no dense payload");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    const std::size_t n = ds.size();
    std::fprintf(f, "%zu %zu\n", n, ds.dim);
    if (binary) {
        std::vector<float> row(ds.dim);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < ds.dim; ++j)
                row[j] = static_cast<float>(ds.dense[i * ds.dim + j]);
            std::fwrite(row.data(), 4, ds.dim, f);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < ds.dim; ++j)
                std::fprintf(f, j ? " %.17g" : "%.17g", ds.dense[i * ds.dim + j]);
            std::fputc('\n', f);
        }
    }
    std::fclose(f);
}

// One point per line: tab-separated token:weight entries. Tokens may not
// contain tabs; the last colon separates token from weight. A blank line is
// an empty set.
inline Dataset load_weighted_sets(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    Dataset ds;
    std::map<std::string, std::uint32_t> intern;
    std::string line;
    std::size_t line_no = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        any = true;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::pair<std::uint32_t, double>> set;
        std::size_t start = 0;
        while (start < line.size()) {
            std::size_t stop = line.find('\t', start);
            if (stop == std::string::npos) stop = line.size();
            const std::string entry = line.substr(start, stop - start);
            start = stop + 1;
            if (entry.empty()) detail::parse_fail(path, line_no, "empty entry");
            const std::size_t colon = entry.rfind(':');
            if (colon == std::string::npos || colon == 0)
                detail::parse_fail(path, line_no, "expected token:weight");
            const std::string token = entry.substr(0, colon);
            double weight = 0.0;
            try {
                const char* e = nullptr;
                const char* s = entry.c_str() + colon + 1;
                weight = detail::parse_real(s, &e);
                if (*e != '\0') throw std::invalid_argument("bad real");
            } catch (const std::invalid_argument&) {
                detail::parse_fail(path, line_no, "malformed weight");
            }
            if (!(weight > 0.0)) detail::parse_fail(path, line_no, "weights must be positive");
            auto [it, fresh] = intern.try_emplace(
                token, static_cast<std::uint32_t>(ds.vocab.size()));
            if (fresh) ds.vocab.push_back(token);
            set.emplace_back(it->second, weight);
        }
        std::sort(set.begin(), set.end());
        for (std::size_t i = 1; i < set.size(); ++i)
            if (set[i].first == set[i - 1].first)
                detail::parse_fail(path, line_no, "duplicate token");
        ds.sets.push_back(std::move(set));
    }
    if (!any) throw std::runtime_error(path + ": empty file");
    ds.vocab_digest.reserve(ds.vocab.size());
    for (const std::string& t : ds.vocab) {
        // FNV-1a over the token bytes
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : t) h = (h ^ c) * 0x100000001B3ULL;
        ds.vocab_digest.push_back(mix64(h));
    }
    return ds;
}

inline void save_weighted_sets(const std::string& path, const Dataset& ds) {
    if (!ds.has_sets()) throw std::invalid_argument("dataset has no set payload");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    for (const auto& set : ds.sets) {
        bool first = true;
        for (const auto& [vid, w] : set) {
            std::fprintf(f, "%s%s:%.17g", first ? "" : "\t", ds.vocab[vid].c_str(), w);
            first = false;
        }
        std::fputc('\n', f);
    }
    std::fclose(f);
}

// Lines of "<point_id>\t<label>", ids dense in [0, n).
inline std::pair<std::vector<std::uint32_t>, std::vector<std::string>> load_labels(
    const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::map<std::uint64_t, std::string> by_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) detail::parse_fail(path, line_no, "expected id<TAB>label");
        char* end = nullptr;
        const std::uint64_t id = std::strtoull(line.c_str(), &end, 10);
        if (end != line.c_str() + tab) detail::parse_fail(path, line_no, "malformed point id");
        if (!by_id.emplace(id, line.substr(tab + 1)).second)
            detail::parse_fail(path, line_no, "duplicate point id");
    }
    if (by_id.empty()) throw std::runtime_error(path + ": empty file");
    std::vector<std::uint32_t> labels(by_id.size());
    std::vector<std::string> names;
    std::map<std::string, std::uint32_t> intern;
    for (const auto& [id, name] : by_id) {
        if (id >= by_id.size())
            throw std::runtime_error(path + ": point ids must be dense from 0");
        auto [it, fresh] = intern.try_emplace(name, static_cast<std::uint32_t>(names.size()));
        if (fresh) names.push_back(name);
        labels[id] = it->second;
    }
    return {std::move(labels), std::move(names)};
}

inline void save_labels(const std::string& path, const Dataset& ds) {
    if (ds.labels.size() != ds.size()) throw std::invalid_argument("dataset has no labels");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        std::fprintf(f, "%zu\t%s\n", i, ds.label_names[ds.labels[i]].c_str());
    std::fclose(f);
}

// Lines of "<point_id>\t<cluster_id>".
inline Partition load_partition(const std::string& path) {
    const auto [ids, names] = load_labels(path);
    Partition part;
    part.assignment = ids;
    part.cluster_count = static_cast<std::uint32_t>(names.size());
    return part;
}

inline void save_partition(const std::string& path, const Partition& part) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < part.assignment.size(); ++i)
        std::fprintf(f, "%zu\t%u\n", i, part.assignment[i]);
    std::fclose(f);
}

// Edge list "<a>\t<b>\t<weight>", a < b, sorted by (a, b), weight printed
// with six decimals.
inline void save_graph(const std::string& path, const SimilarityGraph& g) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    for (const Edge& e : g.edges) std::fprintf(f, "%u\t%u\t%.6f\n", e.a, e.b, e.weight);
    std::fclose(f);
}

inline std::string graph_to_string(const SimilarityGraph& g) {
    std::string out;
    char buf[96];
    for (const Edge& e : g.edges) {
        const int len = std::snprintf(buf, sizeof buf, "%u\t%u\t%.6f\n", e.a, e.b, e.weight);
        out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

inline SimilarityGraph load_graph(const std::string& path, std::size_t n = 0) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    SimilarityGraph g;
    std::string line;
    std::size_t line_no = 0;
    PointId max_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::uint64_t a, b;
        double w;
        char* cur = nullptr;
        a = std::strtoull(line.c_str(), &cur, 10);
        if (*cur != '\t') detail::parse_fail(path, line_no, "expected a<TAB>b<TAB>weight");
        b = std::strtoull(cur + 1, &cur, 10);
        if (*cur != '\t') detail::parse_fail(path, line_no, "expected a<TAB>b<TAB>weight");
        try {
            const char* e = nullptr;
            w = detail::parse_real(cur + 1, &e);
        } catch (const std::invalid_argument&) {
            detail::parse_fail(path, line_no, "malformed weight");
        }
        if (a >= b) detail::parse_fail(path, line_no, "edges must satisfy a < b");
        g.edges.push_back({static_cast<PointId>(a), static_cast<PointId>(b), w});
        max_id = std::max<PointId>(max_id, static_cast<PointId>(b));
    }
    g.n = n > 0 ? n : (g.edges.empty() ? 0 : max_id + 1);
    for (const Edge& e : g.edges)
        if (e.b >= g.n) throw std::runtime_error(path + ": endpoint exceeds point count");
    return g;
}

// Order-insensitive content digest used by run manifests.
inline std::uint64_t fingerprint(const Dataset& ds) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const auto fold = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h = (h ^ (v & 0xFF)) * 0x100000001B3ULL;
            v >>= 8;
        }
    };
    fold(ds.size());
    fold(ds.dim);
    std::uint64_t bits = 0;
    for (double v : ds.dense) {
        std::memcpy(&bits, &v, 8);
        fold(bits);
    }
    for (const auto& set : ds.sets) {
        fold(set.size());
        for (const auto& [vid, w] : set) {
            fold(ds.vocab_digest[vid]);
            std::memcpy(&bits, &w, 8);
            fold(bits);
        }
    }
    for (std::uint32_t l : ds.labels) fold(l);
    return h;
}

}  // namespace stars
