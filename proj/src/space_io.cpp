#include "pspace/space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pspace {

double distance(const PerceptualSpace& space, int32_t item_a, int32_t item_b) {
    if (item_a < 0 || item_a >= space.n_items() || item_b < 0 || item_b >= space.n_items())
        throw std::out_of_range("invalid item index");
    auto a = space.item_row(item_a);
    auto b = space.item_row(item_b);
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        double diff = a[k] - b[k];
        s += diff * diff;
    }
    return std::sqrt(s);
}

std::vector<std::pair<int32_t, double>> nearest_neighbors(const PerceptualSpace& space,
                                                          int32_t item, int k) {
    if (item < 0 || item >= space.n_items()) throw std::out_of_range("invalid item index");
    if (k < 1 || k >= space.n_items())
        throw std::runtime_error("k must be in [1, n_items-1], got " + std::to_string(k));
    std::vector<std::pair<int32_t, double>> all;
    all.reserve(space.n_items() - 1);
    for (int32_t m = 0; m < space.n_items(); ++m) {
        if (m == item) continue;
        all.emplace_back(m, distance(space, item, m));
    }
    std::partial_sort(all.begin(), all.begin() + k, all.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second < y.second : x.first < y.first;
    });
    all.resize(k);
    return all;
}

namespace {

const char* kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Euclidean: return "euclidean";
        case ModelKind::Svd: return "svd";
        case ModelKind::Lsi: return "lsi";
    }
    throw std::runtime_error("unknown model kind");
}

ModelKind kind_from_name(const std::string& s) {
    if (s == "euclidean") return ModelKind::Euclidean;
    if (s == "svd") return ModelKind::Svd;
    if (s == "lsi") return ModelKind::Lsi;
    throw std::runtime_error("unknown model kind '" + s + "'");
}

// Shortest-round-trip decimal encoding: %.17g always reconstructs the
// same double.
void append_double(std::string& out, double v) {
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, n);
}

double parse_double(const std::string& s, const std::string& path, int64_t line) {
    double v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error(path + ":" + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::vector<std::string> tabs(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

} // namespace

void save_space(const PerceptualSpace& space, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    std::string buf;
    buf += (space.kind == ModelKind::Lsi) ? "MSPACE\t1\n" : "PSPACE\t1\n";
    buf += "meta\t";
    buf += kind_name(space.kind);
    buf += '\t';
    buf += std::to_string(space.d);
    buf += '\t';
    append_double(buf, space.mu);
    buf += '\t';
    buf += std::to_string(space.n_items());
    buf += '\t';
    buf += std::to_string(space.n_users());
    buf += '\n';
    auto write_rows = [&](const char* tag, const IdTable& ids, const std::vector<double>& coords,
                          const std::vector<double>& bias) {
        for (int32_t i = 0; i < ids.size(); ++i) {
            buf += tag;
            buf += '\t';
            buf += ids.name(i);
            buf += '\t';
            append_double(buf, bias[i]);
            for (int k = 0; k < space.d; ++k) {
                buf += '\t';
                append_double(buf, coords[static_cast<size_t>(i) * space.d + k]);
            }
            buf += '\n';
        }
    };
    write_rows("item", space.items, space.item_coords, space.item_bias);
    write_rows("user", space.users, space.user_coords, space.user_bias);
    out << buf;
    if (!out) throw std::runtime_error("write failed for " + path);
}

PerceptualSpace load_space(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    int64_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) throw std::runtime_error(path + ": empty file");
    auto header = tabs(line);
    if (header.size() != 2 || (header[0] != "PSPACE" && header[0] != "MSPACE"))
        throw std::runtime_error(path + ":1: not a space file");
    if (header[1] != "1")
        throw std::runtime_error(path + ": unsupported space file version '" + header[1] + "'");

    if (!next_line()) throw std::runtime_error(path + ": truncated before meta line");
    auto meta = tabs(line);
    if (meta.size() != 6 || meta[0] != "meta")
        throw std::runtime_error(path + ":2: malformed meta line");

    PerceptualSpace space;
    space.kind = kind_from_name(meta[1]);
    space.d = static_cast<int>(parse_double(meta[2], path, lineno));
    space.mu = parse_double(meta[3], path, lineno);
    int32_t nm = static_cast<int32_t>(parse_double(meta[4], path, lineno));
    int32_t nu = static_cast<int32_t>(parse_double(meta[5], path, lineno));
    if (space.d < 1 || nm < 0 || nu < 0)
        throw std::runtime_error(path + ":2: invalid shape in meta line");
    if ((header[0] == "MSPACE") != (space.kind == ModelKind::Lsi))
        throw std::runtime_error(path + ":2: header tag disagrees with model kind");

    space.item_coords.reserve(static_cast<size_t>(nm) * space.d);
    space.user_coords.reserve(static_cast<size_t>(nu) * space.d);
    auto read_rows = [&](const char* tag, int32_t count, IdTable& ids, std::vector<double>& coords,
                         std::vector<double>& bias) {
        for (int32_t i = 0; i < count; ++i) {
            if (!next_line())
                throw std::runtime_error(path + ":" + std::to_string(lineno + 1) +
                                         ": truncated, expected " + tag + " row");
            auto f = tabs(line);
            if (f.size() != static_cast<size_t>(space.d) + 3 || f[0] != tag)
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed " +
                                         tag + " row (shape mismatch)");
            if (ids.intern(f[1]) != i)
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate id '" +
                                         f[1] + "'");
            bias.push_back(parse_double(f[2], path, lineno));
            for (int k = 0; k < space.d; ++k)
                coords.push_back(parse_double(f[3 + k], path, lineno));
        }
    };
    read_rows("item", nm, space.items, space.item_coords, space.item_bias);
    read_rows("user", nu, space.users, space.user_coords, space.user_bias);
    if (next_line() && !line.empty())
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing content");
    return space;
}

} // namespace pspace
