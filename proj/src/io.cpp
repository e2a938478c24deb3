// SPDX-License-Identifier: Apache-2.0
#include "matweight/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "matweight/error.hpp"

namespace matweight {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

namespace {

const json& field(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object()) throw InputError(ctx + ": expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(ctx + "." + key + ": missing");
    return *it;
}

int integer(const json& j, const std::string& ctx) {
    if (!j.is_number_integer()) throw InputError(ctx + ": expected an integer");
    return j.get<int>();
}

double number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw InputError(ctx + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InputError(ctx + ": value is not finite");
    return v;
}

void check_kind(const json& j, const char* kind, const std::string& ctx) {
    const json& k = field(j, "kind", ctx);
    if (!k.is_string() || k.get<std::string>() != kind) {
        throw InputError(ctx + ".kind: expected \"" + std::string(kind) + "\"");
    }
}

int dimension(const json& j, const std::string& ctx) {
    const int d = integer(field(j, "dim", ctx), ctx + ".dim");
    if (d <= 0 || d > 16) throw InputError(ctx + ".dim: must be in [1, 16]");
    return d;
}

int depth_of(const json& j, const std::string& ctx) {
    const int n = integer(field(j, "depth", ctx), ctx + ".depth");
    if (n < 0 || n > kMaxDepth) throw InputError(ctx + ".depth: must be in [0, " + std::to_string(kMaxDepth) + "]");
    return n;
}

// Flat row-major d*d array or nested d arrays of d numbers.
Matrix matrix(const json& j, int d, const std::string& ctx) {
    std::vector<double> a;
    if (!j.is_array()) throw InputError(ctx + ": expected an array");
    if (!j.empty() && j.front().is_array()) {
        if (j.size() != static_cast<std::size_t>(d)) throw InputError(ctx + ": expected " + std::to_string(d) + " rows");
        for (std::size_t r = 0; r < j.size(); ++r) {
            const std::string rctx = ctx + "[" + std::to_string(r) + "]";
            if (!j[r].is_array() || j[r].size() != static_cast<std::size_t>(d)) {
                throw InputError(rctx + ": expected " + std::to_string(d) + " entries");
            }
            for (std::size_t c = 0; c < j[r].size(); ++c) a.push_back(number(j[r][c], rctx + "[" + std::to_string(c) + "]"));
        }
    } else {
        if (j.size() != static_cast<std::size_t>(d) * d) {
            throw InputError(ctx + ": expected " + std::to_string(d * d) + " entries");
        }
        for (std::size_t i = 0; i < j.size(); ++i) a.push_back(number(j[i], ctx + "[" + std::to_string(i) + "]"));
    }
    return Matrix(d, d, std::move(a));
}

SymMatrix symmetric(const json& j, int d, const std::string& ctx) {
    const Matrix m = matrix(j, d, ctx);
    double scale = 0.0, asym = 0.0;
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            scale = std::max(scale, std::abs(m(r, c)));
            asym = std::max(asym, std::abs(m(r, c) - m(c, r)));
        }
    }
    if (asym > 1e-9 * std::max(1.0, scale)) throw InputError(ctx + ": matrix is not symmetric");
    return SymMatrix(m);
}

json flat(const Matrix& m) { return json(std::vector<double>(m.data().begin(), m.data().end())); }

struct Entry {
    DyadicIndex index;
    const json* matrix;
    std::string ctx;
};

std::vector<Entry> entries(const json& j, const std::string& ctx) {
    const json& list = field(j, "entries", ctx);
    if (!list.is_array()) throw InputError(ctx + ".entries: expected an array");
    std::vector<Entry> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string ectx = ctx + ".entries[" + std::to_string(i) + "]";
        const int level = integer(field(list[i], "level", ectx), ectx + ".level");
        const json& pos = field(list[i], "position", ectx);
        if (!pos.is_number_integer()) throw InputError(ectx + ".position: expected an integer");
        const DyadicIndex idx{level, pos.get<std::int64_t>()};
        if (!idx.valid()) throw InputError(ectx + ": level/position outside the dyadic tree");
        out.push_back({idx, &field(list[i], "matrix", ectx), ectx + ".matrix"});
    }
    return out;
}

}  // namespace

WeightField weight_from_json(const json& j) {
    const std::string ctx = "weight";
    check_kind(j, "weight", ctx);
    const int d = dimension(j, ctx);
    const int depth = depth_of(j, ctx);
    const json& leaves = field(j, "leaves", ctx);
    if (!leaves.is_array() || leaves.size() != static_cast<std::size_t>(leaf_count(depth))) {
        throw InputError(ctx + ".leaves: expected " + std::to_string(leaf_count(depth)) + " matrices (2^depth)");
    }
    std::vector<SymMatrix> values;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        values.push_back(symmetric(leaves[i], d, ctx + ".leaves[" + std::to_string(i) + "]"));
    }
    return WeightField(d, depth, std::move(values));
}

VectorField function_from_json(const json& j) {
    const std::string ctx = "function";
    check_kind(j, "function", ctx);
    const int d = dimension(j, ctx);
    const int depth = depth_of(j, ctx);
    const json& leaves = field(j, "leaves", ctx);
    if (!leaves.is_array() || leaves.size() != static_cast<std::size_t>(leaf_count(depth))) {
        throw InputError(ctx + ".leaves: expected " + std::to_string(leaf_count(depth)) + " vectors (2^depth)");
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const std::string lctx = ctx + ".leaves[" + std::to_string(i) + "]";
        if (leaves[i].is_number() && d == 1) {
            values.push_back(number(leaves[i], lctx));
            continue;
        }
        if (!leaves[i].is_array() || leaves[i].size() != static_cast<std::size_t>(d)) {
            throw InputError(lctx + ": expected " + std::to_string(d) + " entries");
        }
        for (std::size_t k = 0; k < leaves[i].size(); ++k) values.push_back(number(leaves[i][k], lctx + "[" + std::to_string(k) + "]"));
    }
    return VectorField(d, depth, std::move(values));
}

MultiplierSymbol symbol_from_json(const json& j) {
    const std::string ctx = "symbol";
    check_kind(j, "symbol", ctx);
    MultiplierSymbol s(dimension(j, ctx));
    for (const Entry& e : entries(j, ctx)) s.set(e.index, matrix(*e.matrix, s.dim(), e.ctx));
    return s;
}

CarlesonSequence sequence_from_json(const json& j) {
    const std::string ctx = "sequence";
    check_kind(j, "carleson", ctx);
    CarlesonSequence a(dimension(j, ctx));
    for (const Entry& e : entries(j, ctx)) {
        const SymMatrix m = symmetric(*e.matrix, a.dim(), e.ctx);
        try {
            a.set(e.index, m);
        } catch (const InputError& err) {
            throw InputError(e.ctx + ": " + err.what());
        }
    }
    return a;
}

json to_json(const WeightField& w) {
    json leaves = json::array();
    for (const SymMatrix& m : w.leaf_values()) leaves.push_back(flat(m.matrix()));
    return {{"kind", "weight"}, {"dim", w.dim()}, {"depth", w.depth()}, {"leaves", leaves}};
}

json to_json(const VectorField& f) {
    json leaves = json::array();
    for (std::int64_t i = 0; i < f.leaves(); ++i) {
        const auto v = f.leaf(i);
        leaves.push_back(std::vector<double>(v.begin(), v.end()));
    }
    return {{"kind", "function"}, {"dim", f.dim()}, {"depth", f.depth()}, {"leaves", leaves}};
}

json to_json(const MultiplierSymbol& s) {
    json list = json::array();
    for (const auto& [i, m] : s.entries()) list.push_back({{"level", i.level}, {"position", i.position}, {"matrix", flat(m)}});
    return {{"kind", "symbol"}, {"dim", s.dim()}, {"entries", list}};
}

json to_json(const CarlesonSequence& a) {
    json list = json::array();
    for (const auto& [i, m] : a.entries()) {
        list.push_back({{"level", i.level}, {"position", i.position}, {"matrix", flat(m.matrix())}});
    }
    return {{"kind", "carleson"}, {"dim", a.dim()}, {"entries", list}};
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": invalid JSON (" + e.what() + ")");
    }
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot write file");
    out << j.dump(2) << '\n';
    if (!out) throw InputError(path + ": write failed");
}

}  // namespace matweight
