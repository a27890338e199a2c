#include "muentropy/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace muentropy {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ToricSystem system_from_spec_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("spec parse error: ") + e.what());
    }
    if (!j.contains("dim") || !j.contains("halfspaces"))
        throw Error("spec parse error: missing dim or halfspaces");
    const int n = j["dim"].get<int>();
    std::vector<HalfSpace> hs;
    for (const auto& h : j["halfspaces"]) {
        HalfSpace half;
        auto normal = h.at("normal").get<std::vector<double>>();
        if (int(normal.size()) != n) throw Error("spec parse error: normal dimension mismatch");
        half.normal.resize(n);
        for (int d = 0; d < n; ++d) half.normal(d) = normal[std::size_t(d)];
        half.offset = h.at("offset").get<double>();
        hs.push_back(std::move(half));
    }
    Polytope p = Polytope::from_halfspaces(std::move(hs));
    if (!j.contains("measure") || (j["measure"].is_string() && j["measure"] == "lattice"))
        return lattice_system(p);
    const auto& m = j["measure"];
    double density = m.value("interior_density", 1.0);
    auto facet = m.at("facet_densities").get<std::vector<double>>();
    if (facet.size() != p.facets().size())
        throw Error(
            "spec parse error: facet_densities must match the irredundant facet count (" +
            std::to_string(p.facets().size()) + ")");
    return make_system(std::move(p), density, std::move(facet));
}

ToricSystem read_system_spec(const std::string& path) {
    return system_from_spec_text(read_text_file(path));
}

std::string system_spec_text(const ToricSystem& system) {
    json j;
    j["dim"] = system.dim();
    json hs = json::array();
    for (const auto& h : system.polytope.halfspaces()) {
        json one;
        one["normal"] = std::vector<double>(h.normal.data(), h.normal.data() + h.normal.size());
        one["offset"] = h.offset;
        hs.push_back(std::move(one));
    }
    j["halfspaces"] = std::move(hs);
    json measure;
    measure["interior_density"] = system.interior_density;
    measure["facet_densities"] = system.facet_densities;
    j["measure"] = std::move(measure);
    return j.dump(2) + "\n";
}

std::string pa_text(const PiecewiseAffineConvex& q) {
    json j;
    json pieces = json::array();
    for (const auto& p : q.pieces()) {
        json one;
        one["gradient"] =
            std::vector<double>(p.gradient.data(), p.gradient.data() + p.gradient.size());
        one["constant"] = p.constant;
        pieces.push_back(std::move(one));
    }
    j["pieces"] = std::move(pieces);
    return j.dump(2) + "\n";
}

PiecewiseAffineConvex pa_from_text(const std::string& text, int expected_dim) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("pa parse error: ") + e.what());
    }
    std::vector<AffineFn> pieces;
    for (const auto& p : j.at("pieces")) {
        AffineFn fn;
        auto g = p.at("gradient").get<std::vector<double>>();
        if (expected_dim >= 0 && int(g.size()) != expected_dim)
            throw Error("pa parse error: gradient dimension mismatch");
        fn.gradient.resize(int(g.size()));
        for (std::size_t d = 0; d < g.size(); ++d) fn.gradient(int(d)) = g[d];
        fn.constant = p.at("constant").get<double>();
        pieces.push_back(std::move(fn));
    }
    if (pieces.empty()) throw Error("pa parse error: empty piece list");
    return PiecewiseAffineConvex(std::move(pieces));
}

PiecewiseAffineConvex read_pa(const std::string& path, int expected_dim) {
    return pa_from_text(read_text_file(path), expected_dim);
}

std::string RunManifest::determinism_line() const {
    json j;
    j["command"] = command;
    j["spec_hash"] = spec_hash;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = version;
    return "# manifest " + j.dump();
}

std::string RunManifest::json_text() const {
    json j;
    j["command"] = command;
    j["spec_hash"] = spec_hash;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    return j.dump(2) + "\n";
}

void write_csv(const std::string& path, const RunManifest& manifest,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    out << manifest.determinism_line() << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ",";
        out << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_g17(row[i]);
        }
        out << "\n";
    }
    write_text_file(path, out.str());
    write_text_file(path + ".manifest.json", manifest.json_text());
}

}  // namespace muentropy
