#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "muentropy/convex.hpp"
#include "muentropy/geometry.hpp"

namespace muentropy {

inline constexpr const char* kVersion = "0.1.0";

// System spec files:
// { "dim": n,
//   "halfspaces": [ {"normal": [...], "offset": c}, ... ],
//   "measure": "lattice" | {"facet_densities": [...], "interior_density": d} }
// Explicit facet densities must match the irredundant facet order.
ToricSystem read_system_spec(const std::string& path);
ToricSystem system_from_spec_text(const std::string& text);
std::string system_spec_text(const ToricSystem& system);  // normalized re-emit

// PA functions: {"pieces": [{"gradient": [...], "constant": c}, ...]}
std::string pa_text(const PiecewiseAffineConvex& q);
PiecewiseAffineConvex pa_from_text(const std::string& text, int expected_dim = -1);
PiecewiseAffineConvex read_pa(const std::string& path, int expected_dim = -1);

// FNV-1a content hash used to identify the input spec in manifests
std::string fnv1a_hex(const std::string& bytes);

struct RunManifest {
    std::string command;
    std::string spec_hash;
    std::string config;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    double wall_seconds = 0.0;

    // run-determining fields only (no wall time): embedded into CSV output
    std::string determinism_line() const;
    // full manifest for the .manifest.json sidecar
    std::string json_text() const;
};

// CSV with 17-significant-digit values, '.' decimal, a leading manifest
// comment line, and a sidecar <path>.manifest.json carrying wall time.
void write_csv(const std::string& path, const RunManifest& manifest,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_g17(double v);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace muentropy
