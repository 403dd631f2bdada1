#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hamcenter/annulus.hpp"
#include "hamcenter/compactify.hpp"
#include "hamcenter/corpus.hpp"

namespace hamcenter {

struct RunConfig {
    std::string map_source;  // "builtin:NAME" or a path
    std::optional<Box> box;  // defaults to the map's working box
    int grid_n = 64;
    std::optional<double> h_max;
    double tol = 1e-6;
    int max_winding = 3;
    std::uint64_t seed = 42;
    bool enable_extended = false;
    bool timings = false;  // wall-clock timings make reports non-reproducible, so they are opt-in
    int sector_fan = 32;
    double sector_radius = 0.05;
};

/// Throws std::invalid_argument on a config that breaks the basic invariants.
void validate_config(const RunConfig& cfg);

/// Parses "xmin,xmax,ymin,ymax".
Box parse_box(const std::string& text);

enum ExitCode { kExitOk = 0, kExitInput = 2, kExitInconclusive = 3, kExitSchema = 4 };

struct CenterAnalysis {
    CenterRecord center;
    std::optional<AnnulusReport> annulus;
    GlobalCheck global;
    std::string error;  // e.g. annulus below resolution
};

struct PipelineResult {
    PipelineResult(RunConfig cfg, PlanarMap m, Box b) : config(std::move(cfg)), map(std::move(m)), box(b) {}

    RunConfig config;
    PlanarMap map;
    Box box;
    ZeroSearch zeros;
    std::vector<CenterAnalysis> centers;
    bool polynomial = false;
    std::optional<CompactifiedField> compactified;
    InfinityScan scan;
    std::optional<ContiVerdict> conti;
    std::vector<std::string> warnings;
    nlohmann::json timings = nlohmann::json::object();

    bool inconclusive() const;
};

enum class Stage { centers, annulus, full };

/// Runs the pipeline up to `stage`; input problems surface as InputError.
PipelineResult run_pipeline(const RunConfig& cfg, Stage stage = Stage::full);

nlohmann::json config_json(const RunConfig& cfg, const Box& box);
nlohmann::json map_json(const PlanarMap& map);
nlohmann::json center_json(const CenterAnalysis& c);
nlohmann::json compactification_json(const PipelineResult& r);
nlohmann::json report_json(const PipelineResult& r);

/// Structural checks on a full report; returns the list of violations.
std::vector<std::string> validate_report(const nlohmann::json& report);

}  // namespace hamcenter
