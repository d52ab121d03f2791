#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsr/keyrate.hpp"
#include "gsr/params.hpp"

namespace gsr {

struct SearchSpace {
    std::vector<int> tree_depths{2, 3};
    int b_min = 1;
    int b_max = 30;
    std::vector<int> N_values = default_N_values();
    int encoding_depth = 2;
    int m_plus_1_min = 1;
    int m_plus_1_max = 1200;

    static std::vector<int> default_N_values();
    void validate(Protocol protocol) const;
};

std::vector<Geometry> enumerate_geometries(Protocol protocol, const SearchSpace& space);

struct OptimizeOptions {
    unsigned workers = 0;  // 0: hardware concurrency
    bool prune = true;
};

struct OptimumRecord {
    RunConfig config;  // geometry and m of the optimum
    EvalResult result;
    double R_eff = 0.0;
    double spacing = 0.0;  // m
    std::string geometry;
    double L_feedback = 0.0;
    double L_delay = 0.0;
    bool secure = false;
    std::uint64_t geometries = 0;
    std::uint64_t geometries_pruned = 0;
    std::uint64_t evaluations = 0;
};

// Strict total order used for ties: higher R_eff, then fewer photons, then
// smaller m, then the geometry string.
bool better(const EvalResult& a, const EvalResult& b);

// base supplies protocol, scheme, emitter, channel, gate settings and model
// switches; its geometry and m are replaced by the search.
OptimumRecord optimize(const RunConfig& base, const SearchSpace& space, const OptimizeOptions& options = {});

struct SweepRow {
    double gamma_ghz = 0.0;
    double t_coh = 0.0;
    OptimumRecord optimum;
};

// Rows ordered gamma-major, then t_coh.
std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<double>& gamma_ghz,
                            const std::vector<double>& t_coh, const SearchSpace& space,
                            const OptimizeOptions& options = {});

double normalized_difference(double R_feedback, double R_ancilla);

struct ScanRow {
    double L = 0.0;  // m
    OptimumRecord optimum;
};

std::vector<ScanRow> distance_scan(const RunConfig& base, const std::vector<double>& L_values,
                                   const SearchSpace& space, const OptimizeOptions& options = {});

// CSV with one row per record. Header lines start with '#'.
inline constexpr const char* kCsvColumns =
    "gamma_ghz,tcoh_s,protocol,scheme,reff_hz,spacing_km,geometry,m,n,L_feedback_m,L_delay_m,secure,L_km";

std::string csv_row(double gamma_ghz, double t_coh, const OptimumRecord& record);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::vector<std::string>& header);
void write_csv(std::ostream& out, const std::vector<ScanRow>& rows, const std::vector<std::string>& header);
std::string to_json(const OptimumRecord& record);

}  // namespace gsr
