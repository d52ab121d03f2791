#include "gsr/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace gsr {

namespace {

// r vanishes below this fidelity (the threshold itself sits near 0.874).
constexpr double kFidelityFloor = 0.87;

void atomic_max(std::atomic<double>& target, double value) {
    double seen = target.load();
    while (value > seen && !target.compare_exchange_weak(seen, value)) {
    }
}

unsigned worker_count(unsigned requested) {
    return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

void add_trees(std::vector<Geometry>& out, std::vector<int>& b, int depth, const SearchSpace& s) {
    if (static_cast<int>(b.size()) == depth) {
        out.emplace_back(TreeGeometry(b));
        return;
    }
    for (int v = s.b_min; v <= s.b_max; ++v) {
        b.push_back(v);
        add_trees(out, b, depth, s);
        b.pop_back();
    }
}

std::vector<TreeGeometry> trees_of_depth(int depth, const SearchSpace& s) {
    std::vector<Geometry> tmp;
    std::vector<int> b;
    add_trees(tmp, b, depth, s);
    std::vector<TreeGeometry> out;
    for (auto& g : tmp) out.push_back(std::get<TreeGeometry>(g));
    return out;
}

struct Candidate {
    Geometry geometry;
    double bound = 0.0;
    long long photons = 0;
    std::string name;
};

// Largest node count m+1 at which the fidelity can still clear the floor.
int fidelity_cap(Protocol protocol, double eps_sp) {
    if (eps_sp <= 0.0) return std::numeric_limits<int>::max();
    double per_link = protocol == Protocol::tree ? std::log1p(-eps_sp) : 2.0 * std::log1p(-eps_sp);
    double cap = std::log(kFidelityFloor) / per_link;
    return cap > 1e9 ? std::numeric_limits<int>::max() : static_cast<int>(std::ceil(cap));
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

std::vector<int> SearchSpace::default_N_values() {
    std::vector<int> out;
    for (int n = 2; n <= 48; n += 2) out.push_back(n);
    return out;
}

void SearchSpace::validate(Protocol protocol) const {
    if (b_min < 1 || b_max < b_min) throw ValidationError("branchings", "empty branching range");
    if (m_plus_1_min < 1 || m_plus_1_max < m_plus_1_min) throw ValidationError("m", "empty node range");
    if (protocol == Protocol::tree) {
        if (tree_depths.empty()) throw ValidationError("branchings", "no tree depths");
        for (int d : tree_depths)
            if (d < 2) throw ValidationError("branchings", "tree depth must be >= 2");
    } else {
        if (N_values.empty()) throw ValidationError("N", "no N values");
        for (int n : N_values)
            if (n < 2 || n % 2 != 0) throw ValidationError("N", "must be even and >= 2");
        if (encoding_depth < 2) throw ValidationError("branchings", "encoding depth must be >= 2");
    }
}

std::vector<Geometry> enumerate_geometries(Protocol protocol, const SearchSpace& space) {
    space.validate(protocol);
    std::vector<Geometry> out;
    if (protocol == Protocol::tree) {
        for (int d : space.tree_depths)
            for (auto& t : trees_of_depth(d, space)) out.emplace_back(std::move(t));
    } else {
        auto encodings = trees_of_depth(space.encoding_depth, space);
        for (int n : space.N_values)
            for (const auto& e : encodings) out.emplace_back(RgsGeometry(n, e));
    }
    return out;
}

bool better(const EvalResult& a, const EvalResult& b) {
    if (a.R_eff != b.R_eff) return a.R_eff > b.R_eff;
    if (a.N_ph != b.N_ph) return a.N_ph < b.N_ph;
    if (a.m != b.m) return a.m < b.m;
    return a.geometry < b.geometry;
}

OptimumRecord optimize(const RunConfig& base, const SearchSpace& space, const OptimizeOptions& options) {
    auto geometries = enumerate_geometries(base.protocol, space);
    auto config_for = [&](const Geometry& g, int m) {
        RunConfig c = base;
        c.geometry = g;
        c.m = m;
        return c;
    };

    std::vector<Candidate> cands;
    cands.reserve(geometries.size());
    for (auto& g : geometries) {
        GeometryEvaluator ev(config_for(g, space.m_plus_1_min - 1));
        Candidate c;
        c.bound = ev.rate_bound() * (1.0 + 1e-9);
        c.photons = photon_count(g);
        c.name = to_string(g);
        c.geometry = std::move(g);
        cands.push_back(std::move(c));
    }
    // Most promising first so the incumbent rises early.
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.photons != b.photons) return a.photons < b.photons;
        return a.name < b.name;
    });

    std::atomic<double> incumbent{0.0};
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> pruned{0}, evaluations{0};
    std::mutex merge;
    bool have_best = false;
    EvalResult best;
    Geometry best_geometry;

    auto work = [&] {
        bool local_have = false;
        EvalResult local;
        Geometry local_geometry;
        std::uint64_t local_evals = 0;
        for (std::size_t i; (i = next.fetch_add(1)) < cands.size();) {
            const Candidate& c = cands[i];
            if (options.prune && (c.bound < incumbent.load() || c.bound <= 0.0)) {
                pruned.fetch_add(1);
                continue;
            }
            GeometryEvaluator ev(config_for(c.geometry, space.m_plus_1_min - 1));
            int cap = std::min(space.m_plus_1_max, fidelity_cap(base.protocol, ev.base_errors().eps_sp));
            for (int mp1 = space.m_plus_1_min; mp1 <= cap; ++mp1) {
                const int m = mp1 - 1;
                if (options.prune) {
                    double b = ev.rate_bound_at(m);
                    if (b < incumbent.load() || b <= 0.0) continue;
                }
                EvalResult r = ev.at(m);
                ++local_evals;
                if (r.R_eff <= 0.0) continue;
                if (!local_have || better(r, local)) {
                    local = r;
                    local_geometry = c.geometry;
                    local_have = true;
                    atomic_max(incumbent, r.R_eff);
                }
            }
        }
        evaluations.fetch_add(local_evals);
        std::lock_guard lock(merge);
        if (local_have && (!have_best || better(local, best))) {
            best = local;
            best_geometry = local_geometry;
            have_best = true;
        }
    };
    unsigned workers = worker_count(options.workers);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    OptimumRecord rec;
    if (!have_best) {
        // No secure configuration: report the smallest graph at the fewest nodes.
        auto smallest = std::min_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            return a.photons != b.photons ? a.photons < b.photons : a.name < b.name;
        });
        best_geometry = smallest->geometry;
        best = GeometryEvaluator(config_for(best_geometry, space.m_plus_1_min - 1)).at(space.m_plus_1_min - 1);
        best.R_eff = 0.0;
    }
    rec.config = config_for(best_geometry, best.m);
    rec.result = best;
    rec.R_eff = best.R_eff;
    rec.spacing = best.spacing;
    rec.geometry = best.geometry;
    rec.L_feedback = best.L_feedback;
    rec.L_delay = best.L_delay;
    rec.secure = have_best && best.secure;
    rec.geometries = cands.size();
    rec.geometries_pruned = pruned.load();
    rec.evaluations = evaluations.load();
    return rec;
}

std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<double>& gamma_ghz,
                            const std::vector<double>& t_coh, const SearchSpace& space,
                            const OptimizeOptions& options) {
    if (gamma_ghz.empty() || t_coh.empty()) throw ValidationError("grid", "grids must be nonempty");
    std::vector<SweepRow> rows;
    for (double g : gamma_ghz)
        for (double t : t_coh) {
            RunConfig c = base;
            c.emitter = EmitterParams::from_ghz(g, t);
            c.emitter.validate();
            rows.push_back({g, t, optimize(c, space, options)});
        }
    return rows;
}

double normalized_difference(double R_feedback, double R_ancilla) {
    if (!(R_feedback >= 0.0) || !(R_ancilla >= 0.0)) throw ValidationError("R_eff", "rates must be >= 0");
    double sum = R_feedback + R_ancilla;
    return sum > 0.0 ? (R_feedback - R_ancilla) / sum : 0.0;
}

std::vector<ScanRow> distance_scan(const RunConfig& base, const std::vector<double>& L_values,
                                   const SearchSpace& space, const OptimizeOptions& options) {
    std::vector<ScanRow> rows;
    for (double L : L_values) {
        if (!(L > 0.0)) throw ValidationError("L_km", "must be > 0");
        RunConfig c = base;
        c.channel.L = L;
        rows.push_back({L, optimize(c, space, options)});
    }
    return rows;
}

std::string csv_row(double gamma_ghz, double t_coh, const OptimumRecord& r) {
    const EvalResult& e = r.result;
    std::string out;
    out += format_number(gamma_ghz) + ",";
    out += (std::isinf(t_coh) ? std::string("inf") : format_number(t_coh)) + ",";
    out += to_string(e.protocol) + "," + to_string(e.scheme) + ",";
    out += format_number(r.R_eff) + ",";
    out += format_number(r.spacing / 1e3) + ",";
    out += r.geometry + ",";
    out += std::to_string(e.m) + "," + std::to_string(e.n) + ",";
    out += format_number(r.L_feedback) + "," + format_number(r.L_delay) + ",";
    out += r.secure ? "true" : "false";
    out += "," + format_number(r.config.channel.L / 1e3);
    return out;
}

namespace {
void write_header(std::ostream& out, const std::vector<std::string>& header) {
    for (const auto& line : header) out << "# " << line << "\n";
    out << kCsvColumns << "\n";
}
}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::vector<std::string>& header) {
    write_header(out, header);
    for (const auto& r : rows) out << csv_row(r.gamma_ghz, r.t_coh, r.optimum) << "\n";
}

void write_csv(std::ostream& out, const std::vector<ScanRow>& rows, const std::vector<std::string>& header) {
    write_header(out, header);
    for (const auto& r : rows) {
        const auto& e = r.optimum.config.emitter;
        out << csv_row(e.gamma_ghz(), e.t_coh, r.optimum) << "\n";
    }
}

std::string to_json(const OptimumRecord& r) {
    nlohmann::ordered_json j;
    j["reff_hz"] = r.R_eff;
    j["spacing_km"] = r.spacing / 1e3;
    j["geometry"] = r.geometry;
    j["m"] = r.result.m;
    j["n"] = r.result.n;
    j["L_feedback_m"] = r.L_feedback;
    j["L_delay_m"] = r.L_delay;
    j["secure"] = r.secure;
    j["geometries"] = r.geometries;
    j["geometries_pruned"] = r.geometries_pruned;
    j["evaluations"] = r.evaluations;
    j["result"] = nlohmann::ordered_json::parse(to_json(r.result));
    return j.dump();
}

}  // namespace gsr
