#include "gsr/sequencer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace gsr {

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::P: return "P";
        case GateKind::E: return "E";
        case GateKind::CZ_spin_ancilla: return "CZ_spin_ancilla";
        case GateKind::CZ_spin_photon: return "CZ_spin_photon";
        case GateKind::Hadamard: return "Hadamard";
        case GateKind::Measure: return "Measure";
    }
    return "?";
}

std::map<int, int> Schedule::feedback_passes() const {
    std::map<int, int> out;
    for (const auto& p : photons) out[p.id] = p.passes;
    return out;
}

namespace {

// Breadth-first ids of one tree's nodes, levels 1..d.
struct TreeIndex {
    const TreeGeometry* tree = nullptr;
    int base = 0;
    std::vector<long long> offset;  // offset[l] for l = 1..d

    TreeIndex(const TreeGeometry& t, int base_id) : tree(&t), base(base_id), offset(t.depth() + 2, 0) {
        for (int l = 1; l <= t.depth(); ++l) offset[l + 1] = offset[l] + t.level_count(l);
    }
    int id(int level, long long k) const { return base + static_cast<int>(offset[level] + k); }
    long long count(int level) const { return tree->level_count(level); }
    long long first_child(int level, long long k) const { return k * tree->b(level); }
    long long branch_of(int level, long long k) const { return k / (count(level) / tree->b(0)); }
};

class FlowBuilder {
public:
    FlowBuilder(Schedule& s, double tau, bool rigid) : s_(s), g_(s.gates), tau_(tau), rigid_(rigid) {
        tol_ = 1e-9 * std::max({g_.t_P, g_.t_E, g_.t_CZ, 1e-30});
    }

    double max_deficit() const { return max_deficit_; }

    void gate(GateKind kind, double duration, int target) {
        s_.events.push_back({kind, free_, duration, target});
        free_ += duration;
    }

    void emit(int id, GateKind kind, double duration, bool looped) {
        PhotonRecord& p = s_.photons[id];
        p.emitted = free_;
        p.output = free_;
        p.ready = free_ + duration;
        if (looped) p.loop_entries.push_back(free_);
        gate(kind, duration, id);
    }

    void scatter(int id) {
        PhotonRecord& p = s_.photons[id];
        double arrival = p.loop_entries.back() + tau_;
        int laps = 1;
        if (rigid_) {
            while (tau_ > 0.0 && arrival < free_ - tol_) {
                arrival += tau_;
                ++laps;
            }
        } else {
            max_deficit_ = std::max(max_deficit_, free_ - arrival);
        }
        free_ = std::max(free_, arrival);
        p.passes += laps;
        p.scatters.push_back(free_);
        p.loop_entries.push_back(free_);
        p.output = free_;
        p.ready = free_ + g_.t_CZ;
        gate(GateKind::CZ_spin_photon, g_.t_CZ, id);
    }

    // Idle so that the next small tree's E gate starts at least `gap` after
    // the previous one.
    void pad_small_tree(bool first, double gap, double lead_in) {
        if (!first) free_ = std::max(free_, last_e_ + gap - lead_in);
        last_e_ = free_ + lead_in;
    }

private:
    Schedule& s_;
    const GateTimes& g_;
    double tau_;
    bool rigid_;
    double tol_;
    double free_ = 0.0;
    double last_e_ = 0.0;
    double max_deficit_ = 0.0;
};

void init_photons(Schedule& s) {
    const TreeGeometry& enc = encoding_tree(s.geometry);
    s.photons.assign(static_cast<std::size_t>(photon_count(s.geometry)), {});
    auto fill_tree = [&](const TreeIndex& ix, bool rgs, int core) {
        for (int l = 1; l <= enc.depth(); ++l)
            for (long long k = 0; k < ix.count(l); ++k) {
                PhotonRecord& p = s.photons[ix.id(l, k)];
                p.id = ix.id(l, k);
                p.cls = rgs ? PhotonClass::encoding(l) : PhotonClass::tree(l);
                p.branch = rgs ? core : static_cast<int>(ix.branch_of(l, k));
            }
    };
    if (auto rgs = std::get_if<RgsGeometry>(&s.geometry)) {
        for (int c = 0; c < rgs->N; ++c) {
            s.photons[c].id = c;
            s.photons[c].cls = PhotonClass::arm();
            s.photons[c].branch = c;
            fill_tree(TreeIndex(enc, rgs->N + c * static_cast<int>(enc.photon_count())), true, c);
        }
    } else {
        fill_tree(TreeIndex(enc, 0), false, 0);
    }
}

std::vector<TreeIndex> core_indices(const Schedule& s) {
    const TreeGeometry& enc = encoding_tree(s.geometry);
    std::vector<TreeIndex> out;
    if (auto rgs = std::get_if<RgsGeometry>(&s.geometry)) {
        for (int c = 0; c < rgs->N; ++c) out.emplace_back(enc, rgs->N + c * static_cast<int>(enc.photon_count()));
    } else {
        out.emplace_back(enc, 0);
    }
    return out;
}

void feedback_flow(Schedule& s, FlowBuilder& f) {
    const GateTimes& g = s.gates;
    const TreeGeometry& t = encoding_tree(s.geometry);
    const int d = t.depth();
    const bool rgs = s.protocol == Protocol::rgs;
    const auto cores = core_indices(s);

    // Small trees leave the emitter no faster than the next phase consumes them.
    const int group = t.b(d - 2);
    const double boundary = d >= 3 ? g.t_E : (rgs ? g.t_E / g.beta : 0.0);
    const double lead_in = t.b(d - 1) * g.t_P;
    long long j = 0;
    for (const auto& ix : cores)
        for (long long k = 0; k < ix.count(d - 1); ++k, ++j) {
            f.pad_small_tree(j == 0, g.t_CZ + (j % group == 0 ? boundary : 0.0), lead_in);
            for (int c = 0; c < t.b(d - 1); ++c) f.emit(ix.id(d, ix.first_child(d - 1, k) + c), GateKind::P, g.t_P, false);
            f.emit(ix.id(d - 1, k), GateKind::E, g.t_E, true);
        }

    for (int l = d - 2; l >= 1; --l)
        for (const auto& ix : cores)
            for (long long k = 0; k < ix.count(l); ++k) {
                for (int c = 0; c < t.b(l); ++c) f.scatter(ix.id(l + 1, ix.first_child(l, k) + c));
                f.emit(ix.id(l, k), GateKind::E, g.t_E, true);
            }

    if (!rgs) {
        for (int k = 0; k < t.b(0); ++k) f.scatter(cores[0].id(1, k));
        return;
    }
    for (std::size_t c = 0; c < cores.size(); ++c) {
        for (int k = 0; k < t.b(0); ++k) f.scatter(cores[c].id(1, k));
        f.emit(static_cast<int>(c), GateKind::E, g.t_E / g.beta, false);
    }
    for (const auto& ix : cores)
        for (int k = 0; k < t.b(0); ++k) f.scatter(ix.id(1, k));
    f.gate(GateKind::Measure, g.t_M, -1);
}

void ancilla_node(Schedule& s, FlowBuilder& f, const TreeIndex& ix, int level, long long k, bool tree_protocol) {
    const GateTimes& g = s.gates;
    const TreeGeometry& t = *ix.tree;
    const int d = t.depth();
    const bool lead = tree_protocol && level == 1;
    if (lead) f.gate(GateKind::CZ_spin_ancilla, g.t_CZ, 0);
    for (int c = 0; c < t.b(level); ++c) {
        long long child = ix.first_child(level, k) + c;
        if (level + 1 == d)
            f.emit(ix.id(d, child), GateKind::P, g.t_P, false);
        else
            ancilla_node(s, f, ix, level + 1, child, tree_protocol);
    }
    if (!lead) f.gate(GateKind::CZ_spin_ancilla, g.t_CZ, level - 1);
    f.emit(ix.id(level, k), GateKind::E, lead ? g.beta * g.t_E : g.t_E, false);
}

void ancilla_flow(Schedule& s, FlowBuilder& f) {
    const GateTimes& g = s.gates;
    const TreeGeometry& t = encoding_tree(s.geometry);
    const auto cores = core_indices(s);
    if (s.protocol == Protocol::tree) {
        for (int k = 0; k < t.b(0); ++k) ancilla_node(s, f, cores[0], 1, k, true);
        return;
    }
    const int core_ancilla = t.depth() - 1;
    for (std::size_t c = 0; c < cores.size(); ++c) {
        for (int k = 0; k < t.b(0); ++k) ancilla_node(s, f, cores[c], 1, k, false);
        f.emit(static_cast<int>(c), GateKind::P, g.t_P, false);
        f.gate(GateKind::CZ_spin_ancilla, g.t_CZ, core_ancilla);
        f.gate(GateKind::CZ_spin_ancilla, g.t_CZ, core_ancilla);
        f.gate(GateKind::Measure, g.t_M, -1);
        f.gate(GateKind::Measure, g.t_M, core_ancilla);
    }
    f.gate(GateKind::Measure, g.t_M, -1);
}

Schedule replay(const Schedule& blank, double tau, bool rigid, double* deficit) {
    Schedule s = blank;
    FlowBuilder f(s, tau, rigid);
    if (s.scheme == Scheme::feedback)
        feedback_flow(s, f);
    else
        ancilla_flow(s, f);
    if (deficit) *deficit = f.max_deficit();
    return s;
}

void finalize(Schedule& s) {
    s.makespan = 0.0;
    s.busy_time = 0.0;
    for (const auto& e : s.events) {
        s.makespan = std::max(s.makespan, e.end());
        s.busy_time += e.duration;
    }
    // The entry after the last scatter is the exit to the channel.
    std::vector<std::pair<double, int>> edges;
    for (auto& p : s.photons) {
        if (!p.scatters.empty()) p.loop_entries.pop_back();
        for (std::size_t i = 0; i < p.scatters.size(); ++i) {
            edges.emplace_back(p.loop_entries[i], +1);
            edges.emplace_back(p.scatters[i], -1);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    int now = 0;
    s.feedback_occupancy = 0;
    for (const auto& [time, delta] : edges) {
        now += delta;
        s.feedback_occupancy = std::max(s.feedback_occupancy, now);
    }
    s.emission_order.resize(s.photons.size());
    std::iota(s.emission_order.begin(), s.emission_order.end(), 0);
    std::stable_sort(s.emission_order.begin(), s.emission_order.end(),
                     [&](int a, int b) { return s.photons[a].emitted < s.photons[b].emitted; });
}

}  // namespace

Schedule build_schedule(Protocol protocol, Scheme scheme, const Geometry& geometry, const GateTimes& gates) {
    if (protocol != protocol_of(geometry)) throw ValidationError("N", "protocol and geometry disagree");
    const TreeGeometry& t = encoding_tree(geometry);
    if (t.depth() < 2) throw ValidationError("branchings", "needs depth >= 2");
    if (auto rgs = std::get_if<RgsGeometry>(&geometry); rgs && (rgs->N < 2 || rgs->N % 2 != 0))
        throw ValidationError("N", "must be even and >= 2");

    Schedule blank;
    blank.protocol = protocol;
    blank.scheme = scheme;
    blank.geometry = geometry;
    blank.gates = gates;
    init_photons(blank);

    double tau = 0.0;
    if (scheme == Scheme::feedback) {
        // Grow the loop until every photon is back exactly when its CZ is due.
        const double scale = std::max({gates.t_P, gates.t_E, gates.t_CZ, 1e-30});
        for (int iter = 0; iter < 100000; ++iter) {
            double deficit = 0.0;
            replay(blank, tau, false, &deficit);
            if (deficit <= 1e-9 * scale) break;
            tau += deficit;
        }
    }
    Schedule s = replay(blank, tau, true, nullptr);
    s.loop_transit = tau;
    finalize(s);
    return s;
}

double required_delay(const Schedule& s) {
    const bool rgs = s.protocol == Protocol::rgs;
    std::map<int, double> earliest;
    for (const auto& p : s.photons) {
        bool lead = rgs ? p.cls.kind == PhotonClass::Kind::arm : p.cls.level == 1;
        if (lead) continue;
        auto [it, fresh] = earliest.emplace(p.branch, p.output);
        if (!fresh) it->second = std::min(it->second, p.output);
    }
    double delay = 0.0;
    for (const auto& p : s.photons) {
        bool lead = rgs ? p.cls.kind == PhotonClass::Kind::arm : p.cls.level == 1;
        if (!lead) continue;
        auto it = earliest.find(p.branch);
        if (it != earliest.end()) delay = std::max(delay, p.ready - it->second);
    }
    return delay;
}

FeedbackAudit feedback_audit(const Schedule& s, double v_feedback) {
    FeedbackAudit a;
    for (const auto& p : s.photons) {
        int key = p.cls.kind == PhotonClass::Kind::arm ? 0 : p.cls.level;
        auto [it, fresh] = a.passes_by_level.emplace(key, p.passes);
        if (!fresh) it->second = std::max(it->second, p.passes);
        a.max_passes = std::max(a.max_passes, p.passes);
        // Longest circulation divided into loop transits.
        if (p.passes == 0) continue;
        double wait = 0.0;
        for (std::size_t i = 0; i < p.scatters.size(); ++i) wait += p.scatters[i] - p.loop_entries[i];
        a.transit = std::max(a.transit, wait / p.passes);
    }
    a.L_feedback = a.transit * v_feedback;
    return a;
}

std::string to_trace(const Schedule& s) {
    std::ostringstream out;
    char line[160];
    for (const auto& e : s.events) {
        std::snprintf(line, sizeof line, "%s %.9e %.9e %d\n", to_string(e.kind).c_str(), e.start, e.duration,
                      e.target);
        out << line;
    }
    return out.str();
}

}  // namespace gsr
