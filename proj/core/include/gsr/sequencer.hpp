#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsr/lossmodel.hpp"
#include "gsr/params.hpp"

namespace gsr {

enum class GateKind { P, E, CZ_spin_ancilla, CZ_spin_photon, Hadamard, Measure };

std::string to_string(GateKind kind);

struct GateEvent {
    GateKind kind = GateKind::P;
    double start = 0.0;
    double duration = 0.0;
    // Photon id for P, E and spin-photon CZ; ancilla id for spin-ancilla CZ;
    // -1 for a measurement of the emitter spin.
    int target = -1;
    double end() const { return start + duration; }
};

struct PhotonRecord {
    int id = 0;
    PhotonClass cls;
    int branch = 0;           // level-1 ancestor (trees) or core index (RGS)
    double emitted = 0.0;     // start of the emitting gate
    double ready = 0.0;       // fully emitted and done scattering
    double output = 0.0;      // leaves the generator for the channel
    std::vector<double> loop_entries;
    std::vector<double> scatters;  // CZ start times
    int passes = 0;
};

struct Schedule {
    Protocol protocol = Protocol::tree;
    Scheme scheme = Scheme::ancilla;
    Geometry geometry;
    GateTimes gates;
    std::vector<GateEvent> events;
    std::vector<PhotonRecord> photons;  // indexed by id
    std::vector<int> emission_order;
    double makespan = 0.0;
    double busy_time = 0.0;
    double loop_transit = 0.0;  // feedback loop round trip, s
    int feedback_occupancy = 0;

    std::map<int, int> feedback_passes() const;
};

// Photon ids: trees number levels 1..d breadth first. RGS numbers the N
// arms first, then each core's encoding tree breadth first.
Schedule build_schedule(Protocol protocol, Scheme scheme, const Geometry& geometry, const GateTimes& gates);

// Smallest uniform delay that lets every lead photon (tree level 1, RGS
// arm) be measured before the rest of its branch. Seconds.
double required_delay(const Schedule& schedule);

struct FeedbackAudit {
    int max_passes = 0;
    std::map<int, int> passes_by_level;  // level -> max passes; arms under 0
    double transit = 0.0;
    double L_feedback = 0.0;
};

FeedbackAudit feedback_audit(const Schedule& schedule, double v_feedback);

// One event per line: kind, start, duration, target.
std::string to_trace(const Schedule& schedule);

}  // namespace gsr
