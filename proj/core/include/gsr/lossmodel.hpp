#pragma once

#include <vector>

#include "gsr/params.hpp"

namespace gsr {

// Which photons a loss or pass count refers to.
struct PhotonClass {
    enum class Kind { tree_level, encoding_level, arm };
    Kind kind = Kind::tree_level;
    int level = 0;  // 1..d for tree/encoding photons, ignored for arms

    static PhotonClass tree(int level) { return {Kind::tree_level, level}; }
    static PhotonClass encoding(int level) { return {Kind::encoding_level, level}; }
    static PhotonClass arm() { return {Kind::arm, 0}; }
    friend bool operator==(const PhotonClass&, const PhotonClass&) = default;
};

struct LinkBudget {
    double mu_ext = 0.0;
    double mu_coup = 0.0;
    double mu_int = 0.0;
    double mu_del = 0.0;
    double mu = 0.0;
    double L_feedback = 0.0;  // m
    double L_delay = 0.0;     // m
    // Per-level composed loss, index 1..d (index 0 unused). In worst-case
    // mode every entry equals mu.
    std::vector<double> mu_level;
    double mu_arm = 0.0;  // RGS arm photons
};

double compose_loss(double mu_ext, double mu_coup, double mu_int, double mu_del);

double mu_ext(Protocol protocol, double L, int m, double L_att);

// 1 - exp(-length/L_att)
double fiber_loss(double length, double L_att);

double feedback_length(const Geometry& geometry, const GateTimes& gates, double v_feedback);

double delay_length(Scheme scheme, const Geometry& geometry, const GateTimes& gates,
                    double v_delay, double L_feedback);

double mu_int(Scheme scheme, int n_feedback, double L_feedback, double L_att);

int n_feedback_for(Protocol protocol, PhotonClass photon, int depth);

// Largest n_feedback over all transmitted photon classes.
int max_feedback_passes(const Geometry& geometry);

// Loss that does not depend on the node count: feedback and delay lines are
// fixed by the geometry, only mu_ext changes with m.
class LossProfile {
public:
    LossProfile(Scheme scheme, const Geometry& geometry, const GateTimes& gates,
                const ChannelParams& channel, LossMode mode);

    LinkBudget at(int m) const;
    // Same budget with mu_ext = 0.
    LinkBudget without_channel() const;
    double L_feedback() const { return L_feedback_; }
    double L_delay() const { return L_delay_; }

private:
    LinkBudget with_channel_loss(double mu_ext) const;

    Protocol protocol_;
    Scheme scheme_;
    LossMode mode_;
    ChannelParams channel_;
    int depth_;
    double L_feedback_ = 0.0;
    double L_delay_ = 0.0;
    double mu_del_ = 0.0;
    double mu_int_worst_ = 0.0;
    std::vector<double> mu_int_level_;
};

LinkBudget build_link_budget(const RunConfig& config, const GateTimes& gates);

}  // namespace gsr
