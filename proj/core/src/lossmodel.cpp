#include "gsr/lossmodel.hpp"

#include <algorithm>
#include <cmath>

namespace gsr {

namespace {

void require_probability(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(name, "must lie in [0,1]");
}

// Sum over l = from..to of prod_{i=first}^{l} b_i.
double partial_products(const TreeGeometry& t, int first, int from, int to) {
    double total = 0.0;
    for (int l = from; l <= to; ++l) {
        double p = 1.0;
        for (int i = first; i <= l; ++i) p *= t.b(i);
        total += p;
    }
    return total;
}

double bottom_product(const TreeGeometry& t, int first) {
    double p = 1.0;
    for (int i = first; i < t.depth(); ++i) p *= t.b(i);
    return p;
}

}  // namespace

double compose_loss(double mu_ext, double mu_coup, double mu_int, double mu_del) {
    require_probability(mu_ext, "mu_ext");
    require_probability(mu_coup, "mu_coup");
    require_probability(mu_int, "mu_int");
    require_probability(mu_del, "mu_del");
    return 1.0 - (1.0 - mu_ext) * (1.0 - mu_coup) * (1.0 - mu_int) * (1.0 - mu_del);
}

double mu_ext(Protocol protocol, double L, int m, double L_att) {
    if (m < 0) throw ValidationError("m", "must be >= 0");
    double segments = protocol == Protocol::tree ? (m + 1.0) : 2.0 * (m + 1.0);
    return -std::expm1(-L / (segments * L_att));
}

double fiber_loss(double length, double L_att) { return -std::expm1(-length / L_att); }

double feedback_length(const Geometry& geometry, const GateTimes& g, double v_feedback) {
    const TreeGeometry& t = encoding_tree(geometry);
    int d = t.depth();
    if (d < 2) throw ValidationError("branchings", "feedback line needs depth >= 2");
    double n1 = static_cast<double>(t.level_count(d - 1));
    double n2 = static_cast<double>(t.level_count(d - 2));
    double bracket = (n1 + n2 - 1.0) * g.t_E + t.b(d - 1) * (n1 - n2) * g.t_P;
    if (auto r = std::get_if<RgsGeometry>(&geometry)) bracket *= r->N;
    return bracket * v_feedback;
}

double delay_length(Scheme scheme, const Geometry& geometry, const GateTimes& g, double v_delay,
                    double L_feedback) {
    const TreeGeometry& t = encoding_tree(geometry);
    int d = t.depth();
    bool rgs = std::holds_alternative<RgsGeometry>(geometry);
    if (scheme == Scheme::feedback) {
        double tail = rgs ? 1.0 / std::get<RgsGeometry>(geometry).N : 1.0 / t.b(0);
        return (d - 1 + tail) * L_feedback;
    }
    if (rgs) {
        double internal = partial_products(t, 0, 0, d - 2);
        return ((1.0 + bottom_product(t, 0)) * g.t_P + internal * (g.t_E + g.t_CZ)) * v_delay;
    }
    // One level-1 branch must be emitted before its level-1 photon: every
    // product here runs over that branch only (b_1 onward), CZs included.
    double branch_internal = partial_products(t, 1, 1, d - 2);
    return (bottom_product(t, 1) * g.t_P + (g.beta + branch_internal) * g.t_E +
            branch_internal * g.t_CZ) *
           v_delay;
}

double mu_int(Scheme scheme, int n_feedback, double L_feedback, double L_att) {
    if (n_feedback < 0 || n_feedback > 2) throw ValidationError("n_feedback", "must be 0, 1 or 2");
    if (scheme == Scheme::ancilla) return 0.0;
    return fiber_loss(n_feedback * L_feedback, L_att);
}

int n_feedback_for(Protocol protocol, PhotonClass photon, int depth) {
    if (photon.kind == PhotonClass::Kind::arm) return 0;
    if (photon.level < 1 || photon.level > depth)
        throw ValidationError("level", "photon level outside 1..d");
    if (photon.level == depth) return 0;
    if (protocol == Protocol::rgs && photon.level == 1) return 2;
    return 1;
}

int max_feedback_passes(const Geometry& geometry) {
    Protocol p = protocol_of(geometry);
    int d = encoding_tree(geometry).depth();
    int worst = 0;
    for (int l = 1; l <= d; ++l) {
        auto cls = p == Protocol::tree ? PhotonClass::tree(l) : PhotonClass::encoding(l);
        worst = std::max(worst, n_feedback_for(p, cls, d));
    }
    return worst;
}

LossProfile::LossProfile(Scheme scheme, const Geometry& geometry, const GateTimes& gates,
                         const ChannelParams& channel, LossMode mode)
    : protocol_(protocol_of(geometry)),
      scheme_(scheme),
      mode_(mode),
      channel_(channel),
      depth_(encoding_tree(geometry).depth()) {
    if (scheme == Scheme::feedback) L_feedback_ = feedback_length(geometry, gates, channel.v_feedback);
    L_delay_ = delay_length(scheme, geometry, gates, channel.v_delay, L_feedback_);
    mu_del_ = fiber_loss(L_delay_, channel.L_att);
    mu_int_worst_ = mu_int(scheme, max_feedback_passes(geometry), L_feedback_, channel.L_att);
    mu_int_level_.assign(depth_ + 1, 0.0);
    for (int l = 1; l <= depth_; ++l) {
        auto cls = protocol_ == Protocol::tree ? PhotonClass::tree(l) : PhotonClass::encoding(l);
        mu_int_level_[l] = mu_int(scheme, n_feedback_for(protocol_, cls, depth_), L_feedback_, channel.L_att);
    }
}

LinkBudget LossProfile::at(int m) const { return with_channel_loss(mu_ext(protocol_, channel_.L, m, channel_.L_att)); }

LinkBudget LossProfile::without_channel() const { return with_channel_loss(0.0); }

LinkBudget LossProfile::with_channel_loss(double channel) const {
    LinkBudget b;
    b.mu_ext = channel;
    b.mu_coup = channel_.mu_coup;
    b.mu_int = mu_int_worst_;
    b.mu_del = mu_del_;
    b.mu = compose_loss(b.mu_ext, b.mu_coup, b.mu_int, b.mu_del);
    b.L_feedback = L_feedback_;
    b.L_delay = L_delay_;
    b.mu_level.assign(depth_ + 1, b.mu);
    b.mu_arm = b.mu;
    if (mode_ == LossMode::per_level) {
        // Lead photons (tree level 1, RGS arms) bypass the delay line.
        for (int l = 1; l <= depth_; ++l) {
            bool lead = protocol_ == Protocol::tree && l == 1;
            b.mu_level[l] = compose_loss(b.mu_ext, b.mu_coup, mu_int_level_[l], lead ? 0.0 : mu_del_);
        }
        b.mu_arm = compose_loss(b.mu_ext, b.mu_coup, 0.0, 0.0);
    }
    return b;
}

LinkBudget build_link_budget(const RunConfig& config, const GateTimes& gates) {
    LossProfile profile(config.scheme, config.geometry, gates, config.channel, config.loss_mode);
    return profile.at(config.m);
}

}  // namespace gsr
