#include "gsr/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "json.hpp"

namespace gsr {

namespace {

constexpr std::uint64_t kBlock = 1 << 14;

void check_probability(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(name, "must lie in [0,1]");
}

// Breadth-first layout with contiguous children.
struct Layout {
    TreeGeometry tree;
    std::vector<int> offset;  // offset[l], l = 1..d+1

    explicit Layout(const TreeGeometry& t) : tree(t), offset(t.depth() + 2, 0) {
        for (int l = 1; l <= t.depth(); ++l) offset[l + 1] = offset[l] + static_cast<int>(t.level_count(l));
    }
    int size() const { return offset[tree.depth() + 1]; }
    int id(int level, int k) const { return offset[level] + k; }
    int child(int level, int k, int c) const { return offset[level + 1] + k * tree.b(level) + c; }
};

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t block) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
        engine_.seed(seq);
    }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool coin() { return uniform() < 0.5; }

private:
    std::mt19937_64 engine_;
};

// Survival, flips and Z outcomes of one sampled tree.
struct TreeSample {
    const Layout* layout;
    std::vector<char> alive, flip, zav, zerr;

    explicit TreeSample(const Layout& l)
        : layout(&l), alive(l.size()), flip(l.size()), zav(l.size()), zerr(l.size()) {}

    void draw(Rng& rng, double mu, double eps) {
        const double flip_edge = mu + (1.0 - mu) * eps;
        for (int i = 0; i < layout->size(); ++i) {
            double u = rng.uniform();
            alive[i] = u >= mu;
            flip[i] = alive[i] && u < flip_edge;
        }
    }

    // Branch through child c of node (level, k): usable when c survived and
    // every grandchild has a Z outcome. Returns -1 when unusable, else its error.
    int branch(int level, int k, int c) const {
        const Layout& L = *layout;
        int id = L.child(level, k, c);
        if (!alive[id]) return -1;
        int parity = flip[id];
        for (int g = 0; g < L.tree.b(level + 1); ++g) {
            int gid = L.child(level + 1, k * L.tree.b(level) + c, g);
            if (!zav[gid]) return -1;
            parity ^= zerr[gid];
        }
        return parity;
    }

    // Majority vote over usable branches of node (level, k); ties by coin.
    // Returns -1 when no branch is usable.
    int vote(Rng& rng, int level, int k) const {
        int ok = 0, wrong = 0;
        for (int c = 0; c < layout->tree.b(level); ++c) {
            int e = branch(level, k, c);
            if (e < 0) continue;
            ++ok;
            wrong += e;
        }
        if (ok == 0) return -1;
        if (2 * wrong == ok) return rng.coin();
        return 2 * wrong > ok;
    }

    // Z outcomes bottom-up, indirect preferred.
    void resolve(Rng& rng) {
        const Layout& L = *layout;
        const int d = L.tree.depth();
        for (int k = 0; k < static_cast<int>(L.tree.level_count(d)); ++k) {
            int id = L.id(d, k);
            zav[id] = alive[id];
            zerr[id] = flip[id];
        }
        for (int l = d - 1; l >= 1; --l)
            for (int k = 0; k < static_cast<int>(L.tree.level_count(l)); ++k) {
                int id = L.id(l, k);
                int v = vote(rng, l, k);
                zav[id] = v >= 0 || alive[id];
                zerr[id] = v >= 0 ? v : flip[id];
            }
    }
};

// Decode with the first surviving level-1 photon measured in X.
// Returns -1 on failure, else whether the logical outcome is wrong.
int decode_tree(const TreeSample& s) {
    const Layout& L = *s.layout;
    const int b0 = L.tree.b(0);
    int x = -1;
    for (int k = 0; k < b0; ++k)
        if (s.alive[L.id(1, k)]) {
            x = k;
            break;
        }
    if (x < 0) return -1;
    int err_x = s.flip[L.id(1, x)];
    int err_children = 0;
    for (int c = 0; c < L.tree.b(1); ++c) {
        int id = L.child(1, x, c);
        if (!s.zav[id]) return -1;
        err_children ^= s.zerr[id];
    }
    int err_others = 0;
    for (int k = 0; k < b0; ++k) {
        if (k == x) continue;
        int id = L.id(1, k);
        if (!s.zav[id]) return -1;
        err_others ^= s.zerr[id];
    }
    return err_x | err_children | err_others;
}

struct Tally {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    std::uint64_t errors = 0;
    Tally& operator+=(const Tally& o) {
        trials += o.trials;
        hits += o.hits;
        errors += o.errors;
        return *this;
    }
};

// Runs blocks in parallel and sums integer tallies, so the result does not
// depend on the worker count.
template <class BlockFn>
Tally run_blocks(const McOptions& opt, BlockFn fn) {
    const std::uint64_t blocks = (opt.trials + kBlock - 1) / kBlock;
    unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(blocks, 1)));
    std::vector<Tally> partial(workers);
    std::atomic<std::uint64_t> next{0};
    auto work = [&](unsigned w) {
        for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) {
            std::uint64_t n = std::min(kBlock, opt.trials - b * kBlock);
            Rng rng(opt.seed, b);
            partial[w] += fn(rng, n);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    Tally total;
    for (const auto& p : partial) total += p;
    return total;
}

OracleReport make_report(std::uint64_t trials, std::uint64_t given, std::uint64_t hits, std::uint64_t seed) {
    OracleReport r;
    r.trials = trials;
    r.conditioned = given;
    r.seed = seed;
    if (given > 0) {
        r.estimate = static_cast<double>(hits) / static_cast<double>(given);
        r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(given));
    }
    return r;
}

void check_trials(const McOptions& opt) {
    if (opt.trials < 10000) throw ValidationError("trials", "must be >= 10000");
}

}  // namespace

ExhaustiveTree::ExhaustiveTree(const TreeGeometry& tree) {
    if (tree.depth() < 2) throw ValidationError("branchings", "needs depth >= 2");
    if (tree.photon_count() > kExhaustiveLimit) throw ValidationError("branchings", "too many photons to enumerate");
    Layout L(tree);
    TreeSample s(L);
    const int n = L.size();
    counts_.assign(n + 1, 0.0);
    Rng unused(0, 0);  // ties never arise without flips
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        int lost = 0;
        for (int i = 0; i < n; ++i) {
            s.alive[i] = (mask >> i) & 1u;
            s.flip[i] = 0;
            lost += !s.alive[i];
        }
        s.resolve(unused);
        if (decode_tree(s) >= 0) counts_[lost] += 1.0;
    }
}

double ExhaustiveTree::success(double mu) const {
    check_probability(mu, "mu");
    const int n = static_cast<int>(counts_.size()) - 1;
    double total = 0.0;
    for (int k = 0; k <= n; ++k)
        if (counts_[k] > 0.0) total += counts_[k] * std::pow(mu, k) * std::pow(1.0 - mu, n - k);
    return total;
}

double exhaustive_tree_success(const TreeGeometry& tree, double mu) { return ExhaustiveTree(tree).success(mu); }

OracleReport mc_tree_logical_error(const TreeGeometry& tree, double mu, double eps_sp, const McOptions& opt) {
    check_probability(mu, "mu");
    check_probability(eps_sp, "eps_sp");
    check_trials(opt);
    if (tree.depth() < 2) throw ValidationError("branchings", "needs depth >= 2");
    Layout L(tree);
    Tally t = run_blocks(opt, [&](Rng& rng, std::uint64_t n) {
        TreeSample s(L);
        Tally out;
        for (std::uint64_t i = 0; i < n; ++i) {
            s.draw(rng, mu, eps_sp);
            s.resolve(rng);
            int e = decode_tree(s);
            ++out.trials;
            if (e < 0) continue;
            ++out.hits;
            out.errors += static_cast<std::uint64_t>(e);
        }
        return out;
    });
    return make_report(t.trials, t.hits, t.errors, opt.seed);
}

RgsOracleReport mc_rgs_link(const RgsGeometry& rgs, double mu, double eps_sp, const McOptions& opt) {
    check_probability(mu, "mu");
    check_probability(eps_sp, "eps_sp");
    check_trials(opt);
    if (rgs.N < 2 || rgs.N % 2 != 0) throw ValidationError("N", "must be even and >= 2");
    if (rgs.encoding.depth() < 2) throw ValidationError("branchings", "encoding needs depth >= 2");
    Layout L(rgs.encoding);
    const int pairs = rgs.N / 2;
    const int b0 = rgs.encoding.b(0);
    const double flip_edge = mu + (1.0 - mu) * eps_sp;

    Tally t = run_blocks(opt, [&](Rng& rng, std::uint64_t n) {
        TreeSample s(L);
        Tally out;
        for (std::uint64_t i = 0; i < n; ++i) {
            ++out.trials;
            // Bell measurements on arm pairs; the first success is used.
            int chosen = -1, arm_error = 0;
            for (int p = 0; p < pairs; ++p) {
                double u1 = rng.uniform(), u2 = rng.uniform(), coin = rng.uniform();
                if (chosen < 0 && u1 >= mu && u2 >= mu && coin < 0.5) {
                    chosen = p;
                    arm_error = (u1 < flip_edge) | (u2 < flip_edge);
                }
            }
            if (chosen < 0) continue;
            bool ok = true;
            int error = arm_error;
            // Two cores measured in X, the remaining N-2 in Z.
            for (int core = 0; core < rgs.N && ok; ++core) {
                s.draw(rng, mu, eps_sp);
                s.resolve(rng);
                if (core < 2) {
                    int v = s.vote(rng, 0, 0);
                    if (v < 0) ok = false;
                    else error |= v;
                } else {
                    int parity = 0;
                    for (int k = 0; k < b0; ++k) {
                        int id = L.id(1, k);
                        if (!s.zav[id]) {
                            ok = false;
                            break;
                        }
                        parity ^= s.zerr[id];
                    }
                    error |= parity;
                }
            }
            if (!ok) continue;
            ++out.hits;
            out.errors += static_cast<std::uint64_t>(error);
        }
        return out;
    });
    RgsOracleReport r;
    r.success = make_report(t.trials, t.trials, t.hits, opt.seed);
    r.infidelity = make_report(t.trials, t.hits, t.errors, opt.seed);
    return r;
}

std::string to_json(const OracleReport& r) {
    nlohmann::ordered_json j;
    j["estimate"] = r.estimate;
    j["std_error"] = r.std_error;
    j["trials"] = r.trials;
    j["conditioned"] = r.conditioned;
    j["seed"] = r.seed;
    j["algorithm"] = r.algorithm;
    return j.dump();
}

}  // namespace gsr
