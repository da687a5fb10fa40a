#include "causalbench/posthoc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "causalbench/errors.hpp"

namespace causalbench {
namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

void check_family(std::span<const PairHypothesis> hypotheses, const ExhaustiveSetFamily& family) {
    if (hypotheses.size() != family.n_hypotheses()) {
        throw ValidationError("exhaustive-set family for k=" + std::to_string(family.k) + " expects " +
                              std::to_string(family.n_hypotheses()) + " hypotheses, got " +
                              std::to_string(hypotheses.size()));
    }
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        if (hypotheses[i].index != static_cast<int>(i) + 1)
            throw ValidationError("hypotheses must be supplied in index order");
        if (!(hypotheses[i].p_raw >= 0.0 && hypotheses[i].p_raw <= 1.0))
            throw ValidationError("raw p-value outside [0, 1] for H" + std::to_string(i + 1));
    }
}

double min_p(std::span<const PairHypothesis> hypotheses, const ExhaustiveSet& set) {
    double best = 1.0;
    for (int idx : set.indices) best = std::min(best, hypotheses[static_cast<std::size_t>(idx - 1)].p_raw);
    return best;
}

}  // namespace

int pair_index(std::size_t a, std::size_t b, std::size_t k) {
    if (a == b || a >= k || b >= k) throw DomainError("invalid model pair");
    if (a > b) std::swap(a, b);
    // pairs (0,1),(0,2),...,(0,k-1),(1,2),...
    const std::size_t before = a * (2 * k - a - 1) / 2;
    return static_cast<int>(before + (b - a - 1)) + 1;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<PairHypothesis> pairwise_p_values(const RankSummary& ranks) {
    const std::size_t k = ranks.n_models();
    if (k < 2 || ranks.avg_ranks.size() != k || ranks.n_sims == 0)
        throw ValidationError("rank summary is incomplete");
    const double kd = static_cast<double>(k);
    const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(ranks.n_sims)));

    std::vector<PairHypothesis> out;
    out.reserve(k * (k - 1) / 2);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            PairHypothesis h;
            h.index = static_cast<int>(out.size()) + 1;
            h.a = a;
            h.b = b;
            h.model_a = ranks.models[a];
            h.model_b = ranks.models[b];
            h.z = (ranks.avg_ranks[a] - ranks.avg_ranks[b]) / se;
            // 2 * Phi(-|z|)
            h.p_raw = std::min(1.0, std::erfc(std::abs(h.z) / std::sqrt(2.0)));
            out.push_back(std::move(h));
        }
    }
    return out;
}

std::vector<PairHypothesis> hypotheses_from_p_values(const std::vector<std::string>& models,
                                                     std::span<const ExternalPValue> p_values) {
    const std::size_t k = models.size();
    if (k < 2) throw ValidationError("need at least 2 models");
    const auto find = [&](const std::string& name) {
        const auto it = std::find(models.begin(), models.end(), name);
        if (it == models.end()) throw LookupError("unknown model '" + name + "'");
        return static_cast<std::size_t>(it - models.begin());
    };

    const std::size_t m = k * (k - 1) / 2;
    std::vector<PairHypothesis> out(m);
    std::vector<bool> filled(m, false);
    for (const auto& pv : p_values) {
        const std::size_t a = find(pv.model_a);
        const std::size_t b = find(pv.model_b);
        if (a == b) throw ValidationError("pair compares '" + pv.model_a + "' with itself");
        if (!(pv.p >= 0.0 && pv.p <= 1.0))
            throw ValidationError("p-value outside [0, 1] for " + pv.model_a + " vs " + pv.model_b);
        const int idx = pair_index(a, b, k);
        auto& h = out[static_cast<std::size_t>(idx - 1)];
        if (filled[static_cast<std::size_t>(idx - 1)])
            throw ValidationError("duplicate p-value for " + pv.model_a + " vs " + pv.model_b);
        filled[static_cast<std::size_t>(idx - 1)] = true;
        h.index = idx;
        h.a = std::min(a, b);
        h.b = std::max(a, b);
        h.model_a = models[h.a];
        h.model_b = models[h.b];
        h.z = 0.0;
        h.p_raw = pv.p;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!filled[i]) throw ValidationError("missing p-value for hypothesis H" + std::to_string(i + 1));
    }
    return out;
}

ExhaustiveSetFamily enumerate_exhaustive_sets(int k) {
    if (k < 2) throw DomainError("exhaustive sets need at least 2 models");
    if (k > kMaxExhaustiveModels) {
        throw CapacityError("exhaustive-set enumeration is capped at k=" + std::to_string(kMaxExhaustiveModels) +
                            " models: the number of set partitions (Bell numbers) grows super-exponentially, "
                            "k=" + std::to_string(k) + " is out of range");
    }
    const auto ku = static_cast<std::size_t>(k);

    ExhaustiveSetFamily family;
    family.k = k;
    std::set<std::uint64_t> seen;

    // Restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i-1]).
    std::vector<int> label(ku, 0);
    std::vector<int> prefix_max(ku, 0);
    while (true) {
        ExhaustiveSet set;
        for (std::size_t a = 0; a < ku; ++a) {
            for (std::size_t b = a + 1; b < ku; ++b) {
                if (label[a] == label[b]) {
                    const int idx = pair_index(a, b, ku);
                    set.indices.push_back(idx);
                    set.mask |= std::uint64_t{1} << (idx - 1);
                }
            }
        }
        std::sort(set.indices.begin(), set.indices.end());
        if (seen.insert(set.mask).second) {
            set.partition = label;
            family.sets.push_back(std::move(set));
        }

        // advance to the next restricted growth string
        std::size_t i = ku - 1;
        while (i > 0 && label[i] == prefix_max[i - 1] + 1) --i;
        if (i == 0) break;
        ++label[i];
        prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
        for (std::size_t j = i + 1; j < ku; ++j) {
            label[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }

    std::sort(family.sets.begin(), family.sets.end(), [](const ExhaustiveSet& x, const ExhaustiveSet& y) {
        if (x.indices.size() != y.indices.size()) return x.indices.size() < y.indices.size();
        return x.indices < y.indices;
    });
    return family;
}

std::vector<int> acceptance_set(std::span<const PairHypothesis> hypotheses,
                                const ExhaustiveSetFamily& family, double alpha) {
    check_alpha(alpha);
    check_family(hypotheses, family);
    std::uint64_t accepted = 0;
    for (const auto& set : family.sets) {
        if (set.indices.empty()) continue;
        const double size = static_cast<double>(set.indices.size());
        // min p > alpha/|I|, compared as |I| * min p > alpha so it rounds
        // identically to the adjusted p-values
        if (size * min_p(hypotheses, set) > alpha) accepted |= set.mask;
    }
    std::vector<int> out;
    for (int i = 0; i < 64; ++i) {
        if (accepted & (std::uint64_t{1} << i)) out.push_back(i + 1);
    }
    return out;
}

std::vector<std::size_t> PosthocReport::display_order() const {
    std::vector<std::size_t> order(hypotheses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return hypotheses[a].apv < hypotheses[b].apv; });
    return order;
}

PosthocReport bergmann_hommel_apv(std::span<const PairHypothesis> hypotheses,
                                  const ExhaustiveSetFamily& family, double alpha) {
    check_alpha(alpha);
    check_family(hypotheses, family);

    std::vector<double> v(hypotheses.size(), 0.0);
    for (const auto& set : family.sets) {
        if (set.indices.empty()) continue;
        const double candidate = static_cast<double>(set.indices.size()) * min_p(hypotheses, set);
        for (int idx : set.indices) {
            auto& slot = v[static_cast<std::size_t>(idx - 1)];
            slot = std::max(slot, candidate);
        }
    }

    PosthocReport report;
    report.alpha = alpha;
    report.acceptance_set = acceptance_set(hypotheses, family, alpha);
    const std::set<int> accepted(report.acceptance_set.begin(), report.acceptance_set.end());
    report.hypotheses.reserve(hypotheses.size());
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        AdjustedHypothesis adj{hypotheses[i], std::min(v[i], 1.0), Decision::Retained};
        adj.decision = adj.apv <= alpha ? Decision::Rejected : Decision::Retained;
        const bool in_a = accepted.contains(hypotheses[i].index);
        if (in_a == (adj.decision == Decision::Rejected)) {
            throw Error("acceptance set disagrees with adjusted p-value for H" +
                        std::to_string(hypotheses[i].index));
        }
        report.hypotheses.push_back(std::move(adj));
    }
    return report;
}

}  // namespace causalbench
