#include "misobc/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace misobc {

namespace {

void check_process(std::span<const double> gains, std::span<const double> probs, double r_star, double share) {
    if (gains.size() != probs.size() || gains.empty()) {
        throw DimensionError("gain process: gains and probabilities must have equal nonzero length");
    }
    if (!(r_star >= 0.0) || !(share > 0.0) || share > 1.0) {
        throw DimensionError("gain process: need r_star >= 0 and 0 < share <= 1");
    }
    for (double g : gains) {
        if (!(g >= 0.0) || !std::isfinite(g)) throw DimensionError("gains must be finite and nonnegative");
    }
}

// Expected rate per active slot at water level L.
double slot_rate(std::span<const double> gains, std::span<const double> probs, double level) {
    double r = 0.0;
    for (std::size_t n = 0; n < gains.size(); ++n) {
        const double x = level * gains[n];
        if (x > 1.0) r += probs[n] * std::log2(x);
    }
    return r;
}

}  // namespace

PrecoderSet coherent_precoders(const ChannelMatrix& h) {
    const auto k_users = h.rows();
    PrecoderSet out;
    out.beams = Eigen::MatrixXcd::Zero(h.cols(), k_users);
    out.gains = Eigen::VectorXd::Zero(k_users);
    out.degenerate.assign(static_cast<std::size_t>(k_users), false);
    for (Eigen::Index k = 0; k < k_users; ++k) {
        const double norm = h.row(k).norm();
        if (norm == 0.0) {
            out.degenerate[static_cast<std::size_t>(k)] = true;
            continue;
        }
        out.beams.col(k) = h.row(k).adjoint() / norm;
        out.gains(k) = norm * norm;
    }
    return out;
}

PrecoderSet zf_precoders(const ChannelMatrix& h) {
    const auto k_users = h.rows();
    const auto m = h.cols();
    if (k_users > m) {
        throw UnsupportedError("zero-forcing needs K <= M");
    }
    PrecoderSet out;
    out.beams = Eigen::MatrixXcd::Zero(m, k_users);
    out.gains = Eigen::VectorXd::Zero(k_users);
    out.degenerate.assign(static_cast<std::size_t>(k_users), false);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < k_users; ++k) {
        Eigen::VectorXcd b = h.row(k).adjoint();
        if (k_users > 1) {
            Eigen::MatrixXcd others(k_users - 1, m);
            for (Eigen::Index i = 0, r = 0; i < k_users; ++i) {
                if (i != k) others.row(r++) = h.row(i);
            }
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(others, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            Eigen::Index rank = 0;
            for (Eigen::Index i = 0; i < sv.size(); ++i) {
                if (sv(i) > 1e-12 * scale * std::max<double>(1.0, static_cast<double>(m))) ++rank;
            }
            const Eigen::MatrixXcd null = svd.matrixV().rightCols(m - rank);
            b = null * (null.adjoint() * b);
        }
        const double norm = b.norm();
        if (norm <= 1e-10 * std::max(1.0, h.row(k).norm())) {
            out.degenerate[static_cast<std::size_t>(k)] = true;
            continue;
        }
        out.beams.col(k) = b / norm;
        out.gains(k) = std::norm((h.row(k) * out.beams.col(k))(0));
    }
    return out;
}

WaterfillResult waterfill_power(std::span<const double> gains, std::span<const double> probs, double r_star,
                                double share) {
    check_process(gains, probs, r_star, share);
    WaterfillResult out;
    out.powers.assign(gains.size(), 0.0);
    if (r_star == 0.0) return out;
    const double g_max = *std::max_element(gains.begin(), gains.end());
    if (g_max <= 0.0) {
        throw InfeasibleError("water-filling: every gain is zero");
    }
    const double slot_target = r_star / share;
    double lo = 1.0 / g_max;  // rate 0
    double hi = 2.0 / g_max;
    while (slot_rate(gains, probs, hi) < slot_target) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 300; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double r = slot_rate(gains, probs, mid);
        if (std::abs(r - slot_target) <= 1e-12 * (1.0 + slot_target)) {
            lo = hi = mid;
            break;
        }
        (r < slot_target ? lo : hi) = mid;
        if (hi - lo <= 1e-16 * hi) break;
    }
    out.level = 0.5 * (lo + hi);
    for (std::size_t n = 0; n < gains.size(); ++n) {
        if (gains[n] > 0.0) out.powers[n] = std::max(0.0, out.level - 1.0 / gains[n]);
        out.average_power += share * probs[n] * out.powers[n];
    }
    return out;
}

double inversion_power(std::span<const double> gains, std::span<const double> probs, double r_star,
                       double share) {
    check_process(gains, probs, r_star, share);
    if (r_star == 0.0) return 0.0;
    const double need = std::exp2(r_star / share) - 1.0;
    double avg = 0.0;
    for (std::size_t n = 0; n < gains.size(); ++n) {
        if (probs[n] == 0.0) continue;
        if (gains[n] <= 0.0) {
            throw InfeasibleError("channel inversion: zero gain in a state with positive probability");
        }
        avg += share * probs[n] * need / gains[n];
    }
    return avg;
}

namespace {

template <class Precode>
double per_user_power(const ChannelSet& channels, std::span<const UserProfile> profile_list, double share,
                      Precode precode) {
    const int users = channels.users();
    const auto profiles = indexed_profiles(profile_list, users);
    std::vector<std::vector<double>> gains(static_cast<std::size_t>(users),
                                           std::vector<double>(static_cast<std::size_t>(channels.size())));
    for (int n = 0; n < channels.size(); ++n) {
        const auto set = precode(channels.state(n));
        for (int k = 0; k < users; ++k) gains[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = set.gains(k);
    }
    double total = 0.0;
    for (const auto& p : profiles) {
        const auto& g = gains[static_cast<std::size_t>(p.user_id)];
        total += p.traffic == TrafficClass::ndc
                     ? waterfill_power(g, channels.probabilities(), p.target_rate, share).average_power
                     : inversion_power(g, channels.probabilities(), p.target_rate, share);
    }
    return total;
}

}  // namespace

double tdma_power(const ChannelSet& channels, std::span<const UserProfile> profiles) {
    return per_user_power(channels, profiles, 1.0 / channels.users(), coherent_precoders);
}

double zf_sdma_power(const ChannelSet& channels, std::span<const UserProfile> profiles) {
    if (channels.users() > channels.antennas()) {
        throw UnsupportedError("zero-forcing needs K <= M");
    }
    return per_user_power(channels, profiles, 1.0, zf_precoders);
}

}  // namespace misobc
