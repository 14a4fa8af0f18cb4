#pragma once

#include <span>
#include <vector>

#include "misobc/fading.hpp"
#include "misobc/scheduler.hpp"

namespace misobc {

// Unit-norm beamformers b_k (columns, M x K) and the resulting scalar gains
// g_k = |h_k b_k|^2. Users whose beam is undefined (zero channel, or no
// interference-free direction under ZF) get a zero column and gain 0.
struct PrecoderSet {
    Eigen::MatrixXcd beams;
    Eigen::VectorXd gains;
    std::vector<bool> degenerate;
};

// b_k = h_k^H / ||h_k||.
PrecoderSet coherent_precoders(const ChannelMatrix& h);

// b_k = normalized projection of h_k^H onto the null space of the other rows.
// Throws UnsupportedError when K > M.
PrecoderSet zf_precoders(const ChannelMatrix& h);

// Scalar gain process of one user: gains[n] with probabilities probs[n].
struct WaterfillResult {
    double average_power = 0.0;
    std::vector<double> powers;   // per-state slot powers
    double level = 0.0;           // water level 1 / lambda
};

// Minimum average power meeting the average rate r_star. A user active a
// fraction `share` of each block with slot power p adds share * p to the
// average power and share * log2(1 + p g) to the rate. Slot powers follow
// p = (level - 1/g)^+. Throws InfeasibleError when every gain is zero and
// r_star > 0.
WaterfillResult waterfill_power(std::span<const double> gains, std::span<const double> probs, double r_star,
                                double share = 1.0);

// Constant rate r_star in every state: slot power (2^{r_star/share} - 1)/g,
// average share * E[slot power]. Throws InfeasibleError on a zero gain.
double inversion_power(std::span<const double> gains, std::span<const double> probs, double r_star,
                       double share = 1.0);

// TDMA with coherent precoding: K equal slots per block, per-class power
// control per user. Returns the total average power.
double tdma_power(const ChannelSet& channels, std::span<const UserProfile> profiles);

// ZF-based SDMA: all users simultaneously on interference-free beams.
double zf_sdma_power(const ChannelSet& channels, std::span<const UserProfile> profiles);

}  // namespace misobc
