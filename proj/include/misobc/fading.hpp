#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "misobc/types.hpp"

namespace misobc {

// Recipe for an i.i.d. block-fading ensemble: row k of every state is drawn
// from CN(0, variances[k] * I).
struct FadingSpec {
    int users = 1;
    int antennas = 1;
    std::vector<double> variances;  // one per user, > 0
    int states = 1;
    std::uint64_t seed = 0;

    void validate() const;

    // Same variance for every user.
    static FadingSpec symmetric(int users, int antennas, int states, std::uint64_t seed,
                                double variance = 1.0);
};

// Finite empirical ensemble of fading states. Immutable once built, so it can
// be shared freely between threads.
class ChannelSet {
public:
    // Empty probabilities mean uniform 1/N.
    ChannelSet(std::vector<ChannelMatrix> states, std::vector<double> probabilities = {},
               std::uint64_t seed = 0);

    int users() const { return users_; }
    int antennas() const { return antennas_; }
    int size() const { return static_cast<int>(states_.size()); }
    std::uint64_t seed() const { return seed_; }

    const ChannelMatrix& state(int n) const { return states_[static_cast<std::size_t>(n)]; }
    double probability(int n) const { return probs_[static_cast<std::size_t>(n)]; }
    std::span<const double> probabilities() const { return probs_; }
    std::span<const ChannelMatrix> states() const { return states_; }

    // Text format: "K M N" header, then N blocks of K lines with 2M reals
    // (re im re im ...). An optional trailing line of N reals carries the
    // state probabilities; without it the ensemble is uniform.
    void write(std::ostream& os) const;
    static ChannelSet read(std::istream& is);

    void save(const std::string& path) const;
    static ChannelSet load(const std::string& path);

private:
    std::vector<ChannelMatrix> states_;
    std::vector<double> probs_;
    std::uint64_t seed_ = 0;
    int users_ = 0;
    int antennas_ = 0;
};

// Deterministic for a fixed seed. Every (state, user) pair draws from its own
// substream so results do not depend on generation order.
ChannelSet generate(const FadingSpec& spec);

struct RhoEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo estimate of E[1 / ||h_k||^2] for one user of the spec. Throws
// DivergenceError when M = 1, where the expectation is infinite.
RhoEstimate estimate_rho(const FadingSpec& spec, std::int64_t samples, int user = 0);

}  // namespace misobc
