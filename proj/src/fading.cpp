#include "misobc/fading.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "misobc/error.hpp"

namespace misobc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent engine per (seed, stream, substream).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x632be59bd9b4e019ULL + sub));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sub)};
    return std::mt19937_64(seq);
}

}  // namespace

void FadingSpec::validate() const {
    if (users < 1 || antennas < 1 || states < 1) {
        throw DimensionError("fading spec needs users >= 1, antennas >= 1, states >= 1");
    }
    if (static_cast<int>(variances.size()) != users) {
        throw DimensionError("fading spec needs one variance per user");
    }
    for (double v : variances) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DimensionError("fading variances must be positive and finite");
        }
    }
}

FadingSpec FadingSpec::symmetric(int users, int antennas, int states, std::uint64_t seed,
                                 double variance) {
    FadingSpec spec;
    spec.users = users;
    spec.antennas = antennas;
    spec.states = states;
    spec.seed = seed;
    spec.variances.assign(static_cast<std::size_t>(std::max(users, 0)), variance);
    return spec;
}

ChannelSet::ChannelSet(std::vector<ChannelMatrix> states, std::vector<double> probabilities,
                       std::uint64_t seed)
    : states_(std::move(states)), probs_(std::move(probabilities)), seed_(seed) {
    if (states_.empty()) {
        throw DimensionError("channel set needs at least one state");
    }
    users_ = static_cast<int>(states_.front().rows());
    antennas_ = static_cast<int>(states_.front().cols());
    if (users_ < 1 || antennas_ < 1) {
        throw DimensionError("channel matrices must be at least 1 x 1");
    }
    for (const auto& h : states_) {
        if (h.rows() != users_ || h.cols() != antennas_) {
            throw DimensionError("all fading states must share the same K x M shape");
        }
        if (!h.allFinite()) {
            throw DimensionError("channel entries must be finite");
        }
    }
    const auto n = states_.size();
    if (probs_.empty()) {
        probs_.assign(n, 1.0 / static_cast<double>(n));
    } else {
        if (probs_.size() != n) {
            throw DimensionError("need one probability per fading state");
        }
        double total = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw DimensionError("state probabilities must be nonnegative");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw DimensionError("state probabilities must sum to 1");
        }
    }
}

void ChannelSet::write(std::ostream& os) const {
    const auto old_precision = os.precision();
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << users_ << ' ' << antennas_ << ' ' << size() << '\n';
    for (const auto& h : states_) {
        for (int k = 0; k < users_; ++k) {
            for (int i = 0; i < antennas_; ++i) {
                if (i > 0) os << ' ';
                os << h(k, i).real() << ' ' << h(k, i).imag();
            }
            os << '\n';
        }
    }
    const double uniform = 1.0 / static_cast<double>(size());
    const bool is_uniform = std::all_of(probs_.begin(), probs_.end(),
                                        [&](double p) { return p == uniform; });
    if (!is_uniform) {
        for (std::size_t n = 0; n < probs_.size(); ++n) {
            if (n > 0) os << ' ';
            os << probs_[n];
        }
        os << '\n';
    }
    os.precision(old_precision);
}

ChannelSet ChannelSet::read(std::istream& is) {
    long long k = 0, m = 0, n = 0;
    if (!(is >> k >> m >> n)) {
        throw IoError("channel file: missing 'K M N' header");
    }
    if (k < 1 || m < 1 || n < 1) {
        throw DimensionError("channel file: K, M, N must be positive");
    }
    std::vector<ChannelMatrix> states;
    states.reserve(static_cast<std::size_t>(n));
    for (long long s = 0; s < n; ++s) {
        ChannelMatrix h(k, m);
        for (long long row = 0; row < k; ++row) {
            for (long long col = 0; col < m; ++col) {
                double re = 0.0, im = 0.0;
                if (!(is >> re >> im)) {
                    throw IoError("channel file: truncated state block");
                }
                h(row, col) = Complex(re, im);
            }
        }
        states.push_back(std::move(h));
    }
    std::vector<double> probs;
    double p = 0.0;
    while (is >> p) {
        probs.push_back(p);
    }
    if (!is.eof()) {
        throw IoError("channel file: unparsable trailing content");
    }
    if (!probs.empty() && probs.size() != static_cast<std::size_t>(n)) {
        throw IoError("channel file: probability line must hold N values");
    }
    return ChannelSet(std::move(states), std::move(probs));
}

void ChannelSet::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write(os);
    if (!os) {
        throw IoError("write to '" + path + "' failed");
    }
}

ChannelSet ChannelSet::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open '" + path + "'");
    }
    return read(is);
}

ChannelSet generate(const FadingSpec& spec) {
    spec.validate();
    std::vector<ChannelMatrix> states;
    states.reserve(static_cast<std::size_t>(spec.states));
    for (int n = 0; n < spec.states; ++n) {
        ChannelMatrix h(spec.users, spec.antennas);
        for (int k = 0; k < spec.users; ++k) {
            auto engine = substream(spec.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
            std::normal_distribution<double> normal(0.0, std::sqrt(spec.variances[static_cast<std::size_t>(k)] / 2.0));
            for (int i = 0; i < spec.antennas; ++i) {
                const double re = normal(engine);
                const double im = normal(engine);
                h(k, i) = Complex(re, im);
            }
        }
        states.push_back(std::move(h));
    }
    return ChannelSet(std::move(states), {}, spec.seed);
}

RhoEstimate estimate_rho(const FadingSpec& spec, std::int64_t samples, int user) {
    spec.validate();
    if (user < 0 || user >= spec.users) {
        throw DimensionError("estimate_rho: user index out of range");
    }
    if (spec.antennas < 2) {
        throw DivergenceError("E[1/||h||^2] is infinite for a single-antenna Gaussian channel");
    }
    if (samples < 2) {
        throw DimensionError("estimate_rho needs at least two samples");
    }
    // Separate stream family from generate() so estimates stay independent of any ensemble.
    auto engine = substream(spec.seed ^ 0x5a5a5a5a5a5a5a5aULL, 0xfffffffeULL, static_cast<std::uint64_t>(user));
    std::normal_distribution<double> normal(0.0, std::sqrt(spec.variances[static_cast<std::size_t>(user)] / 2.0));
    // Welford accumulation of 1/||h||^2.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (int i = 0; i < 2 * spec.antennas; ++i) {
            const double x = normal(engine);
            norm2 += x * x;
        }
        const double value = 1.0 / norm2;
        const double delta = value - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (value - mean);
    }
    const double variance = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(variance / static_cast<double>(samples))};
}

}  // namespace misobc
