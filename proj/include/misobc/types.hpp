#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace misobc {

using Complex = std::complex<double>;

// K x M downlink channel; row k is user k's 1 x M vector h_k.
using ChannelMatrix = Eigen::MatrixXcd;

// Dual-MAC transmit powers q_k, one per user, in units of the unit noise power.
using PowerVector = Eigen::VectorXd;

// Rates in bits per complex dimension.
using RateVector = Eigen::VectorXd;

// Per-user weights beta_k (mu_k for NDC users, delta_k for DC users).
using WeightVector = Eigen::VectorXd;

// Successive-decoding order over users 0..K-1. Position 0 holds the user with
// the largest weight; it is decoded last and sees no interference.
class DecodingOrder {
public:
    DecodingOrder() = default;
    explicit DecodingOrder(std::vector<int> perm);

    static DecodingOrder identity(int users);

    int size() const { return static_cast<int>(perm_.size()); }
    int operator[](int position) const { return perm_[static_cast<std::size_t>(position)]; }
    const std::vector<int>& permutation() const { return perm_; }

    // Position of a user within the order.
    int rank_of(int user) const;

    friend bool operator==(const DecodingOrder&, const DecodingOrder&) = default;

private:
    std::vector<int> perm_;
};

}  // namespace misobc
